//! Per-curve `(MO, VO, FO)` tables for outlyingness scatter plots.

use crate::Result;
use dirout_core::outlyingness::Reference;
use dirout_core::{FunctionalGroup, OutlyingnessSummary};
use std::io::Write;

/// Summaries of every curve in `group` against `reference`.
pub fn summaries(group: &FunctionalGroup, reference: &FunctionalGroup) -> Result<Vec<OutlyingnessSummary>> {
    if group.grid() != reference.grid() || group.dim() != reference.dim() {
        return Err(dirout_core::Error::Shape("group and reference must share grid and dimension".into()).into());
    }
    let r = Reference::new(reference)?;
    Ok(group.curves().iter().map(|c| r.summarize(c)).collect::<dirout_core::Result<_>>()?)
}

/// Writes `curve_id,MO_1,…,MO_p,VO,FO`, one row per curve of `group`.
pub fn emit_diagnostics(writer: impl Write, group: &FunctionalGroup, ids: &[String], reference: &FunctionalGroup) -> Result<()> {
    let rows = summaries(group, reference)?;
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["curve_id".to_string()];
    header.extend((1..=group.dim()).map(|k| format!("MO_{k}")));
    header.extend(["VO".to_string(), "FO".to_string()]);
    w.write_record(&header)?;
    for (id, s) in ids.iter().zip(&rows) {
        let mut row = vec![id.clone()];
        row.extend(s.mo.iter().map(f64::to_string));
        row.push(s.vo.to_string());
        row.push(s.fo.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
