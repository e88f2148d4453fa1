//! Long-format curve CSV: one row per curve and grid point,
//! `curve_id,group,t,c1,…,cp`.

use crate::{Error, Result};
use dirout_core::{Curve, FunctionalGroup, Grid};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

/// Groups read from a curve CSV, in order of first appearance, with the
/// original curve ids.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub groups: Vec<FunctionalGroup>,
    pub curve_ids: Vec<Vec<String>>,
}

impl CurveTable {
    pub fn grid(&self) -> &Grid {
        self.groups[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.groups[0].dim()
    }

    /// One line per group: label and size, then grid length and dimension.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for g in &self.groups {
            out.push_str(&format!("group {}: n={}\n", g.label(), g.len()));
        }
        out.push_str(&format!("m={} p={}\n", self.grid().len(), self.dim()));
        out
    }

    /// All curves pooled into one group.
    pub fn pooled(&self, label: &str) -> Result<FunctionalGroup> {
        let curves = self.groups.iter().flat_map(|g| g.curves().iter().cloned()).collect();
        Ok(FunctionalGroup::new(label, self.grid().clone(), curves)?)
    }
}

struct Pending {
    group: usize,
    t: Vec<f64>,
    values: Vec<Vec<f64>>,
    first_line: u64,
}

pub fn read_curves(path: impl AsRef<Path>) -> Result<CurveTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    read_curves_from(file)
}

pub fn read_curves_from(reader: impl Read) -> Result<CurveTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names.len() < 4 || names[..3] != ["curve_id", "group", "t"] {
        return Err(Error::Format { line: 1, message: "header must start with curve_id,group,t and list at least one component".into() });
    }
    let p = names.len() - 3;
    let mut group_labels: Vec<String> = Vec::new();
    let mut curve_order: Vec<String> = Vec::new();
    let mut curves: HashMap<String, Pending> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != p + 3 {
            return Err(Error::Format { line, message: format!("expected {} fields, found {}", p + 3, record.len()) });
        }
        let number = |i: usize| -> Result<f64> {
            let cell = &record[i];
            if cell.is_empty() {
                return Err(Error::Format { line, message: format!("missing value in column '{}'", names[i]) });
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Format { line, message: format!("non-numeric value '{cell}' in column '{}'", names[i]) })?;
            if !v.is_finite() {
                return Err(Error::Format { line, message: format!("non-finite value in column '{}'", names[i]) });
            }
            Ok(v)
        };
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::Format { line, message: "missing curve_id".into() });
        }
        let label = &record[1];
        let group = match group_labels.iter().position(|g| g == label) {
            Some(i) => i,
            None => {
                group_labels.push(label.to_string());
                group_labels.len() - 1
            }
        };
        let t = number(2)?;
        let values = (3..p + 3).map(number).collect::<Result<Vec<_>>>()?;
        let entry = curves.entry(id.clone()).or_insert_with(|| {
            curve_order.push(id.clone());
            Pending { group, t: Vec::new(), values: Vec::new(), first_line: line }
        });
        if entry.group != group {
            return Err(Error::Format { line, message: format!("curve '{id}' changes group") });
        }
        if entry.t.last().is_some_and(|&last| t <= last) {
            return Err(Error::Format { line, message: format!("t values of curve '{id}' are not strictly increasing") });
        }
        entry.t.push(t);
        entry.values.push(values);
    }
    let Some(first) = curve_order.first() else {
        return Err(Error::Format { line: 1, message: "no data rows".into() });
    };
    let grid_t = curves[first].t.clone();
    let grid = Grid::new(grid_t.clone()).map_err(|e| Error::Format { line: curves[first].first_line, message: e.to_string() })?;
    let mut members: Vec<Vec<Curve>> = vec![Vec::new(); group_labels.len()];
    let mut ids: Vec<Vec<String>> = vec![Vec::new(); group_labels.len()];
    for id in &curve_order {
        let c = &curves[id];
        if c.t != grid_t {
            return Err(Error::Format {
                line: c.first_line,
                message: format!("curve '{id}' is sampled on a different grid than curve '{first}'"),
            });
        }
        let vals = c.values.concat();
        members[c.group].push(Curve::new(grid_t.len(), p, vals)?);
        ids[c.group].push(id.clone());
    }
    let groups = group_labels
        .into_iter()
        .zip(members)
        .map(|(label, cs)| FunctionalGroup::new(label, grid.clone(), cs))
        .collect::<dirout_core::Result<Vec<_>>>()?;
    Ok(CurveTable { groups, curve_ids: ids })
}

/// Writes `groups` in long format. Curve ids are `{group}_{index}` unless
/// `ids` is given.
pub fn write_curves(writer: impl Write, groups: &[FunctionalGroup], ids: Option<&[Vec<String>]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let p = groups.first().map_or(1, FunctionalGroup::dim);
    let mut header = vec!["curve_id".to_string(), "group".into(), "t".into()];
    header.extend((1..=p).map(|k| format!("c{k}")));
    w.write_record(&header)?;
    for (gi, g) in groups.iter().enumerate() {
        for (j, c) in g.curves().iter().enumerate() {
            let id = match ids {
                Some(ids) => ids[gi][j].clone(),
                None => format!("{}_{j}", g.label()),
            };
            for (i, &t) in g.grid().points().iter().enumerate() {
                let mut row = vec![id.clone(), g.label().to_string(), t.to_string()];
                row.extend(c.at(i).iter().map(f64::to_string));
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_curves_file(path: impl AsRef<Path>, groups: &[FunctionalGroup], ids: Option<&[Vec<String>]>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    write_curves(std::io::BufWriter::new(file), groups, ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_table() {
        let text = "curve_id,group,t,c1,c2\na,x,0.5,1,2\na,x,1,3,4\nb,y,0.5,5,6\nb,y,1,7,8\n";
        let table = read_curves_from(text.as_bytes()).unwrap();
        assert_eq!(table.groups.len(), 2);
        assert_eq!(table.groups[1].label(), "y");
        assert_eq!(table.groups[1].curves()[0].at(1), &[7.0, 8.0]);
        assert_eq!(table.curve_ids, vec![vec!["a".to_string()], vec!["b".to_string()]]);
        assert_eq!(table.report(), "group x: n=1\ngroup y: n=1\nm=2 p=2\n");
    }

    #[test]
    fn errors_name_the_line() {
        let bad = "curve_id,group,t,c1\na,x,0.5,1\na,x,1,oops\n";
        let err = read_curves_from(bad.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("oops"), "{err}");
        let missing = "curve_id,group,t,c1\na,x,0.5,\n";
        assert!(read_curves_from(missing.as_bytes()).unwrap_err().to_string().contains("line 2"));
        let ragged = "curve_id,group,t,c1\na,x,0.5,1\na,x,1,2\nb,x,0.5,1\nb,x,0.9,2\n";
        assert!(read_curves_from(ragged.as_bytes()).unwrap_err().to_string().contains("different grid"));
        let header = "id,group,t,c1\n";
        assert!(read_curves_from(header.as_bytes()).is_err());
    }
}
