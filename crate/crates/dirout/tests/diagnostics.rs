use dirout::diagnostics::{emit_diagnostics, summaries};
use dirout_core::simulate::{generate, Dataset, GeneratorSpec};
use dirout_core::{Curve, FunctionalGroup, Grid};

fn parse(buf: &[u8]) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_reader(buf);
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().skip(1).map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn rows_follow_the_decomposition() {
    let reference = generate(&GeneratorSpec::new(Dataset::D4, 0, 30, 1)).unwrap();
    let group = generate(&GeneratorSpec::new(Dataset::D4, 1, 12, 2)).unwrap();
    let ids: Vec<String> = (0..12).map(|j| format!("c{j}")).collect();
    let mut buf = Vec::new();
    emit_diagnostics(&mut buf, &group, &ids, &reference).unwrap();
    let (header, rows) = parse(&buf);
    assert_eq!(header, ["curve_id", "MO_1", "MO_2", "VO", "FO"]);
    assert_eq!(rows.len(), 12);
    for r in &rows {
        let fo = r[0] * r[0] + r[1] * r[1] + r[2];
        assert!((r[3] - fo).abs() <= 1e-9 * (1.0 + r[3]), "{r:?}");
    }
}

#[test]
fn median_curve_row_is_zero() {
    // odd sample: the per-point median is a reference value
    let grid = Grid::right_endpoints(5).unwrap();
    let curves: Vec<Curve> =
        [-2.0, 0.0, 1.0, 3.0, 7.0].iter().map(|&l| Curve::univariate((0..5).map(|i| l + 0.1 * i as f64).collect()).unwrap()).collect();
    let reference = FunctionalGroup::new("r", grid.clone(), curves).unwrap();
    let median = Curve::univariate((0..5).map(|i| 1.0 + 0.1 * i as f64).collect()).unwrap();
    let group = FunctionalGroup::new("g", grid, vec![median]).unwrap();
    let mut buf = Vec::new();
    emit_diagnostics(&mut buf, &group, &["m".into()], &reference).unwrap();
    let (_, rows) = parse(&buf);
    assert_eq!(rows, vec![vec![0.0, 0.0, 0.0]]);
}

#[test]
fn mismatched_grids_are_rejected() {
    let reference = generate(&GeneratorSpec::new(Dataset::D1, 0, 10, 1)).unwrap();
    let group = generate(&GeneratorSpec::new(Dataset::D1, 0, 3, 1).with_grid(Grid::right_endpoints(20).unwrap())).unwrap();
    assert!(summaries(&group, &reference).is_err());
}
