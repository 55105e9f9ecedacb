use std::fs;

use gpcompare::compare::{intersect_ranges, parse_bounds};
use gpcompare::ingest::{dataset_to_csv, ingest_csv, split_alternating};
use gpcompare_core::{Dataset, Matrix};
use proptest::prelude::*;

#[test]
fn three_rows_two_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("d.csv");
    fs::write(&path, "V,y\n5.0,0.1\n6.5,0.3\n7.25,0.45\n").unwrap();
    let got = ingest_csv(&path, None, None).unwrap();
    assert_eq!(got.rows(), 3);
    assert_eq!(got.dataset.dim(), 1);
    assert_eq!(got.input_columns, ["V"]);
    assert_eq!(got.response_column, "y");
    assert_eq!(got.dataset.responses(), [0.1, 0.3, 0.45]);
    assert_eq!(got.summaries[0].max, 7.25);
}

#[test]
fn named_columns_are_selected_in_order() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("d.csv");
    fs::write(&path, "power,temp,speed\n1,20,5\n2,21,6\n3,22,7\n").unwrap();
    let cols = vec!["speed".to_string(), "temp".to_string()];
    let got = ingest_csv(&path, Some(&cols), Some("power")).unwrap();
    assert_eq!(got.dataset.inputs().row(1), [6.0, 21.0]);
    assert_eq!(got.dataset.responses(), [1.0, 2.0, 3.0]);
    assert!(ingest_csv(&path, Some(&cols), Some("missing")).is_err());
    assert!(ingest_csv(&path, Some(&cols), Some("speed")).is_err());
}

#[test]
fn non_finite_cells_name_their_row() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("d.csv");
    fs::write(&path, "x,y\n1,2\n3,4\n5,NaN\n").unwrap();
    let msg = ingest_csv(&path, None, None).unwrap_err().to_string();
    assert!(msg.contains("row 3") && msg.contains("`y`"), "{msg}");
    fs::write(&path, "x,y\n1,2\n").unwrap();
    assert!(ingest_csv(&path, None, None).is_err());
}

#[test]
fn split_takes_alternate_rows() {
    let x: Vec<f64> = (0..7).map(f64::from).collect();
    let d = Dataset::new(Matrix::column(&x), x.iter().map(|v| v * 10.0).collect()).unwrap();
    let (even, odd) = split_alternating(&d).unwrap();
    assert_eq!(even.responses(), [0.0, 20.0, 40.0, 60.0]);
    assert_eq!(odd.responses(), [10.0, 30.0, 50.0]);
}

#[test]
fn bounds_parse_and_overlap() {
    assert_eq!(parse_bounds("5:15").unwrap(), [(5.0, 15.0)]);
    assert_eq!(parse_bounds("-1:1, 0:2.5").unwrap(), [(-1.0, 1.0), (0.0, 2.5)]);
    assert!(parse_bounds("5-15").is_err());
    assert!(parse_bounds("a:1").is_err());
    let a = Dataset::new(Matrix::column(&[0.0, 4.0, 10.0]), vec![0.0; 3]).unwrap();
    let b = Dataset::new(Matrix::column(&[2.0, 12.0]), vec![0.0; 2]).unwrap();
    assert_eq!(intersect_ranges(&a, &b).unwrap(), [(2.0, 10.0)]);
    let far = Dataset::new(Matrix::column(&[20.0, 30.0]), vec![0.0; 2]).unwrap();
    assert!(intersect_ranges(&a, &far).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csv_round_trip_is_exact(
        n in 2usize..30,
        d in 1usize..4,
        seed in prop::collection::vec(-1e6f64..1e6, 120),
    ) {
        let x: Vec<f64> = (0..n * d).map(|i| seed[i % seed.len()] / (1.0 + i as f64)).collect();
        let y: Vec<f64> = (0..n).map(|i| seed[(i * 7 + 3) % seed.len()] * 1e-3).collect();
        let data = Dataset::new(Matrix::from_vec(n, d, x).unwrap(), y).unwrap();
        let names: Vec<String> = (0..d).map(|k| format!("in{k}")).collect();
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("rt.csv");
        fs::write(&path, dataset_to_csv(&data, &names, "out").unwrap()).unwrap();
        let back = ingest_csv(&path, None, None).unwrap();
        prop_assert_eq!(&back.input_columns, &names);
        for (a, b) in back.dataset.inputs().as_slice().iter().zip(data.inputs().as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        for (a, b) in back.dataset.responses().iter().zip(data.responses()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}
