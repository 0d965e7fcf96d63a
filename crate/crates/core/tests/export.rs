use deltanls::export::Table;

#[test]
fn csv_has_metadata_then_header() {
    let mut t = Table::new(&["alpha", "ell"]).meta("d", 2).meta("note", "two\nlines");
    t.push(vec![0.0, -1.5]);
    t.push(vec![1.0, 0.25]);
    let csv = t.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# d=2");
    assert_eq!(lines[1], "# note=two lines");
    assert_eq!(lines[2], "alpha,ell");
    assert_eq!(lines.len(), 5);
    // values survive a parse round trip exactly
    let row: Vec<f64> = lines[3].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row, vec![0.0, -1.5]);
    assert_eq!(csv, t.to_csv());
}

#[test]
#[should_panic]
fn row_width_must_match() {
    Table::new(&["a"]).push(vec![1.0, 2.0]);
}
