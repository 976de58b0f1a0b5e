use quantile_encoder::data::{generate_cauchy_samples, load_csv, read_csv, write_csv, CauchyConfig, Dataset, Schema, MISSING};

#[test]
fn cauchy_features_have_declared_location_and_scale() {
    let cfg = CauchyConfig { n_rows: 100_000, seed: 11, ..Default::default() };
    let samples = generate_cauchy_samples(&cfg).unwrap();
    let mut dev: Vec<f64> = samples.iter().map(|s| s.x1 - s.center).collect();
    dev.sort_by(f64::total_cmp);
    let median = (dev[49_999] + dev[50_000]) / 2.0;
    assert!(median.abs() < 0.05, "median {median}");
    // For a standard Cauchy, half the mass lies within one scale unit.
    let within = dev.iter().filter(|d| d.abs() <= cfg.scale1).count() as f64 / dev.len() as f64;
    assert!((within - 0.5).abs() < 0.02, "{within}");
    let within2 = samples.iter().filter(|s| (s.x2 - s.center).abs() <= cfg.scale2).count() as f64 / 1e5;
    assert!((within2 - 0.5).abs() < 0.02, "{within2}");
    for s in &samples {
        assert!((cfg.center_low..cfg.center_high).contains(&s.center));
        assert_eq!(s.y, s.x1 + s.x2 + s.noise);
    }
}

#[test]
fn generator_is_deterministic_per_seed() {
    let a = generate_cauchy_samples(&CauchyConfig { n_rows: 50, seed: 1, ..Default::default() }).unwrap();
    let b = generate_cauchy_samples(&CauchyConfig { n_rows: 50, seed: 1, ..Default::default() }).unwrap();
    let c = generate_cauchy_samples(&CauchyConfig { n_rows: 50, seed: 2, ..Default::default() }).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn csv_round_trip_preserves_dataset() {
    let data = Dataset::new("y", vec![1.5, -2.0, 1e-300, 123456789.125])
        .unwrap()
        .with_categorical("city", ["Barcelona", "", "a,b", "say \"hi\""])
        .unwrap()
        .with_numeric("years", vec![0.1, 0.2, 0.30000000000000004, -0.0])
        .unwrap();
    assert_eq!(data.categorical("city").unwrap()[1], MISSING);
    let mut buf = Vec::new();
    write_csv(&data, &mut buf).unwrap();
    let schema = Schema { categorical: vec!["city".into()], numeric: vec!["years".into()], target: "y".into() };
    let back = read_csv(buf.as_slice(), &schema).unwrap();
    assert_eq!(back, data);
    let mut again = Vec::new();
    write_csv(&back, &mut again).unwrap();
    assert_eq!(buf, again);
}

#[test]
fn bundled_toy_csv_loads() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/toy.csv");
    let schema = Schema { categorical: vec!["city".into(), "role".into()], numeric: vec!["years".into()], target: "salary".into() };
    let data = load_csv(path, &schema).unwrap();
    assert_eq!(data.n_rows(), 500);
    assert!(data.categorical("city").unwrap().iter().any(|c| c == MISSING));
    assert!(data.target().iter().all(|v| v.is_finite()));
}

#[test]
fn loader_errors_name_row_and_column() {
    let text = "c,x,y\na,1,2\nb,oops,3\n";
    let schema = Schema { categorical: vec!["c".into()], numeric: vec!["x".into()], target: "y".into() };
    let err = read_csv(text.as_bytes(), &schema).unwrap_err().to_string();
    assert!(err.contains("row 2") && err.contains('x'), "{err}");
    let missing = Schema { categorical: vec!["nope".into()], numeric: vec![], target: "y".into() };
    assert!(read_csv(text.as_bytes(), &missing).unwrap_err().to_string().contains("nope"));
}
