use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fastsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fastsa")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const LINE: &str = "x,y,elev,flat\n0,0,0,1\n1,0,0,1\n100,0,10,1\n";

#[test]
fn linkage_then_sa_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    let order = dir.path().join("order.sa");
    let trace = dir.path().join("trace.csv");
    fs::write(&pts, LINE).unwrap();

    let o = fastsa(&["linkage", "--method", "single", "--in", s(&pts), "--dims", "2", "--out", s(&order)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&order).unwrap(), "SAORDER v1 n=3 method=single\n0 1\n2 3\n");

    let o = fastsa(&["sa", "--order", s(&order), "--in", s(&pts), "--feature", "elev", "--trace", s(&trace)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0");
    let t = fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = t.lines().collect();
    assert_eq!(lines[0], "t,ss,ss_normalized");
    assert_eq!(lines[1], "1,0.0,0.0");
    assert!(lines[2].ends_with(",1.0"));
}

#[test]
fn sa_over_all_features_reports_each() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    fs::write(&pts, LINE).unwrap();
    let o = fastsa(&["sa", "--in", s(&pts), "--method", "kdtree"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("elev,"));
    assert!(lines[1].starts_with("flat,NaN,"), "{}", lines[1]);
}

#[test]
fn missing_order_file_is_a_data_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    fs::write(&pts, LINE).unwrap();
    let missing = dir.path().join("missing.sa");
    let o = fastsa(&["sa", "--order", s(&missing), "--in", s(&pts), "--feature", "elev"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.sa"), "{}", stderr(&o));
    assert!(stderr(&o).contains("model:"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(fastsa(&["sa", "--bogus"]).status.code(), Some(1));
    assert_eq!(fastsa(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(fastsa(&["linkage", "--in", "a.csv", "--out", "o", "--method", "ward"]).status.code(), Some(1));
    assert_eq!(fastsa(&["linkage", "--in", "a.csv", "--out", "o", "--dims", "4"]).status.code(), Some(1));
    assert_eq!(fastsa(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    fs::write(&pts, "x,y,v\n0,0,1\n1,0,NaN\n").unwrap();
    let o = fastsa(&["moran", "--in", s(&pts)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("non-finite value at row 2, column 3"), "{}", stderr(&o));

    fs::write(&pts, LINE).unwrap();
    let o = fastsa(&["sa", "--in", s(&pts), "--feature", "flat"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sa: S_A undefined"), "{}", stderr(&o));

    let o = fastsa(&["sa", "--in", s(&pts), "--feature", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn baselines_print_hand_values() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    fs::write(&pts, "x,y,v\n0,0,1\n1,0,2\n2,0,3\n").unwrap();
    let o = fastsa(&["moran", "--in", s(&pts)]);
    assert_eq!(stdout(&o).trim(), "-0.300000");
    let o = fastsa(&["geary", "--in", s(&pts), "--feature", "v"]);
    assert_eq!(stdout(&o).trim(), "0.800000");
    let o = fastsa(&["geary", "--in", s(&pts), "--reps", "4", "--seed", "1"]);
    assert!(stdout(&o).contains("null mean"), "{}", stdout(&o));
}

#[test]
fn gen_is_seeded_and_readable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = fastsa(&["gen", "--kind", "grid-sample", "--n", "50", "--k", "4", "--seed", "3", "--out", s(p)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let o = fastsa(&["sa", "--in", s(&a), "--feature", "value"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let c = dir.path().join("c.csv");
    let o = fastsa(&["gen", "--kind", "disk-average", "--n", "30", "--r", "0.2", "--out", s(&c)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(&c).unwrap().starts_with("x,y,value\n"));
}

#[test]
fn trace_subcommand_writes_monotone_trace() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let out = dir.path().join("t.csv");
    fastsa(&["gen", "--n", "40", "--seed", "5", "--out", s(&data)]);
    let o = fastsa(&["trace", "--in", s(&data), "--feature", "value", "--method", "median", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = fs::read_to_string(&out).unwrap();
    let ss: Vec<f64> = t.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ss.len(), 39);
    assert!(ss.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn bench_writes_table_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let o = fastsa(&["bench", "--sizes", "100,200", "--matrix-cap", "150", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("median_build skipped at n=200"));
    let table = fs::read_to_string(&out).unwrap();
    assert!(table.starts_with("statistic,n,seconds,repetitions\n"));
    assert_eq!(table.lines().count(), 1 + 9);
    let meta = fs::read_to_string(dir.path().join("bench.csv.meta")).unwrap();
    assert!(meta.contains("cpus="));
}

#[test]
fn experiments_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let disk = dir.path().join("disk.csv");
    let half = dir.path().join("half.csv");
    let o = fastsa(&[
        "exp-disk", "--n", "60", "--reps", "2", "--radii", "4", "--r-min", "0.01", "--r-max", "0.5", "--out", s(&disk),
        "--half-range-out", s(&half),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(&disk).unwrap().starts_with("radius,statistic,mean,std,count\n"));
    assert!(fs::read_to_string(&half).unwrap().starts_with("statistic,half_range_radius\n"));

    let grid = dir.path().join("grid.csv");
    let fits = dir.path().join("fits.csv");
    let o = fastsa(&[
        "exp-grid", "--ks", "3", "--n-min", "10", "--n-max", "1000", "--reps", "3", "--baseline-max-n", "100",
        "--out", s(&grid), "--fits-out", s(&fits),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("k=3: "));
    assert!(fs::read_to_string(&grid).unwrap().starts_with("k,n,statistic,mean,std,count\n"));
    assert!(fs::read_to_string(&fits).unwrap().starts_with("k,s_max,a,b,rss,ci_lo,ci_hi,error\n"));

    let data = dir.path().join("d.csv");
    let sub = dir.path().join("sub.csv");
    fastsa(&["gen", "--n", "50", "--out", s(&data)]);
    let o = fastsa(&[
        "exp-subsample", "--in", s(&data), "--feature", "value", "--ms", "2,20", "--reps", "3", "--out", s(&sub),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(&sub).unwrap();
    assert!(table.contains("\n2.0,sa_single,-1.0,0.0,3\n"), "{table}");
}

#[test]
fn fit_recovers_parameters_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    let mut body = String::from("n,value\n");
    for k in 0..12 {
        let n = 10f64.powf(1.0 + 5.0 * k as f64 / 11.0);
        let v = 0.9 / (1.0 + (-0.5 * (n.ln() - 7.0)).exp());
        body.push_str(&format!("{n},{v}\n"));
    }
    fs::write(&path, body).unwrap();
    let o = fastsa(&["fit", "--in", s(&path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("s_max 0.900000"), "{out}");
    assert!(out.contains("a 0.500000"), "{out}");
    assert!(out.contains("b 7.00000"), "{out}");

    fs::write(&path, "n,value\n10,0.5\n100,0.5\n1000,0.5\n10000,0.5\n").unwrap();
    let o = fastsa(&["fit", "--in", s(&path)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sigmoid unidentifiable"));
}
