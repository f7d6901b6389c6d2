use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conewave")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    (header, r.records().map(|x| x.unwrap()).collect())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const COMPOSE_INPUT: &str = r#"{"chain": {"alpha1": 9.42477796076938, "alpha2": 9.42477796076938, "eps1": -1, "eps2": 1,
  "a": 1.0, "b": 1.0, "c": 1.0}, "theta1": 0.3, "theta2": 2.941592653589793, "omega": 100.0}"#;

#[test]
fn predict_reports_the_coefficient() {
    let o = run(&["predict", "--L", "3", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], -1);
    assert_eq!(v["L"], 3.0);
    let abs = v["abs"].as_f64().unwrap();
    assert!((abs - 2f64.sqrt() / (4.0 * std::f64::consts::PI.powi(2))).abs() < 1e-15);
    let c = v["coefficient"].as_array().unwrap();
    assert_eq!(c[0].as_f64(), Some(0.0));
    assert!((c[1].as_f64().unwrap() + abs).abs() < 1e-15);
}

#[test]
fn plane_does_not_scatter() {
    let o = run(&["scatter", "--alpha", "6.2831853", "--thetas", "0:0.1:3"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["alpha", "theta", "S_closed", "S_fourier_re", "S_fourier_im", "is_pole"]);
    assert_eq!(rows.len(), 31);
    // 6.2831853 differs from 2 pi by 7e-9; the residue grows to about 2e-8 as theta nears pi.
    for r in &rows {
        assert!(r[2].parse::<f64>().unwrap().abs() < 1e-6, "{r:?}");
        assert_eq!(&r[5], "false");
    }
    let exact = run(&["scatter", "--alpha", "6.283185307179586", "--thetas", "0:0.1:3"]);
    for r in csv_rows(&stdout(&exact)).1 {
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn scatter_flags_poles() {
    let o = run(&["scatter", "--alpha", "12.566370614359172", "--thetas", "3.141592653589793:1:3.141592653589793"]);
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(&rows[0][5], "true");
    assert_eq!(&rows[0][2], "NaN");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "cp.json", COMPOSE_INPUT);
    let cases: Vec<Vec<String>> = vec![
        vec!["scatter".into(), "--alpha".into(), "7".into(), "--thetas".into(), "0:0.05:2".into()],
        vec!["trace".into(), "--h".into(), "0.05".into(), "--lambda-max".into(), "200".into(), "--t".into(), "0.5:0.01:4".into()],
        vec!["compose".into(), "--input".into(), input],
        vec![
            "kernel".into(), "--representation".into(), "cheeger".into(), "--alpha".into(), "7".into(), "--r1".into(), "1".into(),
            "--theta1".into(), "0.2".into(), "--r2".into(), "1.3".into(), "--theta2".into(), "1.9".into(), "--t".into(), "0.5:0.25:3".into(),
        ],
    ];
    for (k, args) in cases.iter().enumerate() {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|i| {
                let out = dir.path().join(format!("out{k}_{i}"));
                let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
                full.extend(["--seed", "3", "--out", out.to_str().unwrap()]);
                let o = run(&full);
                assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
                std::fs::read(out).unwrap()
            })
            .collect();
        assert!(!outs[0].is_empty());
        assert_eq!(outs[0], outs[1], "{args:?}");
    }
}

#[test]
fn kernel_csv_has_the_documented_columns() {
    let o = run(&["kernel", "--r1", "1", "--theta1", "0.3", "--r2", "1.2", "--theta2", "1.4", "--t", "1:0.5:3"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["t", "r1", "theta1", "r2", "theta2", "alpha", "representation", "value_re", "value_im", "region"]);
    assert_eq!(rows.len(), 5);
    assert_eq!(&rows[0][9], "before_direct");
    assert_eq!(rows[0][7].parse::<f64>().unwrap(), 0.0);
    assert_eq!(&rows[4][9], "after_diffracted");
}

#[test]
fn trace_writes_samples_and_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("trace.csv");
    let peaks_path = dir.path().join("peaks.json");
    let o = run(&["trace", "--out", csv_path.to_str().unwrap(), "--peaks", peaks_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&std::fs::read_to_string(csv_path).unwrap());
    assert_eq!(header, ["t", "re", "im"]);
    assert_eq!(rows.len(), 1101);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(peaks_path).unwrap()).unwrap();
    let peaks = v["peaks"].as_array().unwrap();
    assert!(!peaks.is_empty());
    for p in peaks {
        let (t, l) = (p["t"].as_f64().unwrap(), p["nearest_length"].as_f64().unwrap());
        assert!((t - l).abs() < 0.04, "{p}");
    }
}

#[test]
fn compose_reports_both_evaluations() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "cp.json", COMPOSE_INPUT);
    let o = run(&["compose", "--input", &input]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["stationary"]["signature"], 1);
    assert!(v["stationary"]["hessian_det"].as_f64().unwrap() < 0.0);
    assert_eq!(v["oracle"].as_array().unwrap().len(), 2);
    assert!(v["rel_err"].as_f64().unwrap() < 0.1);
}

#[test]
fn config_file_supplies_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"predict": {"L": 5.0, "b": 2.5}, "compose": null}"#);
    let o = run(&["--config", &cfg, "predict"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["abs"].as_f64().unwrap() - 5.0 / (8.0 * std::f64::consts::PI.powi(2))).abs() < 1e-15);
    // Flags take precedence over the file.
    let o = run(&["--config", &cfg, "predict", "--L", "3", "--b", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["L"], 3.0);
}

#[test]
fn malformed_json_reports_its_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\n  \"seed\": 1,\n  \"h\": ,\n}");
    let o = run(&["--config", &cfg, "predict", "--L", "3", "--b", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("column"), "{err}");
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(run(&["predict", "--L", "3", "--b", "4"]).status.code(), Some(2));
    assert_eq!(run(&["predict", "--L", "3"]).status.code(), Some(2));
    assert_eq!(run(&["scatter", "--alpha", "x", "--thetas", "0:1:2"]).status.code(), Some(2));
    assert_eq!(run(&["scatter", "--alpha", "7", "--thetas", "2:1:0"]).status.code(), Some(2));
    assert_eq!(run(&["predict", "--L", "3", "--b", "1", "--tol", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--only", "AT-9"]).status.code(), Some(2));
}

#[test]
fn verification_exit_codes() {
    let ok = run(&["verify", "--only", "AT-1", "--only", "AT-6"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert!(text.lines().count() == 2 && text.contains("AT-1") && text.contains("AT-6"));
    assert!(text.lines().all(|l| l.contains(" PASS ")));
    let fail = run(&["verify", "--only", "AT-3"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(stdout(&fail).contains(" FAIL "));
}
