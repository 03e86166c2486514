use std::path::{Path, PathBuf};

use minreg::{angle_report, ProblemInstance};
use minreg_cli::{run, EXIT_INPUT, EXIT_OK};
use serde_json::Value;

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn reference(dir: &Path, r: f64) -> PathBuf {
    write_config(
        dir,
        &format!("r{r}.json"),
        &format!(
            r#"{{"x1_star":[{},0],"x2_star":[{r},0],"sigma1":1.5,"sigma2":1,"L":10}}"#,
            -r
        ),
    )
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("minreg").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn regime_three_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path(), 6.0);
    let (code, out, _) = call(&["regime", "-c", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["case"], "ThreeArcs");
    assert!(v["nu2"].as_f64().unwrap() > 0.0);
}

#[test]
fn classify_minimizer_is_cusp() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path(), 2.0);
    let (code, out, _) = call(&["classify", "-c", cfg.to_str().unwrap(), "-p", "-2,0"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["value"], "Boundary");
    assert_eq!(v["which_piece"], "CuspX1");

    let (_, out, _) = call(&["classify", "-c", cfg.to_str().unwrap(), "-p", "0,0"]);
    assert_eq!(json(&out)["value"], "Interior");
}

#[test]
fn verify_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path(), 4.0);
    let args = [
        "verify",
        "-c",
        cfg.to_str().unwrap(),
        "--mode",
        "sound",
        "--trials",
        "10000",
        "--seed",
        "7",
    ];
    let (c1, a, _) = call(&args);
    let (c2, b, _) = call(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
    assert_eq!(json(&a)["violations"], 0);

    let (code, out, _) = call(&[
        "verify",
        "-c",
        cfg.to_str().unwrap(),
        "--mode",
        "complete",
        "--trials",
        "50",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["accepted"], 50);
}

#[test]
fn trace_csv_reclassifies_onto_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = ProblemInstance::canonical(2, 6.0, 1.5, 1.0, 10.0).unwrap();
    let ci = inst.reduced();
    let cfg = reference(dir.path(), 6.0);
    let csv_path = dir.path().join("t.csv");
    let svg_path = dir.path().join("t.svg");
    let (code, out, _) = call(&[
        "trace",
        "-c",
        cfg.to_str().unwrap(),
        "-o",
        csv_path.to_str().unwrap(),
        "--svg",
        svg_path.to_str().unwrap(),
        "--samples",
        "100",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(json(&out)["segments"].as_array().unwrap().len(), 3);

    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["segment_tag", "idx", "x1", "x2"]);
    let mut t_points = 0;
    for row in rdr.records() {
        let row = row.unwrap();
        if &row[0] != "CurveT" {
            continue;
        }
        let p = [row[2].parse::<f64>().unwrap(), row[3].parse::<f64>().unwrap()];
        let rep = angle_report(&ci, &p);
        assert!(rep.defined && rep.slack.abs() <= 1e-7, "{p:?}: {}", rep.slack);
        t_points += 1;
    }
    assert_eq!(t_points, 200);
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("blue") && svg.contains("magenta"));
}

#[test]
fn witness_and_fedpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path(), 4.0);
    let (code, out, _) = call(&["witness", "-c", cfg.to_str().unwrap(), "-p", "-1,0.5"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["f1"]["q"].as_array().unwrap().len(), 2);
    assert_eq!(v["point"], serde_json::json!([-1.0, 0.5]));

    let (code, out, _) = call(&["witness", "-c", cfg.to_str().unwrap(), "-p", "-1,0.5", "-k", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out).as_array().unwrap().len(), 3);

    let (code, out, _) = call(&["fedpoint", "-c", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert!((v["p"][0].as_f64().unwrap() + 0.8).abs() < 1e-12);
    assert!((v["L_min"].as_f64().unwrap() - 4.8).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path(), 2.0);
    let c = cfg.to_str().unwrap();
    assert_eq!(call(&["nonsense"]).0, EXIT_INPUT);
    assert_eq!(call(&["regime", "-c", "/no/such/file.json"]).0, EXIT_INPUT);
    assert_eq!(call(&["classify", "-c", c, "-p", "1,zz"]).0, EXIT_INPUT);
    assert_eq!(call(&["classify", "-c", c, "-p", "1,2,3"]).0, EXIT_INPUT);
    assert_eq!(call(&["witness", "-c", c, "-p", "50,0"]).0, EXIT_INPUT);
    assert_eq!(call(&["--help"]).0, EXIT_OK);

    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"x1_star":[0,0],"x2_star":[1,0],"sigma1":-1,"sigma2":1,"L":3}"#,
    );
    assert_eq!(call(&["regime", "-c", bad.to_str().unwrap()]).0, EXIT_INPUT);
    let typo = write_config(
        dir.path(),
        "typo.json",
        r#"{"x1_star":[0,0],"x2_star":[1,0],"sigma1":1,"sigma2":1,"L":3,"sigma3":1}"#,
    );
    let (code, _, err) = call(&["regime", "-c", typo.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("sigma3"), "{err}");
    let far = write_config(
        dir.path(),
        "far.json",
        r#"{"x1_star":[-10,0],"x2_star":[10,0],"sigma1":1,"sigma2":1,"L":3}"#,
    );
    assert_eq!(
        call(&["trace", "-c", far.to_str().unwrap(), "-o", "/dev/null"]).0,
        EXIT_INPUT
    );
}
