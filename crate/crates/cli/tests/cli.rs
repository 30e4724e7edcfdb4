use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerfan"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env_remove("EULERFAN_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_exact_passes_and_round_trips() {
    let tmp = TempDir::new().unwrap();
    let copy = tmp.path().join("nested/out.json");
    let o = run(tmp.path(), &["verify-exact", "--json", copy.to_str().unwrap(), "--tests", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(tmp.path());
    assert_eq!(r["ok"], true);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["result"]["e_right_slack_is_zero"], true);
    let copied: Value = serde_json::from_str(&std::fs::read_to_string(&copy).unwrap()).unwrap();
    assert_eq!(copied, r);
    assert_eq!(serde_json::to_string(&copied).unwrap(), serde_json::to_string(&r).unwrap());
    assert!(tmp.path().join("run.log").exists());
}

#[test]
fn verify_exact_names_the_violated_bound() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["verify-exact", "--c1", "5.0", "--tests", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("surv4_1"), "{}", stderr(&o));
    let r = report(tmp.path());
    assert_eq!(r["ok"], false);
    assert!(r["failure"].as_str().unwrap().contains("surv4_1"));
}

#[test]
fn verify_exact_accepts_rational_c1() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["verify-exact", "--c1", "11497/1680", "--tests", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(tmp.path(), &["verify-exact", "--c1", "9049/1680", "--tests", "4"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

fn kinds(dir: &Path) -> Vec<String> {
    report(dir)["result"]["wave_kinds"].as_array().unwrap().iter().map(|k| k.as_str().unwrap().to_string()).collect()
}

#[test]
fn riemann_compression_data_is_one_rarefaction() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["riemann", "--samples", "11", "--time", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(kinds(tmp.path()), ["rarefaction"]);
    let csv = std::fs::read_to_string(tmp.path().join("field.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
    assert!(csv.starts_with("t,x2,rho,v1,v2\n"));
}

#[test]
fn riemann_equal_and_reversed_states() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["riemann", "--left", "2,0.3,-0.1", "--right", "2,0.3,-0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(kinds(tmp.path()).is_empty());

    let o = run(tmp.path(), &["riemann", "--left", "1,-0.25,2.8284271247461903", "--right", "4,-1,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let k = kinds(tmp.path());
    assert_eq!(k.len(), 2);
    assert_eq!(k[0], "shock");
    let waves = report(tmp.path())["result"]["summary"]["waves"].clone();
    assert_eq!(waves[0]["family"], 1);
    assert_eq!(waves[1]["family"], 3);
}

#[test]
fn riemann_with_polytropic_pressure() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["riemann", "--pressure", "polytropic:1:1.4", "--left", "1,0,0", "--right", "0.5,0,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(report(tmp.path())["result"]["pressure"]["kind"], "polytropic");
}

#[test]
fn design_pressure_then_table_pressure() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["design-pressure", "--beta-bar", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(tmp.path());
    assert_eq!(r["result"]["integral_margins_ok"], true);
    for f in ["pressure.csv", "pressure_table.csv", "pressure_table.json", "candidate.json"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    let table = format!("table:{}", tmp.path().join("pressure_table.csv").display());
    let out = TempDir::new().unwrap();
    let o = run(out.path(), &["riemann", "--pressure", &table, "--left", "1,0,0", "--right", "1.2,0,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(report(out.path())["result"]["pressure"]["kind"], "tabulated");
}

#[test]
fn design_pressure_with_forced_parameters() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["design-pressure", "--beta-bar", "10", "--epsilon", "0.05", "--width-fraction", "0.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(tmp.path(), &["design-pressure", "--beta-bar", "-1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn search_variants() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["search", "--fixed", "--starts", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(tmp.path().join("candidate.json").exists());

    let o = run(tmp.path(), &["search", "--gamma", "1.95", "--min-slack", "1e-6", "--starts", "4", "--max-iters", "400"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(tmp.path());
    assert_eq!(r["result"]["pressure"]["gamma"], 1.95);
    assert!(r["result"]["min_inequality_slack"].as_f64().unwrap() >= 1e-6);

    let o = run(tmp.path(), &["search", "--pin", "rho_1=1.5", "--starts", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(report(tmp.path())["result"]["outcome"]["candidate"]["rho_1"], 1.5);

    let o = run(tmp.path(), &["search", "--pin", "nonsense"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn compression_segment_and_wave() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["compression", "--samples", "21", "--times", "-1,-0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(report(tmp.path())["result"]["invariant_drift"].as_f64().unwrap() < 1e-10);
    let o = run(tmp.path(), &["compression", "--times", "0.5"]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(tmp.path(), &["segment", "--v", "0.1,0.2", "--u", "0.05,-0.02", "--c", "1", "--angles", "360"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(tmp.path(), &["segment", "--v", "1,0", "--u", "0.5,0"]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(tmp.path(), &["wave", "--grid", "12", "--frequency", "24", "--epsilon", "0.5", "--lambda", "0.1", "--c", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(tmp.path());
    assert_eq!(r["result"]["grid"], 12);
    assert!(tmp.path().join("field.csv").exists());
    let o = run(tmp.path(), &["wave", "--a", "1,0", "--b", "2,0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn ci_step_deficit_strictly_decreases() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["ci-step", "--iters", "5", "--c", "1.0", "--grid", "8", "--k-max", "2", "--frequency", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(tmp.path());
    let d: Vec<f64> = r["result"]["deficits"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(d.len(), 6);
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert_eq!(r["result"]["all_inside"], true);
}

#[test]
fn ci_step_without_cylinders_is_numerical_failure() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["ci-step", "--iters", "1", "--grid", "8", "--k-max", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn weakcheck_on_a_saved_fan() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["search", "--fixed", "--starts", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fan = tmp.path().join("fan.json");
    std::fs::copy(tmp.path().join("candidate.json"), &fan).unwrap();
    let out = TempDir::new().unwrap();
    let o = run(out.path(), &["weakcheck", "--field", fan.to_str().unwrap(), "--tests", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(report(out.path())["result"]["rows"].as_array().unwrap().len(), 32);

    let o = run(out.path(), &["weakcheck", "--tests", "4", "--order", "8", "--panels", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(out.path(), &["weakcheck", "--panels", "3"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(out.path(), &["weakcheck", "--field", tmp.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [&["verify-exact", "--tests", "8"][..], &["riemann"][..], &["search", "--fixed", "--starts", "3"][..]] {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        let mut with_seed = vec!["--seed", "17", "--threads", "2"];
        with_seed.extend_from_slice(args);
        assert_eq!(run(a.path(), &with_seed).status.code(), Some(0));
        assert_eq!(run(b.path(), &with_seed).status.code(), Some(0));
        let ra = std::fs::read(a.path().join("report.json")).unwrap();
        let rb = std::fs::read(b.path().join("report.json")).unwrap();
        assert_eq!(ra, rb, "{args:?}");
        assert_eq!(report(a.path())["config"]["seed"], 17);
        assert_eq!(report(a.path())["config"]["threads"], 2);
    }
}

#[test]
fn global_flags_and_bad_input() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["--tol", "1e-8", "riemann"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(tmp.path())["config"]["tol"], 1e-8);
    assert_eq!(run(tmp.path(), &["--tol", "-1", "riemann"]).status.code(), Some(3));
    assert_eq!(run(tmp.path(), &["--threads", "0", "riemann"]).status.code(), Some(3));
    assert_eq!(run(tmp.path(), &["bogus"]).status.code(), Some(3));
    assert_eq!(run(tmp.path(), &["riemann", "--left", "1,2"]).status.code(), Some(3));
    assert_eq!(run(tmp.path(), &["riemann", "--left", "-1,0,0"]).status.code(), Some(3));
    assert_eq!(run(tmp.path(), &["riemann", "--pressure", "cubic"]).status.code(), Some(3));
    assert_eq!(run(tmp.path(), &["--help"]).status.code(), Some(0));

    let env_dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_eulerfan"))
        .arg("riemann")
        .env("EULERFAN_OUT_DIR", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.path().join("report.json").exists());
}
