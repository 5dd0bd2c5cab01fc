use std::fs;
use std::path::Path;

use quantcut::cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["quantcut"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const TWO_ITEMS: &str = r#"{
  "horizon": 1, "alpha": 0.5, "tau": 0.6, "scenario_counts": [3],
  "resources": [{"name": "crew", "lower": [0.0], "upper": [2.0]}],
  "interventions": [
    {"name": "a", "duration": {"1": 1}, "workload": {"crew": {"1": {"1": 1.0}}}, "risk": {"1": {"1": [6.0, 6.0, 0.0]}}},
    {"name": "b", "duration": {"1": 1}, "workload": {}, "risk": {"1": {"1": [0.0, 0.0, 0.0]}}}
  ],
  "exclusions": []
}"#;

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", TWO_ITEMS);
    assert_eq!(invoke(&["validate", "--instance", &good]), (0, "OK\n".into(), String::new()));

    let missing = dir.path().join("nope.json");
    let (code, _, err) = invoke(&["validate", "--instance", missing.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));

    let negative = write(dir.path(), "neg.json", &TWO_ITEMS.replace("[6.0, 6.0, 0.0]", "[6.0, -1.0, 0.0]"));
    let (code, out, _) = invoke(&["validate", "--instance", &negative]);
    assert_eq!(code, 1);
    assert!(out.contains("negative"), "{out}");

    let overlap = write(
        dir.path(),
        "excl.json",
        &TWO_ITEMS.replace(r#""exclusions": []"#, r#""exclusions": [{"first": "a", "second": "a", "timesteps": [1]}]"#),
    );
    assert_eq!(invoke(&["validate", "--instance", &overlap]).0, 1);

    let broken = write(dir.path(), "broken.json", "{ \"horizon\": ");
    assert_eq!(invoke(&["validate", "--instance", &broken]).0, 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(invoke(&[]).0, 2);
    assert_eq!(invoke(&["solve", "--instance", "x.json", "--method", "nonsense"]).0, 2);
    assert_eq!(invoke(&["frobnicate"]).0, 2);
}

#[test]
fn evaluate_csv_golden() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", TWO_ITEMS);
    let sol = write(dir.path(), "sol.txt", "a 1\nb 1\n");
    let (code, out, _) = invoke(&["evaluate", "--instance", &inst, "--solution", &sol, "--format", "csv"]);
    assert_eq!(code, 0);
    // scenario risks (6, 6, 0): mean 4, second largest 6
    assert_eq!(out, "t,mean,quantile,excess\n1,4,6,2\n");
}

#[test]
fn evaluate_infeasible_schedule_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", &TWO_ITEMS.replace(r#""upper": [2.0]"#, r#""upper": [0.5]"#));
    let sol = write(dir.path(), "sol.txt", "a 1\nb 1\n");
    let (code, out, _) = invoke(&["evaluate", "--instance", &inst, "--solution", &sol]);
    assert_eq!(code, 1);
    assert!(out.contains("infeasible"), "{out}");
}

#[test]
fn solve_writes_identical_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let inst = inst.to_str().unwrap();
    assert_eq!(invoke(&["generate", "--seed", "5", "--out", inst]).0, 0);
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("sol{run}.txt"));
        let (code, stdout, _) = invoke(&["solve", "--instance", inst, "--method", "cgen+O", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{stdout}");
        outputs.push(fs::read_to_string(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let sol = dir.path().join("sol0.txt");
    assert_eq!(invoke(&["evaluate", "--instance", inst, "--solution", sol.to_str().unwrap()]).0, 0);
}

#[test]
fn export_round_trips_through_the_lp_reader() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", TWO_ITEMS);
    let lp = dir.path().join("model.lp");
    let (code, _, err) = invoke(&["export", "--instance", &inst, "--method", "full", "--out", lp.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&lp).unwrap();
    let model = quantcut::mip::import_lp_format(&text).unwrap();
    assert_eq!(quantcut::mip::export_lp_format(&model).unwrap(), text);
}
