use std::process::{Command, Output};

fn qsuper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsuper")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim_end().to_string()
}

#[test]
fn normalize_examples() {
    let o = qsuper(&["normalize", "--ctx", "tside", "d*a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a*d + (q - p^-1)*beta*gamma");

    let o = qsuper(&["normalize", "--ctx", "tside", "[a,d] - (p - q^-1)*gamma*beta"]);
    assert_eq!(stdout(&o), "0");

    let o = qsuper(&["normalize", "--ctx", "mside", "[x,y]"]);
    assert_eq!(stdout(&o), "0");

    let o = qsuper(&["normalize", "--ctx", "series", "--N", "2", "--K", "4", "--ray", "1,2", "[D, A] - (q - p^-1)*beta*gamma"]);
    assert_eq!(stdout(&o), "0");
}

#[test]
fn normalized_output_reparses() {
    let first = stdout(&qsuper(&["normalize", "--ctx", "tside", "gamma*d^-1*a*beta + (p + q)^-1*d*a"]));
    let second = stdout(&qsuper(&["normalize", "--ctx", "tside", &first]));
    assert_eq!(first, second);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qsuper(&["normalize", "--ctx", "tside", "a +"]).status.code(), Some(2));
    assert_eq!(qsuper(&["normalize", "--ctx", "tside", "x"]).status.code(), Some(2));
    assert_eq!(qsuper(&["normalize", "--ctx", "nowhere", "a"]).status.code(), Some(2));
    assert_eq!(qsuper(&["suite", "section9"]).status.code(), Some(2));
    assert_eq!(qsuper(&["suite", "series", "--N", "4", "--K", "5"]).status.code(), Some(2));
    assert_eq!(qsuper(&["suite", "series", "--rays", "1,-1"]).status.code(), Some(2));
    assert_eq!(qsuper(&["spotcheck", "section2", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn appendix_first_order() {
    let o = qsuper(&["suite", "appendix", "--k-max", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn json_report_schema() {
    let dir = std::env::temp_dir().join(format!("qsuper-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("section3.json");
    let o = qsuper(&["suite", "section3", "--n-max", "3", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "section3");
    assert!(v["params"].is_object());
    assert!(v["elapsed_ms"].is_u64());
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["id"].is_string() && c["anchor"].is_string());
        assert_eq!(c["status"], "pass");
        assert!(c["witness"].is_null());
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn spotcheck_is_deterministic() {
    let dir = std::env::temp_dir().join(format!("qsuper-spot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str| {
        let p = dir.join(name);
        let o = qsuper(&["spotcheck", "mside", "--n-max", "3", "--trials", "5", "--seed", "9", "--json", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read_to_string(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_numeric() {
    let o = qsuper(&["eval", "--ctx", "tside", "d*a", "--at", "p=2,q=1/2"]);
    assert_eq!(o.status.code(), Some(0));
    // q - p^-1 = 0 at this point, so only a*d survives with a nonzero value
    let out = stdout(&o);
    assert!(out.contains("a*d\t1"), "{}", out);
    assert!(out.contains("beta*gamma\t0"), "{}", out);
}
