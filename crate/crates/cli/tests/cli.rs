use std::process::{Command, Output};

fn desc(name: &str) -> String {
    format!("{}/../../descriptors/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn twistlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn row<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| {
            let mut parts = l.split_whitespace();
            (parts.next() == Some(key)).then(|| parts.next().unwrap_or(""))
        })
        .unwrap_or_else(|| panic!("no row {key} in\n{text}"))
}

#[test]
fn invariants_of_zeta() {
    let o = twistlab(&["invariants", "--desc", &desc("zeta.json")]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(row(&text, "d"), "1");
    assert_eq!(row(&text, "q"), "1");
    assert_eq!(row(&text, "xi_F"), "-1");
    assert_eq!(row(&text, "theta_F"), "0");
    assert_eq!(row(&text, "omega_F"), "1");
}

#[test]
fn catalog_aliases_resolve_without_files() {
    let a = stdout(&twistlab(&["invariants", "--desc", "zeta.json"]));
    let b = stdout(&twistlab(&["invariants", "--desc", &desc("zeta.json")]));
    assert_eq!(a, b);
}

#[test]
fn compat_trace_for_halfint() {
    let o = twistlab(&["compat", "--desc", "halfint.json"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().next(),
        Some("strict: yes, h=0, n_0=1, N_0=0")
    );
}

#[test]
fn verify_fe_json_report() {
    let o = twistlab(&[
        "verify-fe",
        "--desc",
        &desc("zeta.json"),
        "--alpha",
        "0.5",
        "--s=-1+10i",
        "--k",
        "1",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let residual = v["residual"].as_f64().unwrap();
    assert!(residual <= 1e-3, "{residual}");
    assert_eq!(v["k"], 1);
    assert_eq!(v["s"], serde_json::json!([-1.0, 10.0]));
}

#[test]
fn verify_fe_csv_header() {
    let o = twistlab(&[
        "verify-fe",
        "--desc",
        "zeta",
        "--alpha",
        "0.5",
        "--s",
        "-1 + 10i",
        "--k",
        "1",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(twistlab::twist::FEReport::CSV_HEADER));
    assert!(lines.next().unwrap().starts_with("-1,10,0.5,1,"));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        vec![
            "eval",
            "--desc",
            "zeta",
            "--alpha",
            "0.5",
            "--s=-1+10i",
            "--format",
            "json",
        ],
        vec![
            "coeffs",
            "--desc",
            "zeta-squared",
            "--M",
            "4",
            "--method",
            "rayfit",
            "--format",
            "json",
        ],
        vec!["sine", "--desc", "zeta-times-dirichlet", "--format", "csv"],
    ] {
        let a = twistlab(&args);
        let b = twistlab(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("twistlab-out-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let args = [
        "spectrum",
        "--desc",
        "zeta-squared",
        "--alpha",
        "2",
        "--format",
        "json",
    ];
    let printed = stdout(&twistlab(&args));
    let o = twistlab(&[&args[..], &["--out", p]].concat());
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
    let v: serde_json::Value = serde_json::from_str(&printed).unwrap();
    assert_eq!(v["member"], true);
    std::fs::remove_file(path).ok();
}

#[test]
fn exit_code_one_on_bad_input() {
    for args in [
        vec!["frobnicate", "--desc", "zeta"],
        vec!["spectrum", "--desc", "zeta"],
        vec!["verify-fe", "--desc", "zeta", "--alpha", "0.5", "--s", "2"],
        vec!["eval", "--desc", "zeta", "--alpha", "0.5", "--s", "1+"],
        vec!["invariants", "--desc", "no-such-descriptor.json"],
        vec!["invariants", "--desc", "zeta", "--tol", "-1"],
        vec!["invariants", "--desc", "zeta", "--format", "xml"],
    ] {
        let o = twistlab(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn exit_code_one_on_descriptor_violations() {
    let dir = std::env::temp_dir();
    let text = std::fs::read_to_string(desc("zeta.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for (i, (field, bad)) in [
        (
            "gamma_factors",
            serde_json::json!([{ "lambda": 0.5, "mu": [-1.0, 0.0] }]),
        ),
        ("omega", serde_json::json!([2.0, 0.0])),
        (
            "gamma_factors",
            serde_json::json!([{ "lambda": 0.25, "mu": [0.0, 0.0] }]),
        ),
    ]
    .into_iter()
    .enumerate()
    {
        let keep = v[field].clone();
        v[field] = bad;
        let path = dir.join(format!("twistlab-bad-{}-{i}.json", std::process::id()));
        std::fs::write(&path, v.to_string()).unwrap();
        let o = twistlab(&["invariants", "--desc", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{field}");
        v[field] = keep;
        std::fs::remove_file(path).ok();
    }
}

#[test]
fn exit_code_two_on_ill_conditioned_fit() {
    // three poles lie right of the probe but only three ladder points are given
    let o = twistlab(&[
        "residues",
        "--desc",
        "zeta",
        "--alpha",
        "1",
        "--s=-0.5+3i",
        "--X",
        "32,64,128",
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn residue_identity_command() {
    let o = twistlab(&[
        "residue-identity",
        "--desc",
        "zeta",
        "--alpha",
        "0.5",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let dev = v["deviations"].as_array().unwrap();
    assert_eq!(dev.len(), 3);
    assert!(dev.iter().all(|x| x.as_f64().unwrap() <= 1e-5));
}
