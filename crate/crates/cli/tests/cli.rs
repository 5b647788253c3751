use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approx::assert_relative_eq;
use treslev::thresholds::leverage_pair;
use treslev_cli::cli::{ExpandArgs, TransformArgs};
use treslev_cli::commands::{analyze, compare, expand, transform};
use treslev_cli::{CliError, Projects};

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("config/projets.json")
}

fn treslev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treslev"))
        .env_remove("TRESLEV_CONFIG")
        .args(args)
        .output()
        .unwrap()
}

fn with_bundled(args: &[&str]) -> Output {
    let config = bundled();
    let mut all = vec!["--config", config.to_str().unwrap()];
    all.extend_from_slice(args);
    treslev(&all)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_config(body: &str) -> tempfile::NamedTempFile {
    let f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    std::fs::write(f.path(), body).unwrap();
    f
}

fn one_project(fields: &str) -> String {
    format!(r#"{{"projects": [{{"name": "p", {fields}}}]}}"#)
}

const PROJET_1: &str = r#""unit_price": 20, "unit_variable_cost": 12, "fixed_cash": 2000000,
    "fixed_noncash": 6000000, "capacity": 2400000, "investment_life": 10"#;

fn args_transform(project: &str) -> TransformArgs {
    TransformArgs {
        project: project.into(),
        delta_fixed_cash: None,
        delta_fixed_noncash: None,
        new_v: None,
        solve_v: false,
    }
}

#[test]
fn analyze_projet_1_matrix() {
    let out = with_bundled(&["analyze", "projet-1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("seuil de production               250000            1000000"));
    assert!(text.contains("marge critique                     0.833              3.333"));
    assert!(text.contains("élasticité                 1.12               1.71"));

    let all = Projects::load(&bundled()).unwrap();
    let r = analyze(all.get("projet-1").unwrap()).unwrap();
    assert_relative_eq!(
        r.json["leverage"]["immediate"].as_f64().unwrap(),
        19.2 / 17.2,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        r.json["leverage"]["term"].as_f64().unwrap(),
        12.0 / 7.0,
        max_relative = 1e-12
    );
    let r = analyze(all.get("projet-2").unwrap()).unwrap();
    assert_eq!(r.json["thresholds"]["q_star_immediate"], 300_000.0);
    assert_eq!(r.json["thresholds"]["q_star_term"], 1_500_000.0);
}

#[test]
fn analyze_without_noncash_has_coinciding_rows() {
    let cfg = temp_config(&one_project(
        r#""unit_price": 20, "unit_variable_cost": 12, "fixed_cash": 2000000, "fixed_noncash": 0, "capacity": 2400000"#,
    ));
    let all = Projects::load(cfg.path()).unwrap();
    let r = analyze(all.get("p").unwrap()).unwrap();
    let t = r.table("Indicateurs").unwrap();
    for row in ["seuil de production", "marge critique"] {
        assert_eq!(t.cell(row, 1), t.cell(row, 2));
    }
}

#[test]
fn compare_examples() {
    let all = Projects::load(&bundled()).unwrap();
    let r = compare(&[all.get("projet-1").unwrap(), all.get("projet-3").unwrap()]).unwrap();
    let t = r.table("Performances").unwrap();
    assert_eq!(t.cell("bénéfice", 1).unwrap(), "11200000");
    assert_eq!(t.cell("bénéfice", 2).unwrap(), "12000000");

    let single = compare(&[all.get("projet-2").unwrap()]).unwrap();
    let t = single.table("Performances").unwrap();
    assert_eq!(t.header.len(), 2);
    assert_eq!(t.cell("levier à terme", 1).unwrap(), "2.67");
}

#[test]
fn transform_examples() {
    let all = Projects::load(&bundled()).unwrap();
    let p = all.get("projet-1").unwrap();
    let mut args = args_transform("projet-1");
    args.solve_v = true;
    let r = transform(p, &args).unwrap();
    let report = &r.json["report"];
    assert_relative_eq!(
        report["unit_variable_cost"].as_f64().unwrap(),
        4.0,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        report["new_unit_margin"].as_f64().unwrap(),
        16.0,
        max_relative = 1e-12
    );

    let zero = TransformArgs {
        delta_fixed_cash: Some(0.0),
        delta_fixed_noncash: Some(0.0),
        ..args_transform("projet-2")
    };
    let r = transform(all.get("projet-2").unwrap(), &zero).unwrap();
    for h in ["immediate", "term"] {
        assert_eq!(r.json["report"]["verdict"][h]["verdict"], "unchanged");
    }
}

#[test]
fn expand_examples() {
    let all = Projects::load(&bundled()).unwrap();
    let args = ExpandArgs {
        project: "projet-1".into(),
        target_decimals: 3,
        solve_price_term: true,
        solve_price_immediate: false,
    };
    let p = all.get("projet-1").unwrap();
    let r = expand(p, &args).unwrap();
    let prices = r.table("Prix").unwrap();
    assert_eq!(prices.rows.len(), 1);
    assert_eq!(
        prices.cell("prix maintenant le levier à terme", 2).unwrap(),
        "21.60"
    );

    // verdicts agree with leverages recomputed from the plan
    let plan = p.expansion.unwrap();
    let before = leverage_pair(&plan.base, plan.base.capacity());
    let after_c = plan.expanded().unwrap();
    let after = leverage_pair(&after_c, after_c.capacity());
    for (h, key) in [
        (treslev::Horizon::Immediate, "immediate"),
        (treslev::Horizon::Term, "term"),
    ] {
        let (b, a) = (
            before.get(h).as_ref().unwrap().value(),
            after.get(h).as_ref().unwrap().value(),
        );
        let want = if a < b { "improved" } else { "deteriorated" };
        assert_eq!(r.json["report"][key]["verdict"], want);
    }

    let noop = temp_config(&one_project(&format!(
        r#"{PROJET_1}, "expansion": {{"new_capacity": 2400000, "new_fixed_cash": 2000000,
        "new_fixed_noncash": 6000000, "new_unit_variable_cost": 12}}"#
    )));
    let all = Projects::load(noop.path()).unwrap();
    let r = expand(
        all.get("p").unwrap(),
        &ExpandArgs {
            project: "p".into(),
            ..args
        },
    )
    .unwrap();
    let t = r.table("Paramètres").unwrap();
    for row in &t.rows {
        let label = match &row[0] {
            treslev_cli::report::Cell::Text(s) => s.clone(),
            _ => unreachable!(),
        };
        assert_eq!(t.cell(&label, 1), t.cell(&label, 2), "{label}");
    }
    assert_eq!(r.json["report"]["immediate"]["verdict"], "unchanged");
}

#[test]
fn curves_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.csv");
    let o = with_bundled(&[
        "curves",
        "projet-1",
        "--kind",
        "elasticity-q",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    let last: Vec<f64> = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(last[0], 2_400_000.0);
    assert_relative_eq!(last[1], 1.116, epsilon = 5e-4);
    assert_relative_eq!(last[2], 1.714, epsilon = 5e-4);

    let o = with_bundled(&[
        "curves",
        "projet-1",
        "--kind",
        "indifference",
        "--levels",
        "8000000",
        "--q-min",
        "500000",
        "--q-max",
        "2000000",
        "--samples",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).lines().any(|l| l == "8000000,1000000,8"),
        "{}",
        stdout(&o)
    );

    let o = with_bundled(&[
        "--samples",
        "2",
        "curves",
        "projet-1",
        "--kind",
        "cost-behavior",
    ]);
    assert_eq!(stdout(&o).lines().count(), 3);

    let json = dir.path().join("lines.json");
    let o = with_bundled(&[
        "curves",
        "projet-1",
        "--kind",
        "absolute-lines",
        "--slopes",
        "-1e-6,-5e-7",
        "--out",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["kind"], "absolute_elasticity_lines");
}

#[test]
fn fit_costs_examples() {
    let o = treslev(&[
        "--format",
        "json",
        "fit-costs",
        "--points",
        "1000000:20,15000000:6",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_relative_eq!(v["a"].as_f64().unwrap(), -1e-6, max_relative = 1e-12);
    assert_relative_eq!(v["b"].as_f64().unwrap(), 21.0, max_relative = 1e-12);
    assert_relative_eq!(
        v["unit_elasticity_point"].as_f64().unwrap(),
        10_500_000.0,
        max_relative = 1e-12
    );

    let o = treslev(&[
        "--format",
        "json",
        "fit-costs",
        "--point",
        "8000000:12",
        "--intercept",
        "20",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_relative_eq!(v["a"].as_f64().unwrap(), -1e-6, max_relative = 1e-12);

    assert_eq!(code(&treslev(&["fit-costs", "--points", "5:3,5:3"])), 5);
    assert_eq!(code(&treslev(&["fit-costs", "--points", "1:2,2:8"])), 5);
    assert_eq!(code(&treslev(&["fit-costs", "--points", "1:2"])), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&treslev(&["analyze", "projet-1"])), 2);
    assert_eq!(code(&with_bundled(&["analyze", "projet-9"])), 2);
    assert_eq!(
        code(&with_bundled(&["curves", "projet-1", "--kind", "nope"])),
        2
    );
    assert_eq!(
        code(&with_bundled(&[
            "curves",
            "projet-2",
            "--kind",
            "cost-behavior"
        ])),
        2
    );
    assert_eq!(code(&with_bundled(&["expand", "projet-2"])), 2);

    let non_viable = temp_config(&one_project(
        r#""unit_price": 10, "unit_variable_cost": 12, "fixed_cash": 1, "fixed_noncash": 1, "capacity": 10, "investment_life": 1"#,
    ));
    let path = non_viable.path().to_str().unwrap();
    assert_eq!(code(&treslev(&["--config", path, "analyze", "p"])), 3);
    assert_eq!(code(&treslev(&["--config", path, "compare"])), 3);

    let singular = temp_config(&one_project(&format!(
        r#"{PROJET_1}, "reference_volume": 1000000"#
    )));
    let o = treslev(&[
        "--config",
        singular.path().to_str().unwrap(),
        "analyze",
        "p",
    ]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("singular"));

    assert_eq!(
        code(&with_bundled(&[
            "transform",
            "projet-1",
            "--delta-fixed-cash",
            "8000000",
            "--solve-v"
        ])),
        5
    );
    assert_eq!(
        code(&with_bundled(&[
            "curves",
            "projet-1",
            "--kind",
            "elasticity-q",
            "--out",
            "/nonexistent/dir/x.csv"
        ])),
        6
    );
}

#[test]
fn config_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_treslev"))
        .env("TRESLEV_CONFIG", bundled())
        .args(["analyze", "projet-3"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("200000"));
}

#[test]
fn config_errors_are_located() {
    let dup =
        format!(r#"{{"projects": [{{"name": "a", {PROJET_1}}}, {{"name": "a", {PROJET_1}}}]}}"#);
    let err = Projects::parse(&dup, "x.json").unwrap_err();
    assert!(
        err.to_string().contains("projects[1] (\"a\").name"),
        "{err}"
    );
    assert_eq!(err.exit_code(), 2);

    let bad = one_project(
        r#""unit_price": 20, "unit_variable_cost": 12, "fixed_cash": -1, "fixed_noncash": 0, "capacity": 10"#,
    );
    let err = Projects::parse(&bad, "x.json").unwrap_err();
    assert!(
        err.to_string().contains("projects[0] (\"p\").fixed_cash"),
        "{err}"
    );

    let bad = one_project(&format!(r#"{PROJET_1}, "reference_volume": 5000000"#));
    let err = Projects::parse(&bad, "x.json").unwrap_err();
    assert!(err.to_string().contains(".reference_volume"), "{err}");

    let err = Projects::parse("{\"projects\": [\n  {\"name\": 3}\n]}", "x.json").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");

    let err = Projects::parse(
        &one_project(&format!(r#"{PROJET_1}, "colour": 1"#)),
        "x.json",
    )
    .unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
}

#[test]
fn json_keeps_full_precision() {
    let o = with_bundled(&["--format", "json", "analyze", "projet-1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["leverage"]["immediate"].as_f64().unwrap(),
        19_200_000.0 / 17_200_000.0
    );
    let o = with_bundled(&["--format", "csv", "compare", "projet-2"]);
    assert!(
        stdout(&o).contains("levier à terme,2.6666666666666665"),
        "{}",
        stdout(&o)
    );
}
