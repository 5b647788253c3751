use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use treslev::cost_behavior::{fit_cost_model, fit_cost_model_with_intercept};
use treslev::curves::{
    absolute_elasticity_lines, cost_behavior_curves, elasticity_curve, indifference_contours,
    margin_elasticity_curve, relative_elasticity_curve, Spacing,
};
use treslev::model::{flow_summary, performance_summary};
use treslev::risk::{assess_expansion, assess_transformation, PriceBounds};
use treslev::thresholds::{leverage_pair, sensitivity_zone, thresholds};
use treslev::{Error, Grid, Horizon, Sampling};

use crate::cli::{
    Cli, Command, CurveKindArg, CurvesArgs, ExpandArgs, FitArgs, Format, TransformArgs,
};
use crate::config::{Project, Projects};
use crate::error::{CliError, EXIT_OK, EXIT_SINGULAR};
use crate::report::{render_csv, render_text, Cell, Table};

/// What a command prints and the exit code it ends with.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

/// A rendered-on-demand command result.
#[derive(Debug, Clone)]
pub struct Report {
    pub tables: Vec<Table>,
    pub json: Value,
    pub code: i32,
}

impl Report {
    fn ok(tables: Vec<Table>, json: Value) -> Self {
        Self {
            tables,
            json,
            code: EXIT_OK,
        }
    }

    pub fn table(&self, title_prefix: &str) -> Option<&Table> {
        self.tables
            .iter()
            .find(|t| t.title.starts_with(title_prefix))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => render_text(&self.tables),
            Format::Csv => render_csv(&self.tables),
            Format::Json => pretty(&self.json),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn to_value<S: Serialize>(x: &S) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn tag<S: Serialize>(x: &S) -> String {
    match to_value(x) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let sampling = Sampling {
        samples: cli.samples,
        spacing: Spacing::Uniform,
        gap: cli.gap,
    };
    let report = match &cli.command {
        Command::FitCosts(args) => fit_costs(args)?,
        Command::Curves(args) => {
            let projects = load(cli)?;
            return curves(projects.get(&args.project)?, args, sampling, cli.format);
        }
        Command::Analyze { project } => analyze(load(cli)?.get(project)?)?,
        Command::Compare { projects } => {
            let all = load(cli)?;
            let selected = if projects.is_empty() {
                all.projects.iter().collect()
            } else {
                projects
                    .iter()
                    .map(|n| all.get(n))
                    .collect::<Result<Vec<_>, _>>()?
            };
            compare(&selected)?
        }
        Command::Transform(args) => transform(load(cli)?.get(&args.project)?, args)?,
        Command::Expand(args) => expand(load(cli)?.get(&args.project)?, args)?,
    };
    Ok(Outcome {
        stdout: report.render(cli.format),
        code: report.code,
    })
}

fn load(cli: &Cli) -> Result<Projects, CliError> {
    match &cli.config {
        Some(path) => Projects::load(path),
        None => Err(CliError::Config(
            "no project file: pass --config or set TRESLEV_CONFIG".into(),
        )),
    }
}

fn viable(p: &Project) -> Result<f64, CliError> {
    p.combination
        .viable_margin()
        .map_err(|e| CliError::project(&p.name, e))
}

fn leverage_cell(e: &treslev::Result<treslev::Elasticity>, decimals: u32) -> Cell {
    match e {
        Ok(e) => Cell::Dec(e.value(), decimals),
        Err(Error::AtThreshold) => Cell::Missing("singular"),
        Err(_) => Cell::Missing("undefined"),
    }
}

fn opt_cell(x: Option<f64>, decimals: u32) -> Cell {
    x.map_or(Cell::Missing("singular"), |x| Cell::Dec(x, decimals))
}

const HORIZONS: [&str; 3] = ["", "liquidité immédiate", "liquidité à terme"];

pub fn analyze(p: &Project) -> Result<Report, CliError> {
    viable(p)?;
    let c = &p.combination;
    let q = p.reference_volume;
    let flows = flow_summary(c, q).map_err(|e| CliError::project(&p.name, e))?;
    let th = thresholds(c, q).map_err(|e| CliError::project(&p.name, e))?;
    let lev = leverage_pair(c, q);
    let zones = Horizon::ALL.map(|h| sensitivity_zone(q, th.q_star(h)));

    let mut t_flows = Table::new(
        format!("Flux au volume de référence ({})", p.name),
        &["", "valeur"],
    );
    t_flows
        .row("volume", [Cell::Int(flows.volume)])
        .row("chiffre d'affaires", [Cell::Int(flows.revenue)])
        .row("coûts variables", [Cell::Int(flows.variable_total)])
        .row("marge sur coûts variables", [Cell::Int(flows.margin_total)])
        .row("CAF", [Cell::Int(flows.caf)])
        .row("résultat", [Cell::Int(flows.result)]);

    let mut t_matrix = Table::new("Indicateurs de rupture de la liquidité", &HORIZONS);
    t_matrix
        .row(
            "seuil de production",
            Horizon::ALL.map(|h| Cell::Int(th.q_star(h))),
        )
        .row(
            "marge critique",
            Horizon::ALL.map(|h| Cell::Dec(th.m_star(h), 3)),
        );

    let mut t_lev = Table::new("Levier de trésorerie", &HORIZONS);
    t_lev
        .row(
            "élasticité",
            Horizon::ALL.map(|h| leverage_cell(lev.get(h), 2)),
        )
        .row("zone", zones.map(|z| Cell::text(tag(&z))));

    let singular = Horizon::ALL
        .iter()
        .any(|h| matches!(lev.get(*h), Err(Error::AtThreshold)));
    let json = json!({
        "project": p.name,
        "reference_volume": q,
        "flows": flows,
        "thresholds": th,
        "leverage": lev,
        "zones": { "immediate": zones[0], "term": zones[1] },
    });
    Ok(Report {
        tables: vec![t_flows, t_matrix, t_lev],
        json,
        code: if singular { EXIT_SINGULAR } else { EXIT_OK },
    })
}

pub fn compare(projects: &[&Project]) -> Result<Report, CliError> {
    if projects.is_empty() {
        return Err(CliError::Usage("no project to compare".into()));
    }
    let mut perf = Vec::with_capacity(projects.len());
    for p in projects {
        viable(p)?;
        perf.push(
            performance_summary(&p.combination, p.reference_volume)
                .map_err(|e| CliError::project(&p.name, e))?,
        );
    }
    let mut header = vec![""];
    header.extend(projects.iter().map(|p| p.name.as_str()));
    let mut t = Table::new("Performances des projets", &header);
    let col = |f: &dyn Fn(usize) -> Cell| (0..projects.len()).map(f).collect::<Vec<_>>();
    let c = |i: usize| &projects[i].combination;
    t.row(
        "durée de vie",
        col(&|i| Cell::Unit(c(i).investment_life().unwrap_or(f64::NAN))),
    )
    .row("capacité", col(&|i| Cell::Int(c(i).capacity())))
    .row(
        "coûts fixes totaux",
        col(&|i| Cell::Int(c(i).fixed_total())),
    )
    .row(
        "charges calculées",
        col(&|i| Cell::Int(c(i).fixed_noncash())),
    )
    .row(
        "coûts fixes décaissables",
        col(&|i| Cell::Int(c(i).fixed_cash())),
    )
    .row(
        "capital investi",
        col(&|i| Cell::Int(perf[i].capital_invested)),
    )
    .row("marge unitaire", col(&|i| Cell::Unit(c(i).unit_margin())))
    .row("marge totale", col(&|i| Cell::Int(perf[i].margin_total)))
    .row("bénéfice", col(&|i| Cell::Int(perf[i].profit)))
    .row("rentabilité", col(&|i| Cell::Dec(perf[i].profitability, 2)))
    .row(
        "levier immédiat",
        col(&|i| leverage_cell(&perf[i].leverage.immediate, 2)),
    )
    .row(
        "levier à terme",
        col(&|i| leverage_cell(&perf[i].leverage.term, 2)),
    );

    let json = Value::Array(
        projects
            .iter()
            .zip(&perf)
            .map(|(p, perf)| {
                let c = &p.combination;
                json!({
                    "project": p.name,
                    "investment_life": c.investment_life(),
                    "capacity": c.capacity(),
                    "fixed_total": c.fixed_total(),
                    "fixed_noncash": c.fixed_noncash(),
                    "fixed_cash": c.fixed_cash(),
                    "unit_margin": c.unit_margin(),
                    "performance": perf,
                })
            })
            .collect(),
    );
    Ok(Report::ok(vec![t], json))
}

pub fn transform(p: &Project, args: &TransformArgs) -> Result<Report, CliError> {
    let flags_given = args.delta_fixed_cash.is_some() || args.delta_fixed_noncash.is_some();
    let mut entry = match (p.transformation, flags_given) {
        (Some(e), _) => e,
        (None, true) => Default::default(),
        (None, false) => {
            return Err(CliError::Usage(format!(
                "project {:?} has no transformation block; pass --delta-fixed-cash or --delta-fixed-noncash",
                p.name
            )))
        }
    };
    if let Some(d) = args.delta_fixed_cash {
        entry.delta_fixed_cash = d;
    }
    if let Some(d) = args.delta_fixed_noncash {
        entry.delta_fixed_noncash = d;
    }
    if args.solve_v {
        entry.new_unit_variable_cost = None;
    } else if args.new_v.is_some() {
        entry.new_unit_variable_cost = args.new_v;
    }
    viable(p)?;
    let wrap = |e| CliError::project(&p.name, e);
    let plan = p.transformation_plan(entry).map_err(wrap)?;
    let r = assess_transformation(&plan).map_err(wrap)?;

    let mut t_req = Table::new(format!("Exigences par horizon ({})", p.name), &HORIZONS);
    t_req
        .row(
            "coûts fixes avant",
            Horizon::ALL.map(|h| Cell::Int(r.requirement(h).fixed_before)),
        )
        .row(
            "coûts fixes après",
            Horizon::ALL.map(|h| Cell::Int(r.requirement(h).fixed_after)),
        )
        .row(
            "élasticité optimale",
            Horizon::ALL.map(|h| match &r.requirement(h).optimal_elasticity {
                Ok(e) => Cell::Dec(e.value(), 4),
                Err(_) => Cell::Missing("undefined"),
            }),
        )
        .row(
            "coût variable plancher",
            Horizon::ALL.map(|h| match &r.requirement(h).variable_cost_floor {
                Ok(v) => Cell::Unit(*v),
                Err(Error::InfeasibleDrop { .. }) => Cell::Missing("infeasible"),
                Err(_) => Cell::Missing("undefined"),
            }),
        );

    let mut t_used = Table::new("Combinaison retenue", &["", "valeur"]);
    t_used
        .row("coût variable unitaire", [Cell::Unit(r.unit_variable_cost)])
        .row(
            "origine",
            [Cell::text(if r.solved { "solved" } else { "proposed" })],
        )
        .row("marge unitaire", [Cell::Unit(r.new_unit_margin)]);

    let mut t_evo = Table::new(
        "Évolution des seuils de liquidité",
        &[
            "",
            "coût variable",
            "marge unitaire",
            "seuil immédiat",
            "seuil à terme",
        ],
    );
    let evo_cells = |row: &treslev::risk::EvolutionRow<f64>| {
        [
            Cell::Unit(row.unit_variable_cost),
            Cell::Unit(row.unit_margin),
            Cell::Int(row.threshold_immediate),
            Cell::Int(row.threshold_term),
        ]
    };
    t_evo.row("avant", evo_cells(&r.evolution_before));
    for row in &r.evolution_after {
        t_evo.row("après", evo_cells(row));
    }

    let mut t_verdict = Table::new("Verdicts", &HORIZONS);
    let a = |h| r.verdict.get(h);
    t_verdict
        .row(
            "seuil avant",
            Horizon::ALL.map(|h| Cell::Int(a(h).threshold_before)),
        )
        .row(
            "seuil après",
            Horizon::ALL.map(|h| Cell::Int(a(h).threshold_after)),
        )
        .row(
            "levier avant",
            Horizon::ALL.map(|h| opt_cell(a(h).leverage_before, 2)),
        )
        .row(
            "levier après",
            Horizon::ALL.map(|h| opt_cell(a(h).leverage_after, 2)),
        )
        .row(
            "verdict",
            Horizon::ALL.map(|h| Cell::text(a(h).verdict.label())),
        );

    let json = json!({ "project": p.name, "report": r });
    Ok(Report::ok(vec![t_req, t_used, t_evo, t_verdict], json))
}

pub fn expand(p: &Project, args: &ExpandArgs) -> Result<Report, CliError> {
    let plan = p
        .expansion
        .ok_or_else(|| CliError::Usage(format!("project {:?} has no expansion block", p.name)))?;
    viable(p)?;
    let r = assess_expansion(&plan, Some(args.target_decimals))
        .map_err(|e| CliError::project(&p.name, e))?;
    let before = &plan.base;
    let after = plan.expanded().map_err(|e| CliError::project(&p.name, e))?;
    let (fb, fa) = (&r.flows_before, &r.flows_after);

    let mut t_params = Table::new(
        format!("Paramètres de production avant / après ({})", p.name),
        &["", "avant", "après"],
    );
    let a = |h| r.assessment(h);
    t_params
        .row(
            "capacité",
            [Cell::Int(before.capacity()), Cell::Int(after.capacity())],
        )
        .row(
            "prix unitaire",
            [
                Cell::Unit(before.unit_price()),
                Cell::Unit(after.unit_price()),
            ],
        )
        .row(
            "coût variable unitaire",
            [
                Cell::Unit(before.unit_variable_cost()),
                Cell::Unit(after.unit_variable_cost()),
            ],
        )
        .row(
            "marge unitaire",
            [
                Cell::Unit(before.unit_margin()),
                Cell::Unit(after.unit_margin()),
            ],
        )
        .row(
            "coûts fixes décaissables",
            [
                Cell::Int(before.fixed_cash()),
                Cell::Int(after.fixed_cash()),
            ],
        )
        .row(
            "charges calculées",
            [
                Cell::Int(before.fixed_noncash()),
                Cell::Int(after.fixed_noncash()),
            ],
        )
        .row(
            "coûts fixes totaux",
            [
                Cell::Int(before.fixed_total()),
                Cell::Int(after.fixed_total()),
            ],
        )
        .row(
            "marge totale",
            [Cell::Int(fb.margin_total), Cell::Int(fa.margin_total)],
        )
        .row("CAF", [Cell::Int(fb.caf), Cell::Int(fa.caf)])
        .row("résultat", [Cell::Int(fb.result), Cell::Int(fa.result)]);
    for (label, h) in [
        ("seuil de liquidité immédiate", Horizon::Immediate),
        ("seuil de liquidité à terme", Horizon::Term),
    ] {
        t_params.row(
            label,
            [
                Cell::Int(a(h).threshold_before),
                Cell::Int(a(h).threshold_after),
            ],
        );
    }
    for (label, h) in [
        ("levier immédiat", Horizon::Immediate),
        ("levier à terme", Horizon::Term),
    ] {
        t_params.row(
            label,
            [
                opt_cell(a(h).leverage_before, 3),
                opt_cell(a(h).leverage_after, 3),
            ],
        );
    }

    let mut t_cmp = Table::new("Comparaison des sensibilités", &HORIZONS);
    t_cmp
        .row(
            "q1/q2",
            Horizon::ALL.map(|h| Cell::Dec(r.comparison(h).volume_ratio, 3)),
        )
        .row(
            "q*1/q*2",
            Horizon::ALL.map(|h| Cell::Dec(r.comparison(h).threshold_ratio, 3)),
        )
        .row(
            "verdict",
            Horizon::ALL.map(|h| Cell::text(r.comparison(h).verdict.label())),
        );

    let mut tables = vec![t_params, t_cmp];
    let (want_term, want_imm) = match (args.solve_price_term, args.solve_price_immediate) {
        (false, false) => (true, true),
        flags => flags,
    };
    let d = args.target_decimals;
    let mut t_prices = Table::new(
        "Prix",
        &[
            "",
            "levier visé",
            "prix",
            "levier visé arrondi",
            "prix (visée arrondie)",
        ],
    );
    let rounded = r.prices_rounded_targets.as_ref();
    let price = |b: Option<&PriceBounds<f64>>, term: bool| match b.map(|b| {
        if term {
            &b.term_maintaining
        } else {
            &b.immediate_tolerable
        }
    }) {
        Some(Ok(p)) => Cell::Dec(*p, 2),
        _ => Cell::Missing("undefined"),
    };
    if want_term {
        t_prices.row(
            "prix maintenant le levier à terme",
            [
                opt_cell(r.prices.target_term, 4),
                price(Some(&r.prices), true),
                opt_cell(rounded.and_then(|b| b.target_term), d),
                price(rounded, true),
            ],
        );
    }
    if want_imm {
        t_prices.row(
            "prix plancher du levier immédiat",
            [
                opt_cell(r.prices.target_immediate, 4),
                price(Some(&r.prices), false),
                opt_cell(rounded.and_then(|b| b.target_immediate), d),
                price(rounded, false),
            ],
        );
    }
    tables.push(t_prices);

    let json = json!({ "project": p.name, "report": r });
    Ok(Report::ok(tables, json))
}

fn parse_point(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("expected a point f:v, got {s:?}"));
    let (f, v) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        f.trim().parse().map_err(|_| bad())?,
        v.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn fit_costs(args: &FitArgs) -> Result<Report, CliError> {
    let model = match (&args.points, &args.point, args.intercept) {
        (Some(points), _, _) => {
            let pts = points
                .split(',')
                .map(parse_point)
                .collect::<Result<Vec<_>, _>>()?;
            let [p1, p2] = pts[..] else {
                return Err(CliError::Usage("--points takes exactly two points".into()));
            };
            fit_cost_model(p1, p2)
        }
        (None, Some(point), Some(b)) => fit_cost_model_with_intercept(parse_point(point)?, b),
        _ => {
            return Err(CliError::Usage(
                "pass --points f:v,f:v or --point f:v --intercept b".into(),
            ))
        }
    }
    .map_err(CliError::Fit)?;

    let mut t = Table::new("Comportement des coûts v = a·f + b", &["", "valeur"]);
    t.row("a", [Cell::Sci(model.slope())])
        .row("b", [Cell::Unit(model.intercept())])
        .row(
            "domaine de validité -b/a",
            [Cell::Int(model.domain_limit())],
        )
        .row(
            "élasticité -1 en -b/(2a)",
            [Cell::Int(model.unit_elasticity_point())],
        );
    let json = json!({
        "a": model.slope(),
        "b": model.intercept(),
        "domain_limit": model.domain_limit(),
        "unit_elasticity_point": model.unit_elasticity_point(),
    });
    Ok(Report::ok(vec![t], json))
}

/// Builds the grid of `args.kind` with ranges defaulted from the project.
pub fn curve_grid(
    p: &Project,
    args: &CurvesArgs,
    mut sampling: Sampling,
) -> Result<Grid, CliError> {
    if args.log {
        sampling.spacing = Spacing::Log;
    }
    let c = &p.combination;
    let n = sampling.samples.max(1) as f64;
    let wrap = |e| CliError::project(&p.name, e);
    let q_range = (
        args.q_min.unwrap_or(c.capacity() / n),
        args.q_max.unwrap_or(c.capacity()),
    );
    let model = || {
        p.cost_model.ok_or_else(|| {
            CliError::Usage(format!("project {:?} has no cost_behavior block", p.name))
        })
    };
    let f_range = |limit: f64| {
        (
            args.f_min.unwrap_or(0.01 * limit),
            args.f_max.unwrap_or(0.99 * limit),
        )
    };
    let grid = match args.kind {
        CurveKindArg::ElasticityQ => {
            viable(p)?;
            elasticity_curve(c, q_range, &sampling)
        }
        CurveKindArg::ElasticityM => {
            let q = p.reference_volume;
            let hi = (3.0 * c.fixed_total() / q).max(c.unit_margin());
            let hi = args.m_max.unwrap_or(hi);
            let lo = args.m_min.unwrap_or(if args.log { hi / n } else { 0.0 });
            margin_elasticity_curve(c, q, (lo, hi), &sampling)
        }
        CurveKindArg::Indifference => {
            let levels = if args.levels.is_empty() {
                let mut l = vec![c.fixed_cash(), c.fixed_total()];
                l.retain(|f| *f > 0.0);
                l.dedup();
                l
            } else {
                args.levels.clone()
            };
            let m_range = (
                args.m_min.unwrap_or(0.0),
                args.m_max.unwrap_or(c.unit_price()),
            );
            indifference_contours(&levels, q_range, m_range, &sampling)
        }
        CurveKindArg::CostBehavior => {
            let m = model()?;
            cost_behavior_curves(&m, f_range(m.domain_limit()), &sampling)
        }
        CurveKindArg::RelativeElasticity => {
            let m = model()?;
            relative_elasticity_curve(&m, f_range(m.domain_limit()), &sampling)
        }
        CurveKindArg::AbsoluteLines => {
            let slopes = if args.slopes.is_empty() {
                vec![model()?.slope()]
            } else {
                args.slopes.clone()
            };
            let base = (
                args.base_f.unwrap_or(c.fixed_total()),
                args.base_v.unwrap_or(c.unit_variable_cost()),
            );
            let df = (args.df_min.unwrap_or(0.0), args.df_max.unwrap_or(1.0));
            absolute_elasticity_lines(base, &slopes, df, &sampling)
        }
    };
    grid.map_err(wrap)
}

pub fn curves(
    p: &Project,
    args: &CurvesArgs,
    sampling: Sampling,
    format: Format,
) -> Result<Outcome, CliError> {
    let grid = curve_grid(p, args, sampling)?;
    let stdout = match &args.out {
        Some(path) => {
            let body = if is_json(path) {
                grid.to_json()
            } else {
                grid.to_csv()
            };
            std::fs::write(path, body).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            format!(
                "{}: {} rows -> {}\n",
                tag(&grid.kind),
                grid.rows.len(),
                path.display()
            )
        }
        None if format == Format::Json => grid.to_json(),
        None => grid.to_csv(),
    };
    Ok(Outcome {
        stdout,
        code: EXIT_OK,
    })
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}
