use std::path::Path;
use std::process::ExitCode;

use coord_risk::adversary::Attack;
use coord_risk::constructions::{broad_worst_star, focused_worst_star, imposter_star, ratio_for_gain, star_reduction};
use coord_risk::io::{load_attack, load_graph, load_instance, load_strategy, parse_attack_spec, parse_generator, parse_rational_list, Instance};
use coord_risk::randomized::{
    compare_frontiers, pareto_frontier, staircase_gains, worst_case_expected_broad, worst_case_expected_focused, GainStrategy, Gains,
};
use coord_risk::rational::{parse, to_f64, zero};
use coord_risk::risk::{gain_grid, interval_index, IntervalIndex, risk, tradeoff_broad_to_focused, tradeoff_focused_to_broad, worst_case_broad, worst_case_focused};
use coord_risk::sss::{exact_sss, exact_stationary, gibbs_distribution, simulate_lll, ChainSpec};
use coord_risk::verify;
use coord_risk::{Graph, Rational};
use serde_json::{json, Value};

use crate::output::{svg_plot, Cell, Format, NumberStyle, Series, Table};
use crate::{Cli, Command, Source};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] coord_risk::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_cap() => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Applies `COORD_RISK_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("COORD_RISK_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| usage(format!("COORD_RISK_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(usage("COORD_RISK_THREADS must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    /// Broad worst star on k+2 nodes.
    BroadStar,
    /// Focused worst star whose leaf ratio realizes the given gain.
    FocusedStar,
    /// Star with the given numbers of y- and x-imposter leaves.
    ImposterStar,
    /// Star reduction of the given broad instance.
    Reduce,
}

struct Ctx {
    alpha_sys: Rational,
    style: NumberStyle,
    format: Option<Format>,
    out: Option<std::path::PathBuf>,
}

impl Ctx {
    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            return Err(usage(format!("format {f:?} is not available for this command")));
        }
        Ok(f)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write { path: path.display().to_string(), source }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_json(&self, value: &Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value).expect("values serialize");
        s.push('\n');
        self.emit(&s)
    }

    fn emit_table(&self, table: &Table, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.emit(&table.csv(self.style)),
            Format::Json => self.emit_json(&table.json_rows(self.style)),
            Format::Svg => unreachable!("tables have no generic SVG form"),
        }
    }

    fn show(&self, q: &Rational) -> String {
        self.style.show(q)
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let alpha_sys = parse(&cli.alpha_sys)?;
    if alpha_sys <= zero() {
        return Err(usage(format!("--alpha-sys must be positive, got {}", cli.alpha_sys)));
    }
    let ctx = Ctx { alpha_sys, style: NumberStyle { decimal: cli.decimal }, format: cli.format, out: cli.out };
    match cli.command {
        Command::Sss { source, alpha } => cmd_sss(&ctx, &source, &alpha)?,
        Command::Risk { source, alpha, gains, probs, gamma_b, gamma_f } => cmd_risk(&ctx, &source, alpha, gains, probs, gamma_b, gamma_f)?,
        Command::Sweep { source, grid, from, to } => cmd_sweep(&ctx, &source, grid, &from, &to)?,
        Command::Frontier { gains, strategy, probs, grid, against } => cmd_frontier(&ctx, gains, strategy.as_deref(), probs, grid, against)?,
        Command::Construct { kind, k, alpha, y_leaves, x_leaves, source } => cmd_construct(&ctx, kind, k, alpha, y_leaves, x_leaves, &source)?,
        Command::Simulate { source, alpha, beta, steps, seed } => cmd_simulate(&ctx, &source, &alpha, ChainSpec { beta, steps, seed })?,
        Command::Verify { only } => return cmd_verify(&ctx, only),
    }
    Ok(ExitCode::SUCCESS)
}

fn load_source(source: &Source) -> Result<Option<(Graph, Attack)>> {
    if let Some(path) = &source.instance {
        let Instance { graph, attack } = load_instance(path)?;
        return Ok(Some((graph, attack)));
    }
    match (&source.graph, &source.attack) {
        (None, None) => Ok(None),
        (Some(_), None) => Err(usage("--graph needs --attack")),
        (None, Some(_)) => Err(usage("--attack needs --graph")),
        (Some(g), Some(a)) => {
            let graph = graph_from(g)?;
            let attack = attack_from(a, graph.node_count())?;
            attack.validate(&graph)?;
            Ok(Some((graph, attack)))
        }
    }
}

fn require_source(source: &Source) -> Result<(Graph, Attack)> {
    load_source(source)?.ok_or_else(|| usage("an instance is required: pass --instance, or --graph with --attack"))
}

fn graph_from(spec: &str) -> Result<Graph> {
    let path = Path::new(spec);
    if path.exists() {
        return Ok(load_graph(path)?);
    }
    if spec.contains(':') && !spec.contains(['/', '\\']) {
        return Ok(parse_generator(spec)?);
    }
    Err(usage(format!("graph file {spec:?} not found")))
}

/// An existing file, else inline JSON or a shorthand.
fn attack_from(spec: &str, n: usize) -> Result<Attack> {
    let path = Path::new(spec);
    if path.exists() {
        return Ok(load_attack(path)?);
    }
    let looks_inline = spec.trim_start().starts_with('{') || spec.starts_with("broad:") || spec.starts_with("focused:");
    if !looks_inline {
        return Err(usage(format!("attack file {spec:?} not found")));
    }
    Ok(parse_attack_spec(spec, n)?)
}

fn gains_from(text: &str, alpha_sys: &Rational) -> Result<Gains> {
    if let Some(rest) = text.strip_prefix("staircase:") {
        let (m, eps) = rest.split_once(':').ok_or_else(|| usage("staircase preset is staircase:M:EPS"))?;
        let m: usize = m.parse().map_err(|_| usage(format!("bad staircase length {m:?}")))?;
        return Ok(staircase_gains(m, &parse(eps)?, alpha_sys)?);
    }
    Ok(Gains::new(parse_rational_list(text)?, alpha_sys.clone())?)
}

/// Comma-free interval tag for tables: `I_k`, `unit` or `safe`.
fn interval_label(alpha: &Rational) -> Result<String> {
    Ok(match interval_index(alpha)? {
        IntervalIndex::Step(k) => format!("I_{k}"),
        IntervalIndex::Unit => "unit".into(),
        IntervalIndex::Safe => "safe".into(),
    })
}

fn cmd_sss(ctx: &Ctx, source: &Source, alpha: &str) -> Result<()> {
    let (g, attack) = require_source(source)?;
    let gains = parse_rational_list(alpha)?;
    if gains.is_empty() {
        return Err(usage("--alpha is empty"));
    }
    let mut table = Table::new(["alpha", "welfare_min", "stable_set", "potential", "risk"]);
    let mut results = Vec::new();
    for a in &gains {
        let s = exact_sss(&g, a, &attack, &ctx.alpha_sys)?;
        let r = risk(&g, &attack, a, &ctx.alpha_sys)?;
        let set: Vec<String> = s.stable_set.iter().map(ToString::to_string).collect();
        results.push(json!({
            "alpha": ctx.show(a),
            "welfare_min": s.welfare_min.to_string(),
            "stable_set": set,
            "potential": ctx.show(&s.potential_value),
            "risk": ctx.show(r.value()),
        }));
        table.push(vec![a.into(), s.welfare_min.to_string().into(), set.join(";").into(), s.potential_value.into(), r.into_inner().into()]);
    }
    match ctx.format(Format::Json, &[Format::Json, Format::Csv])? {
        Format::Json => ctx.emit_json(&json!({
            "nodes": g.node_count(),
            "edges": g.edge_count(),
            "attack": attack.kind(),
            "alpha_sys": ctx.show(&ctx.alpha_sys),
            "results": results,
        })),
        f => ctx.emit_table(&table, f),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_risk(
    ctx: &Ctx,
    source: &Source,
    alpha: Option<String>,
    gains: Option<String>,
    probs: Option<String>,
    gamma_b: Option<String>,
    gamma_f: Option<String>,
) -> Result<()> {
    let format = ctx.format(Format::Csv, &[Format::Json, Format::Csv])?;
    let instance = load_source(source)?;
    let s = &ctx.alpha_sys;
    match (gamma_b, gamma_f) {
        (Some(_), Some(_)) => return Err(usage("pass only one of --gamma-b and --gamma-f")),
        (Some(gb), None) => {
            let gb = parse(&gb)?;
            let bound = tradeoff_broad_to_focused(&gb, s)?;
            let mut t = Table::new(["gamma_b", "focused_lower_bound", "strict"]);
            t.push(vec![gb.into(), bound.value.into_inner().into(), bound.strict.to_string().into()]);
            return ctx.emit_table(&t, format);
        }
        (None, Some(gf)) => {
            let gf = parse(&gf)?;
            let bound = tradeoff_focused_to_broad(&gf, s)?;
            let mut t = Table::new(["gamma_f", "broad_lower_bound"]);
            t.push(vec![gf.into(), bound.into_inner().into()]);
            return ctx.emit_table(&t, format);
        }
        (None, None) => {}
    }
    if let Some(gains) = gains {
        let gains = gains_from(&gains, s)?;
        let probs = parse_rational_list(probs.as_deref().unwrap_or_default())?;
        let strategy = GainStrategy::new(gains, probs)?;
        let mut columns = vec!["worst_case_broad", "worst_case_focused"];
        let mut row: Vec<Cell> = vec![worst_case_expected_broad(&strategy).into_inner().into(), worst_case_expected_focused(&strategy).into_inner().into()];
        if let Some((g, attack)) = &instance {
            columns.push("measured");
            let measured = match attack {
                Attack::Broad(a) => coord_risk::randomized::expected_risk_broad(&strategy, g, a)?,
                Attack::Focused(a) => coord_risk::randomized::expected_risk_focused(&strategy, g, a)?,
            };
            row.push(measured.into());
        }
        let mut t = Table::new(columns);
        t.push(row);
        return ctx.emit_table(&t, format);
    }
    let alpha = alpha.ok_or_else(|| usage("pass --alpha, --gains with --probs, --gamma-b or --gamma-f"))?;
    let mut columns = vec!["alpha", "interval", "worst_case_broad", "worst_case_focused"];
    if instance.is_some() {
        columns.push("measured");
    }
    let mut t = Table::new(columns);
    for a in parse_rational_list(&alpha)? {
        let mut row: Vec<Cell> = vec![
            (&a).into(),
            interval_label(&a)?.into(),
            worst_case_broad(&a, s)?.into_inner().into(),
            worst_case_focused(&a, s)?.into_inner().into(),
        ];
        if let Some((g, attack)) = &instance {
            row.push(risk(g, attack, &a, s)?.into_inner().into());
        }
        t.push(row);
    }
    ctx.emit_table(&t, format)
}

fn cmd_sweep(ctx: &Ctx, source: &Source, grid: usize, from: &str, to: &str) -> Result<()> {
    let (lo, hi) = (parse(from)?, parse(to)?);
    if grid == 0 || lo < zero() || hi <= lo {
        return Err(usage("sweep needs --grid >= 1 and 0 <= --from < --to"));
    }
    let instance = load_source(source)?;
    let s = &ctx.alpha_sys;
    let mut columns = vec!["alpha", "interval", "worst_case_broad", "worst_case_focused"];
    if instance.is_some() {
        columns.push("measured");
    }
    let alphas = gain_grid(&lo, &hi, grid);
    let rows: Vec<Vec<Cell>> = parallel_rows(&alphas, |a| {
        let mut row: Vec<Cell> = vec![
            a.into(),
            interval_label(a)?.into(),
            worst_case_broad(a, s)?.into_inner().into(),
            worst_case_focused(a, s)?.into_inner().into(),
        ];
        if let Some((g, attack)) = &instance {
            row.push(risk(g, attack, a, s)?.into_inner().into());
        }
        Ok(row)
    })?;
    let mut t = Table::new(columns);
    rows.into_iter().for_each(|r| t.push(r));
    match ctx.format(Format::Csv, &[Format::Csv, Format::Json, Format::Svg])? {
        Format::Svg => {
            let xs: Vec<f64> = alphas.iter().map(to_f64).collect();
            let curve = |col: &str| xs.iter().copied().zip(t.series(col)).filter_map(|(x, y)| y.map(|y| (x, y))).collect::<Vec<_>>();
            let mut series = vec![
                Series { label: "broad R_b*", color: "#1f77b4", points: curve("worst_case_broad") },
                Series { label: "focused R_f*", color: "#d62728", points: curve("worst_case_focused") },
            ];
            if instance.is_some() {
                series.push(Series { label: "instance", color: "#2ca02c", points: curve("measured") });
            }
            let title = format!("Worst-case risk, alpha_sys = {}", ctx.show(s));
            ctx.emit(&svg_plot(&title, "gain alpha", "risk", (to_f64(&lo), to_f64(&hi)), &series))
        }
        f => ctx.emit_table(&t, f),
    }
}

/// Order-preserving parallel map over grid points.
fn parallel_rows<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Result<U> + Sync + Send) -> Result<Vec<U>> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

fn cmd_frontier(ctx: &Ctx, gains: Option<String>, strategy: Option<&Path>, probs: Option<String>, grid: usize, against: Option<String>) -> Result<()> {
    let s = &ctx.alpha_sys;
    let (gains, file_probs) = match (gains, strategy) {
        (Some(text), _) => (gains_from(&text, s)?, None),
        (None, Some(path)) => {
            let spec = load_strategy(path)?;
            (Gains::new(spec.gains, s.clone())?, spec.probs)
        }
        (None, None) => return Err(usage("pass --gains or --strategy")),
    };
    let probs = match probs {
        Some(p) => Some(parse_rational_list(&p)?),
        None => file_probs,
    };
    if let Some(base) = against {
        let baseline = gains_from(&base, s)?;
        let report = compare_frontiers(&baseline, &gains, grid)?;
        let mut value = serde_json::to_value(&report).expect("report serializes");
        value["dominates"] = Value::Bool(report.dominates());
        ctx.format(Format::Json, &[Format::Json])?;
        return ctx.emit_json(&value);
    }
    let m = gains.len();
    let mut columns: Vec<String> = vec!["gamma_b".into(), "v_f".into()];
    columns.extend((1..=m).map(|i| format!("p_{i}")));
    let mut t = Table::new(columns);
    if let Some(p) = probs {
        let strategy = GainStrategy::new(gains.clone(), p)?;
        let mut row: Vec<Cell> = vec![worst_case_expected_broad(&strategy).into_inner().into(), worst_case_expected_focused(&strategy).into_inner().into()];
        row.extend(strategy.probs().iter().map(Cell::from));
        t.push(row);
    } else {
        for point in pareto_frontier(&gains, grid)? {
            let mut row: Vec<Cell> = vec![point.expected_broad.into_inner().into(), point.expected_focused.into_inner().into()];
            row.extend(point.distribution.iter().map(Cell::from));
            t.push(row);
        }
    }
    match ctx.format(Format::Csv, &[Format::Csv, Format::Json, Format::Svg])? {
        Format::Svg => {
            let points: Vec<(f64, f64)> = t.series("gamma_b").into_iter().zip(t.series("v_f")).filter_map(|(x, y)| Some((x?, y?))).collect();
            let label = format!("Par, M = {m}");
            let title = format!("Pareto frontier, alpha_sys = {}", ctx.show(s));
            ctx.emit(&svg_plot(&title, "expected broad risk", "expected focused risk", (0.0, 1.0), &[Series { label: &label, color: "#1f77b4", points }]))
        }
        f => ctx.emit_table(&t, f),
    }
}

fn cmd_construct(ctx: &Ctx, kind: Kind, k: Option<usize>, alpha: Option<String>, y_leaves: Option<usize>, x_leaves: Option<usize>, source: &Source) -> Result<()> {
    ctx.format(Format::Json, &[Format::Json])?;
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("{flag} is required for this kind")));
    let value = match kind {
        Kind::BroadStar => serde_json::to_value(broad_worst_star(need(k, "--k")?)?.into_attack_pair()),
        Kind::ImposterStar => serde_json::to_value(imposter_star(need(y_leaves, "--y-leaves")?, need(x_leaves, "--x-leaves")?)?.into_attack_pair()),
        Kind::FocusedStar => {
            let a = parse(alpha.as_deref().ok_or_else(|| usage("--alpha is required for focused-star"))?)?;
            let (nx, ny) = ratio_for_gain(&a)?;
            let (graph, attack) = focused_worst_star(nx, ny)?.into_attack();
            serde_json::to_value(Instance { graph, attack })
        }
        Kind::Reduce => {
            let a = parse(alpha.as_deref().ok_or_else(|| usage("--alpha is required for reduce"))?)?;
            let (g, attack) = require_source(source)?;
            let Attack::Broad(broad) = attack else { return Err(usage("reduce needs a broad attack")) };
            let out = star_reduction(&g, &broad, &a, &ctx.alpha_sys)?;
            let mut v = serde_json::to_value(out.instance.clone().into_attack_pair()).expect("instances serialize");
            v["outcome"] = serde_json::to_value(out.outcome).expect("serializes");
            v["efficiency"] = Value::String(ctx.show(&out.efficiency));
            v["y_partition"] = serde_json::to_value(&out.y_partition).expect("serializes");
            Ok(v)
        }
    }
    .expect("instances serialize");
    ctx.emit_json(&value)
}

trait IntoInstance {
    fn into_attack_pair(self) -> Instance;
}

impl IntoInstance for coord_risk::constructions::BroadInstance {
    fn into_attack_pair(self) -> Instance {
        let (graph, attack) = self.into_attack();
        Instance { graph, attack }
    }
}

fn cmd_simulate(ctx: &Ctx, source: &Source, alpha: &str, chain: ChainSpec) -> Result<()> {
    let (g, attack) = require_source(source)?;
    let a = parse(alpha)?;
    let sim = simulate_lll(&g, &a, &attack, &chain)?;
    // Oracles only where the exact chain is affordable.
    let exact = match exact_stationary(&g, &a, &attack, chain.beta) {
        Ok(d) => Some(d),
        Err(e) if e.is_cap() => None,
        Err(e) => return Err(e.into()),
    };
    let gibbs = match &exact {
        Some(_) => Some(gibbs_distribution(&g, &a, &attack, chain.beta)?),
        None => None,
    };
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let mut t = Table::new(["profile", "frequency", "stationary", "gibbs"]);
    // Every profile of the space when the oracle enumerates it, else the visited ones.
    let profiles: Vec<_> = match &exact { Some(d) => d.iter().map(|(p, _)| p.clone()).collect(), None => sim.iter().map(|(p, _)| p.clone()).collect() };
    for p in &profiles {
        t.push(vec![p.to_string().into(), sim.get(p).into(), exact.as_ref().map(|d| d.get(p)).into(), gibbs.as_ref().map(|d| d.get(p)).into()]);
    }
    match format {
        Format::Json => ctx.emit_json(&json!({
            "beta": chain.beta,
            "steps": chain.steps,
            "seed": chain.seed,
            "mode": sim.mode().map(ToString::to_string),
            "total_variation": exact.as_ref().map(|d| d.total_variation(&sim)),
            "profiles": t.json_rows(ctx.style),
        })),
        f => ctx.emit_table(&t, f),
    }
}

fn cmd_verify(ctx: &Ctx, only: Option<String>) -> Result<ExitCode> {
    let ids: Vec<u8> = match only {
        Some(list) => list.split(',').map(|s| s.trim().parse::<u8>().map_err(|_| usage(format!("bad suite id {s:?}")))).collect::<Result<_>>()?,
        None => verify::SUITES.iter().map(|s| s.0).collect(),
    };
    if let Some(bad) = ids.iter().find(|id| !verify::SUITES.iter().any(|s| s.0 == **id)) {
        return Err(usage(format!("no suite {bad}; ids run 1 to {}", verify::SUITES.len())));
    }
    let reports: Vec<verify::CheckReport> = ids.into_iter().map(verify::run).collect();
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    match format {
        Format::Json => ctx.emit_json(&serde_json::to_value(&reports).expect("reports serialize"))?,
        _ => {
            let mut t = Table::new(["id", "name", "passed", "detail"]);
            for r in &reports {
                t.push(vec![Cell::Int(r.id.into()), r.name.into(), r.passed.to_string().into(), r.detail.clone().into()]);
            }
            ctx.emit_table(&t, format)?;
        }
    }
    Ok(if reports.iter().all(|r| r.passed) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
