//! `bconc`: model queries, comparison bounds, spectra, audits, graph
//! analysis and dimension sweeps from the command line.
//!
//! Exit status is 0 on success, 2 for invalid input and 3 when no
//! comparison theorem covers the requested curvature regime. Inequality
//! audits that find violations still exit with 0 and flag them in the report.

mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bconc::asymptotics::SweepConfig;
use bconc::discrete::{bsep_k, BoundaryGraph, SeparationMode};
use bconc::models::{comparison_bound, AdmissibleGenerator, ComparisonKind, ModelSpace};
use bconc::spectral::{audit_inequalities, Boundary, CurvatureFlags, RadialProblem};
use bconc::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use svg::{line_chart, Series};

#[derive(Parser)]
#[command(name = "bconc", version, about = "Boundary concentration toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for generated densities.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and screen invariants of a model space.
    Model(ModelArgs),
    /// Comparison upper bound on the observable inscribed radius.
    Compare(CompareArgs),
    /// Lowest weighted Dirichlet eigenvalues of a radial problem.
    Spectrum(SpectrumArgs),
    /// Spectral and isoperimetric inequality audit of a radial problem.
    Audit(AuditArgs),
    /// Boundary distance, screen and separation of a graph.
    Graph(GraphArgs),
    /// Dimension sweep or concentration classification from a JSON config.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Model descriptor JSON, e.g. `{"tag": "exponential", "lambda": 1}`.
    #[arg(long, conflicts_with = "tag")]
    descriptor: Option<String>,
    /// Model tag: ball, warped, half_gaussian, exponential, weighted_warped_71, weighted_warped_72.
    #[arg(long, required_unless_present = "descriptor")]
    tag: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Effective dimension of the weighted warped model.
    #[arg(long = "big-n")]
    big_n: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Mass deficits; repeat for several.
    #[arg(long, default_values_t = [0.5])]
    eta: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindTag {
    FiniteN,
    Twisted,
    Infinite,
}

#[derive(Args)]
struct CompareArgs {
    /// Curvature class JSON, e.g. `{"kind": "infinite", "k": 0, "lambda": 2}`.
    #[arg(long, conflicts_with = "kind")]
    class: Option<String>,
    #[arg(long, value_enum, required_unless_present = "class")]
    kind: Option<KindTag>,
    /// Dimension `N` (or `n` for twisted products).
    #[arg(long)]
    n: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, default_values_t = [0.5])]
    eta: Vec<f64>,
}

#[derive(Args)]
struct ProblemSource {
    /// Problem file: CSV (`t,theta` with an optional `# {json}` header) or JSON.
    #[arg(long, conflicts_with = "generate")]
    file: Option<PathBuf>,
    /// Draw an admissible density for this curvature class JSON (uses --seed).
    #[arg(long, required_unless_present = "file")]
    generate: Option<String>,
    /// Grid points for generated problems.
    #[arg(long, default_value_t = 2000)]
    m: usize,
    /// Declare both nonnegativity flags on a generated problem.
    #[arg(long)]
    nonneg_flags: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    source: ProblemSource,
    /// Number of eigenvalues.
    #[arg(long, default_value_t = 5)]
    k: usize,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    source: ProblemSource,
    /// Largest eigenvalue index used by the audit.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_values_t = [0.5])]
    eta: Vec<f64>,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph JSON `{"vertices", "edges": [[u, v, len]], "boundary", "measure"?}`.
    #[arg(long)]
    file: PathBuf,
    #[command(subcommand)]
    query: GraphQuery,
}

#[derive(Subcommand)]
enum GraphQuery {
    /// Distance of each vertex to the boundary.
    Rho,
    /// Observable inscribed radius of the boundary-distance screen.
    Obs {
        #[arg(long, default_values_t = [0.5])]
        eta: Vec<f64>,
    },
    /// Boundary separation distance of sets with the given masses.
    Bsep {
        /// One mass per set.
        #[arg(long, required = true)]
        eta: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Greedy,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config JSON file.
    #[arg(long)]
    config: PathBuf,
}

/// What a command produced, in every format it supports.
struct Output {
    json: String,
    csv: String,
    svg: Option<String>,
}

enum Failure {
    Input(String),
    NoComparison(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoComparison(_) => Failure::NoComparison(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| emit(&cli, out));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::NoComparison(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Model(a) => cmd_model(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Spectrum(a) => cmd_spectrum(a, cli.seed),
        Command::Audit(a) => cmd_audit(a, cli.seed),
        Command::Graph(a) => cmd_graph(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn emit(cli: &Cli, out: Output) -> CliResult<()> {
    let text = match cli.format {
        Format::Json => out.json,
        Format::Csv => out.csv,
        Format::Svg => out.svg.ok_or_else(|| Failure::Input("this command has no SVG output".into()))?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialise");
    s.push('\n');
    s
}

/// Puts the flags that were given into a JSON object next to `tag_key: tag`.
fn descriptor(tag_key: &str, tag: &str, fields: &[(&str, Option<serde_json::Value>)]) -> String {
    let mut map = serde_json::Map::new();
    map.insert(tag_key.into(), tag.into());
    for (name, value) in fields {
        if let Some(v) = value {
            map.insert((*name).into(), v.clone());
        }
    }
    serde_json::Value::Object(map).to_string()
}

#[derive(Serialize)]
struct ModelRow {
    eta: f64,
    obs_inradius: f64,
    screen_lower: f64,
    screen_upper: f64,
}

#[derive(Serialize)]
struct ModelReport {
    model: ModelSpace,
    inradius: f64,
    total_mass: f64,
    rows: Vec<ModelRow>,
}

fn cmd_model(a: &ModelArgs) -> CliResult<Output> {
    let text = match (&a.descriptor, &a.tag) {
        (Some(d), _) => d.clone(),
        (None, Some(tag)) => descriptor(
            "tag",
            tag,
            &[
                ("n", a.n.map(Into::into)),
                ("kappa", a.kappa.map(Into::into)),
                ("lambda", a.lambda.map(Into::into)),
                ("k", a.k.map(Into::into)),
                ("N", a.big_n.map(Into::into)),
                ("delta", a.delta.map(Into::into)),
            ],
        ),
        (None, None) => unreachable!("clap requires --descriptor or --tag"),
    };
    let model = ModelSpace::from_json(&text)?;
    let screen = model.boundary_screen()?;
    let mut rows = Vec::with_capacity(a.eta.len());
    for &eta in &a.eta {
        let obs = model.closed_form_obs_inradius(eta)?;
        let s = screen.obs_inradius(eta)?;
        rows.push(ModelRow { eta, obs_inradius: obs, screen_lower: s.lower, screen_upper: s.upper });
    }
    let report = ModelReport { model, inradius: model.inradius()?, total_mass: model.total_mass()?, rows };
    let mut csv = String::from("eta,obs_inradius,screen_lower,screen_upper\n");
    for r in &report.rows {
        let _ = writeln!(csv, "{:?},{:?},{:?},{:?}", r.eta, r.obs_inradius, r.screen_lower, r.screen_upper);
    }
    let cdf = Series::new("P[ρ ≤ t]", screen.csv_points(200));
    let svg = line_chart("Boundary distance law", "t", "CDF", &[cdf]);
    Ok(Output { json: to_json(&report), csv, svg: Some(svg) })
}

#[derive(Serialize)]
struct BoundRow {
    eta: f64,
    bound: f64,
}

fn cmd_compare(a: &CompareArgs) -> CliResult<Output> {
    let text = match (&a.class, a.kind) {
        (Some(c), _) => c.clone(),
        (None, Some(KindTag::FiniteN)) => {
            serde_json::json!({ "kind": "finite_n", "n": a.n, "curvature": { "kappa": a.kappa, "lambda": a.lambda } }).to_string()
        }
        (None, Some(KindTag::Twisted)) => {
            serde_json::json!({ "kind": "twisted", "n": a.n, "kappa": a.kappa, "lambda": a.lambda, "delta": a.delta }).to_string()
        }
        (None, Some(KindTag::Infinite)) => serde_json::json!({ "kind": "infinite", "k": a.k, "lambda": a.lambda }).to_string(),
        (None, None) => unreachable!("clap requires --class or --kind"),
    };
    let kind = parse_kind(&text)?;
    let mut rows = Vec::with_capacity(a.eta.len());
    for &eta in &a.eta {
        rows.push(BoundRow { eta, bound: comparison_bound(&kind, eta)? });
    }
    let mut csv = String::from("eta,bound\n");
    for r in &rows {
        let _ = writeln!(csv, "{:?},{:?}", r.eta, r.bound);
    }
    let svg = line_chart("Comparison bound", "η", "ObsInRad bound", &[Series::new("bound", rows.iter().map(|r| (r.eta, r.bound)).collect())]);
    Ok(Output { json: to_json(&serde_json::json!({ "class": kind, "rows": rows })), csv, svg: Some(svg) })
}

fn parse_kind(text: &str) -> CliResult<ComparisonKind> {
    serde_json::from_str(text).map_err(|e| Failure::Input(format!("curvature class JSON: {e}")))
}

fn load_problem(src: &ProblemSource, seed: u64) -> CliResult<RadialProblem> {
    if let Some(path) = &src.file {
        let text = read(path)?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        return if is_json {
            serde_json::from_str(&text).map_err(|e| Failure::Input(format!("problem JSON: {e}")))
        } else {
            Ok(RadialProblem::from_csv(&text)?)
        };
    }
    let kind = parse_kind(src.generate.as_deref().expect("clap requires --file or --generate"))?;
    let law = AdmissibleGenerator::new(&kind)?.sample(&mut ChaCha8Rng::seed_from_u64(seed));
    let p = RadialProblem::from_law(&law, src.m, Boundary::Neumann)?;
    Ok(if src.nonneg_flags { p.with_flags(CurvatureFlags { nonneg_ricci_f: true, nonneg_mean_curv: true }) } else { p })
}

fn cmd_spectrum(a: &SpectrumArgs, seed: u64) -> CliResult<Output> {
    let result = load_problem(&a.source, seed)?.spectrum(a.k)?;
    let mut csv = String::from("k,eigenvalue\n");
    for (i, v) in result.eigenvalues.iter().enumerate() {
        let _ = writeln!(csv, "{},{v:?}", i + 1);
    }
    let points = result.eigenvalues.iter().enumerate().map(|(i, &v)| ((i + 1) as f64, v)).collect();
    let svg = line_chart("Weighted Dirichlet spectrum", "k", "ν_k", &[Series::new("ν_k", points)]);
    Ok(Output { json: to_json(&result), csv, svg: Some(svg) })
}

fn cmd_audit(a: &AuditArgs, seed: u64) -> CliResult<Output> {
    let report = audit_inequalities(&load_problem(&a.source, seed)?, a.k, &a.eta)?;
    let mut json = report.to_json();
    json.push('\n');
    Ok(Output { json, csv: report.to_csv(), svg: None })
}

fn cmd_graph(a: &GraphArgs) -> CliResult<Output> {
    let g = BoundaryGraph::from_json(&read(&a.file)?)?;
    match &a.query {
        GraphQuery::Rho => {
            let rho = g.rho_boundary();
            let points = rho.iter().enumerate().map(|(i, &r)| (i as f64, r)).collect();
            let svg = line_chart("Distance to the boundary", "vertex", "ρ", &[Series::new("ρ", points)]);
            Ok(Output { json: to_json(&serde_json::json!({ "rho": rho })), csv: g.rho_csv(), svg: Some(svg) })
        }
        GraphQuery::Obs { eta } => {
            let screen = g.screen();
            let mut rows = Vec::with_capacity(eta.len());
            let mut csv = String::from("eta,lower,upper\n");
            for &e in eta {
                let o = screen.obs_inradius(e)?;
                let _ = writeln!(csv, "{e:?},{:?},{:?}", o.lower, o.upper);
                rows.push(serde_json::json!({ "eta": e, "lower": o.lower, "upper": o.upper }));
            }
            Ok(Output { json: to_json(&rows), csv, svg: None })
        }
        GraphQuery::Bsep { eta, mode } => {
            let mode = match mode {
                Mode::Exact => SeparationMode::Exact,
                Mode::Greedy => SeparationMode::Greedy,
            };
            let sep = bsep_k(&g, eta, mode)?;
            let csv = format!("value\n{:?}\n", sep.value);
            Ok(Output { json: to_json(&sep), csv, svg: None })
        }
    }
}

fn cmd_sweep(a: &SweepArgs) -> CliResult<Output> {
    let report = SweepConfig::from_json(&read(&a.config)?)?.run()?;
    let value = Series::new("value", report.rows.iter().map(|r| (r.n as f64, r.value)).collect());
    let limit = Series::new("limit", report.rows.iter().map(|r| (r.n as f64, r.limit)).collect());
    let svg = line_chart("Observable inscribed radius along the sweep", "n", "ObsInRad", &[value, limit]);
    let mut json = report.to_json();
    json.push('\n');
    Ok(Output { json, csv: report.to_csv(), svg: Some(svg) })
}
