//! Command-line front end. Every command prints one JSON document (or CSV for sample
//! tables) carrying `"schema": 1`.
//!
//! Exit codes: 0 success, 2 invalid input, 1 internal failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use contcrystal::dh::{
    compute_k, dh_sample, laplace_check, lr_sample, polytope_volume, StringPolytope,
};
use contcrystal::involutions::{schutz_tilde, w_action_word};
use contcrystal::selftest::{self, Mode};
use contcrystal::stringparam::{in_polytope, inverse_string, string_data, transition};
use contcrystal::transforms::{littelmann_e, pitman_word};
use contcrystal::troplift::{halving_eps, pitman_lift_residuals, tropicalize, SfExpr};
use contcrystal::{GroupSpec, PlPath, Realization};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Lib(#[from] contcrystal::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_validation() => 2,
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "contcrystal", version, about = "Path operators, string coordinates and Duistermaat-Heckman sampling for finite Coxeter groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Group label (A2, B3, I5, H3, ...) or a JSON group specification.
    #[arg(long, global = true, default_value = "A2")]
    group: String,
    /// Reduced word, 1-based and comma separated; defaults to the standard longest word.
    #[arg(long, global = true)]
    word: Option<String>,
    /// Path as JSON `{"times": [...], "points": [[...], ...]}`, or `@file`.
    #[arg(long, global = true)]
    path: Option<String>,
    /// Dominant weight, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Second dominant weight, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Laplace variable, comma separated (always in coordinates).
    #[arg(long, global = true, allow_hyphen_values = true)]
    z: Option<String>,
    /// A scalar parameter or a coordinate vector, depending on the command.
    #[arg(long, global = true, allow_hyphen_values = true)]
    x: Option<String>,
    /// Simple root, 1-based.
    #[arg(long, global = true)]
    root: Option<usize>,
    #[arg(short = 'n', long = "samples", global = true, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Comma-separated list of epsilons for lifting checks.
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Write the result here (atomically) instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Read `--lambda` and `--mu` as pairings with the simple coroots.
    #[arg(long, global = true)]
    pairings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pitman transform along the word (the last letter acts first).
    Pitman,
    /// Littelmann operator E at `--root` with parameter `--x`.
    Littelmann,
    /// String coordinates and highest weight of a path.
    StringCoords,
    /// Path with highest weight `--lambda` and string coordinates `--x`.
    InverseString,
    /// String coordinates `--x` for `--word` rewritten for the reduced word `--to`.
    Transition {
        #[arg(long)]
        to: String,
    },
    /// Volume, bounding box and (optionally) membership of `--x` in the string polytope.
    Polytope,
    /// Schützenberger involution of a path.
    Schutzenberger,
    /// Weyl group action of the word on a path.
    Waction,
    /// Weights sampled from the Duistermaat-Heckman measure.
    DhSample,
    /// Monte Carlo Laplace transform against its closed form.
    DhLaplace,
    /// Points of the Littlewood-Richardson polytope with their weights.
    LrSample,
    /// Largest distance between Pitman products for two reduced words on random paths.
    BraidCheck,
    /// Max-plus form of a subtraction-free expression.
    Tropicalize {
        expr: String,
        /// Variable values `name=value,...` for a numeric evaluation.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Residuals of the geometric lift of the Pitman transform (rank one).
    LiftCheck,
    /// Built-in verification suite.
    Selftest {
        #[arg(long)]
        quick: bool,
        /// Comma-separated criterion numbers; all by default.
        #[arg(long)]
        criteria: Option<String>,
    },
}

enum Output {
    Doc(Value),
    Table { meta: Value, header: Vec<String>, rows: Vec<Vec<f64>> },
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("--{what}: cannot parse {t:?}"))))
        .collect()
}

fn read_arg(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(file) => Ok(std::fs::read_to_string(file)?),
        None => Ok(s.to_string()),
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    r: Realization,
}

impl Ctx<'_> {
    fn need<'b>(&self, v: &'b Option<String>, name: &str) -> Result<&'b str> {
        v.as_deref().ok_or_else(|| usage(format!("missing --{name}")))
    }

    fn word(&self) -> Result<Vec<usize>> {
        match &self.cli.word {
            None => Ok(self.r.longest_word().clone()),
            Some(w) => parse_word(w),
        }
    }

    fn path(&self) -> Result<PlPath> {
        let src = read_arg(self.need(&self.cli.path, "path")?)?;
        let p: PlPath = serde_json::from_str(&src).map_err(|e| usage(format!("--path: {e}")))?;
        self.r.check_dim(p.endpoint())?;
        Ok(p)
    }

    fn weight(&self, v: &Option<String>, name: &str) -> Result<Vec<f64>> {
        let vals = parse_list(self.need(v, name)?, name)?;
        if self.cli.pairings {
            Ok(self.r.from_pairings(&vals)?)
        } else {
            self.r.check_dim(&vals)?;
            Ok(vals)
        }
    }

    fn scalar_x(&self) -> Result<f64> {
        let s = self.need(&self.cli.x, "x")?;
        s.trim().parse().map_err(|_| usage(format!("--x: cannot parse {s:?}")))
    }

    fn root(&self) -> Result<usize> {
        let s = self.cli.root.ok_or_else(|| usage("missing --root"))?;
        if s == 0 || s > self.r.rank() {
            return Err(usage(format!("--root must be between 1 and {}", self.r.rank())));
        }
        Ok(s - 1)
    }
}

fn parse_word(w: &str) -> Result<Vec<usize>> {
    w.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| match t.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(usage(format!("--word: bad letter {t:?} (letters are 1-based)"))),
        })
        .collect()
}

fn one_based(w: &[usize]) -> Vec<usize> {
    w.iter().map(|s| s + 1).collect()
}

fn path_json(p: &PlPath) -> Value {
    serde_json::to_value(p).unwrap_or(Value::Null)
}

fn doc(mut v: Value) -> Output {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(1));
    }
    Output::Doc(v)
}

fn run(cli: &Cli) -> Result<Output> {
    if let Command::Selftest { quick, criteria } = &cli.cmd {
        return selftest_cmd(cli, *quick, criteria.as_deref());
    }
    if let Command::Tropicalize { expr, at } = &cli.cmd {
        return tropicalize_cmd(expr, at.as_deref());
    }
    let r = Realization::new(GroupSpec::parse(&cli.group)?)?;
    let ctx = Ctx { cli, r };
    let r = &ctx.r;
    Ok(match &cli.cmd {
        Command::Pitman => {
            let w = ctx.word()?;
            doc(json!({ "word": one_based(&w), "path": path_json(&pitman_word(r, &w, &ctx.path()?)?) }))
        }
        Command::Littelmann => match littelmann_e(r, ctx.root()?, ctx.scalar_x()?, &ctx.path()?)? {
            Some(p) => doc(json!({ "ghost": false, "path": path_json(&p) })),
            None => doc(json!({ "ghost": true })),
        },
        Command::StringCoords => {
            let w = ctx.word()?;
            let (x, pi) = string_data(r, &w, &ctx.path()?)?;
            doc(json!({ "word": one_based(&w), "coords": x, "highest_weight": pi.endpoint() }))
        }
        Command::InverseString => {
            let w = ctx.word()?;
            let lambda = ctx.weight(&cli.lambda, "lambda")?;
            let x = parse_list(ctx.need(&cli.x, "x")?, "x")?;
            let eta = inverse_string(r, &w, &PlPath::straight(&lambda, 1.0), &x)?;
            doc(json!({ "word": one_based(&w), "path": path_json(&eta) }))
        }
        Command::Transition { to } => {
            let from = ctx.word()?;
            let to = parse_word(to)?;
            let lambda = ctx.weight(&cli.lambda, "lambda")?;
            let x = parse_list(ctx.need(&cli.x, "x")?, "x")?;
            let y = transition(r, &from, &to, &lambda, &x)?;
            doc(json!({ "from": one_based(&from), "to": one_based(&to), "coords": y }))
        }
        Command::Polytope => {
            let w = ctx.word()?;
            let lambda = ctx.weight(&cli.lambda, "lambda")?;
            let poly = StringPolytope::new(r, &w, &lambda)?;
            let k = compute_k(r);
            let mut v = json!({
                "word": one_based(&w),
                "dim": poly.dim(),
                "k": k,
                "volume": polytope_volume(r, &lambda, k),
                "box_upper": poly.box_upper(),
                "explicit_inequalities": poly.has_explicit_description(),
            });
            if let Some(xs) = &cli.x {
                v["contains_x"] = json!(in_polytope(r, &w, &lambda, &parse_list(xs, "x")?)?);
            }
            doc(v)
        }
        Command::Schutzenberger => doc(json!({ "path": path_json(&schutz_tilde(r, &ctx.path()?)?) })),
        Command::Waction => {
            let w = match &cli.word {
                Some(w) => parse_word(w)?,
                None => return Err(usage("missing --word")),
            };
            doc(json!({ "word": one_based(&w), "path": path_json(&w_action_word(r, &w, &ctx.path()?)?) }))
        }
        Command::DhSample => {
            let w = ctx.word()?;
            let lambda = ctx.weight(&cli.lambda, "lambda")?;
            let poly = StringPolytope::new(r, &w, &lambda)?;
            let rows = dh_sample(&poly, cli.samples, cli.seed)?;
            let header = (1..=r.rank()).map(|i| format!("v{i}")).collect();
            Output::Table { meta: json!({ "command": "dh-sample", "lambda": lambda, "seed": cli.seed }), header, rows }
        }
        Command::DhLaplace => {
            let w = ctx.word()?;
            let lambda = ctx.weight(&cli.lambda, "lambda")?;
            let z = parse_list(ctx.need(&cli.z, "z")?, "z")?;
            r.check_dim(&z)?;
            let poly = StringPolytope::new(r, &w, &lambda)?;
            let rep = laplace_check(&poly, &z, cli.samples, cli.seed, compute_k(r))?;
            doc(json!({ "report": rep, "seed": cli.seed, "samples": cli.samples }))
        }
        Command::LrSample => {
            let w = ctx.word()?;
            let lambda = ctx.weight(&cli.lambda, "lambda")?;
            let mu = ctx.weight(&cli.mu, "mu")?;
            let pts = lr_sample(r, &w, &lambda, &mu, cli.samples, cli.seed)?;
            let q = w.len();
            let mut header: Vec<String> = (1..=q).map(|i| format!("x{i}")).collect();
            header.extend((1..=r.rank()).map(|i| format!("v{i}")));
            let rows = pts.into_iter().map(|(x, v)| x.into_iter().chain(v).collect()).collect();
            Output::Table { meta: json!({ "command": "lr-sample", "seed": cli.seed }), header, rows }
        }
        Command::BraidCheck => braid_check(&ctx)?,
        Command::LiftCheck => {
            let eps = match &cli.eps {
                Some(s) => parse_list(s, "eps")?,
                None => halving_eps(),
            };
            let rep = pitman_lift_residuals(r, &ctx.path()?, &eps, 200)?;
            doc(json!({ "report": rep, "halving_ratios": rep.halving_ratios() }))
        }
        Command::Tropicalize { .. } | Command::Selftest { .. } => unreachable!("handled above"),
    })
}

fn braid_check(ctx: &Ctx<'_>) -> Result<Output> {
    use rand::Rng;
    let r = &ctx.r;
    let w1 = r.word_starting_with(0).clone();
    let w2 = match &ctx.cli.word {
        Some(w) => {
            let w = parse_word(w)?;
            r.check_longest(&w)?;
            w
        }
        None => r.word_starting_with(r.rank() - 1).clone(),
    };
    let mut rng = contcrystal::dh::stream_rng(ctx.cli.seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..ctx.cli.samples {
        let nb = rng.gen_range(1..=8);
        let eta = contcrystal::plpath::random_path(&mut rng, r.rank(), nb, 1.0);
        worst = worst.max(pitman_word(r, &w1, &eta)?.sup_distance(&pitman_word(r, &w2, &eta)?));
    }
    Ok(doc(json!({
        "words": [one_based(&w1), one_based(&w2)],
        "paths": ctx.cli.samples,
        "max_sup_distance": worst,
        "within_tol": worst <= ctx.cli.tol,
    })))
}

fn tropicalize_cmd(expr: &str, at: Option<&str>) -> Result<Output> {
    let e = SfExpr::parse(expr)?;
    let m = tropicalize(&e);
    let mut v = json!({ "input": expr, "max_plus": m.to_string(), "error_constant": e.trop_error_constant() });
    if let Some(at) = at {
        let mut vals = std::collections::BTreeMap::new();
        for kv in at.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, val) = kv.split_once('=').ok_or_else(|| usage(format!("--at: expected name=value, got {kv:?}")))?;
            let val: f64 = val.trim().parse().map_err(|_| usage(format!("--at: cannot parse {val:?}")))?;
            vals.insert(k.trim().to_string(), val);
        }
        v["value"] = json!(m.eval(&vals)?);
    }
    Ok(doc(v))
}

fn selftest_cmd(cli: &Cli, quick: bool, criteria: Option<&str>) -> Result<Output> {
    let ids: Vec<u32> = match criteria {
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| usage(format!("--criteria: bad number {t:?}"))))
            .collect::<Result<_>>()?,
        None => vec![],
    };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > selftest::LAST_CRITERION) {
        return Err(usage(format!("--criteria: no criterion {bad}")));
    }
    let mode = if quick { Mode::Quick } else { Mode::Full };
    let rep = selftest::run(mode, cli.seed, &ids)?;
    let ok = rep.ok();
    let out = Output::Doc(serde_json::to_value(&rep).map_err(|e| CliError::Failed(e.to_string()))?);
    if !ok {
        let failed: Vec<String> = rep
            .criteria
            .iter()
            .filter(|c| c.status() == selftest::Status::Fail)
            .map(|c| c.id.to_string())
            .collect();
        emit(cli, &out)?;
        return Err(CliError::Failed(format!("selftest: criteria {} failed", failed.join(","))));
    }
    Ok(out)
}

fn render(cli: &Cli, out: &Output) -> Result<Vec<u8>> {
    match (cli.format, out) {
        (Format::Json, Output::Doc(v)) => {
            let mut s = serde_json::to_vec_pretty(v).map_err(|e| CliError::Failed(e.to_string()))?;
            s.push(b'\n');
            Ok(s)
        }
        (Format::Json, Output::Table { meta, header, rows }) => {
            let mut v = meta.clone();
            v["schema"] = json!(1);
            v["columns"] = json!(header);
            v["rows"] = json!(rows);
            render(cli, &Output::Doc(v))
        }
        (Format::Csv, Output::Table { header, rows, .. }) => {
            let mut w = csv::Writer::from_writer(vec![]);
            let csv_err = |e: csv::Error| CliError::Failed(e.to_string());
            w.write_record(header).map_err(csv_err)?;
            for row in rows {
                w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| CliError::Failed(e.to_string()))
        }
        (Format::Csv, Output::Doc(_)) => Err(usage("--format csv is only available for sample tables")),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

fn emit(cli: &Cli, out: &Output) -> Result<()> {
    let bytes = render(cli, out)?;
    match &cli.out {
        Some(p) => write_atomic(p, &bytes),
        None => Ok(std::io::stdout().write_all(&bytes)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|out| emit(&cli, &out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("contcrystal: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
