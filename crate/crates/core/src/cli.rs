//! Command-line front end.
//!
//! Every subcommand except `run` is a [`RunConfig`]: the parsed flags are
//! serialized into each output file, and `run --config FILE` executes such a
//! record again (an earlier output file works as its own config). Results go
//! to `--out` as JSON, with a short human summary on stdout.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};
use crate::frequency::{FrequencyBox, SubspaceIndex};
use crate::geometry::{dispersion_dyadic, dispersion_exact};
use crate::norms::{Exponent, DEFAULT_DELTA};
use crate::pointsets::{
    default_generator_matrices, minimal_t, net_points, random_points, sparse_grid, tensor_grid, universal_set,
    verify_net, Domain, GridKind, PointSet, PointSetJson, UniversalConstructionParams,
};
use crate::universality::{compare_constructions, fejer_witness, sweep, SweepConfig};

/// Exit status for a failed `--assert-*` or net check.
pub const EXIT_ASSERTION: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "unidisc", version, about = "Sampling discretization experiments on the torus")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "UNIDISC_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(flatten)]
    Experiment(RunConfig),
    /// Re-executes a config, or the config embedded in an earlier output file.
    #[command(alias = "replay")]
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Writes here instead of the path stored in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One reproducible invocation.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    /// Generates a point set.
    Gen(GenArgs),
    /// Checks the (t, r, d)-net property.
    CheckNet(CheckNetArgs),
    /// Finds the smallest t for which a dyadic set is a net.
    MinT(InputArgs),
    /// Largest empty axis-parallel box.
    Dispersion(DispersionArgs),
    /// Estimates the discretization constants over all T(R(s)), ‖s‖₁ = n.
    Sweep(SweepArgs),
    /// Looks for a Fejér witness in an empty box.
    Witness(WitnessArgs),
    /// Sweeps the universal net, the sparse grid and i.i.d. points side by side.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum GenFamily {
    /// Digital net with 2^n points in d dimensions.
    #[value(name = "net")]
    #[serde(rename = "net")]
    Net,
    /// Sparse grid SG(n, d).
    #[value(name = "sparse")]
    #[serde(rename = "sparse")]
    Sparse,
    /// Tensor grid P(N) for `--degrees`.
    #[value(name = "tensorP")]
    #[serde(rename = "tensorP")]
    TensorP,
    /// Tensor grid P′(N) for `--degrees`.
    #[value(name = "tensorPprime")]
    #[serde(rename = "tensorPprime")]
    TensorPprime,
    /// `--m` i.i.d. uniform points (2^n by default).
    #[value(name = "random")]
    #[serde(rename = "random")]
    Random,
    /// Universal set for the sup norm.
    #[value(name = "universal-linf")]
    #[serde(rename = "universal-linf")]
    UniversalLinf,
    /// Universal set for L_q with margin `--a`.
    #[value(name = "universal-lq")]
    #[serde(rename = "universal-lq")]
    UniversalLq,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[arg(long)]
    pub family: GenFamily,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Norm index for `universal-lq`.
    #[arg(long)]
    pub q: Option<Exponent>,
    /// Per-axis margin for `universal-lq`.
    #[arg(long, default_value_t = 2)]
    pub a: u32,
    /// Degrees `N` for the tensor grids, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub degrees: Option<Vec<u64>>,
    /// Size of a random set.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also writes the points as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct InputArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CheckNetArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub t: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionMode {
    Exact,
    Dyadic,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DispersionArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "exact")]
    pub method: DispersionMode,
    /// Lifts the point-count guard of the exact method.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SamplingArgs {
    /// Gaussian samples per subspace.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Translated Dirichlet kernels per subspace.
    #[arg(long, default_value_t = 50)]
    pub spikes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative accuracy of the certified sup norm.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub n: u32,
    /// Expected dimension; checked against the point file.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value = "2")]
    pub q: Exponent,
    /// Restricts the sweep to these level vectors, e.g. `--s 3,3`.
    #[arg(long = "s", value_parser = parse_subspace)]
    pub subspaces: Vec<SubspaceIndex>,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampling: SamplingArgs,
    /// Fails with exit status 2 when `C1_hat` falls below this.
    #[arg(long)]
    pub assert_c1: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-subspace table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct WitnessArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub n: u32,
    /// Box sides are `2^{a - s_j}`.
    #[arg(long, default_value_t = 1)]
    pub a: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value = "2")]
    pub q: Exponent,
    /// Net margin for finite q.
    #[arg(long, default_value_t = 2)]
    pub a: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// One row per family.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_subspace(s: &str) -> std::result::Result<SubspaceIndex, String> {
    s.trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| format!("bad level {p:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(SubspaceIndex::new)
}

/// What a command produced.
#[derive(Debug)]
pub struct Execution {
    pub result: Value,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
    /// False when an assertion or check failed.
    pub ok: bool,
}

impl Execution {
    fn new(result: impl Serialize, summary: Vec<String>) -> Result<Self> {
        Ok(Self {
            result: serde_json::to_value(result)?,
            summary,
            ok: true,
        })
    }
}

/// The file layout shared by every output.
#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub generated_at: String,
    pub config: RunConfig,
    pub result: Value,
}

/// Reads a point-set file, either bare or wrapped in a `gen` output.
pub fn load_points(path: &Path) -> Result<PointSet> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let mut v: Value = serde_json::from_str(&text)?;
    if let Some(points) = v.get_mut("result").and_then(|r| r.get_mut("points")) {
        v = points.take();
    }
    PointSet::from_json(&serde_json::from_value::<PointSetJson>(v)?)
}

fn unit_cube(points: PointSet) -> Result<PointSet> {
    match points.domain() {
        Domain::UnitCube => Ok(points),
        Domain::Torus => points.to_unit_cube(),
    }
}

fn torus(points: PointSet) -> Result<PointSet> {
    match points.domain() {
        Domain::Torus => Ok(points),
        Domain::UnitCube => points.scale_to_torus(),
    }
}

fn need<T>(v: Option<T>, flag: &str, family: GenFamily) -> Result<T> {
    v.ok_or_else(|| invalid(format!("--{flag} is required for {family:?}")))
}

#[derive(Serialize)]
struct GenResult {
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_term: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<u32>,
    points: PointSetJson,
}

fn gen(a: &GenArgs) -> Result<Execution> {
    let fam = a.family;
    let mut meta = (None, None, None, None);
    let points = match fam {
        GenFamily::Net => {
            let r = need(a.n, "n", fam)?;
            meta.0 = Some(r);
            net_points(&default_generator_matrices(need(a.d, "d", fam)?, r)?)?
        }
        GenFamily::Sparse => sparse_grid(need(a.n, "n", fam)?, need(a.d, "d", fam)?)?,
        GenFamily::TensorP | GenFamily::TensorPprime => {
            let kind = if fam == GenFamily::TensorP { GridKind::P } else { GridKind::Pprime };
            let degrees = FrequencyBox::new(need(a.degrees.clone(), "degrees", fam)?)?;
            if a.d.is_some_and(|d| d != degrees.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: a.d.unwrap_or_default(),
                    found: degrees.dim(),
                });
            }
            tensor_grid(&degrees, kind)?.into_nodes()
        }
        GenFamily::Random => {
            let m = match (a.m, a.n) {
                (Some(m), _) => m,
                (None, Some(n)) if n < usize::BITS => 1usize << n,
                _ => return Err(invalid("--m or a small --n is required for a random set")),
            };
            random_points(m, need(a.d, "d", fam)?, a.seed)?
        }
        GenFamily::UniversalLinf | GenFamily::UniversalLq => {
            let (n, d) = (need(a.n, "n", fam)?, need(a.d, "d", fam)?);
            let params = if fam == GenFamily::UniversalLinf {
                UniversalConstructionParams::linf(n, d)
            } else {
                match need(a.q, "q", fam)? {
                    Exponent::Finite(q) => UniversalConstructionParams::lq(n, d, q, a.a),
                    Exponent::Infinity => UniversalConstructionParams::linf(n, d),
                }
            };
            let u = universal_set(&params)?;
            meta = (Some(u.r), Some(u.t), Some(u.log_term), Some(u.margin));
            u.points
        }
    };
    if let Some(path) = &a.csv {
        points.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let mut summary = vec![format!("family {fam:?}: m = {}, d = {}", points.len(), points.dim())];
    if let (Some(r), Some(t), Some(l), Some(margin)) = meta {
        summary.push(format!("r = {r}, t = {t}, log_term = {l}, margin = {margin}"));
    }
    Execution::new(
        GenResult {
            m: points.len(),
            r: meta.0,
            t: meta.1,
            log_term: meta.2,
            margin: meta.3,
            points: points.to_json(),
        },
        summary,
    )
}

fn sampling(s: &SamplingArgs, n: u32, q: Exponent) -> SweepConfig {
    SweepConfig {
        delta: s.delta,
        ..SweepConfig::new(n, q, s.samples, s.spikes, s.seed)
    }
}

fn run_sweep(a: &SweepArgs) -> Result<Execution> {
    let points = torus(load_points(&a.points)?)?;
    if let Some(d) = a.d.filter(|&d| d != points.dim()) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: points.dim(),
        });
    }
    let mut cfg = sampling(&a.sampling, a.n, a.q);
    if !a.subspaces.is_empty() {
        cfg = cfg.only(a.subspaces.clone());
    }
    let report = sweep(&points, &cfg)?;
    if let Some(path) = &a.csv {
        report.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let mut summary = vec![format!(
        "m = {}, {} subspaces × {} samples, q = {}: C1_hat = {:.6}, C2_hat = {:.6}",
        report.m,
        report.subspaces.len(),
        report.gaussian + report.spikes,
        report.q,
        report.c1_hat,
        report.c2_hat
    )];
    let ok = a.assert_c1.is_none_or(|min| report.c1_hat >= min);
    if let Some(min) = a.assert_c1 {
        summary.push(format!("assert C1_hat ≥ {min}: {}", if ok { "ok" } else { "FAILED" }));
    }
    Ok(Execution {
        ok,
        ..Execution::new(report, summary)?
    })
}

fn run_compare(a: &CompareArgs) -> Result<Execution> {
    let rows = compare_constructions(a.n, a.d, a.q, a.a, &sampling(&a.sampling, a.n, a.q))?;
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    let summary = rows
        .iter()
        .map(|r| format!("{:?}: m = {}, C1_hat = {:.6}, C2_hat = {:.6}", r.family, r.m, r.c1_hat, r.c2_hat))
        .collect();
    Execution::new(rows, summary)
}

/// Runs one config without touching the output file.
pub fn execute(cfg: &RunConfig) -> Result<Execution> {
    match cfg {
        RunConfig::Gen(a) => gen(a),
        RunConfig::CheckNet(a) => {
            let check = verify_net(&load_points(&a.input)?, a.t)?;
            let line = match &check {
                crate::pointsets::NetCheck::Pass => format!("t = {}: pass", a.t),
                crate::pointsets::NetCheck::Fail { s, a: corner, count, expected } => {
                    format!("fail: box s = {s:?}, a = {corner:?} holds {count} points, expected {expected}")
                }
            };
            let ok = check.passed();
            Ok(Execution {
                ok,
                ..Execution::new(check, vec![line])?
            })
        }
        RunConfig::MinT(a) => {
            let t = minimal_t(&load_points(&a.input)?)?;
            Execution::new(serde_json::json!({ "t": t }), vec![format!("minimal t = {t}")])
        }
        RunConfig::Dispersion(a) => {
            let points = unit_cube(load_points(&a.input)?)?;
            let res = match a.method {
                DispersionMode::Exact => dispersion_exact(&points, a.force)?,
                DispersionMode::Dyadic => dispersion_dyadic(&points)?,
            };
            let line = format!(
                "dispersion ({:?}) = {:.6e}, times m = {:.4}",
                res.method,
                res.volume,
                res.volume * points.len() as f64
            );
            Execution::new(res, vec![line])
        }
        RunConfig::Sweep(a) => run_sweep(a),
        RunConfig::Witness(a) => {
            let points = unit_cube(load_points(&a.input)?)?;
            let w = fejer_witness(&points, a.n, a.a)?;
            let line = match &w {
                Some(w) => format!("empty box at s = {}: peak {}, ratio {:.4e}", w.s, w.peak, w.ratio),
                None => format!("no empty box of margin {} at level {}", a.a, a.n),
            };
            Execution::new(w, vec![line])
        }
        RunConfig::Compare(a) => run_compare(a),
    }
}

impl RunConfig {
    pub fn out(&self) -> Option<&Path> {
        match self {
            RunConfig::Gen(a) => Some(&a.out),
            RunConfig::CheckNet(a) => a.out.as_deref(),
            RunConfig::MinT(a) => a.out.as_deref(),
            RunConfig::Dispersion(a) => a.out.as_deref(),
            RunConfig::Sweep(a) => a.out.as_deref(),
            RunConfig::Witness(a) => a.out.as_deref(),
            RunConfig::Compare(a) => a.out.as_deref(),
        }
    }

    fn set_out(&mut self, path: PathBuf) {
        match self {
            RunConfig::Gen(a) => a.out = path,
            RunConfig::CheckNet(a) => a.out = Some(path),
            RunConfig::MinT(a) => a.out = Some(path),
            RunConfig::Dispersion(a) => a.out = Some(path),
            RunConfig::Sweep(a) => a.out = Some(path),
            RunConfig::Witness(a) => a.out = Some(path),
            RunConfig::Compare(a) => a.out = Some(path),
        }
    }
}

/// Reads a config file: a bare [`RunConfig`] or an [`Envelope`] holding one.
pub fn read_config(path: &Path) -> Result<RunConfig> {
    let mut v: Value = serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?;
    if let Some(cfg) = v.get_mut("config") {
        v = cfg.take();
    }
    Ok(serde_json::from_value(v)?)
}

fn write_envelope(cfg: &RunConfig, result: Value, path: &Path) -> Result<()> {
    let env = Envelope {
        tool: "unidisc".into(),
        version: crate::VERSION.into(),
        generated_at: humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
        config: cfg.clone(),
        result,
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &env)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| invalid(format!("thread pool: {e}")))?;
    }
    let cfg = match cli.command {
        Command::Experiment(cfg) => cfg,
        Command::Run(r) => {
            let mut cfg = read_config(&r.config)?;
            if let Some(out) = r.out {
                cfg.set_out(out);
            }
            cfg
        }
    };
    let exec = execute(&cfg)?;
    for line in &exec.summary {
        println!("{line}");
    }
    if let Some(path) = cfg.out() {
        write_envelope(&cfg, exec.result, path)?;
        println!("wrote {}", path.display());
    }
    Ok(exec.ok)
}

/// Entry point of the `unidisc` binary.
pub fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERTION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        match Cli::try_parse_from(std::iter::once("unidisc").chain(args.iter().copied())).unwrap().command {
            Command::Experiment(c) => c,
            Command::Run(_) => panic!("expected an experiment"),
        }
    }

    fn gen_to(dir: &Path, args: &[&str]) -> (PathBuf, Execution) {
        let out = dir.join("points.json");
        let mut full = vec!["gen"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out", out.to_str().unwrap()]);
        let cfg = parse(&full);
        let exec = execute(&cfg).unwrap();
        write_envelope(&cfg, exec.result.clone(), &out).unwrap();
        (out, exec)
    }

    #[test]
    fn gen_examples() {
        let dir = tempfile::tempdir().unwrap();
        let (_, e) = gen_to(dir.path(), &["--family", "universal-linf", "--n", "4", "--d", "2"]);
        assert_eq!((e.result["m"].as_u64(), e.result["r"].as_u64()), (Some(16384), Some(14)));
        let (_, e) = gen_to(dir.path(), &["--family", "sparse", "--n", "0", "--d", "2"]);
        assert_eq!(e.result["m"], 16);
        let (_, e) = gen_to(dir.path(), &["--family", "tensorP", "--degrees", "1"]);
        assert_eq!(e.result["m"], 3);
        let (_, e) = gen_to(dir.path(), &["--family", "tensorPprime", "--degrees", "1,2"]);
        assert_eq!(e.result["m"], 32);
        let (_, e) = gen_to(dir.path(), &["--family", "random", "--n", "5", "--d", "3", "--seed", "7"]);
        assert_eq!(e.result["m"], 32);
        let cfg = parse(&["gen", "--family", "universal-lq", "--n", "2", "--d", "2", "--out", "x"]);
        assert!(execute(&cfg).is_err(), "q is required");
    }

    #[test]
    fn unsupported_range_is_an_error() {
        let cfg = parse(&["gen", "--family", "universal-linf", "--n", "9", "--d", "3", "--out", "x"]);
        assert!(matches!(execute(&cfg), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn net_commands_read_gen_output() {
        let dir = tempfile::tempdir().unwrap();
        let (p, _) = gen_to(dir.path(), &["--family", "net", "--n", "6", "--d", "2"]);
        let path = p.to_str().unwrap();
        let e = execute(&parse(&["min-t", "--in", path])).unwrap();
        assert_eq!(e.result["t"], 0);
        assert!(execute(&parse(&["check-net", "--in", path, "--t", "0"])).unwrap().ok);
        let (p, _) = gen_to(dir.path(), &["--family", "tensorP", "--degrees", "2"]);
        let err = execute(&parse(&["min-t", "--in", p.to_str().unwrap()]));
        assert!(matches!(err, Err(Error::NotDyadic(_))), "{err:?}");
    }

    #[test]
    fn dispersion_of_trivial_sets() {
        let dir = tempfile::tempdir().unwrap();
        let centred = PointSet::from_float(1, Domain::UnitCube, vec![0.5]).unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, serde_json::to_string(&centred.to_json()).unwrap()).unwrap();
        let e = execute(&parse(&["dispersion", "--in", path.to_str().unwrap()])).unwrap();
        assert_eq!(e.result["volume"], 0.5);
        let empty = PointSet::empty(2, Domain::UnitCube);
        std::fs::write(&path, serde_json::to_string(&empty.to_json()).unwrap()).unwrap();
        let e = execute(&parse(&["dispersion", "--in", path.to_str().unwrap()])).unwrap();
        assert_eq!(e.result["volume"], 1.0);
    }

    #[test]
    fn sweep_on_p_grid_is_exact_and_asserts() {
        let dir = tempfile::tempdir().unwrap();
        let (p, _) = gen_to(dir.path(), &["--family", "tensorP", "--degrees", "7,7"]);
        let path = p.to_str().unwrap();
        let args = ["sweep", "--points", path, "--n", "6", "--q", "2", "--s", "3,3", "--samples", "5", "--spikes", "2"];
        let e = execute(&parse(&args)).unwrap();
        for key in ["c1_hat", "c2_hat"] {
            assert!((e.result[key].as_f64().unwrap() - 1.0).abs() <= 1e-10, "{key}");
        }
        let mut strict = args.to_vec();
        strict.extend_from_slice(&["--assert-c1", "1.5"]);
        assert!(!execute(&parse(&strict)).unwrap().ok);
        let mut wrong = args.to_vec();
        wrong.extend_from_slice(&["--d", "3"]);
        assert!(matches!(execute(&parse(&wrong)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn config_round_trips_through_output() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("cmp.json");
        let cfg = parse(&["compare", "--n", "2", "--d", "2", "--samples", "2", "--spikes", "1", "--out", out.to_str().unwrap()]);
        let exec = execute(&cfg).unwrap();
        assert_eq!(exec.result.as_array().unwrap().len(), 3);
        write_envelope(&cfg, exec.result.clone(), &out).unwrap();
        assert_eq!(read_config(&out).unwrap(), cfg);
        assert_eq!(execute(&read_config(&out).unwrap()).unwrap().result, exec.result);
    }
}
