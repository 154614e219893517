//! Command-line front end: eigenvalue tables, functional sums, constants,
//! Weyl ratios, ħ-sweeps and counterexample searches, all file-based and
//! reproducible.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 computation failure.

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use schrodlab::eigen::EigenSet;
use schrodlab::functionals::{self, ThresholdForm, Truncation};
use schrodlab::gridsolve::{self, GridParams};
use schrodlab::potentials::{self, Potential, StepPotential};
use schrodlab::search::{self, ObjectiveSpec};
use schrodlab::secular;
use schrodlab::sweeps::{self, SweepConfig};
use schrodlab::util::fmt_g17;
use std::io::Write as _;
use std::path::PathBuf;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "SCHRODLAB_OUT";

#[derive(Parser)]
#[command(
    name = "schrodlab",
    disable_version_flag = true,
    about = "Complex eigenvalues of -h^2 d^2/dx^2 + V and eigenvalue-sum functionals"
)]
struct Cli {
    /// Print version and result-file schema version.
    #[arg(long, global = true)]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute eigenvalues of a potential at one ħ; prints a CSV table.
    Eigs(EigsArgs),
    /// Evaluate an eigenvalue-sum functional on a stored eigenvalue table.
    Sum(SumArgs),
    /// Print the semiclassical constant for (γ, d).
    Constants(ConstantsArgs),
    /// Weyl-ratio table for a real potential over a ħ list.
    Weyl(WeylArgs),
    /// Run a ħ-sweep from a TOML config file.
    Sweep(SweepArgs),
    /// Run a derivative-free counterexample search from a config file.
    Search(SearchArgs),
    /// Print the functional parameters of a published truncated-bound case.
    Case(CaseArgs),
}

#[derive(Args)]
struct PotentialArgs {
    /// Builtin potential, e.g. `bogli_stampach:1,1` or `square_well:10,1`.
    #[arg(long)]
    builtin: Option<String>,
    /// Step potential breakpoints, comma separated, e.g. `0,1,2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    breakpoints: Vec<f64>,
    /// Step potential values as `re+imi` tokens, comma separated,
    /// e.g. `0+1i,-1+0i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Vec<String>,
}

impl PotentialArgs {
    fn build(&self) -> anyhow::Result<StepPotential> {
        if let Some(spec) = &self.builtin {
            let (name, params) = spec
                .split_once(':')
                .ok_or_else(|| anyhow!("builtin spec must look like name:p1,p2"))?;
            let params: Vec<f64> = params
                .split(',')
                .map(|p| p.trim().parse::<f64>().context("builtin parameter"))
                .collect::<anyhow::Result<_>>()?;
            return Ok(potentials::builtin(name, &params)?);
        }
        if self.breakpoints.is_empty() || self.values.is_empty() {
            bail!("provide either --builtin or --breakpoints with --values");
        }
        let values: Vec<Complex64> = self
            .values
            .iter()
            .map(|t| parse_complex(t))
            .collect::<anyhow::Result<_>>()?;
        Ok(StepPotential::new(self.breakpoints.clone(), values)?)
    }
}

#[derive(Args)]
struct EigsArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    #[arg(long)]
    hbar: f64,
    /// secular | grid
    #[arg(long, default_value = "secular")]
    solver: String,
    /// Smallest |E| the grid solver should resolve.
    #[arg(long, default_value_t = 0.1)]
    delta_min: f64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SumArgs {
    /// Eigenvalue CSV produced by `eigs` (columns re, im, multiplicity, ...).
    #[arg(long)]
    eigs: PathBuf,
    /// riesz | dhk | cone | fs
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// none | below | above
    #[arg(long, default_value = "none")]
    truncation: String,
    /// power_gamma | plain : compare |E|^γ or |E| against the threshold
    #[arg(long, default_value = "power_gamma")]
    threshold_form: String,
    /// Threshold T for truncated sums (normally ħ^{-d} ∫|V|^{γ+d/2}).
    #[arg(long)]
    threshold: Option<f64>,
    /// ħ the eigenvalues were computed at (recorded in the set).
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    d: u32,
}

#[derive(Args)]
struct WeylArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    #[arg(long)]
    gamma: f64,
    /// Comma-separated ħ list, e.g. `0.125,0.0625`.
    #[arg(long, value_delimiter = ',')]
    hbar: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the config's seed (defaults are fixed, never time-based).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SearchArgs {
    /// TOML search configuration (sweep schema plus [family] and [budget]).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output JSON path for the search report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CaseArgs {
    /// Case letter a..f.
    #[arg(long)]
    id: char,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    gamma: f64,
}

/// Parse a `re+imi` token (`0+1i`, `-2.5-0.3i`), or a bare real (`1.5`).
fn parse_complex(token: &str) -> anyhow::Result<Complex64> {
    let t = token.trim();
    if t.is_empty() {
        bail!("empty complex token");
    }
    if let Some(body) = t.strip_suffix('i') {
        // split at the last +/- that is not an exponent sign or leading sign
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        let k = split.ok_or_else(|| anyhow!("complex token `{t}` must look like re+imi"))?;
        let re: f64 = body[..k].parse().with_context(|| format!("real part of `{t}`"))?;
        let im_str = &body[k..];
        let im: f64 = if im_str == "+" {
            1.0
        } else if im_str == "-" {
            -1.0
        } else {
            im_str.parse().with_context(|| format!("imaginary part of `{t}`"))?
        };
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = t.parse().with_context(|| format!("real token `{t}`"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

fn eigs_csv(set: &EigenSet) -> String {
    let mut out = String::from("re,im,multiplicity,error_estimate\n");
    for e in set.eigenvalues() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_g17(e.energy.re),
            fmt_g17(e.energy.im),
            e.multiplicity,
            fmt_g17(e.error_estimate)
        ));
    }
    out
}

fn read_eigs_csv(path: &PathBuf, hbar: f64) -> anyhow::Result<EigenSet> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty eigenvalue file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| anyhow!("eigenvalue file is missing column `{name}`"))
    };
    let (re_i, im_i, m_i) = (col("re")?, col("im")?, col("multiplicity")?);
    let err_i = cols.iter().position(|c| *c == "error_estimate");
    let mut eigs = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        eigs.push(schrodlab::eigen::Eigenvalue {
            energy: Complex64::new(cells[re_i].parse()?, cells[im_i].parse()?),
            multiplicity: cells[m_i].parse()?,
            error_estimate: err_i
                .and_then(|i| cells.get(i))
                .map(|s| s.parse())
                .transpose()?
                .unwrap_or(0.0),
        });
    }
    Ok(EigenSet::new(eigs, hbar, schrodlab::SolverTag::Secular, format!("file:{}", path.display())))
}

fn write_or_print(out: Option<&PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let path = resolve_out(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, content)?;
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

/// Relative output paths land in $SCHRODLAB_OUT when it is set.
fn resolve_out(path: &PathBuf) -> PathBuf {
    if path.is_absolute() {
        return path.clone();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.clone(),
    }
}


fn run(cli: Cli) -> Result<(), anyhow::Error> {
    let command = match cli.command {
        Some(c) => c,
        None => bail!("a subcommand is required; see --help"),
    };
    match command {
        Command::Eigs(args) => {
            let potential = args.potential.build().map_err(usage)?;
            if !(args.hbar > 0.0) {
                return Err(usage(anyhow!("--hbar must be > 0")));
            }
            let set = match args.solver.as_str() {
                "secular" => secular::find_eigenvalues_default(&potential, args.hbar)?,
                "grid" => {
                    let pot = Potential::Step(potential);
                    let params = GridParams::auto(&pot, args.hbar, args.delta_min)?;
                    gridsolve::find_eigenvalues_grid(&pot, args.hbar, &params)?
                }
                other => return Err(usage(anyhow!("unknown solver `{other}`"))),
            };
            for w in &set.warnings {
                eprintln!("warning: {w}");
            }
            write_or_print(args.out.as_ref(), &eigs_csv(&set))?;
            Ok(())
        }
        Command::Sum(args) => {
            let set = read_eigs_csv(&args.eigs, args.hbar).map_err(usage)?;
            let value = match args.kind.as_str() {
                "riesz" => functionals::riesz_mean(&set, args.gamma)?,
                "dhk" => functionals::dhk_sum(
                    &set,
                    args.gamma,
                    args.sigma.ok_or_else(|| usage(anyhow!("dhk needs --sigma")))?,
                )?,
                "cone" => functionals::cone_sum(
                    &set,
                    args.gamma,
                    args.kappa.ok_or_else(|| usage(anyhow!("cone needs --kappa")))?,
                )?,
                "fs" => {
                    let truncation = match args.truncation.as_str() {
                        "none" => Truncation::None,
                        "below" => Truncation::Below,
                        "above" => Truncation::Above,
                        other => return Err(usage(anyhow!("unknown truncation `{other}`"))),
                    };
                    let form = match args.threshold_form.as_str() {
                        "power_gamma" => ThresholdForm::PowerGamma,
                        "plain" => ThresholdForm::Plain,
                        other => return Err(usage(anyhow!("unknown threshold form `{other}`"))),
                    };
                    functionals::fs_sum(
                        &set,
                        args.alpha.ok_or_else(|| usage(anyhow!("fs needs --alpha")))?,
                        args.beta.ok_or_else(|| usage(anyhow!("fs needs --beta")))?,
                        truncation,
                        form,
                        args.gamma,
                        args.threshold.unwrap_or(0.0),
                    )?
                }
                other => return Err(usage(anyhow!("unknown functional kind `{other}`"))),
            };
            println!("{}", fmt_g17(value));
            Ok(())
        }
        Command::Constants(args) => {
            let value = functionals::semiclassical_constant(args.gamma, args.d)?;
            println!("{}", fmt_g17(value));
            Ok(())
        }
        Command::Weyl(args) => {
            let potential = args.potential.build().map_err(usage)?;
            if args.hbar.is_empty() {
                return Err(usage(anyhow!("provide at least one --hbar value")));
            }
            let pot = Potential::Step(potential.clone());
            let mut out = String::from("hbar,n_eigs,weyl_ratio\n");
            for &h in &args.hbar {
                let set = secular::find_eigenvalues_default(&potential, h)?;
                let ratio = functionals::weyl_ratio(&set, &pot, args.gamma, h)?;
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_g17(h),
                    set.total_multiplicity(),
                    fmt_g17(ratio)
                ));
            }
            write_or_print(args.out.as_ref(), &out)?;
            Ok(())
        }
        Command::Sweep(args) => {
            let text = std::fs::read_to_string(&args.config)
                .with_context(|| format!("reading {}", args.config.display()))
                .map_err(usage)?;
            let mut config = SweepConfig::from_toml(&text).map_err(|e| usage(e.into()))?;
            if let Some(w) = args.workers {
                config.workers = w;
            }
            if let Some(s) = args.seed {
                config.seed = s;
            }
            if let Some(csv) = &config.output.csv {
                config.output.csv = Some(resolve_out(&PathBuf::from(csv)).display().to_string());
            }
            if let Some(dir) = &config.output.svg_dir {
                config.output.svg_dir =
                    Some(resolve_out(&PathBuf::from(dir)).display().to_string());
            }
            let result = sweeps::run_and_persist(&config)?;
            let gaps = (result.gap_fraction() * 100.0).round();
            eprintln!(
                "sweep complete: {} points, {}% gaps, hash {}",
                result.records.len(),
                gaps,
                result.config_hash
            );
            Ok(())
        }
        Command::Search(args) => {
            let text = std::fs::read_to_string(&args.config)
                .with_context(|| format!("reading {}", args.config.display()))
                .map_err(usage)?;
            let mut config: SearchFileConfig =
                toml::from_str(&text).map_err(|e| usage(anyhow!("config error: {e}")))?;
            if config.schema_version != sweeps::SCHEMA_VERSION {
                return Err(usage(anyhow!(
                    "unsupported schema version {}, expected {}",
                    config.schema_version,
                    sweeps::SCHEMA_VERSION
                )));
            }
            if let Some(s) = args.seed {
                config.seed = s;
            }
            let run = || {
                search::optimize(
                    &config.family,
                    &config.objective,
                    config.budget.evaluations,
                    config.budget.restarts,
                    config.seed,
                )
            };
            // restarts parallelize across a worker pool; results are
            // merged deterministically regardless of pool size
            let report = match args.workers {
                Some(workers) => rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| anyhow!("worker pool: {e}"))?
                    .install(run)?,
                None => run()?,
            };
            let json = serde_json::to_string_pretty(&report)?;
            match args.out.or(config.output.map(PathBuf::from)) {
                Some(path) => write_or_print(Some(&path), &json)?,
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::Case(args) => {
            let spec = functionals::case_table(args.id, args.d, args.gamma).map_err(|e| usage(e.into()))?;
            println!("{}", serde_json::to_string_pretty(&spec)?);
            Ok(())
        }
    }
}

/// Search config: shares the sweep schema conventions with an added
/// family/budget section.
#[derive(serde::Deserialize)]
struct SearchFileConfig {
    schema_version: u64,
    family: search::PotentialFamily,
    objective: ObjectiveSpec,
    budget: BudgetSpec,
    #[serde(default = "default_search_seed")]
    seed: u64,
    output: Option<String>,
}

#[derive(serde::Deserialize)]
struct BudgetSpec {
    evaluations: u64,
    #[serde(default = "default_restarts")]
    restarts: usize,
}

fn default_search_seed() -> u64 {
    sweeps::DEFAULT_SEED
}

fn default_restarts() -> usize {
    4
}

/// Marker wrapping problems the user can fix on the command line or in a
/// config file; these exit with code 1 instead of 2.
#[derive(Debug)]
struct UsageFlag(String);

impl std::fmt::Display for UsageFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageFlag {}

fn usage(e: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(UsageFlag(format!("{e:#}")))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help as an "error" with successful exit intent
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    if cli.version {
        println!(
            "schrodlab {} (result schema_version {})",
            env!("CARGO_PKG_VERSION"),
            sweeps::SCHEMA_VERSION
        );
        std::process::exit(0);
    }
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            let is_usage = e.downcast_ref::<UsageFlag>().is_some()
                || e.downcast_ref::<schrodlab::Error>().map_or(false, |err| {
                    matches!(
                        err,
                        schrodlab::Error::Config(_)
                            | schrodlab::Error::SchemaVersion { .. }
                            | schrodlab::Error::CaseOutOfRange { .. }
                            | schrodlab::Error::UnknownBuiltin(_)
                            | schrodlab::Error::InvalidPotential(_)
                            | schrodlab::Error::InvalidFunctional(_)
                    )
                });
            std::process::exit(if is_usage { 1 } else { 2 });
        }
    }
}
