use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use zeta_strips::ComplexPoint;
use zeta_strips_cli::commands;
use zeta_strips_cli::record::run_key;
use zeta_strips_cli::{Cache, CacheEntry, Outcome, PlotRequest, RunRecord, Suite};

#[derive(Parser, Debug)]
#[command(name = "zeta-strips", version, about = "Zero-free regions and strip zeros of ζ^(k)")]
struct Cli {
    /// Relative accuracy target for evaluation and zero refinement.
    #[arg(long, global = true, default_value_t = 1e-12)]
    eps: f64,
    /// Digits after the decimal point in human-readable output.
    #[arg(long, global = true, default_value_t = 15)]
    precision_digits: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    parallel: Option<usize>,
    /// Results cache (JSON lines).
    #[arg(long, global = true, default_value = "zeta-cache.jsonl")]
    cache: PathBuf,
    /// Reuse and record results in the cache.
    #[arg(long, global = true)]
    use_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate ζ^(k)(σ + it).
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(short, long, default_value_t = 0)]
        k: u32,
    },
    /// List wedges and critical strips at k.
    Regions { k: u32 },
    /// Locate the zeros of ζ^(k) in strip S_M.
    Zeros {
        #[arg(value_name = "M")]
        m: u32,
        k: u32,
        #[arg(long = "t-max", conflicts_with = "count_at")]
        t_max: Option<f64>,
        /// Count up to the division line T_j and require exactly j zeros.
        #[arg(long)]
        count_at: Option<u32>,
    },
    /// Re-check the proof constants.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// One JSON object per check.
        #[arg(long)]
        json: bool,
    },
    /// Write plot data (CSV) and an SVG.
    Plot {
        #[arg(value_enum)]
        kind: PlotKind,
        #[arg(long, value_name = "M", default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 38)]
        k: u32,
        #[arg(long = "t-max", default_value_t = 50.0)]
        t_max: f64,
        #[arg(long, default_value_t = 14)]
        k_min: u32,
        #[arg(long, default_value_t = 1300)]
        k_max: u32,
        #[arg(long, default_value_t = 3)]
        periods: u32,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Compare zero counts of ζ^(k) and ζ near the critical line.
    Berndt {
        k: u32,
        t: f64,
        #[arg(long, default_value_t = 0.1)]
        sigma_min: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Vk,
    Thm1a,
    #[value(name = "m4-10")]
    M4To10,
    Head,
    Remark,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Vk => Suite::Vk,
            SuiteArg::Thm1a => Suite::Thm1a,
            SuiteArg::M4To10 => Suite::M4To10,
            SuiteArg::Head => Suite::Head,
            SuiteArg::Remark => Suite::Remark,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PlotKind {
    Zeros,
    Regions,
    Figure2,
    Figure4,
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Command name and the parameters that determine its results.
fn describe(cli: &Cli) -> (&'static str, BTreeMap<String, String>) {
    match &cli.command {
        Command::Eval { sigma, t, k } => (
            "eval",
            params(&[
                ("sigma", sigma.to_string()),
                ("t", t.to_string()),
                ("k", k.to_string()),
                ("eps", cli.eps.to_string()),
                ("precision_digits", cli.precision_digits.to_string()),
            ]),
        ),
        Command::Regions { k } => (
            "regions",
            params(&[("k", k.to_string()), ("precision_digits", cli.precision_digits.to_string())]),
        ),
        Command::Zeros { m, k, t_max, count_at } => (
            "zeros",
            params(&[
                ("M", m.to_string()),
                ("k", k.to_string()),
                ("t_max", format!("{t_max:?}")),
                ("count_at", format!("{count_at:?}")),
            ]),
        ),
        Command::Verify { suite, json } => (
            "verify",
            params(&[("suite", Suite::from(*suite).name().to_string()), ("json", json.to_string())]),
        ),
        Command::Plot { kind, .. } => ("plot", params(&[("kind", format!("{kind:?}"))])),
        Command::Berndt { k, t, sigma_min } => (
            "berndt",
            params(&[("k", k.to_string()), ("T", t.to_string()), ("sigma_min", sigma_min.to_string())]),
        ),
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Eval { sigma, t, k } => commands::eval(ComplexPoint::new(*sigma, *t), *k, cli.eps, cli.precision_digits),
        Command::Regions { k } => commands::regions(*k, cli.precision_digits),
        Command::Zeros { m, k, t_max, count_at } => commands::zeros(*m, *k, *t_max, *count_at),
        Command::Verify { suite, json } => commands::verify((*suite).into(), *json),
        Command::Plot { kind, m, k, t_max, k_min, k_max, periods, out_dir } => {
            let req = match kind {
                PlotKind::Zeros => PlotRequest::Zeros { m: *m, k: *k, t_max: *t_max },
                PlotKind::Regions => PlotRequest::Regions { k_min: *k_min, k_max: *k_max },
                PlotKind::Figure2 => PlotRequest::Figure2 { t_max: *t_max },
                PlotKind::Figure4 => PlotRequest::Figure4 { periods: *periods },
            };
            commands::plot(req, out_dir)
        }
        Command::Berndt { k, t, sigma_min } => commands::berndt(*k, *t, *sigma_min),
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.parallel {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let (name, parameters) = describe(cli);
    // plots write files, so they always run
    let cache = (cli.use_cache && name != "plot").then(|| Cache::new(&cli.cache));
    let key = run_key(name, &parameters);
    if let Some(cache) = &cache {
        if let Some(hit) = cache.lookup(&key)? {
            print!("{}", hit.output);
            eprintln!("cached run {}", serde_json::to_string(&hit.record)?);
            return Ok(hit.success);
        }
    }
    let outcome = execute(cli)?;
    print!("{}", outcome.output);
    if !outcome.note.is_empty() {
        eprintln!("{}", outcome.note);
    }
    let record = RunRecord::new(name, parameters, &outcome.results);
    eprintln!("run {}", serde_json::to_string(&record)?);
    if let Some(cache) = &cache {
        cache.append(&CacheEntry {
            key,
            record,
            results: outcome.results,
            output: outcome.output,
            success: outcome.success,
        })?;
    }
    Ok(outcome.success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
