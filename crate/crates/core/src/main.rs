use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use viralwalk::epidemic::{run_epidemic_observed, InfectiousPeriod};
use viralwalk::harness::{
    self, experiment_records, run_experiment, run_suite, ExperimentConfig, ExperimentKind, Suite,
    SuiteOverrides,
};
use viralwalk::rrg::{self, check_typical, TypicalityConfig};
use viralwalk::walker::TrajectoryCsv;

#[derive(Parser)]
#[command(
    name = "viralwalk",
    version,
    about = "Epidemics carried by random walks on random regular graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random regular graph.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Typicality diagnostics of a graph file, as JSON.
    Typical {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        eps1: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Vertices sampled for the local checks; all by default.
        #[arg(long)]
        sample_size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a batch of trials, one JSON line per trial.
    Run {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every walker position of the first trial as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Outbreak sizes across threshold values, as CSV.
    Sweep {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        phi_list: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a validation suite; exits non-zero if any check fails.
    Validate {
        #[arg(long)]
        suite: Suite,
        /// JSON file of suite overrides (n, k, trials, base_seed, samples).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<ExperimentKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// Infectious period in steps, or `inf`.
    #[arg(long, conflicts_with = "phi")]
    xi: Option<InfectiousPeriod>,
    /// Target threshold parameter; the smallest period reaching it is used.
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long)]
    burn_in: Option<u64>,
}

impl ExperimentArgs {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg: ExperimentConfig = match &self.config {
            Some(p) => read_json(p)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($f:ident => $field:ident),*) => {$(if let Some(v) = self.$f { cfg.$field = v; })*};
        }
        set!(kind => kind, n => n, r => r, k => k, rho => rho, trials => trials, seed => base_seed,
             alpha => alpha, burn_in => burn_in);
        if self.max_steps.is_some() {
            cfg.max_steps = self.max_steps;
        }
        // A period or target on the command line replaces either one in the file.
        if self.xi.is_some() || self.phi.is_some() {
            cfg.xi = self.xi;
            cfg.phi = self.phi;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Gen { n, r, seed, out } => {
            let g = rrg::generate_regular(n, r, seed)?;
            let mut w = output(&out)?;
            w.write_all(g.to_text().as_bytes())?;
            w.flush()?;
        }
        Command::Typical {
            graph,
            eps1,
            eps,
            sample_size,
            seed,
        } => {
            let g = rrg::RegularGraph::load(&graph)?;
            let cfg = TypicalityConfig {
                eps1,
                eps,
                sample_size: sample_size.unwrap_or(usize::MAX),
                seed,
            };
            let report = check_typical(&g, &cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Run {
            exp,
            out,
            trajectory,
        } => {
            let cfg = exp.resolve()?;
            if let Some(path) = trajectory {
                write_trajectory(&cfg, &path)?;
            }
            let (trials, report) = run_experiment(&cfg)?;
            let mut w = output(&out)?;
            harness::write_jsonl(&mut w, &experiment_records(&cfg, &trials)?)?;
            w.flush()?;
            eprintln!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Sweep { exp, phi_list, out } => {
            let cfg = exp.resolve()?;
            let rows = harness::sweep(&cfg, &phi_list)?;
            let mut w = output(&out)?;
            harness::write_sweep_csv(&mut w, &rows)?;
            w.flush()?;
        }
        Command::Validate {
            suite,
            config,
            n,
            k,
            trials,
            seed,
            samples,
            out,
        } => {
            let mut o: SuiteOverrides = match &config {
                Some(p) => read_json(p)?,
                None => SuiteOverrides::default(),
            };
            o.n = n.or(o.n);
            o.k = k.or(o.k);
            o.trials = trials.or(o.trials);
            o.base_seed = seed.or(o.base_seed);
            o.samples = samples.or(o.samples);
            let (records, report) = run_suite(suite, &o)?;
            let mut w = output(&out)?;
            harness::write_jsonl(&mut w, &records)?;
            w.flush()?;
            for c in &report.checks {
                eprintln!(
                    "{} {}: {} (target {})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.observed,
                    c.target
                );
            }
            if !report.pass {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_trajectory(cfg: &ExperimentConfig, path: &Path) -> anyhow::Result<()> {
    if !matches!(
        cfg.kind,
        ExperimentKind::Completion | ExperimentKind::Regimes
    ) {
        bail!("--trajectory needs the completion or regimes experiment");
    }
    let seed = cfg.trial_seed(0);
    let g = rrg::generate_regular(cfg.n, cfg.r, seed)?;
    let mut ep = viralwalk::EpidemicConfig::new(cfg.k, cfg.rho, cfg.resolve_xi()?);
    ep.alpha = cfg.alpha;
    ep.max_steps = cfg.max_steps;
    let mut csv = TrajectoryCsv::new(BufWriter::new(File::create(path)?))?;
    let mut err = None;
    run_epidemic_observed(&g, &ep, seed, |s| {
        if err.is_none() {
            err = csv.record(s).err();
        }
    })?;
    if let Some(e) = err {
        return Err(e.into());
    }
    csv.into_inner().flush()?;
    Ok(())
}
