use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use specov::harness::{
    apply_overrides, format_matrix, format_rates, load_document, parse_document, rates_table, read_data,
    run_estimator, run_experiment, summarize, summary_json, write_csv, write_csv_file, write_summary_file,
    CvRequest, EstimateRequest, EstimationContext, ExperimentSpec, RatesRequest,
};
use specov::shrinkage::{cross_validate_tau, PdSoftConfig, ThresholdRule};
use specov::{Error, EstimatorKind, Result};

#[derive(Parser)]
#[command(name = "specov", version, about = "Covariance estimation under noise of unknown distribution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML document; flags override its keys.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Extra `dotted.key=value` override, applied last. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a covariance matrix from a data file.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: Option<PathBuf>,
        /// spectral, cov, hard, soft, sps, pds, lowrank or elliptical.
        #[arg(long)]
        estimator: Option<String>,
        #[arg(long)]
        u: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        r_bound: Option<f64>,
        #[arg(long)]
        t_noise: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Cross-validate τ with this many splits.
        #[arg(long)]
        cv_splits: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a simulation experiment and emit per-replication records.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Write zero wall times so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Cross-validate the threshold on a data file.
    Cv {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: Option<PathBuf>,
        /// hard, soft, sps or pds.
        #[arg(long)]
        rule: Option<String>,
        #[arg(long)]
        u: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        splits: Option<usize>,
        /// Comma-separated ascending thresholds.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print radius, threshold and rate tables over sample sizes.
    Rates {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: Option<usize>,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long)]
        r_bound: Option<f64>,
        #[arg(long)]
        t_noise: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        sparsity: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        u: Option<f64>,
    },
}

/// Flag values collected as `key=value` overrides in TOML syntax.
#[derive(Default)]
struct Overrides(Vec<String>);

impl Overrides {
    fn num<T: ToString>(&mut self, key: &str, v: Option<T>) -> &mut Self {
        if let Some(v) = v {
            self.0.push(format!("{key}={}", v.to_string()));
        }
        self
    }

    fn float(&mut self, key: &str, v: Option<f64>) -> &mut Self {
        // keep floats floats so 3 is not read as an integer
        if let Some(v) = v {
            self.0.push(format!("{key}={v:?}"));
        }
        self
    }

    fn text(&mut self, key: &str, v: Option<String>) -> &mut Self {
        if let Some(v) = v {
            let quoted = serde_json::to_string(&v).expect("string is serialisable");
            self.0.push(format!("{key}={quoted}"));
        }
        self
    }

    fn path(&mut self, key: &str, v: Option<PathBuf>) -> &mut Self {
        self.text(key, v.map(|p| p.to_string_lossy().into_owned()))
    }

    fn list<T: std::fmt::Debug>(&mut self, key: &str, v: Option<Vec<T>>) -> &mut Self {
        if let Some(v) = v {
            self.0.push(format!("{key}={v:?}"));
        }
        self
    }
}

fn document<R: serde::de::DeserializeOwned>(common: &Common, flags: &Overrides) -> Result<R> {
    let mut doc = load_document(common.config.as_deref())?;
    apply_overrides(&mut doc, &flags.0)?;
    apply_overrides(&mut doc, &common.set)?;
    parse_document(doc)
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::io_at(p))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate {
            common,
            data,
            estimator,
            u,
            tau,
            lambda,
            gamma,
            r_bound,
            t_noise,
            beta,
            cv_splits,
            seed,
            output,
        } => {
            let mut o = Overrides::default();
            o.path("data", data)
                .text("estimator.kind", estimator)
                .float("estimator.u", u)
                .float("estimator.tau", tau)
                .float("estimator.lambda", lambda)
                .float("theory.gamma", gamma)
                .float("theory.r_bound", r_bound)
                .float("theory.t_noise", t_noise)
                .float("theory.beta", beta)
                .num("cv.num_splits", cv_splits)
                .num("seed", seed)
                .path("output", output);
            let req: EstimateRequest = document(&common, &o)?;
            let y = read_data(&req.data)?;
            let ctx = EstimationContext::from_theory(&req.theory, req.cv.clone());
            let (est, flag) = run_estimator(&req.estimator, &y, &ctx, req.seed)?;
            let info = serde_json::json!({
                "estimator": est.kind.as_str(),
                "n": y.n(),
                "p": y.p(),
                "u": est.tuning.u,
                "tau": est.tuning.tau,
                "lambda": est.tuning.lambda,
                "admissible": flag,
            });
            emit(req.output.as_ref(), &format!("# {info}\n{}", format_matrix(&est.matrix)))
        }
        Command::Simulate { common, replications, seed, n, csv, summary, no_timing } => {
            let mut o = Overrides::default();
            o.num("replications", replications)
                .num("scenario.seed", seed)
                .num("scenario.n", n)
                .path("output.csv", csv)
                .path("output.summary", summary);
            if no_timing {
                o.0.push("output.timing=false".into());
            }
            let spec: ExperimentSpec = document(&common, &o)?;
            spec.validate()?;
            let records = run_experiment(&spec)?;
            let stats = summarize(&records)?;
            match &spec.output.csv {
                Some(p) => {
                    write_csv_file(&records, p)?;
                    if spec.output.summary.is_none() {
                        println!("{}", summary_json(&stats));
                    }
                }
                None => write_csv(&records, std::io::stdout().lock())?,
            }
            if let Some(p) = &spec.output.summary {
                write_summary_file(&stats, p)?;
            }
            Ok(())
        }
        Command::Cv { common, data, rule, u, lambda, splits, grid, seed } => {
            let mut o = Overrides::default();
            o.path("data", data)
                .text("rule", rule)
                .float("u", u)
                .float("lambda", lambda)
                .num("cv.num_splits", splits)
                .list("cv.tau_grid", grid)
                .num("cv.seed", seed);
            let req: CvRequest = document(&common, &o)?;
            let barrier = PdSoftConfig::new(0.0, req.lambda.unwrap_or(1e-4));
            let rule = match req.rule {
                EstimatorKind::Hard => ThresholdRule::Hard,
                EstimatorKind::Soft => ThresholdRule::Soft,
                EstimatorKind::Sps => ThresholdRule::Sps(barrier),
                EstimatorKind::Pds => ThresholdRule::Pds(barrier),
                other => {
                    return Err(Error::Config(format!("rule must be hard, soft, sps or pds, got {other}")));
                }
            };
            let y = read_data(&req.data)?;
            let cfg = req.cv.config(req.cv.seed)?;
            let out = cross_validate_tau(&y, req.u, &cfg, &rule)?;
            let json = serde_json::json!({
                "tau_hat": out.tau_hat,
                "tau_grid": cfg.tau_grid,
                "q_values": out.q_values,
            });
            println!("{json}");
            Ok(())
        }
        Command::Rates { common, p, n, r_bound, t_noise, beta, gamma, sparsity, q, u } => {
            let mut o = Overrides::default();
            o.num("p", p)
                .list("n", n)
                .float("r_bound", r_bound)
                .float("t_noise", t_noise)
                .float("beta", beta)
                .float("gamma", gamma)
                .float("sparsity", sparsity)
                .float("q", q)
                .float("u", u);
            let req: RatesRequest = document(&common, &o)?;
            print!("{}", format_rates(&rates_table(&req)?));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
