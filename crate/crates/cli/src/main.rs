//! `peacock`: family evaluation, ordering checks and embeddings from JSON specs.
//!
//! Exit codes: 0 pass, 1 property failure, 2 usage or configuration error.

mod commands;
mod manifest;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::{Failure, Inputs, Method, Output, Res};
use manifest::RunManifest;
use peacock::montecarlo::PathConfig;
use peacock::ordering::CheckOptions;

#[derive(Parser)]
#[command(name = "peacock", version, about = "Ordered families of laws, TP2 checks and Skorokhod embeddings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Family spec (JSON).
    #[arg(long)]
    family: PathBuf,
    /// Output file; a manifest is written to `<out>.manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "PEACOCK_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args, Clone)]
struct Sim {
    /// Chain of (t, t') points (JSON array of pairs).
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Smallest time step.
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Method::CoxHobson)]
    method: Method,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate mean, C and Ψ on a grid (CSV).
    Family {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: Option<PathBuf>,
    },
    /// Run one check: mrl, icx, det2, mtp2, crosscheck or tp2:<pair>.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        test: String,
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Absolute tolerance replacing the scale-aware default.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Simulate coupled samples along a chain (CSV).
    Embed {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: Sim,
    },
    /// Simulate and compare the marginals with the family.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: Sim,
        /// Largest accepted Kolmogorov–Smirnov distance.
        #[arg(long, default_value_t = 0.015)]
        tol: f64,
    },
    /// Distances and drift statistics for a sample CSV.
    Stats {
        #[command(flatten)]
        common: Common,
        /// Samples written by `embed`.
        #[arg(long)]
        samples: PathBuf,
    },
    /// Ordering checks and a short embedding in one JSON dossier.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        chain: Option<PathBuf>,
        /// Paths for the embedding section; 0 skips it.
        #[arg(long, default_value_t = 2_000)]
        n: usize,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
    },
}

struct Run {
    name: &'static str,
    ext: &'static str,
    common: Common,
    config: serde_json::Value,
    seed: Option<u64>,
}

fn workers(c: &Common) -> Res<Option<usize>> {
    match c.workers {
        Some(0) => Err(Failure::Usage("--workers must be at least 1".into())),
        w => Ok(w),
    }
}

fn path_cfg(n: usize, dt: f64, seed: u64) -> Res<PathConfig> {
    let cfg = PathConfig {
        dt,
        n_samples: n,
        master_seed: seed,
        ..PathConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn check_opts(tol: Option<f64>, w: Option<usize>) -> Res<CheckOptions> {
    if tol.is_some_and(|t| !(t >= 0.0 && t.is_finite())) {
        return Err(Failure::Usage("--tol must be finite and nonnegative".into()));
    }
    Ok(CheckOptions {
        tol,
        workers: w,
        ..CheckOptions::default()
    })
}

fn execute(cmd: Cmd, inputs: &mut Inputs) -> (Run, Res<Output>) {
    match cmd {
        Cmd::Family { common, grid } => {
            let config = json!({ "grid": grid });
            let res = (|| {
                let fam = inputs.family(&common.family)?;
                let g = inputs.grid(grid.as_deref(), &fam, 17)?;
                commands::family(&fam, &g)
            })();
            (Run { name: "family", ext: "csv", common, config, seed: None }, res)
        }
        Cmd::Check { common, test, grid, tol } => {
            let config = json!({ "test": test, "grid": grid, "tol": tol, "workers": common.workers });
            let res = (|| {
                let opts = check_opts(tol, workers(&common)?)?;
                let fam = inputs.family(&common.family)?;
                let nx = if test == "mtp2" || test == "crosscheck" { 9 } else { 17 };
                let g = inputs.grid(grid.as_deref(), &fam, nx)?;
                commands::check(&fam, &g, &test, &opts)
            })();
            (Run { name: "check", ext: "json", common, config, seed: None }, res)
        }
        Cmd::Embed { common, sim } => {
            let config = sim_config(&sim);
            let seed = Some(sim.seed);
            let res = (|| {
                let w = workers(&common)?;
                let fam = inputs.family(&common.family)?;
                let chain = inputs.chain(&sim.chain)?;
                let cfg = path_cfg(sim.n, sim.dt, sim.seed)?;
                let s = commands::simulate(&fam, &chain, &cfg, sim.method, w)?;
                Ok(commands::embed(&fam, &s))
            })();
            (Run { name: "embed", ext: "csv", common, config, seed }, res)
        }
        Cmd::Verify { common, sim, tol } => {
            let mut config = sim_config(&sim);
            config["tol"] = json!(tol);
            let seed = Some(sim.seed);
            let res = (|| {
                let w = workers(&common)?;
                let fam = inputs.family(&common.family)?;
                let chain = inputs.chain(&sim.chain)?;
                let cfg = path_cfg(sim.n, sim.dt, sim.seed)?;
                let s = commands::simulate(&fam, &chain, &cfg, sim.method, w)?;
                commands::verify(&fam, &s, tol)
            })();
            (Run { name: "verify", ext: "json", common, config, seed }, res)
        }
        Cmd::Stats { common, samples } => {
            let config = json!({ "samples": samples });
            let res = (|| {
                let fam = inputs.family(&common.family)?;
                commands::stats(&fam, inputs, &samples)
            })();
            (Run { name: "stats", ext: "json", common, config, seed: None }, res)
        }
        Cmd::Report { common, grid, chain, n, dt, seed, tol } => {
            let config = json!({ "grid": grid, "chain": chain, "n": n, "dt": dt, "tol": tol });
            let res = (|| {
                let opts = check_opts(tol, workers(&common)?)?;
                let fam = inputs.family(&common.family)?;
                let g = inputs.grid(grid.as_deref(), &fam, 9)?;
                let pts = match &chain {
                    Some(p) => inputs.chain(p)?,
                    None => commands::default_chain(&fam),
                };
                if n == 0 {
                    return commands::report(&fam, &g, &opts, None);
                }
                let cfg = path_cfg(n, dt, seed)?;
                commands::report(&fam, &g, &opts, Some((&pts, &cfg)))
            })();
            (Run { name: "report", ext: "json", common, config, seed: Some(seed) }, res)
        }
    }
}

fn sim_config(sim: &Sim) -> serde_json::Value {
    json!({
        "chain": sim.chain,
        "n": sim.n,
        "dt": sim.dt,
        "seed": sim.seed,
        "method": sim.method,
    })
}

fn finish(run: Run, inputs: Inputs, res: Res<Output>, start: Instant) -> ExitCode {
    let out: PathBuf = run
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", run.name, run.ext)));
    let (code, outputs) = match res {
        Ok(o) => match std::fs::write(&out, &o.body) {
            Ok(()) => {
                let mut stdout = std::io::stdout().lock();
                let _ = writeln!(stdout, "{}", serde_json::to_string(&o.summary).expect("json"));
                (if o.pass { 0 } else { 1 }, vec![out.display().to_string()])
            }
            Err(e) => {
                eprintln!("error: writing {}: {e}", out.display());
                (2, vec![])
            }
        },
        Err(f) => {
            eprintln!("error: {f}");
            (2, vec![])
        }
    };
    let mut config = run.config;
    config["family"] = json!(run.common.family);
    config["workers"] = json!(run.common.workers);
    let m = RunManifest {
        command: run.name.into(),
        config,
        seed: run.seed,
        input_hash: manifest::content_hash(&inputs.files),
        inputs: inputs.files.iter().map(|f| f.0.clone()).collect(),
        outputs,
        exit_code: code,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    if let Err(e) = manifest::write(Path::new(&out), &m) {
        eprintln!("error: writing manifest: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut inputs = Inputs::default();
    let (run, res) = execute(cli.cmd, &mut inputs);
    finish(run, inputs, res, start)
}
