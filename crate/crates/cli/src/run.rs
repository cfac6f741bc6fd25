//! Subcommand implementations.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use regenstat::extremes::{enumerate_j, gamma, ClusterVector};
use regenstat::io;
use regenstat::montecarlo::{estimate_profile, simulate_cycles, CYCLE_BLOCK};
use regenstat::{compare, simulate_order_stats, tail_equivalence_check, CompareConfig, RunOptions};

use crate::config::{
    resolve_grid, resolve_sources, resolve_thresholds, CliError, Command, Format, RunConfig,
};

const DEFAULT_CYCLES: u64 = 10_000;
const DEFAULT_N: u64 = 1000;
const DEFAULT_Q_MAX: usize = 3;
const DEFAULT_REPLICAS: u64 = 10_000;
const DEFAULT_ESTIMATE_CYCLES: u64 = 1_000_000;

/// Collects written files and writes the manifest last.
struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.join(name);
        let file = File::create(&path)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let w = self.create(name)?;
        serde_json::to_writer_pretty(w, value)
            .map_err(|e| CliError::runtime(format!("writing {name}: {e}")))
    }

    fn finish(mut self, command: &str, cfg: &RunConfig, params: Value) -> Result<(), CliError> {
        let files = std::mem::take(&mut self.files);
        let manifest = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "library_version": regenstat::VERSION,
            "config": cfg,
            "parameters": params,
            "rng": {
                "generator": "ChaCha8, key from SplitMix64(seed)",
                "replica_streams": "stream j for replica j",
                "cycle_block": CYCLE_BLOCK,
                "cycle_block_stream_offset": regenstat::rng::CYCLE_BLOCK_STREAM_OFFSET,
            },
            "outputs": files,
        });
        self.json("manifest.json", &manifest)
    }
}

fn options(cfg: &RunConfig) -> RunOptions {
    RunOptions {
        workers: cfg.workers,
        cycle_cap: cfg.cycle_cap,
    }
}

pub fn dispatch(cli: crate::config::Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            common,
            model,
            cycles,
            r,
            n,
            q_max,
            replicas,
        } => {
            let file = common.load_file()?;
            let cfg = common.resolve(&file, model.resolve(file.model.as_ref())?)?;
            let opts = options(&cfg);
            let mut out = Outputs::new(&cfg.out_dir)?;
            if let Some(n) = n.or(file.n) {
                let q_max = q_max.or(file.q_max).unwrap_or(DEFAULT_Q_MAX);
                let replicas = replicas.or(file.replicas).unwrap_or(DEFAULT_REPLICAS);
                let sample = simulate_order_stats(&cfg.model, n, q_max, replicas, cfg.seed, &opts)?;
                match cfg.format {
                    Format::Csv => {
                        io::write_order_stats_csv(out.create("order_stats.csv")?, &sample)?
                    }
                    Format::Json => out.json(
                        "order_stats.json",
                        &json!({"n": n, "q_max": q_max, "replicas": replicas,
                                "rows": sample.rows().collect::<Vec<_>>()}),
                    )?,
                }
                println!("simulated {replicas} trajectories of length {n}");
                out.finish(
                    "simulate",
                    &cfg,
                    json!({"n": n, "q_max": q_max, "replicas": replicas}),
                )
            } else {
                let cycles = cycles.or(file.cycles).unwrap_or(DEFAULT_CYCLES);
                let r = r.or(file.r).unwrap_or(1);
                let records = simulate_cycles(&cfg.model, cycles, r, cfg.seed, &opts)?;
                match cfg.format {
                    Format::Csv => io::write_cycles_csv(out.create("cycles.csv")?, &records)?,
                    Format::Json => out.json("cycles.json", &records)?,
                }
                println!("simulated {cycles} cycles");
                out.finish("simulate", &cfg, json!({"cycles": cycles, "r": r}))
            }
        }
        Command::Estimate {
            common,
            model,
            cycles,
            r,
            thresholds,
        } => {
            let file = common.load_file()?;
            let cfg = common.resolve(&file, model.resolve(file.model.as_ref())?)?;
            let cycles = cycles.or(file.cycles).unwrap_or(DEFAULT_CYCLES);
            let r = r.or(file.r).unwrap_or(3);
            let th = resolve_thresholds(&thresholds, &file, vec![0.5, 0.9, 0.99, 0.999])?;
            let est = estimate_profile(&cfg.model, cycles, r, &th, cfg.seed, &options(&cfg))?;
            let mut out = Outputs::new(&cfg.out_dir)?;
            let summary = io::estimate_summary(&est);
            match cfg.format {
                Format::Csv => io::write_estimate_csv(out.create("estimate.csv")?, &est)?,
                Format::Json => {
                    let rows: Vec<Value> = est
                        .thresholds
                        .iter()
                        .map(|s| {
                            json!({"x": s.x, "exceedances": s.exceedances, "tail": s.tail(),
                                   "vacuous": s.vacuous(),
                                   "beta": (1..=r).map(|i| s.beta(i)).collect::<Vec<_>>()})
                        })
                        .collect();
                    out.json("estimate.json", &rows)?
                }
            }
            out.json("estimate_summary.json", &summary)?;
            println!("mu_hat = {} +- {}", est.mu_hat, est.mu_stderr);
            out.finish(
                "estimate",
                &cfg,
                json!({"cycles": cycles, "r": r, "thresholds": format!("{th:?}")}),
            )
        }
        Command::Compare {
            common,
            model,
            n,
            q_max,
            replicas,
            grid,
            beta_source,
            estimate_cycles,
        } => {
            let file = common.load_file()?;
            let cfg = common.resolve(&file, model.resolve(file.model.as_ref())?)?;
            let sources = resolve_sources(&beta_source, &file)?;
            let base = CompareConfig {
                n: n.or(file.n).unwrap_or(DEFAULT_N),
                q_max: q_max.or(file.q_max).unwrap_or(DEFAULT_Q_MAX),
                replicas: replicas.or(file.replicas).unwrap_or(DEFAULT_REPLICAS),
                grid: resolve_grid(grid.as_deref(), &file)?,
                beta_source: sources[0],
                seed: cfg.seed,
                estimate_cycles: estimate_cycles
                    .or(file.estimate_cycles)
                    .unwrap_or(DEFAULT_ESTIMATE_CYCLES),
            };
            let mut out = Outputs::new(&cfg.out_dir)?;
            for source in &sources {
                let start = Instant::now();
                let run_cfg = CompareConfig {
                    beta_source: *source,
                    ..base.clone()
                };
                let report = compare(&cfg.model, &run_cfg, &options(&cfg))?;
                let summary = io::report_summary(&report, start.elapsed().as_secs_f64());
                match cfg.format {
                    Format::Csv => {
                        io::write_report_csv(out.create(&format!("report_{source}.csv"))?, &report)?
                    }
                    Format::Json => out.json(&format!("report_{source}.json"), &report)?,
                }
                out.json(&format!("summary_{source}.json"), &summary)?;
                for q in 1..=report.q_max {
                    println!(
                        "beta_source={source} q={q} sup_gap={:.6} max_stderr={:.6}",
                        report.sup_gap[q - 1],
                        report.max_stderr(q)
                    );
                }
                if report.beta_fallback {
                    println!(
                        "beta_source={source}: some beta_i had no closed form and were estimated"
                    );
                }
            }
            out.finish(
                "compare",
                &cfg,
                json!({"n": base.n, "q_max": base.q_max, "replicas": base.replicas,
                       "grid": base.grid, "beta_source": sources,
                       "estimate_cycles": base.estimate_cycles}),
            )
        }
        Command::Gamma { q, k, beta } => {
            let beta = ClusterVector::new(beta).map_err(|e| CliError::config(e.to_string()))?;
            let value = gamma(q, k, &beta).map_err(|e| CliError::config(e.to_string()))?;
            println!("gamma({q}, {k}) = {value}");
            let set = enumerate_j(q, k);
            println!("J({q}, {k}): {} member(s)", set.len());
            for j in &set.members {
                let parts: Vec<String> = j.iter().map(usize::to_string).collect();
                println!("  ({})", parts.join(", "));
            }
            Ok(())
        }
        Command::Tailcheck {
            common,
            model,
            cycles,
            thresholds,
        } => {
            let file = common.load_file()?;
            let cfg = common.resolve(&file, model.resolve(file.model.as_ref())?)?;
            let cycles = cycles.or(file.cycles).unwrap_or(DEFAULT_CYCLES);
            let th = resolve_thresholds(&thresholds, &file, vec![0.9, 0.99, 0.999])?;
            let check = tail_equivalence_check(&cfg.model, cycles, &th, cfg.seed, &options(&cfg))?;
            let mut out = Outputs::new(&cfg.out_dir)?;
            match cfg.format {
                Format::Csv => io::write_tailcheck_csv(out.create("tailcheck.csv")?, &check)?,
                Format::Json => out.json("tailcheck.json", &check)?,
            }
            for row in &check.rows {
                println!(
                    "x={} ratio={:.4} +- {:.4}{}",
                    row.x,
                    row.ratio,
                    row.ratio_stderr,
                    if row.vacuous { " (vacuous)" } else { "" }
                );
            }
            out.finish(
                "tailcheck",
                &cfg,
                json!({"cycles": cycles, "thresholds": format!("{th:?}")}),
            )
        }
    }
}
