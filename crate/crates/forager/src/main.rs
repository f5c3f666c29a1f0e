//! Command-line front end: run catalog scenarios, list them, sweep a
//! parameter, and render plots from emitted CSV files.
//!
//! Exit codes: 0 on success, 1 for invalid configuration, 2 for runtime
//! failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use forager::error::Error;
use forager::harness::{
    self, csv, describe, find_scenario, load_scenario_file, merge_scenario, plot, ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "forager",
    about = "Active-inference foraging experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario batch and write CSV traces, summaries, and the final
    /// learned model.
    Run {
        /// Scenario id from the catalog (see `list`).
        #[arg(long)]
        scenario: String,
        /// Override the scenario's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; files land under `<out>/<scenario>/`.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// JSON file deep-merged over the scenario config.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// List the built-in scenario catalog.
    List,
    /// Re-run a scenario once per value of one config parameter.
    Sweep {
        #[arg(long)]
        scenario: String,
        /// Dot-separated config path, e.g. `gamma` or `env.food_regen`.
        #[arg(long)]
        param: String,
        /// Comma-separated values, parsed as JSON scalars.
        #[arg(long)]
        values: String,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render SVG panels from a directory holding survival.csv and
    /// timeseries.csv.
    Plot {
        #[arg(long = "in")]
        in_dir: PathBuf,
    },
}

fn resolve_scenario(
    id: &str,
    seed: Option<u64>,
    config: Option<&Path>,
) -> Result<ScenarioConfig, Error> {
    let mut scenario = find_scenario(id)?;
    if let Some(path) = config {
        scenario = load_scenario_file(&scenario, path)?;
    }
    if let Some(seed) = seed {
        scenario.base_seed = seed;
    }
    scenario.validate()?;
    Ok(scenario)
}

fn cmd_run(scenario: ScenarioConfig, out: &Path) -> Result<(), Error> {
    let dir = out.join(&scenario.id);
    let (summary, records, models) = harness::run_batch_with_records(&scenario)?;

    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let scenario_json = serde_json::to_string_pretty(&scenario)?;
    std::fs::write(dir.join("scenario.json"), scenario_json).map_err(|e| {
        Error::io(
            format!("writing {}", dir.join("scenario.json").display()),
            e,
        )
    })?;

    csv::write_survival_csv(&summary, &dir.join("survival.csv"))?;
    csv::write_timeseries_csv(&summary, &dir.join("timeseries.csv"))?;
    for (agent, runs) in records.iter().enumerate() {
        for (run, record) in runs.iter().enumerate() {
            let name = format!("traces/agent{agent:02}_run{run:02}.csv");
            csv::write_record_csv(record, &dir.join(name))?;
        }
    }
    if let Some(model) = models.first() {
        std::fs::write(dir.join("model_agent00_final.json"), model.to_json()?)
            .map_err(|e| Error::io("writing final model json", e))?;
    }

    println!(
        "{}: mean survival {:.2} (min {}, max {}) over {} agents x {} runs",
        summary.scenario_id,
        summary.mean_survival,
        summary.min_survival,
        summary.max_survival,
        summary.num_agents,
        summary.num_runs_per_agent
    );
    if summary.num_runs_per_agent > 1 {
        let last = summary.num_runs_per_agent - 1;
        println!(
            "  final-run mean survival {:.2}",
            summary.mean_survival_of_run(last)
        );
    }
    println!("  wrote {}", dir.display());
    Ok(())
}

fn cmd_sweep(base: ScenarioConfig, param: &str, values: &str, out: &Path) -> Result<(), Error> {
    let mut rows = Vec::new();
    println!(
        "{:<14} {:>14} {:>14} {:>6} {:>6}",
        param, "mean_survival", "final_run_mean", "min", "max"
    );
    for raw in values.split(',').filter(|v| !v.trim().is_empty()) {
        let raw = raw.trim();
        let value: serde_json::Value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        // Wrap the value in nested objects along the dotted path.
        let mut patch = value;
        for part in param.split('.').rev() {
            let mut obj = serde_json::Map::new();
            obj.insert(part.to_string(), patch);
            patch = serde_json::Value::Object(obj);
        }
        let scenario = merge_scenario(&base, &patch)?;
        let summary = harness::run_batch(&scenario)?;
        let final_run = summary.mean_survival_of_run(summary.num_runs_per_agent - 1);
        println!(
            "{:<14} {:>14.3} {:>14.3} {:>6} {:>6}",
            raw, summary.mean_survival, final_run, summary.min_survival, summary.max_survival
        );
        rows.push(format!(
            "{param},{raw},{:.6},{:.6},{},{}",
            summary.mean_survival, final_run, summary.min_survival, summary.max_survival
        ));
    }
    if rows.is_empty() {
        return Err(Error::Config("no sweep values supplied".into()));
    }
    std::fs::create_dir_all(out)
        .map_err(|e| Error::io(format!("creating {}", out.display()), e))?;
    let path = out.join(format!("sweep_{}_{}.csv", base.id, param.replace('.', "_")));
    let mut text = String::from("param,value,mean_survival,final_run_mean_survival,min,max\n");
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    std::fs::write(&path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::InvalidInput(_)
        | Error::InvalidDistribution(_)
        | Error::Shape(_)
        | Error::Json(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let result = match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
            config,
        } => resolve_scenario(&scenario, seed, config.as_deref()).and_then(|s| cmd_run(s, &out)),
        Command::List => {
            for cfg in harness::catalog() {
                println!("{:<26} {}", cfg.id, describe(&cfg));
            }
            Ok(())
        }
        Command::Sweep {
            scenario,
            param,
            values,
            out,
            seed,
        } => resolve_scenario(&scenario, seed, None)
            .and_then(|s| cmd_sweep(s, &param, &values, &out)),
        Command::Plot { in_dir } => plot::plot_from_dir(&in_dir).map(|files| {
            for f in files {
                println!("wrote {}", f.display());
            }
        }),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
