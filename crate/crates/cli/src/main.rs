use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use balancemkt::engine::{compare_wind_models, run_experiment_on, ExperimentConfig};
use balancemkt::exec::Executor;
use balancemkt::grid::{load_scenario_file, synthesize_scenario, SynthesisSpec};
use balancemkt::report::{load_results_bundle, render_report, write_results_bundle, write_wind_comparison};
use balancemkt::{Error, Result};

/// Monte-Carlo balancing-market simulator.
///
/// Exit codes: 0 success, 1 invalid input, 2 infeasible scenario, 3 I/O error.
/// BALANCEMKT_THREADS caps the number of worker threads.
#[derive(Parser)]
#[command(name = "balancemkt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scenario.
    Synth {
        #[arg(long, default_value_t = 20)]
        buses: usize,
        #[arg(long, default_value_t = 6)]
        zones: usize,
        #[arg(long)]
        seed: u64,
        /// Renewable capacity as a fraction of conventional capacity.
        #[arg(long, default_value_t = 0.3)]
        res_fraction: f64,
        #[arg(long, default_value_t = 96)]
        instants: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment and write a results bundle.
    Run {
        /// Overrides the scenario named in the config.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render tables and charts from a results bundle.
    Report {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the experiment under Gaussian and Weibull wind errors.
    CompareWind {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_inputs(scenario: Option<PathBuf>, config: &Path) -> Result<(balancemkt::grid::GridScenario, ExperimentConfig)> {
    let mut config = ExperimentConfig::load(config)?;
    if scenario.is_some() {
        config.scenario = scenario;
    }
    let path = config
        .scenario
        .clone()
        .ok_or_else(|| Error::InvalidArgument("no scenario given (--scenario or config \"scenario\")".into()))?;
    Ok((load_scenario_file(path)?, config))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Synth {
            buses,
            zones,
            seed,
            res_fraction,
            instants,
            out,
        } => {
            let scenario = synthesize_scenario(&SynthesisSpec {
                n_buses: buses,
                n_zones: zones,
                res_fraction_of_capacity: res_fraction,
                seed,
                instants,
                ..SynthesisSpec::default()
            })?;
            scenario.save(&out)?;
            println!("wrote {}", out.display());
        }
        Command::Run { scenario, config, out } => {
            let (scenario, config) = load_inputs(scenario, &config)?;
            let results = run_experiment_on(&scenario, &config, &Executor::new(config.threads))?;
            for f in write_results_bundle(&results, &out)? {
                println!("wrote {}", f.display());
            }
        }
        Command::Report { results, out } => {
            let results = load_results_bundle(&results)?;
            for f in render_report(&results, &out)? {
                println!("wrote {}", f.display());
            }
        }
        Command::CompareWind { scenario, config, out } => {
            let (scenario, config) = load_inputs(scenario, &config)?;
            let cmp = compare_wind_models(&scenario, &config, &Executor::new(config.threads))?;
            for f in write_wind_comparison(&cmp, &out)? {
                println!("wrote {}", f.display());
            }
            println!("p_percent  gaussian mean/mode (GWh)  weibull mean/mode (GWh)");
            for w in &cmp.summary {
                println!(
                    "{:>9.2}  {:>10.4} / {:<10.4}     {:>10.4} / {:<10.4}",
                    w.p_percent, w.gaussian_mean_gwh, w.gaussian_mode_gwh, w.weibull_mean_gwh, w.weibull_mode_gwh
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
