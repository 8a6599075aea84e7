//! Thin command-line front end; all computation lives in the library.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dilation::config::parse_usize_list;
use dilation::numeric::fmt_g17;
use dilation::{
    build_system, default_disk_family, estimate_dilation, list_systems, lyapunov_spectrum,
    parse_config, run, Error, Point, QuadratureGrid, Result,
};

#[derive(Parser)]
#[command(name = "dilation", version, about = "Volume growth, k-dilation and Lyapunov spectra for discrete dynamical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline from a config file and write a report.
    Run {
        /// Path to the key = value config file.
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, e.g. --set run.seed=7 (repeatable).
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
    },
    /// List the catalog systems with dimensions, parameters and known
    /// ground-truth exponents.
    ListSystems,
    /// Estimate the k-dilation of one system (growth records + fits).
    Dilation {
        #[arg(long)]
        system: String,
        #[arg(long)]
        k: usize,
        /// System parameter, e.g. --param K=1.5 (repeatable).
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Random disks added to the axis-aligned family.
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Iteration schedule, e.g. 1..20 or 2,4,8,16.
        #[arg(long, default_value = "1..20")]
        schedule: String,
        /// Quadrature nodes per axis (default depends on k).
        #[arg(long)]
        nodes: Option<usize>,
        /// Also write the series as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compute the Lyapunov spectrum of one orbit.
    Spectrum {
        #[arg(long)]
        system: String,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Start point as comma-separated coordinates (default: domain
        /// center).
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Discarded leading steps (default: n / 10).
        #[arg(long)]
        transient: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config, set } => {
            let text = std::fs::read_to_string(&config).map_err(|e| {
                Error::Config(format!("cannot read config `{}`: {e}", config.display()))
            })?;
            let run_config = parse_config(&text, &set)?;
            let outcome = run(&run_config)?;
            for rep in &outcome.report.reports {
                println!(
                    "{} k={}: d_k_hat = {} chi_sum = {} verdict = {}",
                    rep.system_id,
                    rep.k,
                    fmt_g17(rep.d_k_hat),
                    fmt_g17(rep.chi_partial_sum),
                    rep.verdict
                );
            }
            println!("report written to {}", outcome.report_path.display());
            if outcome.report.all_verdicts_true() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::ListSystems => {
            print!("{}", list_systems());
            Ok(ExitCode::SUCCESS)
        }
        Command::Dilation {
            system,
            k,
            params,
            budget,
            seed,
            schedule,
            nodes,
            csv,
        } => {
            let sys = build_system(&system, &parse_params(&params)?)?;
            let schedule = parse_usize_list("cli", "schedule", &schedule)?;
            let grid = match nodes {
                Some(n) => QuadratureGrid::midpoint(k, n)?,
                None => QuadratureGrid::default_for(k)?,
            };
            let family = default_disk_family(&sys, k, budget, seed)?;
            let est = estimate_dilation(&sys, k, &family, &schedule, &grid)?;
            println!("n,best_log_ratio,best_disk_id");
            for r in &est.records {
                println!("{},{},{}", r.n, fmt_g17(r.best_log_ratio), r.best_disk_id);
            }
            println!("slope_fit = {}", fmt_g17(est.slope_fit));
            println!("last_point = {}", fmt_g17(est.last_point));
            if let Some(path) = csv {
                dilation::report::write_dilation_csv(&path, &est)?;
                println!("series written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum {
            system,
            params,
            x0,
            n,
            transient,
        } => {
            let sys = build_system(&system, &parse_params(&params)?)?;
            let x0 = match x0 {
                Some(text) => {
                    let coords: std::result::Result<Vec<f64>, _> =
                        text.split(',').map(|t| t.trim().parse::<f64>()).collect();
                    Point::new(coords.map_err(|_| {
                        Error::Config(format!("--x0: expected comma-separated numbers, got `{text}`"))
                    })?)
                }
                None => Point::from_vector(sys.domain().center()),
            };
            let transient = transient.unwrap_or(n / 10);
            let spectrum = lyapunov_spectrum(&sys, &x0, n, transient)?;
            for (i, chi) in spectrum.chis().iter().enumerate() {
                println!("chi_{} = {}", i + 1, fmt_g17(*chi));
            }
            println!("n_used = {}", spectrum.n_used());
            println!("transient = {}", spectrum.transient_discarded());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_params(items: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut params = BTreeMap::new();
    for item in items {
        let (name, value) = item.split_once('=').ok_or_else(|| {
            Error::Config(format!("--param expects NAME=VALUE, got `{item}`"))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            Error::Config(format!("--param {name}: expected a number, got `{value}`"))
        })?;
        params.insert(name.trim().to_string(), value);
    }
    Ok(params)
}

// Verdict failures exit 1, usage errors 2, numeric failures 3; clap's own
// usage errors also exit 2.
