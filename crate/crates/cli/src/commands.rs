use std::fmt;
use std::fs;
use std::io::{self, Write};

use lostsales::experiments::{
    compare_with_reference, figure1, search_min_r, simulation_grid, table2_with, verify_grid, Figure1Config,
};
use lostsales::report::{self, Record, Style};
use lostsales::sim::SimConfig;
use lostsales::{bounds, gamma_from_measure, measures_from_gamma, simulate, Execution, Measure, SystemParams};

use crate::{Cli, Command, DemandArgs, Format, MeasureArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(String),
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
            CliError::Mismatch(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Io(m) | CliError::Mismatch(m) => f.write_str(m),
        }
    }
}

impl From<lostsales::Error> for CliError {
    fn from(e: lostsales::Error) -> Self {
        match e {
            lostsales::Error::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn system(r: u64, q: u64, demand: &DemandArgs) -> Result<SystemParams> {
    let params = match (demand.x, demand.lambda, demand.tau) {
        (Some(x), None, None) => SystemParams::from_lead_time_demand(r, q, x)?,
        (None, Some(lambda), Some(tau)) => SystemParams::new(r, q, lambda, tau)?,
        _ => {
            return Err(CliError::Usage(
                "give either --x or both --lambda and --tau".to_owned(),
            ))
        }
    };
    Ok(params)
}

fn emit(cli: &Cli, records: &[Record]) -> Result<()> {
    let style = Style { round4: cli.round4 };
    let text = match cli.format {
        Format::Json => report::to_json(records, style),
        Format::Csv => report::to_csv(records, style),
    };
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}"))),
    }
}

fn configure_threads(threads: usize) -> Result<()> {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    configure_threads(cli.threads)?;
    let exec = Execution::Parallel;
    match &cli.command {
        Command::Bounds { r, q, demand } => {
            let params = system(*r, *q, demand)?;
            let b = bounds(&params)?;
            emit(cli, &[report::bounds_record(&params, &b)])
        }
        Command::Convert { r, q, x, measure } => {
            let params = SystemParams::from_lead_time_demand(*r, *q, *x)?;
            let gamma = gamma_of(measure, &params)?;
            let m = measures_from_gamma(gamma, &params)?;
            emit(cli, &[report::measures_record(&params, &m)])
        }
        Command::Simulate {
            r,
            q,
            demand,
            demands,
            warmup,
            batches,
        } => {
            let params = system(*r, *q, demand)?;
            let mut config = SimConfig::new(params, *demands, cli.seed);
            config.n_batches = *batches;
            if let Some(w) = warmup {
                config.warmup_demands = *w;
            }
            let estimate = simulate(&config)?;
            let b = bounds(&params)?;
            let record = report::params_record(&params)
                .uint("seed", config.seed)
                .uint("warmup_demands", config.warmup_demands)
                .uint("n_batches", config.n_batches as u64)
                .extend(report::estimate_record(&estimate))
                .real("lb", b.lb)
                .real("ub", b.ub)
                .real("erlang", b.erlang);
            emit(cli, &[record])
        }
        Command::Table2 { compare_paper } => {
            let rows = table2_with(exec)?;
            let records: Vec<Record> = rows.iter().map(report::aggregate_record).collect();
            emit(cli, &records)?;
            if *compare_paper {
                let bad = compare_with_reference(&rows, 1e-4);
                for m in &bad {
                    eprintln!(
                        "mismatch r={} K={} {}: computed {} vs published {}",
                        m.r, m.k, m.field, m.computed, m.reference
                    );
                }
                if !bad.is_empty() {
                    return Err(CliError::Mismatch(format!("{} of 250 table values differ by more than 1e-4", bad.len())));
                }
                eprintln!("all 250 table values within 1e-4 of the published table");
            }
            Ok(())
        }
        Command::Figure1 {
            r_max,
            k_min,
            k_max,
            k_step,
        } => {
            let config = Figure1Config {
                r_max: *r_max,
                k_min: *k_min,
                k_max: *k_max,
                k_step: *k_step,
            };
            let points = figure1(&config, exec)?;
            let records: Vec<Record> = points.iter().map(report::figure_record).collect();
            emit(cli, &records)
        }
        Command::Verify {
            rs,
            qs,
            ks,
            demands,
            k_sigma,
        } => {
            let grid = simulation_grid(rs, qs, ks, *demands, cli.seed)?;
            if let Some(c) = grid.first() {
                c.validate()?;
            }
            let reports = verify_grid(&grid, *k_sigma, exec);
            let records: Vec<Record> = reports.iter().map(report::cell_record).collect();
            emit(cli, &records)?;
            let failed = reports.iter().filter(|c| !c.passed()).count();
            if failed > 0 {
                return Err(CliError::Mismatch(format!("{failed} of {} cells failed verification", reports.len())));
            }
            Ok(())
        }
        Command::MinR { q, x, target } => {
            let r = search_min_r(*q, *x, *target)?;
            let params = SystemParams::from_lead_time_demand(r, *q, *x)?;
            let b = bounds(&params)?;
            let record = report::bounds_record(&params, &b).real("target", *target);
            emit(cli, &[record])
        }
    }
}

fn gamma_of(measure: &MeasureArgs, params: &SystemParams) -> Result<f64> {
    let chosen = [
        (None, measure.gamma),
        (Some(Measure::L), measure.level),
        (Some(Measure::P), measure.position),
        (Some(Measure::U), measure.on_order),
    ];
    match chosen.iter().find(|(_, v)| v.is_some()) {
        Some((None, Some(g))) => Ok(*g),
        Some((Some(which), Some(v))) => Ok(gamma_from_measure(*which, *v, params)?),
        _ => Err(CliError::Usage("give exactly one of --gamma, --L, --P, --U".to_owned())),
    }
}
