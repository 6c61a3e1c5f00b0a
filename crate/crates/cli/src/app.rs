//! Command-line front end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ehrelay::analytic::{diversity_predicted, multiplicative_gain};
use ehrelay::{EnergyModel, Scenario};

use crate::config::{parse_pex_list, CurveSource, Mode, Overrides, RunConfig, SnrRange, SweepSpec};
use crate::error::{CliError, Result};
use crate::output::{emit_diversity, emit_outputs, Extras};
use crate::sweep::{
    run_diversity, run_pex_sweep, run_single_point, run_snr_sweep, DiversityRow, SweepResult,
};

/// Standard errors allowed between Monte Carlo and the exact analytic value.
pub const CHECK_SIGMAS: f64 = 4.0;

#[derive(Debug, Parser)]
#[command(
    name = "ehrelay",
    version,
    about = "Outage probability of energy-harvesting relay networks: closed forms and Monte Carlo"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a single operating point.
    Eval(CommonArgs),
    /// Outage against SNR for several energy-exhausted probabilities.
    SweepSnr(CommonArgs),
    /// Outage against the energy-exhausted probability at a fixed SNR.
    SweepPex(CommonArgs),
    /// Fit the diversity order over a high-SNR window.
    Diversity {
        #[command(flatten)]
        common: CommonArgs,
        /// Curve to fit.
        #[arg(long, value_enum)]
        source: Option<CurveSource>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON file with `system`, `energy` and `sweep` sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Monte Carlo trials per cell.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Two-sided confidence level of the Monte Carlo interval.
    #[arg(long)]
    pub confidence: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Also write an SVG chart.
    #[arg(long)]
    pub svg: bool,
    /// Also write a gnuplot script that plots the CSV.
    #[arg(long)]
    pub script: bool,
    /// SNR grid `start:stop:step` in dB, or a single value.
    #[arg(long, value_name = "A:B:STEP", allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    /// Comma-separated energy-exhausted probabilities.
    #[arg(long, value_name = "P1,P2,...")]
    pub pex: Option<String>,
    /// Fail with exit code 3 unless every Monte Carlo estimate lies within
    /// 4 standard errors of the exact analytic value.
    #[arg(long)]
    pub check: bool,
}

impl CommonArgs {
    fn spec(&self, mode: Mode, source: Option<CurveSource>) -> Result<SweepSpec> {
        let config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = Overrides {
            snr_db: self.snr_db.as_deref().map(SnrRange::parse).transpose()?,
            pex: self.pex.as_deref().map(parse_pex_list).transpose()?,
            trials: self.trials,
            seed: self.seed,
            workers: self.workers,
            confidence: self.confidence,
            svg: self.svg,
            source,
        };
        SweepSpec::resolve(mode, &config, &flags)
    }

    fn extras(&self, spec: &SweepSpec) -> Extras {
        Extras {
            svg: spec.outputs.svg,
            script: self.script,
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval(args) => {
            let spec = args.spec(Mode::SinglePoint, None)?;
            let result = run_single_point(&spec)?;
            print_eval(&spec, &result)?;
            finish_sweep(&args, &spec, &result)
        }
        Command::SweepSnr(args) => {
            let spec = args.spec(Mode::SnrSweep, None)?;
            let result = run_snr_sweep(&spec)?;
            print_table(&result);
            finish_sweep(&args, &spec, &result)
        }
        Command::SweepPex(args) => {
            let spec = args.spec(Mode::PexSweep, None)?;
            let result = run_pex_sweep(&spec)?;
            print_table(&result);
            if let Some(r) = result.references {
                println!(
                    "reference lines: direct {:.6e}, constant-power relay {:.6e}",
                    r.direct, r.constant_power
                );
            }
            finish_sweep(&args, &spec, &result)
        }
        Command::Diversity { common, source } => {
            let spec = common.spec(Mode::Diversity, source)?;
            let rows = run_diversity(&spec)?;
            print_diversity(&rows);
            if spec.outputs.csv {
                for path in emit_diversity(&rows, &common.out_dir, common.extras(&spec))? {
                    println!("wrote {}", path.display());
                }
            }
            if common.check {
                check_diversity(&rows)?;
            }
            Ok(())
        }
    }
}

fn finish_sweep(args: &CommonArgs, spec: &SweepSpec, result: &SweepResult) -> Result<()> {
    if spec.outputs.csv {
        for path in emit_outputs(result, &args.out_dir, args.extras(spec))? {
            println!("wrote {}", path.display());
        }
    }
    if args.check {
        check_agreement(result)?;
        println!(
            "check passed: all {} Monte Carlo estimates within {CHECK_SIGMAS} standard errors",
            result.rows.len()
        );
    }
    Ok(())
}

pub fn check_agreement(result: &SweepResult) -> Result<()> {
    let bad = result.disagreements(CHECK_SIGMAS);
    if bad.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = bad
        .iter()
        .map(|r| {
            format!(
                "  {} dB, p_ex = {}: MC {:.6e} vs exact {:.6e}",
                r.snr_db, r.p_ex, r.p_mc, r.p_coop_exact
            )
        })
        .collect();
    Err(CliError::CheckFailed(format!(
        "{} of {} cells disagree beyond {CHECK_SIGMAS} standard errors:\n{}",
        bad.len(),
        result.rows.len(),
        lines.join("\n")
    )))
}

/// Accepted band for a fitted diversity order.
pub fn diversity_band(predicted: u32) -> (f64, f64) {
    if predicted == 2 {
        (1.9, 2.1)
    } else {
        (0.85, 1.15)
    }
}

fn check_diversity(rows: &[DiversityRow]) -> Result<()> {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| {
            let (lo, hi) = diversity_band(r.predicted);
            !(lo..=hi).contains(&r.fit.slope)
        })
        .map(|r| {
            format!(
                "  p_ex = {}: fitted {:.4}, predicted {}",
                r.p_ex, r.fit.slope, r.predicted
            )
        })
        .collect();
    if bad.is_empty() {
        println!("check passed: fitted diversity orders match the predicted ones");
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "fitted diversity outside its band:\n{}",
            bad.join("\n")
        )))
    }
}

fn print_table(result: &SweepResult) {
    println!(
        "{:>8} {:>10} {:>14} {:>14} {:>14} {:>14} {:>12}",
        "snr_db", "p_ex", "direct", "coop_exact", "coop_closed", "mc", "mc_se"
    );
    for r in &result.rows {
        println!(
            "{:>8.2} {:>10.3e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>12.3e}",
            r.snr_db, r.p_ex, r.p_direct_exact, r.p_coop_exact, r.p_coop_closed, r.p_mc, r.mc_se
        );
    }
    if !result.clamped.is_empty() {
        println!(
            "note: closed form clamped to [0, 1] in {} cell(s) (below its high-SNR regime)",
            result.clamped.len()
        );
    }
}

fn print_eval(spec: &SweepSpec, result: &SweepResult) -> Result<()> {
    let r = &result.rows[0];
    let energy = EnergyModel {
        p_ex: r.p_ex,
        ..spec.energy
    };
    let s = Scenario::new(spec.system_at(r.snr_db), energy)?;
    println!("SNR                      {} dB", r.snr_db);
    println!("p_ex                     {}", r.p_ex);
    println!("direct outage (exact)    {:.6e}", r.p_direct_exact);
    println!("coop outage (exact)      {:.6e}", r.p_coop_exact);
    println!("coop outage (closed)     {:.6e}", r.p_coop_closed);
    println!(
        "coop outage (MC)         {:.6e} ± {:.2e}  [{:.6e}, {:.6e}]  ({} trials, seed {})",
        r.p_mc, r.mc_se, r.mc_ci_lo, r.mc_ci_hi, r.trials, r.seed
    );
    println!("multiplicative gain      {:.6}", multiplicative_gain(&s));
    println!("predicted diversity      {}", diversity_predicted(&energy));
    Ok(())
}

fn print_diversity(rows: &[DiversityRow]) {
    println!(
        "{:>10} {:>12} {:>10} {:>10} {:>8} {:>12}",
        "p_ex", "source", "predicted", "fitted", "points", "rms"
    );
    for r in rows {
        println!(
            "{:>10} {:>12} {:>10} {:>10.4} {:>8} {:>12.3e}",
            r.p_ex,
            r.source.name(),
            r.predicted,
            r.fit.slope,
            r.fit.points_used,
            r.fit.residual_rms
        );
    }
}
