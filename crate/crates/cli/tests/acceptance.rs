//! Acceptance criteria. Runs as a plain binary (no libtest harness) so every
//! criterion prints exactly one PASS/FAIL line, then exits non-zero if any
//! failed.
//!
//!     cargo test -p ehrelay-cli --test acceptance

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ehrelay::analytic::{
    bessel_k1, coop_outage_closed_form, coop_outage_exact, direct_outage_exact, diversity_fit,
    multiplicative_gain, relay_cdf, relay_outage_exact,
};
use ehrelay::simulate::std_err_at;
use ehrelay::{validate, EnergyModel, MonteCarlo, Scenario, SystemParams};
use ehrelay_cli::config::{Mode, SweepSpec};
use ehrelay_cli::sweep::{run_pex_sweep, run_snr_sweep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID_SNR_DB: [f64; 3] = [10.0, 20.0, 30.0];
const GRID_PEX: [f64; 4] = [0.0, 0.01, 0.1, 1.0];
const MC_TRIALS: u64 = 10_000_000;
const MC_SIGMAS: f64 = 4.0;
const CLOSED_FORM_REL_TOL: f64 = 0.10;
const K1_REL_TOL: f64 = 1e-10;
const SEED: u64 = 20_240_601;

const K1_TABLE: &str = include_str!("../../core/tests/data/k1_reference.csv");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn at(snr_db: f64, p_ex: f64) -> Scenario {
    Scenario::at_snr_db(snr_db, p_ex).unwrap()
}

fn ulps(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

/// Criterion 1: MC agrees with the exact analytic outage on the 3 x 4 grid.
fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for snr in GRID_SNR_DB {
        for p_ex in GRID_PEX {
            let s = at(snr, p_ex);
            let exact = coop_outage_exact(&s);
            let est = MonteCarlo::new(MC_TRIALS, SEED)
                .estimate(&s)
                .map_err(|e| e.to_string())?;
            let z = (est.p_hat - exact) / std_err_at(exact, MC_TRIALS);
            println!(
                "    {snr:>4} dB  p_ex={p_ex:<5} exact={exact:.6e}  mc={:.6e} ({} outages)  z={z:+.2}",
                est.p_hat, est.outages
            );
            worst = worst.max(z.abs());
            if !est.agrees_with(exact, MC_SIGMAS) {
                failures.push(format!("{snr} dB / p_ex {p_ex}: z = {z:.2}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!(
            "12 cells x 1e7 trials, max |z| = {worst:.2} <= {MC_SIGMAS}"
        ))
    } else {
        Err(failures.join("; "))
    }
}

/// Criterion 2: closed form within 10% of exact for SNR >= 25 dB on the grid, with the
/// relative error decreasing in SNR there.
fn closed_form_fidelity() -> Outcome {
    let mut notes = Vec::new();
    for p_ex in GRID_PEX {
        let errors: Vec<(f64, f64)> = GRID_SNR_DB
            .iter()
            .filter(|&&snr| snr >= 25.0)
            .map(|&snr| {
                let s = at(snr, p_ex);
                let exact = coop_outage_exact(&s);
                (snr, (coop_outage_closed_form(&s) - exact).abs() / exact)
            })
            .collect();
        if let Some(&(snr, e)) = errors.iter().find(|(_, e)| *e > CLOSED_FORM_REL_TOL) {
            return Err(format!("p_ex {p_ex}: relative error {e:.3e} at {snr} dB"));
        }
        if errors.windows(2).any(|w| w[1].1 > w[0].1) {
            return Err(format!(
                "p_ex {p_ex}: relative error not decreasing: {errors:?}"
            ));
        }
        notes.push(format!(
            "p_ex={p_ex}: {:.2e}",
            errors.last().map_or(0.0, |e| e.1)
        ));
    }
    // Also bound the error on a finer scan above 25 dB.
    for p_ex in GRID_PEX {
        for snr in (25..=60).step_by(5).map(f64::from) {
            let s = at(snr, p_ex);
            let exact = coop_outage_exact(&s);
            let e = (coop_outage_closed_form(&s) - exact).abs() / exact;
            if e > CLOSED_FORM_REL_TOL {
                return Err(format!("p_ex {p_ex}: relative error {e:.3e} at {snr} dB"));
            }
        }
    }
    Ok(format!(
        "relative error at 30 dB {}; <= 10% over 25-60 dB",
        notes.join(", ")
    ))
}

/// Criterion 3: an order-of-magnitude improvement at 20 dB with p_ex = 0.1.
fn order_of_magnitude_claim() -> Outcome {
    let s = at(20.0, 0.1);
    let gain = multiplicative_gain(&s);
    if !(0.09..=0.12).contains(&gain) {
        return Err(format!(
            "multiplicative gain {gain:.5} outside [0.09, 0.12]"
        ));
    }
    // same seed for both runs: common random numbers
    let mc = MonteCarlo::new(MC_TRIALS, SEED);
    let coop = mc.estimate(&s).map_err(|e| e.to_string())?;
    let direct = mc
        .estimate(&s.with_p_ex(1.0).unwrap())
        .map_err(|e| e.to_string())?;
    let ratio = coop.p_hat / direct.p_hat;
    if !(0.08..=0.13).contains(&ratio) {
        return Err(format!("MC ratio {ratio:.5} outside [0.08, 0.13]"));
    }
    Ok(format!(
        "gain {gain:.5} in [0.09, 0.12], MC ratio {ratio:.5} in [0.08, 0.13]"
    ))
}

/// Criterion 4: fitted diversity over analytic-exact points at 30-50 dB.
fn diversity_reproduction() -> Outcome {
    let spec = SweepSpec::defaults(Mode::Diversity);
    let snrs = spec.snr_db_range.values();
    let mut report = Vec::new();
    for p_ex in GRID_PEX {
        let points: Vec<_> = snrs
            .iter()
            .map(|&db| {
                let s = at(db, p_ex);
                (s.snr_s(), coop_outage_exact(&s))
            })
            .collect();
        let fit = diversity_fit(&points).map_err(|e| e.to_string())?;
        let (lo, hi) = if p_ex == 0.0 {
            (1.9, 2.1)
        } else {
            (0.85, 1.15)
        };
        if !(lo..=hi).contains(&fit.slope) {
            return Err(format!(
                "p_ex {p_ex}: slope {:.4} outside [{lo}, {hi}]",
                fit.slope
            ));
        }
        report.push(format!("p_ex={p_ex}: d={:.4}", fit.slope));
    }
    Ok(format!(
        "{} points per curve over {:?} dB; {}",
        snrs.len(),
        (snrs[0], snrs[snrs.len() - 1]),
        report.join(", ")
    ))
}

/// Criterion 5: p_ex = 1 reduces to direct transmission, in both the exact and
/// closed forms.
fn degeneracy_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0;
    for i in 0..1000 {
        let params = SystemParams {
            p_s: 10f64.powf(rng.random_range(-3.0..8.0)),
            p_r: 10f64.powf(rng.random_range(-3.0..8.0)),
            noise: 10f64.powf(rng.random_range(-4.0..2.0)),
            bandwidth: 10f64.powf(rng.random_range(3.0..9.0)),
            rate_min: 1.0,
        };
        let params = SystemParams {
            rate_min: params.bandwidth * rng.random_range(0.001..4.0),
            ..params
        };
        let s = validate(params, EnergyModel::new(1.0)).map_err(|e| e.to_string())?;
        let d = ulps(coop_outage_exact(&s), direct_outage_exact(&s));
        worst = worst.max(d);
        if d > 4 {
            return Err(format!(
                "set {i}: coop(p_ex=1) differs from direct by {d} ulps"
            ));
        }
        let equal = validate(
            SystemParams {
                p_r: params.p_s,
                ..params
            },
            EnergyModel::new(1.0),
        )
        .unwrap();
        let rho = equal.snr_s();
        let g1 = equal.direct_threshold();
        if g1 / rho <= 1.0 && coop_outage_closed_form(&equal) != g1 / rho {
            return Err(format!("set {i}: closed form at p_ex=1 is not g1/rho"));
        }
    }
    Ok(format!(
        "1000 random parameter sets, max {worst} ulps; closed form == g1/rho exactly"
    ))
}

/// Criterion 6: K1 against the extended-precision table, and the relay CDF's
/// cancellation guard at 60 dB.
fn special_function() -> Outcome {
    let mut worst = (0.0, 0.0);
    let mut n = 0;
    for line in K1_TABLE.lines().skip(1) {
        let (x, k) = line.split_once(',').ok_or("malformed table")?;
        let x: f64 = x.parse().map_err(|_| "bad x")?;
        let k: f64 = k.parse().map_err(|_| "bad K1")?;
        let got = bessel_k1(x).map_err(|e| e.to_string())?;
        let rel = ((got - k) / k).abs();
        if rel > worst.1 {
            worst = (x, rel);
        }
        n += 1;
    }
    if n != 1000 || worst.1 > K1_REL_TOL {
        return Err(format!(
            "{n} points, worst relative error {:.3e} at x = {}",
            worst.1, worst.0
        ));
    }

    let s = at(60.0, 0.0);
    let mut prev = 0.0;
    for i in 0..=400 {
        let z = 10f64.powf(-8.0 + 0.025 * i as f64);
        let p = relay_cdf(z, &s).map_err(|e| e.to_string())?;
        if p.is_nan() || p <= 0.0 || p < prev {
            return Err(format!(
                "relay CDF at 60 dB not positive/monotone at z = {z:e}: {p:e} after {prev:e}"
            ));
        }
        prev = p;
    }
    // mpmath, 40 digits
    let reference = 2.974_016_608_899_636_2e-7;
    let rel = (relay_outage_exact(&s) / reference - 1.0).abs();
    if rel > 1e-10 {
        return Err(format!("relay outage at 60 dB off by {rel:.2e}"));
    }
    Ok(format!(
        "K1 worst rel. error {:.2e} over 1000 points; relay CDF at 60 dB positive, monotone, rel. error {rel:.1e}",
        worst.1
    ))
}

/// Criterion 7: figure shapes and byte-identical seeded CSV.
fn figure_reproduction() -> Outcome {
    let snr = run_snr_sweep(&SweepSpec::defaults(Mode::SnrSweep)).map_err(|e| e.to_string())?;
    if snr.rows.len() != 32 {
        return Err(format!("sweep-snr produced {} rows", snr.rows.len()));
    }
    for chunk in snr.rows.chunks(4) {
        let order: Vec<f64> = chunk.iter().map(|r| r.p_ex).collect();
        if order != [1.0, 0.1, 0.01, 0.0] {
            return Err(format!("unexpected p_ex order {order:?}"));
        }
        if !chunk
            .windows(2)
            .all(|w| w[0].p_coop_exact > w[1].p_coop_exact)
        {
            return Err(format!(
                "curves not strictly ordered at {} dB",
                chunk[0].snr_db
            ));
        }
    }

    let pex = run_pex_sweep(&SweepSpec::defaults(Mode::PexSweep)).map_err(|e| e.to_string())?;
    let refs = pex.references.ok_or("sweep-pex has no reference lines")?;
    if !pex
        .rows
        .windows(2)
        .all(|w| w[0].p_ex < w[1].p_ex && w[0].p_coop_exact <= w[1].p_coop_exact)
    {
        return Err("sweep-pex not monotone in p_ex".into());
    }
    let (first, last) = (pex.rows[0], pex.rows[pex.rows.len() - 1]);
    if first.p_ex != 0.0 || first.p_coop_exact != refs.constant_power {
        return Err(format!(
            "low endpoint {first:?} misses constant-power line {}",
            refs.constant_power
        ));
    }
    if last.p_ex != 1.0 || last.p_coop_exact != refs.direct {
        return Err(format!(
            "high endpoint {last:?} misses direct line {}",
            refs.direct
        ));
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |sub: &str, out: &Path, workers: &str| -> Result<Vec<u8>, String> {
        let status = Command::new(env!("CARGO_BIN_EXE_ehrelay"))
            .args([sub, "--seed", "5", "--workers", workers, "--out-dir"])
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("{sub} exited with {:?}", status.status.code()));
        }
        let stem = if sub == "sweep-snr" {
            "sweep_snr"
        } else {
            "sweep_pex"
        };
        std::fs::read(out.join(format!("{stem}.csv"))).map_err(|e| e.to_string())
    };
    for sub in ["sweep-snr", "sweep-pex"] {
        let a = run(sub, &dir.path().join("a"), "1")?;
        let b = run(sub, &dir.path().join("b"), "3")?;
        if a != b {
            return Err(format!("{sub}: repeated seeded runs differ"));
        }
    }
    Ok("sweep-snr strictly ordered 1 > 0.1 > 0.01 > 0 at all 8 SNRs; sweep-pex monotone, endpoints on both reference lines; CSV byte-identical across runs".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 closed-form fidelity", closed_form_fidelity),
        ("3 order-of-magnitude gain", order_of_magnitude_claim),
        ("4 diversity reproduction", diversity_reproduction),
        ("5 degeneracy identities", degeneracy_identities),
        ("6 special function", special_function),
        ("7 figure reproduction", figure_reproduction),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
