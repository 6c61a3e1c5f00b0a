//! CSV tables, SVG charts and gnuplot scripts for sweep results.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::Mode;
use crate::error::{CliError, Result};
use crate::svg::{LineChart, RefLine, Series, Style};
use crate::sweep::{DiversityRow, SweepResult, SweepRow};

pub const CSV_HEADER: [&str; 11] = [
    "snr_db",
    "p_ex",
    "p_direct_exact",
    "p_coop_exact",
    "p_coop_closed",
    "p_mc",
    "mc_se",
    "mc_ci_lo",
    "mc_ci_hi",
    "trials",
    "seed",
];

pub const DIVERSITY_HEADER: [&str; 7] = [
    "p_ex",
    "source",
    "predicted",
    "slope",
    "intercept",
    "points_used",
    "residual_rms",
];

/// 17 significant digits: enough to round-trip any f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn stem(mode: Mode) -> &'static str {
    match mode {
        Mode::SnrSweep => "sweep_snr",
        Mode::PexSweep => "sweep_pex",
        Mode::SinglePoint => "eval",
        Mode::Diversity => "diversity",
    }
}

fn record(row: &SweepRow) -> [String; 11] {
    [
        format_float(row.snr_db),
        format_float(row.p_ex),
        format_float(row.p_direct_exact),
        format_float(row.p_coop_exact),
        format_float(row.p_coop_closed),
        format_float(row.p_mc),
        format_float(row.mc_se),
        format_float(row.mc_ci_lo),
        format_float(row.mc_ci_hi),
        row.trials.to_string(),
        row.seed.to_string(),
    ]
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(CliError::Validation(format!(
            "unexpected CSV header: {:?}",
            r.headers()?
        )));
    }
    let bad = |field: &str, e: &dyn std::fmt::Display| {
        CliError::Validation(format!("bad CSV field `{field}`: {e}"))
    };
    r.records()
        .map(|rec| {
            let rec = rec?;
            let f = |i: usize| -> Result<f64> { rec[i].parse().map_err(|e| bad(&rec[i], &e)) };
            let n = |i: usize| -> Result<u64> { rec[i].parse().map_err(|e| bad(&rec[i], &e)) };
            Ok(SweepRow {
                snr_db: f(0)?,
                p_ex: f(1)?,
                p_direct_exact: f(2)?,
                p_coop_exact: f(3)?,
                p_coop_closed: f(4)?,
                p_mc: f(5)?,
                mc_se: f(6)?,
                mc_ci_lo: f(7)?,
                mc_ci_hi: f(8)?,
                trials: n(9)?,
                seed: n(10)?,
            })
        })
        .collect()
}

pub fn write_diversity_csv<W: Write>(rows: &[DiversityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIVERSITY_HEADER)?;
    for r in rows {
        w.write_record([
            format_float(r.p_ex),
            r.source.name().to_string(),
            r.predicted.to_string(),
            format_float(r.fit.slope),
            format_float(r.fit.intercept),
            r.fit.points_used.to_string(),
            format_float(r.fit.residual_rms),
        ])?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

/// What to write next to the CSV.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Extras {
    pub svg: bool,
    pub script: bool,
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes `<stem>.csv` and, on request, `<stem>.svg` and `<stem>.gp` into
/// `dir`. An empty table writes nothing.
pub fn emit_outputs(result: &SweepResult, dir: &Path, extras: Extras) -> Result<Vec<PathBuf>> {
    if result.rows.is_empty() {
        return Err(CliError::Validation(
            "refusing to write an empty table".into(),
        ));
    }
    prepare_dir(dir)?;
    let stem = stem(result.mode);
    let mut written = Vec::new();

    let mut buf = Vec::new();
    write_csv(&result.rows, &mut buf)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    write_file(&csv_path, &buf)?;
    written.push(csv_path);

    if extras.svg {
        if let Some(chart) = chart_for(result) {
            let path = dir.join(format!("{stem}.svg"));
            write_file(&path, chart.render().as_bytes())?;
            written.push(path);
        }
    }
    if extras.script {
        if let Some(script) = gnuplot_script(result) {
            let path = dir.join(format!("{stem}.gp"));
            write_file(&path, script.as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn emit_diversity(rows: &[DiversityRow], dir: &Path, extras: Extras) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(CliError::Validation(
            "refusing to write an empty table".into(),
        ));
    }
    prepare_dir(dir)?;
    let mut buf = Vec::new();
    write_diversity_csv(rows, &mut buf)?;
    let path = dir.join("diversity.csv");
    write_file(&path, &buf)?;
    let mut written = vec![path];
    if extras.svg {
        let path = dir.join("diversity.svg");
        write_file(&path, diversity_chart(rows).render().as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn pex_label(p: f64) -> String {
    if p == 0.0 || p == 1.0 {
        format!("p_ex = {p}")
    } else {
        format!("p_ex = {p:.0e}")
    }
}

/// Fig. 2 / Fig. 3 style charts; `None` for single-point runs.
pub fn chart_for(result: &SweepResult) -> Option<LineChart> {
    match result.mode {
        Mode::SnrSweep => {
            let mut chart = LineChart::new(
                "Outage probability vs SNR",
                "SNR (dB)",
                "Outage probability",
            );
            chart.log_y = true;
            for (i, p) in distinct(result.rows.iter().map(|r| r.p_ex))
                .into_iter()
                .enumerate()
            {
                let rows: Vec<_> = result.curve(p).collect();
                chart.series.push(Series::new(
                    format!("{} exact", pex_label(p)),
                    rows.iter().map(|r| (r.snr_db, r.p_coop_exact)).collect(),
                    Style::Line,
                    i,
                ));
                chart.series.push(Series::new(
                    format!("{} closed form", pex_label(p)),
                    rows.iter().map(|r| (r.snr_db, r.p_coop_closed)).collect(),
                    Style::Dashed,
                    i,
                ));
                chart.series.push(Series::new(
                    format!("{} Monte Carlo", pex_label(p)),
                    rows.iter().map(|r| (r.snr_db, r.p_mc)).collect(),
                    Style::Markers,
                    i,
                ));
            }
            Some(chart)
        }
        Mode::PexSweep => {
            let snr = result.rows[0].snr_db;
            let mut chart = LineChart::new(
                format!("Outage probability vs p_ex at {snr} dB"),
                "Energy-exhausted probability p_ex",
                "Outage probability",
            );
            chart.log_x = true;
            chart.log_y = true;
            let positive: Vec<_> = result.rows.iter().filter(|r| r.p_ex > 0.0).collect();
            chart.series.push(Series::new(
                "cooperative, exact",
                positive.iter().map(|r| (r.p_ex, r.p_coop_exact)).collect(),
                Style::Line,
                0,
            ));
            chart.series.push(Series::new(
                "cooperative, closed form",
                positive.iter().map(|r| (r.p_ex, r.p_coop_closed)).collect(),
                Style::Dashed,
                0,
            ));
            chart.series.push(Series::new(
                "cooperative, Monte Carlo",
                positive.iter().map(|r| (r.p_ex, r.p_mc)).collect(),
                Style::Markers,
                0,
            ));
            if let Some(refs) = result.references {
                chart.reference_lines.push(RefLine {
                    name: "direct transmission".into(),
                    y: refs.direct,
                    palette: 1,
                });
            }
            if let Some(refs) = result.references {
                chart.reference_lines.push(RefLine {
                    name: "constant power relay".into(),
                    y: refs.constant_power,
                    palette: 2,
                });
            }
            Some(chart)
        }
        Mode::SinglePoint | Mode::Diversity => None,
    }
}

fn diversity_chart(rows: &[DiversityRow]) -> LineChart {
    let mut chart = LineChart::new("Diversity fit window", "SNR (dB)", "Outage probability");
    chart.log_y = true;
    for (i, r) in rows.iter().enumerate() {
        chart.series.push(Series::new(
            format!(
                "{} (fit d = {:.3}, predicted {})",
                pex_label(r.p_ex),
                r.fit.slope,
                r.predicted
            ),
            r.points.clone(),
            Style::LineMarkers,
            i,
        ));
    }
    chart
}

/// A gnuplot script that plots the CSV it sits next to.
pub fn gnuplot_script(result: &SweepResult) -> Option<String> {
    let stem = stem(result.mode);
    let mut s = String::new();
    s.push_str("# gnuplot script; run `gnuplot ");
    s.push_str(stem);
    s.push_str(".gp` in this directory\n");
    s.push_str("set datafile separator ','\nset key autotitle columnhead\n");
    s.push_str(&format!(
        "set terminal svg size 800,560\nset output '{stem}_gnuplot.svg'\n"
    ));
    s.push_str(
        "set logscale y\nset format y '10^{%L}'\nset ylabel 'Outage probability'\nset grid\n",
    );
    match result.mode {
        Mode::SnrSweep => {
            s.push_str("set xlabel 'SNR (dB)'\n");
            let clauses: Vec<String> = distinct(result.rows.iter().map(|r| r.p_ex))
                .into_iter()
                .enumerate()
                .flat_map(|(i, p)| {
                    let p = format_float(p);
                    [
                        format!(
                            "'{stem}.csv' using 1:($2=={p} ? $4 : 1/0) with lines lc {} title 'p_ex={p} exact'",
                            i + 1
                        ),
                        format!(
                            "'{stem}.csv' using 1:($2=={p} ? $6 : 1/0) with points lc {} notitle",
                            i + 1
                        ),
                    ]
                })
                .collect();
            s.push_str("plot ");
            s.push_str(&clauses.join(", \\\n     "));
            s.push('\n');
        }
        Mode::PexSweep => {
            s.push_str("set logscale x\nset xlabel 'p_ex'\n");
            s.push_str(&format!(
                "plot '{stem}.csv' using ($2>0 ? $2 : 1/0):4 with lines title 'cooperative exact', \\\n     \
                 '{stem}.csv' using ($2>0 ? $2 : 1/0):6 with points title 'Monte Carlo', \\\n     \
                 '{stem}.csv' using ($2>0 ? $2 : 1/0):3 with lines dt 2 title 'direct'\n"
            ));
        }
        Mode::SinglePoint | Mode::Diversity => return None,
    }
    Some(s)
}
