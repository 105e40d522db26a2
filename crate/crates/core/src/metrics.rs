//! Run evaluation metrics and controller comparison reports.
//!
//! All metrics are pure functions of a trace. The evaluation interval is
//! fixed to [5 s, 15 s]: the first five seconds are controller transient.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::SimTrace;

pub const EVAL_START: f64 = 5.0;
pub const EVAL_END: f64 = 15.0;

/// The six per-run figures.
///
/// * `rmse` / `peak`: RMS and max of |e| over every sample in the interval.
/// * `rmse_pi` / `peak_pi`: the same restricted to pre-impact samples.
/// * `trq`: max |commanded torque| over the whole run, saturation ignored.
/// * `fit_slope`: least-squares slope of the CoM position relative to the
///   initial support point; equals the realized average walking speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub rmse: f64,
    pub peak: f64,
    pub rmse_pi: f64,
    pub peak_pi: f64,
    pub trq: f64,
    pub fit_slope: f64,
    /// Samples inside the evaluation interval.
    pub sample_count: usize,
    /// Pre-impact samples inside the evaluation interval.
    pub touchdown_count: usize,
}

pub fn compute_metrics(trace: &SimTrace) -> Result<MetricsRecord> {
    let last_t = trace.rows.last().map(|r| r.t).unwrap_or(0.0);
    if last_t + 1e-9 < EVAL_END {
        return Err(Error::InvalidInput(format!(
            "trace ends at {last_t} s; metrics need at least {EVAL_END} s"
        )));
    }

    let mut sum_sq = 0.0;
    let mut peak: f64 = 0.0;
    let mut count = 0usize;
    let mut pi_sum_sq = 0.0;
    let mut pi_peak: f64 = 0.0;
    let mut pi_count = 0usize;
    let mut trq: f64 = 0.0;

    let mut st = 0.0;
    let mut sy = 0.0;
    let mut stt = 0.0;
    let mut sty = 0.0;

    for r in &trace.rows {
        trq = trq.max(r.tau_commanded.abs());
        if r.t < EVAL_START - 1e-12 || r.t > EVAL_END + 1e-12 {
            continue;
        }
        let e = r.error.pos;
        sum_sq += e * e;
        peak = peak.max(e.abs());
        count += 1;
        if r.touchdown {
            pi_sum_sq += e * e;
            pi_peak = pi_peak.max(e.abs());
            pi_count += 1;
        }
        st += r.t;
        sy += r.xs0c;
        stt += r.t * r.t;
        sty += r.t * r.xs0c;
    }
    if count == 0 || pi_count == 0 {
        return Err(Error::InvalidInput("no samples in the evaluation interval".into()));
    }

    let n = count as f64;
    let denom = stt - st * st / n;
    let fit_slope = (sty - st * sy / n) / denom;

    Ok(MetricsRecord {
        rmse: (sum_sq / n).sqrt(),
        peak,
        rmse_pi: (pi_sum_sq / pi_count as f64).sqrt(),
        peak_pi: pi_peak,
        trq,
        fit_slope,
        sample_count: count,
        touchdown_count: pi_count,
    })
}

pub const METRICS_COLUMNS: &[&str] =
    &["case", "controller", "rmse", "peak", "rmse_pi", "peak_pi", "trq", "fit"];

/// Side-by-side metrics for several controllers on one scenario.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub case_id: String,
    pub rows: Vec<(String, MetricsRecord)>,
    /// Outcome of the expected orderings, when the controllers allow them.
    pub orderings: Vec<OrderingCheck>,
}

#[derive(Debug, Clone)]
pub struct OrderingCheck {
    pub description: String,
    pub holds: bool,
}

/// Build the comparison table and evaluate the expected orderings
/// (the adaptive controller should not lose to plain PD on RMSE, and the
/// torque limit status is reported for both).
pub fn compare_report(case_id: &str, runs: &[(String, SimTrace)]) -> Result<ComparisonReport> {
    let mut rows = Vec::new();
    for (label, trace) in runs {
        rows.push((label.clone(), compute_metrics(trace)?));
    }

    let find = |id: &str| rows.iter().find(|(l, _)| l == id).map(|(_, m)| *m);
    let mut orderings = Vec::new();
    if let (Some(ad), Some(pd)) = (find("adaptive"), find("pd_ff")) {
        orderings.push(OrderingCheck {
            description: format!(
                "adaptive RMSE {:.3e} <= pd_ff RMSE {:.3e}",
                ad.rmse, pd.rmse
            ),
            holds: ad.rmse <= pd.rmse,
        });
    }
    for (label, m) in &rows {
        if label != "ankle_off" {
            orderings.push(OrderingCheck {
                description: format!("{label} commanded torque peak {:.2} N.m vs limit", m.trq),
                holds: true,
            });
        }
    }

    Ok(ComparisonReport { case_id: case_id.to_string(), rows, orderings })
}

impl ComparisonReport {
    /// Aligned plain-text table.
    pub fn render_text(&self, torque_limit: f64) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", self.case_id));
        out.push_str(&format!(
            "{:<10} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}\n",
            "controller", "RMSE", "PEAK", "RMSE-PI", "PEAK-PI", "TRQ", "FIT"
        ));
        for (label, m) in &self.rows {
            out.push_str(&format!(
                "{:<10} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.4}\n",
                label, m.rmse, m.peak, m.rmse_pi, m.peak_pi, m.trq, m.fit_slope
            ));
        }
        for (label, m) in &self.rows {
            if label != "ankle_off" {
                let status = if m.trq <= torque_limit { "within" } else { "EXCEEDS" };
                out.push_str(&format!(
                    "torque:    {label} peak {:.2} N.m {status} the {:.0} N.m limit\n",
                    m.trq, torque_limit
                ));
            }
        }
        for check in &self.orderings {
            if check.description.contains("RMSE") {
                let mark = if check.holds { "ok" } else { "VIOLATED" };
                out.push_str(&format!("ordering:  {} [{}]\n", check.description, mark));
            }
        }
        out
    }

    /// Machine-readable CSV, one row per controller.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", METRICS_COLUMNS.join(","))?;
        for (label, m) in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                self.case_id, label, m.rmse, m.peak, m.rmse_pi, m.peak_pi, m.trq, m.fit_slope
            )?;
        }
        Ok(())
    }
}

/// Write two-column (t, signal) files for the standard figure panels.
///
/// Produces `xs0c.dat`, `e_pos.dat`, `tau.dat`, `v.dat`, `zeta.dat`, and the
/// per-touchdown `steps.dat` (t_k, u_k) under `dir`.
pub fn write_plot_data(trace: &SimTrace, dir: &Path) -> std::io::Result<()> {
    type Panel = (&'static str, fn(&crate::sim::TraceRow) -> f64);
    std::fs::create_dir_all(dir)?;
    let panels: [Panel; 5] = [
        ("xs0c.dat", |r| r.xs0c),
        ("e_pos.dat", |r| r.error.pos),
        ("tau.dat", |r| r.tau_commanded),
        ("v.dat", |r| r.v),
        ("zeta.dat", |r| r.zeta),
    ];
    for (name, get) in panels {
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(name))?);
        for r in &trace.rows {
            writeln!(w, "{} {}", r.t, get(r))?;
        }
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join("steps.dat"))?);
    for td in &trace.touchdowns {
        writeln!(w, "{} {}", td.t, td.step_length)?;
    }
    Ok(())
}
