//! Batch front-end: run scenarios, compare controllers, verify properties.
//!
//! Exit codes: 0 success, 2 configuration/scenario error, 3 divergence
//! (the partial trace is still written).

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use deckwalker::error::Error;
use deckwalker::metrics::{compare_report, compute_metrics, write_plot_data, MetricsRecord, METRICS_COLUMNS};
use deckwalker::scenario::Scenario;
use deckwalker::sim::{run_simulation, Controller, SimTrace};
use deckwalker::verify::{run_battery, VerifyOptions};

#[derive(Parser)]
#[command(name = "deckwalker", version, about = "Walking simulator on moving surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trace, metrics, summary, and plot data.
    Run {
        /// Scenario TOML file; omit to run the builtin defaults.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Builtin case id (case1|case2|case3) when no scenario file is given.
        #[arg(long, default_value = "case2", conflicts_with = "scenario")]
        case: String,
        /// Controller for the builtin scenario (pd_ff|adaptive|ankle_off).
        #[arg(long, default_value = "adaptive", conflicts_with = "scenario")]
        controller: String,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the measurement-noise seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run several controllers on one case and emit a comparison table.
    Compare {
        /// Builtin case id (case1|case2|case3).
        #[arg(long, default_value = "case2")]
        case: String,
        /// Comma-separated controllers to compare.
        #[arg(long, default_value = "pd_ff,adaptive", value_delimiter = ',')]
        controllers: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write the comparison as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the self-verification battery and report each property.
    Verify {
        /// Machine-readable JSON output.
        #[arg(long)]
        json: bool,
        /// Loosened Riccati iteration tolerance (negative-control hook).
        #[arg(long, hide = true)]
        dare_tol: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, case, controller, out, seed } => cmd_run(scenario, case, controller, out, seed),
        Command::Compare { case, controllers, out, json } => cmd_compare(case, controllers, out, json),
        Command::Verify { json, dare_tol } => cmd_verify(json, dare_tol),
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn cmd_run(
    scenario_path: Option<PathBuf>,
    case: String,
    controller: String,
    out: PathBuf,
    seed: Option<u64>,
) -> ExitCode {
    let scenario = match scenario_path {
        Some(p) => Scenario::load(&p),
        None => Controller::from_id(&controller)
            .ok_or_else(|| Error::Scenario(format!("unknown controller {controller:?}")))
            .and_then(|c| Scenario::builtin(&case, c)),
    };
    let scenario = match scenario {
        Ok(s) => s,
        Err(e) => return fail(2, e),
    };
    let mut built = match scenario.build() {
        Ok(b) => b,
        Err(e) => return fail(2, e),
    };
    if let Some(s) = seed {
        built.sim.seed = s;
    }
    if let Err(e) = std::fs::create_dir_all(&out) {
        return fail(2, format!("cannot create {}: {e}", out.display()));
    }

    let outcome = run_simulation(&built.sim, &built.spec, &built.planner, &built.pd, &built.adaptive);
    let (trace, diverged) = match outcome {
        Ok(t) => (t, None),
        Err(Error::Diverged { t, trace }) => (*trace, Some(t)),
        Err(e) => return fail(2, e),
    };

    if let Err(e) = write_run_outputs(&trace, &built, &out, diverged) {
        return fail(2, e);
    }
    match diverged {
        Some(t) => fail(3, format!("simulation diverged at t = {t} s (partial outputs written)")),
        None => {
            println!("run complete: outputs in {}", out.display());
            ExitCode::SUCCESS
        }
    }
}

fn write_run_outputs(
    trace: &SimTrace,
    built: &deckwalker::BuiltScenario,
    out: &Path,
    diverged: Option<f64>,
) -> Result<(), Error> {
    trace.save_csv(&out.join(&built.output.trace))?;
    write_plot_data(trace, &out.join(&built.output.plots))?;

    let metrics = if diverged.is_none() { compute_metrics(trace).ok() } else { None };
    if let Some(m) = &metrics {
        let mut text = format!("{}\n", METRICS_COLUMNS.join(","));
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            "custom",
            trace.controller.id(),
            m.rmse,
            m.peak,
            m.rmse_pi,
            m.peak_pi,
            m.trq,
            m.fit_slope
        ));
        std::fs::write(out.join(&built.output.metrics), text)?;
    }

    let mut summary = String::new();
    summary.push_str(&format!("controller: {}\n", trace.controller.id()));
    summary.push_str(&format!("duration:   {} s at {} Hz\n", trace.duration, trace.sample_rate));
    summary.push_str(&format!("touchdowns: {}\n", trace.touchdowns.len()));
    match diverged {
        Some(t) => summary.push_str(&format!("status:     DIVERGED at t = {t} s\n")),
        None => summary.push_str("status:     completed\n"),
    }
    if let Some(m) = &metrics {
        summary.push_str(&render_metrics(m, built.spec.torque_limit));
    }
    for w in &trace.warnings {
        summary.push_str(&format!("warning:    {w}\n"));
    }
    std::fs::write(out.join(&built.output.summary), &summary)?;
    print!("{summary}");
    Ok(())
}

fn render_metrics(m: &MetricsRecord, torque_limit: f64) -> String {
    let mut s = String::new();
    s.push_str(&format!("RMSE:       {:.3e} m\n", m.rmse));
    s.push_str(&format!("PEAK:       {:.3e} m\n", m.peak));
    s.push_str(&format!("RMSE-PI:    {:.3e} m\n", m.rmse_pi));
    s.push_str(&format!("PEAK-PI:    {:.3e} m\n", m.peak_pi));
    s.push_str(&format!(
        "TRQ:        {:.3e} N.m ({} limit {})\n",
        m.trq,
        if m.trq <= torque_limit { "within" } else { "EXCEEDS" },
        torque_limit
    ));
    s.push_str(&format!("FIT:        {:.4} m/s\n", m.fit_slope));
    s
}

fn cmd_compare(case: String, controllers: Vec<String>, out: PathBuf, json: bool) -> ExitCode {
    let controllers: Vec<String> =
        controllers.into_iter().filter(|c| !c.trim().is_empty()).collect();
    if controllers.is_empty() {
        return fail(2, "no controllers given");
    }
    let mut runs = Vec::new();
    let mut torque_limit = 40.0;
    for id in &controllers {
        let ctl = match Controller::from_id(id) {
            Some(c) => c,
            None => return fail(2, format!("unknown controller {id:?}")),
        };
        let built = match Scenario::builtin(&case, ctl).and_then(|s| s.build()) {
            Ok(b) => b,
            Err(e) => return fail(2, e),
        };
        torque_limit = built.spec.torque_limit;
        match run_simulation(&built.sim, &built.spec, &built.planner, &built.pd, &built.adaptive) {
            Ok(trace) => runs.push((id.clone(), trace)),
            Err(Error::Diverged { t, .. }) => {
                return fail(3, format!("{id} diverged at t = {t} s on {case}"))
            }
            Err(e) => return fail(2, e),
        }
    }

    let report = match compare_report(&case, &runs) {
        Ok(r) => r,
        Err(e) => return fail(2, e),
    };
    if let Err(e) = std::fs::create_dir_all(&out) {
        return fail(2, format!("cannot create {}: {e}", out.display()));
    }
    let text = report.render_text(torque_limit);
    print!("{text}");
    if let Err(e) = std::fs::write(out.join(format!("compare_{case}.txt")), &text) {
        return fail(2, e);
    }
    let csv_path = out.join(format!("compare_{case}.csv"));
    let file = match std::fs::File::create(&csv_path) {
        Ok(f) => f,
        Err(e) => return fail(2, e),
    };
    if let Err(e) = report.write_csv(std::io::BufWriter::new(file)) {
        return fail(2, e);
    }
    if json {
        let payload = comparison_json(&report);
        if let Err(e) = std::fs::write(out.join(format!("compare_{case}.json")), &payload) {
            return fail(2, e);
        }
        println!("{payload}");
    }
    ExitCode::SUCCESS
}

fn comparison_json(report: &deckwalker::ComparisonReport) -> String {
    let mut rows = Vec::new();
    for (label, m) in &report.rows {
        rows.push(format!(
            "{{\"controller\":\"{label}\",\"rmse\":{},\"peak\":{},\"rmse_pi\":{},\"peak_pi\":{},\"trq\":{},\"fit\":{}}}",
            m.rmse, m.peak, m.rmse_pi, m.peak_pi, m.trq, m.fit_slope
        ));
    }
    let orderings: Vec<String> = report
        .orderings
        .iter()
        .map(|o| format!("{{\"check\":{:?},\"holds\":{}}}", o.description, o.holds))
        .collect();
    format!(
        "{{\"case\":\"{}\",\"rows\":[{}],\"orderings\":[{}]}}",
        report.case_id,
        rows.join(","),
        orderings.join(",")
    )
}

fn cmd_verify(json: bool, dare_tol: Option<f64>) -> ExitCode {
    let mut opts = VerifyOptions::default();
    if let Some(t) = dare_tol {
        opts.dare_tolerance = t;
    }
    let checks = match run_battery(&opts) {
        Ok(c) => c,
        Err(e) => return fail(2, e),
    };
    let all_pass = checks.iter().all(|c| c.passed);
    if json {
        let items: Vec<String> = checks
            .iter()
            .map(|c| {
                format!(
                    "{{\"name\":\"{}\",\"passed\":{},\"detail\":{:?}}}",
                    c.name, c.passed, c.detail
                )
            })
            .collect();
        println!("{{\"all_passed\":{all_pass},\"checks\":[{}]}}", items.join(","));
    } else {
        for c in &checks {
            println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        println!(
            "{} of {} properties passed",
            checks.iter().filter(|c| c.passed).count(),
            checks.len()
        );
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
