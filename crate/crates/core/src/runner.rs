//! Closed-loop execution, trace files and controller/observer comparisons.
//!
//! Each step samples the reference and disturbance at `t`, lets the
//! controller act on the observer's current estimate, advances the observer
//! with the input actually applied, and integrates the plant to `t + dt`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ObserverKind, RunConfig};
use crate::controllers::TransformedError;
use crate::error::{Error, Result};
use crate::metrics::{convergence_time, summarize, ErrorSummary};
use crate::observers::EsoGains;
use crate::sim::{integrate_step, wrap_angle};

/// One decimated sample of a closed-loop run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub xd: f64,
    pub yd: f64,
    pub v: f64,
    pub omega: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub dhat1: f64,
    pub dhat2: f64,
    pub dhat3: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    pub beta_hat: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub violation_flag: u8,
}

/// An error on or outside its envelope before clamping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViolationEvent {
    pub t: f64,
    /// 1-based axis index.
    pub axis: usize,
    pub error: f64,
    pub bound: f64,
}

/// Full-rate error and estimate history.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepSeries {
    pub t: Vec<f64>,
    pub e: Vec<[f64; 3]>,
    pub d: Vec<[f64; 3]>,
    pub d_hat: Vec<[f64; 3]>,
    pub violation: Vec<bool>,
}

impl StepSeries {
    pub fn error_axis(&self, axis: usize) -> Vec<f64> {
        self.e.iter().map(|e| e[axis]).collect()
    }

    /// `d − d̂` on one channel.
    pub fn estimation_error(&self, axis: usize) -> Vec<f64> {
        self.d
            .iter()
            .zip(&self.d_hat)
            .map(|(d, h)| d[axis] - h[axis])
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub label: String,
    pub trace: Vec<TraceRow>,
    /// Statistics of `e₁` over every step.
    pub summary_x: ErrorSummary,
    /// Statistics of `e₂` over every step.
    pub summary_y: ErrorSummary,
    pub events: Vec<ViolationEvent>,
    pub series: StepSeries,
}

impl RunResult {
    pub fn trace_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_trace_csv(&self.trace, &mut buf)?;
        Ok(buf)
    }
}

/// Runs one closed-loop simulation.
pub fn run_scenario(cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let profile = cfg.disturbance_profile()?;
    let reference = &cfg.scenario.reference;
    let dt = cfg.sim.dt;
    let n = cfg.sim.step_count();
    let decimation = cfg.output.decimation;

    let mut controller = cfg.build_controller();
    let mut observer = cfg.build_observer();
    let mut q = cfg.sim.initial_pose;

    let mut trace = Vec::with_capacity(n / decimation + 2);
    let mut events = Vec::new();
    let mut series = StepSeries::default();

    for k in 0..=n {
        let t = k as f64 * dt;
        let r = reference.sample(t);
        let d = profile.sample(t);
        observer.observe_truth(d);
        let d_hat = observer.estimate();

        let step = controller.control(t, &q, &r, &d_hat, dt);
        let u = step.u.saturate(&cfg.sim.limits);
        if !(u.v.is_finite() && u.omega.is_finite()) {
            return Err(Error::Diverged { t });
        }

        let e = [q.x - r.xd, q.y - r.yd, wrap_angle(q.theta - step.varphi)];
        let te = TransformedError::evaluate(t, e, &cfg.envelope);
        for axis in 0..3 {
            if te.violation[axis] {
                events.push(ViolationEvent {
                    t,
                    axis: axis + 1,
                    error: e[axis],
                    bound: cfg.envelope.eps[axis] * te.rho[axis],
                });
            }
        }
        series.t.push(t);
        series.e.push(e);
        series.d.push([d.d1, d.d2, d.d3]);
        series.d_hat.push([d_hat.d1, d_hat.d2, d_hat.d3]);
        series.violation.push(te.any_violation());

        if k % decimation == 0 {
            let sigma = observer.residual(&q);
            trace.push(TraceRow {
                t,
                x: q.x,
                y: q.y,
                theta: q.theta,
                xd: r.xd,
                yd: r.yd,
                v: u.v,
                omega: u.omega,
                e1: e[0],
                e2: e[1],
                e3: e[2],
                d1: d.d1,
                d2: d.d2,
                d3: d.d3,
                dhat1: d_hat.d1,
                dhat2: d_hat.d2,
                dhat3: d_hat.d3,
                eta1: te.eta[0],
                eta2: te.eta[1],
                eta3: te.eta[2],
                rho1: te.rho[0],
                rho2: te.rho[1],
                rho3: te.rho[2],
                beta_hat: observer.beta_hat(),
                sigma1: sigma[0],
                sigma2: sigma[1],
                sigma3: sigma[2],
                violation_flag: te.any_violation() as u8,
            });
        }

        if k == n {
            break;
        }
        observer.update(&q, &u, dt).map_err(|err| match err {
            Error::NonFinite(_) => Error::ObserverDiverged { t },
            other => other,
        })?;
        q = integrate_step(&q, &u, |s| profile.sample(s), t, dt, cfg.sim.integrator)?;
    }

    Ok(RunResult {
        label: cfg.label(),
        summary_x: summarize(&series.error_axis(0))?,
        summary_y: summarize(&series.error_axis(1))?,
        trace,
        events,
        series,
    })
}

/// Written as the first line of every trace file.
pub const TRACE_VERSION_LINE: &str = "# atcr trace v1";

/// Version line, header row, then one line per sample. Floats use the
/// shortest representation that reads back to the same value.
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> Result<()> {
    writeln!(out, "{TRACE_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace; lines starting with `#` are skipped.
pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn read_trace_file(path: &Path) -> Result<Vec<TraceRow>> {
    read_trace_csv(std::fs::File::open(path)?)
}

/// Summaries of `e₁`, `e₂` from a trace, ignoring rows before `skip` seconds.
pub fn summarize_trace(rows: &[TraceRow], skip: f64) -> Result<(ErrorSummary, ErrorSummary)> {
    let kept: Vec<&TraceRow> = rows.iter().filter(|r| r.t >= skip).collect();
    let ex: Vec<f64> = kept.iter().map(|r| r.e1).collect();
    let ey: Vec<f64> = kept.iter().map(|r| r.e2).collect();
    Ok((summarize(&ex)?, summarize(&ey)?))
}

/// How observer runs are scored against each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverScoring {
    /// Settling band as a fraction of each channel's peak `|d|`.
    pub band_fraction: f64,
    /// Start of the steady-state window, seconds.
    pub steady_from: f64,
}

impl Default for ObserverScoring {
    fn default() -> Self {
        Self {
            band_fraction: 0.05,
            steady_from: 10.0,
        }
    }
}

/// Estimation quality of one observer run, per channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObserverSummary {
    pub label: String,
    /// Time after which `|d − d̂|` stays inside the band; `None` if never.
    pub settling: [Option<f64>; 3],
    pub band: [f64; 3],
    pub steady_rms: [f64; 3],
    pub steady_max: [f64; 3],
}

impl ObserverSummary {
    pub fn from_series(
        label: &str,
        series: &StepSeries,
        scoring: &ObserverScoring,
    ) -> Result<Self> {
        let mut settling = [None; 3];
        let mut band = [0.0; 3];
        let mut steady_rms = [0.0; 3];
        let mut steady_max = [0.0; 3];
        let start = series.t.partition_point(|t| *t < scoring.steady_from);
        for axis in 0..3 {
            let err = series.estimation_error(axis);
            let peak = series.d.iter().map(|d| d[axis].abs()).fold(0.0, f64::max);
            band[axis] = scoring.band_fraction * peak;
            settling[axis] = convergence_time(&series.t, &err, band[axis]);
            let s = summarize(&err[start.min(err.len() - 1)..])?;
            steady_rms[axis] = s.rms;
            steady_max[axis] = s.max_abs;
        }
        Ok(Self {
            label: label.to_string(),
            settling,
            band,
            steady_rms,
            steady_max,
        })
    }

    /// RMS of the steady-state estimation error over all channels.
    pub fn steady_rms_total(&self) -> f64 {
        (self.steady_rms.iter().map(|r| r * r).sum::<f64>() / 3.0).sqrt()
    }
}

/// Steady RMS of `d − d̂` over the two position channels.
///
/// The heading channel is left out of matching: its disturbance is constant
/// and a linear observer reconstructs it exactly at any bandwidth.
pub fn position_channel_rms(summary: &ObserverSummary) -> f64 {
    ((summary.steady_rms[0].powi(2) + summary.steady_rms[1].powi(2)) / 2.0).sqrt()
}

/// Finds the uniform ESO bandwidth whose closed-loop steady estimation error
/// on the position channels equals `target`, by bisection on `ln ω_o`.
///
/// `base` supplies everything but the observer block. Returns the bandwidth
/// and the summary of the run at that bandwidth.
pub fn match_eso_bandwidth(
    base: &RunConfig,
    target: f64,
    bracket: (f64, f64),
    scoring: &ObserverScoring,
) -> Result<(f64, ObserverSummary)> {
    let run_at = |w: f64| -> Result<ObserverSummary> {
        let mut cfg = base.clone();
        cfg.observer.kind = ObserverKind::Eso;
        cfg.observer.eso = EsoGains::uniform(w);
        let run = run_scenario(&cfg)?;
        ObserverSummary::from_series("eso", &run.series, scoring)
    };
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(
            "ESO bandwidth bracket must satisfy 0 < lo < hi".into(),
        ));
    }
    let mut best = None;
    // Steady error falls monotonically with bandwidth.
    for _ in 0..48 {
        let w = (lo * hi).sqrt();
        let s = run_at(w)?;
        if position_channel_rms(&s) > target {
            lo = w;
        } else {
            hi = w;
        }
        best = Some((w, s));
        if hi / lo < 1.0 + 1e-6 {
            break;
        }
    }
    Ok(best.expect("at least one bisection step"))
}

/// Table-1 style row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControllerRow {
    pub label: String,
    pub x: ErrorSummary,
    pub y: ErrorSummary,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub controllers: Vec<ControllerRow>,
    pub observers: Vec<ObserverSummary>,
    pub runs: Vec<RunResult>,
}

/// A named configuration variant.
#[derive(Debug, Clone)]
pub struct Variant {
    pub name: String,
    pub config: RunConfig,
    /// Whether this run contributes an observer row.
    pub score_observer: bool,
}

/// Runs all variants (concurrently) and tabulates them.
pub fn compare(variants: &[Variant], scoring: &ObserverScoring) -> Result<Comparison> {
    let results: Vec<Result<RunResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = variants
            .iter()
            .map(|v| scope.spawn(move || run_scenario(&v.config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });

    let mut controllers = Vec::new();
    let mut observers = Vec::new();
    let mut runs = Vec::new();
    for (variant, result) in variants.iter().zip(results) {
        let mut run = result?;
        run.label = variant.name.clone();
        controllers.push(ControllerRow {
            label: variant.name.clone(),
            x: run.summary_x,
            y: run.summary_y,
        });
        if variant.score_observer {
            observers.push(ObserverSummary::from_series(
                &variant.name,
                &run.series,
                scoring,
            )?);
        }
        runs.push(run);
    }
    Ok(Comparison {
        controllers,
        observers,
        runs,
    })
}

/// Aligned plain-text table: one row per controller, x and y column groups.
pub fn format_error_table(rows: &[ControllerRow]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:<14}| {:^26} | {:^26}\n",
        "Method", "x-axis (m)", "y-axis (m)"
    ));
    s.push_str(&format!(
        "{:<14}| {:>8} {:>8} {:>8} | {:>8} {:>8} {:>8}\n",
        "", "RMS", "MAX", "MEAN", "RMS", "MAX", "MEAN"
    ));
    s.push_str(&format!("{}\n", "-".repeat(72)));
    for r in rows {
        s.push_str(&format!(
            "{:<14}| {:>8.4} {:>8.4} {:>8.4} | {:>8.4} {:>8.4} {:>8.4}\n",
            r.label, r.x.rms, r.x.max_abs, r.x.mean_abs, r.y.rms, r.y.max_abs, r.y.mean_abs
        ));
    }
    s
}

pub fn write_error_table_csv<W: Write>(rows: &[ControllerRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method", "x_rms", "x_max", "x_mean", "y_rms", "y_max", "y_mean",
    ])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.x.rms.to_string(),
            r.x.max_abs.to_string(),
            r.x.mean_abs.to_string(),
            r.y.rms.to_string(),
            r.y.max_abs.to_string(),
            r.y.mean_abs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "never".into())
}

pub fn format_observer_table(rows: &[ObserverSummary]) -> String {
    let mut s = format!(
        "{:<14}| {:^29} | {:^29}\n",
        "Observer", "5% settling time (s)", "steady RMS of d - d_hat"
    );
    s.push_str(&format!(
        "{:<14}| {:>9} {:>9} {:>9} | {:>9} {:>9} {:>9}\n",
        "", "d1", "d2", "d3", "d1", "d2", "d3"
    ));
    s.push_str(&format!("{}\n", "-".repeat(76)));
    let cell = |v: Option<f64>| {
        v.map(|x| format!("{x:>9.3}"))
            .unwrap_or_else(|| format!("{:>9}", "never"))
    };
    for r in rows {
        s.push_str(&format!(
            "{:<14}| {} {} {} | {:>9.5} {:>9.5} {:>9.5}\n",
            r.label,
            cell(r.settling[0]),
            cell(r.settling[1]),
            cell(r.settling[2]),
            r.steady_rms[0],
            r.steady_rms[1],
            r.steady_rms[2]
        ));
    }
    s
}

pub fn write_observer_table_csv<W: Write>(rows: &[ObserverSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "observer",
        "settle_d1",
        "settle_d2",
        "settle_d3",
        "rms_d1",
        "rms_d2",
        "rms_d3",
    ])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            opt(r.settling[0]),
            opt(r.settling[1]),
            opt(r.settling[2]),
            r.steady_rms[0].to_string(),
            r.steady_rms[1].to_string(),
            r.steady_rms[2].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
