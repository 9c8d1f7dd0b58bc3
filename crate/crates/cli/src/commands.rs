//! The five subcommands. Each returns the text destined for stdout and writes
//! any requested files itself, so partial output survives an escape abort.

use std::f64::consts::TAU;
use std::path::PathBuf;

use orbits_core::dynamics::{
    cm_orbit, cm_residual, initial_state_at_perihelion, integrate_relative, loop_radii,
    measure_apsidal_angle, spacing_variation, StepControl, Termination, Trajectory,
};
use orbits_core::potentials::{classify_boundedness, BoundednessReport, DEFAULT_TOL_MARGINAL};
use orbits_core::quadrature::{apsidal_angle_with, radial_period, QuadOptions};
use orbits_core::turning::{
    turning_points, well_structure, AllowedInterval, Classification, RadialDomain, WellStructure,
};
use orbits_core::units::Scales;
use orbits_core::OrbitError;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{config_err, CliError, Result};
use crate::output::{fmt_f64, to_sorted_json, write_file, Table};
use crate::svg;
use crate::sweep;

/// Radius cap for runs allowed to escape, relative to the start radius.
const HARD_STOP_FACTOR: f64 = 1e6;
const LOOP_WINDOW: usize = 5;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub allow_escape: bool,
    pub interval: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Cm,
    Turning,
    Simulate,
    Period,
    Sweep,
}

pub fn execute(cmd: Command, cfg: &RunConfig, opts: &Options) -> Result<String> {
    match cmd {
        Command::Cm => cmd_cm(cfg, opts),
        Command::Turning => cmd_turning(cfg).map(|r| to_sorted_json(&r)),
        Command::Simulate => cmd_simulate(cfg, opts),
        Command::Period => cmd_period(cfg, opts).map(|r| to_sorted_json(&r)),
        Command::Sweep => cmd_sweep(cfg, opts),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CmPoint {
    pub t: f64,
    pub xi_x: f64,
    pub xi_y: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CmSummary {
    pub center: (f64, f64),
    pub radius: f64,
    pub angular_rate: f64,
    pub max_residual: f64,
    pub n_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<CmPoint>>,
}

/// One revolution of the guiding-centre circle, sampled at equal times.
pub fn cm_points(cfg: &RunConfig) -> Result<(CmSummary, Vec<CmPoint>)> {
    let r = cfg.resolve()?;
    let (state, samples) =
        r.cm.ok_or_else(|| config_err("`cm` command needs a `cm` section"))?;
    let circle = cm_orbit(&state)?;
    let n = if circle.radius == 0.0 { 1 } else { samples };
    let points: Vec<CmPoint> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            let (x, y) = circle.position(t);
            CmPoint {
                t,
                xi_x: x,
                xi_y: y,
                residual: cm_residual(&state, (x, y)),
            }
        })
        .collect();
    let max_residual = points.iter().fold(0.0, |m: f64, p| m.max(p.residual.abs()));
    Ok((
        CmSummary {
            center: circle.center,
            radius: circle.radius,
            angular_rate: circle.angular_rate,
            max_residual,
            n_points: points.len(),
            points: None,
        },
        points,
    ))
}

fn cmd_cm(cfg: &RunConfig, opts: &Options) -> Result<String> {
    let (mut summary, points) = cm_points(cfg)?;
    match &opts.out {
        Some(path) => {
            let mut t = Table::new(["t", "xi_x", "xi_y", "residual"]);
            for p in &points {
                t.push(vec![
                    fmt_f64(p.t),
                    fmt_f64(p.xi_x),
                    fmt_f64(p.xi_y),
                    fmt_f64(p.residual),
                ]);
            }
            write_file(path, &t.to_bytes())?;
        }
        None => summary.points = Some(points),
    }
    Ok(to_sorted_json(&summary))
}

#[derive(Debug, Clone, Serialize)]
pub struct TurningReport {
    #[serde(flatten)]
    pub domain: RadialDomain,
    pub boundedness: BoundednessReport,
    pub wells: WellStructure,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales: Option<Scales>,
}

pub fn cmd_turning(cfg: &RunConfig) -> Result<TurningReport> {
    let r = cfg.resolve()?;
    let (p, c) = (r.params()?, r.motion()?);
    Ok(TurningReport {
        domain: turning_points(&p, &c)?,
        boundedness: classify_boundedness(&p, &c, DEFAULT_TOL_MARGINAL),
        wells: well_structure(&p, &c),
        scales: r.scales,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub termination: Termination,
    pub escaped: bool,
    pub interval: AllowedInterval,
    pub n_samples: usize,
    pub t_final: f64,
    pub gamma_start: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub max_h_drift: f64,
    pub max_p_theta_drift: f64,
    pub h: f64,
    pub p_theta: f64,
    pub n_apsides: usize,
    pub apsidal_angle_measured: Option<f64>,
    pub loop_radii: Vec<f64>,
    pub loop_spacing_cv: Option<f64>,
}

pub struct SimulateRun {
    pub trajectory: Trajectory,
    pub summary: SimulateSummary,
}

/// Integration from the inner turning point of the selected interval.
/// Unbounded runs stop once the radius passes `escape_factor` times its
/// start (or a far hard cap with `allow_escape`). Marginal runs go to `t_end`.
pub fn simulate(
    cfg: &RunConfig,
    interval: Option<usize>,
    allow_escape: bool,
) -> Result<SimulateRun> {
    let r = cfg.resolve()?;
    let (p, c) = (r.params()?, r.motion()?);
    let domain = turning_points(&p, &c)?;
    let idx = interval.unwrap_or(0);
    let s0 = initial_state_at_perihelion(&p, &c, idx)?;
    let iv = domain.intervals[idx];
    let g0 = s0.gamma();
    let sc = &cfg.simulate;
    let escaping = iv.hi.is_none() && domain.classification == Classification::Unbounded;
    let factor = if allow_escape {
        HARD_STOP_FACTOR
    } else {
        sc.escape_factor
    };
    let stop = escaping.then_some(factor * g0);
    let control = StepControl {
        tol: sc.tol,
        sample_dt: sc.sample_dt,
        stop_radius: stop,
        ..Default::default()
    };
    let tr = integrate_relative(&p, &s0, sc.t_end, &control)?;
    let (gmin, gmax) = tr.gamma_range();
    let last = tr.samples.last().expect("at least the initial sample");
    let loops = loop_radii(&tr);
    let summary = SimulateSummary {
        termination: tr.termination,
        escaped: escaping && last.gamma() > sc.escape_factor * g0,
        interval: iv,
        n_samples: tr.samples.len(),
        t_final: last.t,
        gamma_start: g0,
        gamma_min: gmin,
        gamma_max: gmax,
        max_h_drift: tr.max_h_drift(),
        max_p_theta_drift: tr.max_p_theta_drift(),
        h: c.h,
        p_theta: c.p_theta,
        n_apsides: tr.apsides.len(),
        apsidal_angle_measured: measure_apsidal_angle(&tr).ok(),
        loop_spacing_cv: spacing_variation(&loops, LOOP_WINDOW),
        loop_radii: loops,
    };
    Ok(SimulateRun {
        trajectory: tr,
        summary,
    })
}

pub fn trajectory_table(tr: &Trajectory) -> Table {
    let mut t = Table::new([
        "t",
        "x",
        "y",
        "gamma",
        "theta_unwrapped",
        "H_drift",
        "ptheta_drift",
    ]);
    for s in &tr.samples {
        t.push(vec![
            fmt_f64(s.t),
            fmt_f64(s.state.x),
            fmt_f64(s.state.y),
            fmt_f64(s.gamma()),
            fmt_f64(s.theta),
            fmt_f64(s.h_drift),
            fmt_f64(s.p_theta_drift),
        ]);
    }
    t
}

fn cmd_simulate(cfg: &RunConfig, opts: &Options) -> Result<String> {
    let run = simulate(cfg, opts.interval, opts.allow_escape)?;
    let csv = trajectory_table(&run.trajectory).to_bytes();
    if let Some(path) = &opts.svg {
        let pts: Vec<(f64, f64)> = run
            .trajectory
            .samples
            .iter()
            .map(|s| (s.state.x, s.state.y))
            .collect();
        write_file(path, svg::polyline(&pts).as_bytes())?;
    }
    let stdout = match &opts.out {
        Some(path) => {
            write_file(path, &csv)?;
            to_sorted_json(&run.summary)
        }
        None => String::from_utf8(csv).expect("csv is utf-8"),
    };
    if run.summary.escaped && !opts.allow_escape {
        let last = run.trajectory.samples.last().expect("non-empty");
        if opts.out.is_none() {
            print!("{stdout}");
        }
        return Err(CliError::Escape {
            t: last.t,
            gamma: last.gamma(),
            limit: cfg.simulate.escape_factor * run.summary.gamma_start,
        });
    }
    Ok(stdout)
}

#[derive(Debug, Clone, Serialize)]
pub struct RationalEvidence {
    pub p: i64,
    pub q: u64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodReport {
    pub delta_theta: f64,
    pub alpha: f64,
    pub estimated_error: f64,
    pub rational_match: Option<RationalEvidence>,
    pub q_max: u64,
    pub tol_rat: f64,
    pub interval: AllowedInterval,
    pub radial_period: f64,
}

pub fn cmd_period(cfg: &RunConfig, opts: &Options) -> Result<PeriodReport> {
    let r = cfg.resolve()?;
    let (p, c) = (r.params()?, r.motion()?);
    let domain = turning_points(&p, &c)?;
    let iv = match (opts.interval, domain.intervals.len()) {
        (_, 0) => return Err(OrbitError::EmptyAllowedSet.into()),
        (Some(i), n) => *domain
            .intervals
            .get(i)
            .ok_or(OrbitError::NoSuchInterval { index: i, count: n })?,
        (None, 1) => domain.intervals[0],
        (None, n) => {
            return Err(config_err(format!(
                "{n} allowed intervals; choose one with --interval"
            )))
        }
    };
    let pc = &cfg.period;
    let qopts = QuadOptions {
        abs_tol: pc.quad_tol,
        rel_tol: pc.quad_tol,
        ..Default::default()
    };
    let res = apsidal_angle_with(&p, &c, &iv, &qopts, pc.q_max, pc.tol_rat)?;
    let period = radial_period(&p, &c, &iv)?;
    Ok(PeriodReport {
        delta_theta: res.delta_theta,
        alpha: res.alpha,
        estimated_error: res.estimated_error,
        rational_match: res.rational_match.map(|m| RationalEvidence {
            p: m.p,
            q: m.q,
            residual: (res.alpha - m.value()).abs(),
        }),
        q_max: pc.q_max,
        tol_rat: pc.tol_rat,
        interval: iv,
        radial_period: period.value,
    })
}

pub fn sweep_table(cfg: &RunConfig) -> Result<Table> {
    let r = cfg.resolve()?;
    let (p, c) = (r.params()?, r.motion()?);
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| config_err("`sweep` command needs a `sweep` section"))?;
    let rows = sweep::run(&p, &c, &sw.axes, sw.alpha, &cfg.period)?;
    Ok(sweep::to_table(&sw.axes, &rows))
}

fn cmd_sweep(cfg: &RunConfig, opts: &Options) -> Result<String> {
    let bytes = sweep_table(cfg)?.to_bytes();
    match &opts.out {
        Some(path) => {
            write_file(path, &bytes)?;
            Ok(String::new())
        }
        None => Ok(String::from_utf8(bytes).expect("csv is utf-8")),
    }
}
