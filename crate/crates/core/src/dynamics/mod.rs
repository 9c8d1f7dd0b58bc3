//! Centre-of-mass orbits in closed form and numerical integration of the
//! relative motion.
//!
//! The relative Lagrangian `L = (xdot^2 + ydot^2)/4 + (x ydot - y xdot)/4 - V(r)`
//! gives the Cartesian equations of motion
//!
//! ```text
//! xddot =  ydot - 2 dV/dx
//! yddot = -xdot - 2 dV/dy
//! ```
//!
//! with the conserved energy `H = (xdot^2 + ydot^2)/4 + V` and angular momentum
//! `p_theta = (x ydot - y xdot)/2 + r^2/4`. The polar angle is carried as a fifth
//! state component so that it comes out unwrapped.

mod dop853;

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::potentials::PotentialParams;
use crate::turning::turning_points;
use crate::MotionConstants;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmState {
    pub h_cm: f64,
    pub p_theta_cm: f64,
    #[serde(default)]
    pub theta0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: (f64, f64),
    pub radius: f64,
    /// In units of the cyclotron frequency; always -1.
    pub angular_rate: f64,
}

impl Circle {
    /// Position at dimensionless time `t`, starting from the point of the
    /// circle nearest the origin.
    pub fn position(&self, t: f64) -> (f64, f64) {
        let phase0 = self.center.1.atan2(self.center.0) + std::f64::consts::PI;
        let phase = phase0 + self.angular_rate * t;
        (
            self.center.0 + self.radius * phase.cos(),
            self.center.1 + self.radius * phase.sin(),
        )
    }
}

pub fn cm_orbit(s: &CmState) -> Result<Circle> {
    let finite = s.h_cm.is_finite() && s.p_theta_cm.is_finite() && s.theta0.is_finite();
    if !finite || s.h_cm < 0.0 || s.h_cm + s.p_theta_cm < 0.0 {
        return Err(OrbitError::InvalidCmState {
            h_cm: s.h_cm,
            p_theta_cm: s.p_theta_cm,
        });
    }
    let d = (s.h_cm + s.p_theta_cm).sqrt();
    let (sin, cos) = s.theta0.sin_cos();
    Ok(Circle {
        center: (d * cos, d * sin),
        radius: s.h_cm.sqrt(),
        angular_rate: -1.0,
    })
}

/// Left-hand side of `xi^2 - 2 xi sqrt(H + p) cos(theta - theta0) + p = 0`
/// evaluated at a Cartesian point.
pub fn cm_residual(s: &CmState, point: (f64, f64)) -> f64 {
    let d = (s.h_cm + s.p_theta_cm).sqrt();
    let (sin, cos) = s.theta0.sin_cos();
    let (x, y) = point;
    x * x + y * y - 2.0 * d * (x * cos + y * sin) + s.p_theta_cm
}

/// Relative-motion phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl RelState {
    pub fn gamma(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn theta(&self) -> f64 {
        self.y.atan2(self.x)
    }

    /// `dgamma/dt`.
    pub fn radial_velocity(&self) -> f64 {
        (self.x * self.vx + self.y * self.vy) / self.gamma()
    }
}

pub fn relative_energy(p: &PotentialParams, s: &RelState) -> f64 {
    0.25 * (s.vx * s.vx + s.vy * s.vy) + p.value_at(s.gamma())
}

pub fn relative_angular_momentum(s: &RelState) -> f64 {
    0.5 * (s.x * s.vy - s.y * s.vx) + 0.25 * (s.x * s.x + s.y * s.y)
}

/// Start at the inner turning point of the chosen allowed interval with no
/// radial velocity; the angular velocity follows from `p_theta`.
pub fn initial_state_at_perihelion(
    p: &PotentialParams,
    c: &MotionConstants,
    interval_index: usize,
) -> Result<RelState> {
    let domain = turning_points(p, c)?;
    if domain.intervals.is_empty() {
        return Err(OrbitError::EmptyAllowedSet);
    }
    let iv = domain
        .intervals
        .get(interval_index)
        .ok_or(OrbitError::NoSuchInterval {
            index: interval_index,
            count: domain.intervals.len(),
        })?;
    if iv.lo <= 0.0 {
        return Err(OrbitError::NoInnerTurningPoint);
    }
    Ok(state_at_rest_radially(c.p_theta, iv.lo))
}

/// `x = gamma, y = 0, vx = 0, vy = gamma * thetadot` with
/// `thetadot = 2 p_theta / gamma^2 - 1/2`.
pub fn state_at_rest_radially(p_theta: f64, gamma: f64) -> RelState {
    let theta_dot = 2.0 * p_theta / (gamma * gamma) - 0.5;
    RelState {
        x: gamma,
        y: 0.0,
        vx: 0.0,
        vy: gamma * theta_dot,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// Local error tolerance, used as both absolute and relative tolerance.
    pub tol: f64,
    /// Output spacing; steps never straddle an output time.
    pub sample_dt: f64,
    /// Stop (without error) once the radius exceeds this value.
    pub stop_radius: Option<f64>,
    pub max_steps: usize,
}

impl StepControl {
    pub fn with_stop(self, radius: f64) -> Self {
        Self {
            stop_radius: Some(radius),
            ..self
        }
    }
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            sample_dt: 0.01,
            stop_radius: None,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: RelState,
    /// Unwrapped polar angle.
    pub theta: f64,
    pub h_drift: f64,
    pub p_theta_drift: f64,
}

impl Sample {
    pub fn gamma(&self) -> f64 {
        self.state.gamma()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApsisKind {
    Pericentre,
    Apocentre,
}

/// A located zero of the radial velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Apsis {
    pub t: f64,
    pub gamma: f64,
    pub theta: f64,
    pub kind: ApsisKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    ReachedStopRadius,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub apsides: Vec<Apsis>,
    pub h0: f64,
    pub p_theta0: f64,
    pub stats: StepStats,
    pub termination: Termination,
}

impl Trajectory {
    pub fn max_h_drift(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.h_drift))
    }

    pub fn max_p_theta_drift(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.p_theta_drift))
    }

    pub fn gamma_range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, 0.0), |(lo, hi), s| {
                let g = s.gamma();
                (lo.min(g), hi.max(g))
            })
    }

    pub fn pericentres(&self) -> impl Iterator<Item = &Apsis> {
        self.apsides
            .iter()
            .filter(|a| a.kind == ApsisKind::Pericentre)
    }
}

type Phase = [f64; 5];

fn to_phase(s: &RelState) -> Phase {
    [s.x, s.y, s.vx, s.vy, s.theta()]
}

fn from_phase(y: &Phase) -> RelState {
    RelState {
        x: y[0],
        y: y[1],
        vx: y[2],
        vy: y[3],
    }
}

/// `x vx + y vy`, which has the sign of the radial velocity.
fn radial_sign(y: &Phase) -> f64 {
    y[0] * y[2] + y[1] * y[3]
}

/// Smallest radius the integrator accepts before declaring a collapse.
const MIN_RADIUS: f64 = 1e-9;
const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const ERROR_EXPONENT: f64 = 1.0 / 8.0;

/// Adaptive integration of the relative motion up to `t_end`, sampled every
/// `control.sample_dt`, with conservation drift recorded at each sample and
/// every turning point of the radius located to integration accuracy.
pub fn integrate_relative(
    p: &PotentialParams,
    state0: &RelState,
    t_end: f64,
    control: &StepControl,
) -> Result<Trajectory> {
    if state0.x == 0.0 && state0.y == 0.0 {
        return Err(OrbitError::AtOrigin);
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(OrbitError::InvalidArgument(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if !(control.tol > 0.0 && control.sample_dt > 0.0) {
        return Err(OrbitError::InvalidArgument(
            "tolerance and sample spacing must be positive".into(),
        ));
    }
    let n_samples = (t_end / control.sample_dt).ceil();
    if n_samples > 1e8 {
        return Err(OrbitError::InvalidArgument(format!(
            "{n_samples} samples requested; increase sample_dt"
        )));
    }

    let rhs = |_t: f64, s: &Phase| -> Phase {
        let r2 = s[0] * s[0] + s[1] * s[1];
        let r = r2.sqrt();
        let dv = p.derivative_at(r) / r;
        [
            s[2],
            s[3],
            s[3] - 2.0 * dv * s[0],
            -s[2] - 2.0 * dv * s[1],
            (s[0] * s[3] - s[1] * s[2]) / r2,
        ]
    };

    let h0 = relative_energy(p, state0);
    let pt0 = relative_angular_momentum(state0);
    let sample_of = |t: f64, y: &Phase| {
        let st = from_phase(y);
        Sample {
            t,
            state: st,
            theta: y[4],
            h_drift: (relative_energy(p, &st) - h0).abs(),
            p_theta_drift: (relative_angular_momentum(&st) - pt0).abs(),
        }
    };

    let tol = control.tol;
    let mut stats = StepStats::default();
    let mut y = to_phase(state0);
    let mut f0 = rhs(0.0, &y);
    stats.rhs_evals += 1;
    let mut t = 0.0;
    let mut samples = Vec::with_capacity(n_samples as usize + 1);
    samples.push(sample_of(0.0, &y));
    let mut apsides = Vec::new();
    let mut next_index = 1usize;
    let next_time = |k: usize| (k as f64 * control.sample_dt).min(t_end);
    let mut t_next = next_time(next_index);

    let mut h_prop = initial_step(&rhs, &y, &f0, tol).min(control.sample_dt);
    let mut err_prev: f64 = 1e-4;
    let mut last_rejected = false;
    let mut termination = Termination::Completed;

    while t < t_end {
        if stats.accepted + stats.rejected >= control.max_steps {
            return Err(OrbitError::StepCollapse {
                t,
                gamma: y[0].hypot(y[1]),
            });
        }
        let clipped = h_prop >= t_next - t;
        let h = if clipped { t_next - t } else { h_prop };
        if h <= 1e-14 * t.abs().max(1.0) && !clipped {
            return Err(OrbitError::StepCollapse {
                t,
                gamma: y[0].hypot(y[1]),
            });
        }
        let (y_new, err) = dop853::step(&rhs, t, &y, &f0, h, tol, tol);
        stats.rhs_evals += dop853::STAGES - 1;
        let finite = y_new.iter().all(|v| v.is_finite()) && err.is_finite();
        if finite && err <= 1.0 {
            let t_new = if clipped { t_next } else { t + h };
            let gamma_new = y_new[0].hypot(y_new[1]);
            if gamma_new < MIN_RADIUS {
                return Err(OrbitError::StepCollapse {
                    t: t_new,
                    gamma: gamma_new,
                });
            }
            let s0 = radial_sign(&y);
            let s1 = radial_sign(&y_new);
            let kind = if s0 <= 0.0 && s1 > 0.0 {
                Some(ApsisKind::Pericentre)
            } else if s0 >= 0.0 && s1 < 0.0 {
                Some(ApsisKind::Apocentre)
            } else {
                None
            };
            if let Some(kind) = kind {
                let (tau, ya) = locate_apsis(&rhs, t, &y, &f0, h, s0, s1, tol, &mut stats);
                apsides.push(Apsis {
                    t: t + tau,
                    gamma: ya[0].hypot(ya[1]),
                    theta: ya[4],
                    kind,
                });
            }

            stats.accepted += 1;
            t = t_new;
            y = y_new;
            f0 = rhs(t, &y);
            stats.rhs_evals += 1;

            let mut recorded = false;
            if clipped {
                samples.push(sample_of(t, &y));
                recorded = true;
                next_index += 1;
                t_next = next_time(next_index);
            }
            if let Some(stop) = control.stop_radius {
                if gamma_new > stop {
                    if !recorded {
                        samples.push(sample_of(t, &y));
                    }
                    termination = Termination::ReachedStopRadius;
                    break;
                }
            }

            let e = err.max(1e-10);
            let mut fac =
                SAFETY * e.powf(-(ERROR_EXPONENT - 0.75 * PI_BETA)) * err_prev.powf(PI_BETA);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            if !clipped || h * fac > h_prop {
                h_prop = h * fac;
            }
            err_prev = e;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = if finite {
                (SAFETY * err.powf(-ERROR_EXPONENT)).clamp(0.2, 1.0)
            } else {
                0.2
            };
            h_prop = h * fac;
            last_rejected = true;
        }
    }

    Ok(Trajectory {
        samples,
        apsides,
        h0,
        p_theta0: pt0,
        stats,
        termination,
    })
}

fn initial_step(rhs: &impl Fn(f64, &Phase) -> Phase, y: &Phase, f0: &Phase, tol: f64) -> f64 {
    let norm = |v: &Phase, w: &Phase| {
        (v.iter()
            .zip(w)
            .map(|(a, b)| (a / (tol + tol * b.abs())).powi(2))
            .sum::<f64>()
            / 5.0)
            .sqrt()
    };
    let d0 = norm(y, y);
    let d1 = norm(f0, y);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = *y;
    for i in 0..5 {
        y1[i] += h0 * f0[i];
    }
    let f1 = rhs(h0, &y1);
    let mut diff = [0.0; 5];
    for i in 0..5 {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff, y) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(ERROR_EXPONENT)
    };
    (100.0 * h0).min(h1)
}

/// Illinois iteration for the zero of the radial velocity inside an accepted
/// step; each trial point is a fresh sub-step from the step's start.
#[allow(clippy::too_many_arguments)]
fn locate_apsis(
    rhs: &impl Fn(f64, &Phase) -> Phase,
    t: f64,
    y: &Phase,
    f0: &Phase,
    h: f64,
    s0: f64,
    s1: f64,
    tol: f64,
    stats: &mut StepStats,
) -> (f64, Phase) {
    if s0 == 0.0 {
        return (0.0, *y);
    }
    let (mut a, mut fa) = (0.0, s0);
    let (mut b, mut fb) = (h, s1);
    let mut side = 0i8;
    let mut best = (h, None::<Phase>);
    for _ in 0..100 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (t.abs() + h) {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let (yc, _) = dop853::step(rhs, t, y, f0, c, tol, tol);
        stats.rhs_evals += dop853::STAGES - 1;
        let fc = radial_sign(&yc);
        best = (c, Some(yc));
        if fc == 0.0 {
            break;
        }
        if (fc < 0.0) == (fa < 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    let (tau, state) = best;
    let state = state.unwrap_or_else(|| dop853::step(rhs, t, y, f0, tau, tol, tol).0);
    (tau, state)
}

/// Half the unwrapped polar advance per radial period, averaged over all
/// pericentre passages in the trajectory.
pub fn measure_apsidal_angle(traj: &Trajectory) -> Result<f64> {
    let (lo, hi) = traj.gamma_range();
    if !(hi - lo > 1e-7 * hi) {
        return Err(OrbitError::CircularOrbit);
    }
    let peri: Vec<&Apsis> = traj.pericentres().collect();
    if peri.len() < 2 {
        return Err(OrbitError::InsufficientApsides { found: peri.len() });
    }
    let first = peri[0];
    let last = peri[peri.len() - 1];
    Ok((last.theta - first.theta) / (2.0 * (peri.len() - 1) as f64))
}

/// Radius at each completed turn of the polar angle, interpolated between
/// samples. Turns are counted from the starting angle in either direction.
pub fn loop_radii(traj: &Trajectory) -> Vec<f64> {
    let Some(first) = traj.samples.first() else {
        return Vec::new();
    };
    let turns = |s: &Sample| (s.theta - first.theta) / std::f64::consts::TAU;
    let mut out = Vec::new();
    for w in traj.samples.windows(2) {
        let (u0, u1) = (turns(&w[0]), turns(&w[1]));
        let k = u0.floor().max(u1.floor());
        if u0.floor() != u1.floor() && k != 0.0 {
            let f = (k - u0) / (u1 - u0);
            out.push(w[0].gamma() + f * (w[1].gamma() - w[0].gamma()));
        }
    }
    out
}

/// Standard deviation over mean of the successive differences of the last
/// `n + 1` values, i.e. of the last `n` spacings.
pub fn spacing_variation(values: &[f64], n: usize) -> Option<f64> {
    if n < 2 || values.len() < n + 1 {
        return None;
    }
    let tail = &values[values.len() - n - 1..];
    let d: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    Some(var.sqrt() / mean.abs())
}
