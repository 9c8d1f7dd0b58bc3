//! Apsidal angles and radial periods by quadrature, plus commensurability
//! evidence.
//!
//! Along an allowed interval `[a, b]`
//!
//! ```text
//! dtheta/dgamma = 4 w (p_theta/gamma - gamma/4) / sqrt(G)
//! dt/dgamma     = 2 gamma^(k/2) / sqrt(G)
//! ```
//!
//! with `w = gamma` for the third potential and `w = 1` otherwise. Writing
//! `G = (gamma - a)(gamma - b) Q` and substituting `gamma = a + (b - a) sin^2 u`
//! turns `dgamma / sqrt(G)` into `2 du / sqrt(-Q)`, which is smooth on
//! `[0, pi/2]`.

use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::potentials::{MotionConstants, PotentialKind, PotentialParams};
use crate::turning::{g_polynomial, AllowedInterval};

pub const DEFAULT_Q_MAX: u64 = 64;
pub const DEFAULT_TOL_RAT: f64 = 1e-6;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss error.
fn gk15(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Estimate> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    if !value.is_finite() {
        return Err(OrbitError::QuadratureNonConvergence {
            estimated_error: f64::INFINITY,
        });
    }
    Ok(Estimate {
        value,
        error: ((kronrod - gauss) * half).abs(),
    })
}

struct Panel {
    lo: f64,
    hi: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive Gauss-Kronrod integration: the panel with the largest
/// error estimate is bisected until the summed estimate meets the tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, opts: &QuadOptions) -> Result<Estimate> {
    if lo == hi {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let first = gk15(&f, lo, hi)?;
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { lo, hi, est: first });
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.value.abs());
        if total.error <= target {
            return Ok(total);
        }
        if heap.len() >= opts.max_intervals {
            return Err(OrbitError::QuadratureNonConvergence {
                estimated_error: total.error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            return Err(OrbitError::QuadratureNonConvergence {
                estimated_error: total.error,
            });
        }
        let left = gk15(&f, worst.lo, mid)?;
        let right = gk15(&f, mid, worst.hi)?;
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            est: left,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            est: right,
        });
        // re-sum instead of updating in place to avoid cancellation drift
        total = heap.iter().fold(
            Estimate {
                value: 0.0,
                error: 0.0,
            },
            |acc, p| Estimate {
                value: acc.value + p.est.value,
                error: acc.error + p.est.error,
            },
        );
    }
}

/// Ascending coefficients of `P / ((x - a)(x - b))`, remainder discarded.
fn deflate2(coeffs: &[f64], a: f64, b: f64) -> Vec<f64> {
    let once = |c: &[f64], r: f64| -> Vec<f64> {
        let n = c.len() - 1;
        let mut out = vec![0.0; n];
        let mut acc = 0.0;
        for k in (1..=n).rev() {
            acc = c[k] + r * acc;
            out[k - 1] = acc;
        }
        out
    };
    once(&once(coeffs, a), b)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// The pieces shared by every integral over one allowed interval.
struct Regularized {
    a: f64,
    b: f64,
    neg_q: Vec<f64>,
}

impl Regularized {
    fn new(p: &PotentialParams, c: &MotionConstants, iv: &AllowedInterval) -> Result<Self> {
        let b = iv.hi.ok_or(OrbitError::UnboundedInterval)?;
        let a = iv.lo;
        if !(a > 0.0) {
            return Err(OrbitError::NoInnerTurningPoint);
        }
        if !(b - a > 1e-12 * b) {
            return Err(OrbitError::CircularOrbit);
        }
        let g = g_polynomial(p, c);
        if g.coeffs.degree() < 2 {
            return Err(OrbitError::InconsistentInterval { gamma: a });
        }
        let neg_q: Vec<f64> = deflate2(g.coeffs.coeffs(), a, b)
            .iter()
            .map(|v| -v)
            .collect();
        for gamma in [a, b] {
            if !(horner(&neg_q, gamma) > 0.0) {
                return Err(OrbitError::InconsistentInterval { gamma });
            }
        }
        Ok(Self { a, b, neg_q })
    }

    fn gamma(&self, u: f64) -> f64 {
        let s = u.sin();
        self.a + (self.b - self.a) * s * s
    }

    fn u_of(&self, gamma: f64) -> f64 {
        ((gamma - self.a) / (self.b - self.a))
            .clamp(0.0, 1.0)
            .sqrt()
            .asin()
    }

    /// `2 h(gamma(u)) / sqrt(-Q(gamma(u)))`, integrated over `u`.
    fn integrate(
        &self,
        h: impl Fn(f64) -> f64,
        u0: f64,
        u1: f64,
        opts: &QuadOptions,
    ) -> Result<Estimate> {
        use std::cell::Cell;
        let bad = Cell::new(None::<f64>);
        let est = integrate(
            |u| {
                let gamma = self.gamma(u);
                let nq = horner(&self.neg_q, gamma);
                if !(nq > 0.0) {
                    bad.set(Some(gamma));
                    return 0.0;
                }
                2.0 * h(gamma) / nq.sqrt()
            },
            u0,
            u1,
            opts,
        )?;
        match bad.get() {
            Some(gamma) => Err(OrbitError::InconsistentInterval { gamma }),
            None => Ok(est),
        }
    }
}

fn angular_weight(p: &PotentialParams, c: &MotionConstants) -> impl Fn(f64) -> f64 {
    let pt = c.p_theta;
    let extra = p.kind() == PotentialKind::V3;
    move |gamma: f64| {
        let w = if extra { gamma } else { 1.0 };
        4.0 * w * (pt / gamma - 0.25 * gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalMatch {
    pub p: i64,
    pub q: u64,
}

impl RationalMatch {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApsidalResult {
    pub delta_theta: f64,
    pub estimated_error: f64,
    pub alpha: f64,
    pub rational_match: Option<RationalMatch>,
}

/// Angle swept while the radius goes from the inner to the outer turning
/// point, with default tolerances.
pub fn apsidal_angle(
    p: &PotentialParams,
    c: &MotionConstants,
    interval: &AllowedInterval,
) -> Result<ApsidalResult> {
    apsidal_angle_with(
        p,
        c,
        interval,
        &QuadOptions::default(),
        DEFAULT_Q_MAX,
        DEFAULT_TOL_RAT,
    )
}

pub fn apsidal_angle_with(
    p: &PotentialParams,
    c: &MotionConstants,
    interval: &AllowedInterval,
    opts: &QuadOptions,
    q_max: u64,
    tol_rat: f64,
) -> Result<ApsidalResult> {
    let est = apsidal_partial_with(
        p,
        c,
        interval,
        interval.lo,
        interval.hi.unwrap_or(f64::NAN),
        opts,
    )?;
    let alpha = periodicity_alpha(est.value);
    Ok(ApsidalResult {
        delta_theta: est.value,
        estimated_error: est.error,
        alpha,
        rational_match: rational_approx(alpha, q_max, tol_rat),
    })
}

/// Angle swept between two radii inside an allowed interval.
pub fn apsidal_partial(
    p: &PotentialParams,
    c: &MotionConstants,
    interval: &AllowedInterval,
    from: f64,
    to: f64,
) -> Result<Estimate> {
    apsidal_partial_with(p, c, interval, from, to, &QuadOptions::default())
}

fn apsidal_partial_with(
    p: &PotentialParams,
    c: &MotionConstants,
    interval: &AllowedInterval,
    from: f64,
    to: f64,
    opts: &QuadOptions,
) -> Result<Estimate> {
    let reg = Regularized::new(p, c, interval)?;
    let (u0, u1) = (reg.u_of(from), reg.u_of(to));
    let (u0, u1) = if to.is_nan() {
        (0.0, FRAC_PI_2)
    } else {
        (u0, u1)
    };
    reg.integrate(angular_weight(p, c), u0, u1, opts)
}

/// Time for a full radial oscillation, inner turning point and back.
pub fn radial_period(
    p: &PotentialParams,
    c: &MotionConstants,
    interval: &AllowedInterval,
) -> Result<Estimate> {
    let reg = Regularized::new(p, c, interval)?;
    let half_k = (g_polynomial(p, c).prefactor_power / 2) as i32;
    let est = reg.integrate(
        |gamma| 2.0 * gamma.powi(half_k),
        0.0,
        FRAC_PI_2,
        &QuadOptions::default(),
    )?;
    Ok(Estimate {
        value: 2.0 * est.value,
        error: 2.0 * est.error,
    })
}

pub fn periodicity_alpha(delta_theta: f64) -> f64 {
    delta_theta / PI - 1.0
}

/// Best continued-fraction convergent of `alpha` with denominator at most
/// `q_max`, if it lies within `tol_rat`.
pub fn rational_approx(alpha: f64, q_max: u64, tol_rat: f64) -> Option<RationalMatch> {
    if !alpha.is_finite() || q_max == 0 || alpha.abs() > 1e15 {
        return None;
    }
    let (mut h_prev, mut h) = (1i64, alpha.floor() as i64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut frac = alpha - alpha.floor();
    for _ in 0..64 {
        if frac <= 1e-15 {
            break;
        }
        let x = 1.0 / frac;
        let a = x.floor();
        frac = x - a;
        let a = a as u64;
        let Some(k_next) = a.checked_mul(k).and_then(|v| v.checked_add(k_prev)) else {
            break;
        };
        if k_next > q_max {
            break;
        }
        let h_next = (a as i64) * h + h_prev;
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
    }
    let m = RationalMatch { p: h, q: k };
    ((alpha - m.value()).abs() <= tol_rat).then_some(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turning::turning_points;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let sum: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        assert!((sum - 2.0).abs() < 1e-15);
        let sum: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((sum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn panel_exactness() {
        // Kronrod 15 is exact to degree 22, Gauss 7 to degree 13
        for n in 0..=22 {
            let est = gk15(&|x: f64| x.powi(n), 0.0, 1.0).unwrap();
            let exact = 1.0 / (n as f64 + 1.0);
            assert!((est.value - exact).abs() < 1e-14, "degree {n}");
            if n <= 13 {
                assert!(est.error < 1e-14, "degree {n}: {}", est.error);
            }
        }
    }

    #[test]
    fn adaptive_integration() {
        let est = integrate(|x| x.sin(), 0.0, PI, &QuadOptions::default()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-13);
        let est = integrate(|x| 1.0 / (1e-3 + x * x), -1.0, 1.0, &QuadOptions::default()).unwrap();
        let exact = 2.0 * (1.0 / 1e-3f64.sqrt()) * (1.0 / 1e-3f64.sqrt()).atan();
        assert!((est.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn deflation_is_exact_for_known_factors() {
        // (x - 1)(x - 3)(x^2 + 2) = x^4 - 4x^3 + 5x^2 - 8x + 6
        let q = deflate2(&[6.0, -8.0, 5.0, -4.0, 1.0], 1.0, 3.0);
        assert_eq!(q, vec![2.0, 0.0, 1.0]);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(periodicity_alpha(PI), 0.0);
        assert!((periodicity_alpha(1.5 * PI) - 0.5).abs() < 1e-15);
        let a = periodicity_alpha(PI * (1.0 + 2f64.sqrt()));
        assert!((a - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rational_examples() {
        assert_eq!(
            rational_approx(0.5, 10, 1e-9),
            Some(RationalMatch { p: 1, q: 2 })
        );
        assert_eq!(
            rational_approx(0.3333333, 10, 1e-3),
            Some(RationalMatch { p: 1, q: 3 })
        );
        assert_eq!(rational_approx(2f64.sqrt() - 1.0, 10, 1e-9), None);
        assert_eq!(
            rational_approx(-0.75, 10, 1e-12),
            Some(RationalMatch { p: -3, q: 4 })
        );
        assert_eq!(
            rational_approx(3.0, 1, 1e-12),
            Some(RationalMatch { p: 3, q: 1 })
        );
        assert_eq!(rational_approx(f64::NAN, 10, 1.0), None);
    }

    #[test]
    fn sqrt2_has_no_close_fraction_below_eleven() {
        let x = 2f64.sqrt() - 1.0;
        for q in 1..=10i64 {
            for p in -q..=q {
                assert!((x - p as f64 / q as f64).abs() > 1e-9);
            }
        }
    }

    fn base() -> (PotentialParams, MotionConstants) {
        (
            PotentialParams::V1 {
                b: 1.0,
                gamma: 1.0,
                delta: 1.0,
            },
            MotionConstants::new(10.0, 0.0),
        )
    }

    #[test]
    fn apsidal_angle_is_negative_without_angular_momentum() {
        let (p, c) = base();
        let iv = turning_points(&p, &c).unwrap().intervals[0];
        let r = apsidal_angle(&p, &c, &iv).unwrap();
        assert!(r.delta_theta < 0.0);
        assert!(r.estimated_error >= 0.0 && r.estimated_error < 1e-10);
    }

    #[test]
    fn halving_tolerance_stays_within_error() {
        let (p, c) = base();
        let iv = turning_points(&p, &c).unwrap().intervals[0];
        let loose = QuadOptions {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            ..Default::default()
        };
        let tight = QuadOptions {
            abs_tol: 5e-9,
            rel_tol: 5e-9,
            ..Default::default()
        };
        let a = apsidal_angle_with(&p, &c, &iv, &loose, 64, 1e-6).unwrap();
        let b = apsidal_angle_with(&p, &c, &iv, &tight, 64, 1e-6).unwrap();
        assert!((a.delta_theta - b.delta_theta).abs() <= a.estimated_error.max(1e-15));
    }

    #[test]
    fn degenerate_intervals_are_rejected() {
        let (p, c) = base();
        let circ = AllowedInterval {
            lo: 1.0,
            hi: Some(1.0),
        };
        assert_eq!(apsidal_angle(&p, &c, &circ), Err(OrbitError::CircularOrbit));
        let open = AllowedInterval { lo: 1.0, hi: None };
        assert_eq!(
            apsidal_angle(&p, &c, &open),
            Err(OrbitError::UnboundedInterval)
        );
        // not an interval of this G
        let wrong = AllowedInterval {
            lo: 0.5,
            hi: Some(0.6),
        };
        assert!(matches!(
            apsidal_angle(&p, &c, &wrong),
            Err(OrbitError::InconsistentInterval { .. })
        ));
    }

    #[test]
    fn harmonic_radial_period() {
        // V2 with only the gamma^2 term: V_eff = B' gamma^2 + p^2/gamma^2 - p/2,
        // B' = 1/16 + B; radial frequency 4 sqrt(B') in these units
        let b = 0.1875;
        let p = PotentialParams::V2 {
            a: 0.0,
            b,
            gamma: 0.0,
            delta: 0.0,
        };
        let c = MotionConstants::new(3.0, 1.0);
        let iv = turning_points(&p, &c).unwrap().intervals[0];
        let t = radial_period(&p, &c, &iv).unwrap();
        let omega = 4.0 * (1.0 / 16.0 + b).sqrt();
        assert!((t.value - 2.0 * PI / omega).abs() < 1e-10, "{}", t.value);
    }
}
