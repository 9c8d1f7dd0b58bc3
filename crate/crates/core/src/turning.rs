//! Turning-point polynomials, classically allowed radial intervals and the
//! well structure of the effective potential.
//!
//! For each potential the polynomial `G = 16 gamma^k (H - V_eff)` (with `k = 2`
//! for the first two kinds and `k = 4` for the third) clears the negative
//! powers of `gamma`, so its positive roots are exactly the radii where the
//! radial velocity vanishes.

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::polyroots::{
    self, cauchy_bound, solve_quartic, solve_real_roots_in, Multiplicity, PolyCoeffs, RealRoots,
};
use crate::potentials::{
    classify_boundedness, effective_unchecked, force_magnitude, force_unchecked, MotionConstants,
    PotentialParams, DEFAULT_TOL_MARGINAL,
};

/// Slack for accepting a start radius as classically allowed.
const ALLOWED_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GPoly {
    pub coeffs: PolyCoeffs,
    /// `k` in `G = 16 gamma^k (H - V_eff)`.
    pub prefactor_power: u32,
}

impl GPoly {
    pub fn eval(&self, gamma: f64) -> f64 {
        self.coeffs.eval(gamma)
    }
}

/// Coefficients of `G` in ascending powers of `gamma`.
pub fn g_polynomial(p: &PotentialParams, c: &MotionConstants) -> GPoly {
    let (h, pt) = (c.h, c.p_theta);
    let p2 = pt * pt;
    let (coeffs, k) = match *p {
        PotentialParams::V1 { b, gamma, delta } => (
            vec![
                -16.0 * b - 16.0 * p2,
                -16.0,
                16.0 * h + 8.0 * pt,
                -16.0 * gamma,
                -1.0 - 16.0 * delta,
            ],
            2,
        ),
        PotentialParams::V2 { a, b, gamma, delta } => (
            vec![
                -16.0 * a - 16.0 * p2,
                0.0,
                16.0 * h + 8.0 * pt,
                0.0,
                -1.0 - 16.0 * b,
                0.0,
                -16.0 * gamma,
                0.0,
                -16.0 * delta,
            ],
            2,
        ),
        PotentialParams::V3 {
            a,
            b,
            gamma,
            delta,
            e,
        } => (
            vec![
                -16.0 * a,
                -16.0 * b,
                -16.0 * gamma - 16.0 * p2,
                -16.0 * delta,
                8.0 * pt + 16.0 * h,
                0.0,
                16.0 * e - 1.0,
            ],
            4,
        ),
    };
    // finite inputs give finite coefficients; non-finite ones surface as a zero
    // polynomial so that downstream solvers report them
    let coeffs = PolyCoeffs::new(coeffs)
        .unwrap_or_else(|_| PolyCoeffs::new(vec![0.0]).expect("zero polynomial is representable"));
    GPoly {
        coeffs,
        prefactor_power: k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub gamma: f64,
    pub multiplicity: Multiplicity,
}

/// A classically allowed radial interval. `hi = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllowedInterval {
    pub lo: f64,
    pub hi: Option<f64>,
}

impl AllowedInterval {
    pub fn is_finite(&self) -> bool {
        self.hi.is_some() && self.lo > 0.0
    }

    /// Zero-width interval at a double turning point.
    pub fn is_circular(&self) -> bool {
        self.hi == Some(self.lo)
    }

    pub fn contains(&self, gamma: f64, slack: f64) -> bool {
        gamma >= self.lo - slack && self.hi.is_none_or(|hi| gamma <= hi + slack)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Every allowed interval is finite and stays away from the origin.
    Bounded,
    /// Some allowed interval extends to infinity or down to the origin.
    Unbounded,
    /// As `Unbounded`, but a confinement condition holds with equality.
    Marginal,
    /// No radius is classically allowed.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialDomain {
    pub turning_points: Vec<TurningPoint>,
    pub intervals: Vec<AllowedInterval>,
    pub classification: Classification,
}

impl RadialDomain {
    pub fn turning_values(&self) -> Vec<f64> {
        self.turning_points.iter().map(|t| t.gamma).collect()
    }
}

/// Default search cap for sextic roots and well scans: the larger of
/// `10 (1 + 16|H| + 8|p| + 2)` and the Cauchy bound of `G`.
pub fn default_gamma_cap(c: &MotionConstants, g: Option<&GPoly>) -> f64 {
    let heuristic = 10.0 * (1.0 + 16.0 * c.h.abs() + 8.0 * c.p_theta.abs() + 2.0);
    match g {
        Some(g) if !g.coeffs.is_zero() && g.coeffs.degree() > 0 => {
            heuristic.max(cauchy_bound(&g.coeffs))
        }
        _ => heuristic,
    }
}

fn positive_roots(p: &PotentialParams, c: &MotionConstants, g: &GPoly) -> Result<RealRoots> {
    if !p.is_finite() || !c.h.is_finite() || !c.p_theta.is_finite() {
        return Err(OrbitError::NonFiniteCoefficients);
    }
    if g.coeffs.is_zero() {
        // V_eff == H identically
        return Ok(RealRoots::default());
    }
    let roots = match p {
        PotentialParams::V1 { .. } => solve_quartic(&g.coeffs)?,
        PotentialParams::V2 { .. } => {
            // only even powers: solve the quartic in X = gamma^2
            let k = g.coeffs.coeffs();
            let even: Vec<f64> = (0..=4)
                .map(|i| k.get(2 * i).copied().unwrap_or(0.0))
                .collect();
            let xs = solve_quartic(&PolyCoeffs::new(even)?)?;
            let x_scale = xs.iter().fold(1.0_f64, |m, r| m.max(r.value.abs()));
            RealRoots(
                xs.iter()
                    .filter(|r| r.value > 1e-14 * x_scale)
                    .map(|r| polyroots::Root {
                        value: r.value.sqrt(),
                        multiplicity: r.multiplicity,
                    })
                    .collect(),
            )
        }
        PotentialParams::V3 { .. } => {
            let cap = default_gamma_cap(c, Some(g));
            solve_real_roots_in(&g.coeffs, 0.0, cap)?
        }
    };
    Ok(RealRoots(
        roots.0.into_iter().filter(|r| r.value > 0.0).collect(),
    ))
}

/// Turning points, allowed intervals and their classification.
pub fn turning_points(p: &PotentialParams, c: &MotionConstants) -> Result<RadialDomain> {
    let g = g_polynomial(p, c);
    let roots = positive_roots(p, c, &g)?;
    let turning: Vec<TurningPoint> = roots
        .iter()
        .map(|r| TurningPoint {
            gamma: r.value,
            multiplicity: r.multiplicity,
        })
        .collect();

    let sign_at = |x: f64| g.eval(x) > 0.0;
    let k = turning.len();
    // allowed[i] refers to the open segment before turning[i]; allowed[k] to the last one
    let mut allowed = Vec::with_capacity(k + 1);
    if k == 0 {
        allowed.push(sign_at(1.0));
    } else {
        allowed.push(sign_at(0.5 * turning[0].gamma));
        for w in turning.windows(2) {
            allowed.push(sign_at((w[0].gamma * w[1].gamma).sqrt()));
        }
        allowed.push(sign_at(2.0 * turning[k - 1].gamma + 1.0));
    }

    let mut intervals = Vec::new();
    let mut open: Option<f64> = if allowed[0] { Some(0.0) } else { None };
    for (i, tp) in turning.iter().enumerate() {
        let before = allowed[i];
        let after = allowed[i + 1];
        match (before, after) {
            (true, false) => {
                if let Some(lo) = open.take() {
                    intervals.push(AllowedInterval {
                        lo,
                        hi: Some(tp.gamma),
                    });
                }
            }
            (false, true) => open = Some(tp.gamma),
            (false, false) if tp.multiplicity == Multiplicity::Double => {
                intervals.push(AllowedInterval {
                    lo: tp.gamma,
                    hi: Some(tp.gamma),
                });
            }
            // a tangency inside an allowed region, or no sign information
            _ => {}
        }
    }
    if let Some(lo) = open {
        intervals.push(AllowedInterval { lo, hi: None });
    }

    let report = classify_boundedness(p, c, DEFAULT_TOL_MARGINAL);
    let to_infinity = intervals.iter().any(|iv| iv.hi.is_none());
    let to_origin = intervals.iter().any(|iv| iv.lo == 0.0);
    let classification = if intervals.is_empty() {
        Classification::Empty
    } else if (to_infinity && report.upper_marginal()) || (to_origin && report.lower_marginal()) {
        Classification::Marginal
    } else if to_infinity || to_origin {
        Classification::Unbounded
    } else {
        Classification::Bounded
    };

    Ok(RadialDomain {
        turning_points: turning,
        intervals,
        classification,
    })
}

/// The allowed interval containing `gamma_start`.
pub fn allowed_interval_for(
    p: &PotentialParams,
    c: &MotionConstants,
    gamma_start: f64,
) -> Result<AllowedInterval> {
    if !(gamma_start > 0.0) {
        return Err(OrbitError::NonPositiveRadius(gamma_start));
    }
    let kinetic = c.h - effective_unchecked(p, c, gamma_start);
    if kinetic < -ALLOWED_SLACK * (1.0 + c.h.abs()) {
        return Err(OrbitError::ForbiddenStart { gamma: gamma_start });
    }
    let domain = turning_points(p, c)?;
    let slack = 1e-9 * (1.0 + gamma_start);
    domain
        .intervals
        .iter()
        .filter(|iv| iv.contains(gamma_start, slack))
        .min_by(|a, b| {
            let da = distance_inside(a, gamma_start);
            let db = distance_inside(b, gamma_start);
            da.total_cmp(&db)
        })
        .copied()
        .ok_or(OrbitError::ForbiddenStart { gamma: gamma_start })
}

/// How far outside `iv` a point is (zero when inside).
fn distance_inside(iv: &AllowedInterval, x: f64) -> f64 {
    let below = (iv.lo - x).max(0.0);
    let above = iv.hi.map_or(0.0, |hi| (x - hi).max(0.0));
    below + above
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub gamma: f64,
    pub v_eff: f64,
    pub kind: CriticalKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellStructure {
    pub critical_points: Vec<CriticalPoint>,
    pub well_count: usize,
}

impl WellStructure {
    pub fn minima(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.critical_points
            .iter()
            .filter(|c| c.kind == CriticalKind::Min)
    }

    pub fn maxima(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.critical_points
            .iter()
            .filter(|c| c.kind == CriticalKind::Max)
    }
}

/// Lower end of the log-spaced scan for critical points.
pub const WELL_SCAN_MIN: f64 = 1e-4;
const WELL_SCAN_PER_DECADE: usize = 200;

/// Critical points of `V_eff` on `[1e-4, gamma_cap]`.
pub fn well_structure(p: &PotentialParams, c: &MotionConstants) -> WellStructure {
    let cap = default_gamma_cap(c, None);
    well_structure_in(p, c, WELL_SCAN_MIN, cap)
}

/// Critical points of `V_eff` on `[lo, hi]`: sign changes of the radial force
/// on a log-spaced grid, refined by bisection and typed by the sign of the
/// second difference of `V_eff`.
pub fn well_structure_in(
    p: &PotentialParams,
    c: &MotionConstants,
    lo: f64,
    hi: f64,
) -> WellStructure {
    let decades = (hi / lo).log10().max(1.0);
    let n = (decades * WELL_SCAN_PER_DECADE as f64).ceil() as usize;
    let ratio = (hi / lo).ln() / n as f64;
    let grid: Vec<f64> = (0..=n).map(|i| lo * (ratio * i as f64).exp()).collect();
    let force = |g: f64| force_unchecked(p, c, g);

    let mut crit = Vec::new();
    let mut prev_g = grid[0];
    let mut prev_f = force(prev_g);
    for &g in &grid[1..] {
        let f = force(g);
        if f == 0.0 {
            crit.push(g);
        } else if prev_f != 0.0 && (f < 0.0) != (prev_f < 0.0) {
            crit.push(bisect_force(&force, prev_g, g, prev_f));
        }
        prev_g = g;
        prev_f = f;
    }
    crit.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());

    let critical_points: Vec<CriticalPoint> = crit
        .into_iter()
        .map(|g| {
            let h = 1e-4 * g;
            let v0 = effective_unchecked(p, c, g);
            let d2 = effective_unchecked(p, c, g + h) - 2.0 * v0 + effective_unchecked(p, c, g - h);
            let kind = if d2 > 0.0 {
                CriticalKind::Min
            } else {
                CriticalKind::Max
            };
            CriticalPoint {
                gamma: g,
                v_eff: v0,
                kind,
            }
        })
        .collect();
    let well_count = critical_points
        .iter()
        .filter(|c| c.kind == CriticalKind::Min)
        .count();
    WellStructure {
        critical_points,
        well_count,
    }
}

fn bisect_force(force: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let neg_at_a = fa < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = force(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `|force| / force_magnitude` at a critical point; near machine epsilon
/// for a well-resolved one.
pub fn critical_residual(p: &PotentialParams, c: &MotionConstants, gamma: f64) -> f64 {
    force_unchecked(p, c, gamma).abs() / force_magnitude(p, c, gamma)
}
