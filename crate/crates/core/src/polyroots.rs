//! Real roots of low-degree polynomials.
//!
//! Quartics (and the lower degrees they may collapse to) are solved in closed
//! form with Ferrari's resolvent cubic. Higher degrees go through a
//! derivative-sequence isolation: the critical points of `P` split the search
//! interval into monotone pieces, and every piece with a sign change holds
//! exactly one root, found by bisection.

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};

/// Highest supported degree.
pub const MAX_DEGREE: usize = 8;

/// Relative size below which trailing coefficients are trimmed.
const TRIM_RTOL: f64 = 1e-14;

/// Two nearby roots whose midpoint residual is below this (relative to the
/// term magnitude) are numerically one double root.
const DOUBLE_RESIDUAL_RTOL: f64 = 64.0 * f64::EPSILON;

/// Coefficients in ascending degree order, `c[0] + c[1] x + ... + c[n] x^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PolyCoeffs(Vec<f64>);

impl PolyCoeffs {
    /// Validates and trims trailing coefficients below `1e-14 * max|c_i|`.
    /// The zero polynomial is representable (as `[0.0]`); solvers reject it.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(OrbitError::NonFiniteCoefficients);
        }
        let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= TRIM_RTOL * scale) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        if coeffs.len() - 1 > MAX_DEGREE {
            return Err(OrbitError::DegreeTooHigh(coeffs.len() - 1));
        }
        Ok(Self(coeffs))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.0, x)
    }

    /// `sum |c_i x^i|`, the natural scale for residuals at `x`.
    pub fn magnitude(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.0.iter().rev().fold(0.0, |acc, c| acc * ax + c.abs())
    }

    /// Relative residual `|P(x)| / sum |c_i x^i|`.
    pub fn relative_residual(&self, x: f64) -> f64 {
        let m = self.magnitude(x);
        if m == 0.0 {
            0.0
        } else {
            self.eval(x).abs() / m
        }
    }

    pub fn derivative(&self) -> PolyCoeffs {
        if self.0.len() == 1 {
            return PolyCoeffs(vec![0.0]);
        }
        PolyCoeffs(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }
}

impl TryFrom<Vec<f64>> for PolyCoeffs {
    type Error = OrbitError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        PolyCoeffs::new(v)
    }
}

impl From<PolyCoeffs> for Vec<f64> {
    fn from(p: PolyCoeffs) -> Self {
        p.0
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Simple,
    /// Two (or more) roots coinciding within tolerance.
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: Multiplicity,
}

impl Root {
    pub fn is_double(&self) -> bool {
        self.multiplicity == Multiplicity::Double
    }
}

/// Strictly ascending real roots.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RealRoots(pub Vec<Root>);

impl RealRoots {
    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(|r| r.value).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Root> {
        self.0.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootTolerances {
    /// Complex pairs with `|Im| <= imag * (1 + |Re|)` collapse to a double real root.
    pub imag: f64,
    /// Real roots closer than `merge * (1 + |r|)` are merged into one double root.
    pub merge: f64,
}

impl Default for RootTolerances {
    fn default() -> Self {
        Self {
            imag: 1e-10,
            merge: 1e-8,
        }
    }
}

/// A root estimate before merging.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    value: f64,
    double: bool,
}

/// Quadratic `c + b x + a x^2` roots as real candidates; a complex pair is
/// returned as `(re, im)` in the `Err` branch.
fn quadratic(a: f64, b: f64, c: f64) -> std::result::Result<[f64; 2], (f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        if q == 0.0 {
            // b == 0 and c == 0
            return Ok([0.0, 0.0]);
        }
        let (r1, r2) = (q / a, c / q);
        Ok(if r1 <= r2 { [r1, r2] } else { [r2, r1] })
    } else {
        Err((-b / (2.0 * a), (-disc).sqrt() / (2.0 * a.abs())))
    }
}

/// Real roots of the monic cubic `x^3 + a x^2 + b x + c`, plus the complex
/// pair (if any) as `(re, im)`.
fn monic_cubic(a: f64, b: f64, c: f64) -> (Vec<f64>, Option<(f64, f64)>) {
    let q = (a * a - 3.0 * b) / 9.0;
    let r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    let shift = a / 3.0;
    let q3 = q * q * q;
    if r * r < q3 {
        let theta = (r / q3.sqrt()).clamp(-1.0, 1.0).acos();
        let m = -2.0 * q.sqrt();
        let tau = std::f64::consts::TAU;
        let mut roots = vec![
            m * (theta / 3.0).cos() - shift,
            m * ((theta + tau) / 3.0).cos() - shift,
            m * ((theta - tau) / 3.0).cos() - shift,
        ];
        roots.sort_by(f64::total_cmp);
        (roots, None)
    } else {
        let big_a = -r.signum() * (r.abs() + (r * r - q3).sqrt()).cbrt();
        let big_b = if big_a == 0.0 { 0.0 } else { q / big_a };
        let real = big_a + big_b - shift;
        let re = -0.5 * (big_a + big_b) - shift;
        let im = 0.5 * 3f64.sqrt() * (big_a - big_b).abs();
        (vec![real], Some((re, im)))
    }
}

fn complex_pair_candidate(
    p: &PolyCoeffs,
    (re, im): (f64, f64),
    tol: &RootTolerances,
) -> Option<Candidate> {
    let near_real =
        im <= tol.imag * (1.0 + re.abs()) || p.relative_residual(re) <= DOUBLE_RESIDUAL_RTOL;
    near_real.then(|| Candidate {
        value: polish_critical(p, re),
        double: true,
    })
}

/// Newton steps on `P`, kept only while they reduce the residual.
fn polish(p: &PolyCoeffs, x0: f64) -> f64 {
    let dp = p.derivative();
    let mut x = x0;
    let mut fx = p.eval(x).abs();
    for _ in 0..4 {
        let d = dp.eval(x);
        if d == 0.0 || fx == 0.0 {
            break;
        }
        let xn = x - p.eval(x) / d;
        let fxn = p.eval(xn).abs();
        if !(fxn < fx) {
            break;
        }
        x = xn;
        fx = fxn;
    }
    x
}

/// Moves a double-root estimate onto the nearby critical point of `P`.
fn polish_critical(p: &PolyCoeffs, x0: f64) -> f64 {
    let dp = p.derivative();
    let ddp = dp.derivative();
    let mut x = x0;
    for _ in 0..3 {
        let d2 = ddp.eval(x);
        if d2 == 0.0 {
            break;
        }
        let xn = x - dp.eval(x) / d2;
        if !xn.is_finite() || (xn - x).abs() > 1e-6 * (1.0 + x.abs()) {
            break;
        }
        x = xn;
    }
    x
}

/// Sorts, merges close pairs and flags doubles.
fn merge_candidates(p: &PolyCoeffs, mut cands: Vec<Candidate>, tol: &RootTolerances) -> RealRoots {
    cands.retain(|c| c.value.is_finite());
    cands.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<Root> = Vec::with_capacity(cands.len());
    for c in cands {
        if let Some(last) = out.last_mut() {
            let gap = c.value - last.value;
            let mid = 0.5 * (c.value + last.value);
            if gap <= tol.merge * (1.0 + last.value.abs())
                || p.relative_residual(mid) <= DOUBLE_RESIDUAL_RTOL
            {
                last.value = if last.is_double() && !c.double {
                    last.value
                } else if c.double && !last.is_double() {
                    c.value
                } else {
                    mid
                };
                last.multiplicity = Multiplicity::Double;
                continue;
            }
        }
        out.push(Root {
            value: c.value,
            multiplicity: if c.double {
                Multiplicity::Double
            } else {
                Multiplicity::Simple
            },
        });
    }
    RealRoots(out)
}

fn require_nonzero(c: &PolyCoeffs) -> Result<()> {
    if c.is_zero() {
        Err(OrbitError::ZeroPolynomial)
    } else {
        Ok(())
    }
}

/// All real roots of a polynomial of degree at most four, in closed form.
pub fn solve_quartic(c: &PolyCoeffs) -> Result<RealRoots> {
    solve_quartic_with(c, &RootTolerances::default())
}

pub fn solve_quartic_with(c: &PolyCoeffs, tol: &RootTolerances) -> Result<RealRoots> {
    require_nonzero(c)?;
    if c.degree() > 4 {
        return Err(OrbitError::DegreeMismatch {
            max: 4,
            got: c.degree(),
        });
    }
    let k = c.coeffs();
    let mut cands = Vec::with_capacity(4);
    match c.degree() {
        0 => {}
        1 => cands.push(Candidate {
            value: -k[0] / k[1],
            double: false,
        }),
        2 => match quadratic(k[2], k[1], k[0]) {
            Ok(rs) => cands.extend(rs.iter().map(|&r| Candidate {
                value: polish(c, r),
                double: false,
            })),
            Err(pair) => cands.extend(complex_pair_candidate(c, pair, tol)),
        },
        3 => {
            let (reals, pair) = monic_cubic(k[2] / k[3], k[1] / k[3], k[0] / k[3]);
            cands.extend(reals.iter().map(|&r| Candidate {
                value: polish(c, r),
                double: false,
            }));
            if let Some(pair) = pair {
                cands.extend(complex_pair_candidate(c, pair, tol));
            }
        }
        _ => {
            ferrari(c, tol, &mut cands);
        }
    }
    Ok(merge_candidates(c, cands, tol))
}

/// Ferrari's construction for a genuine quartic.
fn ferrari(c: &PolyCoeffs, tol: &RootTolerances, cands: &mut Vec<Candidate>) {
    let k = c.coeffs();
    let (a, b, cc, d) = (k[3] / k[4], k[2] / k[4], k[1] / k[4], k[0] / k[4]);
    // depressed quartic y^4 + p y^2 + q y + r with x = y - a/4
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = cc - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * cc / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;

    let mut push_quadratic = |qa: f64, qb: f64, qc: f64| match quadratic(qa, qb, qc) {
        Ok(rs) => cands.extend(rs.iter().map(|&y| Candidate {
            value: polish(c, y - shift),
            double: false,
        })),
        Err((re, im)) => cands.extend(complex_pair_candidate(c, (re - shift, im), tol)),
    };

    // resolvent cubic 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0; it always
    // has a root m >= 0, and the largest real root is used
    let (res_roots, _) = monic_cubic(p, (p * p / 4.0) - r, -q * q / 8.0);
    let m = res_roots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = p.abs() + r.abs().sqrt() + q.abs().cbrt();
    if !(m > 1e-14 * scale * scale) || m <= 0.0 {
        // biquadratic: y^4 + p y^2 + r = 0 (q vanishes with m)
        match quadratic(1.0, p, r) {
            Ok(zs) => {
                for z in zs {
                    if z > 0.0 {
                        let y = z.sqrt();
                        cands.push(Candidate {
                            value: polish(c, y - shift),
                            double: false,
                        });
                        cands.push(Candidate {
                            value: polish(c, -y - shift),
                            double: false,
                        });
                    } else if z.abs() <= tol.imag {
                        cands.push(Candidate {
                            value: polish_critical(c, -shift),
                            double: true,
                        });
                    } else {
                        // y = +-i sqrt(-z): near-real only if tiny
                        let im = (-z).sqrt();
                        cands.extend(complex_pair_candidate(c, (-shift, im), tol));
                    }
                }
            }
            Err((zre, zim)) => {
                // complex z: y = sqrt(z) has a real part; both pairs are non-real
                // unless the imaginary part of sqrt(z) is tiny
                let modulus = zre.hypot(zim);
                let yre = ((modulus + zre) / 2.0).sqrt();
                let yim = ((modulus - zre) / 2.0).sqrt();
                cands.extend(complex_pair_candidate(c, (yre - shift, yim), tol));
                cands.extend(complex_pair_candidate(c, (-yre - shift, yim), tol));
            }
        }
        return;
    }
    let s = (2.0 * m).sqrt();
    let t = q / (2.0 * s);
    // (y^2 + p/2 + m)^2 = (s y - t)^2
    push_quadratic(1.0, -s, p / 2.0 + m + t);
    push_quadratic(1.0, s, p / 2.0 + m - t);
}

/// Cauchy bound: every real root lies in `[-R, R]`.
pub fn cauchy_bound(c: &PolyCoeffs) -> f64 {
    let k = c.coeffs();
    let lead = k[k.len() - 1].abs();
    1.0 + k[..k.len() - 1]
        .iter()
        .fold(0.0_f64, |m, ci| m.max(ci.abs() / lead))
}

/// All real roots, isolated on the Cauchy interval.
pub fn solve_real_roots(c: &PolyCoeffs) -> Result<RealRoots> {
    require_nonzero(c)?;
    if c.degree() == 0 {
        return Ok(RealRoots::default());
    }
    let r = cauchy_bound(c);
    solve_real_roots_in(c, -r, r)
}

/// All real roots in `[lo, hi]`. No root of the interval is missed: the
/// critical points of `c` are found recursively, and each monotone piece
/// between them is bisected when its end values differ in sign. Critical
/// points where `c` itself vanishes (within rounding) are double roots.
pub fn solve_real_roots_in(c: &PolyCoeffs, lo: f64, hi: f64) -> Result<RealRoots> {
    solve_real_roots_in_with(c, lo, hi, &RootTolerances::default())
}

pub fn solve_real_roots_in_with(
    c: &PolyCoeffs,
    lo: f64,
    hi: f64,
    tol: &RootTolerances,
) -> Result<RealRoots> {
    require_nonzero(c)?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(OrbitError::InvalidArgument(format!(
            "bad search interval [{lo}, {hi}]"
        )));
    }
    let cands = isolate(c, lo, hi);
    Ok(merge_candidates(c, cands, tol))
}

fn isolate(p: &PolyCoeffs, lo: f64, hi: f64) -> Vec<Candidate> {
    let deg = p.degree();
    if deg == 0 || p.is_zero() {
        return Vec::new();
    }
    if deg == 1 {
        let k = p.coeffs();
        let x = -k[0] / k[1];
        return if (lo..=hi).contains(&x) {
            vec![Candidate {
                value: x,
                double: false,
            }]
        } else {
            Vec::new()
        };
    }
    let crit: Vec<f64> = isolate(&p.derivative(), lo, hi)
        .into_iter()
        .map(|c| c.value)
        .collect();
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(lo);
    knots.extend(crit.iter().copied().filter(|&x| x > lo && x < hi));
    knots.push(hi);

    let mut out = Vec::new();
    for &x in &crit {
        if p.relative_residual(x) <= DOUBLE_RESIDUAL_RTOL {
            out.push(Candidate {
                value: x,
                double: true,
            });
        }
    }
    for w in knots.windows(2) {
        let (u, v) = (w[0], w[1]);
        let (fu, fv) = (p.eval(u), p.eval(v));
        if fu == 0.0 {
            out.push(Candidate {
                value: u,
                double: false,
            });
        } else if fv != 0.0 && (fu < 0.0) != (fv < 0.0) {
            out.push(Candidate {
                value: bisect(p, u, v, fu),
                double: false,
            });
        }
    }
    if p.eval(hi) == 0.0 {
        out.push(Candidate {
            value: hi,
            double: false,
        });
    }
    out
}

/// Bisection to the limit of floating-point resolution.
fn bisect(p: &PolyCoeffs, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let neg_at_a = fa < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = p.eval(m);
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

/// Number of sign changes in the non-zero coefficient sequence: an upper
/// bound on the number of positive roots, with the same parity.
pub fn descartes_positive_bound(c: &PolyCoeffs) -> usize {
    let signs: Vec<bool> = c
        .coeffs()
        .iter()
        .filter(|&&x| x != 0.0)
        .map(|&x| x > 0.0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Value of `A` for which the third potential's turning-point sextic becomes
/// algebraically solvable:
///
/// ```text
/// zeta = -16 / (16E - 1)
/// A    = zeta Delta^2 / 4 - (Delta p zeta + 2 Delta H zeta + 4B)^2 / (4 zeta (p + 2H)^2 - 64 (Gamma + p^2))
/// ```
pub fn kulkarni_restricted_a(
    b: f64,
    gamma: f64,
    delta: f64,
    e: f64,
    p_theta: f64,
    h: f64,
) -> Result<f64> {
    let lead = 16.0 * e - 1.0;
    if lead == 0.0 {
        return Err(OrbitError::RestrictionDomain("16E - 1 vanishes (E = 1/16)"));
    }
    let zeta = -16.0 / lead;
    let s = p_theta + 2.0 * h;
    let t1 = 4.0 * zeta * s * s;
    let t2 = 64.0 * (gamma + p_theta * p_theta);
    let den = t1 - t2;
    if den == 0.0 || den.abs() <= 4.0 * f64::EPSILON * (t1.abs() + t2.abs()) {
        return Err(OrbitError::RestrictionDomain("denominator vanishes"));
    }
    let num = delta * p_theta * zeta + 2.0 * delta * h * zeta + 4.0 * b;
    Ok(zeta * delta * delta / 4.0 - num * num / den)
}
