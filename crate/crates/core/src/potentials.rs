//! The three dimensionless interaction potentials, the effective radial
//! potential of the relative motion and the forces derived from them.
//!
//! With the conserved relative angular momentum `p_theta` substituted for the
//! angular velocity, the relative energy reads
//!
//! ```text
//! H = gamma_dot^2 / 4 + V_eff(gamma),   V_eff = (p_theta/gamma - gamma/4)^2 + V(gamma)
//! ```
//!
//! so the radial force is `-dV_eff/dgamma = 2 p_theta^2 / gamma^3 - gamma/8 - V'(gamma)`.

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};

/// Default tolerance for flagging a boundedness condition met with equality.
pub const DEFAULT_TOL_MARGINAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PotentialKind {
    V1,
    V2,
    V3,
}

/// Dimensionless potential parameters.
///
/// * `V1`: `1/g + b/g^2 + gamma*g + delta*g^2` (the Coulomb coefficient is fixed to one)
/// * `V2`: `a/g^2 + b*g^2 + gamma*g^4 + delta*g^6`
/// * `V3`: `a/g^4 + b/g^3 + gamma/g^2 + delta/g - e*g^2`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum PotentialParams {
    V1 {
        b: f64,
        gamma: f64,
        delta: f64,
    },
    V2 {
        a: f64,
        b: f64,
        gamma: f64,
        delta: f64,
    },
    V3 {
        a: f64,
        b: f64,
        gamma: f64,
        delta: f64,
        e: f64,
    },
}

/// Conserved quantities of the relative motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionConstants {
    pub h: f64,
    pub p_theta: f64,
}

impl MotionConstants {
    pub fn new(h: f64, p_theta: f64) -> Self {
        Self { h, p_theta }
    }
}

impl PotentialParams {
    pub fn kind(&self) -> PotentialKind {
        match self {
            PotentialParams::V1 { .. } => PotentialKind::V1,
            PotentialParams::V2 { .. } => PotentialKind::V2,
            PotentialParams::V3 { .. } => PotentialKind::V3,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.power_terms().iter().all(|(c, _)| c.is_finite())
    }

    /// The potential as a sum of `coefficient * gamma^power` terms.
    /// Unused slots carry a zero coefficient.
    pub fn power_terms(&self) -> [(f64, i32); 5] {
        match *self {
            PotentialParams::V1 { b, gamma, delta } => {
                [(1.0, -1), (b, -2), (gamma, 1), (delta, 2), (0.0, 0)]
            }
            PotentialParams::V2 { a, b, gamma, delta } => {
                [(a, -2), (b, 2), (gamma, 4), (delta, 6), (0.0, 0)]
            }
            PotentialParams::V3 {
                a,
                b,
                gamma,
                delta,
                e,
            } => [(a, -4), (b, -3), (gamma, -2), (delta, -1), (-e, 2)],
        }
    }

    /// `V(gamma)` without the domain check.
    pub fn value_at(&self, gamma: f64) -> f64 {
        self.power_terms()
            .iter()
            .map(|&(c, n)| c * gamma.powi(n))
            .sum()
    }

    /// `dV/dgamma` without the domain check.
    pub fn derivative_at(&self, gamma: f64) -> f64 {
        self.power_terms()
            .iter()
            .filter(|&&(_, n)| n != 0)
            .map(|&(c, n)| c * f64::from(n) * gamma.powi(n - 1))
            .sum()
    }

    /// Sum of the absolute values of the potential's terms; a magnitude
    /// scale for relative comparisons.
    pub fn term_magnitude(&self, gamma: f64) -> f64 {
        self.power_terms()
            .iter()
            .map(|&(c, n)| (c * gamma.powi(n)).abs())
            .sum()
    }

    /// Same as [`PotentialParams::term_magnitude`] for the derivative.
    pub fn derivative_magnitude(&self, gamma: f64) -> f64 {
        self.power_terms()
            .iter()
            .filter(|&&(_, n)| n != 0)
            .map(|&(c, n)| (c * f64::from(n) * gamma.powi(n - 1)).abs())
            .sum()
    }
}

/// Squared centrifugal-magnetic term `(p_theta/gamma - gamma/4)^2`.
#[inline]
pub fn magnetic_term(p_theta: f64, gamma: f64) -> f64 {
    let w = p_theta / gamma - gamma / 4.0;
    w * w
}

fn check_radius(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(OrbitError::NonPositiveRadius(gamma))
    }
}

pub fn eval_potential(p: &PotentialParams, gamma: f64) -> Result<f64> {
    check_radius(gamma)?;
    Ok(p.value_at(gamma))
}

pub fn eval_effective(p: &PotentialParams, c: &MotionConstants, gamma: f64) -> Result<f64> {
    check_radius(gamma)?;
    Ok(effective_unchecked(p, c, gamma))
}

#[inline]
pub(crate) fn effective_unchecked(p: &PotentialParams, c: &MotionConstants, gamma: f64) -> f64 {
    magnetic_term(c.p_theta, gamma) + p.value_at(gamma)
}

/// Exact `-dV_eff/dgamma`.
pub fn eval_force_radial(p: &PotentialParams, c: &MotionConstants, gamma: f64) -> Result<f64> {
    check_radius(gamma)?;
    Ok(force_unchecked(p, c, gamma))
}

#[inline]
pub(crate) fn force_unchecked(p: &PotentialParams, c: &MotionConstants, gamma: f64) -> f64 {
    2.0 * c.p_theta * c.p_theta / gamma.powi(3) - gamma / 8.0 - p.derivative_at(gamma)
}

/// Magnitude scale of the radial force at `gamma`, for relative tolerances.
pub fn force_magnitude(p: &PotentialParams, c: &MotionConstants, gamma: f64) -> f64 {
    2.0 * c.p_theta * c.p_theta / gamma.powi(3) + gamma / 8.0 + p.derivative_magnitude(gamma)
}

/// Cartesian gradient `(dV/dx, dV/dy)` of the bare potential.
pub fn eval_gradient_cartesian(p: &PotentialParams, x: f64, y: f64) -> Result<(f64, f64)> {
    let r = x.hypot(y);
    if r == 0.0 {
        return Err(OrbitError::AtOrigin);
    }
    let dv = p.derivative_at(r);
    Ok((dv * x / r, dv * y / r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Satisfied,
    Equality,
    Violated,
}

/// One inequality of the boundedness test, written as `margin > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub bound: Bound,
    pub condition: String,
    pub margin: f64,
    pub status: ConditionStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub marginal: bool,
    pub detail: Vec<ConditionCheck>,
}

impl BoundednessReport {
    pub fn is_bounded(&self) -> bool {
        self.lower_ok && self.upper_ok
    }

    pub fn upper_marginal(&self) -> bool {
        self.detail
            .iter()
            .any(|d| d.bound == Bound::Upper && d.status == ConditionStatus::Equality)
    }

    pub fn lower_marginal(&self) -> bool {
        self.detail
            .iter()
            .any(|d| d.bound == Bound::Lower && d.status == ConditionStatus::Equality)
    }
}

/// Checks the small- and large-radius confinement inequalities of the
/// potential kind. A condition is `ok` when it holds strictly; it is marked
/// as an equality when its margin is within `tol_marginal` of zero.
pub fn classify_boundedness(
    p: &PotentialParams,
    c: &MotionConstants,
    tol_marginal: f64,
) -> BoundednessReport {
    let p2 = c.p_theta * c.p_theta;
    let (lower, upper) = match *p {
        PotentialParams::V1 { b, delta, .. } => (
            ("B > -p_theta^2", b + p2),
            ("Delta > -1/16", delta + 1.0 / 16.0),
        ),
        PotentialParams::V2 { a, delta, .. } => (("A > -p_theta^2", a + p2), ("Delta > 0", delta)),
        PotentialParams::V3 { a, e, .. } => (("A > 0", a), ("E < 1/16", 1.0 / 16.0 - e)),
    };
    let check = |bound, (condition, margin): (&str, f64)| {
        let status = if margin.abs() <= tol_marginal {
            ConditionStatus::Equality
        } else if margin > 0.0 {
            ConditionStatus::Satisfied
        } else {
            ConditionStatus::Violated
        };
        ConditionCheck {
            bound,
            condition: condition.to_string(),
            margin,
            status,
        }
    };
    let detail = vec![check(Bound::Lower, lower), check(Bound::Upper, upper)];
    BoundednessReport {
        lower_ok: lower.1 > 0.0,
        upper_ok: upper.1 > 0.0,
        marginal: detail.iter().any(|d| d.status == ConditionStatus::Equality),
        detail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v1(b: f64, gamma: f64, delta: f64) -> PotentialParams {
        PotentialParams::V1 { b, gamma, delta }
    }

    #[test]
    fn potential_values() {
        assert_eq!(eval_potential(&v1(0.0, 0.0, 0.0), 1.0).unwrap(), 1.0);
        assert_eq!(eval_potential(&v1(1.0, 1.0, 1.0), 1.0).unwrap(), 4.0);
        let v3 = PotentialParams::V3 {
            a: 1.0,
            b: 1.0,
            gamma: 1.0,
            delta: 1.0,
            e: 1.0 / 16.0,
        };
        assert!((eval_potential(&v3, 2.0).unwrap() - 0.6875).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_radius() {
        let p = v1(0.0, 0.0, 0.0);
        let c = MotionConstants::new(0.0, 0.0);
        assert!(eval_potential(&p, 0.0).is_err());
        assert!(eval_effective(&p, &c, -1.0).is_err());
        assert!(eval_force_radial(&p, &c, 0.0).is_err());
        assert_eq!(
            eval_gradient_cartesian(&p, 0.0, 0.0),
            Err(OrbitError::AtOrigin)
        );
    }

    #[test]
    fn effective_values() {
        let c = MotionConstants::new(0.0, 0.0);
        assert_eq!(eval_effective(&v1(0.0, 0.0, 0.0), &c, 2.0).unwrap(), 0.75);
        assert_eq!(eval_effective(&v1(1.0, 1.0, 1.0), &c, 1.0).unwrap(), 4.0625);
        // p_theta = gamma^2/4 cancels the magnetic term
        let g = 1.7;
        let p = v1(0.3, -0.2, 0.9);
        let c = MotionConstants::new(0.0, g * g / 4.0);
        let diff = eval_effective(&p, &c, g).unwrap() - eval_potential(&p, g).unwrap();
        assert!(diff.abs() < 1e-15);
    }

    #[test]
    fn force_at_unit_radius() {
        let c = MotionConstants::new(0.0, 0.0);
        let f = eval_force_radial(&v1(0.0, 0.0, 0.0), &c, 1.0).unwrap();
        assert!((f - 0.875).abs() < 1e-15);
    }

    #[test]
    fn gradient_is_radial() {
        let p = PotentialParams::V2 {
            a: 1.0,
            b: 2.0,
            gamma: -0.5,
            delta: 0.1,
        };
        let (_, gy) = eval_gradient_cartesian(&p, 1.3, 0.0).unwrap();
        assert_eq!(gy, 0.0);
        let (gx, gy) = eval_gradient_cartesian(&p, 0.6, 0.8).unwrap();
        let phi = 0.9_f64;
        let (s, co) = phi.sin_cos();
        let (rx, ry) = eval_gradient_cartesian(&p, 0.6 * co - 0.8 * s, 0.6 * s + 0.8 * co).unwrap();
        assert!((rx - (gx * co - gy * s)).abs() < 1e-12);
        assert!((ry - (gx * s + gy * co)).abs() < 1e-12);
    }

    #[test]
    fn boundedness_examples() {
        let c = MotionConstants::new(10.0, 0.0);
        let r = classify_boundedness(&v1(1.0, 1.0, 1.0), &c, DEFAULT_TOL_MARGINAL);
        assert!(r.lower_ok && r.upper_ok && !r.marginal);

        let v3 = |e| PotentialParams::V3 {
            a: 1.0,
            b: 1.0,
            gamma: 1.0,
            delta: 1.0,
            e,
        };
        let r = classify_boundedness(&v3(1.0 / 16.0), &c, 1e-12);
        assert!(r.marginal && r.upper_marginal() && !r.upper_ok);
        let r = classify_boundedness(&v3(0.1), &c, 1e-12);
        assert!(!r.upper_ok && !r.marginal);
        assert_eq!(r.detail[1].status, ConditionStatus::Violated);

        let r = classify_boundedness(&v1(-2.0, 0.0, -0.1), &MotionConstants::new(0.0, 1.0), 1e-12);
        assert!(!r.lower_ok && !r.upper_ok);
    }
}
