//! Conversion between Gaussian-unit inputs and the dimensionless system.
//!
//! Lengths are measured in `l_B = (m/B^2)^(1/3)`, times in `1/omega_c` with
//! `omega_c = qB/m`, energies in `q^2/l_B` and angular momenta in
//! `m omega_c l_B^2`.

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::potentials::{PotentialKind, PotentialParams};

/// Relative tolerance for the `a = q^2` check on the first potential.
const COULOMB_RTOL: f64 = 1e-12;

/// Identical particles: common mass, charge and the field magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSystem {
    pub mass: f64,
    pub charge: f64,
    pub field: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub length: f64,
    pub frequency: f64,
    pub energy_unit: f64,
    pub angmom_unit: f64,
}

impl Scales {
    /// `q^2`, recovered from `energy_unit * length`.
    pub fn charge_squared(&self) -> f64 {
        self.energy_unit * self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Length,
    Time,
    Energy,
    Angmom,
}

/// Dimensional potential coefficients. Each coefficient multiplies the power
/// of the separation `rho` that the potential kind assigns to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPotential {
    pub kind: PotentialKind,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
}

pub fn derive_scales(sys: &PhysicalSystem) -> Result<Scales> {
    if !(sys.mass > 0.0 && sys.mass.is_finite()) {
        return Err(OrbitError::InvalidSystem("mass must be positive"));
    }
    if sys.charge == 0.0 || !sys.charge.is_finite() {
        return Err(OrbitError::InvalidSystem("charge must be non-zero"));
    }
    if !(sys.field > 0.0 && sys.field.is_finite()) {
        return Err(OrbitError::InvalidSystem(
            "field magnitude must be positive",
        ));
    }
    let length = (sys.mass / (sys.field * sys.field)).cbrt();
    let frequency = sys.charge * sys.field / sys.mass;
    Ok(Scales {
        length,
        frequency,
        energy_unit: sys.charge * sys.charge / length,
        angmom_unit: sys.mass * frequency * length * length,
    })
}

/// `l_B^n / q^2` for each coefficient of a potential kind: the dimensionless
/// parameter is the raw coefficient times this factor.
fn coefficient_factors(kind: PotentialKind, s: &Scales) -> [f64; 5] {
    let l = s.length;
    let q2 = s.charge_squared();
    match kind {
        // a is fixed to q^2 and maps to the unit Coulomb term
        PotentialKind::V1 => [1.0 / q2, 1.0 / (q2 * l), l * l / q2, l.powi(3) / q2, 0.0],
        PotentialKind::V2 => [
            1.0 / (l * q2),
            l.powi(3) / q2,
            l.powi(5) / q2,
            l.powi(7) / q2,
            0.0,
        ],
        PotentialKind::V3 => [
            1.0 / (l.powi(3) * q2),
            1.0 / (l * l * q2),
            1.0 / (l * q2),
            1.0 / q2,
            l.powi(3) / q2,
        ],
    }
}

pub fn nondimensionalize(raw: &RawPotential, s: &Scales) -> Result<PotentialParams> {
    let f = coefficient_factors(raw.kind, s);
    match raw.kind {
        PotentialKind::V1 => {
            if raw.e.is_some() {
                return Err(OrbitError::UnexpectedCoefficient("e"));
            }
            let q2 = s.charge_squared();
            if (raw.a - q2).abs() > COULOMB_RTOL * q2 {
                return Err(OrbitError::CoulombMismatch {
                    expected: q2,
                    got: raw.a,
                });
            }
            Ok(PotentialParams::V1 {
                b: raw.b * f[1],
                gamma: raw.c * f[2],
                delta: raw.d * f[3],
            })
        }
        PotentialKind::V2 => {
            if raw.e.is_some() {
                return Err(OrbitError::UnexpectedCoefficient("e"));
            }
            Ok(PotentialParams::V2 {
                a: raw.a * f[0],
                b: raw.b * f[1],
                gamma: raw.c * f[2],
                delta: raw.d * f[3],
            })
        }
        PotentialKind::V3 => {
            let e = raw.e.ok_or(OrbitError::MissingCoefficient("e"))?;
            Ok(PotentialParams::V3 {
                a: raw.a * f[0],
                b: raw.b * f[1],
                gamma: raw.c * f[2],
                delta: raw.d * f[3],
                e: e * f[4],
            })
        }
    }
}

/// Inverse of [`nondimensionalize`].
pub fn redimensionalize_potential(p: &PotentialParams, s: &Scales) -> RawPotential {
    let f = coefficient_factors(p.kind(), s);
    match *p {
        PotentialParams::V1 { b, gamma, delta } => RawPotential {
            kind: PotentialKind::V1,
            a: s.charge_squared(),
            b: b / f[1],
            c: gamma / f[2],
            d: delta / f[3],
            e: None,
        },
        PotentialParams::V2 { a, b, gamma, delta } => RawPotential {
            kind: PotentialKind::V2,
            a: a / f[0],
            b: b / f[1],
            c: gamma / f[2],
            d: delta / f[3],
            e: None,
        },
        PotentialParams::V3 {
            a,
            b,
            gamma,
            delta,
            e,
        } => RawPotential {
            kind: PotentialKind::V3,
            a: a / f[0],
            b: b / f[1],
            c: gamma / f[2],
            d: delta / f[3],
            e: Some(e / f[4]),
        },
    }
}

pub fn redimensionalize(value: f64, unit: UnitKind, s: &Scales) -> f64 {
    match unit {
        UnitKind::Length => value * s.length,
        UnitKind::Time => value / s.frequency,
        UnitKind::Energy => value * s.energy_unit,
        UnitKind::Angmom => value * s.angmom_unit,
    }
}

/// Inverse of [`redimensionalize`].
pub fn to_dimensionless(value: f64, unit: UnitKind, s: &Scales) -> f64 {
    match unit {
        UnitKind::Length => value / s.length,
        UnitKind::Time => value * s.frequency,
        UnitKind::Energy => value / s.energy_unit,
        UnitKind::Angmom => value / s.angmom_unit,
    }
}
