//! JSON run configuration.
//!
//! Parameters are given either directly in dimensionless form (`potential`)
//! or as a physical system plus raw coefficients (`physical`). In the latter
//! case the energies and angular momenta under `motion` and `cm` are physical
//! too and are converted on load; every other number (times, tolerances,
//! sweep values) is dimensionless.

use std::path::Path;

use orbits_core::dynamics::CmState;
use orbits_core::units::{
    derive_scales, nondimensionalize, to_dimensionless, PhysicalSystem, RawPotential, Scales,
    UnitKind,
};
use orbits_core::{MotionConstants, PotentialParams};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_SWEEP_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub motion: Option<Motion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cm: Option<CmConfig>,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub period: PeriodConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalInput {
    pub system: PhysicalSystem,
    pub potential: RawPotential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Motion {
    pub h: f64,
    pub p_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmConfig {
    pub h_cm: f64,
    pub p_theta_cm: f64,
    #[serde(default)]
    pub theta0: f64,
    #[serde(default = "default_cm_samples")]
    pub samples: usize,
}

fn default_cm_samples() -> usize {
    360
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub t_end: f64,
    pub sample_dt: f64,
    pub tol: f64,
    /// Escape is declared once the radius exceeds this multiple of the
    /// starting radius.
    pub escape_factor: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            t_end: 200.0,
            sample_dt: 0.01,
            tol: 1e-10,
            escape_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodConfig {
    pub q_max: u64,
    pub tol_rat: f64,
    pub quad_tol: f64,
}

impl Default for PeriodConfig {
    fn default() -> Self {
        Self {
            q_max: orbits_core::quadrature::DEFAULT_Q_MAX,
            tol_rat: orbits_core::quadrature::DEFAULT_TOL_RAT,
            quad_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
    /// Compute the periodicity function for single-interval bounded points.
    #[serde(default = "yes")]
    pub alpha: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Axis {
    Range {
        param: String,
        start: f64,
        stop: f64,
        steps: usize,
    },
    List {
        param: String,
        values: Vec<f64>,
    },
}

impl Axis {
    pub fn param(&self) -> &str {
        match self {
            Axis::Range { param, .. } | Axis::List { param, .. } => param,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Axis::Range { steps, .. } => *steps,
            Axis::List { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `start + i (stop - start)/(steps - 1)`; a single step sits at `start`.
    pub fn value(&self, i: usize) -> f64 {
        match self {
            Axis::Range {
                start, stop, steps, ..
            } => {
                if *steps <= 1 {
                    *start
                } else {
                    start + (stop - start) * i as f64 / (*steps - 1) as f64
                }
            }
            Axis::List { values, .. } => values[i],
        }
    }
}

/// Dimensionless inputs after unit conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub params: Option<PotentialParams>,
    pub motion: Option<MotionConstants>,
    pub cm: Option<(CmState, usize)>,
    pub scales: Option<Scales>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        crate::output::to_sorted_json(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_err(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.potential.is_some() && self.physical.is_some() {
            return Err(config_err(
                "give either `potential` or `physical`, not both",
            ));
        }
        if let Some(p) = &self.potential {
            if !p.is_finite() {
                return Err(config_err("potential parameters must be finite"));
            }
        }
        if let Some(m) = &self.motion {
            if !(m.h.is_finite() && m.p_theta.is_finite()) {
                return Err(config_err("motion constants must be finite"));
            }
        }
        let s = &self.simulate;
        for (name, v) in [
            ("simulate.t_end", s.t_end),
            ("simulate.sample_dt", s.sample_dt),
            ("simulate.tol", s.tol),
            ("simulate.escape_factor", s.escape_factor),
            ("period.tol_rat", self.period.tol_rat),
            ("period.quad_tol", self.period.quad_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(format!("{name} must be positive, got {v}")));
            }
        }
        if self.period.q_max == 0 {
            return Err(config_err("period.q_max must be at least 1"));
        }
        if let Some(cm) = &self.cm {
            if cm.samples == 0 {
                return Err(config_err("cm.samples must be at least 1"));
            }
        }
        if let Some(sw) = &self.sweep {
            let mut total: usize = 1;
            for ax in &sw.axes {
                if !crate::sweep::PARAMS.contains(&ax.param()) {
                    return Err(config_err(format!(
                        "unknown sweep parameter `{}` (expected one of {:?})",
                        ax.param(),
                        crate::sweep::PARAMS
                    )));
                }
                if let Axis::Range { start, stop, .. } = ax {
                    if !(start.is_finite() && stop.is_finite()) {
                        return Err(config_err("sweep range bounds must be finite"));
                    }
                }
                total = total.saturating_mul(ax.len());
            }
            if total > MAX_SWEEP_POINTS {
                return Err(config_err(format!(
                    "sweep grid has {total} points; the limit is {MAX_SWEEP_POINTS}"
                )));
            }
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let scales = match &self.physical {
            Some(ph) => Some(derive_scales(&ph.system)?),
            None => None,
        };
        let params = match (&self.potential, &self.physical, &scales) {
            (Some(p), ..) => Some(*p),
            (None, Some(ph), Some(s)) => Some(nondimensionalize(&ph.potential, s)?),
            _ => None,
        };
        let energy = |v: f64| scales.map_or(v, |s| to_dimensionless(v, UnitKind::Energy, &s));
        let angmom = |v: f64| scales.map_or(v, |s| to_dimensionless(v, UnitKind::Angmom, &s));
        let motion = self
            .motion
            .map(|m| MotionConstants::new(energy(m.h), angmom(m.p_theta)));
        let cm = self.cm.map(|c| {
            (
                CmState {
                    h_cm: energy(c.h_cm),
                    p_theta_cm: angmom(c.p_theta_cm),
                    theta0: c.theta0,
                },
                c.samples,
            )
        });
        Ok(Resolved {
            params,
            motion,
            cm,
            scales,
        })
    }
}

impl Resolved {
    pub fn params(&self) -> Result<PotentialParams> {
        self.params
            .ok_or_else(|| config_err("this command needs `potential` or `physical`"))
    }

    pub fn motion(&self) -> Result<MotionConstants> {
        self.motion
            .ok_or_else(|| config_err("this command needs `motion`"))
    }
}
