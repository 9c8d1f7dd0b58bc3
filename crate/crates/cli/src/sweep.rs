//! Parameter grids over the dimensionless inputs.

use orbits_core::potentials::{classify_boundedness, DEFAULT_TOL_MARGINAL};
use orbits_core::quadrature::{apsidal_angle_with, QuadOptions};
use orbits_core::turning::{turning_points, Classification};
use orbits_core::{MotionConstants, PotentialParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Axis, PeriodConfig};
use crate::error::{config_err, Result};
use crate::output::{fmt_f64, Table};

pub const PARAMS: [&str; 7] = ["a", "b", "gamma", "delta", "e", "h", "p_theta"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub values: Vec<f64>,
    pub classification: Classification,
    pub turning_points: Vec<f64>,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub alpha: Option<f64>,
}

fn set(p: &mut PotentialParams, c: &mut MotionConstants, name: &str, v: f64) -> Result<()> {
    use PotentialParams::*;
    let slot = match (name, p) {
        ("h", _) => &mut c.h,
        ("p_theta", _) => &mut c.p_theta,
        ("a", V2 { a, .. } | V3 { a, .. }) => a,
        ("b", V1 { b, .. } | V2 { b, .. } | V3 { b, .. }) => b,
        ("gamma", V1 { gamma, .. } | V2 { gamma, .. } | V3 { gamma, .. }) => gamma,
        ("delta", V1 { delta, .. } | V2 { delta, .. } | V3 { delta, .. }) => delta,
        ("e", V3 { e, .. }) => e,
        (name, p) => {
            return Err(config_err(format!(
                "parameter `{name}` does not exist for potential {:?}",
                p.kind()
            )))
        }
    };
    *slot = v;
    Ok(())
}

/// Multi-index of grid point `flat` with the last axis varying fastest.
fn unravel(mut flat: usize, axes: &[Axis]) -> Vec<usize> {
    let mut idx = vec![0; axes.len()];
    for (k, ax) in axes.iter().enumerate().rev() {
        idx[k] = flat % ax.len();
        flat /= ax.len();
    }
    idx
}

pub fn grid_size(axes: &[Axis]) -> usize {
    if axes.is_empty() {
        0
    } else {
        axes.iter().map(Axis::len).product()
    }
}

pub fn evaluate_point(
    base: &PotentialParams,
    motion: &MotionConstants,
    axes: &[Axis],
    values: &[f64],
    alpha: bool,
    period: &PeriodConfig,
) -> Result<SweepRow> {
    let mut p = *base;
    let mut c = *motion;
    for (ax, &v) in axes.iter().zip(values) {
        set(&mut p, &mut c, ax.param(), v)?;
    }
    let domain = turning_points(&p, &c)?;
    let report = classify_boundedness(&p, &c, DEFAULT_TOL_MARGINAL);
    let finite: Vec<_> = domain
        .intervals
        .iter()
        .filter(|iv| iv.is_finite())
        .collect();
    let alpha = if alpha && domain.classification == Classification::Bounded && finite.len() == 1 {
        let opts = QuadOptions {
            abs_tol: period.quad_tol,
            rel_tol: period.quad_tol,
            ..Default::default()
        };
        apsidal_angle_with(&p, &c, finite[0], &opts, period.q_max, period.tol_rat)
            .ok()
            .map(|r| r.alpha)
    } else {
        None
    };
    Ok(SweepRow {
        values: values.to_vec(),
        classification: domain.classification,
        turning_points: domain.turning_values(),
        lower_ok: report.lower_ok,
        upper_ok: report.upper_ok,
        alpha,
    })
}

/// Every grid point in row-major order; points are evaluated in parallel.
pub fn run(
    base: &PotentialParams,
    motion: &MotionConstants,
    axes: &[Axis],
    alpha: bool,
    period: &PeriodConfig,
) -> Result<Vec<SweepRow>> {
    // surface parameter/kind mismatches before any work
    let mut probe = (*base, *motion);
    for ax in axes {
        set(&mut probe.0, &mut probe.1, ax.param(), 0.0)?;
    }
    (0..grid_size(axes))
        .into_par_iter()
        .map(|flat| {
            let idx = unravel(flat, axes);
            let values: Vec<f64> = idx.iter().zip(axes).map(|(&i, ax)| ax.value(i)).collect();
            evaluate_point(base, motion, axes, &values, alpha, period)
        })
        .collect()
}

pub fn to_table(axes: &[Axis], rows: &[SweepRow]) -> Table {
    let mut header: Vec<String> = axes.iter().map(|a| a.param().to_owned()).collect();
    header.extend(
        [
            "classification",
            "n_turning",
            "turning_points",
            "lower_ok",
            "upper_ok",
            "alpha",
        ]
        .map(String::from),
    );
    let mut t = Table::new(header);
    for r in rows {
        let mut row: Vec<String> = r.values.iter().map(|&v| fmt_f64(v)).collect();
        let class = serde_json::to_value(r.classification).expect("enum serializes");
        row.push(class.as_str().unwrap_or_default().to_owned());
        row.push(r.turning_points.len().to_string());
        row.push(
            r.turning_points
                .iter()
                .map(|&g| fmt_f64(g))
                .collect::<Vec<_>>()
                .join(";"),
        );
        row.push(r.lower_ok.to_string());
        row.push(r.upper_ok.to_string());
        row.push(r.alpha.map(fmt_f64).unwrap_or_default());
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_order() {
        let axes = vec![
            Axis::List {
                param: "b".into(),
                values: vec![1.0, 2.0],
            },
            Axis::List {
                param: "h".into(),
                values: vec![5.0, 6.0, 7.0],
            },
        ];
        assert_eq!(unravel(0, &axes), [0, 0]);
        assert_eq!(unravel(1, &axes), [0, 1]);
        assert_eq!(unravel(3, &axes), [1, 0]);
        assert_eq!(grid_size(&axes), 6);
        assert_eq!(grid_size(&[]), 0);
    }

    #[test]
    fn kind_mismatch_is_an_input_error() {
        let p = PotentialParams::V1 {
            b: 1.0,
            gamma: 1.0,
            delta: 1.0,
        };
        let axes = vec![Axis::List {
            param: "e".into(),
            values: vec![0.1],
        }];
        let e = run(
            &p,
            &MotionConstants::new(1.0, 0.0),
            &axes,
            false,
            &PeriodConfig::default(),
        )
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
