//! Independent oracles and random case generators shared by the integration
//! tests. Nothing here goes through the polynomial machinery: roots are found
//! by scanning `H - V_eff` directly.

#![allow(dead_code)]

use orbits_core::potentials::eval_effective;
use orbits_core::{MotionConstants, PotentialKind, PotentialParams};
use rand::Rng;

pub const SCAN_LO: f64 = 1e-6;
pub const SCAN_HI: f64 = 1e4;
pub const SCAN_POINTS: usize = 6000;

fn kinetic(p: &PotentialParams, c: &MotionConstants, g: f64) -> f64 {
    c.h - eval_effective(p, c, g).unwrap()
}

/// Sign changes of `H - V_eff` on a log grid, each refined by plain bisection.
pub fn scan_turning_points(p: &PotentialParams, c: &MotionConstants) -> Vec<f64> {
    scan_roots(|g| kinetic(p, c, g), SCAN_LO, SCAN_HI, SCAN_POINTS)
}

pub fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln() / n as f64;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = lo * (ratio * i as f64).exp();
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            roots.push(bisect(&f, x0, x1, f0));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

pub fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let neg = fa < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == neg {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub fn root_tol(r: f64) -> f64 {
    1e-9 * r.abs().max(1.0)
}

/// Every oracle root has a computed partner within tolerance. Computed roots
/// the scan did not see must be genuine (near-)double roots that a sign scan
/// cannot resolve.
pub fn compare_roots(
    p: &PotentialParams,
    c: &MotionConstants,
    computed: &[f64],
    oracle: &[f64],
) -> Result<(), String> {
    for &r in oracle {
        if !computed.iter().any(|&x| (x - r).abs() <= root_tol(r)) {
            return Err(format!("oracle root {r} missing from {computed:?}"));
        }
    }
    for &x in computed {
        if oracle.iter().any(|&r| (x - r).abs() <= root_tol(r)) {
            continue;
        }
        let scale = 1.0 + c.h.abs() + eval_effective(p, c, x).unwrap().abs();
        let nearby = (-50..=50).all(|k| {
            let g = x * (1.0 + 1e-6 * k as f64);
            kinetic(p, c, g) <= 1e-8 * scale
        });
        if !nearby {
            return Err(format!(
                "computed root {x} is not a root (oracle {oracle:?})"
            ));
        }
    }
    Ok(())
}

/// Parameters drawn so that the boundedness conditions hold strictly.
pub fn draw_bounded(kind: PotentialKind, rng: &mut impl Rng) -> (PotentialParams, MotionConstants) {
    let pt: f64 = rng.gen_range(-3.0..3.0);
    let h = rng.gen_range(-5.0..30.0);
    let p = match kind {
        PotentialKind::V1 => PotentialParams::V1 {
            b: rng.gen_range((0.01 - pt * pt).max(-3.0)..5.0),
            gamma: rng.gen_range(-5.0..5.0),
            delta: rng.gen_range(-0.06..5.0),
        },
        PotentialKind::V2 => PotentialParams::V2 {
            a: rng.gen_range((0.01 - pt * pt).max(-3.0)..5.0),
            b: rng.gen_range(-5.0..5.0),
            gamma: rng.gen_range(-5.0..5.0),
            delta: rng.gen_range(0.01..5.0),
        },
        PotentialKind::V3 => PotentialParams::V3 {
            a: rng.gen_range(0.01..5.0),
            b: rng.gen_range(-5.0..5.0),
            gamma: rng.gen_range(-5.0..5.0),
            delta: rng.gen_range(-5.0..5.0),
            e: rng.gen_range(-1.0..0.06),
        },
    };
    (p, MotionConstants::new(h, pt))
}

/// A bounded case with a non-degenerate allowed interval around a random
/// start radius: `H` is set a random amount above `V_eff(gamma0)`.
pub fn draw_orbit(
    kind: PotentialKind,
    rng: &mut impl Rng,
) -> (PotentialParams, MotionConstants, f64) {
    let (p, c) = draw_bounded(kind, rng);
    let gamma0 = rng.gen_range(0.5..3.0);
    let v0 = eval_effective(&p, &c, gamma0).unwrap();
    let h = v0 + rng.gen_range(0.2..4.0);
    (p, MotionConstants::new(h, c.p_theta), gamma0)
}

pub fn kinds() -> [PotentialKind; 3] {
    [PotentialKind::V1, PotentialKind::V2, PotentialKind::V3]
}

/// Named parameter sets used across the suite.
pub fn named_cases() -> Vec<(&'static str, PotentialParams, MotionConstants)> {
    let c10 = MotionConstants::new(10.0, 0.0);
    let v1 = |b, gamma, delta| PotentialParams::V1 { b, gamma, delta };
    let v2 = |a, b, gamma, delta| PotentialParams::V2 { a, b, gamma, delta };
    let v3 = |a, b, gamma, delta, e| PotentialParams::V3 {
        a,
        b,
        gamma,
        delta,
        e,
    };
    vec![
        ("v1_base", v1(1.0, 1.0, 1.0), c10),
        ("v1_attractive", v1(1.0, 5.0, 5.0), c10),
        ("v1_repulsive", v1(5.0, 1.0, 1.0), c10),
        ("v2_base", v2(1.0, 1.0, 1.0, 1.0), c10),
        ("v2_repulsive", v2(5.0, 1.0, 1.0, 1.0), c10),
        ("v2_attractive", v2(1.0, 5.0, 5.0, 5.0), c10),
        ("v3_bounded", v3(0.01, 0.01, 0.01, 0.01, 0.05), c10),
        ("v3_marginal", v3(1.0, 1.0, 1.0, 1.0, 0.0625), c10),
        ("v3_escape", v3(1.0, 1.0, 1.0, 1.0, 0.1), c10),
        (
            "v3_double_well",
            v3(3.0, -6.0, -6.0, 16.0, -0.2),
            MotionConstants::new(7.0, 0.0),
        ),
    ]
}
