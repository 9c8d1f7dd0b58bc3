mod support;

use orbits_core::polyroots::{
    descartes_positive_bound, kulkarni_restricted_a, solve_quartic, solve_real_roots,
    solve_real_roots_in, PolyCoeffs,
};
use orbits_core::turning::g_polynomial;
use orbits_core::{MotionConstants, OrbitError, PotentialParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{bisect, scan_roots};

fn poly(c: Vec<f64>) -> PolyCoeffs {
    PolyCoeffs::new(c).unwrap()
}

/// Sign-scan oracle on a uniform grid over the Cauchy interval.
fn oracle(c: &[f64]) -> Vec<f64> {
    let lead = c[c.len() - 1].abs();
    let bound = 1.0
        + c[..c.len() - 1]
            .iter()
            .map(|v| v.abs() / lead)
            .fold(0.0, f64::max);
    let eval = |x: f64| c.iter().rev().fold(0.0, |acc, &v| acc * x + v);
    let n = 20_000;
    let step = 2.0 * bound / n as f64;
    let mut out = Vec::new();
    let mut x0 = -bound;
    let mut f0 = eval(x0);
    for i in 1..=n {
        let x1 = -bound + step * i as f64;
        let f1 = eval(x1);
        if f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            out.push(bisect(&eval, x0, x1, f0));
        } else if f1 == 0.0 {
            out.push(x1);
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

#[test]
fn ferrari_matches_sign_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        let c: Vec<f64> = (0..5).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let p = poly(c.clone());
        let got = solve_quartic(&p).unwrap();
        let want = oracle(&c);
        for &r in &want {
            assert!(
                got.iter()
                    .any(|x| (x.value - r).abs() <= 1e-9 * r.abs().max(1.0)),
                "{c:?}: oracle root {r} not in {got:?}"
            );
        }
        for root in got.iter() {
            assert!(p.relative_residual(root.value) <= 1e-10, "{c:?}: {root:?}");
            // anything the scan missed must be a tangency it cannot see
            if !want
                .iter()
                .any(|&r| (root.value - r).abs() <= 1e-9 * r.abs().max(1.0))
            {
                assert!(
                    root.is_double() || got.len() > want.len(),
                    "{c:?}: {root:?}"
                );
            }
        }
    }
}

#[test]
fn quartics_with_planted_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let roots: Vec<f64> = (0..4).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let mut c = vec![1.0];
        for &r in &roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        let got = solve_quartic(&poly(c)).unwrap().values();
        let mut want = roots.clone();
        want.sort_by(f64::total_cmp);
        // close roots may merge; every planted root still has a partner
        for r in want {
            assert!(
                got.iter().any(|x| (x - r).abs() <= 1e-6 * r.abs().max(1.0)),
                "{roots:?} {got:?}"
            );
        }
    }
}

#[test]
fn descartes_bounds_positive_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10_000 {
        let deg = rng.gen_range(1..=8);
        let c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let p = poly(c);
        let positive = solve_real_roots(&p)
            .unwrap()
            .iter()
            .filter(|r| r.value > 0.0)
            .map(|r| if r.is_double() { 2 } else { 1 })
            .sum::<usize>();
        let bound = descartes_positive_bound(&p);
        assert!(positive <= bound, "{p:?}");
        assert_eq!(positive % 2, bound % 2, "{p:?}");
    }
}

#[test]
fn even_polynomials_via_squared_variable() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5000 {
        let half: Vec<f64> = (0..5).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let mut full = vec![0.0; 9];
        for (i, &v) in half.iter().enumerate() {
            full[2 * i] = v;
        }
        let p = poly(full);
        let q = poly(half);
        let mut via_x: Vec<f64> = solve_quartic(&q)
            .unwrap()
            .iter()
            .filter(|r| r.value > 0.0)
            .map(|r| r.value.sqrt())
            .collect();
        via_x.sort_by(f64::total_cmp);
        let direct: Vec<f64> = solve_real_roots_in(&p, 0.0, 1e3)
            .unwrap()
            .values()
            .into_iter()
            .filter(|&v| v > 0.0)
            .collect();
        if via_x.len() == direct.len() {
            for (a, b) in via_x.iter().zip(&direct) {
                assert!(
                    (a - b).abs() <= 1e-10 * a.max(1.0),
                    "{q:?}: {via_x:?} vs {direct:?}"
                );
            }
        } else {
            // only a near-tangency can be counted differently by the two paths
            for r in via_x.iter().chain(&direct) {
                assert!(
                    p.relative_residual(*r) <= 1e-8,
                    "{q:?}: {via_x:?} vs {direct:?}"
                );
            }
        }
    }
}

#[test]
fn g_polynomial_is_cleared_energy_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for kind in support::kinds() {
        for _ in 0..2000 {
            let (p, c) = support::draw_bounded(kind, &mut rng);
            let g = g_polynomial(&p, &c);
            let x = rng.gen_range(0.05..20.0);
            let v_eff = orbits_core::potentials::eval_effective(&p, &c, x).unwrap();
            let want = 16.0 * x.powi(g.prefactor_power as i32) * (c.h - v_eff);
            let scale = g.coeffs.magnitude(x);
            assert!(
                (g.eval(x) - want).abs() <= 1e-13 * scale,
                "{p:?} {c:?} at {x}"
            );
        }
    }
}

#[test]
fn kulkarni_worked_value() {
    // zeta = 16, s = 2, denominator 4*16*4 - 64 = 192, numerator 4*1 + 16*2 = 36
    let a = kulkarni_restricted_a(1.0, 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
    assert!((a - (4.0 - 1296.0 / 192.0)).abs() < 1e-12);
    assert!((a + 2.75).abs() < 1e-12);
}

#[test]
fn kulkarni_hand_values() {
    // E = 1/8: zeta = -16; B = 2, Gamma = 0, Delta = 1, p = 1, H = 0.5:
    // s = 2, den = 4(-16)4 - 64 = -320, num = -16 - 16 + 8 = -24
    let a = kulkarni_restricted_a(2.0, 0.0, 1.0, 0.125, 1.0, 0.5).unwrap();
    let want = -16.0 / 4.0 - 576.0 / -320.0;
    assert!((a - want).abs() < 1e-12, "{a} vs {want}");
    // Delta = 0, B = 0 leaves nothing
    assert_eq!(
        kulkarni_restricted_a(0.0, 1.0, 0.0, 0.0, 0.0, 1.0).unwrap(),
        0.0
    );
}

#[test]
fn kulkarni_domain_errors() {
    assert!(matches!(
        kulkarni_restricted_a(1.0, 1.0, 1.0, 0.0625, 0.0, 1.0),
        Err(OrbitError::RestrictionDomain(_))
    ));
    // E = 0 gives zeta = 16; s = 1 with Gamma + p^2 = 1 makes 64 - 64 = 0
    assert!(matches!(
        kulkarni_restricted_a(1.0, 1.0, 1.0, 0.0, 0.0, 0.5),
        Err(OrbitError::RestrictionDomain(_))
    ));
}

/// Under the restriction the monic sextic is `C(x)^2 + k (x + s)^2` with
/// `C = x^3 + (a4/2) x + a3/2`, so for `k < 0` it splits into two cubics.
#[test]
fn kulkarni_restriction_factorises_the_sextic() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut split = 0;
    for _ in 0..2000 {
        let b = rng.gen_range(-3.0..3.0);
        let gamma = rng.gen_range(-3.0..3.0);
        let delta = rng.gen_range(-3.0..3.0);
        let e = rng.gen_range(-1.0..0.05);
        let pt = rng.gen_range(-2.0..2.0);
        let h = rng.gen_range(-2.0..10.0);
        let Ok(a) = kulkarni_restricted_a(b, gamma, delta, e, pt, h) else {
            continue;
        };
        let p = PotentialParams::V3 {
            a,
            b,
            gamma,
            delta,
            e,
        };
        let g = g_polynomial(&p, &MotionConstants::new(h, pt));
        let k6 = g.coeffs.coeffs();
        let m: Vec<f64> = k6.iter().map(|v| v / k6[6]).collect();
        let (a0, a1, a2, a3, a4) = (m[0], m[1], m[2], m[3], m[4]);
        let k = a2 - a4 * a4 / 4.0;
        let lhs = (a1 - a4 * a3 / 2.0).powi(2);
        let rhs = 4.0 * k * (a0 - a3 * a3 / 4.0);
        assert!((lhs - rhs).abs() <= 1e-10 * (lhs.abs() + rhs.abs()).max(1.0));
        if k < -1e-6 {
            split += 1;
            let s = (a1 - a4 * a3 / 2.0) / (2.0 * k);
            let w = (-k).sqrt();
            for sign in [1.0, -1.0] {
                let cubic = poly(vec![a3 / 2.0 + sign * w * s, a4 / 2.0 + sign * w, 0.0, 1.0]);
                for r in solve_real_roots(&cubic).unwrap().values() {
                    assert!(g.coeffs.relative_residual(r) < 1e-9, "{p:?}: {r}");
                }
            }
        }
    }
    assert!(split > 100);
}

#[test]
fn scan_oracle_finds_planted_roots() {
    let r = scan_roots(|x| (x - 0.5) * (x - 2.0) * (x - 7.0), 1e-3, 1e2, 1000);
    assert_eq!(r.len(), 3);
    for (a, b) in r.iter().zip([0.5, 2.0, 7.0]) {
        assert!((a - b).abs() < 1e-14);
    }
}
