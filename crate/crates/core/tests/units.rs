use orbits_core::units::{
    derive_scales, nondimensionalize, redimensionalize, redimensionalize_potential,
    to_dimensionless, PhysicalSystem, RawPotential, UnitKind,
};
use orbits_core::PotentialKind;
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * a.abs().max(b.abs())
}

fn system() -> impl Strategy<Value = PhysicalSystem> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, any::<bool>()).prop_map(|(m, q, b, neg)| {
        PhysicalSystem {
            mass: 10f64.powf(m),
            charge: if neg { -1.0 } else { 1.0 } * 10f64.powf(q),
            field: 10f64.powf(b),
        }
    })
}

fn coeff() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0, any::<bool>()).prop_map(|(e, neg)| if neg { -1.0 } else { 1.0 } * 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn coefficients_round_trip(
        sys in system(),
        kind in prop_oneof![Just(PotentialKind::V1), Just(PotentialKind::V2), Just(PotentialKind::V3)],
        a in coeff(), b in coeff(), c in coeff(), d in coeff(), e in coeff(),
    ) {
        let s = derive_scales(&sys).unwrap();
        let raw = RawPotential {
            kind,
            a: if kind == PotentialKind::V1 { s.charge_squared() } else { a },
            b,
            c,
            d,
            e: (kind == PotentialKind::V3).then_some(e),
        };
        let back = redimensionalize_potential(&nondimensionalize(&raw, &s).unwrap(), &s);
        prop_assert!(close(back.a, raw.a), "a: {} vs {}", back.a, raw.a);
        prop_assert!(close(back.b, raw.b));
        prop_assert!(close(back.c, raw.c));
        prop_assert!(close(back.d, raw.d));
        if let (Some(x), Some(y)) = (back.e, raw.e) {
            prop_assert!(close(x, y));
        }
    }

    #[test]
    fn scalar_round_trip(sys in system(), v in coeff()) {
        let s = derive_scales(&sys).unwrap();
        for unit in [UnitKind::Length, UnitKind::Time, UnitKind::Energy, UnitKind::Angmom] {
            prop_assert!(close(to_dimensionless(redimensionalize(v, unit, &s), unit, &s), v));
        }
    }

    #[test]
    fn scales_match_definitions(sys in system()) {
        let s = derive_scales(&sys).unwrap();
        let q2 = sys.charge * sys.charge;
        prop_assert!(close(s.length.powi(3), sys.mass / (sys.field * sys.field)));
        prop_assert!(close(s.frequency, sys.charge * sys.field / sys.mass));
        prop_assert!(close(s.energy_unit * s.length, q2));
        prop_assert!(close(s.angmom_unit, sys.mass * s.frequency * s.length * s.length));
    }
}

#[test]
fn dimensionless_energy_of_a_physical_coulomb_pair() {
    // q^2/rho at rho = 3 l_B is 1/3 in energy units
    let sys = PhysicalSystem {
        mass: 2.0,
        charge: 0.5,
        field: 0.7,
    };
    let s = derive_scales(&sys).unwrap();
    let rho = 3.0 * s.length;
    let energy = 0.25 / rho;
    assert!(close(
        to_dimensionless(energy, UnitKind::Energy, &s),
        1.0 / 3.0
    ));
}
