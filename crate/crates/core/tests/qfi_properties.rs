mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use qfisize::qfi::{effective_size, optimize_generator, qfi_exact, variance, GeneratorFamily};
use qfisize::rng;
use qfisize::state_space::operators::{quadrature, spin_axis};
use qfisize::state_space::SpaceSpec;
use qfisize::states::{make_state, StateSpec};

fn fock_space() -> SpaceSpec {
    SpaceSpec::Fock {
        cutoff: 24,
        modes: 1,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn qfi_between_zero_and_variance(seed in 0u64..10_000, angle in -3.2f64..3.2) {
        let rho = common::random_state(fock_space(), 6, &mut rng::stream(seed, 0));
        let x = quadrature(rho.space(), 0, angle).unwrap();
        let q = qfi_exact(&rho, &x).unwrap().value;
        prop_assert!(q >= -1e-10);
        prop_assert!(q <= variance(&rho, &x) + 1e-9);
    }

    #[test]
    fn pure_state_qfi_is_variance(seed in 0u64..10_000, angle in -3.2f64..3.2) {
        let mut r = rng::stream(seed, 1);
        let rho = loop {
            let s = common::random_state(fock_space(), 6, &mut r);
            if s.purity().unwrap() > 1.0 - 1e-12 {
                break s;
            }
        };
        let x = quadrature(rho.space(), 0, angle).unwrap();
        prop_assert!((qfi_exact(&rho, &x).unwrap().value - variance(&rho, &x)).abs() < 1e-8);
    }

    #[test]
    fn qfi_is_convex(seed in 0u64..10_000, p in 0.0f64..1.0) {
        let mut r = rng::stream(seed, 2);
        let a = common::random_state(fock_space(), 5, &mut r);
        let b = common::random_state(fock_space(), 5, &mut r);
        let x = quadrature(a.space(), 0, 0.4).unwrap();
        let mix = a.convex(&b, p).unwrap();
        let lhs = qfi_exact(&mix, &x).unwrap().value;
        let rhs = p * qfi_exact(&a, &x).unwrap().value + (1.0 - p) * qfi_exact(&b, &x).unwrap().value;
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn optimum_dominates_fixed_generators(seed in 0u64..10_000, n in 1usize..7) {
        let mut r = rng::stream(seed, 3);
        let space = SpaceSpec::Spin { particles: n };
        let rho = common::random_state(space, n + 1, &mut r);
        let best = optimize_generator(&rho, GeneratorFamily::CollectiveSpin).unwrap().qfi.value;
        for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.0, 0.8]] {
            let q = qfi_exact(&rho, &spin_axis(space, axis).unwrap()).unwrap().value;
            prop_assert!(q <= best + 1e-8);
        }
        prop_assert!(best <= (n * n) as f64 + 1e-8);
    }

    #[test]
    fn coherent_states_are_classical(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let rho = make_state(&StateSpec::Coherent { alpha: C64::new(re, im) }).unwrap();
        let e = effective_size(&rho, GeneratorFamily::PhaseSpace).unwrap();
        prop_assert!((e.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn spin_coherent_states_are_classical(n in 1usize..12, t in 0.0f64..std::f64::consts::PI, f in -std::f64::consts::PI..std::f64::consts::PI) {
        let axis = [t.sin() * f.cos(), t.sin() * f.sin(), t.cos()];
        let rho = make_state(&StateSpec::SpinCoherent { particles: n, axis }).unwrap();
        let e = effective_size(&rho, GeneratorFamily::CollectiveSpin).unwrap();
        prop_assert!((e.value - 1.0).abs() < 1e-8);
    }
}
