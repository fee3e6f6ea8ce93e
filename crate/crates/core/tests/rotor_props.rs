use deltaloop::rotor::{degenerate_pairs, rotor_hamiltonian_block, rotor_levels, RotationalConstants};
use nalgebra::DVector;
use proptest::prelude::*;

fn constants() -> impl Strategy<Value = RotationalConstants> {
    (100.0..30000.0f64, 0.05..0.95f64, 0.05..0.95f64)
        .prop_map(|(a, rb, rc)| RotationalConstants::new(a, a * rb.max(rc), a * rb.min(rc) * 0.999).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_residual(k in constants(), j in 0..=8i32) {
        let h = rotor_hamiltonian_block(&k, j);
        for level in rotor_levels(&k, j) {
            let v = DVector::from_vec(level.coeffs.clone());
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
            prop_assert!((&h * &v - &v * level.freq).norm() <= 1e-9 * h.norm());
        }
    }

    #[test]
    fn trace_equals_level_sum(k in constants(), j in 0..=8i32) {
        let trace = rotor_hamiltonian_block(&k, j).trace();
        let sum: f64 = rotor_levels(&k, j).iter().map(|l| l.freq).sum();
        prop_assert!((trace - sum).abs() <= 1e-9 * trace.abs().max(1.0));
    }

    #[test]
    fn levels_ascend_and_are_orthonormal(k in constants(), j in 0..=6i32) {
        let levels = rotor_levels(&k, j);
        prop_assert!(levels.windows(2).all(|w| w[0].freq <= w[1].freq));
        for (i, x) in levels.iter().enumerate() {
            prop_assert_eq!(x.tau, i as i32 - j);
            let first = x.coeffs.iter().find(|c| c.abs() > 1e-10).unwrap();
            prop_assert!(*first > 0.0);
            for y in &levels[i + 1..] {
                let dot: f64 = x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn j1_closed_form(k in constants()) {
        let (a, b, c) = (k.a(), k.b(), k.c());
        let levels = rotor_levels(&k, 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let tol = 1e-9 * a;
        prop_assert!((levels[0].freq - (b + c)).abs() < tol);
        prop_assert!((levels[1].freq - (a + c)).abs() < tol);
        prop_assert!((levels[2].freq - (a + b)).abs() < tol);
        // tau = -1 is |1,0); tau = 0 and 1 are (|1,1) -+ |1,-1))/sqrt2
        prop_assert!((levels[0].coeffs[1] - 1.0).abs() < 1e-12);
        prop_assert!((levels[1].coeffs[0] - s).abs() < 1e-12 && (levels[1].coeffs[2] + s).abs() < 1e-12);
        prop_assert!((levels[2].coeffs[0] - s).abs() < 1e-12 && (levels[2].coeffs[2] - s).abs() < 1e-12);
    }

    #[test]
    fn near_prolate_limit(a in 5000.0..20000.0f64, b in 1000.0..4000.0f64, eps in 1e-7..1e-3f64, j in 1..=5i32) {
        let k = RotationalConstants::new(a, b + eps, b).unwrap();
        let mut expected: Vec<f64> = (-j..=j)
            .map(|kk| a * (kk * kk) as f64 + (b + eps / 2.0) * (j * (j + 1) - kk * kk) as f64)
            .collect();
        expected.sort_by(f64::total_cmp);
        for (level, e) in rotor_levels(&k, j).iter().zip(expected) {
            // splitting of the +-K pairs is first order in eps
            prop_assert!((level.freq - e).abs() <= eps * (j * (j + 1)) as f64);
        }
    }
}

#[test]
fn prolate_limit_collapses_to_k_pairs() {
    let (a, b) = (9000.0, 2500.0);
    let k = RotationalConstants::new(a, b, b).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..=6 {
        let levels = rotor_levels(&k, j);
        for level in &levels {
            let support: Vec<i32> = (-j..=j).filter(|&kk| level.coeff(kk).abs() > 1e-12).collect();
            let kk = support[0].abs();
            assert!(
                support.iter().all(|x| x.abs() == kk),
                "J={j} mixes |K| values: {support:?}"
            );
            let e = a * (kk * kk) as f64 + b * (j * (j + 1) - kk * kk) as f64;
            assert!((level.freq - e).abs() < 1e-9 * e.max(1.0));
            match support.len() {
                1 => assert!((level.coeff(support[0]).abs() - 1.0).abs() < 1e-12),
                // inside a degenerate +-K pair any orthonormal combination is allowed
                _ => assert!((level.coeff(kk).powi(2) + level.coeff(-kk).powi(2) - 1.0).abs() < 1e-12),
            }
        }
        assert_eq!(degenerate_pairs(&levels).len(), j as usize);
    }
    // the K = 0 level of J = 1 and the symmetric/antisymmetric pair for a slightly asymmetric top
    let k = RotationalConstants::new(a, b + 1e-3, b).unwrap();
    let levels = rotor_levels(&k, 1);
    assert!((levels[1].coeffs[0].abs() - s).abs() < 1e-12);
    assert!((levels[2].coeffs[0] - levels[2].coeffs[2]).abs() < 1e-12);
}

#[test]
fn threaded_evaluation_is_bitwise_identical() {
    let k = RotationalConstants::new(8572.05, 3640.10, 2790.96).unwrap();
    let sequential: Vec<_> = (0..=10).map(|j| rotor_levels(&k, j)).collect();
    let threaded: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..=10).map(|j| s.spawn(move || rotor_levels(&k, j))).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for (x, y) in sequential.iter().zip(&threaded) {
        for (a, b) in x.iter().zip(y) {
            assert_eq!(a.freq.to_bits(), b.freq.to_bits());
            assert!(a.coeffs.iter().zip(&b.coeffs).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }
}
