use std::f64::consts::PI;

use deltaloop::dipole::BodyDipole;
use deltaloop::dynamics::{assemble_full_hamiltonian, dressed_basis};
use deltaloop::fields::DriveField;
use deltaloop::loops::{
    build_single_loop, closure_conditions, dressed_states, enumerate_pure_polarizations, loop_matrix_elements,
    loop_matrix_elements_closed_form, loop_product, loop_rabi_frequencies, verify_linear_orthogonality, LoopSpec,
    Triad, CLOSURE_TOL_MHZ, TRIAD_TAUS,
};
use deltaloop::rotor::RotationalConstants;
use deltaloop::Error;
use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

const TABLE: [[i32; 3]; 6] = [[1, -1, 0], [-1, 1, 0], [0, 1, 1], [0, -1, -1], [-1, 0, -1], [1, 0, 1]];

fn propanediol() -> (RotationalConstants, BodyDipole) {
    (
        RotationalConstants::new(8572.05, 3640.10, 2790.96).unwrap(),
        BodyDipole::new(1.916, 0.365, 1.201),
    )
}

fn constants() -> impl Strategy<Value = RotationalConstants> {
    (1000.0..20000.0f64, 0.1..0.9f64, 0.1..0.9f64)
        .prop_map(|(a, x, y)| RotationalConstants::new(a, a * x.max(y), a * x.min(y) * 0.99).unwrap())
}

fn dipole() -> impl Strategy<Value = BodyDipole> {
    let comp = prop_oneof![-3.0..-0.05f64, 0.05..3.0f64];
    (comp.clone(), comp.clone(), comp).prop_map(|(x, y, z)| BodyDipole::new(x, y, z))
}

fn field() -> impl Strategy<Value = DriveField> {
    prop::array::uniform3((0.0..3.0f64, -PI..PI))
        .prop_filter("nonzero", |c| c.iter().any(|(a, _)| *a > 1e-3))
        .prop_map(|c| DriveField::new(0.0, c).unwrap())
}

fn rotation() -> impl Strategy<Value = Rotation3<f64>> {
    (-PI..PI, -PI..PI, -PI..PI).prop_map(|(a, b, c)| Rotation3::from_euler_angles(a, b, c))
}

fn linear(dirs: [Vector3<f64>; 3], amps: [f64; 3]) -> [DriveField; 3] {
    [0, 1, 2].map(|i| DriveField::linear_polarization([dirs[i].x, dirs[i].y, dirs[i].z], amps[i], 0.0, 0.0).unwrap())
}

fn pure(sigmas: [i32; 3], amps: [f64; 3]) -> [DriveField; 3] {
    [0, 1, 2].map(|i| DriveField::pure(sigmas[i], amps[i], 0.0, 0.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_forms_match_hamiltonian(
        k in constants(), d in dipole(), which in 0..3usize, f1 in field(), f2 in field(), f3 in field(),
    ) {
        let taus = TRIAD_TAUS[which];
        let spec = LoopSpec::resonant(Triad::from_taus(&k, taus.0, taus.1).unwrap(), [f1, f2, f3], d);
        let h = loop_matrix_elements(&spec).unwrap();
        let c = loop_matrix_elements_closed_form(&spec).unwrap();
        let scale = spec.triad.reduced_elements(&d)[1].norm() * f2.total_amplitude();
        for (x, y) in [
            (h.c_b, c.c_b),
            (h.cprime_b, c.cprime_b),
            (h.cdprime_b, c.cdprime_b),
            (h.c_bprime, c.c_bprime),
            (h.c_bdprime, c.c_bdprime),
        ] {
            prop_assert!((x - y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn dressed_states_are_orthonormal(f1 in field(), f3 in field()) {
        let (k, d) = propanediol();
        let spec = LoopSpec::resonant(Triad::from_taus(&k, -1, 1).unwrap(), [f1, f1, f3], d);
        let t = dressed_basis(&dressed_states(&spec).unwrap());
        let gram = t.adjoint() * &t;
        for i in 0..7 {
            for j in 0..7 {
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn table_rows_close_for_any_molecule(k in constants(), d in dipole()) {
        for taus in TRIAD_TAUS {
            let rows = enumerate_pure_polarizations(&Triad::from_taus(&k, taus.0, taus.1).unwrap(), &d, [1.0; 3]).unwrap();
            let closed: Vec<[i32; 3]> = rows.iter().filter(|r| r.closed).map(|r| r.sigmas).collect();
            prop_assert_eq!(closed, TABLE.to_vec());
            for r in rows.iter().filter(|r| r.closed) {
                prop_assert_eq!(r.residual_max, 0.0);
            }
        }
    }

    #[test]
    fn rotated_orthogonal_triads_close(r in rotation(), signs in prop::array::uniform3(any::<bool>()), which in 0..3usize) {
        let (k, d) = propanediol();
        let taus = TRIAD_TAUS[which];
        let t = Triad::from_taus(&k, taus.0, taus.1).unwrap();
        let flip = |v: Vector3<f64>, s: bool| if s { -v } else { v };
        let dirs = [
            flip(r * Vector3::z(), signs[0]),
            flip(r * Vector3::x(), signs[1]),
            flip(r * Vector3::y(), signs[2]),
        ];
        let v = verify_linear_orthogonality(dirs.map(|v| [v.x, v.y, v.z]), &t, &d).unwrap();
        prop_assert!(v.closed, "residual {}", v.max_residual);
        let spec = LoopSpec::resonant(t, linear(dirs, [1.0, 0.75, 2.75]), d);
        let hr = build_single_loop(&spec, CLOSURE_TOL_MHZ).unwrap();
        let hl = build_single_loop(&spec.with_dipole(d.enantiomer()), CLOSURE_TOL_MHZ).unwrap();
        prop_assert_eq!(loop_product(&hr), -loop_product(&hl));
    }

    #[test]
    fn tilted_third_field_does_not_close(tilt in 1e-3..1.5f64) {
        let (k, d) = propanediol();
        let t = Triad::from_taus(&k, -1, 1).unwrap();
        let y = Rotation3::from_axis_angle(&Vector3::z_axis(), -tilt) * Vector3::y();
        let v = verify_linear_orthogonality([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [y.x, y.y, y.z]], &t, &d).unwrap();
        prop_assert!(!v.closed);
    }

    #[test]
    fn field_phase_moves_loop_phase(chi in -PI..PI, which in 0..6usize) {
        let (k, d) = propanediol();
        let t = Triad::from_taus(&k, -1, 1).unwrap();
        let base = pure(TABLE[which], [1.0, 0.75, 2.75]);
        let mut shifted = base;
        shifted[0] = shifted[0].phase_shifted(chi);
        let p0 = loop_product(&build_single_loop(&LoopSpec::resonant(t.clone(), base, d), CLOSURE_TOL_MHZ).unwrap());
        let spec = LoopSpec::resonant(t, shifted, d);
        let p1 = loop_product(&build_single_loop(&spec, CLOSURE_TOL_MHZ).unwrap());
        let pl = loop_product(&build_single_loop(&spec.with_dipole(d.enantiomer()), CLOSURE_TOL_MHZ).unwrap());
        prop_assert!((p1.norm() - p0.norm()).abs() < 1e-12 * p0.norm());
        prop_assert!((p1 - p0 * Complex64::from_polar(1.0, chi)).norm() < 1e-12 * p0.norm());
        prop_assert_eq!(p1, -pl);
    }
}

#[test]
fn loop_magnitude_is_the_same_for_all_table_rows() {
    let (k, d) = propanediol();
    for taus in TRIAD_TAUS {
        let t = Triad::from_taus(&k, taus.0, taus.1).unwrap();
        let mags: Vec<f64> = TABLE
            .iter()
            .map(|s| {
                let spec = LoopSpec::resonant(t.clone(), pure(*s, [1.0; 3]), d);
                loop_product(&build_single_loop(&spec, CLOSURE_TOL_MHZ).unwrap()).norm()
            })
            .collect();
        for m in &mags {
            assert!((m - mags[0]).abs() < 1e-12 * mags[0], "{mags:?}");
        }
    }
}

#[test]
fn projected_hamiltonian_is_the_loop_hamiltonian() {
    let (k, d) = propanediol();
    let t = Triad::from_taus(&k, -1, 1).unwrap();
    let z = Vector3::z();
    let x = Vector3::x();
    let y = Vector3::y();
    for fields in [pure(TABLE[0], [1.0, 0.75, 2.75]), linear([z, x, y], [1.0, 0.75, 2.75])] {
        let spec = LoopSpec::resonant(t.clone(), fields, d);
        let basis = dressed_basis(&dressed_states(&spec).unwrap());
        let h = assemble_full_hamiltonian(&spec).unwrap();
        let hd = basis.adjoint() * h.matrix() * &basis;
        let sl = build_single_loop(&spec, CLOSURE_TOL_MHZ).unwrap().matrix();
        // dressed order is a, b, b', b'', c, c', c''
        let idx = [0, 1, 4];
        for (i, &p) in idx.iter().enumerate() {
            for (j, &q) in idx.iter().enumerate() {
                assert!((hd[(p, q)] - sl[(i, j)]).norm() < 1e-12, "({i}, {j})");
            }
        }
        // nothing connects the loop to the rest
        for &p in &idx {
            for q in [2, 3, 5, 6] {
                assert!(hd[(p, q)].norm() < 1e-12);
            }
        }
    }
}

#[test]
fn natural_loop_phase_is_quarter_turn() {
    let (k, d) = propanediol();
    let spec = LoopSpec::resonant(Triad::from_taus(&k, -1, 1).unwrap(), pure(TABLE[0], [1.0; 3]), d);
    let p = loop_product(&build_single_loop(&spec, CLOSURE_TOL_MHZ).unwrap());
    assert!((p.arg().abs() - PI / 2.0).abs() < 1e-12, "arg = {}", p.arg());
}

#[test]
fn no_mu_y_no_loops() {
    let (k, _) = propanediol();
    let d = BodyDipole::new(1.916, 0.0, 1.201);
    let rows = enumerate_pure_polarizations(&Triad::from_taus(&k, -1, 1).unwrap(), &d, [1.0; 3]).unwrap();
    assert_eq!(rows.iter().filter(|r| r.closed).count(), 0);
    assert_eq!(rows.len(), 27);
}

#[test]
fn zxx_reports_not_closed() {
    let (k, d) = propanediol();
    let spec = LoopSpec::resonant(
        Triad::from_taus(&k, -1, 1).unwrap(),
        linear([Vector3::z(), Vector3::x(), Vector3::x()], [1.0; 3]),
        d,
    );
    assert!(closure_conditions(&spec).unwrap().iter().any(|r| r.norm() > 1e-6));
    assert!(matches!(
        build_single_loop(&spec, CLOSURE_TOL_MHZ),
        Err(Error::NotClosed { .. })
    ));
    // the unchecked frequencies are still available for reporting
    assert!(loop_rabi_frequencies(&spec).unwrap().omega1.norm() > 0.0);
}

#[test]
fn zero_outer_field_is_reported() {
    let (k, d) = propanediol();
    let mut fields = pure(TABLE[0], [1.0; 3]);
    fields[2] = fields[2].scaled(0.0);
    let spec = LoopSpec::resonant(Triad::from_taus(&k, -1, 1).unwrap(), fields, d);
    assert_eq!(dressed_states(&spec), Err(Error::ZeroField(3)));
}
