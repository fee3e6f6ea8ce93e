//! Closed cyclic three-level loops built from the rotational ground state.
//!
//! Fields 1 and 3 select the dressed states `|b>` and `|c>` from the
//! magnetic sublevels of two `J = 1` levels. Field 2 couples the two `J = 1`
//! levels, and the loop is closed when it couples `|b>` only to `|c>` and
//! `|c>` only to `|b>`. The four matrix elements that must vanish are the
//! closure residuals.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Rotation3, Unit, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dipole::{reduced_matrix_element, BodyDipole, RABI_MHZ_PER_DEBYE_V_PER_CM};
use crate::dynamics::{assemble_full_hamiltonian, SublevelBasis};
use crate::error::{Error, Result};
use crate::fields::{polarization_angles, DriveField, SIGMAS};
use crate::rotor::{rotor_level, transition_frequency, AsymTopLevel, RotationalConstants};

/// A field addresses a level pair when its frequency is this close, MHz.
pub const RESONANCE_TOL_MHZ: f64 = 1e-3;

/// Default threshold on closure residuals and Rabi magnitudes, MHz.
pub const CLOSURE_TOL_MHZ: f64 = 1e-9;

/// The three `(tau_b, tau_c)` choices of `J = 1` levels that form a loop with
/// the ground state, in the order `a`, `b`, `c` used by the command line.
pub const TRIAD_TAUS: [(i32, i32); 3] = [(-1, 1), (-1, 0), (0, 1)];

/// Closed rows of the pure-polarization table, `(sigma1, sigma2, sigma3)`,
/// in presentation order.
const PRESENTATION_ORDER: [[i32; 3]; 6] = [[1, -1, 0], [-1, 1, 0], [0, 1, 1], [0, -1, -1], [-1, 0, -1], [1, 0, 1]];

/// Ground state `a` and two `J = 1` levels `b`, `c` with `f_c > f_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triad {
    pub a: AsymTopLevel,
    pub b: AsymTopLevel,
    pub c: AsymTopLevel,
}

impl Triad {
    pub fn new(a: AsymTopLevel, b: AsymTopLevel, c: AsymTopLevel) -> Result<Self> {
        if a.j != 0 || b.j != 1 || c.j != 1 {
            return Err(Error::InvalidLevels(format!(
                "need J_a = 0 and J_b = J_c = 1, got {}, {}, {}",
                a.j, b.j, c.j
            )));
        }
        if !(c.freq > b.freq && b.freq > a.freq) {
            return Err(Error::InvalidLevels(format!(
                "need f_c > f_b > f_a, got {} > {} > {}",
                c.freq, b.freq, a.freq
            )));
        }
        Ok(Self { a, b, c })
    }

    /// Ground state plus the `J = 1` levels `tau_b` and `tau_c`.
    pub fn from_taus(constants: &RotationalConstants, tau_b: i32, tau_c: i32) -> Result<Self> {
        Self::new(
            rotor_level(constants, 0, 0)?,
            rotor_level(constants, 1, tau_b)?,
            rotor_level(constants, 1, tau_c)?,
        )
    }

    /// Transition frequencies `(f_ba, f_cb, f_ca)`, MHz.
    pub fn frequencies(&self) -> [f64; 3] {
        [
            self.b.freq - self.a.freq,
            self.c.freq - self.b.freq,
            self.c.freq - self.a.freq,
        ]
    }

    /// Reduced elements `(Gamma_ba, Gamma_cb, Gamma_ca)`, Debye.
    pub fn reduced_elements(&self, d: &BodyDipole) -> [Complex64; 3] {
        [
            reduced_matrix_element(&self.b, &self.a, d).value,
            reduced_matrix_element(&self.c, &self.b, d).value,
            reduced_matrix_element(&self.c, &self.a, d).value,
        ]
    }
}

/// Three levels, three fields and the molecule's dipole.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSpec {
    pub triad: Triad,
    /// Fields driving `a -> b`, `b -> c` and `a -> c`.
    pub fields: [DriveField; 3],
    pub dipole: BodyDipole,
}

impl LoopSpec {
    /// Checks that each field is resonant with its transition.
    pub fn new(triad: Triad, fields: [DriveField; 3], dipole: BodyDipole) -> Result<Self> {
        let targets = [
            transition_frequency(&triad.b, &triad.a)?,
            transition_frequency(&triad.c, &triad.b)?,
            transition_frequency(&triad.c, &triad.a)?,
        ];
        for (i, (f, target)) in fields.iter().zip(targets).enumerate() {
            if (f.freq - target).abs() >= RESONANCE_TOL_MHZ {
                return Err(Error::NotResonant {
                    field: i + 1,
                    freq: f.freq,
                    target,
                });
            }
        }
        Ok(Self { triad, fields, dipole })
    }

    /// Tunes every field exactly onto its transition.
    pub fn resonant(triad: Triad, fields: [DriveField; 3], dipole: BodyDipole) -> Self {
        let f = triad.frequencies();
        let fields = [
            fields[0].with_freq(f[0]),
            fields[1].with_freq(f[1]),
            fields[2].with_freq(f[2]),
        ];
        Self { triad, fields, dipole }
    }

    pub fn with_dipole(&self, dipole: BodyDipole) -> Self {
        Self { dipole, ..self.clone() }
    }

    pub fn with_fields(&self, fields: [DriveField; 3]) -> Self {
        Self { fields, ..self.clone() }
    }
}

/// Sublevel amplitude vectors over `M = +1, 0, -1`.
pub type SublevelVector = [Complex64; 3];

/// Dressed states of the `b` and `c` levels and their orthogonal partners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedStates {
    pub b: SublevelVector,
    pub b_prime: SublevelVector,
    pub b_dprime: SublevelVector,
    pub c: SublevelVector,
    pub c_prime: SublevelVector,
    pub c_dprime: SublevelVector,
}

/// `(|x>, |x'>, |x''>)` selected by one field's polarization.
fn dressed_triplet(field: &DriveField, index: usize) -> Result<[SublevelVector; 3]> {
    let angles = polarization_angles(field).map_err(|_| Error::ZeroField(index))?;
    let (st, ct) = angles.sin_cos_theta;
    let (sp, cp) = angles.sin_cos_phi;
    let e = angles.phases.map(|p| Complex64::from_polar(1.0, p));
    let total = field.total_amplitude();
    let main = SIGMAS.map(|s| field.rabi_amplitude(s) / total);
    let prime = [e[0] * sp, -e[1] * cp, Complex64::new(0.0, 0.0)];
    let dprime = [e[0] * (ct * cp), e[1] * (ct * sp), -e[2] * st];
    Ok([main, prime, dprime])
}

pub fn dressed_states(spec: &LoopSpec) -> Result<DressedStates> {
    let [b, b_prime, b_dprime] = dressed_triplet(&spec.fields[0], 1)?;
    let [c, c_prime, c_dprime] = dressed_triplet(&spec.fields[2], 3)?;
    Ok(DressedStates {
        b,
        b_prime,
        b_dprime,
        c,
        c_prime,
        c_dprime,
    })
}

/// Field-2 matrix elements between dressed states, MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopMatrixElements {
    /// `<c|H|b>`, which is half of `Omega_2`.
    pub c_b: Complex64,
    pub cprime_b: Complex64,
    pub cdprime_b: Complex64,
    pub c_bprime: Complex64,
    pub c_bdprime: Complex64,
}

impl LoopMatrixElements {
    /// `(<c'|H|b>, <c''|H|b>, <c|H|b'>, <c|H|b''>)`.
    pub fn residuals(&self) -> [Complex64; 4] {
        [self.cprime_b, self.cdprime_b, self.c_bprime, self.c_bdprime]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn braket(bra: &SublevelVector, block: &DMatrix<Complex64>, ket: &SublevelVector) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc += bra[i].conj() * block[(i, j)] * ket[j];
        }
    }
    acc
}

/// Dressed-state matrix elements read off the assembled sublevel Hamiltonian.
pub fn loop_matrix_elements(spec: &LoopSpec) -> Result<LoopMatrixElements> {
    let dressed = dressed_states(spec)?;
    let h = assemble_full_hamiltonian(spec)?;
    let block = DMatrix::from_fn(3, 3, |i, j| {
        h.matrix()[(SublevelBasis::C_START + i, SublevelBasis::B_START + j)]
    });
    Ok(LoopMatrixElements {
        c_b: braket(&dressed.c, &block, &dressed.b),
        cprime_b: braket(&dressed.c_prime, &block, &dressed.b),
        cdprime_b: braket(&dressed.c_dprime, &block, &dressed.b),
        c_bprime: braket(&dressed.c, &block, &dressed.b_prime),
        c_bdprime: braket(&dressed.c, &block, &dressed.b_dprime),
    })
}

/// The same matrix elements from closed trigonometric expressions in the
/// polarization angles of the three fields.
///
/// This route never builds a Hamiltonian and serves as its cross-check.
pub fn loop_matrix_elements_closed_form(spec: &LoopSpec) -> Result<LoopMatrixElements> {
    let zero = Complex64::new(0.0, 0.0);
    let a1 = polarization_angles(&spec.fields[0]).map_err(|_| Error::ZeroField(1))?;
    let a3 = polarization_angles(&spec.fields[2]).map_err(|_| Error::ZeroField(3))?;
    let e2 = spec.fields[1].total_amplitude();
    if e2 == 0.0 {
        return Ok(LoopMatrixElements {
            c_b: zero,
            cprime_b: zero,
            cdprime_b: zero,
            c_bprime: zero,
            c_bdprime: zero,
        });
    }
    let a2 = polarization_angles(&spec.fields[1])?;
    let gamma_cb = reduced_matrix_element(&spec.triad.c, &spec.triad.b, &spec.dipole).value;
    let g = gamma_cb * (e2 * RABI_MHZ_PER_DEBYE_V_PER_CM / (2.0 * 6f64.sqrt()));

    let (s1, c1) = a1.sin_cos_theta;
    let (sp1, cp1) = a1.sin_cos_phi;
    let (s2, c2) = a2.sin_cos_theta;
    let (sp2, cp2) = a2.sin_cos_phi;
    let (s3, c3) = a3.sin_cos_theta;
    let (sp3, cp3) = a3.sin_cos_phi;
    // phases indexed +1, 0, -1
    let [p1p, p10, p1m] = a1.phases;
    let [p2p, p20, p2m] = a2.phases;
    let [p3p, p30, p3m] = a3.phases;
    let ph = |x: f64| Complex64::from_polar(1.0, x);
    // The six sigma-resolved paths b(M) -> c(M')
    let mp_0 = ph(p1m + p2p - p30); // b(-1) -> c(0), sigma = +1
    let mm_0 = ph(p1m + p20 - p3m); // b(-1) -> c(-1), sigma = 0
    let zp_p = ph(p10 + p2p - p3p); // b(0) -> c(+1), sigma = +1
    let zm_m = ph(p10 + p2m - p3m); // b(0) -> c(-1), sigma = -1
    let pz_p = ph(p1p + p20 - p3p); // b(+1) -> c(+1), sigma = 0
    let pm_0 = ph(p1p + p2m - p30); // b(+1) -> c(0), sigma = -1

    let c_b = g
        * (-c1 * s2 * cp2 * s3 * sp3 * mp_0 - c1 * s2 * sp2 * c3 * mm_0 - s1 * sp1 * s2 * cp2 * s3 * cp3 * zp_p
            + s1 * sp1 * c2 * c3 * zm_m
            + s1 * cp1 * s2 * sp2 * s3 * cp3 * pz_p
            + s1 * cp1 * c2 * s3 * sp3 * pm_0);
    let cprime_b = g
        * (c1 * s2 * cp2 * cp3 * mp_0 - s1 * sp1 * s2 * cp2 * sp3 * zp_p + s1 * cp1 * s2 * sp2 * sp3 * pz_p
            - s1 * cp1 * c2 * cp3 * pm_0);
    let cdprime_b = g
        * (-c1 * s2 * cp2 * c3 * sp3 * mp_0 + c1 * s2 * sp2 * s3 * mm_0
            - s1 * sp1 * s2 * cp2 * c3 * cp3 * zp_p
            - s1 * sp1 * c2 * s3 * zm_m
            + s1 * cp1 * s2 * sp2 * c3 * cp3 * pz_p
            + s1 * cp1 * c2 * c3 * sp3 * pm_0);
    let c_bprime = g
        * (cp1 * s2 * cp2 * s3 * cp3 * zp_p - cp1 * c2 * c3 * zm_m
            + sp1 * s2 * sp2 * s3 * cp3 * pz_p
            + sp1 * c2 * s3 * sp3 * pm_0);
    let c_bdprime = g
        * (s1 * s2 * cp2 * s3 * sp3 * mp_0 + s1 * s2 * sp2 * c3 * mm_0 - c1 * sp1 * s2 * cp2 * s3 * cp3 * zp_p
            + c1 * sp1 * c2 * c3 * zm_m
            + c1 * cp1 * s2 * sp2 * s3 * cp3 * pz_p
            + c1 * cp1 * c2 * s3 * sp3 * pm_0);

    Ok(LoopMatrixElements {
        c_b,
        cprime_b,
        cdprime_b,
        c_bprime,
        c_bdprime,
    })
}

/// Closure residuals `(<c'|H|b>, <c''|H|b>, <c|H|b'>, <c|H|b''>)` in MHz.
pub fn closure_conditions(spec: &LoopSpec) -> Result<[Complex64; 4]> {
    Ok(loop_matrix_elements(spec)?.residuals())
}

/// Rabi frequencies of a three-level loop, MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleLoopHamiltonian {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub omega3: Complex64,
}

impl SingleLoopHamiltonian {
    pub fn omegas(&self) -> [Complex64; 3] {
        [self.omega1, self.omega2, self.omega3]
    }

    /// `(Omega1 |b><a| + Omega2 |c><b| + Omega3 |c><a| + h.c.) / 2` in the
    /// ordered basis `a, b, c`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let mut h = DMatrix::zeros(3, 3);
        for (row, col, omega) in [(1, 0, self.omega1), (2, 1, self.omega2), (2, 0, self.omega3)] {
            h[(row, col)] = omega * 0.5;
            h[(col, row)] = omega.conj() * 0.5;
        }
        h
    }
}

/// Loop Rabi frequencies without checking closure.
pub fn loop_rabi_frequencies(spec: &LoopSpec) -> Result<SingleLoopHamiltonian> {
    let [gamma_ba, _, gamma_ca] = spec.triad.reduced_elements(&spec.dipole);
    let scale = -RABI_MHZ_PER_DEBYE_V_PER_CM / 3f64.sqrt();
    let elements = loop_matrix_elements(spec)?;
    Ok(SingleLoopHamiltonian {
        omega1: gamma_ba * (scale * spec.fields[0].total_amplitude()),
        omega2: elements.c_b * 2.0,
        omega3: gamma_ca * (scale * spec.fields[2].total_amplitude()),
    })
}

/// Single-loop Hamiltonian, provided the configuration is closed and all
/// three couplings are present.
pub fn build_single_loop(spec: &LoopSpec, tol: f64) -> Result<SingleLoopHamiltonian> {
    let elements = loop_matrix_elements(spec)?;
    let residual = elements.max_residual();
    if !(residual < tol) {
        return Err(Error::NotClosed { residual, tol });
    }
    let h = loop_rabi_frequencies(spec)?;
    for (i, omega) in h.omegas().iter().enumerate() {
        if !(omega.norm() > tol) {
            return Err(Error::ZeroRabi {
                index: i + 1,
                magnitude: omega.norm(),
                tol,
            });
        }
    }
    Ok(h)
}

/// Gauge-invariant loop quantity `Omega1 Omega2 conj(Omega3)`, MHz^3.
pub fn loop_product(h: &SingleLoopHamiltonian) -> Complex64 {
    h.omega1 * h.omega2 * h.omega3.conj()
}

/// One configuration of pure spherical fields.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationRow {
    pub sigmas: [i32; 3],
    pub m_b: i32,
    pub m_c: i32,
    pub closed: bool,
    /// `|Omega_i|`, MHz.
    pub omega_abs: [f64; 3],
    pub residual_max: f64,
}

/// Tries all 27 combinations of pure spherical fields on one triad.
///
/// Closed rows come first in presentation order, rejected rows follow in
/// lexicographic order of `(sigma1, sigma2, sigma3)`.
pub fn enumerate_pure_polarizations(
    triad: &Triad,
    dipole: &BodyDipole,
    amplitudes: [f64; 3],
) -> Result<Vec<PolarizationRow>> {
    let mut rows = Vec::with_capacity(27);
    for s1 in [-1, 0, 1] {
        for s2 in [-1, 0, 1] {
            for s3 in [-1, 0, 1] {
                let fields = [
                    DriveField::pure(s1, amplitudes[0], 0.0, 0.0)?,
                    DriveField::pure(s2, amplitudes[1], 0.0, 0.0)?,
                    DriveField::pure(s3, amplitudes[2], 0.0, 0.0)?,
                ];
                let spec = LoopSpec::resonant(triad.clone(), fields, *dipole);
                let elements = loop_matrix_elements(&spec)?;
                let omegas = loop_rabi_frequencies(&spec)?;
                rows.push(PolarizationRow {
                    sigmas: [s1, s2, s3],
                    m_b: s1,
                    m_c: s3,
                    closed: build_single_loop(&spec, CLOSURE_TOL_MHZ).is_ok(),
                    omega_abs: omegas.omegas().map(|z| z.norm()),
                    residual_max: elements.max_residual(),
                });
            }
        }
    }
    let rank = |row: &PolarizationRow| {
        let pos = PRESENTATION_ORDER.iter().position(|s| *s == row.sigmas);
        (!row.closed, pos.unwrap_or(usize::MAX), row.sigmas)
    };
    rows.sort_by_key(rank);
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearVerdict {
    pub closed: bool,
    pub max_residual: f64,
}

/// Closure check for three linearly polarized fields of unit amplitude.
pub fn verify_linear_orthogonality(
    directions: [[f64; 3]; 3],
    triad: &Triad,
    dipole: &BodyDipole,
) -> Result<LinearVerdict> {
    let fields = [
        DriveField::linear_polarization(directions[0], 1.0, 0.0, 0.0)?,
        DriveField::linear_polarization(directions[1], 1.0, 0.0, 0.0)?,
        DriveField::linear_polarization(directions[2], 1.0, 0.0, 0.0)?,
    ];
    let spec = LoopSpec::resonant(triad.clone(), fields, *dipole);
    let max_residual = loop_matrix_elements(&spec)?.max_residual();
    Ok(LinearVerdict {
        closed: build_single_loop(&spec, CLOSURE_TOL_MHZ).is_ok(),
        max_residual,
    })
}

/// Directions closer than this to mutual orthogonality count as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Outcome of the sampled closure-versus-orthogonality check.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OrthogonalitySampling {
    pub samples: usize,
    pub closed: usize,
    pub orthogonal: usize,
    /// Closed samples whose directions are not mutually orthogonal.
    pub closed_not_orthogonal: usize,
    /// Orthogonal samples that failed to close.
    pub orthogonal_not_closed: usize,
    /// Largest `|cos|` between two directions over closed samples.
    pub max_dot_closed: f64,
}

impl OrthogonalitySampling {
    pub fn holds(&self) -> bool {
        self.closed_not_orthogonal == 0 && self.orthogonal_not_closed == 0
    }
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation3<f64> {
    let axis = random_unit(rng);
    let angle = rng.gen_range(0.0..(2.0 * PI));
    Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle)
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn max_pairwise_dot(d: &[Vector3<f64>; 3]) -> f64 {
    let u = d.map(|v| v.normalize());
    u[0].dot(&u[1])
        .abs()
        .max(u[0].dot(&u[2]).abs())
        .max(u[1].dot(&u[2]).abs())
}

/// Samples direction triads and checks that closure happens exactly for
/// mutually orthogonal ones.
///
/// Samples cycle through three kinds: independent random directions, a
/// randomly rotated, permuted and sign-flipped orthonormal frame, and such a
/// frame with one direction tilted by a small random angle.
pub fn sample_linear_orthogonality(
    triad: &Triad,
    dipole: &BodyDipole,
    samples: usize,
    seed: u64,
) -> Result<OrthogonalitySampling> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = OrthogonalitySampling {
        samples,
        ..Default::default()
    };
    for i in 0..samples {
        let dirs: [Vector3<f64>; 3] = match i % 3 {
            0 => [random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng)],
            kind => {
                let r = random_rotation(&mut rng);
                let mut frame = [r * Vector3::z(), r * Vector3::x(), r * Vector3::y()];
                for v in frame.iter_mut() {
                    if rng.gen_bool(0.5) {
                        *v = -*v;
                    }
                }
                let swap = rng.gen_range(0..3);
                frame.swap(swap, (swap + 1) % 3);
                if kind == 2 {
                    let which = rng.gen_range(0..3);
                    let tilt = 10f64.powf(rng.gen_range(-6.0..-2.0));
                    let axis = Unit::new_normalize(random_unit(&mut rng).cross(&frame[which]));
                    frame[which] = Rotation3::from_axis_angle(&axis, tilt) * frame[which];
                }
                frame
            }
        };
        let dot = max_pairwise_dot(&dirs);
        let verdict = verify_linear_orthogonality(dirs.map(|v| [v.x, v.y, v.z]), triad, dipole)?;
        let orthogonal = dot < ORTHOGONALITY_TOL;
        if orthogonal {
            out.orthogonal += 1;
            if !verdict.closed {
                out.orthogonal_not_closed += 1;
            }
        }
        if verdict.closed {
            out.closed += 1;
            out.max_dot_closed = out.max_dot_closed.max(dot);
            if !orthogonal {
                out.closed_not_orthogonal += 1;
            }
        }
    }
    Ok(out)
}
