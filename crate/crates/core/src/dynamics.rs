//! Resonant rotating-wave dynamics on the seven sublevels of a triad.
//!
//! Basis order: `a`, then `b` with `M = +1, 0, -1`, then `c` with
//! `M = +1, 0, -1`. Energies are MHz and times microseconds, so the
//! propagator is `exp(-i 2 pi H t)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dipole::rabi_from_gamma;
use crate::error::{Error, Result};
use crate::fields::SIGMAS;
use crate::linalg::SpectralPropagator;
use crate::loops::{dressed_states, loop_rabi_frequencies, DressedStates, LoopSpec, SublevelVector, RESONANCE_TOL_MHZ};

/// Largest tolerated `|H - H^dagger|` entry, MHz.
pub const HERMITICITY_TOL: f64 = 1e-14;

/// Index layout of the seven-dimensional sublevel space.
pub struct SublevelBasis;

impl SublevelBasis {
    pub const DIM: usize = 7;
    pub const A: usize = 0;
    pub const B_START: usize = 1;
    pub const C_START: usize = 4;

    fn m_offset(m: i32) -> usize {
        assert!((-1..=1).contains(&m), "M = {m} out of range");
        (1 - m) as usize
    }

    pub fn b(m: i32) -> usize {
        Self::B_START + Self::m_offset(m)
    }

    pub fn c(m: i32) -> usize {
        Self::C_START + Self::m_offset(m)
    }

    /// `(level, M)` for every basis index, with level `'a'`, `'b'` or `'c'`.
    pub fn labels() -> [(char, i32); 7] {
        [('a', 0), ('b', 1), ('b', 0), ('b', -1), ('c', 1), ('c', 0), ('c', -1)]
    }
}

/// Complex Hermitian matrix, MHz.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(DMatrix<Complex64>);

impl HermitianOperator {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Range("Hermitian operator must be square".into()));
        }
        let dev = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > HERMITICITY_TOL {
            return Err(Error::Range(format!("matrix deviates from Hermitian by {dev:e}")));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn propagator(&self) -> SpectralPropagator {
        SpectralPropagator::new(&self.0)
    }

    /// Basis indices whose row and column are identically zero.
    pub fn decoupled_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.0.row(i).iter().all(|z| *z == Complex64::new(0.0, 0.0)))
            .collect()
    }
}

// (frequency, gamma, upper J, upper indices by M, lower J, lower indices by M)
type Coupled = (f64, Complex64, i32, Vec<(i32, usize)>, i32, Vec<(i32, usize)>);

/// Full resonant Hamiltonian on the seven sublevels.
///
/// Every field couples each level pair it is resonant with through all of
/// its spherical components and every allowed `M` branch.
pub fn assemble_full_hamiltonian(spec: &LoopSpec) -> Result<HermitianOperator> {
    let t = &spec.triad;
    let f = t.frequencies();
    let gammas = t.reduced_elements(&spec.dipole);
    let pairs: [Coupled; 3] = [
        (f[0], gammas[0], 1, level_b(), 0, level_a()),
        (f[1], gammas[1], 1, level_c(), 1, level_b()),
        (f[2], gammas[2], 1, level_c(), 0, level_a()),
    ];

    let mut h = DMatrix::<Complex64>::zeros(SublevelBasis::DIM, SublevelBasis::DIM);
    for (index, field) in spec.fields.iter().enumerate() {
        let resonant: Vec<_> = pairs
            .iter()
            .filter(|p| (field.freq - p.0).abs() < RESONANCE_TOL_MHZ)
            .collect();
        if resonant.len() > 1 {
            return Err(Error::ResonanceAmbiguity {
                field: index + 1,
                freq: field.freq,
            });
        }
        for (_, gamma, ju, upper, jl, lower) in resonant {
            for sigma in SIGMAS {
                let comp = field.component(sigma);
                for &(mu, iu) in upper {
                    for &(ml, il) in lower {
                        let omega = rabi_from_gamma(*gamma, *ju, mu, *jl, ml, sigma, comp.amplitude, comp.phase);
                        if omega != Complex64::new(0.0, 0.0) {
                            h[(iu, il)] += omega * 0.5;
                            h[(il, iu)] += omega.conj() * 0.5;
                        }
                    }
                }
            }
        }
    }
    HermitianOperator::new(h)
}

fn level_a() -> Vec<(i32, usize)> {
    vec![(0, SublevelBasis::A)]
}

fn level_b() -> Vec<(i32, usize)> {
    [1, 0, -1].iter().map(|&m| (m, SublevelBasis::b(m))).collect()
}

fn level_c() -> Vec<(i32, usize)> {
    [1, 0, -1].iter().map(|&m| (m, SublevelBasis::c(m))).collect()
}

/// `exp(-i 2 pi H t) psi0` with `t` in microseconds.
pub fn propagate(h: &HermitianOperator, psi0: &DVector<Complex64>, t_us: f64) -> DVector<Complex64> {
    h.propagator().evolve(psi0, t_us)
}

fn embed(v: &SublevelVector, start: usize) -> DVector<Complex64> {
    let mut out = DVector::zeros(SublevelBasis::DIM);
    for (i, z) in v.iter().enumerate() {
        out[start + i] = *z;
    }
    out
}

/// Columns `a, b, b', b'', c, c', c''` as vectors in the sublevel basis.
pub fn dressed_basis(d: &DressedStates) -> DMatrix<Complex64> {
    let mut a = DVector::zeros(SublevelBasis::DIM);
    a[SublevelBasis::A] = Complex64::new(1.0, 0.0);
    let cols = [
        a,
        embed(&d.b, SublevelBasis::B_START),
        embed(&d.b_prime, SublevelBasis::B_START),
        embed(&d.b_dprime, SublevelBasis::B_START),
        embed(&d.c, SublevelBasis::C_START),
        embed(&d.c_prime, SublevelBasis::C_START),
        embed(&d.c_dprime, SublevelBasis::C_START),
    ];
    DMatrix::from_columns(&cols)
}

/// Sublevel state `x_a |a> + x_b |b> + x_c |c>`.
pub fn loop_state(d: &DressedStates, x: [Complex64; 3]) -> DVector<Complex64> {
    let mut psi = embed(&d.b, SublevelBasis::B_START) * x[1] + embed(&d.c, SublevelBasis::C_START) * x[2];
    psi[SublevelBasis::A] += x[0];
    psi
}

/// Amplitudes `(<a|psi>, <b|psi>, <c|psi>)`.
pub fn loop_amplitudes(d: &DressedStates, psi: &DVector<Complex64>) -> [Complex64; 3] {
    let proj = |v: &SublevelVector, start: usize| -> Complex64 {
        v.iter().enumerate().map(|(i, z)| z.conj() * psi[start + i]).sum()
    };
    [
        psi[SublevelBasis::A],
        proj(&d.b, SublevelBasis::B_START),
        proj(&d.c, SublevelBasis::C_START),
    ]
}

/// Populations of `a`, `b`, `c` along a time grid for a sublevel initial state.
pub fn loop_populations(spec: &LoopSpec, psi0: &DVector<Complex64>, t_grid: &[f64]) -> Result<Vec<[f64; 3]>> {
    let dressed = dressed_states(spec)?;
    let prop = assemble_full_hamiltonian(spec)?.propagator();
    Ok(t_grid
        .iter()
        .map(|&t| loop_amplitudes(&dressed, &prop.evolve(psi0, t)).map(|z| z.norm_sqr()))
        .collect())
}

/// Largest population outside `span{a, b, c}` over the grid.
pub fn leakage(spec: &LoopSpec, psi0_in_loop: [Complex64; 3], t_grid: &[f64]) -> Result<f64> {
    let dressed = dressed_states(spec)?;
    let psi0 = loop_state(&dressed, psi0_in_loop);
    Ok(loop_populations(spec, &psi0, t_grid)?
        .iter()
        .map(|p| 1.0 - p.iter().sum::<f64>())
        .fold(0.0, f64::max))
}

/// One point of a simulated population time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsSample {
    pub t_us: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_c: f64,
    pub leakage: f64,
}

/// Evolution of `|a>` under the full Hamiltonian.
pub fn simulate(spec: &LoopSpec, t_grid: &[f64]) -> Result<Vec<DynamicsSample>> {
    let mut psi0 = DVector::zeros(SublevelBasis::DIM);
    psi0[SublevelBasis::A] = Complex64::new(1.0, 0.0);
    let pops = loop_populations(spec, &psi0, t_grid)?;
    Ok(t_grid
        .iter()
        .zip(pops)
        .map(|(&t_us, [p_a, p_b, p_c])| DynamicsSample {
            t_us,
            p_a,
            p_b,
            p_c,
            leakage: 1.0 - (p_a + p_b + p_c),
        })
        .collect())
}

/// Loop populations of the two enantiomers at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastSample {
    pub t_us: f64,
    /// `(P_a, P_b, P_c)` for the dipole as given.
    pub right: [f64; 3],
    /// `(P_a, P_b, P_c)` for its mirror image.
    pub left: [f64; 3],
}

impl ContrastSample {
    pub fn delta_c(&self) -> f64 {
        self.right[2] - self.left[2]
    }
}

/// Evolves `|a>` for both enantiomers under identical fields.
pub fn enantiomer_contrast_series(spec: &LoopSpec, t_grid: &[f64]) -> Result<Vec<ContrastSample>> {
    let mut psi0 = DVector::zeros(SublevelBasis::DIM);
    psi0[SublevelBasis::A] = Complex64::new(1.0, 0.0);
    let right = loop_populations(spec, &psi0, t_grid)?;
    let left = loop_populations(&spec.with_dipole(spec.dipole.enantiomer()), &psi0, t_grid)?;
    Ok(t_grid
        .iter()
        .zip(right.into_iter().zip(left))
        .map(|(&t_us, (right, left))| ContrastSample { t_us, right, left })
        .collect())
}

pub fn enantiomer_contrast(spec: &LoopSpec, t_us: f64) -> Result<ContrastSample> {
    Ok(enantiomer_contrast_series(spec, &[t_us])?[0])
}

/// Largest distance between loop amplitudes evolved under the full sublevel
/// Hamiltonian and under the three-level loop Hamiltonian.
pub fn compare_full_vs_reduced(spec: &LoopSpec, psi0_in_loop: [Complex64; 3], t_grid: &[f64]) -> Result<f64> {
    let dressed = dressed_states(spec)?;
    let full = assemble_full_hamiltonian(spec)?.propagator();
    let reduced = HermitianOperator::new(loop_rabi_frequencies(spec)?.matrix())?.propagator();
    let psi_full0 = loop_state(&dressed, psi0_in_loop);
    let psi_red0 = DVector::from_row_slice(&psi0_in_loop);
    Ok(t_grid
        .iter()
        .map(|&t| {
            let projected = loop_amplitudes(&dressed, &full.evolve(&psi_full0, t));
            let red = reduced.evolve(&psi_red0, t);
            projected
                .iter()
                .zip(red.iter())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max))
}

/// Uniform grid `0, dt, 2 dt, ...` up to and including `t_max`.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !(t_max >= 0.0) {
        return Err(Error::Range(format!(
            "need dt > 0 and t_max >= 0, got dt = {dt}, t_max = {t_max}"
        )));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|i| i as f64 * dt).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dipole::BodyDipole;
    use crate::fields::DriveField;
    use crate::loops::Triad;
    use crate::rotor::RotationalConstants;

    fn circular_spec(amps: [f64; 3]) -> LoopSpec {
        let k = RotationalConstants::new(8572.05, 3640.10, 2790.96).unwrap();
        let t = Triad::from_taus(&k, -1, 1).unwrap();
        LoopSpec::resonant(
            t,
            [
                DriveField::pure(1, amps[0], 0.0, 0.0).unwrap(),
                DriveField::pure(-1, amps[1], 0.0, 0.0).unwrap(),
                DriveField::pure(0, amps[2], 0.0, 0.0).unwrap(),
            ],
            BodyDipole::new(1.916, 0.365, 1.201),
        )
    }

    #[test]
    fn circular_configuration_couplings() {
        let h = assemble_full_hamiltonian(&circular_spec([1.0, 0.75, 2.75])).unwrap();
        let m = h.matrix();
        let nonzero: Vec<(usize, usize)> = (0..7)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .filter(|&(i, j)| m[(i, j)].norm() > 0.0)
            .collect();
        let mut expected = vec![
            (SublevelBasis::b(1), SublevelBasis::A),
            (SublevelBasis::c(0), SublevelBasis::b(1)),
            (SublevelBasis::c(-1), SublevelBasis::b(0)),
            (SublevelBasis::c(0), SublevelBasis::A),
        ];
        expected.sort();
        let mut got = nonzero.clone();
        got.sort();
        assert_eq!(got, expected);
        assert_eq!(h.decoupled_indices(), vec![SublevelBasis::b(-1), SublevelBasis::c(1)]);
    }

    #[test]
    fn zero_fields_give_zero_matrix() {
        let h = assemble_full_hamiltonian(&circular_spec([0.0; 3])).unwrap();
        assert!(h.matrix().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn ambiguous_resonance_rejected() {
        // f_ba = B + C and f_cb = A - C coincide when A = B + 2C
        let k = RotationalConstants::new(3.0, 2.0, 0.5).unwrap();
        let t = Triad::from_taus(&k, -1, 1).unwrap();
        let spec = LoopSpec::resonant(
            t,
            [DriveField::pure(0, 1.0, 0.0, 0.0).unwrap(); 3],
            BodyDipole::new(1.0, 1.0, 1.0),
        );
        assert!(matches!(
            assemble_full_hamiltonian(&spec),
            Err(Error::ResonanceAmbiguity { field: 1, .. })
        ));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(1, 0)] = Complex64::new(1.0, 0.0);
        assert!(HermitianOperator::new(m).is_err());
    }

    #[test]
    fn propagation_at_zero_time_is_identity() {
        let h = assemble_full_hamiltonian(&circular_spec([1.0, 0.75, 2.75])).unwrap();
        let psi0 = DVector::from_fn(7, |i, _| Complex64::new((i as f64 + 1.0).sqrt(), 0.3 * i as f64));
        let psi0 = &psi0 / Complex64::new(psi0.norm(), 0.0);
        let psi = propagate(&h, &psi0, 0.0);
        assert!((psi - psi0).norm() < 1e-14);
    }

    #[test]
    fn time_grid_endpoints() {
        let g = time_grid(2.0, 0.5).unwrap();
        assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(time_grid(1.0, 0.0).is_err());
    }
}
