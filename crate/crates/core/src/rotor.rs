//! Rigid asymmetric-top levels in the prolate symmetric-top basis.
//!
//! The Hamiltonian `A Jz^2 + B Jx^2 + C Jy^2` (frequencies in MHz) is block
//! diagonal in `J`. Each block is diagonalized separately and its levels are
//! labelled `tau = -J..J` by increasing energy.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::jacobi_eigen;

/// Energies closer than this are reported as degenerate.
pub const DEGENERACY_TOL_MHZ: f64 = 1e-6;

/// Coefficients below this magnitude are skipped when fixing the phase.
const PHASE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationalConstants {
    a: f64,
    b: f64,
    c: f64,
}

impl RotationalConstants {
    /// Requires `A >= B >= C > 0`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Range("rotational constants must be finite".into()));
        }
        if !(c > 0.0) {
            return Err(Error::Range(format!("C = {c} MHz must be positive")));
        }
        if !(a >= b && b >= c) {
            return Err(Error::Range(format!(
                "rotational constants must satisfy A >= B >= C, got A = {a}, B = {b}, C = {c}"
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// True when all three constants differ, so `tau` labels are unambiguous.
    pub fn is_asymmetric(&self) -> bool {
        self.a > self.b && self.b > self.c
    }
}

/// One `(J, tau)` level: its energy over `h` and its expansion over `|J, K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymTopLevel {
    pub j: i32,
    pub tau: i32,
    /// Energy divided by Planck's constant, MHz.
    pub freq: f64,
    /// `A^J_{K,tau}` for `K = -J..=J`.
    pub coeffs: Vec<f64>,
}

impl AsymTopLevel {
    /// Coefficient of `|J, K)`; zero outside `-J..=J`.
    pub fn coeff(&self, k: i32) -> f64 {
        if k.abs() > self.j {
            0.0
        } else {
            self.coeffs[(k + self.j) as usize]
        }
    }

    pub fn label(&self) -> (i32, i32) {
        (self.j, self.tau)
    }
}

/// Rotational Hamiltonian block for one `J` in the `|J, K)` basis, rows and
/// columns ordered `K = -J..=J`.
pub fn rotor_hamiltonian_block(constants: &RotationalConstants, j: i32) -> DMatrix<f64> {
    assert!(j >= 0, "J must be non-negative");
    let (a, b, c) = (constants.a, constants.b, constants.c);
    let n = (2 * j + 1) as usize;
    let jj = (j * (j + 1)) as f64;
    let mut h = DMatrix::zeros(n, n);
    for k in -j..=j {
        let i = (k + j) as usize;
        let kf = k as f64;
        h[(i, i)] = a * kf * kf + 0.5 * (b + c) * (jj - kf * kf);
        if k + 2 <= j {
            let ladder = (jj - kf * (kf + 1.0)).sqrt() * (jj - (kf + 1.0) * (kf + 2.0)).sqrt();
            let v = 0.25 * (b - c) * ladder;
            h[(i + 2, i)] = v;
            h[(i, i + 2)] = v;
        }
    }
    h
}

fn fix_phase(v: &mut [f64]) {
    if let Some(first) = v.iter().copied().find(|x| x.abs() > PHASE_TOL) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

/// All `2J + 1` levels of one `J` block, ordered by `tau`.
///
/// Eigenvectors are orthonormal with the first non-negligible coefficient
/// positive. Energies that tie within [`DEGENERACY_TOL_MHZ`] are ordered by
/// their eigenvectors and logged as a warning.
pub fn rotor_levels(constants: &RotationalConstants, j: i32) -> Vec<AsymTopLevel> {
    let h = rotor_hamiltonian_block(constants, j);
    let eig = jacobi_eigen(&h);
    let n = h.nrows();

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|col| {
            let mut v: Vec<f64> = eig.vectors.column(col).iter().copied().collect();
            fix_phase(&mut v);
            (eig.values[col], v)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Reorder runs of near-equal energies by eigenvector.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 < DEGENERACY_TOL_MHZ {
            end += 1;
        }
        if end - start > 1 {
            log::warn!(
                "J = {j}: {} levels within {DEGENERACY_TOL_MHZ} MHz near {:.6} MHz, tau labels follow eigenvector order",
                end - start,
                pairs[start].0
            );
            pairs[start..end].sort_by(|x, y| lexicographic(&x.1, &y.1));
        }
        start = end;
    }

    pairs
        .into_iter()
        .enumerate()
        .map(|(i, (freq, coeffs))| AsymTopLevel {
            j,
            tau: i as i32 - j,
            freq,
            coeffs,
        })
        .collect()
}

/// Pairs of `tau` labels whose energies lie within [`DEGENERACY_TOL_MHZ`].
pub fn degenerate_pairs(levels: &[AsymTopLevel]) -> Vec<(i32, i32)> {
    levels
        .windows(2)
        .filter(|w| w[1].freq - w[0].freq < DEGENERACY_TOL_MHZ)
        .map(|w| (w[0].tau, w[1].tau))
        .collect()
}

/// A single level by its `(J, tau)` label.
pub fn rotor_level(constants: &RotationalConstants, j: i32, tau: i32) -> Result<AsymTopLevel> {
    if j < 0 || tau.abs() > j {
        return Err(Error::InvalidLevels(format!("no level with J = {j}, tau = {tau}")));
    }
    Ok(rotor_levels(constants, j).swap_remove((tau + j) as usize))
}

/// `f_upper - f_lower`, which must be positive.
pub fn transition_frequency(upper: &AsymTopLevel, lower: &AsymTopLevel) -> Result<f64> {
    if upper.freq <= lower.freq {
        return Err(Error::Ordering {
            upper: upper.freq,
            lower: lower.freq,
        });
    }
    Ok(upper.freq - lower.freq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn propanediol() -> RotationalConstants {
        RotationalConstants::new(8572.05, 3640.10, 2790.96).unwrap()
    }

    #[test]
    fn j0_block_is_zero() {
        let h = rotor_hamiltonian_block(&propanediol(), 0);
        assert_eq!(h, DMatrix::zeros(1, 1));
        let levels = rotor_levels(&propanediol(), 0);
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].freq, 0.0);
        assert_eq!(levels[0].coeffs, vec![1.0]);
    }

    #[test]
    fn spherical_top_block_is_scalar() {
        let k = RotationalConstants::new(1.0, 1.0, 1.0).unwrap();
        let h = rotor_hamiltonian_block(&k, 2);
        assert_eq!(h, DMatrix::identity(5, 5) * 6.0);
    }

    #[test]
    fn j1_levels_for_propanediol() {
        let levels = rotor_levels(&propanediol(), 1);
        let expected = [6431.06, 11363.01, 12212.15];
        for (level, f) in levels.iter().zip(expected) {
            assert!((level.freq - f).abs() < 1e-9, "{} vs {f}", level.freq);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((levels[0].coeffs[1] - 1.0).abs() < 1e-14);
        // |1,0> = (|1,1) - |1,-1)) / sqrt 2 up to a global sign
        assert!((levels[1].coeffs[0].abs() - s).abs() < 1e-14);
        assert!((levels[1].coeffs[0] + levels[1].coeffs[2]).abs() < 1e-14);
        assert_eq!(levels[1].coeffs[1], 0.0);
        assert!((levels[2].coeffs[0] - levels[2].coeffs[2]).abs() < 1e-14);
    }

    #[test]
    fn transitions_for_propanediol() {
        let k = propanediol();
        let a = rotor_level(&k, 0, 0).unwrap();
        let b = rotor_level(&k, 1, -1).unwrap();
        let c = rotor_level(&k, 1, 1).unwrap();
        assert!((transition_frequency(&c, &a).unwrap() - 12212.15).abs() < 1e-9);
        assert!((transition_frequency(&c, &b).unwrap() - 5781.09).abs() < 1e-9);
        assert!((transition_frequency(&b, &a).unwrap() - 6431.06).abs() < 1e-9);
        assert!(matches!(transition_frequency(&a, &b), Err(Error::Ordering { .. })));
    }

    #[test]
    fn constants_validation() {
        assert!(RotationalConstants::new(3.0, 2.0, 1.0).unwrap().is_asymmetric());
        assert!(!RotationalConstants::new(3.0, 2.0, 2.0).unwrap().is_asymmetric());
        assert!(matches!(RotationalConstants::new(3.0, 1.0, 2.0), Err(Error::Range(_))));
        assert!(matches!(RotationalConstants::new(3.0, 2.0, 0.0), Err(Error::Range(_))));
    }

    #[test]
    fn degenerate_levels_are_flagged() {
        let k = RotationalConstants::new(5.0, 2.0, 2.0).unwrap();
        let levels = rotor_levels(&k, 2);
        assert_eq!(degenerate_pairs(&levels).len(), 2);
        assert!(degenerate_pairs(&rotor_levels(&propanediol(), 2)).is_empty());
    }

    #[test]
    fn bad_label() {
        assert!(rotor_level(&propanediol(), 1, 2).is_err());
    }
}
