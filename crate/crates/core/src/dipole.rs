//! Molecule-frame dipoles, reduced matrix elements and Rabi frequencies.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rotor::AsymTopLevel;
use crate::wigner::w_coupling;

/// One Debye in C m.
pub const DEBYE_C_M: f64 = 3.33564e-30;

/// Planck constant in J s (exact SI value).
pub const PLANCK_J_S: f64 = 6.62607015e-34;

/// `mu E / h` in MHz for one Debye in a field of one V/cm (about 0.5034115).
pub const RABI_MHZ_PER_DEBYE_V_PER_CM: f64 = DEBYE_C_M / PLANCK_J_S * 100.0 * 1e-6;

/// Permanent dipole along the principal axes `x, y, z` (Debye, signed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyDipole {
    pub mu_x: f64,
    pub mu_y: f64,
    pub mu_z: f64,
}

/// Spherical components `mu_{-1}, mu_0, mu_{+1}` of a body-frame dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalDipole {
    pub minus: Complex64,
    pub zero: Complex64,
    pub plus: Complex64,
}

impl SphericalDipole {
    pub fn component(&self, sigma: i32) -> Complex64 {
        match sigma {
            -1 => self.minus,
            0 => self.zero,
            1 => self.plus,
            _ => panic!("spherical index {sigma} out of range"),
        }
    }
}

impl BodyDipole {
    pub fn new(mu_x: f64, mu_y: f64, mu_z: f64) -> Self {
        Self { mu_x, mu_y, mu_z }
    }

    /// `mu_0 = mu_z`, `mu_{+1} = (mu_x + i mu_y)/sqrt 2`,
    /// `mu_{-1} = -(mu_x - i mu_y)/sqrt 2`.
    pub fn spherical_components(&self) -> SphericalDipole {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        SphericalDipole {
            minus: Complex64::new(-self.mu_x * s, self.mu_y * s),
            zero: Complex64::new(self.mu_z, 0.0),
            plus: Complex64::new(self.mu_x * s, self.mu_y * s),
        }
    }

    /// Mirror image: `mu_z` changes sign, so `mu_x mu_y mu_z` does too.
    pub fn enantiomer(&self) -> Self {
        Self {
            mu_x: self.mu_x,
            mu_y: self.mu_y,
            mu_z: -self.mu_z,
        }
    }

    /// Sign of `mu_x mu_y mu_z`, or `None` if any component vanishes.
    pub fn handedness(&self) -> Option<i8> {
        let p = self.mu_x * self.mu_y * self.mu_z;
        if self.mu_x == 0.0 || self.mu_y == 0.0 || self.mu_z == 0.0 {
            None
        } else if p > 0.0 {
            Some(1)
        } else {
            Some(-1)
        }
    }
}

/// Polarization- and `M`-independent part of a rotational transition dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedElement {
    /// Debye.
    pub value: Complex64,
    pub upper: (i32, i32),
    pub lower: (i32, i32),
}

fn parity_sign(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Reduced matrix element `Gamma` between two asymmetric-top levels.
///
/// Sums the body-frame spherical dipole components against the symmetric-top
/// expansion coefficients of both levels. Levels with `|dJ| > 1` give exactly
/// zero.
pub fn reduced_matrix_element(upper: &AsymTopLevel, lower: &AsymTopLevel, d: &BodyDipole) -> ReducedElement {
    let mut value = Complex64::new(0.0, 0.0);
    if (upper.j - lower.j).abs() <= 1 {
        let mu = d.spherical_components();
        let (ja, jb) = (upper.j, lower.j);
        for sp in -1..=1 {
            let mut inner = 0.0;
            for ka in -ja..=ja {
                let kb = ka - sp;
                if kb.abs() > jb {
                    continue;
                }
                let w = w_coupling(ja, ka, jb, kb, sp).expect("projections within range");
                inner += parity_sign(sp - kb) * upper.coeff(ka) * lower.coeff(kb) * w;
            }
            value += mu.component(sp) * inner;
        }
        value *= (((2 * ja + 1) * (2 * jb + 1)) as f64).sqrt();
    }
    ReducedElement {
        value,
        upper: upper.label(),
        lower: lower.label(),
    }
}

/// Reduced element between pure symmetric-top states `|J_a, K_a)` and
/// `|J_b, K_b)`.
///
/// Only one body-frame component, `sigma' = K_a - K_b`, survives, which is
/// the `dK` selection rule that rules out closed loops for symmetric tops.
pub fn symtop_reduced_element(ja: i32, ka: i32, jb: i32, kb: i32, d: &BodyDipole) -> Result<Complex64> {
    if ka.abs() > ja || kb.abs() > jb || ja < 0 || jb < 0 {
        return Err(Error::Domain(format!(
            "symmetric-top labels out of range: ({ja}, {ka}) <- ({jb}, {kb})"
        )));
    }
    let mu = d.spherical_components();
    let mut value = Complex64::new(0.0, 0.0);
    for sp in -1..=1 {
        let w = w_coupling(ja, ka, jb, kb, sp)?;
        value += mu.component(sp) * (parity_sign(sp - kb) * w);
    }
    Ok(value * (((2 * ja + 1) * (2 * jb + 1)) as f64).sqrt())
}

/// Rabi frequency from a precomputed reduced element, MHz.
#[allow(clippy::too_many_arguments)]
pub(crate) fn rabi_from_gamma(
    gamma: Complex64,
    j_upper: i32,
    m_upper: i32,
    j_lower: i32,
    m_lower: i32,
    sigma: i32,
    amplitude_v_per_cm: f64,
    phase_rad: f64,
) -> Complex64 {
    if m_upper - m_lower != sigma || amplitude_v_per_cm == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let w = w_coupling(j_upper, m_upper, j_lower, m_lower, sigma).expect("projections within range");
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let scale = parity_sign(m_lower + sigma) * amplitude_v_per_cm * RABI_MHZ_PER_DEBYE_V_PER_CM * w;
    Complex64::from_polar(scale, phase_rad) * gamma
}

/// Rabi frequency of one spherical field component `sigma` driving
/// `|lower, M_lower> -> |upper, M_upper>`, in MHz.
///
/// Exactly zero unless `M_upper - M_lower = sigma`.
#[allow(clippy::too_many_arguments)]
pub fn rabi_frequency(
    upper: &AsymTopLevel,
    m_upper: i32,
    lower: &AsymTopLevel,
    m_lower: i32,
    sigma: i32,
    amplitude_v_per_cm: f64,
    phase_rad: f64,
    d: &BodyDipole,
) -> Result<Complex64> {
    if m_upper.abs() > upper.j || m_lower.abs() > lower.j {
        return Err(Error::Domain(format!(
            "projection out of range: M_upper = {m_upper}, M_lower = {m_lower}"
        )));
    }
    if !(-1..=1).contains(&sigma) {
        return Err(Error::Domain(format!("sigma = {sigma} is not in {{-1, 0, 1}}")));
    }
    if !(amplitude_v_per_cm >= 0.0) {
        return Err(Error::Range(format!(
            "field amplitude {amplitude_v_per_cm} must be non-negative"
        )));
    }
    let gamma = reduced_matrix_element(upper, lower, d).value;
    Ok(rabi_from_gamma(
        gamma,
        upper.j,
        m_upper,
        lower.j,
        m_lower,
        sigma,
        amplitude_v_per_cm,
        phase_rad,
    ))
}
