//! Drive fields in the spherical polarization basis.
//!
//! A field is `Re{ sum_sigma eps_sigma E_sigma exp(-i(2 pi nu t + phi_sigma)) }`
//! with `eps_0 = e_Z`, `eps_{+1} = (e_X + i e_Y)/sqrt 2` and
//! `eps_{-1} = -(e_X - i e_Y)/sqrt 2`. Amplitudes are stored non-negative;
//! any sign lives in the phase.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Spherical indices in storage order, matching the `M = +1, 0, -1` order
/// used for sublevels.
pub const SIGMAS: [i32; 3] = [1, 0, -1];

pub(crate) fn slot(sigma: i32) -> usize {
    assert!((-1..=1).contains(&sigma), "spherical index {sigma} out of range");
    (1 - sigma) as usize
}

fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Unit vector `eps_sigma` as complex Cartesian components `(X, Y, Z)`.
pub fn polarization_vector(sigma: i32) -> [Complex64; 3] {
    let s = FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    match sigma {
        1 => [Complex64::new(s, 0.0), Complex64::new(0.0, s), zero],
        0 => [zero, zero, Complex64::new(1.0, 0.0)],
        -1 => [Complex64::new(-s, 0.0), Complex64::new(0.0, s), zero],
        _ => panic!("spherical index {sigma} out of range"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalComponent {
    /// V/cm, non-negative.
    pub amplitude: f64,
    /// rad.
    pub phase: f64,
}

impl SphericalComponent {
    pub const OFF: Self = Self {
        amplitude: 0.0,
        phase: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveField {
    /// MHz.
    pub freq: f64,
    comps: [SphericalComponent; 3],
}

impl DriveField {
    /// Components given in `sigma = +1, 0, -1` order as `(amplitude, phase)`.
    pub fn new(freq: f64, comps: [(f64, f64); 3]) -> Result<Self> {
        let mut out = [SphericalComponent::OFF; 3];
        for (slot, (amplitude, phase)) in out.iter_mut().zip(comps) {
            if !(amplitude >= 0.0) || !amplitude.is_finite() || !phase.is_finite() {
                return Err(Error::Range(format!(
                    "field component ({amplitude}, {phase}) needs a finite non-negative amplitude"
                )));
            }
            *slot = SphericalComponent { amplitude, phase };
        }
        Ok(Self { freq, comps: out })
    }

    /// Field with a single spherical component.
    pub fn pure(sigma: i32, amplitude: f64, phase: f64, freq: f64) -> Result<Self> {
        if !(-1..=1).contains(&sigma) {
            return Err(Error::Domain(format!("sigma = {sigma} is not in {{-1, 0, 1}}")));
        }
        let mut comps = [(0.0, 0.0); 3];
        comps[slot(sigma)] = (amplitude, phase);
        Self::new(freq, comps)
    }

    /// Field from its complex Cartesian amplitude `v`, so that the field is
    /// `Re{ v exp(-i 2 pi nu t) }`.
    pub fn from_cartesian(v: [Complex64; 3], freq: f64) -> Self {
        let mut comps = [SphericalComponent::OFF; 3];
        for sigma in SIGMAS {
            let eps = polarization_vector(sigma);
            let c: Complex64 = eps.iter().zip(&v).map(|(e, x)| e.conj() * x).sum();
            comps[slot(sigma)] = if c.norm() == 0.0 {
                SphericalComponent::OFF
            } else {
                SphericalComponent {
                    amplitude: c.norm(),
                    phase: wrap_phase(-c.arg()),
                }
            };
        }
        Self { freq, comps }
    }

    /// Linearly polarized field along `direction` (normalized internally).
    pub fn linear_polarization(direction: [f64; 3], amplitude: f64, phase: f64, freq: f64) -> Result<Self> {
        let n = Vector3::from(direction);
        let norm = n.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        if !(amplitude >= 0.0) {
            return Err(Error::Range(format!("amplitude {amplitude} must be non-negative")));
        }
        let n = n / norm;
        let z = Complex64::from_polar(amplitude, -phase);
        Ok(Self::from_cartesian([z * n.x, z * n.y, z * n.z], freq))
    }

    pub fn component(&self, sigma: i32) -> SphericalComponent {
        self.comps[slot(sigma)]
    }

    /// `E_sigma exp(i phi_sigma)`, the factor entering the Rabi frequency.
    pub fn rabi_amplitude(&self, sigma: i32) -> Complex64 {
        let c = self.component(sigma);
        Complex64::from_polar(c.amplitude, c.phase)
    }

    /// Total amplitude `sqrt(sum_sigma E_sigma^2)`, V/cm.
    pub fn total_amplitude(&self) -> f64 {
        self.comps.iter().map(|c| c.amplitude * c.amplitude).sum::<f64>().sqrt()
    }

    /// Complex Cartesian amplitude `sum_sigma eps_sigma E_sigma exp(-i phi_sigma)`.
    pub fn cartesian_amplitude(&self) -> [Complex64; 3] {
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for sigma in SIGMAS {
            let c = self.component(sigma);
            let coef = Complex64::from_polar(c.amplitude, -c.phase);
            for (vi, ei) in v.iter_mut().zip(polarization_vector(sigma)) {
                *vi += ei * coef;
            }
        }
        v
    }

    /// Real field vector at time `t_us`, V/cm.
    pub fn real_field_at(&self, t_us: f64) -> [f64; 3] {
        let carrier = Complex64::from_polar(1.0, -2.0 * PI * self.freq * t_us);
        self.cartesian_amplitude().map(|v| (v * carrier).re)
    }

    /// Same field with its polarization rotated in the laboratory frame.
    pub fn rotated(&self, rotation: &Rotation3<f64>) -> Self {
        let v = self.cartesian_amplitude();
        let m = rotation.matrix();
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o += vj * m[(i, j)];
            }
        }
        Self::from_cartesian(out, self.freq)
    }

    /// Adds `chi` to every component phase.
    pub fn phase_shifted(&self, chi: f64) -> Self {
        let mut out = *self;
        for c in out.comps.iter_mut() {
            c.phase = wrap_phase(c.phase + chi);
        }
        out
    }

    /// Scales every amplitude by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        for c in out.comps.iter_mut() {
            c.amplitude *= factor;
        }
        out
    }

    pub fn with_freq(&self, freq: f64) -> Self {
        Self { freq, ..*self }
    }
}

/// `(theta, phi)` parametrization of the relative component amplitudes:
/// `sin(theta) cos(phi) = E_{+1}/E`, `sin(theta) sin(phi) = E_0/E`,
/// `cos(theta) = E_{-1}/E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationAngles {
    pub theta: f64,
    pub phi: f64,
    /// Component phases in `sigma = +1, 0, -1` order.
    pub phases: [f64; 3],
    /// `(sin theta, cos theta)` from amplitude ratios, so a missing
    /// component gives an exact zero.
    pub sin_cos_theta: (f64, f64),
    /// `(sin phi, cos phi)` from amplitude ratios.
    pub sin_cos_phi: (f64, f64),
}

impl PolarizationAngles {
    /// `(sin theta cos phi, sin theta sin phi, cos theta)`.
    pub fn weights(&self) -> [f64; 3] {
        let (st, ct) = self.sin_cos_theta;
        let (sp, cp) = self.sin_cos_phi;
        [st * cp, st * sp, ct]
    }
}

pub fn polarization_angles(f: &DriveField) -> Result<PolarizationAngles> {
    let e = f.total_amplitude();
    if e == 0.0 {
        return Err(Error::ZeroField(0));
    }
    let plus = f.component(1);
    let zero = f.component(0);
    let minus = f.component(-1);
    let rho = plus.amplitude.hypot(zero.amplitude);
    let sin_cos_phi = if rho == 0.0 {
        (0.0, 1.0)
    } else {
        (zero.amplitude / rho, plus.amplitude / rho)
    };
    Ok(PolarizationAngles {
        theta: (minus.amplitude / e).clamp(-1.0, 1.0).acos(),
        phi: zero.amplitude.atan2(plus.amplitude),
        phases: [plus.phase, zero.phase, minus.phase],
        sin_cos_theta: (rho / e, minus.amplitude / e),
        sin_cos_phi,
    })
}
