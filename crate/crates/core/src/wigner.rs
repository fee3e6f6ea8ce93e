//! Wigner 3j symbols for integer angular momenta.
//!
//! Values come from the Racah single-sum formula evaluated in exact rational
//! arithmetic. The square of the symbol is a rational number, so the only
//! floating point step is the final square root.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn factorial(n: i32) -> BigInt {
    debug_assert!(n >= 0);
    (2..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

fn check_domain(j: [i32; 3], m: [i32; 3]) -> Result<()> {
    for i in 0..3 {
        if j[i] < 0 {
            return Err(Error::Domain(format!("j{} = {} is negative", i + 1, j[i])));
        }
        if m[i].abs() > j[i] {
            return Err(Error::Domain(format!(
                "|m{}| = {} exceeds j{} = {}",
                i + 1,
                m[i].abs(),
                i + 1,
                j[i]
            )));
        }
    }
    Ok(())
}

/// Exact square of the 3j symbol together with its sign.
///
/// Returns `None` when the symbol vanishes by a selection rule.
fn racah(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> Option<(BigRational, bool)> {
    if m1 + m2 + m3 != 0 || j3 < (j1 - j2).abs() || j3 > j1 + j2 {
        return None;
    }

    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial(j3 - j2 + k + m1)
            * factorial(j3 - j1 + k - m2)
            * factorial(j1 + j2 - j3 - k)
            * factorial(j1 - k - m1)
            * factorial(j2 - k + m2);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return None;
    }

    let triangle = BigRational::new(
        factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3),
        factorial(j1 + j2 + j3 + 1),
    );
    let projections = factorial(j1 + m1)
        * factorial(j1 - m1)
        * factorial(j2 + m2)
        * factorial(j2 - m2)
        * factorial(j3 + m3)
        * factorial(j3 - m3);

    let phase_negative = (j1 - j2 - m3).rem_euclid(2) == 1;
    let negative = phase_negative ^ sum.is_negative();
    let square = triangle * BigRational::from_integer(projections) * &sum * &sum;
    Some((square, negative))
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)` for integer arguments.
///
/// Symbols that vanish by the projection-sum or triangle rule return exactly
/// `0.0`.
pub fn wigner3j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> Result<f64> {
    check_domain([j1, j2, j3], [m1, m2, m3])?;
    Ok(match racah(j1, j2, j3, m1, m2, m3) {
        None => 0.0,
        Some((square, negative)) => {
            let magnitude = square
                .to_f64()
                .expect("3j square is a finite rational bounded by one")
                .sqrt();
            if negative {
                -magnitude
            } else {
                magnitude
            }
        }
    })
}

/// Dipole coupling symbol `W^(sigma)_{J M, J' M'} = (J 1 J'; M -sigma -M')`.
///
/// Nonzero only when `M - M' = sigma`, which is the electric-dipole
/// selection rule on the laboratory projection.
pub fn w_coupling(j: i32, m: i32, jp: i32, mp: i32, sigma: i32) -> Result<f64> {
    if !(-1..=1).contains(&sigma) {
        return Err(Error::Domain(format!("sigma = {sigma} is not in {{-1, 0, 1}}")));
    }
    wigner3j(j, 1, jp, m, -sigma, -mp)
}
