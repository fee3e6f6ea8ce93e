//! Molecule descriptions in a line-based `key = value` format.
//!
//! ```text
//! # comment
//! name = propanediol
//! A_MHz = 8572.05
//! B_MHz = 3640.10
//! C_MHz = 2790.96
//! mu_x_D = 1.916
//! mu_y_D = 0.365
//! mu_z_D = 1.201
//! ```
//!
//! Every key must appear exactly once and no other key is accepted.

use crate::dipole::BodyDipole;
use crate::error::{Error, Result};
use crate::rotor::RotationalConstants;

const KEYS: [&str; 7] = ["name", "A_MHz", "B_MHz", "C_MHz", "mu_x_D", "mu_y_D", "mu_z_D"];

const PROPANEDIOL: &str = include_str!("../data/propanediol.mol");

#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeConfig {
    pub name: String,
    pub constants: RotationalConstants,
    pub dipole: BodyDipole,
}

pub fn parse_molecule_config(text: &str) -> Result<MoleculeConfig> {
    let mut values: [Option<(usize, String)>; 7] = Default::default();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let slot = KEYS.iter().position(|k| *k == key).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("unknown key `{key}`"),
        })?;
        if values[slot].is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("empty value for `{key}`"),
            });
        }
        values[slot] = Some((line_no, value.to_string()));
    }

    let mut numbers = [0.0; 6];
    for (slot, key) in KEYS.iter().enumerate() {
        let Some((line, value)) = &values[slot] else {
            return Err(Error::Parse {
                line: last_line,
                message: format!("missing key `{key}`"),
            });
        };
        if slot > 0 {
            numbers[slot - 1] = value
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse {
                    line: *line,
                    message: format!("`{key}` needs a finite number, found `{value}`"),
                })?;
        }
    }
    let [a, b, c, mu_x, mu_y, mu_z] = numbers;
    Ok(MoleculeConfig {
        name: values[0].take().map(|(_, v)| v).unwrap_or_default(),
        constants: RotationalConstants::new(a, b, c)?,
        dipole: BodyDipole::new(mu_x, mu_y, mu_z),
    })
}

/// Names of the molecules shipped with the library.
pub const BUNDLED: [&str; 1] = ["propanediol"];

/// A shipped molecule by name.
pub fn bundled_molecule(name: &str) -> Option<MoleculeConfig> {
    match name {
        "propanediol" => Some(parse_molecule_config(PROPANEDIOL).expect("bundled file parses")),
        _ => None,
    }
}
