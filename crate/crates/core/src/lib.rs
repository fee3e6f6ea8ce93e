//! Rotational structure, dipole couplings and closed cyclic three-level
//! loops for chiral asymmetric-top molecules driven by three microwave fields.
//!
//! ```
//! use deltaloop::{bundled_molecule, rotor_levels};
//!
//! let m = bundled_molecule("propanediol").unwrap();
//! let j1 = rotor_levels(&m.constants, 1);
//! assert!((j1[0].freq - 6431.06).abs() < 0.01);
//! ```

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dipole;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod linalg;
pub mod loops;
pub mod molecule;
pub mod rotor;
pub mod wigner;

pub use dipole::{rabi_frequency, reduced_matrix_element, BodyDipole, ReducedElement, RABI_MHZ_PER_DEBYE_V_PER_CM};
pub use dynamics::{
    assemble_full_hamiltonian, compare_full_vs_reduced, enantiomer_contrast, leakage, propagate, simulate,
    HermitianOperator, SublevelBasis,
};
pub use error::{Error, Result};
pub use fields::{polarization_angles, DriveField, PolarizationAngles};
pub use loops::{
    build_single_loop, closure_conditions, dressed_states, enumerate_pure_polarizations, loop_product,
    verify_linear_orthogonality, LoopSpec, SingleLoopHamiltonian, Triad, CLOSURE_TOL_MHZ,
};
pub use molecule::{bundled_molecule, parse_molecule_config, MoleculeConfig};
pub use rotor::{rotor_level, rotor_levels, transition_frequency, AsymTopLevel, RotationalConstants};
pub use wigner::{w_coupling, wigner3j};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/rotor-levels.md")]
    mod rotor_levels {}
    #[doc = include_str!("../../../book/src/couplings.md")]
    mod couplings {}
    #[doc = include_str!("../../../book/src/polarization.md")]
    mod polarization {}
    #[doc = include_str!("../../../book/src/single-loop.md")]
    mod single_loop {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics_chapter {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli_chapter {}
}
