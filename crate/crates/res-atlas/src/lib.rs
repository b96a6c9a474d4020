//! Resonance atlas for rank-two Riemannian symmetric spaces of noncompact
//! type with restricted root system BC2 (or its reduced form C2).
//!
//! The crate computes the Plancherel density of such a space in factored
//! form, meromorphically continues the resolvent of the Laplacian through
//! the continuous spectrum by contour deformation, tracks the resulting
//! Riemann-surface sheet structure, and enumerates the resonances (poles of
//! the continued resolvent) together with closed-form residue data. Every
//! closed form is cross-checked against an independent numerical contour
//! oracle in the test suite.
//!
//! Entry points, one runnable example per capability:
//!
//! ```text
//! cargo run --example catalog          # the five families and their root data
//! cargo run --example density          # Plancherel density, direct vs factored
//! cargo run --example deformation      # contour shrink: F = F_r + 2*pi*i*F_{r,res}
//! cargo run --example sheets           # branch points, charts, monodromy
//! cargo run --example residues         # closed-form vs numerical residues
//! cargo run --example resonance_table  # resonance enumeration with residue data
//! cargo run --example verify_all       # every verification suite at once
//! ```
//!
//! A thin CLI over the same library ships as the `res-atlas` binary
//! (`catalog`, `density`, `resonances`, `verify` subcommands).

pub mod contour;
pub mod continuation;
pub mod error;
pub mod gamma;
pub mod plancherel;
pub mod resonances;
pub mod rootdata;
pub mod symbol;
pub mod verify;

pub use error::{Error, Result};
pub use rootdata::{Family, RhoData, SpaceDescriptor, SpectralPoint};
pub use symbol::{BuiltinSymbol, SpectralSymbol};

use num_complex::Complex;

/// Complex scalar used throughout.
pub type C64 = Complex<f64>;

/// Exact rational scalar for root data and resonance bookkeeping.
pub type Rat = num_rational::Ratio<i64>;
