//! Spectral symbols: the pluggable Weyl-invariant entire factor of the
//! contour integrand. The continuation and residue statements depend only
//! on Weyl invariance and holomorphy, so any symbol with those properties
//! can stand in for the spherical-transform factor.

use crate::C64;

pub trait SpectralSymbol {
    /// Entire, Weyl-invariant in (x1, x2): invariant under both sign flips
    /// and under swapping the coordinates.
    fn eval(&self, x1: C64, x2: C64) -> C64;
    fn name(&self) -> &str;
}

/// The built-in symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinSymbol {
    /// sigma = 1.
    One,
    /// sigma = exp(-(x1^2 + x2^2)/25).
    Gauss,
    /// sigma = 1 + x1^2 x2^2.
    Poly,
}

impl BuiltinSymbol {
    pub const ALL: [BuiltinSymbol; 3] =
        [BuiltinSymbol::One, BuiltinSymbol::Gauss, BuiltinSymbol::Poly];

    pub fn from_name(name: &str) -> Option<BuiltinSymbol> {
        match name {
            "one" | "1" => Some(BuiltinSymbol::One),
            "gauss" => Some(BuiltinSymbol::Gauss),
            "poly" => Some(BuiltinSymbol::Poly),
            _ => None,
        }
    }
}

impl SpectralSymbol for BuiltinSymbol {
    fn eval(&self, x1: C64, x2: C64) -> C64 {
        match self {
            BuiltinSymbol::One => C64::new(1.0, 0.0),
            BuiltinSymbol::Gauss => (-(x1 * x1 + x2 * x2) / 25.0).exp(),
            BuiltinSymbol::Poly => 1.0 + x1 * x1 * x2 * x2,
        }
    }

    fn name(&self) -> &str {
        match self {
            BuiltinSymbol::One => "one",
            BuiltinSymbol::Gauss => "gauss",
            BuiltinSymbol::Poly => "poly",
        }
    }
}

/// Closure-backed symbol, mostly for tests (linear combinations and the
/// like). The caller is responsible for Weyl invariance.
pub struct FnSymbol<F: Fn(C64, C64) -> C64> {
    pub f: F,
    pub label: &'static str,
}

impl<F: Fn(C64, C64) -> C64> SpectralSymbol for FnSymbol<F> {
    fn eval(&self, x1: C64, x2: C64) -> C64 {
        (self.f)(x1, x2)
    }

    fn name(&self) -> &str {
        self.label
    }
}
