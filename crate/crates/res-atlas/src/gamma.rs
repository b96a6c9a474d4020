//! Complex gamma function via the Lanczos approximation, g = 607/128 with
//! 15 coefficients. Relative accuracy is ~1e-13 or better on the strip the
//! spherical-function factors need (|Im| up to a few hundred, moderate Re);
//! the reflection formula covers Re z < 1/2.

#![allow(clippy::excessive_precision)]

use crate::C64;

const G: f64 = 607.0 / 128.0;

#[rustfmt::skip]
const LANCZOS: [f64; 15] = [
     0.99999999999999709182,
    57.156235665862923517,
   -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
     0.33994649984811888699e-4,
     0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
     0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
     0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
     0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
     0.36899182659531622704e-5,
];

/// Gamma(z). Returns inf/NaN components at the poles (z = 0, -1, -2, ...);
/// callers that must detect poles exactly use `is_gamma_pole`.
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
        let pi = std::f64::consts::PI;
        let s = (pi * z).sin();
        pi / (s * gamma(C64::new(1.0, 0.0) - z))
    } else {
        let x = z - 1.0;
        let t = x + (G + 0.5);
        let mut a = C64::new(LANCZOS[0], 0.0);
        for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + k as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powc(x + 0.5) * (-t).exp() * a
    }
}

/// 1/Gamma(z), entire: exactly zero at the poles of Gamma.
pub fn recip_gamma(z: C64) -> C64 {
    if is_gamma_pole(z, 0.0) {
        return C64::new(0.0, 0.0);
    }
    gamma(z).finv()
}

/// True when z lies within `tol` of a pole of Gamma (a nonpositive integer).
pub fn is_gamma_pole(z: C64, tol: f64) -> bool {
    if z.re > 0.5 {
        return false;
    }
    let nearest = z.re.round();
    nearest <= 0.0 && (z.re - nearest).abs() <= tol && z.im.abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // Reference values computed with 30-digit arithmetic and frozen.
    #[rustfmt::skip]
    const REFERENCE: [(f64, f64, f64, f64); 8] = [
        (0.5,  0.0,  1.7724538509055160273,    0.0),
        (5.0,  0.0, 24.0,                      0.0),
        (0.25, 0.0,  3.6256099082219083119,    0.0),
        (-0.5, 0.0, -3.5449077018110320546,    0.0),
        (0.5,  1.0,  0.30069461726065581622,  -0.42496787943312381261),
        (3.2, -1.7, -0.32885571327896114776,  -1.4326313582847461114),
        (-2.3, 0.4, -0.37776333073497612215,  -0.5495155060742710449),
        (6.5,  2.5, -27.948402041625721585, -171.35416020992098667),
    ];

    #[test]
    fn matches_reference_values() {
        for &(re, im, gre, gim) in &REFERENCE {
            let got = gamma(c(re, im));
            let want = c(gre, gim);
            assert_relative_eq!(got.re, want.re, max_relative = 1e-12, epsilon = 1e-13);
            assert_relative_eq!(got.im, want.im, max_relative = 1e-12, epsilon = 1e-13);
        }
        // Large imaginary part, tiny magnitude: check relative norm error.
        let got = gamma(c(1.0, 10.0));
        let want = c(3.918929270881377214e-7, 1.1284479695846292885e-6);
        assert!((got - want).norm() / want.norm() < 1e-11);
    }

    #[test]
    fn functional_equation() {
        for &(re, im) in &[(0.7, 0.3), (2.5, -4.0), (-1.3, 0.9), (0.5, 12.0)] {
            let z = c(re, im);
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let z = c(1.7, 2.3);
        let a = gamma(z.conj());
        let b = gamma(z).conj();
        assert!((a - b).norm() / b.norm() < 1e-13);
    }

    #[test]
    fn recip_is_zero_at_poles() {
        assert_eq!(recip_gamma(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(recip_gamma(c(-3.0, 0.0)), c(0.0, 0.0));
        let z = c(0.3, 0.4);
        let prod = recip_gamma(z) * gamma(z);
        assert!((prod - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pole_detection() {
        assert!(is_gamma_pole(c(0.0, 0.0), 0.0));
        assert!(is_gamma_pole(c(-7.0, 0.0), 1e-9));
        assert!(!is_gamma_pole(c(-7.5, 0.0), 1e-9));
        assert!(!is_gamma_pole(c(3.0, 0.0), 1e-9));
        assert!(!is_gamma_pole(c(-2.0, 0.5), 1e-9));
    }
}
