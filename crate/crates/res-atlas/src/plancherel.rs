//! Harish-Chandra c-function factors, the Plancherel density in direct
//! gamma-quotient form and in the factored Pi*P*Q form, and the rank-one
//! factors p1, q1 and polynomial vartheta0 used by the contour machinery.
//!
//! Identities between the direct and factored forms hold up to a nonzero
//! constant; the module fixes those constants once per space by matching
//! both sides at a single generic reference point lambda_ref = rho +
//! (0.3, 0.73). The offsets keep every root pairing of +-lambda_ref at
//! distance >= 0.03 from the integer and half-integer lattices where either
//! side degenerates.

use crate::error::{Error, Result};
use crate::gamma::{gamma, is_gamma_pole, recip_gamma};
use crate::rootdata::{rat_f64, rho_data, SpaceDescriptor, SpectralPoint};
use crate::{C64, Rat};

/// Calibration offsets added to rho, in the (x1, x2) coordinates.
pub const CAL_OFFSETS: (f64, f64) = (0.3, 0.73);

/// Absolute distance to a lattice point below which evaluation is refused.
pub const POLE_TOL: f64 = 1e-9;

/// The four positive unmultipliable roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootTag {
    Long1,
    Long2,
    MidMinus,
    MidPlus,
}

impl RootTag {
    pub const ALL: [RootTag; 4] = [
        RootTag::Long1,
        RootTag::Long2,
        RootTag::MidMinus,
        RootTag::MidPlus,
    ];

    pub fn is_long(self) -> bool {
        matches!(self, RootTag::Long1 | RootTag::Long2)
    }

    /// lambda_beta for this root.
    pub fn pairing(self, lambda: &SpectralPoint) -> C64 {
        match self {
            RootTag::Long1 => lambda.at_long1(),
            RootTag::Long2 => lambda.at_long2(),
            RootTag::MidMinus => lambda.at_mid_minus(),
            RootTag::MidPlus => lambda.at_mid_plus(),
        }
    }

    pub fn multiplicity(self, space: &SpaceDescriptor) -> u32 {
        if self.is_long() {
            space.m_l
        } else {
            space.m_m
        }
    }

    /// Multiplicity of beta/2 (zero unless beta is long and m_s > 0).
    pub fn half_multiplicity(self, space: &SpaceDescriptor) -> u32 {
        if self.is_long() {
            space.m_s
        } else {
            0
        }
    }

    pub fn rho_tilde(self, space: &SpaceDescriptor) -> Rat {
        let rho = rho_data(space);
        if self.is_long() {
            rho.rho_tilde_long
        } else {
            rho.rho_tilde_mid
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RootTag::Long1 => "beta1",
            RootTag::Long2 => "beta2",
            RootTag::MidMinus => "(beta2-beta1)/2",
            RootTag::MidPlus => "(beta2+beta1)/2",
        }
    }
}

/// cot(pi t), with the real part reduced mod 1 first (cot is 1-periodic)
/// and an exponential form that stays finite for large |Im t|.
pub fn cot_pi(t: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let tr = C64::new(t.re - t.re.round(), t.im);
    if t.im >= 0.0 {
        // q = e^{2 pi i t} has |q| <= 1; cot(pi t) = -i (1+q)/(1-q).
        let q = (2.0 * std::f64::consts::PI * i * tr).exp();
        -i * (1.0 + q) / (1.0 - q)
    } else {
        let u = (-2.0 * std::f64::consts::PI * i * tr).exp();
        i * (1.0 + u) / (1.0 - u)
    }
}

/// Nearest integer to t when t is within `tol` of one (cot pole test).
pub fn near_integer(t: C64, tol: f64) -> Option<i64> {
    let k = t.re.round();
    if (t.re - k).abs() <= tol && t.im.abs() <= tol {
        Some(k as i64)
    } else {
        None
    }
}

fn pole_err(function: &str, root: RootTag, offset: i64) -> Error {
    Error::PoleHit {
        what: format!("{function} [{} offset {offset}]", root.name()),
        where_: format!("lambda_{} = rho~ + {offset}", root.name()),
    }
}

/// One c-function factor:
/// c_beta(lambda) = 2^{-2u} Gamma(2u) / [Gamma(u + m_{beta/2}/4 + 1/2) Gamma(u + rho~_beta)]
/// with u the pairing of lambda against beta.
pub fn c_beta(space: &SpaceDescriptor, tag: RootTag, lambda: &SpectralPoint) -> Result<C64> {
    let u = tag.pairing(lambda);
    let h = f64::from(tag.half_multiplicity(space)) / 4.0 + 0.5;
    let rho_t = rat_f64(tag.rho_tilde(space));
    let two_u = 2.0 * u;
    if is_gamma_pole(two_u, POLE_TOL) {
        return Err(pole_err("Gamma(2 lambda_beta)", tag, two_u.re.round() as i64));
    }
    let pow = (-two_u * std::f64::consts::LN_2).exp();
    Ok(pow * gamma(two_u) * recip_gamma(u + h) * recip_gamma(u + rho_t))
}

/// 1 / c_beta, the building block of the density. Signals a structured
/// pole when a numerator gamma sits at a pole (a genuine or removable
/// singularity of the density; both are refused pointwise).
fn c_beta_recip(space: &SpaceDescriptor, tag: RootTag, u: C64) -> Result<C64> {
    let h = f64::from(tag.half_multiplicity(space)) / 4.0 + 0.5;
    let rho_t = rat_f64(tag.rho_tilde(space));
    if is_gamma_pole(u + h, POLE_TOL) {
        return Err(pole_err("Gamma(lambda_beta + m/4 + 1/2)", tag, (u.re + h).round() as i64));
    }
    if is_gamma_pole(u + rho_t, POLE_TOL) {
        return Err(pole_err("Gamma(lambda_beta + rho~)", tag, (u.re + rho_t).round() as i64));
    }
    let two_u = 2.0 * u;
    let pow = (two_u * std::f64::consts::LN_2).exp();
    Ok(pow * gamma(u + h) * gamma(u + rho_t) * recip_gamma(two_u))
}

/// Product of c_beta over the positive unmultipliable roots at rho.
/// Its reciprocal is the normalizing constant c0 (so c_HC(rho) = 1).
fn c_prod_at_rho(space: &SpaceDescriptor) -> C64 {
    let rho = rho_data(space).rho_point();
    let mut prod = C64::new(1.0, 0.0);
    for tag in RootTag::ALL {
        // rho pairings are strictly positive; no poles possible.
        prod *= c_beta(space, tag, &rho).expect("c_beta regular at rho");
    }
    prod
}

/// Normalizing constant c0 with c_HC(rho) = 1.
pub fn c0(space: &SpaceDescriptor) -> C64 {
    c_prod_at_rho(space).finv()
}

/// Normalized Harish-Chandra c-function c_HC = c0 * prod c_beta.
pub fn c_hc(space: &SpaceDescriptor, lambda: &SpectralPoint) -> Result<C64> {
    let mut prod = c0(space);
    for tag in RootTag::ALL {
        prod *= c_beta(space, tag, lambda)?;
    }
    Ok(prod)
}

/// Plancherel density [c_HC(lambda) c_HC(-lambda)]^{-1}, direct
/// gamma-quotient evaluation.
pub fn density_direct(space: &SpaceDescriptor, lambda: &SpectralPoint) -> Result<C64> {
    let prod_rho = c_prod_at_rho(space);
    let mut val = prod_rho * prod_rho;
    let minus = SpectralPoint::new(-lambda.x1, -lambda.x2);
    for tag in RootTag::ALL {
        val *= c_beta_recip(space, tag, tag.pairing(lambda))?;
        val *= c_beta_recip(space, tag, tag.pairing(&minus))?;
    }
    Ok(val)
}

/// Per-root polynomial factor of P: with u the pairing, m the root
/// multiplicity and m_half the multiplicity of beta/2,
///   prod_{k=0}^{m_half/2-1} [u - (m_half/4 - 1/2) + k]
/// * prod_{k=0}^{m + m_half/2 - 2} [u - (rho~ - 1) + k],
/// empty products being 1.
fn p_poly(u: C64, m: u32, m_half: u32) -> C64 {
    let mut prod = C64::new(1.0, 0.0);
    let first_base = f64::from(m_half) / 4.0 - 0.5;
    for k in 0..(m_half / 2) {
        prod *= u - first_base + f64::from(k);
    }
    let two_rho_t = i64::from(m) + i64::from(m_half) / 2; // 2 rho~ for this root
    let rho_t = two_rho_t as f64 / 2.0;
    for k in 0..=(two_rho_t - 2).max(-1) {
        prod *= u - (rho_t - 1.0) + k as f64;
    }
    prod
}

/// Exact-rational twin of `p_poly` for cross-checking the float route.
/// Arbitrary-precision arithmetic: the product has up to ~18 factors and
/// overflows machine-word rationals on the large-multiplicity spaces.
#[cfg(test)]
fn p_poly_rat(u: Rat, m: u32, m_half: u32) -> num_rational::BigRational {
    type Big = num_rational::BigRational;
    let lift = |r: Rat| Big::new((*r.numer()).into(), (*r.denom()).into());
    let mut prod = Big::from_integer(1.into());
    let first_base = Rat::new(i64::from(m_half), 4) - Rat::new(1, 2);
    for k in 0..(m_half / 2) {
        prod *= lift(u - first_base + Rat::from_integer(i64::from(k)));
    }
    let two_rho_t = i64::from(m) + i64::from(m_half) / 2;
    let rho_t = Rat::new(two_rho_t, 2);
    for k in 0..=(two_rho_t - 2).max(-1) {
        prod *= lift(u - (rho_t - Rat::from_integer(1)) + Rat::from_integer(k));
    }
    prod
}

/// The factored density C * Pi * P * Q at one point.
#[derive(Debug, Clone, Copy)]
pub struct PlancherelParts {
    pub pi: C64,
    pub p: C64,
    pub q: C64,
    /// Calibration constant tying Pi*P*Q to density_direct.
    pub c_cal: C64,
    /// c_cal * pi * p * q.
    pub product: C64,
}

/// Pi(lambda) = x1 x2 (x2^2 - x1^2), the product of all pairings.
pub fn big_pi(lambda: &SpectralPoint) -> C64 {
    lambda.x1 * lambda.x2 * (lambda.x2 * lambda.x2 - lambda.x1 * lambda.x1)
}

/// P(lambda): product of p_poly over the four positive unmultipliable roots.
pub fn big_p(space: &SpaceDescriptor, lambda: &SpectralPoint) -> C64 {
    let mut prod = C64::new(1.0, 0.0);
    for tag in RootTag::ALL {
        prod *= p_poly(
            tag.pairing(lambda),
            tag.multiplicity(space),
            tag.half_multiplicity(space),
        );
    }
    prod
}

/// Q(lambda): product of cot(pi(lambda_beta - rho~_beta)) over the roots of
/// odd multiplicity. Errors carry the root and the integer offset k with
/// lambda_beta = rho~_beta + k.
pub fn big_q(space: &SpaceDescriptor, lambda: &SpectralPoint) -> Result<C64> {
    let mut prod = C64::new(1.0, 0.0);
    for tag in RootTag::ALL {
        if tag.multiplicity(space) % 2 == 1 {
            let t = tag.pairing(lambda) - rat_f64(tag.rho_tilde(space));
            if let Some(k) = near_integer(t, POLE_TOL) {
                return Err(pole_err("cot(pi(lambda_beta - rho~))", tag, k));
            }
            prod *= cot_pi(t);
        }
    }
    Ok(prod)
}

/// Reference point rho + CAL_OFFSETS for the one-point calibrations.
pub fn lambda_ref(space: &SpaceDescriptor) -> SpectralPoint {
    let rho = rho_data(space);
    SpectralPoint::new(
        C64::new(rat_f64(rho.rho_b1) + CAL_OFFSETS.0, 0.0),
        C64::new(rat_f64(rho.rho_b2) + CAL_OFFSETS.1, 0.0),
    )
}

/// Calibration constant for the Pi*P*Q form.
pub fn calibration_pq(space: &SpaceDescriptor) -> Result<C64> {
    let lref = lambda_ref(space);
    let direct = density_direct(space, &lref)?;
    let pipq = big_pi(&lref) * big_p(space, &lref) * big_q(space, &lref)?;
    Ok(direct / pipq)
}

pub fn density_factored(space: &SpaceDescriptor, lambda: &SpectralPoint) -> Result<PlancherelParts> {
    let c_cal = calibration_pq(space)?;
    density_factored_with(space, lambda, c_cal)
}

/// Same, with a precomputed calibration constant (hot loops).
pub fn density_factored_with(
    space: &SpaceDescriptor,
    lambda: &SpectralPoint,
    c_cal: C64,
) -> Result<PlancherelParts> {
    let pi = big_pi(lambda);
    let p = big_p(space, lambda);
    let q = big_q(space, lambda)?;
    Ok(PlancherelParts {
        pi,
        p,
        q,
        c_cal,
        product: c_cal * pi * p * q,
    })
}

/// Rank-one factors of the space X1 with multiplicities (m_l, m_s):
/// p1(x) = P1(i x / b) (an even polynomial) and q1(x) = cot-type factor
/// (odd); the product p1 q1 is odd with poles exactly on S = +-i b
/// (rho~_{beta1} + Z_{>=0}).
#[derive(Debug, Clone, Copy)]
pub struct RankOneFactors {
    pub p1_at: C64,
    pub q1_at: C64,
}

/// p1(x) = P1(i x / b); even in x.
pub fn p1(space: &SpaceDescriptor, x: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    p_poly(i * x / space.b, space.m_l, space.m_s)
}

/// q1(x) = cot(pi (i x / b - rho~_{beta1})); odd in x, 1-periodic lattice
/// of candidate poles, of which only S survives against the zeros of p1.
pub fn q1(space: &SpaceDescriptor, x: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let rho_t = rat_f64(rho_data(space).rho_tilde_long);
    cot_pi(i * x / space.b - rho_t)
}

/// p1(x) * q1(x); odd, with simple poles exactly on S.
pub fn p1q1(space: &SpaceDescriptor, x: C64) -> C64 {
    p1(space, x) * q1(space, x)
}

/// Checked evaluation: errors identify the index ell with x = +-i L_ell
/// when x sits on the surviving pole set S.
pub fn rank_one_factors(space: &SpaceDescriptor, x: C64) -> Result<RankOneFactors> {
    if let Some(ell) = s_pole_index(space, x, POLE_TOL) {
        return Err(Error::PoleHit {
            what: "q1".to_string(),
            where_: format!("x = +-i L_{ell}"),
        });
    }
    Ok(RankOneFactors {
        p1_at: p1(space, x),
        q1_at: q1(space, x),
    })
}

/// If x is within tol*b of a point of S = +-i b (rho~ + Z_{>=0}), the index
/// ell of that point. Lattice points cancelled by zeros of p1 return None.
pub fn s_pole_index(space: &SpaceDescriptor, x: C64, tol: f64) -> Option<u32> {
    let rho_t = rat_f64(rho_data(space).rho_tilde_long);
    let two_rho_t = space.two_l_ell_over_b(0); // = 2 rho~
    // i x / b = rho~ + k marks a cot pole candidate at integer k.
    let u = C64::new(0.0, 1.0) * x / space.b;
    let t = u - rho_t;
    let k = near_integer(t, tol)?;
    // Zeros of the second product of P1 (at |u| <= rho~ - 1) cancel the
    // cot poles strictly between -rho~ and rho~.
    if k >= 0 {
        Some(k as u32) // x = -i L_k
    } else if k <= -two_rho_t {
        Some((-k - two_rho_t) as u32) // x = +i L_ell
    } else {
        None
    }
}

/// vartheta0(x1, x2) = (x2^2 - x1^2) prod_{k=1}^{m_m - 1} [(x2 - m_m/2 + k)^2 - x1^2].
pub fn vartheta0(space: &SpaceDescriptor, x1: C64, x2: C64) -> C64 {
    let mm = f64::from(space.m_m);
    let mut prod = x2 * x2 - x1 * x1;
    for k in 1..space.m_m {
        let t = x2 - mm / 2.0 + f64::from(k);
        prod *= t * t - x1 * x1;
    }
    prod
}

/// Exact rational vartheta0, for the zero-set bookkeeping. Arbitrary
/// precision: each factor is small, but the product reaches ~x2^{2 m_m}
/// and overflows machine rationals already at moderate lattice indices.
pub fn vartheta0_rat(space: &SpaceDescriptor, x1: Rat, x2: Rat) -> num_rational::BigRational {
    let lift = |r: Rat| num_rational::BigRational::new((*r.numer()).into(), (*r.denom()).into());
    let mm = Rat::new(i64::from(space.m_m), 2);
    let mut prod = lift(x2 * x2 - x1 * x1);
    for k in 1..space.m_m {
        let t = x2 - mm + Rat::from_integer(i64::from(k));
        prod *= lift(t * t - x1 * x1);
    }
    prod
}

/// Rank-one density as a function of the pairing coordinate u (up to its
/// own constant): u * P1(u) * cot(pi(u - rho~)).
fn rank1_density_u(space: &SpaceDescriptor, u: C64) -> Result<C64> {
    let rho_t = rat_f64(rho_data(space).rho_tilde_long);
    let t = u - rho_t;
    if near_integer(t, POLE_TOL).is_some() {
        return Err(Error::PoleHit {
            what: "rank-one cot".to_string(),
            where_: format!("u = rho~ + {}", t.re.round() as i64),
        });
    }
    Ok(u * p_poly(u, space.m_l, space.m_s) * cot_pi(t))
}

/// Density via the vartheta0 regrouping: C * vartheta0(x1,x2) * r1(x1) * r1(x2),
/// valid when every odd-multiplicity root is long. Calibrated at lambda_ref.
pub fn density_theta_route(space: &SpaceDescriptor, lambda: &SpectralPoint) -> Result<C64> {
    if space.m_m % 2 == 1 {
        return Err(Error::InvalidSpace {
            family: space.family.to_string(),
            p: space.p,
            reason: "vartheta0 regrouping needs even middle multiplicity".to_string(),
        });
    }
    let lref = lambda_ref(space);
    let at = |pt: &SpectralPoint| -> Result<C64> {
        Ok(vartheta0(space, pt.x1, pt.x2)
            * rank1_density_u(space, pt.x1)?
            * rank1_density_u(space, pt.x2)?)
    };
    let c_cal = density_direct(space, &lref)? / at(&lref)?;
    Ok(c_cal * at(lambda)?)
}

/// Explicit factored density for BDI with p odd: Pi times the middle-root
/// polynomial with upper index p-4 = 2 rho~_mid - 2 (the Weyl-invariant
/// range) times the four cotangents. Calibrated at lambda_ref.
pub fn density_bdi_odd_explicit(space: &SpaceDescriptor, lambda: &SpectralPoint) -> Result<C64> {
    use crate::rootdata::Family;
    if space.family != Family::Bdi || space.m_m % 2 == 0 {
        return Err(Error::InvalidSpace {
            family: space.family.to_string(),
            p: space.p,
            reason: "explicit route applies to BDI with p odd".to_string(),
        });
    }
    let p = i64::from(space.p.unwrap());
    let at = |pt: &SpectralPoint| -> Result<C64> {
        let (x1, x2) = (pt.x1, pt.x2);
        let pi = x1 * x2 * (x2 * x2 - x1 * x1);
        let mut pp = C64::new(1.0, 0.0);
        let base = (p - 2) as f64 / 2.0 - 1.0;
        for k in 0..=(p - 4).max(-1) {
            pp *= (x2 - x1) - base + k as f64;
            pp *= (x2 + x1) - base + k as f64;
        }
        let q = big_q(space, pt)?; // four cotangents for odd p
        Ok(pi * pp * q)
    };
    let lref = lambda_ref(space);
    let c_cal = density_direct(space, &lref)? / at(&lref)?;
    Ok(c_cal * at(lambda)?)
}

/// Random-sample agreement report between the direct density and its
/// factored forms.
#[derive(Debug, Clone)]
pub struct FactorizationReport {
    pub samples: usize,
    pub max_rel_pq: f64,
    /// None when the vartheta0 regrouping does not apply (BDI p odd).
    pub max_rel_theta: Option<f64>,
    /// Explicit route, BDI p odd only.
    pub max_rel_explicit: Option<f64>,
}

/// Draw `samples` generic complex points and compare density_direct against
/// every applicable factored form; reports the max relative error of each.
pub fn factorization_identity_check(
    space: &SpaceDescriptor,
    samples: usize,
    seed: u64,
) -> Result<FactorizationReport> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let c_cal = calibration_pq(space)?;
    let theta_ok = space.m_m % 2 == 0;
    let explicit_ok = !theta_ok && space.family == crate::rootdata::Family::Bdi;
    let mut max_pq: f64 = 0.0;
    let mut max_theta: f64 = 0.0;
    let mut max_explicit: f64 = 0.0;
    let mut kept = 0usize;
    while kept < samples {
        let lambda = SpectralPoint::new(
            C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)),
            C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)),
        );
        if !point_is_generic(&lambda, 0.02) {
            continue;
        }
        kept += 1;
        let direct = density_direct(space, &lambda)?;
        let parts = density_factored_with(space, &lambda, c_cal)?;
        max_pq = max_pq.max(rel_err(parts.product, direct));
        if theta_ok {
            max_theta = max_theta.max(rel_err(density_theta_route(space, &lambda)?, direct));
        }
        if explicit_ok {
            max_explicit =
                max_explicit.max(rel_err(density_bdi_odd_explicit(space, &lambda)?, direct));
        }
    }
    Ok(FactorizationReport {
        samples,
        max_rel_pq: max_pq,
        max_rel_theta: theta_ok.then_some(max_theta),
        max_rel_explicit: explicit_ok.then_some(max_explicit),
    })
}

pub fn rel_err(got: C64, want: C64) -> f64 {
    let denom = want.norm().max(1e-300);
    (got - want).norm() / denom
}

/// A point is generic when every pairing of +-lambda keeps distance > tol
/// from the quarter-integer lattice (covers every gamma and cot lattice).
pub fn point_is_generic(lambda: &SpectralPoint, tol: f64) -> bool {
    let pairings = [
        lambda.at_long1(),
        lambda.at_long2(),
        lambda.at_mid_minus(),
        lambda.at_mid_plus(),
    ];
    pairings.iter().all(|u| {
        let t = 4.0 * u;
        let d2 = (t.re - t.re.round()).powi(2) + t.im.powi(2);
        d2.sqrt() / 4.0 > tol
    })
}
