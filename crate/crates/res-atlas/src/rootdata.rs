//! Catalog of the rank-two irreducible symmetric spaces with restricted
//! root system BC2 or C2, and root arithmetic in the (x1, x2) coordinates
//! of lambda = x1*beta1 + x2*beta2.
//!
//! Conventions: beta1, beta2 are the two orthogonal long roots, both of
//! norm b. The positive unmultipliable roots are beta1, beta2 (long,
//! multiplicity m_l) and (beta2 +- beta1)/2 (middle, m_m); the short roots
//! beta1/2, beta2/2 carry m_s and are the multipliable ones. lambda_beta
//! denotes <lambda,beta>/<beta,beta>.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::{C64, Rat};

/// The five families in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// SU(p,2)/S(U(p) x U(2)), p > 2.
    Aiii,
    /// SO0(p,2)/(SO(p) x SO(2)), p > 2.
    Bdi,
    /// Sp(p,2)/(Sp(p) x Sp(2)), p >= 2.
    Cii,
    /// SO*(10)/U(5).
    Diii,
    /// E6(-14)/(Spin(10) x U(1)).
    Eiii,
}

impl Family {
    pub fn is_parametric(self) -> bool {
        matches!(self, Family::Aiii | Family::Bdi | Family::Cii)
    }

    pub fn all() -> [Family; 5] {
        [Family::Aiii, Family::Bdi, Family::Cii, Family::Diii, Family::Eiii]
    }

    /// Multiplicity formula (m_l, m_m, m_s), evaluated without range checks.
    /// Used by the low-rank isomorphism crosscheck, which extends the
    /// parametric formulas below their catalog range.
    pub fn multiplicity_formula(self, p: i64) -> (i64, i64, i64) {
        match self {
            Family::Aiii => (1, 2, 2 * (p - 2)),
            Family::Bdi => (1, p - 2, 0),
            Family::Cii => (3, 4, 4 * (p - 2)),
            Family::Diii => (1, 4, 4),
            Family::Eiii => (1, 6, 8),
        }
    }

    pub fn group_name(self, p: Option<u32>) -> String {
        match (self, p) {
            (Family::Aiii, Some(p)) => format!("SU({p},2)"),
            (Family::Bdi, Some(p)) => format!("SO0({p},2)"),
            (Family::Cii, Some(p)) => format!("Sp({p},2)"),
            (Family::Diii, _) => "SO*(10)".to_string(),
            (Family::Eiii, _) => "E6(-14)".to_string(),
            (f, None) => format!("{f}(p=?)"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Aiii => "AIII",
            Family::Bdi => "BDI",
            Family::Cii => "CII",
            Family::Diii => "DIII",
            Family::Eiii => "EIII",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AIII" => Ok(Family::Aiii),
            "BDI" => Ok(Family::Bdi),
            "CII" => Ok(Family::Cii),
            "DIII" => Ok(Family::Diii),
            "EIII" => Ok(Family::Eiii),
            other => Err(Error::Usage(format!(
                "unknown family {other:?} (expected AIII, BDI, CII, DIII or EIII)"
            ))),
        }
    }
}

/// One space from the catalog, with its multiplicities and scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceDescriptor {
    pub family: Family,
    /// Parameter for the three parametric families; None for DIII, EIII.
    pub p: Option<u32>,
    pub m_l: u32,
    pub m_m: u32,
    pub m_s: u32,
    /// Norm of the long roots. All radii and branch points scale linearly.
    pub b: f64,
    pub hermitian: bool,
    /// True iff m_s = 0, i.e. the root system is C2 rather than BC2.
    pub reduced: bool,
    /// True for BDI with p odd: the middle-root cotangent factor survives
    /// in the density, and the long-root-only continuation scheme of
    /// `continuation` does not apply.
    pub continuation_excluded: bool,
}

/// Look up a space. `p` is required for AIII/BDI/CII, rejected for
/// DIII/EIII.
pub fn catalog_lookup(family: Family, p: Option<u32>) -> Result<SpaceDescriptor> {
    let invalid = |reason: &str| Error::InvalidSpace {
        family: family.to_string(),
        p,
        reason: reason.to_string(),
    };
    let p_val = match (family.is_parametric(), p) {
        (true, Some(v)) => Some(v),
        (true, None) => return Err(invalid("family is parametric; p is required")),
        (false, Some(_)) => return Err(invalid("family is not parametric; drop p")),
        (false, None) => None,
    };
    match family {
        Family::Aiii => {
            let p = p_val.unwrap();
            if p <= 2 {
                // p = 2 is SU(2,2), isomorphic to SO0(4,2): listed under BDI.
                return Err(invalid("p > 2 required (SU(2,2) appears as SO0(4,2))"));
            }
        }
        Family::Bdi => {
            let p = p_val.unwrap();
            if p == 2 {
                return Err(invalid("SO0(2,2) is not irreducible"));
            }
            if p < 2 {
                return Err(invalid("p > 2 required"));
            }
        }
        Family::Cii => {
            let p = p_val.unwrap();
            if p < 2 {
                return Err(invalid("p >= 2 required"));
            }
        }
        Family::Diii | Family::Eiii => {}
    }
    let (m_l, m_m, m_s) = family.multiplicity_formula(p_val.map(i64::from).unwrap_or(0));
    let (m_l, m_m, m_s) = (m_l as u32, m_m as u32, m_s as u32);
    let hermitian = family != Family::Cii;
    let continuation_excluded = family == Family::Bdi && p_val.unwrap() % 2 == 1;
    Ok(SpaceDescriptor {
        family,
        p: p_val,
        m_l,
        m_m,
        m_s,
        b: 1.0,
        hermitian,
        reduced: m_s == 0,
        continuation_excluded,
    })
}

impl SpaceDescriptor {
    /// Same space with the long-root norm set to `b`.
    pub fn with_scale(mut self, b: f64) -> Self {
        assert!(b > 0.0, "scale must be positive");
        self.b = b;
        self
    }

    pub fn name(&self) -> String {
        match self.p {
            Some(p) => format!("{}:{p}", self.family),
            None => self.family.to_string(),
        }
    }

    /// Require the space to participate in meromorphic continuation.
    pub fn require_continuable(&self) -> Result<()> {
        if self.continuation_excluded {
            Err(Error::ExcludedSpace {
                family: self.family.to_string(),
                p: self.p,
                reason: "odd middle-root multiplicity keeps cotangent \
                         singularities on the middle roots"
                    .to_string(),
            })
        } else {
            Ok(())
        }
    }

    pub fn rho(&self) -> RhoData {
        rho_data(self)
    }

    /// Branch point parameter L_ell = b*(rho_tilde_long + ell).
    pub fn l_ell(&self, ell: u32) -> f64 {
        self.b * rat_f64(self.l_ell_over_b(ell))
    }

    /// Exact L_ell / b = rho_tilde_long + ell (a half-integer).
    pub fn l_ell_over_b(&self, ell: u32) -> Rat {
        rho_tilde_long(self) + Rat::from_integer(i64::from(ell))
    }

    /// Exact 2*L_ell / b, always an integer for catalog spaces.
    pub fn two_l_ell_over_b(&self, ell: u32) -> i64 {
        let r = self.l_ell_over_b(ell) * Rat::from_integer(2);
        debug_assert!(r.is_integer());
        r.to_integer()
    }
}

/// Derived structural constants of a space. All entries exact rationals in
/// units of b except `l_over_b`, which picks up |beta_mid| = (sqrt2/2) b
/// when a middle root realizes the minimum (BDI, p = 3 only).
#[derive(Debug, Clone, PartialEq)]
pub struct RhoData {
    pub rho_b1: Rat,
    pub rho_b2: Rat,
    /// rho~ for the long roots; equals rho_b1.
    pub rho_tilde_long: Rat,
    /// rho~ for the middle roots; equals m_m/2.
    pub rho_tilde_mid: Rat,
    /// <rho,rho>/b^2 = rho_b1^2 + rho_b2^2 (beta1 perp beta2, equal norms).
    pub rho_norm_sq: Rat,
    /// L/b from the definition min{rho~_beta |beta| : m_beta odd} / b.
    pub l_over_b: f64,
    /// The long-root candidate rho_tilde_long (exact); equals l_over_b for
    /// every space except BDI p = 3.
    pub l_long_over_b: Rat,
    /// Human-readable notes where commonly tabulated values disagree with
    /// the defining formulas (which are what this crate computes).
    pub annotations: Vec<String>,
}

fn rho_tilde_long(space: &SpaceDescriptor) -> Rat {
    // rho~_beta = (m_beta + m_{beta/2}/2)/2 with m_beta = m_l, m_{beta/2} = m_s.
    (Rat::from_integer(i64::from(space.m_l)) + Rat::new(i64::from(space.m_s), 2))
        / Rat::from_integer(2)
}

pub fn rho_data(space: &SpaceDescriptor) -> RhoData {
    let half = Rat::new(1, 2);
    let m_l = Rat::from_integer(i64::from(space.m_l));
    let m_m = Rat::from_integer(i64::from(space.m_m));
    let m_s = Rat::from_integer(i64::from(space.m_s));
    // 2*rho = (m_l + m_s/2) beta1 + (m_l + m_m + m_s/2) beta2.
    let rho_b1 = (m_l + m_s * half) * half;
    let rho_b2 = (m_l + m_m + m_s * half) * half;
    let rho_tilde_long = rho_b1;
    let rho_tilde_mid = m_m * half;
    let rho_norm_sq = rho_b1 * rho_b1 + rho_b2 * rho_b2;

    // L = min over odd-multiplicity unmultipliable positive roots of
    // rho~_beta |beta|; |beta_long| = b, |beta_mid| = (sqrt2/2) b.
    let mut candidates = vec![rat_f64(rho_tilde_long)];
    if space.m_m % 2 == 1 {
        candidates.push(rat_f64(rho_tilde_mid) * std::f64::consts::SQRT_2 / 2.0);
    }
    let l_over_b = candidates.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut annotations = Vec::new();
    if let (Family::Aiii, Some(p)) = (space.family, space.p) {
        annotations.push(format!(
            "L: tabulated value sqrt(p-1)/2*b = {:.6}*b disagrees with \
             min(rho~_beta*|beta|) = (p-1)/2*b = {}*b; the minimum formula is used",
            ((p - 1) as f64).sqrt() / 2.0,
            rat_str(rho_tilde_long),
        ));
    }
    if let (Family::Cii, Some(p)) = (space.family, space.p) {
        annotations.push(format!(
            "L: tabulated value (3/2+2(p-2))*b = {}/2*b disagrees with \
             min(rho~_beta*|beta|) = (p-1/2)*b = {}*b; the minimum formula is used",
            2 * (2 * i64::from(p) - 4) + 3,
            rat_str(rho_tilde_long),
        ));
        annotations.push(format!(
            "2rho: tabulated value 5b1+{}b2 disagrees with the half-sum \
             (m_l+m_s/2)b1+(m_l+m_m+m_s/2)b2 = {}b1+{}b2; the half sum is used",
            2 * i64::from(p) + 1,
            rat_str(rho_b1 * Rat::from_integer(2)),
            rat_str(rho_b2 * Rat::from_integer(2)),
        ));
    }
    if space.family == Family::Eiii {
        annotations.push(
            "2rho: tabulated value 5b1+8b2 disagrees with the half-sum \
             (m_l+m_s/2)b1+(m_l+m_m+m_s/2)b2 = 5b1+11b2; the half sum is used"
                .to_string(),
        );
    }

    RhoData {
        rho_b1,
        rho_b2,
        rho_tilde_long,
        rho_tilde_mid,
        rho_norm_sq,
        l_over_b,
        l_long_over_b: rho_tilde_long,
        annotations,
    }
}

impl RhoData {
    pub fn l(&self, b: f64) -> f64 {
        b * self.l_over_b
    }

    /// rho as a spectral point.
    pub fn rho_point(&self) -> SpectralPoint {
        SpectralPoint::from_rational(self.rho_b1, self.rho_b2)
    }
}

/// A point lambda = x1*beta1 + x2*beta2 in the complexified dual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub x1: C64,
    pub x2: C64,
}

impl SpectralPoint {
    pub fn new(x1: C64, x2: C64) -> Self {
        SpectralPoint { x1, x2 }
    }

    pub fn from_rational(x1: Rat, x2: Rat) -> Self {
        SpectralPoint {
            x1: C64::new(rat_f64(x1), 0.0),
            x2: C64::new(rat_f64(x2), 0.0),
        }
    }

    /// lambda_beta for the long root beta1.
    pub fn at_long1(&self) -> C64 {
        self.x1
    }

    /// lambda_beta for the long root beta2.
    pub fn at_long2(&self) -> C64 {
        self.x2
    }

    /// lambda_beta for (beta2 - beta1)/2.
    pub fn at_mid_minus(&self) -> C64 {
        self.x2 - self.x1
    }

    /// lambda_beta for (beta2 + beta1)/2.
    pub fn at_mid_plus(&self) -> C64 {
        self.x2 + self.x1
    }

    /// lambda_beta for the short root beta1/2 (= 2 x1).
    pub fn at_short1(&self) -> C64 {
        2.0 * self.x1
    }

    /// lambda_beta for the short root beta2/2 (= 2 x2).
    pub fn at_short2(&self) -> C64 {
        2.0 * self.x2
    }

    /// Images under the Weyl group of C2 (signed coordinate permutations).
    pub fn weyl_orbit(&self) -> [SpectralPoint; 8] {
        let (a, b) = (self.x1, self.x2);
        [
            SpectralPoint::new(a, b),
            SpectralPoint::new(-a, b),
            SpectralPoint::new(a, -b),
            SpectralPoint::new(-a, -b),
            SpectralPoint::new(b, a),
            SpectralPoint::new(-b, a),
            SpectralPoint::new(b, -a),
            SpectralPoint::new(-b, -a),
        ]
    }
}

/// lambda(l1, l2) = (rho_b1 + l1) beta1 + (rho_b2 + l2) beta2, exact.
pub fn lambda_point_exact(space: &SpaceDescriptor, l1: u32, l2: u32) -> (Rat, Rat) {
    let rho = rho_data(space);
    (
        rho.rho_b1 + Rat::from_integer(i64::from(l1)),
        rho.rho_b2 + Rat::from_integer(i64::from(l2)),
    )
}

pub fn lambda_point(space: &SpaceDescriptor, l1: u32, l2: u32) -> SpectralPoint {
    let (x1, x2) = lambda_point_exact(space, l1, l2);
    SpectralPoint::from_rational(x1, x2)
}

/// lambda(l1, l2) is dominant iff l2 + m_m/2 >= l1.
pub fn lambda_is_dominant(space: &SpaceDescriptor, l1: u32, l2: u32) -> bool {
    2 * i64::from(l2) + i64::from(space.m_m) >= 2 * i64::from(l1)
}

/// Dominant representative of the Weyl orbit of an exact real point:
/// x2 >= x1 >= 0 after signed permutation.
pub fn dominant_representative(x1: Rat, x2: Rat) -> (Rat, Rat) {
    let (a, b) = (x1.abs(), x2.abs());
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Spaces shown by the default catalog: small p for the parametric
/// families plus the two exceptional ones.
pub fn default_catalog() -> Vec<SpaceDescriptor> {
    let mut out = Vec::new();
    for p in 3..=6 {
        out.push(catalog_lookup(Family::Aiii, Some(p)).unwrap());
    }
    for p in 3..=6 {
        out.push(catalog_lookup(Family::Bdi, Some(p)).unwrap());
    }
    for p in 2..=6 {
        out.push(catalog_lookup(Family::Cii, Some(p)).unwrap());
    }
    out.push(catalog_lookup(Family::Diii, None).unwrap());
    out.push(catalog_lookup(Family::Eiii, None).unwrap());
    out
}

/// JSON row for one catalog entry. Rationals serialize as "num/den".
#[derive(Debug, Clone, Serialize)]
pub struct CatalogRow {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    pub m_l: u32,
    pub m_m: u32,
    pub m_s: u32,
    pub hermitian: bool,
    pub reduced: bool,
    pub rho_b1: String,
    pub rho_b2: String,
    pub rho_tilde_long: String,
    pub rho_tilde_mid: String,
    #[serde(rename = "L_over_b")]
    pub l_over_b: f64,
    pub continuation_excluded: bool,
    pub annotations: Vec<String>,
}

pub fn catalog_row(space: &SpaceDescriptor) -> CatalogRow {
    let rho = rho_data(space);
    CatalogRow {
        family: space.family.to_string(),
        p: space.p,
        m_l: space.m_l,
        m_m: space.m_m,
        m_s: space.m_s,
        hermitian: space.hermitian,
        reduced: space.reduced,
        rho_b1: rat_str(rho.rho_b1),
        rho_b2: rat_str(rho.rho_b2),
        rho_tilde_long: rat_str(rho.rho_tilde_long),
        rho_tilde_mid: rat_str(rho.rho_tilde_mid),
        l_over_b: rho.l_over_b,
        continuation_excluded: space.continuation_excluded,
        annotations: rho.annotations,
    }
}

/// Low-rank isomorphism crosscheck: multiplicity formulas of identified
/// pairs must agree where they extend below the catalog range.
#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckPair {
    pub left: String,
    pub left_m: (i64, i64, i64),
    pub right: String,
    pub right_m: (i64, i64, i64),
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub pairs: Vec<CrosscheckPair>,
    /// SO0(2,2) is reducible and correctly rejected by the catalog.
    pub bdi_p2_rejected: bool,
    pub all_equal: bool,
}

pub fn isomorphism_crosscheck() -> CrosscheckReport {
    let pairs = vec![
        CrosscheckPair {
            left: "SU(2,2) (AIII formula at p=2)".to_string(),
            left_m: Family::Aiii.multiplicity_formula(2),
            right: "SO0(4,2)".to_string(),
            right_m: Family::Bdi.multiplicity_formula(4),
            equal: Family::Aiii.multiplicity_formula(2) == Family::Bdi.multiplicity_formula(4),
        },
        CrosscheckPair {
            left: "SO*(8) (rank-two DIII analog, (1,4,0))".to_string(),
            left_m: (1, 4, 0),
            right: "SO0(6,2)".to_string(),
            right_m: Family::Bdi.multiplicity_formula(6),
            equal: (1, 4, 0) == Family::Bdi.multiplicity_formula(6),
        },
    ];
    let bdi_p2_rejected = catalog_lookup(Family::Bdi, Some(2)).is_err();
    let all_equal = pairs.iter().all(|p| p.equal) && bdi_p2_rejected;
    CrosscheckReport {
        pairs,
        bdi_p2_rejected,
        all_equal,
    }
}

/// "num/den" with den >= 1, reduced; integers render as "n/1".
pub fn rat_str(r: Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Parse "num/den" (or a plain integer).
pub fn rat_parse(s: &str) -> Result<Rat> {
    let bad = || Error::Usage(format!("bad rational {s:?} (expected num/den)"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Rat::new(n, d))
    } else {
        let n: i64 = s.trim().parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(n))
    }
}
