//! Unit-circle contour machinery: the Joukowski-type maps c and s, the
//! integrand factors, the contour function F(z), its deformation to a
//! smaller circle with the residue correction, and a small-circle numerical
//! residue extractor that serves as the oracle for every closed form in the
//! continuation module.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::plancherel::{p1q1, s_pole_index, POLE_TOL};
use crate::rootdata::{rho_data, SpaceDescriptor};
use crate::symbol::SpectralSymbol;
use crate::C64;

/// Quadrature parameters. `radius` is the deformed-contour radius for the
/// F_r family of operations; F itself always integrates over |w| = 1.
#[derive(Debug, Clone, Copy)]
pub struct ContourConfig {
    /// Starting node count; at least 64 and even.
    pub nodes: usize,
    /// Deformation radius, strictly inside (0, 1).
    pub radius: f64,
    /// Node cap for the doubling refinement.
    pub max_nodes: usize,
    /// Relative agreement required between successive refinements.
    pub rel_tol: f64,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            nodes: 512,
            radius: 0.75,
            max_nodes: 1 << 15,
            rel_tol: 1e-11,
        }
    }
}

impl ContourConfig {
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 64 || self.nodes % 2 != 0 {
            return Err(Error::Usage(format!(
                "quadrature nodes must be even and at least 64, got {}",
                self.nodes
            )));
        }
        if !(self.radius > 0.0 && self.radius < 1.0) {
            return Err(Error::Usage(format!(
                "deformation radius must lie in (0, 1), got {}",
                self.radius
            )));
        }
        if self.max_nodes < self.nodes {
            return Err(Error::Usage(
                "node cap below the starting node count".to_string(),
            ));
        }
        Ok(())
    }
}

/// c(w) = (w + 1/w)/2. Requires w != 0.
pub fn cmap(w: C64) -> C64 {
    debug_assert!(w.norm_sqr() > 0.0, "cmap at w = 0");
    (w + 1.0 / w) * 0.5
}

/// s(w) = (w - 1/w)/2 = i c(-iw). Requires w != 0.
pub fn smap(w: C64) -> C64 {
    debug_assert!(w.norm_sqr() > 0.0, "smap at w = 0");
    (w - 1.0 / w) * 0.5
}

/// The polynomial factor
/// (z^2/b^2)(c(w)^2 - c(-iw)^2) prod_{k=1}^{m_m-1} [((z/b)s(w) - m_m/2 + k)^2 + (z/b)^2 c(w)^2].
pub fn vartheta_z(space: &SpaceDescriptor, z: C64, w: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let zb = z / space.b;
    let cw = cmap(w);
    let cmiw = cmap(-i * w);
    let sw = smap(w);
    let mm = f64::from(space.m_m);
    let mut prod = zb * zb * (cw * cw - cmiw * cmiw);
    for k in 1..space.m_m {
        let t = zb * sw - mm / 2.0 + f64::from(k);
        prod *= t * t + zb * zb * cw * cw;
    }
    prod
}

/// The symbol factor psi_z(w) = sigma((z/b) c(w), (z/b) c(-iw)).
pub fn psi_z<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    z: C64,
    w: C64,
) -> C64 {
    let i = C64::new(0.0, 1.0);
    let zb = z / space.b;
    symbol.eval(zb * cmap(w), zb * cmap(-i * w))
}

/// phi_z(w) = -z^2 c(w) (s(w)/w) p1q1(z c(w)) p1q1(z c(-iw)), checked
/// against the rank-one pole set S in both arguments.
pub fn phi_z(space: &SpaceDescriptor, z: C64, w: C64) -> Result<C64> {
    let i = C64::new(0.0, 1.0);
    for (label, arg) in [("z c(w)", z * cmap(w)), ("z c(-iw)", z * cmap(-i * w))] {
        if let Some(ell) = s_pole_index(space, arg, POLE_TOL) {
            return Err(Error::PoleHit {
                what: format!("q1 factor in phi_z via {label}"),
                where_: format!("{label} = +-i L_{ell}"),
            });
        }
    }
    Ok(phi_z_raw(space, z, w))
}

pub(crate) fn phi_z_raw(space: &SpaceDescriptor, z: C64, w: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let cw = cmap(w);
    let sw = smap(w);
    -z * z * cw * (sw / w) * p1q1(space, z * cw) * p1q1(space, z * cmap(-i * w))
}

/// Full integrand vartheta_z * psi_z * phi_z (unchecked; quadrature callers
/// run the pole-distance guard first).
pub fn integrand<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    z: C64,
    w: C64,
) -> C64 {
    vartheta_z(space, z, w) * psi_z(space, symbol, z, w) * phi_z_raw(space, z, w)
}

/// Smaller-modulus root of w^2 - 2 a w + 1 = 0 (the two roots multiply
/// to 1). The square root branch is matched against a so the sum does not
/// cancel.
fn w_root_inside(a: C64) -> C64 {
    let mut s = (a * a - 1.0).sqrt();
    // is_sign_negative rather than < 0: on the removed rays the alignment
    // product is a signed zero carrying the Re z > 0 limit.
    if (a.conj() * s).re.is_sign_negative() {
        s = -s;
    }
    1.0 / (a + s)
}

/// The pole of w -> p1q1(z c(w)) inside the unit disk with z c(w) = +i L_ell.
/// The full pole set of the integrand for this ell is {±w1, ±i w1} together
/// with the reciprocal points outside the disk.
pub fn w1_plus(space: &SpaceDescriptor, z: C64, ell: u32) -> C64 {
    let i = C64::new(0.0, 1.0);
    w_root_inside(i * space.l_ell(ell) / z)
}

/// Moduli of integrand poles relevant near the circle of radius r: for each
/// ell the eight pole points come in two modulus classes |w1| and 1/|w1|.
fn pole_moduli(space: &SpaceDescriptor, z: C64, r: f64) -> Vec<(u32, f64)> {
    let mut out = Vec::new();
    let zn = z.norm();
    if zn == 0.0 {
        return out;
    }
    let reach = zn * (0.5 * (r + 1.0 / r) + 2.0);
    let mut ell = 0u32;
    while space.l_ell(ell) <= reach {
        let m = w1_plus(space, z, ell).norm();
        out.push((ell, m));
        out.push((ell, 1.0 / m));
        ell += 1;
    }
    out
}

/// Node count satisfying the pole-distance guard: the closest integrand pole
/// must be farther from the contour than four node spacings.
fn guarded_nodes(space: &SpaceDescriptor, z: C64, r: f64, cfg: &ContourConfig) -> Result<usize> {
    let mut mind = f64::INFINITY;
    for (_, m) in pole_moduli(space, z, r) {
        mind = mind.min((m - r).abs());
    }
    let mut n = cfg.nodes;
    while 2.0 * PI * r / (n as f64) * 4.0 >= mind {
        if n >= cfg.max_nodes {
            return Err(Error::PoleProximity {
                distance: mind,
                required: 8.0 * PI * r / (cfg.max_nodes as f64),
                nodes: cfg.max_nodes,
            });
        }
        n *= 2;
    }
    Ok(n)
}

fn pairwise_sum(v: &[C64]) -> C64 {
    match v.len() {
        0 => C64::new(0.0, 0.0),
        1 => v[0],
        2 => v[0] + v[1],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Fixed-node trapezoidal value of the contour integral over |w| = r,
/// together with the L1 mass used as the noise floor for convergence tests.
/// Nodes are offset half a step so the four axis points +-r, +-ir are never
/// sampled: on the unit circle they are removable 0 * inf points of the
/// integrand whenever the rank-one cotangent has a pole at 0 (integer
/// rho~_1 spaces), and the offset keeps power-of-two refinements off them.
pub fn circle_quadrature_raw(f: &dyn Fn(C64) -> C64, r: f64, nodes: usize) -> (C64, f64) {
    let i = C64::new(0.0, 1.0);
    let step = 2.0 * PI / nodes as f64;
    let mut terms = Vec::with_capacity(nodes);
    let mut l1 = 0.0;
    for j in 0..nodes {
        let theta = step * (j as f64 + 0.5);
        let w = C64::from_polar(r, theta);
        let t = f(w) * i * w * step;
        l1 += t.norm();
        terms.push(t);
    }
    (pairwise_sum(&terms), l1)
}

/// Trapezoidal quadrature with node doubling until successive refinements
/// agree to cfg.rel_tol (relative, with an L1-mass noise floor for values
/// that vanish by symmetry).
fn circle_quadrature(
    f: &dyn Fn(C64) -> C64,
    r: f64,
    start_nodes: usize,
    cfg: &ContourConfig,
) -> Result<C64> {
    let mut n = start_nodes.max(cfg.nodes);
    let (mut val, mut l1) = circle_quadrature_raw(f, r, n);
    loop {
        if n >= cfg.max_nodes {
            return Err(Error::QuadratureDivergence {
                achieved: f64::NAN,
                wanted: cfg.rel_tol,
                nodes: n,
            });
        }
        n *= 2;
        let (next, next_l1) = circle_quadrature_raw(f, r, n);
        let diff = (next - val).norm();
        let floor = 1e-14 * next_l1.max(l1);
        if diff <= cfg.rel_tol * next.norm() || diff <= floor {
            return Ok(next);
        }
        if n >= cfg.max_nodes {
            return Err(Error::QuadratureDivergence {
                achieved: diff / next.norm().max(f64::MIN_POSITIVE),
                wanted: cfg.rel_tol,
                nodes: n,
            });
        }
        val = next;
        l1 = next_l1;
    }
}

/// z is inadmissible for F on the removed rays i((-inf, -L] u [L, inf)).
fn check_f_admissible(space: &SpaceDescriptor, z: C64) -> Result<()> {
    let l = rho_data(space).l(space.b);
    let scale = z.norm().max(l);
    if z.re.abs() <= 1e-12 * scale && z.im.abs() >= l - 1e-12 * scale {
        return Err(Error::InadmissibleZ {
            z,
            reason: format!("on the removed ray i(+-[L, inf)), L = {l}"),
        });
    }
    Ok(())
}

/// F(z) = contour integral of vartheta_z psi_z phi_z over |w| = 1.
pub fn f_of_z<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    z: C64,
    cfg: &ContourConfig,
) -> Result<C64> {
    space.require_continuable()?;
    cfg.validate()?;
    check_f_admissible(space, z)?;
    if z.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let n = guarded_nodes(space, z, 1.0, cfg)?;
    circle_quadrature(&|w| integrand(space, symbol, z, w), 1.0, n, cfg)
}

/// Strict ellipse test for zeta = i L_ell / z against E_{c(r), s(r)}:
/// Some(true) inside the ellipse, Some(false) outside, None within the
/// exclusion band of the boundary. Points exactly on the open slit (-1, 1)
/// pull back to integrand poles on |w| = 1, strictly between the deformed
/// circle and the unit circle, so they count as captured (this is the
/// two-sided limit of the off-axis test); the slit endpoints are branch
/// points and land in the degenerate band.
fn ellipse_state(r: f64, zeta: C64) -> Option<bool> {
    let c = 0.5 * (r + 1.0 / r);
    let s = 0.5 * (1.0 / r - r);
    let e = (zeta.re / c).powi(2) + (zeta.im / s).powi(2);
    if (e - 1.0).abs() < 1e-9 {
        return None;
    }
    if e > 1.0 {
        return Some(false);
    }
    if zeta.im == 0.0 && (zeta.re.abs() - 1.0).abs() < 1e-9 {
        return None;
    }
    Some(true)
}

/// Candidate ells whose zeta could possibly interact with the radius-r
/// ellipse (conservative modulus cut).
fn ellipse_candidates(space: &SpaceDescriptor, z: C64, r: f64) -> Vec<u32> {
    let zn = z.norm();
    let c = 0.5 * (r + 1.0 / r);
    let mut out = Vec::new();
    let mut ell = 0u32;
    while space.l_ell(ell) <= zn * (c + 1.0) {
        out.push(ell);
        ell += 1;
    }
    out
}

/// Deformation radius actually used: the requested r, perturbed by a factor
/// (1 +- 1e-3) when some i L_ell / z falls in the exclusion band around the
/// ellipse boundary (the deformation requires strict non-intersection).
pub fn effective_radius(space: &SpaceDescriptor, z: C64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Usage(format!(
            "deformation radius must lie in (0, 1), got {r}"
        )));
    }
    if z.norm() == 0.0 {
        return Err(Error::InadmissibleZ {
            z,
            reason: "deformed contour needs z != 0".to_string(),
        });
    }
    let i = C64::new(0.0, 1.0);
    'radius: for cand in [r, r * (1.0 - 1e-3), r * (1.0 + 1e-3)] {
        if !(cand > 0.0 && cand < 1.0) {
            continue;
        }
        for ell in ellipse_candidates(space, z, cand) {
            let zeta = i * space.l_ell(ell) / z;
            if ellipse_state(cand, zeta).is_none() {
                continue 'radius;
            }
        }
        return Ok(cand);
    }
    let offending: Vec<String> = ellipse_candidates(space, z, r)
        .into_iter()
        .filter(|&ell| ellipse_state(r, i * space.l_ell(ell) / z).is_none())
        .map(|ell| format!("L_{ell}"))
        .collect();
    Err(Error::NoValidRadius {
        z,
        reason: format!(
            "i L_ell / z on the ellipse boundary for {} at r and both perturbations",
            offending.join(", ")
        ),
    })
}

/// The captured index set S_{r,z,+}: those ell with i L_ell / z inside
/// E_{c(r), s(r)} minus the segment [-1, 1]. Errors when a membership test
/// is degenerate (point in the boundary band).
pub fn s_r_z_plus(space: &SpaceDescriptor, z: C64, r: f64) -> Result<Vec<u32>> {
    let i = C64::new(0.0, 1.0);
    let mut out = Vec::new();
    for ell in ellipse_candidates(space, z, r) {
        let zeta = i * space.l_ell(ell) / z;
        match ellipse_state(r, zeta) {
            Some(true) => out.push(ell),
            Some(false) => {}
            None => {
                return Err(Error::NoValidRadius {
                    z,
                    reason: format!("membership test degenerate at L_{ell} (boundary band)"),
                })
            }
        }
    }
    Ok(out)
}

/// F_r(z): the same integrand over the circle |w| = cfg.radius, after the
/// non-intersection check (with automatic radius perturbation inside the
/// exclusion band). Defined also on the rays removed for F; there it is the
/// holomorphic continuation from the adjacent sectors.
pub fn f_r_of_z<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    z: C64,
    cfg: &ContourConfig,
) -> Result<C64> {
    space.require_continuable()?;
    cfg.validate()?;
    let r = effective_radius(space, z, cfg.radius)?;
    let n = guarded_nodes(space, z, r, cfg)?;
    circle_quadrature(&|w| integrand(space, symbol, z, w), r, n, cfg)
}

/// (1/2πi) times the contour integral of `f` over a small circle around
/// `center`, refined by node doubling; nonconvergence signals a singularity
/// worse than a simple pole.
pub fn numerical_residue(
    f: &dyn Fn(C64) -> C64,
    center: C64,
    radius: f64,
    nodes: usize,
) -> Result<C64> {
    if !(radius > 0.0) {
        return Err(Error::Usage(format!(
            "residue circle radius must be positive, got {radius}"
        )));
    }
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let g = |w: C64| f(center + w);
    let mut n = nodes.max(64);
    let (mut val, mut l1) = circle_quadrature_raw(&g, radius, n);
    let cap = 1 << 16;
    loop {
        n *= 2;
        let (next, next_l1) = circle_quadrature_raw(&g, radius, n);
        let diff = (next - val).norm();
        let floor = 1e-13 * next_l1.max(l1);
        if diff <= 1e-11 * next.norm() || diff <= floor {
            return Ok(next / two_pi_i);
        }
        if n >= cap {
            return Err(Error::QuadratureDivergence {
                achieved: diff / next.norm().max(f64::MIN_POSITIVE),
                wanted: 1e-11,
                nodes: n,
            });
        }
        val = next;
        l1 = next_l1;
    }
}

/// The four annulus poles contributed by index ell at this z: {±w1, ±i w1}.
pub fn captured_pole_points(space: &SpaceDescriptor, z: C64, ell: u32) -> [C64; 4] {
    let i = C64::new(0.0, 1.0);
    let w1 = w1_plus(space, z, ell);
    [w1, -w1, i * w1, -i * w1]
}

/// Numerical residues of the integrand at the four annulus poles of each
/// captured ell. By the integrand symmetries the four residues per ell are
/// equal; the sum over everything equals F_{r,res}(z).
pub fn captured_pole_residues<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    z: C64,
    r: f64,
    cfg: &ContourConfig,
) -> Result<Vec<(u32, [C64; 4])>> {
    space.require_continuable()?;
    let set = s_r_z_plus(space, z, r)?;
    // All pole points in a neighborhood of the annulus, for sizing the
    // small circles so they enclose exactly one pole each.
    let i = C64::new(0.0, 1.0);
    let mut all: Vec<C64> = Vec::new();
    for ell in 0..set.iter().copied().max().map_or(0, |m| m + 4) {
        let w1 = w1_plus(space, z, ell);
        let inv = 1.0 / w1;
        all.extend([w1, -w1, i * w1, -i * w1, inv, -inv, i * inv, -i * inv]);
    }
    let mut out = Vec::new();
    for &ell in &set {
        let pts = captured_pole_points(space, z, ell);
        let mut res = [C64::new(0.0, 0.0); 4];
        for (k, &p) in pts.iter().enumerate() {
            let mut clearance = (p.norm() - r).abs().min(1.0 - p.norm()).abs();
            for &q in &all {
                let d = (q - p).norm();
                if d > 1e-12 {
                    clearance = clearance.min(d);
                }
            }
            let rad = 0.25 * clearance;
            if !(rad > 0.0) {
                return Err(Error::PoleProximity {
                    distance: clearance,
                    required: f64::MIN_POSITIVE,
                    nodes: 0,
                });
            }
            res[k] = numerical_residue(&|w| integrand(space, symbol, z, w), p, rad, cfg.nodes)?;
        }
        out.push((ell, res));
    }
    Ok(out)
}

/// F_{r,res}(z) computed from per-pole numerical residues (the oracle side;
/// the closed form 4 sum G_ell lives in the continuation module).
pub fn f_r_res_numerical<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    z: C64,
    r: f64,
    cfg: &ContourConfig,
) -> Result<C64> {
    let per = captured_pole_residues(space, symbol, z, r, cfg)?;
    let mut total = C64::new(0.0, 0.0);
    for (_, res) in per {
        for v in res {
            total += v;
        }
    }
    Ok(total)
}

/// F_{r,res}(z) in closed form: 4 sum_{ell in S_{r,z,+}} G_ell(z).
pub fn f_r_res<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    z: C64,
    r: f64,
) -> Result<C64> {
    space.require_continuable()?;
    let set = s_r_z_plus(space, z, r)?;
    let mut total = C64::new(0.0, 0.0);
    for ell in set {
        total += crate::continuation::g_ell(space, symbol, z, ell)?;
    }
    Ok(4.0 * total)
}
