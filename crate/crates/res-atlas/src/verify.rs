//! Named verification suites behind the CLI: each runs a batch of
//! closed-form-vs-oracle checks and reports the worst error per check
//! against its tolerance. Suites are deterministic given the seed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::continuation::{
    cancellation_interval, fiber_clearance, g_tilde_chart, is_cancelled, piecewise_f,
    residue_g_tilde, zeta_lm,
};
use crate::contour::{
    f_of_z, f_r_res_numerical, numerical_residue, phi_z_raw, psi_z, vartheta_z, ContourConfig,
};
use crate::error::{Error, Result};
use crate::plancherel::{c_hc, density_direct, factorization_identity_check, rel_err};
use crate::resonances::{
    enumerate_resonances, resonance_at, residue_summary, scan_vs_enumeration, ResonanceBound,
};
use crate::rootdata::{catalog_lookup, default_catalog, rho_data, Family};
use crate::symbol::BuiltinSymbol;
use crate::{C64, Rat, SpaceDescriptor};

pub const SUITES: [&str; 6] = [
    "plancherel",
    "symmetry",
    "deformation",
    "residues",
    "cancellation",
    "enumeration",
];

/// One named check: worst observed error against its tolerance. Boolean
/// checks report the number of violations as the error with tolerance 0.5.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub max_err: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    fn new(suite: &str, seed: u64) -> Self {
        Report {
            suite: suite.to_string(),
            seed,
            checks: Vec::new(),
            pass: true,
        }
    }

    fn push(&mut self, name: impl Into<String>, max_err: f64, tol: f64) {
        let pass = max_err.is_finite() && max_err < tol;
        self.pass &= pass;
        self.checks.push(Check {
            name: name.into(),
            max_err,
            tol,
            pass,
        });
    }

    fn push_bool(&mut self, name: impl Into<String>, violations: usize) {
        self.push(name, violations as f64, 0.5);
    }
}

/// Tolerance resolution: the override (RES_ATLAS_TOL via the CLI) replaces
/// every default.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tolerances {
    pub override_all: Option<f64>,
}

impl Tolerances {
    fn get(&self, default: f64) -> f64 {
        self.override_all.unwrap_or(default)
    }
}

fn spaces_for(filter: Option<&SpaceDescriptor>) -> Vec<SpaceDescriptor> {
    match filter {
        Some(s) => vec![s.clone()],
        None => default_catalog(),
    }
}

fn continuable(spaces: &[SpaceDescriptor]) -> Vec<SpaceDescriptor> {
    spaces
        .iter()
        .filter(|s| !s.continuation_excluded)
        .cloned()
        .collect()
}

pub fn run_suite(
    suite: &str,
    seed: u64,
    filter: Option<&SpaceDescriptor>,
    tol: Tolerances,
) -> Result<Report> {
    match suite {
        "plancherel" => suite_plancherel(seed, filter, tol),
        "symmetry" => suite_symmetry(seed, filter, tol),
        "deformation" => suite_deformation(seed, filter, tol),
        "residues" => suite_residues(seed, filter, tol),
        "cancellation" => suite_cancellation(seed, filter, tol),
        "enumeration" => suite_enumeration(seed, filter, tol),
        other => Err(Error::Usage(format!(
            "unknown suite {other:?} (expected one of {})",
            SUITES.join(", ")
        ))),
    }
}

pub fn suite_plancherel(
    seed: u64,
    filter: Option<&SpaceDescriptor>,
    tol: Tolerances,
) -> Result<Report> {
    let mut report = Report::new("plancherel", seed);
    let mut worst_norm = 0.0f64;
    let mut worst_fact = 0.0f64;
    let mut pole_misses = 0usize;
    for space in spaces_for(filter) {
        let rho = rho_data(&space).rho_point();
        let c = c_hc(&space, &rho)?;
        worst_norm = worst_norm.max((c - C64::new(1.0, 0.0)).norm());
        let fact = factorization_identity_check(&space, 100, seed ^ 0x9e37)?;
        worst_fact = worst_fact
            .max(fact.max_rel_pq)
            .max(fact.max_rel_theta.unwrap_or(0.0))
            .max(fact.max_rel_explicit.unwrap_or(0.0));
        if density_direct(&space, &rho).is_ok() {
            pole_misses += 1; // lambda = rho must be refused as a pole
        }
    }
    report.push("c_HC(rho) = 1", worst_norm, tol.get(1e-11));
    report.push("direct vs factored density", worst_fact, tol.get(1e-10));
    report.push_bool("density pole at rho is refused", pole_misses);
    Ok(report)
}

pub fn suite_symmetry(
    seed: u64,
    filter: Option<&SpaceDescriptor>,
    tol: Tolerances,
) -> Result<Report> {
    let mut report = Report::new("symmetry", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let i = C64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    let rel = |a: C64, b: C64| (a - b).norm() / a.norm().max(b.norm()).max(1e-300);
    let spaces = spaces_for(filter);
    for space in &spaces {
        // The quarter-turn identity for vartheta carries (-1)^{m_m}; it is
        // an equality exactly on the even-m_m (continuable) spaces.
        let quarter = if space.m_m % 2 == 0 { 1.0 } else { -1.0 };
        for sym in BuiltinSymbol::ALL {
            for _ in 0..200 {
                let z = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let mut w = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if w.norm() < 0.1 {
                    w += C64::new(0.5, 0.3);
                }
                let th = vartheta_z(space, z, w);
                worst = worst.max(rel(vartheta_z(space, z, i * w), quarter * th));
                worst = worst.max(rel(vartheta_z(space, -z, w), th));
                worst = worst.max(rel(vartheta_z(space, z, -w), th));
                let ps = psi_z(space, &sym, z, w);
                worst = worst.max(rel(psi_z(space, &sym, z, i * w), ps));
                worst = worst.max(rel(psi_z(space, &sym, -z, w), ps));
                worst = worst.max(rel(psi_z(space, &sym, z, -w), ps));
                let ph = phi_z_raw(space, z, w);
                if !ph.is_finite() || ph.norm() > 1e12 {
                    continue; // too close to a cotangent pole for a clean ratio
                }
                worst = worst.max(rel(phi_z_raw(space, z, -w), -ph));
                worst = worst.max(rel(phi_z_raw(space, z, i * w), -i * ph));
                worst = worst.max(rel(phi_z_raw(space, -z, w), ph));
            }
        }
    }
    report.push("nine integrand symmetries", worst, tol.get(1e-11));

    let cfg = ContourConfig::default();
    let mut worst_f = 0.0f64;
    for space in continuable(&spaces) {
        let l0 = space.l_ell(0);
        for k in 0..20 {
            // Admissible z stay strictly inside the first branch-point
            // radius L_0, where the undeformed contour converges.
            let radius = l0 * (0.3 + 0.03 * f64::from(k));
            let angle = rng.gen_range(0.15..PI - 0.15);
            let z = C64::from_polar(radius, angle) * if k % 2 == 0 { 1.0 } else { -1.0 };
            let a = f_of_z(&space, &BuiltinSymbol::One, z, &cfg)?;
            let b = f_of_z(&space, &BuiltinSymbol::One, -z, &cfg)?;
            worst_f = worst_f.max((a - b).norm() / a.norm().max(1.0));
        }
    }
    report.push("F evenness", worst_f, tol.get(1e-10));
    Ok(report)
}

pub fn suite_deformation(
    seed: u64,
    filter: Option<&SpaceDescriptor>,
    tol: Tolerances,
) -> Result<Report> {
    let mut report = Report::new("deformation", seed);
    let spaces = match filter {
        Some(s) => {
            s.require_continuable()?;
            vec![s.clone()]
        }
        None => vec![
            catalog_lookup(Family::Diii, None)?,
            catalog_lookup(Family::Cii, Some(2))?,
        ],
    };
    let cfg = ContourConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_identity = 0.0f64;
    let mut worst_per_pole = 0.0f64;
    for space in &spaces {
        for n in -1i64..=2 {
            let (lo, hi) = if n == -1 {
                (0.35 * space.l_ell(0), 0.95 * space.l_ell(0))
            } else {
                let a = space.l_ell(n as u32);
                let b = space.l_ell(n as u32 + 1);
                (a + 0.08 * (b - a), a + 0.92 * (b - a))
            };
            for _ in 0..10 {
                let v = rng.gen_range(lo..hi);
                let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let angle = -PI / 2.0 + side * rng.gen_range(0.08..1.25);
                let z = C64::from_polar(v, angle);
                let pw = piecewise_f(space, &BuiltinSymbol::One, n, z, &cfg)?;
                let f = f_of_z(space, &BuiltinSymbol::One, z, &cfg)?;
                let rebuilt = pw.f_n + C64::new(0.0, 2.0 * PI) * pw.correction;
                worst_identity = worst_identity.max(rel_err(rebuilt, f));
                if n >= 0 {
                    let numeric =
                        f_r_res_numerical(space, &BuiltinSymbol::One, z, pw.radius, &cfg)?;
                    worst_per_pole = worst_per_pole.max(rel_err(numeric, pw.correction));
                }
            }
        }
    }
    report.push(
        "F = F_r + 2 pi i F_{r,res} (closed form)",
        worst_identity,
        tol.get(1e-8),
    );
    report.push(
        "F_{r,res}: closed form vs per-pole numerics",
        worst_per_pole,
        tol.get(1e-8),
    );
    Ok(report)
}

/// First `count` non-cancelled partner indices for a fixed ell.
fn valid_partners(space: &SpaceDescriptor, ell: u32, count: usize) -> Vec<u32> {
    (0u32..)
        .filter(|&m| !is_cancelled(space, ell, m))
        .take(count)
        .collect()
}


pub fn suite_residues(
    seed: u64,
    filter: Option<&SpaceDescriptor>,
    tol: Tolerances,
) -> Result<Report> {
    let mut report = Report::new("residues", seed);
    let spaces = match filter {
        Some(s) => {
            s.require_continuable()?;
            vec![s.clone()]
        }
        None => vec![
            catalog_lookup(Family::Diii, None)?,
            catalog_lookup(Family::Eiii, None)?,
            catalog_lookup(Family::Cii, Some(2))?,
        ],
    };
    let mut worst = 0.0f64;
    let mut nonpositive = 0usize;
    for space in &spaces {
        for ell in 0..=3u32 {
            for m in valid_partners(space, ell, 3) {
                let closed = residue_g_tilde(space, &BuiltinSymbol::One, ell, m, -1)?;
                if !(closed.c_lm > 0.0) {
                    nonpositive += 1;
                }
                let radius = (0.3 * fiber_clearance(space, ell, m)).min(0.02);
                let f = |zeta: C64| {
                    g_tilde_chart(space, &BuiltinSymbol::One, ell, -1, zeta)
                        .expect("fiber circles avoid the chart's degenerate points")
                };
                let num = numerical_residue(&f, closed.zeta, radius, 128)?;
                worst = worst.max(rel_err(num, closed.value));
            }
        }
    }
    report.push(
        "chart residue closed form vs numerics",
        worst,
        tol.get(1e-8),
    );
    report.push_bool("C_{l,m} positive on valid fibers", nonpositive);

    // Residue summaries of the first DIII resonances: single-member closed
    // form against the chart oracle, positivity of every weight.
    let diii = catalog_lookup(Family::Diii, None)?;
    let mut bad_weights = 0usize;
    let mut worst_summary = 0.0f64;
    for h in 0..10 {
        let res = resonance_at(&diii, h)?;
        let eps = vec![1i8; res.cover_order as usize + 2];
        let summary = residue_summary(&diii, &BuiltinSymbol::One, h, res.segment, &eps)?;
        for t in &summary.terms {
            if !(t.weight > 0.0) {
                bad_weights += 1;
            }
        }
        if summary.resonance.members.len() == 1 && h < 3 {
            let v = diii.b * res.abs_z_over_b;
            let ln = diii.l_ell(res.segment);
            let center = -C64::new(0.0, 1.0) * (v * v - ln * ln).sqrt() / v;
            let n = res.segment;
            let eps2 = eps.clone();
            let f = |zeta: C64| {
                crate::continuation::f_tilde_chart_singular(
                    &diii,
                    &BuiltinSymbol::One,
                    n,
                    &eps2,
                    zeta,
                )
                .expect("scan point off the degenerate locus")
            };
            let num = numerical_residue(&f, center, 0.01, 128)?;
            worst_summary = worst_summary.max(rel_err(num, summary.f_tilde_residue));
        }
    }
    report.push(
        "resonance residue closed form vs numerics",
        worst_summary,
        tol.get(1e-7),
    );
    report.push_bool("residue weights positive (first 10 resonances)", bad_weights);
    Ok(report)
}

pub fn suite_cancellation(
    seed: u64,
    filter: Option<&SpaceDescriptor>,
    tol: Tolerances,
) -> Result<Report> {
    let mut report = Report::new("cancellation", seed);
    let spaces = continuable(&spaces_for(filter));
    let mut mismatches = 0usize;
    let mut worst_residue = 0.0f64;
    for space in &spaces {
        for ell in 0..=4u32 {
            let (lo, hi) = cancellation_interval(space, ell);
            for m in 0..=12u32 {
                let in_interval = (lo..=hi).contains(&i64::from(m));
                if is_cancelled(space, ell, m) != in_interval {
                    mismatches += 1;
                }
            }
        }
        // Numerical residues vanish at the cancelled fibers.
        for ell in 0..=2u32 {
            let (lo, hi) = cancellation_interval(space, ell);
            for m in lo.max(0)..=hi {
                let m = m as u32;
                let center = zeta_lm(space, ell, m);
                let radius = (0.3 * fiber_clearance(space, ell, m)).min(0.02);
                let f = |zeta: C64| {
                    g_tilde_chart(space, &BuiltinSymbol::One, ell, -1, zeta)
                        .expect("fiber circles avoid the chart's degenerate points")
                };
                let num = numerical_residue(&f, center, radius, 128)?;
                let mut scale = 0.0f64;
                for j in 0..8 {
                    let ang = 2.0 * PI * f64::from(j) / 8.0;
                    scale = scale.max(f(center + C64::from_polar(radius, ang)).norm());
                }
                worst_residue = worst_residue.max(num.norm() / (radius * scale).max(1.0));
            }
        }
    }
    report.push_bool("exact vanishing set equals the interval", mismatches);
    report.push(
        "numerical residues at cancelled fibers",
        worst_residue,
        tol.get(1e-10),
    );
    Ok(report)
}

pub fn suite_enumeration(
    seed: u64,
    filter: Option<&SpaceDescriptor>,
    tol: Tolerances,
) -> Result<Report> {
    let mut report = Report::new("enumeration", seed);
    let spaces = spaces_for(filter);
    let mut first_mismatches = 0usize;
    let mut exclusion_misses = 0usize;
    for space in &spaces {
        if space.continuation_excluded {
            if !matches!(
                enumerate_resonances(space, &ResonanceBound::Count(1)),
                Err(Error::ExcludedSpace { .. })
            ) {
                exclusion_misses += 1;
            }
            continue;
        }
        let first = resonance_at(space, 0)?;
        if first.radius_sq != rho_data(space).rho_norm_sq {
            first_mismatches += 1;
        }
    }
    report.push_bool("first resonance modulus is sqrt<rho,rho>", first_mismatches);
    report.push_bool("excluded spaces refuse enumeration", exclusion_misses);

    // Frozen first-resonance values for the quoted spaces.
    let mut frozen_bad = 0usize;
    let frozen: [(Family, Option<u32>, Rat); 4] = [
        (Family::Diii, None, Rat::new(29, 2)),
        (Family::Aiii, Some(3), Rat::from_integer(5)),
        (Family::Cii, Some(2), Rat::new(29, 2)),
        (Family::Eiii, None, Rat::new(73, 2)),
    ];
    for (fam, p, want) in frozen {
        let space = catalog_lookup(fam, p)?;
        if filter.map_or(false, |f| f.name() != space.name()) {
            continue;
        }
        if resonance_at(&space, 0)?.radius_sq != want {
            frozen_bad += 1;
        }
    }
    report.push_bool("frozen first-resonance values", frozen_bad);

    // Scan along the ray against exact enumeration, cover order 3,
    // everything strictly below L_4.
    let scan_space = match filter {
        Some(s) if !s.continuation_excluded => s.clone(),
        Some(_) => return Ok(report),
        None => catalog_lookup(Family::Diii, None)?,
    };
    let bound = scan_space.l_ell_over_b(4) * scan_space.l_ell_over_b(4);
    let scan = scan_vs_enumeration(&scan_space, &BuiltinSymbol::One, 3, bound, 1e-6)?;
    report.push_bool(
        format!(
            "scan vs enumeration ({}, {} resonances)",
            scan_space.name(),
            scan.enumerated.len()
        ),
        usize::from(!scan.pass),
    );
    report.push("scan location error", scan.max_location_err, tol.get(1e-6));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_usage_error() {
        let err = run_suite("nope", 1, None, Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn cancellation_suite_passes_quickly() {
        let space = catalog_lookup(Family::Diii, None).unwrap();
        let report = run_suite("cancellation", 7, Some(&space), Tolerances::default()).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn tol_override_can_force_failure() {
        let space = catalog_lookup(Family::Aiii, Some(4)).unwrap();
        let tol = Tolerances {
            override_all: Some(1e-30),
        };
        let report = run_suite("plancherel", 7, Some(&space), tol).unwrap();
        assert!(!report.pass);
    }
}
