//! Exact enumeration of resonances and their residue data. A resonance is
//! a base point z_h = -i b sqrt(radius_sq) whose squared modulus satisfies
//! radius_sq = (rho_1 + ell)^2 + (rho_2 + ell + k)^2 for at least one pair
//! (ell, k) in Z_{>=0}^2; the set of such pairs is S_h, with k uniquely
//! determined by ell. Enumeration and grouping are pure integer arithmetic
//! on 4*radius_sq/b^2. The residue of the extended resolvent's local chart
//! expression at z_h assembles one positive-weight term per lead index of
//! each member (two orientations per pair on a chart that reaches both);
//! weights are reported in the normalization fixed by the chart-transfer
//! chain and are meaningful up to a single global positive constant.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::continuation::{c_lm, f_tilde_chart_singular};
use crate::contour::numerical_residue;
use crate::error::{Error, Result};
use crate::rootdata::{
    dominant_representative, lambda_is_dominant, lambda_point, lambda_point_exact, rat_f64,
    rat_str, rho_data,
};
use crate::symbol::SpectralSymbol;
use crate::{C64, Rat, SpaceDescriptor, SpectralPoint};

const I: C64 = C64::new(0.0, 1.0);

/// One contributing index pair: ell with its uniquely determined k. The
/// singular fiber pairs (ell, m') have m' = ell + m_m/2 + k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Member {
    pub ell: u32,
    pub k: u32,
}

impl Member {
    /// The partner lattice index m' = ell + m_m/2 + k.
    pub fn m_prime(&self, space: &SpaceDescriptor) -> u32 {
        self.ell + space.m_m / 2 + self.k
    }

    /// The swapped-branch representation of the same singular point:
    /// viewing m' as the leading index pairs it with m = ell.
    pub fn alias(&self, space: &SpaceDescriptor) -> (u32, u32) {
        (self.m_prime(space), self.ell)
    }
}

/// One enumerated resonance (base-point data; every sheet of the cover
/// carries a copy, recorded as `sheet_multiplicity`).
#[derive(Debug, Clone)]
pub struct Resonance {
    /// Ordinal by increasing modulus, 0-based.
    pub h: usize,
    /// 4 |z_h|^2 / b^2, the exact integer grouping key.
    pub radius_sq_times4: i64,
    /// |z_h|^2 / b^2 exactly.
    pub radius_sq: Rat,
    pub abs_z_over_b: f64,
    /// z_h = -i b sqrt(radius_sq).
    pub location: C64,
    /// S_h, sorted by ell; each ell appears once.
    pub members: Vec<Member>,
    /// Swapped-branch aliases, parallel to `members`.
    pub aliases: Vec<(u32, u32)>,
    /// Segment index n with L_n <= |z_h| < L_{n+1} (exact; equality means
    /// the chart at n is degenerate).
    pub segment: u32,
    /// Cover order N used for this enumeration.
    pub cover_order: u32,
    /// 2^{N+1} sheets of the order-N cover, each carrying the resonance.
    pub sheet_multiplicity: u64,
}

/// Enumeration bound: by exact squared modulus or by resonance count.
#[derive(Debug, Clone)]
pub enum ResonanceBound {
    /// Keep radius_sq <= the given exact rational (units of b^2).
    RadiusSq(Rat),
    /// Keep the first `count` resonances.
    Count(usize),
}

fn exact_segment(space: &SpaceDescriptor, key: i64) -> u32 {
    let mut n = 0u32;
    while {
        let next = space.two_l_ell_over_b(n + 1);
        next * next <= key
    } {
        n += 1;
    }
    n
}

/// Smallest N with L_{N+1} > b sqrt(four_bound)/2, i.e. the cover order
/// needed to reach every resonance within the bound.
fn cover_order_for(space: &SpaceDescriptor, four_bound: Rat) -> u32 {
    let mut n = 0u32;
    loop {
        let t = space.two_l_ell_over_b(n + 1);
        if Rat::from_integer(t * t) > four_bound {
            return n;
        }
        n += 1;
    }
}

fn enumerate_by_radius(space: &SpaceDescriptor, bound: Rat) -> BTreeMap<i64, Vec<Member>> {
    let four = bound * Rat::from_integer(4);
    let fits = |key: i64| Rat::from_integer(key) <= four;
    let mut groups: BTreeMap<i64, Vec<Member>> = BTreeMap::new();
    let mut ell = 0u32;
    loop {
        let a = space.two_l_ell_over_b(ell);
        let c_min = space.two_l_ell_over_b(ell + space.m_m / 2);
        if !fits(a * a + c_min * c_min) {
            break;
        }
        let mut k = 0u32;
        loop {
            let c = space.two_l_ell_over_b(ell + space.m_m / 2 + k);
            let key = a * a + c * c;
            if !fits(key) {
                break;
            }
            groups.entry(key).or_default().push(Member { ell, k });
            k += 1;
        }
        ell += 1;
    }
    groups
}

/// All resonances within the bound, grouped by exact squared modulus and
/// ordered by it. Swapped-branch singular points are folded into their
/// canonical members and listed in the alias table.
pub fn enumerate_resonances(
    space: &SpaceDescriptor,
    bound: &ResonanceBound,
) -> Result<Vec<Resonance>> {
    space.require_continuable()?;
    let (groups, four_bound) = match bound {
        ResonanceBound::RadiusSq(q) => {
            if *q < Rat::from_integer(0) {
                return Err(Error::Usage(format!(
                    "radius bound must be nonnegative, got {}",
                    rat_str(*q)
                )));
            }
            (enumerate_by_radius(space, *q), *q * Rat::from_integer(4))
        }
        ResonanceBound::Count(c) => {
            let mut q = rho_data(space).rho_norm_sq * Rat::from_integer(2);
            let mut groups = enumerate_by_radius(space, q);
            while groups.len() < *c {
                q *= Rat::from_integer(2);
                groups = enumerate_by_radius(space, q);
            }
            let four = groups
                .keys()
                .take(*c)
                .last()
                .map_or(Rat::from_integer(0), |&k| Rat::from_integer(k));
            (groups, four)
        }
    };
    let n_cover = cover_order_for(space, four_bound);
    let mult = if n_cover + 1 >= 64 {
        u64::MAX
    } else {
        1u64 << (n_cover + 1)
    };
    let mut out = Vec::new();
    for (h, (key, members)) in groups.into_iter().enumerate() {
        if let ResonanceBound::Count(c) = bound {
            if h >= *c {
                break;
            }
        }
        let radius_sq = Rat::new(key, 4);
        let abs = rat_f64(radius_sq).sqrt();
        let aliases = members.iter().map(|m| m.alias(space)).collect();
        out.push(Resonance {
            h,
            radius_sq_times4: key,
            radius_sq,
            abs_z_over_b: abs,
            location: -I * space.b * abs,
            members,
            aliases,
            segment: exact_segment(space, key),
            cover_order: n_cover,
            sheet_multiplicity: mult,
        });
    }
    Ok(out)
}

/// The h-th resonance (0-based, ordered by modulus).
pub fn resonance_at(space: &SpaceDescriptor, h: usize) -> Result<Resonance> {
    let v = enumerate_resonances(space, &ResonanceBound::Count(h + 1))?;
    v.into_iter()
        .nth(h)
        .ok_or_else(|| Error::Usage(format!("no resonance with ordinal {h}")))
}

/// One weighted term of a residue summary: the contribution of the chart
/// term G~_ell whose pole sits over the resonance. Each member pair
/// {a, a + m_m/2 + k} produces up to two terms, one per choice of leading
/// index (ell, m') = (a, c) or (c, a); the swapped orientation carries the
/// same weight because L_{m'} C_{ell,m'} is symmetric in the pair.
#[derive(Debug, Clone, Serialize)]
pub struct ResidueTerm {
    /// Leading index: the chart term G~_ell carrying this pole.
    pub ell: u32,
    /// The member's k (so min(ell, m_prime) recovers the canonical pair).
    pub k: u32,
    pub m_prime: u32,
    /// Branch sign eps_ell of the sheet the summary was taken on.
    pub eps_ell: i8,
    /// (8 b / pi) L_{m'} C_{ell,m'} / |z_h|^3; strictly positive.
    pub weight: f64,
    pub c_lm: f64,
    /// The dominant spectral parameter of the pair, exact (shared by both
    /// orientations).
    pub lambda: (Rat, Rat),
    /// sigma evaluated on this orientation, (i L_ell / b, i L_{m'} / b).
    pub symbol_value: C64,
}

/// Residue data of the local chart expression of F~ (and of the extended
/// resolvent, which differs by the documented constant i pi) at one
/// resonance, on the chart named by (n, eps). The value is the residue at
/// the sheet's own fiber coordinate eps_n * (-i sqrt(|z_h|^2 - L_n^2) /
/// |z_h|); on charts with n >= the resonance's segment every lead index of
/// every member contributes, on lower charts only leads <= n do.
#[derive(Debug, Clone)]
pub struct ResidueSummary {
    pub resonance: Resonance,
    pub n: u32,
    pub eps: Vec<i8>,
    pub terms: Vec<ResidueTerm>,
    /// i eps_n L_n^2 / sqrt(|z_h|^2 - L_n^2).
    pub chart_prefactor: C64,
    /// eps_n (L_n^2 / sqrt(|z_h|^2 - L_n^2)) sum_ell eps_ell w_ell sigma_ell
    /// over the lead indices ell <= n of the members.
    pub f_tilde_residue: C64,
    /// i pi times the F~ residue.
    pub resolvent_residue: C64,
    /// Provenance note for the weight normalization.
    pub normalization: &'static str,
}

/// Assemble the closed-form residue at resonance h in the chart (n, eps).
/// Requires L_n <= |z_h| < L_{N+1} with N = eps.len() - 1; equality at L_n
/// is the degenerate-chart error.
pub fn residue_summary<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    h: usize,
    n: u32,
    eps: &[i8],
) -> Result<ResidueSummary> {
    space.require_continuable()?;
    if eps.is_empty() || eps.iter().any(|&e| e != 1 && e != -1) {
        return Err(Error::Usage(
            "sheet vector must be nonempty with entries +-1".to_string(),
        ));
    }
    let n_cover = (eps.len() - 1) as u32;
    if n > n_cover {
        return Err(Error::Usage(format!(
            "chart index {n} exceeds cover order {n_cover}"
        )));
    }
    let res = resonance_at(space, h)?;
    let key = res.radius_sq_times4;
    let tn = space.two_l_ell_over_b(n);
    if key == tn * tn {
        return Err(Error::DegenerateChart {
            n: n as usize,
            four_radius_sq: key,
        });
    }
    if key < tn * tn {
        return Err(Error::Usage(format!(
            "resonance {h} (|z|^2 = {}) lies below chart {n}'s reach L_{n}",
            rat_str(res.radius_sq)
        )));
    }
    let t_top = space.two_l_ell_over_b(n_cover + 1);
    if key >= t_top * t_top {
        return Err(Error::Usage(format!(
            "resonance {h} out of reach for cover order {n_cover} (|z_h| >= L_{})",
            n_cover + 1
        )));
    }
    let v = space.b * res.abs_z_over_b;
    let ln = space.l_ell(n);
    let dn = (v * v - ln * ln).sqrt();
    let eps_n = f64::from(eps[n as usize]);
    let mut sum = C64::new(0.0, 0.0);
    let mut terms = Vec::with_capacity(2 * res.members.len());
    for m in &res.members {
        let mp = m.m_prime(space);
        let lambda = lambda_point_exact(space, m.ell, m.ell + m.k);
        // Each member pair meets the chart through two singular terms:
        // G~_ell with its pole at the partner index and G~_{m'} with the
        // roles swapped. Both carry the sheet sign of their own leading
        // index; only leads the chart sum reaches (lead <= n) contribute.
        for (lead, partner) in [(m.ell, mp), (mp, m.ell)] {
            if lead > n {
                continue;
            }
            let eps_ell = eps[lead as usize];
            let c = c_lm(space, lead, partner);
            let weight = 8.0 * space.b / PI * space.l_ell(partner) * c / (v * v * v);
            let sigma = symbol.eval(
                I * space.l_ell(lead) / space.b,
                I * space.l_ell(partner) / space.b,
            );
            sum += f64::from(eps_ell) * weight * sigma;
            terms.push(ResidueTerm {
                ell: lead,
                k: m.k,
                m_prime: partner,
                eps_ell,
                weight,
                c_lm: c,
                lambda,
                symbol_value: sigma,
            });
        }
    }
    let f_tilde_residue = eps_n * (ln * ln / dn) * sum;
    Ok(ResidueSummary {
        resonance: res,
        n,
        eps: eps.to_vec(),
        terms,
        chart_prefactor: I * eps_n * ln * ln / dn,
        f_tilde_residue,
        resolvent_residue: I * PI * f_tilde_residue,
        normalization: "weights fixed by the chart-transfer chain; physical up to one global positive constant",
    })
}

/// Integrality witness for lambda(l1, l2): the pair (ell, k) with
/// lambda = lambda(ell, ell + k) after Weyl reduction; the module is
/// finite dimensional iff both entries are nonnegative integers. Exact.
#[derive(Debug, Clone, Serialize)]
pub struct FiniteDimWitness {
    pub ok: bool,
    /// (lambda - rho) expanded in the member basis; integers iff `ok`
    /// given integer input.
    pub ell: String,
    pub k: String,
    /// The reduced (dominant) coordinates actually checked, exact.
    pub lambda_dominant: (String, String),
    pub input_was_dominant: bool,
}

pub fn finite_dim_check(space: &SpaceDescriptor, l1: i64, l2: i64) -> FiniteDimWitness {
    let rho = rho_data(space);
    let x1 = rho.rho_b1 + Rat::from_integer(l1);
    let x2 = rho.rho_b2 + Rat::from_integer(l2);
    let zero = Rat::from_integer(0);
    let input_was_dominant = x1 >= zero && x2 >= x1;
    let (d1, d2) = if input_was_dominant {
        (x1, x2)
    } else {
        dominant_representative(x1, x2)
    };
    let ell = d1 - rho.rho_b1;
    let k = (d2 - rho.rho_b2) - ell;
    let ok = ell.is_integer() && k.is_integer() && ell >= zero && k >= zero;
    FiniteDimWitness {
        ok,
        ell: rat_str(ell),
        k: rat_str(k),
        lambda_dominant: (rat_str(d1), rat_str(d2)),
        input_was_dominant,
    }
}

/// The distinct dominant spectral parameters lambda(ell, ell+k) of the
/// h-th residue operator; count always equals |S_h|.
pub fn residue_operator_spectrum(space: &SpaceDescriptor, h: usize) -> Result<Vec<SpectralPoint>> {
    let res = resonance_at(space, h)?;
    let mut exact: Vec<(Rat, Rat)> = Vec::new();
    let mut out = Vec::new();
    for m in &res.members {
        debug_assert!(lambda_is_dominant(space, m.ell, m.ell + m.k));
        let pair = lambda_point_exact(space, m.ell, m.ell + m.k);
        debug_assert!(!exact.contains(&pair), "spectral parameters must be distinct");
        exact.push(pair);
        out.push(lambda_point(space, m.ell, m.ell + m.k));
    }
    Ok(out)
}

/// One table row: resonance data plus the sigma = 1 structural weights.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub h: usize,
    /// Exact "num/den".
    pub radius_sq: String,
    pub abs_z_over_b: f64,
    pub members: Vec<(u32, u32)>,
    /// Exact "(num/den, num/den)" dominant parameters, one per member.
    pub lambda: Vec<String>,
    pub weights: Vec<f64>,
    pub aliases: Vec<(u32, u32)>,
}

pub fn resonance_rows(space: &SpaceDescriptor, list: &[Resonance]) -> Vec<TableRow> {
    list.iter()
        .map(|r| {
            let v = space.b * r.abs_z_over_b;
            let mut lambda = Vec::new();
            let mut weights = Vec::new();
            for m in &r.members {
                let (a, b) = lambda_point_exact(space, m.ell, m.ell + m.k);
                lambda.push(format!("({}, {})", rat_str(a), rat_str(b)));
                let c = c_lm(space, m.ell, m.m_prime(space));
                weights.push(8.0 * space.b / PI * space.l_ell(m.m_prime(space)) * c / (v * v * v));
            }
            TableRow {
                h: r.h,
                radius_sq: rat_str(r.radius_sq),
                abs_z_over_b: r.abs_z_over_b,
                members: r.members.iter().map(|m| (m.ell, m.k)).collect(),
                lambda,
                weights,
                aliases: r.aliases.clone(),
            }
        })
        .collect()
}

fn pairs_str(pairs: &[(u32, u32)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
    format!("[{}]", body.join(","))
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("h,radius_sq,abs_z_over_b,members,lambda,weights,aliases\n");
    for r in rows {
        let weights: Vec<String> = r.weights.iter().map(|w| format!("{w:.12e}")).collect();
        out.push_str(&format!(
            "{},{},{},\"{}\",\"{}\",\"{}\",\"{}\"\n",
            r.h,
            r.radius_sq,
            r.abs_z_over_b,
            pairs_str(&r.members),
            r.lambda.join("; "),
            weights.join("; "),
            pairs_str(&r.aliases),
        ));
    }
    out
}

pub fn table_json(rows: &[TableRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("table rows serialize");
    s.push('\n');
    s
}

/// A pole found by scanning the chart-local singular part along the ray
/// image; locations recovered from the first-moment ratio of the contour
/// integrals.
#[derive(Debug, Clone, Serialize)]
pub struct DetectedPole {
    pub segment: u32,
    /// Chart coordinate of the pole (on the scan line i R_{<0}).
    pub zeta: C64,
    /// Recovered modulus |z|/b.
    pub v_over_b: f64,
    pub radius_sq: f64,
    /// Residue of the chart-local expression there.
    pub residue: C64,
}

/// Scan one segment's chart line for poles with radius_sq below the bound.
/// Windows of radius 0.009 slide in steps of 0.01 along zeta = -i t; a
/// window whose circle integral exceeds the noise threshold contributes a
/// pole located by the moment ratio. Windows that land a pole on their
/// boundary fail to converge and are skipped (neighbors recover the pole).
pub fn scan_segment<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    n: u32,
    eps: &[i8],
    max_radius_sq: f64,
) -> Result<Vec<DetectedPole>> {
    space.require_continuable()?;
    let ln = space.l_ell(n) / space.b;
    let lnext = space.l_ell(n + 1) / space.b;
    let v_hi = max_radius_sq.sqrt().min(lnext);
    if v_hi <= ln {
        return Ok(Vec::new());
    }
    let t_hi = (1.0 - (ln / v_hi).powi(2)).sqrt().min(0.97);
    let step = 0.01;
    let win = 0.009;
    let f = |zeta: C64| {
        f_tilde_chart_singular(space, symbol, n, eps, zeta)
            .expect("scan line stays away from the chart's degenerate points")
    };
    let mut raw: Vec<(C64, C64, f64)> = Vec::new(); // (zeta*, residue, window offset)
    let mut t = 0.012;
    while t <= t_hi + 0.5 * step {
        let center = -I * t;
        let i0 = match numerical_residue(&f, center, win, 128) {
            Ok(v) => v,
            Err(Error::QuadratureDivergence { .. }) => {
                t += step;
                continue;
            }
            Err(e) => return Err(e),
        };
        // Noise threshold scaled by the function size on the window.
        let mut scale = 0.0f64;
        for j in 0..8 {
            let ang = 2.0 * PI * f64::from(j) / 8.0;
            scale = scale.max(f(center + C64::from_polar(win, ang)).norm());
        }
        if i0.norm() > 1e-6 * win * scale.max(1e-300) {
            let g = |zeta: C64| zeta * f(zeta);
            let i1 = numerical_residue(&g, center, win, 128)?;
            let zeta_star = i1 / i0;
            if (zeta_star - center).norm() <= win {
                raw.push((zeta_star, i0, (zeta_star - center).norm()));
            }
        }
        t += step;
    }
    // Merge window duplicates, keeping the best-centered detection.
    let mut merged: Vec<(C64, C64, f64)> = Vec::new();
    for cand in raw {
        if let Some(prev) = merged
            .iter_mut()
            .find(|p| (p.0 - cand.0).norm() < 0.5 * step)
        {
            if cand.2 < prev.2 {
                *prev = cand;
            }
        } else {
            merged.push(cand);
        }
    }
    let mut out = Vec::new();
    for (zeta, residue, _) in merged {
        let t_star = -zeta.im;
        if !(0.0..1.0).contains(&t_star) {
            continue;
        }
        let v = ln / (1.0 - t_star * t_star).sqrt();
        if v < ln * (1.0 - 1e-9) || v >= lnext * (1.0 - 1e-12) || v * v > max_radius_sq {
            continue;
        }
        out.push(DetectedPole {
            segment: n,
            zeta,
            v_over_b: v,
            radius_sq: v * v,
            residue,
        });
    }
    Ok(out)
}

/// Result of comparing a full scan against exact enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub detections: Vec<DetectedPole>,
    /// Enumerated radius_sq values (exact strings) within the bound.
    pub enumerated: Vec<String>,
    /// (h, detection index) pairs matched within the margin.
    pub matched: Vec<(usize, usize)>,
    pub missing: Vec<usize>,
    pub spurious: Vec<usize>,
    /// Worst matched |v_detected - v_exact| in units of b.
    pub max_location_err: f64,
    pub pass: bool,
}

/// Scan every segment of the order-`cover` all-plus sheet for poles with
/// radius_sq strictly below the bound and reconcile with the exact
/// enumeration: every enumerated resonance must be detected at the right
/// modulus and nothing else may appear.
pub fn scan_vs_enumeration<S: SpectralSymbol + ?Sized>(
    space: &SpaceDescriptor,
    symbol: &S,
    cover: u32,
    max_radius_sq: Rat,
    margin: f64,
) -> Result<ScanReport> {
    let eps = vec![1i8; cover as usize + 1];
    let bound_f = rat_f64(max_radius_sq);
    let mut detections = Vec::new();
    for n in 0..=cover {
        detections.extend(scan_segment(space, symbol, n, &eps, bound_f)?);
    }
    let all = enumerate_resonances(space, &ResonanceBound::RadiusSq(max_radius_sq))?;
    let truth: Vec<&Resonance> = all
        .iter()
        .filter(|r| r.radius_sq < max_radius_sq)
        .collect();
    let mut matched = Vec::new();
    let mut missing = Vec::new();
    let mut used = vec![false; detections.len()];
    let mut max_err = 0.0f64;
    for r in &truth {
        let mut best: Option<(usize, f64)> = None;
        for (j, d) in detections.iter().enumerate() {
            if used[j] {
                continue;
            }
            let err = (d.v_over_b - r.abs_z_over_b).abs();
            if err <= margin && best.map_or(true, |(_, e)| err < e) {
                best = Some((j, err));
            }
        }
        match best {
            Some((j, err)) => {
                used[j] = true;
                matched.push((r.h, j));
                max_err = max_err.max(err);
            }
            None => missing.push(r.h),
        }
    }
    let spurious: Vec<usize> = (0..detections.len()).filter(|&j| !used[j]).collect();
    let pass = missing.is_empty() && spurious.is_empty() && matched.len() == truth.len();
    Ok(ScanReport {
        detections,
        enumerated: truth.iter().map(|r| rat_str(r.radius_sq)).collect(),
        matched,
        missing,
        spurious,
        max_location_err: max_err,
        pass,
    })
}
