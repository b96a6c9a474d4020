//! Property-based invariants: exact structural facts (lattice arithmetic,
//! Weyl reduction, enumeration bookkeeping) hold for randomized inputs,
//! and the analytic identities hold at randomized points.

use proptest::prelude::*;

use res_atlas::continuation::{c_lm, cancellation_interval, is_cancelled, w1_plus, zeta_plus};
use res_atlas::plancherel::{
    density_direct, density_factored, p1, p1q1, point_is_generic, q1, rel_err,
};
use res_atlas::resonances::{enumerate_resonances, finite_dim_check, ResonanceBound};
use res_atlas::rootdata::{
    default_catalog, dominant_representative, rat_parse, rat_str, rho_data,
};
use res_atlas::{C64, Rat, SpaceDescriptor, SpectralPoint};

fn catalog_space(index: usize) -> SpaceDescriptor {
    let catalog = default_catalog();
    catalog[index % catalog.len()].clone()
}

fn continuable_space(index: usize) -> SpaceDescriptor {
    let spaces: Vec<_> = default_catalog()
        .into_iter()
        .filter(|s| !s.continuation_excluded)
        .collect();
    spaces[index % spaces.len()].clone()
}

proptest! {
    /// Exact rational round trip of the "num/den" wire format.
    #[test]
    fn rational_string_roundtrip(num in -10_000i64..10_000, den in 1i64..1_000) {
        let r = Rat::new(num, den);
        prop_assert_eq!(rat_parse(&rat_str(r)).unwrap(), r);
    }

    /// Weyl reduction: the dominant representative is canonical (0 <= x1
    /// <= x2), idempotent, and constant on the whole signed-permutation
    /// orbit.
    #[test]
    fn dominant_representative_is_canonical(
        n1 in -60i64..60, n2 in -60i64..60, den in 1i64..8,
    ) {
        let (x1, x2) = (Rat::new(n1, den), Rat::new(n2, den));
        let d = dominant_representative(x1, x2);
        prop_assert!(d.0 >= Rat::from_integer(0) && d.0 <= d.1);
        prop_assert_eq!(dominant_representative(d.0, d.1), d);
        for (a, b) in [
            (x1, x2), (-x1, x2), (x1, -x2), (-x1, -x2),
            (x2, x1), (-x2, x1), (x2, -x1), (-x2, -x1),
        ] {
            prop_assert_eq!(dominant_representative(a, b), d);
        }
    }

    /// The integrality witness accepts exactly the dominant lattice and is
    /// invariant under reflecting either coordinate of lambda.
    #[test]
    fn finite_dim_witness_roundtrip(
        space_idx in 0usize..15, ell in 0i64..10, k in 0i64..10, flip in any::<bool>(),
    ) {
        let space = catalog_space(space_idx);
        let w = finite_dim_check(&space, ell, ell + k);
        prop_assert!(w.ok);
        prop_assert!(w.input_was_dominant);
        prop_assert_eq!(&w.ell, &format!("{ell}/1"));
        prop_assert_eq!(&w.k, &format!("{k}/1"));

        // x1 -> -x1 (or x2 -> -x2) lands on the same Weyl orbit, hence the
        // same witness; the reflected offset is -(2 rho_b + l).
        let rho = rho_data(&space);
        let two_rho_1 = (rho.rho_b1 * Rat::from_integer(2)).to_integer();
        let two_rho_2 = (rho.rho_b2 * Rat::from_integer(2)).to_integer();
        let refl = if flip {
            finite_dim_check(&space, -(two_rho_1 + ell), ell + k)
        } else {
            finite_dim_check(&space, ell, -(two_rho_2 + ell + k))
        };
        prop_assert!(refl.ok);
        prop_assert_eq!(&refl.lambda_dominant, &w.lambda_dominant);
        prop_assert_eq!(&refl.ell, &w.ell);
        prop_assert_eq!(&refl.k, &w.k);
    }

    /// Residue-weight positivity is exactly complementary to the
    /// cancellation interval, for both the exact test and the closed form.
    #[test]
    fn c_lm_positive_iff_surviving(
        space_idx in 0usize..13, ell in 0u32..8, m in 0u32..16,
    ) {
        let space = continuable_space(space_idx);
        let (lo, hi) = cancellation_interval(&space, ell);
        let inside = (lo..=hi).contains(&i64::from(m));
        prop_assert_eq!(is_cancelled(&space, ell, m), inside);
        let c = c_lm(&space, ell, m);
        if inside {
            prop_assert_eq!(c, 0.0);
        } else {
            prop_assert!(c > 0.0, "C_{{{},{}}} = {} on {}", ell, m, c, space.name());
        }
    }

    /// The branch section solves its defining surface equation
    /// zeta+(z)^2 + 1 = (i L_ell / z)^2, and the root it is built from
    /// stays in the closed unit disk and solves its quadratic.
    #[test]
    fn zeta_plus_satisfies_surface_equation(
        space_idx in 0usize..13,
        ell in 0u32..4,
        r in 0.2f64..6.0,
        arg in 0.06f64..3.08,
        lower in any::<bool>(),
    ) {
        let space = continuable_space(space_idx);
        let z = C64::from_polar(r, if lower { -arg } else { arg });
        if let Ok(zeta) = zeta_plus(&space, ell, z) {
            let a = C64::new(0.0, space.l_ell(ell)) / z;
            let lhs = zeta * zeta + C64::new(1.0, 0.0);
            let rhs = a * a;
            prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
            let w = w1_plus(&space, ell, z).unwrap();
            prop_assert!(w.norm() <= 1.0 + 1e-12, "|w1+| = {}", w.norm());
            let quad = w * w - 2.0 * a * w + C64::new(1.0, 0.0);
            prop_assert!(quad.norm() <= 1e-10 * (1.0 + a.norm() * a.norm()));
        }
    }

    /// Rank-one building blocks: p1 is even, q1 and p1*q1 are odd.
    #[test]
    fn rank_one_parities(
        space_idx in 0usize..15,
        re in -4.0f64..4.0,
        im in -2.0f64..2.0,
    ) {
        let space = catalog_space(space_idx);
        let x = C64::new(re, im);
        let p = p1(&space, x);
        prop_assert!(rel_err(p1(&space, -x), p) < 1e-11);
        let q = q1(&space, x);
        prop_assume!(q.is_finite() && q.norm() < 1e8);
        prop_assert!(rel_err(q1(&space, -x), -q) < 1e-10);
        let pq = p1q1(&space, x);
        prop_assert!(rel_err(p1q1(&space, -x), -pq) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Direct density vs the factored product at random generic points.
    #[test]
    fn density_factorization_at_random_points(
        space_idx in 0usize..15,
        x1re in -3.0f64..3.0, x1im in -2.0f64..2.0,
        x2re in -3.0f64..3.0, x2im in -2.0f64..2.0,
    ) {
        let space = catalog_space(space_idx);
        let lambda = SpectralPoint::new(C64::new(x1re, x1im), C64::new(x2re, x2im));
        prop_assume!(point_is_generic(&lambda, 0.05));
        let direct = density_direct(&space, &lambda).unwrap();
        let parts = density_factored(&space, &lambda).unwrap();
        prop_assert!(
            rel_err(parts.product, direct) < 1e-10,
            "{}: {} vs {}", space.name(), parts.product, direct
        );
    }

    /// Weyl invariance of the density at random generic points.
    #[test]
    fn density_weyl_invariance(
        space_idx in 0usize..15,
        x1re in -3.0f64..3.0, x1im in -2.0f64..2.0,
        x2re in -3.0f64..3.0, x2im in -2.0f64..2.0,
    ) {
        let space = catalog_space(space_idx);
        let lambda = SpectralPoint::new(C64::new(x1re, x1im), C64::new(x2re, x2im));
        prop_assume!(point_is_generic(&lambda, 0.05));
        let base = density_direct(&space, &lambda).unwrap();
        for img in lambda.weyl_orbit() {
            prop_assert!(rel_err(density_direct(&space, &img).unwrap(), base) < 1e-10);
        }
    }

    /// Enumeration bookkeeping is exact: ordered radii, consecutive
    /// ordinals, Pythagorean membership, one member per lead index,
    /// aliases mirroring members, and the segment bracket.
    #[test]
    fn enumeration_is_exact(space_idx in 0usize..13, num in 0i64..320, den in 1i64..4) {
        let space = continuable_space(space_idx);
        let bound = Rat::new(num, den);
        let list = enumerate_resonances(&space, &ResonanceBound::RadiusSq(bound)).unwrap();
        let mut prev: Option<Rat> = None;
        for (idx, r) in list.iter().enumerate() {
            prop_assert_eq!(r.h, idx);
            prop_assert!(r.radius_sq <= bound);
            prop_assert_eq!(
                Rat::from_integer(r.radius_sq_times4),
                r.radius_sq * Rat::from_integer(4)
            );
            if let Some(p) = prev {
                prop_assert!(p < r.radius_sq);
            }
            prev = Some(r.radius_sq);

            prop_assert!(!r.members.is_empty());
            let mut leads: Vec<u32> = Vec::new();
            for (m, alias) in r.members.iter().zip(&r.aliases) {
                let mp = m.m_prime(&space);
                let (a, b) = (space.two_l_ell_over_b(m.ell), space.two_l_ell_over_b(mp));
                prop_assert_eq!(a * a + b * b, r.radius_sq_times4);
                prop_assert_eq!(*alias, (mp, m.ell));
                leads.push(m.ell);
            }
            let mut sorted = leads.clone();
            sorted.sort_unstable();
            sorted.dedup();
            prop_assert_eq!(&sorted, &leads, "members sorted and unique by ell");

            let ts = space.two_l_ell_over_b(r.segment);
            let tn = space.two_l_ell_over_b(r.segment + 1);
            prop_assert!(ts * ts <= r.radius_sq_times4 && r.radius_sq_times4 < tn * tn);
        }
    }

    /// Growing the bound only appends: the smaller enumeration is a prefix
    /// of the larger one.
    #[test]
    fn enumeration_is_monotone(space_idx in 0usize..13, q1 in 0i64..200, dq in 0i64..120) {
        let space = continuable_space(space_idx);
        let small = enumerate_resonances(
            &space,
            &ResonanceBound::RadiusSq(Rat::from_integer(q1)),
        )
        .unwrap();
        let large = enumerate_resonances(
            &space,
            &ResonanceBound::RadiusSq(Rat::from_integer(q1 + dq)),
        )
        .unwrap();
        prop_assert!(small.len() <= large.len());
        for (a, b) in small.iter().zip(&large) {
            prop_assert_eq!(a.radius_sq, b.radius_sq);
            prop_assert_eq!(a.h, b.h);
            let am: Vec<_> = a.members.iter().map(|m| (m.ell, m.k)).collect();
            let bm: Vec<_> = b.members.iter().map(|m| (m.ell, m.k)).collect();
            prop_assert_eq!(am, bm);
        }
    }

    /// Count-bounded enumeration agrees with radius-bounded enumeration.
    #[test]
    fn enumeration_count_bound(space_idx in 0usize..13, count in 1usize..12) {
        let space = continuable_space(space_idx);
        let by_count = enumerate_resonances(&space, &ResonanceBound::Count(count)).unwrap();
        prop_assert_eq!(by_count.len(), count);
        let radius = by_count.last().unwrap().radius_sq;
        let by_radius = enumerate_resonances(&space, &ResonanceBound::RadiusSq(radius)).unwrap();
        prop_assert_eq!(by_radius.len(), count);
        for (a, b) in by_count.iter().zip(&by_radius) {
            prop_assert_eq!(a.radius_sq, b.radius_sq);
        }
    }
}
