//! Cross-module property checks: S-pair completeness oracles, Hilbert
//! consistency, power containment, codimension measurements against the
//! closed-form counts, discrepancy monotonicity and scaling, the exception
//! region against a brute-force eps' oracle, and rationals spot checks.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vanish_core::catalog::{build_target, parse_label};
use vanish_core::cohomology::{line_bundle_cohomology, vanishing_scan, ScanVerdict};
use vanish_core::curves::{eps_cap, exception_region, nef_big_check, CurveVanishingQuery};
use vanish_core::discrepancy::{
    discrepancy_at_scaled, discrepancy_report, exceptional_indices, optimize_multiplicities,
    MultiplicityVector,
};
use vanish_core::divisor::{degree_sum_bound, Q};
use vanish_core::field::{Rat, F32003};
use vanish_core::gb::{groebner_basis, normal_form, ResourceLimits};
use vanish_core::ideal::GradedIdeal;
use vanish_core::matrix::pfaffian_expansion;
use vanish_core::monomial::MonomialOrder;
use vanish_core::points::sample_rank_point;
use vanish_core::poly::Polynomial;
use vanish_core::resolution::{free_resolution, hilbert_function, GradedModulePresentation};
use vanish_core::varieties::{degeneracy_codim, degeneracy_ideal, EmbeddingCase};
use vanish_core::{Field, Ring};

type K = F32003;
type P = Polynomial<K>;

fn parse_ideal(nvars: usize, gens: &[&str]) -> GradedIdeal<K> {
    GradedIdeal::new(
        nvars,
        gens.iter().map(|s| P::parse(nvars, s).unwrap()).collect(),
    )
    .unwrap()
}

/// Independent S-pair oracle: every S-polynomial of pairs from a computed
/// basis must reduce to zero against it.
fn assert_all_spairs_reduce(basis: &[P], order: MonomialOrder) {
    for (a, f) in basis.iter().enumerate() {
        for g in basis.iter().skip(a + 1) {
            let (mf, cf) = f.leading_term(order).map(|(m, c)| (m.clone(), *c)).unwrap();
            let (mg, cg) = g.leading_term(order).map(|(m, c)| (m.clone(), *c)).unwrap();
            let lcm = mf.lcm(&mg);
            let s = f
                .mul_monomial(&lcm.try_div(&mf).unwrap())
                .scale(&cf.inv().unwrap())
                .sub(
                    &g.mul_monomial(&lcm.try_div(&mg).unwrap())
                        .scale(&cg.inv().unwrap()),
                );
            let nf = normal_form(&s, basis, order).unwrap();
            assert!(nf.is_zero(), "S-pair did not reduce to zero");
        }
    }
}

#[test]
fn spair_oracle_on_test_ideals() {
    let order = MonomialOrder::GrevLex;
    let limits = ResourceLimits::none();
    let cases: Vec<GradedIdeal<K>> = vec![
        parse_ideal(2, &["1*x0^1*x1^1", "1*x0^2+-1*x1^2"]),
        parse_ideal(3, &["1*x0^1", "1*x1^1", "1*x2^1"]),
        degeneracy_ideal(&EmbeddingCase::Generic { rows: 2, cols: 3 }, 2).unwrap(),
        degeneracy_ideal(&EmbeddingCase::Symmetric { size: 3 }, 2).unwrap(),
        build_target::<K>(&parse_label("rnc:4").unwrap(), 0)
            .unwrap()
            .ideal,
    ];
    for ideal in cases {
        let basis = groebner_basis(ideal.generators(), order, &limits).unwrap();
        assert_all_spairs_reduce(&basis, order);
        // the three minors of the generic 2x3 matrix are their own basis
        for g in ideal.generators() {
            assert!(normal_form(g, &basis, order).unwrap().is_zero());
        }
    }
    // the 2x2 minors of the generic 2x3 matrix already form a reduced basis
    let minors = degeneracy_ideal::<K>(&EmbeddingCase::Generic { rows: 2, cols: 3 }, 2).unwrap();
    let basis = groebner_basis(minors.generators(), order, &limits).unwrap();
    assert_eq!(basis.len(), 3);
}

#[test]
fn determinant_lies_in_minor_ideal() {
    // normal form of det_3 against the basis of 2x2 minors of the 3x3 matrix
    let case = EmbeddingCase::Generic { rows: 3, cols: 3 };
    let minors = degeneracy_ideal::<K>(&case, 2).unwrap();
    let det = degeneracy_ideal::<K>(&case, 3).unwrap();
    let basis = groebner_basis(
        minors.generators(),
        MonomialOrder::GrevLex,
        &ResourceLimits::none(),
    )
    .unwrap();
    let nf = normal_form(&det.generators()[0], &basis, MonomialOrder::GrevLex).unwrap();
    assert!(nf.is_zero());
}

#[test]
fn segre_2x3_squared_has_six_generators() {
    let minors = degeneracy_ideal::<K>(&EmbeddingCase::Generic { rows: 2, cols: 3 }, 2).unwrap();
    let sq = minors.power(2, &ResourceLimits::none()).unwrap();
    assert_eq!(sq.num_generators(), 6);
    assert!(sq.degrees().iter().all(|&d| d == 4));
}

#[test]
fn hilbert_two_routes_agree_on_modules() {
    // hilbert_function computes both routes internally and errors on mismatch
    let limits = ResourceLimits::none();
    let order = MonomialOrder::GrevLex;
    let cases: Vec<GradedIdeal<K>> = vec![
        parse_ideal(3, &["1*x0^2+1*x1^1*x2^1"]),
        degeneracy_ideal(&EmbeddingCase::Generic { rows: 2, cols: 3 }, 2).unwrap(),
        build_target::<K>(&parse_label("rnc:3").unwrap(), 0)
            .unwrap()
            .ideal,
    ];
    for ideal in cases {
        let quotient = GradedModulePresentation::quotient_of_ideal(&ideal).unwrap();
        let module = GradedModulePresentation::module_of_ideal(&ideal, order, &limits).unwrap();
        for d in 0..=8i64 {
            let q = hilbert_function(&quotient, d, order, &limits).unwrap();
            let m = hilbert_function(&module, d, order, &limits).unwrap();
            // the two presentations partition the ambient graded piece
            let total =
                vanish_core::resolution::dim_graded_piece(ideal.nvars() as i64 - 1, d) as usize;
            assert_eq!(q + m, total, "degree {d}");
        }
    }
}

#[test]
fn resolution_differentials_compose_to_zero() {
    let limits = ResourceLimits::none();
    let order = MonomialOrder::GrevLex;
    for label in ["segre:2x3", "veronese:3", "rnc:4"] {
        let ideal = build_target::<K>(&parse_label(label).unwrap(), 0)
            .unwrap()
            .ideal;
        let pres = GradedModulePresentation::quotient_of_ideal(&ideal).unwrap();
        let res = free_resolution(&pres, order, &limits).unwrap();
        res.verify_complex().unwrap();
        assert!(res.length() <= ideal.nvars());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ideal_power_containment(seed in 0u64..2000, a in 1usize..3, b in 1usize..3) {
        // I^{a+b} is contained in I^a * I^b, generator by generator
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = [
            "1*x0^1", "1*x1^1", "1*x2^1",
            "1*x0^1+1*x1^1", "1*x1^2+-1*x0^1*x2^1", "1*x0^1*x1^1+1*x2^2",
        ];
        let picks: Vec<P> = (0..2 + (seed % 2) as usize)
            .map(|_| {
                let i = rand::Rng::gen_range(&mut rng, 0..pool.len());
                P::parse(3, pool[i]).unwrap()
            })
            .collect();
        let ideal = GradedIdeal::new(3, picks).unwrap();
        prop_assume!(ideal.num_generators() >= 1);
        let limits = ResourceLimits::none();
        let high = ideal.power(a + b, &limits).unwrap();
        let ia = ideal.power(a, &limits).unwrap();
        let ib = ideal.power(b, &limits).unwrap();
        let mut product_gens = Vec::new();
        for f in ia.generators() {
            for g in ib.generators() {
                product_gens.push(f.mul(g));
            }
        }
        let product = GradedIdeal::new(3, product_gens).unwrap();
        let basis = groebner_basis(product.generators(), MonomialOrder::GrevLex, &limits).unwrap();
        for gen in high.generators() {
            let nf = normal_form(gen, &basis, MonomialOrder::GrevLex).unwrap();
            prop_assert!(nf.is_zero(), "generator {gen} escapes the product ideal");
        }
    }

    #[test]
    fn discrepancy_monotone_in_multiplicities(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cases = [
            EmbeddingCase::Generic { rows: 3, cols: 5 },
            EmbeddingCase::Generic { rows: 4, cols: 4 },
            EmbeddingCase::Symmetric { size: 5 },
            EmbeddingCase::Skew { size: 8 },
        ];
        let case = cases[rand::Rng::gen_range(&mut rng, 0..cases.len())];
        let hi = case.max_index();
        let values: Vec<u32> = (2..=hi)
            .map(|i| {
                let cap = if i == hi { 1 } else { 3 };
                rand::Rng::gen_range(&mut rng, 0..=cap)
            })
            .collect();
        let nv = MultiplicityVector::new(case, values.clone()).unwrap();
        let rep = discrepancy_report(&case, &nv).unwrap();
        // bump one coordinate (respecting the top cap) and compare
        let bump = rand::Rng::gen_range(&mut rng, 0..values.len());
        if bump == values.len() - 1 {
            return Ok(()); // top index is capped at 1 in these cases
        }
        let mut bumped = values.clone();
        bumped[bump] += 1;
        let nv2 = MultiplicityVector::new(case, bumped).unwrap();
        let rep2 = discrepancy_report(&case, &nv2).unwrap();
        for (j, d) in &rep.exceptional {
            let d2 = rep2.exceptional[j];
            if bump + 2 > *j {
                prop_assert!(d2 < *d, "discrepancy at E_{j} must drop when i > j grows");
            } else {
                prop_assert_eq!(d2, *d, "indices at or below j must not change E_{}", j);
            }
        }
    }

    #[test]
    fn scaling_property_yields_klt(seed in 0u64..300, num in 1i64..10) {
        // for any lc vector, coefficients (1 - eps) give all discrepancies > -1
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = EmbeddingCase::Generic { rows: 4, cols: 6 };
        let (nv, rep) = if rand::Rng::gen_bool(&mut rng, 0.5) {
            optimize_multiplicities(&case).unwrap()
        } else {
            let values: Vec<u32> = (2..=4).map(|_| rand::Rng::gen_range(&mut rng, 0..=2)).collect();
            let nv = MultiplicityVector::new(case, values).unwrap();
            let rep = discrepancy_report(&case, &nv).unwrap();
            (nv, rep)
        };
        prop_assume!(rep.verdict.is_lc());
        let scale = Q::one() - Q::new(num, 10); // 1 - eps, eps in (0, 1)
        for j in exceptional_indices(&case) {
            prop_assert!(discrepancy_at_scaled(&case, &nv, j, scale) > Q::from_integer(-1));
        }
    }
}

use num::One;

#[test]
fn optimizer_never_beats_degree_sum_claim() {
    // strategy optimum e <= 2r - n on the full grid
    for k in 2..=8usize {
        for m in k..=8usize {
            let case = EmbeddingCase::Generic { rows: k, cols: m };
            let (_, rep) = optimize_multiplicities(&case).unwrap();
            let all_twos =
                degree_sum_bound(&vec![2; case.codim()], case.ambient_dim(), case.codim()).unwrap();
            assert!(rep.e_bound.unwrap() <= all_twos, "generic {k}x{m}");
            assert_eq!(rep.excess, case.codim() as i64);
        }
    }
}

#[test]
fn codimension_measured_from_hilbert_dimension() {
    // n - deg(HP of S/I) must equal the closed-form codimension, n <= 9
    let limits = ResourceLimits::none();
    let order = MonomialOrder::GrevLex;
    let instances: Vec<(EmbeddingCase, usize)> = vec![
        (EmbeddingCase::Generic { rows: 2, cols: 2 }, 2),
        (EmbeddingCase::Generic { rows: 2, cols: 3 }, 2),
        (EmbeddingCase::Generic { rows: 2, cols: 4 }, 2),
        (EmbeddingCase::Generic { rows: 3, cols: 3 }, 2),
        (EmbeddingCase::Generic { rows: 3, cols: 3 }, 3),
        (EmbeddingCase::Symmetric { size: 3 }, 2),
        (EmbeddingCase::Symmetric { size: 3 }, 3),
        (EmbeddingCase::Symmetric { size: 4 }, 4),
        (EmbeddingCase::Skew { size: 4 }, 2),
        (EmbeddingCase::Skew { size: 5 }, 2),
    ];
    for (case, i) in instances {
        let n = case.ambient_dim();
        if n > 9 {
            continue;
        }
        let ideal = degeneracy_ideal::<K>(&case, i).unwrap();
        let pres = GradedModulePresentation::quotient_of_ideal(&ideal).unwrap();
        let res = free_resolution(&pres, order, &limits).unwrap();
        let (dim, _) = res.hilbert_dimension_degree().unwrap();
        assert_eq!(
            n - dim,
            degeneracy_codim(&case, i).unwrap(),
            "{} at i = {i}",
            case.label()
        );
    }
}

#[test]
fn sub_pfaffians_detect_rank() {
    use itertools::Itertools;
    let case = EmbeddingCase::Skew { size: 6 };
    let matrix = case.matrix::<K>();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for target_rank in [2usize, 4, 6] {
        for _ in 0..5 {
            let pt = sample_rank_point(&case, target_rank, &mut rng).unwrap();
            for i in 1..=3usize {
                let mut any_nonzero = false;
                for idx in (0..6usize).combinations(2 * i) {
                    let pf = pfaffian_expansion(&idx, &|a, b| matrix.get(a, b).clone());
                    if let Some(pf) = pf {
                        if !pf.eval(&pt).is_zero() {
                            any_nonzero = true;
                        }
                    }
                }
                assert_eq!(
                    any_nonzero,
                    target_rank >= 2 * i,
                    "rank {target_rank}, sub-Pfaffian size {}",
                    2 * i
                );
            }
        }
    }
}

#[test]
fn serre_vanishing_within_windows() {
    // beyond the threshold every i > 0 entry in the window is zero
    let limits = ResourceLimits::none();
    let ideal = build_target::<K>(&parse_label("rnc:3").unwrap(), 0)
        .unwrap()
        .ideal;
    let out = vanishing_scan("rnc:3", &ideal, 2, 1, 3, 4, &limits).unwrap();
    assert_eq!(out.verdict, ScanVerdict::Pass);
    for (&(k, p, i), &dim) in &out.table.entries {
        let (_, hi) = out.table.windows[&k];
        if i > 0 && p == hi {
            assert_eq!(dim, 0, "top of window k={k}");
        }
    }
}

#[test]
fn exception_region_matches_bruteforce_eps_scan() {
    // brute-force oracle: try a grid of admissible eps' plus the exact
    // endpoints; a pair is an exception iff no candidate is sufficient
    for (g, d) in [(6i64, 5i64), (10, 5), (8, 6), (14, 7)] {
        let region = exception_region(g, d).unwrap();
        let cap = eps_cap(g, d);
        for k in 3..=24i64 {
            for a in 0..=10i64 {
                let p = 2 * k - 1 + a;
                let mut candidates: Vec<Q> = (1..=40).map(|t| cap * Q::new(t, 40)).collect();
                let upper = Q::new(a + 1, d - 4);
                let lb =
                    (Q::new(2 * g - 2, d - 4) - Q::from_integer(k - 1)) / Q::from_integer(d - 2);
                for q in [upper, lb, upper.min(cap), lb.min(cap)] {
                    if q > Q::from_integer(0) && q <= cap {
                        candidates.push(q);
                    }
                }
                let sufficient = candidates.iter().any(|&eps| {
                    nef_big_check(&CurveVanishingQuery {
                        genus: g,
                        degree: d,
                        k,
                        p,
                        eps,
                    })
                    .map(|o| o.sufficient)
                    .unwrap_or(false)
                });
                assert_eq!(
                    !sufficient,
                    region.pairs.contains(&(k, p)),
                    "g={g} d={d} k={k} p={p}"
                );
            }
        }
    }
}

#[test]
fn rationals_spot_checks() {
    // the same machinery over Q on small acceptance instances
    let limits = ResourceLimits::none();
    let order = MonomialOrder::GrevLex;
    type PQ = Polynomial<Rat>;

    let q = PQ::parse(4, "1*x0^1*x3^1+-1*x1^1*x2^1").unwrap();
    let quadric = GradedIdeal::new(4, vec![q]).unwrap();
    let out = vanishing_scan("segre:2x2", &quadric, 2, -1, 2, 4, &limits).unwrap();
    assert_eq!(out.verdict, ScanVerdict::Pass);

    let cubic = build_target::<Rat>(&parse_label("rnc:3").unwrap(), 0).unwrap();
    let out = vanishing_scan("rnc:3", &cubic.ideal, 2, 1, 2, 4, &limits).unwrap();
    assert_eq!(out.verdict, ScanVerdict::Pass);
    let pres = GradedModulePresentation::quotient_of_ideal(&cubic.ideal).unwrap();
    for dd in 1..=4i64 {
        assert_eq!(
            hilbert_function(&pres, dd, order, &limits).unwrap() as i64,
            3 * dd + 1
        );
    }

    // Veronese surface over Q, k = 1 only (coefficient growth stays tame)
    let veronese = build_target::<Rat>(&parse_label("veronese:3").unwrap(), 0).unwrap();
    let out = vanishing_scan("veronese:3", &veronese.ideal, 2, 0, 1, 3, &limits).unwrap();
    assert_eq!(out.verdict, ScanVerdict::Pass);
}

#[test]
fn full_ring_cohomology_matches_oracle_over_q() {
    let limits = ResourceLimits::none();
    let pres = GradedModulePresentation::<Rat>::free(4, vec![0]);
    let mut engine =
        vanish_core::cohomology::ModuleCohomology::new(&pres, MonomialOrder::GrevLex, &limits)
            .unwrap();
    for p in -6..=6i64 {
        for i in 0..=3usize {
            assert_eq!(
                engine.sheaf_cohomology(i, p, &limits).unwrap(),
                line_bundle_cohomology(3, p, i)
            );
        }
    }
}

#[test]
fn resource_caps_surface_as_incomplete() {
    let limits = ResourceLimits::with_max_degree(3);
    let ideal = build_target::<K>(&parse_label("veronese:3").unwrap(), 0)
        .unwrap()
        .ideal;
    let out = vanishing_scan("veronese:3", &ideal, 2, 0, 2, 2, &limits).unwrap();
    assert_eq!(out.verdict, ScanVerdict::Incomplete);
    assert!(!out.incomplete.is_empty());
    assert!(out.violations.is_empty());
}
