//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`; always visible on failure).

use std::collections::BTreeSet;
use std::time::Instant;

use num::{BigInt, BigRational, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fewdist::census::{census_euclid, census_rect, cs_bound_report, sum_of_squares_identity};
use fewdist::construct::{grid, unbalanced_lattice};
use fewdist::energy::{
    convex_curve_family, curve_pair_intersections, difference_set, energy_exact,
    li_inequality_check, rich_containment_check, ConvexFn, ScalarSet,
};
use fewdist::exact::{scalar, ExactScalar, Metric, Point, PointSet};
use fewdist::experiment::{
    run_experiment, theorem_euclid_exponent, theorem_rect_exponent, CheckFlags, ExperimentConfig,
    GeneratorSpec,
};
use fewdist::hyperbola::{
    build_family, coincidence_structure, incidences, pseudoparabola_check, FamilyMetric,
};
use fewdist::interval::Verdict;
use fewdist::stats::{bipartite_distinct, distinct_distances, product_set_count, DistinctOptions};

struct Instance {
    a: PointSet,
    p: PointSet,
    kappa: Option<ExactScalar>,
}

/// Deterministic randomized instances: A collinear (x-axis, resp. y = kx
/// through the origin), A a subset of P, integer coordinates in [-20, 20],
/// m in [2, 15], n in [m, 40].
fn random_instances(metric_kind: u8, count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kappas = [scalar(1, 1), scalar(1, 2), scalar(-3, 1)];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let kappa = if metric_kind == 0 {
            None
        } else {
            Some(kappas[out.len() % kappas.len()].clone())
        };
        // x positions admissible for integer coordinates on the line.
        let admissible: Vec<i64> = match &kappa {
            None => (-20..=20).collect(),
            Some(k) => (-20..=20)
                .filter(|&x| {
                    let y = k * scalar(x, 1);
                    y.is_integer() && y.abs() <= scalar(20, 1)
                })
                .collect(),
        };
        let m_max = 15.min(admissible.len());
        let m = rng.gen_range(2..=m_max);
        let n = rng.gen_range(m..=40);

        let mut xs = BTreeSet::new();
        while xs.len() < m {
            xs.insert(admissible[rng.gen_range(0..admissible.len())]);
        }
        let line_pts: Vec<Point> = xs
            .iter()
            .map(|&x| {
                let x = scalar(x, 1);
                let y = kappa.as_ref().map_or_else(ExactScalar::zero, |k| k * &x);
                Point::new(x, y)
            })
            .collect();
        let a = PointSet::from_points(line_pts.clone());

        let mut all: BTreeSet<Point> = line_pts.into_iter().collect();
        while all.len() < n {
            all.insert(Point::from_ints(
                rng.gen_range(-20..=20),
                rng.gen_range(-20..=20),
            ));
        }
        let p = PointSet::from_points(all.into_iter().collect());
        out.push(Instance { a, p, kappa });
    }
    out
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_census_incidence_identity() {
    let start = Instant::now();
    let mut checked = 0usize;
    for metric_kind in [0u8, 1u8] {
        for inst in random_instances(metric_kind, 200, 0xA1 + metric_kind as u64) {
            let (census, family) = match &inst.kappa {
                None => (
                    census_euclid(&inst.a, &inst.p).unwrap(),
                    build_family(&inst.p, FamilyMetric::Euclid).unwrap(),
                ),
                Some(k) => (
                    census_rect(&inst.a, &inst.p, k).unwrap(),
                    build_family(&inst.p, FamilyMetric::Rect { kappa: k.clone() }).unwrap(),
                ),
            };
            let inc = incidences(&inst.a, &family).unwrap();
            assert_eq!(
                inc, census.q2,
                "incidence/census mismatch (kappa={:?})",
                inst.kappa
            );
            assert!(sum_of_squares_identity(&census));
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "1 (census-incidence identity)",
        checked == 400 && secs < 300.0,
        &format!("{checked} instances in {secs:.1}s"),
    );
}

#[test]
fn criterion_2_cauchy_schwarz_and_q1() {
    let mut checked = 0usize;
    for metric_kind in [0u8, 1u8] {
        for inst in random_instances(metric_kind, 200, 0xA1 + metric_kind as u64) {
            let (census, metric) = match &inst.kappa {
                None => (
                    census_euclid(&inst.a, &inst.p).unwrap(),
                    Metric::EuclideanSquared,
                ),
                Some(k) => (
                    census_rect(&inst.a, &inst.p, k).unwrap(),
                    Metric::Rectangular,
                ),
            };
            let (profile, _) = bipartite_distinct(&inst.a, &inst.p, metric).unwrap();
            let cs = cs_bound_report(&census, &profile).unwrap();
            assert!(cs.cs_holds, "Cauchy-Schwarz violated");
            assert!(cs.q1_bound_holds, "q1 > 4m^2n");
            checked += 1;
        }
    }
    report(
        "2 (Cauchy-Schwarz and Q1 bounds)",
        checked == 400,
        &format!("{checked} instances, zero violations"),
    );
}

#[test]
fn criterion_3_coincidence_structure() {
    // Random families.
    let mut families_checked = 0usize;
    for metric_kind in [0u8, 1u8] {
        for inst in random_instances(metric_kind, 60, 0xC3 + metric_kind as u64) {
            let metric = match &inst.kappa {
                None => FamilyMetric::Euclid,
                Some(k) => FamilyMetric::Rect { kappa: k.clone() },
            };
            let family = build_family(&inst.p, metric).unwrap();
            let rep = coincidence_structure(&family);
            assert!(rep.p_lines_ok && rep.q_lines_ok, "line structure violated");
            assert!(rep.partner_bound_ok(), "partner count exceeds 2");
            families_checked += 1;
        }
    }

    // The constructed 4-fold coincidence: p in {(0,1),(0,-1)}, q in {(0,2),(0,-2)}.
    let p = PointSet::from_points(vec![
        Point::from_ints(0, 1),
        Point::from_ints(0, -1),
        Point::from_ints(0, 2),
        Point::from_ints(0, -2),
    ]);
    let family = build_family(&p, FamilyMetric::Euclid).unwrap();
    let rep = coincidence_structure(&family);
    assert_eq!(rep.k_max, 4, "constructed example must reach multiplicity 4");
    assert!(rep.b_side_count >= 2, "B-side extraction below k/2");
    assert!(rep.b_side_at_least_half());

    report(
        "3 (coincidence structure)",
        true,
        &format!("{families_checked} random families + 4-fold example, k_max=4, B-side={}", rep.b_side_count),
    );
}

#[test]
fn criterion_4_integer_holder_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB4);
    let chain_holds = |u: &ScalarSet| -> bool {
        let n = BigInt::from(u.len() as u64);
        let diff = difference_set(u, u);
        let e3 = energy_exact(u, None, 3).unwrap();
        let e_ud = energy_exact(u, Some(&diff), 2).unwrap();
        n.pow(8) <= e3 * e_ud * BigInt::from(diff.len() as u64)
    };

    let mut checked = 0usize;
    for _ in 0..500 {
        let size = rng.gen_range(1..=25);
        let mut u = ScalarSet::new();
        while u.len() < size {
            u.insert(scalar(rng.gen_range(-100..=100), 1));
        }
        assert!(chain_holds(&u), "random violation at {u:?}");
        checked += 1;
    }
    for size in [2usize, 4, 8, 16, 32, 64] {
        let ap: ScalarSet = (0..size as i64).map(|i| scalar(3 * i + 1, 1)).collect();
        assert!(chain_holds(&ap), "AP violation at size {size}");
        let gp: ScalarSet = (0..size as u32)
            .map(|i| BigRational::from_integer(BigInt::from(2).pow(i)))
            .collect();
        assert!(chain_holds(&gp), "GP violation at size {size}");
        checked += 2;
    }
    report(
        "4 (integer energy chain)",
        true,
        &format!("{checked} sets, zero violations"),
    );
}

#[test]
fn criterion_5_interval_certification_and_containment() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD5);
    let mut li_checked = 0usize;
    for _ in 0..100 {
        let mut a = ScalarSet::new();
        let mut b = ScalarSet::new();
        while a.len() < rng.gen_range(1..=12) {
            a.insert(scalar(rng.gen_range(-40..=40), 1));
        }
        while b.len() < rng.gen_range(1..=12) {
            b.insert(scalar(rng.gen_range(-40..=40), 1));
        }
        let rep = li_inequality_check(&a, &b, 64, 256).unwrap();
        assert_eq!(
            rep.verdict,
            Verdict::Holds,
            "expected certification at <=256 bits for A={a:?} B={b:?}"
        );
        li_checked += 1;
    }

    let mut containment_checked = 0usize;
    while containment_checked < 50 {
        let mut sets = [ScalarSet::new(), ScalarSet::new(), ScalarSet::new()];
        for (i, s) in sets.iter_mut().enumerate() {
            let min = if i < 2 { 2 } else { 1 };
            let target = rng.gen_range(min..=8usize);
            while s.len() < target {
                s.insert(scalar(rng.gen_range(-12..=12), 1));
            }
        }
        let [a, b, c] = sets;
        let t = rng.gen_range(2..=a.len().min(b.len()) as u64);
        let f = if rng.gen_bool(0.5) {
            ConvexFn::Square
        } else {
            ConvexFn::quad(scalar(rng.gen_range(1..=5), 1), scalar(rng.gen_range(-4..=4), 1))
                .unwrap()
        };
        let rep = rich_containment_check(&f, &a, &b, &c, t).unwrap();
        assert!(rep.holds, "containment violated: lhs={} rhs={}", rep.lhs, rep.rhs);
        containment_checked += 1;
    }

    report(
        "5 (interval certification and rich-point containment)",
        true,
        &format!("{li_checked} certified inequalities, {containment_checked} containments"),
    );
}

#[test]
fn criterion_6_pseudoline_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE6);

    // Convex curve families: every sampled distinct pair meets in <= 1 point.
    let mut curve_pairs = 0u64;
    for f in [
        ConvexFn::Square,
        ConvexFn::quad(scalar(2, 1), scalar(-3, 1)).unwrap(),
        ConvexFn::quad(scalar(-1, 2), scalar(7, 1)).unwrap(),
    ] {
        let mut a = ScalarSet::new();
        let mut b = ScalarSet::new();
        let mut c = ScalarSet::new();
        while a.len() < 5 {
            a.insert(scalar(rng.gen_range(-15..=15), 1));
        }
        while b.len() < 5 {
            b.insert(scalar(rng.gen_range(-15..=15), 1));
        }
        while c.len() < 4 {
            c.insert(scalar(rng.gen_range(-15..=15), 1));
        }
        let fam = convex_curve_family(&f, &a, &b, &c).unwrap();
        for _ in 0..400 {
            let i = rng.gen_range(0..fam.curves.len());
            let j = rng.gen_range(0..fam.curves.len());
            if fam.curves[i] == fam.curves[j] {
                continue;
            }
            let (n, _) = curve_pair_intersections(
                &f,
                (&fam.curves[i].0, &fam.curves[i].1),
                (&fam.curves[j].0, &fam.curves[j].1),
            )
            .unwrap();
            assert!(n <= 1, "curve pair with {n} intersections");
            curve_pairs += 1;
        }
    }

    // Hyperbola families: sampled distinct key pairs meet in <= 2 points.
    let mut hyperbola_pairs = 0u64;
    for metric_kind in [0u8, 1u8] {
        for inst in random_instances(metric_kind, 20, 0xE6 + metric_kind as u64) {
            let metric = match &inst.kappa {
                None => FamilyMetric::Euclid,
                Some(k) => FamilyMetric::Rect { kappa: k.clone() },
            };
            let family = build_family(&inst.p, metric).unwrap();
            let rep = pseudoparabola_check(&family, 50, 0xE6);
            assert!(rep.bound_respected, "hyperbola pair with >2 intersections");
            hyperbola_pairs += rep.pairs_checked;
        }
    }

    report(
        "6 (pseudo-line property)",
        true,
        &format!("{curve_pairs} curve pairs <=1, {hyperbola_pairs} hyperbola pairs <=2"),
    );
}

#[test]
fn criterion_7_exponent_balancing() {
    let expected = [
        BigRational::new(BigInt::from(14), BigInt::from(17)),
        BigRational::new(BigInt::from(43), BigInt::from(52)),
        BigRational::new(BigInt::from(8), BigInt::from(11)),
    ];
    let target = BigRational::new(BigInt::from(43), BigInt::from(52));
    let euclid = theorem_euclid_exponent().unwrap();
    let rect = theorem_rect_exponent().unwrap();
    let ok = euclid.per_term == expected
        && euclid.max_exponent == target
        && rect.max_exponent == target;
    report(
        "7 (exponent balancing)",
        ok,
        &format!(
            "per-term {:?}, both pipelines -> {}",
            euclid
                .per_term
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>(),
            euclid.max_exponent
        ),
    );
}

#[test]
fn criterion_8_construction_trends() {
    // Multiplication-table density strictly decreasing.
    let mut last: Option<BigRational> = None;
    let mut product_ok = true;
    for k in [8u64, 16, 32, 64] {
        let density = BigRational::new(
            BigInt::from(product_set_count(k, k)),
            BigInt::from(k * k),
        );
        if let Some(prev) = &last {
            product_ok &= &density < prev;
        }
        last = Some(density);
    }

    // Distinct-distance density of the k x k grid strictly decreasing.
    let mut last: Option<BigRational> = None;
    let mut grid_ok = true;
    for k in 3u64..=12 {
        let g = grid(k, k).unwrap();
        let d = distinct_distances(&g, Metric::EuclideanSquared, DistinctOptions::default())
            .unwrap()
            .distinct_count;
        let density = BigRational::new(BigInt::from(d as u64), BigInt::from(k * k));
        if let Some(prev) = &last {
            grid_ok &= &density < prev;
        }
        last = Some(density);
    }

    // Unbalanced lattice vs balanced grid, exact rectangular-distance counts.
    let mut lattice_ok = true;
    let mut lattice_detail = String::new();
    for n in [64u64, 256] {
        let (lat, _, _) = unbalanced_lattice(n, &scalar(1, 6)).unwrap();
        let d_lat = distinct_distances(&lat, Metric::Rectangular, DistinctOptions::default())
            .unwrap()
            .distinct_count;
        let k = (n as f64).sqrt() as u64;
        let g = grid(k, k).unwrap();
        let d_grid = distinct_distances(&g, Metric::Rectangular, DistinctOptions::default())
            .unwrap()
            .distinct_count;
        lattice_ok &= d_lat < d_grid;
        lattice_detail.push_str(&format!("n={n}: lattice {d_lat} vs grid {d_grid}; "));
    }

    report(
        "8 (construction trends)",
        product_ok && grid_ok && lattice_ok,
        &format!(
            "product density decreasing: {product_ok}; grid density decreasing: {grid_ok}; \
             lattice below grid: {lattice_ok} [{lattice_detail}]"
        ),
    );
}

#[test]
fn criterion_9_sweep_determinism() {
    let mut all_identical = true;
    let mut detail = String::new();
    for (metric, sizes) in [
        ("euclidean-squared", vec![9u64, 16, 25, 36]),
        ("rectangular", vec![9u64, 16]),
    ] {
        let cfg = ExperimentConfig {
            generator: GeneratorSpec::Grid,
            metric: metric.into(),
            kappa: None,
            sizes,
            seed: 42,
            checks: CheckFlags::default(),
            precision_bits: 64,
            precision_cap: 512,
            record_timings: false,
        };
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let r1 = run_experiment(&cfg, d1.path()).unwrap();
        let r2 = run_experiment(&cfg, d2.path()).unwrap();
        assert_eq!(r1.violations, 0, "{metric} sweep has violations");
        let b1 = std::fs::read(&r1.csv_path).unwrap();
        let b2 = std::fs::read(&r2.csv_path).unwrap();
        all_identical &= b1 == b2;
        detail.push_str(&format!("{metric}: {} rows; ", r1.rows.len()));
    }
    report(
        "9 (sweep determinism)",
        all_identical,
        &format!("byte-identical CSV on rerun [{}]", detail.trim_end()),
    );
}
