//! Exact quadruple censuses.
//!
//! For a collinear set A inside P, the census counts the quadruples
//! `(a, b, p, q) in A^2 x P^2` whose two pair-distances agree, split into the
//! degenerate part Q1 (equal distance-to-line classes of p and q) and the
//! rest Q2. The census is computed from the bipartite multiplicity histogram
//! via the exact identity `|Q| = sum_i M_i^2`; the quartic brute force is
//! kept in the tests as an independent oracle.

use std::collections::BTreeMap;

use num::{BigInt, Zero};

use crate::error::{Error, Result};
use crate::exact::{euclid_sq, rect_dist, ExactScalar, Int, Metric, Point, PointSet};
use crate::stats::DistanceProfile;

#[derive(Clone, Debug)]
pub struct QuadrupleCensus {
    pub metric: Metric,
    pub m: usize,
    pub n: usize,
    pub q_total: Int,
    pub q1: Int,
    pub q2: Int,
    /// Bipartite multiplicities M_i: pair-distance value -> count over A x P.
    pub mi_histogram: BTreeMap<ExactScalar, u64>,
}

impl QuadrupleCensus {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "metric": self.metric.name(),
            "m": self.m,
            "n": self.n,
            "q_total": self.q_total.to_string(),
            "q1": self.q1.to_string(),
            "q2": self.q2.to_string(),
            "distinct_bipartite": self.mi_histogram.len(),
        })
    }
}

/// Distance-to-line class of a P-point: `p_y^2` in the Euclidean setting,
/// `(p_y - kappa*p_x)^2` in the rectangular one. Quadruples whose p and q
/// fall in the same class form Q1.
fn euclid_class(p: &Point) -> ExactScalar {
    &p.y * &p.y
}

fn rect_class(p: &Point, kappa: &ExactScalar) -> ExactScalar {
    let d = &p.y - kappa * &p.x;
    &d * &d
}

fn census_impl<D, C>(
    a: &PointSet,
    p: &PointSet,
    metric: Metric,
    dist: D,
    class: C,
) -> QuadrupleCensus
where
    D: Fn(&Point, &Point) -> ExactScalar,
    C: Fn(&Point) -> ExactScalar,
{
    // dist value -> (M_i, per-class counts)
    let mut table: BTreeMap<ExactScalar, (u64, BTreeMap<ExactScalar, u64>)> = BTreeMap::new();
    for ap in a {
        for pp in p {
            let d = dist(ap, pp);
            let entry = table.entry(d).or_insert_with(|| (0, BTreeMap::new()));
            entry.0 += 1;
            *entry.1.entry(class(pp)).or_insert(0) += 1;
        }
    }
    let mut q_total = Int::zero();
    let mut q1 = Int::zero();
    let mut mi_histogram = BTreeMap::new();
    for (d, (total, classes)) in table {
        q_total += Int::from(total) * Int::from(total);
        for count in classes.values() {
            q1 += Int::from(*count) * Int::from(*count);
        }
        mi_histogram.insert(d, total);
    }
    let q2 = &q_total - &q1;
    QuadrupleCensus {
        metric,
        m: a.len(),
        n: p.len(),
        q_total,
        q1,
        q2,
        mi_histogram,
    }
}

/// Census of `{(a,b,p,q) in A^2 x P^2 : ||p-a|| = ||q-b||}` for A on the
/// x-axis. Q1 holds the quadruples with `p_y^2 = q_y^2`.
pub fn census_euclid(a: &PointSet, p: &PointSet) -> Result<QuadrupleCensus> {
    if a.is_empty() || p.is_empty() {
        return Err(Error::EmptySet);
    }
    for pt in a {
        if !pt.y.is_zero() {
            return Err(Error::PointOffLine(pt.to_string()));
        }
    }
    if !a.is_subset_of(p) {
        return Err(Error::NotSubset);
    }
    Ok(census_impl(a, p, Metric::EuclideanSquared, |s, t| euclid_sq(s, t), euclid_class))
}

/// Census of `{(s,t,p,q) in A^2 x P^2 : R(p,s) = R(q,t)}` for A on the line
/// `y = kappa*x` through the origin. Q1 holds the quadruples with
/// `(q_y - kappa*q_x)^2 = (p_y - kappa*p_x)^2`.
pub fn census_rect(a: &PointSet, p: &PointSet, kappa: &ExactScalar) -> Result<QuadrupleCensus> {
    if kappa.is_zero() {
        return Err(Error::ZeroKappa);
    }
    if a.is_empty() || p.is_empty() {
        return Err(Error::EmptySet);
    }
    for pt in a {
        if pt.y != kappa * &pt.x {
            return Err(Error::PointOffLine(pt.to_string()));
        }
    }
    if !a.is_subset_of(p) {
        return Err(Error::NotSubset);
    }
    Ok(census_impl(
        a,
        p,
        Metric::Rectangular,
        |s, t| rect_dist(t, s),
        |pt| rect_class(pt, kappa),
    ))
}

/// Checks, for every triple `(a, b, p)`, how many `q in P` complete it to a
/// Q1 quadruple, and returns the maximum. The count never exceeds 4: the two
/// constraints pin `q` to one of at most two class
/// representatives crossed with at most two distance solutions.
pub fn q1_choice_bound(census: &QuadrupleCensus, a: &PointSet, p: &PointSet, kappa: Option<&ExactScalar>) -> Result<u64> {
    let (dist, class): (
        Box<dyn Fn(&Point, &Point) -> ExactScalar>,
        Box<dyn Fn(&Point) -> ExactScalar>,
    ) = match census.metric {
        Metric::EuclideanSquared => (
            Box::new(|s: &Point, t: &Point| euclid_sq(s, t)),
            Box::new(euclid_class),
        ),
        Metric::Rectangular => {
            let k = kappa.ok_or(Error::ZeroKappa)?.clone();
            (
                Box::new(move |s: &Point, t: &Point| rect_dist(t, s)),
                Box::new(move |pt: &Point| rect_class(pt, &k)),
            )
        }
        Metric::MinkowskiSquared => {
            return Err(Error::InvalidConfig(
                "census is defined for euclidean-squared and rectangular metrics".into(),
            ))
        }
    };
    let mut max_choices = 0u64;
    for ap in a {
        for bp in a {
            for pp in p {
                let target = dist(ap, pp);
                let cls = class(pp);
                let choices = p
                    .iter()
                    .filter(|q| dist(bp, q) == target && class(q) == cls)
                    .count() as u64;
                max_choices = max_choices.max(choices);
            }
        }
    }
    Ok(max_choices)
}

/// Cauchy-Schwarz & hypothesis report for a census and the bipartite profile
/// it was derived from.
#[derive(Clone, Debug)]
pub struct CsBoundReport {
    /// `q_total * D(A, P)`.
    pub cs_lhs: Int,
    /// `m^2 n^2`.
    pub cs_rhs: Int,
    pub cs_holds: bool,
    /// Whether `D(A, P) <= n/5` holds for this instance.
    pub hypothesis_d_small: bool,
    /// `q1 <= 4 m^2 n`.
    pub q1_bound_holds: bool,
    /// `q2 >= m^2 n`; only meaningful (Some) when the hypothesis holds.
    pub q2_lower_holds: Option<bool>,
}

impl CsBoundReport {
    pub fn all_required_hold(&self) -> bool {
        self.cs_holds && self.q1_bound_holds && self.q2_lower_holds.unwrap_or(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "cs_lhs": self.cs_lhs.to_string(),
            "cs_rhs": self.cs_rhs.to_string(),
            "cs_holds": self.cs_holds,
            "hypothesis_d_small": self.hypothesis_d_small,
            "q1_bound_holds": self.q1_bound_holds,
            "q2_lower_holds": self.q2_lower_holds,
        })
    }
}

/// Verifies `q_total * D(A,P) >= m^2 n^2` and `q1 <= 4 m^2 n` exactly, and,
/// when `D(A,P) <= n/5`, that `q2 >= m^2 n`.
pub fn cs_bound_report(census: &QuadrupleCensus, profile: &DistanceProfile) -> Result<CsBoundReport> {
    if census.mi_histogram != profile.histogram || census.metric != profile.metric {
        return Err(Error::MismatchedInputs);
    }
    let m = Int::from(census.m as u64);
    let n = Int::from(census.n as u64);
    let d = Int::from(census.mi_histogram.len() as u64);
    let cs_lhs = &census.q_total * &d;
    let cs_rhs = &m * &m * &n * &n;
    let m2n = &m * &m * &n;
    let hypothesis_d_small = &d * BigInt::from(5) <= n;
    let q2_lower_holds = if hypothesis_d_small {
        Some(census.q2 >= m2n)
    } else {
        None
    };
    Ok(CsBoundReport {
        cs_holds: cs_lhs >= cs_rhs,
        q1_bound_holds: census.q1 <= BigInt::from(4) * &m2n,
        cs_lhs,
        cs_rhs,
        hypothesis_d_small,
        q2_lower_holds,
    })
}

/// Checks the exact identity `q_total = sum_i M_i^2` against the stored
/// histogram. Always true by construction; exposed so cross-checks against
/// independently computed profiles stay one call away.
pub fn sum_of_squares_identity(census: &QuadrupleCensus) -> bool {
    let sum: Int = census
        .mi_histogram
        .values()
        .map(|&m| Int::from(m) * Int::from(m))
        .sum();
    sum == census.q_total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{grid, random_set};
    use crate::exact::scalar;
    use num::One;
    use crate::stats::bipartite_distinct;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    /// Quartic brute-force oracle: enumerate all of A^2 x P^2.
    fn brute_census<D, C>(a: &PointSet, p: &PointSet, dist: D, class: C) -> (Int, Int)
    where
        D: Fn(&Point, &Point) -> ExactScalar,
        C: Fn(&Point) -> ExactScalar,
    {
        let mut total = Int::zero();
        let mut q1 = Int::zero();
        for s in a {
            for t in a {
                for pp in p {
                    for q in p {
                        if dist(s, pp) == dist(t, q) {
                            total += Int::one();
                            if class(pp) == class(q) {
                                q1 += Int::one();
                            }
                        }
                    }
                }
            }
        }
        (total, q1)
    }

    fn x_axis_subset(p: &PointSet) -> PointSet {
        PointSet::from_points(p.iter().filter(|q| q.y.is_zero()).cloned().collect())
    }

    #[test]
    fn single_point_census() {
        let s = PointSet::from_points(vec![pt(0, 0)]);
        let c = census_euclid(&s, &s).unwrap();
        assert_eq!(c.q_total, Int::one());
        assert_eq!(c.q1, Int::one());
        assert_eq!(c.q2, Int::zero());

        let kappa = scalar(2, 1);
        let c = census_rect(&s, &s, &kappa).unwrap();
        assert_eq!(c.q_total, Int::one());
        assert_eq!(c.q1, Int::one());
    }

    #[test]
    fn euclid_census_matches_brute_force() {
        let mut p = random_set(10, 6, 11).unwrap();
        // Force at least 4 points onto the x-axis.
        let mut pts = p.points().to_vec();
        pts.extend([pt(-3, 0), pt(0, 0), pt(2, 0), pt(5, 0)]);
        p = PointSet::from_points(pts);
        let a = x_axis_subset(&p);
        assert!(a.len() >= 4);

        let c = census_euclid(&a, &p).unwrap();
        let (bt, bq1) = brute_census(&a, &p, |s, t| euclid_sq(s, t), euclid_class);
        assert_eq!(c.q_total, bt);
        assert_eq!(c.q1, bq1);
        assert!(sum_of_squares_identity(&c));
    }

    #[test]
    fn rect_census_matches_brute_force() {
        let kappa = scalar(2, 1);
        let mut pts: Vec<Point> = random_set(8, 5, 23).unwrap().points().to_vec();
        for x in [-2i64, 0, 1] {
            pts.push(Point::new(scalar(x, 1), &kappa * scalar(x, 1)));
        }
        let p = PointSet::from_points(pts);
        let a = PointSet::from_points(
            p.iter().filter(|q| q.y == &kappa * &q.x).cloned().collect(),
        );
        assert!(a.len() >= 3);

        let c = census_rect(&a, &p, &kappa).unwrap();
        let (bt, bq1) = brute_census(
            &a,
            &p,
            |s, t| rect_dist(t, s),
            |q| rect_class(q, &kappa),
        );
        assert_eq!(c.q_total, bt);
        assert_eq!(c.q1, bq1);
        assert!(c.q1 <= Int::from(4u64 * (a.len() * a.len() * p.len()) as u64));
    }

    #[test]
    fn census_rejects_bad_inputs() {
        let a = PointSet::from_points(vec![pt(0, 1)]);
        let p = PointSet::from_points(vec![pt(0, 1), pt(2, 2)]);
        assert!(matches!(census_euclid(&a, &p), Err(Error::PointOffLine(_))));

        let a = PointSet::from_points(vec![pt(9, 0)]);
        assert!(matches!(census_euclid(&a, &p), Err(Error::NotSubset)));

        let a = PointSet::from_points(vec![pt(0, 0)]);
        let p = PointSet::from_points(vec![pt(0, 0)]);
        assert!(matches!(
            census_rect(&a, &p, &scalar(0, 1)),
            Err(Error::ZeroKappa)
        ));
    }

    #[test]
    fn cs_report_on_grid() {
        let g = grid(5, 5).unwrap();
        // A = middle row, translated to the x-axis.
        let shifted = g.translate(&scalar(0, 1), &scalar(-2, 1));
        let a = x_axis_subset(&shifted);
        assert_eq!(a.len(), 5);
        let c = census_euclid(&a, &shifted).unwrap();
        let (profile, _) = bipartite_distinct(&a, &shifted, Metric::EuclideanSquared).unwrap();
        let report = cs_bound_report(&c, &profile).unwrap();
        assert!(report.cs_holds);
        assert!(report.q1_bound_holds);
        if report.hypothesis_d_small {
            assert_eq!(report.q2_lower_holds, Some(true));
        }
    }

    #[test]
    fn cs_equality_when_multiplicities_equal() {
        // A = P = two points on the x-axis: every M_i equal forces
        // q_total * D = m^2 n^2 exactly.
        let s = PointSet::from_points(vec![pt(0, 0), pt(1, 0)]);
        let c = census_euclid(&s, &s).unwrap();
        let (profile, _) = bipartite_distinct(&s, &s, Metric::EuclideanSquared).unwrap();
        let mults: Vec<u64> = profile.histogram.values().copied().collect();
        assert!(mults.windows(2).all(|w| w[0] == w[1]));
        let report = cs_bound_report(&c, &profile).unwrap();
        assert_eq!(report.cs_lhs, report.cs_rhs);
    }

    #[test]
    fn cs_report_rejects_mismatch() {
        let s = PointSet::from_points(vec![pt(0, 0), pt(1, 0)]);
        let c = census_euclid(&s, &s).unwrap();
        let other = PointSet::from_points(vec![pt(0, 0), pt(2, 0), pt(3, 0)]);
        let (profile, _) = bipartite_distinct(&other, &other, Metric::EuclideanSquared).unwrap();
        assert!(matches!(
            cs_bound_report(&c, &profile),
            Err(Error::MismatchedInputs)
        ));
    }

    #[test]
    fn q1_choice_bound_at_most_four() {
        let mut pts: Vec<Point> = random_set(12, 6, 5).unwrap().points().to_vec();
        pts.extend([pt(-1, 0), pt(0, 0), pt(3, 0)]);
        let p = PointSet::from_points(pts);
        let a = x_axis_subset(&p);
        let c = census_euclid(&a, &p).unwrap();
        let max = q1_choice_bound(&c, &a, &p, None).unwrap();
        assert!(max <= 4, "observed {max} Q1 completions for a single triple");
    }

    #[test]
    fn joint_translation_invariance() {
        let kappa = scalar(1, 2);
        let mut pts: Vec<Point> = random_set(9, 5, 31).unwrap().points().to_vec();
        for x in [0i64, 2, 4] {
            pts.push(Point::new(scalar(x, 1), &kappa * scalar(x, 1)));
        }
        let p = PointSet::from_points(pts);
        let a = PointSet::from_points(
            p.iter().filter(|q| q.y == &kappa * &q.x).cloned().collect(),
        );
        let c = census_rect(&a, &p, &kappa).unwrap();

        // Rectangular distances are translation invariant, so shifting both
        // sets along the line (to keep A on it) preserves the census.
        let dx = scalar(3, 1);
        let dy = &kappa * &dx;
        let c2 = census_rect(&a.translate(&dx, &dy), &p.translate(&dx, &dy), &kappa).unwrap();
        assert_eq!(c.q_total, c2.q_total);
        assert_eq!(c.q1, c2.q1);
    }
}
