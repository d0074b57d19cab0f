//! Distinct-distance statistics: D(P)-style counts for all three metrics,
//! bipartite variants with their multiplicity histograms, line richness, and
//! multiplication-table counts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::BigInt;

use crate::error::{Error, Result};
use crate::exact::{
    scalar_to_string, CanonicalLine, ExactScalar, Metric, PointSet, ZeroPolicy,
};

/// Distinct-value count plus the full value -> pair-multiplicity histogram.
///
/// For a unary profile the multiplicities sum to C(|P|, 2); for a bipartite
/// profile they sum to |A| * |P| (ordered pairs).
#[derive(Clone, Debug)]
pub struct DistanceProfile {
    pub metric: Metric,
    pub distinct_count: usize,
    pub histogram: BTreeMap<ExactScalar, u64>,
    /// Total number of pairs counted (after the zero policy was applied).
    pub pair_count: u64,
}

impl DistanceProfile {
    pub fn max_multiplicity(&self) -> u64 {
        self.histogram.values().copied().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "metric": self.metric.name(),
            "distinct_count": self.distinct_count,
            "pair_count": self.pair_count,
            "max_multiplicity": self.max_multiplicity(),
            "histogram": self.histogram.iter()
                .map(|(v, m)| (scalar_to_string(v), m))
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DistinctOptions {
    /// `None` picks the per-metric default ([`ZeroPolicy::default_for`]).
    pub zero_policy: Option<ZeroPolicy>,
}

impl Default for DistinctOptions {
    fn default() -> Self {
        DistinctOptions { zero_policy: None }
    }
}

/// Distinct metric values over unordered pairs of distinct points of `P`.
pub fn distinct_distances(
    p: &PointSet,
    metric: Metric,
    opts: DistinctOptions,
) -> Result<DistanceProfile> {
    if p.len() < 2 {
        return Err(Error::TooFewPoints { min: 2, got: p.len() });
    }
    let zero_policy = opts.zero_policy.unwrap_or(ZeroPolicy::default_for(metric));
    let pts = p.points();
    let mut histogram: BTreeMap<ExactScalar, u64> = BTreeMap::new();
    let zero = ExactScalar::from_integer(BigInt::from(0));
    let mut pair_count = 0u64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let v = metric.eval(&pts[i], &pts[j]);
            if v == zero && zero_policy == ZeroPolicy::Exclude {
                continue;
            }
            *histogram.entry(v).or_insert(0) += 1;
            pair_count += 1;
        }
    }
    Ok(DistanceProfile {
        metric,
        distinct_count: histogram.len(),
        histogram,
        pair_count,
    })
}

/// Distinct metric values over ordered pairs `(a, p) in A x P`, including
/// coincident pairs. The histogram entries are the multiplicities `M_i`.
///
/// `A` is expected to be a subset of `P`; a non-subset input is accepted but
/// flagged in the returned warning.
pub fn bipartite_distinct(
    a: &PointSet,
    p: &PointSet,
    metric: Metric,
) -> Result<(DistanceProfile, Option<String>)> {
    if a.is_empty() || p.is_empty() {
        return Err(Error::EmptySet);
    }
    let warning = if a.is_subset_of(p) {
        None
    } else {
        Some("A is not a subset of P; proceeding anyway".to_string())
    };
    let mut histogram: BTreeMap<ExactScalar, u64> = BTreeMap::new();
    for ap in a {
        for pp in p {
            *histogram.entry(metric.eval(pp, ap)).or_insert(0) += 1;
        }
    }
    Ok((
        DistanceProfile {
            metric,
            distinct_count: histogram.len(),
            pair_count: (a.len() * p.len()) as u64,
            histogram,
        },
        warning,
    ))
}

/// A line maximizing `|P ∩ l|`, and that count. With
/// `exclude_axis_parallel`, horizontal and vertical lines are skipped. Ties
/// break by lexicographic order of the canonical triple.
pub fn max_line_richness(
    p: &PointSet,
    exclude_axis_parallel: bool,
) -> Result<(CanonicalLine, usize)> {
    if p.len() < 2 {
        return Err(Error::TooFewPoints { min: 2, got: p.len() });
    }
    let pts = p.points();
    let mut incident: HashMap<CanonicalLine, BTreeSet<usize>> = HashMap::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let line = CanonicalLine::through(&pts[i], &pts[j])?;
            if exclude_axis_parallel && (line.is_horizontal() || line.is_vertical()) {
                continue;
            }
            let entry = incident.entry(line).or_default();
            entry.insert(i);
            entry.insert(j);
        }
    }
    incident
        .into_iter()
        .map(|(line, set)| (line, set.len()))
        .max_by(|(l1, c1), (l2, c2)| c1.cmp(c2).then_with(|| l2.cmp(l1)))
        .ok_or(Error::TooFewPoints { min: 2, got: 0 })
}

/// `|{ i*j : 1 <= i <= a, 1 <= j <= b }|` by exact enumeration.
pub fn product_set_count(a: u64, b: u64) -> u64 {
    let mut products = BTreeSet::new();
    for i in 1..=a {
        for j in 1..=b {
            products.insert(i * j);
        }
    }
    products.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::grid;
    use crate::exact::{rect_dist, scalar, Int, Point};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    #[test]
    fn grid3_euclid_distinct() {
        let g = grid(3, 3).unwrap();
        let prof =
            distinct_distances(&g, Metric::EuclideanSquared, DistinctOptions::default()).unwrap();
        assert_eq!(prof.distinct_count, 5);
        let values: Vec<ExactScalar> = prof.histogram.keys().cloned().collect();
        let expected: Vec<ExactScalar> =
            [1, 2, 4, 5, 8].iter().map(|&v| scalar(v, 1)).collect();
        assert_eq!(values, expected);
    }

    #[test]
    fn horizontal_set_rect_distinct_is_one() {
        let s = PointSet::from_points(vec![pt(0, 3), pt(1, 3), pt(5, 3), pt(-2, 3)]);
        let prof = distinct_distances(&s, Metric::Rectangular, DistinctOptions::default()).unwrap();
        assert_eq!(prof.distinct_count, 1);
        assert_eq!(prof.histogram.keys().next().unwrap(), &scalar(0, 1));
    }

    #[test]
    fn two_points_one_distance() {
        let s = PointSet::from_points(vec![pt(0, 0), pt(1, 2)]);
        for metric in [
            Metric::EuclideanSquared,
            Metric::Rectangular,
            Metric::MinkowskiSquared,
        ] {
            let prof = distinct_distances(&s, metric, DistinctOptions::default()).unwrap();
            assert_eq!(prof.distinct_count, 1);
        }
        let singleton = PointSet::from_points(vec![pt(0, 0)]);
        assert!(distinct_distances(&singleton, Metric::EuclideanSquared, DistinctOptions::default())
            .is_err());
    }

    #[test]
    fn histogram_sums_to_pair_count() {
        let g = grid(4, 3).unwrap();
        let prof =
            distinct_distances(&g, Metric::EuclideanSquared, DistinctOptions::default()).unwrap();
        let n = g.len() as u64;
        assert_eq!(prof.histogram.values().sum::<u64>(), n * (n - 1) / 2);
        assert!(prof.distinct_count as u64 <= n * (n - 1) / 2);
    }

    #[test]
    fn bipartite_single_point() {
        let s = PointSet::from_points(vec![pt(7, -2)]);
        let (prof, warn) = bipartite_distinct(&s, &s, Metric::EuclideanSquared).unwrap();
        assert!(warn.is_none());
        assert_eq!(prof.distinct_count, 1);
        assert_eq!(prof.histogram.get(&scalar(0, 1)), Some(&1));
    }

    #[test]
    fn bipartite_enumeration() {
        let a = PointSet::from_points(vec![pt(0, 0)]);
        let p = PointSet::from_points(vec![pt(0, 0), pt(3, 4), pt(5, 0)]);
        let (prof, _) = bipartite_distinct(&a, &p, Metric::EuclideanSquared).unwrap();
        assert_eq!(prof.distinct_count, 2);
        assert_eq!(prof.histogram.get(&scalar(0, 1)), Some(&1));
        assert_eq!(prof.histogram.get(&scalar(25, 1)), Some(&2));
    }

    #[test]
    fn bipartite_partition_identity() {
        let g = grid(4, 4).unwrap();
        let a = PointSet::from_points(
            g.iter().filter(|p| p.y == scalar(0, 1)).cloned().collect(),
        );
        let (prof, warn) = bipartite_distinct(&a, &g, Metric::EuclideanSquared).unwrap();
        assert!(warn.is_none());
        assert_eq!(
            prof.histogram.values().sum::<u64>(),
            (a.len() * g.len()) as u64
        );
    }

    #[test]
    fn bipartite_warns_on_non_subset() {
        let a = PointSet::from_points(vec![pt(100, 100)]);
        let p = PointSet::from_points(vec![pt(0, 0)]);
        let (_, warn) = bipartite_distinct(&a, &p, Metric::EuclideanSquared).unwrap();
        assert!(warn.is_some());
    }

    // Oracle: line richness by checking every pair-line against every point.
    fn brute_richness(p: &PointSet, exclude: bool) -> usize {
        let pts = p.points();
        let mut best = 0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let line = CanonicalLine::through(&pts[i], &pts[j]).unwrap();
                if exclude && (line.is_horizontal() || line.is_vertical()) {
                    continue;
                }
                let count = pts.iter().filter(|q| line.contains(q)).count();
                best = best.max(count);
            }
        }
        best
    }

    #[test]
    fn line_richness_grid() {
        let g = grid(3, 3).unwrap();
        let (_, count) = max_line_richness(&g, false).unwrap();
        assert_eq!(count, 3);
        assert_eq!(count, brute_richness(&g, false));
    }

    #[test]
    fn line_richness_collinear() {
        let s = PointSet::from_points((0..6).map(|i| pt(i, 2 * i)).collect());
        let (line, count) = max_line_richness(&s, false).unwrap();
        assert_eq!(count, 6);
        assert_eq!(
            line,
            CanonicalLine::normalize(Int::from(2), Int::from(-1), Int::from(0))
        );
    }

    #[test]
    fn line_richness_grid42_excluded() {
        let g = grid(4, 2).unwrap();
        let (line, count) = max_line_richness(&g, true).unwrap();
        assert_eq!(count, 2);
        assert_eq!(count, brute_richness(&g, true));
        assert!(!line.is_horizontal() && !line.is_vertical());
    }

    #[test]
    fn product_set_counts() {
        assert_eq!(product_set_count(1, 7), 7);
        assert_eq!(product_set_count(2, 2), 3);
        assert_eq!(product_set_count(3, 3), 6);
    }

    #[test]
    fn rect_values_on_slanted_line() {
        // P on y = kx through the origin: pair values are k*(a-b)^2, and
        // R(A) >= |A0 - A0| / 2.
        let kappa = scalar(3, 2);
        let xs: Vec<ExactScalar> = [-2i64, 0, 1, 3, 4].iter().map(|&v| scalar(v, 1)).collect();
        let pts: Vec<Point> = xs.iter().map(|x| Point::new(x.clone(), &kappa * x)).collect();
        let set = PointSet::from_points(pts.clone());

        let mut rect_vals = BTreeSet::new();
        let mut predicted = BTreeSet::new();
        for p in &pts {
            for q in &pts {
                rect_vals.insert(rect_dist(p, q));
                let d = &p.x - &q.x;
                predicted.insert(&kappa * &d * &d);
            }
        }
        assert_eq!(rect_vals, predicted);

        let mut diffs = BTreeSet::new();
        for a in &xs {
            for b in &xs {
                diffs.insert(a - b);
            }
        }
        assert!(2 * rect_vals.len() >= diffs.len());
        // The profile ranges over distinct pairs only, so it misses the
        // zero contributed by p = q (nonzero pairs never vanish here).
        let prof = distinct_distances(&set, Metric::Rectangular, DistinctOptions::default())
            .unwrap();
        assert_eq!(prof.distinct_count + 1, rect_vals.len());
    }

    #[test]
    fn translation_invariance() {
        let g = grid(3, 4).unwrap();
        let t = g.translate(&scalar(7, 3), &scalar(-5, 2));
        for metric in [
            Metric::EuclideanSquared,
            Metric::Rectangular,
            Metric::MinkowskiSquared,
        ] {
            let a = distinct_distances(&g, metric, DistinctOptions::default()).unwrap();
            let b = distinct_distances(&t, metric, DistinctOptions::default()).unwrap();
            assert_eq!(a.distinct_count, b.distinct_count);
            assert_eq!(a.histogram, b.histogram);
        }
    }

    #[test]
    fn rotation_invariance_is_euclid_only() {
        // Exact 90-degree rotation (x, y) -> (-y, x).
        let s = PointSet::from_points(vec![pt(0, 0), pt(2, 1), pt(3, -1), pt(1, 4)]);
        let r = PointSet::from_points(
            s.iter().map(|p| Point::new(-p.y.clone(), p.x.clone())).collect(),
        );
        let de = |set: &PointSet, m| {
            distinct_distances(set, m, DistinctOptions::default())
                .unwrap()
                .histogram
        };
        assert_eq!(
            de(&s, Metric::EuclideanSquared),
            de(&r, Metric::EuclideanSquared)
        );
        // Rectangular distances are direction-sensitive: this sample breaks.
        assert_ne!(de(&s, Metric::Rectangular), de(&r, Metric::Rectangular));
    }
}
