//! Canonical identification of the hyperbolas attached to ordered point
//! pairs, coincidence-multiplicity analysis, and exact incidence counting
//! against the parametric plane of a collinear set.
//!
//! A pair (p, q) maps to the curve of all (x, y) for which the distance from
//! p to the parameter-x point of the line equals the distance from q to the
//! parameter-y point. Two pairs produce the same curve iff they produce the
//! same three-parameter key, so the whole coincidence analysis is algebra on
//! keys; no geometric curve object exists anywhere.

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Int, Point, PointSet};
use crate::interval::IntervalValue;

/// Which curve family, and with which slope in the rectangular case.
#[derive(Clone, PartialEq, Debug)]
pub enum FamilyMetric {
    /// Curves of equal Euclidean distance to points of the x-axis.
    Euclid,
    /// Curves of equal rectangular distance to points of `y = kappa*x`.
    Rect { kappa: ExactScalar },
}

/// Canonical 3-parameter identity of a curve.
///
/// Euclidean: `(p_x, q_x, q_y^2 - p_y^2)`. Rectangular with slope kappa:
/// `(p_y + kappa*p_x, q_y + kappa*q_x, (p_y - kappa*p_x)^2 - (q_y - kappa*q_x)^2)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct HyperbolaKey {
    pub k1: ExactScalar,
    pub k2: ExactScalar,
    pub k3: ExactScalar,
}

/// Expanded coefficients `u*(x^2 - y^2) + d*x + e*y + g = 0` of the curve a
/// key denotes. Within one family `u` is fixed, so the difference of two
/// curves is always affine.
#[derive(Clone, PartialEq, Debug)]
pub struct ConicForm {
    pub u: ExactScalar,
    pub d: ExactScalar,
    pub e: ExactScalar,
    pub g: ExactScalar,
}

impl ConicForm {
    pub fn eval(&self, x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
        &self.u * (x * x - y * y) + &self.d * x + &self.e * y + &self.g
    }
}

fn key_euclid(p: &Point, q: &Point) -> Option<HyperbolaKey> {
    let py2 = &p.y * &p.y;
    let qy2 = &q.y * &q.y;
    if py2 == qy2 {
        return None;
    }
    Some(HyperbolaKey {
        k1: p.x.clone(),
        k2: q.x.clone(),
        k3: qy2 - py2,
    })
}

fn key_rect(p: &Point, q: &Point, kappa: &ExactScalar) -> Option<HyperbolaKey> {
    let pm = &p.y - kappa * &p.x;
    let qm = &q.y - kappa * &q.x;
    let k3 = &pm * &pm - &qm * &qm;
    if k3.is_zero() {
        return None;
    }
    Some(HyperbolaKey {
        k1: &p.y + kappa * &p.x,
        k2: &q.y + kappa * &q.x,
        k3,
    })
}

/// The multiset of curves generated by the non-degenerate ordered pairs of
/// `P`, grouped by key.
#[derive(Clone, Debug)]
pub struct CurveFamily {
    pub metric: FamilyMetric,
    pub classes: BTreeMap<HyperbolaKey, Vec<(Point, Point)>>,
}

impl CurveFamily {
    /// |Gamma|: curve count with multiplicity.
    pub fn size_with_multiplicity(&self) -> u64 {
        self.classes.values().map(|v| v.len() as u64).sum()
    }

    pub fn distinct_keys(&self) -> usize {
        self.classes.len()
    }

    /// Maximum coincidence multiplicity over all keys.
    pub fn k_max(&self) -> u64 {
        self.classes.values().map(|v| v.len() as u64).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn multiplicity_histogram(&self) -> BTreeMap<u64, u64> {
        let mut hist = BTreeMap::new();
        for pairs in self.classes.values() {
            *hist.entry(pairs.len() as u64).or_insert(0) += 1;
        }
        hist
    }

    pub fn conic(&self, key: &HyperbolaKey) -> ConicForm {
        conic_for(&self.metric, key)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let metric = match &self.metric {
            FamilyMetric::Euclid => "euclidean-squared".to_string(),
            FamilyMetric::Rect { kappa } => format!("rectangular(kappa={kappa})"),
        };
        serde_json::json!({
            "metric": metric,
            "size_with_multiplicity": self.size_with_multiplicity(),
            "distinct_keys": self.distinct_keys(),
            "k_max": self.k_max(),
            "multiplicity_histogram": self.multiplicity_histogram(),
        })
    }
}

fn conic_for(metric: &FamilyMetric, key: &HyperbolaKey) -> ConicForm {
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    match metric {
        FamilyMetric::Euclid => ConicForm {
            u: BigRational::one(),
            d: -(&two * &key.k1),
            e: &two * &key.k2,
            g: &key.k1 * &key.k1 - &key.k2 * &key.k2 - &key.k3,
        },
        FamilyMetric::Rect { kappa } => ConicForm {
            u: kappa.clone(),
            d: -key.k1.clone(),
            e: key.k2.clone(),
            g: (&key.k1 * &key.k1 - &key.k2 * &key.k2 - &key.k3) / (&four * kappa * kappa),
        },
    }
}

/// Builds the curve family over all non-degenerate ordered pairs of `P`.
pub fn build_family(p: &PointSet, metric: FamilyMetric) -> Result<CurveFamily> {
    if let FamilyMetric::Rect { kappa } = &metric {
        if kappa.is_zero() {
            return Err(Error::ZeroKappa);
        }
    }
    let mut classes: BTreeMap<HyperbolaKey, Vec<(Point, Point)>> = BTreeMap::new();
    for pp in p {
        for qq in p {
            let key = match &metric {
                FamilyMetric::Euclid => key_euclid(pp, qq),
                FamilyMetric::Rect { kappa } => key_rect(pp, qq, kappa),
            };
            if let Some(key) = key {
                classes.entry(key).or_default().push((pp.clone(), qq.clone()));
            }
        }
    }
    Ok(CurveFamily { metric, classes })
}

/// Parameter-plane points of the collinear set `A`: ordered pairs of
/// x-coordinates (for the Euclidean family `A` must lie on the x-axis, for
/// the rectangular one on `y = kappa*x`).
fn parameter_coords(a: &PointSet, metric: &FamilyMetric) -> Result<Vec<ExactScalar>> {
    match metric {
        FamilyMetric::Euclid => {
            for pt in a {
                if !pt.y.is_zero() {
                    return Err(Error::InconsistentFamily);
                }
            }
        }
        FamilyMetric::Rect { kappa } => {
            for pt in a {
                if pt.y != kappa * &pt.x {
                    return Err(Error::InconsistentFamily);
                }
            }
        }
    }
    Ok(a.iter().map(|pt| pt.x.clone()).collect())
}

/// Exact incidence count I(Pi, Gamma) between the parameter points of `A`
/// and the curves of the family, with multiplicity, by evaluating the
/// defining equation for every (point, key-class) combination.
pub fn incidences(a: &PointSet, family: &CurveFamily) -> Result<Int> {
    let coords = parameter_coords(a, &family.metric)?;

    // Group keys by (k1, k2); for a fixed parameter point the incidence
    // condition then pins k3, which is a hash lookup instead of a scan.
    let mut groups: HashMap<(ExactScalar, ExactScalar), HashMap<ExactScalar, u64>> =
        HashMap::new();
    for (key, pairs) in &family.classes {
        *groups
            .entry((key.k1.clone(), key.k2.clone()))
            .or_default()
            .entry(key.k3.clone())
            .or_insert(0) += pairs.len() as u64;
    }

    let four = BigRational::from_integer(BigInt::from(4));
    let mut count = Int::zero();
    for x in &coords {
        for y in &coords {
            for ((k1, k2), k3s) in &groups {
                // Solve u*(x^2-y^2) + d*x + e*y + g = 0 for k3.
                let k3 = match &family.metric {
                    FamilyMetric::Euclid => {
                        // (x - k1)^2 - (y - k2)^2
                        let dx = x - k1;
                        let dy = y - k2;
                        &dx * &dx - &dy * &dy
                    }
                    FamilyMetric::Rect { kappa } => {
                        let base = kappa * (x * x - y * y) - k1 * x + k2 * y;
                        k1 * k1 - k2 * k2 + &four * kappa * &base
                    }
                };
                if let Some(mult) = k3s.get(&k3) {
                    count += Int::from(*mult);
                }
            }
        }
    }
    Ok(count)
}

/// Structural report on coinciding curves.
#[derive(Clone, Debug)]
pub struct CoincidenceReport {
    pub k_max: u64,
    pub classes_with_multiplicity: usize,
    /// Every multiplicity->=2 class has all its p's on the predicted line
    /// (vertical `x = k1`, resp. `y = -kappa*x + k1`).
    pub p_lines_ok: bool,
    /// Same for the q's (`x = k2`, resp. `y = -kappa*x + k2`).
    pub q_lines_ok: bool,
    /// Max number of distinct q sharing a key with one fixed p (bound: 2).
    pub max_partners_per_p: u64,
    /// Max number of distinct p sharing a key with one fixed q (bound: 2).
    pub max_partners_per_q: u64,
    /// Distinct q's in a maximum-multiplicity class (the extracted B side).
    pub b_side_count: u64,
}

impl CoincidenceReport {
    pub fn partner_bound_ok(&self) -> bool {
        self.max_partners_per_p <= 2 && self.max_partners_per_q <= 2
    }

    pub fn b_side_at_least_half(&self) -> bool {
        2 * self.b_side_count >= self.k_max
    }
}

fn on_predicted_line(pt: &Point, value: &ExactScalar, metric: &FamilyMetric) -> bool {
    match metric {
        FamilyMetric::Euclid => &pt.x == value,
        FamilyMetric::Rect { kappa } => &(&pt.y + kappa * &pt.x) == value,
    }
}

/// Verifies the coincidence structure of every multiplicity->=2 class: the
/// generating p's (resp. q's) share the predicted line, each point has at
/// most two partners inside a class, and a maximum class carries at least
/// k_max/2 distinct points on the q side.
pub fn coincidence_structure(family: &CurveFamily) -> CoincidenceReport {
    let k_max = family.k_max();
    let mut report = CoincidenceReport {
        k_max,
        classes_with_multiplicity: 0,
        p_lines_ok: true,
        q_lines_ok: true,
        max_partners_per_p: 0,
        max_partners_per_q: 0,
        b_side_count: 0,
    };
    for (key, pairs) in &family.classes {
        if pairs.len() < 2 {
            continue;
        }
        report.classes_with_multiplicity += 1;
        let mut q_by_p: BTreeMap<&Point, Vec<&Point>> = BTreeMap::new();
        let mut p_by_q: BTreeMap<&Point, Vec<&Point>> = BTreeMap::new();
        for (p, q) in pairs {
            if !on_predicted_line(p, &key.k1, &family.metric) {
                report.p_lines_ok = false;
            }
            if !on_predicted_line(q, &key.k2, &family.metric) {
                report.q_lines_ok = false;
            }
            q_by_p.entry(p).or_default().push(q);
            p_by_q.entry(q).or_default().push(p);
        }
        for qs in q_by_p.values() {
            let mut distinct = qs.clone();
            distinct.sort();
            distinct.dedup();
            report.max_partners_per_p = report.max_partners_per_p.max(distinct.len() as u64);
        }
        for ps in p_by_q.values() {
            let mut distinct = ps.clone();
            distinct.sort();
            distinct.dedup();
            report.max_partners_per_q = report.max_partners_per_q.max(distinct.len() as u64);
        }
        if pairs.len() as u64 == k_max {
            let mut qs: Vec<&Point> = pairs.iter().map(|(_, q)| q).collect();
            qs.sort();
            qs.dedup();
            report.b_side_count = report.b_side_count.max(qs.len() as u64);
        }
    }
    if report.classes_with_multiplicity == 0 {
        // Vacuous: a multiplicity-1 family has no structure to check, but
        // the extracted side is still the whole (singleton) class.
        report.b_side_count = if k_max > 0 { 1 } else { 0 };
    }
    report
}

/// Number of common real points of two distinct curves in one family.
///
/// The difference of the two defining quadratics is affine, so the
/// intersection is a line section of a nondegenerate hyperbola: at most two
/// points, counted exactly via the discriminant sign.
pub fn count_common_points(c1: &ConicForm, c2: &ConicForm) -> usize {
    assert_eq!(c1.u, c2.u, "curves must come from the same family");
    let lx = &c1.d - &c2.d;
    let ly = &c1.e - &c2.e;
    let lg = &c1.g - &c2.g;
    if lx.is_zero() && ly.is_zero() {
        assert!(!lg.is_zero(), "identical conic forms are not a valid input");
        return 0;
    }
    let (qa, qb, qc) = if !ly.is_zero() {
        // y = alpha*x + beta on the line, substituted into c1.
        let alpha = -&lx / &ly;
        let beta = -&lg / &ly;
        let qa = &c1.u * (BigRational::one() - &alpha * &alpha);
        let qb = &c1.d - BigRational::from_integer(BigInt::from(2)) * &c1.u * &alpha * &beta
            + &c1.e * &alpha;
        let qc = -(&c1.u * &beta * &beta) + &c1.e * &beta + &c1.g;
        (qa, qb, qc)
    } else {
        let x0 = -&lg / &lx;
        let qa = -c1.u.clone();
        let qb = c1.e.clone();
        let qc = &c1.u * &x0 * &x0 + &c1.d * &x0 + &c1.g;
        (qa, qb, qc)
    };
    if qa.is_zero() {
        if qb.is_zero() {
            assert!(!qc.is_zero(), "a line inside a nondegenerate hyperbola");
            return 0;
        }
        return 1;
    }
    let disc = &qb * &qb - BigRational::from_integer(BigInt::from(4)) * &qa * &qc;
    match disc.cmp(&BigRational::zero()) {
        std::cmp::Ordering::Greater => 2,
        std::cmp::Ordering::Equal => 1,
        std::cmp::Ordering::Less => 0,
    }
}

#[derive(Clone, Debug)]
pub struct PseudoParabolaReport {
    pub pairs_checked: u64,
    pub max_intersections: usize,
    pub bound_respected: bool,
}

/// Samples pairs of distinct keys and verifies that the curves meet in at
/// most two points.
pub fn pseudoparabola_check(family: &CurveFamily, sample: u64, seed: u64) -> PseudoParabolaReport {
    let keys: Vec<&HyperbolaKey> = family.classes.keys().collect();
    let mut report = PseudoParabolaReport {
        pairs_checked: 0,
        max_intersections: 0,
        bound_respected: true,
    };
    if keys.len() < 2 {
        return report;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample {
        let i = rng.gen_range(0..keys.len());
        let j = rng.gen_range(0..keys.len());
        if i == j {
            continue;
        }
        let n = count_common_points(&family.conic(keys[i]), &family.conic(keys[j]));
        report.pairs_checked += 1;
        report.max_intersections = report.max_intersections.max(n);
        if n > 2 {
            report.bound_respected = false;
        }
    }
    report
}

/// Measured incidence count against the multiplicity-aware incidence bound
/// expression, reported as a ratio. The bound has an unspecified constant,
/// so this is inspection output, never pass/fail.
#[derive(Clone, Debug)]
pub struct IncidenceRatioReport {
    pub measured: Int,
    pub pi_size: u64,
    pub gamma_size: u64,
    pub k_max: u64,
    pub bound: Option<IntervalValue>,
    pub ratio: Option<IntervalValue>,
    pub vacuous: bool,
}

impl IncidenceRatioReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "measured": self.measured.to_string(),
            "pi_size": self.pi_size,
            "gamma_size": self.gamma_size,
            "k_max": self.k_max,
            "bound": self.bound.as_ref().map(|b| b.to_json()),
            "ratio": self.ratio.as_ref().map(|r| r.to_json()),
            "vacuous": self.vacuous,
        })
    }
}

/// Computes measured I(Pi, Gamma) and the expression
/// `k^(1/3) Pi^(2/3) Gamma^(2/3) + k^(2/11) Pi^(6/11) Gamma^(9/11) ln^(2/11) Gamma
///  + k Pi + Gamma` as an interval (natural log), and their ratio.
pub fn incidence_ratio_report(
    a: &PointSet,
    family: &CurveFamily,
    precision_bits: u32,
) -> Result<IncidenceRatioReport> {
    let measured = incidences(a, family)?;
    let pi_size = (a.len() * a.len()) as u64;
    let gamma_size = family.size_with_multiplicity();
    let k_max = family.k_max();
    if gamma_size == 0 {
        return Ok(IncidenceRatioReport {
            measured,
            pi_size,
            gamma_size,
            k_max,
            bound: None,
            ratio: None,
            vacuous: true,
        });
    }
    let k = IntervalValue::from_int(k_max as i64, precision_bits);
    let pi = IntervalValue::from_int(pi_size as i64, precision_bits);
    let gamma = IntervalValue::from_int(gamma_size as i64, precision_bits);
    let term1 = k
        .pow_ratio(1, 3)?
        .mul(&pi.pow_ratio(2, 3)?)
        .mul(&gamma.pow_ratio(2, 3)?);
    let log_term = if gamma_size == 1 {
        IntervalValue::from_int(0, precision_bits)
    } else {
        gamma.ln()?.pow_ratio(2, 11)?
    };
    let term2 = k
        .pow_ratio(2, 11)?
        .mul(&pi.pow_ratio(6, 11)?)
        .mul(&gamma.pow_ratio(9, 11)?)
        .mul(&log_term);
    let bound = term1.add(&term2).add(&k.mul(&pi)).add(&gamma);
    let measured_iv = IntervalValue::exact(
        BigRational::from_integer(measured.clone()),
        precision_bits,
    );
    let ratio = measured_iv.div(&bound);
    Ok(IncidenceRatioReport {
        measured,
        pi_size,
        gamma_size,
        k_max,
        bound: Some(bound),
        ratio: Some(ratio),
        vacuous: false,
    })
}
