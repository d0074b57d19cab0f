//! Representation functions, energies E_k, sumset images of convex
//! quadratics, rich-point machinery, and exact or interval-certified checks
//! of the energy inequalities.
//!
//! Integer-exponent energies are exact integers. Fractional exponents (E_1.5
//! above all) are irrational in general and are handled as validated
//! intervals with adaptive precision: a comparison either certifies, raises
//! precision, or reports UNDECIDED at the cap. Nothing is ever "verified"
//! with floats.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Int};
use crate::interval::{IntervalValue, Verdict};

/// A finite set of exact rationals.
pub type ScalarSet = BTreeSet<ExactScalar>;

pub fn scalar_set<I: IntoIterator<Item = ExactScalar>>(values: I) -> ScalarSet {
    values.into_iter().collect()
}

pub fn int_set<I: IntoIterator<Item = i64>>(values: I) -> ScalarSet {
    values
        .into_iter()
        .map(|v| BigRational::from_integer(BigInt::from(v)))
        .collect()
}

/// Representation counts of the difference set: `rep[x] = r_{A-B}(x)`.
#[derive(Clone, Debug)]
pub struct RepProfile {
    pub rep: BTreeMap<ExactScalar, u64>,
    pub a_len: usize,
    pub b_len: usize,
}

impl RepProfile {
    /// The support A - B.
    pub fn support(&self) -> ScalarSet {
        self.rep.keys().cloned().collect()
    }

    pub fn max_rep(&self) -> u64 {
        self.rep.values().copied().max().unwrap_or(0)
    }
}

/// Exact representation counts `r_{A-B}(x) = |{(a,b) : a - b = x}|`.
pub fn rep_function(a: &ScalarSet, b: &ScalarSet) -> Result<RepProfile> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut rep: BTreeMap<ExactScalar, u64> = BTreeMap::new();
    for x in a {
        for y in b {
            *rep.entry(x - y).or_insert(0) += 1;
        }
    }
    Ok(RepProfile {
        rep,
        a_len: a.len(),
        b_len: b.len(),
    })
}

/// The difference set A - B.
pub fn difference_set(a: &ScalarSet, b: &ScalarSet) -> ScalarSet {
    let mut out = ScalarSet::new();
    for x in a {
        for y in b {
            out.insert(x - y);
        }
    }
    out
}

/// Exact or enclosed value of an energy sum.
#[derive(Clone, Debug)]
pub enum EnergyValue {
    Exact(Int),
    Enclosure(IntervalValue),
}

impl EnergyValue {
    pub fn as_interval(&self, precision_bits: u32) -> IntervalValue {
        match self {
            EnergyValue::Exact(v) => {
                IntervalValue::exact(BigRational::from_integer(v.clone()), precision_bits)
            }
            EnergyValue::Enclosure(iv) => iv.clone(),
        }
    }

    pub fn expect_exact(&self) -> &Int {
        match self {
            EnergyValue::Exact(v) => v,
            EnergyValue::Enclosure(_) => panic!("expected an exact energy value"),
        }
    }
}

/// `E_k(A, B) = sum_x r_{A-B}(x)^k`; `B` defaults to `A`. Exact for integer
/// `k`, a validated enclosure for fractional `k` (each term `r^(p/q)` is an
/// exact integer power followed by a directed-rounded q-th root).
pub fn energy(
    a: &ScalarSet,
    b: Option<&ScalarSet>,
    k: &BigRational,
    precision_bits: u32,
) -> Result<EnergyValue> {
    if !k.is_positive() {
        return Err(Error::NonpositiveExponent(k.to_string()));
    }
    let profile = rep_function(a, b.unwrap_or(a))?;
    if k.is_integer() {
        let exp = k
            .to_integer()
            .to_u32()
            .ok_or_else(|| Error::NonpositiveExponent(k.to_string()))?;
        let sum: Int = profile
            .rep
            .values()
            .map(|&r| Int::from(r).pow(exp))
            .sum();
        return Ok(EnergyValue::Exact(sum));
    }
    let p = k
        .numer()
        .to_u32()
        .ok_or_else(|| Error::NonpositiveExponent(k.to_string()))?;
    let q = k
        .denom()
        .to_u32()
        .ok_or_else(|| Error::NonpositiveExponent(k.to_string()))?;
    let mut sum = IntervalValue::from_int(0, precision_bits);
    for &r in profile.rep.values() {
        let term = IntervalValue::from_int(Int::from(r).pow(p), precision_bits).nth_root(q)?;
        sum = sum.add(&term);
    }
    Ok(EnergyValue::Enclosure(sum))
}

/// Convenience: exact `E_k` for integer `k`.
pub fn energy_exact(a: &ScalarSet, b: Option<&ScalarSet>, k: u32) -> Result<Int> {
    match energy(a, b, &BigRational::from_integer(BigInt::from(k)), 32)? {
        EnergyValue::Exact(v) => Ok(v),
        EnergyValue::Enclosure(_) => unreachable!("integer k yields an exact value"),
    }
}

/// `E_1.5` as an enclosure.
pub fn energy_three_halves(a: &ScalarSet, precision_bits: u32) -> Result<IntervalValue> {
    match energy(a, None, &BigRational::new(BigInt::from(3), BigInt::from(2)), precision_bits)? {
        EnergyValue::Enclosure(iv) => Ok(iv),
        EnergyValue::Exact(_) => unreachable!("k = 3/2 yields an enclosure"),
    }
}

/// The strictly convex (or concave) quadratics the analysis needs:
/// `x^2` and `kappa*x^2 - c*x`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexFn {
    Square,
    Quad { kappa: ExactScalar, c: ExactScalar },
}

impl ConvexFn {
    pub fn quad(kappa: ExactScalar, c: ExactScalar) -> Result<ConvexFn> {
        if kappa.is_zero() {
            return Err(Error::ZeroKappa);
        }
        Ok(ConvexFn::Quad { kappa, c })
    }

    pub fn eval(&self, x: &ExactScalar) -> ExactScalar {
        match self {
            ConvexFn::Square => x * x,
            ConvexFn::Quad { kappa, c } => kappa * x * x - c * x,
        }
    }

    /// Leading coefficient; nonzero by construction.
    pub fn leading(&self) -> ExactScalar {
        match self {
            ConvexFn::Square => BigRational::one(),
            ConvexFn::Quad { kappa, .. } => kappa.clone(),
        }
    }

    pub fn image(&self, u: &ScalarSet) -> ScalarSet {
        u.iter().map(|x| self.eval(x)).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SetOp {
    Plus,
    Minus,
}

/// The exact image set `{f(u) op v}`.
pub fn sumset_image(f: &ConvexFn, u: &ScalarSet, v: &ScalarSet, op: SetOp) -> ScalarSet {
    let mut out = ScalarSet::new();
    for x in u {
        let fx = f.eval(x);
        for y in v {
            out.insert(match op {
                SetOp::Plus => &fx + y,
                SetOp::Minus => &fx - y,
            });
        }
    }
    out
}

/// Certified check of `E_1.5(A)^2 |B|^2 <= E_3(A)^(2/3) E_3(B)^(1/3) E(A, A-B)`.
#[derive(Clone, Debug)]
pub struct LiReport {
    pub verdict: Verdict,
    pub precision_bits: u32,
    pub lhs: IntervalValue,
    pub rhs: IntervalValue,
}

pub fn li_inequality_check(
    a: &ScalarSet,
    b: &ScalarSet,
    start_bits: u32,
    cap_bits: u32,
) -> Result<LiReport> {
    let e3a = energy_exact(a, None, 3)?;
    let e3b = energy_exact(b, None, 3)?;
    let a_minus_b = difference_set(a, b);
    let e_a_ab = energy_exact(a, Some(&a_minus_b), 2)?;
    let b_len = Int::from(b.len() as u64);

    let mut bits = start_bits;
    loop {
        let e15 = energy_three_halves(a, bits)?;
        let lhs = e15
            .powi(2)
            .mul(&IntervalValue::from_int(&b_len * &b_len, bits));
        let rhs = IntervalValue::from_int(e3a.clone(), bits)
            .pow_ratio(2, 3)?
            .mul(&IntervalValue::from_int(e3b.clone(), bits).pow_ratio(1, 3)?)
            .mul(&IntervalValue::from_int(e_a_ab.clone(), bits));
        match lhs.compare_le(&rhs) {
            Verdict::Holds => {
                return Ok(LiReport {
                    verdict: Verdict::Holds,
                    precision_bits: bits,
                    lhs,
                    rhs,
                })
            }
            Verdict::Violated => {
                // Rigorous enclosures: a separation the other way is a real
                // counterexample, not noise.
                return Ok(LiReport {
                    verdict: Verdict::Violated,
                    precision_bits: bits,
                    lhs,
                    rhs,
                });
            }
            Verdict::Undecided => {
                if bits >= cap_bits {
                    return Ok(LiReport {
                        verdict: Verdict::Undecided,
                        precision_bits: bits,
                        lhs,
                        rhs,
                    });
                }
                bits = (bits * 2).min(cap_bits);
            }
        }
    }
}

/// The two-link chain bounding |U|^8 / |U-U|: the all-integer inequality
/// `|U|^8 <= E_3(U) * E(U, U-U) * |U-U|` (exact) and the interval inequality
/// `|U|^6 <= E_1.5(U)^2 * |U-U|`.
#[derive(Clone, Debug)]
pub struct HolderReport {
    pub integer_lhs: Int,
    pub integer_rhs: Int,
    pub integer_holds: bool,
    pub interval_verdict: Verdict,
    pub precision_bits: u32,
    /// rhs/lhs of the integer chain, for slack inspection.
    pub slack_ratio: f64,
}

pub fn holder_chain_check(u: &ScalarSet, start_bits: u32, cap_bits: u32) -> Result<HolderReport> {
    if u.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = Int::from(u.len() as u64);
    let diff = difference_set(u, u);
    let diff_len = Int::from(diff.len() as u64);
    let e3 = energy_exact(u, None, 3)?;
    let e_u_diff = energy_exact(u, Some(&diff), 2)?;

    let integer_lhs = n.pow(8);
    let integer_rhs = &e3 * &e_u_diff * &diff_len;
    let integer_holds = integer_lhs <= integer_rhs;
    let slack_ratio = BigRational::new(integer_rhs.clone(), integer_lhs.clone())
        .to_f64()
        .unwrap_or(f64::INFINITY);

    let pow6 = IntervalValue::from_int(n.pow(6), start_bits);
    let mut bits = start_bits;
    let interval_verdict = loop {
        let e15 = energy_three_halves(u, bits)?;
        let rhs = e15
            .powi(2)
            .mul(&IntervalValue::from_int(diff_len.clone(), bits));
        match pow6.compare_le(&rhs) {
            Verdict::Undecided if bits < cap_bits => bits = (bits * 2).min(cap_bits),
            verdict => break verdict,
        }
    };

    Ok(HolderReport {
        integer_lhs,
        integer_rhs,
        integer_holds,
        interval_verdict,
        precision_bits: bits,
        slack_ratio,
    })
}

/// The curve family `L = { y = -f(x+b) + s : (s,b) in (f(A)+C) x B }`.
#[derive(Clone, Debug)]
pub struct ConvexCurveFamily {
    pub f: ConvexFn,
    /// Distinct (s, b) parameter pairs, sorted.
    pub curves: Vec<(ExactScalar, ExactScalar)>,
    pub s_count: usize,
    pub b_count: usize,
}

impl ConvexCurveFamily {
    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Whether a point lies on the curve with parameters (s, b).
    pub fn on_curve(&self, s: &ExactScalar, b: &ExactScalar, x: &ExactScalar, y: &ExactScalar) -> bool {
        *y == -self.f.eval(&(x + b)) + s
    }
}

pub fn convex_curve_family(
    f: &ConvexFn,
    a: &ScalarSet,
    b: &ScalarSet,
    c: &ScalarSet,
) -> Result<ConvexCurveFamily> {
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Err(Error::EmptySet);
    }
    let s_set = sumset_image(f, a, c, SetOp::Plus);
    let mut curves = Vec::with_capacity(s_set.len() * b.len());
    for s in &s_set {
        for bb in b {
            curves.push((s.clone(), bb.clone()));
        }
    }
    Ok(ConvexCurveFamily {
        f: f.clone(),
        s_count: s_set.len(),
        b_count: b.len(),
        curves,
    })
}

/// Number of intersection points of two distinct curves of the family:
/// 0 when b = b' (parallel translates), otherwise exactly 1, since the
/// difference `h(x) = f(x+b') - f(x+b) + s - s'` is affine with nonzero
/// slope for a quadratic f. Returns `None` for identical parameter pairs.
pub fn curve_pair_intersections(
    f: &ConvexFn,
    (s1, b1): (&ExactScalar, &ExactScalar),
    (s2, b2): (&ExactScalar, &ExactScalar),
) -> Option<(usize, Option<(ExactScalar, ExactScalar)>)> {
    if s1 == s2 && b1 == b2 {
        return None;
    }
    if b1 == b2 {
        return Some((0, None));
    }
    // h(x) = f(x+b2) - f(x+b1) + s1 - s2 = slope*x + offset.
    let lead = f.leading();
    let two = BigRational::from_integer(BigInt::from(2));
    let slope = &two * &lead * (b2 - b1);
    let offset = &f.eval(b2) - &f.eval(b1) + s1 - s2;
    debug_assert!(!slope.is_zero());
    let x = -&offset / &slope;
    let y = -f.eval(&(&x + b1)) + s1;
    Some((1, Some((x, y))))
}

/// Exact set of points incident to at least `t` curves of the family,
/// computed by enumerating all pairwise intersection points and counting
/// incident curves for each.
pub fn rich_points(
    family: &ConvexCurveFamily,
    t: u64,
) -> Result<BTreeSet<(ExactScalar, ExactScalar)>> {
    if t < 2 {
        return Err(Error::InvalidConfig(
            "rich-point threshold t must be at least 2".into(),
        ));
    }
    let curves = &family.curves;
    let mut candidates: BTreeSet<(ExactScalar, ExactScalar)> = BTreeSet::new();
    for i in 0..curves.len() {
        for j in (i + 1)..curves.len() {
            if let Some((1, Some(pt))) = curve_pair_intersections(
                &family.f,
                (&curves[i].0, &curves[i].1),
                (&curves[j].0, &curves[j].1),
            ) {
                candidates.insert(pt);
            }
        }
    }
    let mut rich = BTreeSet::new();
    for (x, y) in candidates {
        let incident = curves
            .iter()
            .filter(|(s, b)| family.on_curve(s, b, &x, &y))
            .count() as u64;
        if incident >= t {
            rich.insert((x, y));
        }
    }
    Ok(rich)
}

/// Exact containment check `|C| * |{x : r_{A-B}(x) >= t}| <= |P_t(L)|`.
#[derive(Clone, Debug)]
pub struct RichContainmentReport {
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
    pub rich_x_count: u64,
}

pub fn rich_containment_check(
    f: &ConvexFn,
    a: &ScalarSet,
    b: &ScalarSet,
    c: &ScalarSet,
    t: u64,
) -> Result<RichContainmentReport> {
    if t < 2 || t > a.len().min(b.len()) as u64 {
        return Err(Error::InvalidConfig(format!(
            "t = {t} outside [2, min(|A|, |B|) = {}]",
            a.len().min(b.len())
        )));
    }
    let profile = rep_function(a, b)?;
    let rich_x_count = profile.rep.values().filter(|&&r| r >= t).count() as u64;
    let lhs = c.len() as u64 * rich_x_count;
    let family = convex_curve_family(f, a, b, c)?;
    let rhs = rich_points(&family, t)?.len() as u64;
    Ok(RichContainmentReport {
        lhs,
        rhs,
        holds: lhs <= rhs,
        rich_x_count,
    })
}

/// Dyadic re-summation identities for `E_3(A)` and `E(A, F)`.
#[derive(Clone, Debug)]
pub struct DyadicReport {
    pub e3_identity_holds: bool,
    pub e3_bands: usize,
    pub ef_identity_holds: Option<bool>,
    pub delta_used: Option<u64>,
}

/// Recomputes `E_3(A)` by summing cubes over the dyadic bands
/// `2^j <= r < 2^(j+1)`, and, when `F` is given, `E(A, F)` split at `delta`
/// (small part `r < delta` plus dyadic bands `2^j*delta <= r < 2^(j+1)*delta`),
/// and asserts both totals equal the direct sums exactly.
pub fn dyadic_decomposition_check(
    a: &ScalarSet,
    f_set: Option<&ScalarSet>,
    delta: Option<u64>,
) -> Result<DyadicReport> {
    let profile = rep_function(a, a)?;
    let e3_direct = energy_exact(a, None, 3)?;
    let mut bands: BTreeMap<u32, Int> = BTreeMap::new();
    for &r in profile.rep.values() {
        debug_assert!(r >= 1);
        let band = 63 - r.leading_zeros(); // floor(log2 r)
        *bands.entry(band).or_insert_with(Int::zero) += Int::from(r).pow(3);
    }
    let e3_banded: Int = bands.values().cloned().sum();
    let e3_identity_holds = e3_banded == e3_direct;
    let e3_bands = bands.len();

    let (ef_identity_holds, delta_used) = if let Some(f_set) = f_set {
        let delta = delta.unwrap_or(1).max(1);
        let ef_direct = energy_exact(a, Some(f_set), 2)?;
        let ef_profile = rep_function(a, f_set)?;
        let mut small = Int::zero();
        let mut banded = Int::zero();
        for &r in ef_profile.rep.values() {
            if r < delta {
                small += Int::from(r).pow(2);
            } else {
                // r falls into the unique band 2^j*delta <= r < 2^(j+1)*delta.
                banded += Int::from(r).pow(2);
            }
        }
        ((Some(&small + &banded == ef_direct)), Some(delta))
    } else {
        (None, None)
    };

    Ok(DyadicReport {
        e3_identity_holds,
        e3_bands,
        ef_identity_holds,
        delta_used,
    })
}

/// The threshold `delta* = |f(A)+C| |F|^(1/2) / (|A|^(1/2) |C|^(1/2))` as an
/// enclosure, with a certified `delta* >= 1` flag.
pub fn delta_star(
    f: &ConvexFn,
    a: &ScalarSet,
    c: &ScalarSet,
    f_set: &ScalarSet,
    precision_bits: u32,
) -> Result<(IntervalValue, bool)> {
    if a.is_empty() || c.is_empty() || f_set.is_empty() {
        return Err(Error::EmptySet);
    }
    let fac = sumset_image(f, a, c, SetOp::Plus).len() as i64;
    let num = IntervalValue::from_int(fac, precision_bits)
        .mul(&IntervalValue::from_int(f_set.len() as i64, precision_bits).sqrt()?);
    let den = IntervalValue::from_int(a.len() as i64, precision_bits)
        .sqrt()?
        .mul(&IntervalValue::from_int(c.len() as i64, precision_bits).sqrt()?);
    let ds = num.div(&den);
    let ge_one = ds.lo() >= &BigRational::one();
    Ok((ds, ge_one))
}

/// Exact LHS and interval RHS of the convexity lower bound
/// `|U-U|^5 |f(U)+V|^6` vs `|U|^11 |V|^3 / ln^2 |U|`, plus their ratio (the
/// implied constant). Report only; the constant is unspecified.
#[derive(Clone, Debug)]
pub struct LrRatioReport {
    pub lhs: Int,
    pub rhs: IntervalValue,
    pub ratio: IntervalValue,
    pub diff_size: u64,
    pub image_size: u64,
}

pub fn lr_ratio_report(
    f: &ConvexFn,
    u: &ScalarSet,
    v: &ScalarSet,
    precision_bits: u32,
) -> Result<LrRatioReport> {
    if u.len() < 2 {
        return Err(Error::TooFewPoints { min: 2, got: u.len() });
    }
    if v.is_empty() {
        return Err(Error::EmptySet);
    }
    let diff_size = difference_set(u, u).len() as u64;
    let image_size = sumset_image(f, u, v, SetOp::Plus).len() as u64;
    let lhs = Int::from(diff_size).pow(5) * Int::from(image_size).pow(6);
    let ln_u = IntervalValue::from_int(u.len() as i64, precision_bits).ln()?;
    let rhs = IntervalValue::from_int(Int::from(u.len() as u64).pow(11), precision_bits)
        .mul(&IntervalValue::from_int(Int::from(v.len() as u64).pow(3), precision_bits))
        .div(&ln_u.powi(2));
    let ratio = IntervalValue::from_int(lhs.clone(), precision_bits).div(&rhs);
    Ok(LrRatioReport {
        lhs,
        rhs,
        ratio,
        diff_size,
        image_size,
    })
}
