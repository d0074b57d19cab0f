//! Validated interval arithmetic over exact rationals.
//!
//! Endpoints are rationals; the only operations that round are roots and
//! logarithms, which return dyadic endpoints at the working precision with
//! outward (directed) rounding. Every enclosure is rigorous: the true value
//! of an expression is always contained in the computed interval, so an
//! endpoint comparison that separates two intervals is a proof.
//!
//! Fractional-power energies such as E_1.5 are irrational in general; this
//! module is what lets the crate certify inequalities about them instead of
//! eyeballing floats.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactScalar;

/// Outcome of a certified comparison.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// The inequality is proven at the working precision.
    Holds,
    /// The enclosures overlap at the precision cap; no conclusion.
    Undecided,
    /// The reverse strict inequality is proven (a genuine counterexample).
    Violated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalValue {
    lo: BigRational,
    hi: BigRational,
    pub precision_bits: u32,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigRational::from_integer(pow2(bits));
    BigRational::new((x * &scale).floor().to_integer(), pow2(bits))
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigRational::from_integer(pow2(bits));
    BigRational::new((x * &scale).ceil().to_integer(), pow2(bits))
}

/// Largest dyadic k/2^bits with (k/2^bits)^n <= x, for x >= 0.
fn root_down(x: &BigRational, n: u32, bits: u32) -> BigRational {
    let scaled = x * BigRational::from_integer(pow2(n * bits));
    let t = scaled.floor().to_integer();
    BigRational::new(t.nth_root(n), pow2(bits))
}

/// Smallest dyadic k/2^bits with (k/2^bits)^n >= x, for x >= 0.
fn root_up(x: &BigRational, n: u32, bits: u32) -> BigRational {
    let scaled = x * BigRational::from_integer(pow2(n * bits));
    let t = scaled.floor().to_integer();
    let k = t.nth_root(n);
    let exact = BigRational::from_integer(k.pow(n)) == scaled;
    let k = if exact { k } else { k + BigInt::one() };
    BigRational::new(k, pow2(bits))
}

/// Rigorous enclosure of ln(x) for rational x > 0, via the atanh series
/// with the argument reduced into [1, 2).
fn ln_point(x: &BigRational, bits: u32) -> Result<(BigRational, BigRational)> {
    if !x.is_positive() {
        return Err(Error::LogNonpositive);
    }
    let one = BigRational::one();
    if *x == one {
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    if *x < one {
        let (lo, hi) = ln_point(&x.recip(), bits)?;
        return Ok((-hi, -lo));
    }
    // x = m * 2^e with m in [1, 2).
    let mut e: u32 = 0;
    let mut m = x.clone();
    let two = BigRational::from_integer(BigInt::from(2));
    while m >= two {
        m /= &two;
        e += 1;
    }
    let (mlo, mhi) = atanh_ln(&m, bits + 4)?;
    if e == 0 {
        return Ok((round_down(&mlo, bits), round_up(&mhi, bits)));
    }
    let (l2lo, l2hi) = atanh_ln(&two, bits + 4)?;
    let e = BigRational::from_integer(BigInt::from(e));
    Ok((
        round_down(&(&mlo + &e * &l2lo), bits),
        round_up(&(&mhi + &e * &l2hi), bits),
    ))
}

/// ln(x) for x in [1, 2] via ln(x) = 2*atanh((x-1)/(x+1)); the tail of the
/// series is bounded by a geometric majorant.
fn atanh_ln(x: &BigRational, bits: u32) -> Result<(BigRational, BigRational)> {
    let one = BigRational::one();
    if *x == one {
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    let t = (x - &one) / (x + &one);
    let t2 = &t * &t;
    let eps = BigRational::new(BigInt::one(), pow2(bits));
    let mut sum = BigRational::zero();
    let mut t_pow = t.clone(); // t^(2k+1)
    let mut k: u64 = 0;
    loop {
        sum += &t_pow / BigRational::from_integer(BigInt::from(2 * k + 1));
        // Remainder after this term: 2 * sum_{j>k} t^(2j+1)/(2j+1)
        //   <= 2 * t^(2k+3) / ((2k+3)(1-t^2)).
        let next_pow = &t_pow * &t2;
        let tail = BigRational::from_integer(BigInt::from(2)) * &next_pow
            / (BigRational::from_integer(BigInt::from(2 * k + 3)) * (&one - &t2));
        if tail < eps {
            let lo = BigRational::from_integer(BigInt::from(2)) * &sum;
            let hi = &lo + &tail;
            // Round to dyadic so downstream denominators stay bounded.
            return Ok((round_down(&lo, bits), round_up(&hi, bits)));
        }
        t_pow = next_pow;
        k += 1;
        if k > 4 * bits as u64 + 64 {
            return Err(Error::PrecisionCapExceeded(bits));
        }
    }
}

impl IntervalValue {
    pub fn exact(value: ExactScalar, precision_bits: u32) -> Self {
        IntervalValue {
            lo: value.clone(),
            hi: value,
            precision_bits,
        }
    }

    pub fn from_int(value: impl Into<BigInt>, precision_bits: u32) -> Self {
        Self::exact(BigRational::from_integer(value.into()), precision_bits)
    }

    pub fn from_endpoints(lo: BigRational, hi: BigRational, precision_bits: u32) -> Self {
        assert!(lo <= hi, "inverted interval endpoints");
        IntervalValue {
            lo,
            hi,
            precision_bits,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Outward rounding to dyadic endpoints at the working precision.
    pub fn round_out(&self) -> Self {
        IntervalValue {
            lo: round_down(&self.lo, self.precision_bits),
            hi: round_up(&self.hi, self.precision_bits),
            precision_bits: self.precision_bits,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        IntervalValue {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            precision_bits: self.precision_bits.min(other.precision_bits),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        IntervalValue {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
            precision_bits: self.precision_bits.min(other.precision_bits),
        }
    }

    pub fn neg(&self) -> Self {
        IntervalValue {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
            precision_bits: self.precision_bits,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        IntervalValue {
            lo,
            hi,
            precision_bits: self.precision_bits.min(other.precision_bits),
        }
        .round_out()
    }

    /// Division by an interval that is strictly positive.
    pub fn div(&self, other: &Self) -> Self {
        assert!(
            other.lo.is_positive(),
            "interval division requires a strictly positive divisor"
        );
        let recip = IntervalValue {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
            precision_bits: other.precision_bits,
        };
        self.mul(&recip)
    }

    pub fn powi(&self, exp: u32) -> Self {
        let mut acc = IntervalValue::from_int(1, self.precision_bits);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// n-th root for a nonnegative interval.
    pub fn nth_root(&self, n: u32) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::NegativeRoot);
        }
        Ok(IntervalValue {
            lo: root_down(&self.lo, n, self.precision_bits),
            hi: root_up(&self.hi, n, self.precision_bits),
            precision_bits: self.precision_bits,
        })
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.nth_root(2)
    }

    /// `x^(p/q)` for a nonnegative interval (monotone increasing, so it acts
    /// on the endpoints).
    pub fn pow_ratio(&self, p: u32, q: u32) -> Result<Self> {
        self.powi(p).nth_root(q)
    }

    /// Natural logarithm of a strictly positive interval.
    pub fn ln(&self) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(Error::LogNonpositive);
        }
        let (lo, _) = ln_point(&self.lo, self.precision_bits)?;
        let (_, hi) = ln_point(&self.hi, self.precision_bits)?;
        Ok(IntervalValue {
            lo,
            hi,
            precision_bits: self.precision_bits,
        })
    }

    /// Certified `self <= other`.
    pub fn le_certain(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    /// Certified `self > other` (strict).
    pub fn gt_certain(&self, other: &Self) -> bool {
        self.lo > other.hi
    }

    /// Certified comparison `self <= other`, three-valued.
    pub fn compare_le(&self, other: &Self) -> Verdict {
        if self.le_certain(other) {
            Verdict::Holds
        } else if self.gt_certain(other) {
            Verdict::Violated
        } else {
            Verdict::Undecided
        }
    }

    pub fn contains(&self, value: &BigRational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.lo.to_f64().unwrap_or(f64::NEG_INFINITY),
            self.hi.to_f64().unwrap_or(f64::INFINITY),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (lo, hi) = self.to_f64_pair();
        serde_json::json!({
            "lo": self.lo.to_string(),
            "hi": self.hi.to_string(),
            "approx": [lo, hi],
            "precision_bits": self.precision_bits,
        })
    }
}

impl std::fmt::Display for IntervalValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (lo, hi) = self.to_f64_pair();
        write!(f, "[{lo}, {hi}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar;

    fn iv(n: i64, bits: u32) -> IntervalValue {
        IntervalValue::from_int(n, bits)
    }

    #[test]
    fn sqrt_two_encloses() {
        let r = iv(2, 64).sqrt().unwrap();
        let sq_lo = r.lo() * r.lo();
        let sq_hi = r.hi() * r.hi();
        assert!(sq_lo <= scalar(2, 1) && scalar(2, 1) <= sq_hi);
        assert!(r.width() <= BigRational::new(BigInt::from(2), pow2(64)));
    }

    #[test]
    fn exact_roots_stay_exact() {
        let r = iv(49, 32).sqrt().unwrap();
        assert_eq!(r.lo(), &scalar(7, 1));
        assert_eq!(r.hi(), &scalar(7, 1));
        let c = iv(27, 32).nth_root(3).unwrap();
        assert_eq!(c.lo(), &scalar(3, 1));
        assert_eq!(c.hi(), &scalar(3, 1));
    }

    #[test]
    fn negative_root_rejected() {
        assert!(iv(-1, 32).sqrt().is_err());
    }

    #[test]
    fn ln_two_enclosure() {
        let l = iv(2, 96).ln().unwrap();
        // ln 2 = 0.69314718055994530941723...
        let lo_ref = scalar(693147180, 1_000_000_000);
        let hi_ref = scalar(693147181, 1_000_000_000);
        assert!(l.lo() > &lo_ref && l.hi() < &hi_ref);
    }

    #[test]
    fn ln_reciprocal_negates() {
        let a = iv(5, 64).ln().unwrap();
        let b = IntervalValue::exact(scalar(1, 5), 64).ln().unwrap();
        let sum = a.add(&b);
        assert!(sum.contains(&BigRational::zero()));
    }

    #[test]
    fn ln_one_is_zero() {
        let l = iv(1, 64).ln().unwrap();
        assert_eq!(l.lo(), &BigRational::zero());
        assert_eq!(l.hi(), &BigRational::zero());
        assert!(iv(0, 64).ln().is_err());
    }

    #[test]
    fn mul_sign_handling() {
        let a = IntervalValue::from_endpoints(scalar(-2, 1), scalar(3, 1), 64);
        let b = IntervalValue::from_endpoints(scalar(-5, 1), scalar(1, 1), 64);
        let p = a.mul(&b);
        assert!(p.lo() <= &scalar(-15, 1));
        assert!(p.hi() >= &scalar(10, 1));
    }

    #[test]
    fn pow_ratio_enclosure() {
        // 10^(2/3) = 4.641588...
        let v = iv(10, 80).pow_ratio(2, 3).unwrap();
        assert!(v.lo() > &scalar(46415, 10000));
        assert!(v.hi() < &scalar(46416, 10000));
    }

    #[test]
    fn comparison_verdicts() {
        let a = iv(3, 32);
        let b = iv(4, 32);
        assert_eq!(a.compare_le(&b), Verdict::Holds);
        assert_eq!(b.compare_le(&a), Verdict::Violated);
        let wide = IntervalValue::from_endpoints(scalar(2, 1), scalar(5, 1), 32);
        assert_eq!(wide.compare_le(&b), Verdict::Undecided);
    }

    #[test]
    fn div_encloses_quotient() {
        let a = iv(1, 64);
        let b = iv(3, 64);
        let q = a.div(&b);
        assert!(q.contains(&scalar(1, 3)));
    }
}
