//! Exact rational scalars, planar points, canonical lines, and the three
//! distance forms used throughout the crate.
//!
//! All geometry is exact: coordinates are arbitrary-precision rationals and
//! squared distances stand in for distances (two nonnegative reals are equal
//! iff their squares are). Nothing in this module ever touches a float.

use std::fmt;

use num::{BigInt, BigRational, Integer, Signed, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational. Canonical form (reduced, positive
/// denominator) is maintained by the underlying representation.
pub type ExactScalar = BigRational;

/// Arbitrary-precision integer.
pub type Int = BigInt;

/// Shorthand for building a scalar from an integer pair.
pub fn scalar(num: i64, den: i64) -> ExactScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a scalar in the wire form `"num/den"`, denominator always present.
pub fn scalar_to_string(s: &ExactScalar) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

/// Parses `"num/den"` or a bare integer. Accepts U+2212 minus signs.
pub fn parse_scalar(text: &str) -> Result<ExactScalar> {
    let cleaned = text.trim().replace('\u{2212}', "-");
    let bad = || Error::BadScalar(text.to_string());
    match cleaned.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = cleaned.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

/// A planar point with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: ExactScalar,
    pub y: ExactScalar,
}

impl Point {
    pub fn new(x: ExactScalar, y: ExactScalar) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(scalar(x, 1), scalar(y, 1))
    }

    pub fn translate(&self, dx: &ExactScalar, dy: &ExactScalar) -> Point {
        Point::new(&self.x + dx, &self.y + dy)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(2))?;
        seq.serialize_element(&scalar_to_string(&self.x))?;
        seq.serialize_element(&scalar_to_string(&self.y))?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;
        impl<'de> Visitor<'de> for PointVisitor {
            type Value = Point;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a pair of \"num/den\" strings")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Point, A::Error> {
                let x: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let y: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                Ok(Point::new(
                    parse_scalar(&x).map_err(de::Error::custom)?,
                    parse_scalar(&y).map_err(de::Error::custom)?,
                ))
            }
        }
        de.deserialize_seq(PointVisitor)
    }
}

/// A deduplicated set of points, iterated in lexicographic (x, y) order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    /// Builds a set from arbitrary points: sorts lexicographically and drops
    /// duplicates.
    pub fn from_points(mut points: Vec<Point>) -> Self {
        points.sort();
        points.dedup();
        PointSet { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    pub fn translate(&self, dx: &ExactScalar, dy: &ExactScalar) -> PointSet {
        PointSet::from_points(self.points.iter().map(|p| p.translate(dx, dy)).collect())
    }

    /// Restriction of the set to a line.
    pub fn on_line(&self, line: &CanonicalLine) -> PointSet {
        PointSet::from_points(
            self.points
                .iter()
                .filter(|p| line.contains(p))
                .cloned()
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("point sets always serialize")
    }

    pub fn from_json(text: &str) -> Result<PointSet> {
        let points: Vec<Point> = serde_json::from_str(text)?;
        Ok(PointSet::from_points(points))
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// The line `ax + by = c` with integer coefficients in canonical form:
/// `gcd(|a|,|b|,|c|) = 1` and the leading nonzero of `(a, b)` positive.
///
/// The canonical form makes the triple a hashable unique key for a line, so
/// collinear subsets can be collected by hashing over point pairs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalLine {
    pub a: Int,
    pub b: Int,
    pub c: Int,
}

impl CanonicalLine {
    /// The unique canonical line through two distinct points.
    pub fn through(p: &Point, q: &Point) -> Result<CanonicalLine> {
        if p == q {
            return Err(Error::EqualPoints);
        }
        // Normal direction (dy, -dx), then clear denominators.
        let dx = &q.x - &p.x;
        let dy = &q.y - &p.y;
        let a = dy.clone();
        let b = -dx;
        let c = &a * &p.x + &b * &p.y;
        let lcm = a
            .denom()
            .lcm(b.denom())
            .lcm(c.denom());
        let lcm = BigRational::from_integer(lcm);
        Ok(CanonicalLine::normalize(
            (&a * &lcm).to_integer(),
            (&b * &lcm).to_integer(),
            (&c * &lcm).to_integer(),
        ))
    }

    /// Canonical line with the given integer coefficients; `(a, b) != (0, 0)`.
    pub fn normalize(a: Int, b: Int, c: Int) -> CanonicalLine {
        assert!(
            !(a.is_zero() && b.is_zero()),
            "line coefficients (a, b) must not both vanish"
        );
        let g = a.gcd(&b).gcd(&c);
        let (mut a, mut b, mut c) = (&a / &g, &b / &g, &c / &g);
        let flip = if a.is_zero() {
            b.is_negative()
        } else {
            a.is_negative()
        };
        if flip {
            a = -a;
            b = -b;
            c = -c;
        }
        CanonicalLine { a, b, c }
    }

    pub fn contains(&self, p: &Point) -> bool {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let c = BigRational::from_integer(self.c.clone());
        &a * &p.x + &b * &p.y == c
    }

    pub fn is_horizontal(&self) -> bool {
        self.a.is_zero()
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    /// Slope, `None` for vertical lines.
    pub fn slope(&self) -> Option<ExactScalar> {
        if self.b.is_zero() {
            None
        } else {
            Some(BigRational::new(-self.a.clone(), self.b.clone()))
        }
    }

    /// y-intercept of `ax + by = c`, `None` for vertical lines.
    pub fn y_intercept(&self) -> Option<ExactScalar> {
        if self.b.is_zero() {
            None
        } else {
            Some(BigRational::new(self.c.clone(), self.b.clone()))
        }
    }
}

impl fmt::Display for CanonicalLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x + {}y = {}", self.a, self.b, self.c)
    }
}

/// The three distance forms.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    EuclideanSquared,
    Rectangular,
    MinkowskiSquared,
}

impl Metric {
    pub fn eval(&self, p: &Point, q: &Point) -> ExactScalar {
        match self {
            Metric::EuclideanSquared => euclid_sq(p, q),
            Metric::Rectangular => rect_dist(p, q),
            Metric::MinkowskiSquared => minkowski_sq(p, q),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::EuclideanSquared => "euclidean-squared",
            Metric::Rectangular => "rectangular",
            Metric::MinkowskiSquared => "minkowski-squared",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Metric> {
        match s {
            "euclidean-squared" | "euclid" | "euclidean" => Ok(Metric::EuclideanSquared),
            "rectangular" | "rect" => Ok(Metric::Rectangular),
            "minkowski-squared" | "minkowski" => Ok(Metric::MinkowskiSquared),
            other => Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}

/// Squared Euclidean distance `(px-qx)^2 + (py-qy)^2`.
pub fn euclid_sq(p: &Point, q: &Point) -> ExactScalar {
    let dx = &p.x - &q.x;
    let dy = &p.y - &q.y;
    &dx * &dx + &dy * &dy
}

/// Rectangular distance `(px-qx)(py-qy)`: the signed area of the
/// axis-parallel rectangle spanned by `p` and `q`. Positive when the points
/// sit at the northeast/southwest corners, negative for northwest/southeast.
pub fn rect_dist(p: &Point, q: &Point) -> ExactScalar {
    (&p.x - &q.x) * (&p.y - &q.y)
}

/// Squared Minkowski-plane distance `(px-qx)^2 - (py-qy)^2`.
pub fn minkowski_sq(p: &Point, q: &Point) -> ExactScalar {
    let dx = &p.x - &q.x;
    let dy = &p.y - &q.y;
    &dx * &dx - &dy * &dy
}

/// The integer-exact scaled 45-degree rotation `(x, y) -> (x+y, y-x)`.
///
/// Scaling by sqrt(2) is folded in so the map stays rational; the price is
/// the exact identity `minkowski_sq(psi(p), psi(q)) = 4 * rect_dist(p, q)`.
pub fn rotate_scaled(p: &Point) -> Point {
    Point::new(&p.x + &p.y, &p.y - &p.x)
}

/// Zero-distance handling when counting distinct values over pairs.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroPolicy {
    Exclude,
    Include,
}

impl ZeroPolicy {
    /// Default convention per metric: the Euclidean count ranges over
    /// distinct-point pairs only (zero never attained, excluded for
    /// uniformity); the rectangular and Minkowski counts range over all
    /// pairs, so an attained zero is a legitimate distance value.
    pub fn default_for(metric: Metric) -> ZeroPolicy {
        match metric {
            Metric::EuclideanSquared => ZeroPolicy::Exclude,
            Metric::Rectangular | Metric::MinkowskiSquared => ZeroPolicy::Include,
        }
    }
}
