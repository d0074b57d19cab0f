//! An exact-arithmetic laboratory for distinct-distance geometry on small
//! planar point sets.
//!
//! Everything combinatorial here is computed over exact rationals: squared
//! Euclidean distances, "rectangular" distances (the signed area of the
//! axis-parallel rectangle two points span), canonical lines, quadruple
//! censuses, hyperbola coincidence families, and additive energies. Where a
//! quantity is genuinely irrational (fractional-power energies, logarithms),
//! it is enclosed in a validated interval with directed rounding, and
//! comparisons return a three-way verdict instead of a float guess.
//!
//! # A first taste
//!
//! Count distinct squared distances in a 3x3 grid:
//!
//! ```
//! use fewdist::construct::grid;
//! use fewdist::exact::Metric;
//! use fewdist::stats::{distinct_distances, DistinctOptions};
//!
//! let p = grid(3, 3).unwrap();
//! let profile = distinct_distances(&p, Metric::EuclideanSquared, DistinctOptions::default()).unwrap();
//! assert_eq!(profile.distinct_count, 5); // 1, 2, 4, 5, 8
//! ```
//!
//! The central cross-check of the crate: the quadruple census of a line
//! inside a point set agrees exactly with brute-force incidences between
//! parameter points and the hyperbola family:
//!
//! ```
//! use fewdist::census::census_euclid;
//! use fewdist::construct::grid;
//! use fewdist::exact::CanonicalLine;
//! use fewdist::hyperbola::{build_family, incidences, FamilyMetric};
//! use num::{BigInt, Zero, One};
//!
//! let p = grid(4, 3).unwrap();
//! let axis = CanonicalLine::normalize(BigInt::zero(), BigInt::one(), BigInt::zero());
//! let a = p.on_line(&axis); // the bottom row
//! let census = census_euclid(&a, &p).unwrap();
//! let family = build_family(&p, FamilyMetric::Euclid).unwrap();
//! assert_eq!(incidences(&a, &family).unwrap(), census.q2);
//! ```
//!
//! Certified inequalities come back as verdicts, never booleans computed in
//! floating point:
//!
//! ```
//! use fewdist::energy::{int_set, li_inequality_check};
//! use fewdist::interval::Verdict;
//!
//! let a = int_set([0, 1, 3, 7]);
//! let report = li_inequality_check(&a, &a, 64, 256).unwrap();
//! assert_eq!(report.verdict, Verdict::Holds);
//! ```
//!
//! And the exponent-balancing calculation that motivates all of the above is
//! reproduced symbolically, with exact rational exponents:
//!
//! ```
//! use fewdist::experiment::theorem_euclid_exponent;
//! use num::BigRational;
//!
//! let outcome = theorem_euclid_exponent().unwrap();
//! assert_eq!(
//!     outcome.max_exponent,
//!     BigRational::new(43.into(), 52.into())
//! );
//! ```
//!
//! The mdbook under `book/` walks through each module with runnable
//! snippets; the `fewdist` binary exposes the same machinery as CLI verbs
//! (`gen`, `stats`, `census`, `family`, `energy`, `sweep`, `balance`).

pub mod census;
pub mod construct;
pub mod energy;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod hyperbola;
pub mod interval;
pub mod stats;

pub use error::{Error, Result};
