//! Generators for the point-set families used as inputs: integer grids,
//! unbalanced lattices, line-anchored sets, and seeded random sets.

use std::collections::HashMap;

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{CanonicalLine, ExactScalar, Point, PointSet};

/// The a x b integer grid `{0,..,a-1} x {0,..,b-1}`.
pub fn grid(a: u64, b: u64) -> Result<PointSet> {
    if a == 0 || b == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut points = Vec::with_capacity((a * b) as usize);
    for x in 0..a {
        for y in 0..b {
            points.push(Point::from_ints(x as i64, y as i64));
        }
    }
    Ok(PointSet::from_points(points))
}

/// `floor(n^(p/q))` for nonnegative `n` and `p/q` with `q > 0`, by exact
/// integer root extraction.
fn floor_pow(n: u64, p: u32, q: u32) -> u64 {
    BigInt::from(n)
        .pow(p)
        .nth_root(q)
        .to_u64()
        .expect("grid dimensions fit in u64")
}

/// The unbalanced lattice `{1,..,floor(n^(1-eps))} x {1,..,floor(n^eps)}`.
///
/// Dimensions are rounded down, so the output can have fewer than `n`
/// points; the actual dimensions are returned alongside the set.
pub fn unbalanced_lattice(n: u64, eps: &ExactScalar) -> Result<(PointSet, u64, u64)> {
    let zero = BigRational::zero();
    let one = BigRational::from_integer(BigInt::from(1));
    if *eps <= zero || *eps >= one {
        return Err(Error::DegenerateLattice {
            n,
            eps: eps.to_string(),
        });
    }
    let p = eps
        .numer()
        .to_u32()
        .ok_or_else(|| Error::DegenerateLattice { n, eps: eps.to_string() })?;
    let q = eps
        .denom()
        .to_u32()
        .ok_or_else(|| Error::DegenerateLattice { n, eps: eps.to_string() })?;
    let a = floor_pow(n, q - p, q);
    let b = floor_pow(n, p, q);
    if a == 0 || b == 0 {
        return Err(Error::DegenerateLattice {
            n,
            eps: eps.to_string(),
        });
    }
    let mut points = Vec::with_capacity((a * b) as usize);
    for x in 1..=a {
        for y in 1..=b {
            points.push(Point::from_ints(x as i64, y as i64));
        }
    }
    Ok((PointSet::from_points(points), a, b))
}

/// A set of `n` distinct points, exactly `m` of which lie on `line`.
///
/// The on-line points sit at integer parameters of the line (rational
/// coordinates in general); the remaining points are integer points sampled
/// off the line inside `[-coord_bound, coord_bound]^2`. Deterministic for a
/// fixed seed.
pub fn line_plus_bulk(
    line: &CanonicalLine,
    m: u64,
    n: u64,
    seed: u64,
    coord_bound: u64,
) -> Result<PointSet> {
    if m == 0 || m > n {
        return Err(Error::BadLineCount { m, n });
    }
    let bound = BigRational::from_integer(BigInt::from(coord_bound));

    // Integer-parameter points p0 + t*(b, -a), t = 0, 1, -1, 2, -2, ...
    let (x0, y0) = if !line.b.is_zero() {
        (
            BigRational::zero(),
            BigRational::new(line.c.clone(), line.b.clone()),
        )
    } else {
        (
            BigRational::new(line.c.clone(), line.a.clone()),
            BigRational::zero(),
        )
    };
    let dir_x = BigRational::from_integer(line.b.clone());
    let dir_y = BigRational::from_integer(-line.a.clone());

    let mut on_line = Vec::new();
    let t_cap = 8 * (coord_bound as i64 + 1);
    let mut t: i64 = 0;
    while (on_line.len() as u64) < m {
        for s in [t, -t] {
            let ts = BigRational::from_integer(BigInt::from(s));
            let p = Point::new(&x0 + &ts * &dir_x, &y0 + &ts * &dir_y);
            if p.x.abs() <= bound && p.y.abs() <= bound && !on_line.contains(&p) {
                on_line.push(p);
                if on_line.len() as u64 == m {
                    break;
                }
            }
        }
        t += 1;
        if t > t_cap {
            return Err(Error::InfeasibleBound);
        }
    }

    let mut points = on_line;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = -(coord_bound as i64);
    let hi = coord_bound as i64;
    let mut attempts = 0u64;
    let budget = 10_000 * n.max(1);
    while (points.len() as u64) < n {
        attempts += 1;
        if attempts > budget {
            return Err(Error::InfeasibleBound);
        }
        let p = Point::from_ints(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
        if !line.contains(&p) && !points.contains(&p) {
            points.push(p);
        }
    }
    Ok(PointSet::from_points(points))
}

/// `n` distinct integer points in `[-coord_bound, coord_bound]^2`,
/// deterministic per seed. Sampling is a partial Fisher-Yates shuffle over
/// the full index space, so saturation (`n` equal to the number of available
/// points) is fine.
pub fn random_set(n: u64, coord_bound: u64, seed: u64) -> Result<PointSet> {
    let side = 2 * coord_bound + 1;
    let total = side * side;
    if n > total {
        return Err(Error::InfeasibleDensity {
            requested: n,
            available: total,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut points = Vec::with_capacity(n as usize);
    for i in 0..n {
        let j = rng.gen_range(i..total);
        let pick = *swapped.get(&j).unwrap_or(&j);
        let cur_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, cur_i);
        let x = (pick % side) as i64 - coord_bound as i64;
        let y = (pick / side) as i64 - coord_bound as i64;
        points.push(Point::from_ints(x, y));
    }
    Ok(PointSet::from_points(points))
}
