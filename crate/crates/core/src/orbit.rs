//! Orbit iteration with singular handling, attractor-convergence profiling,
//! and Lyapunov-exponent bounds from exact matrix-product norms.

use num::traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{distance_l1, RatMatrix2, RatPoint};
use crate::pwa::{Located, PiecewiseMap};
use crate::rational::{ln_rational, rat_int, Rational};
use crate::symbolic::{Itinerary, ItineraryStatus};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitStatus {
    Complete,
    HitSingular(usize),
    LeftDomain(usize),
}

/// Exact orbit `x0, f x0, ..., f^n x0` with the symbols of the visited
/// pieces. Stops at the first singular or outside point.
#[derive(Clone, Debug)]
pub struct OrbitResult {
    pub points: Vec<RatPoint>,
    pub symbols: Itinerary,
    pub status: OrbitStatus,
}

pub fn orbit(m: &PiecewiseMap, x0: &RatPoint, n: usize) -> OrbitResult {
    assert!(n >= 1);
    let mut points = vec![x0.clone()];
    let mut symbols = Vec::new();
    let mut cur = x0.clone();
    for step in 0..n {
        match m.locate(&cur) {
            Located::Piece(i) => {
                symbols.push(i);
                cur = m.pieces()[i].map.apply(&cur);
                points.push(cur.clone());
            }
            Located::Singular => {
                return OrbitResult {
                    points,
                    symbols: Itinerary {
                        symbols,
                        status: ItineraryStatus::TruncatedAtSingular(step),
                    },
                    status: OrbitStatus::HitSingular(step),
                };
            }
            Located::Outside => {
                return OrbitResult {
                    points,
                    symbols: Itinerary {
                        symbols,
                        status: ItineraryStatus::TruncatedAtSingular(step),
                    },
                    status: OrbitStatus::LeftDomain(step),
                };
            }
        }
    }
    OrbitResult {
        points,
        symbols: Itinerary { symbols, status: ItineraryStatus::Complete },
        status: OrbitStatus::Complete,
    }
}

/// Deterministic sampler: rational points with odd numerators over a
/// power-of-two denominator, so no sample starts on a diagonal, rejected
/// into the interiors of the pieces.
pub fn sample_points(m: &PiecewiseMap, count: usize, seed: u64) -> Vec<RatPoint> {
    const DENOM_BITS: u32 = 20;
    let denom: i64 = 1 << DENOM_BITS;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (min, max) = m.domain().bounding_box();
    let to_range = |r: &Rational| -> (i64, i64) {
        let lo = (r * rat_int(denom)).floor();
        (num::traits::ToPrimitive::to_i64(lo.numer()).unwrap(), denom)
    };
    let (lo_x, _) = to_range(&min.x);
    let (hi_x, _) = to_range(&max.x);
    let (lo_y, _) = to_range(&min.y);
    let (hi_y, _) = to_range(&max.y);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let nx = rng.gen_range(lo_x..=hi_x) | 1;
        let ny = rng.gen_range(lo_y..=hi_y) | 1;
        let p = RatPoint::new(
            Rational::new(nx.into(), denom.into()),
            Rational::new(ny.into(), denom.into()),
        );
        if matches!(m.locate(&p), Located::Piece(_)) {
            out.push(p);
        }
    }
    out
}

/// Per-step worst exact L1 distance of sampled orbits to the two-point
/// vertex set {A, B} of the rhombus family.
#[derive(Clone, Debug)]
pub struct AttractorProfile {
    pub sample_count: usize,
    /// Orbits that hit the singular web before the full horizon.
    pub truncated: usize,
    /// `(step, max over surviving samples of d1(f^step x, {A, B}))`.
    pub steps: Vec<(usize, Rational)>,
}

pub fn attractor_profile(m: &PiecewiseMap, samples: usize, n: usize, seed: u64) -> AttractorProfile {
    assert!(samples >= 1 && n >= 1);
    let a = RatPoint::new(rat_int(0), rat_int(1));
    let b = RatPoint::new(rat_int(0), rat_int(-1));
    let starts = sample_points(m, samples, seed);
    let orbits: Vec<OrbitResult> = starts.par_iter().map(|x| orbit(m, x, n)).collect();
    let truncated = orbits.iter().filter(|o| o.status != OrbitStatus::Complete).count();
    let mut steps = Vec::with_capacity(n);
    for step in 1..=n {
        let max = orbits
            .par_iter()
            .filter(|o| o.points.len() > step)
            .map(|o| {
                let p = &o.points[step];
                distance_l1(p, &a).min(distance_l1(p, &b))
            })
            .reduce_with(|x, y| x.max(y));
        match max {
            Some(d) => steps.push((step, d)),
            None => break, // every orbit truncated before this step
        }
    }
    AttractorProfile { sample_count: samples, truncated, steps }
}

/// Norm growth rate of the exact product of visited linear parts:
/// `value = (1/n) ln ||L_{s_n} ... L_{s_1}||_1`, with the uniform bound
/// `(1/n) ln` of the piecewise Lipschitz constant.
#[derive(Clone, Debug)]
pub struct LyapunovEstimate {
    pub n: usize,
    pub value: f64,
    pub bound: f64,
}

pub fn lyapunov_estimate(m: &PiecewiseMap, x0: &RatPoint, n: usize) -> Result<LyapunovEstimate> {
    assert!(n >= 1);
    let o = orbit(m, x0, n);
    if o.status != OrbitStatus::Complete {
        let step = match o.status {
            OrbitStatus::HitSingular(s) | OrbitStatus::LeftDomain(s) => s,
            OrbitStatus::Complete => unreachable!(),
        };
        return Err(Error::OrbitTruncated { step });
    }
    let mut product = RatMatrix2::identity();
    for &s in &o.symbols.symbols {
        product = m.pieces()[s].map.linear.mul(&product);
    }
    let norm = product.operator_norm_l1();
    let lip = m.lipschitz_exact().unwrap_or_else(Rational::one);
    Ok(LyapunovEstimate {
        n,
        value: ln_rational(&norm) / n as f64,
        bound: ln_rational(&lip),
    })
}
