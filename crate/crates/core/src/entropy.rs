//! Entropy estimation machinery: the iterated (Bowen) distance, greedy
//! spanning and separated estimators over exact candidate grids, the explicit
//! dyadic-triangle cover, and consolidated growth-rate reports.
//!
//! Greedy covering is an upper-bound surrogate for the minimal spanning
//! cardinality; the entropy value depends only on the exponential growth
//! rate, which is what the reports fit.

use num::traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Location, Metric, RatPoint};
use crate::pwa::{build_rhombus, Located, PiecewiseMap};
use crate::rational::{rat, rat_int, rational_to_f64, Rational};
use crate::symbolic::{path_counts, transition_graph, DEFAULT_DEPTH_CAP};

/// Iterated distance between two orbits, reported as the metric comparison
/// key (true distance for L1/LINF, squared distance for L2).
#[derive(Clone, Debug)]
pub struct BowenDistanceResult {
    pub value: Rational,
    /// Number of iterate pairs actually compared; equals `n` when neither
    /// orbit hit the singularity set within the horizon.
    pub defined_up_to: usize,
}

/// First `n` orbit points `x, f x, ..., f^{n-1} x`, or `None` if the orbit
/// hits the singularity set (or leaves the domain) before that.
pub fn orbit_points(m: &PiecewiseMap, x: &RatPoint, n: usize) -> Option<Vec<RatPoint>> {
    let mut pts = Vec::with_capacity(n);
    let mut cur = x.clone();
    for step in 0..n {
        match m.locate(&cur) {
            Located::Piece(i) => {
                pts.push(cur.clone());
                if step + 1 < n {
                    cur = m.pieces()[i].map.apply(&cur);
                }
            }
            _ => return None,
        }
    }
    Some(pts)
}

/// `max_{0 <= i < n} d(f^i x, f^i y)`, exact, over the iterates that exist.
pub fn bowen_distance(m: &PiecewiseMap, x: &RatPoint, y: &RatPoint, n: usize) -> BowenDistanceResult {
    assert!(n >= 1);
    let metric = m.metric();
    let mut value = metric.key(x, y);
    let mut cx = x.clone();
    let mut cy = y.clone();
    let mut compared = 1;
    for _ in 1..n {
        let ix = m.locate(&cx);
        let iy = m.locate(&cy);
        let (Located::Piece(ix), Located::Piece(iy)) = (ix, iy) else { break };
        cx = m.pieces()[ix].map.apply(&cx);
        cy = m.pieces()[iy].map.apply(&cy);
        let k = metric.key(&cx, &cy);
        if k > value {
            value = k;
        }
        compared += 1;
    }
    BowenDistanceResult { value, defined_up_to: compared }
}

fn bowen_key_of_orbits(metric: Metric, a: &[RatPoint], b: &[RatPoint]) -> Rational {
    let mut best = metric.key(&a[0], &b[0]);
    for i in 1..a.len().min(b.len()) {
        let k = metric.key(&a[i], &b[i]);
        if k > best {
            best = k;
        }
    }
    best
}

/// All step keys <= `thr` (i.e. Bowen distance <= threshold), with early exit.
fn bowen_le(metric: Metric, a: &[RatPoint], b: &[RatPoint], thr: &Rational) -> bool {
    for i in 0..a.len().min(b.len()) {
        if metric.key(&a[i], &b[i]) > *thr {
            return false;
        }
    }
    true
}

/// Axis grid of pitch `mesh`, offset by `mesh/2` in both coordinates so no
/// candidate has a zero coordinate, filtered to the open domain interior.
/// Enumeration is lexicographic in (x, y).
pub fn grid_candidates(domain: &ConvexPolygon, mesh: &Rational) -> Vec<RatPoint> {
    assert!(mesh.is_positive());
    let (min, max) = domain.bounding_box();
    let half = mesh / rat_int(2);
    // smallest k with (k + 1/2) * mesh > min.x
    let start = |lo: &Rational| -> i64 {
        let k = (lo / mesh - rat(1, 2)).floor();
        num::traits::ToPrimitive::to_i64(k.numer()).expect("grid index fits i64")
    };
    let mut out = Vec::new();
    let mut kx = start(&min.x);
    loop {
        let x = rat_int(kx) * mesh + &half;
        if x > max.x {
            break;
        }
        let mut ky = start(&min.y);
        loop {
            let y = rat_int(ky) * mesh + &half;
            if y > max.y {
                break;
            }
            let p = RatPoint::new(x.clone(), y);
            if domain.locate(&p) == Location::Interior {
                out.push(p);
            }
            ky += 1;
        }
        kx += 1;
    }
    out
}

struct CandidateOrbits {
    /// Surviving candidates in grid order, each with its first n orbit points.
    orbits: Vec<(RatPoint, Vec<RatPoint>)>,
    candidate_count: usize,
    skipped_singular: usize,
}

fn candidate_orbits(m: &PiecewiseMap, n: usize, mesh: &Rational) -> Result<CandidateOrbits> {
    let grid = grid_candidates(m.domain(), mesh);
    if grid.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    let candidate_count = grid.len();
    let orbits: Vec<Option<(RatPoint, Vec<RatPoint>)>> = grid
        .into_par_iter()
        .map(|p| orbit_points(m, &p, n).map(|o| (p, o)))
        .collect();
    let skipped_singular = orbits.iter().filter(|o| o.is_none()).count();
    Ok(CandidateOrbits {
        orbits: orbits.into_iter().flatten().collect(),
        candidate_count,
        skipped_singular,
    })
}

/// Result of a greedy covering pass.
#[derive(Clone, Debug)]
pub struct SpanningEstimate {
    pub n: usize,
    pub epsilon: Rational,
    pub count: usize,
    pub centers: Vec<RatPoint>,
    pub candidate_count: usize,
    pub skipped_singular: usize,
    /// Max over candidates of the Bowen distance to the nearest center
    /// (only computed by the explicit dyadic cover).
    pub max_cover_radius: Option<f64>,
}

/// Result of a greedy packing pass.
#[derive(Clone, Debug)]
pub struct SeparatedEstimate {
    pub n: usize,
    pub epsilon: Rational,
    pub count: usize,
    pub points: Vec<RatPoint>,
    pub candidate_count: usize,
    pub skipped_singular: usize,
}

/// Greedy cover of the candidate grid by Bowen epsilon-balls, in
/// lexicographic candidate order: the first uncovered candidate becomes a
/// center and covers everything within Bowen distance epsilon. The returned
/// cover is re-verified post hoc against every surviving candidate.
pub fn greedy_spanning_estimate(
    m: &PiecewiseMap,
    n: usize,
    epsilon: &Rational,
    mesh: &Rational,
) -> Result<SpanningEstimate> {
    assert!(n >= 1 && epsilon.is_positive());
    let metric = m.metric();
    let thr = metric.threshold_key(epsilon);
    let cand = candidate_orbits(m, n, mesh)?;
    let orbits = &cand.orbits;

    let mut covered = vec![false; orbits.len()];
    let mut centers: Vec<usize> = Vec::new();
    for i in 0..orbits.len() {
        if covered[i] {
            continue;
        }
        centers.push(i);
        let center = &orbits[i].1;
        let newly: Vec<usize> = (i..orbits.len())
            .into_par_iter()
            .filter(|&j| !covered[j] && bowen_le(metric, center, &orbits[j].1, &thr))
            .collect();
        for j in newly {
            covered[j] = true;
        }
    }

    // post-hoc certificate: every candidate is within epsilon of a center
    let all_covered = orbits.par_iter().all(|(_, orbit)| {
        centers.iter().any(|&c| bowen_le(metric, &orbits[c].1, orbit, &thr))
    });
    if !all_covered {
        return Err(Error::CertificateFailure("greedy cover misses a candidate".into()));
    }

    Ok(SpanningEstimate {
        n,
        epsilon: epsilon.clone(),
        count: centers.len(),
        centers: centers.iter().map(|&i| orbits[i].0.clone()).collect(),
        candidate_count: cand.candidate_count,
        skipped_singular: cand.skipped_singular,
        max_cover_radius: None,
    })
}

/// Greedy packing over the same candidate grid: accept a candidate iff its
/// Bowen distance to every accepted point exceeds epsilon. All pairwise
/// separations are re-verified exactly.
pub fn greedy_separated_estimate(
    m: &PiecewiseMap,
    n: usize,
    epsilon: &Rational,
    mesh: &Rational,
) -> Result<SeparatedEstimate> {
    assert!(n >= 1 && epsilon.is_positive());
    let metric = m.metric();
    let thr = metric.threshold_key(epsilon);
    let cand = candidate_orbits(m, n, mesh)?;

    let mut accepted: Vec<usize> = Vec::new();
    for i in 0..cand.orbits.len() {
        let orbit = &cand.orbits[i].1;
        let blocked = accepted
            .par_iter()
            .any(|&j| bowen_le(metric, &cand.orbits[j].1, orbit, &thr));
        if !blocked {
            accepted.push(i);
        }
    }

    // post-hoc certificate: all pairs separated by more than epsilon
    let pairs_ok = accepted.par_iter().enumerate().all(|(idx, &i)| {
        accepted[idx + 1..]
            .iter()
            .all(|&j| !bowen_le(metric, &cand.orbits[i].1, &cand.orbits[j].1, &thr))
    });
    if !pairs_ok {
        return Err(Error::CertificateFailure("separated set has a close pair".into()));
    }

    Ok(SeparatedEstimate {
        n,
        epsilon: epsilon.clone(),
        count: accepted.len(),
        points: accepted.iter().map(|&i| cand.orbits[i].0.clone()).collect(),
        candidate_count: cand.candidate_count,
        skipped_singular: cand.skipped_singular,
    })
}

/// The explicit cover from the dyadic-triangle argument: split CD into 2^n
/// equal intervals, take the 2^{n+1} triangles with apex A or B, and place
/// `centers_per_triangle` centers on each median from the apex to the
/// midpoint of the base interval, at parameters (2j-1)/(2k). Spanning at
/// radius epsilon is verified empirically on a mesh-1/128 candidate grid.
pub fn paper_cover(
    t: &Rational,
    n: usize,
    epsilon: &Rational,
    centers_per_triangle: usize,
) -> Result<SpanningEstimate> {
    paper_cover_with_cap(t, n, epsilon, centers_per_triangle, DEFAULT_DEPTH_CAP)
}

pub fn paper_cover_with_cap(
    t: &Rational,
    n: usize,
    epsilon: &Rational,
    centers_per_triangle: usize,
    cap: usize,
) -> Result<SpanningEstimate> {
    assert!(centers_per_triangle >= 1 && epsilon.is_positive());
    if n > cap {
        return Err(Error::DepthCapExceeded { requested: n, cap });
    }
    let m = build_rhombus(t)?;
    let metric = m.metric();
    let thr = metric.threshold_key(epsilon);

    // centers on the medians of the dyadic triangles
    let a = RatPoint::new(rat_int(0), rat_int(1));
    let b = RatPoint::new(rat_int(0), rat_int(-1));
    let step = rat_int(2) / rat_int(1i64 << n);
    let mut centers: Vec<RatPoint> = Vec::with_capacity(centers_per_triangle << (n + 1));
    for i in 0..(1usize << n) {
        let zi = rat_int(-1) + rat_int(i as i64) * &step;
        let zj = rat_int(-1) + rat_int(i as i64 + 1) * &step;
        let mid = RatPoint::new((&zi + &zj) / rat_int(2), rat_int(0));
        for apex in [&a, &b] {
            for j in 1..=centers_per_triangle {
                let lam = rat(2 * j as i64 - 1, 2 * centers_per_triangle as i64);
                centers.push(apex.add(&mid.sub(apex).scale(&lam)));
            }
        }
    }
    let center_orbits: Vec<Vec<RatPoint>> = centers
        .iter()
        .map(|c| orbit_points(&m, c, n).ok_or(Error::OrbitTruncated { step: 0 }))
        .collect::<Result<_>>()?;
    let approx_centers: Vec<(f64, f64)> = centers.iter().map(|c| c.to_f64()).collect();

    let mesh = rat(1, 128);
    let cand = candidate_orbits(&m, n, &mesh)?;

    // The step-0 key is a lower bound for the Bowen key, so centers whose
    // float step-0 distance already exceeds the running best (plus a slack
    // dwarfing any f64 rounding at these magnitudes) cannot attain the min.
    const FLOAT_SLACK: f64 = 1e-6;

    // exact min over centers of the Bowen distance, per candidate
    let mins: Vec<Rational> = cand
        .orbits
        .par_iter()
        .map(|(p, orbit)| {
            let (px, py) = p.to_f64();
            let mut order: Vec<(usize, f64)> = approx_centers
                .iter()
                .enumerate()
                .map(|(i, (cx, cy))| {
                    let d0 = match metric {
                        Metric::L1 => (px - cx).abs() + (py - cy).abs(),
                        Metric::Linf => (px - cx).abs().max((py - cy).abs()),
                        Metric::L2 => (px - cx).powi(2) + (py - cy).powi(2),
                    };
                    (i, d0)
                })
                .collect();
            order.sort_by(|a, b| a.1.total_cmp(&b.1));
            let mut best = bowen_key_of_orbits(metric, &center_orbits[order[0].0], orbit);
            let mut best_f64 = rational_to_f64(&best);
            for &(i, d0) in &order[1..] {
                if d0 > best_f64 + FLOAT_SLACK {
                    break; // every remaining center starts even farther away
                }
                let corbit = &center_orbits[i];
                // running max can only grow; prune as soon as it reaches best
                let mut running = Rational::zero();
                let mut pruned = false;
                for s in 0..orbit.len().min(corbit.len()) {
                    let k = metric.key(&corbit[s], &orbit[s]);
                    if k > running {
                        running = k;
                    }
                    if running >= best {
                        pruned = true;
                        break;
                    }
                }
                if !pruned && running < best {
                    best = running;
                    best_f64 = rational_to_f64(&best);
                }
            }
            best
        })
        .collect();

    let mut max_radius = Rational::zero();
    let mut worst: Option<(&RatPoint, &Rational)> = None;
    for ((p, _), min) in cand.orbits.iter().zip(&mins) {
        if *min > max_radius {
            max_radius = min.clone();
        }
        if *min > thr {
            let replace = match worst {
                None => true,
                Some((_, w)) => min > w,
            };
            if replace {
                worst = Some((p, min));
            }
        }
    }
    if let Some((p, min)) = worst {
        let gap = metric.key_to_distance(rational_to_f64(min))
            - metric.key_to_distance(rational_to_f64(&thr));
        return Err(Error::CoverageFailure { candidate: p.clone(), gap });
    }

    Ok(SpanningEstimate {
        n,
        epsilon: epsilon.clone(),
        count: centers.len(),
        centers,
        candidate_count: cand.candidate_count,
        skipped_singular: cand.skipped_singular,
        max_cover_radius: Some(metric.key_to_distance(rational_to_f64(&max_radius))),
    })
}

// ---------------------------------------------------------------------------
// Consolidated reports
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Cells,
    Transition,
    Spanning,
    Separated,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Cells => "cells",
            Method::Transition => "transition",
            Method::Spanning => "spanning",
            Method::Separated => "separated",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cells" => Ok(Method::Cells),
            "transition" => Ok(Method::Transition),
            "spanning" => Ok(Method::Spanning),
            "separated" => Ok(Method::Separated),
            other => Err(Error::ParameterOutOfRange(format!("unknown method {other:?}"))),
        }
    }
}

/// Count sequence of one estimator with both growth-rate fits.
#[derive(Clone, Debug)]
pub struct MethodSeries {
    pub method: Method,
    pub counts: Vec<(usize, u64)>,
    /// Successive-ratio rates `ln(count(n) / count(n-1))`, keyed by n.
    pub successive: Vec<(usize, f64)>,
    /// Least-squares slope of `ln count` against n.
    pub slope: f64,
    /// RMS residual of the least-squares fit.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct EntropyReport {
    pub n_max: usize,
    pub epsilon: Rational,
    pub mesh: Rational,
    pub metric: Metric,
    pub series: Vec<MethodSeries>,
    /// Spectral radius of the transition graph, when that method ran.
    pub spectral_radius: Option<f64>,
}

/// Successive-ratio rates plus the least-squares slope/residual of
/// `ln count` against depth.
pub fn fit_rates(counts: &[(usize, u64)]) -> (Vec<(usize, f64)>, f64, f64) {
    let mut successive = Vec::new();
    for w in counts.windows(2) {
        let (_, c0) = w[0];
        let (n1, c1) = w[1];
        successive.push((n1, (c1 as f64 / c0 as f64).ln()));
    }
    let pts: Vec<(f64, f64)> = counts.iter().map(|&(n, c)| (n as f64, (c as f64).ln())).collect();
    let len = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let sxx: f64 = pts.iter().map(|&(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|&(x, y)| x * y).sum();
    let denom = len * sxx - sx * sx;
    let slope = if denom.abs() < f64::EPSILON { 0.0 } else { (len * sxy - sx * sy) / denom };
    let intercept = (sy - slope * sx) / len;
    let sse: f64 = pts.iter().map(|&(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let residual = (sse / len).sqrt();
    (successive, slope, residual)
}

/// Runs the selected estimators to depth `n_max` and fits growth rates.
pub fn entropy_report(
    m: &PiecewiseMap,
    n_max: usize,
    epsilon: &Rational,
    mesh: &Rational,
    methods: &[Method],
) -> Result<EntropyReport> {
    let mut series = Vec::new();
    let mut spectral_radius = None;
    for &method in methods {
        let counts: Vec<(usize, u64)> = match method {
            Method::Cells => crate::symbolic::cell_counts(m, n_max)?,
            Method::Transition => {
                let g = transition_graph(m);
                spectral_radius = Some(g.spectral_radius);
                path_counts(&g, n_max)
            }
            Method::Spanning => (1..=n_max)
                .map(|n| Ok((n, greedy_spanning_estimate(m, n, epsilon, mesh)?.count as u64)))
                .collect::<Result<_>>()?,
            Method::Separated => (1..=n_max)
                .map(|n| Ok((n, greedy_separated_estimate(m, n, epsilon, mesh)?.count as u64)))
                .collect::<Result<_>>()?,
        };
        let (successive, mut slope, residual) = fit_rates(&counts);
        if method == Method::Transition {
            // the subshift's natural rate is log of the spectral radius
            slope = spectral_radius.unwrap().ln();
        }
        series.push(MethodSeries { method, counts, successive, slope, residual });
    }
    Ok(EntropyReport {
        n_max,
        epsilon: epsilon.clone(),
        mesh: mesh.clone(),
        metric: m.metric(),
        series,
        spectral_radius,
    })
}
