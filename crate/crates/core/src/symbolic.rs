//! Symbolic dynamics over the cell partition: itineraries, exact refined
//! partitions by polygon pullback, the dyadic-triangle cross-check, the
//! transition subshift, and multiplicity counts.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Location, RatPoint};
use crate::pwa::{build_rhombus, Located, PiecewiseMap};
use crate::rational::{rat, rat_int, Rational};

/// Default bound on refinement depth. Rational coordinate bit-length grows
/// linearly with depth, and cell counts can grow exponentially.
pub const DEFAULT_DEPTH_CAP: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ItineraryStatus {
    Complete,
    /// The orbit hit the singularity set (or left the domain) at this step.
    TruncatedAtSingular(usize),
}

/// Symbol sequence of the cells visited by an orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Itinerary {
    pub symbols: Vec<usize>,
    pub status: ItineraryStatus,
}

/// Symbols of `x, f x, ..., f^{n-1} x`, truncating at the first point that
/// is singular or outside.
pub fn itinerary(m: &PiecewiseMap, x: &RatPoint, n: usize) -> Itinerary {
    assert!(n >= 1, "itinerary depth must be at least 1");
    let mut symbols = Vec::with_capacity(n);
    let mut cur = x.clone();
    for step in 0..n {
        match m.locate(&cur) {
            Located::Piece(i) => {
                symbols.push(i);
                if step + 1 < n {
                    cur = m.pieces()[i].map.apply(&cur);
                }
            }
            Located::Singular | Located::Outside => {
                return Itinerary { symbols, status: ItineraryStatus::TruncatedAtSingular(step) };
            }
        }
    }
    Itinerary { symbols, status: ItineraryStatus::Complete }
}

/// One positive-area cell of a refined partition, with its itinerary.
#[derive(Clone, Debug)]
pub struct RefinedCell {
    pub itinerary: Vec<usize>,
    pub polygon: ConvexPolygon,
}

/// The depth-n common refinement of the cell partition with its pullbacks:
/// cells are `cell(s0) ∩ f^{-1} cell(s1) ∩ ... ∩ f^{-(n-1)} cell(s_{n-1})`,
/// enumerated in lexicographic itinerary order.
#[derive(Clone, Debug)]
pub struct RefinedPartition {
    pub depth: usize,
    pub cells: Vec<RefinedCell>,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::DepthCapExceeded { requested: n, cap });
    }
    Ok(())
}

/// All partitions of depth 1..=n_max, built incrementally by exact pullback.
pub fn refine_levels_with_cap(
    m: &PiecewiseMap,
    n_max: usize,
    cap: usize,
) -> Result<Vec<RefinedPartition>> {
    assert!(n_max >= 1);
    check_cap(n_max, cap)?;
    let inverses: Vec<_> = m
        .pieces()
        .iter()
        .map(|p| p.map.invert().expect("piece maps are invertible by construction"))
        .collect();

    let mut levels: Vec<RefinedPartition> = Vec::with_capacity(n_max);
    let depth1: Vec<RefinedCell> = m
        .pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| RefinedCell { itinerary: vec![i], polygon: p.cell.clone() })
        .collect();
    levels.push(RefinedPartition { depth: 1, cells: depth1 });

    for depth in 2..=n_max {
        let prev = &levels.last().unwrap().cells;
        // cell(i, s) = cell_i ∩ f_i^{-1}(cell(s)); parallel over parents,
        // order restored by the lexicographic sort below
        let mut cells: Vec<RefinedCell> = (0..m.pieces().len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let piece_cell = &m.pieces()[i].cell;
                let inv = &inverses[i];
                prev.iter().filter_map(move |parent| {
                    let pulled = parent.polygon.transform(inv).ok()?;
                    let cell = piece_cell.intersect(&pulled)?;
                    let mut itin = Vec::with_capacity(parent.itinerary.len() + 1);
                    itin.push(i);
                    itin.extend_from_slice(&parent.itinerary);
                    Some(RefinedCell { itinerary: itin, polygon: cell })
                })
            })
            .collect();
        cells.sort_by(|a, b| a.itinerary.cmp(&b.itinerary));
        levels.push(RefinedPartition { depth, cells });
    }
    Ok(levels)
}

pub fn refine_partition_with_cap(m: &PiecewiseMap, n: usize, cap: usize) -> Result<RefinedPartition> {
    Ok(refine_levels_with_cap(m, n, cap)?.pop().unwrap())
}

pub fn refine_partition(m: &PiecewiseMap, n: usize) -> Result<RefinedPartition> {
    refine_partition_with_cap(m, n, DEFAULT_DEPTH_CAP)
}

/// Number of positive-area cells at each depth 1..=n_max.
pub fn cell_counts(m: &PiecewiseMap, n_max: usize) -> Result<Vec<(usize, u64)>> {
    cell_counts_with_cap(m, n_max, DEFAULT_DEPTH_CAP)
}

pub fn cell_counts_with_cap(m: &PiecewiseMap, n_max: usize, cap: usize) -> Result<Vec<(usize, u64)>> {
    let levels = refine_levels_with_cap(m, n_max, cap)?;
    Ok(levels.iter().map(|l| (l.depth, l.cells.len() as u64)).collect())
}

/// Checks that the depth-n cell closures of the rhombus map at parameter `t`
/// are exactly the 2^{n+1} dyadic triangles: split CD into 2^n equal
/// intervals Z_i Z_{i+1} and take the triangles with apex A and apex B.
pub fn dyadic_crosscheck(t: &Rational, n: usize) -> Result<bool> {
    dyadic_crosscheck_with_cap(t, n, DEFAULT_DEPTH_CAP)
}

pub fn dyadic_crosscheck_with_cap(t: &Rational, n: usize, cap: usize) -> Result<bool> {
    check_cap(n, cap)?;
    let m = build_rhombus(t)?;
    let part = refine_partition_with_cap(&m, n, cap)?;

    let a = RatPoint::new(rat_int(0), rat_int(1));
    let b = RatPoint::new(rat_int(0), rat_int(-1));
    let step = rat(2, 1) / rat_int(1 << n);
    let mut expected: HashSet<ConvexPolygon> = HashSet::new();
    for i in 0..(1usize << n) {
        let zi = RatPoint::new(rat_int(-1) + rat_int(i as i64) * &step, rat_int(0));
        let zj = RatPoint::new(rat_int(-1) + rat_int(i as i64 + 1) * &step, rat_int(0));
        expected.insert(ConvexPolygon::triangle(a.clone(), zi.clone(), zj.clone())?);
        expected.insert(ConvexPolygon::triangle(b.clone(), zi, zj)?);
    }

    if part.cells.len() != expected.len() {
        return Ok(false);
    }
    let actual: HashSet<ConvexPolygon> = part.cells.iter().map(|c| c.polygon.clone()).collect();
    Ok(actual == expected)
}

/// Piece-to-piece transition structure: `adjacency[i][j]` iff the image of
/// cell i overlaps cell j with positive area. The spectral radius of the
/// 0/1 matrix bounds the itinerary growth rate from above.
#[derive(Clone, Debug)]
pub struct TransitionGraph {
    pub labels: Vec<String>,
    pub adjacency: Vec<Vec<bool>>,
    pub spectral_radius: f64,
}

pub fn transition_graph(m: &PiecewiseMap) -> TransitionGraph {
    let k = m.pieces().len();
    let images: Vec<ConvexPolygon> = m
        .pieces()
        .iter()
        .map(|p| p.cell.transform(&p.map).expect("piece image is a valid polygon"))
        .collect();
    let adjacency: Vec<Vec<bool>> = (0..k)
        .map(|i| (0..k).map(|j| images[i].intersect(&m.pieces()[j].cell).is_some()).collect())
        .collect();
    let spectral_radius = power_iteration(&adjacency);
    TransitionGraph {
        labels: m.pieces().iter().map(|p| p.id.label.clone()).collect(),
        adjacency,
        spectral_radius,
    }
}

/// Power iteration on the 0/1 matrix, run to residual <= 1e-10.
fn power_iteration(adj: &[Vec<bool>]) -> f64 {
    let k = adj.len();
    if k == 0 {
        return 0.0;
    }
    let mut v = vec![1.0f64; k];
    let mut rho = 0.0;
    for _ in 0..100_000 {
        let mut w = vec![0.0f64; k];
        for i in 0..k {
            for j in 0..k {
                if adj[i][j] {
                    w[i] += v[j];
                }
            }
        }
        let norm: f64 = w.iter().map(|x| x.abs()).sum();
        if norm == 0.0 {
            return 0.0; // nilpotent
        }
        rho = norm / v.iter().map(|x| x.abs()).sum::<f64>();
        for x in &mut w {
            *x /= norm;
        }
        let residual: f64 = (0..k)
            .map(|i| {
                let mut aw = 0.0;
                for j in 0..k {
                    if adj[i][j] {
                        aw += w[j];
                    }
                }
                (aw - rho * w[i]).abs()
            })
            .fold(0.0, f64::max);
        v = w;
        if residual <= 1e-10 {
            break;
        }
    }
    rho
}

/// Number of length-n paths (vertex sequences) in the transition graph for
/// n = 1..=n_max, via exact integer matrix powers.
pub fn path_counts(g: &TransitionGraph, n_max: usize) -> Vec<(usize, u64)> {
    let k = g.labels.len();
    let mut reach: Vec<u128> = vec![1; k]; // paths of remaining length 1 from each vertex
    let mut out = Vec::with_capacity(n_max);
    out.push((1, k as u64));
    for n in 2..=n_max {
        let next: Vec<u128> = (0..k)
            .map(|i| (0..k).filter(|&j| g.adjacency[i][j]).map(|j| reach[j]).sum())
            .collect();
        reach = next;
        let total: u128 = reach.iter().sum();
        out.push((n, total as u64));
    }
    out
}

/// All length-n vertex sequences realized as paths in the graph.
pub fn enumerate_paths(g: &TransitionGraph, n: usize) -> Vec<Vec<usize>> {
    let k = g.labels.len();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    while let Some(path) = stack.pop() {
        if path.len() == n {
            out.push(path);
            continue;
        }
        let last = *path.last().unwrap();
        for j in 0..k {
            if g.adjacency[last][j] {
                let mut p = path.clone();
                p.push(j);
                stack.push(p);
            }
        }
    }
    out.sort();
    out
}

/// Per-depth maximum number of closed refined cells sharing a common point,
/// maximized over cell vertices, with an exact incidence witness.
#[derive(Clone, Debug)]
pub struct MultiplicityRecord {
    pub depth: usize,
    pub max_multiplicity: usize,
    pub witness: RatPoint,
}

pub fn multiplicity_profile(m: &PiecewiseMap, n_max: usize) -> Result<Vec<MultiplicityRecord>> {
    multiplicity_profile_with_cap(m, n_max, DEFAULT_DEPTH_CAP)
}

pub fn multiplicity_profile_with_cap(
    m: &PiecewiseMap,
    n_max: usize,
    cap: usize,
) -> Result<Vec<MultiplicityRecord>> {
    let levels = refine_levels_with_cap(m, n_max, cap)?;
    Ok(levels.iter().map(|level| multiplicity_of_level(level, m.domain())).collect())
}

fn multiplicity_of_level(level: &RefinedPartition, domain: &ConvexPolygon) -> MultiplicityRecord {
    // distinct vertices of the level
    let mut vertices: HashMap<RatPoint, usize> = HashMap::new();
    for cell in &level.cells {
        for v in cell.polygon.vertices() {
            vertices.entry(v.clone()).or_insert(0);
        }
    }
    let keys: Vec<RatPoint> = vertices.into_keys().collect();
    let counts: Vec<usize> = keys
        .par_iter()
        .map(|v| {
            level
                .cells
                .iter()
                .filter(|c| c.polygon.locate(v) != Location::Outside)
                .count()
        })
        .collect();
    // deterministic witness: ties prefer corners of the base domain (the
    // structurally meaningful accumulation points), then lex order
    let rank = |v: &RatPoint| usize::from(domain.vertices().contains(v));
    let mut best: Option<(usize, &RatPoint)> = None;
    for (v, &c) in keys.iter().zip(&counts) {
        best = Some(match best {
            None => (c, v),
            Some((bc, bv)) => {
                let better = c > bc
                    || (c == bc && rank(v) > rank(bv))
                    || (c == bc && rank(v) == rank(bv) && v.lex_le(bv) && v != bv);
                if better { (c, v) } else { (bc, bv) }
            }
        });
    }
    let (max_multiplicity, witness) = best.expect("partition has at least one cell");
    MultiplicityRecord { depth: level.depth, max_multiplicity, witness: witness.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AffineMap2, Metric, RatMatrix2};
    use crate::pwa::{Piece, PieceId};

    fn half() -> PiecewiseMap {
        build_rhombus(&rat(1, 2)).unwrap()
    }

    #[test]
    fn itinerary_example() {
        let m = half();
        let it = itinerary(&m, &RatPoint::new(rat(-1, 2), rat(1, 4)), 3);
        assert_eq!(it.status, ItineraryStatus::Complete);
        assert_eq!(it.symbols, vec![0, 0, 1]); // ACO, ACO, ADO
    }

    #[test]
    fn itinerary_truncates_at_singular_start() {
        let m = half();
        let it = itinerary(&m, &RatPoint::origin(), 5);
        assert_eq!(it.status, ItineraryStatus::TruncatedAtSingular(0));
        assert!(it.symbols.is_empty());
    }

    #[test]
    fn cell_counts_double() {
        let m = half();
        let counts = cell_counts(&m, 5).unwrap();
        assert_eq!(counts, vec![(1, 4), (2, 8), (3, 16), (4, 32), (5, 64)]);
        let quarter = build_rhombus(&rat(1, 4)).unwrap();
        assert_eq!(cell_counts(&quarter, 5).unwrap(), counts);
    }

    #[test]
    fn depth_cap_enforced() {
        let m = half();
        assert!(matches!(
            refine_partition(&m, DEFAULT_DEPTH_CAP + 1),
            Err(Error::DepthCapExceeded { .. })
        ));
    }

    #[test]
    fn dyadic_triangles_match() {
        assert!(dyadic_crosscheck(&rat(1, 2), 1).unwrap());
        assert!(dyadic_crosscheck(&rat(1, 2), 3).unwrap());
        assert!(dyadic_crosscheck(&rat(1, 4), 3).unwrap());
    }

    #[test]
    fn dyadic_crosscheck_rejects_wrong_grid() {
        // depth-n cells against the 2^{n+1}-interval grid must fail
        let m = half();
        let part = refine_partition(&m, 2).unwrap();
        // expected set for n=3 has 16 triangles, partition depth 2 has 8
        let a = RatPoint::new(rat_int(0), rat_int(1));
        let b = RatPoint::new(rat_int(0), rat_int(-1));
        let step = rat(2, 8);
        let mut expected: HashSet<ConvexPolygon> = HashSet::new();
        for i in 0..8usize {
            let zi = RatPoint::new(rat_int(-1) + rat_int(i as i64) * &step, rat_int(0));
            let zj = RatPoint::new(rat_int(-1) + rat_int(i as i64 + 1) * &step, rat_int(0));
            expected.insert(ConvexPolygon::triangle(a.clone(), zi.clone(), zj.clone()).unwrap());
            expected.insert(ConvexPolygon::triangle(b.clone(), zi, zj).unwrap());
        }
        let actual: HashSet<ConvexPolygon> = part.cells.iter().map(|c| c.polygon.clone()).collect();
        assert_ne!(actual, expected);
    }

    #[test]
    fn transition_graph_of_rhombus() {
        let g = transition_graph(&half());
        let t = |b: &[u8]| b.iter().map(|&x| x == 1).collect::<Vec<_>>();
        assert_eq!(
            g.adjacency,
            vec![t(&[1, 1, 0, 0]), t(&[0, 0, 1, 1]), t(&[1, 1, 0, 0]), t(&[0, 0, 1, 1])]
        );
        assert!((g.spectral_radius - 2.0).abs() < 1e-9);
        assert_eq!(path_counts(&g, 4), vec![(1, 4), (2, 8), (3, 16), (4, 32)]);
    }

    #[test]
    fn single_piece_identity_graph() {
        // identity on the unit square: one cell, self-loop, rho = 1
        let square = ConvexPolygon::new(vec![
            RatPoint::new(rat_int(0), rat_int(0)),
            RatPoint::new(rat_int(1), rat_int(0)),
            RatPoint::new(rat_int(1), rat_int(1)),
            RatPoint::new(rat_int(0), rat_int(1)),
        ])
        .unwrap();
        let piece = Piece {
            cell: square.clone(),
            map: AffineMap2::identity(),
            id: PieceId { index: 0, label: "ID".into() },
        };
        let m = PiecewiseMap::new(square, vec![piece], Metric::L1).unwrap();
        let g = transition_graph(&m);
        assert_eq!(g.adjacency, vec![vec![true]]);
        assert!((g.spectral_radius - 1.0).abs() < 1e-10);
        assert_eq!(cell_counts(&m, 4).unwrap(), vec![(1, 1), (2, 1), (3, 1), (4, 1)]);
        let prof = multiplicity_profile(&m, 1).unwrap();
        assert_eq!(prof[0].max_multiplicity, 1);
    }

    #[test]
    fn strictly_inward_map_has_diagonal_graph() {
        // x -> x/2 + 1/4 on the unit square keeps the image inside the cell
        let square = ConvexPolygon::new(vec![
            RatPoint::new(rat_int(0), rat_int(0)),
            RatPoint::new(rat_int(1), rat_int(0)),
            RatPoint::new(rat_int(1), rat_int(1)),
            RatPoint::new(rat_int(0), rat_int(1)),
        ])
        .unwrap();
        let map = AffineMap2::new(
            RatMatrix2::new(rat(1, 2), rat_int(0), rat_int(0), rat(1, 2)),
            RatPoint::new(rat(1, 4), rat(1, 4)),
        );
        let piece = Piece { cell: square.clone(), map, id: PieceId { index: 0, label: "IN".into() } };
        let m = PiecewiseMap::new(square, vec![piece], Metric::L1).unwrap();
        let g = transition_graph(&m);
        assert_eq!(g.adjacency, vec![vec![true]]);
        assert!((g.spectral_radius - 1.0).abs() < 1e-10);
    }

    #[test]
    fn multiplicity_examples() {
        let m = half();
        let prof = multiplicity_profile(&m, 3).unwrap();
        assert_eq!(prof[0].max_multiplicity, 4);
        assert_eq!(prof[0].witness, RatPoint::origin()); // all four triangles meet at O
        // from depth 2 on the apexes tie or beat every interior base point,
        // and the tie-break reports the apex
        for rec in &prof[1..] {
            assert_eq!(rec.max_multiplicity, 1 << rec.depth);
            assert_eq!(rec.witness.x, rat_int(0));
            assert!(rec.witness.y == rat_int(1) || rec.witness.y == rat_int(-1));
        }
    }

    #[test]
    fn partition_cells_match_centroid_itineraries() {
        let m = half();
        for level in refine_levels_with_cap(&m, 5, DEFAULT_DEPTH_CAP).unwrap() {
            for cell in &level.cells {
                let it = itinerary(&m, &cell.polygon.interior_point(), level.depth);
                assert_eq!(it.status, ItineraryStatus::Complete);
                assert_eq!(it.symbols, cell.itinerary);
            }
        }
    }
}
