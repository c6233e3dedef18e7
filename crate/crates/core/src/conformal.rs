//! Contrast experiments: a piecewise affine *conformal* contraction run
//! through the same estimator battery as the rhombus map. Conformal pieces
//! keep every Bowen ball round, and the measured entropy rates collapse to
//! zero, unlike the rhombus map's log 2.

use num::traits::One;

use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, ConvexPolygon, Metric, RatMatrix2, RatPoint};
use crate::pwa::{build_rhombus, Piece, PieceId, PiecewiseMap};
use crate::rational::{rat, rat_int, Rational};
use crate::symbolic::{cell_counts_with_cap, transition_graph};

/// One experiment: a map, the rate it is expected to exhibit, and the
/// tolerance the verdict is tested at.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub name: String,
    pub map: PiecewiseMap,
    pub claims_conformal: bool,
    pub expected_rate: f64,
    pub depth: usize,
    pub tolerance: f64,
}

/// Measured outcome of one experiment.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub name: String,
    pub all_conformal: bool,
    pub scale_sq: Vec<Option<Rational>>,
    pub cell_counts: Vec<(usize, u64)>,
    /// Successive cell-count rate at the final depth.
    pub final_rate: f64,
    pub spectral_radius: f64,
    pub expected_rate: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct ContrastReport {
    pub depth: usize,
    pub experiments: Vec<ExperimentResult>,
}

/// Unit square split by x = 1/2 into two cells; each piece is the 3-4-5
/// rational rotation scaled by 5/8 (linear part [[3/8,-1/2],[1/2,3/8]],
/// conformal with scale_sq 25/64) plus a translation keeping the image
/// inside the square. Containment is checked exactly at build time.
pub fn builtin_conformal_map() -> Result<PiecewiseMap> {
    let linear = RatMatrix2::new(rat(3, 8), rat(-1, 2), rat(1, 2), rat(3, 8));
    let square = ConvexPolygon::new(vec![
        RatPoint::new(rat_int(0), rat_int(0)),
        RatPoint::new(rat_int(1), rat_int(0)),
        RatPoint::new(rat_int(1), rat_int(1)),
        RatPoint::new(rat_int(0), rat_int(1)),
    ])?;
    let left = ConvexPolygon::new(vec![
        RatPoint::new(rat_int(0), rat_int(0)),
        RatPoint::new(rat(1, 2), rat_int(0)),
        RatPoint::new(rat(1, 2), rat_int(1)),
        RatPoint::new(rat_int(0), rat_int(1)),
    ])?;
    let right = ConvexPolygon::new(vec![
        RatPoint::new(rat(1, 2), rat_int(0)),
        RatPoint::new(rat_int(1), rat_int(0)),
        RatPoint::new(rat_int(1), rat_int(1)),
        RatPoint::new(rat(1, 2), rat_int(1)),
    ])?;
    let pieces = vec![
        Piece {
            cell: left,
            map: AffineMap2::new(linear.clone(), RatPoint::new(rat(1, 2), rat(1, 8))),
            id: PieceId { index: 0, label: "LEFT".into() },
        },
        Piece {
            cell: right,
            map: AffineMap2::new(linear, RatPoint::new(rat(5, 8), rat_int(0))),
            id: PieceId { index: 1, label: "RIGHT".into() },
        },
    ];
    for piece in &pieces {
        let image = piece.cell.transform(&piece.map)?;
        if !square.contains_polygon(&image) {
            return Err(Error::ContainmentFailure(format!(
                "image of cell {} leaves the unit square",
                piece.id.label
            )));
        }
    }
    PiecewiseMap::new(square, pieces, Metric::L1)
}

fn run_experiment(spec: &ExperimentSpec, cap: usize) -> Result<ExperimentResult> {
    let conf = spec.map.conformality_report();
    let all_conformal = conf.iter().all(|c| c.conformal);
    if spec.claims_conformal {
        // re-validate the claim from the map data before measuring anything
        if !all_conformal {
            return Err(Error::InvariantViolation(format!(
                "experiment {} claims conformality but a piece fails L^T L = s^2 I",
                spec.name
            )));
        }
        for c in &conf {
            if c.scale_sq.as_ref().unwrap() > &Rational::one() {
                return Err(Error::InvariantViolation(format!(
                    "experiment {} claims contraction but scale_sq > 1",
                    spec.name
                )));
            }
        }
    }
    let counts = cell_counts_with_cap(&spec.map, spec.depth, cap)?;
    let (last_n, last_c) = counts[counts.len() - 1];
    let final_rate = if counts.len() >= 2 {
        let (_, prev_c) = counts[counts.len() - 2];
        (last_c as f64 / prev_c as f64).ln()
    } else {
        let _ = last_n;
        0.0
    };
    let g = transition_graph(&spec.map);
    let pass = (final_rate - spec.expected_rate).abs() <= spec.tolerance;
    Ok(ExperimentResult {
        name: spec.name.clone(),
        all_conformal,
        scale_sq: conf.into_iter().map(|c| c.scale_sq).collect(),
        cell_counts: counts,
        final_rate,
        spectral_radius: g.spectral_radius,
        expected_rate: spec.expected_rate,
        tolerance: spec.tolerance,
        pass,
    })
}

/// Runs the built-in conformal contraction and the t=1/2 rhombus map to the
/// given depth and reports their measured rates side by side.
pub fn run_contrast(depth: usize) -> Result<ContrastReport> {
    run_contrast_with_cap(depth, crate::symbolic::DEFAULT_DEPTH_CAP)
}

pub fn run_contrast_with_cap(depth: usize, cap: usize) -> Result<ContrastReport> {
    let specs = [
        ExperimentSpec {
            name: "conformal".into(),
            map: builtin_conformal_map()?,
            claims_conformal: true,
            expected_rate: 0.0,
            depth,
            tolerance: 0.05,
        },
        ExperimentSpec {
            name: "rhombus".into(),
            map: build_rhombus(&rat(1, 2))?,
            claims_conformal: false,
            expected_rate: std::f64::consts::LN_2,
            depth,
            tolerance: 1e-9,
        },
    ];
    let experiments = specs
        .iter()
        .map(|s| run_experiment(s, cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(ContrastReport { depth, experiments })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformal_map_certificates() {
        let m = builtin_conformal_map().unwrap();
        for c in m.conformality_report() {
            assert!(c.conformal);
            assert_eq!(c.scale_sq.unwrap(), rat(25, 64));
        }
        // l1 norm of the linear part exceeds the conformal scale 5/8
        assert_eq!(m.lipschitz_exact().unwrap(), rat(7, 8));
    }

    #[test]
    fn conformal_images_stay_inside() {
        let m = builtin_conformal_map().unwrap();
        for p in m.pieces() {
            let image = p.cell.transform(&p.map).unwrap();
            assert!(m.domain().contains_polygon(&image));
        }
    }

    #[test]
    fn contrast_small_depth() {
        let report = run_contrast(6).unwrap();
        let conformal = &report.experiments[0];
        let rhombus = &report.experiments[1];
        assert!(conformal.all_conformal);
        assert!(!rhombus.all_conformal);
        assert!((rhombus.final_rate - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(conformal.final_rate < rhombus.final_rate);
        // conformal counts never decrease
        for w in conformal.cell_counts.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
    }
}
