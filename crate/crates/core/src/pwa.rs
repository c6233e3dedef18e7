//! Piecewise affine maps: the rhombus family, point classification,
//! contraction and conformality certificates, and the JSON map schema.

use num::traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, ConvexPolygon, Location, Metric, RatMatrix2, RatPoint};
use crate::rational::{format_rational, parse_rational, rat_int, rational_to_f64, Rational};

/// Identifies one continuity component of a piecewise map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceId {
    pub index: usize,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Piece {
    pub cell: ConvexPolygon,
    pub map: AffineMap2,
    pub id: PieceId,
}

/// A map defined on the open cells of a polygonal partition, affine on each
/// cell, undefined on the cell boundaries (the singularity set).
#[derive(Clone, Debug)]
pub struct PiecewiseMap {
    domain: ConvexPolygon,
    pieces: Vec<Piece>,
    metric: Metric,
}

/// Result of locating a point against the cell partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Located {
    Piece(usize),
    Singular,
    Outside,
}

/// Result of one application of the map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome {
    Mapped { point: RatPoint, piece: usize },
    Singular,
    Outside,
}

/// Per-piece conformality verdict: a linear part L is conformal iff
/// `L^T L = s^2 * I` exactly, with `scale_sq = s^2`.
#[derive(Clone, Debug)]
pub struct PieceConformality {
    pub label: String,
    pub conformal: bool,
    pub scale_sq: Option<Rational>,
}

impl PiecewiseMap {
    /// Validates all structural invariants: cells inside the domain with
    /// pairwise-disjoint interiors, cell areas summing to the domain area,
    /// and every piece map invertible.
    pub fn new(domain: ConvexPolygon, pieces: Vec<Piece>, metric: Metric) -> Result<Self> {
        let mut labels: Vec<&str> = pieces.iter().map(|p| p.id.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != pieces.len() {
            return Err(Error::InvariantViolation("duplicate piece labels".into()));
        }
        let mut area_sum = Rational::zero();
        for (i, piece) in pieces.iter().enumerate() {
            if piece.map.linear.det().is_zero() {
                return Err(Error::InvariantViolation(format!(
                    "piece {} has a non-invertible linear part",
                    piece.id.label
                )));
            }
            if !domain.contains_polygon(&piece.cell) {
                return Err(Error::InvariantViolation(format!(
                    "cell {} is not contained in the domain",
                    piece.id.label
                )));
            }
            area_sum += piece.cell.area();
            for other in &pieces[i + 1..] {
                if piece.cell.intersect(&other.cell).is_some() {
                    return Err(Error::InvariantViolation(format!(
                        "cells {} and {} overlap with positive area",
                        piece.id.label, other.id.label
                    )));
                }
            }
        }
        if area_sum != domain.area() {
            return Err(Error::InvariantViolation(
                "cell areas do not sum to the domain area".into(),
            ));
        }
        Ok(Self { domain, pieces, metric })
    }

    pub fn domain(&self) -> &ConvexPolygon {
        &self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    /// Exact point classification. A point interior to exactly one cell gets
    /// that piece; anything on an internal cell boundary is `Singular`.
    pub fn locate(&self, p: &RatPoint) -> Located {
        match self.domain.locate(p) {
            Location::Outside => return Located::Outside,
            Location::Boundary => return Located::Singular,
            Location::Interior => {}
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            match piece.cell.locate(p) {
                Location::Interior => return Located::Piece(i),
                Location::Boundary => return Located::Singular,
                Location::Outside => {}
            }
        }
        // interior of the domain but in no cell: only possible on the
        // boundary web, which the loop above already reports
        Located::Singular
    }

    pub fn evaluate(&self, p: &RatPoint) -> EvalOutcome {
        match self.locate(p) {
            Located::Piece(i) => EvalOutcome::Mapped {
                point: self.pieces[i].map.apply(p),
                piece: i,
            },
            Located::Singular => EvalOutcome::Singular,
            Located::Outside => EvalOutcome::Outside,
        }
    }

    /// Exact Lipschitz constant in the map's metric, when the induced norm
    /// is rational (L1 and LINF). Returns `None` under L2.
    pub fn lipschitz_exact(&self) -> Option<Rational> {
        let norms = self.pieces.iter().map(|p| match self.metric {
            Metric::L1 => Some(p.map.linear.operator_norm_l1()),
            Metric::Linf => Some(p.map.linear.operator_norm_linf()),
            Metric::L2 => None,
        });
        let mut best: Option<Rational> = None;
        for n in norms {
            let n = n?;
            best = Some(match best {
                Some(b) => b.max(n),
                None => n,
            });
        }
        best
    }

    /// Float Lipschitz upper bound in the map's metric (exact value for
    /// L1/LINF, largest singular value for L2).
    pub fn lipschitz_float(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match self.metric {
                Metric::L1 => rational_to_f64(&p.map.linear.operator_norm_l1()),
                Metric::Linf => rational_to_f64(&p.map.linear.operator_norm_linf()),
                Metric::L2 => p.map.linear.gram_eigenvalues().lambda_max.sqrt(),
            })
            .fold(0.0, f64::max)
    }

    pub fn conformality_report(&self) -> Vec<PieceConformality> {
        self.pieces
            .iter()
            .map(|p| {
                let g = p.map.linear.gram();
                let conformal = g.a == g.d && g.b.is_zero() && g.c.is_zero();
                PieceConformality {
                    label: p.id.label.clone(),
                    conformal,
                    scale_sq: conformal.then(|| g.a),
                }
            })
            .collect()
    }
}

/// The parameterized rhombus construction: vertices A=(0,1), B=(0,-1),
/// C=(-1,0), D=(1,0), center O, and P,Q,R,S at parameter `t` from A (resp. B)
/// along the sides.
#[derive(Clone, Debug)]
pub struct RhombusSpec {
    pub t: Rational,
    pub a: RatPoint,
    pub b: RatPoint,
    pub c: RatPoint,
    pub d: RatPoint,
    pub o: RatPoint,
    pub p: RatPoint,
    pub q: RatPoint,
    pub r: RatPoint,
    pub s: RatPoint,
}

impl RhombusSpec {
    pub fn new(t: Rational) -> Result<Self> {
        if !t.is_positive() || t >= Rational::one() {
            return Err(Error::ParameterOutOfRange(format!(
                "t must lie in (0,1), got {}",
                format_rational(&t)
            )));
        }
        let one = rat_int(1);
        let u = &one - &t; // 1 - t
        Ok(Self {
            a: RatPoint::new(rat_int(0), one.clone()),
            b: RatPoint::new(rat_int(0), -one.clone()),
            c: RatPoint::new(-one.clone(), rat_int(0)),
            d: RatPoint::new(one, rat_int(0)),
            o: RatPoint::origin(),
            p: RatPoint::new(-t.clone(), u.clone()),
            q: RatPoint::new(t.clone(), u.clone()),
            r: RatPoint::new(-t.clone(), -u.clone()),
            s: RatPoint::new(t.clone(), -u),
            t,
        })
    }
}

/// Builds the four-piece rhombus map: ACO -> APQ, ADO -> BRS, BCO -> AQP,
/// BDO -> BSR, each piece the affine map determined by the vertex
/// correspondence in that order. Default metric is L1.
pub fn build_rhombus(t: &Rational) -> Result<PiecewiseMap> {
    let s = RhombusSpec::new(t.clone())?;
    let corr: [(&str, [&RatPoint; 3], [&RatPoint; 3]); 4] = [
        ("ACO", [&s.a, &s.c, &s.o], [&s.a, &s.p, &s.q]),
        ("ADO", [&s.a, &s.d, &s.o], [&s.b, &s.r, &s.s]),
        ("BCO", [&s.b, &s.c, &s.o], [&s.a, &s.q, &s.p]),
        ("BDO", [&s.b, &s.d, &s.o], [&s.b, &s.s, &s.r]),
    ];
    let mut pieces = Vec::with_capacity(4);
    for (index, (label, src, dst)) in corr.into_iter().enumerate() {
        let src_arr = [src[0].clone(), src[1].clone(), src[2].clone()];
        let dst_arr = [dst[0].clone(), dst[1].clone(), dst[2].clone()];
        let map = AffineMap2::from_correspondence(&src_arr, &dst_arr)?;
        let cell = ConvexPolygon::triangle(src_arr[0].clone(), src_arr[1].clone(), src_arr[2].clone())?;
        pieces.push(Piece {
            cell,
            map,
            id: PieceId { index, label: label.to_string() },
        });
    }
    let domain = ConvexPolygon::new(vec![s.a, s.c, s.b, s.d])?;
    PiecewiseMap::new(domain, pieces, Metric::L1)
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MapDoc {
    metric: String,
    domain: Vec<[String; 2]>,
    pieces: Vec<PieceDoc>,
}

#[derive(Serialize, Deserialize)]
struct PieceDoc {
    label: String,
    cell: Vec<[String; 2]>,
    linear: [[String; 2]; 2],
    offset: [String; 2],
}

fn point_doc(p: &RatPoint) -> [String; 2] {
    [format_rational(&p.x), format_rational(&p.y)]
}

fn parse_point(doc: &[String; 2]) -> Result<RatPoint> {
    Ok(RatPoint::new(parse_rational(&doc[0])?, parse_rational(&doc[1])?))
}

fn polygon_doc(poly: &ConvexPolygon) -> Vec<[String; 2]> {
    poly.vertices().iter().map(point_doc).collect()
}

/// Serialize a map to its canonical JSON document (normalized vertex order,
/// so save-then-load is a bit-exact round trip).
pub fn save_map(m: &PiecewiseMap) -> String {
    let doc = MapDoc {
        metric: m.metric().name().to_string(),
        domain: polygon_doc(m.domain()),
        pieces: m
            .pieces()
            .iter()
            .map(|p| PieceDoc {
                label: p.id.label.clone(),
                cell: polygon_doc(&p.cell),
                linear: [
                    [format_rational(&p.map.linear.a), format_rational(&p.map.linear.b)],
                    [format_rational(&p.map.linear.c), format_rational(&p.map.linear.d)],
                ],
                offset: point_doc(&p.map.offset),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("map document serializes")
}

/// Parse and fully re-validate a map document.
pub fn load_map(json: &str) -> Result<PiecewiseMap> {
    let doc: MapDoc = serde_json::from_str(json).map_err(|e| Error::SchemaError(e.to_string()))?;
    let metric = match doc.metric.as_str() {
        "l1" => Metric::L1,
        "l2" => Metric::L2,
        "linf" => Metric::Linf,
        other => return Err(Error::SchemaError(format!("unknown metric {other:?}"))),
    };
    let domain_pts = doc.domain.iter().map(parse_point).collect::<Result<Vec<_>>>()?;
    let domain = ConvexPolygon::new(domain_pts)
        .map_err(|e| Error::SchemaError(format!("bad domain: {e}")))?;
    let mut pieces = Vec::with_capacity(doc.pieces.len());
    for (index, pd) in doc.pieces.iter().enumerate() {
        let cell_pts = pd.cell.iter().map(parse_point).collect::<Result<Vec<_>>>()?;
        let cell = ConvexPolygon::new(cell_pts)
            .map_err(|e| Error::SchemaError(format!("bad cell {:?}: {e}", pd.label)))?;
        let linear = RatMatrix2::new(
            parse_rational(&pd.linear[0][0])?,
            parse_rational(&pd.linear[0][1])?,
            parse_rational(&pd.linear[1][0])?,
            parse_rational(&pd.linear[1][1])?,
        );
        let offset = parse_point(&pd.offset)?;
        pieces.push(Piece {
            cell,
            map: AffineMap2::new(linear, offset),
            id: PieceId { index, label: pd.label.clone() },
        });
    }
    PiecewiseMap::new(domain, pieces, metric)
}

/// Content hash of the canonical map document (hex SHA-256), used by run
/// manifests.
pub fn map_hash(m: &PiecewiseMap) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(save_map(m).as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rhombus_half_matrices() {
        let m = build_rhombus(&rat(1, 2)).unwrap();
        let aco = &m.pieces()[0];
        assert_eq!(aco.id.label, "ACO");
        assert_eq!(aco.map.linear, RatMatrix2::new(rat_int(1), rat(-1, 2), rat_int(0), rat(1, 2)));
        assert_eq!(aco.map.offset, RatPoint::new(rat(1, 2), rat(1, 2)));
        let ado = &m.pieces()[1];
        assert_eq!(ado.map.linear, RatMatrix2::new(rat_int(-1), rat(-1, 2), rat_int(0), rat(-1, 2)));
        assert_eq!(ado.map.offset, RatPoint::new(rat(1, 2), rat(-1, 2)));
    }

    #[test]
    fn rhombus_l1_norms_are_2t() {
        for t in [rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 3)] {
            let m = build_rhombus(&t).unwrap();
            for p in m.pieces() {
                assert_eq!(p.map.linear.operator_norm_l1(), rat_int(2) * &t);
            }
            assert_eq!(m.lipschitz_exact().unwrap(), rat_int(2) * &t);
        }
    }

    #[test]
    fn parameter_domain() {
        assert!(matches!(build_rhombus(&rat_int(0)), Err(Error::ParameterOutOfRange(_))));
        assert!(matches!(build_rhombus(&rat_int(1)), Err(Error::ParameterOutOfRange(_))));
        assert!(matches!(build_rhombus(&rat(3, 2)), Err(Error::ParameterOutOfRange(_))));
        assert!(build_rhombus(&rat(1, 100)).is_ok());
    }

    #[test]
    fn locate_examples() {
        let m = build_rhombus(&rat(1, 2)).unwrap();
        assert_eq!(m.locate(&RatPoint::new(rat(-1, 2), rat(1, 4))), Located::Piece(0));
        assert_eq!(m.locate(&RatPoint::new(rat_int(0), rat(1, 2))), Located::Singular);
        assert_eq!(m.locate(&RatPoint::new(rat_int(2), rat_int(0))), Located::Outside);
        assert_eq!(m.locate(&RatPoint::origin()), Located::Singular);
    }

    #[test]
    fn evaluate_examples() {
        let m = build_rhombus(&rat(1, 2)).unwrap();
        assert_eq!(
            m.evaluate(&RatPoint::new(rat(-1, 2), rat(1, 4))),
            EvalOutcome::Mapped { point: RatPoint::new(rat(-1, 8), rat(5, 8)), piece: 0 }
        );
        // BDO piece: [[1,-1/2],[0,1/2]] * p + (-1/2,-1/2)
        assert_eq!(
            m.evaluate(&RatPoint::new(rat(1, 2), rat(-1, 4))),
            EvalOutcome::Mapped { point: RatPoint::new(rat(1, 8), rat(-5, 8)), piece: 3 }
        );
        assert_eq!(m.evaluate(&RatPoint::origin()), EvalOutcome::Singular);
    }

    #[test]
    fn lipschitz_l2_exceeds_one_at_half() {
        let m = build_rhombus(&rat(1, 2)).unwrap().with_metric(Metric::L2);
        let lip = m.lipschitz_float();
        let expect = ((3.0 + 5f64.sqrt()) / 4.0f64).sqrt();
        assert!((lip - expect).abs() < 1e-12);
        assert!(lip > 1.0);
    }

    #[test]
    fn conformality_of_rhombus_pieces() {
        for t in [rat(1, 4), rat(1, 2), rat(2, 3)] {
            let m = build_rhombus(&t).unwrap();
            for rec in m.conformality_report() {
                assert!(!rec.conformal);
            }
            // off-diagonal of L^T L is -2 t^2 for the ACO piece
            let g = m.pieces()[0].map.linear.gram();
            assert_eq!(g.b, rat_int(-2) * &t * &t);
        }
    }

    #[test]
    fn conformal_example_matrix() {
        // (5/8) * [[3/5,-4/5],[4/5,3/5]]
        let lin = RatMatrix2::new(rat(3, 8), rat(-1, 2), rat(1, 2), rat(3, 8));
        let g = lin.gram();
        assert_eq!(g.a, rat(25, 64));
        assert_eq!(g.d, rat(25, 64));
        assert!(g.b.is_zero() && g.c.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let m = build_rhombus(&rat(1, 2)).unwrap();
        let json = save_map(&m);
        assert!(json.contains("\"-1/2\""));
        let m2 = load_map(&json).unwrap();
        assert_eq!(save_map(&m2), json);
        assert_eq!(map_hash(&m), map_hash(&m2));
    }

    #[test]
    fn load_rejects_overlapping_cells() {
        let m = build_rhombus(&rat(1, 2)).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&save_map(&m)).unwrap();
        // make piece 1's cell equal to piece 0's cell
        let cell0 = doc["pieces"][0]["cell"].clone();
        doc["pieces"][1]["cell"] = cell0;
        let err = load_map(&doc.to_string()).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation(_)));
    }

    #[test]
    fn load_rejects_bad_schema() {
        assert!(matches!(load_map("{}"), Err(Error::SchemaError(_))));
        assert!(matches!(load_map("not json"), Err(Error::SchemaError(_))));
    }

    #[test]
    fn vertex_correspondence_fixed_points() {
        for t in [rat(1, 4), rat(1, 2), rat(5, 7)] {
            let m = build_rhombus(&t).unwrap();
            let s = RhombusSpec::new(t).unwrap();
            assert_eq!(m.pieces()[0].map.apply(&s.a), s.a); // ACO fixes A
            assert_eq!(m.pieces()[1].map.apply(&s.a), s.b); // ADO sends A to B
            assert_eq!(m.pieces()[2].map.apply(&s.b), s.a); // BCO sends B to A
            assert_eq!(m.pieces()[3].map.apply(&s.b), s.b); // BDO fixes B
        }
    }
}
