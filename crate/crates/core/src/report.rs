//! Serialization of every report: CSV with rational cells printed as "p/q",
//! consolidated JSON documents, SVG rendering of partitions and orbits, and
//! the run manifest. Floats appear only in clearly labeled rate, radius,
//! and eigenvalue columns.

use serde::Serialize;
use serde_json::{json, Value};

use crate::conformal::ContrastReport;
use crate::entropy::{EntropyReport, SpanningEstimate};
use crate::geometry::{ConvexPolygon, RatPoint};
use crate::orbit::{AttractorProfile, LyapunovEstimate, OrbitResult};
use crate::pwa::PiecewiseMap;
use crate::rational::format_rational;
use crate::symbolic::RefinedPartition;

/// Fixed float text form used by every CSV/JSON/SVG emitter, so reruns are
/// byte-identical.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.6}")
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Columns: n,count,rate (rate = successive log ratio, empty on the first row).
pub fn cells_csv(counts: &[(usize, u64)]) -> String {
    let mut out = String::from("n,count,rate\n");
    let mut prev: Option<u64> = None;
    for &(n, c) in counts {
        let rate = match prev {
            Some(p) => fmt_f64((c as f64 / p as f64).ln()),
            None => String::new(),
        };
        out.push_str(&format!("{n},{c},{rate}\n"));
        prev = Some(c);
    }
    out
}

/// Columns: method,n,count,rate,residual.
pub fn entropy_csv(report: &EntropyReport) -> String {
    let mut out = String::from("method,n,count,rate,residual\n");
    for series in &report.series {
        let mut prev: Option<u64> = None;
        for &(n, c) in &series.counts {
            let rate = match prev {
                Some(p) => fmt_f64((c as f64 / p as f64).ln()),
                None => String::new(),
            };
            out.push_str(&format!(
                "{},{n},{c},{rate},{}\n",
                series.method.name(),
                fmt_f64(series.residual)
            ));
            prev = Some(c);
        }
    }
    out
}

/// Columns: step,x,y,piece (piece empty for the final point).
pub fn orbit_csv(m: &PiecewiseMap, o: &OrbitResult) -> String {
    let mut out = String::from("step,x,y,piece\n");
    for (step, p) in o.points.iter().enumerate() {
        let piece = o
            .symbols
            .symbols
            .get(step)
            .map(|&i| m.pieces()[i].id.label.clone())
            .unwrap_or_default();
        out.push_str(&format!(
            "{step},{},{},{piece}\n",
            format_rational(&p.x),
            format_rational(&p.y)
        ));
    }
    out
}

/// Columns: sample,n,value,bound.
pub fn lyapunov_csv(estimates: &[(usize, LyapunovEstimate)]) -> String {
    let mut out = String::from("sample,n,value,bound\n");
    for (sample, est) in estimates {
        out.push_str(&format!(
            "{sample},{},{},{}\n",
            est.n,
            fmt_f64(est.value),
            fmt_f64(est.bound)
        ));
    }
    out
}

/// Columns: step,max_dist (exact rational).
pub fn attractor_csv(profile: &AttractorProfile) -> String {
    let mut out = String::from("step,max_dist\n");
    for (step, d) in &profile.steps {
        out.push_str(&format!("{step},{}\n", format_rational(d)));
    }
    out
}

/// Columns: n,centers,max_radius,verified.
pub fn cover_csv(est: &SpanningEstimate) -> String {
    let mut out = String::from("n,centers,max_radius,verified\n");
    let radius = est.max_cover_radius.map(fmt_f64).unwrap_or_default();
    out.push_str(&format!("{},{},{radius},true\n", est.n, est.count));
    out
}

/// Columns: experiment,n,count,final_rate,conformal,pass.
pub fn contrast_csv(report: &ContrastReport) -> String {
    let mut out = String::from("experiment,n,count,final_rate,conformal,pass\n");
    for exp in &report.experiments {
        for &(n, c) in &exp.cell_counts {
            out.push_str(&format!(
                "{},{n},{c},{},{},{}\n",
                exp.name,
                fmt_f64(exp.final_rate),
                exp.all_conformal,
                exp.pass
            ));
        }
    }
    out
}

/// Columns: depth,itinerary,area,vertices (itinerary as dotted labels,
/// vertices as a semicolon-separated list of "x y" rational pairs).
pub fn partition_csv(m: &PiecewiseMap, part: &RefinedPartition) -> String {
    let mut out = String::from("depth,itinerary,area,vertices\n");
    for cell in &part.cells {
        let itin: Vec<&str> = cell
            .itinerary
            .iter()
            .map(|&i| m.pieces()[i].id.label.as_str())
            .collect();
        let verts: Vec<String> = cell
            .polygon
            .vertices()
            .iter()
            .map(|v| format!("{} {}", format_rational(&v.x), format_rational(&v.y)))
            .collect();
        out.push_str(&format!(
            "{},{},{},{}\n",
            part.depth,
            itin.join("."),
            format_rational(&cell.polygon.area()),
            verts.join(";")
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

pub fn entropy_json(report: &EntropyReport) -> Value {
    json!({
        "n_max": report.n_max,
        "epsilon": format_rational(&report.epsilon),
        "mesh": format_rational(&report.mesh),
        "metric": report.metric.name(),
        "spectral_radius": report.spectral_radius,
        "series": report.series.iter().map(|s| json!({
            "method": s.method.name(),
            "counts": s.counts.iter().map(|&(n, c)| json!([n, c])).collect::<Vec<_>>(),
            "successive_rates": s.successive.iter()
                .map(|&(n, r)| json!([n, fmt_f64(r)])).collect::<Vec<_>>(),
            "slope": fmt_f64(s.slope),
            "residual": fmt_f64(s.residual),
        })).collect::<Vec<_>>(),
    })
}

pub fn contrast_json(report: &ContrastReport) -> Value {
    json!({
        "depth": report.depth,
        "experiments": report.experiments.iter().map(|e| json!({
            "name": e.name,
            "conformal": e.all_conformal,
            "scale_sq": e.scale_sq.iter()
                .map(|s| s.as_ref().map(format_rational)).collect::<Vec<_>>(),
            "cell_counts": e.cell_counts.iter().map(|&(n, c)| json!([n, c])).collect::<Vec<_>>(),
            "final_rate": fmt_f64(e.final_rate),
            "spectral_radius": fmt_f64(e.spectral_radius),
            "expected_rate": fmt_f64(e.expected_rate),
            "tolerance": e.tolerance,
            "pass": e.pass,
        })).collect::<Vec<_>>(),
    })
}

pub fn info_json(m: &PiecewiseMap) -> Value {
    let conf = m.conformality_report();
    let lip_exact = m.lipschitz_exact();
    json!({
        "metric": m.metric().name(),
        "domain_area": format_rational(&m.domain().area()),
        "lipschitz": lip_exact.as_ref().map(format_rational),
        "lipschitz_float": fmt_f64(m.lipschitz_float()),
        "verdict": if m.lipschitz_float() < 1.0 { "strict" } else { "non-strict" },
        "pieces": m.pieces().iter().zip(&conf).map(|(p, c)| {
            let eig = p.map.linear.gram_eigenvalues();
            json!({
                "label": p.id.label,
                "linear": [
                    [format_rational(&p.map.linear.a), format_rational(&p.map.linear.b)],
                    [format_rational(&p.map.linear.c), format_rational(&p.map.linear.d)],
                ],
                "offset": [format_rational(&p.map.offset.x), format_rational(&p.map.offset.y)],
                "norm_l1": format_rational(&p.map.linear.operator_norm_l1()),
                "norm_linf": format_rational(&p.map.linear.operator_norm_linf()),
                "sigma_max": fmt_f64(eig.lambda_max.sqrt()),
                "sigma_min": fmt_f64(eig.lambda_min.max(0.0).sqrt()),
                "conformal": c.conformal,
                "scale_sq": c.scale_sq.as_ref().map(format_rational),
            })
        }).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

const VIEW_MIN: f64 = -1.1;
const VIEW_MAX: f64 = 1.1;
const VIEW_PX: f64 = 440.0;

fn to_px(x: f64, y: f64) -> (f64, f64) {
    let s = VIEW_PX / (VIEW_MAX - VIEW_MIN);
    ((x - VIEW_MIN) * s, (VIEW_MAX - y) * s)
}

fn polygon_path(poly: &ConvexPolygon) -> String {
    let pts: Vec<String> = poly
        .vertices()
        .iter()
        .map(|v| {
            let (x, y) = v.to_f64();
            let (px, py) = to_px(x, y);
            format!("{},{}", fmt_f64(px), fmt_f64(py))
        })
        .collect();
    pts.join(" ")
}

fn hue_for(symbol: usize, k: usize) -> usize {
    (symbol * 360) / k.max(1)
}

/// Partition rendering: cells filled by first-symbol hue, boundary web
/// stroked. Fixed viewport [-1.1, 1.1]^2 so renders are comparable across
/// parameters and depths.
pub fn partition_svg(m: &PiecewiseMap, part: &RefinedPartition) -> String {
    let k = m.pieces().len();
    let mut body = String::new();
    for cell in &part.cells {
        let hue = hue_for(cell.itinerary[0], k);
        body.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"hsl({hue},70%,65%)\" stroke=\"#333\" stroke-width=\"0.5\"/>\n",
            polygon_path(&cell.polygon)
        ));
    }
    svg_document(&body)
}

/// Orbit overlay on the cell partition: points colored by step, the
/// attractor vertices marked.
pub fn orbit_svg(m: &PiecewiseMap, orbit: &OrbitResult) -> String {
    let k = m.pieces().len();
    let mut body = String::new();
    for piece in m.pieces() {
        let hue = hue_for(piece.id.index, k);
        body.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"hsl({hue},40%,85%)\" stroke=\"#333\" stroke-width=\"0.5\"/>\n",
            polygon_path(&piece.cell)
        ));
    }
    let steps = orbit.points.len();
    for (i, p) in orbit.points.iter().enumerate() {
        let (x, y) = p.to_f64();
        let (px, py) = to_px(x, y);
        let shade = 20 + (60 * i) / steps.max(1);
        body.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"hsl(220,90%,{shade}%)\"/>\n",
            fmt_f64(px),
            fmt_f64(py)
        ));
    }
    for v in [(0.0, 1.0), (0.0, -1.0)] {
        let (px, py) = to_px(v.0, v.1);
        body.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"none\" stroke=\"#c00\" stroke-width=\"1.5\"/>\n",
            fmt_f64(px),
            fmt_f64(py)
        ));
    }
    svg_document(&body)
}

/// Cover centers over the partition.
pub fn cover_svg(m: &PiecewiseMap, part: &RefinedPartition, centers: &[RatPoint]) -> String {
    let k = m.pieces().len();
    let mut body = String::new();
    for cell in &part.cells {
        let hue = hue_for(cell.itinerary[0], k);
        body.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"hsl({hue},40%,85%)\" stroke=\"#333\" stroke-width=\"0.5\"/>\n",
            polygon_path(&cell.polygon)
        ));
    }
    for c in centers {
        let (x, y) = c.to_f64();
        let (px, py) = to_px(x, y);
        body.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#c00\"/>\n",
            fmt_f64(px),
            fmt_f64(py)
        ));
    }
    svg_document(&body)
}

/// Two partitions side by side (contrast rendering).
pub fn side_by_side_svg(
    left: (&PiecewiseMap, &RefinedPartition),
    right: (&PiecewiseMap, &RefinedPartition),
) -> String {
    let render_group = |m: &PiecewiseMap, part: &RefinedPartition| {
        let k = m.pieces().len();
        let mut body = String::new();
        for cell in &part.cells {
            let hue = hue_for(cell.itinerary[0], k);
            body.push_str(&format!(
                "    <polygon points=\"{}\" fill=\"hsl({hue},70%,65%)\" stroke=\"#333\" stroke-width=\"0.5\"/>\n",
                polygon_path(&cell.polygon)
            ));
        }
        body
    };
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n  <g>\n{}  </g>\n  <g transform=\"translate({dx},0)\">\n{}  </g>\n</svg>\n",
        render_group(left.0, left.1),
        render_group(right.0, right.1),
        w = fmt_f64(2.0 * VIEW_PX + 20.0),
        h = fmt_f64(VIEW_PX),
        dx = fmt_f64(VIEW_PX + 20.0),
    )
}

fn svg_document(body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" viewBox=\"0 0 {w} {w}\">\n{body}</svg>\n",
        w = fmt_f64(VIEW_PX)
    )
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

/// Every CLI run emits one of these alongside its outputs. Two runs with
/// equal parameter echoes produce byte-identical CSV/JSON outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub params: Value,
    pub wall_clock_ms: u128,
    pub input_map_hash: Option<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::orbit;
    use crate::pwa::build_rhombus;
    use crate::rational::rat;
    use crate::symbolic::refine_partition;

    #[test]
    fn csv_rationals_never_floats() {
        let m = build_rhombus(&rat(1, 2)).unwrap();
        let o = orbit(&m, &RatPoint::new(rat(-1, 2), rat(1, 4)), 2);
        let csv = orbit_csv(&m, &o);
        assert!(csv.contains("0,-1/2,1/4,ACO"));
        assert!(csv.contains("1,-1/8,5/8,ACO"));
        assert!(csv.contains("2,1/16,13/16,"));
        assert!(!csv.contains('.'));
    }

    #[test]
    fn cells_csv_has_rates() {
        let counts = vec![(1, 4u64), (2, 8), (3, 16)];
        let csv = cells_csv(&counts);
        assert!(csv.starts_with("n,count,rate\n1,4,\n"));
        assert!(csv.contains("2,8,0.693147"));
    }

    #[test]
    fn partition_svg_renders() {
        let m = build_rhombus(&rat(1, 2)).unwrap();
        let part = refine_partition(&m, 3).unwrap();
        let svg = partition_svg(&m, &part);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polygon").count(), 16);
    }
}
