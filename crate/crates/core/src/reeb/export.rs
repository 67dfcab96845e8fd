use super::{ReebGraph, VertexKind};
use crate::strip::StripRegion;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Dot,
    Json,
    Svg,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            "svg" => Ok(ExportFormat::Svg),
            _ => Err(format!("unknown format {s:?} (expected dot, json or svg)")),
        }
    }
}

pub fn export(g: &ReebGraph, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Dot => to_dot(g).into_bytes(),
        ExportFormat::Json => to_json(g).to_string().into_bytes(),
        ExportFormat::Svg => to_svg(g, None).into_bytes(),
    }
}

fn kind_name(kind: VertexKind) -> &'static str {
    match kind {
        VertexKind::Critical => "critical",
        VertexKind::Cut => "cut",
    }
}

/// DOT digraph with edges pointing upwards; vertices of equal height share
/// a rank.
pub fn to_dot(g: &ReebGraph) -> String {
    let mut out = String::from("digraph reeb {\n  rankdir=BT;\n");
    for v in &g.vertices {
        let _ = writeln!(
            out,
            "  v{} [label=\"v{}\\nh={}\", reeb_height=\"{}\", kind=\"{}\", degree={}, footprint=\"{},{}\"{}];",
            v.id,
            v.id,
            v.height,
            v.height,
            kind_name(v.kind),
            v.degree,
            v.footprint[0],
            v.footprint[1],
            if v.kind == VertexKind::Cut { ", shape=box" } else { "" }
        );
    }
    let mut order: Vec<usize> = (0..g.vertices.len()).collect();
    order.sort_by(|&a, &b| g.vertices[a].height.total_cmp(&g.vertices[b].height));
    for group in order.chunk_by(|&a, &b| g.vertices[a].height == g.vertices[b].height) {
        if group.len() > 1 {
            let names: Vec<String> = group.iter().map(|k| format!("v{k}")).collect();
            let _ = writeln!(out, "  {{ rank=same; {}; }}", names.join("; "));
        }
    }
    for e in &g.edges {
        let _ = writeln!(out, "  v{} -> v{};", e.lo, e.hi);
    }
    out.push_str("}\n");
    out
}

pub fn to_json(g: &ReebGraph) -> serde_json::Value {
    serde_json::to_value(g).expect("graph serializes")
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 40.0;
const STRIP_SAMPLES: usize = 400;

/// Static plot with `s` across and height upwards: the strip between `c1`
/// and `c2` (when a region is given), critical contours and the graph.
pub fn to_svg(g: &ReebGraph, region: Option<&StripRegion>) -> String {
    let w = g.window;
    let samples: Vec<(f64, f64, f64)> = match region {
        Some(r) => w
            .lattice(STRIP_SAMPLES)
            .into_iter()
            .filter_map(|s| match (r.c1.eval(s), r.c2.eval(s)) {
                (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => Some((s, a, b)),
                _ => None,
            })
            .collect(),
        None => Vec::new(),
    };
    let heights: Vec<f64> = if g.vertices.is_empty() {
        samples.iter().flat_map(|&(_, a, b)| [a, b]).collect()
    } else {
        g.vertices.iter().map(|v| v.height).collect()
    };
    let lo = heights.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() && hi > lo {
        let pad = 0.1 * (hi - lo);
        (lo - pad, hi + pad)
    } else if lo.is_finite() {
        (lo - 1.0, lo + 1.0)
    } else {
        (-1.0, 1.0)
    };
    let px = |s: f64| MARGIN + (s - w.lo) / w.width() * (WIDTH - 2.0 * MARGIN);
    let py = |t: f64| HEIGHT - MARGIN - (t - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "<defs><clipPath id=\"plot\"><rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\"/></clipPath></defs>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    out.push_str("<g clip-path=\"url(#plot)\">\n");
    if !samples.is_empty() {
        let mut pts: Vec<String> = samples
            .iter()
            .map(|&(s, a, _)| format!("{:.2},{:.2}", px(s), py(a)))
            .collect();
        pts.extend(
            samples
                .iter()
                .rev()
                .map(|&(s, _, b)| format!("{:.2},{:.2}", px(s), py(b))),
        );
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"#cfe3f7\" stroke=\"#5b8fc7\" stroke-width=\"1\"/>",
            pts.join(" ")
        );
    }
    for v in &g.vertices {
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#d08c2b\" stroke-width=\"1.5\"/>",
            px(v.footprint[0]),
            py(v.height),
            px(v.footprint[1]),
            py(v.height)
        );
    }
    let centre = |k: usize| {
        let v = &g.vertices[k];
        (px(0.5 * (v.footprint[0] + v.footprint[1])), py(v.height))
    };
    for e in &g.edges {
        let (a, b) = (centre(e.lo), centre(e.hi));
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#222\" stroke-width=\"1.5\"/>",
            a.0, a.1, b.0, b.1
        );
    }
    for v in &g.vertices {
        let (x, y) = centre(v.id);
        let fill = if v.kind == VertexKind::Cut { "#fff" } else { "#c33" };
        let _ = writeln!(
            out,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{fill}\" stroke=\"#222\"><title>v{} h={} degree {}</title></circle>",
            v.id, v.height, v.degree
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
