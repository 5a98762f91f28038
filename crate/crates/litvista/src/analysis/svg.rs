//! Deterministic standalone SVG rendering for the analysis views.
//!
//! Two plot kinds: a heatmap over a distance table and a point scatter.
//! Output bytes are a pure function of the input; there are no timestamps,
//! random ids, or external assets, so identical inputs render identical
//! files.

use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{DistanceTable, LexicalRoleStats, ShapeRecord};

/// Scatter viewport in user units.
pub const VIEW_W: f64 = 640.0;
pub const VIEW_H: f64 = 480.0;
/// Plot rectangle inside the viewport; data is affinely mapped into it.
pub const PLOT_LEFT: f64 = 60.0;
pub const PLOT_RIGHT: f64 = 610.0;
pub const PLOT_TOP: f64 = 40.0;
pub const PLOT_BOTTOM: f64 = 430.0;

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("degenerate data extent: {reason}")]
    DegenerateExtent { reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

/// What to render.
#[derive(Debug, Clone)]
pub enum Plot<'a> {
    Heatmap {
        title: &'a str,
        table: &'a DistanceTable,
    },
    Scatter {
        title: &'a str,
        x_label: &'a str,
        y_label: &'a str,
        points: &'a [ScatterPoint],
    },
}

/// Maps `v` from `domain` into `range` linearly. The caller guarantees a
/// non-degenerate domain.
pub fn affine_map(v: f64, domain: (f64, f64), range: (f64, f64)) -> f64 {
    range.0 + (v - domain.0) * (range.1 - range.0) / (domain.1 - domain.0)
}

pub fn scatter_from_lexicon(stats: &[LexicalRoleStats]) -> Vec<ScatterPoint> {
    stats
        .iter()
        .map(|s| ScatterPoint {
            x: s.x,
            y: s.y,
            label: s.word.clone(),
        })
        .collect()
}

pub fn scatter_from_shape(records: &[ShapeRecord]) -> Vec<ScatterPoint> {
    records
        .iter()
        .map(|r| ScatterPoint {
            x: r.x as f64,
            y: r.y,
            label: r.word.clone(),
        })
        .collect()
}

/// Renders the plot to SVG text.
pub fn render_svg(plot: &Plot) -> Result<String, SvgError> {
    match plot {
        Plot::Heatmap { title, table } => render_heatmap(title, table),
        Plot::Scatter {
            title,
            x_label,
            y_label,
            points,
        } => render_scatter(title, x_label, y_label, points),
    }
}

/// Renders the plot and writes it to `out_path`.
pub fn emit_svg(plot: &Plot, out_path: &Path) -> Result<(), SvgError> {
    let svg = render_svg(plot)?;
    std::fs::write(out_path, svg).map_err(|source| SvgError::Io {
        path: out_path.to_owned(),
        source,
    })
}

fn degenerate(reason: &str) -> SvgError {
    SvgError::DegenerateExtent {
        reason: reason.to_owned(),
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

fn render_scatter(
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[ScatterPoint],
) -> Result<String, SvgError> {
    if points.is_empty() {
        return Err(degenerate("no points"));
    }
    if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(degenerate("non-finite coordinate"));
    }
    let fold = |f: fn(f64, f64) -> f64, pick: fn(&ScatterPoint) -> f64| {
        points.iter().map(pick).fold(pick(&points[0]), f)
    };
    let x_dom = (fold(f64::min, |p| p.x), fold(f64::max, |p| p.x));
    let y_dom = (fold(f64::min, |p| p.y), fold(f64::max, |p| p.y));
    if x_dom.0 == x_dom.1 {
        return Err(degenerate("x extent is a single value"));
    }
    if y_dom.0 == y_dom.1 {
        return Err(degenerate("y extent is a single value"));
    }

    let mut s = svg_open(VIEW_W, VIEW_H);
    s.push_str(&format!(
        "<text class=\"title\" x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" \
         font-size=\"16\">{}</text>\n",
        VIEW_W / 2.0,
        xml_escape(title)
    ));
    // Axes along the plot rectangle's left and bottom sides.
    s.push_str(&format!(
        "<line x1=\"{l:.2}\" y1=\"{t:.2}\" x2=\"{l:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>\n\
         <line x1=\"{l:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>\n",
        l = PLOT_LEFT,
        r = PLOT_RIGHT,
        t = PLOT_TOP,
        b = PLOT_BOTTOM,
    ));
    // Extent ticks.
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{:.2}</text>\n",
        PLOT_LEFT,
        PLOT_BOTTOM + 16.0,
        x_dom.0
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{:.2}</text>\n",
        PLOT_RIGHT,
        PLOT_BOTTOM + 16.0,
        x_dom.1
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{:.2}</text>\n",
        PLOT_LEFT - 6.0,
        PLOT_BOTTOM,
        y_dom.0
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{:.2}</text>\n",
        PLOT_LEFT - 6.0,
        PLOT_TOP + 4.0,
        y_dom.1
    ));
    // Axis labels.
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        (PLOT_LEFT + PLOT_RIGHT) / 2.0,
        VIEW_H - 10.0,
        xml_escape(x_label)
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{:.2}\" font-size=\"12\" transform=\"rotate(-90 14 {:.2})\" \
         text-anchor=\"middle\">{}</text>\n",
        (PLOT_TOP + PLOT_BOTTOM) / 2.0,
        (PLOT_TOP + PLOT_BOTTOM) / 2.0,
        xml_escape(y_label)
    ));
    // Legend: one series.
    s.push_str(&format!(
        "<g class=\"legend\"><circle cx=\"{x:.2}\" cy=\"14\" r=\"3\" fill=\"steelblue\"/>\
         <text x=\"{tx:.2}\" y=\"18\" font-size=\"11\">{name}</text></g>\n",
        x = PLOT_RIGHT - 120.0,
        tx = PLOT_RIGHT - 112.0,
        name = xml_escape(title),
    ));
    for p in points {
        let cx = affine_map(p.x, x_dom, (PLOT_LEFT, PLOT_RIGHT));
        // Screen y grows downward, so the range is flipped.
        let cy = affine_map(p.y, y_dom, (PLOT_BOTTOM, PLOT_TOP));
        s.push_str(&format!(
            "<circle class=\"point\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"3\" \
             fill=\"steelblue\" fill-opacity=\"0.7\"><title>{}</title></circle>\n",
            xml_escape(&p.label)
        ));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn render_heatmap(title: &str, table: &DistanceTable) -> Result<String, SvgError> {
    if table.rows.is_empty() {
        return Err(degenerate("heatmap has no rows"));
    }
    if table.bucket_edges.is_empty() {
        return Err(degenerate("heatmap has no buckets"));
    }
    const CELL_W: f64 = 74.0;
    const CELL_H: f64 = 36.0;
    const LEFT: f64 = 170.0;
    const TOP: f64 = 50.0;
    let cols = table.bucket_edges.len();
    let grid_w = CELL_W * cols as f64;
    let grid_h = CELL_H * table.rows.len() as f64;
    let width = LEFT + grid_w + 20.0;
    let height = TOP + grid_h + 70.0;
    let max = table.rows.values().flatten().copied().max().unwrap_or(0);

    let mut s = svg_open(width, height);
    s.push_str(&format!(
        "<text class=\"title\" x=\"{:.2}\" y=\"28\" text-anchor=\"middle\" \
         font-size=\"16\">{}</text>\n",
        width / 2.0,
        xml_escape(title)
    ));
    for (row_idx, (label, cells)) in table.rows.iter().enumerate() {
        let y = TOP + CELL_H * row_idx as f64;
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"12\">{}</text>\n",
            LEFT - 8.0,
            y + CELL_H / 2.0 + 4.0,
            xml_escape(label)
        ));
        for (col, &count) in cells.iter().enumerate() {
            let x = LEFT + CELL_W * col as f64;
            s.push_str(&format!(
                "<rect class=\"cell\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{CELL_W:.2}\" \
                 height=\"{CELL_H:.2}\" fill=\"{}\" stroke=\"#999\"/>\n",
                heat_color(count, max)
            ));
            s.push_str(&format!(
                "<text class=\"count\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" \
                 font-size=\"11\">{count}</text>\n",
                x + CELL_W / 2.0,
                y + CELL_H / 2.0 + 4.0,
            ));
        }
    }
    for col in 0..cols {
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
            LEFT + CELL_W * col as f64 + CELL_W / 2.0,
            TOP + grid_h + 18.0,
            xml_escape(&table.bucket_label(col))
        ));
    }
    // Legend: color scale endpoints.
    let legend_y = TOP + grid_h + 34.0;
    s.push_str(&format!(
        "<g class=\"legend\">\
         <rect x=\"{LEFT:.2}\" y=\"{legend_y:.2}\" width=\"18\" height=\"12\" fill=\"{}\" \
         stroke=\"#999\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">0</text>\
         <rect x=\"{:.2}\" y=\"{legend_y:.2}\" width=\"18\" height=\"12\" fill=\"{}\" \
         stroke=\"#999\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{max}</text></g>\n",
        heat_color(0, max),
        LEFT + 24.0,
        legend_y + 10.0,
        LEFT + 70.0,
        heat_color(max, max),
        LEFT + 94.0,
        legend_y + 10.0,
    ));
    s.push_str("</svg>\n");
    Ok(s)
}

/// White through steelblue, proportional to count/max.
fn heat_color(count: u64, max: u64) -> String {
    let t = if max == 0 {
        0.0
    } else {
        count as f64 / max as f64
    };
    let channel = |from: f64, to: f64| (from + (to - from) * t).round() as u8;
    format!(
        "rgb({},{},{})",
        channel(255.0, 70.0),
        channel(255.0, 130.0),
        channel(255.0, 180.0)
    )
}

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n\
         <rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    )
}
