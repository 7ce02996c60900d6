//! Minimal SVG charts. Coordinates are printed with three decimals so output
//! is byte-stable across runs.

use std::fmt::Write as _;

use synergy_core::MergeTree64;

pub const ORANGE: &str = "#ff7f0e";
pub const BLUE: &str = "#1f77b4";
pub const RED: &str = "#d62728";
pub const GREEN: &str = "#2ca02c";

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Draw a marker at every point.
    pub markers: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Round step near `span / 8` from the 1-2-5 sequence.
fn tick_step(span: f64) -> f64 {
    if span.is_nan() || span <= 0.0 {
        return 1.0;
    }
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    y0 = y0.min(0.0);
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT:.3}" y="{TOP:.3}" width="{pw:.3}" height="{ph:.3}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/><text x="{x:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            tick_label(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{LEFT:.3}" y2="{y:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.3}" text-anchor="middle" transform="rotate(-90 16 {:.3})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );

    for s in series {
        let path: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            s.color,
            path.join(" ")
        );
        if s.markers {
            for &(x, y) in &s.points {
                let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="2.5" fill="{}"/>"#, sx(x), sy(y), s.color);
            }
        }
    }
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 14.0 + 16.0 * i as f64;
        let x = WIDTH - RIGHT - 150.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="{}" stroke-width="2"/><text x="{:.3}" y="{:.3}">{}</text>"#,
            x + 20.0,
            s.color,
            x + 26.0,
            y + 4.0,
            escape(s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Dendrogram with leaves along the bottom and merge height upward.
pub fn dendrogram(title: &str, tree: &MergeTree64) -> String {
    let n = tree.leaf_count();
    let root = if tree.merges.is_empty() { 0 } else { tree.merges.last().unwrap().id };
    // leaf order from a left-to-right traversal
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    while let Some(c) = stack.pop() {
        if c < n {
            order.push(c);
        } else {
            let m = &tree.merges[c - n];
            stack.push(m.right);
            stack.push(m.left);
        }
    }
    let top = tree.merges.iter().map(|m| m.height).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sy = |h: f64| TOP + ph - h / top * ph;
    let mut xpos = vec![0.0; n + tree.merges.len()];
    for (slot, &leaf) in order.iter().enumerate() {
        xpos[leaf] = LEFT + (slot as f64 + 0.5) / n as f64 * pw;
    }
    let height = |c: usize| if c < n { 0.0 } else { tree.merges[c - n].height };

    let mut out = String::new();
    header(&mut out, title);
    for t in ticks(0.0, top) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{LEFT:.3}" y2="{y:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT:.3}" y1="{TOP:.3}" x2="{LEFT:.3}" y2="{:.3}" stroke="black"/>"#,
        TOP + ph
    );
    for m in &tree.merges {
        let (xl, xr) = (xpos[m.left], xpos[m.right]);
        let y = sy(m.height);
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{BLUE}" stroke-width="1.5" points="{xl:.3},{:.3} {xl:.3},{y:.3} {xr:.3},{y:.3} {xr:.3},{:.3}"/>"#,
            sy(height(m.left)),
            sy(height(m.right))
        );
        xpos[m.id] = (xl + xr) / 2.0;
    }
    for &leaf in &order {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            xpos[leaf],
            TOP + ph + 18.0,
            escape(&tree.leaf_labels[leaf])
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use synergy_core::{ward_cluster, DissimilarityMatrix64};

    #[test]
    fn nice_ticks() {
        let unit = ticks(0.0, 1.0);
        assert_eq!(unit.len(), 11);
        assert_eq!(tick_label(unit[3]), "0.3");
        assert_eq!(ticks(-80.0, 90.0), vec![-80.0, -60.0, -40.0, -20.0, 0.0, 20.0, 40.0, 60.0, 80.0]);
        assert_eq!(tick_label(0.6000000000000001), "0.6");
        assert_eq!(tick_label(-0.0), "0");
    }

    #[test]
    fn chart_contains_series() {
        let svg = line_chart(
            "t & t",
            "frame",
            "speed",
            &[Series { name: "ankle", color: ORANGE, points: vec![(0.0, 0.0), (1.0, 2.0)], markers: true }],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("t &amp; t"));
        assert!(svg.contains(ORANGE));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn flat_series_still_renders() {
        let svg = line_chart(
            "flat",
            "x",
            "y",
            &[Series { name: "zero", color: BLUE, points: vec![(0.0, 0.0), (1.0, 0.0)], markers: false }],
        );
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn dendrogram_lists_every_leaf() {
        let m = DissimilarityMatrix64::from_upper(vec!["a".into(), "b".into(), "c".into()], &[1.0, 4.0, 4.0]).unwrap();
        let svg = dendrogram("d", &ward_cluster(&m));
        for l in ["a", "b", "c"] {
            assert!(svg.contains(&format!(">{l}</text>")));
        }
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
