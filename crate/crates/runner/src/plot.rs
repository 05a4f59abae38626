//! Minimal SVG rendering of the report tables.
//!
//! ECDF curves use a log-scaled x axis (evaluations per dimension) and a linear y axis.
//! Scaling plots are log-log, with one polyline per target.

use std::fmt::Write as _;

use crate::report::{EcdfCurve, ScalingTable};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn frame(out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0,
        escape(xlabel)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
}

fn x_tick(out: &mut String, axes: &Axes, x: f64, label: &str) {
    let px = axes.px(x);
    let y0 = HEIGHT - MARGIN;
    writeln!(
        out,
        r##"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{label}</text>"##,
        y0 + 5.0,
        y0 + 18.0
    )
    .unwrap();
}

fn y_tick(out: &mut String, axes: &Axes, y: f64, label: &str) {
    let py = axes.py(y);
    writeln!(
        out,
        r##"<line x1="{}" y1="{py:.2}" x2="{MARGIN}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="10">{label}</text>"##,
        MARGIN - 5.0,
        MARGIN - 8.0,
        py + 3.0
    )
    .unwrap();
}

fn polyline(out: &mut String, axes: &Axes, points: &[(f64, f64)], color: &str) {
    if points.is_empty() {
        return;
    }
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", axes.px(x), axes.py(y)))
        .collect();
    writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

fn decade_ticks(lo: f64, hi: f64) -> impl Iterator<Item = i32> {
    (lo.floor() as i32..=hi.ceil() as i32).filter(move |e| (*e as f64) >= lo && (*e as f64) <= hi)
}

/// Step plot of the fraction of solved (run, target) pairs.
pub fn ecdf_svg(curve: &EcdfCurve) -> String {
    let xs: Vec<f64> = curve.points.iter().map(|p| p.0.log10()).collect();
    let lo = xs.first().copied().unwrap_or(0.0);
    let hi = xs.last().copied().unwrap_or(1.0).max(lo + 1.0);
    let axes = Axes {
        x: (lo, hi),
        y: (0.0, 1.0),
    };

    let mut out = String::new();
    frame(
        &mut out,
        &format!("{} functions, D = {}", curve.group.slug(), curve.dimension),
        "log10(evaluations / D)",
        "fraction of (run, target) pairs",
    );
    for e in decade_ticks(lo, hi) {
        x_tick(&mut out, &axes, e as f64, &e.to_string());
    }
    for k in 0..=4 {
        let y = k as f64 / 4.0;
        y_tick(&mut out, &axes, y, &format!("{y}"));
    }
    let mut steps = Vec::with_capacity(2 * xs.len());
    for (i, (&x, &(_, y))) in xs.iter().zip(&curve.points).enumerate() {
        if i > 0 {
            steps.push((x, curve.points[i - 1].1));
        }
        steps.push((x, y));
    }
    polyline(&mut out, &axes, &steps, PALETTE[0]);
    out.push_str("</svg>\n");
    out
}

/// Log-log average runtime against dimension, one line per target reached at least once.
pub fn scaling_svg(table: &ScalingTable) -> String {
    let mut targets: Vec<f64> = Vec::new();
    for &(t, _, _) in &table.rows {
        if !targets.iter().any(|&u| u.to_bits() == t.to_bits()) {
            targets.push(t);
        }
    }
    let finite: Vec<&(f64, usize, f64)> = table.rows.iter().filter(|r| r.2.is_finite()).collect();
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &&(_, d, art) in &finite {
        let (x, y) = ((d as f64).log10(), art.max(1.0).log10());
        xlo = xlo.min(x);
        xhi = xhi.max(x);
        ylo = ylo.min(y);
        yhi = yhi.max(y);
    }
    if finite.is_empty() {
        (xlo, xhi, ylo, yhi) = (0.0, 1.0, 0.0, 1.0);
    }
    let axes = Axes {
        x: (xlo.floor().min(xlo - 0.05), xhi.max(xlo + 0.5) + 0.05),
        y: (ylo.floor(), yhi.ceil().max(ylo.floor() + 1.0)),
    };

    let mut out = String::new();
    frame(
        &mut out,
        &format!("f{}: aRT scaling", table.function),
        "dimension",
        "log10(aRT)",
    );
    let mut dims: Vec<usize> = table.rows.iter().map(|r| r.1).collect();
    dims.sort_unstable();
    dims.dedup();
    for d in dims {
        x_tick(&mut out, &axes, (d as f64).log10(), &d.to_string());
    }
    for e in decade_ticks(axes.y.0, axes.y.1) {
        y_tick(&mut out, &axes, e as f64, &e.to_string());
    }
    for (k, t) in targets.iter().enumerate() {
        let line: Vec<(f64, f64)> = finite
            .iter()
            .filter(|r| r.0.to_bits() == t.to_bits())
            .map(|r| ((r.1 as f64).log10(), r.2.max(1.0).log10()))
            .collect();
        polyline(&mut out, &axes, &line, PALETTE[k % PALETTE.len()]);
    }
    out.push_str("</svg>\n");
    out
}
