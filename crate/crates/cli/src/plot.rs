use std::fmt::Write;

use qfisize::bounds::{PairBound, PairwiseScan};

pub const PAIRWISE_HEADER: &str = "center,gap,bound,low,high";

fn neff_range(p: &PairBound) -> (f64, f64) {
    p.bound
        .neff_interval()
        .map(|i| (i.low, i.high))
        .unwrap_or((p.bound.neff_lower, p.bound.neff_lower))
}

/// One row per pair: centre setting, index gap, N_eff bound and interval.
pub fn pairwise_csv(scan: &PairwiseScan) -> String {
    let mut out = format!("{PAIRWISE_HEADER}\n");
    for p in &scan.pairs {
        let (lo, hi) = neff_range(p);
        writeln!(out, "{},{},{},{},{}", p.center, p.gap, p.bound.neff_lower, lo, hi).unwrap();
    }
    out
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Scatter of pair bounds against pair centre with error bars, one colour
/// per gap.
pub fn pairwise_svg(scan: &PairwiseScan) -> String {
    let (w, h, m) = (640.0, 400.0, 50.0);
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min: f64 = 0.0;
    let mut y_max: f64 = 1.0;
    for p in &scan.pairs {
        let (lo, hi) = neff_range(p);
        x_min = x_min.min(p.center);
        x_max = x_max.max(p.center);
        y_min = y_min.min(lo);
        y_max = y_max.max(hi);
    }
    if !x_min.is_finite() || x_max <= x_min {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if !x_min.is_finite() {
        x_min = -1.0;
        x_max = 1.0;
    }
    let sx = |x: f64| m + (x - x_min) / (x_max - x_min) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y_min) / (y_max - y_min) * (h - 2.0 * m);

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r##"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"##,
        h - m,
        w - m
    )
    .unwrap();
    writeln!(out, r#"<line x1="{m}" x2="{}" y1="{y0}" y2="{y0}" stroke="gray" stroke-dasharray="4 3"/>"#, w - m, y0 = sy(0.0)).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">pair centre θ</text>"#, w / 2.0, h - 12.0).unwrap();
    writeln!(out, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">N_eff bound</text>"#, h / 2.0, h / 2.0).unwrap();
    for (v, anchor, x, y) in [
        (x_min, "start", sx(x_min), h - m + 16.0),
        (x_max, "end", sx(x_max), h - m + 16.0),
    ] {
        writeln!(out, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3}</text>"#).unwrap();
    }
    for v in [y_min, y_max] {
        writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{v:.1}</text>"#, m - 4.0, sy(v) + 4.0).unwrap();
    }
    for p in &scan.pairs {
        let c = COLORS[(p.gap - 1) % COLORS.len()];
        let (lo, hi) = neff_range(p);
        let x = sx(p.center);
        writeln!(out, r#"<line x1="{x:.2}" x2="{x:.2}" y1="{:.2}" y2="{:.2}" stroke="{c}" stroke-opacity="0.5"/>"#, sy(lo), sy(hi)).unwrap();
        writeln!(out, r#"<circle cx="{x:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, sy(p.bound.neff_lower)).unwrap();
    }
    let gaps = scan.pairs.iter().map(|p| p.gap).max().unwrap_or(0);
    for g in 1..=gaps {
        let y = m + 14.0 * g as f64;
        writeln!(out, r#"<circle cx="{}" cy="{}" r="3" fill="{}"/><text x="{}" y="{}">gap {g}</text>"#, w - m - 50.0, y - 4.0, COLORS[(g - 1) % COLORS.len()], w - m - 42.0, y).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// `setting,model` on `points` evenly spaced settings.
pub fn curve_csv(lo: f64, hi: f64, points: usize, f: impl Fn(f64) -> f64) -> String {
    let mut out = String::from("setting,model\n");
    for i in 0..points {
        let t = if points == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (points - 1) as f64
        };
        writeln!(out, "{t},{}", f(t)).unwrap();
    }
    out
}
