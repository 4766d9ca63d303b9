//! Minimal deterministic SVG charts: grouped bars and box-and-whisker panels.

use std::fmt::Write;

use crate::stats::BoxplotStats;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

struct Canvas {
    out: String,
    lo: f64,
    hi: f64,
}

impl Canvas {
    fn new(title: &str, y_label: &str, lo: f64, hi: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, lo + 1.0) };
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(y_label)
        );
        let mut c = Self { out, lo, hi };
        c.axes();
        c
    }

    fn y(&self, v: f64) -> f64 {
        let h = HEIGHT - TOP - BOTTOM;
        HEIGHT - BOTTOM - (v - self.lo) / (self.hi - self.lo) * h
    }

    fn axes(&mut self) {
        let (x0, x1, y0) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM);
        let _ = writeln!(self.out, r#"<line x1="{x0}" y1="{TOP}" x2="{x0}" y2="{y0}" stroke="black"/>"#);
        let _ = writeln!(self.out, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
        for i in 0..=4 {
            let v = self.lo + (self.hi - self.lo) * i as f64 / 4.0;
            let y = self.y(v);
            let _ = writeln!(
                self.out,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{x0}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
                x0 - 4.0,
                x0 - 6.0,
                y + 4.0,
                tick(v)
            );
        }
    }

    fn x_label(&mut self, x: f64, text: &str) {
        let _ = writeln!(
            self.out,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            HEIGHT - BOTTOM + 16.0,
            escape(text)
        );
    }

    fn legend(&mut self, names: &[String]) {
        for (i, name) in names.iter().enumerate() {
            let x = LEFT + 10.0 + 110.0 * i as f64;
            let y = HEIGHT - 18.0;
            let _ = writeln!(
                self.out,
                r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{y:.1}">{}</text>"#,
                y - 9.0,
                color(i),
                x + 14.0,
                escape(name)
            );
        }
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

/// Bars for `series[s][c]` grouped by category `c`.
pub fn grouped_bars(
    title: &str,
    y_label: &str,
    categories: &[String],
    series_names: &[String],
    series: &[Vec<f64>],
) -> String {
    let all = series.iter().flatten().copied();
    let lo = all.clone().fold(0.0_f64, f64::min);
    let hi = all.fold(0.0_f64, f64::max);
    let mut c = Canvas::new(title, y_label, lo, hi);
    let n_cat = categories.len().max(1);
    let slot = (WIDTH - LEFT - RIGHT) / n_cat as f64;
    let bar = 0.8 * slot / series.len().max(1) as f64;
    let zero = c.y(0.0);
    let label_every = n_cat.div_ceil(16);
    for (ci, cat) in categories.iter().enumerate() {
        let x0 = LEFT + slot * ci as f64 + 0.1 * slot;
        for (si, values) in series.iter().enumerate() {
            let v = values.get(ci).copied().unwrap_or(0.0);
            let y = c.y(v);
            let _ = writeln!(
                c.out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x0 + bar * si as f64,
                y.min(zero),
                bar,
                (zero - y).abs(),
                color(si)
            );
        }
        if ci % label_every == 0 {
            c.x_label(LEFT + slot * (ci as f64 + 0.5), cat);
        }
    }
    c.legend(series_names);
    c.finish()
}

/// One box per group, Tukey whiskers, outliers as open circles.
pub fn boxplots(title: &str, y_label: &str, groups: &[(String, BoxplotStats)]) -> String {
    let lo = groups.iter().map(|(_, b)| b.min).fold(f64::INFINITY, f64::min);
    let hi = groups.iter().map(|(_, b)| b.max).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let pad = 0.05 * (hi - lo);
    let mut c = Canvas::new(title, y_label, lo - pad, hi + pad);
    let slot = (WIDTH - LEFT - RIGHT) / groups.len().max(1) as f64;
    let label_every = groups.len().div_ceil(16);
    for (i, (name, b)) in groups.iter().enumerate() {
        let mid = LEFT + slot * (i as f64 + 0.5);
        let half = 0.3 * slot;
        let (yq1, yq3, ym) = (c.y(b.q1), c.y(b.q3), c.y(b.median));
        let (ywl, ywh) = (c.y(b.whisker_low), c.y(b.whisker_high));
        let _ = writeln!(
            c.out,
            r##"<line x1="{mid:.2}" y1="{ywl:.2}" x2="{mid:.2}" y2="{yq1:.2}" stroke="black"/><line x1="{mid:.2}" y1="{yq3:.2}" x2="{mid:.2}" y2="{ywh:.2}" stroke="black"/>"##
        );
        for yw in [ywl, ywh] {
            let _ = writeln!(
                c.out,
                r#"<line x1="{:.2}" y1="{yw:.2}" x2="{:.2}" y2="{yw:.2}" stroke="black"/>"#,
                mid - half / 2.0,
                mid + half / 2.0
            );
        }
        let _ = writeln!(
            c.out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#dde6f3" stroke="black"/>"##,
            mid - half,
            yq3,
            2.0 * half,
            (yq1 - yq3).max(0.0)
        );
        let _ = writeln!(
            c.out,
            r#"<line x1="{:.2}" y1="{ym:.2}" x2="{:.2}" y2="{ym:.2}" stroke="red" stroke-width="2"/>"#,
            mid - half,
            mid + half
        );
        for &o in &b.outliers {
            let _ = writeln!(
                c.out,
                r#"<circle cx="{mid:.2}" cy="{:.2}" r="2.5" fill="none" stroke="black"/>"#,
                c.y(o)
            );
        }
        if i % label_every == 0 {
            c.x_label(mid, name);
        }
    }
    c.finish()
}
