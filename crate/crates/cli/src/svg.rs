//! Scatter plots as plain SVG text. Output depends only on the input, so
//! plots can be compared byte for byte.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const CURVE_SAMPLES: usize = 240;

/// A curve drawn over the points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Overlay {
    /// `x * y = product`.
    Hyperbola { product: u64, label: String },
    /// `y = value`.
    Horizontal { value: u64, label: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x: (u64, u64),
    pub y: (u64, u64),
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(axes: &Axes) -> Self {
        let widen = |(lo, hi): (u64, u64)| if hi > lo { (lo as f64, hi as f64) } else { (lo as f64, lo as f64 + 1.0) };
        Frame { x: widen(axes.x), y: widen(axes.y) }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        (self.x.0..=self.x.1).contains(&x) && (self.y.0..=self.y.1).contains(&y)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick spacing from the 1-2-5 series giving at most ten ticks.
fn tick_step(span: u64) -> u64 {
    let mut step = 1;
    loop {
        for m in [1, 2, 5] {
            if span / (step * m) <= 10 {
                return step * m;
            }
        }
        step *= 10;
    }
}

pub fn emit_scatter(points: &[(u64, u64)], overlays: &[Overlay], axes: &Axes) -> String {
    let f = Frame::new(axes);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(&axes.title));
    let (x0, x1, y0, y1) = (f.px(f.x.0), f.px(f.x.1), f.py(f.y.0), f.py(f.y.1));
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g font-size="10">"#);
    let (xs, ys) = (tick_step(axes.x.1.saturating_sub(axes.x.0)), tick_step(axes.y.1.saturating_sub(axes.y.0)));
    for t in (axes.x.0.div_ceil(xs) * xs..=axes.x.1).step_by(xs as usize) {
        let x = f.px(t as f64);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 4.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#, y0 + 16.0);
    }
    for t in (axes.y.0.div_ceil(ys) * ys..=axes.y.1).step_by(ys as usize) {
        let y = f.py(t as f64);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 4.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#, x0 - 7.0, y + 3.5);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(&axes.y_label)
    );
    for o in overlays {
        overlay(&mut s, &f, o);
    }
    let _ = writeln!(s, r##"<g fill="#1f4e9c">"##);
    for &(x, y) in points {
        if f.contains(x as f64, y as f64) {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#, f.px(x as f64), f.py(y as f64));
        }
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn overlay(s: &mut String, f: &Frame, o: &Overlay) {
    let (coords, label) = match o {
        Overlay::Horizontal { value, label } => {
            let y = *value as f64;
            if !(f.y.0..=f.y.1).contains(&y) {
                return;
            }
            (vec![(f.x.0, y), (f.x.1, y)], label)
        }
        Overlay::Hyperbola { product, label } => {
            let c = *product as f64;
            let start = f.x.0.max(c / f.y.1).max(f64::MIN_POSITIVE);
            let coords: Vec<(f64, f64)> = (0..=CURVE_SAMPLES)
                .map(|i| start + (f.x.1 - start) * i as f64 / CURVE_SAMPLES as f64)
                .map(|x| (x, c / x))
                .filter(|&(x, y)| f.contains(x, y))
                .collect();
            if coords.is_empty() {
                return;
            }
            (coords, label)
        }
    };
    let path: Vec<String> = coords.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#c0392b" stroke-width="1.5" points="{}"/>"##, path.join(" "));
    let &(lx, ly) = coords.last().expect("nonempty");
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" fill="#c0392b">{}</text>"##,
        f.px(lx) + 6.0,
        f.py(ly) + 4.0,
        escape(label)
    );
}

fn pow2(d: usize) -> u64 {
    1 << d
}

/// Achievable `(|A|, |B|)` with the hyperbola `xy = (d+1) 2^d`.
pub fn sizes_figure(d: usize, points: &[(usize, usize)]) -> String {
    let top = points.iter().map(|&(m, n)| m.max(n) as u64).max().unwrap_or(0).max(pow2(d)) + 2;
    let lo = d.saturating_sub(2) as u64;
    let product = (d as u64 + 1) * pow2(d);
    let pts: Vec<(u64, u64)> = points.iter().map(|&(m, n)| (m as u64, n as u64)).collect();
    emit_scatter(
        &pts,
        &[Overlay::Hyperbola { product, label: format!("xy = {product}") }],
        &Axes {
            title: format!("Possible sizes of families, d = {d}"),
            x_label: "|A|".into(),
            y_label: "|B|".into(),
            x: (lo, top),
            y: (lo, top),
        },
    )
}

/// `(min(|A|,|B|), |A||B|)` with the lines `y = (d+1) 2^d` and
/// `y = d 2^d + 2d`.
pub fn min_product_figure(d: usize, points: &[(usize, usize)]) -> String {
    let general = (d as u64 + 1) * pow2(d);
    let stability = d as u64 * pow2(d) + 2 * d as u64;
    let x_hi = points.iter().map(|p| p.0 as u64).max().unwrap_or(d as u64 + 2) + 2;
    let y_hi = points.iter().map(|p| p.1 as u64).max().unwrap_or(0).max(general) * 9 / 8 + 1;
    let pts: Vec<(u64, u64)> = points.iter().map(|&(m, p)| (m as u64, p as u64)).collect();
    emit_scatter(
        &pts,
        &[
            Overlay::Horizontal { value: general, label: format!("y = {general}") },
            Overlay::Horizontal { value: stability, label: format!("y = {stability}") },
        ],
        &Axes {
            title: format!("Smaller side against product, d = {d}"),
            x_label: "min(|A|, |B|)".into(),
            y_label: "|A| |B|".into(),
            x: (d.saturating_sub(2) as u64, x_hi),
            y: (0, y_hi),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks() {
        assert_eq!(tick_step(5), 1);
        assert_eq!(tick_step(31), 5);
        assert_eq!(tick_step(216), 20);
        assert_eq!(tick_step(250), 50);
        assert_eq!(tick_step(0), 1);
    }

    #[test]
    fn empty_is_axes_only() {
        let axes = Axes { title: "t".into(), x_label: "x".into(), y_label: "y".into(), x: (0, 10), y: (0, 10) };
        let s = emit_scatter(&[], &[], &axes);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(!s.contains("<circle") && !s.contains("<polyline"));
        assert_eq!(s, emit_scatter(&[], &[], &axes));
    }

    #[test]
    fn overlays_are_clipped() {
        let axes = Axes { title: "a<b".into(), x_label: "x".into(), y_label: "y".into(), x: (1, 10), y: (1, 10) };
        let s = emit_scatter(
            &[(2, 3), (50, 50)],
            &[
                Overlay::Hyperbola { product: 12, label: "xy".into() },
                Overlay::Horizontal { value: 99, label: "off".into() },
            ],
            &axes,
        );
        assert_eq!(s.matches("<circle").count(), 1);
        assert_eq!(s.matches("<polyline").count(), 1);
        assert!(s.contains("a&lt;b"));
    }

    #[test]
    fn degenerate_range() {
        let axes = Axes { title: String::new(), x_label: String::new(), y_label: String::new(), x: (3, 3), y: (0, 0) };
        assert!(!emit_scatter(&[(3, 0)], &[], &axes).contains("NaN"));
    }
}
