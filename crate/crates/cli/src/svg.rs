//! Minimal deterministic SVG emitters: diverging heatmap, scatter overlay
//! and line plot. No timestamps, fixed number formatting.

use std::fmt::Write;

use ridgelab::experiments::Spectrum;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 90.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const NEG: (f64, f64, f64) = (59.0, 76.0, 192.0);
const POS: (f64, f64, f64) = (180.0, 4.0, 38.0);

/// Blue below zero, white at zero, red above; `t` in [-1, 1].
pub fn diverging(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let end = if t < 0.0 { NEG } else { POS };
    let s = t.abs();
    let mix = |c: f64| (255.0 + s * (c - 255.0)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(end.0), mix(end.1), mix(end.2))
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (x0, x1) = (f.px(f.x.0), f.px(f.x.1));
    let (y0, y1) = (f.py(f.y.0), f.py(f.y.1));
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = f.x.0 + t * (f.x.1 - f.x.0);
        let yv = f.y.0 + t * (f.y.1 - f.y.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            f.px(xv),
            y0 + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            f.py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Vertical colorbar from -vmax to vmax.
fn colorbar(out: &mut String, vmax: f64, label: &str) {
    let x = WIDTH - RIGHT + 20.0;
    let steps = 50;
    let h = (HEIGHT - TOP - BOTTOM) / steps as f64;
    for k in 0..steps {
        let t = 1.0 - 2.0 * (k as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            TOP + k as f64 * h,
            h + 0.3,
            diverging(t)
        );
    }
    for (t, y) in [
        (vmax, TOP),
        (0.0, (HEIGHT - BOTTOM + TOP) / 2.0),
        (-vmax, HEIGHT - BOTTOM),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 18.0,
            y + 4.0,
            short(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        x + 7.0,
        TOP - 8.0,
        escape(label)
    );
}

fn short(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 0.01 && v.abs() < 1000.0 {
        tick(v)
    } else {
        format!("{v:.1e}")
    }
}

fn grid_edges(points: &[f64]) -> Vec<f64> {
    if points.len() == 1 {
        return vec![points[0] - 0.5, points[0] + 0.5];
    }
    let mut edges = Vec::with_capacity(points.len() + 1);
    edges.push(points[0] - 0.5 * (points[1] - points[0]));
    for w in points.windows(2) {
        edges.push(0.5 * (w[0] + w[1]));
    }
    let n = points.len();
    edges.push(points[n - 1] + 0.5 * (points[n - 1] - points[n - 2]));
    edges
}

fn heatmap_body(out: &mut String, spec: &Spectrum) -> Frame {
    let ae = grid_edges(spec.a_grid());
    let be = grid_edges(spec.b_grid());
    let frame = Frame {
        x: (ae[0], ae[ae.len() - 1]),
        y: (be[0], be[be.len() - 1]),
    };
    let vmax = spec.max_abs();
    for ia in 0..spec.a_grid().len() {
        for ib in 0..spec.b_grid().len() {
            let v = spec.get(ia, ib);
            let t = if vmax > 0.0 { v / vmax } else { 0.0 };
            let (x0, x1) = (frame.px(ae[ia]), frame.px(ae[ia + 1]));
            let (y0, y1) = (frame.py(be[ib]), frame.py(be[ib + 1]));
            let _ = writeln!(
                out,
                r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x1 - x0 + 0.3,
                y0 - y1 + 0.3,
                diverging(t)
            );
        }
    }
    axes(out, &frame, "a", "b");
    colorbar(out, vmax, "value");
    frame
}

/// Heatmap of a spectrum over (a, b), colors centered at 0.
pub fn heatmap(spec: &Spectrum, title: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    heatmap_body(&mut out, spec);
    out.push_str("</svg>\n");
    out
}

/// Heatmap with (a, b, c) points overlaid; points are colored by c on
/// their own symmetric scale and outlined so they stand out.
pub fn heatmap_with_scatter(spec: &Spectrum, points: &[(f64, f64, f64)], title: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let frame = heatmap_body(&mut out, spec);
    let cmax = points.iter().fold(0.0f64, |m, p| m.max(p.2.abs()));
    for &(a, b, c) in points {
        if a < frame.x.0 || a > frame.x.1 || b < frame.y.0 || b > frame.y.1 {
            continue;
        }
        let t = if cmax > 0.0 { c / cmax } else { 0.0 };
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}" stroke="black" stroke-width="0.4"/>"#,
            frame.px(a),
            frame.py(b),
            diverging(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">points: c in [{}, {}]</text>"#,
        WIDTH - RIGHT,
        HEIGHT - 12.0,
        short(-cmax),
        short(cmax)
    );
    out.push_str("</svg>\n");
    out
}

/// Data as dots and a fitted curve as a polyline.
pub fn line_plot(data: &[(f64, f64)], curve: &[(f64, f64)], title: &str) -> String {
    let all = data.iter().chain(curve);
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        xlo = xlo.min(x);
        xhi = xhi.max(x);
        ylo = ylo.min(y);
        yhi = yhi.max(y);
    }
    if !(xlo < xhi) {
        xlo -= 1.0;
        xhi += 1.0;
    }
    if !(ylo < yhi) {
        ylo -= 1.0;
        yhi += 1.0;
    }
    let pad = 0.05 * (yhi - ylo);
    let frame = Frame {
        x: (xlo, xhi),
        y: (ylo - pad, yhi + pad),
    };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, "x", "y");
    for &(x, y) in data {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="#888888"/>"##,
            frame.px(x),
            frame.py(y)
        );
    }
    if !curve.is_empty() {
        let pts: Vec<String> = curve
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            pts.join(" "),
            diverging(1.0)
        );
    }
    out.push_str("</svg>\n");
    out
}
