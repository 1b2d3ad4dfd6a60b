//! Static SVG figures: the `Z(t)` staircase, zero curves in the `(x, t)`
//! plane and front paths.

use std::fmt::Write as _;

use crate::solver::FrontSample;
use crate::zeros::ZeroTrace;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

/// Maps data boxes to the drawing area, y axis upwards.
struct Canvas {
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

impl Canvas {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        Canvas { x: widen(x), y: widen(y), body: String::new() }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD)
    }

    fn polyline(&mut self, pts: impl Iterator<Item = (f64, f64)>, color: &str) {
        let coords: Vec<String> = pts.map(|(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
        if coords.len() > 1 {
            let _ = writeln!(self.body, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        }
    }

    fn finish(self, title: &str, xlabel: &str, ylabel: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(s, r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{title}</text>"#, W / 2.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{xlabel}</text>"#, W / 2.0, H - 12.0);
        let _ = writeln!(
            s,
            r#"<text x="14" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {})">{ylabel}</text>"#,
            H / 2.0,
            H / 2.0
        );
        for (v, anchor, x, y) in [
            (self.x.0, "start", PAD, H - PAD + 15.0),
            (self.x.1, "end", W - PAD, H - PAD + 15.0),
        ] {
            let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="10">{v:.4}</text>"#);
        }
        for (v, y) in [(self.y.0, H - PAD), (self.y.1, PAD + 10.0)] {
            let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end" font-size="10">{v:.4}</text>"#, PAD - 4.0);
        }
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

fn span(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

/// Step plot of `Z(t)`.
pub fn z_staircase_svg(zt: &ZeroTrace) -> String {
    let times = zt.times();
    let counts = zt.counts();
    let zmax = counts.iter().copied().max().unwrap_or(0) as f64;
    let mut c = Canvas::new(span(times.iter().copied()), (0.0, zmax + 1.0));
    let mut pts = Vec::with_capacity(2 * times.len());
    for k in 0..times.len() {
        if k > 0 {
            pts.push((times[k], counts[k - 1] as f64));
        }
        pts.push((times[k], counts[k] as f64));
    }
    c.polyline(pts.into_iter(), "steelblue");
    c.finish("zero number Z(t)", "t", "Z")
}

/// Zero curves `x = γ(t)`, drawn with `x` across and `t` upwards.
pub fn zero_curves_svg(zt: &ZeroTrace) -> String {
    let times = zt.times();
    let (lo, hi) = zt.inventories.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), i| (a.min(i.interval.0), b.max(i.interval.1)));
    let mut c = Canvas::new((lo, hi), span(times.iter().copied()));
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for curve in &zt.curves {
        let pts = curve.locations.iter().enumerate().map(|(k, &x)| (x, times[curve.start + k]));
        c.polyline(pts, palette[curve.id % palette.len()]);
    }
    for d in &zt.drops {
        for w in &d.witnesses {
            let _ = writeln!(
                c.body,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#,
                c.px(w.location()),
                c.py(d.t_after)
            );
        }
    }
    c.finish("zero curves", "x", "t")
}

/// `g(t)` and `h(t)` with `x` across and `t` upwards.
pub fn fronts_svg(fronts: &[FrontSample]) -> String {
    let xs = span(fronts.iter().flat_map(|f| [f.g, f.h]));
    let mut c = Canvas::new(xs, span(fronts.iter().map(|f| f.t)));
    c.polyline(fronts.iter().map(|f| (f.g, f.t)), "firebrick");
    c.polyline(fronts.iter().map(|f| (f.h, f.t)), "firebrick");
    c.finish("free boundaries", "x", "t")
}
