//! Hand-written SVG scatter plot of countries in a principal-component plane.

use std::fmt::Write as _;

use nql_core::vector::dot;
use nql_core::{FittedModel, StandardizedMatrix};

use crate::run_config::Axes;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
pub const MARGIN: f64 = 0.05;

const POINT_RADIUS: f64 = 3.0;

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

struct Scale {
    lo: f64,
    span: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64> + Clone, from: f64, to: f64) -> Self {
        let lo = values.clone().fold(f64::INFINITY, f64::min);
        let hi = values.fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        Self { lo, span, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / self.span * (self.to - self.from)
    }
}

fn axis_label(model: &FittedModel, axis: usize) -> String {
    let share = model.basis.eigenvalues()[axis - 1] / model.basis.total_variance();
    format!("PC{axis} ({:.1}%)", 100.0 * share)
}

/// Renders `matrix` (already in the model's z-space) and the model's chain.
/// The matrix must be non-empty.
pub fn render(model: &FittedModel, matrix: &StandardizedMatrix, axes: Axes) -> String {
    let (u, v) = (model.basis.component(axes.0 - 1), model.basis.component(axes.1 - 1));
    let points: Vec<(f64, f64)> = matrix.rows().iter().map(|r| (dot(r, u), dot(r, v))).collect();
    let chain: Vec<(f64, f64)> = model.chain.nodes().iter().map(|n| (dot(n, u), dot(n, v))).collect();

    let (mx, my) = (MARGIN * WIDTH, MARGIN * HEIGHT);
    let all = points.iter().chain(&chain);
    let sx = Scale::new(all.clone().map(|p| p.0), mx, WIDTH - mx);
    let sy = Scale::new(all.map(|p| p.1), HEIGHT - my, my);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{mx}" y1="{y}" x2="{x2}" y2="{y}"/><line x1="{mx}" y1="{my}" x2="{mx}" y2="{y}"/></g>"#,
        y = HEIGHT - my,
        x2 = WIDTH - mx,
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - my / 4.0,
        axis_label(model, axes.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle" font-size="14" transform="rotate(-90 {x} {y})">{}</text>"#,
        axis_label(model, axes.1),
        x = mx / 2.0,
        y = HEIGHT / 2.0,
    );

    let _ = writeln!(s, r#"<g fill="steelblue" fill-opacity="0.7">"#);
    for ((x, y), name) in points.iter().zip(matrix.names()) {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{POINT_RADIUS}"><title>{}</title></circle>"#,
            sx.map(*x),
            sy.map(*y),
            escape(name)
        );
    }
    let _ = writeln!(s, "</g>");

    let coords: Vec<String> = chain
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", sx.map(*x), sy.map(*y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="red" stroke-width="2"/>"#,
        coords.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("Côte d'Ivoire & <x>"), "Côte d&apos;Ivoire &amp; &lt;x&gt;");
    }

    #[test]
    fn scale_maps_range_onto_box() {
        let s = Scale::new([2.0, 4.0, 3.0].into_iter(), 40.0, 760.0);
        assert_eq!(s.map(2.0), 40.0);
        assert_eq!(s.map(4.0), 760.0);
        let flat = Scale::new([5.0, 5.0].into_iter(), 570.0, 30.0);
        assert_eq!(flat.map(5.0), 570.0);
    }
}
