//! SVG rendering on the 1/64 grid. Every coordinate is written as the exact
//! decimal of a multiple of 1/64, so the same layout gives the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write;

use crown::rational::{q, qf};
use crown::{BoxId, Layout, Q};

const GRID: i128 = 64;

/// `v` rounded to the nearest 1/64 (half away from zero), as a terse decimal.
pub fn grid_decimal(v: &Q) -> String {
    let scaled = *v * q(GRID);
    let n = scaled.round().to_integer();
    // 1/64 = 0.015625, six digits are always exact.
    let micro = n * 15625;
    let sign = if micro < 0 { "-" } else { "" };
    let (int, frac) = (micro.abs() / 1_000_000, micro.abs() % 1_000_000);
    if frac == 0 {
        format!("{sign}{int}")
    } else {
        let digits = format!("{frac:06}");
        format!("{sign}{int}.{}", digits.trim_end_matches('0'))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render(layout: &Layout, labels: &BTreeMap<BoxId, String>) -> String {
    let mut out = String::new();
    let Some(bb) = layout.bounding_box() else {
        out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\"></svg>\n");
        return out;
    };
    let pad = |extent: Q| if extent > q(0) { extent * qf(1, 20) } else { q(1) };
    let (mx, my) = (pad(bb.width()), pad(bb.height()));
    let (vx, vy) = (bb.x0 - mx, -(bb.y1 + my));
    let (vw, vh) = (bb.width() + mx * 2, bb.height() + my * 2);
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        grid_decimal(&vx),
        grid_decimal(&vy),
        grid_decimal(&vw),
        grid_decimal(&vh)
    );
    let stroke = grid_decimal(&(bb.width().max(bb.height()) / q(400)).max(qf(1, GRID)));
    for (id, p) in layout.iter() {
        // Screen y grows downward: a box spanning [y, top] maps to [-top, -y].
        let _ = writeln!(
            out,
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#e8eef7\" stroke=\"#2b4a7a\" stroke-width=\"{stroke}\"/>",
            grid_decimal(&p.x),
            grid_decimal(&-p.top()),
            grid_decimal(&p.width),
            grid_decimal(&p.height)
        );
        let label = labels.get(id).map(String::as_str).unwrap_or(id.as_str());
        let cx = p.x + p.width / q(2);
        let cy = -(p.y + p.height / q(2));
        let _ = writeln!(
            out,
            "  <text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\" font-family=\"sans-serif\">{}</text>",
            grid_decimal(&cx),
            grid_decimal(&cy),
            grid_decimal(&(p.height * qf(3, 4))),
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}
