//! Minimal static line charts.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
];

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values
        .filter(|v| v.is_finite())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

/// One polyline per series over the shared `xs`; non-finite points break the line.
pub fn line_chart(title: &str, x_label: &str, xs: &[f64], series: &[(String, Vec<f64>)]) -> String {
    let (x_lo, x_hi) = finite_range(xs.iter().copied()).unwrap_or((0.0, 1.0));
    let (y_lo, y_hi) =
        finite_range(series.iter().flat_map(|(_, ys)| ys.iter().copied())).unwrap_or((0.0, 1.0));
    let (y_lo, y_hi) = if y_hi > y_lo {
        (y_lo.min(0.0), y_hi)
    } else {
        (y_lo - 1.0, y_hi + 1.0)
    };
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let px = |x: f64| MARGIN + (x - x_lo) / x_span * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
        WIDTH / 2.0
    )
    .unwrap();
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(
        s,
        r#"<path d="M{left},{top} L{left},{bottom} L{right},{bottom}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for (v, anchor_y) in [(y_lo, bottom), (y_hi, top)] {
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{v:.4}</text>"#,
            left - 6.0,
            anchor_y + 4.0
        )
        .unwrap();
    }
    for (v, anchor_x) in [(x_lo, left), (x_hi, right)] {
        writeln!(
            s,
            r#"<text x="{anchor_x}" y="{}" text-anchor="middle">{v}</text>"#,
            bottom + 18.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    )
    .unwrap();

    for (i, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for (&x, &y) in xs.iter().zip(ys) {
            if !(x.is_finite() && y.is_finite()) {
                pen_down = false;
                continue;
            }
            write!(
                d,
                "{}{:.2},{:.2} ",
                if pen_down { "L" } else { "M" },
                px(x),
                py(y)
            )
            .unwrap();
            pen_down = true;
        }
        writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            d.trim_end()
        )
        .unwrap();
        let ly = top + 16.0 * i as f64;
        writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}">{name}</text>"#,
            right - 90.0
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
