//! Minimal SVG line charts on the unit square.

use std::fmt::Write;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 7] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"];

/// Both axes span [0, 1]. Series cycle through a fixed palette and dash pattern.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let plot = SIZE - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + x * plot;
    let py = |y: f64| SIZE - MARGIN - y * plot;
    let legend_h = 16.0 * series.len() as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#,
        w = SIZE + 180.0,
        h = SIZE.max(MARGIN + legend_h + 20.0)
    );
    let _ =
        writeln!(s, r#"<text x="{}" y="24" font-size="14" text-anchor="middle">{}</text>"#, SIZE / 2.0, escape(title));
    let _ =
        writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#);
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{v:.1}</text>"#, px(v), SIZE - MARGIN + 16.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{v:.1}</text>"#, MARGIN - 6.0, py(v) + 4.0);
    }
    let _ =
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, SIZE / 2.0, SIZE - 16.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{y}" text-anchor="middle" transform="rotate(-90 16 {y})">{}</text>"#,
        escape(y_label),
        y = SIZE / 2.0
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if (i / PALETTE.len()) % 2 == 1 { r#" stroke-dasharray="5 3""# } else { "" };
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{x0}" y1="{ly}" x2="{x1}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/><text x="{xt}" y="{yt}">{}</text>"#,
            escape(&ser.label),
            x0 = SIZE + 4.0,
            x1 = SIZE + 24.0,
            xt = SIZE + 30.0,
            yt = ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
