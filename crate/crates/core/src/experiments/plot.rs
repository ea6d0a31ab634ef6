//! Minimal self-contained SVG log-log plots. Each point is embedded as a
//! `<circle>` carrying its data in `data-x`/`data-y` attributes.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Plots each series on log-log axes; nonpositive values are omitted. An
/// optional reference slope is drawn through the first point of the first
/// series.
pub fn loglog_svg(
    title: &str,
    xlabel: &str,
    series: &[(&str, &[(f64, f64)])],
    reference_slope: Option<f64>,
) -> String {
    let logs: Vec<Vec<(f64, f64, f64, f64)>> = series
        .iter()
        .map(|(_, pts)| {
            pts.iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
                .map(|&(x, y)| (x.log10(), y.log10(), x, y))
                .collect()
        })
        .collect();
    let all: Vec<_> = logs.iter().flatten().collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    if all.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif">no positive data</text>"#,
            W / 2.0,
            H / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &all {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y0 = y0.min(p.1);
        y1 = y1.max(p.1);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let _ = writeln!(
        svg,
        r#"<g stroke="black" fill="none"><rect x="{PAD}" y="{PAD}" width="{}" height="{}"/></g>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for d in x0 as i32..=x1 as i32 {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">1e{d}</text>"#,
            sx(d as f64),
            H - PAD + 16.0
        );
    }
    for d in y0 as i32..=y1 as i32 {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">1e{d}</text>"#,
            PAD - 6.0,
            sy(d as f64) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        W / 2.0,
        H - 18.0,
        escape(xlabel)
    );

    if let (Some(slope), Some(first)) = (reference_slope, logs.first().and_then(|s| s.first())) {
        let y_at = |x: f64| first.1 + slope * (x - first.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#888" stroke-dasharray="6 4"><title>slope {slope}</title></line>"##,
            sx(first.0),
            sy(y_at(first.0)),
            sx(x1),
            sy(y_at(x1)),
        );
    }
    for (k, ((name, _), pts)) in series.iter().zip(&logs).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.1},{:.1}", sx(p.0), sy(p.1)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" points="{}"/>"#,
            path.join(" ")
        );
        for p in pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}" data-x="{:?}" data-y="{:?}"/>"#,
                sx(p.0),
                sy(p.1),
                p.2,
                p.3
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            W - PAD - 90.0,
            PAD + 18.0 + 16.0 * k as f64,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeds_positive_points_only() {
        let pts = [(1.0, 1.0), (2.0, 0.5), (4.0, 0.0)];
        let svg = loglog_svg("t", "T", &[("gap", &pts)], Some(-0.5));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains(r#"data-y="0.5""#));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_series_still_renders() {
        let svg = loglog_svg("t", "T", &[("gap", &[(1.0, 0.0)])], None);
        assert!(svg.contains("no positive data"));
    }
}
