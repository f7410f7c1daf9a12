//! Log-log scatter plots as plain SVG.

use std::fmt::Write;

use crate::error::{Error, Result};

use super::fit::fit_exponent;

/// One series; `None` values are ∞ and only counted.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, Option<f64>)>,
}

#[derive(Clone, Debug, Default)]
pub struct Axes {
    pub title: String,
    pub x: String,
    pub y: String,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Log-log scatter with a fitted line per series. Same input, same bytes.
pub fn emit_plot(series: &[Series], axes: &Axes) -> Result<String> {
    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().filter_map(|&(x, y)| y.filter(|&y| y > 0.0 && x > 0.0).map(|y| (x, y))))
        .collect();
    if finite.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let (lx0, lx1) = span(finite.iter().map(|p| p.0.ln()));
    let (ly0, ly1) = span(finite.iter().map(|p| p.1.ln()));
    let px = |x: f64| PAD + (x.ln() - lx0) / (lx1 - lx0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y.ln() - ly0) / (ly1 - ly0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(s, r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="16">{}</text>"#, W / 2.0, esc(&axes.title));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{} (log)</text>"#, W / 2.0, H - 16.0, esc(&axes.x));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{} (log)</text>"#,
        H / 2.0,
        H / 2.0,
        esc(&axes.y)
    );
    for (i, (lo, hi)) in [(lx0, lx1), (ly0, ly1)].into_iter().enumerate() {
        for v in [lo, hi] {
            let label = format!("{:.3}", v.exp());
            if i == 0 {
                let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11">{label}</text>"#, px(v.exp()), H - PAD + 16.0);
            } else {
                let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{label}</text>"#, PAD - 4.0, py(v.exp()) + 4.0);
            }
        }
    }
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> =
            ser.points.iter().filter_map(|&(x, y)| y.filter(|&y| y > 0.0 && x > 0.0).map(|y| (x, y))).collect();
        for &(x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="{color}"/>"#, px(x), py(y));
        }
        let mut legend = ser.label.clone();
        // points must be sorted for the fit; plots should not care
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        sorted.dedup_by(|a, b| a.0 == b.0);
        if let Ok(f) = fit_exponent(&sorted) {
            let (a, b) = (sorted[0].0, sorted[sorted.len() - 1].0);
            let line = |x: f64| (f.intercept + f.slope * x.ln()).exp();
            let _ = writeln!(
                s,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-dasharray="4 3"/>"#,
                px(a),
                py(line(a)),
                px(b),
                py(line(b))
            );
            legend += &format!(" (slope {:.2})", f.slope);
        }
        let inf = ser.points.iter().filter(|p| p.1.is_none()).count();
        if inf > 0 {
            legend += &format!(" [{inf} infinite]");
        }
        let y = PAD + 4.0 + 18.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/>"#, PAD + 10.0, y);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#, PAD + 26.0, y + 9.0, esc(&legend));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn span(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares() -> Series {
        Series { label: "fill".into(), points: [4.0, 8.0, 16.0, 32.0].iter().map(|&s| (4.0 * s, Some(2.0 * s * s))).collect() }
    }

    #[test]
    fn slope_is_annotated() {
        let svg = emit_plot(&[squares()], &Axes::default()).unwrap();
        assert!(svg.contains("slope 2.00"));
        assert_eq!(svg, emit_plot(&[squares()], &Axes::default()).unwrap());
    }

    #[test]
    fn two_series_and_infinite_points() {
        let mut other = squares();
        other.label = "restricted".into();
        other.points.push((200.0, None));
        let svg = emit_plot(&[squares(), other], &Axes::default()).unwrap();
        assert!(svg.contains("restricted"));
        assert!(svg.contains("[1 infinite]"));
    }

    #[test]
    fn nothing_to_plot() {
        assert!(matches!(emit_plot(&[], &Axes::default()), Err(Error::EmptyRecords)));
        let inf = Series { label: "x".into(), points: vec![(1.0, None)] };
        assert!(matches!(emit_plot(&[inf], &Axes::default()), Err(Error::EmptyRecords)));
    }
}
