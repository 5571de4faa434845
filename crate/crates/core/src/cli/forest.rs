//! SVG forest plot: one row per study in input order, then the fixed,
//! random and averaged estimates as diamonds.

use std::fmt::Write;

use crate::marginal::PosteriorSummary;
use crate::meta_core::Comparison;

const Z975: f64 = 1.959_963_984_540_054;
const WIDTH: f64 = 760.0;
const ROW: f64 = 24.0;
const TOP: f64 = 40.0;
const LABEL_X: f64 = 12.0;
const PLOT_LEFT: f64 = 230.0;
const PLOT_RIGHT: f64 = 590.0;
const TEXT_X: f64 = 605.0;

struct Row {
    label: String,
    estimate: f64,
    lower: f64,
    upper: f64,
    /// Marker half-size for studies; `None` draws a diamond.
    marker: Option<f64>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let f = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    f * mag
}

/// Renders the forest plot. Missing summaries are left out.
pub fn forest_svg(
    comparison: &Comparison,
    fixed: Option<&PosteriorSummary>,
    random: Option<&PosteriorSummary>,
    averaged: Option<&PosteriorSummary>,
) -> String {
    let weights: Vec<f64> = comparison.studies().iter().map(|s| 1.0 / (s.se * s.se)).collect();
    let wmax = weights.iter().copied().fold(0.0, f64::max);
    let mut rows: Vec<Row> = comparison
        .studies()
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(i, (s, w))| Row {
            label: if s.label.is_empty() { format!("Study {}", i + 1) } else { s.label.clone() },
            estimate: s.effect,
            lower: s.effect - Z975 * s.se,
            upper: s.effect + Z975 * s.se,
            marker: Some(2.0 + 5.0 * (w / wmax).sqrt()),
        })
        .collect();
    let n_studies = rows.len();
    for (label, s) in [("Fixed effects", fixed), ("Random effects", random), ("Model averaged", averaged)] {
        if let Some(s) = s {
            rows.push(Row { label: label.to_string(), estimate: s.mean, lower: s.ci_lower, upper: s.ci_upper, marker: None });
        }
    }

    let lo = rows.iter().map(|r| r.lower).fold(0.0, f64::min);
    let hi = rows.iter().map(|r| r.upper).fold(0.0, f64::max);
    let step = nice_step((hi - lo).max(1e-9));
    let (axis_lo, axis_hi) = ((lo / step).floor() * step, (hi / step).ceil() * step);
    let x = |v: f64| PLOT_LEFT + (v - axis_lo) / (axis_hi - axis_lo) * (PLOT_RIGHT - PLOT_LEFT);

    let summary_gap = if rows.len() > n_studies { ROW * 0.5 } else { 0.0 };
    let y_of = |i: usize| TOP + ROW * (i as f64 + 0.5) + if i >= n_studies { summary_gap } else { 0.0 };
    let plot_bottom = TOP + ROW * rows.len() as f64 + summary_gap + 6.0;
    let height = plot_bottom + 44.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.1}" viewBox="0 0 {WIDTH} {height:.1}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{LABEL_X}" y="24" font-weight="bold">Study</text>"#);
    let _ = writeln!(svg, r#"<text x="{TEXT_X}" y="24" font-weight="bold">Estimate [95% CI]</text>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{0:.2}" y1="{TOP}" x2="{0:.2}" y2="{plot_bottom:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
        x(0.0)
    );

    for (i, r) in rows.iter().enumerate() {
        let y = y_of(i);
        let _ = writeln!(svg, r#"<text x="{LABEL_X}" y="{:.2}">{}</text>"#, y + 4.0, escape(&r.label));
        let _ = writeln!(
            svg,
            r#"<text x="{TEXT_X}" y="{:.2}">{:.2} [{:.2}, {:.2}]</text>"#,
            y + 4.0,
            r.estimate,
            r.lower,
            r.upper
        );
        match r.marker {
            Some(h) => {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/>"#,
                    x(r.lower),
                    x(r.upper)
                );
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="black"/>"#,
                    x(r.estimate) - h,
                    y - h,
                    2.0 * h,
                    2.0 * h
                );
            }
            None => {
                let _ = writeln!(
                    svg,
                    r#"<polygon points="{:.2},{y:.2} {:.2},{:.2} {:.2},{y:.2} {:.2},{:.2}" fill="black"/>"#,
                    x(r.lower),
                    x(r.estimate),
                    y - 7.0,
                    x(r.upper),
                    x(r.estimate),
                    y + 7.0
                );
            }
        }
    }

    let _ = writeln!(
        svg,
        r#"<line x1="{PLOT_LEFT}" y1="{plot_bottom:.2}" x2="{PLOT_RIGHT}" y2="{plot_bottom:.2}" stroke="black"/>"#
    );
    let ticks = ((axis_hi - axis_lo) / step).round() as usize;
    for t in 0..=ticks {
        let v = axis_lo + t as f64 * step;
        let xv = x(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{xv:.2}" y1="{plot_bottom:.2}" x2="{xv:.2}" y2="{:.2}" stroke="black"/>"#,
            plot_bottom + 5.0
        );
        let digits = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
        let _ = writeln!(
            svg,
            r#"<text x="{xv:.2}" y="{:.2}" text-anchor="middle">{v:.digits$}</text>"#,
            plot_bottom + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Effect size (SMD)</text>"#,
        0.5 * (PLOT_LEFT + PLOT_RIGHT),
        plot_bottom + 36.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_in_order() {
        let c = Comparison::from_effects("c", &[0.2, 0.8], &[0.1, 0.3]).unwrap();
        let s = PosteriorSummary { mean: 0.3, median: 0.3, sd: 0.1, ci_lower: 0.1, ci_upper: 0.5, grid: vec![] };
        let svg = forest_svg(&c, Some(&s), None, Some(&s));
        let a = svg.find("Study 1").unwrap();
        let b = svg.find("Study 2").unwrap();
        let f = svg.find("Fixed effects").unwrap();
        let m = svg.find("Model averaged").unwrap();
        assert!(a < b && b < f && f < m);
        assert!(!svg.contains("Random effects"));
        assert_eq!(svg.matches("<polygon").count(), 2);
    }

    #[test]
    fn labels_are_escaped() {
        let c = crate::meta_core::Comparison::new("c", vec![crate::meta_core::Study::labeled(0.1, 0.2, "A<B & C").unwrap()]).unwrap();
        assert!(forest_svg(&c, None, None, None).contains("A&lt;B &amp; C"));
    }
}
