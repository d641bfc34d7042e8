//! Minimal SVG regret chart: log-scale rounds on x, mean pseudo-regret with
//! a ±1 stderr band on y, one series per policy.

use std::fmt::Write;

use super::SummarySeries;
use crate::error::{Error, Result};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const DASHES: [&str; 4] = ["", "6,3", "2,2", "8,3,2,3"];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub title: Option<String>,
    /// Draws `slope · log n` when set (e.g. the clustered lower constant).
    pub reference_slope: Option<f64>,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            title: None,
            reference_slope: None,
            width: 800.0,
            height: 500.0,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

pub fn render_svg(series: &[SummarySeries], options: &PlotOptions) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.n.is_empty()) {
        return Err(Error::InvalidParameter("nothing to plot".into()));
    }
    let (w, h) = (options.width, options.height);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);

    let n_min = series
        .iter()
        .flat_map(|s| s.n.iter())
        .copied()
        .min()
        .unwrap()
        .max(1) as f64;
    let n_max = series
        .iter()
        .flat_map(|s| s.n.iter())
        .copied()
        .max()
        .unwrap() as f64;
    let (lx0, lx1) = (n_min.log10(), n_max.log10().max(n_min.log10() + 1e-9));
    let mut y_max = series
        .iter()
        .flat_map(|s| s.mean_regret.iter().zip(&s.stderr).map(|(m, e)| m + e))
        .fold(0.0f64, f64::max);
    if let Some(c) = options.reference_slope {
        y_max = y_max.max(c * n_max.ln());
    }
    if !(y_max > 0.0) {
        y_max = 1.0;
    }
    let step = nice_step(y_max);
    let y_top = (y_max / step).ceil() * step;

    let x = |n: f64| left + (n.max(1.0).log10() - lx0) / (lx1 - lx0) * pw;
    let y = |v: f64| top + ph - v.clamp(0.0, y_top) / y_top * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    if let Some(t) = &options.title {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            left + pw / 2.0,
            escape(t)
        );
    }

    // axes and ticks
    let _ = writeln!(
        svg,
        r#"<path d="M{left},{top} V{} H{}" fill="none" stroke="black"/>"#,
        top + ph,
        left + pw
    );
    let mut decade = lx0.floor() as i32;
    while (decade as f64) <= lx1 + 1e-9 {
        let n = 10f64.powi(decade);
        if n >= n_min * (1.0 - 1e-9) {
            let px = x(n);
            let _ = writeln!(
                svg,
                r##"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="#ddd"/>"##,
                top,
                top + ph
            );
            let _ = writeln!(
                svg,
                r#"<text x="{px:.2}" y="{}" text-anchor="middle">1e{decade}</text>"#,
                top + ph + 18.0
            );
        }
        decade += 1;
    }
    let mut v = 0.0;
    while v <= y_top + step * 1e-9 {
        let py = y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#eee"/>"##,
            left + pw
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            py + 4.0,
            format_tick(v)
        );
        v += step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">round n (log scale)</text>"#,
        left + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">mean pseudo-regret</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );

    let distinct_ids = {
        let mut ids: Vec<_> = series.iter().map(|s| s.instance_id.as_str()).collect();
        ids.dedup();
        ids.len()
    };
    let mut legend_y = top + 10.0;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = DASHES[(i / PALETTE.len() + i) % DASHES.len()];
        let upper: Vec<String> =
            s.n.iter()
                .zip(s.mean_regret.iter().zip(&s.stderr))
                .map(|(&n, (m, e))| format!("{:.2},{:.2}", x(n as f64), y(m + e)))
                .collect();
        let lower: Vec<String> =
            s.n.iter()
                .zip(s.mean_regret.iter().zip(&s.stderr))
                .rev()
                .map(|(&n, (m, e))| format!("{:.2},{:.2}", x(n as f64), y(m - e)))
                .collect();
        let _ = writeln!(
            svg,
            r#"<polygon points="{} {}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let line: Vec<String> =
            s.n.iter()
                .zip(&s.mean_regret)
                .map(|(&n, m)| format!("{:.2},{:.2}", x(n as f64), y(*m)))
                .collect();
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let _ = writeln!(
            svg,
            r#"<polyline class="series" points="{}" fill="none" stroke="{color}" stroke-width="2"{dash_attr}/>"#,
            line.join(" ")
        );
        let label = if distinct_ids > 1 {
            format!("{}: {}", s.instance_id, s.policy)
        } else {
            s.policy.clone()
        };
        let lx = left + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{color}" stroke-width="2"{dash_attr}/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{}" y="{}">{}</text>"#,
            lx + 30.0,
            legend_y + 4.0,
            escape(&label)
        );
        legend_y += 18.0;
    }
    if let Some(c) = options.reference_slope {
        let pts: Vec<String> = (0..=40)
            .map(|i| {
                let n = 10f64.powf(lx0 + (lx1 - lx0) * i as f64 / 40.0);
                format!("{:.2},{:.2}", x(n), y(c * n.ln()))
            })
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline class="reference" points="{}" fill="none" stroke="#555" stroke-width="1.5" stroke-dasharray="4,4"/>"##,
            pts.join(" ")
        );
        let lx = left + pw + 12.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{lx}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="#555" stroke-dasharray="4,4"/>"##,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{}" y="{}">{} · log n</text>"#,
            lx + 30.0,
            legend_y + 4.0,
            format_tick(c)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 100.0 || v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}
