//! Self-contained SVG rendering for fronts and benchmark summaries.
//!
//! Hand-rolled on purpose: the two charts needed here are small, and keeping
//! the output a pure deterministic function of the data matters more than
//! styling. All coordinates are formatted to two decimals.

use crate::experiments::SizeSummary;
use crate::metrics::{pareto_filter, MethodFront};
use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 52.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn plot_area() -> (f64, f64, f64, f64) {
    (
        MARGIN_LEFT,
        MARGIN_TOP,
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
    )
}

fn svg_open(out: &mut String) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
}

fn axis_frame(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, w, h) = plot_area();
    let _ = writeln!(
        out,
        "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
         fill=\"none\" stroke=\"#333\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x_label}</text>",
        x0 + w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.2})\">{y_label}</text>",
        y0 + h / 2.0,
        y0 + h / 2.0
    );
}

/// Scatter of every supplied point plus the attainment staircase of each
/// method's front. X is lead time on [0, lead_max], Y is filling ratio on
/// [0, 1].
pub fn front_svg(fronts: &[MethodFront], lead_max: f64) -> String {
    assert!(
        lead_max > 0.0 && lead_max.is_finite(),
        "lead_max must be positive and finite"
    );
    let (x0, y0, w, h) = plot_area();
    let sx = |lead: f64| x0 + (lead / lead_max) * w;
    let sy = |fill: f64| y0 + (1.0 - fill) * h;

    let mut out = String::new();
    svg_open(&mut out);
    axis_frame(&mut out, "total lead-time deviation", "mean filling ratio");

    for k in 0..=4 {
        let frac = f64::from(k) / 4.0;
        let lead = frac * lead_max;
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{lead:.1}</text>",
            sx(lead),
            y0 + h + 16.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{frac:.2}</text>",
            x0 - 6.0,
            sy(frac) + 4.0
        );
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
             stroke=\"#ddd\"/>",
            x0,
            sy(frac),
            x0 + w,
            sy(frac)
        );
    }

    for (m, front) in fronts.iter().enumerate() {
        let color = PALETTE[m % PALETTE.len()];
        for p in &front.points {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{color}\" \
                 fill-opacity=\"0.6\"/>",
                sx(p.lead_time),
                sy(p.filling_ratio)
            );
        }
        let pareto = pareto_filter(&front.points);
        if !pareto.is_empty() {
            // Front points run fill-descending, lead-descending; the step
            // path drops at each point's lead before moving left.
            let mut d = format!(
                "M {:.2} {:.2}",
                sx(pareto[0].lead_time),
                sy(pareto[0].filling_ratio)
            );
            for p in &pareto[1..] {
                let _ = write!(d, " V {:.2} H {:.2}", sy(p.filling_ratio), sx(p.lead_time));
            }
            let _ = writeln!(
                out,
                "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>"
            );
        }
        let ly = y0 + 16.0 + 18.0 * m as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{color}\"/>",
            x0 + w - 150.0,
            ly - 10.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            x0 + w - 132.0,
            ly,
            front.method
        );
    }

    out.push_str("</svg>\n");
    out
}

/// Grouped bars of two optional series over labeled groups. Bars grow from a
/// dashed zero line; a `None` value gets no bar for that series. Group labels
/// thin out when there are too many to stay readable.
pub fn paired_bars_svg(
    groups: &[(String, Option<f64>, Option<f64>)],
    series: (&str, &str),
    x_label: &str,
    y_label: &str,
) -> String {
    let (x0, y0, w, h) = plot_area();
    let values: Vec<f64> = groups
        .iter()
        .flat_map(|g| g.1.into_iter().chain(g.2))
        .collect();
    let lo = values.iter().copied().fold(0.0f64, f64::min);
    let hi = values.iter().copied().fold(0.0f64, f64::max);
    let spread = hi - lo;
    let pad = if spread > 0.0 {
        spread * 0.1
    } else {
        hi.abs().max(1.0) * 0.1
    };
    let (vmin, vmax) = (lo - pad, hi + pad);
    let sy = |v: f64| y0 + (vmax - v) / (vmax - vmin) * h;

    let mut out = String::new();
    svg_open(&mut out);
    axis_frame(&mut out, x_label, y_label);

    for k in 0..=4 {
        let v = vmin + (vmax - vmin) * f64::from(k) / 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{v:.2}</text>",
            x0 - 6.0,
            sy(v) + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333\" \
         stroke-dasharray=\"4 3\"/>",
        x0,
        sy(0.0),
        x0 + w,
        sy(0.0)
    );

    let n_groups = groups.len().max(1) as f64;
    let group_w = w / n_groups;
    let bar_w = (group_w * 0.3).min(40.0);
    let label_every = (groups.len() / 16).max(1);
    for (g, (label, first, second)) in groups.iter().enumerate() {
        let cx = x0 + group_w * (g as f64 + 0.5);
        if g % label_every == 0 {
            let _ = writeln!(
                out,
                "<text x=\"{cx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{label}</text>",
                y0 + h + 16.0
            );
        }
        let bars = [(*first, -bar_w, "#1f77b4"), (*second, 2.0, "#ff7f0e")];
        for (value, dx, color) in bars {
            let Some(v) = value else { continue };
            let (top, bottom) = if v >= 0.0 {
                (sy(v), sy(0.0))
            } else {
                (sy(0.0), sy(v))
            };
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{top:.2}\" width=\"{bar_w:.2}\" \
                 height=\"{:.2}\" fill=\"{color}\"/>",
                cx + dx,
                bottom - top
            );
        }
    }

    let legend = [(series.0, "#1f77b4"), (series.1, "#ff7f0e")];
    for (k, (name, color)) in legend.iter().enumerate() {
        let lx = x0 + w - 150.0;
        let ly = y0 + 16.0 + 18.0 * k as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{lx:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{color}\"/>",
            ly - 10.0
        );
        let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{ly:.2}\">{name}</text>", lx + 18.0);
    }

    out.push_str("</svg>\n");
    out
}

/// Grouped bars of the per-size median and mean improvement percentages.
/// Sizes with no defined improvement get no bars, only the size label.
pub fn improvement_bars_svg(summaries: &[SizeSummary]) -> String {
    let groups: Vec<(String, Option<f64>, Option<f64>)> = summaries
        .iter()
        .map(|s| {
            (
                s.size.to_string(),
                s.median_improvement_pct,
                s.mean_improvement_pct,
            )
        })
        .collect();
    paired_bars_svg(
        &groups,
        ("median", "mean"),
        "instance size (tasks)",
        "hypervolume improvement (%)",
    )
}
