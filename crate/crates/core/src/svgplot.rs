//! Minimal static SVG charts: multi-series line plots and categorical
//! region maps. Shared by the CLI `plot` subcommand and the browser demo.

/// One polyline with a legend label.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Axis labels and canvas size for a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
}

impl Default for ChartSpec {
    fn default() -> Self {
        ChartSpec {
            title: String::new(),
            x_label: "x".into(),
            y_label: "y".into(),
            width: 720,
            height: 480,
        }
    }
}

const PALETTE: [&str; 8] = [
    "#d62728", "#2ca02c", "#1f77b4", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 48.0;

fn nice_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn extent(series: &[Series], pick: impl Fn(&(f64, f64)) -> f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for p in &s.points {
            let v = pick(p);
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Render a multi-series line chart with axes, ticks, and a legend.
pub fn line_chart(spec: &ChartSpec, series: &[Series]) -> String {
    let (w, h) = (spec.width as f64, spec.height as f64);
    let (x0, x1) = extent(series, |p| p.0);
    let (y0, y1) = extent(series, |p| p.1);
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * (w - MARGIN_L - MARGIN_R);
    let sy = |y: f64| h - MARGIN_B - (y - y0) / (y1 - y0) * (h - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        spec.width, spec.height, spec.width, spec.height
    ));
    svg.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        spec.width, spec.height
    ));
    if !spec.title.is_empty() {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            w / 2.0,
            xml_escape(&spec.title)
        ));
    }
    // axes
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - MARGIN_B,
        w - MARGIN_R,
        h - MARGIN_B
    ));
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - MARGIN_B
    ));
    // ticks
    let ticks = 5;
    for i in 0..=ticks {
        let f = i as f64 / ticks as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let xp = sx(xv);
        let yp = sy(yv);
        svg.push_str(&format!(
            "<line x1=\"{xp}\" y1=\"{}\" x2=\"{xp}\" y2=\"{}\" stroke=\"black\"/>\n",
            h - MARGIN_B,
            h - MARGIN_B + 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{xp}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            h - MARGIN_B + 17.0,
            nice_num(xv)
        ));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{yp}\" x2=\"{MARGIN_L}\" y2=\"{yp}\" stroke=\"black\"/>\n",
            MARGIN_L - 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 7.0,
            yp + 4.0,
            nice_num(yv)
        ));
    }
    // axis labels
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + w - MARGIN_R) / 2.0,
        h - 10.0,
        xml_escape(&spec.x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n",
        (MARGIN_T + h - MARGIN_B) / 2.0,
        (MARGIN_T + h - MARGIN_B) / 2.0,
        xml_escape(&spec.y_label)
    ));
    // series
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        for p in s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{color}\"/>\n",
                sx(p.0),
                sy(p.1)
            ));
        }
        // legend
        let ly = MARGIN_T + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2.5\"/>\n",
            w - MARGIN_R - 130.0,
            w - MARGIN_R - 104.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            w - MARGIN_R - 98.0,
            ly + 4.0,
            xml_escape(&s.label)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Render a categorical map over a rectangle: `grid[row][col]` indexes into
/// `colors`, row 0 at the top (largest y). Used for region plots.
pub fn category_map(
    spec: &ChartSpec,
    grid: &[Vec<u8>],
    x_range: (f64, f64),
    y_range: (f64, f64),
    colors: &[(&str, &str)],
) -> String {
    let (w, h) = (spec.width as f64, spec.height as f64);
    let rows = grid.len().max(1);
    let cols = grid.first().map(|r| r.len()).unwrap_or(1).max(1);
    let plot_w = w - MARGIN_L - MARGIN_R;
    let plot_h = h - MARGIN_T - MARGIN_B;
    let cw = plot_w / cols as f64;
    let ch = plot_h / rows as f64;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        spec.width, spec.height, spec.width, spec.height
    ));
    svg.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        spec.width, spec.height
    ));
    if !spec.title.is_empty() {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            w / 2.0,
            xml_escape(&spec.title)
        ));
    }
    for (r, row) in grid.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let color = colors
                .get(v as usize)
                .map(|(_, col)| *col)
                .unwrap_or("#000000");
            svg.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{color}\"/>\n",
                MARGIN_L + c as f64 * cw,
                MARGIN_T + r as f64 * ch,
                cw + 0.5,
                ch + 0.5
            ));
        }
    }
    // frame and corner labels
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{MARGIN_L}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        h - MARGIN_B + 17.0,
        nice_num(x_range.0)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        w - MARGIN_R,
        h - MARGIN_B + 17.0,
        nice_num(x_range.1)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
        MARGIN_L - 7.0,
        h - MARGIN_B + 4.0,
        nice_num(y_range.0)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
        MARGIN_L - 7.0,
        MARGIN_T + 4.0,
        nice_num(y_range.1)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + w - MARGIN_R) / 2.0,
        h - 10.0,
        xml_escape(&spec.x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n",
        (MARGIN_T + h - MARGIN_B) / 2.0,
        (MARGIN_T + h - MARGIN_B) / 2.0,
        xml_escape(&spec.y_label)
    ));
    for (i, (label, color)) in colors.iter().enumerate() {
        let ly = MARGIN_T + 16.0 * i as f64;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{color}\" stroke=\"black\"/>\n",
            w - MARGIN_R - 130.0,
            ly - 10.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{ly}\">{}</text>\n",
            w - MARGIN_R - 114.0,
            xml_escape(label)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_contains_series_and_labels() {
        let spec = ChartSpec {
            title: "MSE vs n".into(),
            x_label: "log10 n".into(),
            y_label: "log10 MSE".into(),
            ..Default::default()
        };
        let series = vec![
            Series {
                label: "Q0".into(),
                points: vec![(3.0, -1.0), (4.0, -1.5), (5.0, -2.0)],
            },
            Series {
                label: "Q4".into(),
                points: vec![(3.0, -1.2), (4.0, -2.0), (5.0, -2.9)],
            },
        ];
        let svg = line_chart(&spec, &series);
        assert!(svg.starts_with("<svg"));
        assert!(svg.matches("<polyline").count() == 2);
        assert!(svg.contains("Q4"));
        assert!(svg.contains("log10 n"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn category_map_draws_grid() {
        let spec = ChartSpec::default();
        let grid = vec![vec![0, 1], vec![1, 2]];
        let svg = category_map(
            &spec,
            &grid,
            (-0.5, 0.5),
            (-0.5, 0.5),
            &[("undetectable", "#eee"), ("boundary", "#bbb"), ("detectable", "#7b7")],
        );
        assert!(svg.matches("<rect").count() >= 5);
        assert!(svg.contains("detectable"));
    }
}
