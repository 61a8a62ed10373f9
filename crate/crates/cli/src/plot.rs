//! Static SVG convergence chart: iteration count on x, log10 relative
//! error on y, one polyline per trace plus a dashed theoretical-rate line.

/// One plotted series in `(k, log10 rel_err)` coordinates.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    /// Build from a raw trace, clipping below 1e-16 and thinning long
    /// traces to at most `max_points` vertices.
    pub fn from_trace(label: &str, rows: impl Iterator<Item = (u64, f64)>, dashed: bool) -> Self {
        let raw: Vec<(f64, f64)> = rows
            .map(|(k, e)| (k as f64, e.max(1e-16).log10()))
            .collect();
        let max_points = 2000;
        let points = if raw.len() <= max_points {
            raw
        } else {
            let stride = raw.len().div_ceil(max_points);
            let mut thin: Vec<(f64, f64)> =
                raw.iter().step_by(stride).copied().collect();
            if let Some(last) = raw.last() {
                if thin.last() != Some(last) {
                    thin.push(*last);
                }
            }
            thin
        };
        Series { label: label.to_string(), points, dashed }
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Render an SVG 1.1 document with one polyline per series.
pub fn render_svg(series: &[Series], title: &str) -> String {
    let width = 860.0;
    let height = 560.0;
    let (ml, mr, mt, mb) = (70.0, 170.0, 44.0, 56.0);
    let pw = width - ml - mr;
    let ph = height - mt - mb;

    let mut x_max: f64 = 1.0;
    let mut y_min: f64 = -1.0;
    let mut y_max: f64 = 0.0;
    for s in series {
        for &(x, y) in &s.points {
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    y_min = y_min.floor() - 0.25;
    y_max = y_max.ceil() + 0.25;
    let sx = move |x: f64| ml + pw * x / x_max;
    let sy = move |y: f64| mt + ph * (y_max - y) / (y_max - y_min);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" \
         height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        ml + pw / 2.0,
        escape(title)
    ));

    // Axes.
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(ml),
        fmt(mt + ph),
        fmt(ml + pw),
        fmt(mt + ph)
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(ml),
        fmt(mt),
        fmt(ml),
        fmt(mt + ph)
    ));

    // X ticks.
    let x_ticks = 6;
    for t in 0..=x_ticks {
        let xv = x_max * t as f64 / x_ticks as f64;
        let xp = sx(xv);
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            fmt(xp),
            fmt(mt + ph),
            fmt(mt + ph + 5.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(xp),
            fmt(mt + ph + 18.0),
            xv.round() as i64
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">iteration k</text>\n",
        fmt(ml + pw / 2.0),
        fmt(height - 16.0)
    ));

    // Y ticks per integer decade (at most ~14 labels).
    let span = (y_max - y_min).max(1.0);
    let step = (span / 14.0).ceil().max(1.0) as i64;
    let mut yv = y_min.ceil() as i64;
    while (yv as f64) <= y_max {
        let yp = sy(yv as f64);
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
            fmt(ml - 5.0),
            fmt(yp),
            fmt(ml)
        ));
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#dddddd\"/>\n",
            fmt(ml),
            fmt(yp),
            fmt(ml + pw)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            fmt(ml - 9.0),
            fmt(yp + 4.0),
            yv
        ));
        yv += step;
    }
    out.push_str(&format!(
        "<text x=\"20\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">log10 rel err</text>\n",
        fmt(mt + ph / 2.0),
        fmt(mt + ph / 2.0)
    ));

    // Series.
    for (i, s) in series.iter().enumerate() {
        let color = if s.dashed { "#444444" } else { PALETTE[i % PALETTE.len()] };
        let dash = if s.dashed { " stroke-dasharray=\"7 5\"" } else { "" };
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(sx(x)), fmt(sy(y))))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"{dash} \
             points=\"{}\"/>\n",
            pts.join(" ")
        ));
        // Legend row.
        let ly = mt + 16.0 + 20.0 * i as f64;
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{color}\" \
             stroke-width=\"2\"{dash}/>\n",
            fmt(ml + pw + 12.0),
            fmt(ly - 4.0),
            fmt(ml + pw + 40.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            fmt(ml + pw + 46.0),
            fmt(ly),
            escape(&s.label)
        ));
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polyline_per_series() {
        let series = vec![
            Series::from_trace("a", (0..10).map(|k| (k, 0.5f64.powi(k as i32))), false),
            Series::from_trace("rho_star(l=1)", (0..10).map(|k| (k, 0.6f64.powi(k as i32))), true),
        ];
        let svg = render_svg(&series, "test");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("iteration k"));
    }

    #[test]
    fn long_traces_are_thinned() {
        let series =
            Series::from_trace("big", (0..100_000u64).map(|k| (k, 1.0 / (k + 1) as f64)), false);
        assert!(series.points.len() <= 2001);
        assert_eq!(series.points.last().unwrap().0, 99_999.0);
    }

    #[test]
    fn labels_are_escaped() {
        let series = vec![Series {
            label: "a<b&c".into(),
            points: vec![(0.0, 0.0), (1.0, -1.0)],
            dashed: false,
        }];
        let svg = render_svg(&series, "t<&>t");
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(!svg.contains("a<b"));
    }
}
