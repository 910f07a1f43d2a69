//! Static SVG charts. Each chart embeds its data table as an XML comment.

use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 48.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(mut x0: f64, mut x1: f64, mut y0: f64, mut y1: f64) -> Self {
        if !(x1 > x0) {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if !(y1 > y0) {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = 0.05 * (y1 - y0);
        Self {
            x0,
            x1,
            y0: y0 - pad,
            y1: y1 + pad,
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn extent(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn open(title: &str, data: &str) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    s.push_str("<!-- data\n");
    s.push_str(&data.replace("--", "- -"));
    s.push_str("-->\n");
    let _ = writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        W / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        s,
        "<rect x=\"{l}\" y=\"{t}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>",
        r - l,
        b - t
    );
    for k in 0..=4 {
        let y = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            l - 6.0,
            f.py(y) + 4.0,
            tick(y)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        (l + r) / 2.0,
        H - 10.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>",
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 || v == 0.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

fn polyline(s: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, width: f64, dash: Option<&str>) {
    let mut d = String::new();
    for (x, y) in pts.iter().filter(|(_, y)| y.is_finite()) {
        let _ = write!(d, "{:.1},{:.1} ", f.px(*x), f.py(*y));
    }
    let dash = dash.map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
    let _ = writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"{dash}/>",
        d.trim_end()
    );
}

fn legend(s: &mut String, items: &[(&str, &str)]) {
    for (k, (label, color)) in items.iter().enumerate() {
        let x = LEFT + 10.0 + 150.0 * k as f64;
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"3\"/>",
            TOP + 14.0,
            x + 18.0,
            TOP + 14.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\">{}</text>",
            x + 24.0,
            TOP + 18.0,
            escape(label)
        );
    }
}

pub struct CcfRow {
    pub lag: i64,
    pub rho: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub null_band: f64,
}

/// Per-lag correlation bars with interval whiskers and the null band.
pub fn ccf_chart(title: &str, rows: &[CcfRow]) -> String {
    let mut data = String::from("lag,rho,ci_low,ci_high,null_band\n");
    for r in rows {
        let _ = writeln!(data, "{},{},{},{},{}", r.lag, r.rho, r.ci_low, r.ci_high, r.null_band);
    }
    let mut s = open(title, &data);
    let (xlo, xhi) = extent(rows.iter().map(|r| r.lag as f64));
    let (ylo, yhi) = extent(
        rows.iter()
            .flat_map(|r| [r.ci_low, r.ci_high, r.null_band, -r.null_band, 0.0]),
    );
    let f = Frame::new(xlo - 0.6, xhi + 0.6, ylo, yhi);
    axes(&mut s, &f, "lag (days; negative: bundle leads)", "cross-correlation");
    polyline(&mut s, &f, &[(f.x0, 0.0), (f.x1, 0.0)], "#888", 1.0, None);
    let half = 0.3 * (f.px(1.0) - f.px(0.0));
    for r in rows {
        let x = f.px(r.lag as f64);
        let (top, bot) = (f.py(r.rho.max(0.0)), f.py(r.rho.min(0.0)));
        let color = if r.rho.abs() > r.null_band {
            "#c0392b"
        } else {
            "#7f8c8d"
        };
        let _ = writeln!(
            s,
            "<rect x=\"{:.1}\" y=\"{top:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"{color}\"/>",
            x - half,
            2.0 * half,
            (bot - top).max(0.5)
        );
        let _ = writeln!(
            s,
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
            f.py(r.ci_low),
            f.py(r.ci_high)
        );
        for y in [r.ci_low, r.ci_high] {
            let _ = writeln!(
                s,
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
                x - half / 2.0,
                f.py(y),
                x + half / 2.0,
                f.py(y)
            );
        }
        for y in [r.null_band, -r.null_band] {
            let _ = writeln!(
                s,
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#2980b9\" stroke-dasharray=\"4 3\"/>",
                x - 1.6 * half,
                f.py(y),
                x + 1.6 * half,
                f.py(y)
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            H - BOTTOM + 16.0,
            r.lag
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Two z-score series over time (as faint lines) with their smoothed
/// versions on top.
pub fn dual_series_chart(title: &str, dates: &[String], series: [(&str, &[f64], &[f64]); 2]) -> String {
    let mut data = format!("date,{0},{0}_smooth,{1},{1}_smooth\n", series[0].0, series[1].0);
    for (t, d) in dates.iter().enumerate() {
        let _ = writeln!(
            data,
            "{d},{},{},{},{}",
            series[0].1[t], series[0].2[t], series[1].1[t], series[1].2[t]
        );
    }
    let mut s = open(title, &data);
    let n = dates.len().max(1);
    let (ylo, yhi) = extent(series.iter().flat_map(|(_, a, b)| a.iter().chain(b.iter()).copied()));
    let f = Frame::new(0.0, (n - 1) as f64, ylo, yhi);
    axes(&mut s, &f, "business day", "z-score");
    polyline(&mut s, &f, &[(f.x0, 0.0), (f.x1, 0.0)], "#888", 1.0, None);
    let colors = ["#c0392b", "#2c3e50"];
    for ((_, raw, smooth), color) in series.iter().zip(colors) {
        let pts: Vec<(f64, f64)> = raw.iter().enumerate().map(|(t, v)| (t as f64, *v)).collect();
        polyline(&mut s, &f, &pts, color, 0.5, Some("2 2"));
        let pts: Vec<(f64, f64)> = smooth.iter().enumerate().map(|(t, v)| (t as f64, *v)).collect();
        polyline(&mut s, &f, &pts, color, 2.0, None);
    }
    for k in [0, n / 2, n - 1] {
        if let Some(d) = dates.get(k) {
            let _ = writeln!(
                s,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{d}</text>",
                f.px(k as f64),
                H - BOTTOM + 16.0
            );
        }
    }
    legend(&mut s, &[(series[0].0, colors[0]), (series[1].0, colors[1])]);
    s.push_str("</svg>\n");
    s
}

/// Scatter of `y` against `x` with the least-squares line.
pub fn scatter_fit_chart(
    title: &str,
    labels: (&str, &str),
    x: &[f64],
    y: &[f64],
    intercept: f64,
    slope: f64,
) -> String {
    let mut data = format!("{},{}\n", labels.0, labels.1);
    for (a, b) in x.iter().zip(y) {
        let _ = writeln!(data, "{a},{b}");
    }
    let _ = writeln!(data, "fit,{intercept},{slope}");
    let mut s = open(title, &data);
    let (xlo, xhi) = extent(x.iter().copied());
    let (ylo, yhi) = extent(y.iter().copied());
    let f = Frame::new(xlo, xhi, ylo, yhi);
    axes(&mut s, &f, labels.0, labels.1);
    for (a, b) in x.iter().zip(y) {
        if a.is_finite() && b.is_finite() {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"2\" fill=\"#2980b9\" fill-opacity=\"0.5\"/>",
                f.px(*a),
                f.py(*b)
            );
        }
    }
    let line = [(f.x0, intercept + slope * f.x0), (f.x1, intercept + slope * f.x1)];
    polyline(&mut s, &f, &line, "#c0392b", 2.0, None);
    s.push_str("</svg>\n");
    s
}
