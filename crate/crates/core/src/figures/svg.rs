use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::CurveSeries;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Axis scaling. Both default to linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SvgOptions {
    pub log_x: bool,
    pub log_y: bool,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    ticks: Vec<(f64, String)>,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool, name: &'static str) -> Result<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            if log && v <= 0.0 {
                return Err(Error::param(name, format!("log scale needs positive values, got {v}")));
            }
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo == hi {
            let pad = if lo == 0.0 { 0.5 } else { lo.abs() * 0.05 };
            lo -= pad;
            hi += pad;
        }
        let ticks = if log { log_ticks(lo, hi) } else { linear_ticks(lo, hi) };
        Ok(Axis { lo, hi, log, ticks })
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<(f64, String)> {
    let step = nice_step(hi - lo);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last)
        .map(|k| {
            let v = k as f64 * step;
            let label = format!("{:.*}", decimals, v);
            let label = match label.strip_prefix('-') {
                Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
                _ => label,
            };
            (v, label)
        })
        .collect()
}

// positions are in log10 units
fn log_ticks(lo: f64, hi: f64) -> Vec<(f64, String)> {
    let first = lo.ceil() as i64;
    let last = hi.floor() as i64;
    if first > last {
        return vec![
            (lo, format!("{:.3e}", 10f64.powf(lo))),
            (hi, format!("{:.3e}", 10f64.powf(hi))),
        ];
    }
    let stride = ((last - first) / 8 + 1).max(1);
    (first..=last)
        .step_by(stride as usize)
        .map(|k| (k as f64, format!("1e{k}")))
        .collect()
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Renders a standalone 800×600 line chart.
pub fn render_svg(series: &[CurveSeries], title: &str, opts: &SvgOptions) -> Result<String> {
    if series.is_empty() {
        return Err(Error::param("series", "at least one series is required"));
    }
    if series.iter().any(CurveSeries::is_empty) {
        return Err(Error::param("series", "series must not be empty"));
    }
    let xa = Axis::new(series.iter().flat_map(|s| s.xs()), opts.log_x, "x")?;
    let ya = Axis::new(series.iter().flat_map(|s| s.ys()), opts.log_y, "y")?;
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |x: f64| LEFT + xa.frac(x) * pw;
    let py = |y: f64| TOP + (1.0 - ya.frac(y)) * ph;

    let mut s = String::new();
    // writing to a String cannot fail
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    for (v, label) in &xa.ticks {
        let x = LEFT + (v - xa.lo) / (xa.hi - xa.lo) * pw;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            escape(label)
        );
    }
    for (v, label) in &ya.ticks {
        let y = TOP + (1.0 - (v - ya.lo) / (ya.hi - ya.lo)) * ph;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            escape(label)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(series[0].x_name())
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(series[0].y_name())
    );

    for (i, c) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        for (j, &(x, y)) in c.points().iter().enumerate() {
            if j > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{:.2},{:.2}", px(x), py(y));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>"#
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(c.label())
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg_with(series: &[CurveSeries], path: impl AsRef<Path>, title: &str, opts: &SvgOptions) -> Result<()> {
    let path = path.as_ref();
    let text = render_svg(series, title, opts)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Linear-axis chart written to `path`.
pub fn write_svg(series: &[CurveSeries], path: impl AsRef<Path>, title: &str) -> Result<()> {
    write_svg_with(series, path, title, &SvgOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(label: &str, pts: &[(f64, f64)]) -> CurveSeries {
        CurveSeries::new(label, "x", "y", pts.to_vec()).unwrap()
    }

    #[test]
    fn empty_is_rejected() {
        assert!(render_svg(&[], "t", &SvgOptions::default()).is_err());
    }

    #[test]
    fn one_polyline_per_series() {
        let a = series("a", &[(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]);
        let svg = render_svg(std::slice::from_ref(&a), "t", &SvgOptions::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.starts_with("<svg") && svg.contains(r#"viewBox="0 0 800 600""#));
        let b = series("b & c", &[(0.0, 1.0), (2.0, 1.0)]);
        let svg = render_svg(&[a, b], "<title>", &SvgOptions::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("b &amp; c") && svg.contains("&lt;title&gt;"));
    }

    #[test]
    fn deterministic() {
        let a = series("a", &[(0.0, 0.3), (0.7, 0.1), (1.9, 0.25)]);
        let x = render_svg(std::slice::from_ref(&a), "t", &SvgOptions::default()).unwrap();
        let y = render_svg(&[a], "t", &SvgOptions::default()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn ticks_are_round() {
        let t: Vec<String> = linear_ticks(0.0, 1.0).into_iter().map(|t| t.1).collect();
        assert_eq!(t, ["0.0", "0.2", "0.4", "0.6", "0.8", "1.0"]);
        let t: Vec<String> = linear_ticks(-40.0, 10.0).into_iter().map(|t| t.1).collect();
        assert_eq!(t, ["-40", "-30", "-20", "-10", "0", "10"]);
    }

    #[test]
    fn log_scale() {
        let a = series("a", &[(1e-3, 1.0), (1.0, 2.0)]);
        let opts = SvgOptions {
            log_x: true,
            log_y: false,
        };
        let svg = render_svg(&[a], "t", &opts).unwrap();
        assert!(svg.contains(">1e-3<") && svg.contains(">1e0<"));
        let b = series("b", &[(0.0, 1.0), (1.0, 2.0)]);
        assert!(render_svg(&[b], "t", &opts).is_err());
    }
}
