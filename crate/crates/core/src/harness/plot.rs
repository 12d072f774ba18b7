use std::fmt::Write as _;
use std::path::Path;

use crate::io::{write_columns, Column};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Draw a dot at every sample.
    pub markers: bool,
}

impl Series {
    pub fn line(label: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Series { label: label.into(), x, y, markers: false }
    }

    pub fn with_markers(mut self) -> Self {
        self.markers = true;
        self
    }
}

/// Minimal deterministic SVG line plot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Extra line of text under the title.
    pub annotation: Option<String>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LinePlot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        LinePlot { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), ..Default::default() }
    }

    pub fn push(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    fn transform(&self, v: f64, log: bool) -> Option<f64> {
        if log {
            (v > 0.0).then(|| v.log10())
        } else {
            v.is_finite().then_some(v)
        }
    }

    fn range(&self, pick: impl Fn(&Series) -> &[f64], log: bool) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for v in pick(s).iter().filter_map(|v| self.transform(*v, log)) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        if hi - lo < 1e-300_f64.max(1e-12 * lo.abs()) {
            let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
            return (lo - pad, hi + pad);
        }
        (lo, hi)
    }

    pub fn to_svg(&self) -> String {
        let (x0, x1) = self.range(|s| &s.x, self.log_x);
        let (y0, y1) = self.range(|s| &s.y, self.log_y);
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let px = |v: f64| LEFT + (v - x0) / (x1 - x0) * pw;
        let py = |v: f64| TOP + ph - (v - y0) / (y1 - y0) * ph;
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(&self.title));
        if let Some(a) = &self.annotation {
            let _ = writeln!(s, r#"<text x="{}" y="38" text-anchor="middle">{}</text>"#, W / 2.0, escape(a));
        }
        let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (vx, vy) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let lx = if self.log_x { format!("1e{vx:.1}") } else { format!("{vx:.3}") };
            let ly = if self.log_y { format!("1e{vy:.1}") } else { format!("{vy:.3e}") };
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{lx}</text>"#, px(vx), H - BOTTOM + 16.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{ly}</text>"#, LEFT - 6.0, py(vy) + 4.0);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 12.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for (k, series) in self.series.iter().enumerate() {
            let colour = COLOURS[k % COLOURS.len()];
            let pts: Vec<(f64, f64)> = series
                .x
                .iter()
                .zip(&series.y)
                .filter_map(|(x, y)| Some((px(self.transform(*x, self.log_x)?), py(self.transform(*y, self.log_y)?))))
                .collect();
            let path: Vec<String> = pts.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            if series.markers {
                for (a, b) in &pts {
                    let _ = writeln!(s, r#"<circle cx="{a:.2}" cy="{b:.2}" r="2.5" fill="{colour}"/>"#);
                }
            }
            let ly = TOP + 14.0 + 14.0 * k as f64;
            let _ = writeln!(s, r#"<text x="{}" y="{ly}" fill="{colour}">{}</text>"#, LEFT + 8.0, escape(&series.label));
        }
        s.push_str("</svg>\n");
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_svg())?;
        Ok(())
    }
}

/// Write `cols` as a data file and, when `plot` is given, the matching SVG
/// next to it. Returns the paths written.
pub fn export(dir: &Path, stem: &str, cols: &[Column], plot: Option<&LinePlot>) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let data = dir.join(format!("{stem}.dat"));
    write_columns(&data, cols)?;
    let mut out = vec![data.display().to_string()];
    if let Some(p) = plot {
        let svg = dir.join(format!("{stem}.svg"));
        p.write(&svg)?;
        out.push(svg.display().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_a_horizontal_line() {
        let p = LinePlot::new("c", "x", "y").push(Series::line("f", vec![0.0, 1.0, 2.0], vec![3.0; 3]));
        let svg = p.to_svg();
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let ys: Vec<&str> = line.split(' ').filter_map(|t| t.split(',').nth(1)).collect();
        assert_eq!(ys.len(), 3);
        assert!(ys.iter().all(|y| y.trim_end_matches("\"/>") == ys[0].trim_end_matches("\"/>")));
        assert_eq!(svg, p.to_svg());
    }

    #[test]
    fn markers_and_log_axes() {
        let mut p = LinePlot::new("conv", "h", "err").push(Series::line("e", vec![0.1, 0.05, 0.025], vec![1e-2, 2.5e-3, 6.25e-4]).with_markers());
        p.log_x = true;
        p.log_y = true;
        p.annotation = Some("slope 2.00".into());
        let svg = p.to_svg();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("slope 2.00"));
        // Non-positive samples are dropped on log axes.
        let q = LinePlot { log_y: true, ..LinePlot::new("z", "x", "y") }.push(Series::line("z", vec![1.0, 2.0], vec![0.0, 1.0]));
        let line = q.to_svg().lines().find(|l| l.starts_with("<polyline")).unwrap().to_string();
        assert_eq!(line.matches(',').count(), 1);
    }
}
