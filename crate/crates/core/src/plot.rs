//! SVG charts of the aggregate curves, each with a sidecar CSV of the points
//! it draws.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::io::{format_float, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    ErrorVsK,
    RhoVsK,
    EllZeroVsRho,
    DeltaZeroVsRho,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "error-vs-k" => Ok(Self::ErrorVsK),
            "rho-vs-k" => Ok(Self::RhoVsK),
            "ell0-vs-rho" => Ok(Self::EllZeroVsRho),
            "delta0-vs-rho" => Ok(Self::DeltaZeroVsRho),
            other => Err(Error::InvalidConfig(format!("unknown figure {other:?}"))),
        }
    }
}

impl Figure {
    pub const ALL: [Figure; 4] = [
        Figure::ErrorVsK,
        Figure::RhoVsK,
        Figure::EllZeroVsRho,
        Figure::DeltaZeroVsRho,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::ErrorVsK => "error-vs-k",
            Figure::RhoVsK => "rho-vs-k",
            Figure::EllZeroVsRho => "ell0-vs-rho",
            Figure::DeltaZeroVsRho => "delta0-vs-rho",
        }
    }

    /// (x column, mean column, std column) in the aggregates file.
    pub fn columns(self) -> (&'static str, &'static str, &'static str) {
        match self {
            Figure::ErrorVsK => ("k", "meanError", "stdError"),
            Figure::RhoVsK => ("k", "meanRho", "stdRho"),
            Figure::EllZeroVsRho => ("meanRho", "meanEllZero", "stdEllZero"),
            Figure::DeltaZeroVsRho => ("meanRho", "meanDeltaZero", "stdDeltaZero"),
        }
    }

    fn labels(self) -> (&'static str, &'static str) {
        match self {
            Figure::ErrorVsK => ("learner order k", "generalization error"),
            Figure::RhoVsK => ("learner order k", "sysRatio ρ"),
            Figure::EllZeroVsRho => ("sysRatio ρ (log scale)", "ℓ₀ (bytes)"),
            Figure::DeltaZeroVsRho => ("sysRatio ρ (log scale)", "Δ₀ (bits)"),
        }
    }

    fn rho_axis(self) -> bool {
        matches!(self, Figure::EllZeroVsRho | Figure::DeltaZeroVsRho)
    }
}

/// One plotted point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub k: f64,
    pub x: f64,
    pub mean: f64,
    pub std: f64,
}

/// Points of `figure` read from an aggregates table, plus ρ* when the table
/// has a `kStar` column and a row at that order.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub figure: Figure,
    pub points: Vec<Point>,
    pub rho_star: Option<f64>,
}

impl FigureData {
    pub fn from_table(figure: Figure, table: &Table) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidConfig("aggregates file has no rows".into()));
        }
        let (xc, mc, sc) = figure.columns();
        let ks = table.floats("k")?;
        let xs = table.floats(xc)?;
        let means = table.floats(mc)?;
        let stds = table.floats(sc)?;
        let points = (0..ks.len())
            .map(|i| Point {
                k: ks[i],
                x: xs[i],
                mean: means[i],
                std: stds[i],
            })
            .collect();
        let rho_star = if figure.rho_axis() && table.has_column("kStar") {
            let k_star = table.floats("kStar")?;
            let rhos = table.floats("meanRho")?;
            (0..ks.len()).find(|&i| ks[i] == k_star[i]).map(|i| rhos[i])
        } else {
            None
        };
        Ok(Self {
            figure,
            points,
            rho_star,
        })
    }

    /// Sidecar CSV: the aggregate columns exactly as plotted.
    pub fn sidecar_csv(&self) -> String {
        let (xc, mc, sc) = self.figure.columns();
        let mut out = String::new();
        if xc == "k" {
            writeln!(out, "k,{mc},{sc},lower,upper").unwrap();
        } else {
            writeln!(out, "k,{xc},{mc},{sc},lower,upper").unwrap();
        }
        for p in &self.points {
            let k = format_float(p.k);
            let tail = format!(
                "{},{},{},{}",
                format_float(p.mean),
                format_float(p.std),
                format_float(p.mean - p.std),
                format_float(p.mean + p.std)
            );
            if xc == "k" {
                writeln!(out, "{k},{tail}").unwrap();
            } else {
                writeln!(out, "{k},{},{tail}", format_float(p.x)).unwrap();
            }
        }
        out
    }

    pub fn svg(&self) -> String {
        render(self)
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..=5)
            .map(|i| {
                let t = self.lo + (self.hi - self.lo) * i as f64 / 5.0;
                if self.log {
                    10f64.powf(t)
                } else {
                    t
                }
            })
            .collect()
    }
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

fn polyline(out: &mut String, pts: &[(f64, f64)], style: &str) {
    if pts.is_empty() {
        return;
    }
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    writeln!(
        out,
        r#"<polyline fill="none" {style} points="{}"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

fn render(data: &FigureData) -> String {
    let log_x = data.figure.rho_axis();
    let pts: Vec<&Point> = data
        .points
        .iter()
        .filter(|p| p.x.is_finite() && p.mean.is_finite() && (!log_x || p.x > 0.0))
        .collect();
    let mut sorted = pts.clone();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x));

    let x_axis = Axis::fit(sorted.iter().map(|p| p.x).chain(data.rho_star), log_x);
    let std_of = |p: &Point| if p.std.is_finite() { p.std } else { 0.0 };
    let y_axis = Axis::fit(
        sorted
            .iter()
            .flat_map(|p| [p.mean - std_of(p), p.mean + std_of(p)]),
        false,
    );
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |v: f64| LEFT + x_axis.unit(v) * plot_w;
    let sy = |v: f64| TOP + (1.0 - y_axis.unit(v)) * plot_h;

    let (x_label, y_label) = data.figure.labels();
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        data.figure.name()
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for t in x_axis.ticks() {
        let x = sx(t);
        writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0,
            tick_label(t)
        )
        .unwrap();
    }
    for t in y_axis.ticks() {
        let y = sy(t);
        writeln!(
            out,
            r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(t)
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{y_label}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    )
    .unwrap();

    let line = |f: &dyn Fn(&Point) -> f64| -> Vec<(f64, f64)> {
        sorted.iter().map(|p| (sx(p.x), sy(f(p)))).collect()
    };
    polyline(
        &mut out,
        &line(&|p| p.mean + std_of(p)),
        r#"stroke="steelblue" stroke-dasharray="5,4""#,
    );
    polyline(
        &mut out,
        &line(&|p| p.mean - std_of(p)),
        r#"stroke="steelblue" stroke-dasharray="5,4""#,
    );
    polyline(
        &mut out,
        &line(&|p| p.mean),
        r#"stroke="black" stroke-width="2""#,
    );
    for p in &sorted {
        writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"><title>k={}</title></circle>"#,
            sx(p.x),
            sy(p.mean),
            p.k
        )
        .unwrap();
    }
    if let Some(rho) = data.rho_star.filter(|r| r.is_finite() && *r > 0.0) {
        let x = sx(rho);
        writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="firebrick" stroke-dasharray="3,3"/><text x="{:.2}" y="{}" fill="firebrick">ρ* = {}</text>"#,
            TOP + plot_h,
            x + 4.0,
            TOP + 14.0,
            tick_label(rho)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const AGG: &str = "kStar,k,runCount,meanError,stdError,meanRho,stdRho,meanEllZero,stdEllZero,meanDeltaZero,stdDeltaZero,deltaDefinedCount,meanOnesFractionInD
3,1,10,0.5,0.01,11,0,300,200,0.2,0.1,8,0.45
3,2,10,0.5,0.01,6.5,0.2,290,180,0.25,0.12,9,0.46
3,3,10,0.33,0.02,3.1,0.3,250,20,0.05,0.02,10,0.5
3,4,10,0.34,0.02,1.8,0.2,240,15,,,0,0.5
";

    fn table() -> Table {
        Table::read(AGG.as_bytes()).unwrap()
    }

    #[test]
    fn rho_figures_mark_threshold() {
        let d = FigureData::from_table(Figure::EllZeroVsRho, &table()).unwrap();
        assert_eq!(d.rho_star, Some(3.1));
        let svg = d.svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("ρ* = 3.10"));
        assert_eq!(svg.matches("<polyline").count(), 3);

        let d = FigureData::from_table(Figure::ErrorVsK, &table()).unwrap();
        assert_eq!(d.rho_star, None);
        assert!(!d.svg().contains("ρ*"));
    }

    #[test]
    fn sidecar_repeats_aggregate_columns() {
        let d = FigureData::from_table(Figure::DeltaZeroVsRho, &table()).unwrap();
        let side = Table::read(d.sidecar_csv().as_bytes()).unwrap();
        let t = table();
        for col in ["k", "meanRho", "meanDeltaZero", "stdDeltaZero"] {
            let a = side.floats(col).unwrap();
            let b = t.floats(col).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!(x == y || (x.is_nan() && y.is_nan()), "{col}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn undefined_points_are_skipped() {
        let d = FigureData::from_table(Figure::DeltaZeroVsRho, &table()).unwrap();
        assert_eq!(d.svg().matches("<circle").count(), 3);
    }

    #[test]
    fn validation() {
        let empty = Table::read(AGG.lines().next().unwrap().as_bytes()).unwrap();
        assert!(FigureData::from_table(Figure::RhoVsK, &empty).is_err());
        let partial = Table::read("k,meanRho\n1,2\n".as_bytes()).unwrap();
        assert_eq!(
            FigureData::from_table(Figure::RhoVsK, &partial),
            Err(Error::MissingColumn("stdRho".into()))
        );
        assert!("nope".parse::<Figure>().is_err());
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
    }
}
