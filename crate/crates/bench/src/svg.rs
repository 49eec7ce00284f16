//! Line charts rendered from results CSV text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{BenchError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// An algorithm name with its `(budget, mean value)` points.
pub type Series = (String, Vec<(usize, f64)>);

/// Mean value per `(algo, budget)` over all rows of a results CSV. Algorithms
/// keep their order of first appearance.
pub fn series_from_csv(csv: &str) -> Result<Vec<Series>> {
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| BenchError::Invalid("empty results file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| {
        cols.iter()
            .position(|c| c.trim() == name)
            .ok_or_else(|| BenchError::Invalid(format!("results file has no `{name}` column")))
    };
    let (ia, ib, iv) = (col("algo")?, col("budget")?, col("value")?);

    let mut order: Vec<String> = Vec::new();
    let mut sums: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let field = |i: usize| {
            fields.get(i).map(|s| s.trim()).ok_or_else(|| {
                BenchError::Invalid(format!("results row {} has too few fields", n + 2))
            })
        };
        let algo = field(ia)?;
        let budget: usize = field(ib)?
            .parse()
            .map_err(|_| BenchError::Invalid(format!("results row {}: bad budget", n + 2)))?;
        let value: f64 = field(iv)?
            .parse()
            .map_err(|_| BenchError::Invalid(format!("results row {}: bad value", n + 2)))?;
        let a = match order.iter().position(|x| x == algo) {
            Some(a) => a,
            None => {
                order.push(algo.to_string());
                order.len() - 1
            }
        };
        let e = sums.entry((a, budget)).or_insert((0.0, 0));
        e.0 += value;
        e.1 += 1;
    }
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(a, name)| {
            let pts = sums
                .range((a, 0)..=(a, usize::MAX))
                .map(|(&(_, b), &(s, c))| (b, s / c as f64))
                .collect();
            (name, pts)
        })
        .collect())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// SVG line chart of mean value against budget, one line per algorithm.
/// With `log_y` the value axis is base-10 logarithmic and non-positive
/// means are dropped.
pub fn render_results(csv: &str, title: &str, log_y: bool) -> Result<String> {
    let series = series_from_csv(csv)?;
    let ty = |v: f64| if log_y { v.log10() } else { v };
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, p)| p.iter())
        .filter(|(_, v)| !log_y || *v > 0.0)
        .map(|&(b, v)| (b as f64, ty(v)))
        .collect();
    let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| {
        (a.0.min(p.0), a.1.max(p.0))
    });
    let (mut y0, mut y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| {
        (a.0.min(p.1), a.1.max(p.1))
    });
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if !log_y {
        y0 = y0.min(0.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r##"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="#ddd"/>"##,
            TOP,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#ddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            tick_label(xv)
        );
        let ylab = if log_y {
            tick_label(10f64.powf(yv))
        } else {
            tick_label(yv)
        };
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{ylab}</text>"#,
            LEFT - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">budget</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0
    );
    let ylabel = if log_y { "value (log scale)" } else { "value" };
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{ylabel}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (i, (name, p)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = p
            .iter()
            .filter(|(_, v)| !log_y || *v > 0.0)
            .map(|&(b, v)| format!("{:.1},{:.1}", sx(b as f64), sy(ty(v))))
            .collect();
        if !coords.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                coords.join(" ")
            );
            for c in &coords {
                let (cx, cy) = c.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
            }
        }
        let ly = TOP + 10.0 + i as f64 * 20.0;
        let lx = LEFT + pw + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
