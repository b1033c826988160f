//! Plot data: CSV of points and segments plus a self-contained SVG drawn in data units.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use zeta_strips::geometry::{count_strips, strip, wedge, StripSpec};
use zeta_strips::zeros::{enumerate_zeros, locate_zero, DEFAULT_TOL};

/// One CSV row. Points have `(x1, y1) = (x0, y0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub panel: String,
    pub kind: String,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Item {
    pub fn is_point(&self) -> bool {
        self.x0 == self.x1 && self.y0 == self.y1
    }
}

#[derive(Debug, Clone, Default)]
pub struct Figure {
    pub panels: Vec<String>,
    pub items: Vec<Item>,
}

impl Figure {
    fn panel(&mut self, name: impl Into<String>) -> PanelBuilder<'_> {
        let name = name.into();
        self.panels.push(name.clone());
        PanelBuilder { fig: self, name }
    }

    fn bounds(&self, panel: &str) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for it in self.items.iter().filter(|i| i.panel == panel) {
            for (x, y) in [(it.x0, it.y0), (it.x1, it.y1)] {
                b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
            }
        }
        b
    }
}

struct PanelBuilder<'a> {
    fig: &'a mut Figure,
    name: String,
}

impl PanelBuilder<'_> {
    fn segment(&mut self, kind: &str, x0: f64, y0: f64, x1: f64, y1: f64) {
        self.fig.items.push(Item {
            panel: self.name.clone(),
            kind: kind.to_string(),
            x0,
            y0,
            x1,
            y1,
        });
    }

    fn point(&mut self, kind: &str, x: f64, y: f64) {
        self.segment(kind, x, y, x, y);
    }
}

/// Scientific notation with 17 significant digits; parses back to the same `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(fig: &Figure, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["panel", "kind", "x0", "y0", "x1", "y1"])?;
    for it in &fig.items {
        w.write_record([
            it.panel.clone(),
            it.kind.clone(),
            fmt_num(it.x0),
            fmt_num(it.y0),
            fmt_num(it.x1),
            fmt_num(it.y1),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<Item>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

fn color(kind: &str) -> &'static str {
    match kind {
        "zero" => "#c0392b",
        "predicted" => "#7f8c8d",
        "division" => "#2980b9",
        "strip-edge" | "strip-center" => "#27ae60",
        _ => "#34495e",
    }
}

/// SVG with one user unit per data unit. Each panel is a group placed side by side;
/// the `y` axis points up via `scale(1,-1)`, so element coordinates equal the CSV values.
pub fn render_svg(fig: &Figure, title: &str) -> String {
    let gap = 2.0;
    let mut body = String::new();
    let mut offset = 0.0;
    let mut height: f64 = 0.0;
    let mut layout = Vec::new();
    for p in &fig.panels {
        let (x0, y0, x1, y1) = fig.bounds(p);
        if !x0.is_finite() {
            continue;
        }
        let (w, h) = ((x1 - x0).max(1.0), (y1 - y0).max(1.0));
        layout.push((p, x0, y1, offset));
        offset += w + gap;
        height = height.max(h);
    }
    let stroke = (offset.max(height) / 800.0).max(0.02);
    for (p, x0, y1, off) in &layout {
        let _ = writeln!(
            body,
            r#"  <g id="{p}" transform="translate({} {}) scale(1 -1)">"#,
            fmt_num(off - x0),
            fmt_num(y1 + gap / 2.0)
        );
        for it in fig.items.iter().filter(|i| &i.panel == *p) {
            let c = color(&it.kind);
            if it.is_point() {
                let _ = writeln!(
                    body,
                    r#"    <circle class="{}" cx="{}" cy="{}" r="{}" fill="{c}"/>"#,
                    it.kind,
                    fmt_num(it.x0),
                    fmt_num(it.y0),
                    fmt_num(3.0 * stroke)
                );
            } else {
                let _ = writeln!(
                    body,
                    r#"    <line class="{}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{c}" stroke-width="{}"/>"#,
                    it.kind,
                    fmt_num(it.x0),
                    fmt_num(it.y0),
                    fmt_num(it.x1),
                    fmt_num(it.y1),
                    fmt_num(stroke)
                );
            }
        }
        let _ = writeln!(body, "  </g>");
    }
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\">\n  <title>{title}</title>\n{body}</svg>\n",
        fmt_num(offset.max(1.0)),
        fmt_num(height + gap)
    )
}

/// Writes `<stem>.csv` and `<stem>.svg` into `dir`.
pub fn write_figure(fig: &Figure, dir: &Path, stem: &str, title: &str) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let svg_path = dir.join(format!("{stem}.svg"));
    write_csv(fig, &csv_path)?;
    std::fs::write(&svg_path, render_svg(fig, title)).with_context(|| format!("writing {}", svg_path.display()))?;
    Ok((csv_path, svg_path))
}

fn strip_outline(p: &mut PanelBuilder<'_>, s: &StripSpec, t_hi: f64) {
    p.segment("strip-edge", s.sigma_lo(), 0.0, s.sigma_lo(), t_hi);
    p.segment("strip-edge", s.sigma_hi(), 0.0, s.sigma_hi(), t_hi);
    p.segment("strip-center", s.center_sigma, 0.0, s.center_sigma, t_hi);
    let mut j = 0;
    while s.height(j) <= t_hi {
        p.segment("division", s.sigma_lo(), s.height(j), s.sigma_hi(), s.height(j));
        j += 1;
    }
}

/// Zeros of one strip up to height `t_max`, with the strip outline and predicted positions.
pub fn zeros_figure(m: u32, k: u32, t_max: f64) -> Result<Figure> {
    let s = strip(m, k)?;
    let zeros = enumerate_zeros(m, k, t_max)?;
    let mut fig = Figure::default();
    let mut p = fig.panel(format!("M{m}-k{k}"));
    strip_outline(&mut p, &s, t_max);
    for r in &zeros.records {
        p.point("predicted", r.predicted.sigma, r.predicted.t);
        p.point("zero", r.location.sigma, r.location.t);
    }
    Ok(fig)
}

/// Wedge boundaries and strip centre lines in the `(σ, k)` plane for `M = 2..=m_max`.
pub fn regions_figure(k_min: u32, k_max: u32, m_max: u32) -> Result<Figure> {
    let mut fig = Figure::default();
    let mut p = fig.panel("regions");
    let (lo, hi) = (k_min.max(3) as f64, k_max as f64);
    for m in 2..=m_max {
        let w = wedge(m)?;
        let start = w.tip_k.max(lo);
        if start >= hi {
            continue;
        }
        p.segment("wedge-left", w.left_boundary(start), start, w.left_boundary(hi), hi);
        if let (Some(a), Some(b)) = (w.right_boundary(start), w.right_boundary(hi)) {
            p.segment("wedge-right", a, start, b, hi);
        }
        if let Some(first) = (k_min.max(3)..=k_max).find(|&k| strip(m, k).map(|s| s.exists).unwrap_or(false)) {
            let q = strip(m, first)?.center_sigma / first as f64;
            p.segment("strip-center", q * first as f64, first as f64, q * hi, hi);
        }
    }
    Ok(fig)
}

/// The `k = 38` layout: both wedges, strip `S_2` with its cells and one zero per cell.
pub fn figure2(t_max: f64) -> Result<Figure> {
    let k = 38;
    let s = strip(2, k)?;
    let cells = (t_max / s.period).ceil() as u32;
    let t_hi = s.height(cells + 1);
    let zeros = (0..=cells)
        .into_par_iter()
        .map(|j| locate_zero(2, k, j, DEFAULT_TOL))
        .collect::<zeta_strips::Result<Vec<_>>>()?;
    let mut fig = Figure::default();
    let mut p = fig.panel("k38");
    strip_outline(&mut p, &s, t_hi);
    for m in [2, 3] {
        let w = wedge(m)?;
        let left = w.left_boundary(k as f64);
        p.segment("wedge-left", left, 0.0, left, t_hi);
        if let Some(r) = w.right_boundary(k as f64) {
            p.segment("wedge-right", r, 0.0, r, t_hi);
        }
    }
    for r in &zeros {
        p.point("predicted", r.predicted.sigma, r.predicted.t);
        p.point("zero", r.location.sigma, r.location.t);
    }
    Ok(fig)
}

/// Panels for `k ∈ {100, 200, 400, 800}`: every strip with `periods` cells and zeros, and the wedge edges.
pub fn figure4(periods: u32) -> Result<Figure> {
    let mut fig = Figure::default();
    for k in [100u32, 200, 400, 800] {
        let n = count_strips(k)?.count;
        let strips: Vec<StripSpec> = (2..2 + n).map(|m| strip(m, k)).collect::<zeta_strips::Result<_>>()?;
        let t_hi = strips.iter().map(|s| s.height(periods)).fold(0.0, f64::max);
        let zeros = strips
            .par_iter()
            .flat_map(|s| (0..periods).into_par_iter().map(move |j| locate_zero(s.m, k, j, DEFAULT_TOL)))
            .collect::<zeta_strips::Result<Vec<_>>>()?;
        let mut p = fig.panel(format!("k{k}"));
        for s in &strips {
            strip_outline(&mut p, s, s.height(periods));
        }
        for m in 2..=n + 2 {
            let w = wedge(m)?;
            if !w.contains(k as f64, w.left_boundary(k as f64)) {
                continue;
            }
            let left = w.left_boundary(k as f64);
            p.segment("wedge-left", left, 0.0, left, t_hi);
            if let Some(r) = w.right_boundary(k as f64) {
                p.segment("wedge-right", r, 0.0, r, t_hi);
            }
        }
        for r in &zeros {
            p.point("zero", r.location.sigma, r.location.t);
        }
    }
    Ok(fig)
}
