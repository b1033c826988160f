use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Result};
use serde_json::{json, Value};

use zeta_strips::continuation::{count_zeros_halfplane, eval_deriv_cauchy, eval_zeta_em};
use zeta_strips::geometry::{count_strips, strip, wedge};
use zeta_strips::series::{eval_deriv, DELTA_MIN};
use zeta_strips::verify::{
    verify_head_bound, verify_m4_10_table, verify_remark_tables, verify_thm1a_constants, verify_vk_constants,
    ConstantCheck, RemarkConfig,
};
use zeta_strips::zeros::{count_in_strip, enumerate_zeros};
use zeta_strips::{ComplexPoint, ScaledComplex, ZetaError};

use crate::plot;

/// What a command produced: canonical results, text for stdout, a note for stderr and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub results: Value,
    pub output: String,
    pub note: String,
    pub success: bool,
}

fn hint(e: ZetaError) -> anyhow::Error {
    let extra = match &e {
        ZetaError::SeriesMargin { .. } => "use a point with σ > 1.05 for the series, or rely on the automatic continuation",
        ZetaError::Pole => "s = 1 is excluded; move the point off the pole",
        ZetaError::NoStrip { .. } => "run `regions <k>` to list the strips that exist at this k",
        ZetaError::Domain { .. } => "check the argument ranges in `--help`",
        ZetaError::ZeroOnContour { .. } => "shift the contour slightly (e.g. a different T)",
        _ => "",
    };
    if extra.is_empty() {
        anyhow!(e)
    } else {
        anyhow!("{e}\nhint: {extra}")
    }
}

fn fmt_value(v: &ScaledComplex, digits: usize) -> String {
    format!("{v:.digits$}")
}

fn value_json(v: &ScaledComplex) -> Value {
    let (m, d) = zeta_strips::scaled::decimal_parts(v.mantissa(), v.exponent());
    json!({ "re": m.re, "im": m.im, "exp10": d })
}

pub fn eval(s: ComplexPoint, k: u32, eps: f64, digits: usize) -> Result<Outcome> {
    let (method, r) = if s.sigma > 1.0 + DELTA_MIN {
        ("series", eval_deriv(s, k, eps))
    } else if k == 0 {
        ("euler-maclaurin", eval_zeta_em(s, eps))
    } else {
        ("cauchy", eval_deriv_cauchy(s, k, eps))
    };
    let r = r.map_err(hint)?;
    let mut out = String::new();
    let _ = writeln!(out, "s = {s}, k = {k}, method = {method}");
    let _ = writeln!(out, "value       = {}", fmt_value(&r.value, digits));
    let _ = writeln!(out, "error bound = {:.3e}", r.total_bound().to_f64());
    let _ = writeln!(
        out,
        "  truncation {:.3e}, rounding {:.3e}",
        r.abs_error_bound.to_f64(),
        r.rounding_bound.to_f64()
    );
    let _ = writeln!(out, "terms used  = {}", r.terms_used);
    Ok(Outcome {
        results: json!({
            "s": s, "k": k, "method": method,
            "value": value_json(&r.value),
            "abs_error_bound": r.abs_error_bound.to_f64(),
            "rounding_bound": r.rounding_bound.to_f64(),
            "terms_used": r.terms_used,
        }),
        output: out,
        note: String::new(),
        success: true,
    })
}

pub fn regions(k: u32, digits: usize) -> Result<Outcome> {
    let count = count_strips(k).map_err(hint)?;
    let kf = k as f64;
    let mut out = String::new();
    let mut wedges = Vec::new();
    let _ = writeln!(out, "zero-free wedges at k = {k}:");
    for m in 2.. {
        let w = wedge(m).map_err(hint)?;
        if w.tip_k > kf {
            break;
        }
        let left = w.left_boundary(kf);
        let right = w.right_boundary(kf);
        match right {
            Some(r) => {
                let _ = writeln!(out, "  M={m}: {left:.digits$} ≤ σ ≤ {r:.digits$}  (tip k = {:.4})", w.tip_k);
            }
            None => {
                let _ = writeln!(out, "  M={m}: σ ≥ {left:.digits$}");
            }
        }
        wedges.push(json!({ "M": m, "sigma_left": left, "sigma_right": right, "tip_k": w.tip_k }));
    }
    let _ = writeln!(out, "critical strips:");
    let mut strips = Vec::new();
    for m in 2..2 + count.count {
        let s = strip(m, k).map_err(hint)?;
        let _ = writeln!(
            out,
            "  S_{m}: centre σ = {:.digits$}, half-width {:.digits$}, period {:.digits$}",
            s.center_sigma, s.half_width, s.period
        );
        strips.push(serde_json::to_value(s)?);
    }
    if strips.is_empty() {
        let _ = writeln!(out, "  none");
    }
    let _ = writeln!(
        out,
        "c(k) = {}, bounds {:.4} < c(k) < {:.4}: {}",
        count.count,
        count.lower,
        count.upper,
        if count.within_bounds() { "holds" } else { "violated" }
    );
    Ok(Outcome {
        results: json!({ "k": k, "wedges": wedges, "strips": strips, "count": count }),
        output: out,
        note: String::new(),
        success: true,
    })
}

pub fn zeros(m: u32, k: u32, t_max: Option<f64>, count_at: Option<u32>) -> Result<Outcome> {
    let s = strip(m, k).map_err(hint)?;
    if !s.exists {
        return Err(hint(ZetaError::NoStrip { m, k }));
    }
    let t = match (t_max, count_at) {
        (_, Some(j)) => s.height(j),
        (Some(t), None) => t,
        (None, None) => return Err(anyhow!("give either --t-max T or --count-at j")),
    };
    let e = enumerate_zeros(m, k, t).map_err(hint)?;
    let mut out = String::new();
    for r in &e.records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    let mut note = format!("N_{m}^{k}({t}) = {}", e.count);
    let mut success = true;
    let mut extra = json!(null);
    if let Some(j) = count_at {
        let wound = count_in_strip(m, k, t).map_err(hint)?.count;
        success = e.count == j as usize && wound == j as i64;
        let _ = write!(note, " at T_{j}; winding count {wound}; expected {j}: {}", if success { "ok" } else { "MISMATCH" });
        extra = json!({ "j": j, "winding_count": wound });
    }
    Ok(Outcome {
        results: json!({ "M": m, "k": k, "T": t, "count": e.count, "records": e.records, "count_at": extra }),
        output: out,
        note,
        success,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Vk,
    Thm1a,
    M4To10,
    Head,
    Remark,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Vk => "vk",
            Suite::Thm1a => "thm1a",
            Suite::M4To10 => "m4-10",
            Suite::Head => "head",
            Suite::Remark => "remark",
            Suite::All => "all",
        }
    }
}

pub fn run_suite(suite: Suite) -> Vec<ConstantCheck> {
    let head = || verify_head_bound(2..=60, &[1.0, 1.25, 2.0, 4.0, 10.0]);
    let remark = || verify_remark_tables(&RemarkConfig::default());
    match suite {
        Suite::Vk => verify_vk_constants(),
        Suite::Thm1a => verify_thm1a_constants(),
        Suite::M4To10 => verify_m4_10_table(),
        Suite::Head => head(),
        Suite::Remark => remark(),
        Suite::All => {
            let mut all = verify_vk_constants();
            all.extend(verify_thm1a_constants());
            all.extend(verify_m4_10_table());
            all.extend(head());
            all.extend(remark());
            all
        }
    }
}

pub fn verify(suite: Suite, as_json: bool) -> Result<Outcome> {
    let checks = run_suite(suite);
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut out = String::new();
    for c in &checks {
        if as_json {
            out.push_str(&serde_json::to_string(c)?);
        } else {
            out.push_str(&c.to_string());
        }
        out.push('\n');
    }
    Ok(Outcome {
        results: json!({ "suite": suite.name(), "checks": checks }),
        output: out,
        note: format!("{}: {} checks, {} failed", suite.name(), checks.len(), failed),
        success: failed == 0,
    })
}

/// Smooth part of the zero count of ζ up to height `T`.
fn riemann_von_mangoldt(t: f64) -> f64 {
    let x = t / (2.0 * PI);
    x * x.ln() - x + 7.0 / 8.0
}

pub fn berndt(k: u32, t: f64, sigma_min: f64) -> Result<Outcome> {
    let (nk, n0) = rayon::join(
        || count_zeros_halfplane(k, t, sigma_min),
        || count_zeros_halfplane(0, t, sigma_min),
    );
    let (nk, n0) = (nk.map_err(hint)?, n0.map_err(hint)?);
    let bound = 2.0 * t.ln();
    let (main, label) = if k == 0 {
        (riemann_von_mangoldt(t), "T/2π log(T/2πe) + 7/8")
    } else {
        (n0 as f64 - t / (2.0 * PI) * 2f64.ln(), "N(T) - T/2π log 2")
    };
    let discrepancy = nk as f64 - main;
    let within = discrepancy.abs() <= bound;
    let mut out = String::new();
    let _ = writeln!(out, "N_{k}({t}) = {nk}");
    let _ = writeln!(out, "N({t}) = {n0}");
    let _ = writeln!(out, "main term {label} = {main:.6}");
    let _ = writeln!(out, "discrepancy = {discrepancy:.6} (|·| ≤ 2 log T = {bound:.6}: {})", if within { "yes" } else { "no" });
    Ok(Outcome {
        results: json!({
            "k": k, "T": t, "sigma_min": sigma_min, "N_k": nk, "N": n0,
            "main_term": main, "discrepancy": discrepancy, "bound": bound, "within": within,
        }),
        output: out,
        note: String::new(),
        success: within,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlotRequest {
    Zeros { m: u32, k: u32, t_max: f64 },
    Regions { k_min: u32, k_max: u32 },
    Figure2 { t_max: f64 },
    Figure4 { periods: u32 },
}

pub fn plot(req: PlotRequest, dir: &Path) -> Result<Outcome> {
    let (fig, stem, title) = match req {
        PlotRequest::Zeros { m, k, t_max } => (plot::zeros_figure(m, k, t_max)?, format!("zeros-M{m}-k{k}"), format!("zeros in S_{m} for k = {k}")),
        PlotRequest::Regions { k_min, k_max } => (plot::regions_figure(k_min, k_max, 9)?, format!("regions-k{k_min}-{k_max}"), "zero-free wedges, M = 2..9".to_string()),
        PlotRequest::Figure2 { t_max } => (plot::figure2(t_max)?, "figure2".to_string(), "k = 38".to_string()),
        PlotRequest::Figure4 { periods } => (plot::figure4(periods)?, "figure4".to_string(), "k = 100, 200, 400, 800".to_string()),
    };
    let (csv, svg) = plot::write_figure(&fig, dir, &stem, &title)?;
    let mut per_kind: BTreeMap<&str, usize> = BTreeMap::new();
    for it in &fig.items {
        *per_kind.entry(it.kind.as_str()).or_default() += 1;
    }
    Ok(Outcome {
        results: json!({ "csv": csv, "svg": svg, "items": per_kind }),
        output: format!("{}\n{}\n", csv.display(), svg.display()),
        note: format!("{} items", fig.items.len()),
        success: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_routes_by_sigma() {
        let a = eval(ComplexPoint::new(2.0, 0.0), 0, 1e-12, 10).unwrap();
        assert_eq!(a.results["method"], "series");
        assert!(a.output.contains("1.6449340668"));
        let b = eval(ComplexPoint::new(0.5, 14.0), 0, 1e-12, 10).unwrap();
        assert_eq!(b.results["method"], "euler-maclaurin");
        let c = eval(ComplexPoint::new(1.02, 3.0), 2, 1e-12, 10).unwrap();
        assert_eq!(c.results["method"], "cauchy");
    }

    #[test]
    fn pole_has_a_hint() {
        let e = eval(ComplexPoint::new(1.0, 0.0), 0, 1e-12, 10).unwrap_err();
        assert!(e.to_string().contains("hint"));
    }

    #[test]
    fn regions_at_38() {
        let r = regions(38, 6).unwrap();
        assert_eq!(r.results["wedges"].as_array().unwrap().len(), 2);
        assert_eq!(r.results["strips"].as_array().unwrap().len(), 1);
        assert_eq!(regions(100, 6).unwrap().results["strips"].as_array().unwrap().len(), 2);
        assert!(regions(3, 6).unwrap().output.contains("none"));
    }

    #[test]
    fn berndt_small() {
        let r = berndt(1, 50.0, 0.1).unwrap();
        assert!(r.success, "{}", r.output);
        assert_eq!(r.results["N"], 10);
    }
}
