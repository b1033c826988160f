//! Zero counting and localization inside the critical strips.

mod rouche;
mod winding;

pub use rouche::{hline_margin, rouche_certificate, RoucheCertificate};
pub use winding::{winding_number, winding_number_with, WindingConfig, WindingResult};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};
use crate::geometry::{cell, dominant_index, ln_q_modulus, strip};
use crate::point::{ComplexPoint, Rect};
use crate::scaled::ScaledComplex;
use crate::series::{eval_deriv, DEFAULT_EPS};

pub const MAX_NEWTON_ITERATIONS: u32 = 60;
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: ComplexPoint,
    #[serde(rename = "M")]
    pub m: u32,
    pub k: u32,
    pub j: u32,
    /// `|ζ^(k)(ρ)| / Q_M^k(σ_ρ)`.
    pub residual: f64,
    /// `|ζ^(k+1)(ρ)| / Q_M^k(σ_ρ)`.
    pub simplicity_margin: f64,
    pub newton_iters: u32,
    pub predicted: ComplexPoint,
}

/// `ζ^(k)` divided by `Q_M^k(σ) + Q_{M+1}^k(σ)`: same zeros and argument, modulus near 1 in strip `M`.
pub fn strip_evaluator(m: u32, k: u32) -> impl Fn(ComplexPoint) -> Result<ScaledComplex> + Sync + Copy {
    move |s| {
        let v = eval_deriv(s, k, DEFAULT_EPS)?.value;
        Ok(v.mul_exp(-rouche::ln_pair(m, k, s.sigma)))
    }
}

/// `ζ^(k)` divided by its largest term modulus at `σ`; used inside the zero-free wedges.
pub fn dominant_evaluator(k: u32) -> impl Fn(ComplexPoint) -> Result<ScaledComplex> + Sync + Copy {
    move |s| {
        let n = dominant_index(s.sigma, k)?;
        let v = eval_deriv(s, k, DEFAULT_EPS)?.value;
        Ok(v.mul_exp(-ln_q_modulus(n, k, s.sigma)))
    }
}

/// Refines the single zero of cell `(M, k, j)`, starting from the predicted point.
pub fn locate_zero(m: u32, k: u32, j: u32, tol: f64) -> Result<ZeroRecord> {
    if !(tol > 0.0) {
        return Err(ZetaError::Config(format!("tolerance {tol} must be positive")));
    }
    let c = cell(m, k, j)?;
    let rect = c.rect();
    let w = winding_number(&rect, strip_evaluator(m, k))?;
    if w.count != 1 {
        return Err(ZetaError::UnexpectedCount {
            m,
            k,
            j,
            count: w.count,
        });
    }

    let mut iters = 0;
    let mut best = c.predicted_zero;
    let found = match newton(k, c.predicted_zero, &rect, tol, &mut iters, &mut best)? {
        Some(p) => Some(p),
        None => quadrisect(m, k, &rect, tol, &mut iters, &mut best)?,
    };
    let location = found.ok_or(ZetaError::NonConvergence {
        best,
        iterations: iters,
    })?;

    let scale = ln_q_modulus(m as u64, k, location.sigma);
    let f = eval_deriv(location, k, DEFAULT_EPS)?.value;
    let fp = eval_deriv(location, k + 1, DEFAULT_EPS)?.value;
    Ok(ZeroRecord {
        location,
        m,
        k,
        j,
        residual: f.abs().to_f64_relative(scale),
        simplicity_margin: fp.abs().to_f64_relative(scale),
        newton_iters: iters,
        predicted: c.predicted_zero,
    })
}

/// Newton's method confined to `rect`; gives up (returning `None`) after leaving it twice.
fn newton(
    k: u32,
    start: ComplexPoint,
    rect: &Rect,
    tol: f64,
    iters: &mut u32,
    best: &mut ComplexPoint,
) -> Result<Option<ComplexPoint>> {
    let mut s = start.to_complex();
    let mut exits = 0;
    let mut best_res = f64::INFINITY;
    while *iters < MAX_NEWTON_ITERATIONS {
        let here = ComplexPoint::from(s);
        let f = eval_deriv(here, k, DEFAULT_EPS)?.value;
        let fp = eval_deriv(here, k + 1, DEFAULT_EPS)?.value;
        let res = (f / fp).abs().to_f64();
        if res < best_res {
            best_res = res;
            *best = here;
        }
        let mut step = (f / fp).to_complex();
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Ok(None);
        }
        *iters += 1;
        let mut next = s - step;
        if !rect.contains_strictly(next.into()) {
            exits += 1;
            if exits >= 2 {
                return Ok(None);
            }
            for _ in 0..40 {
                step *= 0.5;
                next = s - step;
                if rect.contains_strictly(next.into()) {
                    break;
                }
            }
        }
        s = next;
        if step.norm() < tol * s.norm().max(1.0) {
            return Ok(Some(s.into()));
        }
    }
    Ok(None)
}

/// Shrinks the search box by winding counts on quadrants, restarting Newton from each box center.
fn quadrisect(
    m: u32,
    k: u32,
    rect: &Rect,
    tol: f64,
    iters: &mut u32,
    best: &mut ComplexPoint,
) -> Result<Option<ComplexPoint>> {
    let f = strip_evaluator(m, k);
    let mut boxed = *rect;
    for _ in 0..30 {
        let mut chosen = None;
        for q in boxed.quadrants() {
            match winding_number(&q, f) {
                Ok(w) if w.count == 1 => {
                    chosen = Some(q);
                    break;
                }
                Ok(_) => {}
                Err(ZetaError::ZeroOnContour { point, .. }) => {
                    // the zero sits on an inner edge: Newton from there
                    return newton(k, point, rect, tol, iters, best);
                }
                Err(e) => return Err(e),
            }
        }
        let Some(q) = chosen else {
            return Ok(None);
        };
        boxed = q;
        *best = boxed.center();
        if boxed.width() < 1e-3 * rect.width() {
            let mut local_iters = *iters;
            let out = newton(k, boxed.center(), rect, tol, &mut local_iters, best)?;
            *iters = local_iters;
            if out.is_some() {
                return Ok(out);
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroEnumeration {
    pub records: Vec<ZeroRecord>,
    /// `N_M^k(T)`: located zeros with `t ≤ T`.
    pub count: usize,
}

/// Locates the zeros of every cell of strip `S_M^k` that starts below `T`, in parallel.
pub fn enumerate_zeros(m: u32, k: u32, t_max: f64) -> Result<ZeroEnumeration> {
    let s = strip(m, k)?;
    if !s.exists {
        return Err(ZetaError::NoStrip { m, k });
    }
    if !(t_max > 0.0) {
        return Err(ZetaError::domain("enumerate_zeros", format!("T = {t_max} must be positive")));
    }
    let cells = (t_max / s.period).ceil() as u32;
    let records: Vec<ZeroRecord> = (0..cells)
        .into_par_iter()
        .map(|j| locate_zero(m, k, j, DEFAULT_TOL))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|r| r.location.t <= t_max)
        .collect();
    Ok(ZeroEnumeration {
        count: records.len(),
        records,
    })
}

/// Winding count of `ζ^(k)` over the whole strip rectangle `[σ_lo, σ_hi] × [0, T]`.
pub fn count_in_strip(m: u32, k: u32, t_max: f64) -> Result<WindingResult> {
    let s = strip(m, k)?;
    if !s.exists {
        return Err(ZetaError::NoStrip { m, k });
    }
    let periods = (t_max / s.period).ceil().max(1.0) as usize;
    let rect = Rect::new(s.sigma_lo(), s.sigma_hi(), 0.0, t_max);
    let config = WindingConfig {
        samples_per_edge: 64 * periods,
        ..WindingConfig::default()
    };
    winding_number_with(&rect, strip_evaluator(m, k), &config)
}
