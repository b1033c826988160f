//! Closed-form geometry of the `(k, σ)` plane: the slopes `q_M`, the zero-free
//! wedges, the critical strips between them and the cells that each hold one zero.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};
use crate::point::{ComplexPoint, Rect};

pub const LN_3: f64 = 1.098_612_288_668_109_8;

/// The slope `q_M` of the line where `|Q_M^k| = |Q_{M+1}^k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QConstant {
    pub m: u32,
    pub value: f64,
}

/// `q_M = log(log M / log(M+1)) / log(M/(M+1))`.
pub fn q_const(m: u32) -> Result<QConstant> {
    if m < 2 {
        return Err(ZetaError::domain("q_const", format!("M = {m} < 2")));
    }
    Ok(QConstant {
        m,
        value: q_value(m),
    })
}

/// Unchecked `q_M`, evaluated without cancellation for large `M`.
pub(crate) fn q_value(m: u32) -> f64 {
    let m = m as f64;
    let step = (1.0 / m).ln_1p();
    (step / m.ln()).ln_1p() / step
}

/// The interval `(1/log n, 1/log(n-1))` that contains `q_{n-1}`.
pub fn q_bracket(n: u32) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(ZetaError::domain("q_bracket", format!("n = {n} < 3")));
    }
    Ok((1.0 / (n as f64).ln(), 1.0 / ((n - 1) as f64).ln()))
}

/// Zero-free region where `Q_M^k` dominates:
/// `slope_left·k + offset_left ≤ σ ≤ slope_right·k + offset_right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeSpec {
    pub m: u32,
    pub slope_left: f64,
    pub offset_left: f64,
    /// Absent for `M = 2`, whose region is unbounded to the right.
    pub slope_right: Option<f64>,
    pub offset_right: Option<f64>,
    pub tip_k: f64,
}

impl WedgeSpec {
    pub fn left_boundary(&self, k: f64) -> f64 {
        self.slope_left * k + self.offset_left
    }

    pub fn right_boundary(&self, k: f64) -> Option<f64> {
        Some(self.slope_right? * k + self.offset_right?)
    }

    /// Whether `(k, σ)` lies in the closed wedge (and `k` is at least the tip).
    pub fn contains(&self, k: f64, sigma: f64) -> bool {
        if k < self.tip_k || sigma < self.left_boundary(k) {
            return false;
        }
        self.right_boundary(k).map_or(true, |r| sigma <= r)
    }
}

pub fn wedge(m: u32) -> Result<WedgeSpec> {
    if m < 2 {
        return Err(ZetaError::domain("wedge", format!("M = {m} < 2")));
    }
    let q = q_value(m);
    if m == 2 {
        return Ok(WedgeSpec {
            m,
            slope_left: q,
            offset_left: 2.0,
            slope_right: None,
            offset_right: None,
            tip_k: 3.0,
        });
    }
    let q_prev = q_value(m - 1);
    let (offset_left, offset_right) = if m == 3 {
        (4.0 * LN_3, -2.0)
    } else {
        ((m + 1) as f64 * LN_3, -(m as f64) * LN_3)
    };
    Ok(WedgeSpec {
        m,
        slope_left: q,
        offset_left,
        slope_right: Some(q_prev),
        offset_right: Some(offset_right),
        tip_k: (offset_left - offset_right) / (q_prev - q),
    })
}

/// The critical strip `S_M^k`: the band `|σ - q_M k| ≤ (M+1) log 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub m: u32,
    pub k: u32,
    pub center_sigma: f64,
    pub half_width: f64,
    pub period: f64,
    pub exists: bool,
}

impl StripSpec {
    /// `Δ = log(M+1) - log M`.
    pub fn delta(&self) -> f64 {
        log_ratio(self.m)
    }

    pub fn sigma_lo(&self) -> f64 {
        self.center_sigma - self.half_width
    }

    pub fn sigma_hi(&self) -> f64 {
        self.center_sigma + self.half_width
    }

    /// The sanctioned height `T_j = 2πj/Δ`.
    pub fn height(&self, j: u32) -> f64 {
        j as f64 * self.period
    }
}

fn log_ratio(m: u32) -> f64 {
    (1.0 / m as f64).ln_1p()
}

pub fn strip(m: u32, k: u32) -> Result<StripSpec> {
    if m < 2 {
        return Err(ZetaError::domain("strip", format!("M = {m} < 2")));
    }
    if k < 3 {
        return Err(ZetaError::domain("strip", format!("k = {k} < 3")));
    }
    let kf = k as f64;
    let q = q_value(m);
    let q_next = q_value(m + 1);
    let half_width = (m + 1) as f64 * LN_3;
    let exists = q_next * kf + (m + 2) as f64 * LN_3 < q * kf - half_width;
    Ok(StripSpec {
        m,
        k,
        center_sigma: q * kf,
        half_width,
        period: 2.0 * PI / log_ratio(m),
        exists,
    })
}

/// `c(k)` with the bounds `√k/(3 log k) < c(k) < 2√k/log k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripCount {
    pub count: u32,
    pub lower: f64,
    pub upper: f64,
}

impl StripCount {
    pub fn within_bounds(&self) -> bool {
        self.lower < self.count as f64 && (self.count as f64) < self.upper
    }
}

/// Counts the existing strips at `k`.
///
/// The existence condition reads `k (q_M - q_{M+1}) > (2M+3) log 3`, whose left side
/// shrinks with `M`, so the scan stops at the first missing strip.
pub fn count_strips(k: u32) -> Result<StripCount> {
    if k < 3 {
        return Err(ZetaError::domain("count_strips", format!("k = {k} < 3")));
    }
    let mut count = 0;
    let mut m = 2;
    while strip(m, k)?.exists {
        count += 1;
        m += 1;
    }
    let kf = k as f64;
    Ok(StripCount {
        count,
        lower: kf.sqrt() / (3.0 * kf.ln()),
        upper: 2.0 * kf.sqrt() / kf.ln(),
    })
}

/// The rectangle `R_j` of strip `S_M^k`, containing exactly one zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRect {
    pub strip: StripSpec,
    pub j: u32,
    pub sigma_range: (f64, f64),
    pub t_range: (f64, f64),
    pub predicted_zero: ComplexPoint,
}

impl CellRect {
    pub fn rect(&self) -> Rect {
        Rect::new(
            self.sigma_range.0,
            self.sigma_range.1,
            self.t_range.0,
            self.t_range.1,
        )
    }
}

pub fn cell(m: u32, k: u32, j: u32) -> Result<CellRect> {
    let s = strip(m, k)?;
    if !s.exists {
        return Err(ZetaError::NoStrip { m, k });
    }
    Ok(cell_of(s, j))
}

pub(crate) fn cell_of(s: StripSpec, j: u32) -> CellRect {
    let delta = s.delta();
    let jf = j as f64;
    CellRect {
        strip: s,
        j,
        sigma_range: (s.sigma_lo(), s.sigma_hi()),
        t_range: (2.0 * PI * jf / delta, 2.0 * PI * (jf + 1.0) / delta),
        predicted_zero: ComplexPoint::new(s.center_sigma, (2.0 * jf + 1.0) * PI / delta),
    }
}

/// `log |Q_n^k(σ)| = k log log n - σ log n`, for `n ≥ 2`.
pub(crate) fn ln_q_modulus(n: u64, k: u32, sigma: f64) -> f64 {
    let ln_n = (n as f64).ln();
    k as f64 * ln_n.ln() - sigma * ln_n
}

/// The `n ≥ 2` maximizing `(log n)^k / n^σ`; ties go to the smaller index.
pub fn dominant_index(sigma: f64, k: u32) -> Result<u64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(ZetaError::domain("dominant_index", format!("σ = {sigma} must be positive")));
    }
    if k < 1 {
        return Err(ZetaError::domain("dominant_index", "k must be at least 1"));
    }
    let peak_ln = k as f64 / sigma;
    // beyond this the peak index does not fit in u64
    if peak_ln > 43.0 {
        return Err(ZetaError::domain(
            "dominant_index",
            format!("peak index e^{peak_ln} is too large"),
        ));
    }
    let peak = peak_ln.exp();
    let lo = (peak.floor() as u64).saturating_sub(1).max(2);
    let hi = (peak.ceil() as u64 + 1).max(2);
    let mut best = lo;
    let mut best_val = ln_q_modulus(lo, k, sigma);
    for n in lo + 1..=hi {
        let v = ln_q_modulus(n, k, sigma);
        let tie = 1e-12 * best_val.abs().max(1.0);
        if v > best_val + tie {
            best = n;
            best_val = v;
        }
    }
    Ok(best)
}
