//! Numerical re-checks of the explicit constants behind the zero-free wedges.

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};
use crate::geometry::{q_value, wedge, LN_3};
use crate::point::Rect;
use crate::zeros::{dominant_evaluator, winding_number_with, WindingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "≤")]
    LessEq,
    #[serde(rename = "=within")]
    Within,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Less => "<",
            Relation::LessEq => "≤",
            Relation::Within => "=within",
        })
    }
}

/// `computed <relation> claimed`, with `tolerance` used only by `Within`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheck {
    pub name: String,
    pub claimed: f64,
    pub computed: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
}

impl ConstantCheck {
    pub fn new(name: impl Into<String>, claimed: f64, computed: f64, relation: Relation, tolerance: f64) -> Self {
        let pass = match relation {
            Relation::Less => computed < claimed,
            Relation::LessEq => computed <= claimed,
            Relation::Within => (computed - claimed).abs() <= tolerance,
        };
        ConstantCheck {
            name: name.into(),
            claimed,
            computed,
            relation,
            tolerance,
            pass,
        }
    }

    pub fn less(name: impl Into<String>, claimed: f64, computed: f64) -> Self {
        Self::new(name, claimed, computed, Relation::Less, 0.0)
    }

    pub fn within(name: impl Into<String>, claimed: f64, computed: f64, tolerance: f64) -> Self {
        Self::new(name, claimed, computed, Relation::Within, tolerance)
    }
}

impl fmt::Display for ConstantCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: computed {:.10} {} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.computed,
            self.relation,
            self.claimed
        )?;
        if self.relation == Relation::Within {
            write!(f, " ± {:e}", self.tolerance)?;
        }
        Ok(())
    }
}

/// `log Q_n^k(σ)` for real `k`.
fn ln_q(n: f64, k: f64, sigma: f64) -> f64 {
    let l = n.ln();
    k * l.ln() - sigma * l
}

fn q_ratio(num: f64, den: f64, k: f64, sigma: f64) -> f64 {
    (ln_q(num, k, sigma) - ln_q(den, k, sigma)).exp()
}

/// The tail factor `R_M^k(σ)` for real `k`; infinite outside its validity region.
fn r_factor(m: f64, k: f64, sigma: f64) -> f64 {
    let a = sigma - 1.0;
    let d = a * m.ln() - k + 1.0;
    if a <= 0.0 || d <= 0.0 {
        return f64::INFINITY;
    }
    m / a * (1.0 + k / d)
}

fn max_over<I: Iterator<Item = f64>>(it: I) -> f64 {
    it.fold(f64::NEG_INFINITY, f64::max)
}

fn vk_ks() -> impl Iterator<Item = f64> + Clone {
    (3..=200).chain([500, 1000, 10_000]).map(f64::from)
}

/// Constants of the `M = 2` argument, on the boundary `σ = q_2 k + 2`.
pub fn verify_vk_constants() -> Vec<ConstantCheck> {
    let q2 = q_value(2);
    let at = move |k: f64| q2 * k + 2.0;
    let r4 = max_over(vk_ks().map(|k| r_factor(4.0, k, at(k))));
    let q42 = max_over(vk_ks().map(|k| q_ratio(4.0, 2.0, k, at(k))));
    let q32_dev = max_over(vk_ks().map(|k| (q_ratio(3.0, 2.0, k, at(k)) - 4.0 / 9.0).abs()));
    let q32 = q_ratio(3.0, 2.0, 3.0, at(3.0));
    let slack = vk_ks()
        .map(|k| {
            let s = at(k);
            1.0 - q_ratio(3.0, 2.0, k, s) - q_ratio(4.0, 2.0, k, s) * (1.0 + r_factor(4.0, k, s))
        })
        .fold(f64::INFINITY, f64::min);
    vec![
        ConstantCheck::less("vk.R_4(q_2 k + 2), max over k", 0.68, r4),
        ConstantCheck::new("vk.Q_4/Q_2(q_2 k + 2), max over k", 0.19, q42, Relation::LessEq, 0.0),
        ConstantCheck::within("vk.Q_3/Q_2(q_2 k + 2)", 4.0 / 9.0, q32, 1e-12),
        ConstantCheck::within("vk.Q_3/Q_2(q_2 k + 2), worst deviation over k", 0.0, q32_dev, 1e-12),
        ConstantCheck::less("vk.-(1 - 4/9 - 0.19(1 + 0.68))", 0.0, -(1.0 - 4.0 / 9.0 - 0.19 * 1.68)),
        ConstantCheck::less("vk.-(1 - Q_3/Q_2 - Q_4/Q_2 (1 + R_4)), worst k", 0.0, -slack),
    ]
}

/// The first tip `k_3 = (4 log 3 + 2)/(q_2 - q_3)`.
pub fn k3_tip() -> f64 {
    (4.0 * LN_3 + 2.0) / (q_value(2) - q_value(3))
}

/// Constants of the `M = 3` wedge `q_3 k + 4 log 3 ≤ σ ≤ q_2 k - 2`.
pub fn verify_thm1a_constants() -> Vec<ConstantCheck> {
    let (q2, q3) = (q_value(2), q_value(3));
    let k_lo = k3_tip().ceil() as u32;
    let ks = move || (k_lo..=400).chain([1000, 10_000]).map(f64::from);
    let left = move |k: f64| q3 * k + 4.0 * LN_3;
    let right = move |k: f64| q2 * k - 2.0;

    let r4 = max_over(ks().map(|k| r_factor(4.0, k, left(k))));
    let r4_tip = r_factor(4.0, k_lo as f64, left(k_lo as f64));
    let q43 = max_over(ks().map(|k| q_ratio(4.0, 3.0, k, left(k))));
    let q23 = max_over(ks().map(|k| q_ratio(2.0, 3.0, k, right(k))));
    let slack = ks()
        .map(|k| 1.0 - q23 - q_ratio(4.0, 3.0, k, left(k)) * (1.0 + r_factor(4.0, k, left(k))))
        .fold(f64::INFINITY, f64::min);
    vec![
        ConstantCheck::less("thm1a.R_4(q_3 k + 4 log 3), max over k ≥ ⌈k_3⌉", 0.72, r4),
        ConstantCheck::less("thm1a.R_4 at k = ⌈k_3⌉", 0.72, r4_tip),
        ConstantCheck::less("thm1a.Q_4/Q_3(q_3 k + 4 log 3)", 0.29, q43),
        ConstantCheck::less("thm1a.Q_2/Q_3(q_2 k - 2)", 0.45, q23),
        ConstantCheck::less("thm1a.-(1 - 0.45 - 0.29(1 + 0.72))", 0.0, -(1.0 - 0.45 - 0.29 * 1.72)),
        ConstantCheck::less("thm1a.-(1 - Q_2/Q_3 - Q_4/Q_3 (1 + R_4)), worst k", 0.0, -slack),
    ]
}

/// Tip `k_M` of wedge `M` and the abscissa `σ_M = q_M k_M + (M+1) log 3`.
pub fn tip_and_sigma(m: u32) -> Result<(f64, f64)> {
    let w = wedge(m)?;
    Ok((w.tip_k, w.left_boundary(w.tip_k)))
}

const M4_10_TABLE: [(u32, f64, f64, f64); 7] = [
    (4, 0.6, 0.3, 0.47),
    (5, 0.57, 0.31, 0.47),
    (6, 0.55, 0.31, 0.48),
    (7, 0.53, 0.31, 0.48),
    (8, 0.52, 0.32, 0.48),
    (9, 0.51, 0.32, 0.48),
    (10, 0.51, 0.32, 0.48),
];

/// `R_{M+1}`, `Q_{M+1}/Q_M` and `T_M/Q_M ≤ (Q_{M+1}/Q_M)(1 + R_{M+1})` at `σ_M`, for `M = 4..10`.
pub fn verify_m4_10_table() -> Vec<ConstantCheck> {
    let mut out = Vec::with_capacity(21);
    for (m, r_claim, q_claim, t_claim) in M4_10_TABLE {
        let (k, sigma) = tip_and_sigma(m).expect("M ≥ 4 has a wedge");
        let mf = m as f64;
        let r = r_factor(mf + 1.0, k, sigma);
        let q = q_ratio(mf + 1.0, mf, k, sigma);
        out.push(ConstantCheck::less(format!("m4-10.M={m} R_{{M+1}}(σ_M)"), r_claim, r));
        out.push(ConstantCheck::less(format!("m4-10.M={m} Q_{{M+1}}/Q_M(σ_M)"), q_claim, q));
        out.push(ConstantCheck::less(format!("m4-10.M={m} T_M/Q_M(σ_M)"), t_claim, q * (1.0 + r)));
    }
    out
}

/// `(M/(M+1))^{cM + d}`.
pub fn head_ratio_power(m: f64, c: f64, d: f64) -> f64 {
    ((c * m + d) * (-(1.0 / m).ln_1p())).exp()
}

/// Monotone growth of `(M/(M+1))^{(M+1) log 3}` towards `1/3` over `m_range`, and
/// `H_M/Q_M ≤ 1/2` on the left boundary of wedge `M` at `k = λ k_M` for each `λ` in `k_samples`.
pub fn verify_head_bound(m_range: RangeInclusive<u32>, k_samples: &[f64]) -> Vec<ConstantCheck> {
    let (c, d) = (LN_3, LN_3);
    let (lo, hi) = (*m_range.start(), *m_range.end());
    let mut out = Vec::new();
    if lo >= 1 && hi > lo {
        let drop = max_over((lo..hi).map(|m| head_ratio_power(m as f64, c, d) - head_ratio_power(m as f64 + 1.0, c, d)));
        let top = max_over((lo..=hi).map(|m| head_ratio_power(m as f64, c, d)));
        out.push(ConstantCheck::less(format!("head.y(M) - y(M+1), max over M ∈ {lo}..{hi}"), 0.0, drop));
        out.push(ConstantCheck::less(format!("head.y(M) below 1/3 for M ∈ {lo}..={hi}"), 1.0 / 3.0, top));
    }
    out.push(ConstantCheck::within("head.y(10^4) near 1/3", 1.0 / 3.0, head_ratio_power(1e4, c, d), 1e-4));

    let rows: Vec<ConstantCheck> = m_range
        .filter(|&m| m >= 2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|m| {
            let w = wedge(m).expect("M ≥ 2 has a wedge");
            let worst = max_over(k_samples.iter().map(|&lambda| {
                let k = lambda * w.tip_k;
                let sigma = w.left_boundary(k);
                let ln_qm = ln_q(m as f64, k, sigma);
                (2..m).map(|n| (ln_q(n as f64, k, sigma) - ln_qm).exp()).sum::<f64>()
            }));
            ConstantCheck::new(format!("head.H_M/Q_M at the left boundary, M={m}"), 0.5, worst, Relation::LessEq, 0.0)
        })
        .collect();
    out.extend(rows);
    out
}

pub const REMARK_ON_LINE: [u32; 8] = [14, 41, 87, 154, 247, 368, 519, 703];
pub const REMARK_TIP: [u32; 8] = [20, 71, 151, 269, 429, 638, 898, 1214];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemarkConfig {
    /// Largest `M` scanned for the on-line row.
    pub max_m: u32,
    /// Half-width of the box around the line.
    pub half_width: f64,
    /// Height window in periods of strip `S_M`.
    pub periods: f64,
    /// Most values of `k` examined per row.
    pub budget: u32,
}

impl Default for RemarkConfig {
    fn default() -> Self {
        RemarkConfig {
            max_m: 5,
            half_width: 0.5,
            periods: 3.0,
            budget: 400,
        }
    }
}

/// The line through wedge `M`: `σ = (q_{M-1} + q_M) k/2 + (log 3)/2`.
pub fn mid_wedge_sigma(m: u32, k: f64) -> f64 {
    0.5 * (q_value(m - 1) + q_value(m)) * k + 0.5 * LN_3
}

/// Outcome of a downward scan in `k` along the mid-wedge line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineScan {
    pub m: u32,
    /// Smallest `k` such that no zero was seen near the line for any `k' ≥ k` up to the tip.
    pub k_free: u32,
    pub complete: bool,
}

/// Scans `k = ⌈k_M⌉, ⌈k_M⌉ - 1, …` until a zero of `ζ^(k)` shows up within `half_width` of the line.
pub fn scan_mid_wedge_line(m: u32, config: &RemarkConfig) -> Result<LineScan> {
    if m < 3 {
        return Err(ZetaError::domain("scan_mid_wedge_line", format!("M = {m} < 3")));
    }
    let w = wedge(m)?;
    let period = 2.0 * std::f64::consts::PI / (1.0 / m as f64).ln_1p();
    let t_hi = config.periods * period;
    let winding = WindingConfig {
        samples_per_edge: (24.0 * config.periods).ceil() as usize * 8,
        ..WindingConfig::default()
    };
    let mut k = w.tip_k.ceil() as u32;
    let mut free = k;
    for _ in 0..config.budget {
        if k < 3 {
            return Ok(LineScan { m, k_free: free, complete: true });
        }
        let sigma = mid_wedge_sigma(m, k as f64);
        let rect = Rect::new(sigma - config.half_width, sigma + config.half_width, 0.0, t_hi);
        let count = match winding_number_with(&rect, dominant_evaluator(k), &winding) {
            Ok(r) => r.count,
            Err(ZetaError::ZeroOnContour { .. }) => 1,
            Err(e) => return Err(e),
        };
        if count != 0 {
            return Ok(LineScan { m, k_free: free, complete: true });
        }
        free = k;
        k -= 1;
    }
    Ok(LineScan { m, k_free: free, complete: false })
}

/// Tip row (closed form, compared after rounding up) and on-line row (scan, `M ≤ max_m`).
pub fn verify_remark_tables(config: &RemarkConfig) -> Vec<ConstantCheck> {
    let mut out: Vec<ConstantCheck> = (3..=10u32)
        .map(|m| {
            let tip = wedge(m).expect("M ≥ 3 has a wedge").tip_k;
            ConstantCheck::within(
                format!("remark.tip M={m}: ⌈{tip:.4}⌉"),
                REMARK_TIP[(m - 3) as usize] as f64,
                tip.ceil(),
                0.0,
            )
        })
        .collect();
    let scans: Vec<ConstantCheck> = (3..=config.max_m.min(10))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|m| {
            let claimed = REMARK_ON_LINE[(m - 3) as usize] as f64;
            match scan_mid_wedge_line(m, config) {
                Ok(s) if s.complete => ConstantCheck::within(format!("remark.on-line M={m}"), claimed, s.k_free as f64, 0.0),
                Ok(s) => {
                    let mut c = ConstantCheck::within(format!("remark.on-line M={m} (partial: budget exceeded)"), claimed, s.k_free as f64, 0.0);
                    c.pass = false;
                    c
                }
                Err(e) => {
                    let mut c = ConstantCheck::within(format!("remark.on-line M={m} (error: {e})"), claimed, f64::NAN, 0.0);
                    c.pass = false;
                    c
                }
            }
        })
        .collect();
    out.extend(scans);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_semantics() {
        assert!(ConstantCheck::less("a", 1.0, 0.5).pass);
        assert!(!ConstantCheck::less("a", 1.0, 1.0).pass);
        assert!(ConstantCheck::new("a", 1.0, 1.0, Relation::LessEq, 0.0).pass);
        assert!(ConstantCheck::within("a", 1.0, 1.0 + 1e-13, 1e-12).pass);
        assert!(!ConstantCheck::within("a", 1.0, f64::NAN, 1.0).pass);
    }

    #[test]
    fn four_ninths_is_exact() {
        let q2 = q_value(2);
        for k in [3.0, 17.0, 250.0] {
            assert!((q_ratio(3.0, 2.0, k, q2 * k + 2.0) - 4.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn r_factor_agrees_with_the_series_module() {
        let tb = crate::series::tail_bound(4, 3, 5.5).unwrap();
        assert!((r_factor(4.0, 3.0, 5.5) - tb.r).abs() < 1e-14);
    }

    #[test]
    fn r4_at_the_first_vk_argument() {
        // fixed independently: 4/a (1 + 3/(a log 4 - 2)) at a = 3 q_2 + 1
        let a = 3.0 * q_value(2) + 1.0;
        let want = 4.0 / a * (1.0 + 3.0 / (a * 4f64.ln() - 2.0));
        assert!((r_factor(4.0, 3.0, 3.0 * q_value(2) + 2.0) - want).abs() < 1e-14);
        assert!((want - 1.569_884).abs() < 1e-6);
    }

    #[test]
    fn table_has_twenty_one_rows() {
        let checks = verify_m4_10_table();
        assert_eq!(checks.len(), 21);
        assert!(checks.iter().all(|c| c.pass), "{checks:#?}");
    }

    #[test]
    fn head_asymptote() {
        assert!((head_ratio_power(1e4, LN_3, LN_3) - 1.0 / 3.0).abs() < 1e-4);
        let checks = verify_head_bound(2..=40, &[1.0, 2.0, 10.0]);
        assert!(checks.iter().all(|c| c.pass), "{checks:#?}");
        let h2 = checks.iter().find(|c| c.name.ends_with("M=2")).unwrap();
        assert_eq!(h2.computed, 0.0);
    }

    #[test]
    fn tip_row() {
        let checks = verify_remark_tables(&RemarkConfig { max_m: 2, ..RemarkConfig::default() });
        assert_eq!(checks.len(), 8);
        assert!(checks[0].pass && checks[3].pass);
        assert_eq!(checks[3].computed, 269.0);
    }

    #[test]
    fn mid_wedge_scan_depends_on_the_height_window() {
        let short = scan_mid_wedge_line(3, &RemarkConfig::default()).unwrap();
        assert!(short.complete);
        assert_eq!(short.k_free, 13);
        let tall = RemarkConfig { periods: 30.0, ..RemarkConfig::default() };
        assert_eq!(scan_mid_wedge_line(3, &tall).unwrap().k_free, 14);
        assert!(scan_mid_wedge_line(2, &tall).is_err());
    }
}
