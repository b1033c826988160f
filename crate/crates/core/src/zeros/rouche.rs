use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};
use crate::geometry::{cell, ln_q_modulus, strip, CellRect};
use crate::point::ComplexPoint;
use crate::series::{tail_majorant, term_unchecked};

/// Evidence that `|H_M + T_{M+1}| < |Q_M + Q_{M+1}|` on the whole boundary of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoucheCertificate {
    pub cell: CellRect,
    /// Smallest lower bound of the normalized gap over all boundary segments.
    pub min_gap: f64,
    pub samples_per_edge: usize,
    pub holds: bool,
    /// Where the smallest gap was found.
    pub worst_point: ComplexPoint,
}

/// `log(Q_M^k(σ) + Q_{M+1}^k(σ))`.
pub(crate) fn ln_pair(m: u32, k: u32, sigma: f64) -> f64 {
    let a = ln_q_modulus(m as u64, k, sigma);
    let b = ln_q_modulus(m as u64 + 1, k, sigma);
    let hi = a.max(b);
    hi + (-(a - b).abs()).exp().ln_1p()
}

/// Real majorants at abscissa `σ`, all relative to `Q_M + Q_{M+1}`.
struct Majorants {
    ln_pair: f64,
    /// `H_M(σ) + T̄_{M+1}(σ)`.
    perturbation: f64,
    /// Upper bound for `|∂/∂σ|` of both `|Q_M + Q_{M+1}|` and the perturbation.
    lipschitz_sigma: f64,
    /// Upper bound for `|∂/∂t (Q_M + Q_{M+1})|`.
    lipschitz_t: f64,
}

fn majorants(m: u32, k: u32, sigma: f64) -> Result<Majorants> {
    let pair = ln_pair(m, k, sigma);
    let m64 = m as u64;
    let rel = |n: u64| (ln_q_modulus(n, k, sigma) - pair).exp();

    let mut head = 0.0;
    let mut lip = 0.0;
    for n in 2..m64 {
        let q = rel(n);
        head += q;
        lip += (n as f64).ln() * q;
    }
    let pair_lip = (m as f64).ln() * rel(m64) + ((m + 1) as f64).ln() * rel(m64 + 1);
    lip += pair_lip;

    let tail = tail_majorant(m64 + 2, k, sigma, 1e-9)?;
    let tail_rel = tail.total().to_f64_relative(pair);
    for n in m64 + 2..=tail.n_end {
        lip += (n as f64).ln() * rel(n);
    }
    // d/dσ of Q_N R_N(σ), with D = (σ-1) log N - k + 1
    let big_n = tail.n_end as f64;
    let a = sigma - 1.0;
    let l = big_n.ln();
    let d = a * l - k as f64 + 1.0;
    let tail_slope = l + 1.0 / a + k as f64 * l / (d * (d + k as f64));
    lip += tail.tail.bound().to_f64_relative(pair) * tail_slope;

    Ok(Majorants {
        ln_pair: pair,
        perturbation: head + tail_rel,
        lipschitz_sigma: lip,
        lipschitz_t: pair_lip,
    })
}

/// Normalized gap `(|Q_M + Q_{M+1}|(s) - H_M(σ) - T̄_{M+1}(σ)) / (Q_M + Q_{M+1})(σ)`.
fn gap(m: u32, k: u32, s: ComplexPoint, maj: &Majorants) -> f64 {
    let pair = term_unchecked(m as u64, k, s) + term_unchecked(m as u64 + 1, k, s);
    pair.abs().to_f64_relative(maj.ln_pair) - maj.perturbation
}

pub fn rouche_certificate(m: u32, k: u32, j: u32, samples_per_edge: usize) -> Result<RoucheCertificate> {
    if samples_per_edge < 2 {
        return Err(ZetaError::Config("at least two samples per edge are needed".into()));
    }
    let c = cell(m, k, j)?;
    let (s_lo, s_hi) = c.sigma_range;
    let (t_lo, t_hi) = c.t_range;
    let n = samples_per_edge;

    let mut min_gap = f64::INFINITY;
    let mut worst = c.predicted_zero;
    let mut note = |lower: f64, at: ComplexPoint| {
        if lower < min_gap {
            min_gap = lower;
            worst = at;
        }
    };

    // vertical edges: the perturbation is constant along t
    for sigma in [s_lo, s_hi] {
        let maj = majorants(m, k, sigma)?;
        let h = (t_hi - t_lo) / n as f64;
        let gaps: Vec<f64> = (0..=n)
            .map(|i| gap(m, k, ComplexPoint::new(sigma, t_lo + h * i as f64), &maj))
            .collect();
        for (i, w) in gaps.windows(2).enumerate() {
            let lower = 0.5 * (w[0] + w[1]) - 0.5 * maj.lipschitz_t * h;
            note(lower, ComplexPoint::new(sigma, t_lo + h * (i as f64 + 0.5)));
        }
    }

    // horizontal edges: everything moves with σ; gaps are compared relative to the left end
    let h = (s_hi - s_lo) / n as f64;
    let majs: Vec<Majorants> = (0..=n)
        .map(|i| majorants(m, k, s_lo + h * i as f64))
        .collect::<Result<_>>()?;
    for t in [t_lo, t_hi] {
        let gaps: Vec<f64> = (0..=n)
            .map(|i| gap(m, k, ComplexPoint::new(s_lo + h * i as f64, t), &majs[i]))
            .collect();
        for i in 0..n {
            let rescale = (majs[i + 1].ln_pair - majs[i].ln_pair).exp();
            let lower = 0.5 * (gaps[i] + gaps[i + 1] * rescale) - 0.5 * majs[i].lipschitz_sigma * h;
            note(lower, ComplexPoint::new(s_lo + h * (i as f64 + 0.5), t));
        }
    }

    Ok(RoucheCertificate {
        cell: c,
        min_gap,
        samples_per_edge,
        holds: min_gap > 0.0,
        worst_point: worst,
    })
}

/// Lower bound, normalized by `Q_M + Q_{M+1}`, for `|ζ^(k)|` on the horizontal segment
/// `t = 2πj/Δ` across the strip, minimized over `σ`.
///
/// For `j ≥ 1` this is `1/√2 - (H_M + T̄_{M+1})/(Q_M + Q_{M+1})`; for `j = 0` the segment lies on
/// the real axis where all terms share one sign, and the value is the plain sum ratio (at least 1).
pub fn hline_margin(m: u32, k: u32, j: u32) -> Result<f64> {
    let s = strip(m, k)?;
    if !s.exists {
        return Err(ZetaError::NoStrip { m, k });
    }
    let value = |sigma: f64| -> Result<f64> {
        let maj = majorants(m, k, sigma)?;
        Ok(if j == 0 {
            // the pair plus every other term, all positive
            1.0 + maj.perturbation
        } else {
            FRAC_1_SQRT_2 - maj.perturbation
        })
    };
    let samples = 512;
    let (lo, hi) = (s.sigma_lo(), s.sigma_hi());
    let h = (hi - lo) / samples as f64;
    let mut best = (f64::INFINITY, lo);
    for i in 0..=samples {
        let sigma = lo + h * i as f64;
        let v = value(sigma)?;
        if v < best.0 {
            best = (v, sigma);
        }
    }
    // golden-section refinement around the best sample
    let (mut a, mut b) = ((best.1 - h).max(lo), (best.1 + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = value(x1)?;
    let mut f2 = value(x2)?;
    for _ in 0..40 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = value(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = value(x2)?;
        }
    }
    Ok(best.0.min(f1).min(f2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_log_is_stable() {
        let k = 800;
        let sigma = crate::geometry::q_value(2) * k as f64;
        let a = ln_q_modulus(2, k, sigma);
        assert!((ln_pair(2, k, sigma) - (a + 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn certificates_for_small_cells() {
        let c = rouche_certificate(2, 38, 0, 256).unwrap();
        assert!(c.holds, "min gap {}", c.min_gap);
        let c = rouche_certificate(3, 100, 0, 256).unwrap();
        assert!(c.holds, "min gap {}", c.min_gap);
        assert!(rouche_certificate(3, 38, 0, 256).is_err());
    }

    #[test]
    fn horizontal_margins_are_positive() {
        assert!(hline_margin(2, 38, 1).unwrap() > 0.0);
        assert!(hline_margin(3, 100, 2).unwrap() > 0.0);
        assert!(hline_margin(2, 38, 0).unwrap() >= 1.0);
    }
}
