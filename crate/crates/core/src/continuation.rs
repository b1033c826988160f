//! `ζ(s)` by Euler–Maclaurin summation and `ζ^(k)(s)` by Cauchy integrals over small
//! circles, for the region left of the series' reach. Error figures here are estimates,
//! not certified bounds.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bernoulli;
use crate::error::{Result, ZetaError};
use crate::geometry::q_value;
use crate::point::{ComplexPoint, Rect};
use crate::scaled::{ScaledComplex, ScaledReal};
use crate::series::{Compensated, EvalResult};
use crate::zeros::{winding_number_with, WindingConfig};

pub const MAX_BERNOULLI_TERMS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EMConfig {
    /// Terms `n < cutoff` are summed directly.
    pub cutoff: u64,
    pub bernoulli_terms: usize,
    pub target_eps: f64,
}

impl EMConfig {
    /// Cutoff `max(10, ⌈1.3|t|/2π⌉ + 10)` with 25 correction terms.
    pub fn for_point(s: ComplexPoint, eps: f64) -> Self {
        let cutoff = ((1.3 * s.t.abs() / (2.0 * PI)).ceil() as u64 + 10).max(10);
        EMConfig {
            cutoff,
            bernoulli_terms: 25,
            target_eps: eps,
        }
    }

    fn validate(&self, s: ComplexPoint) -> Result<()> {
        if self.bernoulli_terms == 0 || self.bernoulli_terms > MAX_BERNOULLI_TERMS {
            return Err(ZetaError::Config(format!(
                "bernoulli_terms = {} must be in 1..={MAX_BERNOULLI_TERMS}",
                self.bernoulli_terms
            )));
        }
        if (self.cutoff as f64) < s.t.abs() / (2.0 * PI) || self.cutoff < 2 {
            return Err(ZetaError::Config(format!(
                "cutoff {} is below |t|/2π at t = {}",
                self.cutoff, s.t
            )));
        }
        if !(self.target_eps > 0.0) {
            return Err(ZetaError::Config("target_eps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyConfig {
    /// Largest circle radius; clamped to half the distance to `s = 1`.
    pub radius: f64,
    /// Initial trapezoid nodes (a power of two, at least 64).
    pub nodes: usize,
    pub max_nodes: usize,
}

impl Default for CauchyConfig {
    fn default() -> Self {
        CauchyConfig {
            radius: 0.25,
            nodes: 64,
            max_nodes: 4096,
        }
    }
}

/// `ζ(s)` for `σ > 0`, `s ≠ 1`.
pub fn eval_zeta_em(s: ComplexPoint, eps: f64) -> Result<EvalResult> {
    eval_zeta_em_with(s, &EMConfig::for_point(s, eps))
}

pub fn eval_zeta_em_with(s: ComplexPoint, config: &EMConfig) -> Result<EvalResult> {
    if !(s.sigma > 0.0) {
        return Err(ZetaError::domain(
            "eval_zeta_em",
            format!("σ = {} is outside the supported half-plane σ > 0", s.sigma),
        ));
    }
    zeta_em_any(s, config)
}

/// Euler–Maclaurin without the `σ > 0` guard; accurate wherever the cutoff exceeds `|s|`.
fn zeta_em_any(s: ComplexPoint, config: &EMConfig) -> Result<EvalResult> {
    if !s.is_finite() {
        return Err(ZetaError::domain("eval_zeta_em", "non-finite argument"));
    }
    if s.sigma == 1.0 && s.t == 0.0 {
        return Err(ZetaError::Pole);
    }
    config.validate(s)?;
    let z = s.to_complex();
    let n = config.cutoff.max((2.0 * z.norm()).ceil() as u64);
    let mut acc = Compensated::default();
    let mut abs_sum = 0.0;
    for i in 1..n {
        let ln_i = (i as f64).ln();
        let v = (-z * ln_i).exp();
        acc.add(v);
        abs_sum += v.norm();
    }
    let ln_n = (n as f64).ln();
    let n_pow = (-z * ln_n).exp();
    let one = Complex64::new(1.0, 0.0);
    let integral = n_pow * n as f64 / (z - one);
    acc.add(integral);
    acc.add(n_pow * 0.5);
    abs_sum += integral.norm() + 0.5 * n_pow.norm();

    // B_{2j}/(2j)! · s(s+1)…(s+2j-2) · N^{-s-2j+1}
    let inv_n2 = 1.0 / (n as f64 * n as f64);
    let mut factor = z * n_pow / n as f64;
    let mut last = f64::INFINITY;
    let mut error = 0.0;
    for j in 1..=config.bernoulli_terms {
        if j > 1 {
            let a = 2.0 * j as f64 - 3.0;
            factor *= (z + a) * (z + a + 1.0) * inv_n2;
        }
        let term = factor * bernoulli::b2j_over_factorial(j);
        let size = term.norm();
        if size > last {
            // asymptotic divergence has set in
            break;
        }
        acc.add(term);
        abs_sum += size;
        error = size;
        last = size;
        if size < config.target_eps * acc.value().norm() {
            break;
        }
    }
    let value = acc.value();
    let rounding = 4.0 * f64::EPSILON * abs_sum * (1.0 + z.norm() * ln_n);
    Ok(EvalResult {
        value: ScaledComplex::from_complex(value),
        abs_error_bound: ScaledReal::from_f64(error),
        rounding_bound: ScaledReal::from_f64(rounding),
        terms_used: n,
    })
}

/// `ζ^(k)(s)` by the trapezoid rule on a circle around `s`, for `σ > 0`.
pub fn eval_deriv_cauchy(s: ComplexPoint, k: u32, eps: f64) -> Result<EvalResult> {
    if !(s.sigma > 0.0) {
        return Err(ZetaError::domain(
            "eval_deriv_cauchy",
            format!("σ = {} is outside the supported half-plane σ > 0", s.sigma),
        ));
    }
    eval_deriv_cauchy_with(s, k, eps, &CauchyConfig::default())
}

/// Same as [`eval_deriv_cauchy`] without the half-plane guard. Results for `σ ≤ 0` are
/// plausible but carry no guarantee.
pub fn eval_deriv_cauchy_with(
    s: ComplexPoint,
    k: u32,
    eps: f64,
    config: &CauchyConfig,
) -> Result<EvalResult> {
    if !(eps > 0.0) {
        return Err(ZetaError::Config(format!("eps = {eps} must be positive")));
    }
    if config.nodes < 64 || !config.nodes.is_power_of_two() || config.max_nodes < config.nodes {
        return Err(ZetaError::Config(format!(
            "nodes = {} must be a power of two ≥ 64 and ≤ max_nodes",
            config.nodes
        )));
    }
    let z = s.to_complex();
    let one = Complex64::new(1.0, 0.0);
    let radius = config.radius.min(0.5 * (z - one).norm());
    if !(radius > 1e-6) {
        return Err(ZetaError::Config(format!(
            "no admissible circle around {s}: too close to the pole"
        )));
    }

    let sample = |theta: f64| -> Result<(Complex64, f64, f64)> {
        let p = ComplexPoint::from(z + Complex64::from_polar(radius, theta));
        let r = zeta_em_any(p, &EMConfig::for_point(p, 1e-15))?;
        Ok((
            r.value.to_complex(),
            r.abs_error_bound.to_f64(),
            r.rounding_bound.to_f64(),
        ))
    };

    let kf = k as i32;
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let front = factorial / radius.powi(kf);

    let mut nodes = config.nodes;
    let mut weighted = Compensated::default();
    // (max |f|, max truncation error, max rounding error) over the samples
    let mut stats = (0.0f64, 0.0f64, 0.0f64);
    let add = |theta: f64, acc: &mut Compensated, stats: &mut (f64, f64, f64)| -> Result<()> {
        let (v, e, r) = sample(theta)?;
        acc.add(v * Complex64::from_polar(1.0, -(kf as f64) * theta));
        stats.0 = stats.0.max(v.norm());
        stats.1 = stats.1.max(e);
        stats.2 = stats.2.max(r);
        Ok(())
    };
    for i in 0..nodes {
        add(2.0 * PI * i as f64 / nodes as f64, &mut weighted, &mut stats)?;
    }
    let mut estimate = weighted.value() * (front / nodes as f64);
    loop {
        let finer = 2 * nodes;
        for i in (1..finer).step_by(2) {
            add(2.0 * PI * i as f64 / finer as f64, &mut weighted, &mut stats)?;
        }
        let next = weighted.value() * (front / finer as f64);
        let diff = (next - estimate).norm();
        estimate = next;
        nodes = finer;
        let (max_abs, max_err, max_round) = stats;
        let scale = front * max_abs;
        if diff <= eps * scale.max(estimate.norm()) || nodes >= config.max_nodes {
            let bound = diff + front * max_err;
            let rounding = front * (max_round + 4.0 * f64::EPSILON * max_abs * (1.0 + k as f64));
            return Ok(EvalResult {
                value: ScaledComplex::from_complex(estimate),
                abs_error_bound: ScaledReal::from_f64(bound),
                rounding_bound: ScaledReal::from_f64(rounding),
                terms_used: nodes as u64,
            });
        }
    }
}

/// Right edge of the counting rectangle: a known zero-free abscissa for `ζ^(k)`.
pub fn sigma_max(k: u32) -> Result<f64> {
    match k {
        0 => Ok(1.0),
        1 => Ok(2.939_38),
        2 => Ok(4.028_53),
        3 => Ok(q_value(2) * 3.0 + 2.0),
        _ => Err(ZetaError::domain("sigma_max", format!("no tabulated bound for k = {k}"))),
    }
}

/// Lower edge of the counting rectangle, keeping the pole at `s = 1` outside.
pub const COUNT_T_LO: f64 = 1.0;

/// Number of zeros of `ζ^(k)` in `[σ_min, σ_max(k)] × [1, T]` by the argument principle.
///
/// A zero on the contour moves the top edge up by 0.05, at most five times.
pub fn count_zeros_halfplane(k: u32, t_max: f64, sigma_min: f64) -> Result<i64> {
    if k > 3 {
        return Err(ZetaError::domain("count_zeros_halfplane", format!("k = {k} > 3")));
    }
    if !(t_max > COUNT_T_LO && t_max <= 200.0) {
        return Err(ZetaError::domain("count_zeros_halfplane", format!("T = {t_max} not in (1, 200]")));
    }
    if !(0.1..=0.5).contains(&sigma_min) {
        return Err(ZetaError::domain(
            "count_zeros_halfplane",
            format!("σ_min = {sigma_min} not in [0.1, 0.5]"),
        ));
    }
    let sigma_hi = sigma_max(k)?;
    let f = move |p: ComplexPoint| -> Result<ScaledComplex> {
        if k == 0 {
            Ok(zeta_em_any(p, &EMConfig::for_point(p, 1e-14))?.value)
        } else {
            Ok(eval_deriv_cauchy_with(p, k, 1e-12, &CauchyConfig::default())?.value)
        }
    };
    let mut top = t_max;
    let mut last_err = None;
    for _ in 0..=5 {
        let rect = Rect::new(sigma_min, sigma_hi, COUNT_T_LO, top);
        let config = WindingConfig {
            samples_per_edge: ((8.0 * (top - COUNT_T_LO)).ceil() as usize).max(64),
            ..WindingConfig::default()
        };
        match winding_number_with(&rect, f, &config) {
            Ok(w) => return Ok(w.count),
            Err(e @ ZetaError::ZeroOnContour { .. }) => {
                last_err = Some(e);
                top += 0.05;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(ZetaError::Config("contour retries exhausted".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::eval_deriv;

    #[test]
    fn zeta_two() {
        let r = eval_zeta_em(ComplexPoint::new(2.0, 0.0), 1e-14).unwrap();
        assert!((r.value.to_complex().re - PI * PI / 6.0).abs() < 1e-13);
        let series = eval_deriv(ComplexPoint::new(2.0, 0.0), 0, 1e-13).unwrap();
        assert!((r.value - series.value).abs().to_f64() < 1e-12);
    }

    #[test]
    fn near_the_first_critical_zero() {
        let r = eval_zeta_em(ComplexPoint::new(0.5, 14.134_725), 1e-14).unwrap();
        assert!(r.value.abs().to_f64() < 1e-3);
        // the sign of the real-valued Hardy function changes across the zero; here just the modulus dip
        let off = eval_zeta_em(ComplexPoint::new(0.5, 13.5), 1e-14).unwrap();
        assert!(off.value.abs().to_f64() > 0.1);
    }

    #[test]
    fn two_cutoffs_agree_left_of_one() {
        let s = ComplexPoint::new(0.9, 0.0);
        let a = eval_zeta_em_with(s, &EMConfig { cutoff: 12, bernoulli_terms: 20, target_eps: 1e-15 }).unwrap();
        let b = eval_zeta_em_with(s, &EMConfig { cutoff: 40, bernoulli_terms: 12, target_eps: 1e-15 }).unwrap();
        assert!((a.value - b.value).abs().to_f64() < 1e-10);
        // ζ(0.9) ≈ -9.430114019
        assert!((a.value.to_complex().re + 9.430_114_019).abs() < 1e-8);
    }

    #[test]
    fn guards() {
        assert_eq!(eval_zeta_em(ComplexPoint::new(1.0, 0.0), 1e-12), Err(ZetaError::Pole));
        assert!(eval_zeta_em(ComplexPoint::new(-0.5, 2.0), 1e-12).is_err());
        let bad = EMConfig { cutoff: 10, bernoulli_terms: 31, target_eps: 1e-12 };
        assert!(eval_zeta_em_with(ComplexPoint::new(2.0, 0.0), &bad).is_err());
        assert!(matches!(
            eval_deriv_cauchy(ComplexPoint::new(1.0 + 1e-9, 0.0), 1, 1e-10),
            Err(ZetaError::Config(_))
        ));
    }

    #[test]
    fn zeroth_derivative_by_circle() {
        for i in 0..20 {
            let s = ComplexPoint::new(0.2 + 0.13 * i as f64, -20.0 + 2.1 * i as f64);
            let a = eval_deriv_cauchy(s, 0, 1e-13).unwrap();
            let b = eval_zeta_em(s, 1e-14).unwrap();
            assert!((a.value - b.value).abs().to_f64() < 1e-10, "at {s}");
        }
    }

    #[test]
    fn first_derivative_at_two() {
        let s = ComplexPoint::new(2.0, 0.0);
        let a = eval_deriv_cauchy(s, 1, 1e-13).unwrap();
        let b = eval_deriv(s, 1, 1e-13).unwrap();
        let diff = (a.value - b.value).abs();
        assert!(diff <= a.total_bound() + b.total_bound());
        assert!(diff.to_f64() < 1e-11);
    }

    #[test]
    fn second_derivative_dips_near_the_reported_zero() {
        let cfg = CauchyConfig::default();
        let at = |s: ComplexPoint| eval_deriv_cauchy_with(s, 2, 1e-12, &cfg).unwrap().value.abs().to_f64();
        let near = at(ComplexPoint::new(-0.355_084_330_21, 3.590_839_324_398));
        let ring: f64 = (0..8)
            .map(|i| {
                let a = i as f64 * PI / 4.0;
                at(ComplexPoint::new(-0.355 + 0.3 * a.cos(), 3.5908 + 0.3 * a.sin()))
            })
            .fold(f64::INFINITY, f64::min);
        assert!(near < 1e-6 * ring, "{near} vs {ring}");
    }

    #[test]
    fn node_doubling_converges_fast() {
        let s = ComplexPoint::new(1.6, 5.0);
        let r = eval_deriv_cauchy(s, 2, 1e-13).unwrap();
        assert!(r.terms_used <= 256, "{} nodes", r.terms_used);
    }

    #[test]
    fn classical_zero_count() {
        assert_eq!(count_zeros_halfplane(0, 50.0, 0.1).unwrap(), 10);
        assert!(count_zeros_halfplane(4, 50.0, 0.1).is_err());
        assert!(count_zeros_halfplane(1, 500.0, 0.1).is_err());
    }
}
