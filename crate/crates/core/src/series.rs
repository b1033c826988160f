//! The Dirichlet series `ζ^(k)(s) = (-1)^k Σ (log n)^k n^{-s}` for `σ > 1`,
//! its head and tail pieces, and certified truncation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bernoulli;
use crate::error::{Result, ZetaError};
use crate::geometry::ln_q_modulus;
use crate::point::ComplexPoint;
use crate::scaled::{ScaledComplex, ScaledReal};

pub const DELTA_MIN: f64 = 0.05;
pub const DEFAULT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Required distance of `σ` from 1.
    pub delta_min: f64,
    /// Most terms summed one by one; beyond this the tail is summed in closed form.
    pub direct_cap: u64,
    /// Number of Bernoulli corrections used for the closed-form tail.
    pub tail_order: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            delta_min: DELTA_MIN,
            direct_cap: 1 << 18,
            tail_order: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: ScaledComplex,
    /// Certified bound on the truncation error, assuming exact term arithmetic.
    pub abs_error_bound: ScaledReal,
    /// A-priori estimate of the floating-point error of the summation.
    pub rounding_bound: ScaledReal,
    pub terms_used: u64,
}

impl EvalResult {
    pub fn total_bound(&self) -> ScaledReal {
        self.abs_error_bound + self.rounding_bound
    }
}

/// `Q_n^k(s) = (log n)^k n^{-s}`.
pub fn term(n: u64, k: u32, s: ComplexPoint) -> Result<ScaledComplex> {
    match n {
        0 => Err(ZetaError::domain("term", "n must be at least 1")),
        1 if k == 0 => Ok(ScaledComplex::ONE),
        1 => Ok(ScaledComplex::ZERO),
        _ => Ok(term_unchecked(n, k, s)),
    }
}

pub(crate) fn term_unchecked(n: u64, k: u32, s: ComplexPoint) -> ScaledComplex {
    let ln_n = (n as f64).ln();
    ScaledComplex::from_polar_ln(ln_q_modulus(n, k, s.sigma), -s.t * ln_n)
}

/// `H_M^k(s) = Σ_{n=2}^{M-1} Q_n^k(s)`.
pub fn head(m: u64, k: u32, s: ComplexPoint) -> Result<ScaledComplex> {
    if m < 2 {
        return Err(ZetaError::domain("head", format!("M = {m} < 2")));
    }
    Ok((2..m).fold(ScaledComplex::ZERO, |acc, n| acc + term_unchecked(n, k, s)))
}

/// The factor `R_M^k(σ)` with `Σ_{n>M} Q_n^k(σ) ≤ Q_M^k(σ) R_M^k(σ)` whenever `valid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub m: u64,
    pub k: u32,
    pub sigma: f64,
    pub r: f64,
    pub valid: bool,
}

impl TailBound {
    /// `log(Q_M^k(σ) R_M^k(σ))`; infinite when the bound is not valid.
    pub fn ln_bound(&self) -> f64 {
        if self.valid {
            ln_q_modulus(self.m, self.k, self.sigma) + self.r.ln()
        } else {
            f64::INFINITY
        }
    }

    pub fn bound(&self) -> ScaledReal {
        ScaledReal::from_ln(self.ln_bound())
    }
}

pub fn tail_bound(m: u64, k: u32, sigma: f64) -> Result<TailBound> {
    if !(sigma > 1.0) {
        return Err(ZetaError::domain("tail_bound", format!("σ = {sigma} must exceed 1")));
    }
    if m < 2 {
        return Err(ZetaError::domain("tail_bound", format!("M = {m} < 2")));
    }
    Ok(tail_bound_unchecked(m, k, sigma))
}

pub(crate) fn tail_bound_unchecked(m: u64, k: u32, sigma: f64) -> TailBound {
    let a = sigma - 1.0;
    let kf = k as f64;
    let denom = a * (m as f64).ln() - kf + 1.0;
    let valid = denom > 0.0;
    let r = if valid {
        m as f64 / a * (1.0 + kf / denom)
    } else {
        f64::INFINITY
    };
    TailBound {
        m,
        k,
        sigma,
        r,
        valid,
    }
}

/// Whether `R_M^k(a1 k + b1)` is guaranteed nonincreasing in `k` for `k ≥ k_floor`.
pub fn tail_monotonicity_conditions(m: u64, a1: f64, b1: f64, k_floor: f64) -> Result<bool> {
    if m < 2 {
        return Err(ZetaError::domain("tail_monotonicity_conditions", format!("M = {m} < 2")));
    }
    let ln_m = (m as f64).ln();
    if !(a1 > 1.0 / ln_m) {
        return Err(ZetaError::domain(
            "tail_monotonicity_conditions",
            format!("slope {a1} must exceed 1/log M = {}", 1.0 / ln_m),
        ));
    }
    let c = a1 * ln_m - 1.0;
    let d = 1.0 + (b1 - 1.0) * ln_m;
    if c * k_floor + d <= 0.0 {
        return Ok(false);
    }
    if d < 0.0 {
        let z0 = (-d + (d.abs() / c).sqrt()) / (1.0 + c);
        return Ok(k_floor >= z0);
    }
    Ok(true)
}

/// Upper bound for `Σ_{n ≥ start} Q_n^k(σ)`: a direct sum up to `n_end` plus the certified tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMajorant {
    pub direct: ScaledReal,
    pub n_end: u64,
    pub tail: TailBound,
}

impl TailMajorant {
    pub fn total(&self) -> ScaledReal {
        self.direct + self.tail.bound()
    }
}

/// Sums `Q_n^k(σ)` from `start` until the certified remainder is below `rel` of the running sum.
pub fn tail_majorant(start: u64, k: u32, sigma: f64, rel: f64) -> Result<TailMajorant> {
    if !(sigma > 1.0) {
        return Err(ZetaError::domain("tail_majorant", format!("σ = {sigma} must exceed 1")));
    }
    let start = start.max(2);
    let mut direct = ScaledReal::from_ln(ln_q_modulus(start, k, sigma));
    let mut n = start;
    let mut next_check = start.max(4);
    loop {
        if n >= next_check {
            let tail = tail_bound_unchecked(n, k, sigma);
            if tail.valid && tail.ln_bound() <= rel.ln() + direct.ln() {
                return Ok(TailMajorant {
                    direct,
                    n_end: n,
                    tail,
                });
            }
            next_check = n + n / 4 + 1;
        }
        if n > 1 << 24 {
            return Err(ZetaError::domain(
                "tail_majorant",
                format!("no certified tail for k = {k}, σ = {sigma}"),
            ));
        }
        n += 1;
        direct = direct + ScaledReal::from_ln(ln_q_modulus(n, k, sigma));
    }
}

/// Smallest `N` of the doubling sequence `2, 4, 8, …` with a valid tail bound
/// `Q_N R_N ≤ eps_rel · Σ_{n ≤ N} Q_n^k(σ)`.
///
/// The running sum is accumulated directly only up to `2^18` terms; since all terms are
/// positive this is a lower bound, so the criterion stays certified for larger `N`.
pub fn choose_truncation(k: u32, sigma: f64, eps_rel: f64) -> Result<u64> {
    if !(eps_rel > 0.0) {
        return Err(ZetaError::domain("choose_truncation", format!("eps = {eps_rel} must be positive")));
    }
    if !(sigma > 1.0) {
        return Err(ZetaError::domain("choose_truncation", format!("σ = {sigma} must exceed 1")));
    }
    truncation_search(k, sigma, eps_rel, SeriesConfig::default().direct_cap).ok_or_else(|| {
        ZetaError::domain(
            "choose_truncation",
            format!("certified truncation exceeds 2^62 terms at σ = {sigma}"),
        )
    })
}

fn truncation_search(k: u32, sigma: f64, eps_rel: f64, cap: u64) -> Option<u64> {
    let mut partial = if k == 0 {
        ScaledReal::from_f64(1.0)
    } else {
        ScaledReal::ZERO
    };
    let mut summed_to = 1u64;
    let mut n = 2u64;
    let ln_eps = eps_rel.ln();
    loop {
        let upto = n.min(cap);
        for i in summed_to + 1..=upto {
            partial = partial + ScaledReal::from_ln(ln_q_modulus(i, k, sigma));
        }
        summed_to = summed_to.max(upto);
        let tb = tail_bound_unchecked(n, k, sigma);
        if tb.valid && tb.ln_bound() <= ln_eps + partial.ln() {
            return Some(n);
        }
        n = n.checked_mul(2).filter(|&v| v <= 1 << 62)?;
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
pub(crate) struct Compensated {
    sum: Complex64,
    carry: Complex64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: Complex64) {
        let (re, cre) = two_sum(self.sum.re, x.re);
        let (im, cim) = two_sum(self.sum.im, x.im);
        self.sum = Complex64::new(re, im);
        self.carry += Complex64::new(cre, cim);
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    };
    (s, c)
}

struct DirectSum {
    value: ScaledComplex,
    abs_sum: ScaledReal,
    rounding: ScaledReal,
}

/// `Σ_{n=from}^{to} Q_n^k(s)` (with `Q_1^0 = 1`), carried relative to the largest term.
fn direct_sum(s: ComplexPoint, k: u32, from: u64, to: u64) -> DirectSum {
    if to < from {
        return DirectSum {
            value: ScaledComplex::ZERO,
            abs_sum: ScaledReal::ZERO,
            rounding: ScaledReal::ZERO,
        };
    }
    let reference = largest_ln_term(k, s.sigma, from, to);
    let kf = k as f64;
    let mut acc = Compensated::default();
    let mut abs_sum = 0.0;
    let mut rounding = 0.0;
    for n in from..=to {
        if n == 1 {
            if k == 0 {
                let mag = (-reference).exp();
                acc.add(Complex64::new(mag, 0.0));
                abs_sum += mag;
                rounding += mag * f64::EPSILON;
            }
            continue;
        }
        let ln_n = (n as f64).ln();
        let lnln = ln_n.ln();
        let x = kf * lnln - s.sigma * ln_n - reference;
        let mag = x.exp();
        let phase = -s.t * ln_n;
        acc.add(Complex64::from_polar(mag, phase));
        abs_sum += mag;
        rounding += mag * (1.0 + kf * lnln.abs() + (s.sigma.abs() + s.t.abs()) * ln_n);
    }
    let rounding = 4.0 * f64::EPSILON * rounding + 2.0 * f64::EPSILON * abs_sum;
    DirectSum {
        value: ScaledComplex::new(acc.value(), reference),
        abs_sum: ScaledReal::new(abs_sum, reference),
        rounding: ScaledReal::new(rounding, reference),
    }
}

fn largest_ln_term(k: u32, sigma: f64, from: u64, to: u64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    if from <= 1 {
        best = if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let lo = from.max(2);
    if lo > to {
        return if best.is_finite() { best } else { 0.0 };
    }
    let mut candidates = vec![lo, to];
    if k > 0 && sigma > 0.0 {
        let peak = (k as f64 / sigma).exp();
        if peak.is_finite() && peak < to as f64 {
            let f = peak.floor() as u64;
            candidates.extend([f, f + 1]);
        }
    }
    for n in candidates {
        if n >= lo && n <= to {
            best = best.max(ln_q_modulus(n, k, sigma));
        }
    }
    best
}

/// `ζ^(k)(s)` from the Dirichlet series, for `σ > 1 + δ_min`.
pub fn eval_deriv(s: ComplexPoint, k: u32, eps_rel: f64) -> Result<EvalResult> {
    eval_deriv_with(s, k, eps_rel, &SeriesConfig::default())
}

pub fn eval_deriv_with(
    s: ComplexPoint,
    k: u32,
    eps_rel: f64,
    config: &SeriesConfig,
) -> Result<EvalResult> {
    if !s.is_finite() {
        return Err(ZetaError::domain("eval_deriv", "non-finite argument"));
    }
    if !(eps_rel > 0.0) {
        return Err(ZetaError::domain("eval_deriv", format!("eps = {eps_rel} must be positive")));
    }
    if s.sigma == 1.0 && s.t == 0.0 {
        return Err(ZetaError::Pole);
    }
    let limit = 1.0 + config.delta_min;
    if !(s.sigma > limit) {
        return Err(ZetaError::SeriesMargin {
            sigma: s.sigma,
            limit,
        });
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut result = match truncation_search(k, s.sigma, eps_rel, config.direct_cap) {
        Some(n) if n <= config.direct_cap => {
            let sum = direct_sum(s, k, 1, n);
            EvalResult {
                value: sum.value,
                abs_error_bound: tail_bound_unchecked(n, k, s.sigma).bound(),
                rounding_bound: sum.rounding,
                terms_used: n,
            }
        }
        _ => corrected_sum(s, k, eps_rel, config)?,
    };
    result.value = result.value.scale(sign);
    Ok(result)
}

/// Head summed directly, tail `Σ_{n ≥ N}` by Euler–Maclaurin with a closed-form integral
/// and a certified remainder.
fn corrected_sum(
    s: ComplexPoint,
    k: u32,
    eps_rel: f64,
    config: &SeriesConfig,
) -> Result<EvalResult> {
    let p = config.tail_order.clamp(1, bernoulli::MAX_INDEX);
    let z = s.to_complex();
    let start = (2.0 * (z.norm() + 2.0 * p as f64 + k as f64)).ceil().max(32.0) as u64;
    let mut n = start;
    let mut head = direct_sum(s, k, 1, n - 1);
    loop {
        let tail = euler_maclaurin_tail(s, k, n, p);
        let scale = head.abs_sum + tail.integral_abs;
        let value = head.value + tail.value;
        let done = tail.remainder <= scale.scale(eps_rel) || 2 * n - 1 > config.direct_cap;
        if done {
            if !value.is_finite() || tail.remainder.ln() == f64::INFINITY {
                return Err(ZetaError::domain(
                    "eval_deriv",
                    format!("tail correction overflowed at k = {k}, s = {s}"),
                ));
            }
            return Ok(EvalResult {
                value,
                abs_error_bound: tail.remainder,
                rounding_bound: head.rounding + tail.rounding,
                terms_used: n - 1 + p as u64,
            });
        }
        let more = direct_sum(s, k, n, 2 * n - 1);
        head = DirectSum {
            value: head.value + more.value,
            abs_sum: head.abs_sum + more.abs_sum,
            rounding: head.rounding + more.rounding,
        };
        n *= 2;
    }
}

struct TailPieces {
    value: ScaledComplex,
    integral_abs: ScaledReal,
    remainder: ScaledReal,
    rounding: ScaledReal,
}

/// Euler–Maclaurin for `Σ_{n ≥ N} (log n)^k n^{-s}` with `p` Bernoulli corrections.
fn euler_maclaurin_tail(s: ComplexPoint, k: u32, n: u64, p: usize) -> TailPieces {
    let z = s.to_complex();
    let big_l = (n as f64).ln();
    let ln_l = big_l.ln();
    let kf = k as f64;
    let one = Complex64::new(1.0, 0.0);

    // ∫_N^∞ L^k x^{-s} dx = N^{1-s} L^k Σ_r k!/(k-r)! L^{-r} (s-1)^{-r-1}
    let w = z - one;
    let mut coeff = ScaledComplex::from_complex(w.inv());
    let mut series = coeff;
    let mut series_abs = coeff.abs();
    let step = (w * big_l).inv();
    for r in 1..=k {
        coeff = coeff.mul_complex(step * (kf - r as f64 + 1.0));
        series = series + coeff;
        series_abs = series_abs + coeff.abs();
    }
    let front = ScaledComplex::from_polar_ln(kf * ln_l - (s.sigma - 1.0) * big_l, -s.t * big_l);
    let integral = front * series;
    let integral_abs = front.abs() * series_abs;

    // f^(m)(x) = x^{-s-m} P_m(log x), P_{m+1} = P_m' - (s+m) P_m; coefficients kept
    // relative to L^k, i.e. entry i holds the coefficient of L^i times L^{i-k}.
    let degree = k as usize;
    let mut poly = vec![Complex64::new(0.0, 0.0); degree + 1];
    poly[degree] = one;
    let base = ScaledComplex::from_polar_ln(kf * ln_l - s.sigma * big_l, -s.t * big_l);
    let mut value = integral + base.scale(0.5);
    let mut correction_abs = base.abs().scale(0.5);
    let inv_l = 1.0 / big_l;
    for m in 0..2 * p {
        let shift = z + m as f64;
        let mut next = vec![Complex64::new(0.0, 0.0); degree + 1];
        for i in 0..=degree {
            let mut c = -shift * poly[i];
            if i < degree {
                // (i+1) c_{i+1} L^i, rescaled: relative entry picks up one factor of 1/L
                c += poly[i + 1] * ((i + 1) as f64 * inv_l);
            }
            next[i] = c;
        }
        poly = next;
        let order = m + 1;
        if order % 2 == 1 && order < 2 * p {
            let j = (order + 1) / 2;
            let pm: Complex64 = poly.iter().sum();
            let deriv = base.mul_complex(pm).mul_exp(-(order as f64) * big_l);
            let b = bernoulli::b2j_over_factorial(j);
            value = value - deriv.scale(b);
            correction_abs = correction_abs + deriv.abs().scale(b.abs());
        }
    }
    // |R| ≤ |B_{2p}|/(2p)! Σ_i |c_i| ∫_N^∞ L^i x^{-σ-2p} dx
    let b = s.sigma + 2.0 * p as f64 - 1.0;
    let mut remainder = ScaledReal::ZERO;
    for (i, c) in poly.iter().enumerate() {
        let mag = c.norm();
        if mag == 0.0 {
            continue;
        }
        // ∫_{ln N}^∞ u^i e^{-b u} du = N^{-b} Σ_r i!/(i-r)! L^{i-r} b^{-r-1}
        let mut inner = 0.0;
        let mut t = 1.0 / b;
        for r in 0..=i {
            if r > 0 {
                t *= (i - r + 1) as f64 / (b * big_l);
            }
            inner += t;
        }
        // entry i is c_i L^{i-k}; restore L^i and fold in the L^k front factor
        let ln_piece = mag.ln() + inner.ln() + kf * ln_l - b * big_l;
        remainder = remainder + ScaledReal::from_ln(ln_piece);
    }
    let remainder = remainder.scale(bernoulli::b2j_over_factorial(p).abs());
    let rounding = (integral_abs + correction_abs)
        .scale(8.0 * f64::EPSILON * (1.0 + (z.norm() + kf) * big_l));
    TailPieces {
        value,
        integral_abs,
        remainder,
        rounding,
    }
}

/// `ζ^(k)(s) / Q_{M_ref}^k(σ)`: same argument as `ζ^(k)(s)`, magnitude near 1 in the strip of `M_ref`.
pub fn normalized_eval(s: ComplexPoint, k: u32, m_ref: u64) -> Result<ScaledComplex> {
    if m_ref < 2 {
        return Err(ZetaError::domain("normalized_eval", format!("M_ref = {m_ref} < 2")));
    }
    let r = eval_deriv(s, k, DEFAULT_EPS)?;
    Ok(r.value.mul_exp(-ln_q_modulus(m_ref, k, s.sigma)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::q_value;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn real(sigma: f64) -> ComplexPoint {
        ComplexPoint::new(sigma, 0.0)
    }

    #[test]
    fn term_examples() {
        assert!(term(1, 5, ComplexPoint::new(3.0, 2.0)).unwrap().is_zero());
        assert_eq!(term(1, 0, real(3.0)).unwrap().to_complex().re, 1.0);
        assert!(term(0, 1, real(3.0)).is_err());
        let s = real(q_value(2) * 38.0);
        let a = term(2, 38, s).unwrap().ln_abs();
        let b = term(3, 38, s).unwrap().ln_abs();
        assert!((a - b).abs() < 1e-12 * a.abs());
        let deep = term(2, 800, real(q_value(2) * 800.0)).unwrap();
        let expected = 800.0 * 2f64.ln().ln() - q_value(2) * 800.0 * 2f64.ln();
        assert!((deep.ln_abs() - expected).abs() < 1e-9);
        assert!(deep.ln_abs() < -923.0 && deep.ln_abs() > -924.0);
        assert!(!deep.is_zero());
    }

    #[test]
    fn head_examples() {
        let s = ComplexPoint::new(4.0, 1.5);
        assert!(head(2, 7, s).unwrap().is_zero());
        assert_eq!(head(3, 7, s).unwrap(), term(2, 7, s).unwrap());
        let brute: Complex64 = (2..5)
            .map(|n| {
                let ln = (n as f64).ln();
                Complex64::new(ln.powi(10), 0.0) * Complex64::new(n as f64, 0.0).powc(Complex64::new(-4.0, 0.0))
            })
            .sum();
        let got = head(5, 10, real(4.0)).unwrap().to_complex();
        assert!((got - brute).norm() < 1e-13 * brute.norm());
    }

    #[test]
    fn tail_bound_values() {
        let sigma = q_value(2) * 3.0 + 2.0;
        let tb = tail_bound(4, 3, sigma).unwrap();
        assert!(tb.valid);
        // independent closed form: (M/a)(aL + 1)/(aL - k + 1)
        let a = sigma - 1.0;
        let l = 4f64.ln();
        let oracle = 4.0 / a * (a * l + 1.0) / (a * l - 2.0);
        assert_relative_eq!(tb.r, oracle, max_relative = 1e-14);
        assert_relative_eq!(tb.r, 1.569_884, epsilon = 1e-6);

        let k = 20;
        let sigma = q_value(3) * k as f64 + 4.0 * crate::geometry::LN_3;
        assert!(tail_bound(4, k, sigma).unwrap().r < 0.72);

        assert!(tail_bound(7, 30, 1e9).unwrap().r < 1e-8);
        assert!(!tail_bound(4, 30, 2.0).unwrap().valid);
        assert!(tail_bound(4, 3, 1.0).is_err());
    }

    #[test]
    fn monotonicity_condition_examples() {
        let ln3 = crate::geometry::LN_3;
        let k3 = crate::geometry::wedge(3).unwrap().tip_k;
        assert!(tail_monotonicity_conditions(4, q_value(3), 4.0 * ln3, k3).unwrap());
        // the tail past M+1 = 12 against slope q_11
        let k11 = crate::geometry::wedge(11).unwrap().tip_k;
        assert!(tail_monotonicity_conditions(12, q_value(11), 12.0 * ln3, k11).unwrap());
        // q_11 < 1/log 11, so the tail of index 11 itself is outside the majorant's domain
        assert!(tail_monotonicity_conditions(11, q_value(11), 12.0 * ln3, k11).is_err());
        assert!(!tail_monotonicity_conditions(3, 1.0 / 3f64.ln() + 1e-9, 0.0, 1.0).unwrap());
        assert!(tail_monotonicity_conditions(3, 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn monotonicity_condition_agrees_with_sampling() {
        // when the conditions hold, R_M^k(a1 k + b1) should not increase on a k grid
        for &(m, a1, b1) in &[(4u64, 0.85, 4.0), (5, 0.7, -1.0), (12, q_value(11), 13.0), (6, 0.6, -3.0)] {
            for &k_floor in &[2.0, 10.0, 50.0, 200.0] {
                if !tail_monotonicity_conditions(m, a1, b1, k_floor).unwrap() {
                    continue;
                }
                let mut last = f64::INFINITY;
                let mut k = k_floor.ceil() as u32;
                while (k as f64) < k_floor + 400.0 {
                    let tb = tail_bound(m, k, a1 * k as f64 + b1).unwrap();
                    assert!(tb.valid);
                    assert!(tb.r <= last * (1.0 + 1e-12), "M={m} a1={a1} b1={b1} k={k}");
                    last = tb.r;
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn truncation_for_zeta_two() {
        let n = choose_truncation(0, 2.0, 1e-12).unwrap();
        assert_eq!(n, 1 << 40);
        let zeta2 = PI * PI / 6.0;
        assert!(tail_bound(n, 0, 2.0).unwrap().bound().to_f64() < 1e-12 * zeta2);
        assert!(choose_truncation(0, 2.0, 0.0).is_err());
        assert!(choose_truncation(0, 1.0, 1e-3).is_err());
    }

    #[test]
    fn truncation_at_a_strip_is_short_and_certified() {
        let n = choose_truncation(38, 43.2, 1e-14).unwrap();
        assert!(n <= 64, "N = {n}");
        let bound = tail_bound(n, 38, 43.2).unwrap().bound();
        let brute = (n + 1..1_000_000).fold(ScaledReal::ZERO, |acc, i| {
            acc + ScaledReal::from_ln(ln_q_modulus(i, 38, 43.2))
        });
        assert!(brute < bound);
    }

    #[test]
    fn truncation_waits_for_validity() {
        // k - 1 ≥ (σ - 1) log N for small N
        let n = choose_truncation(20, 3.0, 1e-8).unwrap();
        assert!(tail_bound(n, 20, 3.0).unwrap().valid);
        assert!(19.0 < 2.0 * (n as f64).ln());
        assert!(!tail_bound(1 << 13, 20, 3.0).unwrap().valid);
    }

    /// ζ(2), ζ'(2) by summing to 10^6 and adding an independent three-term tail estimate.
    fn oracle(k: u32) -> f64 {
        let n = 1_000_000u64;
        let mut sum = 0.0;
        for i in (1..n).rev() {
            let x = i as f64;
            sum += x.ln().powi(k as i32) / (x * x);
        }
        let x = n as f64;
        let l = x.ln();
        match k {
            0 => sum + 1.0 / x + 0.5 / (x * x) + 1.0 / (6.0 * x * x * x),
            1 => {
                // ∫ L/x² = (L+1)/x, f(N)/2 = L/(2x²), -B2/2 f'(N) with f' = (1 - 2L)/x³
                -(sum + (l + 1.0) / x + l / (2.0 * x * x) - (1.0 - 2.0 * l) / (12.0 * x * x * x))
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn zeta_and_derivative_at_two() {
        let z = eval_deriv(real(2.0), 0, 1e-12).unwrap();
        assert!((z.value.to_complex().re - PI * PI / 6.0).abs() < 1e-12);
        assert!(z.abs_error_bound.to_f64() < 1e-11);
        assert!((oracle(0) - PI * PI / 6.0).abs() < 1e-13);

        let d = eval_deriv(real(2.0), 1, 1e-12).unwrap();
        let want = oracle(1);
        assert!((want + 0.937_548_254_315_843_7).abs() < 1e-12);
        assert!((d.value.to_complex().re - want).abs() < 1e-11);
        assert!(d.value.to_complex().im.abs() < 1e-15);
    }

    #[test]
    fn rejects_points_near_the_pole() {
        assert!(matches!(
            eval_deriv(real(1.03), 0, 1e-12),
            Err(ZetaError::SeriesMargin { .. })
        ));
        assert_eq!(eval_deriv(real(1.0), 0, 1e-12), Err(ZetaError::Pole));
    }

    #[test]
    fn magnitude_on_the_equality_line() {
        let sigma = q_value(2) * 38.0;
        let s = real(sigma);
        let r = eval_deriv(s, 38, 1e-14).unwrap();
        let pair = term(2, 38, s).unwrap().abs() + term(3, 38, s).unwrap().abs();
        let ratio = (r.value.abs() / pair).to_f64();
        assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn normalized_eval_keeps_the_argument() {
        for i in 0..100 {
            let s = ComplexPoint::new(20.0 + 0.37 * i as f64, -30.0 + 0.71 * i as f64);
            let k = 10 + (i % 7) as u32;
            let a = eval_deriv(s, k, DEFAULT_EPS).unwrap().value.arg();
            let b = normalized_eval(s, k, 3).unwrap().arg();
            let d = (a - b).abs();
            assert!(d < 1e-14 || (d - 2.0 * PI).abs() < 1e-12);
        }
        assert!(normalized_eval(real(3.0), 2, 1).is_err());
    }

    #[test]
    fn normalized_value_is_small_near_a_predicted_zero() {
        let c = crate::geometry::cell(2, 38, 0).unwrap();
        let near = normalized_eval(c.predicted_zero, 38, 2).unwrap().abs().to_f64();
        let away = normalized_eval(ComplexPoint::new(c.predicted_zero.sigma, 0.0), 38, 2)
            .unwrap()
            .abs()
            .to_f64();
        assert!(near < 0.05, "{near}");
        assert!(away > 1.0);
    }

    #[test]
    fn corrected_tail_matches_direct_mode() {
        let forced = SeriesConfig {
            direct_cap: 1 << 14,
            ..SeriesConfig::default()
        };
        for &(sigma, t, k) in &[(1.5, 3.0, 0u32), (2.5, -7.0, 2), (1.2, 20.0, 1), (3.0, 0.5, 3)] {
            let s = ComplexPoint::new(sigma, t);
            let a = eval_deriv_with(s, k, 1e-12, &forced).unwrap();
            let b = eval_deriv(s, k, 1e-12).unwrap();
            let diff = (a.value - b.value).abs();
            let allowed = a.total_bound() + b.total_bound();
            assert!(diff < allowed, "s = {s}, k = {k}");
        }
    }

    #[test]
    fn corrected_tail_bound_is_honest() {
        // against a long direct sum with a tight tail at σ = 3
        let s = ComplexPoint::new(3.0, 4.0);
        let cfg = SeriesConfig {
            direct_cap: 64,
            tail_order: 3,
            ..SeriesConfig::default()
        };
        let approx = eval_deriv_with(s, 1, 1e-30, &cfg).unwrap();
        let exact = eval_deriv(s, 1, 1e-15).unwrap();
        let err = (approx.value - exact.value).abs();
        assert!(err <= approx.total_bound() + exact.total_bound());
        assert!(approx.abs_error_bound.to_f64() > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn tail_bound_majorizes_the_tail(m in 2u64..40, k in 0u32..60, extra in 0.5f64..30.0) {
            let ln_m = (m as f64).ln();
            // just inside the validity region, plus a margin
            let sigma = 1.0 + (k as f64 - 1.0).max(0.0) / ln_m + extra;
            let tb = tail_bound(m, k, sigma).unwrap();
            prop_assume!(tb.valid);
            let maj = tail_majorant(m + 1, k, sigma, 1e-3).unwrap();
            prop_assert!(maj.total() <= tb.bound().scale(1.0 + 1e-9));
        }

        #[test]
        fn head_term_tail_split(m in 2u64..12, k in 0u32..30, extra in 0.0f64..40.0, t in -50.0f64..50.0) {
            let s = ComplexPoint::new(3.0 + k as f64 / 2.0 + extra, t);
            // loose enough that every sample stays on the direct path
            let full = eval_deriv(s, k, 1e-8).unwrap();
            let n = full.terms_used;
            prop_assert!(n < SeriesConfig::default().direct_cap);
            let tail = (m + 1..=n.max(m)).fold(ScaledComplex::ZERO, |acc, i| acc + term_unchecked(i, k, s));
            let mut split = head(m, k, s).unwrap() + term(m, k, s).unwrap() + tail;
            if k == 0 {
                split = split + ScaledComplex::ONE;
            }
            if k % 2 == 1 {
                split = -split;
            }
            let diff = (split - full.value).abs();
            prop_assert!(diff <= full.total_bound().scale(4.0));
        }

        #[test]
        fn term_moduli_rise_then_fall_on_the_equality_line(m in 2u32..30, k in 3u32..600) {
            let sigma = q_value(m) * k as f64;
            let values: Vec<f64> = (2..=4 * m as u64).map(|n| ln_q_modulus(n, k, sigma)).collect();
            let peak = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let argmax = values.iter().position(|&v| v == peak).unwrap();
            for w in values[..=argmax].windows(2) {
                prop_assert!(w[0] <= w[1] + 1e-9 * w[1].abs());
            }
            for w in values[argmax..].windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * w[0].abs());
            }
        }

        #[test]
        fn neighbour_quotient_grows_with_sigma(n in 3u64..200, k in 0u32..500, sigma in 1.1f64..500.0, d in 0.01f64..10.0) {
            // Q_{n-1}/Q_n has logarithm k log(log(n-1)/log n) + σ log(n/(n-1))
            let ratio = |s: f64| ln_q_modulus(n - 1, k, s) - ln_q_modulus(n, k, s);
            prop_assert!(ratio(sigma + d) > ratio(sigma));
        }
    }
}
