use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};
use crate::point::{ComplexPoint, Rect};
use crate::scaled::{ScaledComplex, ScaledReal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingConfig {
    /// Initial samples per edge.
    pub samples_per_edge: usize,
    /// Maximum number of bisections of one initial interval.
    pub max_depth: u32,
    /// A sample below this fraction of the neighbouring initial moduli counts as a zero on the contour.
    pub zero_tolerance: f64,
}

impl Default for WindingConfig {
    fn default() -> Self {
        WindingConfig {
            samples_per_edge: 64,
            max_depth: 24,
            zero_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub count: i64,
    pub min_modulus_on_contour: ScaledReal,
    pub samples: usize,
    pub refined: bool,
    /// Accumulated change of argument along the boundary.
    pub total_phase: f64,
}

/// Counts zeros of `f` inside `rect` by the argument principle (no poles assumed).
pub fn winding_number<F>(rect: &Rect, f: F) -> Result<WindingResult>
where
    F: Fn(ComplexPoint) -> Result<ScaledComplex> + Sync,
{
    winding_number_with(rect, f, &WindingConfig::default())
}

struct Sample {
    point: ComplexPoint,
    value: ScaledComplex,
}

pub fn winding_number_with<F>(rect: &Rect, f: F, config: &WindingConfig) -> Result<WindingResult>
where
    F: Fn(ComplexPoint) -> Result<ScaledComplex> + Sync,
{
    if !(rect.width() > 0.0 && rect.height() > 0.0) {
        return Err(ZetaError::domain("winding_number", "degenerate rectangle"));
    }
    let n = config.samples_per_edge.max(4);
    let corners = rect.corners();
    let initial: Vec<ComplexPoint> = (0..4)
        .flat_map(|e| {
            let a = corners[e];
            let b = corners[(e + 1) % 4];
            (0..n).map(move |i| lerp(a, b, i as f64 / n as f64))
        })
        .collect();
    let values: Vec<ScaledComplex> = initial
        .par_iter()
        .map(|&p| f(p))
        .collect::<Result<Vec<_>>>()?;

    let total = values.len();
    let ln_tol = config.zero_tolerance.ln();
    let samples: Vec<Sample> = initial
        .into_iter()
        .zip(values)
        .map(|(point, value)| Sample { point, value })
        .collect();
    for i in 0..total {
        let prev = samples[(i + total - 1) % total].value.ln_abs();
        let next = samples[(i + 1) % total].value.ln_abs();
        check(&samples[i], prev.max(next), ln_tol)?;
    }

    let total = samples.len();
    let pieces: Vec<(f64, usize, bool, f64)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let a = &samples[i];
            let b = &samples[(i + 1) % total];
            refine_segment(a, b, &f, ln_tol, config.max_depth)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut phase = 0.0;
    let mut extra = 0;
    let mut refined = false;
    let mut min_ln = f64::INFINITY;
    for (d, e, r, m) in pieces {
        phase += d;
        extra += e;
        refined |= r;
        min_ln = min_ln.min(m);
    }
    let count = (phase / (2.0 * PI)).round() as i64;
    Ok(WindingResult {
        count,
        min_modulus_on_contour: ScaledReal::from_ln(min_ln),
        samples: total + extra,
        refined,
        total_phase: phase,
    })
}

fn lerp(a: ComplexPoint, b: ComplexPoint, u: f64) -> ComplexPoint {
    ComplexPoint::new(a.sigma + (b.sigma - a.sigma) * u, a.t + (b.t - a.t) * u)
}

/// Flags `s` when its modulus is below `tol` times the local scale `e^ln_scale`.
fn check(s: &Sample, ln_scale: f64, ln_tol: f64) -> Result<()> {
    let ln = s.value.ln_abs();
    if ln >= ln_scale + ln_tol {
        return Ok(());
    }
    Err(ZetaError::ZeroOnContour {
        point: s.point,
        modulus: s.value.abs().to_f64(),
        scale: ScaledReal::from_ln(ln_scale).to_f64(),
    })
}

fn arg_step(a: &ScaledComplex, b: &ScaledComplex) -> f64 {
    (*b / *a).arg()
}

/// Phase change from `a` to `b`, bisecting while a single step turns by `π/2` or more.
/// Returns `(phase, extra samples, refined, smallest log-modulus seen)`.
fn refine_segment<F>(
    a: &Sample,
    b: &Sample,
    f: &F,
    ln_tol: f64,
    max_depth: u32,
) -> Result<(f64, usize, bool, f64)>
where
    F: Fn(ComplexPoint) -> Result<ScaledComplex>,
{
    let ln_scale = a.value.ln_abs().max(b.value.ln_abs());
    let mut phase = 0.0;
    let mut extra = 0;
    let mut min_ln = a.value.ln_abs().min(b.value.ln_abs());
    let mut stack: Vec<(ComplexPoint, ScaledComplex, ComplexPoint, ScaledComplex, u32)> =
        vec![(a.point, a.value, b.point, b.value, 0)];
    // the stack pops the left half first, so pieces are accumulated in order
    while let Some((pa, va, pb, vb, depth)) = stack.pop() {
        let d = arg_step(&va, &vb);
        if d.abs() < PI / 2.0 || depth >= max_depth {
            phase += d;
            continue;
        }
        let pm = lerp(pa, pb, 0.5);
        let vm = f(pm)?;
        let s = Sample {
            point: pm,
            value: vm,
        };
        check(&s, ln_scale, ln_tol)?;
        min_ln = min_ln.min(vm.ln_abs());
        extra += 1;
        stack.push((pm, vm, pb, vb, depth + 1));
        stack.push((pa, va, pm, vm, depth + 1));
    }
    Ok((phase, extra, extra > 0, min_ln))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn poly(roots: Vec<Complex64>) -> impl Fn(ComplexPoint) -> Result<ScaledComplex> + Sync {
        move |p| {
            let z = p.to_complex();
            Ok(ScaledComplex::from_complex(
                roots.iter().fold(Complex64::new(1.0, 0.0), |acc, r| acc * (z - r)),
            ))
        }
    }

    #[test]
    fn double_zero_counts_twice() {
        let s = Complex64::new(0.3, -0.2);
        let r = winding_number(&Rect::new(-1.0, 1.0, -1.0, 1.0), poly(vec![s, s])).unwrap();
        assert_eq!(r.count, 2);
        assert!((r.total_phase - 4.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn counts_only_enclosed_zeros() {
        let roots = vec![
            Complex64::new(0.5, 0.5),
            Complex64::new(3.0, 0.0),
            Complex64::new(-0.5, -0.25),
            Complex64::new(0.0, 5.0),
        ];
        let r = winding_number(&Rect::new(-1.0, 1.0, -1.0, 1.0), poly(roots)).unwrap();
        assert_eq!(r.count, 2);
    }

    #[test]
    fn rapid_rotation_triggers_refinement() {
        // z^40 turns 40 times around the unit square
        let f = |p: ComplexPoint| Ok(ScaledComplex::from_complex(p.to_complex().powu(40)));
        let cfg = WindingConfig {
            samples_per_edge: 32,
            ..WindingConfig::default()
        };
        let r = winding_number_with(&Rect::new(-1.0, 1.0, -1.0, 1.0), f, &cfg).unwrap();
        assert_eq!(r.count, 40);
        assert!(r.refined);
    }

    #[test]
    fn zero_on_the_boundary_is_reported() {
        let f = poly(vec![Complex64::new(1.0, 0.5)]);
        let err = winding_number(&Rect::new(-1.0, 1.0, 0.0, 1.0), f).unwrap_err();
        assert!(matches!(err, ZetaError::ZeroOnContour { .. }));
    }

    #[test]
    fn positive_real_scaling_does_not_change_the_count() {
        let roots = vec![Complex64::new(0.2, 0.1), Complex64::new(-0.4, 0.3)];
        let base = poly(roots.clone());
        let rect = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let plain = winding_number(&rect, &base).unwrap();
        let scaled = winding_number(&rect, |p: ComplexPoint| {
            Ok(base(p)?.mul_exp(-800.0 - 5.0 * p.sigma))
        })
        .unwrap();
        assert_eq!(plain.count, scaled.count);
        assert!((plain.total_phase - scaled.total_phase).abs() < 1e-9);
    }
}
