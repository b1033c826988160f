use proptest::prelude::*;

use zeta_strips::geometry::{strip, wedge};
use zeta_strips::series::eval_deriv;
use zeta_strips::zeros::{count_in_strip, dominant_evaluator, enumerate_zeros, hline_margin, strip_evaluator, winding_number};
use zeta_strips::{ComplexPoint, Rect};

#[test]
fn counts_in_wider_strips() {
    for (m, k) in [(3u32, 200u32), (4, 400)] {
        let s = strip(m, k).unwrap();
        assert!(s.exists);
        let e = enumerate_zeros(m, k, s.height(5)).unwrap();
        assert_eq!(e.count, 5, "(M={m}, k={k})");
        assert_eq!(count_in_strip(m, k, s.height(5)).unwrap().count, 5);
        for (j, r) in e.records.iter().enumerate() {
            assert_eq!(r.j as usize, j);
            assert!(r.residual < 1e-8 && r.simplicity_margin > 1e-6);
        }
    }
}

#[test]
fn division_lines_stay_clear() {
    for (m, k) in [(2u32, 38u32), (3, 100), (2, 100)] {
        for j in 0..=10 {
            assert!(hline_margin(m, k, j).unwrap() > 0.0, "(M={m}, k={k}, j={j})");
        }
    }
}

#[test]
fn normalization_preserves_counts() {
    let s = strip(2, 100).unwrap();
    let rect = Rect::new(s.sigma_lo(), s.sigma_hi(), 0.0, s.height(2));
    let a = winding_number(&rect, strip_evaluator(2, 100)).unwrap();
    let b = winding_number(&rect, dominant_evaluator(100)).unwrap();
    assert_eq!(a.count, 2);
    assert_eq!(a.count, b.count);
}

#[test]
fn conjugate_zeros() {
    // ζ^(k) is real on the real axis, so zeros come in conjugate pairs
    let z = enumerate_zeros(2, 38, 10.0).unwrap().records[0].location;
    let v = eval_deriv(ComplexPoint::new(z.sigma, -z.t), 38, 1e-12).unwrap();
    let scale = eval_deriv(ComplexPoint::new(z.sigma, 0.0), 38, 1e-12).unwrap();
    assert!((v.value.abs() / scale.value.abs()).to_f64() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_wedge_is_zero_free(k in 3u32..120, u in 0.0f64..1.0, w in 0.1f64..8.0, t0 in -60.0f64..60.0, h in 0.5f64..25.0) {
        let edge = wedge(2).unwrap().left_boundary(k as f64);
        let lo = edge + 12.0 * u;
        let rect = Rect::new(lo, lo + w, t0, t0 + h);
        prop_assert_eq!(winding_number(&rect, dominant_evaluator(k)).unwrap().count, 0);
    }

    #[test]
    fn cells_hold_one_zero(j in 0u32..12) {
        let c = zeta_strips::geometry::cell(2, 60, j).unwrap();
        prop_assert_eq!(winding_number(&c.rect(), strip_evaluator(2, 60)).unwrap().count, 1);
    }
}
