use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point `s = σ + it` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub const fn new(sigma: f64, t: f64) -> Self {
        ComplexPoint { sigma, t }
    }

    pub fn is_finite(&self) -> bool {
        self.sigma.is_finite() && self.t.is_finite()
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        ComplexPoint::new(z.re, z.im)
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        p.to_complex()
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t < 0.0 {
            write!(f, "{} - {}i", self.sigma, -self.t)
        } else {
            write!(f, "{} + {}i", self.sigma, self.t)
        }
    }
}

/// Closed axis-parallel rectangle `[sigma_lo, sigma_hi] × [t_lo, t_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Rect {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Self {
        Rect {
            sigma_lo,
            sigma_hi,
            t_lo,
            t_hi,
        }
    }

    pub fn width(&self) -> f64 {
        self.sigma_hi - self.sigma_lo
    }

    pub fn height(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn center(&self) -> ComplexPoint {
        ComplexPoint::new(
            0.5 * (self.sigma_lo + self.sigma_hi),
            0.5 * (self.t_lo + self.t_hi),
        )
    }

    /// Strict interior test.
    pub fn contains_strictly(&self, p: ComplexPoint) -> bool {
        p.sigma > self.sigma_lo && p.sigma < self.sigma_hi && p.t > self.t_lo && p.t < self.t_hi
    }

    /// Counter-clockwise corners starting at the bottom-left.
    pub fn corners(&self) -> [ComplexPoint; 4] {
        [
            ComplexPoint::new(self.sigma_lo, self.t_lo),
            ComplexPoint::new(self.sigma_hi, self.t_lo),
            ComplexPoint::new(self.sigma_hi, self.t_hi),
            ComplexPoint::new(self.sigma_lo, self.t_hi),
        ]
    }

    /// The four quadrants, in the order bottom-left, bottom-right, top-right, top-left.
    pub fn quadrants(&self) -> [Rect; 4] {
        let c = self.center();
        [
            Rect::new(self.sigma_lo, c.sigma, self.t_lo, c.t),
            Rect::new(c.sigma, self.sigma_hi, self.t_lo, c.t),
            Rect::new(c.sigma, self.sigma_hi, c.t, self.t_hi),
            Rect::new(self.sigma_lo, c.sigma, c.t, self.t_hi),
        ]
    }
}
