//! Complex and real numbers with a separate natural-log exponent.
//!
//! A [`ScaledComplex`] represents `mantissa · e^exponent` with `|mantissa| ∈ [1, 2)`
//! (or an exact zero). Terms such as `(log 2)^800 / 2^909` sit near `e^-922`, well
//! below the smallest normal `f64`, so every evaluator in this crate carries values
//! in this form and only collapses to plain floats after normalizing.

use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Below this exponent gap the smaller summand cannot change the larger one.
const NEGLIGIBLE_GAP: f64 = 760.0;

/// `x · 2^n`, exact for normal results.
fn ldexp(x: f64, n: i32) -> f64 {
    // split so that neither factor overflows
    let mut x = x;
    let mut n = n;
    while n > 1000 {
        x *= 2f64.powi(1000);
        n -= 1000;
    }
    while n < -1000 {
        x *= 2f64.powi(-1000);
        n += 1000;
    }
    x * 2f64.powi(n)
}

/// Writes `e^x` as `r · 2^n` with `r ∈ [1/√2, √2]`; exact when `x` is a multiple of `LN_2`
/// produced by normalization.
fn split_exponent(x: f64) -> (f64, i32) {
    let n = (x / LN_2).round().clamp(-1e5, 1e5);
    ((x - n * LN_2).exp(), n as i32)
}

/// Power of two `2^n` with `2^n ≤ a < 2^(n+1)`, for finite `a > 0`.
fn binary_exponent(a: f64) -> i32 {
    let mut n = a.log2().floor() as i32;
    // log2 can be off by one ulp around exact powers of two
    let scaled = ldexp(a, -n);
    if scaled >= 2.0 {
        n += 1;
    } else if scaled < 1.0 {
        n -= 1;
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    mantissa: Complex64,
    exponent: f64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mantissa: Complex64::new(0.0, 0.0),
        exponent: 0.0,
    };

    pub const ONE: ScaledComplex = ScaledComplex {
        mantissa: Complex64::new(1.0, 0.0),
        exponent: 0.0,
    };

    /// Builds `mantissa · e^exponent` and normalizes it.
    pub fn new(mantissa: Complex64, exponent: f64) -> Self {
        ScaledComplex { mantissa, exponent }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0.0)
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), 0.0)
    }

    /// `e^(ln_abs + i·phase)`.
    pub fn from_polar_ln(ln_abs: f64, phase: f64) -> Self {
        if ln_abs == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self::new(Complex64::from_polar(1.0, phase), ln_abs)
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.re.is_finite() && self.mantissa.im.is_finite() && self.exponent.is_finite()
    }

    fn normalized(self) -> Self {
        let a = self.mantissa.norm();
        if a == 0.0 {
            return Self::ZERO;
        }
        if !a.is_finite() || !self.exponent.is_finite() {
            // overflowed mantissa: fall back to log-polar rebuild when possible
            let re = self.mantissa.re;
            let im = self.mantissa.im;
            if re.is_finite() && im.is_finite() {
                let big = re.abs().max(im.abs());
                let n = binary_exponent(big);
                let m = Complex64::new(ldexp(re, -n), ldexp(im, -n));
                return ScaledComplex {
                    mantissa: m,
                    exponent: self.exponent + n as f64 * LN_2,
                }
                .normalized();
            }
            return self;
        }
        if (1.0..2.0).contains(&a) {
            return self;
        }
        let n = binary_exponent(a);
        let mut m = Complex64::new(ldexp(self.mantissa.re, -n), ldexp(self.mantissa.im, -n));
        let mut exponent = self.exponent + n as f64 * LN_2;
        // the norm of the rescaled mantissa can still round onto 2.0
        let b = m.norm();
        if b >= 2.0 {
            m /= 2.0;
            exponent += LN_2;
        } else if b < 1.0 {
            m *= 2.0;
            exponent -= LN_2;
        }
        ScaledComplex {
            mantissa: m,
            exponent,
        }
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.exponent + self.mantissa.norm().ln()
        }
    }

    pub fn abs(&self) -> ScaledReal {
        if self.is_zero() {
            ScaledReal::ZERO
        } else {
            ScaledReal::new(self.mantissa.norm(), self.exponent)
        }
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    pub fn conj(&self) -> Self {
        ScaledComplex {
            mantissa: self.mantissa.conj(),
            exponent: self.exponent,
        }
    }

    /// Collapses to a plain complex number; may overflow to infinity or underflow to zero.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let (r, n) = split_exponent(self.exponent);
        let m = self.mantissa * r;
        Complex64::new(ldexp(m.re, n), ldexp(m.im, n))
    }

    /// The value divided by `e^reference`, as a plain complex number.
    pub fn to_complex_relative(&self, reference: f64) -> Complex64 {
        ScaledComplex {
            mantissa: self.mantissa,
            exponent: self.exponent - reference,
        }
        .to_complex()
    }

    /// Multiplies by `e^x` for real `x`.
    pub fn mul_exp(&self, x: f64) -> Self {
        if self.is_zero() {
            return *self;
        }
        ScaledComplex {
            mantissa: self.mantissa,
            exponent: self.exponent + x,
        }
    }

    pub fn scale(&self, x: f64) -> Self {
        Self::new(self.mantissa * x, self.exponent)
    }

    pub fn mul_complex(&self, z: Complex64) -> Self {
        Self::new(self.mantissa * z, self.exponent)
    }

    pub fn div_real(&self, r: ScaledReal) -> Self {
        Self::new(self.mantissa / r.mantissa(), self.exponent - r.exponent())
    }

    pub fn recip(&self) -> Self {
        Self::new(self.mantissa.inv(), -self.exponent)
    }
}

impl Default for ScaledComplex {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<Complex64> for ScaledComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl Add for ScaledComplex {
    type Output = ScaledComplex;

    fn add(self, rhs: ScaledComplex) -> ScaledComplex {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = small.exponent - big.exponent;
        if gap < -NEGLIGIBLE_GAP {
            return big;
        }
        ScaledComplex::new(big.mantissa + small.mantissa * gap.exp(), big.exponent)
    }
}

impl Sub for ScaledComplex {
    type Output = ScaledComplex;

    fn sub(self, rhs: ScaledComplex) -> ScaledComplex {
        self + (-rhs)
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;

    fn neg(self) -> ScaledComplex {
        ScaledComplex {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;

    fn mul(self, rhs: ScaledComplex) -> ScaledComplex {
        if self.is_zero() || rhs.is_zero() {
            return ScaledComplex::ZERO;
        }
        ScaledComplex::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledComplex {
    type Output = ScaledComplex;

    fn div(self, rhs: ScaledComplex) -> ScaledComplex {
        if self.is_zero() {
            return ScaledComplex::ZERO;
        }
        ScaledComplex::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl fmt::Display for ScaledComplex {
    /// Decimal rendering `(a + bi)e±d` with a shared power of ten.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, d) = decimal_parts(self.mantissa, self.exponent);
        let digits = f.precision().unwrap_or(15);
        if m.im < 0.0 {
            write!(f, "({:.*} - {:.*}i)e{}", digits, m.re, digits, -m.im, d)
        } else {
            write!(f, "({:.*} + {:.*}i)e{}", digits, m.re, digits, m.im.abs(), d)
        }
    }
}

/// Splits `m · e^exponent` into `(c, d)` with `value = c · 10^d` and `1 ≤ max(|re c|, |im c|) < 10`.
pub fn decimal_parts(m: Complex64, exponent: f64) -> (Complex64, i64) {
    if m.re == 0.0 && m.im == 0.0 {
        return (m, 0);
    }
    let log10 = exponent / std::f64::consts::LN_10 + m.re.abs().max(m.im.abs()).log10();
    let d = log10.floor();
    let shift = (exponent / std::f64::consts::LN_10 - d) * std::f64::consts::LN_10;
    (m * shift.exp(), d as i64)
}

/// Nonnegative-capable real counterpart of [`ScaledComplex`]; used for moduli and error bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledReal {
    mantissa: f64,
    exponent: f64,
}

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal {
        mantissa: 0.0,
        exponent: 0.0,
    };

    pub fn new(mantissa: f64, exponent: f64) -> Self {
        if mantissa == 0.0 {
            return Self::ZERO;
        }
        if !mantissa.is_finite() || !exponent.is_finite() {
            return ScaledReal { mantissa, exponent };
        }
        let n = binary_exponent(mantissa.abs());
        ScaledReal {
            mantissa: ldexp(mantissa, -n),
            exponent: exponent + n as f64 * LN_2,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(x, 0.0)
    }

    /// `e^x`.
    pub fn from_ln(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            ScaledReal {
                mantissa: 1.0,
                exponent: x,
            }
        }
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn ln(&self) -> f64 {
        if self.mantissa <= 0.0 {
            f64::NEG_INFINITY
        } else {
            self.exponent + self.mantissa.ln()
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            let (r, n) = split_exponent(self.exponent);
            ldexp(self.mantissa * r, n)
        }
    }

    /// The value divided by `e^reference`.
    pub fn to_f64_relative(&self, reference: f64) -> f64 {
        ScaledReal {
            mantissa: self.mantissa,
            exponent: self.exponent - reference,
        }
        .to_f64()
    }

    pub fn mul_exp(&self, x: f64) -> Self {
        ScaledReal {
            mantissa: self.mantissa,
            exponent: self.exponent + x,
        }
    }

    pub fn scale(&self, x: f64) -> Self {
        Self::new(self.mantissa * x, self.exponent)
    }
}

impl Default for ScaledReal {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Add for ScaledReal {
    type Output = ScaledReal;

    fn add(self, rhs: ScaledReal) -> ScaledReal {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = small.exponent - big.exponent;
        if gap < -NEGLIGIBLE_GAP {
            return big;
        }
        ScaledReal::new(big.mantissa + small.mantissa * gap.exp(), big.exponent)
    }
}

impl Mul for ScaledReal {
    type Output = ScaledReal;

    fn mul(self, rhs: ScaledReal) -> ScaledReal {
        if self.is_zero() || rhs.is_zero() {
            return ScaledReal::ZERO;
        }
        ScaledReal::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledReal {
    type Output = ScaledReal;

    fn div(self, rhs: ScaledReal) -> ScaledReal {
        if self.is_zero() {
            return ScaledReal::ZERO;
        }
        ScaledReal::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl PartialOrd for ScaledReal {
    /// Ordering for nonnegative values.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => 0.0.partial_cmp(&other.mantissa),
            (false, true) => self.mantissa.partial_cmp(&0.0),
            (false, false) => {
                if self.mantissa.signum() != other.mantissa.signum() {
                    return self.mantissa.partial_cmp(&other.mantissa);
                }
                let ord = self.ln_abs_signed().partial_cmp(&other.ln_abs_signed())?;
                Some(if self.mantissa < 0.0 { ord.reverse() } else { ord })
            }
        }
    }
}

impl ScaledReal {
    fn ln_abs_signed(&self) -> f64 {
        self.exponent + self.mantissa.abs().ln()
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, d) = decimal_parts(Complex64::new(self.mantissa, 0.0), self.exponent);
        let digits = f.precision().unwrap_or(15);
        write!(f, "{:.*}e{}", digits, m.re, d)
    }
}
