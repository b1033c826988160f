//! Even-index Bernoulli numbers, computed exactly once and cached as `f64`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Largest `j` for which `B_{2j}` is tabulated.
pub const MAX_INDEX: usize = 40;

struct Table {
    /// `B_{2j}` for `j = 0..=MAX_INDEX`.
    b2j: Vec<f64>,
    /// `B_{2j} / (2j)!`.
    b2j_over_fact: Vec<f64>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let exact = akiyama_tanigawa(2 * MAX_INDEX);
        let mut b2j = Vec::with_capacity(MAX_INDEX + 1);
        let mut b2j_over_fact = Vec::with_capacity(MAX_INDEX + 1);
        let mut fact = BigInt::from(1);
        for (n, b) in exact.iter().enumerate() {
            if n > 0 {
                fact *= BigInt::from(n);
            }
            if n % 2 == 0 {
                b2j.push(b.to_f64().unwrap_or(f64::NAN));
                let scaled = b / BigRational::from_integer(fact.clone());
                b2j_over_fact.push(scaled.to_f64().unwrap_or(f64::NAN));
            }
        }
        Table { b2j, b2j_over_fact }
    })
}

/// Exact `B_0 .. B_n` (with `B_1 = +1/2`, irrelevant here since only even indices are used).
fn akiyama_tanigawa(n: usize) -> Vec<BigRational> {
    let mut row: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        row.push(BigRational::new(BigInt::from(1), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * BigRational::from_integer(BigInt::from(j));
        }
        out.push(if row[0].is_zero() {
            BigRational::zero()
        } else {
            row[0].clone()
        });
    }
    out
}

/// `B_{2j}` as a float. Panics if `j > MAX_INDEX`.
pub fn b2j(j: usize) -> f64 {
    table().b2j[j]
}

/// `B_{2j} / (2j)!` as a float. Panics if `j > MAX_INDEX`.
pub fn b2j_over_factorial(j: usize) -> f64 {
    table().b2j_over_fact[j]
}
