//! Bernoulli numbers (convention `B_1 = -1/2`) and Bernoulli polynomials.
//!
//! Numbers come from the exact rational recurrence
//! `Σ_{k=0}^{m} C(m+1, k) B_k = 0`; polynomial coefficients
//! `C(n, j) B_{n-j}` are formed exactly and rounded once.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{GmlError, Result};

pub const MAX_BERNOULLI_INDEX: usize = 64;

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::from(1)];
    for k in 1..=n {
        let next = &row[k - 1] * BigInt::from(n - k + 1) / BigInt::from(k);
        row.push(next);
    }
    row
}

fn exact_table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut b: Vec<BigRational> = Vec::with_capacity(MAX_BERNOULLI_INDEX + 1);
        b.push(BigRational::from_integer(BigInt::from(1)));
        for m in 1..=MAX_BERNOULLI_INDEX {
            let row = binomial_row(m + 1);
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                acc += BigRational::from_integer(row[k].clone()) * bk;
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b
    })
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("Bernoulli values up to index 64 are representable")
}

/// Coefficients of `B_n(x)` in increasing powers of `x`.
fn polynomial_table() -> &'static [Vec<f64>] {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let b = exact_table();
        (0..=MAX_BERNOULLI_INDEX)
            .map(|n| {
                let row = binomial_row(n);
                (0..=n)
                    .map(|j| to_f64(&(BigRational::from_integer(row[j].clone()) * &b[n - j])))
                    .collect()
            })
            .collect()
    })
}

fn check_index(n: usize) -> Result<()> {
    if n > MAX_BERNOULLI_INDEX {
        return Err(GmlError::Range(format!(
            "Bernoulli index {n} exceeds {MAX_BERNOULLI_INDEX}"
        )));
    }
    Ok(())
}

/// `B_n` as an exact rational.
pub fn bernoulli_number_exact(n: usize) -> Result<BigRational> {
    check_index(n)?;
    Ok(exact_table()[n].clone())
}

/// `B_0, …, B_max` rounded to `f64`.
pub fn bernoulli_numbers(max_index: usize) -> Result<Vec<f64>> {
    check_index(max_index)?;
    Ok(exact_table()[..=max_index].iter().map(to_f64).collect())
}

pub fn bernoulli_polynomial(n: usize, x: f64) -> Result<f64> {
    check_index(n)?;
    let coeffs = &polynomial_table()[n];
    Ok(coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c))
}
