use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// H(n) = sum_{j=1..n} 1/j as an exact rational.
pub fn harmonic(n: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(invalid("harmonic number H(n) requires n >= 1"));
    }
    let mut h = BigRational::zero();
    for j in 1..=n {
        h += BigRational::new(BigInt::one(), BigInt::from(j));
    }
    Ok(h)
}

/// Memo table of harmonic numbers, exact rationals with a float projection.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct Harmonic {
    table: Vec<BigRational>,
}

impl Harmonic {
    /// Precompute H(1)..H(n).
    pub fn up_to(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        table.push(BigRational::zero());
        for j in 1..=n {
            let prev = table[j - 1].clone();
            table.push(prev + BigRational::new(BigInt::one(), BigInt::from(j)));
        }
        Harmonic { table }
    }

    pub fn max_n(&self) -> usize {
        self.table.len() - 1
    }

    pub fn get(&self, n: usize) -> Result<&BigRational> {
        if n == 0 {
            return Err(invalid("harmonic number H(n) requires n >= 1"));
        }
        self.table
            .get(n)
            .ok_or_else(|| invalid(format!("H({n}) beyond precomputed table (max {})", self.max_n())))
    }

    pub fn get_f64(&self, n: usize) -> Result<f64> {
        Ok(self.get(n)?.to_f64().unwrap_or(f64::NAN))
    }
}

/// Rational helper: p/q from integer literals.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
