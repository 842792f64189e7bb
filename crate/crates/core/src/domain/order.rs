use crate::error::{Error, Result};
use crate::scalar::Real;

/// Operator order `s = k + sigma` with `k` a nonnegative integer and
/// `sigma` in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracOrder<T: Real = f64> {
    integer_part: u32,
    frac_part: T,
}

impl<T: Real> FracOrder<T> {
    pub fn new(integer_part: u32, frac_part: T) -> Result<Self> {
        if !(frac_part >= T::zero() && frac_part < T::one()) {
            return Err(Error::InvalidOrder(format!(
                "fractional part {} outside [0, 1)",
                frac_part
            )));
        }
        Ok(Self { integer_part, frac_part })
    }

    /// Splits a total order `s >= 0` into integer and fractional parts.
    pub fn from_total(s: T) -> Result<Self> {
        if !(s >= T::zero()) || !s.is_finite() {
            return Err(Error::InvalidOrder(format!("order {s} must be finite and nonnegative")));
        }
        let k = s.floor();
        let k_int = k
            .to_u32()
            .ok_or_else(|| Error::InvalidOrder(format!("order {s} too large")))?;
        Self::new(k_int, s - k)
    }

    /// The order `n/2` of the conformally invariant operator in odd dimension `n`.
    pub fn half_dimension(n: usize) -> Result<Self> {
        if n % 2 == 0 || n == 0 {
            return Err(Error::InvalidDimension(n));
        }
        Self::new(((n - 1) / 2) as u32, T::lit(0.5))
    }

    pub fn identity() -> Self {
        Self { integer_part: 0, frac_part: T::zero() }
    }

    pub fn integer_part(&self) -> u32 {
        self.integer_part
    }

    pub fn frac_part(&self) -> T {
        self.frac_part
    }

    pub fn total(&self) -> T {
        T::lit(self.integer_part as f64) + self.frac_part
    }

    pub fn is_identity(&self) -> bool {
        self.integer_part == 0 && self.frac_part == T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_total_order() {
        let s = FracOrder::<f64>::from_total(1.5).unwrap();
        assert_eq!(s.integer_part(), 1);
        assert_eq!(s.frac_part(), 0.5);
        assert_eq!(FracOrder::<f64>::half_dimension(5).unwrap().total(), 2.5);
    }

    #[test]
    fn rejects_bad_fraction() {
        assert!(FracOrder::<f64>::new(0, 1.0).is_err());
        assert!(FracOrder::<f64>::new(0, -0.1).is_err());
        assert!(FracOrder::<f64>::from_total(f64::NAN).is_err());
        assert!(FracOrder::<f64>::half_dimension(4).is_err());
    }
}
