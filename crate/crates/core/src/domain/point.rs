use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest ambient dimension handled by the stack-buffered quadrature paths.
pub const MAX_DIM: usize = 8;

/// A point of R^n.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<T: Real = f64> {
    coords: Vec<T>,
}

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if coords.len() > MAX_DIM {
            return Err(Error::InvalidDimension(coords.len()));
        }
        Ok(Self { coords })
    }

    /// Builds a point from `f64` coordinates.
    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| T::lit(c)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} unsupported");
        Self { coords: vec![T::zero(); dim] }
    }

    /// `t` times the `axis`-th unit vector.
    pub fn on_axis(dim: usize, axis: usize, t: T) -> Self {
        let mut p = Self::origin(dim);
        p.coords[axis] = t;
        p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.as_f64()).collect()
    }

    pub fn norm(&self) -> T {
        norm(&self.coords)
    }

    pub fn dist(&self, other: &Self) -> T {
        dist(&self.coords, &other.coords)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| a - b).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { coords: self.coords.iter().map(|&a| a * s).collect() }
    }

    pub fn dot(&self, other: &Self) -> T {
        dot(&self.coords, &other.coords)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: dim, got: self.dim() })
        }
    }
}

impl<T: Real> Index<usize> for Point<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.coords[i]
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_oversized() {
        assert!(Point::<f64>::new(vec![]).is_err());
        assert!(Point::<f64>::new(vec![0.0; MAX_DIM + 1]).is_err());
    }

    #[test]
    fn basic_geometry() {
        let a = Point::<f64>::from_f64(&[3.0, 4.0]).unwrap();
        let b = Point::origin(2);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dist(&b), 5.0);
        assert_eq!(a.sub(&a), b);
        assert_eq!(a.scale(2.0)[1], 8.0);
    }
}
