//! Ordered samples of `d`-dimensional observations.
//!
//! Order is the time index of a stationary sequence, so nothing in this crate
//! ever permutes a [`Sample`] in place. Accelerated pair counting works on
//! sorted copies.

use crate::error::{invalid, Result};

/// An ordered, non-empty sequence of finite `d`-vectors stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    dim: usize,
    data: Vec<f64>,
}

impl Sample {
    /// Builds a sample from individual points; all must share one dimension.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| invalid("sample must contain at least one observation"))?;
        let dim = first.len();
        let mut data = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(invalid(format!(
                    "observation {} has dimension {}, expected {}",
                    i + 1,
                    p.len(),
                    dim
                )));
            }
            data.extend_from_slice(p);
        }
        Self::from_flat(dim, data)
    }

    /// Builds a sample from a row-major buffer of `n * dim` coordinates.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if data.is_empty() {
            return Err(invalid("sample must contain at least one observation"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "{} coordinates do not split into rows of dimension {}",
                data.len(),
                dim
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "observation {} has a non-finite coordinate",
                pos / dim + 1
            )));
        }
        Ok(Self { dim, data })
    }

    /// One-dimensional sample.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::from_flat(1, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// Always false: a sample holds at least one observation.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Row-major coordinates.
    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Applies `f` to every coordinate, keeping order and shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_flat(self.dim, self.data.iter().map(|&v| f(v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_points() {
        let err = Sample::new(vec![vec![0.0, 1.0], vec![2.0]]).unwrap_err();
        assert!(err.to_string().contains("observation 2"));
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::univariate(vec![]).is_err());
        assert!(Sample::univariate(vec![0.0, f64::NAN]).is_err());
        assert!(Sample::from_flat(0, vec![1.0]).is_err());
        assert!(Sample::from_flat(2, vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn keeps_order() {
        let s = Sample::new(vec![vec![3.0, 1.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.point(0), &[3.0, 1.0]);
        assert_eq!(s.points().nth(1).unwrap(), &[0.0, 2.0]);
    }
}
