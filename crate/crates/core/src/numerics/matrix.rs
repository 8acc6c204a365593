use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};
use crate::C64;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let diag: Vec<C64> = diag.iter().map(|&d| C64::new(d, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| r == c || self[(r, c)] == C64::new(0.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Induced 1-norm (largest column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(GkError::ShapeMismatch { left: self.dim, right: v.len() });
        }
        Ok((0..self.dim)
            .map(|r| {
                let row = &self.data[r * self.dim..(r + 1) * self.dim];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_shape(rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[r * n..(r + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.check_shape(rhs)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check_shape(rhs)?;
        Ok(Self { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() })
    }

    /// Leading `dim x dim` block.
    pub fn crop(&self, dim: usize) -> Self {
        let dim = dim.min(self.dim);
        Self::from_fn(dim, |r, c| self[(r, c)])
    }

    /// Largest entrywise difference over rows and columns `0..dim-1`,
    /// leaving out the last (truncation-boundary) row and column.
    pub fn max_abs_diff_interior(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        let m = self.dim.saturating_sub(1);
        let mut worst = 0.0f64;
        for r in 0..m {
            for c in 0..m {
                worst = worst.max((self[(r, c)] - other[(r, c)]).norm());
            }
        }
        Ok(worst)
    }

    /// Largest entrywise difference on the last row and column only.
    pub fn max_abs_diff_boundary(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        if self.dim == 0 {
            return Ok(0.0);
        }
        let last = self.dim - 1;
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            worst = worst.max((self[(last, i)] - other[(last, i)]).norm());
            worst = worst.max((self[(i, last)] - other[(i, last)]).norm());
        }
        Ok(worst)
    }

    fn check_shape(&self, rhs: &Self) -> Result<()> {
        if self.dim != rhs.dim {
            return Err(GkError::ShapeMismatch { left: self.dim, right: rhs.dim });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.try_add(rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.try_sub(rhs).expect("matrix dimensions must agree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_adjoint() {
        let a = CMatrix::from_fn(3, |r, c| C64::new(r as f64, c as f64));
        let i = CMatrix::identity(3);
        assert_eq!(&a * &i, a);
        let ad = a.adjoint();
        assert_eq!(ad[(0, 2)], C64::new(2.0, -0.0));
        assert_eq!(ad.adjoint(), a);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = CMatrix::zeros(2);
        let b = CMatrix::zeros(3);
        assert!(matches!(a.try_mul(&b), Err(GkError::ShapeMismatch { .. })));
        assert!(a.mul_vec(&[C64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn interior_excludes_last_row_and_column() {
        let a = CMatrix::identity(3);
        let mut b = CMatrix::identity(3);
        b[(2, 0)] = C64::new(5.0, 0.0);
        assert_eq!(a.max_abs_diff_interior(&b).unwrap(), 0.0);
        assert_eq!(a.max_abs_diff_boundary(&b).unwrap(), 5.0);
    }
}
