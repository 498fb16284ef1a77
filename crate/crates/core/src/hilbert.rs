//! Finite-dimensional real Hilbert space values.
//!
//! [`FiniteVector`] is an element of `R^n` with the Euclidean inner product.
//! [`ProductVector`] is an element of the product space `(R^n)^k`, whose inner
//! product is the sum of the blockwise inner products.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteVector {
    coords: Vec<f64>,
}

impl FiniteVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(Self { coords })
    }

    /// Builds a vector from a slice. Panics on an empty slice.
    pub fn from_slice(coords: &[f64]) -> Self {
        assert!(!coords.is_empty(), "vector must have at least one coordinate");
        Self {
            coords: coords.to_vec(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector must have at least one coordinate");
        Self { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Inner product, checked for matching dimensions.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.dot(other))
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Unchecked inner product; callers guarantee equal dimensions.
    pub(crate) fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_squared())
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        libm::sqrt(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|a| a * factor).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        self.zip_map(other, |x, y| a * x + b * y)
    }

    /// In-place `self += factor·other`.
    pub fn axpy(&mut self, factor: f64, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += factor * b;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Self {
            coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Index<usize> for FiniteVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl From<FiniteVector> for Vec<f64> {
    fn from(v: FiniteVector) -> Self {
        v.coords
    }
}

/// Element of the product space `H^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    blocks: Vec<FiniteVector>,
}

impl ProductVector {
    pub fn new(blocks: Vec<FiniteVector>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::BlockCountMismatch { expected: 1, found: 0 });
        };
        for b in &blocks[1..] {
            first.check_dim(b)?;
        }
        Ok(Self { blocks })
    }

    /// `(v, v, ..., v)` with `count` copies.
    pub fn diagonal(v: &FiniteVector, count: usize) -> Self {
        assert!(count > 0, "product vector needs at least one block");
        Self {
            blocks: vec![v.clone(); count],
        }
    }

    pub fn blocks(&self) -> &[FiniteVector] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<FiniteVector> {
        self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dim(&self) -> usize {
        self.blocks[0].dim()
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.dot(b)).sum())
    }

    pub fn check_shape(&self, other: &Self) -> Result<()> {
        if self.block_count() != other.block_count() {
            return Err(Error::BlockCountMismatch {
                expected: self.block_count(),
                found: other.block_count(),
            });
        }
        self.blocks[0].check_dim(&other.blocks[0])
    }

    pub fn norm_squared(&self) -> f64 {
        self.blocks.iter().map(FiniteVector::norm_squared).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_squared())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.block_count(), other.block_count(), "block count mismatch");
        let sq: f64 = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let d = a.distance(b);
                d * d
            })
            .sum();
        libm::sqrt(sq)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_blocks(other, FiniteVector::sub)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_blocks(other, FiniteVector::add)
    }

    /// `a·self + b·other`, blockwise.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        self.zip_blocks(other, |x, y| x.lincomb(a, y, b))
    }

    /// Arithmetic mean of the blocks.
    pub fn mean_block(&self) -> FiniteVector {
        let mut acc = self.blocks[0].clone();
        for b in &self.blocks[1..] {
            acc.axpy(1.0, b);
        }
        acc.scale(1.0 / self.blocks.len() as f64)
    }

    pub fn map_blocks(&self, mut f: impl FnMut(usize, &FiniteVector) -> FiniteVector) -> Self {
        Self {
            blocks: self.blocks.iter().enumerate().map(|(i, b)| f(i, b)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(FiniteVector::is_finite)
    }

    fn zip_blocks(&self, other: &Self, f: impl Fn(&FiniteVector, &FiniteVector) -> FiniteVector) -> Self {
        assert_eq!(self.block_count(), other.block_count(), "block count mismatch");
        Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

/// Checked inner product of two vectors.
pub fn inner(x: &FiniteVector, y: &FiniteVector) -> Result<f64> {
    x.inner(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_examples() {
        let e1 = FiniteVector::from_slice(&[1.0, 0.0]);
        let e2 = FiniteVector::from_slice(&[0.0, 1.0]);
        assert_eq!(inner(&e1, &e2).unwrap(), 0.0);
        let a = FiniteVector::from_slice(&[1.0, 2.0]);
        let b = FiniteVector::from_slice(&[3.0, 4.0]);
        assert_eq!(inner(&a, &b).unwrap(), 11.0);
        for s in [-3.5, 0.0, 1e-3, 7.25] {
            let v = FiniteVector::from_slice(&[s]);
            assert_eq!(inner(&v, &v).unwrap(), s * s);
        }
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let a = FiniteVector::from_slice(&[1.0, 2.0]);
        let b = FiniteVector::from_slice(&[1.0, 2.0, 3.0]);
        assert_eq!(inner(&a, &b), Err(Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn empty_vector_rejected() {
        assert_eq!(FiniteVector::new(Vec::new()), Err(Error::EmptyVector));
    }

    #[test]
    fn product_inner_is_blockwise_sum() {
        let x = ProductVector::new(vec![
            FiniteVector::from_slice(&[1.0, 2.0]),
            FiniteVector::from_slice(&[-1.0, 0.5]),
        ])
        .unwrap();
        let y = ProductVector::new(vec![
            FiniteVector::from_slice(&[3.0, 4.0]),
            FiniteVector::from_slice(&[2.0, 2.0]),
        ])
        .unwrap();
        assert_eq!(x.inner(&y).unwrap(), 11.0 + (-2.0 + 1.0));
        assert!((x.norm_squared() - x.inner(&x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn product_rejects_ragged_blocks() {
        let r = ProductVector::new(vec![
            FiniteVector::from_slice(&[1.0]),
            FiniteVector::from_slice(&[1.0, 2.0]),
        ]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mean_block_averages() {
        let x = ProductVector::new(vec![
            FiniteVector::from_slice(&[1.0]),
            FiniteVector::from_slice(&[2.0]),
            FiniteVector::from_slice(&[3.0]),
        ])
        .unwrap();
        assert_eq!(x.mean_block().coords(), &[2.0]);
    }
}
