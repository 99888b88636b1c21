use std::fmt;
use std::ops::Index;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Dense complex column vector. Never empty.
#[derive(Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    /// Wraps `elements`, rejecting empty or non-finite input.
    pub fn new(elements: Vec<Complex64>) -> Result<Self> {
        if elements.is_empty() {
            return invalid("complex vector must have at least one element");
        }
        if let Some(i) = elements.iter().position(|z| !z.is_finite()) {
            return invalid(format!("complex vector element {i} is not finite"));
        }
        Ok(Self(elements))
    }

    /// # Panics
    ///
    /// Panics if `len == 0`.
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "complex vector must have at least one element");
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_vec_unchecked(elements: Vec<Complex64>) -> Self {
        debug_assert!(!elements.is_empty());
        Self(elements)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; present for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    /// Unit-norm copy. Errors on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return invalid("cannot normalize a zero-norm vector");
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Squared Euclidean distance `‖self − other‖²`.
    pub fn distance_sqr(&self, other: &Self) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm_sqr()).sum())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect()))
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return invalid(format!("length mismatch: {a} vs {b}"));
    }
    Ok(())
}

/// `a^H b = Σ conj(a_i)·b_i`.
pub fn hermitian_inner(a: &ComplexVector, b: &ComplexVector) -> Result<Complex64> {
    check_len(a.len(), b.len())?;
    Ok(a.0.iter().zip(&b.0).map(|(x, y)| x.conj() * y).sum())
}

/// Dense complex matrix stored row-major.
///
/// Training observations are `M × N`: one row per receive antenna, one column
/// per time slot.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid(format!("matrix dimensions must be positive, got {rows}x{cols}"));
        }
        if rows * cols != data.len() {
            return invalid(format!(
                "{rows}x{cols} matrix needs {} elements, got {}",
                rows * cols,
                data.len()
            ));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return invalid("matrix contains non-finite elements");
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    /// Rank-one outer product `u · v^T` (no conjugation), with `v` real.
    pub fn outer_real(u: &ComplexVector, v: &[f64]) -> Result<Self> {
        if v.is_empty() {
            return invalid("outer product needs a non-empty right factor");
        }
        let data = u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect();
        Ok(Self { rows: u.len(), cols: v.len(), data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> ComplexVector {
        ComplexVector::from_vec_unchecked((0..self.rows).map(|r| self[(r, c)]).collect())
    }

    /// `Y · x` for a real vector `x` (the LS correlator with ±1 bits).
    pub fn mul_real(&self, x: &[f64]) -> Result<ComplexVector> {
        check_len(self.cols, x.len())?;
        let out = (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(y, &b)| y * b).sum())
            .collect();
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    /// `Y · x` for a complex vector `x`.
    pub fn mul_vec(&self, x: &ComplexVector) -> Result<ComplexVector> {
        check_len(self.cols, x.len())?;
        let out = (0..self.rows)
            .map(|r| self.row(r).iter().zip(x.iter()).map(|(y, b)| y * b).sum())
            .collect();
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    /// `h^H · Y` as a row of length `cols`.
    pub fn hermitian_left_mul(&self, h: &ComplexVector) -> Result<Vec<Complex64>> {
        check_len(self.rows, h.len())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (r, hr) in h.iter().enumerate() {
            let hc = hr.conj();
            for (acc, y) in out.iter_mut().zip(self.row(r)) {
                *acc += hc * y;
            }
        }
        Ok(out)
    }

    /// Column-wise concatenation `[self, other]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return invalid(format!("row mismatch: {} vs {}", self.rows, other.rows));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Self { rows: self.rows, cols, data })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return invalid(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖Y − h·b^T‖_F` for a real `b`, without materializing the rank-one term.
    pub fn rank_one_residual(&self, h: &ComplexVector, b: &[f64]) -> Result<f64> {
        check_len(self.rows, h.len())?;
        check_len(self.cols, b.len())?;
        let mut acc = 0.0;
        for (r, hr) in h.iter().enumerate() {
            for (y, &bn) in self.row(r).iter().zip(b) {
                acc += (y - hr * bn).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}
