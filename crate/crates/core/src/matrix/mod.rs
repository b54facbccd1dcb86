//! Dense and band-structured matrices over any [`Scalar`].
//!
//! Dense matrices are stored row-major. Indices are 0-based in the API; the
//! JSON wire format (see [`json`]) is 1-based.

mod band;
pub mod json;

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarDomain};

pub use band::{Band, BandUT, DiagonalSeq, GenUT, OrderSpec};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Matrix::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, T::one())
    }

    pub fn scalar(n: usize, alpha: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = alpha.clone();
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn n(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U: Scalar>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Matrix<U>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let slot = &mut out.data[i * other.cols + j];
                    *slot = slot.add_ref(&a.mul_ref(b));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub_ref(b))
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.mul_ref(c))
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_upper_triangular() && self.is_lower_triangular()
    }

    /// Upper triangular with unit diagonal, compared in `dom`.
    pub fn is_unitriangular(&self, dom: &ScalarDomain) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                dom.eq(&self[(i, i)], &T::one()) && (0..i).all(|j| dom.is_zero(&self[(i, j)]))
            })
    }

    /// Returns `alpha` when the matrix equals `alpha * I` in `dom`.
    pub fn as_scalar(&self, dom: &ScalarDomain) -> Option<T> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let alpha = self[(0, 0)].clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let ok = if i == j {
                    dom.eq(&self[(i, j)], &alpha)
                } else {
                    dom.is_zero(&self[(i, j)])
                };
                if !ok {
                    return None;
                }
            }
        }
        Some(alpha)
    }

    /// Entrywise equality in `dom`.
    pub fn approx_eq(&self, other: &Self, dom: &ScalarDomain) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| dom.eq(a, b))
    }

    pub fn is_identity(&self, dom: &ScalarDomain) -> bool {
        self.is_square() && self.approx_eq(&Self::identity(self.rows), dom)
    }

    /// Frobenius norm (as a float, for residual reporting).
    pub fn norm(&self) -> f64 {
        self.data
            .iter()
            .map(|x| {
                let m = x.modulus();
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        if self.is_upper_triangular() {
            return self.upper_inverse();
        }
        if self.is_lower_triangular() {
            return Ok(self.transpose().upper_inverse()?.transpose());
        }
        self.gauss_jordan_inverse()
    }

    /// Back substitution for an upper triangular matrix.
    fn upper_inverse(&self) -> Result<Self> {
        let n = self.rows;
        let mut inv_diag = Vec::with_capacity(n);
        for i in 0..n {
            inv_diag.push(self[(i, i)].inv().map_err(|_| Error::Singular)?);
        }
        let mut out = Self::zeros(n, n);
        for j in 0..n {
            out[(j, j)] = inv_diag[j].clone();
            for i in (0..j).rev() {
                let mut acc = T::zero();
                for k in i + 1..=j {
                    let a = &self[(i, k)];
                    if a.is_zero() {
                        continue;
                    }
                    let b = &out[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add_ref(&a.mul_ref(b));
                }
                if !acc.is_zero() {
                    out[(i, j)] = -acc.mul_ref(&inv_diag[i]);
                }
            }
        }
        Ok(out)
    }

    fn gauss_jordan_inverse(&self) -> Result<Self> {
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = pick_pivot(&a, col).ok_or(Error::Singular)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].inv().map_err(|_| Error::Singular)?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                a.axpy_row(r, col, &f);
                inv.axpy_row(r, col, &f);
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &T) {
        for j in 0..self.cols {
            let v = &mut self.data[r * self.cols + j];
            if !v.is_zero() {
                *v = v.mul_ref(c);
            }
        }
    }

    /// row[target] -= f * row[source]
    pub fn axpy_row(&mut self, target: usize, source: usize, f: &T) {
        for j in 0..self.cols {
            let s = &self.data[source * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let d = f.mul_ref(s);
            let t = &mut self.data[target * self.cols + j];
            *t = t.sub_ref(&d);
        }
    }

    /// `self^r`; negative exponents go through the inverse.
    pub fn power(&self, r: i64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut base = if r < 0 { self.inverse()? } else { self.clone() };
        let mut e = r.unsigned_abs();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Determinant: fraction-free Bareiss elimination for exact scalars,
    /// partial pivoting for floats.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::Dimension(
                "determinant of a non-square matrix".into(),
            ));
        }
        if T::is_exact() {
            Ok(self.bareiss_det())
        } else {
            Ok(self.pivoted_det())
        }
    }

    fn bareiss_det(&self) -> T {
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.clone();
        let mut negate = false;
        let mut prev_inv = T::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                    Some(r) => {
                        a.swap_rows(k, r);
                        negate = !negate;
                    }
                    None => return T::zero(),
                }
            }
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = pivot
                        .mul_ref(&a[(i, j)])
                        .sub_ref(&a[(i, k)].mul_ref(&a[(k, j)]));
                    a[(i, j)] = v.mul_ref(&prev_inv);
                }
                a[(i, k)] = T::zero();
            }
            prev_inv = pivot.inv().expect("nonzero pivot");
        }
        let d = a[(n - 1, n - 1)].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    fn pivoted_det(&self) -> T {
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = pick_pivot(&a, col) else {
                return T::zero();
            };
            if p != col {
                a.swap_rows(col, p);
                det = -det;
            }
            let pv = a[(col, col)].clone();
            det = det.mul_ref(&pv);
            let pinv = pv.inv().expect("nonzero pivot");
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].mul_ref(&pinv);
                a.axpy_row(r, col, &f);
            }
        }
        det
    }

    /// Determinant of the leading `j x j` block (`Delta_j`); `Delta_0 = 1`.
    pub fn leading_minor(&self, j: usize) -> Result<T> {
        self.window(j).det()
    }

    /// Leading principal `n x n` submatrix.
    pub fn window(&self, n: usize) -> Self {
        self.submatrix(0, 0, n.min(self.rows), n.min(self.cols))
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        out
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// `F A F` with `F` the anti-identity permutation.
    pub fn flip(&self) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(self.rows - 1 - i, self.cols - 1 - j)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// `X A X^{-1}` with `self = X`.
    pub fn conjugate(&self, a: &Self) -> Result<Self> {
        self.matmul(a)?.matmul(&self.inverse()?)
    }

    /// `X A X^{-1}` when `X^{-1}` is already known.
    pub fn conjugate_with(&self, inverse: &Self, a: &Self) -> Result<Self> {
        self.matmul(a)?.matmul(inverse)
    }

    /// `X^k = sign * I` in `dom`.
    pub fn is_order(&self, spec: OrderSpec, dom: &ScalarDomain) -> bool {
        if !self.is_square() || spec.k == 0 {
            return false;
        }
        match self.power(spec.k as i64) {
            Ok(p) => p.approx_eq(&Self::scalar(self.rows, T::from_i64(spec.sign as i64)), dom),
            Err(_) => false,
        }
    }
}

/// Pivot row for column `col`: first nonzero for exact scalars, largest
/// modulus for floats.
fn pick_pivot<T: Scalar>(a: &Matrix<T>, col: usize) -> Option<usize> {
    if T::is_exact() {
        (col..a.rows).find(|&r| !a[(r, col)].is_zero())
    } else {
        let (best, m) = (col..a.rows)
            .map(|r| (r, a[(r, col)].modulus()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        (m > 0.0).then_some(best)
    }
}

/// `[P, Q] = P Q P^{-1} Q^{-1}`.
pub fn commutator<T: Scalar>(p: &Matrix<T>, q: &Matrix<T>) -> Result<Matrix<T>> {
    p.matmul(q)?.matmul(&p.inverse()?)?.matmul(&q.inverse()?)
}

impl<'a, T: Scalar> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;

    /// Panics on a shape mismatch; use [`Matrix::matmul`] for a checked product.
    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        self.matmul(rhs).expect("conformable matrices")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyc;
    use num_complex::Complex64;

    fn exact() -> ScalarDomain {
        ScalarDomain::exact(12)
    }

    fn q(n: i64, d: i64) -> Cyc {
        Cyc::from_ratio(n, d)
    }

    #[test]
    fn inverse_of_elementary() {
        let mut a = Matrix::<Cyc>::identity(3);
        a[(0, 1)] = q(1, 1);
        let mut expect = Matrix::identity(3);
        expect[(0, 1)] = q(-1, 1);
        assert_eq!(a.inverse().unwrap(), expect);
    }

    #[test]
    fn power_of_diag() {
        let dom = exact();
        let i: Cyc = dom.imag_unit().unwrap();
        let d = Matrix::from_diag(&[i.clone(), -i]);
        assert_eq!(d.power(2).unwrap(), Matrix::scalar(2, q(-1, 1)));
        assert!(d.is_order(OrderSpec::new(2, -1), &dom));
    }

    #[test]
    fn commutator_basics() {
        let mut p = Matrix::<Cyc>::identity(3);
        p[(0, 2)] = q(3, 2);
        p[(1, 1)] = q(2, 1);
        assert!(commutator(&p, &p).unwrap().is_identity(&exact()));
        let s = Matrix::from_diag(&[q(1, 1), q(-1, 1), q(1, 1)]);
        let mut t = Matrix::<Cyc>::identity(3);
        t[(0, 0)] = q(-1, 1);
        t[(0, 1)] = q(5, 1);
        assert!(t.is_order(OrderSpec::new(2, 1), &exact()));
        let st = &s * &t;
        assert_eq!(commutator(&s, &t).unwrap(), &st * &st);
    }

    #[test]
    fn conjugate_identity_and_flip() {
        let mut a = Matrix::<Cyc>::identity(4);
        a[(1, 0)] = q(7, 1);
        assert_eq!(Matrix::identity(4).conjugate(&a).unwrap(), a);
        let f = a.flip();
        assert!(f.is_upper_triangular());
        assert_eq!(f[(2, 3)], q(7, 1));
        assert_eq!(f.flip(), a);
        assert_eq!(Matrix::<Cyc>::identity(5).flip(), Matrix::identity(5));
    }

    #[test]
    fn determinants_agree() {
        let rows = vec![
            vec![q(0, 1), q(2, 1), q(1, 3)],
            vec![q(1, 1), q(-1, 2), q(4, 1)],
            vec![q(3, 1), q(1, 1), q(0, 1)],
        ];
        let a = Matrix::from_rows(rows).unwrap();
        // cofactor expansion
        let expect = q(0, 1) - q(2, 1) * (q(0, 1) - q(12, 1)) + q(1, 3) * (q(1, 1) + q(3, 2));
        assert_eq!(a.det().unwrap(), expect);
        let f = a.map(|x| x.to_complex());
        assert!((f.det().unwrap() - expect.to_complex()).norm() < 1e-12);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity(&exact()));
    }

    #[test]
    fn float_singular() {
        let a = Matrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(a.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn window_of_product() {
        let mut p = Matrix::<Cyc>::identity(4);
        let mut r = Matrix::<Cyc>::identity(4);
        p[(0, 3)] = q(2, 1);
        p[(1, 2)] = q(-1, 1);
        r[(0, 1)] = q(5, 1);
        r[(2, 3)] = q(1, 7);
        for n in 0..=4 {
            assert_eq!((&p * &r).window(n), &p.window(n) * &r.window(n));
        }
    }
}
