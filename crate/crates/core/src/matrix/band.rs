use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarDomain};

/// `X^k = sign * I`: an involution is `{2, +1}`, a skew-involution `{2, -1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderSpec {
    pub k: u32,
    pub sign: i8,
}

impl OrderSpec {
    pub fn new(k: u32, sign: i8) -> Self {
        OrderSpec { k, sign }
    }

    pub fn is_valid(&self) -> bool {
        self.k >= 1 && (self.sign == 1 || self.sign == -1)
    }
}

/// A diagonal matrix stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSeq<T>(pub Vec<T>);

impl<T: Scalar> DiagonalSeq<T> {
    pub fn constant(n: usize, v: T) -> Self {
        DiagonalSeq(vec![v; n])
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(n, T::one())
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, T::zero())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `S^s`: drops the first `s` entries and pads with zeros on the right.
    pub fn shift(&self, s: usize) -> Self {
        let n = self.0.len();
        DiagonalSeq(
            (0..n)
                .map(|i| self.0.get(i + s).cloned().unwrap_or_else(T::zero))
                .collect(),
        )
    }

    pub fn hadamard(&self, other: &Self) -> Self {
        DiagonalSeq(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.mul_ref(b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        DiagonalSeq(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        DiagonalSeq(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.sub_ref(b))
                .collect(),
        )
    }

    pub fn scale(&self, c: &T) -> Self {
        DiagonalSeq(self.0.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        Matrix::from_diag(&self.0)
    }
}

/// A matrix whose only nonzero entries sit on the `m`-th superdiagonal:
/// `values[i]` is the entry at `(i, i + m)`. This is `J_m(A)` for a matrix `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Band<T> {
    n: usize,
    m: usize,
    values: Vec<T>,
}

impl<T: Scalar> Band<T> {
    pub fn new(n: usize, m: usize, values: Vec<T>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("band offset must be at least 1".into()));
        }
        if values.len() != n.saturating_sub(m) {
            return Err(Error::Dimension(format!(
                "band of offset {m} in dimension {n} has {} entries, got {}",
                n.saturating_sub(m),
                values.len()
            )));
        }
        Ok(Band { n, m, values })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Band {
            n,
            m,
            values: vec![T::zero(); n.saturating_sub(m)],
        }
    }

    /// `J_m(A)`: keeps exactly the `m`-th superdiagonal of `a`.
    pub fn extract(a: &Matrix<T>, m: usize) -> Self {
        let n = a.rows();
        Band {
            n,
            m,
            values: (0..n.saturating_sub(m))
                .map(|i| a[(i, i + m)].clone())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, i: usize) -> T {
        self.values.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        Band {
            n: self.n,
            m: self.m,
            values: self.values.iter().map(|v| v.mul_ref(c)).collect(),
        }
    }

    /// Largest `k` with `J^k` possibly nonzero in this window.
    pub fn max_power(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            (self.n - 1) / self.m
        }
    }

    /// Entry `(i, i + k m)` of `J^k`.
    pub fn power_entry(&self, i: usize, k: usize) -> T {
        if i + k * self.m >= self.n {
            return T::zero();
        }
        (0..k).fold(T::one(), |acc, l| acc.mul_ref(&self.values[i + l * self.m]))
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        let mut out = Matrix::zeros(self.n, self.n);
        for (i, v) in self.values.iter().enumerate() {
            out[(i, i + self.m)] = v.clone();
        }
        out
    }

    pub fn approx_eq(&self, other: &Self, dom: &ScalarDomain) -> bool {
        self.n == other.n
            && self.m == other.m
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| dom.eq(a, b))
    }
}

/// Element of `UT_n(m, R)`: unit diagonal, zero on superdiagonals `1..m`,
/// arbitrary from the `m`-th superdiagonal on. Entries are keyed `(i, j)`,
/// 0-based, with `j - i >= m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandUT<T> {
    n: usize,
    m: usize,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> BandUT<T> {
    pub fn identity(n: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("band offset must be at least 1".into()));
        }
        Ok(BandUT {
            n,
            m,
            entries: BTreeMap::new(),
        })
    }

    /// `I + J`.
    pub fn from_band(band: &Band<T>) -> Self {
        let mut out = BandUT {
            n: band.n(),
            m: band.m(),
            entries: BTreeMap::new(),
        };
        for (i, v) in band.values().iter().enumerate() {
            if !v.is_zero() {
                out.entries.insert((i, i + band.m()), v.clone());
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &T)> {
        self.entries.iter()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            return T::one();
        }
        self.entries.get(&(i, j)).cloned().unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) -> Result<()> {
        if j >= self.n || j < i + self.m {
            return Err(Error::InvalidInput(format!(
                "position ({}, {}) is outside UT_{}({}, R)",
                i + 1,
                j + 1,
                self.n,
                self.m
            )));
        }
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
        Ok(())
    }

    /// Checks membership in `UT_n(m, R)` and copies the stored part.
    pub fn from_dense(a: &Matrix<T>, m: usize, dom: &ScalarDomain) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("band matrix must be square".into()));
        }
        let mut out = BandUT::identity(a.rows(), m)?;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let v = &a[(i, j)];
                if i == j {
                    if !dom.eq(v, &T::one()) {
                        return Err(Error::PreconditionViolated(format!(
                            "diagonal entry ({}, {}) is not 1",
                            i + 1,
                            j + 1
                        )));
                    }
                } else if j >= i + m {
                    if !v.is_zero() {
                        out.entries.insert((i, j), v.clone());
                    }
                } else if !dom.is_zero(v) {
                    return Err(Error::PreconditionViolated(format!(
                        "entry ({}, {}) must vanish in UT_{}({}, R)",
                        i + 1,
                        j + 1,
                        a.rows(),
                        m
                    )));
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let mut out = Matrix::identity(self.n);
        for (&(i, j), v) in &self.entries {
            out[(i, j)] = v.clone();
        }
        out
    }

    /// `J_m` of this matrix.
    pub fn band(&self) -> Band<T> {
        Band {
            n: self.n,
            m: self.m,
            values: (0..self.n.saturating_sub(self.m))
                .map(|i| self.get(i, i + self.m))
                .collect(),
        }
    }

    /// True when nothing is stored beyond the `m`-th superdiagonal.
    pub fn is_band_only(&self) -> bool {
        self.entries.keys().all(|&(i, j)| j == i + self.m)
    }

    /// Leading `size x size` block, still in `UT_size(m, R)`.
    pub fn window(&self, size: usize) -> Self {
        BandUT {
            n: size.min(self.n),
            m: self.m,
            entries: self
                .entries
                .iter()
                .filter(|(&(_, j), _)| j < size)
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
        }
    }
}

/// Upper triangular matrix with an arbitrary invertible diagonal and the
/// band structure of [`BandUT`] above it.
#[derive(Debug, Clone, PartialEq)]
pub struct GenUT<T> {
    diag: Vec<T>,
    upper: BandUT<T>,
}

impl<T: Scalar> GenUT<T> {
    pub fn new(diag: Vec<T>, upper: BandUT<T>) -> Result<Self> {
        if diag.len() != upper.n() {
            return Err(Error::Dimension("diagonal length differs from n".into()));
        }
        if diag.iter().any(Zero::is_zero) {
            return Err(Error::Singular);
        }
        Ok(GenUT { diag, upper })
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn upper(&self) -> &BandUT<T> {
        &self.upper
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn m(&self) -> usize {
        self.upper.m()
    }

    pub fn from_dense(a: &Matrix<T>, m: usize, dom: &ScalarDomain) -> Result<Self> {
        let diag = a.diag();
        let mut unit = a.clone();
        for i in 0..a.rows() {
            unit[(i, i)] = T::one();
        }
        GenUT::new(diag, BandUT::from_dense(&unit, m, dom)?)
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let mut out = self.upper.to_dense();
        for (i, d) in self.diag.iter().enumerate() {
            out[(i, i)] = d.clone();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyc;

    fn q(n: i64) -> Cyc {
        Cyc::from_i64(n)
    }

    #[test]
    fn shift_drops_leading_entries() {
        let d = DiagonalSeq(vec![q(1), q(2), q(3)]);
        assert_eq!(d.shift(1).0, vec![q(2), q(3), q(0)]);
        assert_eq!(d.shift(5).0, vec![q(0), q(0), q(0)]);
    }

    #[test]
    fn shift_commutes_with_band() {
        // J D = S^m(D) J
        let j = Band::new(5, 2, vec![q(2), q(3), q(-1)]).unwrap();
        let d = DiagonalSeq(vec![q(1), q(4), q(6), q(7), q(9)]);
        let lhs = &j.to_matrix() * &d.to_matrix();
        let rhs = &d.shift(2).to_matrix() * &j.to_matrix();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn band_extract_examples() {
        let dom = ScalarDomain::exact(1);
        let id = Matrix::<Cyc>::identity(4);
        assert!(Band::extract(&id, 2).values().iter().all(Zero::is_zero));
        let mut a = id.clone();
        a[(0, 2)] = q(2);
        let b = Band::extract(&a, 2);
        assert_eq!(b.values(), &[q(2), q(0)]);
        let ut = BandUT::from_dense(&a, 2, &dom).unwrap();
        assert_eq!(ut.to_dense(), a);
        assert!(ut.is_band_only());
    }

    #[test]
    fn band_ut_rejects_low_entries() {
        let dom = ScalarDomain::exact(1);
        let mut a = Matrix::<Cyc>::identity(4);
        a[(0, 1)] = q(1);
        assert!(BandUT::from_dense(&a, 2, &dom).is_err());
        let mut b = BandUT::<Cyc>::identity(4, 2).unwrap();
        assert!(b.set(0, 1, q(1)).is_err());
        assert!(b.set(0, 3, q(1)).is_ok());
    }

    #[test]
    fn power_entries() {
        let j = Band::new(5, 1, vec![q(2), q(3), q(5), q(7)]).unwrap();
        let j2 = &j.to_matrix() * &j.to_matrix();
        for i in 0..3 {
            assert_eq!(j.power_entry(i, 2), j2[(i, i + 2)]);
        }
        assert_eq!(j.power_entry(4, 1), q(0));
        assert_eq!(j.max_power(), 4);
    }
}
