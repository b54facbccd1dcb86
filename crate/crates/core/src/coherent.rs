//! m-coherent matrices `sum_k D_k J^k` with diagonal coefficients `D_k`.
//!
//! Products follow from `J D = S^m(D) J`: the `k`-th coefficient of `p q` is
//! `sum_i p_i S^{im}(q_{k-i})`. Coefficient `k` only matters in rows
//! `i < n - k m`; outside that range the stored values are never read back
//! into a relevant position.

use crate::error::{Error, Result};
use crate::matrix::{Band, DiagonalSeq, Matrix};
use crate::scalar::{Scalar, ScalarDomain};

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentPoly<T> {
    band: Band<T>,
    diags: Vec<DiagonalSeq<T>>,
}

impl<T: Scalar> CoherentPoly<T> {
    /// Coefficients beyond `floor((n - 1) / m)` are dropped, missing ones are zero.
    pub fn new(band: Band<T>, mut diags: Vec<DiagonalSeq<T>>) -> Result<Self> {
        let n = band.n();
        if diags.iter().any(|d| d.len() != n) {
            return Err(Error::Dimension("coefficient length differs from n".into()));
        }
        diags.truncate(band.max_power() + 1);
        while diags.len() < band.max_power() + 1 {
            diags.push(DiagonalSeq::zeros(n));
        }
        Ok(CoherentPoly { band, diags })
    }

    pub fn identity(band: Band<T>) -> Self {
        let n = band.n();
        Self::new(band, vec![DiagonalSeq::identity(n)]).expect("consistent sizes")
    }

    /// `I + J`.
    pub fn unit_plus_band(band: Band<T>) -> Self {
        let n = band.n();
        Self::new(
            band,
            vec![DiagonalSeq::identity(n), DiagonalSeq::identity(n)],
        )
        .expect("consistent sizes")
    }

    /// Reads the coefficients of `a` off its `k m`-th superdiagonals.
    /// Rows where `J^k` vanishes take 1 for `k = 1` and 0 otherwise.
    pub fn from_matrix(a: &Matrix<T>, band: &Band<T>, dom: &ScalarDomain) -> Result<Self> {
        let (n, m) = (band.n(), band.m());
        if a.rows() != n || a.cols() != n {
            return Err(Error::Dimension("matrix and band differ in size".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let on_grid = j >= i && (j - i) % m == 0;
                if !on_grid && !dom.is_zero(&a[(i, j)]) {
                    return Err(Error::NotCoherent);
                }
            }
        }
        let mut diags = Vec::with_capacity(band.max_power() + 1);
        for k in 0..=band.max_power() {
            let filler = if k == 1 { T::one() } else { T::zero() };
            let mut d = vec![filler.clone(); n];
            for (i, slot) in d.iter_mut().enumerate().take(n - k * m) {
                let e = band.power_entry(i, k);
                let v = &a[(i, i + k * m)];
                if dom.is_zero(&e) {
                    if !dom.is_zero(v) {
                        return Err(Error::NotCoherent);
                    }
                    *slot = filler.clone();
                } else {
                    *slot = v.div(&e)?;
                }
            }
            diags.push(DiagonalSeq(d));
        }
        Self::new(band.clone(), diags)
    }

    pub fn band(&self) -> &Band<T> {
        &self.band
    }

    pub fn n(&self) -> usize {
        self.band.n()
    }

    pub fn coefficients(&self) -> &[DiagonalSeq<T>] {
        &self.diags
    }

    pub fn coefficient(&self, k: usize) -> DiagonalSeq<T> {
        self.diags
            .get(k)
            .cloned()
            .unwrap_or_else(|| DiagonalSeq::zeros(self.n()))
    }

    /// Number of rows in which coefficient `k` is meaningful.
    pub fn live_rows(&self, k: usize) -> usize {
        self.n().saturating_sub(k * self.band.m())
    }

    /// The dense matrix `sum_k D_k J^k`.
    pub fn evaluate(&self) -> Matrix<T> {
        let (n, m) = (self.n(), self.band.m());
        let mut out = Matrix::zeros(n, n);
        for (k, d) in self.diags.iter().enumerate() {
            for i in 0..self.live_rows(k) {
                if d.0[i].is_zero() {
                    continue;
                }
                out[(i, i + k * m)] = d.0[i].mul_ref(&self.band.power_entry(i, k));
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.band != other.band {
            return Err(Error::JMismatch);
        }
        let m = self.band.m();
        let kmax = self.band.max_power();
        let n = self.n();
        let mut diags = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let mut acc = DiagonalSeq::zeros(n);
            for i in 0..=k {
                let p = &self.diags[i];
                if p.0.iter().all(|x| x.is_zero()) {
                    continue;
                }
                acc = acc.add(&p.hadamard(&other.diags[k - i].shift(i * m)));
            }
            diags.push(acc);
        }
        Self::new(self.band.clone(), diags)
    }

    pub fn power(&self, r: u32) -> Result<Self> {
        let mut acc = Self::identity(self.band.clone());
        for _ in 0..r {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplies the represented matrix by the scalar `c`.
    pub fn scale(&self, c: &T) -> Self {
        CoherentPoly {
            band: self.band.clone(),
            diags: self.diags.iter().map(|d| d.scale(c)).collect(),
        }
    }

    /// Re-expresses `self`, written over `J' = gamma J`, over `J`.
    pub fn rescale(&self, gamma: &T, target: &Band<T>, dom: &ScalarDomain) -> Result<Self> {
        if !self.band.approx_eq(&target.scale(gamma), dom) {
            return Err(Error::NotProportional);
        }
        let mut g = T::one();
        let mut diags = Vec::with_capacity(self.diags.len());
        for d in &self.diags {
            diags.push(d.scale(&g));
            g = g.mul_ref(gamma);
        }
        Self::new(target.clone(), diags)
    }

    /// `D_0 = D_1 = I` on the rows where they matter.
    pub fn is_normalized(&self, dom: &ScalarDomain) -> bool {
        let one = T::one();
        (0..2.min(self.diags.len())).all(|k| {
            self.diags[k].0[..self.live_rows(k)]
                .iter()
                .all(|x| dom.eq(x, &one))
        })
    }
}
