//! Commutator factorization of Vershik-Kerov block matrices
//! `V = [[M1, M2], [0, M3]]` on a finite window.
//!
//! When 1 is not an eigenvalue of `M1`, the corner `M2` is removed by the
//! similarity `W = [[I, Y], [0, I]]`, so `V = W diag(M1, M3) W^{-1}`. The two
//! diagonal blocks are factored separately and the pairs padded to act on
//! disjoint blocks.

use crate::certificate::{Certificate, CommPair, Family};
use crate::error::{Error, Result};
use crate::matrix::{BandUT, Matrix};
use crate::mode::Mode;
use crate::scalar::{Scalar, ScalarDomain};
use crate::sl::factorize_sl;
use crate::ut::{embed, factorize_ut, job_domain};

#[derive(Debug, Clone, PartialEq)]
pub struct VKElement<T> {
    pub m1: Matrix<T>,
    pub m2: Matrix<T>,
    pub m3: BandUT<T>,
}

impl<T: Scalar> VKElement<T> {
    pub fn new(m1: Matrix<T>, m2: Matrix<T>, m3: BandUT<T>) -> Result<Self> {
        if !m1.is_square() {
            return Err(Error::Dimension("M1 must be square".into()));
        }
        if m2.rows() != m1.rows() || m2.cols() != m3.n() {
            return Err(Error::Dimension("M2 must be n x N".into()));
        }
        Ok(VKElement { m1, m2, m3 })
    }

    /// `n`, the size of `M1`.
    pub fn n(&self) -> usize {
        self.m1.rows()
    }

    /// `N`, the window size of `M3`.
    pub fn window(&self) -> usize {
        self.m3.n()
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let (n, w) = (self.n(), self.window());
        let mut out = Matrix::zeros(n + w, n + w);
        out.set_block(0, 0, &self.m1);
        out.set_block(0, n, &self.m2);
        out.set_block(n, n, &self.m3.to_dense());
        out
    }
}

/// `Y` with `M1 Y - Y M3 = -M2`, column by column:
/// `(M1 - I) y_j = -b_j + sum_{i<j} y_i (M3)_{ij}`.
pub fn vk_eliminate_corner<T: Scalar>(v: &VKElement<T>, dom: &ScalarDomain) -> Result<Matrix<T>> {
    let n = v.n();
    let shifted = v.m1.sub(&Matrix::identity(n))?;
    if dom.is_zero(&shifted.det()?) {
        return Err(Error::EigenvalueOne);
    }
    let solver = shifted.inverse()?;
    let w = v.window();
    let mut y = Matrix::<T>::zeros(n, w);
    for j in 0..w {
        let mut rhs: Vec<T> = (0..n).map(|r| -v.m2[(r, j)].clone()).collect();
        for i in 0..j {
            let t = v.m3.get(i, j);
            if t.is_zero() {
                continue;
            }
            for (r, slot) in rhs.iter_mut().enumerate() {
                *slot = slot.add_ref(&y[(r, i)].mul_ref(&t));
            }
        }
        for r in 0..n {
            let mut s = T::zero();
            for (c, b) in rhs.iter().enumerate() {
                s = s.add_ref(&solver[(r, c)].mul_ref(b));
            }
            y[(r, j)] = s;
        }
    }
    Ok(y)
}

/// `W = [[I, Y], [0, I]]` and its inverse.
pub fn corner_conjugator<T: Scalar>(y: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let (n, w) = (y.rows(), y.cols());
    let mut x = Matrix::identity(n + w);
    let mut x_inv = Matrix::identity(n + w);
    x.set_block(0, n, y);
    x_inv.set_block(0, n, &y.neg());
    (x, x_inv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VkFactorization<T> {
    pub cert_a: Certificate<T>,
    pub cert_t: Certificate<T>,
    /// `W` with `V = W diag(M1, M3) W^{-1}`.
    pub conjugator: Matrix<T>,
    /// Padded, conjugated pairs whose product is `V`.
    pub joint: Certificate<T>,
}

/// Identity block, or `zeta_{2K} I` for a factor of order `(K, -1)` so the
/// padded factor keeps its order.
fn pad<T: Scalar>(size: usize, sign: i8, mode: Mode, dom: &ScalarDomain) -> Result<Matrix<T>> {
    if sign < 0 {
        let z = dom.root_of_unity(2 * mode.exponent() as u64, 1)?;
        Ok(Matrix::scalar(size, z))
    } else {
        Ok(Matrix::identity(size))
    }
}

fn pad_pair<T: Scalar>(
    pair: &CommPair<T>,
    size: usize,
    before: bool,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<CommPair<T>> {
    let join = |f: &Matrix<T>, sign: i8| -> Result<Matrix<T>> {
        let filler = pad(size, sign, mode, dom)?;
        Ok(if before {
            filler.direct_sum(f)
        } else {
            f.direct_sum(&filler)
        })
    };
    Ok(CommPair {
        p: join(&pair.p, pair.order_p.sign)?,
        q: join(&pair.q, pair.order_q.sign)?,
        order_p: pair.order_p,
        order_q: pair.order_q,
    })
}

/// Joint certificate for `V`: `M1` must have determinant 1 and no
/// eigenvalue 1.
pub fn factorize_vk<T: Scalar>(
    v: &VKElement<T>,
    mode: Mode,
    dom: &ScalarDomain,
    seed: u64,
) -> Result<VkFactorization<T>> {
    mode.validate()?;
    let dense = v.to_dense();
    let job = job_domain(&dense, mode, dom);
    let m1 = embed(&v.m1, &job)?;
    if !job.eq(&m1.det()?, &T::one()) {
        return Err(Error::NotUnimodular);
    }
    let local = VKElement {
        m1,
        m2: embed(&v.m2, &job)?,
        m3: BandUT::from_dense(&embed(&v.m3.to_dense(), &job)?, v.m3.m(), &job)?,
    };
    let y = vk_eliminate_corner(&local, &job)?;
    let (w, w_inv) = corner_conjugator(&y);
    let cert_a = factorize_sl(&local.m1, mode, &job, seed)?;
    let cert_t = factorize_ut(&local.m3, mode, &job)?;
    let (n, size) = (v.n(), v.window());
    let mut pairs = Vec::with_capacity(cert_a.len() + cert_t.len());
    for pair in &cert_a.pairs {
        pairs.push(pad_pair(pair, size, false, mode, &job)?.conjugated(&w, &w_inv)?);
    }
    for pair in &cert_t.pairs {
        pairs.push(pad_pair(pair, n, true, mode, &job)?.conjugated(&w, &w_inv)?);
    }
    let joint = Certificate::new(mode, Family::Vk, pairs, &dense);
    Ok(VkFactorization {
        cert_a,
        cert_t,
        conjugator: w,
        joint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify;
    use crate::scalar::Cyc;

    fn q(v: i64) -> Cyc {
        Cyc::from_i64(v)
    }

    fn sample(window: usize, m: usize) -> VKElement<Cyc> {
        let m1 = Matrix::from_rows(vec![vec![q(2), q(1)], vec![q(3), q(2)]]).unwrap();
        let mut m2 = Matrix::zeros(2, window);
        for j in 0..window {
            m2[(0, j)] = q(j as i64 - 2);
            m2[(1, j)] = q(1 - (j as i64 % 3));
        }
        let mut m3 = BandUT::identity(window, m).unwrap();
        for i in 0..window {
            for j in i + m..window {
                m3.set(i, j, q(((i * 3 + j) % 5) as i64 - 2)).unwrap();
            }
        }
        VKElement::new(m1, m2, m3).unwrap()
    }

    #[test]
    fn zero_corner_gives_zero_y() {
        let mut v = sample(5, 1);
        v.m2 = Matrix::zeros(2, 5);
        let y = vk_eliminate_corner(&v, &ScalarDomain::exact(1)).unwrap();
        assert_eq!(y, Matrix::zeros(2, 5));
    }

    #[test]
    fn corner_residual_is_zero() {
        let mut v = sample(6, 1);
        v.m1 = Matrix::from_diag(&[q(2), q(3)]);
        let y = vk_eliminate_corner(&v, &ScalarDomain::exact(1)).unwrap();
        let lhs =
            v.m1.matmul(&y)
                .unwrap()
                .sub(&y.matmul(&v.m3.to_dense()).unwrap())
                .unwrap()
                .add(&v.m2)
                .unwrap();
        assert_eq!(lhs, Matrix::zeros(2, 6));
        let (w, w_inv) = corner_conjugator(&y);
        let block = w_inv.matmul(&v.to_dense()).unwrap().matmul(&w).unwrap();
        assert_eq!(block.submatrix(0, 2, 2, 6), Matrix::zeros(2, 6));
    }

    #[test]
    fn eigenvalue_one_is_rejected() {
        let mut v = sample(4, 1);
        v.m1 = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(0), q(1)]]).unwrap();
        assert_eq!(
            vk_eliminate_corner(&v, &ScalarDomain::exact(1)),
            Err(Error::EigenvalueOne)
        );
    }

    #[test]
    fn joint_certificate_every_mode() {
        for m in [1, 2] {
            for mode in [
                Mode::Involution,
                Mode::SkewInvolution,
                Mode::OrderK(3),
                Mode::SkewOrder2k(2),
            ] {
                let v = sample(8, m);
                let dom = ScalarDomain::exact(1);
                let f = factorize_vk(&v, mode, &dom, 1).unwrap();
                let check = dom.with_conductor(mode.conductor() * 2);
                let r = verify(&v.to_dense(), &f.joint, &check);
                assert!(r.passed, "m={m} {mode}: {r:?}");
                assert!(f.joint.len() <= f.joint.bound);
                assert!(verify(&v.m1, &f.cert_a, &check).passed);
            }
        }
    }
}
