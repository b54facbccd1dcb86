//! Commutator factorization of banded unitriangular matrices.
//!
//! A matrix `I + J` with `J` carried by the `m`-th superdiagonal is
//! conjugate to `sigma (B C)^K` for an explicit generator pair `(B, C)`, and
//! `sigma (B C)^K` is a product of `K - 1` commutators of factors of order
//! `K`. A general element of `UT_n(m, R)` splits as `A1 A2` where `A1` is of
//! that shape and `A2` is conjugate to the all-ones band `I + sum E_{i,i+m}`.

use crate::certificate::{Certificate, CommPair, Family};
use crate::coherent::CoherentPoly;
use crate::error::{Error, Result};
use crate::matrix::{Band, BandUT, DiagonalSeq, GenUT, Matrix, OrderSpec};
use crate::mode::Mode;
use crate::scalar::{Scalar, ScalarDomain};

/// Lcm of the conductors of `values`, folded into `dom`.
pub(crate) fn absorb<'a, T: Scalar>(
    dom: &ScalarDomain,
    values: impl IntoIterator<Item = &'a T>,
) -> ScalarDomain {
    values
        .into_iter()
        .fold(*dom, |d, v| d.with_conductor(v.conductor()))
}

/// Domain for a job in `mode` over the entries of `a`.
pub(crate) fn job_domain<T: Scalar>(a: &Matrix<T>, mode: Mode, dom: &ScalarDomain) -> ScalarDomain {
    absorb(&dom.with_conductor(mode.conductor()), a.entries())
}

/// Re-expresses every entry inside the domain's field.
pub(crate) fn embed<T: Scalar>(a: &Matrix<T>, dom: &ScalarDomain) -> Result<Matrix<T>> {
    match dom {
        ScalarDomain::Exact { conductor } => a.try_map(|x| x.embed(*conductor)),
        ScalarDomain::Float { .. } => Ok(a.clone()),
    }
}

/// `A = A1 A2` with `A1 = I + sum (a_{i,i+m} - 1) E_{i,i+m}`; `A2` has an
/// all-ones `m`-th superdiagonal.
pub fn split<T: Scalar>(a: &BandUT<T>, dom: &ScalarDomain) -> Result<(BandUT<T>, BandUT<T>)> {
    let (n, m) = (a.n(), a.m());
    let band = a.band();
    let shifted: Vec<T> = band.values().iter().map(|v| v.sub_ref(&T::one())).collect();
    let a1 = BandUT::from_band(&Band::new(n, m, shifted)?);
    let a2 = a1.to_dense().inverse()?.matmul(&a.to_dense())?;
    Ok((a1, BandUT::from_dense(&a2, m, dom)?))
}

/// Per-mode data of the generator pair. Rows in even blocks of length `m`
/// (0-based) are "even".
struct GenParams<T> {
    b_diag: [T; 2],
    b_coef: T,
    c_diag: [T; 2],
    c_coef: T,
    /// `J_m(B C) = gamma J`.
    gamma: T,
}

fn gen_params<T: Scalar>(mode: Mode, dom: &ScalarDomain) -> Result<GenParams<T>> {
    let one = T::one;
    Ok(match mode {
        Mode::Involution => {
            let half = T::from_ratio(1, 2);
            GenParams {
                b_diag: [one(), -one()],
                b_coef: half.clone(),
                c_diag: [one(), -one()],
                c_coef: half.clone(),
                gamma: half,
            }
        }
        Mode::SkewInvolution => {
            let i: T = dom.imag_unit()?;
            let half = T::from_ratio(1, 2);
            let b_coef = -(i.mul_ref(&half));
            GenParams {
                b_diag: [-i.clone(), i],
                b_coef: b_coef.clone(),
                c_diag: [one(), -one()],
                c_coef: half,
                gamma: b_coef,
            }
        }
        Mode::OrderK(k) => {
            let w: T = dom.root_of_unity(k as u64, 1)?;
            let w_inv: T = dom.root_of_unity(k as u64, -1)?;
            let c = T::from_ratio(1, k as i64);
            GenParams {
                b_diag: [one(), w],
                b_coef: c.clone(),
                c_diag: [one(), w_inv],
                c_coef: c.clone(),
                gamma: c,
            }
        }
        Mode::SkewOrder2k(k) => {
            let w: T = dom.root_of_unity(k as u64, 1)?;
            let w_inv: T = dom.root_of_unity(k as u64, -1)?;
            let beta: T = dom.root_of_unity(4 * k as u64, 1)?;
            let c = T::from_ratio(1, 2 * k as i64);
            let b_coef = beta.mul_ref(&c);
            GenParams {
                b_diag: [beta.clone(), beta.mul_ref(&w)],
                b_coef: b_coef.clone(),
                c_diag: [one(), w_inv],
                c_coef: c,
                gamma: b_coef,
            }
        }
    })
}

/// `gamma` with `J_m(B C) = gamma J` for the generators of `mode`.
pub fn gamma<T: Scalar>(mode: Mode, dom: &ScalarDomain) -> Result<T> {
    Ok(gen_params::<T>(mode, dom)?.gamma)
}

fn is_odd_block(i: usize, m: usize) -> bool {
    (i / m) % 2 == 1
}

/// The generator pair `(B, C)` for the band `J`: `B` carries `J` on odd
/// blocks, `C` on even blocks, and `sigma (B C)^K` has `J` as its `m`-th
/// superdiagonal.
pub fn build_generators<T: Scalar>(
    band: &Band<T>,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<(GenUT<T>, GenUT<T>)> {
    mode.validate()?;
    let p = gen_params::<T>(mode, dom)?;
    let (n, m) = (band.n(), band.m());
    let parity = |i: usize| usize::from(is_odd_block(i, m));
    let mut b_up = BandUT::identity(n, m)?;
    let mut c_up = BandUT::identity(n, m)?;
    for (i, a) in band.values().iter().enumerate() {
        if is_odd_block(i, m) {
            b_up.set(i, i + m, a.mul_ref(&p.b_coef))?;
        } else {
            c_up.set(i, i + m, a.mul_ref(&p.c_coef))?;
        }
    }
    let b_diag = (0..n).map(|i| p.b_diag[parity(i)].clone()).collect();
    let c_diag = (0..n).map(|i| p.c_diag[parity(i)].clone()).collect();
    Ok((GenUT::new(b_diag, b_up)?, GenUT::new(c_diag, c_up)?))
}

/// `B` and `C` as coherent polynomials over `J`.
fn generator_polys<T: Scalar>(
    band: &Band<T>,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<(CoherentPoly<T>, CoherentPoly<T>)> {
    let p = gen_params::<T>(mode, dom)?;
    let (n, m) = (band.n(), band.m());
    let pick = |odd_coef: bool, diag: &[T; 2], coef: &T| {
        let d0 = (0..n)
            .map(|i| diag[usize::from(is_odd_block(i, m))].clone())
            .collect();
        let d1 = (0..n)
            .map(|i| {
                if is_odd_block(i, m) == odd_coef {
                    coef.clone()
                } else {
                    T::zero()
                }
            })
            .collect();
        CoherentPoly::new(band.clone(), vec![DiagonalSeq(d0), DiagonalSeq(d1)])
    };
    Ok((
        pick(true, &p.b_diag, &p.b_coef)?,
        pick(false, &p.c_diag, &p.c_coef)?,
    ))
}

/// `sigma (B C)^K` as a coherent polynomial over `J`.
pub fn target_poly<T: Scalar>(
    band: &Band<T>,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<CoherentPoly<T>> {
    let (b, c) = generator_polys(band, mode, dom)?;
    let bc = b.mul(&c)?;
    Ok(bc
        .power(mode.exponent())?
        .scale(&T::from_i64(mode.sign() as i64)))
}

/// `X` with `T X = X A`, `X = sum X_k J^k`, `X_0 = I` and the first `m`
/// entries of every `X_k` zero.
pub fn conjugator_coherent<T: Scalar>(
    t: &CoherentPoly<T>,
    a: &CoherentPoly<T>,
    dom: &ScalarDomain,
) -> Result<Matrix<T>> {
    if t.band() != a.band() {
        return Err(Error::JMismatch);
    }
    if !t.is_normalized(dom) || !a.is_normalized(dom) {
        return Err(Error::NotNormalized);
    }
    let band = t.band();
    let (n, m) = (band.n(), band.m());
    let kmax = band.max_power();
    let d = |k: usize| t.coefficient(k);
    let dp = |k: usize| a.coefficient(k);
    let mut xs: Vec<DiagonalSeq<T>> = vec![DiagonalSeq::identity(n)];
    for k in 1..=kmax {
        let mut r = DiagonalSeq::zeros(n);
        for (i, x) in xs.iter().enumerate().take(k) {
            r = r.add(&x.hadamard(&dp(k + 1 - i).shift(i * m)));
        }
        for i in 2..=k + 1 {
            r = r.sub(&d(i).hadamard(&xs[k + 1 - i].shift(i * m)));
        }
        let mut x = vec![T::zero(); n];
        for j in 0..n.saturating_sub(m) {
            x[j + m] = x[j].add_ref(&r.0[j]);
        }
        xs.push(DiagonalSeq(x));
    }
    Ok(CoherentPoly::new(band.clone(), xs)?.evaluate())
}

/// For `A` with an all-ones `m`-th superdiagonal: `X` with
/// `A X = X Jpat`, `Jpat = I + sum E_{i,i+m}`. The last `m` columns of `X`
/// are free and are taken from the identity.
pub fn conjugator_allones<T: Scalar>(
    a: &BandUT<T>,
    dom: &ScalarDomain,
) -> Result<(Matrix<T>, BandUT<T>)> {
    let (n, m) = (a.n(), a.m());
    let one = T::one();
    for i in 0..n.saturating_sub(m) {
        if !dom.eq(&a.get(i, i + m), &one) {
            return Err(Error::PreconditionViolated(format!(
                "entry ({}, {}) of the band is not 1",
                i + 1,
                i + m + 1
            )));
        }
    }
    let jpat = BandUT::from_band(&Band::new(n, m, vec![one; n.saturating_sub(m)])?);
    let dense = a.to_dense();
    let mut x = Matrix::<T>::identity(n);
    for j in (0..n.saturating_sub(m)).rev() {
        let jm = j + m;
        for i in 0..j {
            let mut v = x[(i + m, jm)].add_ref(&dense[(i, jm)]);
            for l in i + m + 1..jm {
                let a_il = &dense[(i, l)];
                if a_il.is_zero() {
                    continue;
                }
                v = v.add_ref(&a_il.mul_ref(&x[(l, jm)]));
            }
            x[(i, j)] = v;
        }
    }
    Ok((x, jpat))
}

/// Pairs `(C^{j-1} B^j C^{1-j}, C)`, `j = 1..K-1`, whose commutators
/// multiply to `sigma (B C)^K` when `B^K = sigma I` and `C^K = I`.
pub fn commutator_expansion<T: Scalar>(
    b: &Matrix<T>,
    c: &Matrix<T>,
    exponent: u32,
    sigma: i8,
    dom: &ScalarDomain,
) -> Result<Vec<CommPair<T>>> {
    let spec_b = OrderSpec::new(exponent, sigma);
    let spec_c = OrderSpec::new(exponent, 1);
    if !b.is_order(spec_b, dom) {
        return Err(Error::OrderViolated(format!("B^{exponent} != {sigma} I")));
    }
    if !c.is_order(spec_c, dom) {
        return Err(Error::OrderViolated(format!("C^{exponent} != I")));
    }
    let c_inv = c.inverse()?;
    let mut pairs = Vec::with_capacity(exponent.saturating_sub(1) as usize);
    let mut bj = Matrix::identity(b.rows());
    let mut cj = Matrix::identity(b.rows());
    let mut cj_inv = Matrix::identity(b.rows());
    for j in 1..exponent {
        bj = bj.matmul(b)?;
        let sign = if j % 2 == 1 { sigma } else { 1 };
        pairs.push(CommPair {
            p: cj.conjugate_with(&cj_inv, &bj)?,
            q: c.clone(),
            order_p: OrderSpec::new(exponent, sign),
            order_q: spec_c,
        });
        cj = cj.matmul(c)?;
        cj_inv = cj_inv.matmul(&c_inv)?;
    }
    Ok(pairs)
}

/// Certificate for `M = I + J` with `J` on the `m`-th superdiagonal only.
pub fn factor_band<T: Scalar>(
    mat: &BandUT<T>,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<Certificate<T>> {
    mode.validate()?;
    if !mat.is_band_only() {
        return Err(Error::PreconditionViolated(
            "entries beyond the m-th superdiagonal".into(),
        ));
    }
    let target = mat.to_dense();
    let dom = job_domain(&target, mode, dom);
    let mut cert = factor_band_in(&embed(&target, &dom)?, mat.m(), mode, &dom)?;
    cert.target_digest = crate::certificate::digest_matrix(&target);
    Ok(cert)
}

/// `factor_band` for a dense `I + J` already embedded in `dom`.
fn factor_band_in<T: Scalar>(
    target: &Matrix<T>,
    m: usize,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<Certificate<T>> {
    let band = Band::extract(target, m);
    let (b, c) = build_generators(&band, mode, dom)?;
    let pairs = commutator_expansion(
        &b.to_dense(),
        &c.to_dense(),
        mode.exponent(),
        mode.sign(),
        dom,
    )?;
    let t = target_poly(&band, mode, dom)?;
    let x = conjugator_coherent(&t, &CoherentPoly::unit_plus_band(band), dom)?;
    // T X = X M, so M = X^{-1} T X.
    let x_inv = x.inverse()?;
    Certificate::new(mode, Family::Ut, pairs, target).conjugated_with(&x_inv, &x)
}

/// Certificate for any `A` in `UT_n(m, R)`: `2 (K - 1)` commutators.
pub fn factorize_ut<T: Scalar>(
    a: &BandUT<T>,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<Certificate<T>> {
    mode.validate()?;
    let dense = a.to_dense();
    let job = job_domain(&dense, mode, dom);
    let embedded = BandUT::from_dense(&embed(&dense, &job)?, a.m(), &job)?;
    let mut cert = factorize_ut_in(&embedded, mode, &job)?;
    cert.target_digest = crate::certificate::digest_matrix(&dense);
    Ok(cert)
}

/// Diagonal `d` with `d_{i+m} = d_i a_{i,i+m}` along each residue class mod
/// `m`, carried over unchanged across zero entries. `D A D^{-1}` then has
/// every nonzero entry of its `m`-th superdiagonal equal to 1.
pub fn balancing_diagonal<T: Scalar>(a: &BandUT<T>, dom: &ScalarDomain) -> Vec<T> {
    let (n, m) = (a.n(), a.m());
    let mut d = vec![T::one(); n];
    for i in 0..n.saturating_sub(m) {
        let v = a.get(i, i + m);
        d[i + m] = if dom.is_zero(&v) {
            d[i].clone()
        } else {
            d[i].mul_ref(&v)
        };
    }
    d
}

pub(crate) fn factorize_ut_in<T: Scalar>(
    a: &BandUT<T>,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<Certificate<T>> {
    let target = a.to_dense();
    if dom.is_exact() {
        return factorize_unbalanced(a, mode, dom, &target);
    }
    // In floating point the superdiagonal is scaled to 1 first: the split
    // below then leaves `A1 = I` and the conjugators stay moderate.
    let d = balancing_diagonal(a, dom);
    let d_inv = d.iter().map(|x| x.inv()).collect::<Result<Vec<_>>>()?;
    let (dm, dm_inv) = (Matrix::from_diag(&d), Matrix::from_diag(&d_inv));
    let scaled = dm.matmul(&target)?.matmul(&dm_inv)?;
    let balanced = BandUT::from_dense(&scaled, a.m(), dom)?;
    let cert = factorize_unbalanced(&balanced, mode, dom, &scaled)?;
    Certificate::new(mode, Family::Ut, cert.pairs, &target).conjugated_with(&dm_inv, &dm)
}

fn factorize_unbalanced<T: Scalar>(
    a: &BandUT<T>,
    mode: Mode,
    dom: &ScalarDomain,
    target: &Matrix<T>,
) -> Result<Certificate<T>> {
    let m = a.m();
    let (a1, a2) = split(a, dom)?;
    let a1 = a1.to_dense();
    let mut pairs = if a1.is_identity(dom) {
        Vec::new()
    } else {
        factor_band_in(&a1, m, mode, dom)?.pairs
    };
    let (x, jpat) = conjugator_allones(&a2, dom)?;
    pairs.extend(
        factor_band_in(&jpat.to_dense(), m, mode, dom)?
            .conjugated(&x)?
            .pairs,
    );
    Ok(Certificate::new(mode, Family::Ut, pairs, target))
}
