//! Commutator factorization in `SL_n`.
//!
//! Scalar matrices `alpha I` are split as `F G` with `F`, `G` diagonal and
//! made of blocks `diag(x, 1/x)`; each such block is `sigma (B C)^K` for a
//! `2 x 2` pair built from [`two_by_two_factors`]. Nonscalar matrices are
//! brought by a similarity to a matrix with all leading principal minors 1,
//! which factors as `L U` with both factors unipotent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::{verify, Certificate, CommPair, Family};
use crate::error::{Error, Result};
use crate::matrix::{BandUT, Matrix};
use crate::mode::Mode;
use crate::scalar::{Scalar, ScalarDomain};
use crate::ut::{commutator_expansion, embed, factorize_ut_in, job_domain};

/// Default number of random restarts in [`sourour_similarity`].
pub const DEFAULT_RETRIES: usize = 32;

/// `(J1, J2)` with `J1 J2 = diag(a, 1/a)`. For `order <= 2` both are
/// involutions (`y = 1`); otherwise both have order `order`, built from
/// `t = theta + 1/theta` with `theta = zeta_order`.
pub fn two_by_two_factors<T: Scalar>(
    a: &T,
    order: u32,
    dom: &ScalarDomain,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let one = T::one();
    if dom.is_zero(a) || dom.eq(a, &one) || dom.eq(a, &-one.clone()) {
        return Err(Error::DegenerateParameter(
            "a must avoid 0, 1 and -1".into(),
        ));
    }
    let a_inv = a.inv()?;
    if order <= 2 {
        let j1 = Matrix::from_rows(vec![vec![T::zero(), a.clone()], vec![a_inv, T::zero()]])?;
        let j2 = Matrix::from_rows(vec![vec![T::zero(), one.clone()], vec![one, T::zero()]])?;
        return Ok((j1, j2));
    }
    let theta: T = dom.root_of_unity(order as u64, 1)?;
    let t = theta.add_ref(&theta.inv()?);
    let s = a.add_ref(&one).inv()?;
    let q = t.mul_ref(&s);
    let p = a.mul_ref(&q);
    let pq = p.mul_ref(&q);
    let j1 = Matrix::from_rows(vec![
        vec![p.clone(), a.sub_ref(&p.mul_ref(&p))],
        vec![-a_inv, q.clone()],
    ])?;
    let j2 = Matrix::from_rows(vec![vec![p, pq.sub_ref(&one)], vec![one, q]])?;
    Ok((j1, j2))
}

/// Order of the `2 x 2` base pair and the scalar `beta` put on `J1` in skew
/// modes (`beta^K = -1`).
fn block_data<T: Scalar>(mode: Mode, dom: &ScalarDomain) -> Result<(u32, T)> {
    Ok(match mode {
        Mode::Involution => (2, T::one()),
        Mode::SkewInvolution => (2, dom.imag_unit()?),
        Mode::OrderK(k) => (k, T::one()),
        Mode::SkewOrder2k(k) => (k, dom.root_of_unity(4 * k as u64, 1)?),
    })
}

/// One piece of a diagonal display: `diag(alpha^e, alpha^{-e})` or a lone 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagPiece {
    Pair(i64),
    One,
}

/// `alpha I_n = F G` with both factors built from pieces: for even `n`,
/// `F = diag(alpha, alpha^{-1}, alpha^3, .., alpha^{n-1}, alpha^{1-n})` and
/// `G = diag(1, alpha^2, alpha^{-2}, .., alpha^{2-n}, 1)`; for odd `n` the
/// trailing 1 moves from `G` to `F`.
pub fn diag_display(n: usize) -> (Vec<DiagPiece>, Vec<DiagPiece>) {
    let mut f = Vec::new();
    let mut g = vec![DiagPiece::One];
    let mut e = 1i64;
    let mut covered = 0;
    while covered + 2 <= n {
        f.push(DiagPiece::Pair(e));
        covered += 2;
        e += 2;
    }
    if n % 2 == 1 {
        f.push(DiagPiece::One);
    }
    let mut e = 2i64;
    let mut covered = 1;
    while covered + 2 <= n {
        g.push(DiagPiece::Pair(e));
        covered += 2;
        e += 2;
    }
    if n.is_multiple_of(2) && n > 0 {
        g.push(DiagPiece::One);
    }
    (f, g)
}

fn expand_pieces<T: Scalar>(pieces: &[DiagPiece], alpha: &T) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for p in pieces {
        match *p {
            DiagPiece::Pair(e) => {
                out.push(alpha.powi(e)?);
                out.push(alpha.powi(-e)?);
            }
            DiagPiece::One => out.push(T::one()),
        }
    }
    Ok(out)
}

/// Diagonal `F`, `G` with `F G = alpha I_n`. Needs `alpha^n = 1`.
pub fn scalar_diag_pair<T: Scalar>(
    alpha: &T,
    n: usize,
    dom: &ScalarDomain,
) -> Result<(Matrix<T>, Matrix<T>)> {
    if !dom.eq(&alpha.pow(n as u64), &T::one()) {
        return Err(Error::NotUnimodular);
    }
    let (f, g) = diag_display(n);
    Ok((
        Matrix::from_diag(&expand_pieces(&f, alpha)?),
        Matrix::from_diag(&expand_pieces(&g, alpha)?),
    ))
}

/// `(d, e)` with `alpha = zeta_d^e` and `d` the order of `alpha`, a divisor of `n`.
fn root_data<T: Scalar>(alpha: &T, n: usize, dom: &ScalarDomain) -> Result<(u64, i64)> {
    let one = T::one();
    for d in 1..=n as u64 {
        if !(n as u64).is_multiple_of(d) || !dom.eq(&alpha.pow(d), &one) {
            continue;
        }
        let probe = dom.with_conductor(d);
        for e in 0..d as i64 {
            let z: T = probe.root_of_unity(d, e)?;
            if dom.eq(&z, alpha) {
                return Ok((d, e));
            }
        }
    }
    Err(Error::NotUnimodular)
}

/// Generator blocks for one display: `sigma (B C)^K` equals the display.
fn display_generators<T: Scalar>(
    pieces: &[DiagPiece],
    d: u64,
    e: i64,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let big_k = mode.exponent() as u64;
    let (base_order, beta) = block_data::<T>(mode, dom)?;
    let mut b = Matrix::zeros(0, 0);
    let mut c = Matrix::zeros(0, 0);
    for p in pieces {
        let r = match *p {
            DiagPiece::Pair(j) => (e * j).rem_euclid(d as i64),
            DiagPiece::One => 0,
        };
        let (pb, pc) = if r == 0 {
            let size = if matches!(p, DiagPiece::Pair(_)) {
                2
            } else {
                1
            };
            (Matrix::scalar(size, beta.clone()), Matrix::identity(size))
        } else {
            let a: T = dom.root_of_unity(d * big_k, r)?;
            let (j1, j2) = two_by_two_factors(&a, base_order, dom)?;
            (j1.scale(&beta), j2)
        };
        b = b.direct_sum(&pb);
        c = c.direct_sum(&pc);
    }
    Ok((b, c))
}

/// Certificate for `alpha I_n`, `alpha^n = 1`: `2 (K - 1)` commutators, none
/// when `alpha = 1`.
pub fn scalar_factorize<T: Scalar>(
    alpha: &T,
    n: usize,
    mode: Mode,
    dom: &ScalarDomain,
) -> Result<Certificate<T>> {
    mode.validate()?;
    let target = Matrix::scalar(n, alpha.clone());
    if !dom.eq(&alpha.pow(n as u64), &T::one()) {
        return Err(Error::NotUnimodular);
    }
    if dom.eq(alpha, &T::one()) {
        return Ok(Certificate::new(mode, Family::Sl, Vec::new(), &target));
    }
    let base = job_domain(&Matrix::scalar(1, alpha.clone()), mode, dom);
    let (d, e) = root_data(alpha, n, &base)?;
    let job = base.with_conductor(d * mode.exponent() as u64);
    let (f, g) = diag_display(d as usize);
    let copies = n / d as usize;
    let mut pairs = Vec::new();
    for display in [f, g] {
        let mut pieces = Vec::new();
        for _ in 0..copies {
            pieces.extend_from_slice(&display);
        }
        let (b, c) = display_generators::<T>(&pieces, d, e, mode, &job)?;
        pairs.extend(commutator_expansion(
            &b,
            &c,
            mode.exponent(),
            mode.sign(),
            &job,
        )?);
    }
    Ok(Certificate::new(mode, Family::Sl, pairs, &target))
}

/// `A = P L U P^{-1}` with `L` lower and `U` upper unitriangular.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityLU<T> {
    pub p: Matrix<T>,
    pub p_inv: Matrix<T>,
    pub l: Matrix<T>,
    pub u: Matrix<T>,
}

impl<T: Scalar> SimilarityLU<T> {
    pub fn reconstruct(&self) -> Result<Matrix<T>> {
        self.p.matmul(&self.l)?.matmul(&self.u)?.matmul(&self.p_inv)
    }
}

/// Replaces column (`by_column`) or row `r` of the leading `i x i` block of
/// `m` by the corresponding part of column or row `i`, and returns the
/// determinant.
fn replaced_minor<T: Scalar>(m: &Matrix<T>, i: usize, r: usize, by_column: bool) -> Result<T> {
    let mut block = m.window(i);
    for s in 0..i {
        if by_column {
            block[(s, r)] = m[(s, i)].clone();
        } else {
            block[(r, s)] = m[(i, s)].clone();
        }
    }
    block.det()
}

/// `E = I + t e_{row, col}` and its inverse.
fn elementary<T: Scalar>(n: usize, row: usize, col: usize, t: &T) -> (Matrix<T>, Matrix<T>) {
    let mut e = Matrix::identity(n);
    let mut e_inv = Matrix::identity(n);
    e[(row, col)] = t.clone();
    e_inv[(row, col)] = -t.clone();
    (e, e_inv)
}

/// Random `L_r U_r` with small integer entries, and its inverse.
fn random_unipotent<T: Scalar>(n: usize, rng: &mut impl Rng) -> Result<(Matrix<T>, Matrix<T>)> {
    let mut l = Matrix::identity(n);
    let mut u = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = T::from_i64(rng.gen_range(-2..=2));
            match i.cmp(&j) {
                std::cmp::Ordering::Greater => l[(i, j)] = v,
                std::cmp::Ordering::Less => u[(i, j)] = v,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    let r = l.matmul(&u)?;
    let r_inv = u.inverse()?.matmul(&l.inverse()?)?;
    Ok((r, r_inv))
}

/// Unipotent Doolittle factorization `m = L U`, assuming every leading
/// principal minor of `m` is 1. `diag(U)` is set to 1.
fn doolittle<T: Scalar>(m: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    let n = m.rows();
    let mut l = Matrix::<T>::identity(n);
    let mut u = Matrix::<T>::identity(n);
    for i in 0..n {
        for j in i..n {
            let mut s = m[(i, j)].clone();
            for k in 0..i {
                s = s.sub_ref(&l[(i, k)].mul_ref(&u[(k, j)]));
            }
            if j > i {
                u[(i, j)] = s;
            } else {
                u[(i, i)] = T::one();
            }
        }
        for j in i + 1..n {
            let mut s = m[(j, i)].clone();
            for k in 0..i {
                s = s.sub_ref(&l[(j, k)].mul_ref(&u[(k, i)]));
            }
            l[(j, i)] = s;
        }
    }
    Ok((l, u))
}

/// Similarity bringing every leading principal minor to 1, then `L U`.
///
/// Sweeps `i = n-1 .. 1`: conjugating by `I + t e_{i,r}` (`r < i`, 0-based)
/// changes `Delta_i` by `t` times the minor with column `r` replaced by
/// column `i`; `I + t e_{r,i}` subtracts `t` times the minor with row `r`
/// replaced by row `i`. Larger minors are untouched. When every coefficient
/// vanishes a random unipotent similarity is applied and the sweep restarts.
pub fn sourour_similarity<T: Scalar>(
    a: &Matrix<T>,
    dom: &ScalarDomain,
    rng: &mut impl Rng,
    retries: usize,
) -> Result<SimilarityLU<T>> {
    if !a.is_square() {
        return Err(Error::Dimension("matrix must be square".into()));
    }
    if a.as_scalar(dom).is_some() {
        return Err(Error::ScalarInput);
    }
    if !dom.eq(&a.det()?, &T::one()) {
        return Err(Error::NotUnimodular);
    }
    let n = a.rows();
    let one = T::one();
    let mut m = a.clone();
    let mut p = Matrix::identity(n);
    let mut p_inv = Matrix::identity(n);
    let mut restarts = 0;
    'sweep: loop {
        for i in (1..n).rev() {
            let delta = m.leading_minor(i)?;
            if dom.eq(&delta, &one) {
                continue;
            }
            let mut best: Option<(f64, usize, bool, T)> = None;
            for by_column in [true, false] {
                for r in 0..i {
                    let c = replaced_minor(&m, i, r, by_column)?;
                    if dom.is_zero(&c) {
                        continue;
                    }
                    let size = c.modulus();
                    if best.as_ref().is_none_or(|b| size > b.0) {
                        best = Some((size, r, by_column, c));
                    }
                }
                if best.is_some() {
                    break;
                }
            }
            let Some((_, r, by_column, coef)) = best else {
                if restarts == retries {
                    return Err(Error::RetriesExhausted(retries));
                }
                restarts += 1;
                let (r, r_inv) = random_unipotent::<T>(n, rng)?;
                m = r_inv.matmul(&m)?.matmul(&r)?;
                p = p.matmul(&r)?;
                p_inv = r_inv.matmul(&p_inv)?;
                continue 'sweep;
            };
            let gap = one.sub_ref(&delta);
            let (e, e_inv) = if by_column {
                elementary(n, i, r, &gap.div(&coef)?)
            } else {
                elementary(n, r, i, &-gap.div(&coef)?)
            };
            m = e_inv.matmul(&m)?.matmul(&e)?;
            p = p.matmul(&e)?;
            p_inv = e_inv.matmul(&p_inv)?;
        }
        break;
    }
    let (l, u) = doolittle(&m)?;
    Ok(SimilarityLU { p, p_inv, l, u })
}

/// Attempts made by [`factorize_sl`] in floating point.
pub const FLOAT_ATTEMPTS: usize = 16;

/// `H = I - 2 v v^T / (v^T v)` for a random nonzero integer vector `v`:
/// orthogonal, symmetric and its own inverse.
fn householder<T: Scalar>(n: usize, rng: &mut impl Rng) -> Matrix<T> {
    let mut v: Vec<i64> = vec![0; n];
    while v.iter().all(|&x| x == 0) {
        v = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    }
    let norm: i64 = v.iter().map(|x| x * x).sum();
    let mut h = Matrix::<T>::identity(n);
    for i in 0..n {
        for j in 0..n {
            let e = h[(i, j)].sub_ref(&T::from_ratio(2 * v[i] * v[j], norm));
            h[(i, j)] = e;
        }
    }
    h
}

/// One run of the construction on `H A H` (`H = I` when `pre` is `None`).
fn sl_attempt<T: Scalar>(
    a: &Matrix<T>,
    pre: Option<&Matrix<T>>,
    mode: Mode,
    dom: &ScalarDomain,
    rng: &mut impl Rng,
) -> Result<Certificate<T>> {
    let sim = match pre {
        None => sourour_similarity(a, dom, rng, DEFAULT_RETRIES)?,
        Some(h) => {
            let s = sourour_similarity(&h.matmul(a)?.matmul(h)?, dom, rng, DEFAULT_RETRIES)?;
            SimilarityLU {
                p: h.matmul(&s.p)?,
                p_inv: s.p_inv.matmul(h)?,
                ..s
            }
        }
    };
    let lower = BandUT::from_dense(&sim.l.flip(), 1, dom)?;
    let upper = BandUT::from_dense(&sim.u, 1, dom)?;
    let mut pairs: Vec<CommPair<T>> = factorize_ut_in(&lower, mode, dom)?
        .pairs
        .into_iter()
        .map(|pr| CommPair {
            p: pr.p.flip(),
            q: pr.q.flip(),
            ..pr
        })
        .collect();
    pairs.extend(factorize_ut_in(&upper, mode, dom)?.pairs);
    let mut cert =
        Certificate::new(mode, Family::Sl, pairs, a).conjugated_with(&sim.p, &sim.p_inv)?;
    cert.similarity = Some(sim.p);
    Ok(cert)
}

fn largest_factor<T: Scalar>(cert: &Certificate<T>) -> f64 {
    cert.pairs
        .iter()
        .map(|p| p.p.norm().max(p.q.norm()))
        .fold(0.0, f64::max)
}

/// Certificate for `A` in `SL_n`. Scalar inputs go through
/// [`scalar_factorize`]; otherwise `A = P L U P^{-1}` and `L`, `U` are
/// factored as unitriangular matrices (`L` after flipping).
///
/// In floating point the factors can be large enough for rounding to spoil
/// their orders, depending on the similarity found. Each certificate is
/// therefore checked, and on failure the construction is rerun on `H A H`
/// for a random reflection `H`, up to [`FLOAT_ATTEMPTS`] times. If no attempt
/// verifies, the one with the smallest factors is returned.
pub fn factorize_sl<T: Scalar>(
    a: &Matrix<T>,
    mode: Mode,
    dom: &ScalarDomain,
    seed: u64,
) -> Result<Certificate<T>> {
    mode.validate()?;
    if !a.is_square() {
        return Err(Error::Dimension("matrix must be square".into()));
    }
    if !dom.eq(&a.det()?, &T::one()) {
        return Err(Error::NotUnimodular);
    }
    if let Some(alpha) = a.as_scalar(dom) {
        return scalar_factorize(&alpha, a.rows(), mode, dom);
    }
    let job = job_domain(a, mode, dom);
    let embedded = embed(a, &job)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if job.is_exact() {
        return sl_attempt(&embedded, None, mode, &job, &mut rng);
    }
    let mut best: Option<(f64, Certificate<T>)> = None;
    let mut last_err = None;
    for attempt in 0..FLOAT_ATTEMPTS {
        let h = (attempt > 0).then(|| householder::<T>(a.rows(), &mut rng));
        let cert = match sl_attempt(&embedded, h.as_ref(), mode, &job, &mut rng) {
            Ok(c) => c,
            Err(e @ Error::RetriesExhausted(_)) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        if verify(a, &cert, &job).passed {
            return Ok(cert);
        }
        let size = largest_factor(&cert);
        if best.as_ref().is_none_or(|(s, _)| size < *s) {
            best = Some((size, cert));
        }
    }
    match (best, last_err) {
        (Some((_, cert)), _) => Ok(cert),
        (None, Some(e)) => Err(e),
        (None, None) => Err(Error::RetriesExhausted(DEFAULT_RETRIES)),
    }
}
