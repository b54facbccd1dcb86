//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! Elements are stored over the power basis `1, z, ..., z^(phi(N)-1)` reduced
//! modulo the cyclotomic polynomial `Phi_N`, with a single positive common
//! denominator. The reduced form is unique, so equality is structural once both
//! operands are expressed over the same conductor. Elements that happen to be
//! rational are always stored with conductor 1.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CycJson, Scalar, ScalarDomain, ScalarJson};
use crate::error::{Error, Result};

/// Precomputed data for one conductor.
#[derive(Debug)]
struct Cyclo {
    phi: usize,
    /// `Phi_N`, low degree first, monic.
    poly: Vec<i64>,
    /// `z^e mod Phi_N` for `e in 0..N`.
    powers: Vec<Vec<i64>>,
}

fn cache() -> &'static RwLock<HashMap<u64, Arc<Cyclo>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Cyclo>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cyclo(n: u64) -> Arc<Cyclo> {
    if let Some(c) = cache().read().expect("cyclotomic cache poisoned").get(&n) {
        return c.clone();
    }
    let built = Arc::new(build_cyclo(n));
    cache()
        .write()
        .expect("cyclotomic cache poisoned")
        .entry(n)
        .or_insert(built)
        .clone()
}

fn build_cyclo(n: u64) -> Cyclo {
    assert!(n >= 1, "conductor must be positive");
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let divisor = &cyclo(d).poly;
            poly = div_monic(&poly, divisor);
        }
    }
    let phi = poly.len() - 1;

    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    if phi > 0 {
        cur[0] = 1;
    }
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by z and reduce the overflowing top coefficient
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        for j in 0..phi {
            let shifted = if j == 0 { 0 } else { cur[j - 1] };
            next[j] = shifted - top * poly[j];
        }
        cur = next;
    }
    Cyclo { phi, poly, powers }
}

fn div_monic(p: &[i64], q: &[i64]) -> Vec<i64> {
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let mut rem = p.to_vec();
    let mut quot = vec![0i64; dp - dq + 1];
    for i in (0..=dp - dq).rev() {
        let c = rem[i + dq];
        quot[i] = c;
        for (j, qj) in q.iter().enumerate() {
            rem[i + j] -= c * qj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// Coefficients of `Phi_n`, lowest degree first.
pub fn cyclotomic_poly(n: u64) -> Vec<i64> {
    cyclo(n).poly.clone()
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// An element of `Q(zeta_N)`.
#[derive(Clone)]
pub struct Cyc {
    conductor: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyc {
    pub fn rational(r: &BigRational) -> Self {
        Cyc {
            conductor: 1,
            num: vec![r.numer().clone()],
            den: r.denom().clone(),
        }
        .normalized()
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Cyc {
            conductor: 1,
            num: vec![v],
            den: BigInt::one(),
        }
    }

    /// Builds `sum coeffs[j] z^j` in `Q(zeta_conductor)`. The coefficient list
    /// must have length `phi(conductor)`.
    pub fn from_coeffs(conductor: u64, coeffs: &[BigRational]) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::InvalidInput("conductor must be positive".into()));
        }
        let ctx = cyclo(conductor);
        if coeffs.len() != ctx.phi {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients for conductor {}, got {}",
                ctx.phi,
                conductor,
                coeffs.len()
            )));
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(Cyc {
            conductor,
            num,
            den,
        }
        .normalized())
    }

    /// `zeta_conductor^e`.
    pub fn zeta(conductor: u64, e: i64) -> Self {
        let ctx = cyclo(conductor);
        let idx = e.rem_euclid(conductor as i64) as usize;
        Cyc {
            conductor,
            num: ctx.powers[idx].iter().map(|&v| BigInt::from(v)).collect(),
            den: BigInt::one(),
        }
        .normalized()
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Coordinates over the reduced power basis of the stored conductor.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.conductor == 1 {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn normalized(mut self) -> Self {
        if self.den.is_negative() {
            self.den = -self.den;
            for c in self.num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            return Cyc::zero();
        }
        if !self.den.is_one() {
            let mut g = self.den.clone();
            for c in &self.num {
                if g.is_one() {
                    break;
                }
                if !c.is_zero() {
                    g = g.gcd(c);
                }
            }
            if !g.is_one() {
                self.den = &self.den / &g;
                for c in self.num.iter_mut() {
                    *c = &*c / &g;
                }
            }
        }
        if self.conductor != 1 && self.num[1..].iter().all(Zero::is_zero) {
            self.conductor = 1;
            self.num.truncate(1);
        }
        self
    }

    /// Same value expressed over conductor `target` (a multiple of the current one).
    fn embed_into(&self, target: u64) -> Result<Cyc> {
        if target == 0 || !target.is_multiple_of(self.conductor) {
            return Err(Error::NotDivisible {
                from: self.conductor,
                to: target,
            });
        }
        if target == self.conductor {
            return Ok(self.clone());
        }
        Ok(self.raw_embed(target).normalized())
    }

    /// Embedding without normalization (rational inputs stay sparse).
    fn raw_embed(&self, target: u64) -> Cyc {
        let ctx = cyclo(target);
        let mut num = vec![BigInt::zero(); ctx.phi];
        if self.conductor == 1 {
            num[0] = self.num[0].clone();
        } else {
            let step = target / self.conductor;
            for (j, c) in self.num.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = ((j as u64 * step) % target) as usize;
                for (slot, &p) in num.iter_mut().zip(&ctx.powers[e]) {
                    if p != 0 {
                        *slot += c * p;
                    }
                }
            }
        }
        Cyc {
            conductor: target,
            num,
            den: self.den.clone(),
        }
    }

    fn common(a: &Cyc, b: &Cyc) -> u64 {
        if a.conductor == b.conductor {
            a.conductor
        } else {
            a.conductor.lcm(&b.conductor)
        }
    }

    fn add_impl(a: &Cyc, b: &Cyc, negate_b: bool) -> Cyc {
        let n = Cyc::common(a, b);
        let a2;
        let b2;
        let (a, b) = (
            if a.conductor == n {
                a
            } else {
                a2 = a.raw_embed(n);
                &a2
            },
            if b.conductor == n {
                b
            } else {
                b2 = b.raw_embed(n);
                &b2
            },
        );
        let (num, den) = if a.den == b.den {
            let num = a
                .num
                .iter()
                .zip(&b.num)
                .map(|(x, y)| if negate_b { x - y } else { x + y })
                .collect();
            (num, a.den.clone())
        } else {
            let num = a
                .num
                .iter()
                .zip(&b.num)
                .map(|(x, y)| {
                    let l = x * &b.den;
                    let r = y * &a.den;
                    if negate_b {
                        l - r
                    } else {
                        l + r
                    }
                })
                .collect();
            (num, &a.den * &b.den)
        };
        Cyc {
            conductor: n,
            num,
            den,
        }
        .normalized()
    }

    fn mul_impl(a: &Cyc, b: &Cyc) -> Cyc {
        if a.is_zero() || b.is_zero() {
            return Cyc::zero();
        }
        if a.conductor == 1 || b.conductor == 1 {
            let (r, v) = if a.conductor == 1 { (a, b) } else { (b, a) };
            let s = &r.num[0];
            return Cyc {
                conductor: v.conductor,
                num: v.num.iter().map(|c| c * s).collect(),
                den: &v.den * &r.den,
            }
            .normalized();
        }
        let n = Cyc::common(a, b);
        let a2;
        let b2;
        let a = if a.conductor == n {
            a
        } else {
            a2 = a.raw_embed(n);
            &a2
        };
        let b = if b.conductor == n {
            b
        } else {
            b2 = b.raw_embed(n);
            &b2
        };
        let ctx = cyclo(n);
        let phi = ctx.phi;
        let mut conv = vec![BigInt::zero(); 2 * phi - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    conv[i + j] += x * y;
                }
            }
        }
        let mut num: Vec<BigInt> = conv[..phi].to_vec();
        for (e, c) in conv.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            let reduced = &ctx.powers[e % n as usize];
            for (slot, &p) in num.iter_mut().zip(reduced) {
                if p != 0 {
                    *slot += c * p;
                }
            }
        }
        Cyc {
            conductor: n,
            num,
            den: &a.den * &b.den,
        }
        .normalized()
    }

    fn inverse(&self) -> Result<Cyc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.conductor == 1 {
            return Ok(Cyc {
                conductor: 1,
                num: vec![self.den.clone()],
                den: self.num[0].clone(),
            }
            .normalized());
        }
        // Solve (multiplication-by-p matrix) y = e_0 over Q, p = numerator polynomial.
        let ctx = cyclo(self.conductor);
        let phi = ctx.phi;
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(phi);
        let mut cur = self.num.clone();
        for _ in 0..phi {
            cols.push(cur.clone());
            let top = cur[phi - 1].clone();
            let mut next = vec![BigInt::zero(); phi];
            for j in 0..phi {
                let shifted = if j == 0 {
                    BigInt::zero()
                } else {
                    cur[j - 1].clone()
                };
                next[j] = shifted - &top * ctx.poly[j];
            }
            cur = next;
        }
        let mut m: Vec<Vec<BigRational>> = (0..phi)
            .map(|r| {
                let mut row: Vec<BigRational> = (0..phi)
                    .map(|c| BigRational::from_integer(cols[c][r].clone()))
                    .collect();
                row.push(if r == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        for col in 0..phi {
            let pivot = (col..phi)
                .find(|&r| !m[r][col].is_zero())
                .ok_or(Error::DivisionByZero)?;
            m.swap(col, pivot);
            let pv = m[col][col].clone();
            for x in m[col].iter_mut() {
                *x = &*x / &pv;
            }
            let pivot_row = m[col].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= &f * p;
                    }
                }
            }
        }
        let y: Vec<BigRational> = m
            .iter()
            .map(|row| &row[phi] * BigRational::from_integer(self.den.clone()))
            .collect();
        Cyc::from_coeffs(self.conductor, &y)
    }
}

impl Zero for Cyc {
    fn zero() -> Self {
        Cyc {
            conductor: 1,
            num: vec![BigInt::zero()],
            den: BigInt::one(),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }
}

impl One for Cyc {
    fn one() -> Self {
        Cyc {
            conductor: 1,
            num: vec![BigInt::one()],
            den: BigInt::one(),
        }
    }

    fn is_one(&self) -> bool {
        self.conductor == 1 && self.num[0].is_one() && self.den.is_one()
    }
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.den == other.den && self.num == other.num;
        }
        // rational values always carry conductor 1, so a mismatch there is final
        if self.conductor == 1 || other.conductor == 1 {
            return false;
        }
        let n = Cyc::common(self, other);
        let a = self.raw_embed(n).normalized();
        let b = other.raw_embed(n).normalized();
        a.den == b.den && a.num == b.num
    }
}

impl Eq for Cyc {}

impl<'a> Add<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn add(self, rhs: &'a Cyc) -> Cyc {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        Cyc::add_impl(self, rhs, false)
    }
}

impl<'a> Sub<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn sub(self, rhs: &'a Cyc) -> Cyc {
        if rhs.is_zero() {
            return self.clone();
        }
        Cyc::add_impl(self, rhs, true)
    }
}

impl<'a> Mul<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn mul(self, rhs: &'a Cyc) -> Cyc {
        Cyc::mul_impl(self, rhs)
    }
}

impl Add for Cyc {
    type Output = Cyc;
    fn add(self, rhs: Cyc) -> Cyc {
        &self + &rhs
    }
}

impl Sub for Cyc {
    type Output = Cyc;
    fn sub(self, rhs: Cyc) -> Cyc {
        &self - &rhs
    }
}

impl Mul for Cyc {
    type Output = Cyc;
    fn mul(self, rhs: Cyc) -> Cyc {
        &self * &rhs
    }
}

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(mut self) -> Cyc {
        for c in self.num.iter_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coef = BigRational::new(c.clone(), self.den.clone());
            terms.push(match j {
                0 => format!("{coef}"),
                1 => format!("({coef})*z{}", self.conductor),
                _ => format!("({coef})*z{}^{j}", self.conductor),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Scalar for Cyc {
    fn is_exact() -> bool {
        true
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Cyc {
            conductor: 1,
            num: vec![BigInt::from(num)],
            den: BigInt::from(den),
        }
        .normalized()
    }

    fn inv(&self) -> Result<Self> {
        self.inverse()
    }

    fn root_of_unity(domain: &ScalarDomain, order: u64, power: i64) -> Result<Self> {
        match domain {
            ScalarDomain::Exact { conductor } => {
                if order == 0 || conductor % order != 0 {
                    return Err(Error::ConductorTooSmall {
                        order,
                        conductor: *conductor,
                    });
                }
                let e = power.rem_euclid(order as i64) * (*conductor / order) as i64;
                Ok(Cyc::zeta(*conductor, e))
            }
            ScalarDomain::Float { .. } => Err(Error::MixedDomain),
        }
    }

    fn near_eq(&self, other: &Self, _eps: f64) -> bool {
        self == other
    }

    fn modulus(&self) -> f64 {
        self.to_complex().norm()
    }

    fn to_complex(&self) -> Complex64 {
        let den = self.den.to_f64().unwrap_or(f64::NAN);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = 2.0 * PI * j as f64 / self.conductor as f64;
            acc += Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN) / den, angle);
        }
        acc
    }

    fn to_json(&self) -> ScalarJson {
        ScalarJson::Cyc {
            cyc: CycJson {
                conductor: self.conductor,
                num: self.num.iter().map(|c| c.to_string()).collect(),
                den: self.den.to_string(),
            },
        }
    }

    fn from_json(v: &ScalarJson) -> Result<Self> {
        match v {
            ScalarJson::Cyc { cyc } => {
                let parse = |s: &str| {
                    s.parse::<BigInt>()
                        .map_err(|_| Error::InvalidInput(format!("bad integer {s:?}")))
                };
                let den = parse(&cyc.den)?;
                if den.is_zero() {
                    return Err(Error::InvalidInput("zero denominator".into()));
                }
                if cyc.conductor == 0 {
                    return Err(Error::InvalidInput("conductor must be positive".into()));
                }
                let phi = cyclo(cyc.conductor).phi;
                if cyc.num.len() != phi {
                    return Err(Error::InvalidInput(format!(
                        "conductor {} needs {} coefficients, got {}",
                        cyc.conductor,
                        phi,
                        cyc.num.len()
                    )));
                }
                let num = cyc
                    .num
                    .iter()
                    .map(|s| parse(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Cyc {
                    conductor: cyc.conductor,
                    num,
                    den,
                }
                .normalized())
            }
            ScalarJson::Float { .. } => Err(Error::MixedDomain),
        }
    }

    fn conductor(&self) -> u64 {
        self.conductor
    }

    fn embed(&self, target: u64) -> Result<Self> {
        self.embed_into(target)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
}
