//! Scalar domains.
//!
//! Every algorithm in this crate is written against the [`Scalar`] trait and
//! runs unchanged over exact cyclotomic numbers ([`Cyc`]) and floating complex
//! numbers ([`num_complex::Complex`]). A [`ScalarDomain`] travels alongside the
//! values: it fixes the ambient conductor for exact jobs (so roots of unity can
//! be produced) or the comparison tolerance for float jobs.

mod complex;
mod cyclotomic;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use cyclotomic::{cyclotomic_poly, euler_phi, Cyc};

/// Default relative tolerance for float comparisons.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Where the scalars of one job live.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarDomain {
    /// `Q(zeta_N)` with the given conductor `N`.
    Exact { conductor: u64 },
    /// Floating complex numbers compared with relative tolerance `eps`.
    Float { eps: f64 },
}

impl ScalarDomain {
    pub fn exact(conductor: u64) -> Self {
        ScalarDomain::Exact {
            conductor: conductor.max(1),
        }
    }

    pub fn float(eps: f64) -> Self {
        ScalarDomain::Float { eps }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ScalarDomain::Exact { .. })
    }

    pub fn eps(&self) -> f64 {
        match self {
            ScalarDomain::Exact { .. } => 0.0,
            ScalarDomain::Float { eps } => *eps,
        }
    }

    /// Same domain with the conductor enlarged to a multiple of `n`.
    /// Float domains are returned unchanged.
    pub fn with_conductor(&self, n: u64) -> Self {
        match self {
            ScalarDomain::Exact { conductor } => ScalarDomain::Exact {
                conductor: num_integer::lcm(*conductor, n.max(1)),
            },
            other => *other,
        }
    }

    /// Domain equality: exact in exact mode, relative tolerance in float mode.
    pub fn eq<T: Scalar>(&self, a: &T, b: &T) -> bool {
        match self {
            ScalarDomain::Exact { .. } => a == b,
            ScalarDomain::Float { eps } => a.near_eq(b, *eps),
        }
    }

    pub fn is_zero<T: Scalar>(&self, a: &T) -> bool {
        self.eq(a, &T::zero())
    }

    pub fn root_of_unity<T: Scalar>(&self, order: u64, power: i64) -> Result<T> {
        T::root_of_unity(self, order, power)
    }

    pub fn imag_unit<T: Scalar>(&self) -> Result<T> {
        T::root_of_unity(self, 4, 1)
    }
}

/// Wire form of a scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Cyc { cyc: CycJson },
    Float { re: f64, im: f64 },
}

/// Exact scalar over the reduced power basis of `Q(zeta_N)`, all coefficients
/// sharing one denominator. Integers are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycJson {
    pub conductor: u64,
    pub num: Vec<String>,
    pub den: String,
}

/// The ring the factorizations are carried out in.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether equality in this type is decidable and exact.
    fn is_exact() -> bool;

    /// `num / den` (`den != 0`).
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn inv(&self) -> Result<Self>;

    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.inv()?))
    }

    /// `zeta_order^power` inside `domain`.
    fn root_of_unity(domain: &ScalarDomain, order: u64, power: i64) -> Result<Self>;

    /// `|x - y| <= eps * max(1, |x|, |y|)`; exact types ignore `eps`.
    fn near_eq(&self, other: &Self, eps: f64) -> bool;

    /// Absolute value as a float, for pivoting and residual norms.
    fn modulus(&self) -> f64;

    fn to_complex(&self) -> Complex64;

    fn to_json(&self) -> ScalarJson;

    fn from_json(v: &ScalarJson) -> Result<Self>;

    /// Conductor of the smallest field the representation claims; 1 for floats.
    fn conductor(&self) -> u64 {
        1
    }

    /// Re-express inside `Q(zeta_target)`. Identity for floats.
    fn embed(&self, _target: u64) -> Result<Self> {
        Ok(self.clone())
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Integer power, negative exponents through the inverse.
    fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }
}
