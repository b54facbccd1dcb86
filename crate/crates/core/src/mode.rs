use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::OrderSpec;

/// The kind of factors a factorization is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Commutators of involutions (`X^2 = I`).
    Involution,
    /// Commutators of a skew-involution (`X^2 = -I`) and an involution.
    SkewInvolution,
    /// Commutators of order-`k` matrices, `k >= 3`.
    OrderK(u32),
    /// Commutators of skew order-`2k` matrices (`X^{2k} = -I`), `k >= 2`.
    SkewOrder2k(u32),
}

impl Mode {
    /// Checked constructor from the wire name and `k`.
    pub fn from_name(name: &str, k: u32) -> Result<Self> {
        let mode = match name {
            "involution" | "inv" => Mode::Involution,
            "skew_involution" | "skewinv" => Mode::SkewInvolution,
            "order_k" | "order-k" => Mode::OrderK(k),
            "skew_order_2k" | "skew-2k" => Mode::SkewOrder2k(k),
            other => return Err(Error::InvalidInput(format!("unknown mode `{other}`"))),
        };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Mode::OrderK(k) if k < 3 => Err(Error::InvalidInput(format!(
                "order-k mode needs k >= 3, got {k}"
            ))),
            Mode::SkewOrder2k(k) if k < 2 => Err(Error::InvalidInput(format!(
                "skew order-2k mode needs k >= 2, got {k}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Involution => "involution",
            Mode::SkewInvolution => "skew_involution",
            Mode::OrderK(_) => "order_k",
            Mode::SkewOrder2k(_) => "skew_order_2k",
        }
    }

    /// The `k` parameter; 2 for the involution modes.
    pub fn k(&self) -> u32 {
        match *self {
            Mode::Involution | Mode::SkewInvolution => 2,
            Mode::OrderK(k) | Mode::SkewOrder2k(k) => k,
        }
    }

    /// Exponent `K` with `X^K = +-I` for every factor.
    pub fn exponent(&self) -> u32 {
        match *self {
            Mode::Involution | Mode::SkewInvolution => 2,
            Mode::OrderK(k) => k,
            Mode::SkewOrder2k(k) => 2 * k,
        }
    }

    pub fn is_skew(&self) -> bool {
        matches!(self, Mode::SkewInvolution | Mode::SkewOrder2k(_))
    }

    /// `sigma`: the sign of `B^K`.
    pub fn sign(&self) -> i8 {
        if self.is_skew() {
            -1
        } else {
            1
        }
    }

    /// Bound on the number of commutators for a unitriangular matrix:
    /// 2, 2, `4k - 6`, `8k - 6`.
    pub fn ut_bound(&self) -> usize {
        match *self {
            Mode::Involution | Mode::SkewInvolution => 2,
            Mode::OrderK(k) => (4 * k as usize).saturating_sub(6),
            Mode::SkewOrder2k(k) => (8 * k as usize).saturating_sub(6),
        }
    }

    /// Conductor that holds every root of unity the constructions need.
    pub fn conductor(&self) -> u64 {
        match *self {
            Mode::Involution => 1,
            Mode::SkewInvolution => 4,
            Mode::OrderK(k) => k as u64,
            Mode::SkewOrder2k(k) => 4 * k as u64,
        }
    }

    /// Orders of `B` and `C` in the generator pair.
    pub fn generator_orders(&self) -> (OrderSpec, OrderSpec) {
        let e = self.exponent();
        (OrderSpec::new(e, self.sign()), OrderSpec::new(e, 1))
    }

    /// Whether a factor of order `spec` is admissible in this mode.
    pub fn allows(&self, spec: OrderSpec) -> bool {
        spec.k == self.exponent() && (spec.sign == 1 || (spec.sign == -1 && self.is_skew()))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Involution | Mode::SkewInvolution => write!(f, "{}", self.name()),
            _ => write!(f, "{}(k={})", self.name(), self.k()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_and_exponents() {
        assert_eq!(Mode::Involution.ut_bound(), 2);
        assert_eq!(Mode::OrderK(3).ut_bound(), 6);
        assert_eq!(Mode::SkewOrder2k(3).ut_bound(), 18);
        assert_eq!(Mode::SkewOrder2k(3).exponent(), 6);
        assert_eq!(Mode::SkewInvolution.sign(), -1);
    }

    #[test]
    fn names_round_trip() {
        for m in [
            Mode::Involution,
            Mode::SkewInvolution,
            Mode::OrderK(5),
            Mode::SkewOrder2k(2),
        ] {
            assert_eq!(Mode::from_name(m.name(), m.k()).unwrap(), m);
        }
        assert!(Mode::from_name("order-k", 2).is_err());
        assert!(Mode::from_name("skew-2k", 1).is_err());
    }

    #[test]
    fn allowed_orders() {
        assert!(Mode::Involution.allows(OrderSpec::new(2, 1)));
        assert!(!Mode::Involution.allows(OrderSpec::new(2, -1)));
        assert!(Mode::SkewOrder2k(3).allows(OrderSpec::new(6, -1)));
        assert!(!Mode::SkewOrder2k(3).allows(OrderSpec::new(3, 1)));
    }
}
