use std::fmt::Debug;

use num_complex::{Complex, Complex64};
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive, Zero};

use super::{Scalar, ScalarDomain, ScalarJson};
use crate::error::{Error, Result};

impl<F> Scalar for Complex<F>
where
    F: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static,
{
    fn is_exact() -> bool {
        false
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let n = F::from_i64(num).expect("integer fits the float type");
        let d = F::from_i64(den).expect("integer fits the float type");
        Complex::new(n / d, F::zero())
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Complex::new(F::one(), F::zero()) / *self)
    }

    fn root_of_unity(domain: &ScalarDomain, order: u64, power: i64) -> Result<Self> {
        match domain {
            ScalarDomain::Float { .. } => {
                if order == 0 {
                    return Err(Error::ConductorTooSmall {
                        order,
                        conductor: 0,
                    });
                }
                let e = power.rem_euclid(order as i64);
                // hit the obvious points exactly so that i*i == -1 bit for bit
                let (re, im) = match (4 * e) as u64 {
                    0 => (1.0, 0.0),
                    x if x == order => (0.0, 1.0),
                    x if x == 2 * order => (-1.0, 0.0),
                    x if x == 3 * order => (0.0, -1.0),
                    _ => {
                        let angle = 2.0 * std::f64::consts::PI * e as f64 / order as f64;
                        (angle.cos(), angle.sin())
                    }
                };
                Ok(Complex::new(
                    F::from_f64(re).expect("finite"),
                    F::from_f64(im).expect("finite"),
                ))
            }
            ScalarDomain::Exact { .. } => Err(Error::MixedDomain),
        }
    }

    fn near_eq(&self, other: &Self, eps: f64) -> bool {
        let a = self.modulus();
        let b = other.modulus();
        let diff = (*self - *other).to_complex().norm();
        diff <= eps * 1f64.max(a).max(b)
    }

    fn modulus(&self) -> f64 {
        self.to_complex().norm()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn to_json(&self) -> ScalarJson {
        let c = self.to_complex();
        ScalarJson::Float { re: c.re, im: c.im }
    }

    fn from_json(v: &ScalarJson) -> Result<Self> {
        let c = match v {
            ScalarJson::Float { re, im } => Complex64::new(*re, *im),
            ScalarJson::Cyc { .. } => {
                let exact = super::Cyc::from_json(v)?;
                exact.to_complex()
            }
        };
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::InvalidInput("non-finite float entry".into()));
        }
        Ok(Complex::new(
            F::from_f64(c.re).expect("finite"),
            F::from_f64(c.im).expect("finite"),
        ))
    }

    fn mul_ref(&self, other: &Self) -> Self {
        *self * *other
    }

    fn add_ref(&self, other: &Self) -> Self {
        *self + *other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        *self - *other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_roots() {
        let dom = ScalarDomain::float(1e-9);
        let i: Complex64 = dom.root_of_unity(4, 1).unwrap();
        assert_eq!(i * i, Complex64::new(-1.0, 0.0));
        let z: Complex64 = dom.root_of_unity(7, 3).unwrap();
        assert!(z.pow(7).near_eq(&Complex64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn relative_tolerance() {
        let a = Complex64::new(1e6, 0.0);
        let b = Complex64::new(1e6 + 1e-4, 0.0);
        assert!(a.near_eq(&b, 1e-9));
        let c = Complex64::new(1e-3, 0.0);
        assert!(!c.near_eq(&Complex64::new(0.0, 0.0), 1e-9));
    }

    #[test]
    fn f32_is_a_scalar_too() {
        let x = Complex::<f32>::from_ratio(1, 4);
        assert!((Scalar::inv(&x).unwrap().re - 4.0).abs() < 1e-6);
    }
}
