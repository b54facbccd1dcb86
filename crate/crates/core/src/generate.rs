//! Seeded random instances: banded unitriangular, special linear and
//! Vershik-Kerov matrices.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::json::MatrixJson;
use crate::matrix::{BandUT, Matrix};
use crate::scalar::{Cyc, Scalar, ScalarDomain};
use crate::vk::VKElement;

/// Instance kinds understood by [`generate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Band,
    Sl,
    Vk,
}

impl Kind {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "band" => Ok(Kind::Band),
            "sl" => Ok(Kind::Sl),
            "vk" => Ok(Kind::Vk),
            other => Err(Error::InvalidInput(format!("unknown kind `{other}`"))),
        }
    }
}

/// Nonzero rational `p / q` with `|p| <= 5`, `1 <= q <= 4`.
pub fn small_rational<T: Scalar>(rng: &mut impl Rng) -> T {
    let mut p = 0;
    while p == 0 {
        p = rng.gen_range(-5..=5);
    }
    T::from_ratio(p, rng.gen_range(1..=4))
}

/// A small rational, plus `c zeta_N^e` for a random integer `c` when a
/// conductor `N` is given.
pub fn random_entry<T: Scalar>(rng: &mut impl Rng, conductor: Option<u64>) -> Result<T> {
    let mut v: T = small_rational(rng);
    if let Some(n) = conductor.filter(|&n| n > 1) {
        let z: T = ScalarDomain::exact(n).root_of_unity(n, rng.gen_range(0..n as i64))?;
        let c = T::from_i64(rng.gen_range(-2..=2));
        v = v.add_ref(&c.mul_ref(&z));
    }
    Ok(v)
}

/// Element of `UT_n(m, R)`; each position `j - i >= m` is filled with
/// probability `density`.
pub fn random_band_ut<T: Scalar>(
    n: usize,
    m: usize,
    density: f64,
    conductor: Option<u64>,
    rng: &mut impl Rng,
) -> Result<BandUT<T>> {
    let mut a = BandUT::identity(n, m)?;
    for i in 0..n {
        for j in i + m..n {
            if rng.gen_bool(density) {
                a.set(i, j, random_entry(rng, conductor)?)?;
            }
        }
    }
    Ok(a)
}

/// Product of random elementary matrices and a determinant-one diagonal.
/// The number of elementary factors grows with `density`. Never scalar for
/// `n >= 2`.
pub fn random_sl<T: Scalar>(
    n: usize,
    density: f64,
    conductor: Option<u64>,
    rng: &mut impl Rng,
) -> Result<Matrix<T>> {
    let dom = ScalarDomain::exact(1);
    let steps = ((density * (n * n) as f64).round() as usize).max(n);
    loop {
        let mut a = Matrix::<T>::identity(n);
        for _ in 0..steps {
            if n < 2 {
                break;
            }
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let t: T = random_entry(rng, conductor)?;
            a.axpy_row(i, j, &-t);
        }
        let mut diag: Vec<T> = (0..n.saturating_sub(1))
            .map(|_| small_rational(rng))
            .collect();
        let prod = diag.iter().fold(T::one(), |acc, d| acc.mul_ref(d));
        diag.push(prod.inv()?);
        let a = Matrix::from_diag(&diag).matmul(&a)?;
        if n < 2 || a.as_scalar(&dom).is_none() {
            return Ok(a);
        }
    }
}

/// Entries uniform in the square `[-1, 1] + [-1, 1] i`, rescaled by a root
/// of the determinant so that `det = 1`.
pub fn random_sl_complex(n: usize, rng: &mut impl Rng) -> Result<Matrix<Complex64>> {
    loop {
        let mut a = Matrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let det = a.det()?;
        if det.norm() < 1e-3 {
            continue;
        }
        let a = a.scale(&det.powf(-1.0 / n as f64));
        if n < 2 || a.as_scalar(&ScalarDomain::float(1e-9)).is_none() {
            return Ok(a);
        }
    }
}

/// Vershik-Kerov element with `det(M1) = 1` and no eigenvalue 1 in `M1`.
pub fn random_vk<T: Scalar>(
    n: usize,
    window: usize,
    m: usize,
    density: f64,
    conductor: Option<u64>,
    rng: &mut impl Rng,
) -> Result<VKElement<T>> {
    let m1 = loop {
        let cand: Matrix<T> = random_sl(n, density.max(0.5), conductor, rng)?;
        let shifted = cand.sub(&Matrix::identity(n))?;
        if !shifted.det()?.is_zero() {
            break cand;
        }
    };
    let mut m2 = Matrix::zeros(n, window);
    for i in 0..n {
        for j in 0..window {
            if rng.gen_bool(density) {
                m2[(i, j)] = random_entry(rng, conductor)?;
            }
        }
    }
    let m3 = random_band_ut(window, m, density, conductor, rng)?;
    VKElement::new(m1, m2, m3)
}

/// Parameters of one generated instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub kind: Kind,
    pub n: usize,
    pub m: usize,
    pub window: usize,
    pub density: f64,
    pub conductor: Option<u64>,
    /// Emit float entries. Special linear instances then come from
    /// [`random_sl_complex`].
    pub float: bool,
}

fn floated(j: &MatrixJson) -> Result<MatrixJson> {
    let dom = ScalarDomain::float(crate::scalar::DEFAULT_EPS);
    Ok(match j {
        MatrixJson::BandUt { .. } => MatrixJson::band_ut(&j.to_band_ut::<Complex64>(&dom)?),
        MatrixJson::Vk { .. } => {
            let (a, b, t) = j.vk_blocks::<Complex64>(&dom)?;
            MatrixJson::vk(&a, &b, &t)
        }
        _ => MatrixJson::dense(&j.to_dense::<Complex64>(&dom)?),
    })
}

/// Instance as a JSON document.
pub fn generate(spec: &GenSpec, rng: &mut impl Rng) -> Result<MatrixJson> {
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(Error::InvalidInput("density must lie in [0, 1]".into()));
    }
    if spec.n == 0 || spec.m == 0 {
        return Err(Error::InvalidInput("n and m must be positive".into()));
    }
    if spec.float {
        return match spec.kind {
            Kind::Sl => Ok(MatrixJson::dense(&random_sl_complex(spec.n, rng)?)),
            _ => floated(&generate(
                &GenSpec {
                    float: false,
                    ..*spec
                },
                rng,
            )?),
        };
    }
    Ok(match spec.kind {
        Kind::Band => MatrixJson::band_ut(&random_band_ut::<Cyc>(
            spec.n,
            spec.m,
            spec.density,
            spec.conductor,
            rng,
        )?),
        Kind::Sl => MatrixJson::dense(&random_sl::<Cyc>(
            spec.n,
            spec.density,
            spec.conductor,
            rng,
        )?),
        Kind::Vk => {
            let v = random_vk::<Cyc>(
                spec.n,
                spec.window,
                spec.m,
                spec.density,
                spec.conductor,
                rng,
            )?;
            MatrixJson::vk(&v.m1, &v.m2, &v.m3)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(kind: Kind) -> GenSpec {
        GenSpec {
            kind,
            n: 5,
            m: 2,
            window: 6,
            density: 0.7,
            conductor: Some(12),
            float: false,
        }
    }

    #[test]
    fn same_seed_same_json() {
        for kind in [Kind::Band, Kind::Sl, Kind::Vk] {
            let a = generate(&spec(kind), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
            let b = generate(&spec(kind), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }
    }

    #[test]
    fn band_is_in_the_group() {
        let dom = ScalarDomain::exact(12);
        let j = generate(&spec(Kind::Band), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let a = j.to_dense::<Cyc>(&dom).unwrap();
        assert!(BandUT::from_dense(&a, 2, &dom).is_ok());
    }

    #[test]
    fn sl_has_determinant_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..6 {
            let a: Matrix<Cyc> = random_sl(n, 0.5, Some(12), &mut rng).unwrap();
            assert_eq!(a.det().unwrap(), Cyc::from_i64(1));
        }
    }

    #[test]
    fn vk_avoids_eigenvalue_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: VKElement<Cyc> = random_vk(2, 8, 1, 0.5, None, &mut rng).unwrap();
        let shifted = v.m1.sub(&Matrix::identity(2)).unwrap();
        assert_ne!(shifted.det().unwrap(), Cyc::from_i64(0));
        assert_eq!(v.m1.det().unwrap(), Cyc::from_i64(1));
    }

    #[test]
    fn float_sl_has_determinant_one() {
        let mut s = spec(Kind::Sl);
        s.float = true;
        let j = generate(&s, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert!(j.has_float());
        let a = j.to_dense::<Complex64>(&ScalarDomain::float(1e-9)).unwrap();
        assert!((a.det().unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bad_density_is_rejected() {
        let mut s = spec(Kind::Band);
        s.density = 1.5;
        assert!(generate(&s, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
