//! JSON wire format for matrices. Indices are 1-based.
//!
//! ```json
//! {"kind":"band_ut","n":8,"m":2,"entries":[{"i":1,"j":3,"v":{"re":2.0,"im":0.0}}]}
//! {"kind":"dense","n":2,"rows":[[...],[...]]}
//! {"kind":"gen_ut","n":3,"m":1,"diag":[...],"entries":[...]}
//! {"kind":"vk","n":2,"N":8,"m":1,"M1":{...dense...},"M2":[[...]],"M3":{...band_ut...}}
//! ```

use serde::{Deserialize, Serialize};

use super::{BandUT, GenUT, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarDomain, ScalarJson};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub i: usize,
    pub j: usize,
    pub v: ScalarJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixJson {
    BandUt {
        n: usize,
        m: usize,
        entries: Vec<EntryJson>,
    },
    Dense {
        n: usize,
        rows: Vec<Vec<ScalarJson>>,
    },
    GenUt {
        n: usize,
        m: usize,
        diag: Vec<ScalarJson>,
        entries: Vec<EntryJson>,
    },
    Vk {
        n: usize,
        #[serde(rename = "N")]
        window: usize,
        m: usize,
        #[serde(rename = "M1")]
        m1: Box<MatrixJson>,
        #[serde(rename = "M2")]
        m2: Vec<Vec<ScalarJson>>,
        #[serde(rename = "M3")]
        m3: Box<MatrixJson>,
    },
}

fn scalar<T: Scalar>(v: &ScalarJson) -> Result<T> {
    T::from_json(v)
}

fn entries_json<T: Scalar>(b: &BandUT<T>) -> Vec<EntryJson> {
    b.entries()
        .map(|(&(i, j), v)| EntryJson {
            i: i + 1,
            j: j + 1,
            v: v.to_json(),
        })
        .collect()
}

fn rows_json<T: Scalar>(a: &Matrix<T>) -> Vec<Vec<ScalarJson>> {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(Scalar::to_json).collect())
        .collect()
}

fn parse_rows<T: Scalar>(rows: &[Vec<ScalarJson>], cols: usize) -> Result<Matrix<T>> {
    let parsed = rows
        .iter()
        .map(|r| {
            if r.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "row of length {} where {cols} was expected",
                    r.len()
                )));
            }
            r.iter().map(scalar).collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if parsed.is_empty() {
        return Ok(Matrix::zeros(0, cols));
    }
    Matrix::from_rows(parsed)
}

fn fill_entries<T: Scalar>(out: &mut BandUT<T>, entries: &[EntryJson]) -> Result<()> {
    for e in entries {
        if e.i == 0 || e.j == 0 {
            return Err(Error::InvalidInput("indices are 1-based".into()));
        }
        out.set(e.i - 1, e.j - 1, scalar(&e.v)?)?;
    }
    Ok(())
}

impl MatrixJson {
    pub fn dense<T: Scalar>(a: &Matrix<T>) -> Self {
        MatrixJson::Dense {
            n: a.rows(),
            rows: rows_json(a),
        }
    }

    pub fn band_ut<T: Scalar>(a: &BandUT<T>) -> Self {
        MatrixJson::BandUt {
            n: a.n(),
            m: a.m(),
            entries: entries_json(a),
        }
    }

    pub fn gen_ut<T: Scalar>(a: &GenUT<T>) -> Self {
        MatrixJson::GenUt {
            n: a.n(),
            m: a.m(),
            diag: a.diag().iter().map(Scalar::to_json).collect(),
            entries: entries_json(a.upper()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MatrixJson::BandUt { .. } => "band_ut",
            MatrixJson::Dense { .. } => "dense",
            MatrixJson::GenUt { .. } => "gen_ut",
            MatrixJson::Vk { .. } => "vk",
        }
    }

    /// Largest conductor among the exact entries; 1 when there are none.
    pub fn conductor(&self) -> u64 {
        fn lcm_all<'a>(it: impl Iterator<Item = &'a ScalarJson>) -> u64 {
            it.fold(1u64, |acc, v| match v {
                ScalarJson::Cyc { cyc } => num_integer::lcm(acc, cyc.conductor.max(1)),
                ScalarJson::Float { .. } => acc,
            })
        }
        match self {
            MatrixJson::BandUt { entries, .. } => lcm_all(entries.iter().map(|e| &e.v)),
            MatrixJson::Dense { rows, .. } => lcm_all(rows.iter().flatten()),
            MatrixJson::GenUt { diag, entries, .. } => {
                num_integer::lcm(lcm_all(diag.iter()), lcm_all(entries.iter().map(|e| &e.v)))
            }
            MatrixJson::Vk { m1, m2, m3, .. } => {
                let c = num_integer::lcm(m1.conductor(), m3.conductor());
                num_integer::lcm(c, lcm_all(m2.iter().flatten()))
            }
        }
    }

    /// True when any entry is written as a float.
    pub fn has_float(&self) -> bool {
        fn any<'a>(mut it: impl Iterator<Item = &'a ScalarJson>) -> bool {
            it.any(|v| matches!(v, ScalarJson::Float { .. }))
        }
        match self {
            MatrixJson::BandUt { entries, .. } => any(entries.iter().map(|e| &e.v)),
            MatrixJson::Dense { rows, .. } => any(rows.iter().flatten()),
            MatrixJson::GenUt { diag, entries, .. } => {
                any(diag.iter()) || any(entries.iter().map(|e| &e.v))
            }
            MatrixJson::Vk { m1, m2, m3, .. } => {
                m1.has_float() || m3.has_float() || any(m2.iter().flatten())
            }
        }
    }

    pub fn to_band_ut<T: Scalar>(&self, dom: &ScalarDomain) -> Result<BandUT<T>> {
        match self {
            MatrixJson::BandUt { n, m, entries } => {
                let mut out = BandUT::identity(*n, *m)?;
                fill_entries(&mut out, entries)?;
                Ok(out)
            }
            MatrixJson::Dense { .. } => BandUT::from_dense(&self.to_dense(dom)?, 1, dom),
            other => Err(Error::InvalidInput(format!(
                "expected a band_ut matrix, found {}",
                other.kind()
            ))),
        }
    }

    pub fn to_gen_ut<T: Scalar>(&self, dom: &ScalarDomain) -> Result<GenUT<T>> {
        match self {
            MatrixJson::GenUt {
                n,
                m,
                diag,
                entries,
            } => {
                if diag.len() != *n {
                    return Err(Error::InvalidInput("diag length differs from n".into()));
                }
                let mut upper = BandUT::identity(*n, *m)?;
                fill_entries(&mut upper, entries)?;
                GenUT::new(diag.iter().map(scalar).collect::<Result<_>>()?, upper)
            }
            MatrixJson::BandUt { .. } => {
                let upper = self.to_band_ut(dom)?;
                GenUT::new(vec![T::one(); upper.n()], upper)
            }
            other => Err(Error::InvalidInput(format!(
                "expected a gen_ut matrix, found {}",
                other.kind()
            ))),
        }
    }

    /// The represented square matrix. A `vk` record becomes its full
    /// `(n + N) x (n + N)` block matrix.
    pub fn to_dense<T: Scalar>(&self, dom: &ScalarDomain) -> Result<Matrix<T>> {
        match self {
            MatrixJson::Dense { n, rows } => {
                if rows.len() != *n {
                    return Err(Error::InvalidInput(format!(
                        "{} rows where n = {n}",
                        rows.len()
                    )));
                }
                parse_rows(rows, *n)
            }
            MatrixJson::BandUt { .. } => Ok(self.to_band_ut::<T>(dom)?.to_dense()),
            MatrixJson::GenUt { .. } => Ok(self.to_gen_ut::<T>(dom)?.to_dense()),
            MatrixJson::Vk { .. } => {
                let (m1, m2, m3) = self.vk_blocks::<T>(dom)?;
                let (n, w) = (m1.rows(), m3.n());
                let mut out = Matrix::zeros(n + w, n + w);
                out.set_block(0, 0, &m1);
                out.set_block(0, n, &m2);
                out.set_block(n, n, &m3.to_dense());
                Ok(out)
            }
        }
    }

    /// `(M1, M2, M3)` of a `vk` record.
    pub fn vk_blocks<T: Scalar>(
        &self,
        dom: &ScalarDomain,
    ) -> Result<(Matrix<T>, Matrix<T>, BandUT<T>)> {
        let MatrixJson::Vk {
            n,
            window,
            m,
            m1,
            m2,
            m3,
        } = self
        else {
            return Err(Error::InvalidInput(format!(
                "expected a vk record, found {}",
                self.kind()
            )));
        };
        let a = m1.to_dense::<T>(dom)?;
        if a.rows() != *n {
            return Err(Error::InvalidInput("M1 is not n x n".into()));
        }
        if m2.len() != *n {
            return Err(Error::InvalidInput("M2 must have n rows".into()));
        }
        let b = parse_rows(m2, *window)?;
        let t = m3.to_band_ut::<T>(dom)?;
        if t.n() != *window {
            return Err(Error::InvalidInput("M3 is not N x N".into()));
        }
        if t.m() != *m && !matches!(**m3, MatrixJson::Dense { .. }) {
            return Err(Error::InvalidInput("M3 band offset differs from m".into()));
        }
        let t = if t.m() == *m {
            t
        } else {
            BandUT::from_dense(&t.to_dense(), *m, dom)?
        };
        Ok((a, b, t))
    }

    pub fn vk<T: Scalar>(m1: &Matrix<T>, m2: &Matrix<T>, m3: &BandUT<T>) -> Self {
        MatrixJson::Vk {
            n: m1.rows(),
            window: m3.n(),
            m: m3.m(),
            m1: Box::new(MatrixJson::dense(m1)),
            m2: rows_json(m2),
            m3: Box::new(MatrixJson::band_ut(m3)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyc;
    use num_complex::Complex64;

    #[test]
    fn band_round_trip_is_one_based() {
        let dom = ScalarDomain::exact(12);
        let mut b = BandUT::<Cyc>::identity(5, 2).unwrap();
        b.set(0, 2, Cyc::zeta(12, 1)).unwrap();
        b.set(1, 4, Cyc::from_ratio(-3, 7)).unwrap();
        let j = MatrixJson::band_ut(&b);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"kind\":\"band_ut\""));
        assert!(text.contains("\"i\":1,\"j\":3"));
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_band_ut::<Cyc>(&dom).unwrap(), b);
    }

    #[test]
    fn dense_float_round_trip() {
        let dom = ScalarDomain::float(1e-12);
        let a = Matrix::from_rows(vec![
            vec![Complex64::new(1.5, -2.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(3.0, 0.0), Complex64::new(-0.25, 0.0)],
        ])
        .unwrap();
        let text = serde_json::to_string(&MatrixJson::dense(&a)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_dense::<Complex64>(&dom).unwrap(), a);
        assert!(back.has_float());
    }

    #[test]
    fn vk_round_trip() {
        let dom = ScalarDomain::exact(1);
        let q = |v: i64| Cyc::from_i64(v);
        let m1 = Matrix::from_rows(vec![vec![q(2), q(1)], vec![q(1), q(1)]]).unwrap();
        let m2 = Matrix::from_rows(vec![vec![q(1), q(0), q(3)], vec![q(0), q(5), q(0)]]).unwrap();
        let mut m3 = BandUT::identity(3, 1).unwrap();
        m3.set(0, 2, q(4)).unwrap();
        let text = serde_json::to_string(&MatrixJson::vk(&m1, &m2, &m3)).unwrap();
        assert!(text.contains("\"N\":3"));
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        let (a, b, t) = back.vk_blocks::<Cyc>(&dom).unwrap();
        assert_eq!((a, b, t), (m1, m2, m3));
        assert_eq!(back.to_dense::<Cyc>(&dom).unwrap().rows(), 5);
    }

    #[test]
    fn rejects_bad_band_position() {
        let text =
            r#"{"kind":"band_ut","n":3,"m":2,"entries":[{"i":1,"j":2,"v":{"re":1.0,"im":0.0}}]}"#;
        let j: MatrixJson = serde_json::from_str(text).unwrap();
        assert!(j
            .to_band_ut::<Complex64>(&ScalarDomain::float(1e-9))
            .is_err());
    }
}
