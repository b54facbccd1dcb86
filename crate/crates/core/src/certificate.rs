//! Commutator certificates and their verification.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::json::MatrixJson;
use crate::matrix::{commutator, Matrix, OrderSpec};
use crate::mode::Mode;
use crate::scalar::{Scalar, ScalarDomain};

/// Which construction produced a certificate. Fixes the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ut,
    Sl,
    Vk,
}

impl Family {
    /// Unitriangular: the mode bound. Special linear: one bound per
    /// triangular factor. Vershik-Kerov: special linear plus unitriangular.
    pub fn bound(&self, mode: Mode) -> usize {
        let ut = mode.ut_bound();
        match self {
            Family::Ut => ut,
            Family::Sl => 2 * ut,
            Family::Vk => 3 * ut,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommPair<T> {
    pub p: Matrix<T>,
    pub q: Matrix<T>,
    pub order_p: OrderSpec,
    pub order_q: OrderSpec,
}

impl<T: Scalar> CommPair<T> {
    pub fn commutator(&self) -> Result<Matrix<T>> {
        commutator(&self.p, &self.q)
    }

    /// Both factors replaced by `X F X^{-1}`.
    pub fn conjugated(&self, x: &Matrix<T>, x_inv: &Matrix<T>) -> Result<Self> {
        Ok(CommPair {
            p: x.conjugate_with(x_inv, &self.p)?,
            q: x.conjugate_with(x_inv, &self.q)?,
            order_p: self.order_p,
            order_q: self.order_q,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub mode: Mode,
    pub family: Family,
    pub bound: usize,
    pub pairs: Vec<CommPair<T>>,
    pub target_digest: String,
    /// Similarity used by the special linear construction, if any.
    pub similarity: Option<Matrix<T>>,
}

impl<T: Scalar> Certificate<T> {
    pub fn new(mode: Mode, family: Family, pairs: Vec<CommPair<T>>, target: &Matrix<T>) -> Self {
        Certificate {
            mode,
            family,
            bound: family.bound(mode),
            pairs,
            target_digest: digest_matrix(target),
            similarity: None,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Ordered product of the commutators; identity of size `n` when empty.
    pub fn product(&self, n: usize) -> Result<Matrix<T>> {
        let mut acc = Matrix::identity(n);
        for pair in &self.pairs {
            acc = acc.matmul(&pair.commutator()?)?;
        }
        Ok(acc)
    }

    /// Every pair conjugated by `X`; the product becomes `X A X^{-1}`.
    pub fn conjugated(&self, x: &Matrix<T>) -> Result<Self> {
        let x_inv = x.inverse()?;
        self.conjugated_with(x, &x_inv)
    }

    pub fn conjugated_with(&self, x: &Matrix<T>, x_inv: &Matrix<T>) -> Result<Self> {
        Ok(Certificate {
            pairs: self
                .pairs
                .iter()
                .map(|p| p.conjugated(x, x_inv))
                .collect::<Result<_>>()?,
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            mode: self.mode.name().to_string(),
            k: self.mode.k(),
            bound: self.bound,
            family: self.family,
            pairs: self
                .pairs
                .iter()
                .map(|p| PairJson {
                    p: MatrixJson::dense(&p.p),
                    q: MatrixJson::dense(&p.q),
                    order_p: p.order_p,
                    order_q: p.order_q,
                })
                .collect(),
            target_digest: self.target_digest.clone(),
            similarity: self.similarity.as_ref().map(|p| SimilarityJson {
                p: MatrixJson::dense(p),
            }),
        }
    }

    pub fn from_json(j: &CertificateJson, dom: &ScalarDomain) -> Result<Self> {
        let mode = Mode::from_name(&j.mode, j.k)?;
        let pairs = j
            .pairs
            .iter()
            .map(|p| {
                Ok(CommPair {
                    p: p.p.to_dense(dom)?,
                    q: p.q.to_dense(dom)?,
                    order_p: p.order_p,
                    order_q: p.order_q,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Certificate {
            mode,
            family: j.family,
            bound: j.bound,
            pairs,
            target_digest: j.target_digest.clone(),
            similarity: j
                .similarity
                .as_ref()
                .map(|s| s.p.to_dense(dom))
                .transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    #[serde(rename = "P")]
    pub p: MatrixJson,
    #[serde(rename = "Q")]
    pub q: MatrixJson,
    #[serde(rename = "orderP")]
    pub order_p: OrderSpec,
    #[serde(rename = "orderQ")]
    pub order_q: OrderSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityJson {
    #[serde(rename = "P")]
    pub p: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub mode: String,
    pub k: u32,
    pub bound: usize,
    pub family: Family,
    pub pairs: Vec<PairJson>,
    pub target_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<SimilarityJson>,
}

impl CertificateJson {
    /// Largest conductor among the exact entries of all factors.
    pub fn conductor(&self) -> u64 {
        self.pairs.iter().fold(1, |acc, p| {
            num_integer::lcm(acc, num_integer::lcm(p.p.conductor(), p.q.conductor()))
        })
    }

    pub fn has_float(&self) -> bool {
        self.pairs
            .iter()
            .any(|p| p.p.has_float() || p.q.has_float())
    }
}

/// `sha256:<hex>` of the compact serialization of a matrix document.
pub fn digest_json(j: &MatrixJson) -> String {
    let bytes = serde_json::to_vec(j).expect("matrix JSON serializes");
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn digest_matrix<T: Scalar>(a: &Matrix<T>) -> String {
    digest_json(&MatrixJson::dense(a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`verify`]: one entry per check, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub pairs: usize,
    pub bound: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Checks `cert` against `target` with the digest of the dense target.
pub fn verify<T: Scalar>(
    target: &Matrix<T>,
    cert: &Certificate<T>,
    dom: &ScalarDomain,
) -> VerifyReport {
    verify_with_digest(target, cert, dom, &digest_matrix(target))
}

/// Checks `cert` against `target`, expecting `digest` in the certificate.
/// Failures are reported, never raised.
pub fn verify_with_digest<T: Scalar>(
    target: &Matrix<T>,
    cert: &Certificate<T>,
    dom: &ScalarDomain,
    digest: &str,
) -> VerifyReport {
    let mut report = VerifyReport {
        passed: true,
        pairs: cert.pairs.len(),
        bound: cert.bound,
        checks: Vec::new(),
    };
    report.push(
        "digest",
        cert.target_digest == digest,
        format!("certificate {} vs target {}", cert.target_digest, digest),
    );
    let expected = cert.family.bound(cert.mode);
    report.push(
        "bound",
        cert.bound == expected,
        format!(
            "declared {} for {:?} in {}, expected {}",
            cert.bound, cert.family, cert.mode, expected
        ),
    );
    report.push(
        "count",
        cert.pairs.len() <= cert.bound,
        format!("{} pairs, bound {}", cert.pairs.len(), cert.bound),
    );

    let mut bad_decl = Vec::new();
    let mut bad_order = Vec::new();
    let mut bad_shape = Vec::new();
    let n = target.rows();
    for (idx, pair) in cert.pairs.iter().enumerate() {
        for (name, f, spec) in [("P", &pair.p, pair.order_p), ("Q", &pair.q, pair.order_q)] {
            if !cert.mode.allows(spec) {
                bad_decl.push(format!("{name}{}", idx + 1));
            }
            if f.rows() != n || f.cols() != n {
                bad_shape.push(format!("{name}{}", idx + 1));
            } else if !f.is_order(spec, dom) {
                bad_order.push(format!("{name}{}", idx + 1));
            }
        }
    }
    let list = |v: &[String]| {
        if v.is_empty() {
            "all".to_string()
        } else {
            v.join(",")
        }
    };
    report.push(
        "declared_orders",
        bad_decl.is_empty(),
        if bad_decl.is_empty() {
            format!("every order admissible in {}", cert.mode)
        } else {
            format!("inadmissible in {}: {}", cert.mode, list(&bad_decl))
        },
    );
    report.push(
        "orders",
        bad_order.is_empty() && bad_shape.is_empty(),
        if bad_order.is_empty() && bad_shape.is_empty() {
            "every factor has its declared order".to_string()
        } else {
            format!(
                "order fails: [{}]; wrong size: [{}]",
                bad_order.join(","),
                bad_shape.join(",")
            )
        },
    );

    let product = if bad_shape.is_empty() && target.is_square() {
        cert.product(n)
    } else {
        Err(Error::Dimension(
            "factor sizes differ from the target".into(),
        ))
    };
    match product {
        Ok(prod) => {
            let ok = prod.approx_eq(target, dom);
            let detail = if ok {
                "product of commutators equals the target".to_string()
            } else {
                let diff = prod.sub(target).map(|d| d.norm()).unwrap_or(f64::NAN);
                format!("product differs from the target (Frobenius residual {diff:.3e})")
            };
            report.push("product", ok, detail);
        }
        Err(e) => report.push("product", false, format!("could not form the product: {e}")),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyc;

    fn q(v: i64) -> Cyc {
        Cyc::from_i64(v)
    }

    fn involution_pair() -> (Matrix<Cyc>, Matrix<Cyc>) {
        // B = diag(1,-1), C = [[1, 1/2], [0, -1]]: [B, C] = (BC)^2 = I + E12
        let b = Matrix::from_diag(&[q(1), q(-1)]);
        let mut c = Matrix::from_diag(&[q(1), q(-1)]);
        c[(0, 1)] = Cyc::from_ratio(1, 2);
        (b, c)
    }

    fn cert() -> (Matrix<Cyc>, Certificate<Cyc>) {
        let (b, c) = involution_pair();
        let mut target = Matrix::identity(2);
        target[(0, 1)] = q(1);
        let pair = CommPair {
            p: b,
            q: c,
            order_p: OrderSpec::new(2, 1),
            order_q: OrderSpec::new(2, 1),
        };
        let cert = Certificate::new(Mode::Involution, Family::Ut, vec![pair], &target);
        (target, cert)
    }

    #[test]
    fn good_certificate_passes() {
        let (t, c) = cert();
        let r = verify(&t, &c, &ScalarDomain::exact(1));
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn swapped_pair_fails_product() {
        let (t, mut c) = cert();
        let p = &mut c.pairs[0];
        std::mem::swap(&mut p.p, &mut p.q);
        let r = verify(&t, &c, &ScalarDomain::exact(1));
        assert!(!r.passed);
        assert!(!r.check("product").unwrap().passed);
    }

    #[test]
    fn tampered_order_fails() {
        let (t, mut c) = cert();
        c.pairs[0].order_p = OrderSpec::new(2, -1);
        let r = verify(&t, &c, &ScalarDomain::exact(1));
        assert!(!r.check("orders").unwrap().passed);
        assert!(!r.check("declared_orders").unwrap().passed);
    }

    #[test]
    fn json_round_trip() {
        let (t, c) = cert();
        let dom = ScalarDomain::exact(1);
        let text = serde_json::to_string(&c.to_json()).unwrap();
        assert!(text.contains("\"orderP\":{\"k\":2,\"sign\":1}"));
        let j: CertificateJson = serde_json::from_str(&text).unwrap();
        let back = Certificate::<Cyc>::from_json(&j, &dom).unwrap();
        assert_eq!(back, c);
        assert!(verify(&t, &back, &dom).passed);
    }
}
