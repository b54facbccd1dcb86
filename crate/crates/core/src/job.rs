//! Whole-document jobs: factorize a matrix document into a certificate
//! document, and check a certificate document against a matrix document.
//! Certificates are tied to the canonical serialization of the input.

use num_complex::Complex64;

use crate::certificate::{
    digest_json, verify_with_digest, Certificate, CertificateJson, Check, VerifyReport,
};
use crate::error::{Error, Result};
use crate::matrix::json::MatrixJson;
use crate::matrix::Matrix;
use crate::mode::Mode;
use crate::scalar::{Cyc, Scalar, ScalarDomain};
use crate::sl::factorize_sl;
use crate::ut::factorize_ut;
use crate::vk::{factorize_vk, VKElement};

/// Arithmetic requested for a job. Float is also used whenever a document
/// carries float entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arith {
    Exact,
    Float { eps: f64 },
}

fn domain(arith: Arith, has_float: bool, conductor: u64, default_eps: f64) -> ScalarDomain {
    match arith {
        Arith::Float { eps } => ScalarDomain::float(eps),
        Arith::Exact if has_float => ScalarDomain::float(default_eps),
        Arith::Exact => ScalarDomain::exact(conductor),
    }
}

/// Dense target and certificate for one document.
fn factorize_as<T: Scalar>(
    input: &MatrixJson,
    mode: Mode,
    dom: &ScalarDomain,
    seed: u64,
) -> Result<(Matrix<T>, Certificate<T>)> {
    match input {
        MatrixJson::BandUt { .. } => {
            let a = input.to_band_ut::<T>(dom)?;
            Ok((a.to_dense(), factorize_ut(&a, mode, dom)?))
        }
        MatrixJson::GenUt { .. } => {
            let g = input.to_gen_ut::<T>(dom)?;
            if g.diag().iter().any(|d| !dom.eq(d, &T::one())) {
                return Err(Error::PreconditionViolated(
                    "only unit diagonals can be factored".into(),
                ));
            }
            let a = g.upper().clone();
            Ok((a.to_dense(), factorize_ut(&a, mode, dom)?))
        }
        MatrixJson::Dense { .. } => {
            let a = input.to_dense::<T>(dom)?;
            let cert = factorize_sl(&a, mode, dom, seed)?;
            Ok((a, cert))
        }
        MatrixJson::Vk { .. } => {
            let (m1, m2, m3) = input.vk_blocks::<T>(dom)?;
            let v = VKElement::new(m1, m2, m3)?;
            let f = factorize_vk(&v, mode, dom, seed)?;
            Ok((v.to_dense(), f.joint))
        }
    }
}

fn factorize_and_check<T: Scalar>(
    input: &MatrixJson,
    mode: Mode,
    dom: &ScalarDomain,
    seed: u64,
) -> Result<(CertificateJson, VerifyReport)> {
    let digest = digest_json(input);
    let (target, mut cert) = factorize_as::<T>(input, mode, dom, seed)?;
    cert.target_digest = digest.clone();
    let check = dom.with_conductor(mode.conductor());
    let report = verify_with_digest(&target, &cert, &check, &digest);
    Ok((cert.to_json(), report))
}

/// Factorizes `input` and verifies the result before returning it.
pub fn factorize_document(
    input: &MatrixJson,
    mode: Mode,
    arith: Arith,
    seed: u64,
) -> Result<(CertificateJson, VerifyReport)> {
    mode.validate()?;
    let dom = domain(
        arith,
        input.has_float(),
        input.conductor(),
        crate::scalar::DEFAULT_EPS,
    );
    if dom.is_exact() {
        factorize_and_check::<Cyc>(input, mode, &dom, seed)
    } else {
        factorize_and_check::<Complex64>(input, mode, &dom, seed)
    }
}

fn failed(name: &str, detail: String) -> VerifyReport {
    VerifyReport {
        passed: false,
        pairs: 0,
        bound: 0,
        checks: vec![Check {
            name: name.to_string(),
            passed: false,
            detail,
        }],
    }
}

fn verify_as<T: Scalar>(
    input: &MatrixJson,
    cert: &CertificateJson,
    dom: &ScalarDomain,
) -> Result<VerifyReport> {
    let target = input.to_dense::<T>(dom)?;
    let parsed = match Certificate::<T>::from_json(cert, dom) {
        Ok(c) => c,
        Err(e) => return Ok(failed("parse", format!("certificate rejected: {e}"))),
    };
    let dom = dom.with_conductor(parsed.mode.conductor());
    Ok(verify_with_digest(
        &target,
        &parsed,
        &dom,
        &digest_json(input),
    ))
}

/// Checks the certificate text `cert` against `input`. A malformed input is
/// an error; a malformed certificate is a failed report.
pub fn verify_document(input: &MatrixJson, cert: &str, arith: Arith) -> Result<VerifyReport> {
    let cert: CertificateJson = match serde_json::from_str(cert) {
        Ok(c) => c,
        Err(e) => {
            return Ok(failed(
                "parse",
                format!("certificate is not valid JSON: {e}"),
            ))
        }
    };
    let conductor = num_integer::lcm(input.conductor(), cert.conductor());
    let dom = domain(
        arith,
        input.has_float() || cert.has_float(),
        conductor,
        crate::scalar::DEFAULT_EPS,
    );
    if dom.is_exact() {
        verify_as::<Cyc>(input, &cert, &dom)
    } else {
        verify_as::<Complex64>(input, &cert, &dom)
    }
}
