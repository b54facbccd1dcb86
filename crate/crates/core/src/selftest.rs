//! Seeded invariant suite behind `commfact selftest`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::certificate::verify;
use crate::generate::{random_band_ut, random_entry, random_sl_complex, random_vk};
use crate::matrix::json::MatrixJson;
use crate::matrix::Matrix;
use crate::mode::Mode;
use crate::scalar::{Cyc, Scalar, ScalarDomain};
use crate::sl::{scalar_factorize, sourour_similarity, DEFAULT_RETRIES};
use crate::ut::factorize_ut;
use crate::vk::{factorize_vk, vk_eliminate_corner};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

pub const MODES: [Mode; 5] = [
    Mode::Involution,
    Mode::SkewInvolution,
    Mode::OrderK(3),
    Mode::SkewOrder2k(2),
    Mode::SkewOrder2k(3),
];

type Case = fn(&mut ChaCha8Rng) -> Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn scalar_axioms(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a: Cyc = random_entry(rng, Some(12)).map_err(|e| e.to_string())?;
    let b: Cyc = random_entry(rng, Some(12)).map_err(|e| e.to_string())?;
    let c: Cyc = random_entry(rng, Some(12)).map_err(|e| e.to_string())?;
    ensure(
        a.add_ref(&b).add_ref(&c) == a.add_ref(&b.add_ref(&c)),
        || "addition".into(),
    )?;
    ensure(
        a.mul_ref(&b.add_ref(&c)) == a.mul_ref(&b).add_ref(&a.mul_ref(&c)),
        || "distributivity".into(),
    )?;
    let inv = Scalar::inv(&a).map_err(|e| e.to_string())?;
    ensure(a.mul_ref(&inv) == Cyc::from_i64(1), || {
        format!("inverse of {a}")
    })?;
    let dom = ScalarDomain::exact(24);
    for s in [1u64, 2, 3, 4, 6, 12] {
        let z: Cyc = dom.root_of_unity(s, 1).map_err(|e| e.to_string())?;
        ensure(z.pow(s) == Cyc::from_i64(1), || format!("zeta_{s}^{s}"))?;
        let w: Cyc = dom.root_of_unity(2 * s, 1).map_err(|e| e.to_string())?;
        ensure(w.pow(s) == Cyc::from_i64(-1), || {
            format!("zeta_{}^{s}", 2 * s)
        })?;
    }
    Ok(())
}

fn ut_pipeline(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(3..=8);
    let m = rng.gen_range(1..=3);
    let a = random_band_ut::<Cyc>(n, m, 0.6, Some(12), rng).map_err(|e| e.to_string())?;
    for mode in MODES {
        let dom = ScalarDomain::exact(12);
        let cert = factorize_ut(&a, mode, &dom).map_err(|e| format!("{mode}: {e}"))?;
        let r = verify(&a.to_dense(), &cert, &dom.with_conductor(mode.conductor()));
        ensure(r.passed, || format!("n={n} m={m} {mode}: {r:?}"))?;
    }
    Ok(())
}

fn scalar_sl(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let cases = [
        (Cyc::from_i64(-1), 2usize),
        (Cyc::zeta(4, 1), 4),
        (Cyc::zeta(3, 1), 3),
        (Cyc::zeta(6, 1), 6),
    ];
    let (alpha, n) = cases[rng.gen_range(0..cases.len())].clone();
    for mode in MODES {
        let dom = ScalarDomain::exact(1);
        let cert = scalar_factorize(&alpha, n, mode, &dom).map_err(|e| format!("{mode}: {e}"))?;
        let check = dom.with_conductor(alpha.conductor() * mode.conductor() * 2);
        let r = verify(&Matrix::scalar(n, alpha.clone()), &cert, &check);
        ensure(r.passed, || format!("{alpha} {mode}: {r:?}"))?;
    }
    Ok(())
}

fn float_sl(n: usize, rng: &mut ChaCha8Rng) -> Result<Matrix<Complex64>, String> {
    random_sl_complex(n, rng).map_err(|e| e.to_string())
}

fn similarity(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(2..=8);
    let a = float_sl(n, rng)?;
    let dom = ScalarDomain::float(1e-9);
    let s = sourour_similarity(&a, &dom, rng, DEFAULT_RETRIES).map_err(|e| e.to_string())?;
    let back = s.reconstruct().map_err(|e| e.to_string())?;
    let resid = back.sub(&a).map_err(|e| e.to_string())?.norm() / a.norm();
    ensure(resid <= 1e-9, || format!("residual {resid:e} at n={n}"))
}

fn sl_pipeline(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = float_sl(6, rng)?;
    let dom = ScalarDomain::float(1e-9);
    let seed = rng.gen();
    let cert =
        crate::sl::factorize_sl(&a, Mode::Involution, &dom, seed).map_err(|e| e.to_string())?;
    let r = verify(&a, &cert, &dom);
    ensure(r.passed && cert.len() <= 4, || format!("{r:?}"))
}

fn vk_pipeline(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let m = rng.gen_range(1..=2);
    let v = random_vk::<Cyc>(2, 8, m, 0.6, None, rng).map_err(|e| e.to_string())?;
    let dom = ScalarDomain::exact(1);
    let y = vk_eliminate_corner(&v, &dom).map_err(|e| e.to_string())?;
    let resid =
        v.m1.matmul(&y)
            .and_then(|p| p.sub(&y.matmul(&v.m3.to_dense())?))
            .and_then(|p| p.add(&v.m2))
            .map_err(|e| e.to_string())?;
    ensure(resid == Matrix::zeros(2, 8), || "corner residual".into())?;
    for mode in MODES {
        let f = factorize_vk(&v, mode, &dom, 0).map_err(|e| format!("{mode}: {e}"))?;
        let r = verify(
            &v.to_dense(),
            &f.joint,
            &dom.with_conductor(2 * mode.conductor()),
        );
        ensure(r.passed, || format!("{mode}: {r:?}"))?;
    }
    Ok(())
}

fn window_closure(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = 12;
    let mut p = Matrix::<Cyc>::zeros(n, n);
    let mut q = Matrix::<Cyc>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            p[(i, j)] = random_entry(rng, Some(12)).map_err(|e| e.to_string())?;
            q[(i, j)] = random_entry(rng, Some(12)).map_err(|e| e.to_string())?;
        }
    }
    let pq = p.matmul(&q).map_err(|e| e.to_string())?;
    for w in 1..=n {
        let lhs = pq.window(w);
        let rhs = p
            .window(w)
            .matmul(&q.window(w))
            .map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("window {w}"))?;
    }
    Ok(())
}

fn json_round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = random_band_ut::<Cyc>(6, 2, 0.7, Some(12), rng).map_err(|e| e.to_string())?;
    let text = serde_json::to_string(&MatrixJson::band_ut(&a)).map_err(|e| e.to_string())?;
    let back: MatrixJson = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let b = back
        .to_band_ut::<Cyc>(&ScalarDomain::exact(12))
        .map_err(|e| e.to_string())?;
    ensure(a == b, || "band_ut round trip".into())
}

fn run_suite(name: &str, cases: usize, seed: u64, case: Case) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for idx in 0..cases {
        if let Err(detail) = case(&mut rng) {
            return SuiteResult {
                name: name.to_string(),
                cases: idx + 1,
                passed: false,
                detail: format!("case {idx}: {detail}"),
            };
        }
    }
    SuiteResult {
        name: name.to_string(),
        cases,
        passed: true,
        detail: "ok".to_string(),
    }
}

/// Runs every suite; `quick` cuts the case counts.
pub fn run(quick: bool, seed: u64) -> Summary {
    let scale = |full: usize| {
        if quick {
            full.div_ceil(10).max(1)
        } else {
            full
        }
    };
    let suites: [(&str, usize, Case); 8] = [
        ("scalar_axioms", scale(50), scalar_axioms),
        ("ut_pipeline", scale(20), ut_pipeline),
        ("scalar_sl", scale(8), scalar_sl),
        ("sourour_similarity", scale(50), similarity),
        ("sl_pipeline", scale(20), sl_pipeline),
        ("vk_pipeline", scale(10), vk_pipeline),
        ("window_closure", scale(10), window_closure),
        ("json_round_trip", scale(20), json_round_trip),
    ];
    let results: Vec<SuiteResult> = suites
        .iter()
        .enumerate()
        .map(|(i, (name, cases, case))| run_suite(name, *cases, seed.wrapping_add(i as u64), *case))
        .collect();
    Summary {
        passed: results.iter().all(|r| r.passed),
        suites: results,
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn quick_suite_passes() {
        let s = super::run(true, 0);
        assert!(s.passed, "{s:#?}");
    }
}
