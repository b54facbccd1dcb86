//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are never captured.

use std::process::Command;
use std::time::Instant;

use commfact::certificate::verify;
use commfact::coherent::CoherentPoly;
use commfact::generate::{random_band_ut, random_entry, random_sl_complex, random_vk};
use commfact::matrix::{commutator, Band, BandUT, DiagonalSeq, Matrix};
use commfact::mode::Mode;
use commfact::scalar::{Scalar, ScalarDomain};
use commfact::sl::{
    diag_display, factorize_sl, scalar_factorize, sourour_similarity, two_by_two_factors,
    DiagPiece, DEFAULT_RETRIES,
};
use commfact::ut::{
    build_generators, commutator_expansion, conjugator_allones, conjugator_coherent, factorize_ut,
    target_poly,
};
use commfact::vk::{factorize_vk, vk_eliminate_corner};
use commfact::{ExactMatrix, ExactScalar as Cyc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

const UT_MODES: [Mode; 5] = [
    Mode::Involution,
    Mode::SkewInvolution,
    Mode::OrderK(3),
    Mode::SkewOrder2k(2),
    Mode::SkewOrder2k(3),
];

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn q(v: i64) -> Cyc {
    Cyc::from_i64(v)
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + tag)
}

fn random_band(rng: &mut ChaCha8Rng, n: usize, m: usize, conductor: u64) -> Band<Cyc> {
    let vals = (0..n - m)
        .map(|_| {
            if rng.gen_bool(0.15) {
                q(0)
            } else {
                random_entry(rng, Some(conductor)).unwrap()
            }
        })
        .collect();
    Band::new(n, m, vals).unwrap()
}

fn ut_pipeline() -> Outcome {
    let mut rng = rng(1);
    let start = Instant::now();
    let mut bounds = Vec::new();
    for case in 0..200 {
        let n = rng.gen_range(4..=12);
        let m = rng.gen_range(1..=3);
        let a = random_band_ut::<Cyc>(n, m, 0.7, Some(12), &mut rng).map_err(|e| e.to_string())?;
        for mode in UT_MODES {
            let dom = ScalarDomain::exact(12);
            let cert =
                factorize_ut(&a, mode, &dom).map_err(|e| format!("case {case} {mode}: {e}"))?;
            let r = verify(&a.to_dense(), &cert, &dom.with_conductor(mode.conductor()));
            check(r.passed, || {
                format!("case {case} n={n} m={m} {mode}: {r:?}")
            })?;
            check(cert.len() <= mode.ut_bound(), || {
                format!("case {case} {mode}: {} pairs", cert.len())
            })?;
            if case == 0 {
                bounds.push(format!("{mode}<={}", mode.ut_bound()));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "200 instances x 5 mode settings in {secs:.1}s; bounds {}",
        bounds.join(", ")
    ))
}

fn generators() -> Outcome {
    let mut rng = rng(2);
    for case in 0..100 {
        let n = rng.gen_range(2..=12);
        let m = rng.gen_range(1..n);
        let band = random_band(&mut rng, n, m, 12);
        for mode in UT_MODES {
            let dom = ScalarDomain::exact(12 * mode.conductor());
            let (b, c) = build_generators(&band, mode, &dom).map_err(|e| e.to_string())?;
            let (b, c) = (b.to_dense(), c.to_dense());
            let (ob, oc) = mode.generator_orders();
            check(b.is_order(ob, &dom) && c.is_order(oc, &dom), || {
                format!("case {case} {mode}: generator orders")
            })?;
            let sigma_bc = (&b * &c)
                .power(mode.exponent() as i64)
                .map_err(|e| e.to_string())?
                .scale(&q(mode.sign() as i64));
            if mode.exponent() == 2 {
                let t = commutator(&b, &c).map_err(|e| e.to_string())?;
                check(t == sigma_bc, || {
                    format!("case {case} {mode}: [B, C] != sigma (B C)^2")
                })?;
            }
            let head = commutator_expansion(&b, &c, mode.exponent(), mode.sign(), &dom)
                .map_err(|e| e.to_string())?;
            let mut prod = Matrix::identity(n);
            for p in &head {
                prod = &prod * &p.commutator().map_err(|e| e.to_string())?;
            }
            check(prod == sigma_bc, || {
                format!("case {case} {mode}: expansion")
            })?;
            check(Band::extract(&prod, m) == band, || {
                format!("case {case} {mode}: band of the commutator")
            })?;
        }
    }
    Ok("100 bands x 5 mode settings, exact".into())
}

fn conjugators() -> Outcome {
    let mut rng = rng(3);
    for case in 0..100 {
        let n = rng.gen_range(2..=12);
        let m = rng.gen_range(1..n);
        let band = random_band(&mut rng, n, m, 12);
        let mode = UT_MODES[case % UT_MODES.len()];
        let dom = ScalarDomain::exact(12 * mode.conductor());
        let t = target_poly(&band, mode, &dom).map_err(|e| e.to_string())?;
        let a = CoherentPoly::unit_plus_band(band);
        let x = conjugator_coherent(&t, &a, &dom).map_err(|e| e.to_string())?;
        check(&t.evaluate() * &x == &x * &a.evaluate(), || {
            format!("case {case}: T X != X A")
        })?;
    }
    for case in 0..100 {
        let n = rng.gen_range(2..=12);
        let m = rng.gen_range(1..n);
        let mut a =
            random_band_ut::<Cyc>(n, m, 0.7, Some(12), &mut rng).map_err(|e| e.to_string())?;
        for i in 0..n - m {
            a.set(i, i + m, q(1)).map_err(|e| e.to_string())?;
        }
        let (x, jpat) =
            conjugator_allones(&a, &ScalarDomain::exact(12)).map_err(|e| e.to_string())?;
        let ad = a.to_dense();
        check(&ad * &x == &x * &jpat.to_dense(), || {
            format!("case {case}: A X != X Jpat")
        })?;
        check(x.det().map_err(|e| e.to_string())? != q(0), || {
            format!("case {case}: X singular")
        })?;
    }
    Ok("100 coherent + 100 all-ones instances, n <= 12, exact".into())
}

fn expansion() -> Outcome {
    let mut rng = rng(4);
    let mut cases = 0;
    for k in 2..=6u32 {
        for _ in 0..10 {
            let a = loop {
                let p = rng.gen_range(-9..=9);
                let d = rng.gen_range(1..=5);
                if p != 0 && p != d && p != -d {
                    break Cyc::from_ratio(p, d);
                }
            };
            let dom = ScalarDomain::exact(4 * k as u64);
            let (j1, j2) = two_by_two_factors(&a, k, &dom).map_err(|e| e.to_string())?;
            let bc = &j1 * &j2;
            let pairs = commutator_expansion(&j1, &j2, k, 1, &dom).map_err(|e| e.to_string())?;
            let prod = product(&pairs)?;
            check(prod == bc.power(k as i64).unwrap(), || {
                format!("k={k} a={a}: product")
            })?;
            check(
                pairs.len() == k as usize - 1 && pairs.len() <= 2 * k as usize - 3,
                || format!("k={k}: {} pairs", pairs.len()),
            )?;
            let beta: Cyc = dom
                .root_of_unity(4 * k as u64, 1)
                .map_err(|e| e.to_string())?;
            let b = j1.scale(&beta);
            let pairs =
                commutator_expansion(&b, &j2, 2 * k, -1, &dom).map_err(|e| e.to_string())?;
            let prod = product(&pairs)?;
            let bc = &b * &j2;
            check(prod == bc.power(2 * k as i64).unwrap().neg(), || {
                format!("k={k} a={a}: skew product")
            })?;
            check(
                pairs.len() == 2 * k as usize - 1 && pairs.len() <= 4 * k as usize - 3,
                || format!("k={k}: {} skew pairs", pairs.len()),
            )?;
            cases += 1;
        }
    }
    Ok(format!("{cases} parameters over k = 2..6, plain and skew"))
}

fn product(pairs: &[commfact::certificate::CommPair<Cyc>]) -> Result<ExactMatrix, String> {
    let mut acc = Matrix::identity(pairs[0].p.rows());
    for p in pairs {
        acc = &acc * &p.commutator().map_err(|e| e.to_string())?;
    }
    Ok(acc)
}

/// `B C` for the `m = 1` skew generators, read over `J(B C)`.
fn skew_coefficients(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> Result<(CoherentPoly<Cyc>, ExactMatrix), String> {
    let dom = ScalarDomain::exact(12);
    let vals = (0..n - 1)
        .map(|_| random_entry(rng, None).unwrap())
        .collect();
    let band = Band::new(n, 1, vals).map_err(|e| e.to_string())?;
    let (b, c) = build_generators(&band, Mode::SkewInvolution, &dom).map_err(|e| e.to_string())?;
    let bc = &b.to_dense() * &c.to_dense();
    let jbc = Band::extract(&bc, 1);
    let poly = CoherentPoly::from_matrix(&bc, &jbc, &dom).map_err(|e| e.to_string())?;
    Ok((poly, bc))
}

fn even_rows(n: usize, v: Cyc) -> DiagonalSeq<Cyc> {
    // Rows 2, 4, .. counting from 1.
    DiagonalSeq(
        (0..n)
            .map(|i| if i % 2 == 1 { v.clone() } else { q(0) })
            .collect(),
    )
}

fn coherence() -> Outcome {
    let mut rng = rng(5);
    let dom = ScalarDomain::exact(12);
    for case in 0..100 {
        let n = rng.gen_range(2..=12);
        let m = rng.gen_range(1..n);
        let band = random_band(&mut rng, n, m, 12);
        let kmax = band.max_power();
        let coef = |rng: &mut ChaCha8Rng| {
            DiagonalSeq(
                (0..n)
                    .map(|_| random_entry::<Cyc>(rng, Some(12)).unwrap())
                    .collect(),
            )
        };
        let p =
            CoherentPoly::new(band.clone(), (0..=kmax).map(|_| coef(&mut rng)).collect()).unwrap();
        let r =
            CoherentPoly::new(band.clone(), (0..=kmax).map(|_| coef(&mut rng)).collect()).unwrap();
        let pr = p.mul(&r).map_err(|e| e.to_string())?;
        check(pr.evaluate() == &p.evaluate() * &r.evaluate(), || {
            format!("case {case}: product")
        })?;
        let e = rng.gen_range(2..=4);
        let pe = p.power(e).map_err(|e| e.to_string())?;
        check(
            pe.evaluate() == p.evaluate().power(e as i64).unwrap(),
            || format!("case {case}: power"),
        )?;
        let back =
            CoherentPoly::from_matrix(&pr.evaluate(), &band, &dom).map_err(|e| e.to_string())?;
        check(back.evaluate() == pr.evaluate(), || {
            format!("case {case}: read back")
        })?;
    }
    let i: Cyc = dom.imag_unit().unwrap();
    for n in [2usize, 5, 8, 11] {
        let (poly, bc) = skew_coefficients(&mut rng, n)?;
        check(poly.evaluate() == bc, || {
            format!("n={n}: skew reconstruction")
        })?;
        check(
            poly.coefficient(0) == DiagonalSeq::constant(n, -i.clone()),
            || "D_0 != -i I".into(),
        )?;
        let live = |k: usize, d: DiagonalSeq<Cyc>| DiagonalSeq(d.0[..poly.live_rows(k)].to_vec());
        check(
            live(1, poly.coefficient(1)) == live(1, DiagonalSeq::identity(n)),
            || "D_1 != I".into(),
        )?;
        check(
            live(2, poly.coefficient(2)) == live(2, even_rows(n, i.clone())),
            || "D_2 != i sum E_{2i,2i}".into(),
        )?;
    }
    Ok(
        "100 random polynomials; skew m = 1 product has D_0 = -iI, D_1 = I, D_2 = i sum E_{2i,2i}"
            .into(),
    )
}

fn coherence_literal_d2() -> Outcome {
    let mut rng = rng(55);
    for n in [3usize, 6, 9] {
        let (poly, _) = skew_coefficients(&mut rng, n)?;
        let live = poly.live_rows(2);
        let got = DiagonalSeq(poly.coefficient(2).0[..live].to_vec());
        let want = DiagonalSeq(even_rows(n, q(1)).0[..live].to_vec());
        check(got == want, || {
            format!(
                "n={n}: D_2 = {:?}, stated sum E_{{2i,2i}}",
                got.0.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            )
        })?;
    }
    Ok("D_2 = sum E_{2i,2i}".into())
}

fn scalar_sl() -> Outcome {
    let cases: [(Cyc, usize); 4] = [
        (q(-1), 2),
        (Cyc::zeta(4, 1), 4),
        (Cyc::zeta(3, 1), 3),
        (Cyc::zeta(6, 1), 6),
    ];
    let modes = [
        Mode::Involution,
        Mode::SkewInvolution,
        Mode::OrderK(3),
        Mode::OrderK(4),
        Mode::SkewOrder2k(2),
        Mode::SkewOrder2k(3),
    ];
    let mut count = 0;
    for (alpha, n) in &cases {
        for mode in modes {
            let dom = ScalarDomain::exact(1);
            let cert = scalar_factorize(alpha, *n, mode, &dom)
                .map_err(|e| format!("{alpha} {mode}: {e}"))?;
            let check_dom =
                dom.with_conductor(alpha.conductor() * mode.conductor() * 2 * *n as u64);
            let r = verify(&Matrix::scalar(*n, alpha.clone()), &cert, &check_dom);
            check(r.passed, || format!("{alpha} n={n} {mode}: {r:?}"))?;
            count += 1;
        }
        let (f, g) = diag_display(*n);
        let eval = |pieces: &[DiagPiece]| -> Vec<Cyc> {
            pieces
                .iter()
                .flat_map(|p| match p {
                    DiagPiece::Pair(e) => vec![pow_i(alpha, *e), pow_i(alpha, -*e)],
                    DiagPiece::One => vec![q(1)],
                })
                .collect()
        };
        let (fd, gd) = (Matrix::from_diag(&eval(&f)), Matrix::from_diag(&eval(&g)));
        check(&fd * &gd == Matrix::scalar(*n, alpha.clone()), || {
            format!("{alpha}: F G != alpha I")
        })?;
        if *n == 4 {
            let i = Cyc::zeta(4, 1);
            check(
                fd.diag() == vec![i.clone(), -i.clone(), -i.clone(), i],
                || "F display at i".into(),
            )?;
            check(gd.diag() == vec![q(1), q(-1), q(-1), q(1)], || {
                "G display at i".into()
            })?;
        }
    }
    Ok(format!(
        "{count} scalar certificates; F = diag(i,-i,-i,i), G = diag(1,-1,-1,1) at alpha = i"
    ))
}

fn pow_i(a: &Cyc, e: i64) -> Cyc {
    let p = a.pow(e.unsigned_abs());
    if e < 0 {
        p.inv().unwrap()
    } else {
        p
    }
}

fn similarity() -> Outcome {
    let mut rng = rng(7);
    let dom = ScalarDomain::float(1e-9);
    let (mut worst_resid, mut worst_minor) = (0f64, 0f64);
    for case in 0..100 {
        let n = rng.gen_range(2..=8);
        let a = random_sl_complex(n, &mut rng).map_err(|e| e.to_string())?;
        let s = sourour_similarity(&a, &dom, &mut rng, DEFAULT_RETRIES)
            .map_err(|e| format!("case {case} n={n}: {e}"))?;
        let resid = s.reconstruct().unwrap().sub(&a).unwrap().norm() / a.norm();
        worst_resid = worst_resid.max(resid);
        let inner = &(&s.p_inv * &a) * &s.p;
        for j in 1..=n {
            let d =
                (inner.leading_minor(j).unwrap() - num_complex::Complex64::new(1.0, 0.0)).norm();
            worst_minor = worst_minor.max(d);
        }
    }
    check(worst_resid <= 1e-9 && worst_minor <= 1e-9, || {
        format!("residual {worst_resid:.2e}, minor error {worst_minor:.2e}")
    })?;
    Ok(format!("100 matrices, n <= 8; residual {worst_resid:.1e}, minor error {worst_minor:.1e}; no retries exhausted"))
}

fn sl_pipeline() -> Outcome {
    let mut rng = rng(8);
    let dom = ScalarDomain::float(1e-9);
    let mut most = 0;
    for case in 0..50 {
        let a = random_sl_complex(6, &mut rng).map_err(|e| e.to_string())?;
        let cert = factorize_sl(&a, Mode::Involution, &dom, case)
            .map_err(|e| format!("case {case}: {e}"))?;
        let r = verify(&a, &cert, &dom);
        check(r.passed, || format!("case {case}: {r:?}"))?;
        check(cert.len() <= 4, || {
            format!("case {case}: {} pairs", cert.len())
        })?;
        most = most.max(cert.len());
    }
    Ok(format!(
        "50 matrices in SL_6, float eps 1e-9, at most {most} pairs"
    ))
}

fn vershik_kerov() -> Outcome {
    let mut rng = rng(9);
    let dom = ScalarDomain::exact(1);
    for case in 0..50 {
        let m = 1 + case % 2;
        let v = random_vk::<Cyc>(2, 8, m, 0.6, None, &mut rng).map_err(|e| e.to_string())?;
        let y = vk_eliminate_corner(&v, &dom).map_err(|e| e.to_string())?;
        let resid = (&v.m1 * &y)
            .sub(&(&y * &v.m3.to_dense()))
            .unwrap()
            .add(&v.m2)
            .unwrap();
        check(resid == Matrix::zeros(2, 8), || {
            format!("case {case}: corner residual")
        })?;
        for mode in UT_MODES {
            let f = factorize_vk(&v, mode, &dom, case as u64)
                .map_err(|e| format!("case {case} {mode}: {e}"))?;
            let r = verify(
                &v.to_dense(),
                &f.joint,
                &dom.with_conductor(2 * mode.conductor()),
            );
            check(r.passed, || format!("case {case} m={m} {mode}: {r:?}"))?;
        }
    }
    Ok("50 elements, n = 2, N = 8, m in {1, 2}, 5 mode settings, exact".into())
}

fn window_closure() -> Outcome {
    let mut rng = rng(10);
    for case in 0..20 {
        let n = 12;
        let mut p = Matrix::<Cyc>::zeros(n, n);
        let mut r = Matrix::<Cyc>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                p[(i, j)] = random_entry(&mut rng, Some(12)).unwrap();
                r[(i, j)] = random_entry(&mut rng, Some(12)).unwrap();
            }
        }
        let pr = &p * &r;
        for w in 1..=n {
            check(pr.window(w) == &p.window(w) * &r.window(w), || {
                format!("case {case} N={w}")
            })?;
        }
        let unit = Matrix::<Cyc>::identity(n)
            .add(&p.sub(&Matrix::from_diag(&p.diag())).unwrap())
            .unwrap();
        let bp =
            BandUT::from_dense(&unit, 1, &ScalarDomain::exact(12)).map_err(|e| e.to_string())?;
        for w in 1..=n {
            check(bp.window(w).to_dense() == bp.to_dense().window(w), || {
                format!("case {case}: band window {w}")
            })?;
        }
    }
    Ok("20 pairs, n = 12, every N <= 12".into())
}

fn cli_round_trip() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_commfact");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |f: &str| dir.path().join(f).to_string_lossy().into_owned();
    let (a, c, bad) = (path("a.json"), path("cert.json"), path("bad.json"));
    let run = |args: &[&str]| -> Result<i32, String> {
        let out = Command::new(exe)
            .args(args)
            .env_remove("COMMFACT_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        out.status
            .code()
            .ok_or_else(|| "killed by a signal".to_string())
    };
    let gen = run(&[
        "generate",
        "--kind",
        "band",
        "--n",
        "7",
        "--m",
        "2",
        "--seed",
        "11",
        "--density",
        "0.8",
        "--conductor",
        "12",
        "--output",
        &a,
    ])?;
    check(gen == 0, || format!("generate exited {gen}"))?;
    let fac = run(&[
        "factorize",
        "--mode",
        "order-k",
        "--k",
        "3",
        "--input",
        &a,
        "--output",
        &c,
    ])?;
    check(fac == 0, || format!("factorize exited {fac}"))?;
    let ver = run(&["verify", "--input", &a, "--cert", &c])?;
    check(ver == 0, || format!("verify exited {ver}"))?;
    let mut bytes = std::fs::read(&c).map_err(|e| e.to_string())?;
    let pos = bytes
        .iter()
        .position(|b| b.is_ascii_digit())
        .ok_or("no digit in certificate")?;
    bytes[pos] = if bytes[pos] == b'7' { b'8' } else { b'7' };
    std::fs::write(&bad, &bytes).map_err(|e| e.to_string())?;
    let corrupted = run(&["verify", "--input", &a, "--cert", &bad])?;
    check(corrupted == 2, || {
        format!("corrupted certificate exited {corrupted}")
    })?;
    let k2 = run(&[
        "factorize",
        "--mode",
        "order-k",
        "--k",
        "2",
        "--input",
        &a,
        "--output",
        &c,
    ])?;
    check(k2 == 3, || format!("order-k with k = 2 exited {k2}"))?;
    Ok("factorize/verify exit 0 in separate processes; corrupted byte exits 2".into())
}

fn main() {
    // Criteria whose literal statement cannot hold; their FAIL is reported
    // but does not fail the run.
    const KNOWN: &[&str] = &["5-literal"];
    let criteria: [Criterion; 12] = [
        ("1", "unitriangular pipeline", ut_pipeline),
        ("2", "generator correctness", generators),
        ("3", "conjugator contracts", conjugators),
        ("4", "telescoping expansion", expansion),
        ("5", "coherence calculus", coherence),
        (
            "5-literal",
            "skew product D_2 as stated",
            coherence_literal_d2,
        ),
        ("6", "scalar special linear", scalar_sl),
        ("7", "similarity to unit minors", similarity),
        ("8", "special linear pipeline", sl_pipeline),
        ("9", "Vershik-Kerov", vershik_kerov),
        ("10", "window closure", window_closure),
        ("11", "command-line round trip", cli_round_trip),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:<9} PASS  {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                let note = if KNOWN.contains(&id) {
                    " (documented)"
                } else {
                    ""
                };
                println!("criterion {id:<9} FAIL{note}  {name}: {detail} [{secs:.2}s]");
                if note.is_empty() {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
