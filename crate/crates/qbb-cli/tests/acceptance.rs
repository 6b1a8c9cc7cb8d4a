//! Acceptance criteria, one line each. Exact arithmetic throughout.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use qbb::ambient::Ambient;
use qbb::free_algebra::{commutator_element, serre_element, Form, Letter};
use qbb::global_basis::{AForm, GlobalBasis};
use qbb::suites::{run_suite, serre_cases, SuiteContext};
use qbb::uminus::UMinus;
use qbb::{BorcherdsCartanDatum, Coeff, Matrix, Rational, RootVector, Scalar};

fn datum(a: &[&[i64]]) -> BorcherdsCartanDatum {
    let n = a.len();
    let names = ["i", "j"][..n].iter().map(|s| s.to_string()).collect();
    BorcherdsCartanDatum::new(names, a.iter().map(|r| r.to_vec()).collect(), vec![1; n]).unwrap()
}

fn d_iso() -> BorcherdsCartanDatum {
    datum(&[&[0]])
}

fn d_im() -> BorcherdsCartanDatum {
    datum(&[&[-2]])
}

fn d_mix() -> BorcherdsCartanDatum {
    datum(&[&[2, -1], &[-1, 0]])
}

fn form(d: BorcherdsCartanDatum) -> Form {
    Form::new(Arc::new(d))
}

fn ctx(d: BorcherdsCartanDatum) -> SuiteContext {
    SuiteContext::new(Arc::new(UMinus::with_datum(d, 4)), 4, vec![]).unwrap()
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn is_identity(m: &Matrix<Coeff>) -> bool {
    m.rows() == m.cols()
        && (0..m.rows()).all(|r| (0..m.cols()).all(|c| m.row(r)[c] == Coeff::from_int(if r == c { 1 } else { 0 })))
}

fn compositions(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Partitions as multiplicity vectors `m[k-1]` = number of parts equal to `k`.
fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![0; max as usize]];
    }
    let mut out = Vec::new();
    for k in (1..=max.min(n)).rev() {
        for mut p in partitions(n - k, k) {
            p.resize(max as usize, 0);
            p[k as usize - 1] += 1;
            out.push(p);
        }
    }
    out
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(rat(1, 1), |a, k| a * rat(k, 1))
}

/// `[n]!` from `[k] = (q^k - q^-k)/(q - q^-1)`.
fn q_factorial(n: u32) -> Scalar {
    let q = |e: i64| Scalar::q_pow(e);
    let mut acc = Scalar::from_int(1);
    for k in 1..=n as i64 {
        let num = &q(k) - &q(-k);
        let den = &q(1) - &q(-1);
        acc = &acc * &num.try_div(&den).unwrap();
    }
    acc
}

fn suites_pass(c: &SuiteContext, names: &[&str]) -> Result<(), String> {
    for s in names {
        let r = run_suite(s, c).map_err(|e| format!("{s}: {e}"))?;
        if !r.passed {
            return Err(format!("{s} on {:?}: {:?}", c.datum().cartan, r.counterexample));
        }
    }
    Ok(())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn serre_radical() -> Result<(), String> {
    let d = d_mix();
    let f = form(d.clone());
    let (i, j) = (0, 1);
    let mut cases: Vec<(usize, Vec<u32>, u32)> = (1..=4).map(|m| (i, vec![], m)).collect();
    for n in 1..=2u32 {
        for c in compositions(n) {
            for m in (n + 1)..=4 {
                cases.push((j, c.clone(), m));
            }
        }
    }
    ensure(cases.len() * 2 == serre_cases(&d, 4, 2).len(), || "case count differs from the library enumeration".into())?;
    for (jj, c, m) in &cases {
        for sign in [1, -1] {
            let x = serre_element(&d, i, *jj, *m, c, sign).map_err(|e| e.to_string())?;
            ensure(f.radical_contains(&x).map_err(|e| e.to_string())?, || format!("j={jj} c={c:?} m={m} sign={sign}"))?;
        }
    }
    Ok(())
}

fn commutator_radical() -> Result<(), String> {
    for d in [datum(&[&[-2, 0], &[0, -2]]), datum(&[&[0, 0], &[0, -2]]), datum(&[&[2, 0], &[0, 0]])] {
        let f = form(d.clone());
        let levels = |x: usize| if d.is_real(x) { 1 } else { 3 };
        for k in 1..=levels(0) {
            for l in 1..=levels(1) {
                let x = commutator_element(&d, 0, k, 1, l).map_err(|e| e.to_string())?;
                ensure(f.radical_contains(&x).map_err(|e| e.to_string())?, || format!("{:?}: k={k} l={l}", d.cartan))?;
            }
        }
    }
    Ok(())
}

fn tau_congruences() -> Result<(), String> {
    for (d, iso) in [(d_iso(), true), (d_im(), false)] {
        let u = UMinus::with_datum(d, 4);
        for l in 1..=4u32 {
            let v = u.tau(0, l).and_then(|t| t.value_at_zero()).map_err(|e| e.to_string())?;
            let want = if iso { Coeff::from_rational(rat(1, l as i64)) } else { Coeff::from_int(1) };
            ensure(v == want, || format!("tau(i,{l}) at 0 is {v}, want {want}"))?;
        }
    }
    Ok(())
}

fn partition_identity() -> Result<(), String> {
    for l in 1..=8u32 {
        let mut s = rat(0, 1);
        for p in partitions(l, l) {
            let mut den = rat(1, 1);
            for (k, &m) in p.iter().enumerate() {
                den = den * rat(k as i64 + 1, 1).pow(m as i32) * factorial(m);
            }
            s += rat(1, 1) / den;
        }
        ensure(s == rat(1, 1), || format!("l = {l}: sum is {s}"))?;
    }
    Ok(())
}

fn orthonormality(ctxs: &[SuiteContext]) -> Result<(), String> {
    for c in ctxs {
        let binf = c.binf().map_err(|e| e.to_string())?;
        for a in c.weights() {
            let g = binf.q0_gram(&a).map_err(|e| e.to_string())?;
            ensure(g.rows() == c.u.dim(&a).unwrap() && is_identity(&g), || format!("B(inf) at {a:?}"))?;
        }
        for lam in &c.lambdas {
            let bl = c.blam(lam).map_err(|e| e.to_string())?;
            for a in c.weights() {
                let g = bl.q0_gram(&a).map_err(|e| e.to_string())?;
                ensure(g.rows() == bl.at(&a).len() && is_identity(&g), || format!("B({lam:?}) at {a:?}"))?;
            }
        }
    }
    Ok(())
}

const OPERATOR_SUITES: &[&str] = &[
    "delta-product",
    "boson-relations",
    "eprime-edoubleprime-commutation",
    "adjunction-L1",
    "star-isometry-L2",
    "divided-power-eprime",
    "projector-P",
    "involutions",
    "decomposition",
    "kashiwara",
    "sl2-recovery",
    "qbrace-action",
    "form-comparison",
    "crystal-adjunction",
];

fn operators(ctxs: &[SuiteContext]) -> Result<(), String> {
    ctxs.iter().try_for_each(|c| suites_pass(c, OPERATOR_SUITES))
}

fn global_existence(ctxs: &[SuiteContext]) -> Result<(), String> {
    for c in ctxs {
        let gb = c.global_u().map_err(|e| e.to_string())?;
        for a in c.weights() {
            let w = gb.at(&a).ok_or_else(|| format!("no weight {a:?}"))?;
            ensure(w.entries.len() == c.u.dim(&a).unwrap(), || format!("{a:?}: wrong count"))?;
            ensure(w.balanced.certified && w.unimodular && w.entries.iter().all(|e| e.certified()), || format!("{a:?}: not certified"))?;
        }
    }
    let u = Arc::new(UMinus::with_datum(datum(&[&[2]]), 4));
    let af = AForm::new(u.clone());
    let cr = Arc::new(qbb::crystal::Crystal::build(u.clone(), 4).map_err(|e| e.to_string())?);
    let gb = GlobalBasis::build(cr.clone(), 4, |a| Ok(af.basis(a)?.to_vec())).map_err(|e| e.to_string())?;
    for n in 0..=4u32 {
        let ids = cr.at(&RootVector(vec![n]));
        ensure(ids.len() == 1, || format!("n = {n}: {} vertices", ids.len()))?;
        let want = u.word(&vec![Letter::new(0, 1); n as usize]).map_err(|e| e.to_string())?;
        let want = want.scale(&q_factorial(n).try_inv().unwrap());
        ensure(gb.g(ids[0]) == Some(&want), || format!("G(f^{n}) is not the divided power"))?;
    }
    Ok(())
}

fn global_compatibility(ctxs: &[SuiteContext]) -> Result<(), String> {
    ctxs.iter().try_for_each(|c| suites_pass(c, &["global-basis", "global-compatibility"]))
}

fn balanced_triples(ctxs: &[SuiteContext]) -> Result<(), String> {
    for c in ctxs {
        let gu = c.global_u().map_err(|e| e.to_string())?;
        ensure(gu.weights().all(|w| w.balanced.certified), || "U-".into())?;
        for lam in &c.lambdas {
            let gv = c.global_v(lam).map_err(|e| e.to_string())?;
            ensure(gv.weights().all(|w| w.balanced.certified), || format!("V({lam:?})"))?;
        }
    }
    ctxs.iter().try_for_each(|c| suites_pass(c, &["balanced-triples"]))
}

fn grand_loop(ctxs: &[SuiteContext]) -> Result<(), String> {
    ctxs.iter().try_for_each(|c| suites_pass(c, &["grand-loop"]))
}

fn determinism() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("qbb.toml");
    std::fs::write(&cfg, "[datum]\nindices = [\"i\", \"j\"]\ncartan = [[2, -1], [-1, 0]]\nsymmetrizer = [1, 1]\n").map_err(|e| e.to_string())?;
    let run = |jobs: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_qbb"))
            .args(["--config", cfg.to_str().unwrap(), "--no-cache", "--jobs", jobs, "verify", "--suite", "all", "--height", "3"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), || format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
        Ok(out.stdout)
    };
    let runs = [run("1")?, run("1")?, run("8")?, run("8")?];
    ensure(!runs[0].is_empty() && runs.iter().all(|r| *r == runs[0]), || "reports differ".into())
}

fn main() {
    let ctxs = [ctx(d_iso()), ctx(d_im()), ctx(d_mix())];
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<(), String>>)> = vec![
        ("serre elements lie in the radical", Box::new(serre_radical)),
        ("commutators lie in the radical", Box::new(commutator_radical)),
        ("tau values at q = 0", Box::new(tau_congruences)),
        ("partition identity", Box::new(partition_identity)),
        ("crystal orthonormality", Box::new(|| orthonormality(&ctxs))),
        ("operator identity suites", Box::new(|| operators(&ctxs))),
        ("global basis existence and uniqueness", Box::new(|| global_existence(&ctxs))),
        ("global basis compatibility", Box::new(|| global_compatibility(&ctxs))),
        ("balanced triples", Box::new(|| balanced_triples(&ctxs))),
        ("grand loop", Box::new(|| grand_loop(&ctxs))),
        ("determinism across job counts", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({secs:.1}s)", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {e}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
