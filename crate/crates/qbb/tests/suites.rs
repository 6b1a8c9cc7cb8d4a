use std::sync::Arc;

use qbb::suites::{canonical_name, run_suite, SuiteContext, SUITES};
use qbb::uminus::UMinus;
use qbb::{BorcherdsCartanDatum, DominantWeight};

fn u_of(a: Vec<Vec<i64>>, h: u32) -> Arc<UMinus> {
    let n = a.len();
    let names = (0..n).map(|k| ["i", "j"][k].to_string()).collect();
    Arc::new(UMinus::with_datum(BorcherdsCartanDatum::new(names, a, vec![1; n]).unwrap(), h))
}

fn run_everything(a: Vec<Vec<i64>>, h: u32) {
    let ctx = SuiteContext::new(u_of(a.clone(), h), h, vec![]).unwrap();
    for s in SUITES {
        let t = std::time::Instant::now();
        let r = run_suite(s, &ctx).unwrap();
        eprintln!("{a:?} {s}: {} checks, {:?}", r.checks, t.elapsed());
        assert!(r.passed, "{a:?} {s}: {:?}", r.counterexample);
    }
}

#[test]
fn all_suites_isotropic() {
    run_everything(vec![vec![0]], 4);
}

#[test]
fn all_suites_imaginary() {
    run_everything(vec![vec![-2]], 4);
}

#[test]
fn all_suites_mixed() {
    run_everything(vec![vec![2, -1], vec![-1, 0]], 4);
}

#[test]
fn all_suites_real() {
    run_everything(vec![vec![2]], 4);
}

#[test]
fn registry() {
    assert_eq!(canonical_name("divided-power-e'"), Some("divided-power-eprime"));
    assert_eq!(canonical_name("nope"), None);
    let ctx = SuiteContext::new(u_of(vec![vec![0]], 2), 2, vec![DominantWeight(vec![1])]).unwrap();
    assert!(run_suite("nope", &ctx).is_err());
    assert!(SuiteContext::new(u_of(vec![vec![0]], 2), 3, vec![]).is_err());
}
