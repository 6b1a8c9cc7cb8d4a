use qbb::combinat::{bounded_splits, compositions, partitions};
use qbb::{BorcherdsCartanDatum, DominantWeight, Error, IndexKind, RootVector};

fn mix() -> BorcherdsCartanDatum {
    BorcherdsCartanDatum::new(vec!["i".into(), "j".into()], vec![vec![2, -1], vec![-1, 0]], vec![1, 1]).unwrap()
}

#[test]
fn validation_conditions() {
    let bad = |a: Vec<Vec<i64>>, r: Vec<i64>| {
        let n = a.len();
        let names = (0..n).map(|k| format!("x{k}")).collect();
        BorcherdsCartanDatum::new(names, a, r).unwrap_err()
    };
    let msg = |e: Error| e.to_string();
    assert!(msg(bad(vec![vec![1]], vec![1])).contains("condition (i)"));
    assert!(msg(bad(vec![vec![-1]], vec![1])).contains("condition (i)"));
    assert!(msg(bad(vec![vec![2, 1], vec![-1, 2]], vec![1, 1])).contains("condition (ii)"));
    assert!(msg(bad(vec![vec![2, -1], vec![-2, 2]], vec![1, 1])).contains("condition (iii)"));
    assert!(msg(bad(vec![vec![2]], vec![0])).contains("condition (iii)"));
    // B2-type with symmetrizer (2, 1)
    assert!(BorcherdsCartanDatum::new(vec!["a".into(), "b".into()], vec![vec![2, -1], vec![-2, 2]], vec![2, 1]).is_ok());
    assert!(BorcherdsCartanDatum::new(vec!["a".into(), "a".into()], vec![vec![2, 0], vec![0, 2]], vec![1, 1]).is_err());
}

#[test]
fn kinds_and_pairings() {
    let d = mix();
    assert_eq!(d.kind(0), IndexKind::Real);
    assert_eq!(d.kind(1), IndexKind::Isotropic);
    assert!(d.is_imaginary(1));
    assert_eq!(BorcherdsCartanDatum::rank_one(-4).unwrap().kind(0), IndexKind::Imaginary);
    let a = RootVector(vec![2, 1]);
    // (2α_i+α_j, 2α_i+α_j) = 4·2 + 4·(-1) + 0 = 4
    assert_eq!(d.pairing(&a, &a), 4);
    assert_eq!(d.pairing_simple(0, &a), 3);
    assert_eq!(d.coroot(1, &a), -2);
    assert_eq!(d.coroot_shifted(0, &DominantWeight(vec![1, 0]), &a), -2);
    assert_eq!(d.q_paren_exp(0), 1);
    assert_eq!(d.q_paren_exp(1), 0);
}

#[test]
fn root_and_lambda_parsing() {
    let d = mix();
    assert_eq!(d.parse_root("2*i,1*j").unwrap(), RootVector(vec![2, 1]));
    assert_eq!(d.parse_root("j,i,i").unwrap(), RootVector(vec![2, 1]));
    assert_eq!(d.parse_root("").unwrap(), RootVector(vec![0, 0]));
    assert_eq!(d.format_root(&RootVector(vec![2, 1])), "2*i,1*j");
    assert_eq!(d.parse_lambda("j=5").unwrap(), DominantWeight(vec![0, 5]));
    assert_eq!(d.format_lambda(&DominantWeight(vec![1, 0])), "i=1,j=0");
    match d.parse_root("2*k").unwrap_err() {
        Error::Parse(e) => assert_eq!((e.column, e.message.as_str()), (3, "unknown index 'k'")),
        e => panic!("{e}"),
    }
    assert!(d.parse_root("2i").is_err());
    assert!(d.parse_lambda("i:1").is_err());
    assert_eq!(d.roots_of_height(2), vec![RootVector(vec![2, 0]), RootVector(vec![1, 1]), RootVector(vec![0, 2])]);
}

#[test]
fn combinatorics_counts() {
    // 2^{n-1} compositions, p(n) partitions
    for n in 1..=8u32 {
        assert_eq!(compositions(n).len(), 1 << (n - 1));
    }
    let p = [1, 1, 2, 3, 5, 7, 11, 15, 22];
    for n in 0..=8u32 {
        assert_eq!(partitions(n).len(), p[n as usize]);
        assert!(partitions(n).iter().all(|l| l.windows(2).all(|w| w[0] >= w[1]) && l.iter().sum::<u32>() == n));
    }
    assert_eq!(compositions(0), vec![Vec::<u32>::new()]);
    assert_eq!(compositions(3), vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]);
    let s = bounded_splits(2, &[1, 0, 2]);
    assert_eq!(s.len(), 2);
    assert!(s.iter().all(|v| v.iter().sum::<u32>() == 2 && v[1] == 0 && v[0] <= 1));
}
