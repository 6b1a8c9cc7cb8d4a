//! Compositions and partitions.

/// All compositions of `n` in lexicographic order; `n = 0` gives the empty one.
pub fn compositions(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for rest in compositions(n - first) {
            let mut c = vec![first];
            c.extend(rest);
            out.push(c);
        }
    }
    out
}

/// All partitions of `n` as weakly decreasing sequences, in lexicographic order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in 1..=max.min(n) {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `m_l(c) = #{k | c_k = l}`.
pub fn multiplicity(c: &[u32], l: u32) -> u32 {
    c.iter().filter(|&&x| x == l).count() as u32
}

/// Sorts parts into the canonical (weakly decreasing) partition order.
pub fn sorted_partition(mut c: Vec<u32>) -> Vec<u32> {
    c.sort_unstable_by(|a, b| b.cmp(a));
    c
}

/// All ways to write `n` as an ordered sum of `k` nonnegative integers bounded by `caps`.
pub fn bounded_splits(n: u32, caps: &[u32]) -> Vec<Vec<u32>> {
    fn go(k: usize, left: u32, caps: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: u32 = caps[k + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        for x in lo..=caps[k].min(left) {
            cur.push(x);
            go(k + 1, left - x, caps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, caps, &mut Vec::new(), &mut out);
    out
}
