//! Tiny enumeration helpers shared by the oracle and the coding layer.

/// All `k`-element subsets of `0..n`, each sorted ascending, in
/// lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current = Vec::with_capacity(k);
    fn rec(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, start: usize, n: usize, k: usize) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let needed = k - current.len();
        for v in start..=n - needed {
            current.push(v);
            rec(out, current, v + 1, n, k);
            current.pop();
        }
    }
    rec(&mut out, &mut current, 0, n, k);
    out
}

/// All length-`len` vectors over `0..base`, odometer order.
pub(crate) fn vectors(base: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut v = vec![0u64; len];
    loop {
        out.push(v.clone());
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            v[pos] += 1;
            if v[pos] < base {
                break;
            }
            v[pos] = 0;
        }
    }
}
