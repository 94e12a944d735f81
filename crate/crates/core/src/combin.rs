//! Binomial counts and multi-index bookkeeping.

use rug::Integer;

pub fn binomial(n: u32, k: u32) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k))
}

/// `D_n(d) = C(n + d, n)`: the number of monomials of degree at most `d`
/// in `n` variables.
pub fn monomial_count(n: u32, d: u32) -> Integer {
    binomial(n + d, n)
}

pub fn monomial_count_usize(n: usize, d: usize) -> usize {
    monomial_count(n as u32, d as u32)
        .to_usize()
        .expect("monomial count overflows usize")
}

/// All exponent vectors of length `n` with total degree at most `d`,
/// graded by degree, then in reverse lexicographic order within a degree
/// (so `x1` precedes `x2`).
pub fn multi_indices(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(monomial_count_usize(n, d));
    for deg in 0..=d {
        let mut cur = vec![0u32; n];
        fill(&mut out, &mut cur, 0, deg as u32);
    }
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, left: u32) {
    if pos + 1 >= cur.len() {
        if let Some(k) = cur.len().checked_sub(1) {
            cur[k] = left;
            out.push(cur.clone());
            cur[k] = 0;
        } else if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for v in (0..=left).rev() {
        cur[pos] = v;
        fill(out, cur, pos + 1, left - v);
    }
    cur[pos] = 0;
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// `α! = α_1! ⋯ α_k!`.
pub fn multi_factorial(alpha: &[u32]) -> Integer {
    alpha.iter().fold(Integer::from(1), |acc, &a| acc * factorial(a))
}

pub fn degree(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}
