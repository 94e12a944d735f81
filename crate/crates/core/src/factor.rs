//! Factorization in `Z[x]`: Cantor–Zassenhaus modulo a small prime,
//! Hensel lifting and exhaustive recombination.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::Integer;

use crate::poly::IntPoly;

type Zp = Vec<u64>;

fn trim(a: &mut Zp) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod_u(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv(a: u64, p: u64) -> u64 {
    powmod_u(a, p - 2, p)
}

fn rem_pos(c: &Integer, m: &Integer) -> Integer {
    let mut r = Integer::from(c % m);
    if r < 0 {
        r += m;
    }
    r
}

fn reduce(f: &IntPoly, p: u64) -> Zp {
    let pi = Integer::from(p);
    let mut v: Zp = f
        .coeffs()
        .iter()
        .map(|c| rem_pos(c, &pi).to_u64().expect("residue fits"))
        .collect();
    trim(&mut v);
    v
}

fn sub(a: &Zp, b: &Zp, p: u64) -> Zp {
    let n = a.len().max(b.len());
    let mut v: Zp = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut v);
    v
}

fn mul(a: &Zp, b: &Zp, p: u64) -> Zp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            v[i + j] = (v[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(&mut v);
    v
}

fn divrem(a: &Zp, b: &Zp, p: u64) -> (Zp, Zp) {
    assert!(!b.is_empty());
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let li = inv(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - db];
    for i in (0..q.len()).rev() {
        let t = mulmod(r[i + db], li, p);
        q[i] = t;
        if t == 0 {
            continue;
        }
        for (j, &c) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + p - mulmod(c, t, p)) % p;
        }
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

fn monic(a: &Zp, p: u64) -> Zp {
    let li = inv(*a.last().unwrap(), p);
    a.iter().map(|&c| mulmod(c, li, p)).collect()
}

fn gcd(a: &Zp, b: &Zp, p: u64) -> Zp {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b, p);
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        monic(&a, p)
    }
}

/// Extended gcd: returns `(g, s, t)` with `s·a + t·b = g` monic.
fn xgcd(a: &Zp, b: &Zp, p: u64) -> (Zp, Zp, Zp) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        let t = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let li = inv(*r0.last().unwrap(), p);
    let sc = |v: &Zp| -> Zp {
        let mut w: Zp = v.iter().map(|&c| mulmod(c, li, p)).collect();
        trim(&mut w);
        w
    };
    (sc(&r0), sc(&s0), sc(&t0))
}

fn powmod_poly(base: &Zp, e: &Integer, m: &Zp, p: u64) -> Zp {
    let mut result = vec![1u64];
    let mut b = divrem(base, m, p).1;
    let bits = e.significant_bits();
    for i in 0..bits {
        if e.get_bit(i) {
            result = divrem(&mul(&result, &b, p), m, p).1;
        }
        b = divrem(&mul(&b, &b, p), m, p).1;
    }
    result
}

fn derivative(a: &Zp, p: u64) -> Zp {
    let mut v: Zp = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mulmod(c, i as u64 % p, p))
        .collect();
    trim(&mut v);
    v
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn distinct_degree(f: &Zp, p: u64) -> Vec<(Zp, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let mut d = 1;
    let pe = Integer::from(p);
    while f.len() - 1 >= 2 * d {
        h = powmod_poly(&h, &pe, &f, p);
        let g = gcd(&sub(&h, &x, p), &f, p);
        if g.len() > 1 {
            out.push((g.clone(), d));
            f = divrem(&f, &g, p).0;
            h = divrem(&h, &f, p).1;
        }
        d += 1;
    }
    if f.len() > 1 {
        let deg = f.len() - 1;
        out.push((f, deg));
    }
    out
}

fn equal_degree(f: &Zp, d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<Zp>) {
    let n = f.len() - 1;
    if n == d {
        out.push(f.clone());
        return;
    }
    let e = (Integer::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let mut a: Zp = (0..n).map(|_| rng.gen_range(0..p)).collect();
        trim(&mut a);
        if a.len() < 2 {
            continue;
        }
        let b = sub(&powmod_poly(&a, &e, f, p), &[1u64].to_vec(), p);
        let g = gcd(&b, f, p);
        if g.len() > 1 && g.len() < f.len() {
            let q = divrem(f, &g, p).0;
            equal_degree(&g, d, p, rng, out);
            equal_degree(&monic(&q, p), d, p, rng, out);
            return;
        }
    }
}

fn factor_mod_p(f: &Zp, p: u64) -> Vec<Zp> {
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&monic(f, p), p) {
        equal_degree(&g, d, p, &mut rng, &mut out);
    }
    out
}

const PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn symmetric(c: &Integer, m: &Integer) -> Integer {
    let mut r = rem_pos(c, m);
    if Integer::from(&r * 2u32) > *m {
        r -= m;
    }
    r
}

fn to_int(a: &Zp) -> IntPoly {
    IntPoly::new(a.iter().map(|&c| Integer::from(c)).collect())
}

fn mod_poly(f: &IntPoly, m: &Integer) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|c| rem_pos(c, m)).collect())
}

/// Lifts `f ≡ g·h (mod p)` with monic `g` to the same relation modulo
/// `p^k`, keeping `g` monic.
fn hensel_two(f: &IntPoly, g: &Zp, h: &Zp, p: u64, k: u32) -> (IntPoly, IntPoly) {
    let pi = Integer::from(p);
    let lc = f.lead();
    let mut gz = to_int(g);
    let mut hz = mod_poly(&to_int(h).scale(&lc), &pi);
    let (one, s, t) = xgcd(g, &reduce(&hz, p), p);
    debug_assert_eq!(one, vec![1]);
    let mut pk = pi.clone();
    for _ in 1..k {
        let diff = f.sub(&gz.mul(&hz));
        let e_int = IntPoly::new(diff.coeffs().iter().map(|c| Integer::from(c / &pk)).collect());
        let e = reduce(&e_int, p);
        // With s·g + t·h = 1 and t·e = q·g + rho, the corrections are
        // rho for g and s·e + q·h for h.
        let (q, rho) = divrem(&mul(&t, &e, p), g, p);
        let hdelta = add_zp(&mul(&s, &e, p), &mul(&q, &reduce(&hz, p), p), p);
        let next = Integer::from(&pk * &pi);
        gz = mod_poly(&gz.add(&to_int(&rho).scale(&pk)), &next);
        hz = mod_poly(&hz.add(&to_int(&hdelta).scale(&pk)), &next);
        pk = next;
    }
    (gz, hz)
}

fn add_zp(a: &Zp, b: &Zp, p: u64) -> Zp {
    let n = a.len().max(b.len());
    let mut v: Zp = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(&mut v);
    v
}

/// Lifts a full modular factorization of `f` (all factors monic, product
/// equal to `f / lc(f)` mod `p`) to modulus `p^k`.
fn hensel_multi(f: &IntPoly, factors: &[Zp], p: u64, k: u32) -> Vec<IntPoly> {
    if factors.len() == 1 {
        return vec![to_int(&factors[0])];
    }
    let g = factors[0].clone();
    let mut h = vec![1u64];
    for q in &factors[1..] {
        h = mul(&h, q, p);
    }
    let (gz, hz) = hensel_two(f, &g, &h, p, k);
    let mut out = vec![gz];
    out.extend(hensel_multi(&hz, &factors[1..], p, k));
    out
}

/// Irreducible factors of a primitive square-free polynomial of positive
/// degree.
fn factor_squarefree(f: &IntPoly) -> Vec<IntPoly> {
    let n = f.deg();
    if n <= 1 {
        return vec![f.clone()];
    }
    let lc = f.lead();
    let mut best: Option<(u64, Vec<Zp>)> = None;
    for &p in PRIMES.iter() {
        if lc.is_divisible_u(p as u32) {
            continue;
        }
        let fp = reduce(f, p);
        if fp.len() - 1 != n {
            continue;
        }
        let dfp = derivative(&fp, p);
        if gcd(&fp, &dfp, p).len() != 1 {
            continue;
        }
        let facs = factor_mod_p(&fp, p);
        if facs.len() == 1 {
            return vec![f.clone()];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        if best.as_ref().is_some_and(|(_, b)| b.len() <= 2) {
            break;
        }
    }
    let (p, facs) = match best {
        Some(b) => b,
        // No suitable prime below 100: leave the polynomial unsplit.
        None => return vec![f.clone()],
    };
    // Mignotte-style bound on factor coefficients, doubled for sign.
    let norm = f.coeffs().iter().map(|c| Integer::from(c * c)).fold(Integer::new(), |a, b| a + b);
    let norm = norm.sqrt() + 1u32;
    let bound = Integer::from(norm << (n as u32 + 1)) * lc.clone().abs() * 2u32;
    let mut k = 1u32;
    let mut pk = Integer::from(p);
    while pk <= bound {
        pk *= p;
        k += 1;
    }
    let lifted = hensel_multi(f, &facs, p, k);
    recombine(f, lifted, &pk)
}

fn recombine(f: &IntPoly, mut lifted: Vec<IntPoly>, pk: &Integer) -> Vec<IntPoly> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut found = false;
        let r = lifted.len();
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            let lc = f.lead();
            let mut g = IntPoly::constant(lc.clone());
            for &i in &idx {
                g = g.mul(&lifted[i]);
                g = IntPoly::new(g.coeffs().iter().map(|c| symmetric(c, pk)).collect());
            }
            let g = g.primitive();
            if g.deg() > 0 {
                if let Some(q) = f.div_exact(&g) {
                    out.push(g);
                    f = q.primitive();
                    let mut rest = Vec::new();
                    for (i, l) in lifted.into_iter().enumerate() {
                        if !idx.contains(&i) {
                            rest.push(l);
                        }
                    }
                    lifted = rest;
                    found = true;
                    break;
                }
            }
            if !next_combination(&mut idx, r) {
                break;
            }
        }
        if !found {
            s += 1;
        }
    }
    if f.deg() > 0 {
        out.push(f.primitive());
    }
    out
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Complete factorization: `p = content · Π f_i^{m_i}` with each `f_i`
/// primitive, irreducible, with positive leading coefficient.
pub fn factor(p: &IntPoly) -> (Integer, Vec<(IntPoly, u32)>) {
    let mut content = p.content();
    if p.lead() < 0 {
        content = -content;
    }
    let mut out = Vec::new();
    for (q, m) in p.squarefree_decomposition() {
        // Strip the factor x separately; it is handled exactly.
        let mut q = q;
        if q.coeff(0) == 0 {
            out.push((IntPoly::x(), m));
            q = q.div_exact(&IntPoly::x()).expect("x divides").primitive();
        }
        if q.deg() == 0 {
            continue;
        }
        for f in factor_squarefree(&q) {
            out.push((f, m));
        }
    }
    out.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())));
    (content, out)
}

pub fn is_irreducible(p: &IntPoly) -> bool {
    let (_, f) = factor(p);
    f.len() == 1 && f[0].1 == 1 && p.content() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(c: &Integer, f: &[(IntPoly, u32)]) -> IntPoly {
        let mut acc = IntPoly::constant(c.clone());
        for (q, m) in f {
            acc = acc.mul(&q.pow(*m));
        }
        acc
    }

    #[test]
    fn factors_x4_minus_1() {
        let p = IntPoly::x_pow_minus_one(4);
        let (c, f) = factor(&p);
        assert_eq!(f.len(), 3);
        assert_eq!(expand(&c, &f), p);
    }

    #[test]
    fn swinnerton_dyer_like_stays_irreducible() {
        // x^4 - 10x^2 + 1 splits modulo every prime but is irreducible.
        let p = IntPoly::from_i64(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&p));
    }

    #[test]
    fn mixed_product_round_trips() {
        let a = IntPoly::from_i64(&[-2, 0, 1]);
        let b = IntPoly::from_i64(&[1, 1, 3]);
        let c = IntPoly::from_i64(&[5, 0, 0, 2]);
        let p = a.mul(&b).mul(&c).mul(&b).scale(&Integer::from(-6));
        let (k, f) = factor(&p);
        assert_eq!(k, -6);
        assert_eq!(f.len(), 3);
        assert_eq!(expand(&k, &f), p);
    }

    #[test]
    fn x30_minus_1_is_product_of_cyclotomics() {
        let p = IntPoly::x_pow_minus_one(30);
        let (_, f) = factor(&p);
        assert_eq!(f.len(), crate::poly::divisors(30).len());
    }
}
