//! Dense univariate polynomials over the integers.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use rug::{Integer, Rational};

use crate::interval::Interval;

/// Coefficients are stored from the constant term upward, with no trailing
/// zeros; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct IntPoly {
    coeffs: Vec<Integer>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Integer::from(x)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Integer) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Integer::from(1))
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![Integer::new(); n + 1];
        c[0] = Integer::from(-1);
        c[n] = Integer::from(1);
        IntPoly { coeffs: c }
    }

    /// `den·x - num`.
    pub fn linear_from_rational(q: &Rational) -> Self {
        Self::new(vec![-Integer::from(q.numer()), q.denom().clone()])
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> Integer {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in &self.coeffs {
            g.gcd_mut(c);
            if g == 1 {
                break;
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lead() < 0 {
            g = -g;
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| Integer::from(c / &g)).collect(),
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1 && self.lead() > 0
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| Integer::from(-c)).collect(),
        }
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut c = vec![Integer::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += Integer::from(a * b);
            }
        }
        IntPoly::new(c)
    }

    pub fn scale(&self, k: &Integer) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| Integer::from(c * k)).collect())
    }

    pub fn pow(&self, n: u32) -> IntPoly {
        let mut acc = IntPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Integer::from(c * i as u64))
                .collect(),
        )
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { Integer::from(-c) } else { c.clone() })
                .collect(),
        )
    }

    /// `x^deg · p(1/x)`.
    pub fn reverse(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::new(c)
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Sign of `p(x)`, computed on the homogenized integer form.
    pub fn sign_at(&self, x: &Rational) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let (a, b) = (x.numer(), x.denom());
        let mut acc = Integer::new();
        let mut bpow = Integer::from(1);
        // Σ c_i a^i b^(n-i), Horner in a with running powers of b.
        for (k, c) in self.coeffs.iter().rev().enumerate() {
            if k == 0 {
                acc = c.clone();
            } else {
                bpow *= b;
                acc *= a;
                acc += Integer::from(c * &bpow);
            }
        }
        acc.cmp0()
    }

    pub fn eval_integer(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let prec = x.prec();
        let mut acc = Interval::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&Interval::point(prec, &Rational::from(c)));
        }
        acc
    }

    /// Exact quotient and remainder by `d` over the rationals, returned with
    /// a common positive denominator: `lc(d)^k · self = q·d + r`.
    pub fn pseudo_divrem(&self, d: &IntPoly) -> (IntPoly, IntPoly, u32) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        let lc = d.lead();
        let mut r = self.clone();
        if r.degree().is_none_or(|x| x < dd) {
            return (IntPoly::zero(), r, 0);
        }
        let steps = r.deg() - dd + 1;
        let mut q = vec![Integer::new(); steps];
        let mut k = 0u32;
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let t = r.lead();
            let shift = rd - dd;
            r = r.scale(&lc);
            for c in q.iter_mut() {
                *c *= &lc;
            }
            k += 1;
            q[shift] += &t;
            let mut sub = vec![Integer::new(); shift];
            sub.extend(d.coeffs.iter().map(|c| Integer::from(c * &t)));
            r = r.sub(&IntPoly::new(sub));
        }
        (IntPoly::new(q), r, k)
    }

    /// Exact division; `None` when `d` does not divide `self` in `Z[x]`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let dd = d.deg();
        let lc = d.lead();
        let mut r = self.coeffs.clone();
        let n = self.deg();
        if n < dd {
            return None;
        }
        let mut q = vec![Integer::new(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let t = &r[i + dd];
            if !t.is_divisible(&lc) {
                return None;
            }
            let qi = Integer::from(t / &lc);
            for (j, c) in d.coeffs.iter().enumerate() {
                r[i + j] -= Integer::from(c * &qi);
            }
            q[i] = qi;
        }
        if r.iter().any(|c| *c != 0) {
            return None;
        }
        Some(IntPoly::new(q))
    }

    pub fn divides(&self, other: &IntPoly) -> bool {
        other.div_exact(self).is_some()
    }

    /// Remainder modulo a monic polynomial.
    pub fn rem_monic(&self, m: &IntPoly) -> IntPoly {
        assert!(m.lead() == 1, "modulus must be monic");
        let dm = m.deg();
        let mut r = self.coeffs.clone();
        if r.len() <= dm {
            return self.clone();
        }
        for i in (dm..r.len()).rev() {
            let t = r[i].clone();
            if t == 0 {
                continue;
            }
            for (j, c) in m.coeffs.iter().enumerate() {
                r[i - dm + j] -= Integer::from(c * &t);
            }
        }
        IntPoly::new(r)
    }

    /// Greatest common divisor, primitive with positive leading coefficient
    /// (times the gcd of the contents).
    pub fn gcd(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return o.primitive().scale(&o.content());
        }
        if o.is_zero() {
            return self.primitive().scale(&self.content());
        }
        let c = Integer::from(self.content().gcd_ref(&o.content()));
        let mut a = self.primitive();
        let mut b = o.primitive();
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let (_, r, _) = a.pseudo_divrem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive() };
        }
        a.primitive().scale(&c)
    }

    pub fn squarefree_part(&self) -> IntPoly {
        if self.deg() == 0 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        self.primitive().div_exact(&g.primitive()).expect("gcd divides").primitive()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }

    /// Yun's square-free decomposition of the primitive part:
    /// `p = Π f_i^i` with each `f_i` square-free and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, u32)> {
        let p = self.primitive();
        if p.deg() == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let dp = p.derivative();
        let a0 = p.gcd(&dp).primitive();
        let mut b = p.div_exact(&a0).expect("gcd divides");
        let mut c = dp.div_exact(&a0).unwrap_or_else(|| {
            // Content mismatch only; fall back to rational reasoning.
            let (q, _, _) = dp.pseudo_divrem(&a0);
            q
        });
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.deg() > 0 {
            let a = b.gcd(&d).primitive();
            if a.deg() > 0 {
                out.push((a.clone(), i));
            }
            let nb = b.div_exact(&a).expect("gcd divides");
            c = d.div_exact(&a).unwrap_or_else(|| d.pseudo_divrem(&a).0);
            b = nb;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Upper bound `2^k` on the moduli of all complex roots.
    pub fn root_bound_log2(&self) -> u32 {
        let lc = self.lead().abs();
        let mut m = Rational::new();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let q = Rational::from((c.clone().abs(), lc.clone()));
            if q > m {
                m = q;
            }
        }
        let b = m + 1u32;
        let mut k = 0u32;
        while Rational::from(Integer::from(1) << k) <= b {
            k += 1;
        }
        k
    }

    pub fn sturm_sequence(&self) -> Vec<IntPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let (a, b) = (&seq[n - 2], &seq[n - 1]);
            if b.is_zero() {
                seq.pop();
                break;
            }
            let (_, r, k) = a.pseudo_divrem(b);
            if r.is_zero() {
                break;
            }
            // prem = lc^k · a mod b; the Sturm remainder is -(a mod b).
            let flip = b.lead() < 0 && k % 2 == 1;
            let mut next = if flip { r } else { r.neg() };
            let g = next.content();
            next = IntPoly::new(next.coeffs.iter().map(|c| Integer::from(c / &g)).collect());
            seq.push(next);
        }
        seq
    }

    pub fn count_real_roots(&self) -> usize {
        let p = self.squarefree_part();
        if p.deg() == 0 {
            return 0;
        }
        let k = p.root_bound_log2();
        let b = Rational::from(Integer::from(1) << k);
        let s = p.sturm_sequence();
        sign_changes(&s, &(-b.clone())) - sign_changes(&s, &b)
    }

    /// Isolating intervals for the distinct real roots, in increasing order.
    /// Rational roots found exactly are returned as degenerate intervals;
    /// otherwise the interval is open, contains exactly one root and the
    /// polynomial has opposite nonzero signs at its endpoints.
    pub fn isolate_real_roots(&self) -> Vec<(Rational, Rational)> {
        let p = self.squarefree_part();
        if p.deg() == 0 {
            return Vec::new();
        }
        let k = p.root_bound_log2();
        let b = Rational::from(Integer::from(1) << k);
        let s = p.sturm_sequence();
        let lo = -b.clone();
        let total = sign_changes(&s, &lo) - sign_changes(&s, &b);
        let mut out = Vec::new();
        isolate_rec(&p, &s, lo, b, total, &mut out);
        out
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn roots_in(&self, a: &Rational, b: &Rational) -> usize {
        let p = self.squarefree_part();
        if p.deg() == 0 {
            return 0;
        }
        let s = p.sturm_sequence();
        sign_changes(&s, a) - sign_changes(&s, b)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }
}

fn sign_changes(seq: &[IntPoly], x: &Rational) -> usize {
    let mut last = Ordering::Equal;
    let mut n = 0;
    for p in seq {
        let s = p.sign_at(x);
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

fn isolate_rec(
    p: &IntPoly,
    s: &[IntPoly],
    lo: Rational,
    hi: Rational,
    count: usize,
    out: &mut Vec<(Rational, Rational)>,
) {
    if count == 0 {
        return;
    }
    if count == 1 {
        if p.sign_at(&hi) == Ordering::Equal {
            out.push((hi.clone(), hi));
        } else {
            out.push((lo, hi));
        }
        return;
    }
    let mid = Rational::from(&lo + &hi) / 2u32;
    let left = sign_changes(s, &lo) - sign_changes(s, &mid);
    isolate_rec(p, s, lo, mid.clone(), left, out);
    isolate_rec(p, s, mid, hi, count - left, out);
}

/// Halves an isolating interval `(lo, hi)` of a simple root of `p`.
/// Returns the exact root if the midpoint hits it.
pub fn refine_once(p: &IntPoly, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    if lo == hi {
        return (lo.clone(), hi.clone());
    }
    let mid = Rational::from(lo + hi) / 2u32;
    let sm = p.sign_at(&mid);
    if sm == Ordering::Equal {
        return (mid.clone(), mid);
    }
    if sm == p.sign_at(lo) {
        (mid, hi.clone())
    } else {
        (lo.clone(), mid)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let a = c.clone().abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_c = a != 1 || i == 0;
            if show_c {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show_c { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show_c { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut r = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if m > 1 {
        r -= r / m;
    }
    r
}

fn moebius(n: u64) -> i32 {
    let mut m = n;
    let mut k = 0;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if m > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The `n`-th cyclotomic polynomial, memoised.
pub fn cyclotomic(n: u64) -> IntPoly {
    assert!(n >= 1);
    static CACHE: OnceLock<Mutex<HashMap<u64, IntPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache poisoned").get(&n) {
        return p.clone();
    }
    let mut num = IntPoly::one();
    let mut den = IntPoly::one();
    for d in divisors(n) {
        match moebius(n / d) {
            1 => num = num.mul(&IntPoly::x_pow_minus_one(d as usize)),
            -1 => den = den.mul(&IntPoly::x_pow_minus_one(d as usize)),
            _ => {}
        }
    }
    let p = num.div_exact(&den).expect("cyclotomic quotient is exact");
    cache.lock().expect("cache poisoned").insert(n, p.clone());
    p
}

/// If `p` (primitive, irreducible) equals some `Φ_n`, returns `n`.
pub fn cyclotomic_index(p: &IntPoly) -> Option<u64> {
    let d = p.deg() as u64;
    if d == 0 || !p.is_monic() {
        return None;
    }
    if p.coeff(0).abs() != 1 {
        return None;
    }
    // φ(n) ≥ sqrt(n/2), so n ≤ 2d².
    (1..=2 * d * d + 2)
        .filter(|&n| euler_phi(n) == d)
        .find(|&n| cyclotomic(n) == *p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(6), IntPoly::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), IntPoly::from_i64(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic(5).deg(), 4);
        let mut prod = IntPoly::one();
        for d in divisors(30) {
            prod = prod.mul(&cyclotomic(d));
        }
        assert_eq!(prod, IntPoly::x_pow_minus_one(30));
        assert_eq!(cyclotomic_index(&IntPoly::from_i64(&[1, 1, 1])), Some(3));
        assert_eq!(cyclotomic_index(&IntPoly::from_i64(&[-1, -1, 1])), None);
    }

    #[test]
    fn isolates_sqrt_two() {
        let p = IntPoly::from_i64(&[-2, 0, 1]);
        let roots = p.isolate_real_roots();
        assert_eq!(roots.len(), 2);
        let (lo, hi) = &roots[1];
        assert!(*lo < r(1415, 1000) && *hi > r(1414, 1000));
    }

    #[test]
    fn exact_rational_roots_are_degenerate() {
        // (x - 1/2)(x + 3)
        let p = IntPoly::from_i64(&[-1, 2]).mul(&IntPoly::from_i64(&[3, 1]));
        let roots = p.isolate_real_roots();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|(a, b)| p.sign_at(a) != p.sign_at(b) || a == b));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = IntPoly::from_i64(&[-1, 1]).pow(2).mul(&IntPoly::from_i64(&[2, 1]));
        assert_eq!(a.squarefree_part(), IntPoly::from_i64(&[-1, 1]).mul(&IntPoly::from_i64(&[2, 1])));
        let dec = a.squarefree_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], (IntPoly::from_i64(&[2, 1]), 1));
        assert_eq!(dec[1], (IntPoly::from_i64(&[-1, 1]), 2));
    }

    #[test]
    fn sturm_counts() {
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        assert_eq!(p.count_real_roots(), 2);
        assert_eq!(IntPoly::from_i64(&[1, 0, 1]).count_real_roots(), 0);
        assert_eq!(p.roots_in(&r(1, 1), &r(2, 1)), 1);
    }
}
