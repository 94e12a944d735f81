//! Points of bounded height: rationals by Farey walks, algebraic numbers of
//! small degree by a coefficient search.

use std::cmp::Ordering;

use rug::{Integer, Rational};

use crate::combin::binomial;
use crate::error::{Error, Result};
use crate::expr::Domain;
use crate::factor::is_irreducible;
use crate::heights::{height_algebraic, RealAlgebraic};
use crate::poly::IntPoly;
use crate::power::PowerProduct;

/// Degree cap of [`enumerate_algebraic`].
pub const ALGEBRAIC_MAX_DEGREE: u32 = 3;
/// Largest coefficient search space accepted by [`enumerate_algebraic`].
pub const ALGEBRAIC_MAX_SEARCH: u128 = 5_000_000;

const GRID_BITS: u32 = 60;

fn to_grid(x: &Rational, up: bool) -> (i128, i128) {
    let s = Rational::from(x << GRID_BITS);
    let n = if up { s.ceil() } else { s.floor() };
    let n = n.numer().to_i128().expect("window endpoint in range");
    (n, 1i128 << GRID_BITS)
}

/// Neighbours `l < x ≤ r` in the Farey sequence of order `t`, for
/// `0 < x ≤ 1` given as `p/q`.
fn bracket(t: i128, p: i128, q: i128) -> ((i128, i128), (i128, i128)) {
    let (mut l, mut r) = ((0i128, 1i128), (1i128, 0i128));
    while l.1 + r.1 <= t {
        let m = (l.0 + r.0, l.1 + r.1);
        if m.0 * q >= p * m.1 {
            let num = r.0 * q - p * r.1;
            let den = p * l.1 - l.0 * q;
            let k = (num / den).min((t - r.1) / l.1).max(1);
            r = (r.0 + k * l.0, r.1 + k * l.1);
        } else {
            let num = p * l.1 - l.0 * q;
            let den = r.0 * q - p * r.1;
            let kx = if den == 0 { i128::MAX } else { (num - 1) / den };
            let kt = if r.1 == 0 { i128::MAX } else { (t - l.1) / r.1 };
            let k = kx.min(kt).max(1);
            l = (l.0 + k * r.0, l.1 + k * r.1);
        }
    }
    (l, r)
}

/// Fractions `a/b` with `0 ≤ a ≤ b ≤ t`, `gcd(a, b) = 1`, in `[lo, hi]`
/// where `0 ≤ lo ≤ hi ≤ 1`, increasing.
fn farey_window(t: u64, lo: &Rational, hi: &Rational, out: &mut Vec<(i64, i64)>) {
    let t = t as i128;
    let (p, q) = to_grid(lo, false);
    let (hp, hq) = to_grid(hi, true);
    let (mut a, mut b, mut c, mut d) = if p <= 0 {
        (-1i128, t, 0i128, 1i128)
    } else {
        let (l, r) = bracket(t, p, q);
        (l.0, l.1, r.0, r.1)
    };
    let start = out.len();
    while c * hq <= hp * d && c <= d {
        out.push((c as i64, d as i64));
        let k = (t + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    // The grid rounding widened the window; trim exactly.
    let inside = |&(n, m): &(i64, i64)| {
        let x = Rational::from((n, m));
        x >= *lo && x <= *hi
    };
    let mut i = start;
    while i < out.len() && !inside(&out[i]) {
        i += 1;
    }
    out.drain(start..i);
    while out.len() > start && !inside(out.last().expect("nonempty")) {
        out.pop();
    }
}

fn nonneg_window(t: u64, lo: &Rational, hi: &Rational) -> Vec<(i64, i64)> {
    let one = Rational::from(1);
    let mut out = Vec::new();
    if *lo <= 1 {
        farey_window(t, lo, &hi.clone().min(one.clone()), &mut out);
    }
    if *hi > 1 {
        // x = n/d > 1 has height n; walk y = d/n in (0, 1).
        let ylo = Rational::from(hi.recip_ref());
        let yhi = if *lo > 1 { Rational::from(lo.recip_ref()) } else { one.clone() };
        let mut ys = Vec::new();
        farey_window(t, &ylo, &yhi, &mut ys);
        ys.retain(|&(a, b)| !(a == b && *lo <= 1) && a > 0);
        out.extend(ys.into_iter().rev().map(|(a, b)| (b, a)));
    }
    out
}

/// Numerator/denominator pairs of all rationals of height at most `t` in
/// `[lo, hi]`, increasing.
pub fn height_window(t: u64, lo: &Rational, hi: &Rational) -> Vec<(i64, i64)> {
    if lo > hi || t == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    if *lo < 0 {
        let nlo = Rational::from(-hi).max(Rational::new());
        let nhi = Rational::from(-lo);
        let mut neg = nonneg_window(t, &nlo, &nhi);
        neg.retain(|&(a, _)| a != 0);
        out.extend(neg.into_iter().rev().map(|(a, b)| (-a, b)));
    }
    if *hi >= 0 {
        out.extend(nonneg_window(t, &lo.clone().max(Rational::new()), hi));
    }
    out
}

/// Rationals of height at most `t` in `[lo, hi]`, increasing.
pub fn rationals_in(t: u64, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    height_window(t, lo, hi).into_iter().map(Rational::from).collect()
}

/// Number of rationals of height at most `t` in `[0, 1]`, by walking the
/// Farey sequence without materializing it.
pub fn count_unit_rationals(t: u64) -> u64 {
    if t == 0 {
        return 0;
    }
    let t = t as i128;
    let (mut a, mut b, mut c, mut d) = (-1i128, t, 0i128, 1i128);
    let mut n = 0;
    while c <= d {
        n += 1;
        let k = (t + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    n
}

/// `1 + Σ_{b ≤ t} φ(b)` by a sieve; the size of the Farey sequence of
/// order `t`.
pub fn farey_length(t: u64) -> u64 {
    if t == 0 {
        return 0;
    }
    let t = t as usize;
    let mut phi: Vec<u64> = (0..=t as u64).collect();
    for p in 2..=t {
        if phi[p] == p as u64 {
            for m in (p..=t).step_by(p) {
                phi[m] -= phi[m] / p as u64;
            }
        }
    }
    1 + phi[1..].iter().sum::<u64>()
}

/// Odometer over the product of per-coordinate lists, first coordinate
/// slowest.
#[derive(Clone, Debug)]
pub struct PointGrid {
    lists: Vec<Vec<Rational>>,
    idx: Vec<usize>,
    done: bool,
}

impl PointGrid {
    pub fn new(lists: Vec<Vec<Rational>>) -> Self {
        let done = lists.is_empty() || lists.iter().any(Vec::is_empty);
        PointGrid {
            idx: vec![0; lists.len()],
            lists,
            done,
        }
    }

    /// Number of points, without iterating.
    pub fn total(&self) -> u128 {
        if self.lists.is_empty() {
            return 0;
        }
        self.lists.iter().map(|l| l.len() as u128).product()
    }
}

impl Iterator for PointGrid {
    type Item = Vec<Rational>;

    fn next(&mut self) -> Option<Vec<Rational>> {
        if self.done {
            return None;
        }
        let p = self.idx.iter().zip(&self.lists).map(|(&i, l)| l[i].clone()).collect();
        let mut j = self.lists.len();
        loop {
            if j == 0 {
                self.done = true;
                break;
            }
            j -= 1;
            self.idx[j] += 1;
            if self.idx[j] < self.lists[j].len() {
                break;
            }
            self.idx[j] = 0;
        }
        Some(p)
    }
}

/// The points of `Q^n(t, 1)`, optionally inside a window, each once.
pub fn enumerate_rationals(t: u64, n: usize, window: Option<&Domain>) -> Result<PointGrid> {
    if t == 0 {
        return Err(Error::Invalid("height bound must be at least 1".into()));
    }
    if let Some(w) = window {
        if w.dim() != n {
            return Err(Error::Invalid("window dimension differs from n".into()));
        }
    }
    let tt = Rational::from(t);
    let lists = (0..n)
        .map(|j| match window {
            Some(w) => rationals_in(t, &w.lo()[j], &w.hi()[j]),
            None => rationals_in(t, &Rational::from(-&tt), &tt),
        })
        .collect();
    Ok(PointGrid::new(lists))
}

fn floor_int(x: &Rational) -> Integer {
    x.clone().floor().numer().clone()
}

/// All real algebraic numbers of degree at most `e` and height at most `t`
/// in `[lo, hi]`, increasing. Candidates come from the coefficient bound
/// `|p_j| ≤ C(deg, j)·t^deg` on minimal polynomials.
pub fn enumerate_algebraic(t: &Rational, e: u32, lo: &Rational, hi: &Rational) -> Result<Vec<RealAlgebraic>> {
    if *t < 1 {
        return Err(Error::Invalid("height bound must be at least 1".into()));
    }
    if e == 0 || e > ALGEBRAIC_MAX_DEGREE {
        return Err(Error::FeasibilityCap(format!(
            "degree {e} outside 1..={ALGEBRAIC_MAX_DEGREE}"
        )));
    }
    let mut out: Vec<RealAlgebraic> = rationals_in(floor_int(t).to_u64().unwrap_or(u64::MAX), lo, hi)
        .iter()
        .map(RealAlgebraic::from_rational)
        .collect();
    let rlo = RealAlgebraic::from_rational(lo);
    let rhi = RealAlgebraic::from_rational(hi);
    for deg in 2..=e {
        let tpow = t.clone().pow_u(deg);
        let bounds: Vec<i64> = (0..=deg)
            .map(|j| {
                floor_int(&Rational::from(&tpow * binomial(deg, j)))
                    .to_i64()
                    .unwrap_or(i64::MAX)
            })
            .collect();
        let space: u128 = bounds[..deg as usize]
            .iter()
            .map(|&b| 2 * b as u128 + 1)
            .product::<u128>()
            * bounds[deg as usize] as u128;
        if space > ALGEBRAIC_MAX_SEARCH {
            return Err(Error::FeasibilityCap(format!(
                "degree {deg} search space of {space} polynomials"
            )));
        }
        let tpp = PowerProduct::rational(t);
        let mut c = vec![0i64; deg as usize + 1];
        search(&bounds, deg as usize, &mut c, &mut |coeffs| {
            let p = IntPoly::from_i64(coeffs);
            if !p.is_primitive() || !is_irreducible(&p) {
                return Ok(());
            }
            let roots: Vec<RealAlgebraic> = RealAlgebraic::real_roots(&p)
                .into_iter()
                .filter(|r| r.cmp(&rlo) != Ordering::Less && r.cmp(&rhi) != Ordering::Greater)
                .collect();
            if roots.is_empty() {
                return Ok(());
            }
            let h = height_algebraic(&roots[0], 64)?;
            let ok = match h.cmp_power(&tpp) {
                Some(o) => o != Ordering::Greater,
                None => {
                    let h = height_algebraic(&roots[0], 256)?;
                    match h.cmp_power(&tpp) {
                        Some(o) => o != Ordering::Greater,
                        None => {
                            return Err(Error::PrecisionExhausted(format!(
                                "height of a root of {p} against {t}"
                            )))
                        }
                    }
                }
            };
            if ok {
                out.extend(roots);
            }
            Ok(())
        })?;
    }
    out.sort_by(|a, b| a.cmp(b));
    Ok(out)
}

// Leading coefficient positive, constant term nonzero.
fn search(bounds: &[i64], j: usize, c: &mut Vec<i64>, f: &mut dyn FnMut(&[i64]) -> Result<()>) -> Result<()> {
    let deg = c.len() - 1;
    let (from, to) = if j == deg { (1, bounds[j]) } else { (-bounds[j], bounds[j]) };
    for v in from..=to {
        if j == 0 && v == 0 {
            continue;
        }
        c[j] = v;
        if j == 0 {
            f(c)?;
        } else {
            search(bounds, j - 1, c, f)?;
        }
    }
    Ok(())
}

trait PowU {
    fn pow_u(self, k: u32) -> Rational;
}

impl PowU for Rational {
    fn pow_u(self, k: u32) -> Rational {
        (0..k).fold(Rational::from(1), |acc, _| acc * &self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn farey_examples() {
        let v = rationals_in(5, &q(0, 1), &q(1, 1));
        assert_eq!(v.len(), 11);
        assert_eq!(v[1], q(1, 5));
        assert_eq!(rationals_in(1, &q(0, 1), &q(1, 1)), vec![q(0, 1), q(1, 1)]);
        assert_eq!(count_unit_rationals(100), 3045);
        assert_eq!(farey_length(100), 3045);
    }

    #[test]
    fn windows_outside_unit_interval() {
        let v = rationals_in(3, &q(-3, 1), &q(3, 1));
        let mut brute = Vec::new();
        for b in 1..=3i64 {
            for a in -3..=3i64 {
                let x = q(a, b);
                if *x.denom() == b as u32 && !brute.contains(&x) {
                    brute.push(x);
                }
            }
        }
        brute.sort();
        assert_eq!(v, brute);
        assert_eq!(rationals_in(7, &q(1, 3), &q(1, 3)), vec![q(1, 3)]);
        assert_eq!(rationals_in(7, &q(3, 2), &q(5, 3)), vec![q(3, 2), q(5, 3)]);
        assert_eq!(rationals_in(8, &q(3, 2), &q(5, 3)), vec![q(3, 2), q(8, 5), q(5, 3)]);
    }

    #[test]
    fn algebraic_examples() {
        let t = q(14143, 10000);
        let v = enumerate_algebraic(&t, 2, &q(14, 10), &q(15, 10)).unwrap();
        let s2 = RealAlgebraic::sqrt(&q(2, 1)).unwrap();
        assert!(v.iter().any(|x| x.equals(&s2)));
        let v = enumerate_algebraic(&q(1, 1), 2, &q(-2, 1), &q(2, 1)).unwrap();
        let vals: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(vals, vec!["-1", "0", "1"]);
        let a = enumerate_algebraic(&q(3, 1), 1, &q(0, 1), &q(1, 1)).unwrap();
        assert_eq!(a.len(), rationals_in(3, &q(0, 1), &q(1, 1)).len());
    }
}
