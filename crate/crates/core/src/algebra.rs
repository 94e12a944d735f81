//! Characteristic polynomials of multiplication maps on
//! `Q[X_1,…,X_n] / (p_1(X_1), …, p_n(X_n))`.
//!
//! For an element `u = f(X)` the characteristic polynomial has the values
//! `f(ζ)` as roots, where `ζ` runs over all tuples of roots of the `p_j`.
//! This gives exact resultant-style decisions without multivariate
//! resultants.

use rug::{Integer, Rational};

use crate::multipoly::MultiPoly;
use crate::poly::IntPoly;

struct Algebra {
    // Monic reduction rules: X_j^{m_j} = Σ_i rule[j][i] X_j^i.
    rules: Vec<Vec<Rational>>,
    dims: Vec<usize>,
    size: usize,
}

impl Algebra {
    fn new(polys: &[IntPoly]) -> Self {
        let mut rules = Vec::new();
        let mut dims = Vec::new();
        for p in polys {
            let m = p.deg();
            assert!(m >= 1, "defining polynomials must be non-constant");
            let lc = p.lead();
            rules.push(
                (0..m)
                    .map(|i| -Rational::from((p.coeff(i), lc.clone())))
                    .collect(),
            );
            dims.push(m);
        }
        let size = dims.iter().product();
        Algebra { rules, dims, size }
    }

    fn stride(&self, j: usize) -> usize {
        self.dims[j + 1..].iter().product()
    }

    fn mul_var(&self, v: &[Rational], j: usize) -> Vec<Rational> {
        let m = self.dims[j];
        let st = self.stride(j);
        let mut out = vec![Rational::new(); self.size];
        for (idx, c) in v.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let e = (idx / st) % m;
            if e + 1 < m {
                out[idx + st] += c;
            } else {
                let base = idx - e * st;
                for (i, r) in self.rules[j].iter().enumerate() {
                    if *r != 0 {
                        out[base + i * st] += Rational::from(c * r);
                    }
                }
            }
        }
        out
    }

    fn element(&self, f: &MultiPoly) -> Vec<Rational> {
        let mut acc = vec![Rational::new(); self.size];
        for (e, c) in f.terms() {
            let mut v = vec![Rational::new(); self.size];
            v[0] = Rational::from(c);
            for (j, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    v = self.mul_var(&v, j);
                }
            }
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
        }
        acc
    }

    fn exponents(&self, mut idx: usize) -> Vec<usize> {
        let mut e = vec![0; self.dims.len()];
        for j in (0..self.dims.len()).rev() {
            e[j] = idx % self.dims[j];
            idx /= self.dims[j];
        }
        e
    }

    fn multiplication_matrix(&self, u: &[Rational]) -> Vec<Vec<Rational>> {
        let mut cols = Vec::with_capacity(self.size);
        for b in 0..self.size {
            let mut v = u.to_vec();
            for (j, &k) in self.exponents(b).iter().enumerate() {
                for _ in 0..k {
                    v = self.mul_var(&v, j);
                }
            }
            cols.push(v);
        }
        // Row-major matrix whose b-th column is u·e_b.
        (0..self.size)
            .map(|i| (0..self.size).map(|b| cols[b][i].clone()).collect())
            .collect()
    }
}

fn hessenberg(h: &mut [Vec<Rational>]) {
    let n = h.len();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        for i in j + 2..n {
            if h[i][j] == 0 {
                continue;
            }
            let m = Rational::from(&h[i][j] / &h[j + 1][j]);
            for c in 0..n {
                let t = Rational::from(&m * &h[j + 1][c]);
                h[i][c] -= t;
            }
            for row in h.iter_mut() {
                let t = Rational::from(&m * &row[i]);
                row[j + 1] += t;
            }
        }
    }
}

fn qpoly_mul_linear(p: &[Rational], a: &Rational) -> Vec<Rational> {
    // (x - a)·p
    let mut out = vec![Rational::new(); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= Rational::from(c * a);
    }
    out
}

/// Characteristic polynomial of a square rational matrix, via reduction to
/// upper Hessenberg form.
pub fn charpoly_matrix(m: &[Vec<Rational>]) -> Vec<Rational> {
    let n = m.len();
    let mut h: Vec<Vec<Rational>> = m.to_vec();
    hessenberg(&mut h);
    let mut ps: Vec<Vec<Rational>> = vec![vec![Rational::from(1)]];
    for k in 1..=n {
        let mut pk = qpoly_mul_linear(&ps[k - 1], &h[k - 1][k - 1]);
        let mut prod = Rational::from(1);
        for i in (1..k).rev() {
            prod *= &h[i][i - 1];
            if prod == 0 {
                break;
            }
            let coef = Rational::from(&prod * &h[i - 1][k - 1]);
            for (t, c) in ps[i - 1].iter().enumerate() {
                pk[t] -= Rational::from(&coef * c);
            }
        }
        ps.push(pk);
    }
    ps.pop().expect("non-empty")
}

/// Scales a rational polynomial to a primitive integer polynomial.
pub fn to_primitive(p: &[Rational]) -> IntPoly {
    let mut l = Integer::from(1);
    for c in p {
        l.lcm_mut(c.denom());
    }
    IntPoly::new(
        p.iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom())))
            .collect(),
    )
    .primitive()
}

/// Characteristic polynomial (primitive, integer) of multiplication by
/// `f(X)` in the tensor algebra defined by `polys`.
pub fn charpoly_element(polys: &[IntPoly], f: &MultiPoly) -> IntPoly {
    assert_eq!(polys.len(), f.nvars());
    let alg = Algebra::new(polys);
    let u = alg.element(f);
    let m = alg.multiplication_matrix(&u);
    to_primitive(&charpoly_matrix(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_square_roots() {
        // sqrt2 + sqrt3 has minimal polynomial x^4 - 10x^2 + 1.
        let p2 = IntPoly::from_i64(&[-2, 0, 1]);
        let p3 = IntPoly::from_i64(&[-3, 0, 1]);
        let f = MultiPoly::var(2, 0).add(&MultiPoly::var(2, 1));
        let c = charpoly_element(&[p2, p3], &f);
        assert_eq!(c, IntPoly::from_i64(&[1, 0, -10, 0, 1]));
    }

    #[test]
    fn square_of_root_over_non_monic() {
        // x = 3/2 from 2x - 3; x^2 has charpoly 4x - 9.
        let p = IntPoly::from_i64(&[-3, 2]);
        let f = MultiPoly::var(1, 0).pow(2);
        assert_eq!(charpoly_element(&[p], &f), IntPoly::from_i64(&[-9, 4]));
    }

    #[test]
    fn matrix_charpoly() {
        let m = vec![
            vec![Rational::from(2), Rational::from(1)],
            vec![Rational::from(1), Rational::from(2)],
        ];
        // (x-1)(x-3)
        let c = charpoly_matrix(&m);
        assert_eq!(c, vec![Rational::from(3), Rational::from(-4), Rational::from(1)]);
    }
}
