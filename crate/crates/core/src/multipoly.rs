//! Sparse multivariate polynomials with integer coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::interval::Interval;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiPoly {
    nvars: usize,
    #[serde(with = "terms_serde")]
    terms: BTreeMap<Vec<u32>, Integer>,
}

mod terms_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        t: &BTreeMap<Vec<u32>, Integer>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_seq(t.iter().map(|(e, c)| (e.clone(), c.to_string())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Vec<u32>, Integer>, D::Error> {
        let raw = Vec::<(Vec<u32>, String)>::deserialize(d)?;
        raw.into_iter()
            .map(|(e, c)| {
                c.parse::<Integer>()
                    .map(|c| (e, c))
                    .map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Integer) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Integer::from(1));
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Integer)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Integer) {
        if c == 0 {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Integer)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, j: usize) -> u32 {
        self.terms.keys().map(|e| e[j]).max().unwrap_or(0)
    }

    /// `|f|`: the maximum absolute value of a coefficient.
    pub fn height(&self) -> Integer {
        self.terms
            .values()
            .map(|c| c.clone().abs())
            .max()
            .unwrap_or_default()
    }

    pub fn add(&self, o: &MultiPoly) -> MultiPoly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &MultiPoly) -> MultiPoly {
        self.add(&o.scale(&Integer::from(-1)))
    }

    pub fn scale(&self, k: &Integer) -> MultiPoly {
        MultiPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| (e.clone(), Integer::from(c * k))),
        )
    }

    pub fn mul(&self, o: &MultiPoly) -> MultiPoly {
        let mut p = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, Integer::from(c1 * c2));
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.nvars, Integer::from(1));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars);
        let mut acc = Rational::new();
        for (e, c) in &self.terms {
            let mut t = Rational::from(c);
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= Rational::from(xi.pow_ref_u(k));
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_interval(&self, x: &[Interval]) -> Interval {
        assert_eq!(x.len(), self.nvars);
        let prec = x.iter().map(|i| i.prec()).max().unwrap_or(64);
        let mut acc = Interval::zero(prec);
        for (e, c) in &self.terms {
            let mut t = Interval::point(prec, &Rational::from(c));
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&xi.powi(k as i64).expect("non-negative power"));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

trait PowU {
    fn pow_ref_u(&self, k: u32) -> Rational;
}

impl PowU for Rational {
    fn pow_ref_u(&self, k: u32) -> Rational {
        Rational::from((
            Integer::from(self.numer().clone().pow(k)),
            Integer::from(self.denom().clone().pow(k)),
        ))
    }
}

fn var_name(nvars: usize, j: usize) -> String {
    if nvars <= 3 {
        ["x", "y", "z"][j].to_string()
    } else {
        format!("x{}", j + 1)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (e, c) in items {
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
            let mut parts = Vec::new();
            if a != 1 || e.iter().all(|&k| k == 0) {
                parts.push(a.to_string());
            }
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => parts.push(var_name(self.nvars, j)),
                    _ => parts.push(format!("{}^{k}", var_name(self.nvars, j))),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vanishes_on_graph() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let f = y.sub(&x.pow(2));
        let q = [Rational::from((1, 3)), Rational::from((1, 9))];
        assert_eq!(f.eval_rational(&q), 0);
        assert_eq!(f.to_string(), "-x^2 + y");
        assert_eq!(f.height(), 1);
        assert_eq!(f.total_degree(), 2);
    }
}
