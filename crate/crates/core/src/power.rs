//! Exact positive reals of the form `Π b_i^{e_i}` with rational bases and
//! rational exponents.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Serialize, Serializer};

use crate::interval::Interval;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerProduct {
    // Canonical: bases > 1, distinct, sorted ascending; exponents nonzero.
    factors: Vec<(Rational, Rational)>,
}

impl PowerProduct {
    pub fn one() -> Self {
        PowerProduct { factors: Vec::new() }
    }

    /// `base^exp`; panics unless `base > 0`.
    pub fn power(base: &Rational, exp: &Rational) -> Self {
        assert!(*base > 0, "power product bases must be positive");
        let mut p = PowerProduct::one();
        p.push(base.clone(), exp.clone());
        p
    }

    pub fn rational(q: &Rational) -> Self {
        Self::power(q, &Rational::from(1))
    }

    pub fn int(n: i64) -> Self {
        Self::rational(&Rational::from(n))
    }

    fn push(&mut self, base: Rational, exp: Rational) {
        if base == 1 || exp == 0 {
            return;
        }
        let (base, exp) = if base < 1 { (base.recip(), -exp) } else { (base, exp) };
        match self.factors.binary_search_by(|(b, _)| b.cmp(&base)) {
            Ok(i) => {
                self.factors[i].1 += exp;
                if self.factors[i].1 == 0 {
                    self.factors.remove(i);
                }
            }
            Err(i) => self.factors.insert(i, (base, exp)),
        }
    }

    pub fn factors(&self) -> &[(Rational, Rational)] {
        &self.factors
    }

    pub fn mul(&self, other: &PowerProduct) -> PowerProduct {
        let mut p = self.clone();
        for (b, e) in &other.factors {
            p.push(b.clone(), e.clone());
        }
        p
    }

    pub fn pow(&self, e: &Rational) -> PowerProduct {
        let mut p = PowerProduct::one();
        for (b, x) in &self.factors {
            p.push(b.clone(), Rational::from(x * e));
        }
        p
    }

    pub fn recip(&self) -> PowerProduct {
        self.pow(&Rational::from(-1))
    }

    pub fn div(&self, other: &PowerProduct) -> PowerProduct {
        self.mul(&other.recip())
    }

    /// Exact rational value when all exponents are integers.
    pub fn as_rational(&self) -> Option<Rational> {
        let mut acc = Rational::from(1);
        for (b, e) in &self.factors {
            if *e.denom() != 1 {
                return None;
            }
            let n = e.numer().to_i32()?;
            acc *= Rational::from(b.pow_ref_rational(n));
        }
        Some(acc)
    }

    /// Enclosure of the natural logarithm.
    pub fn ln_enclosure(&self, prec: u32) -> Interval {
        let mut acc = Interval::zero(prec);
        for (b, e) in &self.factors {
            let lb = Interval::point(prec, b).ln().expect("base > 0");
            acc = acc.add(&lb.mul_rational(e));
        }
        acc
    }

    pub fn enclosure(&self, prec: u32) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(prec, &q);
        }
        self.ln_enclosure(prec + 16).exp().with_prec(prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure(64).mid_f64()
    }

    pub fn log10_f64(&self) -> f64 {
        self.ln_enclosure(64).mid_f64() / std::f64::consts::LN_10
    }

    /// Exact comparison with another power product.
    pub fn cmp_exact(&self, other: &PowerProduct) -> Ordering {
        let q = self.div(other);
        if q.factors.is_empty() {
            return Ordering::Equal;
        }
        for prec in [128u32, 512] {
            if let Some(o) = q.ln_enclosure(prec).sign() {
                if o != Ordering::Equal {
                    return o;
                }
            }
        }
        q.cmp_one_exact()
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if *r <= 0 {
            return Ordering::Greater;
        }
        self.cmp_exact(&PowerProduct::rational(r))
    }

    // Raise to the lcm of exponent denominators and compare integers.
    fn cmp_one_exact(&self) -> Ordering {
        let mut l = Integer::from(1);
        for (_, e) in &self.factors {
            l.lcm_mut(e.denom());
        }
        let mut up = Integer::from(1);
        let mut down = Integer::from(1);
        for (b, e) in &self.factors {
            let k = Integer::from(e.numer() * &l) / e.denom();
            let n = k.to_i64().expect("exponent too large for exact comparison");
            let (pos, neg) = if n >= 0 {
                (b.numer(), b.denom())
            } else {
                (b.denom(), b.numer())
            };
            let m = n.unsigned_abs() as u32;
            up *= Integer::from(pos.clone().pow(m));
            down *= Integer::from(neg.clone().pow(m));
        }
        up.cmp(&down)
    }

    pub fn le(&self, other: &PowerProduct) -> bool {
        self.cmp_exact(other) != Ordering::Greater
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }
}

trait RationalPow {
    fn pow_ref_rational(&self, n: i32) -> Rational;
}

impl RationalPow for Rational {
    fn pow_ref_rational(&self, n: i32) -> Rational {
        let m = n.unsigned_abs();
        let v = Rational::from((
            Integer::from(self.numer().clone().pow(m)),
            Integer::from(self.denom().clone().pow(m)),
        ));
        if n < 0 {
            v.recip()
        } else {
            v
        }
    }
}

impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (b, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{b}")?;
            } else {
                write!(f, "({b})^({e})")?;
            }
        }
        Ok(())
    }
}

impl Serialize for PowerProduct {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PowerProduct", 2)?;
        st.serialize_field("exact", &self.to_string())?;
        st.serialize_field("approx", &self.to_f64())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn canonical_merge() {
        let a = PowerProduct::power(&r(1, 2), &r(3, 1));
        let b = PowerProduct::power(&r(2, 1), &r(3, 1));
        assert!(a.mul(&b).is_one());
        assert_eq!(a.as_rational(), Some(r(1, 8)));
    }

    #[test]
    fn sqrt_two_squared_is_two() {
        let s = PowerProduct::power(&r(2, 1), &r(1, 2));
        assert_eq!(s.pow(&r(2, 1)).as_rational(), Some(r(2, 1)));
        assert_eq!(s.cmp_rational(&r(1414, 1000)), Ordering::Greater);
        assert_eq!(s.cmp_rational(&r(1415, 1000)), Ordering::Less);
    }

    #[test]
    fn exact_tie_detected() {
        // 8^(1/3) = 4^(1/2)
        let a = PowerProduct::power(&r(8, 1), &r(1, 3));
        let b = PowerProduct::power(&r(4, 1), &r(1, 2));
        assert_eq!(a.cmp_exact(&b), Ordering::Equal);
        assert_eq!(a.cmp_one_exact_for_test(&b), Ordering::Equal);
    }

    impl PowerProduct {
        fn cmp_one_exact_for_test(&self, o: &PowerProduct) -> Ordering {
            self.div(o).cmp_one_exact()
        }
    }
}
