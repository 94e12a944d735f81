//! Real algebraic numbers, Weil heights and Liouville-type lower bounds.

use std::cmp::Ordering;
use std::fmt;

use rug::{Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::charpoly_element;
use crate::combin::monomial_count;
use crate::croots::mahler_enclosure;
use crate::error::{Error, Result};
use crate::factor::factor;
use crate::interval::Interval;
use crate::multipoly::MultiPoly;
use crate::poly::{cyclotomic_index, refine_once, IntPoly};
use crate::power::PowerProduct;

const MAX_PREC: u32 = 1 << 14;

/// A height together with a certified enclosure; `exact` is present when
/// the value is a rational power of a rational.
#[derive(Clone, Debug)]
pub struct HeightValue {
    pub exact: Option<PowerProduct>,
    pub enclosure: Interval,
}

impl HeightValue {
    pub fn from_exact(p: PowerProduct, prec: u32) -> Self {
        let enclosure = p.enclosure(prec);
        HeightValue {
            exact: Some(p),
            enclosure,
        }
    }

    pub fn value(&self) -> f64 {
        match &self.exact {
            Some(p) => p.to_f64(),
            None => self.enclosure.mid_f64(),
        }
    }

    /// Exact integer value when the height is an integer.
    pub fn as_integer(&self) -> Option<Integer> {
        let q = self.exact.as_ref()?.as_rational()?;
        (*q.denom() == 1).then(|| q.numer().clone())
    }

    /// A power product that is at least the height: the exact value when
    /// known, otherwise the enclosure's upper endpoint.
    pub fn upper(&self) -> PowerProduct {
        match &self.exact {
            Some(p) => p.clone(),
            None => PowerProduct::rational(&self.enclosure.hi_rational()),
        }
    }

    pub fn cmp_power(&self, t: &PowerProduct) -> Option<Ordering> {
        if let Some(p) = &self.exact {
            return Some(p.cmp_exact(t));
        }
        let te = t.enclosure(self.enclosure.prec());
        if self.enclosure.hi() < te.lo() {
            Some(Ordering::Less)
        } else if self.enclosure.lo() > te.hi() {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

impl Serialize for HeightValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HeightValue", 4)?;
        st.serialize_field("value", &self.value())?;
        st.serialize_field("exact", &self.exact.as_ref().map(|p| p.to_string()))?;
        st.serialize_field("lo", &self.enclosure.lo_rational().to_string())?;
        st.serialize_field("hi", &self.enclosure.hi_rational().to_string())?;
        st.end()
    }
}

/// `H(a/b) = max(|a|, b)`.
pub fn height_rational(q: &Rational) -> HeightValue {
    let h = Integer::from(q.numer().abs_ref()).max(q.denom().clone());
    HeightValue::from_exact(PowerProduct::rational(&Rational::from(h)), 64)
}

/// A real algebraic number: its primitive irreducible minimal polynomial
/// with positive leading coefficient, and an isolating interval. Rational
/// numbers carry a degenerate isolator.
#[derive(Clone, Debug)]
pub struct RealAlgebraic {
    minpoly: IntPoly,
    lo: Rational,
    hi: Rational,
}

impl RealAlgebraic {
    pub fn from_rational(q: &Rational) -> Self {
        RealAlgebraic {
            minpoly: IntPoly::linear_from_rational(q),
            lo: q.clone(),
            hi: q.clone(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from(n))
    }

    /// All distinct real roots of a nonzero polynomial, in increasing order.
    pub fn real_roots(p: &IntPoly) -> Vec<RealAlgebraic> {
        let mut out = Vec::new();
        let (_, facs) = factor(p);
        for (f, _) in facs {
            for (lo, hi) in f.isolate_real_roots() {
                out.push(RealAlgebraic::from_parts(f.clone(), lo, hi));
            }
        }
        out.sort_by(|a, b| a.cmp(b));
        out
    }

    fn from_parts(minpoly: IntPoly, lo: Rational, hi: Rational) -> Self {
        if minpoly.deg() == 1 {
            let q = Rational::from((-minpoly.coeff(0), minpoly.coeff(1)));
            return Self::from_rational(&q);
        }
        RealAlgebraic { minpoly, lo, hi }
    }

    /// The real root of `p` nearest to `approx`.
    pub fn root_near(p: &IntPoly, approx: &Rational) -> Result<Self> {
        let roots = Self::real_roots(p);
        if roots.is_empty() {
            return Err(Error::Invalid(format!("{p} has no real roots")));
        }
        let dist = |r: &RealAlgebraic| {
            let e = r.enclosure(128);
            let m = e.mid_rational();
            Rational::from(&m - approx).abs()
        };
        let mut best = roots[0].clone();
        let mut bd = dist(&best);
        for r in roots.into_iter().skip(1) {
            let d = dist(&r);
            if d < bd {
                bd = d;
                best = r;
            }
        }
        Ok(best)
    }

    /// Positive square root of a positive rational.
    pub fn sqrt(q: &Rational) -> Result<Self> {
        if *q <= 0 {
            return Err(Error::DomainViolation("sqrt of a non-positive rational".into()));
        }
        let p = IntPoly::new(vec![-Integer::from(q.numer()), Integer::new(), q.denom().clone()]);
        Self::root_near(&p, &Rational::from_f64(q.to_f64().sqrt()).unwrap_or_default())
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.minpoly
    }

    pub fn isolator(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn degree(&self) -> usize {
        self.minpoly.deg()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        (self.lo == self.hi).then(|| self.lo.clone())
    }

    /// Isolator refined to width at most `2^-bits`.
    pub fn refined(&self, bits: u32) -> RealAlgebraic {
        let goal = Rational::from((1, Integer::from(1) << bits));
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        while Rational::from(&hi - &lo) > goal {
            (lo, hi) = refine_once(&self.minpoly, &lo, &hi);
        }
        RealAlgebraic {
            minpoly: self.minpoly.clone(),
            lo,
            hi,
        }
    }

    pub fn enclosure(&self, prec: u32) -> Interval {
        if self.lo == self.hi {
            return Interval::point(prec, &self.lo);
        }
        let r = self.refined(prec);
        Interval::from_rationals(prec, &r.lo, &r.hi)
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure(64).mid_f64()
    }

    /// Exact equality test.
    pub fn equals(&self, o: &RealAlgebraic) -> bool {
        if self.minpoly != o.minpoly {
            return false;
        }
        if self.lo == self.hi {
            return self.lo == o.lo;
        }
        let a = self.lo.clone().max(o.lo.clone());
        let b = self.hi.clone().min(o.hi.clone());
        if a > b {
            return false;
        }
        // Both isolators contain one root each; they agree iff the
        // intersection contains a root.
        let at_a = usize::from(self.minpoly.sign_at(&a) == Ordering::Equal);
        self.minpoly.roots_in(&a, &b) + at_a > 0
    }

    pub fn cmp(&self, o: &RealAlgebraic) -> Ordering {
        if self.equals(o) {
            return Ordering::Equal;
        }
        let (mut x, mut y) = (self.clone(), o.clone());
        let mut bits = 8;
        loop {
            if x.hi < y.lo {
                return Ordering::Less;
            }
            if y.hi < x.lo {
                return Ordering::Greater;
            }
            x = x.refined(bits);
            y = y.refined(bits);
            bits *= 2;
        }
    }

    pub fn sign(&self) -> Ordering {
        self.cmp(&RealAlgebraic::from_int(0))
    }
}

impl PartialEq for RealAlgebraic {
    fn eq(&self, o: &Self) -> bool {
        self.equals(o)
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(q) => write!(f, "{q}"),
            None => write!(f, "root of {} in ({}, {})", self.minpoly, self.lo, self.hi),
        }
    }
}

impl Serialize for RealAlgebraic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RealAlgebraic", 3)?;
        let c: Vec<String> = self.minpoly.coeffs().iter().map(|c| c.to_string()).collect();
        st.serialize_field("minpoly", &c)?;
        st.serialize_field("isolator", &[self.lo.to_string(), self.hi.to_string()])?;
        st.serialize_field("degree", &self.degree())?;
        st.end()
    }
}

/// Height of a real algebraic number with enclosure radius at most
/// `2^-precision`.
pub fn height_algebraic(q: &RealAlgebraic, precision: u32) -> Result<HeightValue> {
    if let Some(r) = q.as_rational() {
        return Ok(height_rational(&r));
    }
    let p = &q.minpoly;
    let n = p.deg() as u32;
    let prec = precision + 64;
    if cyclotomic_index(p).is_some() {
        return Ok(HeightValue::from_exact(PowerProduct::one(), prec));
    }
    let inv_n = Rational::from((1, n));
    let mut bits = precision + 16;
    loop {
        let (m, inside, outside) = mahler_enclosure(p, bits, MAX_PREC)?;
        let exact = if inside == p.deg() {
            Some(Rational::from(p.lead()))
        } else if outside == p.deg() {
            Some(Rational::from(p.coeff(0).abs()))
        } else {
            None
        };
        if let Some(mv) = exact {
            return Ok(HeightValue::from_exact(PowerProduct::power(&mv, &inv_n), prec));
        }
        let h = m
            .pow(&Interval::point(m.prec(), &inv_n))
            .expect("Mahler measure is at least 1");
        let goal = rug::Float::with_val(prec, rug::Float::i_exp(1, 1 - precision as i32));
        if h.width() <= goal {
            return Ok(HeightValue {
                exact: None,
                enclosure: h,
            });
        }
        if bits >= MAX_PREC / 2 {
            return Err(Error::PrecisionExhausted(format!(
                "height of {q} not resolved to {precision} bits"
            )));
        }
        bits *= 2;
    }
}

/// Refines the value enclosure `eval(prec)` of a number known to be a real
/// root of the square-free polynomial `p` until it meets exactly one
/// isolating interval; returns that root.
pub(crate) fn locate_root<F>(p: &IntPoly, eval: F) -> Result<(IntPoly, Rational, Rational)>
where
    F: Fn(u32) -> Result<Interval>,
{
    let mut roots: Vec<(IntPoly, Rational, Rational)> = Vec::new();
    let (_, facs) = factor(p);
    for (f, _) in facs {
        for (lo, hi) in f.isolate_real_roots() {
            roots.push((f.clone(), lo, hi));
        }
    }
    let mut prec = 64;
    loop {
        let v = eval(prec)?;
        let (vlo, vhi) = (v.lo_rational(), v.hi_rational());
        let hits: Vec<usize> = roots
            .iter()
            .enumerate()
            .filter(|(_, (_, lo, hi))| *lo <= vhi && vlo <= *hi)
            .map(|(i, _)| i)
            .collect();
        match hits.len() {
            0 => {
                return Err(Error::Invalid(
                    "value enclosure misses every root of its annihilating polynomial".into(),
                ))
            }
            1 => return Ok(roots[hits[0]].clone()),
            _ => {}
        }
        if prec >= MAX_PREC {
            return Err(Error::PrecisionExhausted("root location did not separate".into()));
        }
        prec *= 2;
        for (f, lo, hi) in roots.iter_mut() {
            let goal = Rational::from((1, Integer::from(1) << (prec / 2)));
            while *lo != *hi && Rational::from(&*hi - &*lo) > goal {
                let (a, b) = refine_once(f, lo, hi);
                *lo = a;
                *hi = b;
            }
        }
    }
}

fn coords_enclosure(f: &MultiPoly, x: &[RealAlgebraic], prec: u32) -> Interval {
    let xs: Vec<Interval> = x.iter().map(|c| c.enclosure(prec)).collect();
    f.eval_interval(&xs)
}

/// Exact decision of `f(x) = 0`.
pub fn is_zero_at(f: &MultiPoly, x: &[RealAlgebraic]) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    if x.iter().all(|c| c.as_rational().is_some()) {
        let q: Vec<Rational> = x.iter().map(|c| c.as_rational().unwrap()).collect();
        return Ok(f.eval_rational(&q) == 0);
    }
    let polys: Vec<IntPoly> = x.iter().map(|c| c.minpoly.clone()).collect();
    let chi = charpoly_element(&polys, f);
    if chi.coeff(0) != 0 {
        return Ok(false);
    }
    let sqf = chi.squarefree_part();
    let (_, lo, hi) = locate_root(&sqf, |prec| Ok(coords_enclosure(f, x, prec)))?;
    Ok(lo <= 0 && hi >= 0)
}

/// `[Q(x):Q]`, computed as the degree of the minimal polynomial of a
/// primitive element `Σ c_j x_j` of the compositum.
pub fn field_degree(x: &[RealAlgebraic]) -> Result<u32> {
    let irr: Vec<&RealAlgebraic> = x.iter().filter(|c| c.degree() > 1).collect();
    match irr.len() {
        0 => return Ok(1),
        1 => return Ok(irr[0].degree() as u32),
        _ => {}
    }
    let polys: Vec<IntPoly> = irr.iter().map(|c| c.minpoly.clone()).collect();
    let m = irr.len();
    for attempt in 0..64i64 {
        let coeffs: Vec<i64> = (0..m as i64).map(|j| 1 + j * (attempt + 1) + (j * j) % (attempt + 2)).collect();
        let t = MultiPoly::from_terms(
            m,
            coeffs.iter().enumerate().map(|(j, &c)| {
                let mut e = vec![0; m];
                e[j] = 1;
                (e, Integer::from(c))
            }),
        );
        let chi = charpoly_element(&polys, &t);
        if !chi.is_squarefree() {
            continue;
        }
        let vals: Vec<RealAlgebraic> = irr.iter().map(|c| (*c).clone()).collect();
        let (g, _, _) = locate_root(&chi, |prec| Ok(coords_enclosure(&t, &vals, prec)))?;
        return Ok(g.deg() as u32);
    }
    Err(Error::PrecisionExhausted("no primitive element found".into()))
}

/// Height of a tuple: the maximum of the coordinate heights.
pub fn tuple_height(x: &[RealAlgebraic], precision: u32) -> Result<HeightValue> {
    let mut best: Option<HeightValue> = None;
    for c in x {
        let h = height_algebraic(c, precision)?;
        best = Some(match best {
            None => h,
            Some(b) => {
                if h.upper().cmp_exact(&b.upper()) == Ordering::Greater {
                    h
                } else {
                    b
                }
            }
        });
    }
    Ok(best.unwrap_or_else(|| height_rational(&Rational::from(0))))
}

#[derive(Clone, Debug, Serialize)]
pub struct LiouvilleBound {
    pub bound: PowerProduct,
    pub field_degree: u32,
    pub degree: u32,
    pub nvars: usize,
    pub coefficient_height: String,
    pub point_height: HeightValue,
}

/// `(D_n(d)·|f|·H(x)^{dn})^{-[Q(x):Q]}`: if `f(x) ≠ 0` then `|f(x)|` is at
/// least this value.
pub fn liouville_lower_bound(f: &MultiPoly, x: &[RealAlgebraic]) -> Result<LiouvilleBound> {
    if f.is_zero() {
        return Err(Error::Invalid("Liouville bound needs a nonzero polynomial".into()));
    }
    if f.nvars() != x.len() {
        return Err(Error::Invalid("point dimension differs from polynomial arity".into()));
    }
    let n = f.nvars();
    let d = f.total_degree();
    let e = field_degree(x)?;
    let h = tuple_height(x, 64)?;
    let dn = Rational::from(monomial_count(n as u32, d));
    let base = PowerProduct::rational(&dn)
        .mul(&PowerProduct::rational(&Rational::from(f.height())))
        .mul(&h.upper().pow(&Rational::from(d as u64 * n as u64)));
    Ok(LiouvilleBound {
        bound: base.pow(&Rational::from(-(e as i64))),
        field_degree: e,
        degree: d,
        nvars: n,
        coefficient_height: f.height().to_string(),
        point_height: h,
    })
}

/// `(2·H(q)·H(q'))^{-e²}` with `e` the larger degree; `|q - q'|` is at least
/// this value.
pub fn liouville_gap(q: &RealAlgebraic, q2: &RealAlgebraic) -> Result<PowerProduct> {
    if q.equals(q2) {
        return Err(Error::EqualInputs);
    }
    let e = q.degree().max(q2.degree()) as i64;
    let h1 = height_algebraic(q, 64)?.upper();
    let h2 = height_algebraic(q2, 64)?.upper();
    Ok(PowerProduct::int(2).mul(&h1).mul(&h2).pow(&Rational::from(-(e * e))))
}
