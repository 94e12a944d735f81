//! Outward-rounded interval arithmetic on MPFR floats.
//!
//! Every operation returns an interval guaranteed to contain the exact
//! result of applying the operation to any point of the inputs. Endpoints
//! are rounded away from the enclosed set using MPFR's directed rounding,
//! so enclosures stay sound at every working precision.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::{AddAssignRound, DivAssignRound, MulAssignRound, PowAssignRound, SubAssignRound};
use rug::{Float, Integer, Rational};

/// Closed interval `[lo, hi]` with MPFR endpoints.
#[derive(Clone, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

fn round_down(prec: u32, r: &Rational) -> Float {
    Float::with_val_round(prec, r, Round::Down).0
}

fn round_up(prec: u32, r: &Rational) -> Float {
    Float::with_val_round(prec, r, Round::Up).0
}

fn min_f(a: Float, b: Float) -> Float {
    if a <= b {
        a
    } else {
        b
    }
}

fn max_f(a: Float, b: Float) -> Float {
    if a >= b {
        a
    } else {
        b
    }
}

impl Interval {
    /// Builds `[lo, hi]`; panics when `lo > hi` or an endpoint is NaN.
    pub fn new(lo: Float, hi: Float) -> Self {
        assert!(!lo.is_nan() && !hi.is_nan(), "NaN interval endpoint");
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(prec: u32, x: &Rational) -> Self {
        Interval {
            lo: round_down(prec, x),
            hi: round_up(prec, x),
        }
    }

    pub fn from_int(prec: u32, x: i64) -> Self {
        Self::point(prec, &Rational::from(x))
    }

    pub fn from_rationals(prec: u32, lo: &Rational, hi: &Rational) -> Self {
        assert!(lo <= hi, "inverted interval");
        Interval {
            lo: round_down(prec, lo),
            hi: round_up(prec, hi),
        }
    }

    /// Enclosure of an `f64` value that is itself exact.
    pub fn from_f64(prec: u32, x: f64) -> Self {
        let v = Float::with_val(prec.max(53), x);
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_int(prec, 0)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(prec, 1)
    }

    pub fn pi(prec: u32) -> Self {
        Interval {
            lo: Float::with_val_round(prec, Constant::Pi, Round::Down).0,
            hi: Float::with_val_round(prec, Constant::Pi, Round::Up).0,
        }
    }

    /// The whole line is not representable; this is the widest finite
    /// enclosure used as a sentinel for "no information".
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: min_f(self.lo.clone(), other.lo.clone()),
            hi: max_f(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational().expect("finite endpoint")
    }

    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational().expect("finite endpoint")
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo_rational() <= *x && *x <= self.hi_rational()
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lo >= 0
    }

    /// Sign of every point in the interval, if uniform.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo > 0 {
            Some(Ordering::Greater)
        } else if self.hi < 0 {
            Some(Ordering::Less)
        } else if self.lo == 0 && self.hi == 0 {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Upper bound on the width, rounded up.
    pub fn width(&self) -> Float {
        Float::with_val_round(self.prec(), &self.hi - &self.lo, Round::Up).0
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64_round(Round::Up)
    }

    /// Lower endpoint rounded down to an `f64`.
    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64_round(Round::Down)
    }

    /// Upper endpoint rounded up to an `f64`.
    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64_round(Round::Up)
    }

    pub fn mid(&self) -> Float {
        let mut m = Float::with_val(self.prec() + 1, &self.lo + &self.hi);
        m /= 2;
        m
    }

    pub fn mid_rational(&self) -> Rational {
        (self.lo_rational() + self.hi_rational()) / 2
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    /// Upper bound for `max |x|` over the interval.
    pub fn mag(&self) -> Float {
        max_f(Float::with_val(self.prec(), self.lo.abs_ref()), self.hi.clone().abs())
    }

    pub fn mag_f64(&self) -> f64 {
        self.mag().to_f64_round(Round::Up)
    }

    /// Lower bound for `min |x|` over the interval.
    pub fn mig(&self) -> Float {
        if self.contains_zero() {
            Float::new(self.prec())
        } else {
            min_f(Float::with_val(self.prec(), self.lo.abs_ref()), self.hi.clone().abs())
        }
    }

    pub fn with_prec(&self, prec: u32) -> Interval {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo.set_prec_round(prec, Round::Down);
        hi.set_prec_round(prec, Round::Up);
        Interval { lo, hi }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        let mut lo = Float::with_val(p, &self.lo);
        lo.add_assign_round(&o.lo, Round::Down);
        let mut hi = Float::with_val(p, &self.hi);
        hi.add_assign_round(&o.hi, Round::Up);
        Interval { lo, hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        let mut lo = Float::with_val(p, &self.lo);
        lo.sub_assign_round(&o.hi, Round::Down);
        let mut hi = Float::with_val(p, &self.hi);
        hi.sub_assign_round(&o.lo, Round::Up);
        Interval { lo, hi }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        let prod = |a: &Float, b: &Float, r: Round| {
            let mut x = Float::with_val(p, a);
            x.mul_assign_round(b, r);
            x
        };
        if self.lo >= 0 && o.lo >= 0 {
            return Interval {
                lo: prod(&self.lo, &o.lo, Round::Down),
                hi: prod(&self.hi, &o.hi, Round::Up),
            };
        }
        let c = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo = prod(c[0].0, c[0].1, Round::Down);
        let mut hi = prod(c[0].0, c[0].1, Round::Up);
        for (a, b) in &c[1..] {
            lo = min_f(lo, prod(a, b, Round::Down));
            hi = max_f(hi, prod(a, b, Round::Up));
        }
        Interval { lo, hi }
    }

    pub fn mul_rational(&self, r: &Rational) -> Interval {
        self.mul(&Interval::point(self.prec(), r))
    }

    pub fn mul_int(&self, n: i64) -> Interval {
        self.mul(&Interval::from_int(self.prec(), n))
    }

    /// Division; `None` when the divisor contains zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        Some(self.mul(&o.recip()?))
    }

    /// `1/x` when zero is at most an endpoint, as a half-line: `[0, d]`
    /// gives `[1/d, +∞]`.
    pub fn recip_extended(&self) -> Option<Interval> {
        let p = self.prec();
        if self.lo == 0 && self.hi > 0 {
            let mut lo = Float::with_val(p, 1);
            lo.div_assign_round(&self.hi, Round::Down);
            return Some(Interval {
                lo,
                hi: Float::with_val(p, rug::float::Special::Infinity),
            });
        }
        if self.hi == 0 && self.lo < 0 {
            let mut hi = Float::with_val(p, 1);
            hi.div_assign_round(&self.lo, Round::Up);
            return Some(Interval {
                lo: Float::with_val(p, rug::float::Special::NegInfinity),
                hi,
            });
        }
        self.recip()
    }

    pub fn has_nan(&self) -> bool {
        self.lo.is_nan() || self.hi.is_nan()
    }

    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        let p = self.prec();
        let mut lo = Float::with_val(p, 1);
        lo.div_assign_round(&self.hi, Round::Down);
        let mut hi = Float::with_val(p, 1);
        hi.div_assign_round(&self.lo, Round::Up);
        Some(Interval { lo, hi })
    }

    pub fn sqr(&self) -> Interval {
        let a = self.mig();
        let b = self.mag();
        let p = self.prec();
        let lo = Float::with_val_round(p, a.square_ref(), Round::Down).0;
        let hi = Float::with_val_round(p, b.square_ref(), Round::Up).0;
        Interval { lo, hi }
    }

    pub fn abs(&self) -> Interval {
        Interval {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    pub fn powi(&self, n: i64) -> Option<Interval> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        if n == 0 {
            return Some(Interval::one(self.prec()));
        }
        let p = self.prec();
        let pw = |x: &Float, r: Round| {
            let mut y = Float::with_val(p, x);
            y.pow_assign_round(n as i32, r);
            y
        };
        if n % 2 == 0 {
            let a = self.mig();
            let b = self.mag();
            Some(Interval {
                lo: pw(&a, Round::Down),
                hi: pw(&b, Round::Up),
            })
        } else {
            Some(Interval {
                lo: pw(&self.lo, Round::Down),
                hi: pw(&self.hi, Round::Up),
            })
        }
    }

    pub fn sqrt(&self) -> Option<Interval> {
        if self.lo < 0 {
            return None;
        }
        let p = self.prec();
        Some(Interval {
            lo: Float::with_val_round(p, self.lo.sqrt_ref(), Round::Down).0,
            hi: Float::with_val_round(p, self.hi.sqrt_ref(), Round::Up).0,
        })
    }

    pub fn exp(&self) -> Interval {
        let p = self.prec();
        Interval {
            lo: Float::with_val_round(p, self.lo.exp_ref(), Round::Down).0,
            hi: Float::with_val_round(p, self.hi.exp_ref(), Round::Up).0,
        }
    }

    /// Natural logarithm; `None` unless the interval is strictly positive.
    pub fn ln(&self) -> Option<Interval> {
        if self.lo <= 0 {
            return None;
        }
        let p = self.prec();
        Some(Interval {
            lo: Float::with_val_round(p, self.lo.ln_ref(), Round::Down).0,
            hi: Float::with_val_round(p, self.hi.ln_ref(), Round::Up).0,
        })
    }

    /// `x^c` for an enclosure `c` of the exponent. Requires `x >= 0`, and
    /// `x > 0` whenever `c` may be non-positive.
    pub fn pow(&self, c: &Interval) -> Option<Interval> {
        if self.lo < 0 || (self.lo == 0 && c.lo <= 0) {
            return None;
        }
        let p = self.prec().max(c.prec());
        let corner = |x: &Float, y: &Float, r: Round| {
            let mut v = Float::with_val(p, x);
            v.pow_assign_round(y, r);
            v
        };
        let xs = [&self.lo, &self.hi];
        let cs = [&c.lo, &c.hi];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for x in xs {
            for y in cs {
                let d = corner(x, y, Round::Down);
                let u = corner(x, y, Round::Up);
                lo = Some(match lo {
                    None => d,
                    Some(l) => min_f(l, d),
                });
                hi = Some(match hi {
                    None => u,
                    Some(h) => max_f(h, u),
                });
            }
        }
        Some(Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        })
    }

    /// Quotient interval `(x - offset) / period` used to locate extrema of
    /// the trigonometric functions.
    fn contains_grid_point(&self, offset: &Interval, period: &Interval) -> bool {
        let a = Interval {
            lo: self.lo.clone(),
            hi: self.lo.clone(),
        }
        .sub(offset)
        .div(period)
        .expect("positive period");
        let b = Interval {
            lo: self.hi.clone(),
            hi: self.hi.clone(),
        }
        .sub(offset)
        .div(period)
        .expect("positive period");
        let first = a.lo.to_integer_round(Round::Up).map(|(i, _)| i);
        let last = b.hi.to_integer_round(Round::Down).map(|(i, _)| i);
        match (first, last) {
            (Some(f), Some(l)) => f <= l,
            _ => true,
        }
    }

    pub fn sin(&self) -> Interval {
        self.trig(true)
    }

    pub fn cos(&self) -> Interval {
        self.trig(false)
    }

    fn trig(&self, is_sin: bool) -> Interval {
        let p = self.prec();
        let pi = Interval::pi(p + 8);
        let two_pi = pi.mul_int(2);
        let minus_one = Float::with_val(p, -1);
        let one = Float::with_val(p, 1);
        if self.width() >= two_pi.lo {
            return Interval {
                lo: minus_one,
                hi: one,
            };
        }
        let eval = |x: &Float, r: Round| {
            if is_sin {
                Float::with_val_round(p, x.sin_ref(), r).0
            } else {
                Float::with_val_round(p, x.cos_ref(), r).0
            }
        };
        let mut lo = min_f(eval(&self.lo, Round::Down), eval(&self.hi, Round::Down));
        let mut hi = max_f(eval(&self.lo, Round::Up), eval(&self.hi, Round::Up));
        let half_pi = Interval {
            lo: Float::with_val_round(p + 8, &pi.lo / 2u32, Round::Down).0,
            hi: Float::with_val_round(p + 8, &pi.hi / 2u32, Round::Up).0,
        };
        let (max_at, min_at) = if is_sin {
            (half_pi.clone(), half_pi.neg())
        } else {
            (Interval::zero(p + 8), pi.clone())
        };
        if self.contains_grid_point(&max_at, &two_pi) {
            hi = one;
        }
        if self.contains_grid_point(&min_at, &two_pi) {
            lo = minus_one;
        }
        // Rounded endpoint evaluations may stray past the true range.
        if lo < -1 {
            lo = Float::with_val(p, -1);
        }
        if hi > 1 {
            hi = Float::with_val(p, 1);
        }
        Interval { lo, hi }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: max_f(self.lo.clone(), o.lo.clone()),
            hi: max_f(self.hi.clone(), o.hi.clone()),
        }
    }

    pub fn min(&self, o: &Interval) -> Interval {
        Interval {
            lo: min_f(self.lo.clone(), o.lo.clone()),
            hi: min_f(self.hi.clone(), o.hi.clone()),
        }
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let lo = max_f(self.lo.clone(), o.lo.clone());
        let hi = min_f(self.hi.clone(), o.hi.clone());
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    /// Widens both endpoints by `eps` (rounded outward).
    pub fn inflate(&self, eps: &Rational) -> Interval {
        self.add(&Interval::from_rationals(self.prec(), &(-eps.clone()), eps))
    }

    /// Splits at the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        let mut m_lo = m.clone();
        m_lo.set_prec_round(self.prec() + 1, Round::Down);
        (
            Interval {
                lo: self.lo.clone(),
                hi: m.clone(),
            },
            Interval { lo: m_lo, hi: self.hi.clone() },
        )
    }

    /// `floor` of the lower endpoint, as an integer.
    pub fn floor_lo(&self) -> Integer {
        self.lo.to_integer_round(Round::Down).expect("finite").0
    }

    pub fn ceil_hi(&self) -> Integer {
        self.hi.to_integer_round(Round::Up).expect("finite").0
    }
}

/// Sum of intervals, zero for an empty iterator.
pub fn sum<'a, I: IntoIterator<Item = &'a Interval>>(prec: u32, it: I) -> Interval {
    it.into_iter()
        .fold(Interval::zero(prec), |acc, x| acc.add(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn third_is_enclosed() {
        let t = Interval::point(64, &r(1, 3));
        assert!(t.contains(&r(1, 3)));
        assert!(t.width_f64() < 1e-18);
    }

    #[test]
    fn exp_on_unit_interval() {
        let x = Interval::from_rationals(64, &r(0, 1), &r(1, 1));
        let e = x.exp();
        assert!(e.lo_rational() <= 1);
        assert!(e.hi_rational() >= r(271828, 100000));
        assert!(e.hi_rational() < r(271829, 100000));
    }

    #[test]
    fn product_sign_analysis() {
        let x = Interval::from_rationals(64, &r(0, 1), &r(1, 1));
        let y = Interval::from_rationals(64, &r(-1, 1), &r(0, 1));
        let p = x.mul(&y);
        assert_eq!(p.lo_rational(), -1);
        assert_eq!(p.hi_rational(), 0);
    }

    #[test]
    fn sin_captures_interior_maximum() {
        let x = Interval::from_rationals(64, &r(1, 1), &r(2, 1));
        let s = x.sin();
        assert_eq!(s.hi_rational(), 1);
        assert!(s.lo_rational() > r(84, 100));
        let c = Interval::from_rationals(64, &r(3, 1), &r(4, 1)).cos();
        assert_eq!(c.lo_rational(), -1);
    }

    #[test]
    fn even_power_of_straddling_interval() {
        let x = Interval::from_rationals(64, &r(-2, 1), &r(1, 1));
        let p = x.powi(2).unwrap();
        assert_eq!(p.lo_rational(), 0);
        assert_eq!(p.hi_rational(), 4);
    }

    #[test]
    fn real_power_at_zero() {
        let x = Interval::from_rationals(64, &r(0, 1), &r(1, 1));
        let c = Interval::from_rationals(64, &r(14142, 10000), &r(14143, 10000));
        let p = x.pow(&c).unwrap();
        assert_eq!(p.lo_rational(), 0);
        assert_eq!(p.hi_rational(), 1);
        assert!(x.ln().is_none());
    }

    #[test]
    fn division_by_straddling_interval_is_refused() {
        let x = Interval::from_rationals(64, &r(-1, 1), &r(1, 1));
        assert!(Interval::one(64).div(&x).is_none());
    }
}
