//! Certified enclosures of all complex roots of a square-free integer
//! polynomial.
//!
//! Approximations come from the Aberth–Ehrlich iteration; each is then
//! wrapped in the inclusion disk `|z - z_i| ≤ n·|W_i|` where `W_i` is the
//! Weierstrass correction. When the disks are pairwise disjoint each holds
//! exactly one root.

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::IntPoly;

#[derive(Clone, Debug)]
struct C {
    re: Float,
    im: Float,
}

impl C {
    fn new(prec: u32) -> C {
        C {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }
    fn add(&self, o: &C) -> C {
        C {
            re: Float::with_val(self.re.prec(), &self.re + &o.re),
            im: Float::with_val(self.re.prec(), &self.im + &o.im),
        }
    }
    fn sub(&self, o: &C) -> C {
        C {
            re: Float::with_val(self.re.prec(), &self.re - &o.re),
            im: Float::with_val(self.re.prec(), &self.im - &o.im),
        }
    }
    fn mul(&self, o: &C) -> C {
        let p = self.re.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        C { re, im }
    }
    fn norm2(&self) -> Float {
        let p = self.re.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }
    fn abs(&self) -> Float {
        self.norm2().sqrt()
    }
    fn recip(&self) -> C {
        let n = self.norm2();
        C {
            re: Float::with_val(self.re.prec(), &self.re / &n),
            im: -Float::with_val(self.re.prec(), &self.im / &n),
        }
    }
    fn div(&self, o: &C) -> C {
        self.mul(&o.recip())
    }
}

fn eval(p: &IntPoly, z: &C, prec: u32) -> (C, C) {
    // Returns p(z) and p'(z) by Horner.
    let mut v = C::new(prec);
    let mut d = C::new(prec);
    for c in p.coeffs().iter().rev() {
        d = d.mul(z).add(&v);
        v = v.mul(z);
        v.re += c;
    }
    (v, d)
}

/// A disk `|z - center| ≤ radius` containing exactly one root.
#[derive(Clone, Debug)]
pub struct RootDisk {
    pub re: Float,
    pub im: Float,
    pub radius: Float,
}

impl RootDisk {
    /// Enclosure of `|z|` for the root in this disk.
    pub fn modulus(&self, prec: u32) -> Interval {
        let c = Float::with_val(prec, self.re.square_ref()) + Float::with_val(prec, self.im.square_ref());
        let a = c.sqrt();
        let lo = Float::with_val_round(prec, &a - &self.radius, Round::Down).0;
        let lo = if lo < 0 { Float::new(prec) } else { lo };
        let hi = Float::with_val_round(prec, &a + &self.radius, Round::Up).0;
        // Relative slack for the rounding of `a` itself.
        let slack = Float::with_val(prec, Float::i_exp(1, 8 - prec as i32)) * (Float::with_val(prec, &a) + 1u32);
        let lo = Float::with_val_round(prec, &lo - &slack, Round::Down).0;
        let lo = if lo < 0 { Float::new(prec) } else { lo };
        let hi = Float::with_val_round(prec, &hi + &slack, Round::Up).0;
        Interval::new(lo, hi)
    }
}

fn aberth(p: &IntPoly, prec: u32, start: Option<Vec<C>>) -> Vec<C> {
    let n = p.deg();
    let mut z = match start {
        Some(s) => s
            .into_iter()
            .map(|c| C {
                re: Float::with_val(prec, &c.re),
                im: Float::with_val(prec, &c.im),
            })
            .collect::<Vec<_>>(),
        None => {
            let a0 = p.coeffs().iter().find(|c| **c != 0).expect("nonzero").clone();
            let r = (Float::with_val(prec, a0.abs()) / Float::with_val(prec, p.lead().abs()))
                .pow(Rational::from((1, n as u32)).to_f64());
            let r = if r > 0 { r } else { Float::with_val(prec, 1) };
            let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
            (0..n)
                .map(|k| {
                    let t = Float::with_val(prec, &two_pi * k as u32) / n as u32 + 0.4f64;
                    C {
                        re: Float::with_val(prec, &r * t.clone().cos()),
                        im: Float::with_val(prec, &r * t.sin()),
                    }
                })
                .collect()
        }
    };
    let tol = Float::with_val(prec, Float::i_exp(1, 16 - prec as i32));
    for _ in 0..(200 + prec as usize) {
        let mut done = true;
        for i in 0..n {
            let (v, d) = eval(p, &z[i], prec);
            if v.norm2() == 0 {
                continue;
            }
            let w = v.div(&d);
            let mut s = C::new(prec);
            for j in 0..n {
                if j != i {
                    s = s.add(&z[i].sub(&z[j]).recip());
                }
            }
            let mut one = C::new(prec);
            one.re += 1u32;
            let corr = w.div(&one.sub(&w.mul(&s)));
            let scale = Float::with_val(prec, z[i].abs()) + 1u32;
            if corr.abs() > Float::with_val(prec, &tol * &scale) {
                done = false;
            }
            z[i] = z[i].sub(&corr);
        }
        if done {
            break;
        }
    }
    z
}

fn inclusion_radii(p: &IntPoly, z: &[C], prec: u32) -> Option<Vec<Float>> {
    let n = p.deg();
    let lc = Float::with_val(prec, p.lead().abs());
    let u = Float::with_val(prec, Float::i_exp(1, 4 - prec as i32)) * (n as u32 + 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (v, _) = eval(p, &z[i], prec);
        // Horner rounding bound: u·Σ|a_k||z|^k.
        let az = z[i].abs();
        let mut mag = Float::new(prec);
        for c in p.coeffs().iter().rev() {
            mag = mag * &az + Float::with_val(prec, Integer::from(c.abs_ref()));
        }
        let num = v.abs() + Float::with_val(prec, &u * &mag);
        let mut den = lc.clone();
        for j in 0..n {
            if j != i {
                den *= z[i].sub(&z[j]).abs();
            }
        }
        if den == 0 {
            return None;
        }
        let r = Float::with_val(prec, &num / &den) * n as u32;
        let r = r * (Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2)) + 1u32);
        out.push(r);
    }
    Some(out)
}

fn disjoint(z: &[C], r: &[Float]) -> bool {
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let d = z[i].sub(&z[j]).abs();
            if d <= Float::with_val(d.prec(), &r[i] + &r[j]) {
                return false;
            }
        }
    }
    true
}

/// Certified, pairwise disjoint disks, one around each complex root, with
/// radii at most `2^-target_bits` relative to `max(1, |z|)` when achievable
/// below `max_prec`.
pub fn root_disks(p: &IntPoly, target_bits: u32, max_prec: u32) -> Result<Vec<RootDisk>> {
    let n = p.deg();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !p.is_squarefree() {
        return Err(Error::Invalid("root isolation needs a square-free polynomial".into()));
    }
    let mut prec = (2 * target_bits + 64).max(128);
    let mut start = None;
    loop {
        let z = aberth(p, prec, start.take());
        if let Some(r) = inclusion_radii(p, &z, prec) {
            let goal = Float::with_val(prec, Float::i_exp(1, -(target_bits as i32)));
            let small = z
                .iter()
                .zip(&r)
                .all(|(c, ri)| *ri <= Float::with_val(prec, &goal * (c.abs() + 1u32)));
            if disjoint(&z, &r) && small {
                return Ok(z
                    .into_iter()
                    .zip(r)
                    .map(|(c, radius)| RootDisk {
                        re: c.re,
                        im: c.im,
                        radius,
                    })
                    .collect());
            }
        }
        if prec >= max_prec {
            return Err(Error::PrecisionExhausted(format!(
                "root disks for {p} not separated at {prec} bits"
            )));
        }
        start = Some(z);
        prec = (prec * 2).min(max_prec);
    }
}

/// Enclosure of the Mahler measure `|lc| · Π max(1, |z|)`, together with
/// counts of roots provably inside and outside the closed unit disk.
pub fn mahler_enclosure(p: &IntPoly, target_bits: u32, max_prec: u32) -> Result<(Interval, usize, usize)> {
    let disks = root_disks(p, target_bits + p.deg() as u32 + 8, max_prec)?;
    let prec = (target_bits + 64).max(128);
    let mut acc = Interval::point(prec, &Rational::from(p.lead().abs()));
    let one = Interval::one(prec);
    let (mut inside, mut outside) = (0, 0);
    for d in &disks {
        let m = d.modulus(prec);
        if m.hi() < &1 {
            inside += 1;
            continue;
        }
        if m.lo() > &1 {
            outside += 1;
        }
        acc = acc.mul(&m.max(&one));
    }
    Ok((acc, inside, outside))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_mahler_measure() {
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        let (m, inside, outside) = mahler_enclosure(&p, 60, 2048).unwrap();
        assert_eq!((inside, outside), (1, 1));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((m.mid_f64() - phi).abs() < 1e-15);
        assert!(m.width_f64() < 1e-17);
    }

    #[test]
    fn cyclotomic_roots_have_unit_modulus() {
        let p = IntPoly::from_i64(&[1, 1, 1, 1, 1]);
        let disks = root_disks(&p, 80, 4096).unwrap();
        for d in disks {
            let m = d.modulus(128);
            assert!(m.lo() <= &1 && m.hi() >= &1);
        }
    }
}
