//! Least positive values of `|a_0 + a_1 ζ_1 + ⋯ + a_n ζ_n|` over `N`-th
//! roots of unity, exact vanishing tests, prime scans and vanishing
//! subsums.
//!
//! A sum is indexed by its exponent tuple `(k_1, …, k_n)`, `ζ_j = e^{2πi k_j/N}`.
//! Free roots with equal coefficients are interchangeable, so only tuples
//! that are non-decreasing inside each such group are visited.

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::{cyclotomic, IntPoly};
use crate::power::PowerProduct;

#[derive(Clone, Debug)]
pub enum Coeff {
    Rational(Rational),
    /// `re + i·im`.
    Gaussian(Rational, Rational),
    /// A certified enclosure; vanishing can never be decided exactly.
    Enclosure { re: Interval, im: Interval },
}

impl Coeff {
    fn is_zero(&self) -> bool {
        match self {
            Coeff::Rational(q) => *q == 0,
            Coeff::Gaussian(a, b) => *a == 0 && *b == 0,
            Coeff::Enclosure { re, im } => re.contains_zero() && im.contains_zero(),
        }
    }

    fn is_real(&self) -> bool {
        match self {
            Coeff::Rational(_) => true,
            Coeff::Gaussian(_, b) => *b == 0,
            Coeff::Enclosure { im, .. } => im.lo().is_zero() && im.hi().is_zero(),
        }
    }

    fn exact(&self) -> Option<(Rational, Rational)> {
        match self {
            Coeff::Rational(q) => Some((q.clone(), Rational::new())),
            Coeff::Gaussian(a, b) => Some((a.clone(), b.clone())),
            Coeff::Enclosure { .. } => None,
        }
    }

    fn enclosure(&self, prec: u32) -> (Interval, Interval) {
        match self {
            Coeff::Rational(q) => (Interval::point(prec, q), Interval::zero(prec)),
            Coeff::Gaussian(a, b) => (Interval::point(prec, a), Interval::point(prec, b)),
            Coeff::Enclosure { re, im } => (re.clone(), im.clone()),
        }
    }

    fn same_as(&self, o: &Coeff) -> bool {
        match (self.exact(), o.exact()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// Parses `-2/3`, `0.25` or a real enclosure `0.7071±1e-9`.
    pub fn parse(s: &str) -> Result<Coeff> {
        let s = s.trim();
        let split = s.split_once('±').or_else(|| s.split_once("+-"));
        match split {
            Some((c, r)) => {
                let c = crate::approx::parse_rational(c)?;
                let r = crate::approx::parse_rational(r)?;
                if r < 0 {
                    return Err(Error::Invalid(format!("negative radius in `{s}`")));
                }
                let lo = Rational::from(&c - &r);
                let hi = Rational::from(&c + &r);
                Ok(Coeff::Enclosure {
                    re: Interval::from_rationals(128, &lo, &hi),
                    im: Interval::zero(128),
                })
            }
            None => Ok(Coeff::Rational(crate::approx::parse_rational(s)?)),
        }
    }
}

impl std::fmt::Display for Coeff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coeff::Rational(q) => write!(f, "{q}"),
            Coeff::Gaussian(a, b) => write!(f, "{a}+{b}i"),
            Coeff::Enclosure { re, .. } if self.is_real() => write!(f, "[{}, {}]", re.lo(), re.hi()),
            Coeff::Enclosure { re, im } => write!(f, "[{}, {}]+[{}, {}]i", re.lo(), re.hi(), im.lo(), im.hi()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootSumInstance {
    /// The modulus `N`.
    pub modulus: u64,
    /// `a_0, a_1, …, a_n`.
    pub coeffs: Vec<Coeff>,
}

impl RootSumInstance {
    pub fn new(modulus: u64, coeffs: Vec<Coeff>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Invalid("N must be at least 1".into()));
        }
        if coeffs.is_empty() {
            return Err(Error::Invalid("need at least a_0".into()));
        }
        if let Some(j) = coeffs.iter().position(Coeff::is_zero) {
            return Err(Error::Invalid(format!("coefficient a_{j} may be zero")));
        }
        Ok(RootSumInstance { modulus, coeffs })
    }

    /// `a_0 = ⋯ = a_n = 1`, the setting of `f(n+1, N)`.
    pub fn ones(n: usize, modulus: u64) -> Self {
        Self::new(modulus, vec![Coeff::Rational(Rational::from(1)); n + 1]).expect("valid")
    }

    pub fn from_rationals(modulus: u64, coeffs: &[Rational]) -> Result<Self> {
        Self::new(modulus, coeffs.iter().cloned().map(Coeff::Rational).collect())
    }

    /// Number of free roots.
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MinSumOptions {
    /// Triangle-inequality pruning and the unimodal last-coordinate step.
    pub prune: bool,
    /// Largest number of exponent prefixes to visit.
    pub budget: u128,
    pub prec: u32,
}

impl Default for MinSumOptions {
    fn default() -> Self {
        MinSumOptions {
            prune: true,
            budget: 2_000_000_000,
            prec: 128,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchStats {
    pub leaves: u64,
    pub pruned_subtrees: u64,
    pub refined: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinSumResult {
    pub modulus: u64,
    pub n: usize,
    /// Certified enclosure of the least positive value.
    #[serde(serialize_with = "ser_lo")]
    pub value: Interval,
    /// Exponents `(k_1, …, k_n)` in the input order.
    pub argmin: Vec<u64>,
    /// Multiplicative orders of `ζ_j` at the argmin.
    pub orders: Vec<u64>,
    /// Visited tuples that vanish exactly.
    pub zeros_found: u64,
    pub stats: SearchStats,
}

fn ser_lo<S: serde::Serializer>(v: &Interval, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("value", 2)?;
    st.serialize_field("lo", &v.lo().to_f64_round(Round::Down))?;
    st.serialize_field("hi", &v.hi().to_f64_round(Round::Up))?;
    st.end()
}

impl MinSumResult {
    pub fn value_lo(&self) -> f64 {
        self.value.lo().to_f64_round(Round::Down)
    }

    pub fn value_hi(&self) -> f64 {
        self.value.hi().to_f64_round(Round::Up)
    }
}

// ------------------------------------------------------------ f64 intervals

#[derive(Clone, Copy, Debug)]
struct Fi {
    lo: f64,
    hi: f64,
}

impl Fi {
    fn from_interval(v: &Interval) -> Fi {
        Fi {
            lo: v.lo().to_f64_round(Round::Down),
            hi: v.hi().to_f64_round(Round::Up),
        }
    }

    fn add(self, o: Fi) -> Fi {
        Fi {
            lo: (self.lo + o.lo).next_down(),
            hi: (self.hi + o.hi).next_up(),
        }
    }

    fn sub(self, o: Fi) -> Fi {
        Fi {
            lo: (self.lo - o.hi).next_down(),
            hi: (self.hi - o.lo).next_up(),
        }
    }

    fn mul(self, o: Fi) -> Fi {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Fi {
            lo: p.iter().copied().fold(f64::INFINITY, f64::min).next_down(),
            hi: p.iter().copied().fold(f64::NEG_INFINITY, f64::max).next_up(),
        }
    }

    fn mig(self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Clone, Copy, Debug)]
struct Cf {
    re: Fi,
    im: Fi,
}

impl Cf {
    fn add(self, o: Cf) -> Cf {
        Cf {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn mul(self, o: Cf) -> Cf {
        Cf {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn abs_lo(self) -> f64 {
        let (a, b) = (self.re.mig(), self.im.mig());
        ((a * a).next_down() + (b * b).next_down()).next_down().sqrt().next_down().max(0.0)
    }

    fn abs_hi(self) -> f64 {
        let (a, b) = (self.re.mag(), self.im.mag());
        ((a * a).next_up() + (b * b).next_up()).next_up().sqrt().next_up()
    }
}

// ------------------------------------------------------------ exact values

/// `ζ^k` enclosed at `prec` bits.
fn root_enclosure(modulus: u64, k: u64, prec: u32) -> (Interval, Interval) {
    let ang = Interval::pi(prec + 16)
        .mul_int(2 * (k % modulus) as i64)
        .div(&Interval::from_int(prec + 16, modulus as i64))
        .expect("N ≥ 1");
    (ang.cos().with_prec(prec), ang.sin().with_prec(prec))
}

/// Enclosure of the sum at a tuple.
pub fn eval_tuple(inst: &RootSumInstance, tuple: &[u64], prec: u32) -> Result<(Interval, Interval)> {
    if tuple.len() != inst.n() {
        return Err(Error::Invalid("tuple length differs from n".into()));
    }
    let (mut re, mut im) = inst.coeffs[0].enclosure(prec);
    for (c, &k) in inst.coeffs[1..].iter().zip(tuple) {
        let (a, b) = c.enclosure(prec);
        let (x, y) = root_enclosure(inst.modulus, k, prec);
        re = re.add(&a.mul(&x).sub(&b.mul(&y)));
        im = im.add(&a.mul(&y).add(&b.mul(&x)));
    }
    Ok((re, im))
}

/// Enclosure of `|sum|` at a tuple.
pub fn abs_tuple(inst: &RootSumInstance, tuple: &[u64], prec: u32) -> Result<Interval> {
    let (re, im) = eval_tuple(inst, tuple, prec)?;
    let lo2 = re.abs().mig_interval().sqr().add(&im.abs().mig_interval().sqr());
    let hi2 = Interval::new(re.mag(), re.mag()).sqr().add(&Interval::new(im.mag(), im.mag()).sqr());
    let lo = lo2.sqrt().expect("nonnegative").lo().clone();
    let hi = hi2.sqrt().expect("nonnegative").hi().clone();
    Ok(Interval::new(lo, hi))
}

trait MigInterval {
    fn mig_interval(&self) -> Interval;
}

impl MigInterval for Interval {
    fn mig_interval(&self) -> Interval {
        let m = self.mig();
        Interval::new(m.clone(), m)
    }
}

fn lcm_denoms<'a>(qs: impl Iterator<Item = &'a Rational>) -> Integer {
    qs.fold(Integer::from(1), |l, q| l.lcm(q.denom()))
}

/// Decides `Σ c_k x^k ≡ 0 (mod Φ_N)` for an integer vector of length `N`.
fn vanishes_mod_cyclotomic(v: &[Integer], modulus: u64) -> bool {
    if v.iter().all(|c| *c == 0) {
        return true;
    }
    if is_prime(modulus) {
        // Φ_p | Σ c_k x^k (degree < p) iff all c_k are equal.
        return v.iter().all(|c| *c == v[0]);
    }
    let p = IntPoly::new(v.to_vec());
    p.rem_monic(&cyclotomic(modulus)).is_zero()
}

/// Exact test for `a_0 + Σ a_j ζ^{k_j} = 0`; refuses enclosure inputs.
pub fn is_zero_exact(inst: &RootSumInstance, tuple: &[u64]) -> Result<bool> {
    let terms: Vec<(u64, &Coeff)> = std::iter::once(0u64)
        .chain(tuple.iter().copied())
        .zip(&inst.coeffs)
        .collect();
    vanishing_terms(inst.modulus, &terms)
}

fn vanishing_terms(modulus: u64, terms: &[(u64, &Coeff)]) -> Result<bool> {
    let mut exact = Vec::with_capacity(terms.len());
    for (k, c) in terms {
        match c.exact() {
            Some(ab) => exact.push((*k % modulus, ab)),
            None => {
                return Err(Error::PrecisionExhausted(
                    "exact vanishing test needs rational or Gaussian-rational coefficients".into(),
                ))
            }
        }
    }
    let l = lcm_denoms(exact.iter().flat_map(|(_, (a, b))| [a, b]));
    let n = modulus as usize;
    let mut re = vec![Integer::new(); n];
    let mut im = vec![Integer::new(); n];
    for (k, (a, b)) in &exact {
        re[*k as usize] += Rational::from(a * &l).numer();
        im[*k as usize] += Rational::from(b * &l).numer();
    }
    if im.iter().all(|c| *c == 0) {
        return Ok(vanishes_mod_cyclotomic(&re, modulus));
    }
    if modulus % 4 == 0 {
        // i = ζ^{N/4} lies in Q(ζ): test re + x^{N/4}·im.
        let q = n / 4;
        let mut v = re.clone();
        for (k, c) in im.iter().enumerate() {
            v[(k + q) % n] += c;
        }
        Ok(vanishes_mod_cyclotomic(&v, modulus))
    } else {
        // [Q(ζ, i) : Q(ζ)] = 2, so both parts vanish separately.
        Ok(vanishes_mod_cyclotomic(&re, modulus) && vanishes_mod_cyclotomic(&im, modulus))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 {
        return Vec::new();
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for m in (i * i..=n).step_by(i) {
                sieve[m] = false;
            }
        }
        i += 1;
    }
    (lo.max(2)..=hi).filter(|&p| sieve[p as usize]).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiplicative order of `ζ_N^k`.
pub fn root_order(modulus: u64, k: u64) -> u64 {
    modulus / gcd(k % modulus, modulus)
}

// ------------------------------------------------------------- the search

struct Plan<'a> {
    inst: &'a RootSumInstance,
    /// Free roots reordered so equal coefficients are adjacent.
    perm: Vec<usize>,
    coeffs: Vec<Cf>,
    /// `same[j]`: root `j` shares the coefficient of root `j−1`.
    same: Vec<bool>,
    /// `Σ_{i ≥ j} |a_i|` upper bounds.
    tail: Vec<f64>,
    roots: Vec<Cf>,
    opts: MinSumOptions,
}

#[derive(Clone, Debug)]
struct Contender {
    lo: f64,
    hi: f64,
    tuple: Vec<u64>,
}

#[derive(Default)]
struct Unit {
    zeros: u64,
    best: f64,
    contenders: Vec<Contender>,
    stats: SearchStats,
    error: Option<Error>,
}

fn cf_of(c: &Coeff) -> Cf {
    let (re, im) = c.enclosure(128);
    Cf {
        re: Fi::from_interval(&re),
        im: Fi::from_interval(&im),
    }
}

impl<'a> Plan<'a> {
    fn new(inst: &'a RootSumInstance, opts: MinSumOptions) -> Plan<'a> {
        let n = inst.n();
        let free = &inst.coeffs[1..];
        let mut perm: Vec<usize> = Vec::with_capacity(n);
        let mut used = vec![false; n];
        for i in 0..n {
            if used[i] {
                continue;
            }
            for j in i..n {
                if !used[j] && (j == i || free[j].same_as(&free[i])) {
                    used[j] = true;
                    perm.push(j);
                }
            }
        }
        let coeffs: Vec<Cf> = perm.iter().map(|&j| cf_of(&free[j])).collect();
        let same: Vec<bool> = (0..n)
            .map(|j| j > 0 && free[perm[j]].same_as(&free[perm[j - 1]]))
            .collect();
        let mut tail = vec![0f64; n + 1];
        for j in (0..n).rev() {
            let c = coeffs[j];
            tail[j] = (tail[j + 1] + c.re.mag().hypot(c.im.mag()).next_up()).next_up();
        }
        let roots = (0..inst.modulus)
            .map(|k| {
                let (x, y) = root_enclosure(inst.modulus, k, 128);
                Cf {
                    re: Fi::from_interval(&x),
                    im: Fi::from_interval(&y),
                }
            })
            .collect();
        Plan {
            inst,
            perm,
            coeffs,
            same,
            tail,
            roots,
            opts,
        }
    }

    /// Number of prefixes (all coordinates but the last) in the sorted
    /// enumeration, times `N` for the last coordinate when it is scanned.
    fn cost(&self) -> u128 {
        let n = self.coeffs.len();
        if n == 0 {
            return 1;
        }
        let big_n = self.inst.modulus as u128;
        let mut total: u128 = 1;
        let mut j = 0;
        while j < n {
            let mut g = 1;
            while j + g < n && self.same[j + g] {
                g += 1;
            }
            // Multisets of size g from N values.
            let mut c: u128 = 1;
            for i in 0..g as u128 {
                c = c.saturating_mul(big_n + i) / (i + 1);
            }
            total = total.saturating_mul(c);
            j += g;
        }
        if self.opts.prune {
            total / big_n.max(1) * 8
        } else {
            total
        }
    }

    fn to_input_order(&self, t: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; t.len()];
        for (pos, &j) in self.perm.iter().enumerate() {
            out[j] = t[pos];
        }
        out
    }

    fn leaf(&self, unit: &mut Unit, t: &[u64], s: Cf) {
        unit.stats.leaves += 1;
        let lo = s.abs_lo();
        let hi = s.abs_hi();
        if lo > 0.0 {
            if lo <= unit.best {
                unit.best = unit.best.min(hi);
                unit.contenders.push(Contender { lo, hi, tuple: t.to_vec() });
            }
            return;
        }
        let input = self.to_input_order(t);
        match is_zero_exact(self.inst, &input) {
            Ok(true) => unit.zeros += 1,
            Ok(false) => {
                unit.stats.refined += 1;
                match refine_positive(self.inst, &input, self.opts.prec) {
                    Ok(v) => {
                        let lo = v.lo().to_f64_round(Round::Down);
                        let hi = v.hi().to_f64_round(Round::Up);
                        if lo <= unit.best {
                            unit.best = unit.best.min(hi);
                            unit.contenders.push(Contender { lo, hi, tuple: t.to_vec() });
                        }
                    }
                    Err(e) => unit.error = Some(e),
                }
            }
            Err(e) => unit.error = Some(e),
        }
    }

    fn descend(&self, unit: &mut Unit, t: &mut Vec<u64>, partial: Cf) {
        let j = t.len();
        let n = self.coeffs.len();
        if unit.error.is_some() {
            return;
        }
        if j == n {
            self.leaf(unit, t, partial);
            return;
        }
        if self.opts.prune && j > 0 {
            let bound = partial.abs_lo() - self.tail[j];
            if bound > unit.best {
                unit.stats.pruned_subtrees += 1;
                return;
            }
        }
        let start = if self.same[j] { t[j - 1] } else { 0 };
        let modulus = self.inst.modulus;
        let a = self.coeffs[j];
        if j + 1 == n && self.opts.prune {
            for k in self.last_candidates(partial, a, start) {
                t.push(k);
                self.leaf(unit, t, partial.add(a.mul(self.roots[k as usize])));
                t.pop();
            }
            return;
        }
        for k in start..modulus {
            t.push(k);
            self.descend(unit, t, partial.add(a.mul(self.roots[k as usize])));
            t.pop();
        }
    }

    // |P + a ζ^k| depends only on the angular distance between
    // 2πk/N and the angle θ* where a·e^{iθ*} points away from P, and grows
    // with it. On the arc [start, N−1] the minimum positive value is
    // therefore at the arc ends or next to θ*.
    fn last_candidates(&self, p: Cf, a: Cf, start: u64) -> Vec<u64> {
        let modulus = self.inst.modulus;
        let (pr, pi) = (p.re.mid(), p.im.mid());
        let (ar, ai) = (a.re.mid(), a.im.mid());
        let pm = pr.hypot(pi);
        if pm < 1e-6 * (1.0 + ar.hypot(ai)) || modulus > 1 << 40 {
            return (start..modulus).collect();
        }
        let theta = (-pi).atan2(-pr) - ai.atan2(ar);
        let tau = std::f64::consts::TAU;
        let x = (theta.rem_euclid(tau) / tau * modulus as f64).floor() as i64;
        let m = modulus as i64;
        let mut ks: Vec<u64> = (-3..=4)
            .map(|d| (x + d).rem_euclid(m) as u64)
            .chain([start, modulus - 1])
            .filter(|&k| k >= start)
            .collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    fn unit(&self, k1: u64) -> Unit {
        let mut unit = Unit {
            best: f64::INFINITY,
            ..Default::default()
        };
        let a0 = cf_of(&self.inst.coeffs[0]);
        let mut t = vec![k1];
        let s = a0.add(self.coeffs[0].mul(self.roots[k1 as usize]));
        self.descend(&mut unit, &mut t, s);
        unit
    }
}

fn refine_positive(inst: &RootSumInstance, tuple: &[u64], prec: u32) -> Result<Interval> {
    let mut p = prec.max(128);
    while p <= 8192 {
        let v = abs_tuple(inst, tuple, p)?;
        if v.lo().is_sign_positive() && !v.lo().is_zero() {
            return Ok(v);
        }
        p *= 2;
    }
    Err(Error::PrecisionExhausted(format!(
        "nonzero sum at {tuple:?} not separated from 0 at 8192 bits"
    )))
}

/// `min |a_0 + Σ a_j ζ^{k_j}|` over tuples with a nonzero sum.
pub fn min_sum(inst: &RootSumInstance, opts: &MinSumOptions) -> Result<MinSumResult> {
    let n = inst.n();
    let modulus = inst.modulus;
    if n == 0 {
        let v = abs_tuple(inst, &[], opts.prec)?;
        return Ok(MinSumResult {
            modulus,
            n,
            value: v,
            argmin: Vec::new(),
            orders: Vec::new(),
            zeros_found: 0,
            stats: SearchStats {
                leaves: 1,
                ..Default::default()
            },
        });
    }
    let plan = Plan::new(inst, *opts);
    let cost = plan.cost();
    if cost > opts.budget {
        return Err(Error::BudgetExceeded(format!(
            "about {cost} prefixes for N = {modulus}, n = {n}; budget {}",
            opts.budget
        )));
    }
    let units: Vec<Unit> = if n == 1 {
        // One free root: scan it directly.
        let mut unit = Unit {
            best: f64::INFINITY,
            ..Default::default()
        };
        let a0 = cf_of(&inst.coeffs[0]);
        let mut t = Vec::new();
        if opts.prune {
            for k in plan.last_candidates(a0, plan.coeffs[0], 0) {
                t.push(k);
                plan.leaf(&mut unit, &t, a0.add(plan.coeffs[0].mul(plan.roots[k as usize])));
                t.pop();
            }
        } else {
            plan.descend(&mut unit, &mut t, a0);
        }
        vec![unit]
    } else {
        (0..modulus).into_par_iter().map(|k1| plan.unit(k1)).collect()
    };
    let mut zeros = 0;
    let mut stats = SearchStats::default();
    let mut contenders = Vec::new();
    for u in units {
        if let Some(e) = u.error {
            return Err(e);
        }
        zeros += u.zeros;
        stats.leaves += u.stats.leaves;
        stats.pruned_subtrees += u.stats.pruned_subtrees;
        stats.refined += u.stats.refined;
        contenders.extend(u.contenders);
    }
    let best = contenders.iter().map(|c| c.hi).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::SearchExhausted(format!(
            "every sum vanishes for N = {modulus}, n = {n}"
        )));
    }
    // Tight enclosures for the few tuples that can still be the minimum.
    let mut finals: Vec<(Interval, Vec<u64>)> = Vec::new();
    for c in contenders.into_iter().filter(|c| c.lo <= best) {
        let input = plan.to_input_order(&c.tuple);
        let v = abs_tuple(inst, &input, opts.prec)?;
        let v = if v.lo().is_zero() || v.lo().is_sign_negative() {
            refine_positive(inst, &input, opts.prec)?
        } else {
            v
        };
        finals.push((v, input));
    }
    let (lo, _) = finals
        .iter()
        .map(|(v, _)| v.lo().clone())
        .fold((None::<Float>, ()), |(m, _), x| {
            (Some(match m {
                Some(m) if m <= x => m,
                _ => x,
            }), ())
        });
    let (best_v, arg) = finals
        .iter()
        .min_by(|a, b| {
            a.0.hi()
                .partial_cmp(b.0.hi())
                .expect("finite bounds")
                .then_with(|| a.1.cmp(&b.1))
        })
        .expect("nonempty");
    let value = Interval::new(lo.expect("nonempty"), best_v.hi().clone());
    let orders = arg.iter().map(|&k| root_order(modulus, k)).collect();
    Ok(MinSumResult {
        modulus,
        n,
        value,
        argmin: arg.clone(),
        orders,
        zeros_found: zeros,
        stats,
    })
}

/// `f(n+1, N) > (n+1)^{−N}` for all-ones coefficients.
pub fn liouville_floor_check(inst: &RootSumInstance, result: &MinSumResult) -> Result<bool> {
    let one = Rational::from(1);
    if inst.coeffs.iter().any(|c| c.exact() != Some((one.clone(), Rational::new()))) {
        return Err(Error::Invalid("the floor applies to all-ones coefficients".into()));
    }
    let base = Integer::from(inst.n() as u64 + 1);
    let floor = Rational::from((1, base.pow_u(inst.modulus as u32)));
    Ok(result.value.lo() > &floor)
}

trait PowU {
    fn pow_u(&self, k: u32) -> Integer;
}

impl PowU for Integer {
    fn pow_u(&self, k: u32) -> Integer {
        Integer::from(rug::ops::Pow::pow(self, k))
    }
}

/// Whether `|S| < c^{−1} N^{−λ}` at the minimum; `None` when the
/// enclosures still overlap at 4096 bits.
pub fn below_threshold(
    inst: &RootSumInstance,
    r: &MinSumResult,
    lambda: &Rational,
    c: &Rational,
    prec: u32,
) -> Result<Option<bool>> {
    if *c <= 0 {
        return Err(Error::Invalid("c must be positive".into()));
    }
    let pp = PowerProduct::power(&Rational::from(inst.modulus), &Rational::from(-lambda))
        .mul(&PowerProduct::rational(&Rational::from(c.recip_ref())));
    let mut v = r.value.clone();
    let mut prec = prec.max(64);
    loop {
        let thr = pp.enclosure(prec);
        if v.hi() < thr.lo() {
            return Ok(Some(true));
        }
        if v.lo() >= thr.hi() {
            return Ok(Some(false));
        }
        if prec >= 4096 {
            return Ok(None);
        }
        prec *= 2;
        // Only the upper end tightens: other contenders may sit below the
        // argmin's lower end.
        let w = abs_tuple(inst, &r.argmin, prec)?;
        v = Interval::new(r.value.lo().clone(), w.hi().clone());
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanHit {
    pub p: u64,
    pub value_lo: f64,
    pub value_hi: f64,
    pub argmin: Vec<u64>,
    pub orders: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub t: u64,
    pub primes_tested: usize,
    pub qualifying: Vec<ScanHit>,
    pub undecided: Vec<u64>,
}

/// Primes `p ≤ t` with `0 < |a_0 + Σ a_j ζ_j| < c^{−1} p^{−λ}` for some
/// `p`-th roots of unity.
pub fn prime_scan(
    coeffs: &[Coeff],
    lambda: &Rational,
    c: &Rational,
    t: u64,
    opts: &MinSumOptions,
) -> Result<ScanReport> {
    if *c <= 0 {
        return Err(Error::Invalid("c must be positive".into()));
    }
    let primes = primes_in(2, t);
    let mut rep = ScanReport {
        t,
        primes_tested: primes.len(),
        qualifying: Vec::new(),
        undecided: Vec::new(),
    };
    if coeffs.len() <= 1 {
        return Ok(rep);
    }
    for p in primes {
        let inst = RootSumInstance::new(p, coeffs.to_vec())?;
        let r = match min_sum(&inst, opts) {
            Ok(r) => r,
            Err(Error::SearchExhausted(_)) => continue,
            Err(e) => return Err(e),
        };
        let verdict = below_threshold(&inst, &r, lambda, c, opts.prec)?;
        match verdict {
            Some(true) => rep.qualifying.push(ScanHit {
                p,
                value_lo: r.value_lo(),
                value_hi: r.value_hi(),
                argmin: r.argmin.clone(),
                orders: r.orders.clone(),
            }),
            Some(false) => {}
            None => rep.undecided.push(p),
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingSubsum {
    /// Indices into `a_0, …, a_n`.
    pub indices: Vec<usize>,
    pub contains_a0: bool,
}

/// All nonempty proper index sets `J ⊊ {0, …, n}` whose subsum
/// `Σ_{j ∈ J} a_j ζ_j` (with `ζ_0 = 1`) vanishes exactly.
pub fn subsum_analysis(inst: &RootSumInstance, tuple: &[u64]) -> Result<Vec<VanishingSubsum>> {
    let n = inst.n();
    if tuple.len() != n {
        return Err(Error::Invalid("tuple length differs from n".into()));
    }
    if n + 1 > 20 {
        return Err(Error::BudgetExceeded("more than 2^20 subsets".into()));
    }
    let ks: Vec<u64> = std::iter::once(0).chain(tuple.iter().copied()).collect();
    let full = (1u32 << (n + 1)) - 1;
    let mut out = Vec::new();
    for mask in 1..full {
        let idx: Vec<usize> = (0..=n).filter(|j| mask >> j & 1 == 1).collect();
        let terms: Vec<(u64, &Coeff)> = idx.iter().map(|&j| (ks[j], &inst.coeffs[j])).collect();
        if vanishing_terms(inst.modulus, &terms)? {
            out.push(VanishingSubsum {
                contains_a0: idx[0] == 0,
                indices: idx,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: usize, modulus: u64) -> MinSumResult {
        min_sum(&RootSumInstance::ones(n, modulus), &MinSumOptions::default()).unwrap()
    }

    #[test]
    fn small_values() {
        let r = f(1, 2);
        assert!(r.value.contains(&Rational::from(2)));
        let r = f(1, 6);
        assert!(r.value.contains(&Rational::from(1)));
        let r = f(1, 5);
        let g = 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos();
        assert!((r.value_lo() - g).abs() < 1e-12 && (r.value_hi() - g).abs() < 1e-12);
    }

    #[test]
    fn zero_tests() {
        let i3 = RootSumInstance::ones(2, 3);
        assert!(is_zero_exact(&i3, &[1, 2]).unwrap());
        assert!(!is_zero_exact(&i3, &[1, 1]).unwrap());
        let i6 = RootSumInstance::ones(2, 6);
        // 1 + ζ^2 + ζ^4 = 0 for ζ = e^{2πi/6}.
        assert!(is_zero_exact(&i6, &[2, 4]).unwrap());
        assert!(!is_zero_exact(&i6, &[1, 5]).unwrap());
        // 1 + i·i = 0 with N = 4: ζ = i.
        let g = RootSumInstance::new(4, vec![Coeff::Rational(Rational::from(1)), Coeff::Gaussian(Rational::new(), Rational::from(1))]).unwrap();
        assert!(is_zero_exact(&g, &[1]).unwrap());
        assert!(!is_zero_exact(&g, &[0]).unwrap());
    }

    #[test]
    fn subsums() {
        let i = RootSumInstance::ones(2, 3);
        assert!(subsum_analysis(&i, &[1, 2]).unwrap().is_empty());
        let i = RootSumInstance::ones(3, 2);
        let s = subsum_analysis(&i, &[0, 1, 1]).unwrap();
        let sets: Vec<Vec<usize>> = s.iter().map(|v| v.indices.clone()).collect();
        assert_eq!(sets, vec![vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3]]);
        assert!(subsum_analysis(&RootSumInstance::ones(3, 5), &[0, 0, 0]).unwrap().is_empty());
    }

    #[test]
    fn prune_agrees_with_brute_force() {
        for modulus in [2u64, 3, 5, 6, 7, 10, 12] {
            for n in 1..=2 {
                let inst = RootSumInstance::ones(n, modulus);
                let a = min_sum(&inst, &MinSumOptions::default()).unwrap();
                let b = min_sum(&inst, &MinSumOptions { prune: false, ..Default::default() }).unwrap();
                assert_eq!(a.value_lo(), b.value_lo(), "N={modulus} n={n}");
                assert_eq!(a.value_hi(), b.value_hi());
            }
        }
    }

    #[test]
    fn edge_cases() {
        let r = min_sum(&RootSumInstance::ones(0, 7), &MinSumOptions::default()).unwrap();
        assert!(r.value.contains(&Rational::from(1)));
        let scan = prime_scan(&[Coeff::Rational(Rational::from(1))], &Rational::from(1), &Rational::from(1), 50, &MinSumOptions::default()).unwrap();
        assert!(scan.qualifying.is_empty());
        let inst = RootSumInstance::ones(1, 6);
        assert!(liouville_floor_check(&inst, &f(1, 6)).unwrap());
        assert!(Coeff::parse("0.5±1e-9").is_ok());
    }

    #[test]
    fn above_liouville_floor() {
        let inst = RootSumInstance::ones(2, 7);
        let r = min_sum(&inst, &MinSumOptions::default()).unwrap();
        assert!(liouville_floor_check(&inst, &r).unwrap());
        assert!(r.value_lo() > 3f64.powi(-7));
    }

    #[test]
    fn prune_agrees_up_to_sixty() {
        for modulus in (13..=60).step_by(7) {
            let inst = RootSumInstance::from_rationals(modulus, &[Rational::from(1), Rational::from(2), Rational::from((-2, 3))]).unwrap();
            let a = min_sum(&inst, &MinSumOptions::default()).unwrap();
            let b = min_sum(&inst, &MinSumOptions { prune: false, ..Default::default() }).unwrap();
            assert_eq!((a.value_lo(), a.value_hi()), (b.value_lo(), b.value_hi()), "N={modulus}");
            assert_eq!(a.zeros_found, b.zeros_found);
        }
    }

    #[test]
    fn exact_zero_matches_high_precision() {
        for modulus in [4u64, 6, 8, 9, 12, 15] {
            let inst = RootSumInstance::ones(3, modulus);
            for a in 0..modulus {
                for b in a..modulus {
                    for c in b..modulus {
                        let t = [a, b, c];
                        let v = abs_tuple(&inst, &t, 200).unwrap();
                        if is_zero_exact(&inst, &t).unwrap() {
                            assert!(v.lo().is_zero() && v.hi().to_f64() < 1e-50);
                        } else {
                            assert!(v.lo().to_f64() > 1e-50, "N={modulus} {t:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn conjugate_argmin_attains_value() {
        let inst = RootSumInstance::ones(2, 11);
        let r = min_sum(&inst, &MinSumOptions::default()).unwrap();
        let conj: Vec<u64> = r.argmin.iter().map(|&k| (11 - k) % 11).collect();
        assert!(abs_tuple(&inst, &conj, 128).unwrap().overlaps(&r.value));
    }

    #[test]
    fn gaussian_coefficients() {
        // 1 + i·ζ with N = 8: ζ = ζ_8^2 = i gives 1 − 1 = 0.
        let inst = RootSumInstance::new(8, vec![Coeff::Rational(Rational::from(1)), Coeff::Gaussian(Rational::new(), Rational::from(1))]).unwrap();
        let r = min_sum(&inst, &MinSumOptions::default()).unwrap();
        assert_eq!(r.zeros_found, 1);
        let g = (2.0 - 2.0 * (std::f64::consts::PI / 4.0).cos()).sqrt();
        assert!((r.value_lo() - g).abs() < 1e-12);
        let enc = RootSumInstance::new(4, vec![Coeff::Rational(Rational::from(1)), Coeff::parse("1±1e-30").unwrap()]).unwrap();
        assert!(matches!(min_sum(&enc, &MinSumOptions::default()), Err(Error::PrecisionExhausted(_))));
    }
}
