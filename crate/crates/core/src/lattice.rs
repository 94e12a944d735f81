//! Exact integral LLL, lattice enumeration and an approximate Thue–Siegel
//! solver.
//!
//! The solver looks for a nonzero integer vector `f` with `|f| ≤ Q` and
//! `|Af| ≤ (2√N)^{N/M} Q^{1-N/M} Δ^{1/M}` (max-norms) by working in the
//! lattice spanned by the columns of `A` stacked over `ε·I_N`, scaled to
//! integers.

use std::cmp::Ordering;

use rug::float::Round;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::power::PowerProduct;

/// Largest `N` handled by the enumeration mode.
pub const EXACT_MAX_N: usize = 14;

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut s = Integer::new();
    for (x, y) in a.iter().zip(b) {
        s += Integer::from(x * y);
    }
    s
}

// round(n / d) for d > 0, halves rounded up.
fn round_div(n: &Integer, d: &Integer) -> Integer {
    let two_n = Integer::from(n << 1) + d;
    two_n.div_rem_floor(Integer::from(d << 1)).0
}

/// LLL-reduces the rows of `basis` with Lovász parameter `delta` using the
/// all-integer variant (Cohen, Algorithm 2.6.7), so no rounding occurs.
pub fn lll_reduce(basis: &[Vec<Integer>], delta: &Rational) -> Result<Vec<Vec<Integer>>> {
    if *delta <= Rational::from((1, 4)) || *delta >= 1 {
        return Err(Error::Invalid("LLL parameter must lie in (1/4, 1)".into()));
    }
    let n = basis.len();
    let mut b: Vec<Vec<Integer>> = basis.to_vec();
    if n == 0 {
        return Ok(b);
    }
    let (dp, dq) = (delta.numer().clone(), delta.denom().clone());
    // d[i+1] holds d_i of the text; d[0] = 1.
    let mut d = vec![Integer::from(1); n + 1];
    let mut lam = vec![vec![Integer::new(); n]; n];
    d[1] = dot(&b[0], &b[0]);
    if d[1] == 0 {
        return Err(Error::DependentBasis);
    }
    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 0..j {
                    u = (Integer::from(&d[i + 1] * &u) - Integer::from(&lam[k][i] * &lam[j][i])) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u == 0 {
                        return Err(Error::DependentBasis);
                    }
                    d[k + 1] = u;
                }
            }
        }
        red(&mut b, &mut lam, &d, k, k - 1);
        let lhs = Integer::from(&d[k + 1] * &d[k - 1]) + Integer::from(lam[k][k - 1].square_ref());
        if Integer::from(&dq * &lhs) < Integer::from(&dp * Integer::from(d[k].square_ref())) {
            swap(&mut b, &mut lam, &mut d, k, kmax);
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                red(&mut b, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
    Ok(b)
}

fn red(b: &mut [Vec<Integer>], lam: &mut [Vec<Integer>], d: &[Integer], k: usize, l: usize) {
    let dl = &d[l + 1];
    if Integer::from(lam[k][l].abs_ref()) * 2u32 <= *dl {
        return;
    }
    let q = round_div(&lam[k][l], dl);
    let bl = b[l].clone();
    for (x, y) in b[k].iter_mut().zip(&bl) {
        *x -= Integer::from(&q * y);
    }
    lam[k][l] -= Integer::from(&q * dl);
    for i in 0..l {
        let t = Integer::from(&q * &lam[l][i]);
        lam[k][i] -= t;
    }
}

fn swap(b: &mut [Vec<Integer>], lam: &mut [Vec<Integer>], d: &mut [Integer], k: usize, kmax: usize) {
    b.swap(k, k - 1);
    for j in 0..k - 1 {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let bb = (Integer::from(&d[k - 1] * &d[k + 1]) + Integer::from(l.square_ref())) / &d[k];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (Integer::from(&d[k + 1] * &lam[i][k - 1]) - Integer::from(&l * &t)) / &d[k];
        lam[i][k - 1] = (Integer::from(&bb * &t) + Integer::from(&l * &lam[i][k])) / &d[k + 1];
    }
    d[k] = bb;
}

/// LLL on a rational basis: denominators are cleared, the integer basis
/// reduced, and the result scaled back.
pub fn lll_reduce_rational(basis: &[Vec<Rational>], delta: &Rational) -> Result<Vec<Vec<Rational>>> {
    let mut l = Integer::from(1);
    for row in basis {
        for x in row {
            l.lcm_mut(x.denom());
        }
    }
    let ints: Vec<Vec<Integer>> = basis
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| Integer::from(x.numer() * Integer::from(&l / x.denom())))
                .collect()
        })
        .collect();
    Ok(lll_reduce(&ints, delta)?
        .into_iter()
        .map(|row| row.into_iter().map(|x| Rational::from((x, l.clone()))).collect())
        .collect())
}

/// Exact Gram–Schmidt data: squared norms `B_i` and coefficients `μ_ij`.
pub fn gram_schmidt(basis: &[Vec<Integer>]) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let n = basis.len();
    let mut star: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut bn = Vec::with_capacity(n);
    let mut mu = vec![vec![Rational::new(); n]; n];
    for i in 0..n {
        let mut v: Vec<Rational> = basis[i].iter().map(Rational::from).collect();
        for j in 0..i {
            let num: Rational = basis[i]
                .iter()
                .zip(&star[j])
                .map(|(a, s)| Rational::from(a * s))
                .sum();
            mu[i][j] = if bn[j] == 0 { Rational::new() } else { num / &bn[j] };
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= Rational::from(&mu[i][j] * s);
            }
        }
        let b: Rational = v.iter().map(|x| Rational::from(x.square_ref())).sum();
        bn.push(b);
        star.push(v);
    }
    (bn, mu)
}

/// Checks size reduction and the Lovász condition exactly.
pub fn is_lll_reduced(basis: &[Vec<Integer>], delta: &Rational) -> bool {
    let (bn, mu) = gram_schmidt(basis);
    let half = Rational::from((1, 2));
    for i in 0..basis.len() {
        for j in 0..i {
            if Rational::from(mu[i][j].abs_ref()) > half {
                return false;
            }
        }
        if i > 0 {
            let rhs = Rational::from(delta - Rational::from(mu[i][i - 1].square_ref())) * &bn[i - 1];
            if bn[i] < rhs {
                return false;
            }
        }
    }
    true
}

// ------------------------------------------------------------ enumeration

/// Floating Gram–Schmidt data computed at high precision, then rounded.
struct Gso {
    b: Vec<f64>,
    mu: Vec<Vec<f64>>,
}

fn gso_f64(basis: &[Vec<Integer>]) -> Gso {
    let prec = 256;
    let n = basis.len();
    let fb: Vec<Vec<Float>> = basis
        .iter()
        .map(|r| r.iter().map(|x| Float::with_val(prec, x)).collect())
        .collect();
    let mut star: Vec<Vec<Float>> = Vec::with_capacity(n);
    let mut bn: Vec<Float> = Vec::with_capacity(n);
    let mut mu = vec![vec![0f64; n]; n];
    for i in 0..n {
        let mut v = fb[i].clone();
        for j in 0..i {
            let mut num = Float::new(prec);
            for (a, s) in fb[i].iter().zip(&star[j]) {
                num += Float::with_val(prec, a * s);
            }
            let m = num / &bn[j];
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= Float::with_val(prec, &m * s);
            }
            mu[i][j] = m.to_f64();
        }
        let mut s = Float::new(prec);
        for x in &v {
            s += Float::with_val(prec, x.square_ref());
        }
        bn.push(s);
        star.push(v);
    }
    Gso {
        b: bn.iter().map(|x| x.to_f64()).collect(),
        mu,
    }
}

/// Calls `visit` with the coefficient vector of every nonzero lattice
/// point (up to sign) whose squared norm is at most `*radius2` under the
/// floating Gram–Schmidt data. `visit` may shrink `*radius2`. Returns
/// false when the node budget ran out.
fn enumerate<F: FnMut(&[i64], &mut f64)>(g: &Gso, radius2: &mut f64, budget: &mut u64, visit: &mut F) -> bool {
    let n = g.b.len();
    let mut x = vec![0i64; n];
    rec(g, n, 0.0, &mut x, radius2, budget, visit)
}

fn rec<F: FnMut(&[i64], &mut f64)>(
    g: &Gso,
    level: usize,
    partial: f64,
    x: &mut Vec<i64>,
    radius2: &mut f64,
    budget: &mut u64,
    visit: &mut F,
) -> bool {
    if level == 0 {
        if x.iter().any(|&v| v != 0) {
            visit(x, radius2);
        }
        return true;
    }
    let i = level - 1;
    let n = x.len();
    let c: f64 = -(i + 1..n).map(|j| g.mu[j][i] * x[j] as f64).sum::<f64>();
    let top_zero = x[i + 1..].iter().all(|&v| v == 0);
    let center = c.round() as i64;
    // Zig-zag around the center: center, center+1, center-1, ...
    let mut step = 0i64;
    let (mut up_done, mut down_done) = (false, false);
    loop {
        if up_done && down_done {
            break;
        }
        let cand = if step == 0 {
            Some(center)
        } else if step > 0 {
            if up_done {
                None
            } else {
                Some(center + step)
            }
        } else if down_done {
            None
        } else {
            Some(center + step)
        };
        if let Some(v) = cand {
            let t = v as f64 - c;
            let l = partial + t * t * g.b[i];
            if l > *radius2 * (1.0 + 1e-9) {
                if step == 0 {
                    break;
                } else if step > 0 {
                    up_done = true;
                } else {
                    down_done = true;
                }
            } else if !(top_zero && v < 0) {
                if *budget == 0 {
                    return false;
                }
                *budget -= 1;
                x[i] = v;
                if !rec(g, level - 1, l, x, radius2, budget, visit) {
                    x[i] = 0;
                    return false;
                }
                x[i] = 0;
            }
        }
        step = if step > 0 { -step } else { -step + 1 };
        if step.unsigned_abs() > 1 << 40 {
            break;
        }
    }
    true
}

fn combine(basis: &[Vec<Integer>], x: &[i64]) -> Vec<Integer> {
    let mut v = vec![Integer::new(); basis[0].len()];
    for (row, &c) in basis.iter().zip(x) {
        if c != 0 {
            for (a, b) in v.iter_mut().zip(row) {
                *a += Integer::from(b * c);
            }
        }
    }
    v
}

fn norm2(v: &[Integer]) -> Integer {
    dot(v, v)
}

/// All shortest nonzero vectors (up to sign) of the lattice spanned by an
/// LLL-reduced basis, with the number of enumeration nodes used.
pub fn shortest_vectors(reduced: &[Vec<Integer>], budget: u64) -> Result<(Vec<Vec<Integer>>, u64)> {
    let g = gso_f64(reduced);
    let first = norm2(&reduced[0]);
    let mut best = first.clone();
    let mut found: Vec<Vec<Integer>> = vec![reduced[0].clone()];
    let mut r2 = first.to_f64();
    let mut left = budget;
    let complete = enumerate(&g, &mut r2, &mut left, &mut |x, r2| {
        let v = combine(reduced, x);
        let nv = norm2(&v);
        match nv.cmp(&best) {
            Ordering::Less => {
                best = nv;
                found = vec![v];
                *r2 = best.to_f64();
            }
            Ordering::Equal => {
                if !found.iter().any(|w| *w == v || w.iter().zip(&v).all(|(a, b)| *a == -b.clone())) {
                    found.push(v);
                }
            }
            Ordering::Greater => {}
        }
    });
    if !complete {
        return Err(Error::SearchExhausted(format!(
            "shortest-vector enumeration exceeded {budget} nodes"
        )));
    }
    Ok((found, budget - left))
}

// ------------------------------------------------------------ Siegel

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SiegelMode {
    /// LLL only; bounds hold up to the factor `2^((N-1)/2)`.
    Reduced,
    /// Enumeration; both bounds hold verbatim.
    Exact,
}

/// An `M × N` real matrix with certified entries, a height bound `Q` and
/// the product `Δ` of the row norms.
#[derive(Clone, Debug)]
pub struct SiegelInstance {
    rows: Vec<Vec<Interval>>,
    exact: Option<Vec<Vec<Rational>>>,
    q: PowerProduct,
    delta: PowerProduct,
}

impl SiegelInstance {
    /// Instance with exact rational entries; `Δ` is computed exactly.
    pub fn from_rationals(rows: Vec<Vec<Rational>>, q: PowerProduct) -> Result<Self> {
        let mut delta = PowerProduct::one();
        for r in &rows {
            let s: Rational = r.iter().map(|x| Rational::from(x.square_ref())).sum();
            if s < 1 {
                return Err(Error::Invalid("every row needs Euclidean norm at least 1".into()));
            }
            delta = delta.mul(&PowerProduct::power(&s, &Rational::from((1, 2))));
        }
        let prec = 256;
        let iv = rows
            .iter()
            .map(|r| r.iter().map(|x| Interval::point(prec, x)).collect())
            .collect();
        Self::check_shape(&rows.iter().map(Vec::len).collect::<Vec<_>>())?;
        Ok(SiegelInstance {
            rows: iv,
            exact: Some(rows),
            q,
            delta,
        })
    }

    /// Instance with enclosed entries and a declared row-norm product.
    pub fn from_intervals(rows: Vec<Vec<Interval>>, q: PowerProduct, delta: PowerProduct) -> Result<Self> {
        Self::check_shape(&rows.iter().map(Vec::len).collect::<Vec<_>>())?;
        Ok(SiegelInstance {
            rows,
            exact: None,
            q,
            delta,
        })
    }

    fn check_shape(lens: &[usize]) -> Result<()> {
        let m = lens.len();
        let n = lens.first().copied().unwrap_or(0);
        if m == 0 || n == 0 || lens.iter().any(|&l| l != n) {
            return Err(Error::Invalid("matrix must be non-empty and rectangular".into()));
        }
        if m > n {
            return Err(Error::Invalid(format!("need M ≤ N, got M={m}, N={n}")));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn q(&self) -> &PowerProduct {
        &self.q
    }

    pub fn delta(&self) -> &PowerProduct {
        &self.delta
    }

    pub fn rows(&self) -> &[Vec<Interval>] {
        &self.rows
    }

    fn two_sqrt_n(&self) -> PowerProduct {
        PowerProduct::power(&Rational::from(4 * self.n() as u64), &Rational::from((1, 2)))
    }

    /// `2√N Δ^{1/N}`: the least admissible `Q`.
    pub fn q_threshold(&self) -> PowerProduct {
        self.two_sqrt_n()
            .mul(&self.delta.pow(&Rational::from((1, self.n() as u32))))
    }

    /// `ε = (2√N)^{N/M} Q^{-N/M} Δ^{1/M}`.
    pub fn epsilon(&self) -> PowerProduct {
        let (m, n) = (self.m() as i64, self.n() as i64);
        self.two_sqrt_n()
            .pow(&Rational::from((n, m)))
            .mul(&self.q.pow(&Rational::from((-n, m))))
            .mul(&self.delta.pow(&Rational::from((1, m))))
    }

    /// `(2√N)^{N/M} Q^{1-N/M} Δ^{1/M}`.
    pub fn image_bound(&self) -> PowerProduct {
        self.epsilon().mul(&self.q)
    }

    /// Enclosure of `|Af|` (max-norm) and, for exact instances, its exact
    /// value.
    pub fn image_norm(&self, f: &[Integer]) -> (Interval, Option<Rational>) {
        if let Some(ex) = &self.exact {
            let mut best = Rational::new();
            for r in ex {
                let s: Rational = r.iter().zip(f).map(|(a, x)| Rational::from(a * x)).sum();
                let s = s.abs();
                if s > best {
                    best = s;
                }
            }
            return (Interval::point(256, &best), Some(best));
        }
        let prec = self.rows[0][0].prec().max(128);
        let mut best = Interval::zero(prec);
        for r in &self.rows {
            let mut s = Interval::zero(prec);
            for (a, x) in r.iter().zip(f) {
                if *x != 0 {
                    s = s.add(&a.mul(&Interval::point(prec, &Rational::from(x))));
                }
            }
            best = best.max(&s.abs());
        }
        (best, None)
    }

    /// Whether `|f| ≤ bound_f` and `|Af| ≤ bound_a` are certified.
    fn certify(&self, f: &[Integer], bound_f: &PowerProduct, bound_a: &PowerProduct) -> (bool, bool) {
        let sup = f.iter().map(|x| Integer::from(x.abs_ref())).max().unwrap_or_default();
        let sup_ok = bound_f.cmp_rational(&Rational::from(sup)) != Ordering::Less;
        let (enc, exact) = self.image_norm(f);
        let img_ok = match exact {
            Some(v) => v == 0 || bound_a.cmp_rational(&v) != Ordering::Less,
            None => {
                let hi = enc.hi_rational();
                hi <= 0 || bound_a.cmp_rational(&hi) != Ordering::Less
            }
        };
        (sup_ok, img_ok)
    }
}

/// A certified solution of a Siegel instance.
#[derive(Clone, Debug, Serialize)]
pub struct SiegelSolution {
    #[serde(with = "crate::serde_util::integer_vec")]
    pub f: Vec<Integer>,
    /// `|f|` (max-norm).
    #[serde(serialize_with = "crate::serde_util::integer::serialize")]
    pub sup: Integer,
    /// Upper end of the enclosure of `|Af|`.
    pub image_upper: f64,
    pub mode: SiegelMode,
    /// Whether `|f| ≤ Q` holds without relaxation.
    pub sup_bound_holds: bool,
    /// Whether `|Af| ≤ (2√N)^{N/M} Q^{1-N/M} Δ^{1/M}` holds without relaxation.
    pub image_bound_holds: bool,
    /// `2^((N-1)/2)` in reduced mode, 1 in exact mode.
    pub relaxation: f64,
    pub nodes: u64,
}

/// Settings for [`approx_siegel`].
#[derive(Clone, Debug)]
pub struct SiegelOptions {
    pub mode: SiegelMode,
    /// Node budget for enumeration.
    pub budget: u64,
}

impl Default for SiegelOptions {
    fn default() -> Self {
        SiegelOptions {
            mode: SiegelMode::Exact,
            budget: 2_000_000,
        }
    }
}

fn canonical_sign(mut f: Vec<Integer>) -> Vec<Integer> {
    if let Some(x) = f.iter().find(|x| **x != 0) {
        if *x < 0 {
            for v in f.iter_mut() {
                *v = -v.clone();
            }
        }
    }
    f
}

/// Scaled integer basis of the augmented lattice: row `j` is
/// `(round(W·A[:,j]), E·e_j)`.
fn augmented_basis(inst: &SiegelInstance) -> (Vec<Vec<Integer>>, Integer, Float) {
    let (m, n) = (inst.m(), inst.n());
    let eps = inst.epsilon().enclosure(128);
    let lo = eps.lo().clone();
    // W = 2^s with E = floor(ε W) ≥ 2^20.
    let exp = lo.get_exp().unwrap_or(0);
    let s = (21 - exp).max(0) as u32;
    let w = Float::with_val(256, Float::i_exp(1, s as i32));
    let e = Float::with_val(256, &lo * &w).to_integer_round(Round::Down).expect("finite").0;
    let mut basis = vec![vec![Integer::new(); m + n]; n];
    for (j, row) in basis.iter_mut().enumerate() {
        for i in 0..m {
            let mid = inst.rows[i][j].mid();
            let v = Float::with_val(256 + mid.prec(), &mid * &w);
            row[i] = v.to_integer().expect("finite entry");
        }
        row[m + j] = e.clone();
    }
    (basis, e, w)
}

fn coeffs_of(v: &[Integer], m: usize, e: &Integer) -> Vec<Integer> {
    v[m..].iter().map(|x| Integer::from(x / e)).collect()
}

/// Solves the instance: a nonzero integer `f` with `|f| ≤ Q` and
/// `|Af| ≤ (2√N)^{N/M} Q^{1-N/M} Δ^{1/M}`, exactly in exact mode and up to
/// `2^((N-1)/2)` in reduced mode.
pub fn approx_siegel(inst: &SiegelInstance, opts: &SiegelOptions) -> Result<SiegelSolution> {
    let (m, n) = (inst.m(), inst.n());
    if inst.q.cmp_exact(&inst.q_threshold()) == Ordering::Less {
        return Err(Error::HypothesisViolated(format!(
            "Q = {:.6e} is below 2√N Δ^(1/N) = {:.6e}",
            inst.q.to_f64(),
            inst.q_threshold().to_f64()
        )));
    }
    if opts.mode == SiegelMode::Exact && n > EXACT_MAX_N {
        return Err(Error::SearchExhausted(format!(
            "exact mode is limited to N ≤ {EXACT_MAX_N}, got N = {n}"
        )));
    }
    let bound_a = inst.image_bound();
    let (basis, e, w) = augmented_basis(inst);
    let reduced = lll_reduce(&basis, &Rational::from((3, 4)))?;
    let relax_pp = PowerProduct::power(&Rational::from(2), &Rational::from((n as i64 - 1, 2)));
    let finish = |f: Vec<Integer>, mode: SiegelMode, nodes: u64| {
        let f = canonical_sign(f);
        let (sup_ok, img_ok) = inst.certify(&f, &inst.q, &bound_a);
        let sup = f.iter().map(|x| Integer::from(x.abs_ref())).max().unwrap_or_default();
        let (enc, _) = inst.image_norm(&f);
        SiegelSolution {
            sup,
            image_upper: enc.hi().to_f64(),
            mode,
            sup_bound_holds: sup_ok,
            image_bound_holds: img_ok,
            relaxation: if mode == SiegelMode::Exact { 1.0 } else { relax_pp.to_f64() },
            nodes,
            f,
        }
    };
    if opts.mode == SiegelMode::Reduced {
        for v in &reduced {
            let f = coeffs_of(v, m, &e);
            let (a, b) = inst.certify(&f, &inst.q, &bound_a);
            if a && b {
                return Ok(finish(f, SiegelMode::Reduced, 0));
            }
        }
        let f = coeffs_of(&reduced[0], m, &e);
        let s = finish(f, SiegelMode::Reduced, 0);
        let (a, b) = inst.certify(&s.f, &inst.q.mul(&relax_pp), &bound_a.mul(&relax_pp));
        if !(a && b) {
            return Err(Error::SiegelFailed(
                "LLL vector misses even the relaxed bounds".into(),
            ));
        }
        return Ok(s);
    }

    let (svs, mut nodes) = shortest_vectors(&reduced, opts.budget)?;
    let mut cands: Vec<Vec<Integer>> = svs.iter().map(|v| canonical_sign(coeffs_of(v, m, &e))).collect();
    cands.sort();
    for f in cands {
        let (a, b) = inst.certify(&f, &inst.q, &bound_a);
        if a && b {
            return Ok(finish(f, SiegelMode::Exact, nodes));
        }
    }

    // Rounding the entries can push the shortest vector off the bounds;
    // search the ball that provably holds the real lattice's solution.
    let q_hi = inst.q.enclosure(128).hi().to_f64();
    let eq = Float::with_val(128, &w * inst.epsilon().enclosure(128).hi()).to_f64() * q_hi;
    let slack = ((m as f64).sqrt() * n as f64 + (n as f64).sqrt()) * q_hi + 1.0;
    let mut r2 = (eq + slack).powi(2);
    let g = gso_f64(&reduced);
    let mut left = opts.budget;
    let mut best: Option<(Integer, Vec<Integer>)> = None;
    let complete = enumerate(&g, &mut r2, &mut left, &mut |x, _| {
        let v = combine(&reduced, x);
        let f = canonical_sign(coeffs_of(&v, m, &e));
        let (a, b) = inst.certify(&f, &inst.q, &bound_a);
        if a && b {
            let nv = norm2(&v);
            let better = match &best {
                None => true,
                Some((bn, bf)) => nv < *bn || (nv == *bn && f < *bf),
            };
            if better {
                best = Some((nv, f));
            }
        }
    });
    nodes += opts.budget - left;
    match best {
        Some((_, f)) => Ok(finish(f, SiegelMode::Exact, nodes)),
        None if !complete => Err(Error::SearchExhausted(format!(
            "no certified vector within {} enumeration nodes",
            opts.budget
        ))),
        None => Err(Error::SiegelFailed(
            "enumeration found no vector meeting both bounds".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Integer>> {
        rows.iter().map(|r| r.iter().map(|&x| Integer::from(x)).collect()).collect()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn lll_examples() {
        let d = q(3, 4);
        let id = ints(&[&[1, 0], &[0, 1]]);
        assert_eq!(lll_reduce(&id, &d).unwrap(), id);
        let r = lll_reduce(&ints(&[&[1, 0], &[4, 1]]), &d).unwrap();
        assert_eq!(norm2(&r[0]), 1);
        assert!(is_lll_reduced(&r, &d));
        let r = lll_reduce(&ints(&[&[201, 37]]), &d).unwrap();
        assert_eq!(r, ints(&[&[201, 37]]));
        assert_eq!(
            lll_reduce(&ints(&[&[1, 2], &[2, 4]]), &d),
            Err(Error::DependentBasis)
        );
    }

    #[test]
    fn siegel_examples() {
        let inst = SiegelInstance::from_rationals(vec![vec![q(3, 1), q(4, 1)]], PowerProduct::int(7)).unwrap();
        let s = approx_siegel(&inst, &SiegelOptions::default()).unwrap();
        assert!(s.sup_bound_holds && s.image_bound_holds);
        assert!(s.sup <= 7);
        assert!(s.image_upper <= 40.0 / 7.0);

        let two_sqrt_two = PowerProduct::power(&q(8, 1), &q(1, 2));
        let inst = SiegelInstance::from_rationals(
            vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]],
            two_sqrt_two,
        )
        .unwrap();
        let s = approx_siegel(&inst, &SiegelOptions::default()).unwrap();
        assert!(s.sup_bound_holds && s.image_bound_holds);

        let inst = SiegelInstance::from_rationals(vec![vec![q(1, 1); 3]], PowerProduct::int(5)).unwrap();
        let s = approx_siegel(&inst, &SiegelOptions::default()).unwrap();
        assert_eq!(s.image_upper, 0.0);
        assert!(s.sup_bound_holds && s.image_bound_holds);
    }

    #[test]
    fn hypothesis_is_enforced() {
        let inst = SiegelInstance::from_rationals(vec![vec![q(3, 1), q(4, 1)]], PowerProduct::int(2)).unwrap();
        assert!(matches!(
            approx_siegel(&inst, &SiegelOptions::default()),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
