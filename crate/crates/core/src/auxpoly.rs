//! Auxiliary polynomials: for each cube of a cover of `(0,1)^k`, an integer
//! polynomial of degree at most `d` and height at most `Q` that is small on
//! the image of the cube under `φ`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::combin::{binomial, degree, monomial_count, multi_indices};
use crate::error::{Error, Result};
use crate::expr::{derivative_bound, BoundOptions, Domain, Expr, Jet, JetSpace};
use crate::heights::{is_zero_at, RealAlgebraic};
use crate::interval::Interval;
use crate::lattice::{approx_siegel, SiegelInstance, SiegelMode, SiegelOptions};
use crate::multipoly::MultiPoly;
use crate::power::PowerProduct;

/// Covers with more cubes than this are refused.
pub const MAX_CUBES: usize = 50_000_000;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

// ------------------------------------------------------------ parameters

/// Degree and Taylor order picked for the induction step of the counting
/// argument.
#[derive(Clone, Debug, Serialize)]
pub struct ParamChoice {
    pub d: u32,
    pub b: u32,
    pub lambda: u32,
    /// `(e+1) D_k(b) ≤ D_{r+1}(d) < (e+1) D_k(b+1)`.
    pub siegel_ok: bool,
    /// `(k+1)(r+1)e d/b ≤ ε / C(n, r+1)`.
    pub epsilon_ok: bool,
    /// Right side of the cap on `d`.
    #[serde(with = "crate::serde_util::rational")]
    pub cap: Rational,
    pub cap_ok: bool,
}

fn b_for(k: u32, m: &Integer, e: u32) -> Option<u32> {
    // Largest b with (e+1) D_k(b) ≤ m.
    if Integer::from(e + 1) > *m {
        return None;
    }
    let mut b = 0;
    while Integer::from(e + 1) * monomial_count(k, b + 1) <= *m {
        b += 1;
    }
    Some(b)
}

/// Least `d ≥ (e+1)(r+1) − 1` such that the `b` determined by
/// `(e+1) D_k(b) ≤ D_{r+1}(d) < (e+1) D_k(b+1)` satisfies
/// `(k+1)(r+1)e·d/b ≤ ε / C(n, r+1)`; also returns `λ = 4(r+1)ed`.
pub fn choose_parameters(k: u32, r: u32, n: u32, e: u32, epsilon: &Rational) -> Result<ParamChoice> {
    if !(1 <= k && k <= r && r < n) {
        return Err(Error::Invalid(format!("need 1 ≤ k ≤ r ≤ n−1, got k={k}, r={r}, n={n}")));
    }
    if e == 0 || *epsilon <= 0 || *epsilon > 1 {
        return Err(Error::Invalid("need e ≥ 1 and ε in (0,1]".into()));
    }
    let c = Rational::from(binomial(n, r + 1));
    let target = Rational::from(epsilon / &c);
    let cap = Rational::from(r + 1).pow_u(2 * r + 1)
        * Rational::from(e).pow_u(r)
        * Rational::from(e + 1)
        * c.clone().pow_u(r)
        / epsilon.clone().pow_u(r);
    let mut d = (e + 1) * (r + 1) - 1;
    loop {
        if Rational::from(d) > Rational::from(&cap * 4u32) + 64u32 {
            return Err(Error::FeasibilityCap(format!("no admissible d up to {d}")));
        }
        let m = monomial_count(r + 1, d);
        if let Some(b) = b_for(k, &m, e).filter(|&b| b > 0) {
            let lhs = Rational::from(((k + 1) * (r + 1) * e * d, b));
            if lhs <= target {
                let siegel_ok = Integer::from(e + 1) * monomial_count(k, b) <= m
                    && m < Integer::from(e + 1) * monomial_count(k, b + 1);
                return Ok(ParamChoice {
                    d,
                    b,
                    lambda: 4 * (r + 1) * e * d,
                    siegel_ok,
                    epsilon_ok: true,
                    cap_ok: Rational::from(d) <= cap,
                    cap,
                });
            }
        }
        d += 1;
    }
}

trait PowU {
    fn pow_u(self, k: u32) -> Rational;
}

impl PowU for Rational {
    fn pow_u(self, k: u32) -> Rational {
        (0..k).fold(Rational::from(1), |acc, _| acc * &self)
    }
}

/// The parameter bundle of one auxiliary-polynomial build.
#[derive(Clone, Debug, Serialize)]
pub struct AuxParams {
    pub k: u32,
    pub n: u32,
    pub e: u32,
    #[serde(serialize_with = "crate::serde_util::rational_opt::serialize")]
    pub epsilon: Option<Rational>,
    pub d: u32,
    pub b: u32,
    pub lambda: Option<u32>,
    #[serde(with = "crate::serde_util::rational")]
    pub t: Rational,
    #[serde(with = "crate::serde_util::rational")]
    pub c_prime: Rational,
    pub r_side: PowerProduct,
    pub q: PowerProduct,
    pub delta: PowerProduct,
    #[serde(with = "crate::serde_util::rational")]
    pub sigma: Rational,
    /// `D_n(d) ≥ (e+1) D_k(b)`.
    pub dimension_hypothesis: bool,
}

impl AuxParams {
    /// User-supplied `(d, b)`; only `D_k(b) ≤ D_n(d)` is enforced, and
    /// whether `D_n(d) ≥ (e+1) D_k(b)` holds is recorded.
    pub fn unconstrained(k: u32, n: u32, e: u32, d: u32, b: u32, t: &Rational, c_prime: &Rational) -> Result<Self> {
        if k == 0 || n == 0 || e == 0 || d == 0 || b == 0 {
            return Err(Error::Invalid("k, n, e, d, b must be positive".into()));
        }
        if *t < 1 {
            return Err(Error::Invalid("T must be at least 1".into()));
        }
        if *c_prime <= 0 || *c_prime > 1 {
            return Err(Error::Invalid("c' must lie in (0,1]".into()));
        }
        let m = monomial_count(k, b);
        let nn = monomial_count(n, d);
        if m > nn {
            return Err(Error::HypothesisViolated(format!(
                "D_k(b) = {m} exceeds D_n(d) = {nn}"
            )));
        }
        let (k64, n64, e64, d64, b64) = (k as i64, n as i64, e as i64, d as i64, b as i64);
        let r_side = PowerProduct::rational(c_prime)
            .mul(&PowerProduct::power(t, &q(-(k64 + 1) * n64 * e64 * d64, k64 * b64)));
        let qq = r_side.pow(&q(-(b64 + k64 + 1), (e64 + 1) * (k64 + 1)));
        let mm = m.to_i64().expect("row count fits");
        let delta = r_side.pow(&(q(-b64, k64 + 1) * mm));
        let sigma = q(e64 * (b64 + k64 + 1), (e64 + 1) * (k64 + 1)) + q(b64 * k64, k64 + 1);
        Ok(AuxParams {
            k,
            n,
            e,
            epsilon: None,
            d,
            b,
            lambda: None,
            t: t.clone(),
            c_prime: c_prime.clone(),
            r_side,
            q: qq,
            delta,
            sigma,
            dimension_hypothesis: Integer::from(e + 1) * m <= nn,
        })
    }

    /// Parameters from [`choose_parameters`]; the polynomials live in `r+1`
    /// variables.
    pub fn constrained(k: u32, r: u32, n: u32, e: u32, epsilon: &Rational, t: &Rational, c_prime: &Rational) -> Result<Self> {
        let c = choose_parameters(k, r, n, e, epsilon)?;
        let mut p = Self::unconstrained(k, r + 1, e, c.d, c.b, t, c_prime)?;
        if !p.dimension_hypothesis {
            return Err(Error::HypothesisViolated("D_n(d) < (e+1) D_k(b)".into()));
        }
        p.epsilon = Some(epsilon.clone());
        p.lambda = Some(c.lambda);
        Ok(p)
    }

    /// Number of Taylor rows `D_k(b)`.
    pub fn rows(&self) -> usize {
        monomial_count(self.k, self.b).to_usize().expect("fits")
    }

    /// Number of monomials `D_n(d)`.
    pub fn cols(&self) -> usize {
        monomial_count(self.n, self.d).to_usize().expect("fits")
    }

    /// `Q · r^(b+1) = r^σ`, decided exactly.
    pub fn exponent_identity_holds(&self) -> bool {
        self.q.mul(&self.r_side.pow(&Rational::from(self.b + 1))) == self.r_side.pow(&self.sigma)
    }

    /// `Q ≥ 2√N Δ^{1/N}` with `N = D_n(d)`.
    pub fn siegel_hypothesis_holds(&self) -> bool {
        let n = self.cols() as i64;
        let th = PowerProduct::power(&Rational::from(4 * n), &q(1, 2)).mul(&self.delta.pow(&q(1, n)));
        th.le(&self.q)
    }

    /// Row scale `r^{−(b−ℓ)}` for a Taylor row of order `ℓ`.
    fn row_scale(&self, l: u32) -> PowerProduct {
        self.r_side.pow(&Rational::from(-((self.b - l) as i64)))
    }
}

/// `Σ_{j=0}^{b} C(k+j−1, j)(b−j) = (b/(k+1))·D_k(b)`, checked exactly.
pub fn binomial_identity_holds(k: u32, b: u32) -> bool {
    let lhs: Integer = (0..=b).map(|j| binomial(k + j - 1, j) * Integer::from(b - j)).sum();
    Integer::from(&lhs * (k + 1)) == Integer::from(b) * monomial_count(k, b)
}

// ------------------------------------------------------------ cover

/// Side of the grid cells: `r` itself when it is rational, otherwise a
/// 40-bit dyadic just below it. `None` when `r ≥ 1`.
pub fn cover_step(r_side: &PowerProduct) -> Option<Rational> {
    if r_side.cmp_rational(&Rational::from(1)) != std::cmp::Ordering::Less {
        return None;
    }
    if let Some(r) = r_side.as_rational() {
        return Some(r);
    }
    let lo = r_side.enclosure(128).lo().clone();
    let s = Float::with_val_round(40, &lo, Round::Down).0;
    Some(s.to_rational().expect("finite"))
}

/// Cells per coordinate.
pub fn cover_width(step: Option<&Rational>) -> usize {
    match step {
        None => 1,
        Some(s) => {
            let m = Rational::from(s.recip_ref()).floor().numer().clone() + 1u32;
            m.to_usize().unwrap_or(usize::MAX)
        }
    }
}

fn cell(step: Option<&Rational>, idx: &[usize]) -> Domain {
    match step {
        None => Domain::unit(idx.len()),
        Some(s) => {
            let lo: Vec<Rational> = idx.iter().map(|&j| Rational::from(s * j as u32)).collect();
            let hi: Vec<Rational> = lo.iter().map(|x| Rational::from(x + s)).collect();
            Domain::new(lo, hi).expect("ordered")
        }
    }
}

/// Closed cubes of side at most `r` covering `(0,1)^k`, in grid order with
/// the first coordinate slowest.
pub fn hypercube_cover(k: usize, r_side: &PowerProduct) -> Result<Vec<Domain>> {
    let step = cover_step(r_side);
    let m = cover_width(step.as_ref());
    let total = m.checked_pow(k as u32).filter(|&t| t <= MAX_CUBES);
    let total = total.ok_or_else(|| Error::FeasibilityCap(format!("{m}^{k} cubes")))?;
    Ok((0..total).map(|t| cell(step.as_ref(), &unrank(t, m, k))).collect())
}

fn unrank(mut t: usize, m: usize, k: usize) -> Vec<usize> {
    let mut idx = vec![0; k];
    for j in (0..k).rev() {
        idx[j] = t % m;
        t /= m;
    }
    idx
}

/// Grid indices of every cell containing `z`.
fn cells_containing(z: &[Rational], step: Option<&Rational>, m: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for x in z {
        let mut opts = Vec::new();
        match step {
            None => {
                if *x >= 0 && *x <= 1 {
                    opts.push(0)
                }
            }
            Some(s) => {
                if *x >= 0 {
                    let t = Rational::from(x / s);
                    let j = t.clone().floor().numer().to_usize().unwrap_or(usize::MAX);
                    if j < m {
                        opts.push(j);
                    }
                    if *t.denom() == 1 && j > 0 && j - 1 < m {
                        opts.push(j - 1);
                    }
                }
            }
        }
        out = out
            .into_iter()
            .flat_map(|p| {
                opts.iter().map(move |&j| {
                    let mut v = p.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    out
}

// ------------------------------------------------------------ matrix

/// Jets of `φ^i` for every monomial `i` with `ℓ(i) ≤ d`, in
/// [`multi_indices`] order.
fn monomial_jets(phi: &[Expr], space: &Arc<JetSpace>, center: &[Interval], d: u32) -> Result<Vec<Jet>> {
    let base: Vec<Jet> = phi.iter().map(|f| f.jet(space, center)).collect::<Result<_>>()?;
    let idx = multi_indices(phi.len(), d as usize);
    let mut out: Vec<Jet> = Vec::with_capacity(idx.len());
    let prec = center[0].prec();
    let pos: std::collections::HashMap<&Vec<u32>, usize> = idx.iter().enumerate().map(|(p, i)| (i, p)).collect();
    for i in &idx {
        match i.iter().position(|&v| v > 0) {
            None => out.push(Jet::constant(space, Interval::one(prec))),
            Some(j) => {
                let mut lower = i.clone();
                lower[j] -= 1;
                let prev = &out[pos[&lower]];
                let next = prev.mul(&base[j]);
                out.push(next);
            }
        }
    }
    Ok(out)
}

/// The normalized Taylor matrix of one cube together with the raw rows.
#[derive(Clone, Debug)]
pub struct TaylorMatrix {
    pub instance: SiegelInstance,
    /// Taylor orders `α` of the kept rows.
    pub alphas: Vec<Vec<u32>>,
    /// Raw rows `(∂^α φ^i(z̄)/α!)_i` for every `α`, kept or not.
    pub raw: Vec<Vec<Interval>>,
    pub dropped: Vec<Vec<u32>>,
}

fn check_map(phi: &[Expr], params: &AuxParams) -> Result<()> {
    if phi.len() != params.n as usize {
        return Err(Error::Invalid(format!(
            "map has {} coordinates, parameters expect n = {}",
            phi.len(),
            params.n
        )));
    }
    if let Some(f) = phi.iter().find(|f| f.arity() > params.k as usize) {
        return Err(Error::Arity {
            name: f.to_string(),
            arity: params.k as usize,
        });
    }
    Ok(())
}

/// Rows `r^{−(b−ℓ(α))}/|(∂^α φ^i(z̄)/α!)_i|_2 · (∂^α φ^i(z̄)/α!)_i` for
/// `ℓ(α) ≤ b`. All-zero rows are dropped and `Δ` is adjusted.
pub fn taylor_siegel_matrix(phi: &[Expr], center: &[Rational], params: &AuxParams, prec: u32) -> Result<TaylorMatrix> {
    check_map(phi, params)?;
    if center.len() != params.k as usize {
        return Err(Error::Invalid("center dimension differs from k".into()));
    }
    let space = JetSpace::new(center.len(), params.b)?;
    let c: Vec<Interval> = center.iter().map(|x| Interval::point(prec, x)).collect();
    let jets = monomial_jets(phi, &space, &c, params.d)?;
    let mut raw = Vec::with_capacity(space.len());
    let mut rows = Vec::new();
    let mut alphas = Vec::new();
    let mut dropped = Vec::new();
    let mut delta = PowerProduct::one();
    for (p, alpha) in space.indices().iter().enumerate() {
        let row: Vec<Interval> = jets.iter().map(|j| j.coeffs()[p].clone()).collect();
        if row.iter().all(|x| x.lo() == &0 && x.hi() == &0) {
            log::info!("dropping zero Taylor row α = {alpha:?}");
            dropped.push(alpha.clone());
            raw.push(row);
            continue;
        }
        let norm2 = row.iter().fold(Interval::zero(prec), |s, x| s.add(&x.sqr()));
        let norm = norm2.sqrt().filter(|n| n.is_positive()).ok_or_else(|| {
            Error::DegenerateRow(format!("row α = {alpha:?} cannot be separated from zero"))
        })?;
        let scale_pp = params.row_scale(degree(alpha));
        let scale = scale_pp.enclosure(prec).div(&norm).expect("positive norm");
        rows.push(row.iter().map(|x| x.mul(&scale)).collect());
        delta = delta.mul(&scale_pp);
        alphas.push(alpha.clone());
        raw.push(row);
    }
    if rows.is_empty() {
        return Err(Error::DegenerateRow("every Taylor row vanishes".into()));
    }
    let instance = SiegelInstance::from_intervals(rows, params.q.clone(), delta)?;
    Ok(TaylorMatrix {
        instance,
        alphas,
        raw,
        dropped,
    })
}

// ------------------------------------------------------------ build

/// The constants of the smallness estimate.
#[derive(Clone, Debug, Serialize)]
pub struct SupConstants {
    /// Bound on `|∂^α φ_j|` over `(0,1)^k` for `ℓ(α) ≤ b+1`.
    #[serde(with = "crate::serde_util::rational")]
    pub b_bound: Rational,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// `c₄ · r^σ`.
    pub threshold: f64,
    #[serde(skip)]
    threshold_lo: Rational,
}

impl SupConstants {
    pub fn new(params: &AuxParams, b_bound: &Rational) -> Self {
        let prec = 128;
        let (m, n) = (params.rows() as i64, params.cols() as i64);
        let c1 = PowerProduct::power(&Rational::from(4 * n), &q(n, 2 * m)).enclosure(prec);
        let bd = Interval::point(prec, &b_bound.clone().pow_u(params.d));
        let d = Rational::from(params.d);
        let c2 = c1
            .mul_int(m)
            .mul(&Interval::from_int(prec, n).sqrt().expect("positive"))
            .mul(&bd)
            .mul(&Interval::point(prec, &d.clone().pow_u(params.b)));
        let c3 = Interval::point(prec, &Rational::from(binomial(params.k + params.b, params.k - 1)))
            .mul_int(n)
            .mul(&bd)
            .mul(&Interval::point(prec, &d.pow_u(params.b + 1)));
        let c4 = c2.add(&c3);
        let th = c4.mul(&params.r_side.pow(&params.sigma).enclosure(prec));
        SupConstants {
            b_bound: b_bound.clone(),
            c1: c1.hi().to_f64(),
            c2: c2.hi().to_f64(),
            c3: c3.hi().to_f64(),
            c4: c4.hi().to_f64(),
            threshold: th.lo().to_f64(),
            threshold_lo: th.lo_rational(),
        }
    }
}

/// Which cubes of the cover to process.
#[derive(Clone, Debug, Default)]
pub enum CubeSelection {
    #[default]
    All,
    /// Only cubes containing one of these parameter points.
    Containing(Vec<Vec<Rational>>),
    /// Explicit grid indices.
    Indices(Vec<Vec<usize>>),
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub siegel: SiegelOptions,
    pub selection: CubeSelection,
    /// Working precision of the Taylor entries.
    pub prec: u32,
    /// Maximum bisection depth of the sup certification.
    pub max_depth: u32,
    pub bound: BoundOptions,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            siegel: SiegelOptions::default(),
            selection: CubeSelection::All,
            prec: 192,
            max_depth: 10,
            bound: BoundOptions::default(),
        }
    }
}

/// One polynomial with its certificate.
#[derive(Clone, Debug, Serialize)]
pub struct AuxPolynomial {
    /// Grid index of the cube.
    pub index: Vec<usize>,
    pub cube: Domain,
    #[serde(with = "crate::serde_util::rational_vec")]
    pub center: Vec<Rational>,
    /// Integer coefficients over the monomials of [`AuxBuild::monomials`].
    #[serde(with = "crate::serde_util::integer_vec")]
    pub coeffs: Vec<Integer>,
    #[serde(with = "crate::serde_util::integer")]
    pub height: Integer,
    /// `coeffs / |coeffs|`.
    #[serde(with = "crate::serde_util::rational_vec")]
    pub normalized: Vec<Rational>,
    pub poly: MultiPoly,
    /// Certified upper bound on `|f∘φ|` over the cube within `[0,1]^k`.
    #[serde(with = "crate::serde_util::rational")]
    pub sup_bound: Rational,
    /// Pieces used by the certification.
    pub pieces: usize,
    pub siegel_mode: SiegelMode,
    pub siegel_bounds_hold: bool,
    pub dropped_rows: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuxBuild {
    pub params: AuxParams,
    pub constants: SupConstants,
    pub cubes_total: usize,
    pub monomials: Vec<Vec<u32>>,
    pub polynomials: Vec<AuxPolynomial>,
}

/// One polynomial per selected cube: an integer `f` with `|f| ≤ Q` from the
/// Siegel step and a certificate `|f∘φ| ≤ c₄·r^σ` on the cube.
pub fn build_aux_polynomials(phi: &[Expr], params: &AuxParams, opts: &BuildOptions) -> Result<AuxBuild> {
    check_map(phi, params)?;
    let k = params.k as usize;
    let unit = Domain::unit(k);
    let b_bound = derivative_bound(phi, &unit, params.b + 1, &opts.bound)?;
    let constants = SupConstants::new(params, &b_bound);
    if !params.dimension_hypothesis {
        log::warn!("D_n(d) < (e+1) D_k(b); the smallness estimate is not implied by the Siegel bound");
    }
    let step = cover_step(&params.r_side);
    let m = cover_width(step.as_ref());
    let cubes_total = m
        .checked_pow(k as u32)
        .ok_or_else(|| Error::FeasibilityCap(format!("{m}^{k} cubes")))?;
    let selected: Vec<Vec<usize>> = match &opts.selection {
        CubeSelection::All => {
            if cubes_total > MAX_CUBES {
                return Err(Error::FeasibilityCap(format!("{cubes_total} cubes")));
            }
            (0..cubes_total).map(|t| unrank(t, m, k)).collect()
        }
        CubeSelection::Containing(points) => {
            let mut set = BTreeSet::new();
            for z in points {
                if z.len() != k {
                    return Err(Error::Invalid("point dimension differs from k".into()));
                }
                set.extend(cells_containing(z, step.as_ref(), m));
            }
            set.into_iter().collect()
        }
        CubeSelection::Indices(v) => {
            if v.iter().any(|i| i.len() != k || i.iter().any(|&j| j >= m)) {
                return Err(Error::Invalid("cube index out of range".into()));
            }
            v.clone()
        }
    };
    let monomials = multi_indices(params.n as usize, params.d as usize);
    let polynomials = selected
        .par_iter()
        .map(|idx| build_one(phi, params, opts, &constants, &monomials, idx, cell(step.as_ref(), idx)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AuxBuild {
        params: params.clone(),
        constants,
        cubes_total,
        monomials,
        polynomials,
    })
}

fn build_one(
    phi: &[Expr],
    params: &AuxParams,
    opts: &BuildOptions,
    consts: &SupConstants,
    monomials: &[Vec<u32>],
    idx: &[usize],
    cube: Domain,
) -> Result<AuxPolynomial> {
    let part = cube
        .intersect(&Domain::unit(idx.len()))
        .ok_or_else(|| Error::Invalid(format!("cube {cube} misses [0,1]^k")))?;
    let center = part.mid();
    let tm = taylor_siegel_matrix(phi, &center, params, opts.prec)?;
    let sol = approx_siegel(&tm.instance, &opts.siegel)?;
    let f = sol.f.clone();
    let (sup_bound, pieces) = certify_sup(phi, &f, params, &part, &tm.raw, opts, &consts.threshold_lo)?;
    let height = sol.sup.clone();
    let normalized = f.iter().map(|c| Rational::from((c.clone(), height.clone()))).collect();
    let poly = MultiPoly::from_terms(params.n as usize, monomials.iter().cloned().zip(f.iter().cloned()));
    Ok(AuxPolynomial {
        index: idx.to_vec(),
        cube,
        center,
        coeffs: f,
        height,
        normalized,
        poly,
        sup_bound,
        pieces,
        siegel_mode: sol.mode,
        siegel_bounds_hold: sol.sup_bound_holds && sol.image_bound_holds,
        dropped_rows: tm.dropped,
    })
}

/// Upper bound of `|f∘φ|` on `part` by a Taylor model of order `b` around
/// the midpoint with a Lagrange remainder of order `b+1` enclosed over the
/// whole piece. `raw` optionally supplies the point jets at the midpoint.
fn taylor_sup(phi: &[Expr], f: &[Integer], params: &AuxParams, part: &Domain, raw: Option<&[Vec<Interval>]>, prec: u32) -> Result<Interval> {
    let k = part.dim();
    let center = part.mid();
    let h: Vec<Interval> = (0..k)
        .map(|j| Interval::point(prec, &Rational::from(part.width(j) / 2u32)))
        .collect();
    let fi: Vec<Interval> = f.iter().map(|c| Interval::point(prec, &Rational::from(c))).collect();
    let dot = |row: &[Interval]| {
        row.iter()
            .zip(&fi)
            .filter(|(_, c)| !c.contains_zero())
            .fold(Interval::zero(prec), |s, (a, c)| s.add(&a.mul(c)))
    };
    let hpow = |alpha: &[u32]| {
        alpha
            .iter()
            .zip(&h)
            .fold(Interval::one(prec), |s, (&a, hj)| s.mul(&hj.powi(a as i64).expect("nonnegative")))
    };
    let low_space = JetSpace::new(k, params.b)?;
    let owned;
    let rows: &[Vec<Interval>] = match raw {
        Some(r) => r,
        None => {
            let c: Vec<Interval> = center.iter().map(|x| Interval::point(prec, x)).collect();
            let jets = monomial_jets(phi, &low_space, &c, params.d)?;
            owned = (0..low_space.len())
                .map(|p| jets.iter().map(|j| j.coeffs()[p].clone()).collect::<Vec<_>>())
                .collect::<Vec<_>>();
            &owned
        }
    };
    let mut total = Interval::zero(prec);
    for (alpha, row) in low_space.indices().iter().zip(rows) {
        total = total.add(&dot(row).abs().mul(&hpow(alpha)));
    }
    let top_space = JetSpace::new(k, params.b + 1)?;
    let boxc = part.intervals(prec);
    let jets = monomial_jets(phi, &top_space, &boxc, params.d)?;
    for (p, alpha) in top_space.indices().iter().enumerate() {
        if degree(alpha) != params.b + 1 {
            continue;
        }
        let row: Vec<Interval> = jets.iter().map(|j| j.coeffs()[p].clone()).collect();
        total = total.add(&dot(&row).abs().mul(&hpow(alpha)));
    }
    Ok(total)
}

fn certify_sup(
    phi: &[Expr],
    f: &[Integer],
    params: &AuxParams,
    part: &Domain,
    raw: &[Vec<Interval>],
    opts: &BuildOptions,
    threshold: &Rational,
) -> Result<(Rational, usize)> {
    let mut stack = vec![(part.clone(), 0u32)];
    let mut best = Rational::new();
    let mut pieces = 0;
    while let Some((piece, depth)) = stack.pop() {
        let first = depth == 0;
        let bound = match taylor_sup(phi, f, params, &piece, if first { Some(raw) } else { None }, opts.prec) {
            Ok(v) if v.is_finite() => Some(v.hi_rational()),
            Ok(_) | Err(Error::DomainViolation(_)) => None,
            Err(e) => return Err(e),
        };
        if let Some(v) = bound.filter(|v| v <= threshold) {
            pieces += 1;
            if v > best {
                best = v;
            }
            continue;
        }
        if depth >= opts.max_depth {
            return Err(Error::SupBoundUnverified(format!(
                "|f∘φ| ≤ {:.3e} not certified on {piece} after {depth} bisections",
                threshold.to_f64()
            )));
        }
        let (l, r) = piece.bisect(piece.widest());
        stack.push((r, depth + 1));
        stack.push((l, depth + 1));
    }
    Ok((best, pieces))
}

/// Exact decision of `f(q) = 0` on the integer form of `f`.
pub fn verify_vanishing(f: &AuxPolynomial, point: &[RealAlgebraic]) -> Result<bool> {
    if point.len() != f.poly.nvars() {
        return Err(Error::Invalid("point dimension differs from polynomial arity".into()));
    }
    is_zero_at(&f.poly, point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn parameter_choice_example() {
        let c = choose_parameters(1, 1, 2, 1, &Rational::from(1)).unwrap();
        assert_eq!((c.d, c.b, c.lambda), (14, 59, 112));
        assert!(c.siegel_ok && c.epsilon_ok && c.cap_ok);
        assert_eq!(c.cap, 16);
        assert!(c.b > c.d);
    }

    #[test]
    fn unconstrained_desk_params() {
        let p = AuxParams::unconstrained(1, 2, 1, 2, 3, &Rational::from(10), &q(1, 2)).unwrap();
        assert!(!p.dimension_hypothesis);
        assert!(p.exponent_identity_holds());
        assert_eq!(p.sigma, q(11, 4));
        assert_eq!((p.rows(), p.cols()), (4, 6));
        assert!(p.siegel_hypothesis_holds());
        let p1 = AuxParams::unconstrained(1, 2, 1, 2, 3, &Rational::from(10), &Rational::from(1)).unwrap();
        assert!(!p1.siegel_hypothesis_holds());
    }

    #[test]
    fn cover_examples() {
        let half = PowerProduct::rational(&q(1, 2));
        assert_eq!(hypercube_cover(1, &half).unwrap().len(), 3);
        assert_eq!(hypercube_cover(2, &PowerProduct::int(1)).unwrap().len(), 1);
        assert_eq!(hypercube_cover(1, &PowerProduct::rational(&q(1, 10))).unwrap().len(), 11);
        let cells = cells_containing(&[q(1, 2)], Some(&q(1, 4)), 5);
        assert_eq!(cells, vec![vec![2], vec![1]]);
    }

    #[test]
    fn taylor_matrix_examples() {
        let p = AuxParams::unconstrained(1, 1, 1, 1, 1, &Rational::from(1), &q(1, 4)).unwrap();
        let tm = taylor_siegel_matrix(&[parse("x").unwrap()], &[q(1, 3)], &p, 128).unwrap();
        assert!(tm.raw[0][1].contains(&q(1, 3)));
        assert_eq!(tm.raw[1][0].mid_rational(), 0);
        assert_eq!(tm.raw[1][1].mid_rational(), 1);
        assert_eq!(tm.instance.delta(), &p.delta);

        let p = AuxParams::unconstrained(1, 2, 1, 1, 1, &Rational::from(1), &q(1, 4)).unwrap();
        let phi = [parse("x").unwrap(), parse("x^2").unwrap()];
        let tm = taylor_siegel_matrix(&phi, &[q(1, 2)], &p, 128).unwrap();
        let row: Vec<Rational> = tm.raw[1].iter().map(|x| x.mid_rational()).collect();
        assert_eq!(row, vec![q(0, 1), q(1, 1), q(1, 1)]);
    }

    #[test]
    fn binomial_identity_small() {
        for k in 1..=6 {
            for b in 1..=6 {
                assert!(binomial_identity_holds(k, b));
            }
        }
    }
}
