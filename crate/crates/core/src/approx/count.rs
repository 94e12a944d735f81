//! `N(T) = #{q ∈ Q^n(T, e) : dist*(q, X) < T^{−λ}}`, optionally minus a
//! neighbourhood of the declared algebraic locus, and growth-exponent fits.

use std::collections::BTreeSet;

use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use super::dist::{classify, DistBound, DistOptions, Threshold, Verdict};
use super::enumerate::{enumerate_algebraic, height_window};
use super::setspec::{Locus, SetSpec};
use crate::error::{Error, Result};
use crate::expr::Domain;
use crate::heights::{is_zero_at, RealAlgebraic};
use crate::interval::Interval;
use crate::multipoly::MultiPoly;
use crate::power::PowerProduct;

#[derive(Clone, Debug)]
pub struct ApproxQuery {
    pub t: u64,
    pub e: u32,
    pub lambda: Rational,
    /// `θ` of the exclusion radius `T^{−θλ}` around declared locus
    /// components. Ignored unless the spec lists components.
    pub exclusion_theta: Option<Rational>,
    pub keep_witnesses: bool,
    pub dist: DistOptions,
    pub max_candidates: usize,
}

impl ApproxQuery {
    pub fn new(t: u64, e: u32, lambda: Rational) -> Self {
        ApproxQuery {
            t,
            e,
            lambda,
            exclusion_theta: None,
            keep_witnesses: false,
            dist: DistOptions::default(),
            max_candidates: 2_000_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t == 0 || self.e == 0 || self.lambda <= 0 {
            return Err(Error::Invalid("need T ≥ 1, e ≥ 1 and λ > 0".into()));
        }
        if let Some(th) = &self.exclusion_theta {
            if *th <= 0 {
                return Err(Error::Invalid("exclusion θ must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub point: Vec<String>,
    pub dist: DistBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountRecord {
    pub t: u64,
    #[serde(with = "crate::serde_util::rational")]
    pub lambda: Rational,
    pub e: u32,
    /// Certified approximants.
    pub n: u64,
    /// Points whose distance or locus test could not be resolved.
    pub undecided: u64,
    /// Points certified not to count, including excluded ones.
    pub rejected: u64,
    /// Certified approximants dropped as being near the algebraic locus.
    pub excluded: u64,
    /// Candidate points tested; `n + undecided + rejected = enumerated`.
    pub enumerated: u64,
    /// `none`, `applied` or `locus-unknown`.
    pub exclusion: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Witness>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Coord {
    Rat(i64, i64),
    Alg(usize),
}

fn rat(a: i64, b: i64) -> Rational {
    Rational::from((a, b))
}

fn float_rational(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite threshold")
}

struct Candidates<'a> {
    t: u64,
    alg: Option<Vec<RealAlgebraic>>,
    rho: Rational,
    query: &'a ApproxQuery,
    out: BTreeSet<Vec<Coord>>,
}

impl Candidates<'_> {
    // Heights-≤T numbers in [lo, hi], or None when there are clearly
    // more than `cap`.
    fn window(&self, lo: &Rational, hi: &Rational, cap: usize) -> Option<Vec<Coord>> {
        match &self.alg {
            None => {
                let est = 0.31 * (self.t as f64).powi(2) * (hi.to_f64() - lo.to_f64()) + 4.0;
                if est > 4.0 * cap as f64 {
                    return None;
                }
                Some(
                    height_window(self.t, lo, hi)
                        .into_iter()
                        .map(|(a, b)| Coord::Rat(a, b))
                        .collect(),
                )
            }
            Some(list) => {
                let l = RealAlgebraic::from_rational(lo);
                let h = RealAlgebraic::from_rational(hi);
                let i = list.partition_point(|x| x.cmp(&l) == std::cmp::Ordering::Less);
                let j = list.partition_point(|x| x.cmp(&h) != std::cmp::Ordering::Greater);
                Some((i..j.max(i)).map(Coord::Alg).collect())
            }
        }
    }

    fn add_product(&mut self, lists: &[Vec<Coord>]) -> Result<()> {
        let total: usize = lists.iter().map(Vec::len).product();
        if self.out.len() + total > self.query.max_candidates {
            return Err(Error::BudgetExceeded(format!(
                "more than {} candidate points",
                self.query.max_candidates
            )));
        }
        let mut idx = vec![0usize; lists.len()];
        if lists.iter().any(Vec::is_empty) {
            return Ok(());
        }
        loop {
            self.out
                .insert(idx.iter().zip(lists).map(|(&i, l)| l[i].clone()).collect());
            let mut j = lists.len();
            loop {
                if j == 0 {
                    return Ok(());
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < lists[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    fn from_points(&mut self, spec: &SetSpec) -> Result<()> {
        for p in &spec.points {
            let lists: Vec<Vec<Coord>> = p
                .iter()
                .map(|c| {
                    let lo = Rational::from(c - &self.rho);
                    let hi = Rational::from(c + &self.rho);
                    self.window(&lo, &hi, usize::MAX).expect("uncapped window")
                })
                .collect();
            self.add_product(&lists)?;
        }
        Ok(())
    }

    fn from_map(&mut self, spec: &SetSpec, dom: &Domain) -> Result<()> {
        const PER_BOX: usize = 4;
        const MAX_DEPTH: usize = 64;
        let prec = self.query.dist.prec;
        let mut stack = vec![(dom.clone(), 0usize)];
        while let Some((b, depth)) = stack.pop() {
            let x = b.intervals(prec);
            let img: Vec<Option<Interval>> = spec.phi.iter().map(|f| f.eval_intervals(&x).ok()).collect();
            let split = |stack: &mut Vec<(Domain, usize)>| {
                let (l, r) = b.bisect(b.widest());
                stack.push((r, depth + 1));
                stack.push((l, depth + 1));
            };
            if img.iter().any(Option::is_none) {
                if depth >= MAX_DEPTH || b.width(b.widest()) == 0 {
                    return Err(Error::DomainViolation(format!(
                        "map not enclosable near parameter box {b}"
                    )));
                }
                split(&mut stack);
                continue;
            }
            let img: Vec<Interval> = img.into_iter().map(Option::unwrap).collect();
            let width = img.iter().map(Interval::width_f64).fold(0f64, f64::max);
            let mut lists = Vec::with_capacity(img.len());
            let mut large = false;
            for v in &img {
                let lo = Rational::from(&v.lo_rational() - &self.rho);
                let hi = Rational::from(&v.hi_rational() + &self.rho);
                match self.window(&lo, &hi, 64) {
                    Some(l) if l.is_empty() => {
                        lists.clear();
                        large = false;
                        break;
                    }
                    Some(l) => lists.push(l),
                    None => {
                        large = true;
                        lists.push(Vec::new());
                    }
                }
            }
            if lists.is_empty() {
                continue;
            }
            let product: usize = lists.iter().map(|l| l.len().max(1)).product();
            let settled = !large && (product <= PER_BOX || width <= self.rho.to_f64());
            if settled || depth >= MAX_DEPTH || b.width(b.widest()) == 0 {
                if large {
                    return Err(Error::BudgetExceeded(format!(
                        "image of parameter box {b} stays too wide"
                    )));
                }
                self.add_product(&lists)?;
            } else {
                split(&mut stack);
            }
        }
        Ok(())
    }
}

fn hull_window(spec: &SetSpec, rho: &Rational, prec: u32) -> Result<Vec<(Rational, Rational)>> {
    let mut w: Vec<Option<(Rational, Rational)>> = vec![None; spec.ambient];
    let mut widen = |j: usize, lo: Rational, hi: Rational| {
        w[j] = Some(match w[j].take() {
            None => (lo, hi),
            Some((a, b)) => (a.min(lo), b.max(hi)),
        });
    };
    if let Some(d) = &spec.domain {
        let x = d.intervals(prec);
        for (j, f) in spec.phi.iter().enumerate() {
            let v = f.eval_intervals(&x)?;
            widen(j, v.lo_rational(), v.hi_rational());
        }
    }
    for p in &spec.points {
        for (j, c) in p.iter().enumerate() {
            widen(j, c.clone(), c.clone());
        }
    }
    Ok(w.into_iter()
        .map(|p| {
            let (a, b) = p.expect("nonempty set");
            (Rational::from(&a - rho), Rational::from(&b + rho))
        })
        .collect())
}

/// Outcome of testing whether `q` lies within `r` of a locus component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nearness {
    Near,
    Far,
    Undecided,
}

/// Decides `q ∈ N(Z, r)` for `Z` the union of the zero sets of the given
/// systems. Far is certified by an interval evaluation excluding 0 on the
/// box `q ± r`; near by `q ∈ Z` exactly, or by a sign change of a single
/// equation between two points of the open box.
pub fn near_locus(q: &[RealAlgebraic], systems: &[Vec<MultiPoly>], r: &Rational, prec: u32) -> Result<Nearness> {
    let rf = Interval::point(prec, r);
    let boxed: Vec<Interval> = q
        .iter()
        .map(|c| {
            let e = c.enclosure(prec);
            Interval::new(e.sub(&rf).lo().clone(), e.add(&rf).hi().clone())
        })
        .collect();
    let mut verdict = Nearness::Far;
    for sys in systems {
        if sys.iter().any(|g| !g.eval_interval(&boxed).contains_zero()) {
            continue;
        }
        let mut exact = true;
        for g in sys {
            if !is_zero_at(g, q)? {
                exact = false;
                break;
            }
        }
        if exact {
            return Ok(Nearness::Near);
        }
        if sys.len() == 1 && sign_change(&sys[0], q, r) {
            return Ok(Nearness::Near);
        }
        verdict = Nearness::Undecided;
    }
    Ok(verdict)
}

// Exact signs at the centre (a rational approximation of q within r/8)
// and the 2n points at distance r/2 along the axes.
fn sign_change(g: &MultiPoly, q: &[RealAlgebraic], r: &Rational) -> bool {
    let eighth = Rational::from(r / 8u32);
    let bits = 8 + (eighth.to_f64().log2().abs().ceil() as u32);
    let c: Vec<Rational> = q
        .iter()
        .map(|x| match x.as_rational() {
            Some(v) => v,
            None => {
                let e = x.refined(bits + 64).enclosure(bits + 64);
                e.mid_rational()
            }
        })
        .collect();
    let half = Rational::from(r / 2u32);
    let mut pts = vec![c.clone()];
    for j in 0..c.len() {
        for s in [1i32, -1] {
            let mut p = c.clone();
            p[j] += Rational::from(&half * s);
            pts.push(p);
        }
    }
    let signs: Vec<std::cmp::Ordering> = pts
        .iter()
        .map(|p| g.eval_rational(p).cmp0())
        .collect();
    signs.contains(&std::cmp::Ordering::Less) && signs.contains(&std::cmp::Ordering::Greater)
}

/// Counts the approximants of `spec` for one query.
pub fn count_approximants(spec: &SetSpec, query: &ApproxQuery) -> Result<CountRecord> {
    query.validate()?;
    let exclusion = match (&spec.locus, &query.exclusion_theta) {
        (Locus::Systems(_), Some(_)) => "applied",
        (Locus::Unknown, _) => "locus-unknown",
        _ => "none",
    };
    let mut rec = CountRecord {
        t: query.t,
        lambda: query.lambda.clone(),
        e: query.e,
        n: 0,
        undecided: 0,
        rejected: 0,
        excluded: 0,
        enumerated: 0,
        exclusion: exclusion.to_string(),
        witnesses: query.keep_witnesses.then(Vec::new),
    };
    if spec.is_empty() {
        return Ok(rec);
    }
    let threshold = Threshold::height_power(query.t, &query.lambda);
    let rho = float_rational(threshold.hi);
    let alg = if query.e > 1 {
        let hull = hull_window(spec, &rho, query.dist.prec)?;
        let lo = hull.iter().map(|p| p.0.clone()).min().expect("ambient ≥ 1");
        let hi = hull.iter().map(|p| p.1.clone()).max().expect("ambient ≥ 1");
        Some(enumerate_algebraic(&Rational::from(query.t), query.e, &lo, &hi)?)
    } else {
        None
    };
    let mut cands = Candidates {
        t: query.t,
        alg,
        rho,
        query,
        out: BTreeSet::new(),
    };
    cands.from_points(spec)?;
    if let Some(d) = &spec.domain {
        cands.from_map(spec, d)?;
    }
    let Candidates { out, alg, .. } = cands;
    let points: Vec<Vec<RealAlgebraic>> = out
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|x| match x {
                    Coord::Rat(a, b) => RealAlgebraic::from_rational(&rat(a, b)),
                    Coord::Alg(i) => alg.as_ref().expect("algebraic list")[i].clone(),
                })
                .collect()
        })
        .collect();
    rec.enumerated = points.len() as u64;
    let prec = query.dist.prec;
    let verdicts: Vec<(Verdict, DistBound)> = points
        .par_iter()
        .map(|p| {
            let qi: Vec<Interval> = p.iter().map(|x| x.enclosure(prec)).collect();
            classify(&qi, spec, &threshold, &query.dist)
        })
        .collect::<Result<_>>()?;
    let systems = spec.locus_polynomials();
    let radius = match (&query.exclusion_theta, exclusion) {
        (Some(th), "applied") => {
            let ex = PowerProduct::power(&Rational::from(query.t), &(-Rational::from(th * &query.lambda)));
            Some(ex.enclosure(128).lo_rational())
        }
        _ => None,
    };
    let near: Vec<Nearness> = match &radius {
        Some(r) => points
            .par_iter()
            .zip(&verdicts)
            .map(|(p, (v, _))| {
                if *v == Verdict::Below {
                    near_locus(p, &systems, r, prec)
                } else {
                    Ok(Nearness::Far)
                }
            })
            .collect::<Result<_>>()?,
        None => vec![Nearness::Far; points.len()],
    };
    for ((p, (v, b)), nr) in points.iter().zip(&verdicts).zip(&near) {
        match (v, nr) {
            (Verdict::Below, Nearness::Far) => {
                rec.n += 1;
                if let Some(w) = rec.witnesses.as_mut() {
                    w.push(Witness {
                        point: p.iter().map(RealAlgebraic::to_string).collect(),
                        dist: *b,
                    });
                }
            }
            (Verdict::Below, Nearness::Near) => {
                rec.excluded += 1;
                rec.rejected += 1;
            }
            (Verdict::Below, Nearness::Undecided) | (Verdict::Undecided, _) => rec.undecided += 1,
            (Verdict::NotBelow, _) => rec.rejected += 1,
        }
    }
    Ok(rec)
}

/// `T_j = t0·2^j` for `j < count`.
pub fn geometric_grid(t0: u64, count: usize) -> Vec<u64> {
    (0..count).map(|j| t0 << j).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// `slope ± 2·stderr`.
    pub band: (f64, f64),
    pub points: usize,
}

/// Least-squares slope of `ln N` against `ln T`, over records with
/// `N > 0`.
pub fn fit_exponent(records: &[CountRecord]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.n > 0)
        .map(|r| ((r.t as f64).ln(), (r.n as f64).ln()))
        .collect();
    fit_log_log(&pts)
}

pub fn fit_log_log(pts: &[(f64, f64)]) -> Result<ExponentFit> {
    let m = pts.len();
    if m < 3 {
        return Err(Error::InsufficientData(format!(
            "{m} records with N > 0, need at least 3"
        )));
    }
    let n = m as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all records share one T".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(ExponentFit {
        slope,
        intercept,
        stderr,
        band: (slope - 2.0 * stderr, slope + 2.0 * stderr),
        points: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn parabola() -> SetSpec {
        SetSpec::from_map("parabola", vec![parse("x").unwrap(), parse("x^2").unwrap()], Domain::unit(1)).unwrap()
    }

    #[test]
    fn parabola_on_graph_points() {
        let q = ApproxQuery::new(10, 1, Rational::from(10));
        let r = count_approximants(&parabola(), &q).unwrap();
        // a/b with b² ≤ 10: 0, 1, 1/2, 1/3, 2/3.
        assert_eq!((r.n, r.undecided), (5, 0));
        assert_eq!(r.n + r.undecided + r.rejected, r.enumerated);
        let e = count_approximants(&SetSpec::empty(2), &q).unwrap();
        assert_eq!(e.n, 0);
    }

    #[test]
    fn exclusion_of_declared_locus() {
        let spec = parabola()
            .with_locus(Locus::Systems(vec![vec![parse("y - x^2").unwrap()]]))
            .unwrap();
        let mut q = ApproxQuery::new(10, 1, Rational::from(10));
        q.exclusion_theta = Some(Rational::from((1, 2)));
        let r = count_approximants(&spec, &q).unwrap();
        assert_eq!((r.n, r.excluded, r.undecided), (0, 5, 0));
    }

    #[test]
    fn fits() {
        let rec = |t: u64, n: u64| CountRecord {
            t,
            lambda: Rational::from(1),
            e: 1,
            n,
            undecided: 0,
            rejected: 0,
            excluded: 0,
            enumerated: n,
            exclusion: "none".into(),
            witnesses: None,
        };
        let sq: Vec<_> = geometric_grid(4, 5).iter().map(|&t| rec(t, t * t)).collect();
        assert!((fit_exponent(&sq).unwrap().slope - 2.0).abs() < 1e-12);
        let c: Vec<_> = geometric_grid(4, 5).iter().map(|&t| rec(t, 7)).collect();
        assert!(fit_exponent(&c).unwrap().slope.abs() < 1e-12);
        assert!(matches!(fit_exponent(&sq[..2]), Err(Error::InsufficientData(_))));
    }
}
