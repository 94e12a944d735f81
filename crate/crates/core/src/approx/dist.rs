//! Certified enclosures of `dist*(q, X) = min(1, inf_{x ∈ X} |x − q|)` in
//! the max-norm, by best-first branch and bound over the parameter box.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rug::float::Round;
use rug::{Float, Rational};
use serde::Serialize;

use super::setspec::SetSpec;
use crate::error::{Error, Result};
use crate::expr::Domain;
use crate::interval::Interval;
use crate::power::PowerProduct;

#[derive(Clone, Copy, Debug)]
pub struct DistOptions {
    pub prec: u32,
    /// Boxes bisected before giving up.
    pub max_boxes: usize,
}

impl Default for DistOptions {
    fn default() -> Self {
        DistOptions {
            prec: 128,
            max_boxes: 20_000,
        }
    }
}

/// `lo ≤ dist*(q, X) ≤ hi`, with both ends rounded outward to `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistBound {
    pub lo: f64,
    pub hi: f64,
}

impl DistBound {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Below,
    NotBelow,
    Undecided,
}

/// A threshold `ρ` held as an outward-rounded `f64` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold {
    pub lo: f64,
    pub hi: f64,
}

impl Threshold {
    pub fn new(p: &PowerProduct) -> Self {
        let e = p.enclosure(128);
        Threshold {
            lo: down(e.lo()),
            hi: up(e.hi()),
        }
    }

    /// `t^{−λ}`.
    pub fn height_power(t: u64, lambda: &Rational) -> Self {
        Self::new(&PowerProduct::power(&Rational::from(t), &Rational::from(-lambda)))
    }
}

pub(crate) fn down(x: &Float) -> f64 {
    x.to_f64_round(Round::Down)
}

pub(crate) fn up(x: &Float) -> f64 {
    x.to_f64_round(Round::Up)
}

enum Goal {
    Tol(f64),
    Below(Threshold),
}

struct Node {
    lower: f64,
    seq: u64,
    dom: Domain,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    // Min-heap on the lower bound, oldest first on ties.
    fn cmp(&self, o: &Self) -> Ordering {
        o.lower.total_cmp(&self.lower).then(o.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    spec: &'a SetSpec,
    q: &'a [Interval],
    prec: u32,
}

impl Search<'_> {
    // max_j mig(φ_j(B) − q_j) over the coordinates that evaluate; a
    // coordinate undefined somewhere on B just drops out.
    fn lower(&self, dom: &Domain) -> f64 {
        let x = dom.intervals(self.prec);
        let mut lb = 0f64;
        for (f, qj) in self.spec.phi.iter().zip(self.q) {
            if let Ok(v) = f.eval_intervals(&x) {
                lb = lb.max(down(&v.sub(qj).mig()));
            }
        }
        lb
    }

    fn upper_at(&self, z: &[Rational]) -> Option<f64> {
        let x: Vec<Interval> = z.iter().map(|v| Interval::point(self.prec, v)).collect();
        let mut ub = 0f64;
        for (f, qj) in self.spec.phi.iter().zip(self.q) {
            let v = f.eval_intervals(&x).ok()?;
            ub = ub.max(up(&v.sub(qj).mag()));
        }
        Some(ub)
    }

    fn run(&self, goal: Goal, max_boxes: usize) -> (DistBound, Option<Verdict>) {
        let mut hi = 1f64;
        let mut lo_fixed = 1f64;
        for p in &self.spec.points {
            let mut l = 0f64;
            let mut h = 0f64;
            for (pj, qj) in p.iter().zip(self.q) {
                let d = Interval::point(self.prec, pj).sub(qj);
                l = l.max(down(&d.mig()));
                h = h.max(up(&d.mag()));
            }
            lo_fixed = lo_fixed.min(l);
            hi = hi.min(h);
        }
        let mut heap = BinaryHeap::new();
        let mut seq = 0u64;
        if let Some(dom) = &self.spec.domain {
            if let Some(u) = self.upper_at(&dom.mid()) {
                hi = hi.min(u);
            }
            heap.push(Node {
                lower: self.lower(dom),
                seq,
                dom: dom.clone(),
            });
        }
        let mut steps = 0usize;
        loop {
            let top = heap.peek().map_or(f64::INFINITY, |n| n.lower);
            let lo = lo_fixed.min(top).min(hi);
            let bound = DistBound { lo, hi };
            match goal {
                Goal::Tol(tol) if hi - lo <= tol => return (bound, None),
                Goal::Below(t) if hi < t.lo => return (bound, Some(Verdict::Below)),
                Goal::Below(t) if lo >= t.hi => return (bound, Some(Verdict::NotBelow)),
                _ => {}
            }
            if heap.is_empty() || steps >= max_boxes {
                let v = matches!(goal, Goal::Below(_)).then_some(Verdict::Undecided);
                return (bound, v);
            }
            let node = heap.pop().expect("nonempty heap");
            steps += 1;
            let j = node.dom.widest();
            if node.dom.width(j) == 0 {
                // A single parameter value: its enclosure is already tight.
                lo_fixed = lo_fixed.min(node.lower);
                continue;
            }
            let (a, b) = node.dom.bisect(j);
            for child in [a, b] {
                if let Some(u) = self.upper_at(&child.mid()) {
                    hi = hi.min(u);
                }
                let lower = self.lower(&child);
                let cut = match goal {
                    Goal::Tol(_) => hi,
                    Goal::Below(t) => hi.min(t.hi),
                };
                if lower >= cut {
                    lo_fixed = lo_fixed.min(lower);
                    continue;
                }
                seq += 1;
                heap.push(Node { lower, seq, dom: child });
            }
        }
    }
}

fn check_dim(q: &[Interval], spec: &SetSpec) -> Result<()> {
    if q.len() != spec.ambient && !spec.is_empty() {
        return Err(Error::Invalid(format!(
            "point of dimension {} for a set in R^{}",
            q.len(),
            spec.ambient
        )));
    }
    Ok(())
}

/// Enclosure of `dist*(q, X)` of width at most `tol`. The empty set gives
/// exactly `[1, 1]`.
pub fn dist_star_intervals(q: &[Interval], spec: &SetSpec, tol: f64, opts: &DistOptions) -> Result<DistBound> {
    check_dim(q, spec)?;
    let s = Search {
        spec,
        q,
        prec: opts.prec,
    };
    let (b, _) = s.run(Goal::Tol(tol), opts.max_boxes);
    if b.width() > tol {
        return Err(Error::Diverged(format!(
            "distance enclosure [{:e}, {:e}] after {} boxes",
            b.lo, b.hi, opts.max_boxes
        )));
    }
    Ok(b)
}

pub fn dist_star(q: &[Rational], spec: &SetSpec, tol: f64, opts: &DistOptions) -> Result<DistBound> {
    let qi: Vec<Interval> = q.iter().map(|v| Interval::point(opts.prec, v)).collect();
    dist_star_intervals(&qi, spec, tol, opts)
}

/// Decides `dist*(q, X) < ρ`, refining until the enclosure clears the
/// threshold or the box budget runs out.
pub fn classify(q: &[Interval], spec: &SetSpec, rho: &Threshold, opts: &DistOptions) -> Result<(Verdict, DistBound)> {
    check_dim(q, spec)?;
    let s = Search {
        spec,
        q,
        prec: opts.prec,
    };
    let (b, v) = s.run(Goal::Below(*rho), opts.max_boxes);
    Ok((v.unwrap_or(Verdict::Undecided), b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn parabola() -> SetSpec {
        SetSpec::from_map("parabola", vec![parse("x").unwrap(), parse("x^2").unwrap()], Domain::unit(1)).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn examples() {
        let o = DistOptions::default();
        let e = dist_star(&[q(1, 3), q(1, 2)], &SetSpec::empty(2), 1e-9, &o).unwrap();
        assert_eq!((e.lo, e.hi), (1.0, 1.0));
        let p = parabola();
        let on = dist_star(&[q(1, 2), q(1, 4)], &p, 1e-9, &o).unwrap();
        assert!(on.lo == 0.0 && on.hi <= 1e-9);
        let off = dist_star(&[q(0, 1), q(1, 2)], &p, 1e-9, &o).unwrap();
        // max(x, 1/2 − x²) is smallest where x = 1/2 − x².
        let exact = (3f64.sqrt() - 1.0) / 2.0;
        assert!(off.contains(exact), "{off:?}");
        // Sampling oracle for the max-norm distance.
        let m = (0..=200_000)
            .map(|i| {
                let x = i as f64 / 200_000.0;
                x.abs().max((x * x - 0.5).abs())
            })
            .fold(f64::INFINITY, f64::min);
        assert!(off.lo <= m && m <= off.hi + 1e-5, "{off:?} vs {m}");
    }

    #[test]
    fn threshold_classification() {
        let o = DistOptions::default();
        let p = parabola();
        let t = Threshold::height_power(10, &q(10, 1));
        let pt = |a: i64, b: i64, c: i64, d: i64| [Interval::point(128, &q(a, b)), Interval::point(128, &q(c, d))];
        assert_eq!(classify(&pt(1, 3, 1, 9), &p, &t, &o).unwrap().0, Verdict::Below);
        assert_eq!(classify(&pt(1, 3, 1, 8), &p, &t, &o).unwrap().0, Verdict::NotBelow);
    }

    #[test]
    fn isolated_points_and_partial_maps() {
        let o = DistOptions::default();
        let s = SetSpec::from_map(
            "flat",
            vec![parse("x").unwrap(), parse("exp(-1/x)").unwrap()],
            Domain::unit(1),
        )
        .unwrap()
        .with_points(vec![vec![q(0, 1), q(0, 1)]])
        .unwrap();
        let b = dist_star(&[q(0, 1), q(0, 1)], &s, 1e-12, &o).unwrap();
        assert_eq!(b.lo, 0.0);
        let t = Threshold::height_power(20, &q(2, 1));
        let pt = [Interval::point(128, &q(1, 20)), Interval::zero(128)];
        assert_eq!(classify(&pt, &s, &t, &o).unwrap().0, Verdict::Below);
    }
}
