//! Empirical Łojasiewicz exponents: `dist*(x, Z) ≤ c·|f(x)|^δ` on samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::setspec::SetSpec;
use super::count::fit_log_log;
use crate::error::{Error, Result};
use crate::expr::{Domain, Expr};

#[derive(Clone, Debug, Serialize)]
pub struct LojaEstimate {
    pub c: f64,
    pub delta: f64,
    pub samples: usize,
    /// Samples in the regression (lowest quartile of `|f|`).
    pub fit_points: usize,
    /// Samples with `f(x) = 0` but `x ∉ Z`; no `(c, δ)` covers these.
    pub violations: usize,
}

struct Cloud {
    params: Vec<Vec<f64>>,
    images: Vec<Vec<f64>>,
    step: Vec<f64>,
}

fn maxdist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl Cloud {
    fn new(spec: &SetSpec) -> Option<Cloud> {
        let dom = spec.domain.as_ref()?;
        let k = dom.dim();
        let per = match k {
            0 => 1,
            1 => 4096,
            2 => 160,
            3 => 28,
            _ => 10,
        };
        let lo: Vec<f64> = dom.lo().iter().map(|v| v.to_f64()).collect();
        let hi: Vec<f64> = dom.hi().iter().map(|v| v.to_f64()).collect();
        let step: Vec<f64> = (0..k).map(|j| (hi[j] - lo[j]) / (per - 1).max(1) as f64).collect();
        let mut params = Vec::new();
        let mut idx = vec![0usize; k];
        loop {
            params.push((0..k).map(|j| lo[j] + step[j] * idx[j] as f64).collect::<Vec<_>>());
            let mut j = k;
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < per {
                    break;
                }
                idx[j] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
        let eval = |z: &[f64]| spec.phi.iter().map(|f| f.eval_f64(z)).collect::<Vec<_>>();
        let (params, images): (Vec<_>, Vec<_>) = params
            .into_iter()
            .map(|z| {
                let im = eval(&z);
                (z, im)
            })
            .filter(|(_, im)| im.iter().all(|v| v.is_finite()))
            .unzip();
        Some(Cloud { params, images, step })
    }

    fn dist(&self, spec: &SetSpec, dom: &Domain, x: &[f64]) -> f64 {
        let Some((best, _)) = self
            .images
            .iter()
            .enumerate()
            .map(|(i, im)| (i, maxdist(im, x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
        else {
            return f64::INFINITY;
        };
        // Coordinate-wise golden-section refinement around the nearest
        // cloud point.
        let lo: Vec<f64> = dom.lo().iter().map(|v| v.to_f64()).collect();
        let hi: Vec<f64> = dom.hi().iter().map(|v| v.to_f64()).collect();
        let mut z = self.params[best].clone();
        let obj = |z: &[f64]| {
            let im: Vec<f64> = spec.phi.iter().map(|f| f.eval_f64(z)).collect();
            let d = maxdist(&im, x);
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        };
        let mut fz = obj(&z);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _round in 0..3 {
            for j in 0..z.len() {
                let mut a = (z[j] - self.step[j]).max(lo[j]);
                let mut b = (z[j] + self.step[j]).min(hi[j]);
                let at = |t: f64, z: &[f64]| {
                    let mut w = z.to_vec();
                    w[j] = t;
                    obj(&w)
                };
                let mut c = b - g * (b - a);
                let mut d = a + g * (b - a);
                let (mut fc, mut fd) = (at(c, &z), at(d, &z));
                for _ in 0..60 {
                    if fc < fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - g * (b - a);
                        fc = at(c, &z);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + g * (b - a);
                        fd = at(d, &z);
                    }
                }
                let t = (a + b) / 2.0;
                let ft = at(t, &z);
                if ft < fz {
                    z[j] = t;
                    fz = ft;
                }
            }
        }
        fz
    }
}

/// Floating-point `dist*(x, Z)` in the max-norm, from a parameter-grid
/// cloud refined by golden-section search.
pub fn approx_dist_star(spec: &SetSpec, x: &[f64]) -> f64 {
    approx_dist_with(spec, Cloud::new(spec).as_ref(), x)
}

fn approx_dist_with(spec: &SetSpec, cloud: Option<&Cloud>, x: &[f64]) -> f64 {
    let mut d = spec
        .points
        .iter()
        .map(|p| {
            let pf: Vec<f64> = p.iter().map(|v| v.to_f64()).collect();
            maxdist(&pf, x)
        })
        .fold(f64::INFINITY, f64::min);
    if let (Some(c), Some(dom)) = (cloud, spec.domain.as_ref()) {
        d = d.min(c.dist(spec, dom, x));
    }
    d.min(1.0)
}

/// Samples `x` uniformly in `bx`, fits `δ` as the least-squares slope of
/// `ln dist*(x, Z)` on `ln |f(x)|` over the quarter of samples with the
/// smallest nonzero `|f|`, then takes the least `c` making the inequality
/// hold on every sample with `f(x) ≠ 0`.
pub fn loja_estimate(f: &Expr, bx: &Domain, zero_set: &SetSpec, samples: usize, seed: u64) -> Result<LojaEstimate> {
    if zero_set.is_empty() {
        return Err(Error::Invalid("zero set must be nonempty".into()));
    }
    if zero_set.ambient != bx.dim() || f.arity() > bx.dim() {
        return Err(Error::Invalid("function, box and zero set differ in dimension".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo: Vec<f64> = bx.lo().iter().map(|v| v.to_f64()).collect();
    let hi: Vec<f64> = bx.hi().iter().map(|v| v.to_f64()).collect();
    let xs: Vec<Vec<f64>> = (0..samples)
        .map(|_| lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * rng.gen::<f64>()).collect())
        .collect();
    let cloud = Cloud::new(zero_set);
    let data: Vec<(f64, f64)> = {
        use rayon::prelude::*;
        xs.par_iter()
            .map(|x| (f.eval_f64(x).abs(), approx_dist_with(zero_set, cloud.as_ref(), x)))
            .collect()
    };
    let data: Vec<(f64, f64)> = data.into_iter().filter(|(v, d)| v.is_finite() && d.is_finite()).collect();
    let mut nonzero: Vec<(f64, f64)> = data.iter().copied().filter(|&(v, _)| v > 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::DegenerateSamples("f vanishes at every sample".into()));
    }
    let violations = data.iter().filter(|&&(v, d)| v == 0.0 && d > 0.0).count();
    nonzero.sort_by(|a, b| a.0.total_cmp(&b.0));
    let quarter: Vec<(f64, f64)> = nonzero[..nonzero.len().div_ceil(4)]
        .iter()
        .filter(|&&(_, d)| d > 0.0)
        .map(|&(v, d)| (v.ln(), d.ln()))
        .collect();
    let fit = fit_log_log(&quarter).map_err(|e| match e {
        Error::InsufficientData(m) => Error::DegenerateSamples(m),
        other => other,
    })?;
    let delta = fit.slope;
    let c = nonzero
        .iter()
        .map(|&(v, d)| d / v.powf(delta))
        .fold(0f64, f64::max);
    Ok(LojaEstimate {
        c,
        delta,
        samples: data.len(),
        fit_points: quarter.len(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::setspec::parse_box;
    use crate::expr::parse;
    use rug::Rational;

    fn origin() -> SetSpec {
        SetSpec::empty(1).with_points(vec![vec![Rational::new()]]).unwrap()
    }

    #[test]
    fn one_dimensional() {
        let b = parse_box("[-1, 1]").unwrap();
        let lin = loja_estimate(&parse("x").unwrap(), &b, &origin(), 2000, 0).unwrap();
        assert!((lin.delta - 1.0).abs() < 1e-9, "{lin:?}");
        let sq = loja_estimate(&parse("x^2").unwrap(), &b, &origin(), 2000, 0).unwrap();
        assert!((sq.delta - 0.5).abs() < 1e-9, "{sq:?}");
        assert!(sq.c >= 1.0 - 1e-12);
        let z = loja_estimate(&parse("0*x").unwrap(), &b, &origin(), 50, 0).unwrap_err();
        assert!(matches!(z, Error::DegenerateSamples(_)));
    }

    #[test]
    fn circle() {
        let circ = SetSpec::from_map(
            "circle",
            vec![parse("cos(2*pi*x)").unwrap(), parse("sin(2*pi*x)").unwrap()],
            parse_box("[0, 1]").unwrap(),
        )
        .unwrap();
        let d = approx_dist_star(&circ, &[0.0, 0.5]);
        // The box of half-width s first meets the circle at (s, 1/2 + s).
        assert!((d - (7f64.sqrt() - 1.0) / 4.0).abs() < 1e-9, "{d}");
        let b = parse_box("[-2, 2] x [-2, 2]").unwrap();
        let est = loja_estimate(&parse("x^2 + y^2 - 1").unwrap(), &b, &circ, 2000, 1).unwrap();
        assert!((0.8..=1.2).contains(&est.delta), "{est:?}");
    }
}
