use std::path::Path;

use dioph_core::approx::{
    compactify, count_approximants, decompactify, dist_star, rationals_in, ApproxQuery, DistOptions, SetSpec,
};
use dioph_core::auxpoly::{build_aux_polynomials, AuxParams, BuildOptions, CubeSelection};
use dioph_core::expr::{derivative_bound, eval_interval, eval_jet, parse, BoundOptions};
use dioph_core::heights::{height_rational, liouville_lower_bound, RealAlgebraic};
use dioph_core::multipoly::MultiPoly;
use dioph_core::rootsum::{abs_tuple, min_sum, primes_in, MinSumOptions, RootSumInstance};
use dioph_core::{Domain, Integer, Interval, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::Float;

fn h(q: &Rational) -> Integer {
    height_rational(q).as_integer().unwrap()
}

fn rat() -> impl Strategy<Value = Rational> {
    (-1000i64..=1000, 1i64..=1000).prop_map(|(a, b)| Rational::from((a, b)))
}

fn small_rat(rng: &mut ChaCha8Rng, bound: i64, den: i64) -> Rational {
    let d = rng.gen_range(1..=den);
    Rational::from((rng.gen_range(-bound * d..=bound * d), d))
}

fn parabola() -> SetSpec {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/parabola.set");
    SetSpec::parse(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(|x| Rational::from(x.abs_ref())).max().unwrap_or_default()
}

fn monomial(x: &[Rational], i: &[u32]) -> Rational {
    x.iter().zip(i).map(|(v, &k)| v.clone().pow(k as i32)).product()
}

const CORPUS: [&str; 10] = [
    "x^2 - 3*x + 1/7",
    "exp(x) * sin(x)",
    "cos(3*x) + x^5",
    "log(x + 2) / (x + 3)",
    "sqrt(x + 1) - x^(1/3)",
    "exp(-x^2) * (1 + x)^4",
    "x^sqrt(2)",
    "sin(pi * x) / (2 + cos(x))",
    "(x - 1/3)^7",
    "exp(x) - 1 - x - x^2/2",
];

fn corpus_point(rng: &mut ChaCha8Rng) -> Rational {
    // Positive, so that real powers stay defined.
    Rational::from((rng.gen_range(1..=4000), 2000))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn height_is_submultiplicative(a in rat(), b in rat()) {
        let (ha, hb) = (h(&a), h(&b));
        prop_assert!(h(&Rational::from(&a + &b)) <= Integer::from(2 * &ha) * &hb);
        prop_assert!(h(&Rational::from(&a * &b)) <= ha * hb);
    }

    #[test]
    fn compactify_round_trips(v in proptest::collection::vec(rat(), 1..4)) {
        let x: Vec<Rational> = v.into_iter().map(|q| q.abs() - Rational::from((999, 1000))).collect();
        let y = compactify(&x).unwrap();
        prop_assert!(y.iter().all(|c| *c < 1));
        prop_assert_eq!(decompactify(&y).unwrap(), x);
    }

    #[test]
    fn rational_window_matches_brute_force(t in 1u64..=30, a in -90i64..90, w in 1i64..60, d in 1i64..8) {
        let lo = Rational::from((a, d));
        let hi = Rational::from((a + w, d));
        let got = rationals_in(t, &lo, &hi);
        let t = t as i64;
        let mut want = Vec::new();
        for q in 1..=t {
            for p in -t..=t {
                let x = Rational::from((p, q));
                if *x.denom() == q && x >= lo && x <= hi {
                    want.push(x);
                }
            }
        }
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn power_difference_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=3);
        let x: Vec<Rational> = (0..k).map(|_| small_rat(&mut rng, 3, 9)).collect();
        let y: Vec<Rational> = (0..k).map(|_| small_rat(&mut rng, 3, 9)).collect();
        let mut i = vec![0u32; k];
        for _ in 0..rng.gen_range(1..=5) {
            i[rng.gen_range(0..k)] += 1;
        }
        let l = i.iter().sum::<u32>() as i32;
        let diff: Vec<Rational> = x.iter().zip(&y).map(|(a, b)| Rational::from(a - b)).collect();
        let dxy = max_abs(&diff);
        let lhs = Rational::from((monomial(&x, &i) - monomial(&y, &i)).abs_ref());
        let rhs = dxy.clone().max(Rational::from(1)).pow(l - 1)
            * (max_abs(&x) + 1u32).pow(l)
            * dxy;
        prop_assert!(lhs <= rhs, "x={:?} y={:?} i={:?}", x, y, i);
    }
}

// Multiplies out a polynomial's value at a rational point.
fn eval_q(f: &MultiPoly, x: &[Rational]) -> Rational {
    f.terms()
        .map(|(e, c)| Rational::from(c) * monomial(x, e))
        .sum()
}

#[test]
fn liouville_bound_holds_on_rational_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut nonzero = 0;
    for _ in 0..400 {
        let n = rng.gen_range(1..=2usize);
        let d = rng.gen_range(1..=3u32);
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=4) {
            let mut e = vec![0u32; n];
            for _ in 0..rng.gen_range(0..=d) {
                e[rng.gen_range(0..n)] += 1;
            }
            terms.push((e, Integer::from(rng.gen_range(-10i64..=10))));
        }
        let f = MultiPoly::from_terms(n, terms);
        if f.is_zero() {
            continue;
        }
        let x: Vec<Rational> = (0..n)
            .map(|_| {
                let q = rng.gen_range(1..=10i64);
                Rational::from((rng.gen_range(-10..=10), q))
            })
            .collect();
        let v = Rational::from(eval_q(&f, &x).abs_ref());
        if v == 0 {
            continue;
        }
        let pts: Vec<RealAlgebraic> = x.iter().map(RealAlgebraic::from_rational).collect();
        let b = liouville_lower_bound(&f, &pts).unwrap();
        assert!(b.bound.cmp_rational(&v).is_le(), "f={f:?} x={x:?}");
        nonzero += 1;
    }
    assert!(nonzero > 200);
}

#[test]
fn liouville_bound_holds_at_quadratic_points() {
    let s2 = RealAlgebraic::sqrt(&Rational::from(2)).unwrap();
    // f(x) = a x + b at √2 has value a√2 + b.
    for a in -6i64..=6 {
        for b in -6i64..=6 {
            if a == 0 && b == 0 {
                continue;
            }
            let f = MultiPoly::from_terms(1, [(vec![1], Integer::from(a)), (vec![0], Integer::from(b))]);
            let bound = liouville_lower_bound(&f, std::slice::from_ref(&s2)).unwrap().bound.to_f64();
            let v = (a as f64 * 2f64.sqrt() + b as f64).abs();
            assert!(bound <= v * (1.0 + 1e-12), "a={a} b={b}");
        }
    }
}

#[test]
fn interval_evaluation_encloses_point_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let exprs: Vec<_> = CORPUS.iter().map(|s| parse(s).unwrap()).collect();
    for trial in 0..1000 {
        let f = &exprs[trial % exprs.len()];
        let x = corpus_point(&mut rng);
        let fine = f.eval_point(std::slice::from_ref(&x), 512).unwrap();
        let dom = Domain::new(vec![x.clone()], vec![x.clone()]).unwrap();
        let coarse = eval_interval(f, &dom, 64).unwrap();
        assert!(coarse.contains(&fine.mid_rational()), "{f} at {x}");
    }
}

#[test]
fn jets_match_finite_differences() {
    let h = Rational::from((1, 1 << 12));
    let h2 = h.clone().square().to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in CORPUS {
        let f = parse(s).unwrap();
        for _ in 0..5 {
            let x = Rational::from((rng.gen_range(400..=3600), 2000));
            let at = |dx: i32| {
                let p = Rational::from(&x + Rational::from(&h * dx));
                Float::with_val(256, &f.eval_point(&[p], 256).unwrap().mid())
            };
            let (m, c, p) = (at(-1), at(0), at(1));
            let hf = h.to_f64();
            let d1 = Float::with_val(256, &p - &m).to_f64() / (2.0 * hf);
            let d2 = Float::with_val(256, &p - Float::with_val(256, &c * 2u32) + &m).to_f64() / (2.0 * h2);
            let j = eval_jet(&f, std::slice::from_ref(&x), 2, 256).unwrap();
            let (j1, j2) = (j.coeff(&[1]).unwrap().mid_f64(), j.coeff(&[2]).unwrap().mid_f64());
            assert!((j1 - d1).abs() <= 100.0 * h2, "{s} at {x}: {j1} vs {d1}");
            assert!((j2 - d2).abs() <= 100.0 * h2, "{s} at {x}: {j2} vs {d2}");
        }
    }
}

fn factorial(a: &[u32]) -> f64 {
    a.iter().map(|&k| (1..=k).map(f64::from).product::<f64>()).product()
}

#[test]
fn monomial_derivatives_respect_bound() {
    let maps: [(&[&str], usize); 2] = [(&["x", "x^2", "(exp(x)-1)/2"], 1), (&["x*y", "sin(x) + y"], 2)];
    let order = 3u32;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (src, k) in maps {
        let phi: Vec<_> = src.iter().map(|s| parse(s).unwrap()).collect();
        let b = derivative_bound(&phi, &Domain::unit(k), order, &BoundOptions::default())
            .unwrap()
            .to_f64();
        for _ in 0..20 {
            let z: Vec<Rational> = (0..k).map(|_| Rational::from((rng.gen_range(0..=64), 64))).collect();
            let jets: Vec<_> = phi.iter().map(|f| eval_jet(f, &z, order, 128).unwrap()).collect();
            let mut i = vec![0u32; phi.len()];
            for _ in 0..rng.gen_range(1..=4) {
                i[rng.gen_range(0..phi.len())] += 1;
            }
            let l: u32 = i.iter().sum();
            let mut prod = jets[0].powi(i[0]);
            for (jj, &e) in jets.iter().zip(&i).skip(1) {
                prod = prod.mul(&jj.powi(e));
            }
            for alpha in prod.space().indices() {
                let la: u32 = alpha.iter().sum();
                let d = prod.coeff(alpha).unwrap().mag_f64() * factorial(alpha);
                let cap = b.powi(l as i32) * f64::from(l).powi(la as i32);
                assert!(d <= cap * (1.0 + 1e-12), "{src:?} i={i:?} α={alpha:?}: {d} > {cap}");
            }
        }
    }
}

#[test]
fn sup_bound_survives_dense_sampling() {
    let phi = [parse("x").unwrap(), parse("(exp(x)-1)/2").unwrap()];
    let p = AuxParams::unconstrained(1, 2, 1, 2, 3, &Rational::from(10), &Rational::from((1, 2))).unwrap();
    let opts = BuildOptions {
        selection: CubeSelection::Indices((0..929).step_by(37).map(|i| vec![i]).collect()),
        ..Default::default()
    };
    let build = build_aux_polynomials(&phi, &p, &opts).unwrap();
    assert!(!build.polynomials.is_empty());
    for f in &build.polynomials {
        let part = f.cube.intersect(&Domain::unit(1)).unwrap();
        let samples = 10 * f.pieces.max(1);
        for s in 0..=samples {
            let z = Rational::from(part.lo()[0].clone() + part.width(0) * Rational::from((s as i64, samples as i64)));
            let x = Float::with_val(256, &z);
            let y = Float::with_val(256, (x.clone().exp() - 1u32) / 2u32);
            let mut v = Float::with_val(256, 0);
            for (e, c) in f.poly.terms() {
                v += Float::with_val(256, x.clone().pow(e[0]) * y.clone().pow(e[1])) * c;
            }
            assert!(v.abs().to_f64() <= f.sup_bound.to_f64() * (1.0 + 1e-9), "cube {:?} at {z}", f.index);
        }
    }
}

#[test]
fn graph_points_vanish_for_several_heights() {
    let phi = [parse("x").unwrap(), parse("x^2").unwrap()];
    for t in [36i64, 64, 81] {
        let p = AuxParams::unconstrained(1, 2, 1, 2, 3, &Rational::from(t), &Rational::from(1)).unwrap();
        let pts: Vec<Rational> = rationals_in(t as u64, &Rational::new(), &Rational::from(1))
            .into_iter()
            .filter(|x| h(&Rational::from(x.square_ref())) <= t)
            .collect();
        let opts = BuildOptions {
            selection: CubeSelection::Containing(pts.iter().map(|x| vec![x.clone()]).collect()),
            ..Default::default()
        };
        let build = build_aux_polynomials(&phi, &p, &opts).unwrap();
        for x in &pts {
            let q = [RealAlgebraic::from_rational(x), RealAlgebraic::from_rational(&Rational::from(x.square_ref()))];
            let mut hit = false;
            for f in build.polynomials.iter().filter(|f| f.cube.contains(std::slice::from_ref(x))) {
                assert!(dioph_core::auxpoly::verify_vanishing(f, &q).unwrap(), "T={t} x={x}");
                hit = true;
            }
            assert!(hit, "T={t}: no cube covers {x}");
        }
    }
}

#[test]
fn distance_enclosure_is_below_sampled_distance() {
    let spec = parabola();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..60 {
        let q = [small_rat(&mut rng, 1, 50), small_rat(&mut rng, 1, 50)];
        let b = dist_star(&q, &spec, 1e-6, &DistOptions::default()).unwrap();
        let (a, c) = (q[0].to_f64(), q[1].to_f64());
        let sampled = (0..=20_000)
            .map(|s| {
                let t = s as f64 / 20_000.0;
                (a - t).abs().max((c - t * t).abs())
            })
            .fold(1.0, f64::min);
        assert!(b.lo <= sampled + 1e-12, "{q:?}: {b:?} vs {sampled}");
        assert!(b.hi >= sampled - 2e-4, "{q:?}: {b:?} vs {sampled}");
    }
}

#[test]
fn counts_partition_candidates_and_shrink_with_lambda() {
    let spec = parabola();
    for t in [10u64, 20, 30] {
        let mut prev: Option<(u64, u64)> = None;
        for lam in [(3, 2), (2, 1), (3, 1), (4, 1)] {
            let r = count_approximants(&spec, &ApproxQuery::new(t, 1, Rational::from(lam))).unwrap();
            assert_eq!(r.n + r.undecided + r.rejected, r.enumerated);
            if let Some((n, u)) = prev {
                assert!(r.n <= n + u, "T={t} λ={lam:?}");
            }
            prev = Some((r.n, r.undecided));
        }
    }
}

fn coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..=n)
        .map(|_| loop {
            let q = Rational::from((rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3)));
            if q != 0 {
                break q;
            }
        })
        .collect()
}

#[test]
fn pruned_search_matches_full_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3usize);
        let modulus = rng.gen_range(2..=if n == 3 { 18 } else { 40 });
        let inst = RootSumInstance::from_rationals(modulus, &coeffs(&mut rng, n)).unwrap();
        let a = min_sum(&inst, &MinSumOptions::default());
        let b = min_sum(&inst, &MinSumOptions { prune: false, ..Default::default() });
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!((a.value_lo(), a.value_hi()), (b.value_lo(), b.value_hi()), "{inst:?}");
                assert_eq!(a.zeros_found, b.zeros_found);
            }
            (a, b) => assert_eq!(a.is_err(), b.is_err()),
        }
    }
}

#[test]
fn conjugate_tuples_have_equal_modulus() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4usize);
        let modulus = rng.gen_range(2..=200u64);
        let inst = RootSumInstance::from_rationals(modulus, &coeffs(&mut rng, n)).unwrap();
        let t: Vec<u64> = (0..n).map(|_| rng.gen_range(0..modulus)).collect();
        let c: Vec<u64> = t.iter().map(|&k| (modulus - k) % modulus).collect();
        let (u, v): (Interval, Interval) = (abs_tuple(&inst, &t, 128).unwrap(), abs_tuple(&inst, &c, 128).unwrap());
        assert!(u.overlaps(&v), "N={modulus} {t:?}");
    }
}

#[test]
fn four_term_minimum_decays_polynomially() {
    let pts: Vec<(f64, f64)> = primes_in(50, 200)
        .into_iter()
        .map(|p| ((p as f64).ln(), min_sum(&RootSumInstance::ones(3, p), &MinSumOptions::default()).unwrap().value_hi().ln()))
        .collect();
    let fit = dioph_core::approx::fit_log_log(&pts).unwrap();
    assert!(fit.slope >= -2.5 && fit.slope <= -1.5, "slope {}", fit.slope);
}
