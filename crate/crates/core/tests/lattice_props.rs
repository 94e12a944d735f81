use dioph_core::lattice::{
    approx_siegel, is_lll_reduced, lll_reduce, SiegelInstance, SiegelMode, SiegelOptions,
};
use dioph_core::{Integer, PowerProduct, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pow_q(x: &Rational, k: u32) -> Rational {
    let mut r = Rational::from(1);
    for _ in 0..k {
        r *= x;
    }
    r
}

// |Af|^(2M) Q^(2N-2M) <= (4N)^N Π|a_i|^2, all in exact rationals.
fn image_bound_holds(rows: &[Vec<Rational>], q: &Rational, f: &[Integer]) -> bool {
    let (m, n) = (rows.len() as u32, f.len() as u32);
    let img = rows
        .iter()
        .map(|r| {
            let s: Rational = r.iter().zip(f).map(|(a, x)| Rational::from(a * x)).sum();
            s.abs()
        })
        .max()
        .unwrap();
    let lhs = pow_q(&img, 2 * m) * pow_q(q, 2 * n - 2 * m);
    let mut rhs = pow_q(&Rational::from(4 * n), n);
    for r in rows {
        rhs *= r.iter().map(|x| Rational::from(x.square_ref())).sum::<Rational>();
    }
    lhs <= rhs
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<Vec<Rational>>, Rational) {
    let m = rng.gen_range(1..=4usize);
    let n = rng.gen_range(m.max(2)..=12usize);
    let mut rows = Vec::new();
    while rows.len() < m {
        let r: Vec<Rational> = (0..n).map(|_| Rational::from(rng.gen_range(-10..=10i64))).collect();
        if r.iter().any(|x| *x != 0) {
            rows.push(r);
        }
    }
    let delta: f64 = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt())
        .product();
    let thr = 2.0 * (n as f64).sqrt() * delta.powf(1.0 / n as f64);
    let u: f64 = rng.gen_range(1.0..4.0);
    let q = Rational::from(((thr * u * 1000.0).ceil() as i64 + 1, 1000));
    (rows, q)
}

#[test]
fn exact_mode_meets_both_bounds_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unrelaxed = 0;
    for _ in 0..60 {
        let (rows, q) = random_instance(&mut rng);
        let inst = SiegelInstance::from_rationals(rows.clone(), PowerProduct::rational(&q)).unwrap();
        let s = approx_siegel(&inst, &SiegelOptions::default()).unwrap();
        assert!(s.f.iter().any(|x| *x != 0));
        let sup = s.f.iter().map(|x| x.clone().abs()).max().unwrap();
        assert!(Rational::from(sup) <= q);
        assert!(image_bound_holds(&rows, &q, &s.f));

        let r = approx_siegel(
            &inst,
            &SiegelOptions {
                mode: SiegelMode::Reduced,
                ..SiegelOptions::default()
            },
        )
        .unwrap();
        if r.sup_bound_holds && r.image_bound_holds {
            unrelaxed += 1;
        }
    }
    assert!(unrelaxed > 0);
}

#[test]
fn solutions_are_deterministic_and_permutation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (rows, q) = random_instance(&mut rng);
        let n = rows[0].len();
        let inst = SiegelInstance::from_rationals(rows.clone(), PowerProduct::rational(&q)).unwrap();
        let a = approx_siegel(&inst, &SiegelOptions::default()).unwrap();
        let b = approx_siegel(&inst, &SiegelOptions::default()).unwrap();
        assert_eq!(a.f, b.f);

        let perm: Vec<usize> = (0..n).rev().collect();
        let prow: Vec<Vec<Rational>> = rows.iter().map(|r| perm.iter().map(|&j| r[j].clone()).collect()).collect();
        let pinst = SiegelInstance::from_rationals(prow, PowerProduct::rational(&q)).unwrap();
        let p = approx_siegel(&pinst, &SiegelOptions::default()).unwrap();
        let mut back = vec![Integer::new(); n];
        for (i, &j) in perm.iter().enumerate() {
            back[j] = p.f[i].clone();
        }
        let sup = |f: &[Integer]| f.iter().map(|x| x.clone().abs()).max().unwrap();
        // Both are certified solutions of the same problem of the same
        // lattice norm; compare the invariant data.
        assert!(image_bound_holds(&rows, &q, &back));
        assert!(Rational::from(sup(&back)) <= q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lll_output_is_reduced(entries in proptest::collection::vec(-50i64..50, 9)) {
        let basis: Vec<Vec<Integer>> = entries.chunks(3).map(|c| c.iter().map(|&x| Integer::from(x)).collect()).collect();
        let delta = Rational::from((3, 4));
        match lll_reduce(&basis, &delta) {
            Ok(r) => {
                prop_assert!(is_lll_reduced(&r, &delta));
                // Same lattice: determinants of the Gram matrices agree.
                let det = |b: &[Vec<Integer>]| {
                    let g: Vec<Vec<Integer>> = b.iter().map(|u| b.iter().map(|v| u.iter().zip(v).map(|(x, y)| Integer::from(x * y)).sum()).collect()).collect();
                    Integer::from(&g[0][0] * Integer::from(&g[1][1] * &g[2][2] - Integer::from(&g[1][2] * &g[2][1])))
                        - Integer::from(&g[0][1] * Integer::from(&g[1][0] * &g[2][2] - Integer::from(&g[1][2] * &g[2][0])))
                        + Integer::from(&g[0][2] * Integer::from(&g[1][0] * &g[2][1] - Integer::from(&g[1][1] * &g[2][0])))
                };
                prop_assert_eq!(det(&basis), det(&r));
            }
            Err(e) => prop_assert_eq!(e, dioph_core::Error::DependentBasis),
        }
    }
}
