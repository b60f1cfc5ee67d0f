//! Randomized invariants shared by the property tests and the acceptance
//! suite. Every property runs 1000 cases from a fixed seed.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use sqrtfrac::interval::Interval;
use sqrtfrac::lattice::{
    count_in_triangle, f_r_beta, group_action, AffineLattice, CuspFunction, GroupElement, Mat2, Triangle,
};
use sqrtfrac::numth::{
    gauss_sum_closed_signed, gauss_sum_direct, jacobi, lemma_sum_s, omega_tau, totient, GaussSumParams,
    LemmaSumParams,
};
use sqrtfrac::seq::{generate, FracSequence};
use sqrtfrac::stats::{count_in_window, pair_correlation, scaled_gaps, TestFunction};

pub const CASES: u32 = 1000;

pub fn config(seed: u64) -> Config {
    Config { cases: CASES, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

pub struct Property {
    pub name: &'static str,
    pub run: fn() -> Result<(), String>,
}

pub fn all() -> Vec<Property> {
    vec![
        Property { name: "sequence sorted in [0,1) with N = T - floor(sqrt T)", run: sequence_shape },
        Property { name: "pair correlation additive in f", run: pair_additive },
        Property { name: "pair correlation invariant under circular shift", run: pair_shift_invariant },
        Property { name: "scaled gaps sum to N", run: gaps_sum },
        Property { name: "grid windows cover every point equally often", run: grid_windows },
        Property { name: "group action is associative", run: action_associative },
        Property { name: "triangle count invariant under Gamma'", run: count_invariant },
        Property { name: "F_R,beta invariant under Gamma'", run: cusp_invariant },
        Property { name: "Gauss sum direct equals closed form", run: gauss_identity },
        Property { name: "totient and divisor count multiplicative", run: arithmetic_multiplicative },
        Property { name: "Jacobi symbol multiplicative", run: jacobi_multiplicative },
        Property { name: "S non-increasing in T", run: lemma_sum_monotone },
        Property { name: "2^omega(4c) <= tau(4c) for c <= 10^4", run: squarefree_divisors },
    ]
}

fn run<S, F>(seed: u64, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    TestRunner::new(config(seed)).run(&strategy, test).map_err(|e| e.to_string())
}

fn dyadic_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u64..(1 << 30), 2..200)
        .prop_map(|v| v.into_iter().map(|k| k as f64 / (1u64 << 30) as f64).collect())
}

pub fn sequence_shape() -> Result<(), String> {
    run(1, (1u64..5000, 0.0f64..0.9), |(t, c)| {
        let s = generate(t, c).unwrap();
        prop_assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s.values().iter().all(|&x| (0.0..1.0).contains(&x)));
        if c == 0.0 {
            let r = (t as f64).sqrt().floor() as usize;
            prop_assert_eq!(s.len() + r, t as usize);
        }
        Ok(())
    })?;
    run(2, 1u64..20_000, |t| {
        let s = generate(t, 0.0).unwrap();
        let r = (t as f64).sqrt().floor() as usize;
        prop_assert_eq!(s.len() + r, t as usize);
        Ok(())
    })
}

pub fn pair_additive() -> Result<(), String> {
    run(3, (dyadic_values(), -3.0f64..0.0, 0.0f64..2.0, 0.0f64..2.0), |(v, a, w1, w2)| {
        let s = FracSequence::from_values(v).unwrap();
        let i = |lo: f64, hi: f64| TestFunction::indicator(Interval::half_open(lo, hi).unwrap());
        let (b, c) = (a + w1, a + w1 + w2);
        let whole = pair_correlation(&s, &i(a, c)).unwrap();
        let parts = pair_correlation(&s, &i(a, b)).unwrap() + pair_correlation(&s, &i(b, c)).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.abs().max(1.0), "{} vs {}", whole, parts);

        let t1 = TestFunction::Triangle { center: a, half_width: w1 + 0.1, height: 1.0 };
        let t2 = TestFunction::Triangle { center: b, half_width: w2 + 0.1, height: 0.5 };
        let sum = t1.add(&t2).unwrap();
        let whole = pair_correlation(&s, &sum).unwrap();
        let parts = pair_correlation(&s, &t1).unwrap() + pair_correlation(&s, &t2).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-9 * whole.abs().max(1.0), "{} vs {}", whole, parts);
        Ok(())
    })
}

pub fn pair_shift_invariant() -> Result<(), String> {
    run(4, (dyadic_values(), 0u64..1024, -2.0f64..0.0, 0.1f64..3.0), |(v, k, a, w)| {
        let shift = k as f64 / 1024.0;
        let moved: Vec<f64> = v.iter().map(|&x| (x + shift) % 1.0).collect();
        let f = TestFunction::indicator(Interval::half_open(a, a + w).unwrap());
        let r0 = pair_correlation(&FracSequence::from_values(v).unwrap(), &f).unwrap();
        let r1 = pair_correlation(&FracSequence::from_values(moved).unwrap(), &f).unwrap();
        prop_assert_eq!(r0, r1);
        Ok(())
    })
}

pub fn gaps_sum() -> Result<(), String> {
    run(5, prop::collection::vec(0.0f64..1.0, 2..500), |v| {
        let n = v.len() as f64;
        let g = scaled_gaps(&FracSequence::from_values(v).unwrap()).unwrap();
        prop_assert!((g.iter().sum::<f64>() - n).abs() <= 1e-9 * n);
        prop_assert!(g.iter().all(|&x| x >= 0.0));
        Ok(())
    })
}

pub fn grid_windows() -> Result<(), String> {
    run(6, (prop::collection::vec(0.0f64..1.0, 1..300), 1usize..4), |(v, k)| {
        let s = FracSequence::from_values(v).unwrap();
        let n = s.len();
        let unit = Interval::half_open(0.0, 1.0).unwrap();
        let grid = k * n;
        let total: u64 = (0..grid).map(|j| count_in_window(&s, &unit, (j as f64 + 0.5) / grid as f64)).sum();
        prop_assert_eq!(total, (k * n) as u64);
        Ok(())
    })
}

/// Random element of SL(2, Z) as a short word in `S` and powers of `T`.
fn sl2z() -> impl Strategy<Value = Mat2> {
    prop::collection::vec((-3i32..=3, any::<bool>()), 0..5).prop_map(|word| {
        let s = Mat2::new(0.0, -1.0, 1.0, 0.0);
        word.into_iter().fold(Mat2::IDENTITY, |m, (k, flip)| {
            let m = m.mul(&Mat2::translation(k as f64));
            if flip {
                m.mul(&s)
            } else {
                m
            }
        })
    })
}

fn gamma_prime() -> impl Strategy<Value = GroupElement> {
    (sl2z(), -5i32..=5, -5i32..=5).prop_map(|(m, a, b)| GroupElement::new(m, [a as f64, b as f64]).unwrap())
}

fn real_element() -> impl Strategy<Value = GroupElement> {
    (-2.0f64..2.0, -2.0f64..2.0, 0.5f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b, d, x, y)| {
        // [a b; c d] with c chosen to make det 1.
        let a = if a.abs() < 0.1 { 0.1 } else { a };
        let c = (a * d - 1.0) / b.max(0.1);
        let m = Mat2::new(a, b.max(0.1), c, d);
        GroupElement::new(m, [x, y]).unwrap()
    })
}

fn lattice_point() -> impl Strategy<Value = AffineLattice> {
    (-1.0f64..1.0, 0.05f64..3.0, 0.0f64..std::f64::consts::TAU, 0.0f64..1.0, 0.0f64..1.0)
        .prop_map(|(u, v, phi, a, b)| AffineLattice::new(u, v, phi, [a, b]).unwrap())
}

pub fn action_associative() -> Result<(), String> {
    run(7, (real_element(), real_element(), lattice_point()), |(g1, g2, x)| {
        let left = group_action(&g1, &group_action(&g2, &x));
        let right = group_action(&g1.compose(&g2), &x);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
        prop_assert!(close(left.u, right.u) && close(left.v, right.v));
        let dphi = (left.phi - right.phi).rem_euclid(std::f64::consts::TAU);
        prop_assert!(!(1e-9..=std::f64::consts::TAU - 1e-9).contains(&dphi));
        prop_assert!(close(left.xi[0], right.xi[0]) && close(left.xi[1], right.xi[1]));
        Ok(())
    })
}

pub fn count_invariant() -> Result<(), String> {
    run(8, (gamma_prime(), lattice_point(), -1.0f64..0.5, 0.05f64..1.5), |(g, x, a, w)| {
        let tri = Triangle::new(Interval::half_open(a, a + w).unwrap());
        let before = count_in_triangle(&x, &tri).unwrap();
        let after = count_in_triangle(&group_action(&g, &x), &tri).unwrap();
        prop_assert_eq!(before, after);
        Ok(())
    })
}

pub fn cusp_invariant() -> Result<(), String> {
    let point = (-0.5f64..0.5, 1e-3f64..0.05, 0.0f64..1.0, 0.0f64..1.0)
        .prop_map(|(u, v, a, b)| AffineLattice::new(u, v, 0.0, [a, b]).unwrap());
    run(9, (gamma_prime(), point, 1.0f64..4.0, 0.0f64..1.4), |(g, x, r, beta)| {
        let cf = CuspFunction::new(TestFunction::unit_triangle(), r, beta).unwrap();
        let a = f_r_beta(&x, &cf, u64::MAX).value;
        let b = f_r_beta(&group_action(&g, &x), &cf, u64::MAX).value;
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
        Ok(())
    })
}

pub fn gauss_identity() -> Result<(), String> {
    run(10, (1u64..=10_000, 0i64..500_000, any::<bool>()), |(c, k, neg)| {
        let n = 2 * k + 1;
        let n = if neg { -n } else { n };
        let Ok(p) = GaussSumParams::new(n, c) else { return Ok(()) };
        let direct = gauss_sum_direct(&p);
        prop_assert!((direct - gauss_sum_closed_signed(&p).unwrap()).norm() < 1e-9);
        prop_assert!((direct.norm() - (8.0 * c as f64).sqrt()).abs() < 1e-9);
        Ok(())
    })
}

fn coprime_pair() -> impl Strategy<Value = (u64, u64)> {
    (1u64..100_000, 1u64..100_000).prop_filter("coprime", |&(a, b)| sqrtfrac::numeric::gcd(a, b) == 1)
}

pub fn arithmetic_multiplicative() -> Result<(), String> {
    run(11, coprime_pair(), |(a, b)| {
        prop_assert_eq!(totient(a * b), totient(a) * totient(b));
        prop_assert_eq!(omega_tau(a * b).unwrap().1, omega_tau(a).unwrap().1 * omega_tau(b).unwrap().1);
        Ok(())
    })
}

pub fn jacobi_multiplicative() -> Result<(), String> {
    run(12, (-100_000i64..100_000, -100_000i64..100_000, 0u64..500_000), |(a, b, k)| {
        let n = 2 * k + 1;
        prop_assert_eq!(jacobi(a, n).unwrap() * jacobi(b, n).unwrap(), jacobi(a * b, n).unwrap());
        Ok(())
    })
}

pub fn lemma_sum_monotone() -> Result<(), String> {
    run(13, (1.0f64..40.0, 1.0f64..200.0, 1.0f64..4.0), |(d, t, factor)| {
        let f = TestFunction::unit_triangle();
        let s = |t| lemma_sum_s(&LemmaSumParams::new(d, t, f.clone()).unwrap());
        let (lo, hi) = (s(t), s(t * factor));
        prop_assert!(hi <= lo + 1e-9 * lo.max(1.0), "S({}) = {} > S({}) = {}", t * factor, hi, t, lo);
        Ok(())
    })
}

pub fn squarefree_divisors() -> Result<(), String> {
    for c in 1..=10_000u64 {
        let (omega, tau) = omega_tau(4 * c).map_err(|e| e.to_string())?;
        if (1u64 << omega) > tau {
            return Err(format!("c = {c}: 2^{omega} > {tau}"));
        }
    }
    Ok(())
}
