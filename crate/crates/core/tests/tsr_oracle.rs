//! Brute-force bracket for the robustness of `n` mutually unbiased
//! settings on a maximally mixed qubit with Bloch visibility `v`.
//!
//! Upper bound: symmetric hidden states `σ_λ = c (I + r λ̂·σ)`, where `λ̂`
//! is the normalized sign vector of strategy `λ`; the smallest feasible `c`
//! is read off per `r` and `r` is scanned.
//! Lower bound: steering functionals `F_{a|x} = f (I + a s x̂·σ)` with `f`
//! fixed by the largest eigenvalue of `Σ_x F_{λ(x)|x}` over all strategies;
//! `s` is scanned.

use temporal_core::channels::Channel;
use temporal_core::matcore::{herm_eig, min_eigenvalue, pauli, ComplexMatrix, DensityMatrix};
use temporal_core::steering::{make_assemblage, mubs, tsr, Assemblage};

fn axis(x: usize) -> ComplexMatrix {
    pauli::sigma(x + 1)
}

fn sign_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|l| (0..n).map(|x| if (l >> x) & 1 == 0 { 1.0 } else { -1.0 }).collect())
        .collect()
}

fn member(v: f64, x: usize, sign: f64) -> ComplexMatrix {
    (&ComplexMatrix::identity(2) + &axis(x).scale(sign * v)).scale(0.25)
}

/// Smallest total trace of the symmetric ansatz at radius `r`, minus 1.
fn primal_value(n: usize, v: f64, r: f64) -> f64 {
    let lambdas = sign_vectors(n);
    let norm = (n as f64).sqrt();
    // Feasibility is linear in c: find the least c making every constraint PSD.
    let feasible = |c: f64| {
        (0..n).all(|x| {
            [1.0, -1.0].iter().all(|&a| {
                let mut sum = ComplexMatrix::zeros(2, 2);
                for l in lambdas.iter().filter(|l| l[x] == a) {
                    let mut dir = ComplexMatrix::zeros(2, 2);
                    for (k, &s) in l.iter().enumerate() {
                        dir += &axis(k).scale(s / norm);
                    }
                    sum += &(&ComplexMatrix::identity(2) + &dir.scale(r)).scale(c);
                }
                min_eigenvalue(&(&sum - &member(v, x, a))).unwrap() >= -1e-15
            })
        })
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    2.0 * hi * lambdas.len() as f64 - 1.0
}

fn dual_value(n: usize, v: f64, s: f64) -> f64 {
    let functional = |x: usize, a: f64| &ComplexMatrix::identity(2) + &axis(x).scale(a * s);
    let worst = sign_vectors(n)
        .iter()
        .map(|l| {
            let mut sum = ComplexMatrix::zeros(2, 2);
            for (x, &a) in l.iter().enumerate() {
                sum += &functional(x, a);
            }
            herm_eig(&sum).unwrap().max()
        })
        .fold(0.0f64, f64::max);
    let f = 1.0 / worst;
    let mut total = 0.0;
    for x in 0..n {
        for a in [1.0, -1.0] {
            total += functional(x, a).scale(f).trace_product(&member(v, x, a)).re;
        }
    }
    total - 1.0
}

fn scan(g: impl Fn(f64) -> f64, maximize: bool) -> f64 {
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let mut best_x = 0.0;
    let mut best = g(0.0);
    for k in 1..=100 {
        let x = k as f64 / 100.0;
        let val = g(x);
        if better(val, best) {
            best = val;
            best_x = x;
        }
    }
    // golden-section refinement around the best grid point
    let (mut a, mut b) = ((best_x - 0.01f64).max(0.0), (best_x + 0.01f64).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if better(g(c), g(d)) {
            b = d;
        } else {
            a = c;
        }
    }
    let refined = g(0.5 * (a + b));
    if better(refined, best) {
        refined
    } else {
        best
    }
}

fn oracle(n: usize, v: f64) -> (f64, f64) {
    let upper = scan(|r| primal_value(n, v, r), false);
    let lower = scan(|s| dual_value(n, v, s), true).max(0.0);
    (lower, upper.max(0.0))
}

fn mub_assemblage(n: usize, ch: &Channel, t: f64) -> Assemblage {
    make_assemblage(&DensityMatrix::maximally_mixed(vec![2]), &mubs(n).unwrap(), ch, t).unwrap()
}

#[test]
fn oracle_brackets_are_tight() {
    for (n, want) in [(3, 2.0 - 3f64.sqrt()), (2, 3.0 - 2.0 * 2f64.sqrt())] {
        let (lo, hi) = oracle(n, 1.0);
        assert!(hi - lo < 1e-9, "n={n}: [{lo}, {hi}]");
        assert!((lo - want).abs() < 1e-9);
    }
}

#[test]
fn solver_matches_oracle_identity_channel() {
    for n in [2, 3] {
        let (lo, hi) = oracle(n, 1.0);
        let s = tsr(&mub_assemblage(n, &Channel::identity(2), 0.0));
        assert!(s.is_optimal());
        assert!(
            s.value >= lo - 1e-6 && s.value <= hi + 1e-6,
            "n={n}: {} not in [{lo}, {hi}]",
            s.value
        );
        assert!(s.duality_gap <= 1e-8);
    }
}

#[test]
fn solver_matches_oracle_under_depolarizing() {
    let ch = Channel::depolarizing(1.0).unwrap();
    for &t in &[0.1, 0.4, 0.54, 0.56, 0.9] {
        let v = f64::exp(-t);
        let (lo, hi) = oracle(3, v);
        let s = tsr(&mub_assemblage(3, &ch, t));
        assert!(
            s.value >= lo - 1e-6 && s.value <= hi + 1e-6,
            "t={t}: {} not in [{lo}, {hi}]",
            s.value
        );
        let closed = ((3f64.sqrt() * v - 1.0) / (3f64.sqrt() + 1.0)).max(0.0);
        assert!((s.value - closed).abs() < 1e-6);
    }
}
