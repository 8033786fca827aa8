use proptest::prelude::*;
use temporal_core::channels::Channel;
use temporal_core::matcore::{pauli, ComplexMatrix, DensityMatrix};
use temporal_core::sdpsolver::{check_certificate, solve, LmiTerm, SdpProblem, Sense};
use temporal_core::steering::{
    classical_pair, classical_tsr_theorem_check, make_assemblage, mubs, nsit_check, tsr, tsr_problem, Assemblage,
    DeterministicStrategySet, Measurement,
};

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn angles() -> impl Strategy<Value = (f64, f64)> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
}

fn bloch(r: f64, (theta, phi): (f64, f64)) -> ComplexMatrix {
    let n = unit(theta, phi);
    (&ComplexMatrix::identity(2) + &pauli::dot(n).scale(r)).scale(0.5)
}

fn quantum_assemblage(dirs: &[(f64, f64)], rate: f64, t: f64) -> Assemblage {
    let settings: Vec<Measurement> = dirs
        .iter()
        .map(|&(th, ph)| Measurement::projective(unit(th, ph)).unwrap())
        .collect();
    let ch = Channel::depolarizing(rate).unwrap();
    make_assemblage(&DensityMatrix::maximally_mixed(vec![2]), &settings, &ch, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hidden_state_models_have_zero_robustness(
        weights in prop::collection::vec(0.01..1.0f64, 8),
        radii in prop::collection::vec(0.0..1.0f64, 8),
        dirs in prop::collection::vec(angles(), 8),
    ) {
        let strategies = DeterministicStrategySet::new(3, 2);
        let total: f64 = weights.iter().sum();
        let sigmas: Vec<ComplexMatrix> = (0..8)
            .map(|l| bloch(radii[l], dirs[l]).scale(weights[l] / total))
            .collect();
        let members = (0..3)
            .map(|x| {
                (0..2)
                    .map(|a| {
                        strategies.answering(a, x).fold(ComplexMatrix::zeros(2, 2), |acc, l| &acc + &sigmas[l])
                    })
                    .collect()
            })
            .collect();
        let asm = Assemblage::new(members).unwrap();
        let s = tsr(&asm);
        prop_assert!(s.is_optimal());
        prop_assert!(s.value.abs() < 1e-7, "{}", s.value);
    }

    #[test]
    fn robustness_is_convex(
        d1 in prop::collection::vec(angles(), 2),
        d2 in prop::collection::vec(angles(), 2),
        t1 in 0.0..1.0f64,
        t2 in 0.0..1.0f64,
        mu in 0.0..1.0f64,
    ) {
        let a = quantum_assemblage(&d1, 1.0, t1);
        let b = quantum_assemblage(&d2, 1.0, t2);
        let mixed = a.mix(&b, mu).unwrap();
        let lhs = tsr(&mixed).value;
        let rhs = mu * tsr(&a).value + (1.0 - mu) * tsr(&b).value;
        prop_assert!(lhs <= rhs + 1e-7, "{lhs} > {rhs}");
    }

    #[test]
    fn robustness_decreases_under_depolarizing(
        dirs in prop::collection::vec(angles(), 3),
        t1 in 0.0..1.5f64,
        dt in 0.0..1.0f64,
    ) {
        let early = tsr(&quantum_assemblage(&dirs, 1.0, t1)).value;
        let late = tsr(&quantum_assemblage(&dirs, 1.0, t1 + dt)).value;
        prop_assert!(late <= early + 1e-7);
    }

    #[test]
    fn optimal_values_are_reproducible_from_hidden_states(
        dirs in prop::collection::vec(angles(), 3),
        t in 0.0..1.0f64,
    ) {
        let asm = quantum_assemblage(&dirs, 0.7, t);
        let p = tsr_problem(&asm);
        let s = solve(&p);
        prop_assert!(s.is_optimal());
        let rep = check_certificate(&p, &s);
        prop_assert!(rep.worst_residual >= -1e-9);
        prop_assert!(rep.objective_mismatch <= 1e-9);
        prop_assert!(s.duality_gap <= 1e-8);
    }

    #[test]
    fn maximally_mixed_start_respects_nsit(
        dirs in prop::collection::vec(angles(), 3),
        t in 0.0..3.0f64,
        rate in 0.1..2.0f64,
        which in 0usize..3,
    ) {
        let ch = match which {
            0 => Channel::amplitude_damping(rate).unwrap(),
            1 => Channel::phase_damping(rate).unwrap(),
            _ => Channel::depolarizing(rate).unwrap(),
        };
        let settings: Vec<Measurement> = dirs
            .iter()
            .map(|&(th, ph)| Measurement::projective(unit(th, ph)).unwrap())
            .collect();
        let asm = make_assemblage(&DensityMatrix::maximally_mixed(vec![2]), &settings, &ch, t).unwrap();
        prop_assert!(nsit_check(&asm).unwrap().holds);
    }

    #[test]
    fn complex_lmis_hold_after_embedding(
        r in 0.0..1.0f64,
        dir in angles(),
        scale in 0.1..3.0f64,
    ) {
        // minimize tr σ s.t. σ ⪰ scale·ρ for a state with complex coherences
        let rho = bloch(r, dir);
        let mut p = SdpProblem::new(Sense::Minimize);
        let k = p.add_block(ComplexMatrix::identity(2)).unwrap();
        p.add_constraint(rho.scale(-scale), vec![LmiTerm::new(k, 1.0)]).unwrap();
        let s = solve(&p);
        prop_assert!(s.is_optimal());
        prop_assert!((s.value - scale).abs() < 1e-8);
        prop_assert!(check_certificate(&p, &s).worst_residual >= -1e-9);
    }
}

#[test]
fn classical_theorem_on_random_instances() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let alpha: f64 = rng.random();
        let beta: f64 = rng.random();
        let c = classical_tsr_theorem_check(&classical_pair(alpha, beta).unwrap()).unwrap();
        worst = worst.max((c.tsr - c.trace_distance).abs());
        assert!(
            (c.tsw - (alpha - beta).abs()).abs() <= 1e-6,
            "α={alpha} β={beta}: {c:?}"
        );
    }
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn scaled_constraints_rescale_robustness() {
    // Scaling every member by c turns min Σ tr σ into c·(1 + TSR).
    for (alpha, beta) in [(0.8, 0.3), (0.35, 0.9), (0.6, 0.6)] {
        let asm = classical_pair(alpha, beta).unwrap();
        let base = tsr_problem(&asm);
        for c in [0.5, 2.0, 7.5] {
            let mut scaled = SdpProblem::new(Sense::Minimize);
            for _ in base.var_dims() {
                scaled.add_block(ComplexMatrix::identity(2)).unwrap();
            }
            for lmi in base.constraints() {
                scaled.add_constraint(lmi.constant.scale(c), lmi.terms.clone()).unwrap();
            }
            let s = solve(&scaled);
            assert!(
                s.is_optimal(),
                "a={alpha} b={beta} c={c} {:?} it={} gap={:e} v={}",
                s.status,
                s.iterations,
                s.duality_gap,
                s.value
            );
            let want = c * (1.0 + (alpha - beta).abs());
            assert!(
                (s.value - want).abs() < 1e-7 * c.max(1.0),
                "c={c}: {} vs {want}",
                s.value
            );
        }
    }
}

#[test]
fn single_setting_has_no_steering() {
    let asm = make_assemblage(
        &DensityMatrix::maximally_mixed(vec![2]),
        &mubs(1).unwrap(),
        &Channel::identity(2),
        0.0,
    )
    .unwrap();
    assert!(tsr(&asm).value.abs() < 1e-8);
}
