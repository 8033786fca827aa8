use temporal_core::channels::Channel;
use temporal_core::matcore::DensityMatrix;
use temporal_core::steering::{classical_pair, make_assemblage, mubs, tsr, tsw};
use temporal_core::sweep::time_grid;

#[test]
fn mub_sweeps_reach_optimality() {
    let channels = [
        Channel::amplitude_damping(1.0).unwrap(),
        Channel::phase_damping(1.0).unwrap(),
        Channel::depolarizing(1.0).unwrap(),
    ];
    let mut failures = Vec::new();
    for n in 1..=3 {
        let settings = mubs(n).unwrap();
        for ch in &channels {
            for t in time_grid(0.0, 3.0, 16) {
                let asm = make_assemblage(&DensityMatrix::maximally_mixed(vec![2]), &settings, ch, t).unwrap();
                let r = tsr(&asm);
                let w = tsw(&asm).unwrap();
                if !r.is_optimal() || !w.is_optimal() {
                    failures.push((n, format!("{ch:?}"), t, r.status, w.status));
                }
                assert!(r.value >= -1e-8 && w.value >= -1e-8 && w.value <= 1.0 + 1e-8);
            }
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn rank_deficient_weight_matches_trace_distance() {
    // Every classical-pair member has rank one.
    for (alpha, beta) in [(1.0, 0.0), (0.9, 0.05), (0.0, 0.0), (0.5, 1.0)] {
        let w = tsw(&classical_pair(alpha, beta).unwrap()).unwrap();
        assert!(w.is_optimal(), "{alpha} {beta}: {:?}", w.status);
        assert!((w.value - f64::abs(alpha - beta)).abs() < 1e-7);
    }
}
