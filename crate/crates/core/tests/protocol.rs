use catamp::closed_form;
use catamp::{AmpConfig, Amplifier, Pairing};

fn amp(alpha: f64, pairing: Pairing) -> Amplifier {
    Amplifier::new(AmpConfig::new(alpha, pairing).unwrap())
}

// xorshift; enough to spread points without pulling in an RNG crate for tests
fn spread(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut s = seed;
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..n).map(|_| (0.1 + 2.4 * next(), -3.0 + 6.0 * next())).collect()
}

#[test]
fn engine_matches_closed_forms() {
    for pairing in Pairing::ALL {
        for (alpha, x) in spread(100, 0x9e37_79b9_7f4a_7c15) {
            let (p, f) = amp(alpha, pairing).point(x);
            let (pc, fc) = (closed_form::density(pairing, alpha, x), closed_form::fidelity(pairing, alpha, x));
            assert!((p - pc).abs() < 1e-12, "{pairing} {alpha} {x}: p {p} vs {pc}");
            assert!((f - fc).abs() < 1e-12, "{pairing} {alpha} {x}: F {f} vs {fc}");
        }
    }
}

#[test]
fn opposite_parity_is_exact_at_zero() {
    for alpha in [0.1, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let f = amp(alpha, Pairing::EvenOdd).fidelity(0.0);
        assert!((f - 1.0).abs() < 1e-12, "{alpha}: {f}");
    }
}

#[test]
fn same_parity_point_fidelities() {
    assert!((amp(0.5, Pairing::OddOdd).fidelity(0.0) - 0.610).abs() < 0.005);
    assert!(amp(2.0, Pairing::OddOdd).fidelity(0.0) >= 0.999);
}

#[test]
fn densities_are_normalized() {
    for pairing in Pairing::ALL {
        for (alpha, r2) in [(0.3, 0.0), (1.2, 0.0), (1.2, 0.2), (2.5, 0.1)] {
            let total = Amplifier::new(AmpConfig::with_loss(alpha, pairing, r2).unwrap()).total_probability();
            assert!((total - 1.0).abs() < 1e-9, "{pairing} {alpha} {r2}: {total}");
        }
    }
}

#[test]
fn fig8_window() {
    let w = amp(1.2, Pairing::EvenOdd).window(1.0).unwrap();
    assert!((w.probability - 0.43).abs() < 0.01, "{w:?}");
    assert!((w.avg_fidelity - 0.9754).abs() < 0.001, "{w:?}");
}

#[test]
fn tiny_window_tends_to_point_fidelity() {
    let a = amp(0.7, Pairing::OddOdd);
    let w = a.window(1e-4).unwrap();
    assert!((w.avg_fidelity - a.fidelity(0.0)).abs() < 1e-7);
}

#[test]
fn average_fidelity_falls_as_window_widens() {
    let a = amp(1.2, Pairing::EvenOdd);
    let stats: Vec<_> = (1..=50).map(|i| a.window(0.04 * i as f64).unwrap()).collect();
    for pair in stats.windows(2) {
        assert!(pair[1].avg_fidelity <= pair[0].avg_fidelity + 1e-12);
        assert!(pair[1].probability >= pair[0].probability);
    }
    for s in &stats {
        let fs: Vec<f64> = (0..=40).map(|k| a.fidelity(s.half_width * k as f64 / 40.0)).collect();
        let lo = fs.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(s.avg_fidelity >= lo - 1e-9 && s.avg_fidelity <= 1.0 + 1e-12);
    }
}

#[test]
fn target_search_satisfies_its_predicate() {
    for (pairing, alpha, target) in [
        (Pairing::EvenOdd, 1.2, 0.9754),
        (Pairing::EvenOdd, 0.4, 0.99),
        (Pairing::OddOdd, 1.5, 0.9),
        (Pairing::EvenEven, 1.0, 0.95),
    ] {
        let a = amp(alpha, pairing);
        let best = a.max_prob_at_target(target).unwrap();
        let again = a.window(best.half_width).unwrap();
        assert!(again.avg_fidelity >= target - 1e-9, "{pairing} {alpha}: {best:?}");
        assert!((again.probability - best.probability).abs() < 1e-9);
        if best.half_width + 0.01 < AmpConfig::new(alpha, pairing).unwrap().scan_limit() {
            assert!(a.window(best.half_width + 0.01).unwrap().avg_fidelity < target);
        }
    }
}

#[test]
fn fig8_window_is_close_to_optimal_at_its_fidelity() {
    let best = amp(1.2, Pairing::EvenOdd).max_prob_at_target(0.9754).unwrap();
    assert!((best.half_width - 1.0).abs() < 0.01, "{best:?}");
}

#[test]
fn low_amplitude_same_parity_has_no_high_fidelity_window() {
    let best = amp(0.5, Pairing::OddOdd).max_prob_at_target(0.95).unwrap();
    assert!(best.probability < 1e-3);
}

#[test]
fn opposite_parity_always_reaches_high_fidelity() {
    for i in 0..=24 {
        let alpha = 0.1 + 0.1 * i as f64;
        let best = amp(alpha, Pairing::EvenOdd).max_prob_at_target(0.99).unwrap();
        assert!(best.probability > 0.0, "{alpha}");
    }
}

#[test]
fn loose_target_accepts_everything() {
    for pairing in Pairing::ALL {
        let best = amp(1.0, pairing).max_prob_at_target(1e-6).unwrap();
        assert!(best.probability > 1.0 - 1e-6, "{pairing}: {best:?}");
    }
}

#[test]
fn loss_hurts_same_parity_more_at_large_amplitude() {
    let lossless = amp(2.0, Pairing::OddOdd).max_prob_at_target(0.95).unwrap().probability;
    let lossy = Amplifier::new(AmpConfig::with_loss(2.0, Pairing::OddOdd, 0.2).unwrap())
        .max_prob_at_target(0.95)
        .unwrap()
        .probability;
    assert!(lossy < 0.5 * lossless, "{lossless} -> {lossy}");
}

#[test]
fn dyad_path_at_zero_loss_is_the_pure_path() {
    for pairing in Pairing::ALL {
        let cfg = AmpConfig::new(1.1, pairing).unwrap();
        let (pure, mixed) = (Amplifier::new(cfg), Amplifier::mixed(cfg));
        for t in [0.9, 0.95, 0.99] {
            let (a, b) = (pure.max_prob_at_target(t).unwrap(), mixed.max_prob_at_target(t).unwrap());
            assert!((a.probability - b.probability).abs() < 1e-10, "{pairing} {t}");
            assert!((a.half_width - b.half_width).abs() < 1e-6, "{pairing} {t}");
        }
    }
}
