use catamp::{AmpConfig, Amplifier, Pairing, TargetAmplitude};

fn fidelities(alpha: f64, pairing: Pairing, x0: f64) -> [f64; 3] {
    [0.0, 0.1, 0.2].map(|r2| Amplifier::new(AmpConfig::with_loss(alpha, pairing, r2).unwrap()).fidelity(x0))
}

/// 10 x 10 grid, keeping the points where the lossless protocol already
/// produces a good cat. Elsewhere the heralded state is far from the target
/// and mixing in loss can raise the overlap.
fn probes(pairing: Pairing) -> Vec<(f64, f64, [f64; 3])> {
    let mut out = Vec::new();
    for i in 0..10 {
        for j in 0..10 {
            let (alpha, x0) = (0.25 + 0.25 * i as f64, -2.25 + 0.5 * j as f64);
            let f = fidelities(alpha, pairing, x0);
            if f[0] >= 0.9 {
                out.push((alpha, x0, f));
            }
        }
    }
    out
}

#[test]
fn loss_lowers_fidelity_at_every_probe() {
    for pairing in Pairing::ALL {
        let pts = probes(pairing);
        assert!(pts.len() >= 20, "{pairing}: only {} probes", pts.len());
        for (alpha, x0, f) in pts {
            assert!(f[1] < f[0] && f[2] < f[1], "{pairing} alpha={alpha} x0={x0}: {f:?}");
        }
    }
}

#[test]
fn loss_can_raise_a_poor_fidelity() {
    // odd-odd at alpha = 0.5, x0 = 0.75: the lossless state is nearly
    // orthogonal to the target
    let f = fidelities(0.5, Pairing::OddOdd, 0.75);
    assert!(f[0] < 0.2 && f[2] > f[0], "{f:?}");
}

#[test]
fn success_probability_falls_with_loss() {
    for pairing in [Pairing::OddOdd, Pairing::EvenOdd] {
        for i in 0..13 {
            let alpha = 0.1 + 0.2 * i as f64;
            for target in [0.9, 0.95, 0.99] {
                let p = [0.0, 0.1, 0.2].map(|r2| {
                    Amplifier::new(AmpConfig::with_loss(alpha, pairing, r2).unwrap())
                        .max_prob_at_target(target)
                        .unwrap()
                        .probability
                });
                assert!(p[1] <= p[0] + 1e-12 && p[2] <= p[1] + 1e-12, "{pairing} {alpha} {target}: {p:?}");
            }
        }
    }
}

#[test]
fn attenuated_target_is_closer() {
    let mut cfg = AmpConfig::with_loss(1.5, Pairing::EvenOdd, 0.2).unwrap();
    let ideal = Amplifier::new(cfg).fidelity(0.0);
    cfg.target = TargetAmplitude::Attenuated;
    let shrunk = Amplifier::new(cfg).fidelity(0.0);
    assert!(shrunk > ideal);
}
