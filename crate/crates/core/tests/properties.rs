use catamp::cstate::{coherent_overlap, DyadTerm};
use catamp::{AmpConfig, Amplifier, CoherentLabel, DyadMix, Pairing, PureCSS};
use num_complex::Complex64;
use proptest::prelude::*;

fn label() -> impl Strategy<Value = CoherentLabel> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| CoherentLabel::new(re, im))
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn state(modes: usize) -> impl Strategy<Value = PureCSS> {
    prop::collection::vec((coeff(), prop::collection::vec(label(), modes)), 1..5).prop_map(move |terms| {
        let mut s = PureCSS::zero(modes).unwrap();
        for (c, l) in terms {
            s.push(c, l).unwrap();
        }
        s
    })
}

fn close(a: Complex64, b: Complex64, scale: f64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn overlap_is_bounded(a in label(), b in label()) {
        prop_assert!(coherent_overlap(a, b).norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn inner_is_conjugate_symmetric(u in state(2), v in state(2)) {
        let uv = u.inner(&v).unwrap();
        let vu = v.inner(&u).unwrap();
        prop_assert!(close(uv, vu.conj(), 0.0, 1e-12));
    }

    #[test]
    fn beam_splitter_preserves_inner_products(u in state(2), v in state(2)) {
        let before = u.inner(&v).unwrap();
        let after = u.beam_splitter(0, 1).unwrap().inner(&v.beam_splitter(0, 1).unwrap()).unwrap();
        let scale = (u.norm_sqr() * v.norm_sqr()).sqrt();
        prop_assert!(close(before, after, scale, 1e-12), "{before} vs {after}");
    }

    #[test]
    fn tensor_norms_multiply(u in state(1), v in state(2)) {
        let t = u.tensor(&v);
        let want = u.norm_sqr() * v.norm_sqr();
        prop_assert!((t.norm_sqr() - want).abs() <= 1e-12 * (1.0 + want));
    }

    #[test]
    fn loss_preserves_trace(u in state(2), v in state(2), r2 in 0.0..0.99f64) {
        // an arbitrary, non-Hermitian operator |u><v|
        let mut m = DyadMix::zero(2).unwrap();
        for a in u.terms() {
            for b in v.terms() {
                m.push(a.coeff * b.coeff.conj(), a.labels.clone(), b.labels.clone()).unwrap();
            }
        }
        let before = m.trace();
        let after = m.loss_channel(r2).unwrap().trace();
        let scale = (u.norm_sqr() * v.norm_sqr()).sqrt();
        prop_assert!(close(before, after, scale, 1e-12), "{before} vs {after}");
    }

    #[test]
    fn lossy_state_stays_positive(u in state(1), probe in state(1), r2 in 0.0..0.99f64) {
        let rho = DyadMix::from(&u).loss_channel(r2).unwrap();
        let e = rho.expectation(&probe).unwrap();
        let scale = u.norm_sqr() * probe.norm_sqr();
        prop_assert!(e.re >= -1e-10 * (1.0 + scale));
        prop_assert!(e.im.abs() <= 1e-10 * (1.0 + scale));
    }

    #[test]
    fn canonicalize_keeps_the_vector(u in state(2), probe in state(2)) {
        let doubled = u.plus(&u).unwrap();
        let c = doubled.canonicalize();
        prop_assert!(c.len() <= u.len());
        let scale = (u.norm_sqr() * probe.norm_sqr()).sqrt();
        prop_assert!(close(doubled.inner(&probe).unwrap(), c.inner(&probe).unwrap(), scale, 1e-12));
    }

    #[test]
    fn hermitized_operator_has_real_expectations(u in state(1), v in state(1), probe in state(1)) {
        let mut m = DyadMix::from(&u);
        m.absorb(DyadMix::from_terms(1, v.terms().iter().map(|t| DyadTerm {
            coeff: t.coeff,
            ket: t.labels.clone(),
            bra: u.terms()[0].labels.clone(),
        }).collect()).unwrap()).unwrap();
        let h = m.hermitized();
        let e = h.expectation(&probe).unwrap();
        let scale = (u.norm_sqr() + v.norm_sqr()) * probe.norm_sqr();
        prop_assert!(e.im.abs() <= 1e-12 * (1.0 + scale));
        let direct = 0.5 * (m.expectation(&probe).unwrap() + m.adjoint().expectation(&probe).unwrap());
        prop_assert!(close(e, direct, scale, 1e-12));
    }

    #[test]
    fn pruning_moves_trace_by_at_most_the_dropped_weight(u in state(1), tol in 0.0..0.5f64) {
        let m = DyadMix::from(&u).canonicalize();
        let pruned = m.prune(tol).unwrap();
        let dropped = (m.len() - pruned.len()) as f64;
        prop_assert!((m.trace() - pruned.trace()).norm() <= dropped * tol + 1e-12);
    }

    #[test]
    fn outcome_statistics_are_even(alpha in 0.1..2.5f64, x0 in 0.0..3.0f64, pick in 0usize..3) {
        let amp = Amplifier::new(AmpConfig::new(alpha, Pairing::ALL[pick]).unwrap());
        let (p1, f1) = amp.point(x0);
        let (p2, f2) = amp.point(-x0);
        prop_assert!((p1 - p2).abs() < 1e-12);
        prop_assert!((f1 - f2).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f1));
    }

    #[test]
    fn window_probability_grows_with_width(alpha in 0.1..2.5f64, w in 0.01..3.0f64, dw in 0.01..1.0f64) {
        let amp = Amplifier::new(AmpConfig::new(alpha, Pairing::EvenOdd).unwrap());
        let a = amp.window(w).unwrap();
        let b = amp.window(w + dw).unwrap();
        prop_assert!(b.probability >= a.probability - 1e-10);
    }
}
