use nalgebra::DMatrix;
use num_complex::Complex64;

use super::TwoModeFock;

/// 50:50 beam splitter on a two-mode truncated Fock space.
///
/// The unitary is `exp(theta (a1^dag a2 - a2^dag a1))` with `theta = -pi/4`,
/// which maps coherent labels `(a, b)` to `((a - b)/sqrt(2), (a + b)/sqrt(2))`.
/// It conserves the total photon number `s`, so it is stored as one real
/// `(s + 1) x (s + 1)` block per `s`, obtained by exponentiating the
/// generator restricted to that block.
#[derive(Debug, Clone)]
pub struct FockBeamSplitter {
    cutoff: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl FockBeamSplitter {
    pub fn new(cutoff: usize) -> Self {
        let theta = -std::f64::consts::FRAC_PI_4;
        let max_total = 2 * cutoff.saturating_sub(1);
        let blocks = (0..=max_total)
            .map(|s| {
                // Basis |k, s - k>, k = 0..=s.
                let mut gen = DMatrix::<f64>::zeros(s + 1, s + 1);
                for k in 0..s {
                    // a1^dag a2 |k, s-k> = sqrt((k+1)(s-k)) |k+1, s-k-1>
                    let c = theta * (((k + 1) * (s - k)) as f64).sqrt();
                    gen[(k + 1, k)] = c;
                    gen[(k, k + 1)] = -c;
                }
                gen.exp()
            })
            .collect();
        FockBeamSplitter { cutoff, blocks }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Applies the beam splitter. Amplitude leaving the truncated square is
    /// dropped.
    pub fn apply(&self, state: &TwoModeFock) -> TwoModeFock {
        let n = self.cutoff;
        assert_eq!(state.nrows(), n, "cutoff mismatch");
        assert_eq!(state.ncols(), n, "cutoff mismatch");
        let mut out = TwoModeFock::zeros(n, n);
        let mut input = Vec::with_capacity(2 * n);
        for (s, u) in self.blocks.iter().enumerate() {
            let lo = s.saturating_sub(n - 1);
            let hi = s.min(n - 1);
            input.clear();
            input.extend((lo..=hi).map(|k| (k, state[(k, s - k)])));
            if input.iter().all(|(_, c)| c.norm_sqr() == 0.0) {
                continue;
            }
            for j in lo..=hi {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(k, c) in &input {
                    acc += c * u[(j, k)];
                }
                out[(j, s - j)] = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_fock;
    use std::f64::consts::SQRT_2;

    #[test]
    fn coherent_pair_goes_to_vacuum_and_sqrt2() {
        let n = 40;
        let bs = FockBeamSplitter::new(n);
        let a = Complex64::new(1.1, 0.0);
        let v = coherent_fock(a, n).unwrap();
        let out = bs.apply(&(&v * v.transpose()));
        let z = coherent_fock(Complex64::new(0.0, 0.0), n).unwrap();
        let w = coherent_fock(a * SQRT_2, n).unwrap();
        let want = &z * w.transpose();
        let ov: Complex64 = want.iter().zip(out.iter()).map(|(a, b)| a.conj() * b).sum();
        assert!(ov.norm_sqr() > 1.0 - 1e-8);
    }

    #[test]
    fn blocks_are_orthogonal() {
        let bs = FockBeamSplitter::new(12);
        for u in &bs.blocks {
            let id = u.transpose() * u;
            assert!((id - DMatrix::identity(u.nrows(), u.nrows())).amax() < 1e-12);
        }
    }
}
