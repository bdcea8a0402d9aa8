use std::cmp::Ordering;

use super::linalg::{kron_vec, CVector, C64};
use super::{PureState, Result};

/// Biorthogonal expansion `|ψ⟩ = Σ_k √w_k |l_k⟩ ⊗ |r_k⟩`.
///
/// Weights are sorted descending. Degenerate weights are ordered by the
/// left vectors after fixing each pair's phase so the first nonzero left
/// component is real and positive.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub weights: Vec<f64>,
    pub left: Vec<CVector>,
    pub right: Vec<CVector>,
    dims: (usize, usize),
}

const TIE: f64 = 1e-12;

impl SchmidtDecomposition {
    pub fn rank(&self, threshold: f64) -> usize {
        self.weights.iter().filter(|&&w| w > threshold).count()
    }

    /// Entropy of the weights in nats.
    pub fn entropy(&self) -> f64 {
        self.weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| -w * w.ln())
            .sum::<f64>()
            .max(0.0)
    }

    pub fn largest_weight(&self) -> f64 {
        self.weights.first().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> PureState {
        let (na, nb) = self.dims;
        let mut amps = CVector::zeros(na * nb);
        for ((w, l), r) in self.weights.iter().zip(&self.left).zip(&self.right) {
            amps += kron_vec(l, r) * C64::new(w.sqrt(), 0.0);
        }
        PureState::new(amps, vec![na, nb]).expect("dimensions fixed at construction")
    }
}

pub fn schmidt(psi: &PureState) -> Result<SchmidtDecomposition> {
    let m = psi.coefficient_matrix()?;
    let (na, nb) = (m.nrows(), m.ncols());
    let norm2 = psi.norm_squared();
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut terms: Vec<(f64, CVector, CVector)> = (0..svd.singular_values.len())
        .map(|k| {
            let s = svd.singular_values[k];
            let mut l = u.column(k).into_owned();
            let mut r = v_t.row(k).transpose();
            if let Some(first) = l.iter().find(|z| z.norm() > TIE).copied() {
                let phase = first / first.norm();
                l *= phase.conj();
                r *= phase;
            }
            (s * s / norm2, l, r)
        })
        .collect();
    terms.sort_by(|a, b| {
        if (a.0 - b.0).abs() > TIE {
            b.0.total_cmp(&a.0)
        } else {
            lexicographic(&b.1, &a.1)
        }
    });
    let mut weights = Vec::with_capacity(terms.len());
    let mut left = Vec::with_capacity(terms.len());
    let mut right = Vec::with_capacity(terms.len());
    for (w, l, r) in terms {
        weights.push(w.clamp(0.0, 1.0));
        left.push(l);
        right.push(r);
    }
    Ok(SchmidtDecomposition {
        weights,
        left,
        right,
        dims: (na, nb),
    })
}

fn lexicographic(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if (x - y).norm() > TIE && o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::real;
    use crate::quantum::{coherent_state, Tensor};

    fn close_up_to_phase(a: &PureState, b: &PureState) -> bool {
        let ov = a.inner(b).unwrap();
        (ov.norm() - 1.0).abs() < 1e-9
    }

    #[test]
    fn product_state_single_weight() {
        let (a, _) = coherent_state(C64::new(0.3, 0.4), 12).unwrap();
        let (b, _) = coherent_state(C64::new(-0.2, 0.1), 10).unwrap();
        let psi = a.tensor(&b);
        let d = schmidt(&psi).unwrap();
        assert!((d.weights[0] - 1.0).abs() < 1e-12);
        assert!(d.weights[1..].iter().all(|&w| w < 1e-12));
        assert!(close_up_to_phase(&d.reconstruct(), &psi));
    }

    #[test]
    fn singlet_half_half() {
        let s = 0.5f64.sqrt();
        let psi = PureState::new(
            CVector::from_vec(vec![real(0.0), real(s), real(-s), real(0.0)]),
            vec![2, 2],
        )
        .unwrap();
        let d = schmidt(&psi).unwrap();
        assert!((d.weights[0] - 0.5).abs() < 1e-12 && (d.weights[1] - 0.5).abs() < 1e-12);
        assert!(close_up_to_phase(&d.reconstruct(), &psi));
        // ties are ordered deterministically
        let again = schmidt(&psi).unwrap();
        assert_eq!(d.left, again.left);
    }

    #[test]
    fn three_way_maximally_entangled() {
        let mut amps = CVector::zeros(9);
        for k in 0..3 {
            amps[k * 3 + k] = real(1.0 / 3f64.sqrt());
        }
        let psi = PureState::new(amps, vec![3, 3]).unwrap();
        let d = schmidt(&psi).unwrap();
        for w in &d.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!((d.entropy() - 3f64.ln()).abs() < 1e-12);
    }
}
