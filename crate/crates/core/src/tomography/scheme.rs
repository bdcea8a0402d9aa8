use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};

use crate::quantum::linalg::{c, kron, real, CMatrix, I};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Mub,
    Sic,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Mub => "mub",
            SchemeKind::Sic => "sic",
        }
    }

    pub fn scheme(&self) -> MeasurementScheme {
        match self {
            SchemeKind::Mub => scheme_mub(),
            SchemeKind::Sic => scheme_sic(),
        }
    }
}

/// One analyzer setting on one photon: labelled effects summing to identity.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSetting {
    pub label: String,
    pub outcomes: Vec<(String, CMatrix)>,
}

/// Product measurement on a polarization qubit pair. Joint settings run over
/// all pairs of local settings, first photon major.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementScheme {
    pub kind: SchemeKind,
    pub local: Vec<LocalSetting>,
}

pub fn pauli(k: usize) -> CMatrix {
    let z = c(0.0, 0.0);
    let o = real(1.0);
    let m = match k {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, -I, I, z],
        3 => [o, z, z, -o],
        _ => panic!("Pauli index {k} out of range"),
    };
    CMatrix::from_row_slice(2, 2, &m)
}

/// `(I + n·σ)/2` scaled by `weight`.
fn bloch_effect(n: [f64; 3], weight: f64) -> CMatrix {
    let mut m = pauli(0);
    for (k, nk) in n.iter().enumerate() {
        m += pauli(k + 1) * real(*nk);
    }
    m * real(weight / 2.0)
}

/// Eigenbases of σx, σy, σz: diagonal/antidiagonal, circular, horizontal/vertical.
pub fn scheme_mub() -> MeasurementScheme {
    let axis = |label: &str, k: usize| {
        let mut n = [0.0; 3];
        n[k] = 1.0;
        let minus = n.map(|v| -v);
        LocalSetting {
            label: label.to_string(),
            outcomes: vec![("+".into(), bloch_effect(n, 1.0)), ("-".into(), bloch_effect(minus, 1.0))],
        }
    };
    MeasurementScheme { kind: SchemeKind::Mub, local: vec![axis("X", 0), axis("Y", 1), axis("Z", 2)] }
}

/// Tetrahedral Bloch vectors, the first at the north pole.
pub fn sic_bloch_vectors() -> [[f64; 3]; 4] {
    let s = 2.0 * 2f64.sqrt() / 3.0;
    let mut v = [[0.0, 0.0, 1.0]; 4];
    for (k, vk) in v.iter_mut().enumerate().skip(1) {
        let phi = 2.0 * std::f64::consts::PI * (k - 1) as f64 / 3.0;
        *vk = [s * phi.cos(), s * phi.sin(), -1.0 / 3.0];
    }
    v
}

/// Four effects `½|ψ_k⟩⟨ψ_k|` with tetrahedral Bloch vectors.
pub fn scheme_sic() -> MeasurementScheme {
    let outcomes = sic_bloch_vectors()
        .iter()
        .enumerate()
        .map(|(k, &n)| (k.to_string(), bloch_effect(n, 0.5)))
        .collect();
    MeasurementScheme { kind: SchemeKind::Sic, local: vec![LocalSetting { label: "sic".into(), outcomes }] }
}

impl MeasurementScheme {
    pub fn settings(&self) -> usize {
        self.local.len() * self.local.len()
    }

    pub fn outcomes_per_setting(&self) -> usize {
        self.local[0].outcomes.len().pow(2)
    }

    pub fn cells(&self) -> usize {
        self.settings() * self.outcomes_per_setting()
    }

    fn split(&self, setting: usize) -> (&LocalSetting, &LocalSetting) {
        let n = self.local.len();
        (&self.local[setting / n], &self.local[setting % n])
    }

    /// Joint setting label: local labels concatenated (`"XZ"`), or the
    /// single local label when it is shared (`"sic"`).
    pub fn setting_label(&self, setting: usize) -> String {
        let (a, b) = self.split(setting);
        if self.local.len() == 1 {
            a.label.clone()
        } else {
            format!("{}{}", a.label, b.label)
        }
    }

    pub fn outcome_label(&self, setting: usize, outcome: usize) -> String {
        let (a, b) = self.split(setting);
        let m = b.outcomes.len();
        format!("{}{}", a.outcomes[outcome / m].0, b.outcomes[outcome % m].0)
    }

    pub fn joint_effect(&self, setting: usize, outcome: usize) -> CMatrix {
        let (a, b) = self.split(setting);
        let m = b.outcomes.len();
        kron(&a.outcomes[outcome / m].1, &b.outcomes[outcome % m].1)
    }

    /// Joint effects in setting-major order.
    pub fn joint_effects(&self) -> Vec<CMatrix> {
        (0..self.settings())
            .flat_map(|s| (0..self.outcomes_per_setting()).map(move |o| (s, o)))
            .map(|(s, o)| self.joint_effect(s, o))
            .collect()
    }

    /// Real map from Pauli coefficients `r_ij` of `ρ = ¼ Σ r_ij σ_i⊗σ_j` to
    /// cell probabilities; rows follow [`MeasurementScheme::joint_effects`].
    pub fn design_matrix(&self) -> DMatrix<f64> {
        let effects = self.joint_effects();
        let paulis: Vec<CMatrix> = (0..16).map(|k| kron(&pauli(k / 4), &pauli(k % 4))).collect();
        DMatrix::from_fn(effects.len(), 16, |r, k| {
            let e = &effects[r];
            let p = &paulis[k];
            let mut acc = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    acc += (p[(i, j)] * e[(j, i)]).re;
                }
            }
            acc / 4.0
        })
    }

    pub fn design_rank(&self) -> usize {
        SVD::new(self.design_matrix(), false, false).rank(1e-10)
    }
}
