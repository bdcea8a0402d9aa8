use serde::{Deserialize, Serialize};

use super::data::require_two_qubit;
use super::{pauli, Result, TomographyError};
use crate::optim::nelder_mead;
use crate::quantum::linalg::{c, hermitian_eigen, is_hermitian, kron, real, CMatrix};
use crate::quantum::{entropy, partial_trace, DensityMatrix};

/// Wootters concurrence. With `ρ = W W†` from the eigendecomposition, the
/// singular values of `τ = W† (σy⊗σy) W*` are the square roots of the
/// eigenvalues of `ρρ̃`. Eigenvalues at rounding level are dropped first.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho)?;
    rho.require_physical()?;
    let yy = kron(&pauli(2), &pauli(2));
    let (values, vectors) = hermitian_eigen(rho.entries());
    let mut w = vectors;
    for (j, &d) in values.iter().enumerate() {
        let scale = if d > 1e-14 { d.sqrt() } else { 0.0 };
        w.column_mut(j).scale_mut(scale);
    }
    let tau = w.adjoint() * yy * w.conjugate();
    let mut l: Vec<f64> = tau.svd(false, false).singular_values.iter().copied().collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// `½I − |ψ⁻⟩⟨ψ⁻|`: nonnegative on separable states, −½ on the singlet.
pub fn singlet_witness() -> CMatrix {
    let s = 0.5f64.sqrt();
    let psi = nalgebra::DVector::from_vec(vec![c(0.0, 0.0), real(s), real(-s), c(0.0, 0.0)]);
    CMatrix::identity(4, 4) * real(0.5) - &psi * psi.adjoint()
}

/// `Tr(W ρ)`.
pub fn witness_value(rho: &DensityMatrix, witness: &CMatrix) -> Result<f64> {
    rho.require_physical()?;
    if witness.nrows() != rho.dim() || witness.ncols() != rho.dim() {
        return Err(TomographyError::NotTwoQubit(vec![witness.nrows()]));
    }
    if !is_hermitian(witness, 1e-12) {
        return Err(TomographyError::NotHermitianWitness);
    }
    Ok(rho.expectation(witness).re)
}

/// Analyzer angles in radians: `a`, `a′` on the first photon, `b`, `b′` on the second.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshAngles {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshAngles {
    /// 0°, 45°, 112.5°, 157.5°: `S = +2√2` on the singlet.
    pub fn canonical() -> Self {
        let d = std::f64::consts::PI / 180.0;
        Self { a: 0.0, a_prime: 45.0 * d, b: 112.5 * d, b_prime: 157.5 * d }
    }

    fn from_slice(x: &[f64]) -> Self {
        let wrap = |t: f64| t.rem_euclid(std::f64::consts::PI);
        Self { a: wrap(x[0]), a_prime: wrap(x[1]), b: wrap(x[2]), b_prime: wrap(x[3]) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    /// `S` at the reported angles, nonnegative for the optimum; `S > 2`
    /// violates local realism.
    pub value: f64,
    pub angles: ChshAngles,
}

/// Correlations `T_ij = Tr(ρ σ_i⊗σ_j)` for `i, j ∈ {z, x}`.
fn zx_correlations(rho: &DensityMatrix) -> [[f64; 2]; 2] {
    let axes = [pauli(3), pauli(1)];
    let mut t = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            t[i][j] = rho.expectation(&kron(&axes[i], &axes[j])).re;
        }
    }
    t
}

/// `E(θ₁, θ₂)` for analyzers `cos 2θ σz + sin 2θ σx` with ±1 outcomes.
fn correlator(t: &[[f64; 2]; 2], t1: f64, t2: f64) -> f64 {
    let u = [(2.0 * t1).cos(), (2.0 * t1).sin()];
    let v = [(2.0 * t2).cos(), (2.0 * t2).sin()];
    (0..2).map(|i| (0..2).map(|j| u[i] * t[i][j] * v[j]).sum::<f64>()).sum()
}

fn chsh_from(t: &[[f64; 2]; 2], x: &ChshAngles) -> f64 {
    correlator(t, x.a, x.b) - correlator(t, x.a, x.b_prime) + correlator(t, x.a_prime, x.b)
        + correlator(t, x.a_prime, x.b_prime)
}

/// `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)` with linear-polarization analyzers.
pub fn chsh(rho: &DensityMatrix, angles: &ChshAngles) -> Result<f64> {
    require_two_qubit(rho)?;
    rho.require_physical()?;
    Ok(chsh_from(&zx_correlations(rho), angles))
}

/// Maximizes `|S|` over analyzer angles: a coarse grid with π/8 spacing
/// followed by simplex refinement of the best grid points. Turning both
/// second-photon analyzers by 90° flips the sign of `S`, so the reported
/// angles always give `S ≥ 0`.
pub fn chsh_optimize(rho: &DensityMatrix) -> Result<ChshResult> {
    require_two_qubit(rho)?;
    rho.require_physical()?;
    let t = zx_correlations(rho);
    let steps: usize = 8;
    let h = std::f64::consts::PI / steps as f64;
    let mut grid: Vec<([f64; 4], f64)> = Vec::with_capacity(steps.pow(4));
    for i in 0..steps.pow(4) {
        let x = [i % steps, (i / steps) % steps, (i / steps.pow(2)) % steps, i / steps.pow(3)].map(|k| k as f64 * h);
        let s = chsh_from(&t, &ChshAngles::from_slice(&x)).abs();
        grid.push((x, s));
    }
    grid.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut best: Option<ChshResult> = None;
    for (x0, _) in grid.iter().take(4) {
        let m = nelder_mead(
            |x| -chsh_from(&t, &ChshAngles::from_slice(x)).abs(),
            x0,
            &[h / 2.0; 4],
            1e-15,
            1e-10,
            4000,
        );
        let angles = ChshAngles::from_slice(&m.x);
        let value = chsh_from(&t, &angles);
        if best.is_none_or(|b| value.abs() > b.value.abs()) {
            best = Some(ChshResult { value, angles });
        }
    }
    let mut best = best.expect("grid is nonempty");
    if best.value < 0.0 {
        let quarter = std::f64::consts::FRAC_PI_2;
        let a = best.angles;
        best.angles = ChshAngles::from_slice(&[a.a, a.a_prime, a.b + quarter, a.b_prime + quarter]);
        best.value = chsh_from(&t, &best.angles);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub witness: f64,
    pub chsh: ChshResult,
    /// Von Neumann entropies of the two reduced states, in nats.
    pub reduced_entropies: [f64; 2],
}

pub fn entanglement_report(rho: &DensityMatrix) -> Result<EntanglementReport> {
    Ok(EntanglementReport {
        concurrence: concurrence(rho)?,
        witness: witness_value(rho, &singlet_witness())?,
        chsh: chsh_optimize(rho)?,
        reduced_entropies: [entropy(&partial_trace(rho, 0)?)?, entropy(&partial_trace(rho, 1)?)?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singlet() -> DensityMatrix {
        let w = singlet_witness();
        DensityMatrix::new(CMatrix::identity(4, 4) * real(0.5) - w, vec![2, 2]).unwrap()
    }

    #[test]
    fn singlet_values() {
        let s = singlet();
        assert!((concurrence(&s).unwrap() - 1.0).abs() < 1e-9);
        assert!((witness_value(&s, &singlet_witness()).unwrap() + 0.5).abs() < 1e-12);
        let v = chsh(&s, &ChshAngles::canonical()).unwrap();
        assert!((v.abs() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn maximally_mixed_values() {
        let m = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(concurrence(&m).unwrap().abs() < 1e-12);
        assert!((witness_value(&m, &singlet_witness()).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(chsh(&m, &ChshAngles::canonical()).unwrap(), 0.0);
    }

    #[test]
    fn singlet_correlator_is_minus_cos() {
        let t = zx_correlations(&singlet());
        for (t1, t2) in [(0.0, 0.3), (1.1, 0.2), (2.5, 2.9)] {
            assert!((correlator(&t, t1, t2) + (2.0 * (t1 - t2)).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian_witness() {
        let mut w = singlet_witness();
        w[(0, 1)] = c(0.0, 1.0);
        assert!(matches!(
            witness_value(&singlet(), &w),
            Err(TomographyError::NotHermitianWitness)
        ));
    }
}
