use super::{build_hamiltonian, ModesError, OscillatorConfig, Result};
use crate::quantum::linalg::{CMatrix, C64};
use crate::quantum::{coherent_state_with_tolerance, PureState, Tensor};

/// `(⟨a⟩, ⟨b⟩)` of a two-mode state.
pub fn mode_means(psi: &PureState) -> Result<(C64, C64)> {
    let m = psi.coefficient_matrix()?;
    let (na, nb) = (m.nrows(), m.ncols());
    let norm = psi.norm_squared();
    let mut mean_a = C64::new(0.0, 0.0);
    let mut mean_b = C64::new(0.0, 0.0);
    for i in 0..na {
        for j in 0..nb {
            if i > 0 {
                mean_a += m[(i - 1, j)].conj() * m[(i, j)] * (i as f64).sqrt();
            }
            if j > 0 {
                mean_b += m[(i, j - 1)].conj() * m[(i, j)] * (j as f64).sqrt();
            }
        }
    }
    Ok((mean_a / norm, mean_b / norm))
}

/// Distance to the coherent product with the same first moments,
/// `1 − |⟨⟨a⟩, ⟨b⟩|ψ⟩|²`.
pub fn coherence_defect(psi: &PureState) -> Result<f64> {
    let m = psi.coefficient_matrix()?;
    let (mu_a, mu_b) = mode_means(psi)?;
    // the reference product is a diagnostic, so truncation loss is not fatal
    let (ca, _) = coherent_state_with_tolerance(mu_a, m.nrows(), 1.0)?;
    let (cb, _) = coherent_state_with_tolerance(mu_b, m.ncols(), 1.0)?;
    let reference = ca.tensor(&cb);
    let overlap = reference.inner(psi)?.norm_sqr() / psi.norm_squared();
    Ok((1.0 - overlap).max(0.0))
}

/// Norm of the part of `H_AB |ψ_A ψ_B⟩` lying in the subspace orthogonal to
/// both factors, `‖(I − P_A) ⊗ (I − P_B) H_AB |ψ_A ψ_B⟩‖`.
///
/// A pure product stays a product exactly when this vanishes along the flow.
pub fn biorthogonal_leakage(
    factor_a: &PureState,
    factor_b: &PureState,
    config: &OscillatorConfig,
) -> Result<f64> {
    for f in [factor_a, factor_b] {
        let n2 = f.norm_squared();
        if (n2 - 1.0).abs() > 1e-10 {
            return Err(ModesError::NotNormalized(n2));
        }
    }
    let product = factor_a.tensor(factor_b);
    config.check_dims(product.dims())?;
    let h = build_hamiltonian(config)?;
    let image = h.interaction.apply(&product)?;
    let v = CMatrix::from_row_slice(config.cutoff_a, config.cutoff_b, image.amplitudes().as_slice());
    let a = factor_a.amplitudes();
    let b = factor_b.amplitudes();
    // left projector acts on rows, right projector on columns: (I − aa†) V (I − b̄bᵀ)
    let pa = a * a.adjoint();
    let pb_t = (b * b.adjoint()).transpose();
    let ia = CMatrix::identity(config.cutoff_a, config.cutoff_a);
    let ib = CMatrix::identity(config.cutoff_b, config.cutoff_b);
    let projected = (ia - pa) * v * (ib - pb_t);
    Ok(projected.norm())
}
