use super::{OscillatorConfig, Result};
use crate::quantum::linalg::{real, I};
use crate::quantum::{annihilation, number_operator, Operator, Tensor};

/// Full Hamiltonian together with its exchange part.
#[derive(Clone, Debug)]
pub struct CoupledHamiltonian {
    pub full: Operator,
    pub interaction: Operator,
}

pub fn build_hamiltonian(config: &OscillatorConfig) -> Result<CoupledHamiltonian> {
    config.validate()?;
    let id_a = Operator::identity(vec![config.cutoff_a]);
    let id_b = Operator::identity(vec![config.cutoff_b]);
    let a = annihilation(config.cutoff_a)?;
    let b = annihilation(config.cutoff_b)?;

    let free_a = number_operator(config.cutoff_a)?.tensor(&id_b).scaled(real(config.omega_a));
    let free_b = id_a.tensor(&number_operator(config.cutoff_b)?).scaled(real(config.omega_b));
    let hop = a.dagger().tensor(&b);
    let interaction = hop
        .plus(&hop.dagger().scaled(real(-1.0)))?
        .scaled(I * config.lambda);
    let full = free_a.plus(&free_b)?.plus(&interaction)?;
    Ok(CoupledHamiltonian { full, interaction })
}

/// `a†a ⊗ I + I ⊗ b†b`.
pub fn total_number(config: &OscillatorConfig) -> Result<Operator> {
    let na = number_operator(config.cutoff_a)?.tensor(&Operator::identity(vec![config.cutoff_b]));
    let nb = Operator::identity(vec![config.cutoff_a]).tensor(&number_operator(config.cutoff_b)?);
    Ok(na.plus(&nb)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{c, is_hermitian, max_abs};
    use crate::quantum::PureState;

    #[test]
    fn hermitian_and_number_conserving() {
        for cfg in [
            OscillatorConfig::resonant(1.0, 0.1, 6),
            OscillatorConfig { omega_a: 1.3, omega_b: 0.4, lambda: 0.7, cutoff_a: 5, cutoff_b: 7 },
        ] {
            let h = build_hamiltonian(&cfg).unwrap();
            assert!(is_hermitian(h.full.matrix(), 1e-12));
            let comm = h.full.commutator(&total_number(&cfg).unwrap()).unwrap();
            assert!(max_abs(comm.matrix()) < 1e-10);
        }
    }

    #[test]
    fn uncoupled_commutes_with_mode_a_number() {
        let cfg = OscillatorConfig { omega_a: 1.0, omega_b: 2.0, lambda: 0.0, cutoff_a: 4, cutoff_b: 4 };
        let h = build_hamiltonian(&cfg).unwrap();
        let na = number_operator(4).unwrap().tensor(&Operator::identity(vec![4]));
        assert!(max_abs(h.full.commutator(&na).unwrap().matrix()) < 1e-14);
    }

    #[test]
    fn single_excitation_block() {
        let cfg = OscillatorConfig::resonant(0.0, 1.0, 2);
        let h = build_hamiltonian(&cfg).unwrap();
        let m = h.full.matrix();
        // basis index 1 = |0,1⟩, 2 = |1,0⟩
        let one_zero = PureState::fock_pair(1, 0, 2, 2).unwrap();
        let zero_one = PureState::fock_pair(0, 1, 2, 2).unwrap();
        let elem = zero_one.inner(&h.full.apply(&one_zero).unwrap()).unwrap();
        assert!((elem - c(0.0, -1.0)).norm() < 1e-14);
        assert!((m[(2, 1)] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((m[(1, 1)]).norm() < 1e-14 && (m[(2, 2)]).norm() < 1e-14);
    }
}
