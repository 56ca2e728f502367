use num_complex::Complex;

use super::{born_model, ProjectiveQubitMeasurement, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};
use crate::tables::{Context, JointOutcome, ProbabilityModel};

/// Largest qubit count [`ghz_model`] accepts.
pub const MAX_QUBITS: usize = 12;

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz_state<T: RealScalar>(n: usize) -> Result<StateVector<T>> {
    if n < 1 {
        return Err(Error::InvalidState("GHZ state needs at least one qubit".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::TooLarge {
            what: "qubit count",
            size: n as u128,
            limit: MAX_QUBITS as u128,
        });
    }
    let h = T::from_f64_lossy(std::f64::consts::FRAC_1_SQRT_2);
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
    amps[0] = Complex::new(h, T::zero());
    amps[(1 << n) - 1] = Complex::new(h, T::zero());
    StateVector::new(amps)
}

/// GHZ(n) with measurement 0 = X and measurement 1 = Y at every site.
pub fn ghz_model<T: RealScalar>(n: usize) -> Result<ProbabilityModel<T>> {
    if n < 2 {
        return Err(Error::InvalidScenario(format!("GHZ model needs n >= 2, got {n}")));
    }
    let psi = ghz_state::<T>(n)?;
    let xy = vec![
        ProjectiveQubitMeasurement::pauli_x(),
        ProjectiveQubitMeasurement::pauli_y(),
    ];
    born_model(&psi, &vec![xy; n])
}

/// Closed-form GHZ(n) X/Y statistics: with an odd number of `Y`s every
/// outcome has probability `2^-n`; otherwise the parity of the outcome must
/// be even (`#Y ≡ 0 mod 4`) or odd (`#Y ≡ 2 mod 4`) and then has
/// probability `2^-(n-1)`.
pub fn ghz_rule<S: Scalar>(n: usize, context: &Context, outcome: &JointOutcome) -> Result<(bool, S)> {
    if context.0.len() != n || outcome.0.len() != n || n == 0 || n > 62 {
        return Err(Error::ShapeMismatch(format!(
            "context {context} and outcome {outcome} do not fit {n} sites"
        )));
    }
    if context.0.iter().chain(&outcome.0).any(|&v| v > 1) {
        return Err(Error::ShapeMismatch(format!(
            "context {context} or outcome {outcome} is not binary"
        )));
    }
    let ys = context.0.iter().filter(|&&m| m == 1).count();
    let ones = outcome.0.iter().filter(|&&o| o == 1).count();
    if ys % 2 == 1 {
        return Ok((true, S::from_ratio(1, 1 << n)));
    }
    let want_odd = ys % 4 == 2;
    if (ones % 2 == 1) == want_odd {
        Ok((true, S::from_ratio(1, 1 << (n - 1))))
    } else {
        Ok((false, S::zero()))
    }
}
