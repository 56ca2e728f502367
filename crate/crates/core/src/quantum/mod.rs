//! Empirical models from pure qubit states and projective measurements.

mod bell;
mod ghz;
mod hardy;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::RealScalar;
use crate::tables::{ProbabilityModel, Scenario};

pub use bell::{
    adversarial_bell_search, bell_model, bell_symmetry_check, hardy_objective, random_bell_search,
    AdversarialReport, RandomSearchReport, MIN_BASE_PROBABILITY,
};
pub use ghz::{ghz_model, ghz_rule, ghz_state, MAX_QUBITS};
pub use hardy::{
    hardy_family_model, hardy_from_projections, hardy_scan, optimal_hardy_probability,
    HardyFamilyParams, HardyScan,
};

/// A qubit amplitude pair `(⟨0|v⟩, ⟨1|v⟩)`.
pub type Qubit<T> = [Complex<T>; 2];

/// Collapse threshold used when the generator itself checks a witness.
/// It sits well above rounding noise yet below any genuine probability the
/// families produce.
pub fn exact_zero_threshold<T: RealScalar>() -> f64 {
    let n = T::norm_tolerance().to_f64_lossy();
    n * n
}

fn c<T: RealScalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
}

/// An `n`-qubit pure state. Basis index bits are read with qubit 0 most
/// significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: RealScalar> StateVector<T> {
    /// Requires `2^n` amplitudes (`n ≥ 1`) with unit norm.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "{len} amplitudes is not a power of two"
            )));
        }
        let norm = amplitudes.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        if (norm - T::one()).abs() > T::norm_tolerance() {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(Self {
            qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Rescales to unit norm first.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm = amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
            .sqrt();
        if norm <= T::norm_tolerance() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
    }

    /// Tensor product `|a⟩ ⊗ |b⟩ ⊗ …` of single-qubit states.
    pub fn product(factors: &[Qubit<T>]) -> Result<Self> {
        let mut amps = vec![Complex::new(T::one(), T::zero())];
        for f in factors {
            amps = amps
                .iter()
                .flat_map(|a| [*a * f[0], *a * f[1]])
                .collect();
        }
        Self::new(amps)
    }

    /// Haar-random state on `n` qubits.
    pub fn random(qubits: usize, rng: &mut impl Rng) -> Self {
        loop {
            let amps: Vec<Complex<T>> = (0..1usize << qubits)
                .map(|_| {
                    let (x, y) = gaussian_pair(rng);
                    c(x, y)
                })
                .collect();
            if let Ok(s) = Self::normalized(amps) {
                return s;
            }
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }
}

/// Box-Muller standard normal pair.
fn gaussian_pair(rng: &mut impl Rng) -> (f64, f64) {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    let r = (-2.0 * u.ln()).sqrt();
    let a = std::f64::consts::TAU * v;
    (r * a.cos(), r * a.sin())
}

/// A uniformly random unit vector in `C²`.
pub fn random_qubit<T: RealScalar>(rng: &mut impl Rng) -> Qubit<T> {
    let (theta, phi) = random_bloch_angles(rng);
    ProjectiveQubitMeasurement::<T>::new(T::from_f64_lossy(theta), T::from_f64_lossy(phi))
        .unwrap()
        .eigenvectors()[0]
}

/// Bloch angles of a point uniform on the sphere.
pub fn random_bloch_angles(rng: &mut impl Rng) -> (f64, f64) {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (z.clamp(-1.0, 1.0).acos(), phi)
}

/// A two-outcome projective qubit measurement given by Bloch angles.
///
/// Outcome 0 projects onto `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and outcome 1
/// onto `sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveQubitMeasurement<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: RealScalar> ProjectiveQubitMeasurement<T> {
    /// `θ ∈ [0, π]`; `φ` is reduced modulo `2π`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        let pi = T::from_f64_lossy(std::f64::consts::PI);
        let tau = pi + pi;
        let slack = T::norm_tolerance();
        if !theta.is_finite() || !phi.is_finite() || theta < -slack || theta > pi + slack {
            return Err(Error::InvalidMeasurement(format!(
                "theta = {theta}, phi = {phi} out of range"
            )));
        }
        let mut phi = phi % tau;
        if phi < T::zero() {
            phi = phi + tau;
        }
        if phi >= tau {
            phi = T::zero();
        }
        Ok(Self {
            theta: theta.max(T::zero()).min(pi),
            phi,
        })
    }

    /// Measurement whose outcome-0 eigenvector is proportional to `v`.
    pub fn from_vector(v: Qubit<T>) -> Result<Self> {
        let (r0, r1) = (v[0].norm(), v[1].norm());
        if r0 + r1 <= T::norm_tolerance() {
            return Err(Error::InvalidMeasurement("zero vector".into()));
        }
        let two = T::one() + T::one();
        let theta = two * r1.atan2(r0);
        let phi = if r0 <= T::norm_tolerance() || r1 <= T::norm_tolerance() {
            T::zero()
        } else {
            v[1].arg() - v[0].arg()
        };
        Self::new(theta, phi)
    }

    pub fn pauli_z() -> Self {
        Self {
            theta: T::zero(),
            phi: T::zero(),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            theta: T::from_f64_lossy(std::f64::consts::FRAC_PI_2),
            phi: T::zero(),
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            theta: T::from_f64_lossy(std::f64::consts::FRAC_PI_2),
            phi: T::from_f64_lossy(std::f64::consts::FRAC_PI_2),
        }
    }

    /// Eigenvectors for outcomes 0 and 1.
    pub fn eigenvectors(&self) -> [Qubit<T>; 2] {
        let two = T::one() + T::one();
        let (s, co) = (self.theta / two).sin_cos();
        let phase = Complex::from_polar(T::one(), self.phi);
        let re = |x: T| Complex::new(x, T::zero());
        [[re(co), phase * s], [re(s), -phase * co]]
    }
}

/// Born-rule model: site `i`'s measurement `m` is `measurements[i][m]`.
pub fn born_model<T: RealScalar>(
    psi: &StateVector<T>,
    measurements: &[Vec<ProjectiveQubitMeasurement<T>>],
) -> Result<ProbabilityModel<T>> {
    let n = psi.qubits();
    if measurements.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} measurement lists for {n} qubits",
            measurements.len()
        )));
    }
    if let Some(i) = measurements.iter().position(Vec::is_empty) {
        return Err(Error::ShapeMismatch(format!("site {i} has no measurement")));
    }
    let scenario = Scenario::new(measurements.iter().map(|ms| vec![2; ms.len()]).collect())?;
    // Row o of each matrix is the conjugate of eigenvector o.
    let bras: Vec<Vec<[Qubit<T>; 2]>> = measurements
        .iter()
        .map(|ms| {
            ms.iter()
                .map(|m| {
                    let [v0, v1] = m.eigenvectors();
                    [[v0[0].conj(), v0[1].conj()], [v1[0].conj(), v1[1].conj()]]
                })
                .collect()
        })
        .collect();
    let rows = scenario
        .contexts()
        .map(|context| {
            let mut amps = psi.amplitudes().to_vec();
            for (site, &m) in context.0.iter().enumerate() {
                contract(&mut amps, n, site, &bras[site][m]);
            }
            amps.iter().map(|a| a.norm_sqr()).collect()
        })
        .collect();
    ProbabilityModel::new(scenario, rows)
}

/// Applies a 2×2 matrix to one tensor factor in place.
fn contract<T: RealScalar>(amps: &mut [Complex<T>], n: usize, site: usize, m: &[Qubit<T>; 2]) {
    let stride = 1usize << (n - 1 - site);
    for base in 0..amps.len() {
        if base & stride != 0 {
            continue;
        }
        let (x0, x1) = (amps[base], amps[base + stride]);
        amps[base] = m[0][0] * x0 + m[0][1] * x1;
        amps[base + stride] = m[1][0] * x0 + m[1][1] * x1;
    }
}

/// `⟨a|b⟩`.
pub(crate) fn inner<T: RealScalar>(a: &Qubit<T>, b: &Qubit<T>) -> Complex<T> {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::{is_no_signalling_probabilistic, Context, JointOutcome};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigenvectors_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (t, p) = random_bloch_angles(&mut rng);
            let m = ProjectiveQubitMeasurement::<f64>::new(t, p).unwrap();
            let [v0, v1] = m.eigenvectors();
            assert!((inner(&v0, &v0).re - 1.0).abs() < 1e-12);
            assert!((inner(&v1, &v1).re - 1.0).abs() < 1e-12);
            assert!(inner(&v0, &v1).norm() < 1e-12);
        }
    }

    #[test]
    fn phi_plus_in_z_basis() {
        let z = ProjectiveQubitMeasurement::<f64>::pauli_z();
        let m = born_model(&StateVector::phi_plus(), &[vec![z], vec![z]]).unwrap();
        let row = m.row(0);
        assert!((row[0] - 0.5).abs() < 1e-12 && (row[3] - 0.5).abs() < 1e-12);
        assert!(row[1].abs() < 1e-12 && row[2].abs() < 1e-12);
    }

    #[test]
    fn repeated_measurements_give_identical_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = StateVector::<f64>::random(2, &mut rng);
        let (t, p) = random_bloch_angles(&mut rng);
        let a = ProjectiveQubitMeasurement::new(t, p).unwrap();
        let b = ProjectiveQubitMeasurement::pauli_x();
        let m = born_model(&psi, &[vec![a, a], vec![b]]).unwrap();
        assert_eq!(m.row(0), m.row(1));
    }

    #[test]
    fn random_born_models_are_no_signalling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let psi = StateVector::<f64>::random(3, &mut rng);
            let ms: Vec<Vec<_>> = (0..3)
                .map(|_| {
                    (0..2)
                        .map(|_| {
                            let (t, p) = random_bloch_angles(&mut rng);
                            ProjectiveQubitMeasurement::new(t, p).unwrap()
                        })
                        .collect()
                })
                .collect();
            let m = born_model(&psi, &ms).unwrap();
            assert!(is_no_signalling_probabilistic(&m, 1e-9));
        }
    }

    #[test]
    fn from_vector_recovers_the_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let v: Qubit<f64> = random_qubit(&mut rng);
            let phase = Complex::from_polar(1.0, 0.7);
            let m = ProjectiveQubitMeasurement::from_vector([v[0] * phase, v[1] * phase]).unwrap();
            assert!((inner(&m.eigenvectors()[0], &v).norm() - 1.0).abs() < 1e-12);
        }
        let m = ProjectiveQubitMeasurement::<f64>::from_vector([c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!((m.theta - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn shape_and_state_errors() {
        let psi = StateVector::<f64>::phi_plus();
        let z = ProjectiveQubitMeasurement::pauli_z();
        assert!(matches!(born_model(&psi, &[vec![z]]), Err(Error::ShapeMismatch(_))));
        assert!(matches!(born_model(&psi, &[vec![z], vec![]]), Err(Error::ShapeMismatch(_))));
        assert!(matches!(
            StateVector::<f64>::new(vec![c(1.0, 0.0); 3]),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            StateVector::<f64>::new(vec![c(1.0, 0.0); 2]),
            Err(Error::InvalidState(_))
        ));
        assert!(ProjectiveQubitMeasurement::<f64>::new(4.0, 0.0).is_err());
    }

    #[test]
    fn f32_models_build() {
        let z = ProjectiveQubitMeasurement::<f32>::pauli_x();
        let m = born_model(&StateVector::<f32>::phi_plus(), &[vec![z], vec![z]]).unwrap();
        let p = m.prob(&Context(vec![0, 0]), &JointOutcome(vec![0, 0])).unwrap();
        assert!((p - 0.5).abs() < 1e-6);
    }
}
