use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{born_model, exact_zero_threshold, inner, ProjectiveQubitMeasurement, Qubit, StateVector};
use crate::error::{Error, Result};
use crate::hardy::{coarse_at, find_hardy_witnesses, CoarseHardyWitness};
use crate::scalar::RealScalar;
use crate::tables::ProbabilityModel;

/// `(5√5 − 11)/2`, the largest paradoxical probability of the family.
pub fn optimal_hardy_probability() -> f64 {
    (5.0 * 5f64.sqrt() - 11.0) / 2.0
}

/// One member of Hardy's two-qubit family, `α = cos t`, `β = sin t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyFamilyParams<T> {
    t: T,
}

impl<T: RealScalar> HardyFamilyParams<T> {
    /// `t` must lie in `(0, π/2)` and differ from `π/4`.
    pub fn new(t: T) -> Result<Self> {
        let tol = T::norm_tolerance();
        let quarter = T::from_f64_lossy(std::f64::consts::FRAC_PI_4);
        let half = quarter + quarter;
        if !t.is_finite() || t <= tol || t >= half - tol || (t - quarter).abs() <= tol {
            return Err(Error::DegenerateParams(format!(
                "t = {t} must lie in (0, pi/2) and differ from pi/4"
            )));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn alpha(&self) -> T {
        self.t.cos()
    }

    pub fn beta(&self) -> T {
        self.t.sin()
    }

    /// `N = (2α²β² + α⁴)^{-1/2}`.
    pub fn normalization(&self) -> T {
        let (a, b) = (self.alpha(), self.beta());
        let two = T::one() + T::one();
        (two * a * a * b * b + a * a * a * a).sqrt().recip()
    }

    /// Predicted paradoxical probability `α²β⁴/(1 + β²)`.
    pub fn predicted_probability(&self) -> T {
        let (a, b) = (self.alpha(), self.beta());
        a * a * b * b * b * b / (T::one() + b * b)
    }
}

/// `N(−αβ|u u⊥⟩ − αβ|u⊥ u⟩ + α²|u⊥ u⊥⟩)` for an orthonormal pair `u, u⊥`.
fn hardy_state<T: RealScalar>(alpha: T, beta: T, u: &Qubit<T>, u_perp: &Qubit<T>) -> Result<StateVector<T>> {
    let cr = |x: T| Complex::new(x, T::zero());
    let ab = cr(-(alpha * beta));
    let aa = cr(alpha * alpha);
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 4];
    for i in 0..2 {
        for j in 0..2 {
            amps[2 * i + j] = ab * u[i] * u_perp[j] + ab * u_perp[i] * u[j] + aa * u_perp[i] * u_perp[j];
        }
    }
    StateVector::normalized(amps)
}

/// The witness every member of the family carries: base `(0,0)` at context
/// `(1,1)`, alternates measurement 0 at both sites.
fn expected_witness<T: RealScalar>(model: &ProbabilityModel<T>) -> Result<CoarseHardyWitness> {
    let support = model.collapse(exact_zero_threshold::<T>());
    let w = coarse_at(&support, (1, 0), (1, 0), (0, 0)).ok_or_else(|| {
        Error::InvalidWitness("generated model lacks the predicted Hardy witness".into())
    })?;
    debug_assert!(find_hardy_witnesses(&support).unwrap().contains(&w));
    Ok(w)
}

/// Born model of the family member with measurements `u` (0) and `d` (1)
/// at each site, returned with its verified witness.
pub fn hardy_family_model<T: RealScalar>(
    params: &HardyFamilyParams<T>,
) -> Result<(ProbabilityModel<T>, CoarseHardyWitness)> {
    let (a, b) = (params.alpha(), params.beta());
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let psi = hardy_state(a, b, &[one, zero], &[zero, one])?;
    let u = ProjectiveQubitMeasurement::pauli_z();
    let d = ProjectiveQubitMeasurement::new(params.t() + params.t(), T::zero())?;
    let model = born_model(&psi, &[vec![u, d], vec![u, d]])?;
    let w = expected_witness(&model)?;
    Ok((model, w))
}

/// The Hardy construction for an arbitrary non-commuting pair of rank-one
/// projections `|u⟩⟨u|` and `|d⟩⟨d|`.
pub fn hardy_from_projections<T: RealScalar>(
    u: Qubit<T>,
    d: Qubit<T>,
) -> Result<(ProbabilityModel<T>, CoarseHardyWitness)> {
    let unit = |v: Qubit<T>| -> Result<Qubit<T>> {
        let n = inner(&v, &v).re.sqrt();
        if n <= T::norm_tolerance() {
            return Err(Error::InvalidMeasurement("zero vector".into()));
        }
        Ok([v[0] / n, v[1] / n])
    };
    let (u, d) = (unit(u)?, unit(d)?);
    let overlap = inner(&u, &d);
    let alpha = overlap.norm();
    let tol = T::from_f64_lossy(1e-9);
    if alpha <= tol || alpha >= T::one() - tol {
        return Err(Error::Commuting {
            overlap: alpha.to_f64_lossy(),
        });
    }
    let phase = overlap / alpha;
    let u = [u[0] * phase, u[1] * phase];
    let beta = (T::one() - alpha * alpha).sqrt();
    let au = Complex::new(alpha, T::zero());
    let u_perp = unit([(d[0] - au * u[0]) / beta, (d[1] - au * u[1]) / beta])?;
    let psi = hardy_state(alpha, beta, &u, &u_perp)?;
    let mu = ProjectiveQubitMeasurement::from_vector(u)?;
    let md = ProjectiveQubitMeasurement::from_vector(d)?;
    let model = born_model(&psi, &[vec![mu, md], vec![mu, md]])?;
    let w = expected_witness(&model)?;
    Ok((model, w))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyScan {
    pub steps: usize,
    /// Grid points evaluated (`π/4` is skipped).
    pub evaluated: usize,
    /// Smallest witness count over the grid.
    pub min_witnesses: usize,
    pub argmax_t: f64,
    pub max_probability: f64,
    /// Paradoxical probability at the first and last grid points.
    pub endpoint_probabilities: (f64, f64),
}

fn family_probability(t: f64) -> Result<(f64, usize)> {
    let params = HardyFamilyParams::<f64>::new(t)?;
    let (model, w) = hardy_family_model(&params)?;
    let witnesses = find_hardy_witnesses(&model.collapse(exact_zero_threshold::<f64>()))?;
    let p = *model.get(3, 0);
    debug_assert_eq!(w.base_context().0, vec![1, 1]);
    Ok((p, witnesses.len()))
}

/// Scans `t` over `steps` interior grid points of `(0, π/2)` and refines the
/// best one by golden-section search.
pub fn hardy_scan(steps: usize) -> Result<HardyScan> {
    if steps < 3 {
        return Err(Error::validation("steps", "need at least 3 grid points"));
    }
    let h = std::f64::consts::FRAC_PI_2 / (steps + 1) as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    let mut min_witnesses = usize::MAX;
    let mut evaluated = 0;
    let mut first = None;
    let mut last = 0.0;
    for i in 1..=steps {
        let t = i as f64 * h;
        if (t - std::f64::consts::FRAC_PI_4).abs() <= 1e-12 {
            continue;
        }
        let (p, count) = family_probability(t)?;
        evaluated += 1;
        min_witnesses = min_witnesses.min(count);
        first.get_or_insert(p);
        last = p;
        if p > best.1 {
            best = (t, p);
        }
    }
    let f = |t: f64| family_probability(t).map(|(p, _)| p).unwrap_or(f64::NEG_INFINITY);
    let (mut lo, mut hi) = ((best.0 - h).max(h * 1e-3), (best.0 + h).min(std::f64::consts::FRAC_PI_2 - h * 1e-3));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    for (t, p) in [(x1, f1), (x2, f2)] {
        if p > best.1 {
            best = (t, p);
        }
    }
    Ok(HardyScan {
        steps,
        evaluated,
        min_witnesses,
        argmax_t: best.0,
        max_probability: best.1,
        endpoint_probabilities: (first.unwrap_or(0.0), last),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::{paradoxical_probability, HardyWitness};
    use crate::quantum::{bell_symmetry_check, random_qubit};
    use crate::tables::is_no_signalling_probabilistic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn family_member_has_predicted_witness_and_probability() {
        let params = HardyFamilyParams::new(0.6f64).unwrap();
        let (model, w) = hardy_family_model(&params).unwrap();
        assert!(is_no_signalling_probabilistic(&model, 1e-9));
        let p = paradoxical_probability(&model, &HardyWitness::Coarse(w), 1e-12).unwrap();
        assert!((p - params.predicted_probability()).abs() < 1e-12);
        let n = params.normalization();
        let (a, b) = (params.alpha(), params.beta());
        assert!((n * n - 1.0 / (a * a * (1.0 + b * b))).abs() < 1e-12);
    }

    #[test]
    fn degenerate_parameters() {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        for t in [0.0, FRAC_PI_4, FRAC_PI_2, -0.1, 2.0] {
            assert!(matches!(HardyFamilyParams::new(t), Err(Error::DegenerateParams(_))));
        }
    }

    #[test]
    fn pi_over_six_is_not_symmetric() {
        let (model, _) = hardy_family_model(&HardyFamilyParams::new(std::f64::consts::FRAC_PI_6).unwrap()).unwrap();
        assert!(!bell_symmetry_check(&model));
    }

    #[test]
    fn optimum_of_the_family() {
        // β² = (√5 − 1)/2 maximises α²β⁴/(1 + β²).
        let t = ((5f64.sqrt() - 1.0) / 2.0).sqrt().asin();
        let params = HardyFamilyParams::new(t).unwrap();
        assert!((params.predicted_probability() - optimal_hardy_probability()).abs() < 1e-12);
        assert!((optimal_hardy_probability() - 0.0901699).abs() < 1e-7);
    }

    #[test]
    fn scan_finds_the_bound() {
        let scan = hardy_scan(200).unwrap();
        assert!((scan.max_probability - optimal_hardy_probability()).abs() < 1e-4);
        assert!(scan.min_witnesses >= 1);
        assert!(scan.endpoint_probabilities.0 < 1e-6);
        assert!(scan.endpoint_probabilities.1 < 1e-3);
    }

    #[test]
    fn small_t_probability_vanishes() {
        let mut prev = f64::INFINITY;
        for t in [0.1, 0.01, 0.001] {
            let (p, count) = family_probability(t).unwrap();
            assert!(count >= 1);
            assert!(p < prev);
            prev = p;
        }
        assert!(prev < 1e-11);
    }

    #[test]
    fn projections() {
        let zero = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let (model, w) = hardy_from_projections([one, zero], [h, h]).unwrap();
        assert!(w.verify(&model.collapse(1e-20)));
        assert!(matches!(
            hardy_from_projections([one, zero], [zero, one]),
            Err(Error::Commuting { .. })
        ));
        assert!(matches!(
            hardy_from_projections([one, zero], [one, zero]),
            Err(Error::Commuting { .. })
        ));
    }

    #[test]
    fn random_incompatible_pairs_give_witnesses() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let u: Qubit<f64> = random_qubit(&mut rng);
            let d: Qubit<f64> = random_qubit(&mut rng);
            let (model, w) = hardy_from_projections(u, d).unwrap();
            assert!(is_no_signalling_probabilistic(&model, 1e-9));
            assert!(w.verify(&model.collapse(1e-20)));
        }
    }
}
