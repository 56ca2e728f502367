use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{born_model, random_bloch_angles, ProjectiveQubitMeasurement, StateVector};
use crate::error::{Error, Result};
use crate::localdecide::{decide_2k2, SupportVerdict};
use crate::scalar::{RealScalar, Scalar};
use crate::tables::ProbabilityModel;

/// `|φ⁺⟩` model with `(θ, φ)` pairs for Alice's measurements followed by
/// the same number for Bob's.
pub fn bell_model<T: RealScalar>(angles: &[(T, T)]) -> Result<ProbabilityModel<T>> {
    if angles.is_empty() || angles.len() % 2 != 0 {
        return Err(Error::validation(
            "angles",
            format!("need an even, nonzero number of (theta, phi) pairs, got {}", angles.len()),
        ));
    }
    let ms = angles
        .iter()
        .map(|&(t, p)| ProjectiveQubitMeasurement::new(t, p))
        .collect::<Result<Vec<_>>>()?;
    let (a, b) = ms.split_at(ms.len() / 2);
    born_model(&StateVector::phi_plus(), &[a.to_vec(), b.to_vec()])
}

/// `p(01) = p(10)` and `p(00) = p(11)` in every context, within `1e-9`.
pub fn bell_symmetry_check<S: Scalar>(model: &ProbabilityModel<S>) -> bool {
    let s = model.scenario();
    if s.sites() != 2 || !s.is_binary() {
        return false;
    }
    let tol = S::tolerance(1e-9);
    (0..s.context_count()).all(|ci| {
        let r = model.row(ci);
        r[1].abs_diff_le(&r[2], &tol) && r[0].abs_diff_le(&r[3], &tol)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSearchReport {
    pub samples: usize,
    /// Samples whose measurements came from the stabilizer lattice.
    pub lattice_samples: usize,
    pub logically_nonlocal: usize,
    pub symmetric: usize,
    /// Samples whose support is not full.
    pub with_zeros: usize,
}

/// Bloch angles on the lattice `θ ∈ {0, π/4, …, π}`, `φ ∈ {0, π/4, …, 7π/4}`.
/// Such measurements produce exact zeros, which uniform sampling never does.
fn lattice_angles(rng: &mut impl Rng) -> (f64, f64) {
    let q = std::f64::consts::FRAC_PI_4;
    (q * rng.gen_range(0..=4) as f64, q * rng.gen_range(0..8) as f64)
}

/// Random `|φ⁺⟩` models with two measurements per side. Half of the samples
/// use lattice angles.
pub fn random_bell_search(samples: usize, epsilon: f64, rng: &mut impl Rng) -> Result<RandomSearchReport> {
    let mut report = RandomSearchReport {
        samples,
        lattice_samples: 0,
        logically_nonlocal: 0,
        symmetric: 0,
        with_zeros: 0,
    };
    for i in 0..samples {
        let lattice = i % 2 == 1;
        let angles: Vec<(f64, f64)> = (0..4)
            .map(|_| if lattice { lattice_angles(rng) } else { random_bloch_angles(rng) })
            .collect();
        let model = bell_model(&angles)?;
        let support = model.collapse(epsilon);
        report.lattice_samples += lattice as usize;
        if support.possible_count() < support.bits().len() {
            report.with_zeros += 1;
        }
        if decide_2k2(&support)?.level == SupportVerdict::LogicallyNonlocal {
            report.logically_nonlocal += 1;
        }
        if bell_symmetry_check(&model) {
            report.symmetric += 1;
        }
    }
    Ok(report)
}

/// Smallest sum of the three must-vanish probabilities over the 64 binary
/// Hardy configurations of a `(2,2,2)` table whose base probability exceeds
/// `min_base`. `None` if no configuration qualifies.
pub fn hardy_objective(model: &ProbabilityModel<f64>, min_base: f64) -> Option<f64> {
    let p = |x: usize, y: usize, a: usize, b: usize| *model.get(2 * x + y, 2 * a + b);
    let mut best: Option<f64> = None;
    for x in 0..2 {
        for y in 0..2 {
            let (x2, y2) = (1 - x, 1 - y);
            for a in 0..2 {
                for b in 0..2 {
                    if p(x, y, a, b) <= min_base {
                        continue;
                    }
                    for a1 in 0..2 {
                        for b1 in 0..2 {
                            let v = p(x2, y, 1 - a1, b) + p(x, y2, a, 1 - b1) + p(x2, y2, a1, b1);
                            best = Some(best.map_or(v, |cur: f64| cur.min(v)));
                        }
                    }
                }
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialReport {
    pub restarts: usize,
    pub best_objective: f64,
    /// `(θ, φ)` for `A0, A1, B0, B1` at the best point.
    pub best_angles: Vec<(f64, f64)>,
}

/// Threshold a Hardy base probability must clear in the adversarial search.
pub const MIN_BASE_PROBABILITY: f64 = 1e-3;

/// Maps free coordinates to valid Bloch angles: `θ` folded into `[0, π]`.
fn reduce(x: &[f64; 8]) -> Vec<(f64, f64)> {
    x.chunks(2)
        .map(|c| {
            let t = c[0].rem_euclid(std::f64::consts::TAU);
            let t = if t > std::f64::consts::PI {
                std::f64::consts::TAU - t
            } else {
                t
            };
            (t, c[1].rem_euclid(std::f64::consts::TAU))
        })
        .collect()
}

fn objective_at(x: &[f64; 8]) -> f64 {
    bell_model(&reduce(x))
        .ok()
        .and_then(|m| hardy_objective(&m, MIN_BASE_PROBABILITY))
        .unwrap_or(f64::INFINITY)
}

/// Random restarts of coordinate descent over the eight Bloch angles,
/// minimising [`hardy_objective`].
pub fn adversarial_bell_search(restarts: usize, rng: &mut impl Rng) -> AdversarialReport {
    let mut best = (f64::INFINITY, [0.0f64; 8]);
    for _ in 0..restarts {
        let mut x = [0.0f64; 8];
        for k in 0..4 {
            let (t, p) = random_bloch_angles(rng);
            x[2 * k] = t;
            x[2 * k + 1] = p;
        }
        let mut fx = objective_at(&x);
        let mut step = 0.5;
        while step > 1e-7 {
            let mut improved = false;
            for k in 0..8 {
                for dir in [1.0, -1.0] {
                    let mut y = x;
                    y[k] += dir * step;
                    let fy = objective_at(&y);
                    if fy < fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        if fx < best.0 {
            best = (fx, x);
        }
    }
    AdversarialReport {
        restarts,
        best_objective: best.0,
        best_angles: reduce(&best.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::hardy::{hardy_family_model, HardyFamilyParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_phi_plus_models_are_symmetric_and_not_logically_nonlocal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = random_bell_search(400, 1e-9, &mut rng).unwrap();
        assert_eq!(r.logically_nonlocal, 0);
        assert_eq!(r.symmetric, 400);
        assert!(r.with_zeros > 0);
    }

    #[test]
    fn objective_vanishes_on_a_hardy_model() {
        let (m, _) = hardy_family_model(&HardyFamilyParams::new(0.6).unwrap()).unwrap();
        assert!(hardy_objective(&m, 1e-3).unwrap() < 1e-12);
    }

    #[test]
    fn adversarial_search_stays_away_from_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = adversarial_bell_search(5, &mut rng);
        assert!(r.best_objective > 1e-4, "{r:?}");
        assert_eq!(r.best_angles.len(), 4);
    }

    #[test]
    fn odd_angle_count_is_rejected() {
        assert!(bell_model::<f64>(&[(0.0, 0.0)]).is_err());
    }
}
