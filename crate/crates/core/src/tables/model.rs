use super::{Context, JointOutcome, Scenario};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Shared view over probability and possibility tables, used by
/// relabelling and other shape-only transformations.
pub trait EmpiricalModel: Sized {
    type Entry: Clone;

    fn scenario(&self) -> &Scenario;

    fn rows(&self) -> &[Vec<Self::Entry>];

    /// Rebuilds a model from rows already known to be valid.
    fn from_valid_rows(scenario: Scenario, rows: Vec<Vec<Self::Entry>>) -> Self;
}

fn check_row_shapes<T>(scenario: &Scenario, rows: &[Vec<T>]) -> Result<()> {
    if rows.len() != scenario.context_count() {
        return Err(Error::InvalidModel(format!(
            "expected {} contexts, got {}",
            scenario.context_count(),
            rows.len()
        )));
    }
    for (index, row) in rows.iter().enumerate() {
        let context = scenario.context(index);
        let expected = scenario.joint_outcome_count(&context);
        if row.len() != expected {
            return Err(Error::InvalidModel(format!(
                "context {context}: expected {expected} entries, got {}",
                row.len()
            )));
        }
    }
    Ok(())
}

/// Per-context probability distributions over joint outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityModel<S> {
    scenario: Scenario,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> ProbabilityModel<S> {
    /// Validates shape, non-negativity and per-context normalisation
    /// (within [`Scalar::normalization_tolerance`]).
    pub fn new(scenario: Scenario, rows: Vec<Vec<S>>) -> Result<Self> {
        check_row_shapes(&scenario, &rows)?;
        let tol = S::normalization_tolerance();
        for (index, row) in rows.iter().enumerate() {
            let context = scenario.context(index);
            if let Some(pos) = row.iter().position(|p| p.is_negative()) {
                return Err(Error::InvalidModel(format!(
                    "context {context}: negative probability at outcome {pos}"
                )));
            }
            let total = row.iter().cloned().fold(S::zero(), |a, b| a + b);
            if !total.abs_diff_le(&S::one(), &tol) {
                return Err(Error::InvalidModel(format!(
                    "context {context}: probabilities sum to {total}"
                )));
            }
        }
        Ok(Self { scenario, rows })
    }

    pub fn from_fn(
        scenario: Scenario,
        mut prob: impl FnMut(&Context, &JointOutcome) -> S,
    ) -> Result<Self> {
        let rows = scenario
            .contexts()
            .map(|c| {
                (0..scenario.joint_outcome_count(&c))
                    .map(|o| prob(&c, &scenario.outcome(&c, o)))
                    .collect()
            })
            .collect();
        Self::new(scenario, rows)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn row(&self, context_index: usize) -> &[S] {
        &self.rows[context_index]
    }

    pub fn get(&self, context_index: usize, outcome_index: usize) -> &S {
        &self.rows[context_index][outcome_index]
    }

    pub fn prob(&self, context: &Context, outcome: &JointOutcome) -> Result<S> {
        self.scenario.check_outcome(context, outcome)?;
        let c = self.scenario.context_index(context);
        Ok(self.rows[c][self.scenario.outcome_index(context, outcome)].clone())
    }

    /// Possibilistic collapse: an entry is possible iff its probability
    /// exceeds `epsilon`.
    pub fn collapse(&self, epsilon: f64) -> PossibilityModel {
        let eps = S::tolerance(epsilon);
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|p| *p > eps).collect())
            .collect();
        PossibilityModel {
            scenario: self.scenario.clone(),
            rows,
        }
    }

    /// Same model with every entry converted to another scalar type.
    pub fn map_scalar<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Result<ProbabilityModel<T>> {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(&mut f).collect())
            .collect();
        ProbabilityModel::new(self.scenario.clone(), rows)
    }

    pub fn to_f64(&self) -> ProbabilityModel<f64> {
        ProbabilityModel {
            scenario: self.scenario.clone(),
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(Scalar::to_f64_lossy).collect())
                .collect(),
        }
    }

    /// Each context uniform over the possible entries of `support`.
    pub fn uniform_on(support: &PossibilityModel) -> Self {
        let rows = support
            .rows
            .iter()
            .map(|row| {
                let count = row.iter().filter(|&&b| b).count() as i64;
                row.iter()
                    .map(|&b| if b { S::from_ratio(1, count) } else { S::zero() })
                    .collect()
            })
            .collect();
        Self {
            scenario: support.scenario.clone(),
            rows,
        }
    }
}

impl<S: Scalar> EmpiricalModel for ProbabilityModel<S> {
    type Entry = S;

    fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    fn from_valid_rows(scenario: Scenario, rows: Vec<Vec<S>>) -> Self {
        Self { scenario, rows }
    }
}

/// Per-context Boolean supports: `true` is possible, `false` impossible.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PossibilityModel {
    scenario: Scenario,
    rows: Vec<Vec<bool>>,
}

impl PossibilityModel {
    /// Validates shape and that every context has a possible outcome.
    pub fn new(scenario: Scenario, rows: Vec<Vec<bool>>) -> Result<Self> {
        check_row_shapes(&scenario, &rows)?;
        for (index, row) in rows.iter().enumerate() {
            if !row.iter().any(|&b| b) {
                return Err(Error::InvalidModel(format!(
                    "context {} has no possible outcome",
                    scenario.context(index)
                )));
            }
        }
        Ok(Self { scenario, rows })
    }

    pub fn from_fn(
        scenario: Scenario,
        mut possible: impl FnMut(&Context, &JointOutcome) -> bool,
    ) -> Result<Self> {
        let rows = scenario
            .contexts()
            .map(|c| {
                (0..scenario.joint_outcome_count(&c))
                    .map(|o| possible(&c, &scenario.outcome(&c, o)))
                    .collect()
            })
            .collect();
        Self::new(scenario, rows)
    }

    /// Every entry possible.
    pub fn full(scenario: Scenario) -> Self {
        Self::from_fn(scenario, |_, _| true).expect("full support is valid")
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn row(&self, context_index: usize) -> &[bool] {
        &self.rows[context_index]
    }

    pub fn get(&self, context_index: usize, outcome_index: usize) -> bool {
        self.rows[context_index][outcome_index]
    }

    pub fn possible(&self, context: &Context, outcome: &JointOutcome) -> Result<bool> {
        self.scenario.check_outcome(context, outcome)?;
        let c = self.scenario.context_index(context);
        Ok(self.rows[c][self.scenario.outcome_index(context, outcome)])
    }

    /// Unchecked lookup by per-site coordinates.
    pub(crate) fn at(&self, context: &[usize], outcome: &[usize]) -> bool {
        let counts = self.scenario.outcome_counts();
        let mut c = 0;
        let mut o = 0;
        for site in 0..counts.len() {
            c = c * counts[site].len() + context[site];
            o = o * counts[site][context[site]] + outcome[site];
        }
        self.rows[c][o]
    }

    pub fn possible_count(&self) -> usize {
        self.rows.iter().flatten().filter(|&&b| b).count()
    }

    /// Possible entries as `(context index, outcome index)` in canonical order.
    pub fn possible_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(c, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(move |(o, _)| (c, o))
        })
    }

    /// Row-major flattening of all entries.
    pub fn bits(&self) -> Vec<bool> {
        self.rows.iter().flatten().copied().collect()
    }

    /// Entry-wise union; the result is possible wherever either input is.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.scenario != other.scenario {
            return Err(Error::ShapeMismatch("union of different scenarios".into()));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x || *y).collect())
            .collect();
        Ok(Self {
            scenario: self.scenario.clone(),
            rows,
        })
    }

    /// Probability model with the same support, `1` on every possible
    /// entry of a single-entry context. Only valid for deterministic supports.
    pub fn as_point_distribution<S: Scalar>(&self) -> Result<ProbabilityModel<S>> {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&b| if b { S::one() } else { S::zero() }).collect())
            .collect();
        ProbabilityModel::new(self.scenario.clone(), rows)
    }
}

impl EmpiricalModel for PossibilityModel {
    type Entry = bool;

    fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    fn from_valid_rows(scenario: Scenario, rows: Vec<Vec<bool>>) -> Self {
        Self { scenario, rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn s222() -> Scenario {
        Scenario::uniform(2, 2, 2).unwrap()
    }

    #[test]
    fn rejects_unnormalized_rows() {
        let rows = vec![vec![0.5, 0.5, 0.0, 0.0]; 3]
            .into_iter()
            .chain([vec![0.5, 0.4, 0.0, 0.0]])
            .collect();
        assert!(ProbabilityModel::<f64>::new(s222(), rows).is_err());
    }

    #[test]
    fn rejects_negative_and_misshapen_rows() {
        let mut rows = vec![vec![0.25; 4]; 4];
        rows[1] = vec![1.5, -0.5, 0.0, 0.0];
        assert!(ProbabilityModel::<f64>::new(s222(), rows).is_err());
        assert!(ProbabilityModel::<f64>::new(s222(), vec![vec![0.25; 4]; 3]).is_err());
        assert!(ProbabilityModel::<f64>::new(s222(), vec![vec![0.5; 2]; 4]).is_err());
    }

    #[test]
    fn exact_rows_must_sum_exactly() {
        let third = BigRational::from_ratio(1, 3);
        let s = Scenario::new(vec![vec![3]]).unwrap();
        assert!(ProbabilityModel::new(s.clone(), vec![vec![third.clone(); 3]]).is_ok());
        let almost = BigRational::from_ratio(333_333, 1_000_000);
        assert!(ProbabilityModel::new(s, vec![vec![almost; 3]]).is_err());
    }

    #[test]
    fn possibility_rows_need_a_possible_entry() {
        let mut rows = vec![vec![true; 4]; 4];
        rows[2] = vec![false; 4];
        assert!(PossibilityModel::new(s222(), rows).is_err());
    }

    #[test]
    fn collapse_of_point_distribution() {
        let m = ProbabilityModel::<f64>::from_fn(s222(), |_, o| {
            if o.0 == [1, 0] {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let support = m.collapse(0.0);
        assert_eq!(support.possible_count(), 4);
        for c in 0..4 {
            assert_eq!(support.row(c), &[false, false, true, false]);
        }
    }

    #[test]
    fn collapse_full_support_model() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rows = (0..4)
            .map(|_| {
                let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(1.0..2.0)).collect();
                let total: f64 = raw.iter().sum();
                raw.iter().map(|x| x / total).collect()
            })
            .collect();
        let m = ProbabilityModel::new(s222(), rows).unwrap();
        assert!(m.row(0).iter().all(|&p| p >= 0.05 * 0.5));
        assert_eq!(m.collapse(1e-9).possible_count(), 16);
    }

    #[test]
    fn lookup_by_coordinates() {
        let m = PossibilityModel::from_fn(s222(), |c, o| c.0 == [1, 0] && o.0 == [0, 1] || o.0 == [0, 0])
            .unwrap();
        assert!(m.possible(&Context(vec![1, 0]), &JointOutcome(vec![0, 1])).unwrap());
        assert!(!m.possible(&Context(vec![1, 1]), &JointOutcome(vec![0, 1])).unwrap());
        assert!(m.at(&[1, 0], &[0, 1]));
        assert!(m.possible(&Context(vec![2, 0]), &JointOutcome(vec![0, 1])).is_err());
    }
}
