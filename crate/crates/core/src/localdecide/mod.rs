//! Deciding where a model sits in the locality hierarchy.
//!
//! The brute-force grid search in [`grid`] is the reference oracle. The
//! `(2,2,l)` and `(2,k,2)` deciders are polynomial and must agree with it.

mod grid;
pub mod lp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{find_hardy_witnesses, CoarseHardyWitness};
use crate::scalar::Scalar;
use crate::tables::{Context, JointOutcome, PossibilityModel, ProbabilityModel, Scenario};

pub use grid::{
    consistent_grids, extends_to_grid, first_consistent_grid, is_local, is_strongly_nonlocal,
    nonextendable_entries, DeterministicGrid,
};

/// Largest grid count the locality LP will enumerate.
pub const MAX_LP_GRIDS: u128 = 1_000_000;
/// Largest dense tableau (rows × columns) the locality LP will build.
pub const MAX_LP_CELLS: u128 = 50_000_000;

/// Levels of the nonlocality hierarchy, weakest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HierarchyLevel {
    Local,
    Probabilistic,
    Logical,
    Strong,
}

impl std::fmt::Display for HierarchyLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HierarchyLevel::Local => "LOCAL",
            HierarchyLevel::Probabilistic => "PROBABILISTIC",
            HierarchyLevel::Logical => "LOGICAL",
            HierarchyLevel::Strong => "STRONG",
        })
    }
}

/// Outcome of a possibilistic decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportVerdict {
    Local,
    LogicallyNonlocal,
}

/// A possible entry of a support table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Entry {
    pub context: Context,
    pub outcome: JointOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub level: SupportVerdict,
    pub nonextendable_entries: Vec<Entry>,
    pub witnesses: Vec<CoarseHardyWitness>,
}

fn require_22l(scenario: &Scenario) -> Result<()> {
    if !scenario.is_bipartite_two_setting() {
        return Err(Error::ShapeMismatch(format!(
            "expected two sites with two measurements each, got {scenario}"
        )));
    }
    Ok(())
}

/// `(2,2,l)` decider: each possible entry is checked against the three
/// other contexts in `O(l²)`.
pub fn decide_22l(model: &PossibilityModel) -> Result<Verdict> {
    let scenario = model.scenario();
    require_22l(scenario)?;
    let mut nonextendable = Vec::new();
    for (ci, oi) in model.possible_entries() {
        let context = scenario.context(ci);
        let outcome = scenario.outcome(&context, oi);
        let (x, y) = (context.0[0], context.0[1]);
        let (a, b) = (outcome.0[0], outcome.0[1]);
        let (x2, y2) = (1 - x, 1 - y);
        let alice: Vec<usize> = (0..scenario.outcome_count(0, x2))
            .filter(|&a2| model.at(&[x2, y], &[a2, b]))
            .collect();
        let bob: Vec<usize> = (0..scenario.outcome_count(1, y2))
            .filter(|&b2| model.at(&[x, y2], &[a, b2]))
            .collect();
        let extends = alice
            .iter()
            .any(|&a2| bob.iter().any(|&b2| model.at(&[x2, y2], &[a2, b2])));
        if !extends {
            nonextendable.push(Entry { context, outcome });
        }
    }
    Ok(Verdict {
        level: if nonextendable.is_empty() {
            SupportVerdict::Local
        } else {
            SupportVerdict::LogicallyNonlocal
        },
        nonextendable_entries: nonextendable,
        witnesses: Vec::new(),
    })
}

/// `(2,k,2)` decider: logically nonlocal iff some `2×2` sub-table holds a
/// Hardy configuration.
pub fn decide_2k2(model: &PossibilityModel) -> Result<Verdict> {
    let scenario = model.scenario();
    if scenario.sites() != 2 || !scenario.is_binary() {
        return Err(Error::ShapeMismatch(format!(
            "expected two sites with binary outcomes, got {scenario}"
        )));
    }
    let witnesses = find_hardy_witnesses(model)?;
    Ok(Verdict {
        level: if witnesses.is_empty() {
            SupportVerdict::Local
        } else {
            SupportVerdict::LogicallyNonlocal
        },
        nonextendable_entries: Vec::new(),
        witnesses,
    })
}

/// `true` iff `model` is a convex combination of deterministic grids.
///
/// Solved as an LP feasibility problem over grid weights; exact for exact
/// scalars.
pub fn is_probabilistically_local<S: Scalar>(model: &ProbabilityModel<S>) -> Result<bool> {
    Ok(local_decomposition(model)?.is_some())
}

/// Grid weights reproducing `model`, if it is local.
pub fn local_decomposition<S: Scalar>(
    model: &ProbabilityModel<S>,
) -> Result<Option<Vec<(DeterministicGrid, S)>>> {
    let scenario = model.scenario();
    let grids = DeterministicGrid::enumerate(scenario, MAX_LP_GRIDS)?;
    let offsets: Vec<usize> = scenario
        .contexts()
        .scan(0, |acc, c| {
            let start = *acc;
            *acc += scenario.joint_outcome_count(&c);
            Some(start)
        })
        .collect();
    let entries: usize = scenario.contexts().map(|c| scenario.joint_outcome_count(&c)).sum();
    let rows = entries + 1;
    let cells = rows as u128 * (grids.len() + rows) as u128;
    if cells > MAX_LP_CELLS {
        return Err(Error::TooLarge {
            what: "locality LP tableau",
            size: cells,
            limit: MAX_LP_CELLS,
        });
    }
    let mut a = vec![vec![S::zero(); grids.len()]; rows];
    for (g, grid) in grids.iter().enumerate() {
        for (ci, oi) in grid.entry_indices(scenario) {
            a[offsets[ci] + oi][g] = S::one();
        }
        a[entries][g] = S::one();
    }
    let mut b: Vec<S> = (0..scenario.context_count())
        .flat_map(|ci| model.row(ci).iter().cloned())
        .collect();
    b.push(S::one());
    Ok(lp::find_nonnegative_solution(&a, &b).map(|weights| {
        grids
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| !w.is_zero())
            .collect()
    }))
}

/// Hierarchy level of a probability model. The support is taken with
/// possibilistic collapse at `epsilon`.
pub fn classify<S: Scalar>(model: &ProbabilityModel<S>, epsilon: f64) -> Result<HierarchyLevel> {
    let support = model.collapse(epsilon);
    if is_strongly_nonlocal(&support) {
        return Ok(HierarchyLevel::Strong);
    }
    if !is_local(&support) {
        return Ok(HierarchyLevel::Logical);
    }
    if !is_probabilistically_local(model)? {
        return Ok(HierarchyLevel::Probabilistic);
    }
    Ok(HierarchyLevel::Local)
}

/// Level of a bare support: `Local`, `Logical` or `Strong`.
pub fn classify_support(model: &PossibilityModel) -> HierarchyLevel {
    if is_strongly_nonlocal(model) {
        HierarchyLevel::Strong
    } else if !is_local(model) {
        HierarchyLevel::Logical
    } else {
        HierarchyLevel::Local
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn s222() -> Scenario {
        Scenario::uniform(2, 2, 2).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    fn pr_box() -> ProbabilityModel<BigRational> {
        ProbabilityModel::from_fn(s222(), |c, o| {
            if (o.0[0] ^ o.0[1]) == (c.0[0] & c.0[1]) {
                q(1, 2)
            } else {
                q(0, 1)
            }
        })
        .unwrap()
    }

    #[test]
    fn hardy_support_by_polynomial_decider() {
        let m = PossibilityModel::from_fn(s222(), |c, o| {
            !matches!(
                (c.0[0], c.0[1], o.0[0], o.0[1]),
                (0, 1, 0, 1) | (1, 0, 1, 0) | (1, 1, 0, 0)
            )
        })
        .unwrap();
        let v = decide_22l(&m).unwrap();
        assert_eq!(v.level, SupportVerdict::LogicallyNonlocal);
        assert_eq!(
            v.nonextendable_entries,
            vec![Entry {
                context: Context(vec![0, 0]),
                outcome: JointOutcome(vec![0, 0])
            }]
        );
    }

    #[test]
    fn full_support_225_is_local() {
        let m = PossibilityModel::full(Scenario::uniform(2, 2, 5).unwrap());
        assert_eq!(decide_22l(&m).unwrap().level, SupportVerdict::Local);
        let m = PossibilityModel::full(Scenario::uniform(2, 4, 2).unwrap());
        assert_eq!(decide_2k2(&m).unwrap().level, SupportVerdict::Local);
    }

    #[test]
    fn deciders_reject_wrong_shapes() {
        let m = PossibilityModel::full(Scenario::uniform(2, 3, 2).unwrap());
        assert!(matches!(decide_22l(&m), Err(Error::ShapeMismatch(_))));
        let m = PossibilityModel::full(Scenario::uniform(2, 2, 3).unwrap());
        assert!(matches!(decide_2k2(&m), Err(Error::ShapeMismatch(_))));
        let m = PossibilityModel::full(Scenario::uniform(3, 2, 2).unwrap());
        assert!(matches!(decide_2k2(&m), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn pr_box_levels() {
        let pr = pr_box();
        assert!(!is_probabilistically_local(&pr).unwrap());
        assert_eq!(classify(&pr, 1e-9).unwrap(), HierarchyLevel::Strong);
        assert_eq!(classify(&pr.to_f64(), 1e-9).unwrap(), HierarchyLevel::Strong);
    }

    #[test]
    fn grid_models_are_local() {
        let grid = DeterministicGrid::new(&s222(), vec![vec![1, 0], vec![0, 1]]).unwrap();
        let m: ProbabilityModel<BigRational> = grid.probability_model(&s222());
        assert!(is_probabilistically_local(&m).unwrap());
        assert_eq!(classify(&m, 0.0).unwrap(), HierarchyLevel::Local);
    }

    #[test]
    fn uniform_noise_is_an_equal_mixture() {
        let m = ProbabilityModel::from_fn(s222(), |_, _| q(1, 4)).unwrap();
        let weights = local_decomposition(&m).unwrap().unwrap();
        let total = weights.iter().fold(q(0, 1), |acc, (_, w)| acc + w.clone());
        assert_eq!(total, q(1, 1));
        // Reconstruct every entry from the weights.
        for c in s222().contexts() {
            for o in 0..4 {
                let outcome = s222().outcome(&c, o);
                let p = weights
                    .iter()
                    .filter(|(g, _)| g.agrees_with(&c, &outcome))
                    .fold(q(0, 1), |acc, (_, w)| acc + w.clone());
                assert_eq!(p, q(1, 4));
            }
        }
    }

    #[test]
    fn pr_noise_mixture_violates_bell_at_high_visibility() {
        // v·PR + (1-v)·noise is local iff v <= 1/2 (CHSH value 2 + 2v).
        let mix = |v: BigRational| {
            let pr = pr_box();
            ProbabilityModel::from_fn(s222(), |c, o| {
                v.clone() * pr.prob(c, o).unwrap() + (q(1, 1) - v.clone()) * q(1, 4)
            })
            .unwrap()
        };
        assert!(is_probabilistically_local(&mix(q(1, 2))).unwrap());
        assert!(!is_probabilistically_local(&mix(q(51, 100))).unwrap());
        assert_eq!(classify(&mix(q(3, 4)), 0.0).unwrap(), HierarchyLevel::Probabilistic);
        assert!(!is_probabilistically_local(&mix(q(51, 100)).to_f64()).unwrap());
        assert!(is_probabilistically_local(&mix(q(49, 100)).to_f64()).unwrap());
    }

    #[test]
    fn lp_guard_trips_on_large_scenarios() {
        let m = ProbabilityModel::<f64>::from_fn(Scenario::uniform(2, 5, 4).unwrap(), |_, _| 1.0 / 16.0)
            .unwrap();
        assert!(matches!(
            is_probabilistically_local(&m),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn level_order() {
        assert!(HierarchyLevel::Local < HierarchyLevel::Probabilistic);
        assert!(HierarchyLevel::Probabilistic < HierarchyLevel::Logical);
        assert!(HierarchyLevel::Logical < HierarchyLevel::Strong);
        assert_eq!(serde_json::to_string(&HierarchyLevel::Strong).unwrap(), "\"STRONG\"");
    }
}
