use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tables::{Context, JointOutcome, PossibilityModel, ProbabilityModel, Scenario};

/// A global outcome assignment: `assignment[site][measurement]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicGrid {
    pub assignment: Vec<Vec<usize>>,
}

impl DeterministicGrid {
    pub fn new(scenario: &Scenario, assignment: Vec<Vec<usize>>) -> Result<Self> {
        let counts = scenario.outcome_counts();
        let fits = assignment.len() == counts.len()
            && assignment.iter().zip(counts).all(|(a, c)| {
                a.len() == c.len() && a.iter().zip(c).all(|(&o, &l)| o < l)
            });
        if !fits {
            return Err(Error::ShapeMismatch("grid does not match the scenario".into()));
        }
        Ok(Self { assignment })
    }

    /// Joint outcome the grid induces at `context`.
    pub fn outcome_at(&self, context: &Context) -> JointOutcome {
        JointOutcome(
            context
                .0
                .iter()
                .enumerate()
                .map(|(site, &m)| self.assignment[site][m])
                .collect(),
        )
    }

    pub fn is_consistent_with(&self, model: &PossibilityModel) -> bool {
        model
            .scenario()
            .contexts()
            .all(|c| model.at(&c.0, &self.outcome_at(&c).0))
    }

    pub fn agrees_with(&self, context: &Context, outcome: &JointOutcome) -> bool {
        self.outcome_at(context) == *outcome
    }

    /// The local deterministic model of this grid as a support.
    pub fn support(&self, scenario: &Scenario) -> PossibilityModel {
        PossibilityModel::from_fn(scenario.clone(), |c, o| self.outcome_at(c) == *o)
            .expect("a grid has one possible outcome per context")
    }

    pub fn probability_model<S: Scalar>(&self, scenario: &Scenario) -> ProbabilityModel<S> {
        self.support(scenario)
            .as_point_distribution()
            .expect("grid supports are point distributions")
    }

    /// Flattened entry indices `(context, outcome)` the grid touches.
    pub(crate) fn entry_indices(&self, scenario: &Scenario) -> Vec<(usize, usize)> {
        scenario
            .contexts()
            .enumerate()
            .map(|(ci, c)| (ci, scenario.outcome_index(&c, &self.outcome_at(&c))))
            .collect()
    }

    /// Every grid of `scenario` in lexicographic order of the flattened
    /// assignment. Refuses more than `limit` grids.
    pub fn enumerate(scenario: &Scenario, limit: u128) -> Result<Vec<DeterministicGrid>> {
        let count = scenario.grid_count().unwrap_or(u128::MAX);
        if count > limit {
            return Err(Error::TooLarge {
                what: "deterministic grid count",
                size: count,
                limit,
            });
        }
        let counts = scenario.outcome_counts();
        let slots: Vec<(usize, usize)> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, s)| (0..s.len()).map(move |m| (i, m)))
            .collect();
        let mut current: Vec<Vec<usize>> = counts.iter().map(|s| vec![0; s.len()]).collect();
        let mut grids = Vec::with_capacity(count as usize);
        loop {
            grids.push(DeterministicGrid {
                assignment: current.clone(),
            });
            // odometer, last slot fastest
            let mut pos = slots.len();
            loop {
                if pos == 0 {
                    return Ok(grids);
                }
                pos -= 1;
                let (i, m) = slots[pos];
                current[i][m] += 1;
                if current[i][m] < counts[i][m] {
                    break;
                }
                current[i][m] = 0;
            }
        }
    }
}

/// Backtracking search for grids consistent with a support.
///
/// Variables are the (site, measurement) pairs taken measurement-major; a
/// context is tested as soon as all of its pairs are assigned, so
/// inconsistent partial grids are cut early.
struct GridSearch<'a> {
    model: &'a PossibilityModel,
    order: Vec<(usize, usize)>,
    closing: Vec<Vec<Vec<usize>>>,
    initial: Vec<Vec<usize>>,
    grid: Vec<Vec<usize>>,
}

impl<'a> GridSearch<'a> {
    fn new(model: &'a PossibilityModel, fixed: Option<(&Context, &JointOutcome)>) -> Self {
        let scenario = model.scenario();
        let counts = scenario.outcome_counts();
        let n = counts.len();
        let mut grid: Vec<Vec<usize>> = counts.iter().map(|s| vec![0; s.len()]).collect();
        let mut is_fixed: Vec<Vec<bool>> = counts.iter().map(|s| vec![false; s.len()]).collect();
        if let Some((context, outcome)) = fixed {
            for site in 0..n {
                grid[site][context.0[site]] = outcome.0[site];
                is_fixed[site][context.0[site]] = true;
            }
        }
        let max_k = counts.iter().map(Vec::len).max().unwrap_or(0);
        let order: Vec<(usize, usize)> = (0..max_k)
            .flat_map(|m| (0..n).filter(move |&i| m < counts[i].len()).map(move |i| (i, m)))
            .filter(|&(i, m)| !is_fixed[i][m])
            .collect();
        let mut position: Vec<Vec<Option<usize>>> = counts.iter().map(|s| vec![None; s.len()]).collect();
        for (p, &(i, m)) in order.iter().enumerate() {
            position[i][m] = Some(p);
        }
        let mut closing = vec![Vec::new(); order.len()];
        let mut initial = Vec::new();
        for context in scenario.contexts() {
            let last = (0..n).filter_map(|i| position[i][context.0[i]]).max();
            match last {
                Some(p) => closing[p].push(context.0),
                None => initial.push(context.0),
            }
        }
        Self {
            model,
            order,
            closing,
            initial,
            grid,
        }
    }

    fn context_ok(&self, context: &[usize]) -> bool {
        let outcome: Vec<usize> = context
            .iter()
            .enumerate()
            .map(|(site, &m)| self.grid[site][m])
            .collect();
        self.model.at(context, &outcome)
    }

    /// Calls `visit` on each consistent grid until it returns `false`.
    /// Returns `false` if the visit was cut short.
    fn run(&mut self, visit: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> bool {
        if !self.initial.iter().all(|c| self.context_ok(c)) {
            return true;
        }
        self.descend(0, visit)
    }

    fn descend(&mut self, depth: usize, visit: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.grid);
        }
        let (site, m) = self.order[depth];
        let l = self.model.scenario().outcome_count(site, m);
        for value in 0..l {
            self.grid[site][m] = value;
            if self.closing[depth].iter().all(|c| self.context_ok(c)) && !self.descend(depth + 1, visit) {
                return false;
            }
        }
        true
    }
}

/// Exhaustive oracle: a grid consistent with `model` that induces
/// `outcome` at `context`, if one exists. The lexicographically first
/// such grid (in search order) is returned.
pub fn extends_to_grid(
    model: &PossibilityModel,
    context: &Context,
    outcome: &JointOutcome,
) -> Result<Option<DeterministicGrid>> {
    if !model.possible(context, outcome)? {
        return Err(Error::NotPossible);
    }
    let mut search = GridSearch::new(model, Some((context, outcome)));
    let mut found = None;
    search.run(&mut |grid| {
        found = Some(DeterministicGrid {
            assignment: grid.to_vec(),
        });
        false
    });
    Ok(found)
}

/// Some grid consistent with `model`, if any.
pub fn first_consistent_grid(model: &PossibilityModel) -> Option<DeterministicGrid> {
    let mut search = GridSearch::new(model, None);
    let mut found = None;
    search.run(&mut |grid| {
        found = Some(DeterministicGrid {
            assignment: grid.to_vec(),
        });
        false
    });
    found
}

/// All grids consistent with `model`.
pub fn consistent_grids(model: &PossibilityModel) -> Vec<DeterministicGrid> {
    let mut search = GridSearch::new(model, None);
    let mut all = Vec::new();
    search.run(&mut |grid| {
        all.push(DeterministicGrid {
            assignment: grid.to_vec(),
        });
        true
    });
    all
}

/// Possible entries that no consistent grid passes through, in canonical
/// `(context, outcome)` order.
pub fn nonextendable_entries(model: &PossibilityModel) -> Vec<(Context, JointOutcome)> {
    let scenario = model.scenario();
    let mut covered: Vec<Vec<bool>> = (0..scenario.context_count())
        .map(|c| vec![false; model.row(c).len()])
        .collect();
    let target = model.possible_count();
    let mut count = 0;
    let contexts: Vec<Context> = scenario.contexts().collect();
    let mut search = GridSearch::new(model, None);
    search.run(&mut |grid| {
        for (ci, context) in contexts.iter().enumerate() {
            let mut oi = 0;
            for (site, &m) in context.0.iter().enumerate() {
                oi = oi * scenario.outcome_count(site, m) + grid[site][m];
            }
            if !std::mem::replace(&mut covered[ci][oi], true) {
                count += 1;
            }
        }
        count < target
    });
    model
        .possible_entries()
        .filter(|&(c, o)| !covered[c][o])
        .map(|(c, o)| {
            let context = scenario.context(c);
            let outcome = scenario.outcome(&context, o);
            (context, outcome)
        })
        .collect()
}

/// Every possible entry extends to a consistent grid.
pub fn is_local(model: &PossibilityModel) -> bool {
    nonextendable_entries(model).is_empty()
}

/// No possible entry extends to a consistent grid.
pub fn is_strongly_nonlocal(model: &PossibilityModel) -> bool {
    first_consistent_grid(model).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s222() -> Scenario {
        Scenario::uniform(2, 2, 2).unwrap()
    }

    /// Hardy support with the blanks set to possible.
    fn hardy() -> PossibilityModel {
        PossibilityModel::from_fn(s222(), |c, o| {
            !matches!(
                (c.0[0], c.0[1], o.0[0], o.0[1]),
                (0, 1, 0, 1) | (1, 0, 1, 0) | (1, 1, 0, 0)
            )
        })
        .unwrap()
    }

    #[test]
    fn hardy_entry_does_not_extend() {
        let m = hardy();
        let c = Context(vec![0, 0]);
        assert_eq!(extends_to_grid(&m, &c, &JointOutcome(vec![0, 0])).unwrap(), None);
        assert_eq!(nonextendable_entries(&m), vec![(c, JointOutcome(vec![0, 0]))]);
        assert!(!is_local(&m));
        assert!(!is_strongly_nonlocal(&m));
    }

    #[test]
    fn impossible_entry_is_an_error() {
        let m = hardy();
        let r = extends_to_grid(&m, &Context(vec![1, 1]), &JointOutcome(vec![0, 0]));
        assert_eq!(r, Err(Error::NotPossible));
    }

    #[test]
    fn grid_model_extends_to_itself() {
        let s = s222();
        let grid = DeterministicGrid::new(&s, vec![vec![0, 0], vec![0, 0]]).unwrap();
        let m = grid.support(&s);
        for (ci, oi) in m.possible_entries().collect::<Vec<_>>() {
            let c = s.context(ci);
            let o = s.outcome(&c, oi);
            assert_eq!(extends_to_grid(&m, &c, &o).unwrap(), Some(grid.clone()));
        }
        assert!(is_local(&m));
        assert!(!is_strongly_nonlocal(&m));
    }

    #[test]
    fn returned_grids_are_consistent() {
        let m = PossibilityModel::full(Scenario::new(vec![vec![2, 3], vec![3]]).unwrap());
        let c = Context(vec![1, 0]);
        let o = JointOutcome(vec![2, 1]);
        let g = extends_to_grid(&m, &c, &o).unwrap().unwrap();
        assert!(g.is_consistent_with(&m));
        assert!(g.agrees_with(&c, &o));
        assert_eq!(consistent_grids(&m).len(), 18);
    }

    #[test]
    fn pr_support_is_strong() {
        let pr = PossibilityModel::from_fn(s222(), |c, o| (o.0[0] ^ o.0[1]) == (c.0[0] & c.0[1])).unwrap();
        assert!(is_strongly_nonlocal(&pr));
        assert!(!is_local(&pr));
        assert_eq!(nonextendable_entries(&pr).len(), 8);
    }

    #[test]
    fn enumeration_respects_limit() {
        let s = Scenario::uniform(2, 3, 3).unwrap();
        assert_eq!(DeterministicGrid::enumerate(&s, 1000).unwrap().len(), 729);
        assert!(matches!(
            DeterministicGrid::enumerate(&s, 100),
            Err(Error::TooLarge { .. })
        ));
        let grids = DeterministicGrid::enumerate(&s222(), 100).unwrap();
        assert_eq!(grids[1].assignment, vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn single_measurement_sites_are_handled() {
        let s = Scenario::new(vec![vec![2], vec![2, 2]]).unwrap();
        let m = PossibilityModel::from_fn(s, |_, o| o.0[0] == o.0[1]).unwrap();
        assert!(is_local(&m));
    }
}
