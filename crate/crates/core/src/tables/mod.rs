//! Measurement scenarios and empirical models.
//!
//! Contexts are enumerated in mixed-radix order with site 0 most
//! significant, and so are the joint outcomes of a context. Every table in
//! the crate is stored as one row per context in that order.

mod model;
mod relabel;
mod signalling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use model::{EmpiricalModel, PossibilityModel, ProbabilityModel};
pub use relabel::{are_isomorphic, canonical_support, permutations, Relabelling};
pub use signalling::{is_no_signalling, is_no_signalling_probabilistic};

/// The shape of a Bell scenario: `outcomes[site][measurement]` is the
/// number of outcomes of that measurement.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Scenario {
    outcomes: Vec<Vec<usize>>,
}

impl Scenario {
    pub fn new(outcomes: Vec<Vec<usize>>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidScenario("no sites".into()));
        }
        for (site, counts) in outcomes.iter().enumerate() {
            if counts.is_empty() {
                return Err(Error::InvalidScenario(format!("site {site} has no measurements")));
            }
            if let Some(m) = counts.iter().position(|&l| l == 0) {
                return Err(Error::InvalidScenario(format!(
                    "measurement {m} at site {site} has no outcomes"
                )));
            }
        }
        Ok(Self { outcomes })
    }

    /// The uniform `(n, k, l)` scenario.
    pub fn uniform(sites: usize, measurements: usize, outcomes: usize) -> Result<Self> {
        Self::new(vec![vec![outcomes; measurements]; sites])
    }

    pub fn sites(&self) -> usize {
        self.outcomes.len()
    }

    pub fn measurements(&self, site: usize) -> usize {
        self.outcomes[site].len()
    }

    pub fn measurement_counts(&self) -> Vec<usize> {
        self.outcomes.iter().map(Vec::len).collect()
    }

    pub fn outcome_count(&self, site: usize, measurement: usize) -> usize {
        self.outcomes[site][measurement]
    }

    pub fn outcome_counts(&self) -> &[Vec<usize>] {
        &self.outcomes
    }

    /// `(n, k, l)` when every site has `k` measurements with `l` outcomes.
    pub fn uniform_shape(&self) -> Option<(usize, usize, usize)> {
        let k = self.outcomes[0].len();
        let l = self.outcomes[0][0];
        self.outcomes
            .iter()
            .all(|site| site.len() == k && site.iter().all(|&c| c == l))
            .then_some((self.sites(), k, l))
    }

    /// Two sites, two measurements each, any outcome counts.
    pub fn is_bipartite_two_setting(&self) -> bool {
        self.sites() == 2 && self.outcomes.iter().all(|s| s.len() == 2)
    }

    /// Every measurement has exactly two outcomes.
    pub fn is_binary(&self) -> bool {
        self.outcomes.iter().flatten().all(|&l| l == 2)
    }

    pub fn context_count(&self) -> usize {
        self.outcomes.iter().map(Vec::len).product()
    }

    pub fn context_index(&self, context: &Context) -> usize {
        context
            .0
            .iter()
            .zip(&self.outcomes)
            .fold(0, |acc, (&m, site)| acc * site.len() + m)
    }

    pub fn context(&self, mut index: usize) -> Context {
        let mut choice = vec![0; self.sites()];
        for (site, counts) in self.outcomes.iter().enumerate().rev() {
            choice[site] = index % counts.len();
            index /= counts.len();
        }
        Context(choice)
    }

    pub fn contexts(&self) -> impl Iterator<Item = Context> + '_ {
        (0..self.context_count()).map(|i| self.context(i))
    }

    pub fn joint_outcome_count(&self, context: &Context) -> usize {
        context
            .0
            .iter()
            .enumerate()
            .map(|(site, &m)| self.outcomes[site][m])
            .product()
    }

    pub fn outcome_index(&self, context: &Context, outcome: &JointOutcome) -> usize {
        outcome
            .0
            .iter()
            .enumerate()
            .fold(0, |acc, (site, &o)| acc * self.outcomes[site][context.0[site]] + o)
    }

    pub fn outcome(&self, context: &Context, mut index: usize) -> JointOutcome {
        let mut out = vec![0; self.sites()];
        for site in (0..self.sites()).rev() {
            let l = self.outcomes[site][context.0[site]];
            out[site] = index % l;
            index /= l;
        }
        JointOutcome(out)
    }

    pub fn check_context(&self, context: &Context) -> Result<()> {
        if context.0.len() != self.sites() {
            return Err(Error::ShapeMismatch(format!(
                "context {context} has {} entries for {} sites",
                context.0.len(),
                self.sites()
            )));
        }
        for (site, &m) in context.0.iter().enumerate() {
            if m >= self.measurements(site) {
                return Err(Error::ShapeMismatch(format!(
                    "measurement {m} out of range at site {site}"
                )));
            }
        }
        Ok(())
    }

    pub fn check_outcome(&self, context: &Context, outcome: &JointOutcome) -> Result<()> {
        self.check_context(context)?;
        if outcome.0.len() != self.sites() {
            return Err(Error::ShapeMismatch(format!(
                "outcome {outcome} has {} entries for {} sites",
                outcome.0.len(),
                self.sites()
            )));
        }
        for (site, &o) in outcome.0.iter().enumerate() {
            if o >= self.outcome_count(site, context.0[site]) {
                return Err(Error::ShapeMismatch(format!(
                    "outcome {o} out of range at site {site}, measurement {}",
                    context.0[site]
                )));
            }
        }
        Ok(())
    }

    /// Number of deterministic grids, `None` on overflow.
    pub fn grid_count(&self) -> Option<u128> {
        self.outcomes
            .iter()
            .flatten()
            .try_fold(1u128, |acc, &l| acc.checked_mul(l as u128))
    }
}

impl TryFrom<Vec<Vec<usize>>> for Scenario {
    type Error = Error;

    fn try_from(value: Vec<Vec<usize>>) -> Result<Self> {
        Scenario::new(value)
    }
}

impl From<Scenario> for Vec<Vec<usize>> {
    fn from(value: Scenario) -> Self {
        value.outcomes
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.uniform_shape() {
            Some((n, k, l)) => write!(f, "({n},{k},{l})"),
            None => write!(f, "{:?}", self.outcomes),
        }
    }
}

/// One measurement choice per site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Context(pub Vec<usize>);

/// One outcome per site, interpreted relative to a [`Context`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointOutcome(pub Vec<usize>);

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.0))
    }
}

impl fmt::Display for JointOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.0))
    }
}

impl FromStr for Context {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::validation("tables", format!("bad context key `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Context)
    }
}

impl From<Vec<usize>> for Context {
    fn from(value: Vec<usize>) -> Self {
        Context(value)
    }
}

impl From<Vec<usize>> for JointOutcome {
    fn from(value: Vec<usize>) -> Self {
        JointOutcome(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_counts() {
        assert!(Scenario::new(vec![]).is_err());
        assert!(Scenario::new(vec![vec![]]).is_err());
        assert!(Scenario::new(vec![vec![2, 0]]).is_err());
    }

    #[test]
    fn uniform_shorthand() {
        let s = Scenario::uniform(2, 3, 4).unwrap();
        assert_eq!(s.uniform_shape(), Some((2, 3, 4)));
        let mixed = Scenario::new(vec![vec![2, 3], vec![2, 2]]).unwrap();
        assert_eq!(mixed.uniform_shape(), None);
        let ragged = Scenario::new(vec![vec![2, 2], vec![2]]).unwrap();
        assert_eq!(ragged.uniform_shape(), None);
    }

    #[test]
    fn row_major_site_zero_most_significant() {
        let s = Scenario::new(vec![vec![2, 3], vec![2, 2]]).unwrap();
        assert_eq!(s.context_count(), 4);
        assert_eq!(s.context(1), Context(vec![0, 1]));
        assert_eq!(s.context(2), Context(vec![1, 0]));
        let c = Context(vec![1, 0]);
        assert_eq!(s.joint_outcome_count(&c), 6);
        assert_eq!(s.outcome(&c, 5), JointOutcome(vec![2, 1]));
        assert_eq!(s.outcome_index(&c, &JointOutcome(vec![1, 1])), 3);
        for i in 0..s.context_count() {
            let ctx = s.context(i);
            assert_eq!(s.context_index(&ctx), i);
            for o in 0..s.joint_outcome_count(&ctx) {
                assert_eq!(s.outcome_index(&ctx, &s.outcome(&ctx, o)), o);
            }
        }
    }

    #[test]
    fn context_key_parsing() {
        assert_eq!("0,1,1".parse::<Context>().unwrap(), Context(vec![0, 1, 1]));
        assert!("0,x".parse::<Context>().is_err());
        assert_eq!(Context(vec![1, 0]).to_string(), "1,0");
    }

    #[test]
    fn range_checks() {
        let s = Scenario::uniform(2, 2, 2).unwrap();
        assert!(s.check_context(&Context(vec![0, 2])).is_err());
        assert!(s.check_context(&Context(vec![0])).is_err());
        assert!(s
            .check_outcome(&Context(vec![0, 1]), &JointOutcome(vec![1, 2]))
            .is_err());
        assert_eq!(s.grid_count(), Some(16));
    }
}
