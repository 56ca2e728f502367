//! Named models used as fixtures.

use crate::error::Result;
use crate::localdecide::DeterministicGrid;
use crate::quantum::ghz_rule;
use crate::scalar::Scalar;
use crate::tables::{PossibilityModel, ProbabilityModel, Scenario};
use crate::{ExactModel, Rational};

fn s222() -> Scenario {
    Scenario::uniform(2, 2, 2).expect("valid scenario")
}

/// `p(ab|xy) = 1/2` if `a ⊕ b = x·y`, else 0.
pub fn pr_box() -> ExactModel {
    ProbabilityModel::from_fn(s222(), |c, o| {
        if (o.0[0] ^ o.0[1]) == (c.0[0] & c.0[1]) {
            Rational::from_ratio(1, 2)
        } else {
            Rational::from_ratio(0, 1)
        }
    })
    .expect("PR box rows are normalised")
}

/// Support of GHZ(3) under X (0) and Y (1) measurements.
pub fn ghz_mermin_possibilistic() -> PossibilityModel {
    PossibilityModel::from_fn(Scenario::uniform(3, 2, 2).unwrap(), |c, o| {
        ghz_rule::<f64>(3, c, o).expect("binary (3,2,2) entry").0
    })
    .expect("every GHZ row has a possible outcome")
}

/// Hardy's support: zeros at `(A0,B1)` on `(0,1)`, `(A1,B0)` on `(1,0)` and
/// `(A1,B1)` on `(0,0)`; every other entry possible.
pub fn hardy_support() -> PossibilityModel {
    PossibilityModel::from_fn(s222(), |c, o| {
        !matches!(
            (c.0[0], c.0[1], o.0[0], o.0[1]),
            (0, 1, 0, 1) | (1, 0, 1, 0) | (1, 1, 0, 0)
        )
    })
    .unwrap()
}

/// The symmetric, logically but not strongly nonlocal support: perfect
/// correlation in three contexts and full support at `(A1,B0)`.
pub fn table_iv_d() -> PossibilityModel {
    PossibilityModel::from_fn(s222(), |c, o| (c.0[0], c.0[1]) == (1, 0) || o.0[0] == o.0[1]).unwrap()
}

/// Each context of [`table_iv_d`] uniform over its possible outcomes.
pub fn table_iv_d_uniform() -> ExactModel {
    ProbabilityModel::uniform_on(&table_iv_d())
}

/// The grid assigning outcome 0 to every measurement.
pub fn all_zero_grid() -> DeterministicGrid {
    DeterministicGrid::new(&s222(), vec![vec![0, 0], vec![0, 0]]).unwrap()
}

/// Point-distribution model of [`all_zero_grid`].
pub fn deterministic() -> ExactModel {
    all_zero_grid().probability_model(&s222())
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "pr-box",
    "ghz-mermin",
    "hardy-support",
    "table-iv-d",
    "table-iv-d-uniform",
    "deterministic",
];

/// A catalog entry, either a probability model or a bare support.
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogModel {
    Exact(ExactModel),
    Support(PossibilityModel),
}

pub fn by_name(name: &str) -> Result<CatalogModel> {
    Ok(match name {
        "pr-box" => CatalogModel::Exact(pr_box()),
        "ghz-mermin" => CatalogModel::Support(ghz_mermin_possibilistic()),
        "hardy-support" => CatalogModel::Support(hardy_support()),
        "table-iv-d" => CatalogModel::Support(table_iv_d()),
        "table-iv-d-uniform" => CatalogModel::Exact(table_iv_d_uniform()),
        "deterministic" => CatalogModel::Exact(deterministic()),
        other => {
            return Err(crate::error::Error::validation(
                "name",
                format!("unknown catalog model `{other}`; known: {}", NAMES.join(", ")),
            ))
        }
    })
}
