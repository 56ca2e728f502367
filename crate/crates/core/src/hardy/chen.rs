use serde::{Deserialize, Serialize};

use super::{coarse_at, CoarseHardyWitness};
use crate::error::{Error, Result};
use crate::tables::{PossibilityModel, Relabelling, Scenario};

/// Star cells `(i, j)`, `i < j`, of the `(A_0, B_0)` block of a Chen-pattern
/// `(2,2,l)` model. Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChenPattern {
    pub l: usize,
    pub stars: Vec<(usize, usize)>,
}

/// Zero pattern with measurements `0, 1` at each site in the roles
/// `A_1, A_2` and `B_3, B_4`; `r` is Alice's outcome, `c` Bob's.
fn forced_zero(x: usize, y: usize, r: usize, c: usize) -> bool {
    match (x, y) {
        (0, 1) | (1, 0) => c > r,
        (1, 1) => r > c,
        _ => false,
    }
}

fn require_22ll(scenario: &Scenario) -> Result<usize> {
    match scenario.uniform_shape() {
        Some((2, 2, l)) => Ok(l),
        _ => Err(Error::ShapeMismatch(format!(
            "expected a (2,2,l) scenario with equal outcome counts, got {scenario}"
        ))),
    }
}

/// A `(2,2,l)` model with the Chen zero pattern. The chosen stars are
/// possible, the remaining upper-triangle cells of `(A_0, B_0)` impossible,
/// and every other unconstrained entry possible.
pub fn chen_generate(l: usize, stars: &[(usize, usize)]) -> Result<PossibilityModel> {
    if l < 2 {
        return Err(Error::InvalidScenario(format!("need l >= 2, got {l}")));
    }
    if let Some(&(i, j)) = stars.iter().find(|&&(i, j)| i >= j || j >= l) {
        return Err(Error::InvalidStars(format!(
            "({i},{j}) is not strictly above the diagonal of an {l}x{l} block"
        )));
    }
    let scenario = Scenario::uniform(2, 2, l)?;
    PossibilityModel::from_fn(scenario, |c, o| {
        let (x, y, r, col) = (c.0[0], c.0[1], o.0[0], o.0[1]);
        if (x, y) == (0, 0) && col > r {
            stars.contains(&(r, col))
        } else {
            !forced_zero(x, y, r, col)
        }
    })
}

/// Role assignments tried by [`chen_check`]: either measurement of each site
/// as the first, with or without reversing each site's outcome order.
fn role_relabellings(scenario: &Scenario, l: usize) -> Vec<Relabelling> {
    let reversed: Vec<usize> = (0..l).rev().collect();
    let mut out = Vec::new();
    for swap_a in [false, true] {
        for swap_b in [false, true] {
            for rev_a in [false, true] {
                for rev_b in [false, true] {
                    let mut r = Relabelling::identity(scenario);
                    for (site, swap, rev) in [(0, swap_a, rev_a), (1, swap_b, rev_b)] {
                        if swap {
                            r = r.with_measurement_permutation(site, vec![1, 0]).unwrap();
                        }
                        if rev {
                            for m in 0..2 {
                                r = r.with_outcome_permutation(site, m, reversed.clone()).unwrap();
                            }
                        }
                    }
                    out.push(r);
                }
            }
        }
    }
    out
}

/// Looks for the Chen zero pattern under the measurement-role and
/// outcome-order relabellings. Returns the pattern's possible stars and a
/// verified coarse witness for each, in the coordinates of `model`.
pub fn chen_check(model: &PossibilityModel) -> Result<Option<(ChenPattern, Vec<CoarseHardyWitness>)>> {
    let scenario = model.scenario();
    let l = require_22ll(scenario)?;
    for r in role_relabellings(scenario, l) {
        let m = r.apply(model)?;
        let holds = (0..2).all(|x| {
            (0..2).all(|y| {
                (0..l).all(|a| (0..l).all(|b| !forced_zero(x, y, a, b) || !m.at(&[x, y], &[a, b])))
            })
        });
        if !holds {
            continue;
        }
        let stars: Vec<(usize, usize)> = (0..l)
            .flat_map(|i| (i + 1..l).map(move |j| (i, j)))
            .filter(|&(i, j)| m.at(&[0, 0], &[i, j]))
            .collect();
        let back = r.inverse();
        let mut witnesses = Vec::with_capacity(stars.len());
        for &star in &stars {
            let w = coarse_at(&m, (0, 1), (0, 1), star)
                .expect("every possible star of a Chen pattern is a Hardy base")
                .relabel(&back);
            debug_assert!(w.verify(model));
            witnesses.push(w);
        }
        return Ok(Some((ChenPattern { l, stars }, witnesses)));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::find_hardy_witnesses;
    use crate::localdecide::{decide_22l, SupportVerdict};

    fn all_stars(l: usize) -> Vec<(usize, usize)> {
        (0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j))).collect()
    }

    #[test]
    fn generated_models_pass_the_check() {
        for l in 2..=8 {
            let m = chen_generate(l, &all_stars(l)).unwrap();
            let (pattern, witnesses) = chen_check(&m).unwrap().unwrap();
            assert_eq!(pattern.stars, all_stars(l));
            assert_eq!(witnesses.len(), l * (l - 1) / 2);
            assert!(witnesses.iter().all(|w| w.verify(&m)));
        }
    }

    #[test]
    fn l3_all_stars() {
        let m = chen_generate(3, &all_stars(3)).unwrap();
        let (pattern, witnesses) = chen_check(&m).unwrap().unwrap();
        assert_eq!(pattern.stars.len(), 3);
        let found = find_hardy_witnesses(&m).unwrap();
        assert!(witnesses.iter().all(|w| found.contains(w)));
    }

    #[test]
    fn no_stars_is_local() {
        let m = chen_generate(3, &[]).unwrap();
        assert_eq!(decide_22l(&m).unwrap().level, SupportVerdict::Local);
        let (pattern, witnesses) = chen_check(&m).unwrap().unwrap();
        assert!(pattern.stars.is_empty() && witnesses.is_empty());
    }

    #[test]
    fn l2_single_star_is_a_hardy_support() {
        let m = chen_generate(2, &[(0, 1)]).unwrap();
        let w = find_hardy_witnesses(&m).unwrap();
        assert!(!w.is_empty());
        assert_eq!(m.possible_count(), 13);
    }

    #[test]
    fn l4_has_at_least_six_witnesses() {
        let m = chen_generate(4, &all_stars(4)).unwrap();
        assert!(find_hardy_witnesses(&m).unwrap().len() >= 6);
    }

    #[test]
    fn full_support_has_no_pattern() {
        let m = PossibilityModel::full(Scenario::uniform(2, 2, 3).unwrap());
        assert_eq!(chen_check(&m).unwrap(), None);
    }

    #[test]
    fn stars_must_be_above_the_diagonal() {
        for star in [(1, 1), (2, 1), (0, 3)] {
            assert!(matches!(chen_generate(3, &[star]), Err(Error::InvalidStars(_))));
        }
    }

    #[test]
    fn pattern_is_found_after_relabelling() {
        let m = chen_generate(4, &[(0, 2), (1, 3)]).unwrap();
        let r = Relabelling::identity(m.scenario())
            .with_measurement_permutation(0, vec![1, 0])
            .unwrap();
        let image = r.apply(&m).unwrap();
        let (pattern, witnesses) = chen_check(&image).unwrap().unwrap();
        assert_eq!(pattern.stars, vec![(0, 2), (1, 3)]);
        assert!(witnesses.iter().all(|w| w.verify(&image)));
    }

    #[test]
    fn wrong_shape() {
        let m = PossibilityModel::full(Scenario::uniform(2, 3, 2).unwrap());
        assert!(matches!(chen_check(&m), Err(Error::ShapeMismatch(_))));
    }
}
