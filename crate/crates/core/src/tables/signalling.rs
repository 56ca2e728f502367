use std::collections::HashMap;

use super::{PossibilityModel, ProbabilityModel, Scenario};
use crate::scalar::Scalar;

/// Index of the marginal outcome over the sites in `mask`.
fn marginal_index(scenario: &Scenario, mask: u64, context: &[usize], outcome: &[usize]) -> usize {
    (0..scenario.sites())
        .filter(|i| mask >> i & 1 == 1)
        .fold(0, |acc, i| acc * scenario.outcome_count(i, context[i]) + outcome[i])
}

fn marginal_size(scenario: &Scenario, mask: u64, context: &[usize]) -> usize {
    (0..scenario.sites())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| scenario.outcome_count(i, context[i]))
        .product()
}

fn restricted(mask: u64, context: &[usize]) -> Vec<usize> {
    context
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &m)| m)
        .collect()
}

/// Compares marginals over every proper nonempty subset of sites across
/// all choices of the measurements outside it.
fn check_marginals<T, F>(scenario: &Scenario, mut marginal: impl FnMut(u64, usize) -> Vec<T>, same: F) -> bool
where
    F: Fn(&[T], &[T]) -> bool,
{
    let n = scenario.sites();
    if n < 2 {
        return true;
    }
    for mask in 1..(1u64 << n) - 1 {
        let mut seen: HashMap<Vec<usize>, Vec<T>> = HashMap::new();
        for ci in 0..scenario.context_count() {
            let context = scenario.context(ci);
            let key = restricted(mask, &context.0);
            let m = marginal(mask, ci);
            match seen.get(&key) {
                Some(prev) if !same(prev, &m) => return false,
                Some(_) => {}
                None => {
                    seen.insert(key, m);
                }
            }
        }
    }
    true
}

/// Possibilistic no-signalling: the support of every marginal is
/// independent of the measurements chosen at the other sites.
pub fn is_no_signalling(model: &PossibilityModel) -> bool {
    let scenario = model.scenario();
    check_marginals(
        scenario,
        |mask, ci| {
            let context = scenario.context(ci);
            let mut support = vec![false; marginal_size(scenario, mask, &context.0)];
            for (oi, &possible) in model.row(ci).iter().enumerate() {
                if possible {
                    let outcome = scenario.outcome(&context, oi);
                    support[marginal_index(scenario, mask, &context.0, &outcome.0)] = true;
                }
            }
            support
        },
        |a, b| a == b,
    )
}

/// Probabilistic no-signalling: marginal distributions agree within `tol`.
pub fn is_no_signalling_probabilistic<S: Scalar>(model: &ProbabilityModel<S>, tol: f64) -> bool {
    let scenario = model.scenario();
    let tol = S::tolerance(tol);
    check_marginals(
        scenario,
        |mask, ci| {
            let context = scenario.context(ci);
            let mut dist = vec![S::zero(); marginal_size(scenario, mask, &context.0)];
            for (oi, p) in model.row(ci).iter().enumerate() {
                let outcome = scenario.outcome(&context, oi);
                let idx = marginal_index(scenario, mask, &context.0, &outcome.0);
                dist[idx] = dist[idx].clone() + p.clone();
            }
            dist
        },
        |a, b| a.iter().zip(b).all(|(x, y)| x.abs_diff_le(y, &tol)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn s222() -> Scenario {
        Scenario::uniform(2, 2, 2).unwrap()
    }

    #[test]
    fn pr_box_is_no_signalling() {
        let pr = ProbabilityModel::<BigRational>::from_fn(s222(), |c, o| {
            if (o.0[0] ^ o.0[1]) == (c.0[0] & c.0[1]) {
                BigRational::from_ratio(1, 2)
            } else {
                BigRational::from_ratio(0, 1)
            }
        })
        .unwrap();
        assert!(is_no_signalling_probabilistic(&pr, 0.0));
        assert!(is_no_signalling(&pr.collapse(0.0)));
    }

    #[test]
    fn detects_signalling_support() {
        // p(00|A0B0) = 1 and p(11|A0B1) = 1.
        let m = PossibilityModel::from_fn(s222(), |c, o| match (c.0[0], c.0[1]) {
            (0, 0) => o.0 == [0, 0],
            (0, 1) => o.0 == [1, 1],
            _ => true,
        })
        .unwrap();
        assert!(!is_no_signalling(&m));
        let p = m.as_point_distribution::<f64>();
        assert!(p.is_err(), "full-support rows are not point distributions");
    }

    #[test]
    fn detects_probabilistic_signalling() {
        let m = ProbabilityModel::<f64>::from_fn(s222(), |c, o| match c.0[1] {
            0 => [0.5, 0.0, 0.0, 0.5][o.0[0] * 2 + o.0[1]],
            _ => [0.6, 0.0, 0.0, 0.4][o.0[0] * 2 + o.0[1]],
        })
        .unwrap();
        assert!(!is_no_signalling_probabilistic(&m, 1e-9));
        assert!(is_no_signalling(&m.collapse(1e-9)));
    }

    #[test]
    fn tripartite_checks_pairs_too() {
        // Single-site marginals are uniform, but the pair (0,1) marginal
        // depends on site 2's setting.
        let s = Scenario::uniform(3, 2, 2).unwrap();
        let m = PossibilityModel::from_fn(s, |c, o| {
            if c.0[2] == 0 {
                o.0[0] == o.0[1]
            } else {
                o.0[0] != o.0[1]
            }
        })
        .unwrap();
        for ci in 0..m.scenario().context_count() {
            assert_eq!(m.row(ci).iter().filter(|&&b| b).count(), 4);
        }
        assert!(!is_no_signalling(&m));
    }
}
