//! Hardy paradoxes: coarse-grained bipartite witnesses, `n`-partite
//! witnesses, paradoxical and certainty probabilities, and the Chen pattern.

mod chen;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tables::{Context, JointOutcome, PossibilityModel, ProbabilityModel, Relabelling, Scenario};

pub use chen::{chen_check, chen_generate, ChenPattern};

/// A coarse-grained Hardy configuration in a bipartite model.
///
/// The base entry `(a, b)` sits at `(A_base, B_base)`. Every Alice outcome
/// compatible with `b` at `A_alt` and every Bob outcome compatible with `a`
/// at `B_alt` jointly fail at `(A_alt, B_alt)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoarseHardyWitness {
    /// `(base, alternate)` measurement at Alice.
    pub alice_pair: (usize, usize),
    /// `(base, alternate)` measurement at Bob.
    pub bob_pair: (usize, usize),
    pub base_outcome: (usize, usize),
    /// `U_A`: Alice outcomes possible with `b` at `(A_alt, B_base)`.
    pub blocked_alice: Vec<usize>,
    /// `U_B`: Bob outcomes possible with `a` at `(A_base, B_alt)`.
    pub blocked_bob: Vec<usize>,
}

impl CoarseHardyWitness {
    pub fn base_context(&self) -> Context {
        Context(vec![self.alice_pair.0, self.bob_pair.0])
    }

    pub fn base_joint_outcome(&self) -> JointOutcome {
        JointOutcome(vec![self.base_outcome.0, self.base_outcome.1])
    }

    /// `true` iff the witness holds in `model`.
    pub fn verify(&self, model: &PossibilityModel) -> bool {
        let s = model.scenario();
        s.sites() == 2
            && self.alice_pair.0 != self.alice_pair.1
            && self.bob_pair.0 != self.bob_pair.1
            && self.alice_pair.0.max(self.alice_pair.1) < s.measurements(0)
            && self.bob_pair.0.max(self.bob_pair.1) < s.measurements(1)
            && self.base_outcome.0 < s.outcome_count(0, self.alice_pair.0)
            && self.base_outcome.1 < s.outcome_count(1, self.bob_pair.0)
            && coarse_at(model, self.alice_pair, self.bob_pair, self.base_outcome).as_ref()
                == Some(self)
    }

    /// The same witness expressed in the coordinates of `r`'s image.
    pub fn relabel(&self, r: &Relabelling) -> CoarseHardyWitness {
        let site = |i: usize| r.site_map()[i];
        let m = |i: usize, x: usize| r.measurement_map(i)[x];
        let o = |i: usize, x: usize, v: usize| r.outcome_map(i, x)[v];
        let alice_pair = (m(0, self.alice_pair.0), m(0, self.alice_pair.1));
        let bob_pair = (m(1, self.bob_pair.0), m(1, self.bob_pair.1));
        let base = (
            o(0, self.alice_pair.0, self.base_outcome.0),
            o(1, self.bob_pair.0, self.base_outcome.1),
        );
        let mut blocked_alice: Vec<usize> =
            self.blocked_alice.iter().map(|&v| o(0, self.alice_pair.1, v)).collect();
        let mut blocked_bob: Vec<usize> =
            self.blocked_bob.iter().map(|&v| o(1, self.bob_pair.1, v)).collect();
        blocked_alice.sort_unstable();
        blocked_bob.sort_unstable();
        if site(0) == 0 {
            CoarseHardyWitness {
                alice_pair,
                bob_pair,
                base_outcome: base,
                blocked_alice,
                blocked_bob,
            }
        } else {
            CoarseHardyWitness {
                alice_pair: bob_pair,
                bob_pair: alice_pair,
                base_outcome: (base.1, base.0),
                blocked_alice: blocked_bob,
                blocked_bob: blocked_alice,
            }
        }
    }

    fn sort_key(&self) -> (Context, JointOutcome, usize, usize) {
        (
            self.base_context(),
            self.base_joint_outcome(),
            self.alice_pair.1,
            self.bob_pair.1,
        )
    }
}

/// An `n`-partite Hardy configuration in an `(n,2,2)` model.
///
/// `M(o|a)` is possible; switching any single site `i` to its alternate
/// measurement makes `o` with `o_i` replaced by `u_i` impossible; and `¬u`
/// is impossible in the all-alternate context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NPartiteHardyWitness {
    pub base_context: Context,
    pub base_outcome: JointOutcome,
    /// Designated outcome of the alternate measurement at each site.
    pub flip_outcomes: Vec<usize>,
}

impl NPartiteHardyWitness {
    pub fn verify(&self, model: &PossibilityModel) -> bool {
        let s = model.scenario();
        is_n22(s)
            && s.check_context(&self.base_context).is_ok()
            && s.check_outcome(&self.base_context, &self.base_outcome).is_ok()
            && self.flip_outcomes.len() == s.sites()
            && self.flip_outcomes.iter().all(|&u| u < 2)
            && npartite_holds(model, &self.base_context.0, &self.base_outcome.0, &self.flip_outcomes)
    }

    pub fn relabel(&self, r: &Relabelling) -> NPartiteHardyWitness {
        let n = self.base_context.0.len();
        let mut flips = vec![0; n];
        for (i, &u) in self.flip_outcomes.iter().enumerate() {
            let alt = 1 - self.base_context.0[i];
            flips[r.site_map()[i]] = r.outcome_map(i, alt)[u];
        }
        NPartiteHardyWitness {
            base_context: r.map_context(&self.base_context),
            base_outcome: r.map_outcome(&self.base_context, &self.base_outcome),
            flip_outcomes: flips,
        }
    }
}

/// Either kind of Hardy witness, as reported by [`find_witnesses`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HardyWitness {
    Coarse(CoarseHardyWitness),
    NPartite(NPartiteHardyWitness),
}

impl HardyWitness {
    pub fn base_context(&self) -> Context {
        match self {
            HardyWitness::Coarse(w) => w.base_context(),
            HardyWitness::NPartite(w) => w.base_context.clone(),
        }
    }

    pub fn base_outcome(&self) -> JointOutcome {
        match self {
            HardyWitness::Coarse(w) => w.base_joint_outcome(),
            HardyWitness::NPartite(w) => w.base_outcome.clone(),
        }
    }

    pub fn verify(&self, model: &PossibilityModel) -> bool {
        match self {
            HardyWitness::Coarse(w) => w.verify(model),
            HardyWitness::NPartite(w) => w.verify(model),
        }
    }

    pub fn relabel(&self, r: &Relabelling) -> HardyWitness {
        match self {
            HardyWitness::Coarse(w) => HardyWitness::Coarse(w.relabel(r)),
            HardyWitness::NPartite(w) => HardyWitness::NPartite(w.relabel(r)),
        }
    }
}

fn is_n22(s: &Scenario) -> bool {
    s.is_binary() && (0..s.sites()).all(|i| s.measurements(i) == 2)
}

pub(crate) fn coarse_at(
    model: &PossibilityModel,
    (x, x2): (usize, usize),
    (y, y2): (usize, usize),
    (a, b): (usize, usize),
) -> Option<CoarseHardyWitness> {
    if !model.at(&[x, y], &[a, b]) {
        return None;
    }
    let s = model.scenario();
    let blocked_alice: Vec<usize> = (0..s.outcome_count(0, x2))
        .filter(|&a2| model.at(&[x2, y], &[a2, b]))
        .collect();
    let blocked_bob: Vec<usize> = (0..s.outcome_count(1, y2))
        .filter(|&b2| model.at(&[x, y2], &[a, b2]))
        .collect();
    let paradox = blocked_alice
        .iter()
        .all(|&a2| blocked_bob.iter().all(|&b2| !model.at(&[x2, y2], &[a2, b2])));
    paradox.then_some(CoarseHardyWitness {
        alice_pair: (x, x2),
        bob_pair: (y, y2),
        base_outcome: (a, b),
        blocked_alice,
        blocked_bob,
    })
}

/// All coarse-grained Hardy witnesses of a bipartite model, over every
/// ordered choice of base and alternate measurement at each site.
pub fn find_hardy_witnesses(model: &PossibilityModel) -> Result<Vec<CoarseHardyWitness>> {
    let s = model.scenario();
    if s.sites() != 2 {
        return Err(Error::ShapeMismatch(format!("expected two sites, got {s}")));
    }
    let mut out = Vec::new();
    for x in 0..s.measurements(0) {
        for y in 0..s.measurements(1) {
            for a in 0..s.outcome_count(0, x) {
                for b in 0..s.outcome_count(1, y) {
                    if !model.at(&[x, y], &[a, b]) {
                        continue;
                    }
                    for x2 in (0..s.measurements(0)).filter(|&v| v != x) {
                        for y2 in (0..s.measurements(1)).filter(|&v| v != y) {
                            out.extend(coarse_at(model, (x, x2), (y, y2), (a, b)));
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(CoarseHardyWitness::sort_key);
    Ok(out)
}

fn npartite_holds(model: &PossibilityModel, a: &[usize], o: &[usize], u: &[usize]) -> bool {
    if !model.at(a, o) {
        return false;
    }
    let mut ctx = a.to_vec();
    let mut out = o.to_vec();
    for i in 0..a.len() {
        ctx[i] = 1 - a[i];
        out[i] = u[i];
        let blocked = !model.at(&ctx, &out);
        ctx[i] = a[i];
        out[i] = o[i];
        if !blocked {
            return false;
        }
    }
    let alt: Vec<usize> = a.iter().map(|&m| 1 - m).collect();
    let neg: Vec<usize> = u.iter().map(|&v| 1 - v).collect();
    !model.at(&alt, &neg)
}

/// All `n`-partite Hardy witnesses of an `(n,2,2)` model.
pub fn find_npartite_witnesses(model: &PossibilityModel) -> Result<Vec<NPartiteHardyWitness>> {
    let s = model.scenario();
    if !is_n22(s) {
        return Err(Error::ShapeMismatch(format!(
            "expected two binary measurements per site, got {s}"
        )));
    }
    let n = s.sites();
    let mut out = Vec::new();
    for (ci, oi) in model.possible_entries() {
        let a = s.context(ci).0;
        let o = s.outcome(&Context(a.clone()), oi).0;
        // Each single-site condition constrains only u_i.
        let mut choices: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut ctx = a.clone();
        let mut out_i = o.clone();
        for i in 0..n {
            ctx[i] = 1 - a[i];
            let allowed: Vec<usize> = (0..2)
                .filter(|&v| {
                    out_i[i] = v;
                    !model.at(&ctx, &out_i)
                })
                .collect();
            ctx[i] = a[i];
            out_i[i] = o[i];
            choices.push(allowed);
        }
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let alt: Vec<usize> = a.iter().map(|&m| 1 - m).collect();
        let mut idx = vec![0usize; n];
        'odometer: loop {
            let u: Vec<usize> = (0..n).map(|i| choices[i][idx[i]]).collect();
            let neg: Vec<usize> = u.iter().map(|&v| 1 - v).collect();
            if !model.at(&alt, &neg) {
                out.push(NPartiteHardyWitness {
                    base_context: Context(a.clone()),
                    base_outcome: JointOutcome(o.clone()),
                    flip_outcomes: u,
                });
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break 'odometer;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < choices[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }
    out.sort_by(|x, y| {
        (&x.base_context, &x.base_outcome, &x.flip_outcomes)
            .cmp(&(&y.base_context, &y.base_outcome, &y.flip_outcomes))
    });
    Ok(out)
}

/// Witnesses of the kind matching the scenario: coarse for two sites,
/// `n`-partite for `(n,2,2)` with `n > 2`, none otherwise.
pub fn find_witnesses(model: &PossibilityModel) -> Vec<HardyWitness> {
    let s = model.scenario();
    if s.sites() == 2 {
        find_hardy_witnesses(model)
            .unwrap_or_default()
            .into_iter()
            .map(HardyWitness::Coarse)
            .collect()
    } else if s.sites() > 2 && is_n22(s) {
        find_npartite_witnesses(model)
            .unwrap_or_default()
            .into_iter()
            .map(HardyWitness::NPartite)
            .collect()
    } else {
        Vec::new()
    }
}

/// `P(base outcome | base context)` for a witness of `collapse(P, epsilon)`.
pub fn paradoxical_probability<S: Scalar>(
    model: &ProbabilityModel<S>,
    witness: &HardyWitness,
    epsilon: f64,
) -> Result<S> {
    if !witness.verify(&model.collapse(epsilon)) {
        return Err(Error::InvalidWitness(format!(
            "no witness with base {} at context {}",
            witness.base_outcome(),
            witness.base_context()
        )));
    }
    model.prob(&witness.base_context(), &witness.base_outcome())
}

/// Entries `(context index, outcome index)` that are the base of some witness.
pub fn witness_bases(witnesses: &[HardyWitness], scenario: &Scenario) -> BTreeSet<(usize, usize)> {
    witnesses
        .iter()
        .map(|w| {
            let c = w.base_context();
            let o = w.base_outcome();
            (scenario.context_index(&c), scenario.outcome_index(&c, &o))
        })
        .collect()
}

/// Probability that the outcome obtained at `context` witnesses some Hardy
/// paradox. Each outcome is counted once.
pub fn certainty_probability<S: Scalar>(
    model: &ProbabilityModel<S>,
    context: &Context,
    epsilon: f64,
) -> Result<S> {
    let s = model.scenario();
    s.check_context(context)?;
    let witnesses = find_witnesses(&model.collapse(epsilon));
    let ci = s.context_index(context);
    Ok(certainty_from_bases(model, ci, &witness_bases(&witnesses, s)))
}

pub(crate) fn certainty_from_bases<S: Scalar>(
    model: &ProbabilityModel<S>,
    context_index: usize,
    bases: &BTreeSet<(usize, usize)>,
) -> S {
    bases
        .range((context_index, 0)..(context_index + 1, 0))
        .fold(S::zero(), |acc, &(_, oi)| acc + model.get(context_index, oi).clone())
}

/// Certainty probability of every context, in context order.
pub fn certainty_profile<S: Scalar>(
    model: &ProbabilityModel<S>,
    witnesses: &[HardyWitness],
) -> Vec<S> {
    let s = model.scenario();
    let bases = witness_bases(witnesses, s);
    (0..s.context_count())
        .map(|ci| certainty_from_bases(model, ci, &bases))
        .collect()
}
