use super::{Context, EmpiricalModel, JointOutcome, PossibilityModel, Scenario};
use crate::error::{Error, Result};

/// A relabelling of sites, measurements and outcomes.
///
/// All maps send original labels to new labels: original site `i` becomes
/// site `sites[i]`, its measurement `m` becomes `measurements[i][m]` and
/// outcome `o` of that measurement becomes `outcomes[i][m][o]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relabelling {
    sites: Vec<usize>,
    measurements: Vec<Vec<usize>>,
    outcomes: Vec<Vec<Vec<usize>>>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut all = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return all;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        all.push(current.clone());
    }
}

impl Relabelling {
    pub fn new(
        sites: Vec<usize>,
        measurements: Vec<Vec<usize>>,
        outcomes: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let bad = |msg: &str| Err(Error::ShapeMismatch(msg.to_string()));
        if !is_permutation(&sites) {
            return bad("site map is not a permutation");
        }
        if measurements.len() != sites.len() || outcomes.len() != sites.len() {
            return bad("per-site maps do not match the site count");
        }
        for (m, o) in measurements.iter().zip(&outcomes) {
            if !is_permutation(m) || o.len() != m.len() {
                return bad("measurement map is not a permutation");
            }
            if !o.iter().all(|p| is_permutation(p)) {
                return bad("outcome map is not a permutation");
            }
        }
        Ok(Self {
            sites,
            measurements,
            outcomes,
        })
    }

    pub fn identity(scenario: &Scenario) -> Self {
        let counts = scenario.outcome_counts();
        Self {
            sites: (0..counts.len()).collect(),
            measurements: counts.iter().map(|s| (0..s.len()).collect()).collect(),
            outcomes: counts
                .iter()
                .map(|s| s.iter().map(|&l| (0..l).collect()).collect())
                .collect(),
        }
    }

    /// Reverses the outcome labels of every measurement.
    pub fn reverse_all_outcomes(scenario: &Scenario) -> Self {
        let mut r = Self::identity(scenario);
        for site in &mut r.outcomes {
            for perm in site {
                perm.reverse();
            }
        }
        r
    }

    pub fn with_site_permutation(mut self, sites: Vec<usize>) -> Result<Self> {
        if sites.len() != self.sites.len() || !is_permutation(&sites) {
            return Err(Error::ShapeMismatch("site map is not a permutation".into()));
        }
        self.sites = sites;
        Ok(self)
    }

    pub fn with_measurement_permutation(mut self, site: usize, perm: Vec<usize>) -> Result<Self> {
        if site >= self.sites.len() || perm.len() != self.measurements[site].len() || !is_permutation(&perm) {
            return Err(Error::ShapeMismatch("measurement map is not a permutation".into()));
        }
        self.measurements[site] = perm;
        Ok(self)
    }

    pub fn with_outcome_permutation(
        mut self,
        site: usize,
        measurement: usize,
        perm: Vec<usize>,
    ) -> Result<Self> {
        let ok = site < self.sites.len()
            && measurement < self.outcomes[site].len()
            && perm.len() == self.outcomes[site][measurement].len()
            && is_permutation(&perm);
        if !ok {
            return Err(Error::ShapeMismatch("outcome map is not a permutation".into()));
        }
        self.outcomes[site][measurement] = perm;
        Ok(self)
    }

    pub fn site_map(&self) -> &[usize] {
        &self.sites
    }

    pub fn measurement_map(&self, site: usize) -> &[usize] {
        &self.measurements[site]
    }

    pub fn outcome_map(&self, site: usize, measurement: usize) -> &[usize] {
        &self.outcomes[site][measurement]
    }

    pub fn is_identity(&self) -> bool {
        is_identity(&self.sites)
            && self.measurements.iter().all(|m| is_identity(m))
            && self.outcomes.iter().flatten().all(|o| is_identity(o))
    }

    /// Checks that the relabelling maps `scenario` onto itself.
    pub fn check_compatible(&self, scenario: &Scenario) -> Result<()> {
        let counts = scenario.outcome_counts();
        let mismatch = || Error::ShapeMismatch("relabelling does not fit the scenario".into());
        if self.sites.len() != counts.len() {
            return Err(mismatch());
        }
        for (site, site_counts) in counts.iter().enumerate() {
            if self.measurements[site].len() != site_counts.len() {
                return Err(mismatch());
            }
            let target = self.sites[site];
            if counts[target].len() != site_counts.len() {
                return Err(mismatch());
            }
            for (m, &l) in site_counts.iter().enumerate() {
                if self.outcomes[site][m].len() != l
                    || counts[target][self.measurements[site][m]] != l
                {
                    return Err(mismatch());
                }
            }
        }
        Ok(())
    }

    pub fn map_context(&self, context: &Context) -> Context {
        let mut out = vec![0; context.0.len()];
        for (site, &m) in context.0.iter().enumerate() {
            out[self.sites[site]] = self.measurements[site][m];
        }
        Context(out)
    }

    pub fn map_outcome(&self, context: &Context, outcome: &JointOutcome) -> JointOutcome {
        let mut out = vec![0; outcome.0.len()];
        for (site, &o) in outcome.0.iter().enumerate() {
            out[self.sites[site]] = self.outcomes[site][context.0[site]][o];
        }
        JointOutcome(out)
    }

    pub fn inverse(&self) -> Self {
        let n = self.sites.len();
        let sites = invert(&self.sites);
        let mut measurements = vec![Vec::new(); n];
        let mut outcomes = vec![Vec::new(); n];
        for site in 0..n {
            let target = self.sites[site];
            let k = self.measurements[site].len();
            measurements[target] = invert(&self.measurements[site]);
            let mut per_meas = vec![Vec::new(); k];
            for m in 0..k {
                per_meas[self.measurements[site][m]] = invert(&self.outcomes[site][m]);
            }
            outcomes[target] = per_meas;
        }
        Self {
            sites,
            measurements,
            outcomes,
        }
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &Self) -> Self {
        let n = self.sites.len();
        let sites = (0..n).map(|i| then.sites[self.sites[i]]).collect();
        let measurements = (0..n)
            .map(|i| {
                let j = self.sites[i];
                self.measurements[i]
                    .iter()
                    .map(|&m| then.measurements[j][m])
                    .collect()
            })
            .collect();
        let outcomes = (0..n)
            .map(|i| {
                let j = self.sites[i];
                self.outcomes[i]
                    .iter()
                    .enumerate()
                    .map(|(m, perm)| {
                        let m2 = self.measurements[i][m];
                        perm.iter().map(|&o| then.outcomes[j][m2][o]).collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            sites,
            measurements,
            outcomes,
        }
    }

    /// Moves every entry of `model` to its relabelled coordinates.
    pub fn apply<M: EmpiricalModel>(&self, model: &M) -> Result<M> {
        let scenario = model.scenario();
        self.check_compatible(scenario)?;
        let mut rows: Vec<Vec<Option<M::Entry>>> = scenario
            .contexts()
            .map(|c| vec![None; scenario.joint_outcome_count(&c)])
            .collect();
        for (ci, row) in model.rows().iter().enumerate() {
            let context = scenario.context(ci);
            let target_context = self.map_context(&context);
            let tc = scenario.context_index(&target_context);
            for (oi, entry) in row.iter().enumerate() {
                let outcome = scenario.outcome(&context, oi);
                let target = self.map_outcome(&context, &outcome);
                rows[tc][scenario.outcome_index(&target_context, &target)] = Some(entry.clone());
            }
        }
        let rows = rows
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.expect("bijective relabelling")).collect())
            .collect();
        Ok(M::from_valid_rows(scenario.clone(), rows))
    }

    /// Every relabelling of `scenario` onto itself. Only practical for
    /// small scenarios; the group order is the product of all factorials.
    pub fn group(scenario: &Scenario, allow_site_permutation: bool) -> Vec<Relabelling> {
        let counts = scenario.outcome_counts();
        let n = counts.len();
        let site_perms: Vec<Vec<usize>> = if allow_site_permutation {
            permutations(n)
                .into_iter()
                .filter(|p| (0..n).all(|i| same_site_shape(&counts[i], &counts[p[i]])))
                .collect()
        } else {
            vec![(0..n).collect()]
        };
        let mut group = Vec::new();
        for sites in site_perms {
            let mut partial = vec![Relabelling::identity(scenario).with_site_permutation(sites).unwrap()];
            for site in 0..n {
                let target = partial[0].sites[site];
                let mut next = Vec::new();
                for r in &partial {
                    for mp in permutations(counts[site].len()) {
                        if (0..mp.len()).any(|m| counts[target][mp[m]] != counts[site][m]) {
                            continue;
                        }
                        let mut r = r.clone();
                        r.measurements[site] = mp;
                        next.push(r);
                    }
                }
                partial = next;
                for m in 0..counts[site].len() {
                    let perms = permutations(counts[site][m]);
                    partial = partial
                        .into_iter()
                        .flat_map(|r| {
                            perms.iter().map(move |p| {
                                let mut r = r.clone();
                                r.outcomes[site][m] = p.clone();
                                r
                            })
                        })
                        .collect();
                }
            }
            group.extend(partial);
        }
        group
    }
}

fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

fn same_site_shape(a: &[usize], b: &[usize]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Sorted per-context possible counts; equal for isomorphic supports.
fn count_profile(model: &PossibilityModel) -> Vec<usize> {
    let mut profile: Vec<usize> = (0..model.scenario().context_count())
        .map(|c| model.row(c).iter().filter(|&&b| b).count())
        .collect();
    profile.sort_unstable();
    profile
}

/// Searches the relabelling group for a map sending `a` exactly onto `b`.
///
/// Measurement maps are enumerated whole; outcome maps are assigned one
/// (site, measurement) pair at a time and a context is compared as soon as
/// all of its pairs are fixed.
pub fn are_isomorphic(
    a: &PossibilityModel,
    b: &PossibilityModel,
    allow_site_permutation: bool,
) -> Result<Option<Relabelling>> {
    let scenario = a.scenario();
    let counts = scenario.outcome_counts();
    let n = counts.len();
    let same_shape = if allow_site_permutation {
        let mut x = counts.iter().map(|s| sorted(s)).collect::<Vec<_>>();
        let mut y = b.scenario().outcome_counts().iter().map(|s| sorted(s)).collect::<Vec<_>>();
        x.sort();
        y.sort();
        x == y
    } else {
        scenario == b.scenario()
    };
    if !same_shape {
        return Err(Error::ShapeMismatch(format!(
            "scenarios {} and {} differ",
            scenario,
            b.scenario()
        )));
    }
    // Relabellings keep a model inside its own scenario, so differently
    // ordered shapes can never be matched exactly.
    if scenario != b.scenario() {
        return Ok(None);
    }
    if a.possible_count() != b.possible_count() || count_profile(a) != count_profile(b) {
        return Ok(None);
    }

    // (site, measurement) order: measurement-major so contexts close early.
    let max_k = counts.iter().map(Vec::len).max().unwrap_or(0);
    let order: Vec<(usize, usize)> = (0..max_k)
        .flat_map(|m| (0..n).filter(move |&i| m < counts[i].len()).map(move |i| (i, m)))
        .collect();
    let position = |site: usize, m: usize| order.iter().position(|&p| p == (site, m)).unwrap();
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    for ci in 0..scenario.context_count() {
        let c = scenario.context(ci);
        let last = (0..n).map(|i| position(i, c.0[i])).max().unwrap();
        closing[last].push(ci);
    }

    let base = Relabelling::identity(scenario);
    let site_perms: Vec<Vec<usize>> = if allow_site_permutation {
        permutations(n)
    } else {
        vec![(0..n).collect()]
    };
    for sites in site_perms {
        let Ok(with_sites) = base.clone().with_site_permutation(sites) else {
            continue;
        };
        let mut meas_choices: Vec<Relabelling> = vec![with_sites];
        for site in 0..n {
            meas_choices = meas_choices
                .into_iter()
                .flat_map(|r| {
                    permutations(counts[site].len()).into_iter().map(move |mp| {
                        let mut r = r.clone();
                        r.measurements[site] = mp;
                        r
                    })
                })
                .collect();
        }
        for mut r in meas_choices {
            if r.check_compatible(scenario).is_err() {
                continue;
            }
            if assign_outcomes(a, b, &order, &closing, 0, &mut r) {
                return Ok(Some(r));
            }
        }
    }
    Ok(None)
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

fn assign_outcomes(
    a: &PossibilityModel,
    b: &PossibilityModel,
    order: &[(usize, usize)],
    closing: &[Vec<usize>],
    depth: usize,
    r: &mut Relabelling,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let (site, m) = order[depth];
    let scenario = a.scenario();
    for perm in permutations(scenario.outcome_count(site, m)) {
        r.outcomes[site][m] = perm;
        let consistent = closing[depth].iter().all(|&ci| {
            let context = scenario.context(ci);
            let target_context = r.map_context(&context);
            let tc = scenario.context_index(&target_context);
            (0..scenario.joint_outcome_count(&context)).all(|oi| {
                let target = r.map_outcome(&context, &scenario.outcome(&context, oi));
                a.get(ci, oi) == b.get(tc, scenario.outcome_index(&target_context, &target))
            })
        });
        if consistent && assign_outcomes(a, b, order, closing, depth + 1, r) {
            return true;
        }
    }
    false
}

/// Lexicographically smallest flattened support over the relabelling
/// group (possible entries sort first). Equal keys mean isomorphic supports.
pub fn canonical_support(model: &PossibilityModel, group: &[Relabelling]) -> Vec<bool> {
    group
        .iter()
        .map(|r| {
            r.apply(model)
                .expect("group element of this scenario")
                .bits()
                .into_iter()
                .map(|b| !b)
                .collect::<Vec<bool>>()
        })
        .min()
        .map(|key| key.into_iter().map(|b| !b).collect())
        .unwrap_or_default()
}
