use nonlocal::catalog;
use nonlocal::hardy::{certainty_profile, find_npartite_witnesses, HardyWitness};
use nonlocal::quantum::{
    adversarial_bell_search, ghz_model, ghz_rule, hardy_scan as scan, optimal_hardy_probability,
    random_bell_search, MIN_BASE_PROBABILITY,
};
use nonlocal::tables::Context;
use nonlocal::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{header, num, Assertions};
use crate::{validation, Output};

pub fn bell_anomaly(samples: usize, restarts: usize, seed: u64, epsilon: f64) -> Result<Output> {
    if samples == 0 || restarts == 0 {
        return Err(validation("samples", "samples and restarts must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = random_bell_search(samples, epsilon, &mut rng)?;
    let adversarial = adversarial_bell_search(restarts, &mut rng);
    let mut a = Assertions::default();
    a.check("no logically nonlocal collapse", random.logically_nonlocal == 0);
    a.check("every sample passes the symmetry check", random.symmetric == samples);
    a.check("adversarial objective bounded away from zero", adversarial.best_objective > 0.0);
    let angles: Vec<Value> = adversarial
        .best_angles
        .iter()
        .map(|&(t, p)| json!([num(t), num(p)]))
        .collect();
    let mut r = header("bell-anomaly");
    r.insert("seed".into(), json!(seed));
    r.insert("epsilon".into(), json!(epsilon));
    r.insert("samples".into(), json!(samples));
    r.insert("lattice_samples".into(), json!(random.lattice_samples));
    r.insert("samples_with_zeros".into(), json!(random.with_zeros));
    r.insert("logically_nonlocal".into(), json!(random.logically_nonlocal));
    r.insert("symmetry_pass_rate".into(), num(random.symmetric as f64 / samples as f64));
    r.insert("restarts".into(), json!(restarts));
    r.insert("min_base_probability".into(), num(MIN_BASE_PROBABILITY));
    r.insert("best_objective".into(), num(adversarial.best_objective));
    r.insert("best_angles".into(), Value::Array(angles));
    r.insert("assertions".into(), a.to_json());
    Ok(Output::checked(Value::Object(r), a.failed()))
}

pub fn ghz_audit(n: usize, epsilon: f64) -> Result<Output> {
    let model = ghz_model::<f64>(n)?;
    let s = model.scenario().clone();
    let mut mismatches = 0usize;
    let mut max_dev = 0.0f64;
    let mut entries = 0usize;
    for (ci, c) in s.contexts().enumerate() {
        for oi in 0..s.joint_outcome_count(&c) {
            let o = s.outcome(&c, oi);
            let (possible, p) = ghz_rule::<f64>(n, &c, &o)?;
            let born = *model.get(ci, oi);
            let dev = (born - p).abs();
            max_dev = max_dev.max(dev);
            entries += 1;
            if dev > 1e-9 || possible != (born > epsilon) {
                mismatches += 1;
            }
        }
    }
    let support = model.collapse(epsilon);
    let witnesses: Vec<HardyWitness> = find_npartite_witnesses(&support)?
        .into_iter()
        .map(HardyWitness::NPartite)
        .collect();
    let all_y = Context(vec![1; n]);
    let yi = s.context_index(&all_y);
    let certainty = certainty_profile(&model, &witnesses)[yi];
    let at_y: Vec<Value> = witnesses
        .iter()
        .filter_map(|w| match w {
            HardyWitness::NPartite(w) if w.base_context == all_y => Some(json!({
                "base_outcome": w.base_outcome.to_string(),
                "flip_outcomes": w.flip_outcomes,
                "probability": num(*model.get(yi, s.outcome_index(&all_y, &w.base_outcome))),
            })),
            _ => None,
        })
        .collect();
    let expect_witnesses = n % 4 == 3;
    let table_iii = (n == 3).then(|| {
        let reference = catalog::ghz_mermin_possibilistic();
        [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]].iter().all(|c| {
            let ci = s.context_index(&Context(c.to_vec()));
            support.row(ci) == reference.row(ci)
        })
    });
    let mut a = Assertions::default();
    a.check("counting rule equals the Born rule", mismatches == 0);
    a.check("witnesses exist iff n = 3 mod 4", witnesses.is_empty() != expect_witnesses);
    if expect_witnesses {
        a.check("certainty 1 at the all-Y context", (certainty - 1.0).abs() <= 1e-9);
        let want = 1.0 / (1u64 << n) as f64;
        a.check(
            "every all-Y witness has probability 2^-n",
            !at_y.is_empty() && at_y.iter().all(|w| (w["probability"].as_f64().unwrap() - want).abs() <= 1e-9),
        );
    }
    if let Some(ok) = table_iii {
        a.check("constrained rows match the GHZ-Mermin support", ok);
    }
    let mut r = header("ghz-audit");
    r.insert("n".into(), json!(n));
    r.insert("n_mod_4".into(), json!(n % 4));
    r.insert("entries_checked".into(), json!(entries));
    r.insert("rule_mismatches".into(), json!(mismatches));
    r.insert("max_rule_deviation".into(), num(max_dev));
    r.insert("witness_count".into(), json!(witnesses.len()));
    r.insert("all_y_witness_count".into(), json!(at_y.len()));
    r.insert("all_y_certainty".into(), num(certainty));
    r.insert("all_y_witnesses".into(), Value::Array(at_y));
    r.insert("constrained_rows_match".into(), json!(table_iii));
    r.insert("assertions".into(), a.to_json());
    Ok(Output::checked(Value::Object(r), a.failed()))
}

pub fn hardy_scan(steps: usize) -> Result<Output> {
    let report = scan(steps)?;
    let optimum = optimal_hardy_probability();
    let error = (report.max_probability - optimum).abs();
    let mut a = Assertions::default();
    a.check("maximum within 1e-4 of (5 sqrt 5 - 11)/2", error <= 1e-4);
    a.check("every scanned model has a witness", report.min_witnesses >= 1);
    let mut r = header("hardy-scan");
    r.insert("steps".into(), json!(report.steps));
    r.insert("evaluated".into(), json!(report.evaluated));
    r.insert("min_witnesses".into(), json!(report.min_witnesses));
    r.insert("argmax_t".into(), num(report.argmax_t));
    r.insert("max_probability".into(), num(report.max_probability));
    r.insert("expected_max".into(), num(optimum));
    r.insert("abs_error".into(), num(error));
    r.insert(
        "endpoint_probabilities".into(),
        json!([num(report.endpoint_probabilities.0), num(report.endpoint_probabilities.1)]),
    );
    r.insert("assertions".into(), a.to_json());
    Ok(Output::checked(Value::Object(r), a.failed()))
}
