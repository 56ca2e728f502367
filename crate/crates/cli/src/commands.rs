use std::path::Path;

use nonlocal::catalog::{self, CatalogModel};
use nonlocal::format::{parse_model, AnyModel};
use nonlocal::hardy::{
    certainty_profile, chen_check, chen_generate, find_witnesses, paradoxical_probability, HardyWitness,
};
use nonlocal::localdecide::{
    classify as classify_level, classify_support, decide_22l, decide_2k2, nonextendable_entries, Entry,
    SupportVerdict,
};
use nonlocal::quantum::{bell_model, ghz_model, hardy_family_model, HardyFamilyParams};
use nonlocal::tables::{is_no_signalling, is_no_signalling_probabilistic, PossibilityModel, ProbabilityModel};
use nonlocal::{Result, Scalar};
use serde_json::{json, Value};

use crate::report::{exact, header, model_identity, scalar};
use crate::{resolve, validation, Generate};

pub fn load_model(path: &Path) -> Result<AnyModel> {
    let path = resolve(path);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| validation("path", format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text)
}

fn parse_stars(l: usize, text: &str) -> Result<Vec<(usize, usize)>> {
    let text = text.trim();
    if text == "all" {
        return Ok((0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j))).collect());
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|cell| {
            let (i, j) = cell
                .split_once(':')
                .ok_or_else(|| validation("stars", format!("`{cell}` is not of the form i:j")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| validation("stars", format!("`{s}` is not an index")))
            };
            Ok((parse(i)?, parse(j)?))
        })
        .collect()
}

/// Model file text for a `generate` subcommand.
pub fn generate(g: &Generate) -> Result<String> {
    let model: AnyModel = match g {
        Generate::PrBox => catalog::pr_box().into(),
        Generate::Ghz { n } => ghz_model::<f64>(*n)?.into(),
        Generate::HardyFamily { t } => hardy_family_model(&HardyFamilyParams::<f64>::new(*t)?)?.0.into(),
        Generate::Bell { angles } => {
            if angles.len() % 2 != 0 {
                return Err(validation("angles", "expected theta,phi pairs"));
            }
            let pairs: Vec<(f64, f64)> = angles.chunks(2).map(|c| (c[0], c[1])).collect();
            bell_model(&pairs)?.into()
        }
        Generate::Chen { l, stars } => chen_generate(*l, &parse_stars(*l, stars)?)?.into(),
        Generate::Catalog { name } => match catalog::by_name(name)? {
            CatalogModel::Exact(m) => m.into(),
            CatalogModel::Support(m) => m.into(),
        },
    };
    Ok(model.to_string_pretty())
}

fn entries_json(entries: &[Entry]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|e| json!({"context": e.context.to_string(), "outcome": e.outcome.to_string()}))
            .collect(),
    )
}

fn oracle_entries(support: &PossibilityModel) -> Vec<Entry> {
    nonextendable_entries(support)
        .into_iter()
        .map(|(context, outcome)| Entry { context, outcome })
        .collect()
}

fn witness_json(w: &HardyWitness) -> Value {
    serde_json::to_value(w).expect("serialisable")
}

fn probability_details<S: Scalar>(
    model: &ProbabilityModel<S>,
    witnesses: &[HardyWitness],
    epsilon: f64,
) -> Result<(Value, Value)> {
    let ws = witnesses
        .iter()
        .map(|w| {
            let p = paradoxical_probability(model, w, epsilon)?;
            let mut v = witness_json(w);
            v["paradoxical_probability"] = scalar(&p);
            v["paradoxical_probability_exact"] = exact(&p);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let s = model.scenario();
    let certainty = certainty_profile(model, witnesses)
        .iter()
        .enumerate()
        .map(|(ci, p)| json!({"context": s.context(ci).to_string(), "probability": scalar(p), "exact": exact(p)}))
        .collect();
    Ok((Value::Array(ws), Value::Array(certainty)))
}

/// The full analysis report.
pub fn analyze(model: &AnyModel, epsilon: f64) -> Result<Value> {
    let support = model.support(epsilon);
    let witnesses = find_witnesses(&support);
    let nonextendable = oracle_entries(&support);
    let (level, probabilistic_ns, details) = match model {
        AnyModel::Exact(m) => (
            classify_level(m, epsilon)?,
            Some(is_no_signalling_probabilistic(m, 0.0)),
            Some(probability_details(m, &witnesses, epsilon)?),
        ),
        AnyModel::Float(m) => (
            classify_level(m, epsilon)?,
            Some(is_no_signalling_probabilistic(m, 1e-9)),
            Some(probability_details(m, &witnesses, epsilon)?),
        ),
        AnyModel::Possibility(_) => (classify_support(&support), None, None),
    };
    let mut r = header("analyze");
    r.insert("model".into(), model_identity(model));
    r.insert("epsilon".into(), json!(epsilon));
    r.insert(
        "no_signalling".into(),
        json!({"possibilistic": is_no_signalling(&support), "probabilistic": probabilistic_ns}),
    );
    r.insert("level".into(), json!(level));
    r.insert("possible_entries".into(), json!(support.possible_count()));
    r.insert("nonextendable_entries".into(), entries_json(&nonextendable));
    r.insert("witness_count".into(), json!(witnesses.len()));
    match details {
        Some((ws, certainty)) => {
            r.insert("witnesses".into(), ws);
            r.insert("certainty".into(), certainty);
        }
        None => {
            r.insert("witnesses".into(), Value::Array(witnesses.iter().map(witness_json).collect()));
            r.insert("certainty".into(), Value::Null);
        }
    }
    Ok(Value::Object(r))
}

/// The verdict object: level, non-extendable entries and witnesses.
///
/// Two-site scenarios with two settings or binary outcomes go through the
/// polynomial deciders; everything else uses the grid oracle.
pub fn classify(model: &AnyModel, epsilon: f64) -> Result<Value> {
    let support = model.support(epsilon);
    let s = support.scenario();
    let (method, verdict) = if s.is_bipartite_two_setting() {
        ("decide_22l", Some(decide_22l(&support)?))
    } else if s.sites() == 2 && s.is_binary() {
        ("decide_2k2", Some(decide_2k2(&support)?))
    } else {
        ("oracle", None)
    };
    let entries = match &verdict {
        Some(v) if method == "decide_22l" => v.nonextendable_entries.clone(),
        _ => oracle_entries(&support),
    };
    let logically_nonlocal = match &verdict {
        Some(v) => v.level == SupportVerdict::LogicallyNonlocal,
        None => !entries.is_empty(),
    };
    let level = match model {
        AnyModel::Exact(m) => classify_level(m, epsilon)?,
        AnyModel::Float(m) => classify_level(m, epsilon)?,
        AnyModel::Possibility(m) => classify_support(m),
    };
    let witnesses: Vec<Value> = find_witnesses(&support).iter().map(witness_json).collect();
    let mut r = header("classify");
    r.insert("model".into(), model_identity(model));
    r.insert("method".into(), json!(method));
    r.insert("level".into(), json!(level));
    r.insert("logically_nonlocal".into(), json!(logically_nonlocal));
    r.insert("nonextendable_entries".into(), entries_json(&entries));
    r.insert("witnesses".into(), Value::Array(witnesses));
    Ok(Value::Object(r))
}

pub fn collapse(model: &AnyModel, epsilon: f64) -> String {
    AnyModel::Possibility(model.support(epsilon)).to_string_pretty()
}

pub fn check_ns(model: &AnyModel, epsilon: f64) -> Value {
    let probabilistic = match model {
        AnyModel::Exact(m) => Some(is_no_signalling_probabilistic(m, 0.0)),
        AnyModel::Float(m) => Some(is_no_signalling_probabilistic(m, 1e-9)),
        AnyModel::Possibility(_) => None,
    };
    let mut r = header("check-ns");
    r.insert("model".into(), model_identity(model));
    r.insert("possibilistic".into(), json!(is_no_signalling(&model.support(epsilon))));
    r.insert("probabilistic".into(), json!(probabilistic));
    Value::Object(r)
}

pub fn chen(model: &AnyModel, epsilon: f64) -> Result<Value> {
    let support = model.support(epsilon);
    let found = chen_check(&support)?;
    let mut r = header("chen");
    r.insert("model".into(), model_identity(model));
    match found {
        Some((pattern, witnesses)) => {
            let stars: Vec<String> = pattern.stars.iter().map(|(i, j)| format!("{i}:{j}")).collect();
            r.insert("matches".into(), json!(true));
            r.insert("l".into(), json!(pattern.l));
            r.insert("stars".into(), json!(stars));
            r.insert("verified".into(), json!(witnesses.iter().all(|w| w.verify(&support))));
            r.insert("witnesses".into(), serde_json::to_value(&witnesses).expect("serialisable"));
        }
        None => {
            r.insert("matches".into(), json!(false));
        }
    }
    Ok(Value::Object(r))
}
