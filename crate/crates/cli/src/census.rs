use std::collections::{BTreeMap, HashMap};

use nonlocal::catalog;
use nonlocal::localdecide::{classify_support, HierarchyLevel};
use nonlocal::tables::{canonical_support, is_no_signalling, PossibilityModel, Relabelling, Scenario};
use serde_json::{json, Value};

use crate::report::{header, Assertions};
use crate::Output;

/// Canonical forms, cached by the support bits.
struct Classifier {
    group: Vec<Relabelling>,
    cache: HashMap<Vec<bool>, Vec<bool>>,
}

impl Classifier {
    fn new(scenario: &Scenario) -> Self {
        Classifier {
            group: Relabelling::group(scenario, true),
            cache: HashMap::new(),
        }
    }

    fn canonical(&mut self, m: &PossibilityModel) -> Vec<bool> {
        let group = &self.group;
        self.cache
            .entry(m.bits())
            .or_insert_with(|| canonical_support(m, group))
            .clone()
    }
}

fn key_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Default)]
struct Tally {
    supports: BTreeMap<HierarchyLevel, usize>,
    classes: BTreeMap<HierarchyLevel, BTreeMap<Vec<bool>, usize>>,
}

impl Tally {
    fn add(&mut self, level: HierarchyLevel, class: Vec<bool>) {
        *self.supports.entry(level).or_default() += 1;
        *self.classes.entry(level).or_default().entry(class).or_default() += 1;
    }

    fn classes(&self, level: HierarchyLevel) -> Vec<&Vec<bool>> {
        self.classes.get(&level).map(|c| c.keys().collect()).unwrap_or_default()
    }

    fn to_json(&self) -> Value {
        let levels = [HierarchyLevel::Local, HierarchyLevel::Logical, HierarchyLevel::Strong];
        Value::Object(
            levels
                .iter()
                .map(|&level| {
                    let classes = self.classes.get(&level);
                    let detail: Vec<Value> = classes
                        .map(|c| {
                            c.iter()
                                .map(|(k, n)| json!({"canonical": key_string(k), "supports": n}))
                                .collect()
                        })
                        .unwrap_or_default();
                    (
                        level.to_string(),
                        json!({
                            "supports": self.supports.get(&level).copied().unwrap_or(0),
                            "classes": detail.len(),
                            "class_list": if level == HierarchyLevel::Local { Value::Null } else { Value::Array(detail) },
                        }),
                    )
                })
                .collect(),
        )
    }
}

fn s222() -> Scenario {
    Scenario::uniform(2, 2, 2).expect("valid scenario")
}

/// Support on 16 entries, bit `4·context + outcome` of `mask`.
fn from_mask(mask: u32) -> Option<PossibilityModel> {
    let rows = (0..4)
        .map(|ci| (0..4).map(|oi| mask >> (4 * ci + oi) & 1 == 1).collect())
        .collect();
    PossibilityModel::new(s222(), rows).ok()
}

/// Every `(2,2,2)` support: filters no-signalling ones, classifies them and
/// counts isomorphism classes with party swap allowed.
pub fn census_222() -> Output {
    let mut classifier = Classifier::new(&s222());
    let pr = classifier.canonical(&catalog::pr_box().collapse(0.0));
    let mut tally = Tally::default();
    let (mut scanned, mut valid, mut ns) = (0usize, 0usize, 0usize);
    for mask in 0..1u32 << 16 {
        scanned += 1;
        let Some(m) = from_mask(mask) else { continue };
        valid += 1;
        if !is_no_signalling(&m) {
            continue;
        }
        ns += 1;
        let class = classifier.canonical(&m);
        tally.add(classify_support(&m), class);
    }
    let strong = tally.classes(HierarchyLevel::Strong);
    let mut a = Assertions::default();
    a.check("scanned all 65536 tables", scanned == 65536);
    a.check("exactly one strongly nonlocal class", strong.len() == 1);
    a.check("the strongly nonlocal class is the PR box", strong.iter().all(|k| **k == pr));
    let mut r = header("census-222");
    r.insert("scanned".into(), json!(scanned));
    r.insert("valid".into(), json!(valid));
    r.insert("no_signalling".into(), json!(ns));
    r.insert("levels".into(), tally.to_json());
    r.insert("pr_class".into(), json!(key_string(&pr)));
    r.insert("assertions".into(), a.to_json());
    Output::checked(Value::Object(r), a.failed())
}

/// Supports with `00 ⇔ 11` and `01 ⇔ 10` in every context.
fn symmetric_supports() -> Vec<PossibilityModel> {
    // Per context: 1 = {00, 11}, 2 = {01, 10}, 3 = both.
    let mut out = Vec::new();
    for code in 0..81u32 {
        let mut mask = 0u32;
        let mut c = code;
        for ci in 0..4 {
            let choice = c % 3 + 1;
            c /= 3;
            let row = if choice & 1 == 1 { 0b1001 } else { 0 } | if choice & 2 == 2 { 0b0110 } else { 0 };
            mask |= row << (4 * ci);
        }
        out.extend(from_mask(mask));
    }
    out
}

/// Symmetric no-signalling `(2,2,2)` supports by level and class.
pub fn census_symmetric() -> Output {
    let mut classifier = Classifier::new(&s222());
    let pr = classifier.canonical(&catalog::pr_box().collapse(0.0));
    let iv_d = classifier.canonical(&catalog::table_iv_d());
    let mut tally = Tally::default();
    let all = symmetric_supports();
    let mut ns = 0;
    for m in &all {
        if !is_no_signalling(m) {
            continue;
        }
        ns += 1;
        let class = classifier.canonical(m);
        tally.add(classify_support(m), class);
    }
    let logical = tally.classes(HierarchyLevel::Logical);
    let strong = tally.classes(HierarchyLevel::Strong);
    let mut a = Assertions::default();
    a.check("exactly one logically nonlocal, not strong class", logical.len() == 1);
    a.check("that class is the table_iv_d support", logical.iter().all(|k| **k == iv_d));
    a.check("strongly nonlocal symmetric supports are PR boxes", strong.iter().all(|k| **k == pr));
    a.check("local symmetric supports exist", tally.supports.get(&HierarchyLevel::Local).is_some_and(|&n| n > 0));
    let mut r = header("census-symmetric");
    r.insert("symmetric".into(), json!(all.len()));
    r.insert("no_signalling".into(), json!(ns));
    r.insert("levels".into(), tally.to_json());
    r.insert("table_iv_d_class".into(), json!(key_string(&iv_d)));
    r.insert("pr_class".into(), json!(key_string(&pr)));
    r.insert("assertions".into(), a.to_json());
    Output::checked(Value::Object(r), a.failed())
}
