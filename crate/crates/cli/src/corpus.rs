//! Batch evaluation of a JSON corpus of classification cases.
//!
//! A corpus file is a JSON array. Each entry names a case (`id`), fixes a
//! tree shape (`shape`, as `"d,k"`), and supplies either a single `element`
//! or a list of `generators` — both as inline leaf maps like
//! `"0.0 -> 1; 0.1 -> 0.1; 1 -> 0.0"`. An optional `expected` field is
//! either the verdict class (`"elliptic"` / `"translation"`) or an object
//! `{"class": ..., "order": N}`.
//!
//! Entries are evaluated concurrently (every library call is pure), but the
//! report always lists results in corpus order. Any expectation mismatch
//! makes the command exit 2; entry-level errors are embedded in the report
//! and make it exit 1.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde_json::{json, Value};

use aaut_core::classify::{
    classify_element, classify_subgroup, Caps, Classification, SubgroupClassification,
    SubgroupOrder,
};
use aaut_core::element::AAutElement;
use aaut_core::Shape;

use crate::{classification_json, subgroup_json, Failure};

pub struct CorpusOutcome {
    pub report: Value,
    pub exit: i32,
}

struct Entry {
    id: String,
    shape: Shape,
    input: EntryInput,
    expected: Option<Expected>,
    expected_raw: Option<Value>,
}

enum EntryInput {
    Element(String),
    Generators(Vec<String>),
}

struct Expected {
    class: String,
    order: Option<u64>,
}

struct EntryReport {
    id: String,
    verdict: Option<Value>,
    error: Option<String>,
    matched: Option<bool>,
    expected_raw: Option<Value>,
}

/// What a verdict claims, reduced to the facts an expectation can name.
struct VerdictFacts {
    class: &'static str,
    order: Option<u64>,
}

pub fn run_corpus(path: &Path, caps: Caps) -> Result<CorpusOutcome, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|err| Failure::Input(format!("cannot read {}: {err}", path.display())))?;
    let entries = parse_corpus(&text)?;

    let results: Vec<Mutex<Option<EntryReport>>> =
        entries.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(entries.len().max(1));
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= entries.len() {
                    break;
                }
                let report = evaluate(&entries[i], caps);
                *results[i].lock().expect("evaluation never panics") = Some(report);
            });
        }
    });
    let reports: Vec<EntryReport> = results
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("evaluation never panics")
                .expect("every slot was filled")
        })
        .collect();

    let mismatches = reports.iter().filter(|r| r.matched == Some(false)).count();
    let errors = reports.iter().filter(|r| r.error.is_some()).count();
    let report = json!({
        "entries": reports.iter().map(entry_json).collect::<Vec<Value>>(),
        "total": reports.len(),
        "mismatches": mismatches,
        "errors": errors,
    });
    let exit = if mismatches > 0 {
        2
    } else if errors > 0 {
        1
    } else {
        0
    };
    Ok(CorpusOutcome { report, exit })
}

fn parse_corpus(text: &str) -> Result<Vec<Entry>, Failure> {
    let input = |msg: String| Failure::Input(msg);
    let value: Value = serde_json::from_str(text)
        .map_err(|err| input(format!("corpus is not valid JSON: {err}")))?;
    let array = value
        .as_array()
        .ok_or_else(|| input("corpus must be a JSON array of entries".to_string()))?;
    let mut entries = Vec::with_capacity(array.len());
    let mut seen_ids = HashSet::new();
    for (index, item) in array.iter().enumerate() {
        let obj = item
            .as_object()
            .ok_or_else(|| input(format!("entry {index} is not a JSON object")))?;
        let id = obj
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| input(format!("entry {index} is missing a string \"id\"")))?
            .to_string();
        if !seen_ids.insert(id.clone()) {
            return Err(input(format!("duplicate entry id {id:?}")));
        }
        let shape: Shape = obj
            .get("shape")
            .and_then(Value::as_str)
            .ok_or_else(|| input(format!("entry {id:?} is missing a string \"shape\"")))?
            .parse()
            .map_err(|err| input(format!("entry {id:?}: {err}")))?;
        let case_input = match (obj.get("element"), obj.get("generators")) {
            (Some(Value::String(text)), None) => EntryInput::Element(text.clone()),
            (None, Some(Value::Array(items))) if !items.is_empty() => {
                let texts = items
                    .iter()
                    .map(|v| {
                        v.as_str().map(str::to_string).ok_or_else(|| {
                            input(format!("entry {id:?}: generators must be strings"))
                        })
                    })
                    .collect::<Result<Vec<String>, Failure>>()?;
                EntryInput::Generators(texts)
            }
            _ => {
                return Err(input(format!(
                    "entry {id:?} needs exactly one of \"element\" or a non-empty \"generators\""
                )))
            }
        };
        let expected_raw = obj.get("expected").cloned();
        let expected = expected_raw
            .as_ref()
            .map(|raw| parse_expected(&id, raw))
            .transpose()?;
        entries.push(Entry {
            id,
            shape,
            input: case_input,
            expected,
            expected_raw,
        });
    }
    Ok(entries)
}

fn parse_expected(id: &str, raw: &Value) -> Result<Expected, Failure> {
    let (class, order) = match raw {
        Value::String(class) => (class.clone(), None),
        Value::Object(map) => {
            let class = map
                .get("class")
                .and_then(Value::as_str)
                .ok_or_else(|| {
                    Failure::Input(format!("entry {id:?}: expected object needs a \"class\""))
                })?
                .to_string();
            (class, map.get("order").and_then(Value::as_u64))
        }
        _ => {
            return Err(Failure::Input(format!(
                "entry {id:?}: \"expected\" must be a class string or an object"
            )))
        }
    };
    if class != "elliptic" && class != "translation" {
        return Err(Failure::Input(format!(
            "entry {id:?}: expected class must be \"elliptic\" or \"translation\", got {class:?}"
        )));
    }
    Ok(Expected { class, order })
}

fn evaluate(entry: &Entry, caps: Caps) -> EntryReport {
    let outcome = match &entry.input {
        EntryInput::Element(text) => AAutElement::parse_leaf_map(entry.shape, text)
            .and_then(|g| classify_element(&g, caps))
            .map(|verdict| (classification_json(&verdict), element_facts(&verdict))),
        EntryInput::Generators(texts) => texts
            .iter()
            .map(|t| AAutElement::parse_leaf_map(entry.shape, t))
            .collect::<Result<Vec<AAutElement>, _>>()
            .and_then(|gens| classify_subgroup(&gens, caps))
            .map(|verdict| (subgroup_json(&verdict), subgroup_facts(&verdict))),
    };
    match outcome {
        Err(err) => EntryReport {
            id: entry.id.clone(),
            verdict: None,
            error: Some(err.to_string()),
            matched: None,
            expected_raw: entry.expected_raw.clone(),
        },
        Ok((verdict, facts)) => {
            let matched = entry.expected.as_ref().map(|exp| {
                exp.class == facts.class
                    && exp.order.is_none_or(|want| facts.order == Some(want))
            });
            EntryReport {
                id: entry.id.clone(),
                verdict: Some(verdict),
                error: None,
                matched,
                expected_raw: entry.expected_raw.clone(),
            }
        }
    }
}

fn element_facts(verdict: &Classification) -> VerdictFacts {
    match verdict {
        Classification::Elliptic { order, .. } => VerdictFacts {
            class: "elliptic",
            order: Some(*order),
        },
        Classification::Translation(_) => VerdictFacts {
            class: "translation",
            order: None,
        },
    }
}

fn subgroup_facts(verdict: &SubgroupClassification) -> VerdictFacts {
    match verdict {
        SubgroupClassification::Elliptic(cert) => VerdictFacts {
            class: "elliptic",
            // A capped enumeration cannot confirm any expected order.
            order: match cert.order {
                SubgroupOrder::Exact(n) => Some(n),
                SubgroupOrder::CapExceeded { .. } => None,
            },
        },
        SubgroupClassification::Translation(_) => VerdictFacts {
            class: "translation",
            order: None,
        },
    }
}

fn entry_json(report: &EntryReport) -> Value {
    let mut value = json!({ "id": report.id });
    if let Some(verdict) = &report.verdict {
        value["verdict"] = verdict.clone();
    }
    if let Some(error) = &report.error {
        value["error"] = json!(error);
    }
    if let Some(expected) = &report.expected_raw {
        value["expected"] = expected.clone();
    }
    if let Some(matched) = report.matched {
        value["match"] = json!(matched);
    }
    value
}
