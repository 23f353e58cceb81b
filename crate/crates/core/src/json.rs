//! The on-disk model format, plus the catalog listing.
//!
//! A model document is `{version, elements, children, connectors, root}`.
//! Elements keep declaration order; `children` carries the ownership slots of
//! one parent per entry. The writer is canonical for a given graph (same
//! graph, same bytes), so writing what was parsed is idempotent. The reader
//! is permissive about graph-level problems (orphans, dangling ids, duplicate
//! element declarations parse fine and are reported by the rule checker) but
//! strict about document-level ambiguity: unknown fields, a bad version, or
//! two `children` entries for the same parent are parse errors, because there
//! is no faithful graph for them.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    ConnectorKind, Edge, Element, ElementId, ElementKind, GraphBuilder, ModelGraph,
};
use crate::patterns::{ActionTemplate, PatternKind, VariableSchema, CATALOG};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    /// Malformed JSON or schema violation, as reported by the deserializer.
    Json(String),
    UnsupportedVersion(u32),
    /// Two `children` entries claim the same parent; the intended child
    /// lists are ambiguous, unlike a plain duplicate-id declaration.
    DuplicateChildrenEntry(ElementId),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Json(msg) => write!(f, "invalid model JSON: {msg}"),
            ParseError::UnsupportedVersion(v) => {
                write!(f, "unsupported model format version {v}, expected {MODEL_FORMAT_VERSION}")
            }
            ParseError::DuplicateChildrenEntry(parent) => {
                write!(f, "multiple children entries for parent '{parent}'")
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    version: u32,
    elements: Vec<ElementDoc>,
    #[serde(default)]
    children: Vec<ChildrenDoc>,
    #[serde(default)]
    connectors: Vec<ConnectorDoc>,
    root: ElementId,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementDoc {
    id: ElementId,
    kind: ElementKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<PatternKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    widget: Option<crate::model::WidgetKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChildrenDoc {
    parent: ElementId,
    #[serde(default)]
    structs: Vec<ElementId>,
    #[serde(default)]
    behaviours: Vec<ElementId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    init: Option<ElementId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end: Option<ElementId>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectorDoc {
    id: ElementId,
    kind: ConnectorKind,
    #[serde(default)]
    edges: Vec<Edge>,
}

pub fn model_from_json(text: &str) -> Result<ModelGraph, ParseError> {
    let doc: ModelDoc =
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    if doc.version != MODEL_FORMAT_VERSION {
        return Err(ParseError::UnsupportedVersion(doc.version));
    }

    let mut seen_parents: BTreeSet<&ElementId> = BTreeSet::new();
    for entry in &doc.children {
        if !seen_parents.insert(&entry.parent) {
            return Err(ParseError::DuplicateChildrenEntry(entry.parent.clone()));
        }
    }

    let mut b = GraphBuilder::new().root(doc.root);
    for e in doc.elements {
        let behaviour = if e.kind == ElementKind::Behaviour || e.pattern.is_some() || e.widget.is_some()
        {
            // Attached even on non-Behaviour kinds so the kind/field mismatch
            // survives parsing and surfaces as a rule diagnostic.
            Some(crate::model::BehaviourInfo { pattern: e.pattern, widget: e.widget })
        } else {
            None
        };
        b = b.element_raw(Element { id: e.id, kind: e.kind, behaviour, label: e.label });
    }
    for c in doc.children {
        b = b.child_structs(c.parent.clone(), c.structs);
        b = b.child_behaviours(c.parent.clone(), c.behaviours);
        if let Some(init) = c.init {
            b = b.init(c.parent.clone(), init);
        }
        if let Some(end) = c.end {
            b = b.end(c.parent.clone(), end);
        }
    }
    for c in doc.connectors {
        b = b.connector(c.id, c.kind, c.edges.into_iter().map(|e| (e.from, e.to)));
    }
    Ok(b.build())
}

fn doc_of(g: &ModelGraph) -> ModelDoc {
    let elements = g
        .elements()
        .map(|e| ElementDoc {
            id: e.id.clone(),
            kind: e.kind,
            pattern: e.behaviour.as_ref().and_then(|i| i.pattern),
            widget: e.behaviour.as_ref().and_then(|i| i.widget.clone()),
            label: e.label.clone(),
        })
        .collect();

    // One entry per owner, following element declaration order; owners that
    // are not declared elements (dangling) come last in sorted order so the
    // document is still canonical for the graph.
    let children = g
        .owners_declared()
        .into_iter()
        .map(|parent| ChildrenDoc {
            structs: g.inner_structs(&parent).to_vec(),
            behaviours: g.inner_behaviour(&parent).to_vec(),
            init: g.form_init(&parent).cloned(),
            end: g.form_end(&parent).cloned(),
            parent,
        })
        .filter(|c| {
            !(c.structs.is_empty() && c.behaviours.is_empty() && c.init.is_none() && c.end.is_none())
        })
        .collect();

    let connectors = g
        .connectors()
        .iter()
        .map(|c| ConnectorDoc { id: c.id.clone(), kind: c.kind, edges: c.edges.clone() })
        .collect();

    ModelDoc {
        version: MODEL_FORMAT_VERSION,
        elements,
        children,
        connectors,
        root: g.root().clone(),
    }
}

/// Pretty document form, one trailing newline. Canonical per graph.
pub fn model_to_json(g: &ModelGraph) -> String {
    let mut out = serde_json::to_string_pretty(&doc_of(g)).expect("model serialization");
    out.push('\n');
    out
}

/// Compact single-line form; the byte string used for canonical labels and
/// model hashes.
pub fn model_to_json_compact(g: &ModelGraph) -> String {
    serde_json::to_string(&doc_of(g)).expect("model serialization")
}

#[derive(Serialize)]
struct CatalogDoc {
    version: u32,
    patterns: Vec<PatternDoc>,
}

#[derive(Serialize)]
struct PatternDoc {
    name: &'static str,
    goals: Vec<&'static str>,
    variables: VariablesDoc,
    actions: ActionsDoc,
    precondition: &'static str,
    checks: Vec<CheckDoc>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum VariablesDoc {
    Fixed { names: Vec<&'static str> },
    Indexed { prefix: &'static str },
    IndexedPair { value_prefix: &'static str, criterion_prefix: &'static str },
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum ActionsDoc {
    Fixed { steps: Vec<StepDoc> },
    PerVariable { action: &'static str },
}

#[derive(Serialize)]
struct StepDoc {
    action: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    var: Option<&'static str>,
}

#[derive(Serialize)]
struct CheckDoc {
    tag: &'static str,
    arity: usize,
}

/// The built-in pattern catalog as a JSON document (pretty, trailing newline).
pub fn catalog_to_json() -> String {
    let patterns = CATALOG
        .iter()
        .map(|spec| PatternDoc {
            name: spec.kind.name(),
            goals: spec.goals.iter().map(|g| g.tag()).collect(),
            variables: match spec.variables {
                VariableSchema::Fixed(names) => VariablesDoc::Fixed { names: names.to_vec() },
                VariableSchema::Indexed { prefix } => VariablesDoc::Indexed { prefix },
                VariableSchema::IndexedPair { value_prefix, criterion_prefix } => {
                    VariablesDoc::IndexedPair { value_prefix, criterion_prefix }
                }
            },
            actions: match spec.actions {
                ActionTemplate::Fixed(steps) => ActionsDoc::Fixed {
                    steps: steps
                        .iter()
                        .map(|s| StepDoc { action: s.action.name(), var: s.var })
                        .collect(),
                },
                ActionTemplate::PerVariable { action } => {
                    ActionsDoc::PerVariable { action: action.name() }
                }
            },
            precondition: spec.precondition,
            checks: spec.checks.iter().map(|c| CheckDoc { tag: c.tag(), arity: c.arity() }).collect(),
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&CatalogDoc { version: 1, patterns })
        .expect("catalog serialization");
    out.push('\n');
    out
}
