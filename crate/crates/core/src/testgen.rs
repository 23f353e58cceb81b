//! Test-case generation.
//!
//! A suite is generated from a well-formed model plus a list of pattern
//! configurations. The model contributes two things: a traversal (a
//! linearization of every Behaviour, following connector edges within each
//! form and declared order within each group) and the data-passing relation
//! (connectors of the DataPassing/MovedData kinds feed bindings from their
//! edge sources to their targets).
//!
//! Binding inheritance is element-level and follows the traversal: an element
//! exposes its own configured bindings plus whatever it inherited, so values
//! propagate transitively along data-passing chains. A case only absorbs
//! inherited entries for names its pattern schema accepts, its own bindings
//! always win, and among several sources the lexicographically first by id
//! wins per name. Each inherited value is annotated on the consuming step
//! with the immediate source. MovedData additionally marks the consuming
//! case's precondition as dependent on the source element, since moved data
//! is gone at the source once consumed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canon::canonical_form;
use crate::diag::Diagnostic;
use crate::model::{ConnectorKind, ElementId, ElementKind, ModelGraph};
use crate::patterns::{
    parse_index, validate_bindings, validate_config_shape, Action, ActionTemplate, CheckInstance,
    Goal, PatternConfig, PatternKind, VariableSchema,
};
use crate::rules::check_wellformed;

pub const SUITE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSuite {
    pub version: u32,
    /// sha-256 over the model's canonical serialization; ties a suite to the
    /// model independent of element naming.
    pub model_ref: String,
    /// Every Behaviour in execution order.
    pub traversal: Vec<ElementId>,
    pub cases: Vec<TestCase>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestCase {
    /// Stable content address: model_ref, target, pattern and goal hashed.
    pub id: String,
    pub pattern: PatternKind,
    pub goal: Goal,
    pub precondition: String,
    pub steps: Vec<TestStep>,
    pub checks: Vec<CheckInstance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestStep {
    pub action: Action,
    pub target: ElementId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<StepInput>,
    /// Set when `input` was inherited over a data-passing connector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepInput {
    Text(String),
    /// Sort feeds (value, criterion) pairs.
    Pair(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleError {
    pub form: ElementId,
    /// Scope members that could not be placed, sorted by id.
    pub members: Vec<ElementId>,
}

impl fmt::Display for CycleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "connector cycle within '{}' involving", self.form)?;
        for m in &self.members {
            write!(f, " '{m}'")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    /// The model has rule violations; generation refuses to start.
    IllFormed(Vec<Diagnostic>),
    Cycle(CycleError),
    DuplicateCase { target: ElementId, pattern: PatternKind, goal: Goal },
    /// Configuration rejected; `diags` carries the CFG findings.
    InvalidConfig { index: usize, target: ElementId, diags: Vec<Diagnostic> },
    UnknownTarget { index: usize, target: ElementId },
    TargetNotBehaviour { index: usize, target: ElementId },
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::IllFormed(diags) => {
                write!(f, "model is not well-formed ({} finding(s))", diags.len())
            }
            GenError::Cycle(c) => c.fmt(f),
            GenError::DuplicateCase { target, pattern, goal } => write!(
                f,
                "duplicate configuration: target '{target}', pattern {pattern}, goal {}",
                goal.tag()
            ),
            GenError::InvalidConfig { index, target, diags } => {
                write!(f, "configuration {index} (target '{target}') is invalid")?;
                for d in diags {
                    write!(f, "; {}: {}", d.rule.id(), d.message)?;
                }
                Ok(())
            }
            GenError::UnknownTarget { index, target } => {
                write!(f, "configuration {index}: target '{target}' is not in the model")
            }
            GenError::TargetNotBehaviour { index, target } => {
                write!(f, "configuration {index}: target '{target}' is not a Behaviour")
            }
        }
    }
}

/// Execution order of all Behaviours. Within each form, the Init, the
/// structural children, the Behaviours and the End are topologically sorted
/// along connector edges; ties fall back to declared order (Init first,
/// structural children, then Behaviours, then End). Nested forms and groups
/// are expanded in place; a group contributes its children in declared order
/// (structs, then behaviours) and its internal edges impose no order (groups
/// have no entry/exit points, so an edge cycle among group members is legal
/// and must not wedge the traversal).
pub fn linearize(g: &ModelGraph) -> Result<Vec<ElementId>, CycleError> {
    let mut out = Vec::new();
    expand_form(g, g.root(), &mut out)?;
    Ok(out)
}

fn expand_form(g: &ModelGraph, form: &ElementId, out: &mut Vec<ElementId>) -> Result<(), CycleError> {
    let mut nodes: Vec<ElementId> = Vec::new();
    nodes.extend(g.form_init(form).cloned());
    nodes.extend(g.inner_structs(form).iter().cloned());
    nodes.extend(g.inner_behaviour(form).iter().cloned());
    nodes.extend(g.form_end(form).cloned());

    let position: BTreeMap<&ElementId, usize> =
        nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut preds: Vec<BTreeSet<usize>> = alloc::vec![BTreeSet::new(); nodes.len()];
    for edge in g.all_edges() {
        if let (Some(&from), Some(&to)) = (position.get(&edge.from), position.get(&edge.to)) {
            preds[to].insert(from);
        }
    }

    let mut placed: Vec<bool> = alloc::vec![false; nodes.len()];
    let mut order: Vec<usize> = Vec::new();
    for _ in 0..nodes.len() {
        let next = (0..nodes.len())
            .find(|&i| !placed[i] && preds[i].iter().all(|&p| placed[p]));
        match next {
            Some(i) => {
                placed[i] = true;
                order.push(i);
            }
            None => {
                let mut members: Vec<ElementId> = (0..nodes.len())
                    .filter(|&i| !placed[i])
                    .map(|i| nodes[i].clone())
                    .collect();
                members.sort();
                return Err(CycleError { form: form.clone(), members });
            }
        }
    }

    for i in order {
        let node = &nodes[i];
        match g.kind(node) {
            Some(ElementKind::Behaviour) => out.push(node.clone()),
            Some(ElementKind::Form) => expand_form(g, node, out)?,
            Some(ElementKind::Group) => expand_group(g, node, out)?,
            _ => {}
        }
    }
    Ok(())
}

fn expand_group(g: &ModelGraph, group: &ElementId, out: &mut Vec<ElementId>) -> Result<(), CycleError> {
    for s in g.inner_structs(group) {
        match g.kind(s) {
            Some(ElementKind::Form) => expand_form(g, s, out)?,
            Some(ElementKind::Group) => expand_group(g, s, out)?,
            _ => {}
        }
    }
    for b in g.inner_behaviour(group) {
        out.push(b.clone());
    }
    Ok(())
}

/// Full content hash of the canonical model serialization.
pub fn model_ref(g: &ModelGraph) -> String {
    hex::encode(Sha256::digest(canonical_form(g).label.as_bytes()))
}

pub fn case_id(model_ref: &str, target: &ElementId, pattern: PatternKind, goal: Goal) -> String {
    let mut h = Sha256::new();
    h.update(model_ref.as_bytes());
    h.update([0u8]);
    h.update(target.as_str().as_bytes());
    h.update([0u8]);
    h.update(pattern.name().as_bytes());
    h.update([0u8]);
    h.update(goal.tag().as_bytes());
    let digest = hex::encode(h.finalize());
    format!("tc-{}", &digest[..16])
}

/// (value, immediate source if inherited)
type Env = BTreeMap<String, (String, Option<ElementId>)>;

pub fn generate_suite(g: &ModelGraph, configs: &[PatternConfig]) -> Result<TestSuite, GenError> {
    let diags = check_wellformed(g);
    if !diags.is_empty() {
        return Err(GenError::IllFormed(diags));
    }
    let traversal = linearize(g).map_err(GenError::Cycle)?;

    let mut seen: BTreeSet<(&ElementId, PatternKind, Goal)> = BTreeSet::new();
    for c in configs {
        if !seen.insert((&c.target, c.pattern, c.goal)) {
            return Err(GenError::DuplicateCase {
                target: c.target.clone(),
                pattern: c.pattern,
                goal: c.goal,
            });
        }
    }

    for (index, c) in configs.iter().enumerate() {
        match g.element(&c.target) {
            None => {
                return Err(GenError::UnknownTarget { index, target: c.target.clone() })
            }
            Some(e) if e.kind != ElementKind::Behaviour => {
                return Err(GenError::TargetNotBehaviour { index, target: c.target.clone() })
            }
            Some(_) => {}
        }
        // Completeness of bindings is judged after inheritance; here only the
        // graph-independent shape of the config itself is checked.
        let diags = validate_config_shape(c);
        if !diags.is_empty() {
            return Err(GenError::InvalidConfig { index, target: c.target.clone(), diags });
        }
    }

    // Incoming data-passing sources per element, sorted by source id.
    let mut dp_sources: BTreeMap<&ElementId, BTreeSet<&ElementId>> = BTreeMap::new();
    let mut moved_sources: BTreeMap<&ElementId, BTreeSet<&ElementId>> = BTreeMap::new();
    for conn in g.connectors() {
        let (dp, moved) = match conn.kind {
            ConnectorKind::Sequence => continue,
            ConnectorKind::SequenceWithDataPassing => (true, false),
            ConnectorKind::SequenceWithMovedData => (true, true),
        };
        for edge in &conn.edges {
            if dp {
                dp_sources.entry(&edge.to).or_default().insert(&edge.from);
            }
            if moved {
                moved_sources.entry(&edge.to).or_default().insert(&edge.from);
            }
        }
    }

    // Element environments, built along the traversal so that values flow
    // transitively in execution order. Later configs for the same element
    // never override earlier ones.
    let mut envs: BTreeMap<ElementId, Env> = BTreeMap::new();
    for c in configs {
        let env = envs.entry(c.target.clone()).or_default();
        for (name, value) in &c.bindings {
            env.entry(name.clone()).or_insert((value.clone(), None));
        }
    }
    for t in &traversal {
        let mut env = envs.remove(t).unwrap_or_default();
        for src in dp_sources.get(t).into_iter().flatten() {
            if let Some(source_env) = envs.get(*src) {
                for (name, (value, _)) in source_env {
                    env.entry(name.clone())
                        .or_insert_with(|| (value.clone(), Some((*src).clone())));
                }
            }
        }
        envs.insert(t.clone(), env);
    }

    let reference = model_ref(g);
    let mut keyed: Vec<(usize, PatternKind, Goal, TestCase)> = Vec::new();
    let order_of: BTreeMap<&ElementId, usize> =
        traversal.iter().enumerate().map(|(i, t)| (t, i)).collect();

    for (index, c) in configs.iter().enumerate() {
        let spec = c.pattern.spec();
        let empty = Env::new();
        let env = envs.get(&c.target).unwrap_or(&empty);

        // Effective bindings: the config's own, plus inherited entries for
        // names this pattern's schema can accept.
        let mut effective: BTreeMap<String, (String, Option<ElementId>)> = BTreeMap::new();
        for (name, value) in &c.bindings {
            effective.insert(name.clone(), (value.clone(), None));
        }
        for (name, (value, origin)) in env {
            if origin.is_some() && accepts(&spec.variables, name) {
                effective
                    .entry(name.clone())
                    .or_insert((value.clone(), origin.clone()));
            }
        }

        let flat: BTreeMap<String, String> =
            effective.iter().map(|(k, (v, _))| (k.clone(), v.clone())).collect();
        let mut diags = Vec::new();
        validate_bindings(spec, &flat, &c.target, &mut diags);
        if !diags.is_empty() {
            return Err(GenError::InvalidConfig { index, target: c.target.clone(), diags });
        }

        let mut precondition = String::from(spec.precondition);
        for src in moved_sources.get(&c.target).into_iter().flatten() {
            precondition.push_str(&format!("; depends on {src}"));
        }

        let value_of = |name: &str| effective.get(name).map(|(v, _)| v.clone());
        let origin_of = |name: &str| {
            effective
                .get(name)
                .and_then(|(_, o)| o.as_ref())
                .map(|src| format!("data-passed from {src}"))
        };
        let steps = match spec.actions {
            ActionTemplate::Fixed(template) => template
                .iter()
                .map(|s| TestStep {
                    action: s.action,
                    target: c.target.clone(),
                    input: s.var.and_then(value_of).map(StepInput::Text),
                    origin: s.var.and_then(origin_of),
                })
                .collect(),
            ActionTemplate::PerVariable { action } => {
                per_variable_steps(action, &spec.variables, &c.target, &effective)
            }
        };

        let case = TestCase {
            id: case_id(&reference, &c.target, c.pattern, c.goal),
            pattern: c.pattern,
            goal: c.goal,
            precondition,
            steps,
            checks: c.checks.clone(),
        };
        keyed.push((order_of[&c.target], c.pattern, c.goal, case));
    }

    keyed.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    Ok(TestSuite {
        version: SUITE_FORMAT_VERSION,
        model_ref: reference,
        traversal,
        cases: keyed.into_iter().map(|(_, _, _, case)| case).collect(),
    })
}

fn per_variable_steps(
    action: Action,
    schema: &VariableSchema,
    target: &ElementId,
    effective: &BTreeMap<String, (String, Option<ElementId>)>,
) -> Vec<TestStep> {
    let lookup = |name: &str| effective.get(name).cloned();
    let mut steps = Vec::new();
    match schema {
        VariableSchema::Indexed { prefix } => {
            for i in 1.. {
                let Some((value, origin)) = lookup(&format!("{prefix}{i}")) else { break };
                steps.push(TestStep {
                    action,
                    target: target.clone(),
                    input: Some(StepInput::Text(value)),
                    origin: origin.map(|src| format!("data-passed from {src}")),
                });
            }
        }
        VariableSchema::IndexedPair { value_prefix, criterion_prefix } => {
            for i in 1.. {
                let Some((value, v_origin)) = lookup(&format!("{value_prefix}{i}")) else { break };
                let Some((criterion, c_origin)) = lookup(&format!("{criterion_prefix}{i}")) else {
                    break;
                };
                steps.push(TestStep {
                    action,
                    target: target.clone(),
                    input: Some(StepInput::Pair(value, criterion)),
                    origin: v_origin
                        .or(c_origin)
                        .map(|src| format!("data-passed from {src}")),
                });
            }
        }
        VariableSchema::Fixed(_) => {}
    }
    steps
}

fn accepts(schema: &VariableSchema, name: &str) -> bool {
    match schema {
        VariableSchema::Fixed(names) => names.contains(&name),
        VariableSchema::Indexed { prefix } => parse_index(name, prefix).is_some(),
        VariableSchema::IndexedPair { value_prefix, criterion_prefix } => {
            parse_index(name, value_prefix).is_some() || parse_index(name, criterion_prefix).is_some()
        }
    }
}

pub fn suite_to_json(suite: &TestSuite) -> String {
    let mut out = serde_json::to_string_pretty(suite).expect("suite serialization");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::minimal;
    use crate::model::GraphBuilder;
    use alloc::string::ToString;
    use alloc::vec;

    fn ids(v: &[ElementId]) -> Vec<&str> {
        v.iter().map(ElementId::as_str).collect()
    }

    #[test]
    fn minimal_traversal() {
        assert_eq!(ids(&linearize(&minimal()).unwrap()), ["b"]);
    }

    #[test]
    fn traversal_follows_edges_then_declared_order() {
        // Declared b2 before b1, but edges run i -> b1 -> b2 -> e.
        let g = GraphBuilder::with_model("m", "i", "e")
            .behaviour("b2")
            .behaviour("b1")
            .child_behaviours("m", ["b2", "b1"])
            .sequence("c1", "i", "b1")
            .sequence("c2", "b1", "b2")
            .sequence("c3", "b2", "e")
            .build();
        assert_eq!(ids(&linearize(&g).unwrap()), ["b1", "b2"]);
    }

    fn nested() -> ModelGraph {
        // m { i1, top, F { i0, inner, e0 }, e1 } with the form between the
        // model-level behaviour and the end.
        GraphBuilder::with_model("m", "i1", "e1")
            .behaviour("top")
            .element("F", ElementKind::Form)
            .element("i0", ElementKind::Init)
            .element("e0", ElementKind::End)
            .behaviour("inner")
            .child_behaviours("m", ["top"])
            .child_structs("m", ["F"])
            .init("F", "i0")
            .end("F", "e0")
            .child_behaviours("F", ["inner"])
            .sequence("c1", "i1", "top")
            .sequence("c2", "top", "F")
            .sequence("c3", "F", "e1")
            .sequence("c4", "i0", "inner")
            .sequence("c5", "inner", "e0")
            .build()
    }

    #[test]
    fn nested_forms_expand_in_place() {
        assert!(check_wellformed(&nested()).is_empty());
        assert_eq!(ids(&linearize(&nested()).unwrap()), ["top", "inner"]);
    }

    #[test]
    fn group_members_expand_in_declared_order_even_with_edge_cycles() {
        let g = GraphBuilder::with_model("m", "i", "e")
            .element("grp", ElementKind::Group)
            .behaviour("solo")
            .child_structs("m", ["grp"])
            .child_behaviours("m", ["solo"])
            .behaviour("z")
            .behaviour("a")
            .child_behaviours("grp", ["z", "a"])
            .sequence("c1", "i", "solo")
            .sequence("c2", "solo", "grp")
            .sequence("c3", "grp", "e")
            .sequence("c4", "z", "a")
            .sequence("c5", "a", "z")
            .build();
        assert!(check_wellformed(&g).is_empty());
        assert_eq!(ids(&linearize(&g).unwrap()), ["solo", "z", "a"]);
    }

    #[test]
    fn form_level_cycles_are_reported() {
        let g = GraphBuilder::with_model("m", "i", "e")
            .behaviour("b1")
            .behaviour("b2")
            .child_behaviours("m", ["b1", "b2"])
            .sequence("c1", "i", "b1")
            .sequence("c2", "b1", "b2")
            .sequence("c3", "b2", "b1")
            .sequence("c4", "b2", "e")
            .build();
        assert!(check_wellformed(&g).is_empty());
        let err = linearize(&g).unwrap_err();
        assert_eq!(err.form, "m".into());
        assert_eq!(ids(&err.members), ["b1", "b2", "e"]);
    }

    fn cfg(
        pattern: PatternKind,
        goal: Goal,
        target: &str,
        bindings: &[(&str, &str)],
        checks: &[(&str, &[&str])],
    ) -> PatternConfig {
        PatternConfig {
            pattern,
            goal,
            target: target.into(),
            bindings: bindings
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            checks: checks
                .iter()
                .map(|(tag, params)| CheckInstance {
                    tag: tag.to_string(),
                    params: params.iter().map(|p| p.to_string()).collect(),
                })
                .collect(),
        }
    }

    fn pipeline(kind: ConnectorKind) -> ModelGraph {
        GraphBuilder::with_model("m", "i", "e")
            .behaviour("src")
            .behaviour("tgt")
            .child_behaviours("m", ["src", "tgt"])
            .sequence("c1", "i", "src")
            .connector("c2", kind, [("src", "tgt")])
            .sequence("c3", "tgt", "e")
            .build()
    }

    #[test]
    fn bindings_flow_across_data_passing_connectors() {
        let g = pipeline(ConnectorKind::SequenceWithDataPassing);
        let configs = vec![
            cfg(
                PatternKind::Login,
                Goal::LoginValid,
                "src",
                &[("username", "u"), ("password", "p")],
                &[("SamePage", &[])],
            ),
            cfg(PatternKind::Login, Goal::LoginInvalid, "tgt", &[], &[("SamePage", &[])]),
        ];
        let suite = generate_suite(&g, &configs).unwrap();
        assert_eq!(ids(&suite.traversal), ["src", "tgt"]);
        assert_eq!(suite.cases.len(), 2);

        let inherited = &suite.cases[1];
        assert_eq!(inherited.precondition, "true");
        assert_eq!(inherited.steps[0].input, Some(StepInput::Text("u".into())));
        assert_eq!(
            inherited.steps[0].origin.as_deref(),
            Some("data-passed from src")
        );
        // Own bindings would win; here there are none, so both flow.
        assert_eq!(inherited.steps[1].input, Some(StepInput::Text("p".into())));
        // The source's own case carries no origin notes.
        assert!(suite.cases[0].steps.iter().all(|s| s.origin.is_none()));
    }

    #[test]
    fn moved_data_marks_the_precondition() {
        let g = pipeline(ConnectorKind::SequenceWithMovedData);
        let configs = vec![
            cfg(
                PatternKind::Login,
                Goal::LoginValid,
                "src",
                &[("username", "u"), ("password", "p")],
                &[("SamePage", &[])],
            ),
            cfg(PatternKind::Login, Goal::LoginInvalid, "tgt", &[], &[("SamePage", &[])]),
        ];
        let suite = generate_suite(&g, &configs).unwrap();
        assert_eq!(suite.cases[1].precondition, "true; depends on src");
    }

    #[test]
    fn inheritance_only_fills_names_the_schema_accepts() {
        let g = pipeline(ConnectorKind::SequenceWithDataPassing);
        let configs = vec![
            cfg(
                PatternKind::Input,
                Goal::InputValid,
                "src",
                &[("input", "hello")],
                &[("MessageBox", &[])],
            ),
            // Login cannot use 'input'; with nothing else inherited the
            // username/password requirement fails after inheritance.
            cfg(PatternKind::Login, Goal::LoginValid, "tgt", &[], &[("SamePage", &[])]),
        ];
        let err = generate_suite(&g, &configs).unwrap_err();
        match err {
            GenError::InvalidConfig { index, target, .. } => {
                assert_eq!(index, 1);
                assert_eq!(target, "tgt".into());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn indexed_patterns_emit_one_step_per_value() {
        let g = minimal();
        let configs = vec![cfg(
            PatternKind::Find,
            Goal::FindValueFound,
            "b",
            &[("v1", "alpha"), ("v2", "beta")],
            &[("ResultHasCount", &["2"])],
        )];
        let suite = generate_suite(&g, &configs).unwrap();
        let steps = &suite.cases[0].steps;
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].action, Action::Provide);
        assert_eq!(steps[0].input, Some(StepInput::Text("alpha".into())));
        assert_eq!(steps[1].input, Some(StepInput::Text("beta".into())));
    }

    #[test]
    fn sort_steps_carry_value_criterion_pairs() {
        let g = minimal();
        let configs = vec![cfg(
            PatternKind::Sort,
            Goal::SortAscending,
            "b",
            &[("v1", "10"), ("c1", "price"), ("v2", "20"), ("c2", "price")],
            &[("SortedByCriteria", &[])],
        )];
        let suite = generate_suite(&g, &configs).unwrap();
        let steps = &suite.cases[0].steps;
        assert_eq!(steps[0].input, Some(StepInput::Pair("10".into(), "price".into())));
        assert_eq!(steps[1].input, Some(StepInput::Pair("20".into(), "price".into())));
    }

    #[test]
    fn case_order_and_duplicate_refusal() {
        let g = GraphBuilder::with_model("m", "i", "e")
            .behaviour("early")
            .behaviour("late")
            .child_behaviours("m", ["early", "late"])
            .sequence("c1", "i", "early")
            .sequence("c2", "early", "late")
            .sequence("c3", "late", "e")
            .build();
        let call = |t: &str, goal| cfg(PatternKind::Call, goal, t, &[], &[("PopupMessage", &[])]);
        let rot = |t: &str| {
            cfg(PatternKind::Rotation, Goal::RotationIsPossible, t, &[], &[("RotationPossible", &[])])
        };
        // Deliberately out of order.
        let configs = vec![
            call("late", Goal::CallFail),
            rot("late"),
            call("early", Goal::CallSuccess),
            call("late", Goal::CallSuccess),
        ];
        let suite = generate_suite(&g, &configs).unwrap();
        let summary: Vec<(&str, PatternKind, Goal)> = suite
            .cases
            .iter()
            .zip(["early", "late", "late", "late"])
            .map(|(c, t)| (t, c.pattern, c.goal))
            .collect();
        assert_eq!(
            summary,
            vec![
                ("early", PatternKind::Call, Goal::CallSuccess),
                ("late", PatternKind::Rotation, Goal::RotationIsPossible),
                ("late", PatternKind::Call, Goal::CallSuccess),
                ("late", PatternKind::Call, Goal::CallFail),
            ]
        );

        let mut dup = configs.clone();
        dup.push(call("late", Goal::CallFail));
        assert!(matches!(
            generate_suite(&g, &dup),
            Err(GenError::DuplicateCase { .. })
        ));
    }

    #[test]
    fn case_ids_are_stable_and_distinct() {
        let g = minimal();
        let configs = vec![
            cfg(PatternKind::Call, Goal::CallSuccess, "b", &[], &[("PopupMessage", &[])]),
            cfg(PatternKind::Call, Goal::CallFail, "b", &[], &[("PopupMessage", &[])]),
        ];
        let a = generate_suite(&g, &configs).unwrap();
        let b = generate_suite(&g, &configs).unwrap();
        assert_eq!(a.cases[0].id, b.cases[0].id);
        assert_ne!(a.cases[0].id, a.cases[1].id);
        assert!(a.cases[0].id.starts_with("tc-"));
        assert_eq!(a.cases[0].id.len(), 19);
        assert_eq!(a.model_ref.len(), 64);
    }

    #[test]
    fn generation_gates_on_wellformedness_and_targets() {
        let broken = GraphBuilder::with_model("m", "i", "e").build();
        assert!(matches!(
            generate_suite(&broken, &[]),
            Err(GenError::IllFormed(_))
        ));

        let g = minimal();
        let unknown = vec![cfg(PatternKind::Call, Goal::CallSuccess, "nope", &[], &[("PopupMessage", &[])])];
        assert!(matches!(
            generate_suite(&g, &unknown),
            Err(GenError::UnknownTarget { index: 0, .. })
        ));
        let not_behaviour =
            vec![cfg(PatternKind::Call, Goal::CallSuccess, "m", &[], &[("PopupMessage", &[])])];
        assert!(matches!(
            generate_suite(&g, &not_behaviour),
            Err(GenError::TargetNotBehaviour { index: 0, .. })
        ));
        let bad_goal = vec![cfg(PatternKind::Call, Goal::LoginValid, "b", &[], &[("PopupMessage", &[])])];
        assert!(matches!(
            generate_suite(&g, &bad_goal),
            Err(GenError::InvalidConfig { index: 0, .. })
        ));
    }

    #[test]
    fn suites_serialize_round_trip() {
        let g = minimal();
        let configs = vec![cfg(
            PatternKind::Login,
            Goal::LoginValid,
            "b",
            &[("username", "u"), ("password", "p")],
            &[("ChangeToPage", &["home"])],
        )];
        let suite = generate_suite(&g, &configs).unwrap();
        let text = suite_to_json(&suite);
        let back: TestSuite = serde_json::from_str(&text).unwrap();
        assert_eq!(back, suite);
    }
}
