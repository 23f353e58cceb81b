//! Bounded instance search: enumerate every well-formed model within a scope,
//! up to kind-preserving isomorphism.
//!
//! A [`Scope`] gives upper bounds per element kind plus a connector budget.
//! Enumeration is the disjoint sum over exact atom-count profiles: a
//! well-formed model cannot have spare atoms (an unused element would violate
//! the single-parent rule), so instances from different profiles are never
//! isomorphic. Within one profile the search assembles candidates in stages:
//!
//! 1. a parent tree over Groups/Forms rooted at the Model,
//! 2. a distribution of Behaviours over structural owners (the Model and
//!    every Form need one or more, Groups two or more),
//! 3. orderings for Group child lists (Form child order carries no meaning,
//!    Group order does),
//! 4. pairwise edge-disjoint connector contents drawn from the sibling edge
//!    universe.
//!
//! Stages 2 and 4 break symmetries that plain relabeling of interchangeable
//! atoms would undo anyway (Behaviours are assigned contiguously; each Form
//! is paired with a fixed Init/End; connector contents are chosen in strictly
//! increasing order). Every fully assembled candidate still runs through the
//! complete rule checker and canonical labeling, so the symmetry breaking can
//! only skip duplicates, never distinct instances; the naive-enumeration
//! equivalence tests in the acceptance suite pin that down.
//!
//! Connectors always carry at least one edge and all carry the plain
//! Sequence kind: an instance extended by an empty connector (or a re-tagged
//! kind) adds nothing to structural exploration, so those are not enumerated.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, permutations};
use crate::diag::Rule;
use crate::model::{
    ConnectorKind, Edge, ElementId, ElementKind, GraphBuilder, ModelGraph,
};
use crate::patterns::{PatternKind, ALL_PATTERNS};
use crate::rules::check_wellformed;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Upper bounds per kind. Enumeration covers every exact profile up to these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scope {
    pub init: usize,
    pub end: usize,
    pub behaviour: usize,
    pub group: usize,
    pub form: usize,
    pub connector: usize,
    pub edges_per_connector: usize,
}

impl Default for Scope {
    fn default() -> Self {
        Scope {
            init: 1,
            end: 1,
            behaviour: 1,
            group: 0,
            form: 0,
            connector: 2,
            edges_per_connector: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinderError {
    /// More candidates than the budget allows. The message depends only on
    /// the budget so that output is identical however work was split.
    BudgetExceeded { budget: u64 },
}

impl fmt::Display for FinderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinderError::BudgetExceeded { budget } => write!(
                f,
                "search budget exceeded: more than {budget} candidate instances; raise the budget or shrink the scope"
            ),
        }
    }
}

/// One well-formed instance in canonical form. `label` is the canonical
/// serialization; equal labels mean isomorphic models.
#[derive(Debug, Clone)]
pub struct FoundInstance {
    pub label: String,
    pub graph: ModelGraph,
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Canonical instances, sorted by label.
    pub instances: Vec<FoundInstance>,
    /// Fully assembled candidates that were inspected.
    pub explored: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Profile {
    inits: usize,
    ends: usize,
    behaviours: usize,
    groups: usize,
    forms: usize,
    connectors: usize,
}

/// An independent unit of enumeration work (one exact profile). Tasks can run
/// on separate threads; merging their outputs is deterministic regardless of
/// how they were scheduled.
#[derive(Debug, Clone)]
pub struct EnumTask {
    profile: Profile,
    edges_per_connector: usize,
}

#[derive(Debug, Clone)]
pub struct TaskOutput {
    pub instances: Vec<FoundInstance>,
    pub explored: u64,
}

/// Exact profiles worth exploring. Necessary conditions for well-formedness
/// prune the rest: every form (the Model included) owns exactly one Init and
/// one End and no other element may own them, so Init/End counts are pinned
/// to form count; Behaviour and connector minima follow from the ownership
/// and reachability rules (each of the `forms + 1` Init atoms needs an
/// outgoing edge and each End an incoming one, and no connector may touch
/// two of them).
pub fn enumeration_tasks(scope: &Scope) -> Vec<EnumTask> {
    let mut tasks = Vec::new();
    for forms in 0..=scope.form {
        let terminals = forms + 1;
        if terminals > scope.init || terminals > scope.end {
            continue;
        }
        for groups in 0..=scope.group {
            let min_behaviours = 1 + forms + 2 * groups;
            for behaviours in min_behaviours..=scope.behaviour {
                for connectors in 2 * terminals..=scope.connector {
                    tasks.push(EnumTask {
                        profile: Profile {
                            inits: terminals,
                            ends: terminals,
                            behaviours,
                            groups,
                            forms,
                            connectors,
                        },
                        edges_per_connector: scope.edges_per_connector,
                    });
                }
            }
        }
    }
    tasks
}

pub fn merge_outputs(
    outputs: impl IntoIterator<Item = TaskOutput>,
    budget: u64,
) -> Result<Enumeration, FinderError> {
    let mut merged: BTreeMap<String, ModelGraph> = BTreeMap::new();
    let mut explored: u64 = 0;
    for output in outputs {
        explored += output.explored;
        for instance in output.instances {
            merged.insert(instance.label, instance.graph);
        }
    }
    if explored > budget {
        return Err(FinderError::BudgetExceeded { budget });
    }
    Ok(Enumeration {
        instances: merged
            .into_iter()
            .map(|(label, graph)| FoundInstance { label, graph })
            .collect(),
        explored,
    })
}

pub fn enumerate_instances(scope: &Scope, budget: u64) -> Result<Enumeration, FinderError> {
    let mut outputs = Vec::new();
    for task in enumeration_tasks(scope) {
        outputs.push(task.run(budget)?);
    }
    merge_outputs(outputs, budget)
}

impl EnumTask {
    pub fn run(&self, budget: u64) -> Result<TaskOutput, FinderError> {
        let p = self.profile;
        let pool = |prefix: &str, n: usize| -> Vec<ElementId> {
            (1..=n).map(|k| ElementId::new(format!("{prefix}{k}"))).collect()
        };
        let model = ElementId::new("m");
        let inits = pool("i", p.inits);
        let ends = pool("e", p.ends);
        let behaviours = pool("b", p.behaviours);
        let groups = pool("g", p.groups);
        let forms = pool("f", p.forms);

        // Structural owners in fixed order; index 0 is the Model.
        let mut structurals = alloc::vec![model.clone()];
        structurals.extend(groups.iter().cloned());
        structurals.extend(forms.iter().cloned());
        let is_group = |j: usize| (1..=p.groups).contains(&j);
        // Form j (the Model or a Form) is paired with inits[k]/ends[k].
        let terminal_index = |j: usize| -> Option<usize> {
            if j == 0 {
                Some(0)
            } else if j > p.groups {
                Some(j - p.groups)
            } else {
                None
            }
        };

        let mut kinds: BTreeMap<ElementId, ElementKind> = BTreeMap::new();
        kinds.insert(model.clone(), ElementKind::Model);
        for i in &inits {
            kinds.insert(i.clone(), ElementKind::Init);
        }
        for e in &ends {
            kinds.insert(e.clone(), ElementKind::End);
        }
        for b in &behaviours {
            kinds.insert(b.clone(), ElementKind::Behaviour);
        }
        for g in &groups {
            kinds.insert(g.clone(), ElementKind::Group);
        }
        for f in &forms {
            kinds.insert(f.clone(), ElementKind::Form);
        }

        // Behaviour minima per owner: Model 1, Groups 2, Forms 1.
        let minima: Vec<usize> =
            (0..structurals.len()).map(|j| if is_group(j) { 2 } else { 1 }).collect();

        let mut explored: u64 = 0;
        let mut found: BTreeMap<String, ModelGraph> = BTreeMap::new();

        for tree in parent_trees(structurals.len()) {
            let mut struct_children: Vec<Vec<ElementId>> = alloc::vec![Vec::new(); structurals.len()];
            for (child, &owner) in tree.iter().enumerate() {
                struct_children[owner].push(structurals[child + 1].clone());
            }

            for loads in distributions(p.behaviours, &minima) {
                let mut behav_children: Vec<Vec<ElementId>> =
                    alloc::vec![Vec::new(); structurals.len()];
                let mut next = 0;
                for (j, &load) in loads.iter().enumerate() {
                    behav_children[j] = behaviours[next..next + load].to_vec();
                    next += load;
                }

                // Group structural-child orderings are semantic; enumerate
                // them. Behaviour orderings are not enumerated: finder atoms
                // are indistinguishable, so any reordering is undone by a
                // relabeling the canonical dedup already covers.
                let orderings: Vec<Vec<Vec<ElementId>>> = (0..structurals.len())
                    .map(|j| {
                        if is_group(j) && struct_children[j].len() > 1 {
                            permutations(struct_children[j].len())
                                .into_iter()
                                .map(|perm| {
                                    perm.into_iter()
                                        .map(|k| struct_children[j][k].clone())
                                        .collect()
                                })
                                .collect()
                        } else {
                            alloc::vec![struct_children[j].clone()]
                        }
                    })
                    .collect();

                let mut choice: Vec<usize> = alloc::vec![0; structurals.len()];
                'orders: loop {
                    let arranged: Vec<&Vec<ElementId>> =
                        (0..structurals.len()).map(|j| &orderings[j][choice[j]]).collect();

                    self.explore_connectors(
                        &structurals,
                        &arranged,
                        &behav_children,
                        &inits,
                        &ends,
                        &kinds,
                        &terminal_index,
                        budget,
                        &mut explored,
                        &mut found,
                    )?;

                    let mut pos = 0;
                    loop {
                        if pos == structurals.len() {
                            break 'orders;
                        }
                        choice[pos] += 1;
                        if choice[pos] < orderings[pos].len() {
                            break;
                        }
                        choice[pos] = 0;
                        pos += 1;
                    }
                }
            }
        }

        Ok(TaskOutput {
            instances: found
                .into_iter()
                .map(|(label, graph)| FoundInstance { label, graph })
                .collect(),
            explored,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn explore_connectors(
        &self,
        structurals: &[ElementId],
        struct_children: &[&Vec<ElementId>],
        behav_children: &[Vec<ElementId>],
        inits: &[ElementId],
        ends: &[ElementId],
        kinds: &BTreeMap<ElementId, ElementKind>,
        terminal_index: &dyn Fn(usize) -> Option<usize>,
        budget: u64,
        explored: &mut u64,
        found: &mut BTreeMap<String, ModelGraph>,
    ) -> Result<(), FinderError> {
        // Sibling edge universe. Edges already violating a local rule (self
        // loop, edge out of an End or into an Init, an Init-to-End edge that
        // no connector could legally carry) are excluded up front; the final
        // full rule check keeps this pruning honest.
        let mut universe: Vec<Edge> = Vec::new();
        for j in 0..structurals.len() {
            let mut siblings: Vec<&ElementId> = Vec::new();
            if let Some(t) = terminal_index(j) {
                siblings.push(&inits[t]);
                siblings.push(&ends[t]);
            }
            siblings.extend(struct_children[j].iter());
            siblings.extend(behav_children[j].iter());
            for from in &siblings {
                if kinds[*from] == ElementKind::End {
                    continue;
                }
                for to in &siblings {
                    if from == to || kinds[*to] == ElementKind::Init {
                        continue;
                    }
                    if kinds[*from] == ElementKind::Init && kinds[*to] == ElementKind::End {
                        continue;
                    }
                    universe.push(Edge::new((*from).clone(), (*to).clone()));
                }
            }
        }
        universe.sort();

        // Contents a single connector may legally hold: 1..=edges_per_connector
        // edges, one edge per source, sources disjoint from targets, at most
        // one Init/End endpoint.
        let mut contents: Vec<Vec<Edge>> = Vec::new();
        let mut partial: Vec<usize> = Vec::new();
        collect_contents(
            &universe,
            kinds,
            self.edges_per_connector,
            0,
            &mut partial,
            &mut contents,
        );
        contents.sort();

        let n = self.profile.connectors;
        let mut picked: Vec<usize> = Vec::new();
        let mut used: BTreeSet<Edge> = BTreeSet::new();
        self.pick_connectors(
            &contents,
            n,
            0,
            &mut picked,
            &mut used,
            &mut |picked: &[usize]| -> Result<(), FinderError> {
                *explored += 1;
                if *explored > budget {
                    return Err(FinderError::BudgetExceeded { budget });
                }
                let graph = assemble(
                    structurals,
                    struct_children,
                    behav_children,
                    inits,
                    ends,
                    kinds,
                    terminal_index,
                    picked.iter().map(|&i| contents[i].clone()),
                );
                if check_wellformed(&graph).is_empty() {
                    let canonical = canonical_form(&graph);
                    found.insert(canonical.label, canonical.graph);
                }
                Ok(())
            },
        )
    }

    fn pick_connectors(
        &self,
        contents: &[Vec<Edge>],
        remaining: usize,
        start: usize,
        picked: &mut Vec<usize>,
        used: &mut BTreeSet<Edge>,
        visit: &mut dyn FnMut(&[usize]) -> Result<(), FinderError>,
    ) -> Result<(), FinderError> {
        if remaining == 0 {
            return visit(picked);
        }
        for i in start..contents.len() {
            // Pairwise edge-disjoint: sharing an ordered pair is LC4.
            if contents[i].iter().any(|e| used.contains(e)) {
                continue;
            }
            for e in &contents[i] {
                used.insert(e.clone());
            }
            picked.push(i);
            self.pick_connectors(contents, remaining - 1, i + 1, picked, used, visit)?;
            picked.pop();
            for e in &contents[i] {
                used.remove(e);
            }
        }
        Ok(())
    }
}

fn collect_contents(
    universe: &[Edge],
    kinds: &BTreeMap<ElementId, ElementKind>,
    max_edges: usize,
    start: usize,
    partial: &mut Vec<usize>,
    out: &mut Vec<Vec<Edge>>,
) {
    if !partial.is_empty() {
        out.push(partial.iter().map(|&i| universe[i].clone()).collect());
    }
    if partial.len() == max_edges {
        return;
    }
    't: for i in start..universe.len() {
        let candidate = &universe[i];
        let mut terminals: BTreeSet<&ElementId> = BTreeSet::new();
        for id in [&candidate.from, &candidate.to] {
            if kinds[id].is_terminal() {
                terminals.insert(id);
            }
        }
        for &j in partial.iter() {
            let e = &universe[j];
            // One target per source within a connector.
            if e.from == candidate.from {
                continue 't;
            }
            // Sources and targets stay disjoint within a connector.
            if e.from == candidate.to || e.to == candidate.from {
                continue 't;
            }
            for id in [&e.from, &e.to] {
                if kinds[id].is_terminal() {
                    terminals.insert(id);
                }
            }
        }
        if terminals.len() > 1 {
            continue 't;
        }
        partial.push(i);
        collect_contents(universe, kinds, max_edges, i + 1, partial, out);
        partial.pop();
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    structurals: &[ElementId],
    struct_children: &[&Vec<ElementId>],
    behav_children: &[Vec<ElementId>],
    inits: &[ElementId],
    ends: &[ElementId],
    kinds: &BTreeMap<ElementId, ElementKind>,
    terminal_index: &dyn Fn(usize) -> Option<usize>,
    connector_contents: impl Iterator<Item = Vec<Edge>>,
) -> ModelGraph {
    let mut b = GraphBuilder::new().root(structurals[0].clone());
    for (id, kind) in kinds {
        b = b.element(id.clone(), *kind);
    }
    for (j, owner) in structurals.iter().enumerate() {
        b = b.child_structs(owner.clone(), struct_children[j].iter().cloned());
        b = b.child_behaviours(owner.clone(), behav_children[j].iter().cloned());
        if let Some(t) = terminal_index(j) {
            b = b.init(owner.clone(), inits[t].clone());
            b = b.end(owner.clone(), ends[t].clone());
        }
    }
    for (k, edges) in connector_contents.enumerate() {
        b = b.connector(
            ElementId::new(format!("c{}", k + 1)),
            ConnectorKind::Sequence,
            edges.into_iter().map(|e| (e.from, e.to)),
        );
    }
    b.build()
}

/// Parent assignments for the non-Model structurals (indices 1..n against the
/// owner list) that form a tree rooted at the Model.
fn parent_trees(n_structurals: usize) -> Vec<Vec<usize>> {
    let children = n_structurals - 1;
    if children == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut assignment: Vec<usize> = alloc::vec![0; children];
    loop {
        let valid = assignment.iter().enumerate().all(|(child, _)| {
            // Walk to the root; a cycle never reaches index 0.
            let mut at = child + 1;
            for _ in 0..=children {
                if at == 0 {
                    return true;
                }
                at = assignment[at - 1];
            }
            false
        }) && assignment.iter().enumerate().all(|(child, &owner)| owner != child + 1);
        if valid {
            out.push(assignment.clone());
        }
        let mut pos = 0;
        loop {
            if pos == children {
                return out;
            }
            assignment[pos] += 1;
            if assignment[pos] < n_structurals {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// All ways to split `total` into `minima.len()` loads respecting the minima.
fn distributions(total: usize, minima: &[usize]) -> Vec<Vec<usize>> {
    fn rec(total: usize, minima: &[usize], acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match minima.split_first() {
            None => {
                if total == 0 {
                    out.push(acc.clone());
                }
            }
            Some((&min, rest)) => {
                let reserve: usize = rest.iter().sum();
                if total < min + reserve {
                    return;
                }
                for load in min..=total - reserve {
                    acc.push(load);
                    rec(total - load, rest, acc, out);
                    acc.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut acc = Vec::new();
    rec(total, minima, &mut acc, &mut out);
    out
}

/// Named properties over models, for `find` (search for a model satisfying
/// the property) and `assert` (search for a well-formed counterexample).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    /// No rule violations at all.
    Wellformed,
    /// Some Form element exists below the Model.
    HasNestedForm,
    NoNestedForm,
    HasGroup,
    NoGroup,
    /// Every form's children are forward-reachable from its Init.
    InitReachesChildren,
    /// No diagnostics for this one rule (and referential integrity holds).
    RuleHolds(Rule),
    /// Some Behaviour carries this explicit pattern tag.
    HasPattern(PatternKind),
}

impl Predicate {
    pub fn parse(name: &str) -> Option<Predicate> {
        match name {
            "wellformed" => Some(Predicate::Wellformed),
            "has_nested_form" => Some(Predicate::HasNestedForm),
            "no_nested_form" => Some(Predicate::NoNestedForm),
            "has_group" => Some(Predicate::HasGroup),
            "no_group" => Some(Predicate::NoGroup),
            "init_reaches_children" => Some(Predicate::InitReachesChildren),
            _ => {
                if let Some(rule) = Rule::from_id(name) {
                    let structural = matches!(
                        rule,
                        Rule::F1
                            | Rule::F2
                            | Rule::F3
                            | Rule::F4
                            | Rule::F5
                            | Rule::F6
                            | Rule::Lc1
                            | Rule::Lc2
                            | Rule::Lc3
                            | Rule::Lc4
                            | Rule::Lc5
                            | Rule::Lc6
                            | Rule::LcM
                    );
                    return structural.then_some(Predicate::RuleHolds(rule));
                }
                let pattern = name.strip_prefix("has_pattern_")?;
                ALL_PATTERNS
                    .iter()
                    .copied()
                    .find(|p| p.snake_name() == pattern)
                    .map(Predicate::HasPattern)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Predicate::Wellformed => String::from("wellformed"),
            Predicate::HasNestedForm => String::from("has_nested_form"),
            Predicate::NoNestedForm => String::from("no_nested_form"),
            Predicate::HasGroup => String::from("has_group"),
            Predicate::NoGroup => String::from("no_group"),
            Predicate::InitReachesChildren => String::from("init_reaches_children"),
            Predicate::RuleHolds(rule) => String::from(rule.id()),
            Predicate::HasPattern(p) => format!("has_pattern_{}", p.snake_name()),
        }
    }

    pub fn eval(&self, g: &ModelGraph) -> bool {
        match self {
            Predicate::Wellformed => check_wellformed(g).is_empty(),
            Predicate::HasNestedForm => {
                g.elements().any(|e| e.kind == ElementKind::Form)
            }
            Predicate::NoNestedForm => {
                !g.elements().any(|e| e.kind == ElementKind::Form)
            }
            Predicate::HasGroup => g.elements().any(|e| e.kind == ElementKind::Group),
            Predicate::NoGroup => !g.elements().any(|e| e.kind == ElementKind::Group),
            Predicate::InitReachesChildren => g.elements().filter(|e| e.kind.is_form()).all(|f| {
                let mut members: Vec<&ElementId> = g.inner_structs(&f.id).iter().collect();
                members.extend(g.inner_behaviour(&f.id));
                match g.form_init(&f.id) {
                    None => members.is_empty(),
                    Some(init) => match g.forward_reach(init) {
                        Err(_) => false,
                        Ok(reach) => members.iter().all(|m| reach.contains(m)),
                    },
                }
            }),
            Predicate::RuleHolds(rule) => {
                let diags = check_wellformed(g);
                let ri = [Rule::Ri1, Rule::Ri2, Rule::Ri3, Rule::Ri4];
                if diags.iter().any(|d| ri.contains(&d.rule)) {
                    return false;
                }
                !diags.iter().any(|d| d.rule == *rule)
            }
            Predicate::HasPattern(p) => g
                .elements()
                .any(|e| e.behaviour.as_ref().is_some_and(|i| i.pattern == Some(*p))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FindOutcome {
    pub explored: u64,
    /// Canonically least satisfying instance; None means unsatisfiable
    /// within the scope.
    pub witness: Option<FoundInstance>,
}

#[derive(Debug, Clone)]
pub struct AssertionOutcome {
    pub explored: u64,
    /// Canonically least well-formed violator; None means the assertion
    /// holds for every instance within the scope.
    pub counterexample: Option<FoundInstance>,
}

pub fn find_in(enumeration: &Enumeration, pred: &Predicate) -> FindOutcome {
    FindOutcome {
        explored: enumeration.explored,
        witness: enumeration.instances.iter().find(|i| pred.eval(&i.graph)).cloned(),
    }
}

pub fn assert_in(enumeration: &Enumeration, pred: &Predicate) -> AssertionOutcome {
    AssertionOutcome {
        explored: enumeration.explored,
        counterexample: enumeration.instances.iter().find(|i| !pred.eval(&i.graph)).cloned(),
    }
}

pub fn find_instance(
    scope: &Scope,
    pred: &Predicate,
    budget: u64,
) -> Result<FindOutcome, FinderError> {
    Ok(find_in(&enumerate_instances(scope, budget)?, pred))
}

pub fn check_assertion(
    scope: &Scope,
    pred: &Predicate,
    budget: u64,
) -> Result<AssertionOutcome, FinderError> {
    Ok(assert_in(&enumerate_instances(scope, budget)?, pred))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::minimal;
    use alloc::vec;

    fn scope(
        init: usize,
        end: usize,
        behaviour: usize,
        group: usize,
        form: usize,
        connector: usize,
        edges: usize,
    ) -> Scope {
        Scope { init, end, behaviour, group, form, connector, edges_per_connector: edges }
    }

    #[test]
    fn the_minimal_scope_forces_one_instance() {
        let e = enumerate_instances(&scope(1, 1, 1, 0, 0, 2, 1), DEFAULT_BUDGET).unwrap();
        assert_eq!(e.instances.len(), 1);
        assert_eq!(e.instances[0].label, canonical_form(&minimal()).label);
    }

    #[test]
    fn two_behaviours_yield_exactly_two_instances() {
        // By hand: with single-edge connectors, one behaviour needs the
        // two-connector chain Init -> b -> End; two behaviours only work as
        // the three-connector chain Init -> b -> b' -> End (a diamond would
        // need four connectors and branching violates the per-connector
        // source function). Those two chains are the only classes.
        let e = enumerate_instances(&scope(1, 1, 2, 0, 0, 3, 1), DEFAULT_BUDGET).unwrap();
        assert_eq!(e.instances.len(), 2);
        let mut sizes: Vec<usize> =
            e.instances.iter().map(|i| i.graph.elements().count()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![4, 5]);
        // The four-element one is the minimal chain; scope bounds are upper
        // bounds, not exact demands.
        assert!(e
            .instances
            .iter()
            .any(|i| i.label == canonical_form(&minimal()).label));
    }

    #[test]
    fn budget_is_enforced_and_message_is_stable() {
        let err = enumerate_instances(&scope(1, 1, 1, 0, 0, 2, 1), 0).unwrap_err();
        assert_eq!(err, FinderError::BudgetExceeded { budget: 0 });
        assert!(!format!("{err}").contains("explored"));
    }

    #[test]
    fn task_split_and_merge_match_the_sequential_run() {
        let s = scope(1, 1, 2, 0, 0, 3, 1);
        let sequential = enumerate_instances(&s, DEFAULT_BUDGET).unwrap();
        let outputs: Vec<TaskOutput> = enumeration_tasks(&s)
            .into_iter()
            .map(|t| t.run(DEFAULT_BUDGET).unwrap())
            .collect();
        let merged = merge_outputs(outputs, DEFAULT_BUDGET).unwrap();
        assert_eq!(merged.explored, sequential.explored);
        let a: Vec<&str> = merged.instances.iter().map(|i| i.label.as_str()).collect();
        let b: Vec<&str> = sequential.instances.iter().map(|i| i.label.as_str()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn nested_form_needs_the_wider_scope() {
        let narrow = find_instance(
            &scope(2, 2, 2, 0, 1, 3, 1),
            &Predicate::HasNestedForm,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(narrow.witness.is_none());

        let wide = find_instance(
            &scope(2, 2, 2, 0, 1, 4, 2),
            &Predicate::HasNestedForm,
            DEFAULT_BUDGET,
        )
        .unwrap();
        let witness = wide.witness.expect("a nested form fits in four two-edge connectors");
        assert!(check_wellformed(&witness.graph).is_empty());
        assert!(witness.graph.elements().any(|e| e.kind == ElementKind::Form));
    }

    #[test]
    fn predicates_parse_by_name() {
        assert_eq!(Predicate::parse("wellformed"), Some(Predicate::Wellformed));
        assert_eq!(Predicate::parse("F5"), Some(Predicate::RuleHolds(Rule::F5)));
        assert_eq!(Predicate::parse("LC-M"), Some(Predicate::RuleHolds(Rule::LcM)));
        assert_eq!(
            Predicate::parse("has_pattern_master_detail"),
            Some(Predicate::HasPattern(PatternKind::MasterDetail))
        );
        assert_eq!(Predicate::parse("RI1"), None);
        assert_eq!(Predicate::parse("CFG1"), None);
        assert_eq!(Predicate::parse("has_pattern_bogus"), None);
        assert_eq!(Predicate::parse("nope"), None);
    }

    #[test]
    fn distributions_respect_minima() {
        assert_eq!(distributions(3, &[1, 2]), vec![vec![1, 2]]);
        assert_eq!(distributions(4, &[1, 2]), vec![vec![1, 3], vec![2, 2]]);
        assert_eq!(distributions(2, &[1, 2]), Vec::<Vec<usize>>::new());
        assert_eq!(distributions(0, &[]), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn parent_trees_are_rooted_and_acyclic() {
        // Two non-model structurals at indices 1 and 2: each may hang off the
        // model or the other one, but not both off each other.
        let trees = parent_trees(3);
        assert_eq!(
            trees,
            vec![vec![0, 0], vec![2, 0], vec![0, 1]]
        );
    }
}
