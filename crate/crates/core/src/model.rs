//! The element/connector graph.
//!
//! A model is a forest of structural elements (the root `Model`, `Form`s,
//! `Group`s) owning `Behaviour`s plus one `Init`/`End` pair per form, with
//! `Connector`s holding directed edges between sibling elements. The graph
//! representation is deliberately permissive: ill-formed states (orphans,
//! dangling ids, kind mismatches) are representable so that
//! [`crate::rules::check_wellformed`] can report them as diagnostics instead
//! of the constructors aborting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::patterns::PatternKind;

/// Identifier for elements and connectors. Total order (lexicographic) is
/// what makes listings, diagnostics and canonical output deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(String);

impl ElementId {
    pub fn new(id: impl Into<String>) -> Self {
        ElementId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        ElementId::new(s)
    }
}

impl From<String> for ElementId {
    fn from(s: String) -> Self {
        ElementId(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Init,
    End,
    Behaviour,
    Group,
    Form,
    Model,
}

impl ElementKind {
    /// Group, Form and Model can own children.
    pub fn is_structural(self) -> bool {
        matches!(self, ElementKind::Group | ElementKind::Form | ElementKind::Model)
    }

    /// Forms carry an Init/End pair; the Model is itself a form.
    pub fn is_form(self) -> bool {
        matches!(self, ElementKind::Form | ElementKind::Model)
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, ElementKind::Init | ElementKind::End)
    }
}

/// Android widget vocabulary carried on ingested behaviours. Open-ended:
/// unrecognized tags are preserved verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum WidgetKind {
    LinearLayout,
    ConstraintLayout,
    TextView,
    Button,
    EditText,
    ListView,
    RecyclerView,
    TabHost,
    TabLayout,
    DrawerLayout,
    Unknown(String),
}

impl WidgetKind {
    pub fn from_name(name: &str) -> Self {
        match name {
            "LinearLayout" => WidgetKind::LinearLayout,
            "ConstraintLayout" => WidgetKind::ConstraintLayout,
            "TextView" => WidgetKind::TextView,
            "Button" => WidgetKind::Button,
            "EditText" => WidgetKind::EditText,
            "ListView" => WidgetKind::ListView,
            "RecyclerView" => WidgetKind::RecyclerView,
            "TabHost" => WidgetKind::TabHost,
            "TabLayout" => WidgetKind::TabLayout,
            "DrawerLayout" => WidgetKind::DrawerLayout,
            other => WidgetKind::Unknown(String::from(other)),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            WidgetKind::LinearLayout => "LinearLayout",
            WidgetKind::ConstraintLayout => "ConstraintLayout",
            WidgetKind::TextView => "TextView",
            WidgetKind::Button => "Button",
            WidgetKind::EditText => "EditText",
            WidgetKind::ListView => "ListView",
            WidgetKind::RecyclerView => "RecyclerView",
            WidgetKind::TabHost => "TabHost",
            WidgetKind::TabLayout => "TabLayout",
            WidgetKind::DrawerLayout => "DrawerLayout",
            WidgetKind::Unknown(name) => name,
        }
    }
}

impl Serialize for WidgetKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for WidgetKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        Ok(WidgetKind::from_name(&name))
    }
}

/// Extra data on Behaviour elements: an explicit test-pattern tag and/or the
/// widget the behaviour was ingested from. Present iff the element's kind is
/// Behaviour (enforced as a referential-integrity rule, not by construction).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct BehaviourInfo {
    pub pattern: Option<PatternKind>,
    pub widget: Option<WidgetKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub id: ElementId,
    pub kind: ElementKind,
    pub behaviour: Option<BehaviourInfo>,
    /// Display-only; never part of isomorphism or rule checking.
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConnectorKind {
    Sequence,
    SequenceWithDataPassing,
    SequenceWithMovedData,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub from: ElementId,
    pub to: ElementId,
}

impl Edge {
    pub fn new(from: impl Into<ElementId>, to: impl Into<ElementId>) -> Self {
        Edge { from: from.into(), to: to.into() }
    }
}

/// A connector groups directed edges. Connector kinds do not affect
/// well-formedness; data-passing semantics live in test generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connector {
    pub id: ElementId,
    pub kind: ConnectorKind,
    pub edges: Vec<Edge>,
}

/// How many owners an element has under the union ownership relation
/// (inner structs + inner behaviours + init + end slots).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parents {
    /// No owner. Expected for the root Model, diagnosable anywhere else.
    None,
    One(ElementId),
    /// Distinct owners, sorted. Always ill-formed.
    Many(Vec<ElementId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    UnknownElement(ElementId),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownElement(id) => write!(f, "unknown element '{id}'"),
        }
    }
}

/// Immutable element/connector graph. Build one with [`GraphBuilder`] or by
/// parsing the model JSON format ([`crate::json`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelGraph {
    elements: Vec<Element>,
    // First declaration wins; duplicate declarations stay in `elements` so
    // referential integrity can report them.
    index: BTreeMap<ElementId, usize>,
    inner_structs: BTreeMap<ElementId, Vec<ElementId>>,
    inner_behaviour: BTreeMap<ElementId, Vec<ElementId>>,
    form_init: BTreeMap<ElementId, ElementId>,
    form_end: BTreeMap<ElementId, ElementId>,
    connectors: Vec<Connector>,
    root: ElementId,
}

impl ModelGraph {
    pub fn root(&self) -> &ElementId {
        &self.root
    }

    /// Elements in declaration order, duplicates included.
    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter()
    }

    pub fn element(&self, id: &ElementId) -> Option<&Element> {
        self.index.get(id).map(|&i| &self.elements[i])
    }

    pub fn kind(&self, id: &ElementId) -> Option<ElementKind> {
        self.element(id).map(|e| e.kind)
    }

    pub fn connectors(&self) -> &[Connector] {
        &self.connectors
    }

    /// Structural children in declared order (empty for unknown ids).
    pub fn inner_structs(&self, id: &ElementId) -> &[ElementId] {
        self.inner_structs.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Behaviour children in declared order (empty for unknown ids).
    pub fn inner_behaviour(&self, id: &ElementId) -> &[ElementId] {
        self.inner_behaviour.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn form_init(&self, id: &ElementId) -> Option<&ElementId> {
        self.form_init.get(id)
    }

    pub fn form_end(&self, id: &ElementId) -> Option<&ElementId> {
        self.form_end.get(id)
    }

    /// Ids that own children or an Init/End slot, in declaration order of the
    /// owning element (unknown owners last, sorted).
    pub fn owners_declared(&self) -> Vec<ElementId> {
        let mut seen = BTreeSet::new();
        seen.extend(self.inner_structs.keys().cloned());
        seen.extend(self.inner_behaviour.keys().cloned());
        seen.extend(self.form_init.keys().cloned());
        seen.extend(self.form_end.keys().cloned());
        let mut out: Vec<ElementId> = self
            .elements
            .iter()
            .filter(|e| seen.remove(&e.id))
            .map(|e| e.id.clone())
            .collect();
        out.extend(seen);
        out
    }

    /// The owner(s) of `id` under the union ownership relation. Owner sets are
    /// deduplicated: "owned twice by the same parent" is a duplicate-id
    /// integrity problem, not a multi-parent one.
    pub fn parent(&self, id: &ElementId) -> Result<Parents, GraphError> {
        if !self.index.contains_key(id) {
            return Err(GraphError::UnknownElement(id.clone()));
        }
        let mut owners = BTreeSet::new();
        for (parent, children) in self.inner_structs.iter().chain(self.inner_behaviour.iter()) {
            if children.contains(id) {
                owners.insert(parent.clone());
            }
        }
        for (parent, slot) in self.form_init.iter().chain(self.form_end.iter()) {
            if slot == id {
                owners.insert(parent.clone());
            }
        }
        let mut owners: Vec<ElementId> = owners.into_iter().collect();
        Ok(match owners.len() {
            0 => Parents::None,
            1 => Parents::One(owners.pop().unwrap()),
            _ => Parents::Many(owners),
        })
    }

    pub fn all_edges(&self) -> impl Iterator<Item = &Edge> {
        self.connectors.iter().flat_map(|c| c.edges.iter())
    }

    /// Forward adjacency over the union of all connectors' edges.
    pub(crate) fn forward_adjacency(&self) -> BTreeMap<&ElementId, BTreeSet<&ElementId>> {
        let mut adj: BTreeMap<&ElementId, BTreeSet<&ElementId>> = BTreeMap::new();
        for edge in self.all_edges() {
            adj.entry(&edge.from).or_default().insert(&edge.to);
        }
        adj
    }

    pub(crate) fn backward_adjacency(&self) -> BTreeMap<&ElementId, BTreeSet<&ElementId>> {
        let mut adj: BTreeMap<&ElementId, BTreeSet<&ElementId>> = BTreeMap::new();
        for edge in self.all_edges() {
            adj.entry(&edge.to).or_default().insert(&edge.from);
        }
        adj
    }

    /// Everything reachable from `start` in one or more hops over the union
    /// of all connectors' edges. `start` itself appears only if it lies on a
    /// cycle.
    pub fn forward_reach(&self, start: &ElementId) -> Result<BTreeSet<ElementId>, GraphError> {
        if !self.index.contains_key(start) {
            return Err(GraphError::UnknownElement(start.clone()));
        }
        Ok(reach(&self.forward_adjacency(), start))
    }
}

pub(crate) fn reach(
    adj: &BTreeMap<&ElementId, BTreeSet<&ElementId>>,
    start: &ElementId,
) -> BTreeSet<ElementId> {
    let mut seen: BTreeSet<ElementId> = BTreeSet::new();
    let mut frontier: Vec<&ElementId> = match adj.get(start) {
        Some(next) => next.iter().copied().collect(),
        None => Vec::new(),
    };
    while let Some(node) = frontier.pop() {
        if seen.insert(node.clone()) {
            if let Some(next) = adj.get(node) {
                frontier.extend(next.iter().copied());
            }
        }
    }
    seen
}

/// Builder for [`ModelGraph`]. Performs no validation: anything built here is
/// checked by [`crate::rules::check_wellformed`], which is also how test
/// fixtures encode deliberately broken graphs.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    elements: Vec<Element>,
    inner_structs: BTreeMap<ElementId, Vec<ElementId>>,
    inner_behaviour: BTreeMap<ElementId, Vec<ElementId>>,
    form_init: BTreeMap<ElementId, ElementId>,
    form_end: BTreeMap<ElementId, ElementId>,
    connectors: Vec<Connector>,
    root: Option<ElementId>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Shorthand for the common spine: a root Model with its Init/End pair
    /// already attached.
    pub fn with_model(
        model: impl Into<ElementId>,
        init: impl Into<ElementId>,
        end: impl Into<ElementId>,
    ) -> Self {
        let model = model.into();
        let init = init.into();
        let end = end.into();
        Self::new()
            .element(model.clone(), ElementKind::Model)
            .element(init.clone(), ElementKind::Init)
            .element(end.clone(), ElementKind::End)
            .init(model.clone(), init)
            .end(model.clone(), end)
            .root(model)
    }

    pub fn element(mut self, id: impl Into<ElementId>, kind: ElementKind) -> Self {
        let behaviour =
            (kind == ElementKind::Behaviour).then(BehaviourInfo::default);
        self.elements.push(Element { id: id.into(), kind, behaviour, label: None });
        self
    }

    pub fn behaviour(self, id: impl Into<ElementId>) -> Self {
        self.element(id, ElementKind::Behaviour)
    }

    pub fn behaviour_with(mut self, id: impl Into<ElementId>, info: BehaviourInfo) -> Self {
        self.elements.push(Element {
            id: id.into(),
            kind: ElementKind::Behaviour,
            behaviour: Some(info),
            label: None,
        });
        self
    }

    /// Raw element push, for fixtures that need kind/field mismatches.
    pub fn element_raw(mut self, element: Element) -> Self {
        self.elements.push(element);
        self
    }

    pub fn label(mut self, id: impl Into<ElementId>, text: impl Into<String>) -> Self {
        let id = id.into();
        if let Some(e) = self.elements.iter_mut().rev().find(|e| e.id == id) {
            e.label = Some(text.into());
        }
        self
    }

    pub fn child_structs<I, T>(mut self, parent: impl Into<ElementId>, children: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<ElementId>,
    {
        self.inner_structs
            .entry(parent.into())
            .or_default()
            .extend(children.into_iter().map(Into::into));
        self
    }

    pub fn child_behaviours<I, T>(mut self, parent: impl Into<ElementId>, children: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<ElementId>,
    {
        self.inner_behaviour
            .entry(parent.into())
            .or_default()
            .extend(children.into_iter().map(Into::into));
        self
    }

    pub fn init(mut self, form: impl Into<ElementId>, init: impl Into<ElementId>) -> Self {
        self.form_init.insert(form.into(), init.into());
        self
    }

    pub fn end(mut self, form: impl Into<ElementId>, end: impl Into<ElementId>) -> Self {
        self.form_end.insert(form.into(), end.into());
        self
    }

    pub fn connector<I, A, B>(mut self, id: impl Into<ElementId>, kind: ConnectorKind, edges: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<ElementId>,
        B: Into<ElementId>,
    {
        self.connectors.push(Connector {
            id: id.into(),
            kind,
            edges: edges.into_iter().map(|(a, b)| Edge::new(a.into(), b.into())).collect(),
        });
        self
    }

    pub fn sequence<A, B>(self, id: impl Into<ElementId>, from: A, to: B) -> Self
    where
        A: Into<ElementId>,
        B: Into<ElementId>,
    {
        self.connector(id, ConnectorKind::Sequence, [(from, to)])
    }

    pub fn root(mut self, id: impl Into<ElementId>) -> Self {
        self.root = Some(id.into());
        self
    }

    /// Panics if no root was set; that is a programming error, not input
    /// malformation (the JSON schema makes `root` required).
    pub fn build(mut self) -> ModelGraph {
        let mut index = BTreeMap::new();
        for (i, e) in self.elements.iter().enumerate() {
            index.entry(e.id.clone()).or_insert(i);
        }
        // Ownership is extensional; an empty child list means no entry. This
        // keeps graph equality and serialization independent of how the
        // builder was driven.
        self.inner_structs.retain(|_, v| !v.is_empty());
        self.inner_behaviour.retain(|_, v| !v.is_empty());
        ModelGraph {
            elements: self.elements,
            index,
            inner_structs: self.inner_structs,
            inner_behaviour: self.inner_behaviour,
            form_init: self.form_init,
            form_end: self.form_end,
            connectors: self.connectors,
            root: self.root.expect("GraphBuilder: root element not set"),
        }
    }
}
