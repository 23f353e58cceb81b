//! Android layout XML ingestion.
//!
//! A layout file maps onto a model as follows: the root layout element
//! becomes the Model itself, every other container element becomes a Group,
//! and every leaf widget becomes a Behaviour carrying its widget kind. A
//! fresh Init/End pair frames the Model, and (unless disabled) connectors are
//! synthesized chaining the Model's direct children in document order, which
//! is the only execution order a static layout suggests. The result is then
//! checked; findings come back with source positions so they read like
//! compiler errors against the XML.
//!
//! Layout XML encodes containment, not behaviour, so ingested models are a
//! starting point: files whose top level holds no leaf widget, or whose
//! containers hold fewer than two widgets, surface the corresponding
//! ownership findings rather than being rejected.

use std::collections::BTreeMap;
use std::fmt;

use pbgt_core::model::{BehaviourInfo, ElementId, ElementKind, GraphBuilder, ModelGraph, WidgetKind};
use pbgt_core::rules::check_wellformed;
use pbgt_core::Diagnostic;

const ANDROID_NS: &str = "http://schemas.android.com/apk/res/android";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextPos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for TextPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// One element of the parsed layout tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutNode {
    pub widget: WidgetKind,
    /// `android:id`, resource prefix stripped.
    pub id: Option<String>,
    /// `android:orientation`, kept as a human hint on containers.
    pub orientation: Option<String>,
    pub children: Vec<LayoutNode>,
    pub pos: TextPos,
}

impl LayoutNode {
    /// Containers own children; the named Android layouts always count as
    /// containers (even when empty), unrecognized tags only when they
    /// actually have children.
    pub fn is_container(&self) -> bool {
        match self.widget {
            WidgetKind::LinearLayout
            | WidgetKind::ConstraintLayout
            | WidgetKind::DrawerLayout
            | WidgetKind::TabHost
            | WidgetKind::TabLayout => true,
            WidgetKind::Unknown(_) => !self.children.is_empty(),
            _ => false,
        }
    }
}

#[derive(Debug)]
pub enum IngestError {
    Xml(roxmltree::Error),
    /// A widget that cannot own children has element children in the XML.
    ChildrenUnderLeaf { tag: String, pos: TextPos },
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::Xml(e) => write!(f, "invalid XML: {e}"),
            IngestError::ChildrenUnderLeaf { tag, pos } => {
                write!(f, "{pos}: widget '{tag}' cannot contain other elements")
            }
        }
    }
}

impl std::error::Error for IngestError {}

impl From<roxmltree::Error> for IngestError {
    fn from(e: roxmltree::Error) -> Self {
        IngestError::Xml(e)
    }
}

/// A model finding annotated with where in the XML it points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestDiagnostic {
    pub pos: TextPos,
    pub diag: Diagnostic,
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Chain the Model's direct children with synthesized connectors.
    pub synthesize_connectors: bool,
    /// Replace every non-root container that holds exactly one child by that
    /// child, recursively. Layout files wrap freely; single-child wrappers
    /// carry no grouping information.
    pub collapse_single_child_groups: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { synthesize_connectors: true, collapse_single_child_groups: true }
    }
}

#[derive(Debug)]
pub struct IngestOutcome {
    pub graph: ModelGraph,
    pub diagnostics: Vec<IngestDiagnostic>,
}

pub fn parse_layout(xml: &str) -> Result<LayoutNode, IngestError> {
    let doc = roxmltree::Document::parse(xml)?;
    build_node(&doc, doc.root_element())
}

fn build_node(
    doc: &roxmltree::Document<'_>,
    node: roxmltree::Node<'_, '_>,
) -> Result<LayoutNode, IngestError> {
    let tp = doc.text_pos_at(node.range().start);
    let pos = TextPos { line: tp.row, col: tp.col };
    let tag = node.tag_name().name();

    let mut children = Vec::new();
    for child in node.children().filter(roxmltree::Node::is_element) {
        children.push(build_node(doc, child)?);
    }

    let out = LayoutNode {
        widget: resolve_widget(tag),
        id: attr(node, "id").map(strip_resource_prefix),
        orientation: attr(node, "orientation").map(str::to_string),
        children,
        pos,
    };
    if !out.children.is_empty() && !out.is_container() {
        return Err(IngestError::ChildrenUnderLeaf { tag: tag.to_string(), pos });
    }
    Ok(out)
}

/// Full tag first, then the class name of a dotted tag; a dotted tag whose
/// class name is also unrecognized stays Unknown under its full name.
fn resolve_widget(tag: &str) -> WidgetKind {
    match WidgetKind::from_name(tag) {
        WidgetKind::Unknown(_) => match tag.rsplit('.').next().map(WidgetKind::from_name) {
            Some(WidgetKind::Unknown(_)) | None => WidgetKind::Unknown(tag.to_string()),
            Some(known) => known,
        },
        known => known,
    }
}

fn attr<'a>(node: roxmltree::Node<'a, '_>, name: &str) -> Option<&'a str> {
    node.attribute((ANDROID_NS, name)).or_else(|| node.attribute(name))
}

fn strip_resource_prefix(id: &str) -> String {
    id.strip_prefix("@+id/")
        .or_else(|| id.strip_prefix("@id/"))
        .unwrap_or(id)
        .to_string()
}

pub fn ingest(xml: &str) -> Result<IngestOutcome, IngestError> {
    ingest_with(xml, &IngestOptions::default())
}

pub fn ingest_with(xml: &str, options: &IngestOptions) -> Result<IngestOutcome, IngestError> {
    let mut root = parse_layout(xml)?;
    if options.collapse_single_child_groups {
        collapse_children(&mut root);
    }
    Ok(to_model(&root, options))
}

fn collapse_children(node: &mut LayoutNode) {
    for child in &mut node.children {
        collapse(child);
    }
}

fn collapse(node: &mut LayoutNode) {
    collapse_children(node);
    if node.is_container() && node.children.len() == 1 {
        *node = node.children.pop().expect("one child");
    }
}

/// Flat picture of the converted tree, assembled into a graph in one pass.
#[derive(Default)]
struct Conversion {
    behaviours: Vec<(ElementId, WidgetKind)>,
    groups: Vec<(ElementId, Option<String>)>,
    children: Vec<(ElementId, Vec<ElementId>, Vec<ElementId>)>,
    spans: BTreeMap<ElementId, TextPos>,
    counter: usize,
}

impl Conversion {
    fn fresh_id(&mut self, node: &LayoutNode) -> ElementId {
        match &node.id {
            Some(id) => ElementId::new(id.clone()),
            None => {
                self.counter += 1;
                let slug = node.widget.name().to_lowercase().replace('.', "_");
                ElementId::new(format!("{slug}_{}", self.counter))
            }
        }
    }

    /// Declares `node` (a Group for containers, a Behaviour for leaves) and
    /// returns its id.
    fn convert(&mut self, node: &LayoutNode) -> ElementId {
        let id = self.fresh_id(node);
        self.spans.insert(id.clone(), node.pos);
        if node.is_container() {
            self.groups.push((id.clone(), node.orientation.clone()));
            let (_, structs, behaviours) = self.convert_children(node);
            self.children.push((id.clone(), structs, behaviours));
        } else {
            self.behaviours.push((id.clone(), node.widget.clone()));
        }
        id
    }

    /// Converts all children; returns them in document order plus split into
    /// the two ownership lists.
    fn convert_children(
        &mut self,
        node: &LayoutNode,
    ) -> (Vec<ElementId>, Vec<ElementId>, Vec<ElementId>) {
        let mut ordered = Vec::new();
        let mut structs = Vec::new();
        let mut behaviours = Vec::new();
        for child in &node.children {
            let id = self.convert(child);
            ordered.push(id.clone());
            if child.is_container() {
                structs.push(id);
            } else {
                behaviours.push(id);
            }
        }
        (ordered, structs, behaviours)
    }
}

fn to_model(root: &LayoutNode, options: &IngestOptions) -> IngestOutcome {
    let model_id = ElementId::new(root.id.clone().unwrap_or_else(|| "model".to_string()));
    let init_id = ElementId::new("init");
    let end_id = ElementId::new("end");

    let mut conv = Conversion::default();
    conv.spans.insert(model_id.clone(), root.pos);
    conv.spans.insert(init_id.clone(), root.pos);
    conv.spans.insert(end_id.clone(), root.pos);

    // A leaf root still yields a Model; the single widget becomes its one
    // Behaviour (the root's resource id names the Model, not the widget).
    let (ordered, structs, behaviours) = if root.is_container() {
        conv.convert_children(root)
    } else {
        let mut leaf = root.clone();
        leaf.id = None;
        leaf.children = Vec::new();
        let id = conv.convert(&leaf);
        (vec![id.clone()], Vec::new(), vec![id])
    };

    let mut builder = GraphBuilder::with_model(model_id.clone(), init_id.clone(), end_id.clone());
    if let Some(orientation) = &root.orientation {
        builder = builder.label(model_id.clone(), orientation.clone());
    }
    for (id, widget) in &conv.behaviours {
        builder = builder
            .behaviour_with(id.clone(), BehaviourInfo { pattern: None, widget: Some(widget.clone()) });
    }
    for (id, orientation) in &conv.groups {
        builder = builder.element(id.clone(), ElementKind::Group);
        if let Some(orientation) = orientation {
            builder = builder.label(id.clone(), orientation.clone());
        }
    }
    builder = builder
        .child_structs(model_id.clone(), structs)
        .child_behaviours(model_id.clone(), behaviours);
    for (parent, structs, behaviours) in &conv.children {
        builder = builder
            .child_structs(parent.clone(), structs.iter().cloned())
            .child_behaviours(parent.clone(), behaviours.iter().cloned());
    }

    if options.synthesize_connectors && !ordered.is_empty() {
        let mut stops = Vec::with_capacity(ordered.len() + 2);
        stops.push(init_id);
        stops.extend(ordered);
        stops.push(end_id);
        for (n, pair) in stops.windows(2).enumerate() {
            builder = builder.sequence(format!("c{}", n + 1), pair[0].clone(), pair[1].clone());
        }
    }

    let graph = builder.build();
    let diagnostics = check_wellformed(&graph)
        .into_iter()
        .map(|d| {
            let pos = d
                .subjects
                .iter()
                .find_map(|s| conv.spans.get(s))
                .copied()
                .unwrap_or(root.pos);
            IngestDiagnostic { pos, diag: d.into_ingested() }
        })
        .collect();
    IngestOutcome { graph, diagnostics }
}
