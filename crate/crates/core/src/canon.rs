//! Canonical form under kind-preserving isomorphism.
//!
//! Two graphs are considered the same instance when a bijection over their
//! elements maps one onto the other while preserving kinds, behaviour data
//! (pattern tag and widget), ownership, Init/End slots and connector
//! structure. [`canonical_form`] picks a distinguished representative of that
//! equivalence class by brute force: it tries every kind-preserving renaming
//! into the fixed name pools (`m`, `i0..`, `e0..`, `b0..`, `g0..`, `f0..`),
//! normalizes everything order-insensitive, and keeps the lexicographically
//! least serialization. Equal labels iff isomorphic, which makes the label
//! usable for deduplication and hashing.
//!
//! Precondition: the graph passes referential integrity (no dangling ids, no
//! duplicate declarations). Structure rules may be violated; the finder also
//! canonicalizes graphs mid-diagnosis.
//!
//! Cost is the product of factorials of the class sizes. Intended scopes stay
//! below ten atoms per kind, where this is trivially cheap and obviously
//! correct, which is worth more here than a clever partition-refinement pass.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::json::model_to_json_compact;
use crate::model::{
    BehaviourInfo, Connector, Element, ElementId, ElementKind, GraphBuilder, ModelGraph,
};

pub struct Canonical {
    /// Compact serialization of `graph`; the dedup/hash key.
    pub label: String,
    pub graph: ModelGraph,
}

pub fn canonical_form(g: &ModelGraph) -> Canonical {
    // Renaming classes. Behaviours split further by their data: a renaming
    // may only exchange behaviours with identical (pattern, widget).
    let mut inits = Vec::new();
    let mut ends = Vec::new();
    let mut groups = Vec::new();
    let mut forms = Vec::new();
    let mut behaviour_colors: BTreeMap<BehaviourInfo, Vec<ElementId>> = BTreeMap::new();
    for e in g.elements() {
        match e.kind {
            ElementKind::Init => inits.push(e.id.clone()),
            ElementKind::End => ends.push(e.id.clone()),
            ElementKind::Group => groups.push(e.id.clone()),
            ElementKind::Form => forms.push(e.id.clone()),
            ElementKind::Behaviour => behaviour_colors
                .entry(e.behaviour.clone().unwrap_or_default())
                .or_default()
                .push(e.id.clone()),
            ElementKind::Model => {}
        }
    }

    // (atoms, canonical names) per class. Behaviour name indices run across
    // colors in color order, so a canonical name determines its color.
    let mut classes: Vec<(Vec<ElementId>, Vec<ElementId>)> = Vec::new();
    let named = |prefix: &str, start: usize, n: usize| -> Vec<ElementId> {
        (start..start + n).map(|i| ElementId::new(format!("{prefix}{i}"))).collect()
    };
    classes.push((inits.clone(), named("i", 0, inits.len())));
    classes.push((ends.clone(), named("e", 0, ends.len())));
    let mut b_offset = 0;
    for atoms in behaviour_colors.values() {
        classes.push((atoms.clone(), named("b", b_offset, atoms.len())));
        b_offset += atoms.len();
    }
    classes.push((groups.clone(), named("g", 0, groups.len())));
    classes.push((forms.clone(), named("f", 0, forms.len())));

    let perms_per_class: Vec<Vec<Vec<usize>>> =
        classes.iter().map(|(atoms, _)| permutations(atoms.len())).collect();

    let mut best: Option<Canonical> = None;
    let mut choice: Vec<usize> = alloc::vec![0; classes.len()];
    loop {
        let mut rename: BTreeMap<ElementId, ElementId> = BTreeMap::new();
        rename.insert(g.root().clone(), ElementId::new("m"));
        for (c, (atoms, names)) in classes.iter().enumerate() {
            let perm = &perms_per_class[c][choice[c]];
            for (j, atom) in atoms.iter().enumerate() {
                rename.insert(atom.clone(), names[perm[j]].clone());
            }
        }
        let graph = apply_renaming(g, &rename);
        let label = model_to_json_compact(&graph);
        if best.as_ref().is_none_or(|b| label < b.label) {
            best = Some(Canonical { label, graph });
        }

        // Odometer over the per-class permutation choices.
        let mut pos = 0;
        loop {
            if pos == classes.len() {
                return best.expect("at least the identity renaming was tried");
            }
            choice[pos] += 1;
            if choice[pos] < perms_per_class[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Renames every id and rebuilds the graph in normalized shape: elements in
/// class order, form child lists sorted (forms are order-free), group child
/// lists kept in declared order (group order is semantic), connector edges
/// sorted, connectors sorted by content and renamed `c0..`, labels dropped.
fn apply_renaming(g: &ModelGraph, rename: &BTreeMap<ElementId, ElementId>) -> ModelGraph {
    let rn = |id: &ElementId| rename.get(id).cloned().unwrap_or_else(|| id.clone());

    let mut elements: Vec<Element> = g
        .elements()
        .map(|e| Element {
            id: rn(&e.id),
            kind: e.kind,
            behaviour: e.behaviour.clone(),
            label: None,
        })
        .collect();
    elements.sort_by(element_order);

    let mut b = GraphBuilder::new().root(rn(g.root()));
    for e in elements {
        b = b.element_raw(e);
    }

    // Owners in canonical order: sort the renamed owner list.
    let mut owners: Vec<(ElementId, ElementId)> =
        g.owners_declared().into_iter().map(|o| (rn(&o), o)).collect();
    owners.sort();
    for (canonical_owner, owner) in owners {
        let order_free = g.kind(&owner).is_none_or(ElementKind::is_form);
        let mut structs: Vec<ElementId> = g.inner_structs(&owner).iter().map(&rn).collect();
        let mut behaviours: Vec<ElementId> = g.inner_behaviour(&owner).iter().map(&rn).collect();
        if order_free {
            structs.sort();
            behaviours.sort();
        }
        b = b.child_structs(canonical_owner.clone(), structs);
        b = b.child_behaviours(canonical_owner.clone(), behaviours);
        if let Some(init) = g.form_init(&owner) {
            b = b.init(canonical_owner.clone(), rn(init));
        }
        if let Some(end) = g.form_end(&owner) {
            b = b.end(canonical_owner.clone(), rn(end));
        }
    }

    let mut connectors: Vec<Connector> = g
        .connectors()
        .iter()
        .map(|c| {
            let mut edges: Vec<crate::model::Edge> =
                c.edges.iter().map(|e| crate::model::Edge::new(rn(&e.from), rn(&e.to))).collect();
            edges.sort();
            Connector { id: c.id.clone(), kind: c.kind, edges }
        })
        .collect();
    connectors.sort_by(|a, b| (a.kind, &a.edges).cmp(&(b.kind, &b.edges)));
    for (i, c) in connectors.into_iter().enumerate() {
        b = b.connector(
            ElementId::new(format!("c{i}")),
            c.kind,
            c.edges.into_iter().map(|e| (e.from, e.to)),
        );
    }

    b.build()
}

fn element_order(a: &Element, b: &Element) -> core::cmp::Ordering {
    let class = |e: &Element| match e.kind {
        ElementKind::Model => 0,
        ElementKind::Init => 1,
        ElementKind::End => 2,
        ElementKind::Behaviour => 3,
        ElementKind::Group => 4,
        ElementKind::Form => 5,
    };
    // Numeric suffix order, so b2 < b10 regardless of string length.
    let index = |e: &Element| e.id.as_str().get(1..).and_then(|s| s.parse::<usize>().ok());
    (class(a), index(a)).cmp(&(class(b), index(b)))
}

/// All permutations of 0..n in lexicographic order. n stays single-digit.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut used = alloc::vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                rec(n, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}
