//! Well-formedness checking.
//!
//! Evaluation has two phases. A referential-integrity pre-pass (RI1..RI4)
//! rejects graphs whose references cannot be chased safely: dangling ids,
//! duplicate declarations, kind/field mismatches, non-functional connector
//! edges. Only when that pass is clean are the structural facts (F1..F6) and
//! the connector facts (LC1..LC6, LC-M) evaluated, all of them every time,
//! so fixtures can assert exact diagnostic sets. The result is sorted and
//! deterministic under any permutation of element or connector declarations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::diag::{sort_diagnostics, Diagnostic, Rule};
use crate::model::{reach, ElementId, ElementKind, ModelGraph};

pub fn check_wellformed(g: &ModelGraph) -> Vec<Diagnostic> {
    let mut diags = referential_integrity(g);
    if !diags.is_empty() {
        sort_diagnostics(&mut diags);
        return diags;
    }
    structural_rules(g, &mut diags);
    connector_rules(g, &mut diags);
    sort_diagnostics(&mut diags);
    diags
}

fn referential_integrity(g: &ModelGraph) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let err = |rule, subjects: Vec<ElementId>, msg| Diagnostic::error(rule, subjects, msg);

    // RI2: duplicate element declarations.
    let mut seen: BTreeSet<&ElementId> = BTreeSet::new();
    for e in g.elements() {
        if !seen.insert(&e.id) {
            diags.push(err(
                Rule::Ri2,
                [e.id.clone()].into(),
                format!("element '{}' is declared more than once", e.id),
            ));
        }
    }

    // RI3: behaviour data present iff the element is a Behaviour.
    for e in g.elements() {
        match (e.kind, &e.behaviour) {
            (ElementKind::Behaviour, None) => diags.push(err(
                Rule::Ri3,
                [e.id.clone()].into(),
                format!("behaviour '{}' is missing its behaviour data", e.id),
            )),
            (kind, Some(_)) if kind != ElementKind::Behaviour => diags.push(err(
                Rule::Ri3,
                [e.id.clone()].into(),
                format!("{:?} '{}' carries behaviour data", kind, e.id),
            )),
            _ => {}
        }
        if e.kind == ElementKind::Model && e.id != *g.root() {
            diags.push(err(
                Rule::Ri3,
                [e.id.clone()].into(),
                format!("'{}' is a second Model; a graph has exactly one, the root", e.id),
            ));
        }
    }
    match g.kind(g.root()) {
        None => diags.push(err(
            Rule::Ri1,
            [g.root().clone()].into(),
            format!("root '{}' is not a declared element", g.root()),
        )),
        Some(ElementKind::Model) => {}
        Some(kind) => diags.push(err(
            Rule::Ri3,
            [g.root().clone()].into(),
            format!("root '{}' has kind {kind:?}, expected Model", g.root()),
        )),
    }

    // Ownership slots: owners structural, members of the right kind, no
    // duplicate membership under one parent.
    for parent in g.owners_declared() {
        match g.kind(&parent) {
            None => {
                diags.push(err(
                    Rule::Ri1,
                    [parent.clone()].into(),
                    format!("owner '{parent}' is not a declared element"),
                ));
                continue;
            }
            Some(kind) if !kind.is_structural() => diags.push(err(
                Rule::Ri3,
                [parent.clone()].into(),
                format!("{:?} '{parent}' cannot own children", kind),
            )),
            Some(_) => {}
        }
        let mut seen_children: BTreeSet<&ElementId> = BTreeSet::new();
        for child in g.inner_structs(&parent).iter().chain(g.inner_behaviour(&parent)) {
            if !seen_children.insert(child) {
                diags.push(err(
                    Rule::Ri2,
                    [parent.clone(), child.clone()].into(),
                    format!("'{child}' is listed twice under '{parent}'"),
                ));
            }
        }
        for child in g.inner_structs(&parent) {
            match g.kind(child) {
                None => diags.push(err(
                    Rule::Ri1,
                    [parent.clone(), child.clone()].into(),
                    format!("structural child '{child}' of '{parent}' is not declared"),
                )),
                Some(kind) if !kind.is_structural() => diags.push(err(
                    Rule::Ri3,
                    [parent.clone(), child.clone()].into(),
                    format!("structural child '{child}' of '{parent}' has kind {kind:?}"),
                )),
                Some(_) => {}
            }
        }
        for child in g.inner_behaviour(&parent) {
            match g.kind(child) {
                None => diags.push(err(
                    Rule::Ri1,
                    [parent.clone(), child.clone()].into(),
                    format!("behaviour child '{child}' of '{parent}' is not declared"),
                )),
                Some(ElementKind::Behaviour) => {}
                Some(kind) => diags.push(err(
                    Rule::Ri3,
                    [parent.clone(), child.clone()].into(),
                    format!("behaviour child '{child}' of '{parent}' has kind {kind:?}"),
                )),
            }
        }
        for (slot, kind_wanted) in [(g.form_init(&parent), ElementKind::Init), (g.form_end(&parent), ElementKind::End)] {
            let Some(target) = slot else { continue };
            match g.kind(target) {
                None => diags.push(err(
                    Rule::Ri1,
                    [parent.clone(), target.clone()].into(),
                    format!("{kind_wanted:?} slot of '{parent}' names undeclared '{target}'"),
                )),
                Some(kind) if kind != kind_wanted => diags.push(err(
                    Rule::Ri3,
                    [parent.clone(), target.clone()].into(),
                    format!("{kind_wanted:?} slot of '{parent}' names '{target}' of kind {kind:?}"),
                )),
                Some(_) => {}
            }
        }
    }

    // Connectors: unique ids, declared endpoints, functional edge relation.
    let mut conn_ids: BTreeSet<&ElementId> = BTreeSet::new();
    for conn in g.connectors() {
        if !conn_ids.insert(&conn.id) {
            diags.push(err(
                Rule::Ri2,
                [conn.id.clone()].into(),
                format!("connector '{}' is declared more than once", conn.id),
            ));
        }
        let mut sources: BTreeSet<&ElementId> = BTreeSet::new();
        for edge in &conn.edges {
            for end in [&edge.from, &edge.to] {
                if g.element(end).is_none() {
                    diags.push(err(
                        Rule::Ri1,
                        [conn.id.clone(), end.clone()].into(),
                        format!("connector '{}' references undeclared '{end}'", conn.id),
                    ));
                }
            }
            if !sources.insert(&edge.from) {
                diags.push(err(
                    Rule::Ri4,
                    [conn.id.clone(), edge.from.clone()].into(),
                    format!("connector '{}' maps '{}' to more than one target", conn.id, edge.from),
                ));
            }
        }
    }

    diags
}

fn structural_rules(g: &ModelGraph, diags: &mut Vec<Diagnostic>) {
    let root = g.root();

    // Owner sets per element (RI guarantees no duplicate membership, so the
    // sets are faithful).
    let mut owners: BTreeMap<&ElementId, BTreeSet<ElementId>> = BTreeMap::new();
    for e in g.elements() {
        let parent_owner = &e.id;
        for child in g.inner_structs(parent_owner).iter().chain(g.inner_behaviour(parent_owner)) {
            owners.entry(child).or_default().insert(parent_owner.clone());
        }
        for slot in [g.form_init(parent_owner), g.form_end(parent_owner)].into_iter().flatten() {
            owners.entry(slot).or_default().insert(parent_owner.clone());
        }
    }

    for e in g.elements() {
        let n = owners.get(&e.id).map_or(0, BTreeSet::len);
        if e.id == *root {
            // F2: the root has no parent.
            if n > 0 {
                diags.push(Diagnostic::error(
                    Rule::F2,
                    [root.clone()].into(),
                    format!("root Model '{root}' has a parent"),
                ));
            }
            continue;
        }
        // F1: everything else has exactly one.
        if n != 1 {
            diags.push(Diagnostic::error(
                Rule::F1,
                [e.id.clone()].into(),
                format!("'{}' has {n} parents; expected exactly one", e.id),
            ));
        }
    }

    // F3: structural elements reachable from the Model over inner structs.
    let mut struct_adj: BTreeMap<&ElementId, BTreeSet<&ElementId>> = BTreeMap::new();
    for e in g.elements() {
        let children = g.inner_structs(&e.id);
        if !children.is_empty() {
            struct_adj.entry(&e.id).or_default().extend(children.iter());
        }
    }
    let reachable = reach(&struct_adj, root);
    for e in g.elements() {
        if e.kind.is_structural() && e.id != *root && !reachable.contains(&e.id) {
            diags.push(Diagnostic::error(
                Rule::F3,
                [e.id.clone()].into(),
                format!("structural '{}' is not reachable from the Model", e.id),
            ));
        }
    }

    for e in g.elements() {
        if !e.kind.is_structural() {
            continue;
        }
        let behaviours = g.inner_behaviour(&e.id);
        // F4: every structural element owns a Behaviour.
        if behaviours.is_empty() {
            diags.push(Diagnostic::error(
                Rule::F4,
                [e.id.clone()].into(),
                format!("{:?} '{}' owns no Behaviour", e.kind, e.id),
            ));
        }
        // F5: Groups own at least two.
        if e.kind == ElementKind::Group && behaviours.len() < 2 {
            diags.push(Diagnostic::error(
                Rule::F5,
                [e.id.clone()].into(),
                format!("Group '{}' owns {} Behaviour(s); expected at least two", e.id, behaviours.len()),
            ));
        }
        // F6: Init/End on forms only, and on every form.
        if e.kind.is_form() {
            if g.form_init(&e.id).is_none() {
                diags.push(Diagnostic::error(
                    Rule::F6,
                    [e.id.clone()].into(),
                    format!("form '{}' lacks an Init", e.id),
                ));
            }
            if g.form_end(&e.id).is_none() {
                diags.push(Diagnostic::error(
                    Rule::F6,
                    [e.id.clone()].into(),
                    format!("form '{}' lacks an End", e.id),
                ));
            }
        } else {
            if g.form_init(&e.id).is_some() {
                diags.push(Diagnostic::error(
                    Rule::F6,
                    [e.id.clone()].into(),
                    format!("Group '{}' owns an Init", e.id),
                ));
            }
            if g.form_end(&e.id).is_some() {
                diags.push(Diagnostic::error(
                    Rule::F6,
                    [e.id.clone()].into(),
                    format!("Group '{}' owns an End", e.id),
                ));
            }
        }
    }
}

fn connector_rules(g: &ModelGraph, diags: &mut Vec<Diagnostic>) {
    let root = g.root();
    let owner_set = |id: &ElementId| -> BTreeSet<ElementId> {
        match g.parent(id) {
            Ok(crate::model::Parents::None) | Err(_) => BTreeSet::new(),
            Ok(crate::model::Parents::One(p)) => BTreeSet::from([p]),
            Ok(crate::model::Parents::Many(ps)) => ps.into_iter().collect(),
        }
    };

    let mut pair_uses: BTreeMap<(&ElementId, &ElementId), Vec<&ElementId>> = BTreeMap::new();

    for conn in g.connectors() {
        let sources: BTreeSet<&ElementId> = conn.edges.iter().map(|e| &e.from).collect();
        let targets: BTreeSet<&ElementId> = conn.edges.iter().map(|e| &e.to).collect();

        // LC1: no self-loops, sources disjoint from targets.
        let overlap: Vec<ElementId> = sources.intersection(&targets).map(|&id| id.clone()).collect();
        if !overlap.is_empty() {
            let mut subjects = alloc::vec![conn.id.clone()];
            subjects.extend(overlap);
            diags.push(Diagnostic::error(
                Rule::Lc1,
                subjects,
                format!("connector '{}' uses the same element as source and target", conn.id),
            ));
        }

        // LC2: End never a source, Init never a target.
        for s in &sources {
            if g.kind(s) == Some(ElementKind::End) {
                diags.push(Diagnostic::error(
                    Rule::Lc2,
                    [conn.id.clone(), (*s).clone()].into(),
                    format!("End '{s}' is an edge source in connector '{}'", conn.id),
                ));
            }
        }
        for t in &targets {
            if g.kind(t) == Some(ElementKind::Init) {
                diags.push(Diagnostic::error(
                    Rule::Lc2,
                    [conn.id.clone(), (*t).clone()].into(),
                    format!("Init '{t}' is an edge target in connector '{}'", conn.id),
                ));
            }
        }

        // LC3: at most one Init-or-End among a connector's endpoints.
        let terminals: Vec<ElementId> = sources
            .union(&targets)
            .filter(|id| g.kind(id).is_some_and(ElementKind::is_terminal))
            .map(|&id| id.clone())
            .collect();
        if terminals.len() > 1 {
            let mut subjects = alloc::vec![conn.id.clone()];
            subjects.extend(terminals);
            diags.push(Diagnostic::error(
                Rule::Lc3,
                subjects,
                format!("connector '{}' touches more than one Init/End", conn.id),
            ));
        }

        for edge in &conn.edges {
            pair_uses.entry((&edge.from, &edge.to)).or_default().push(&conn.id);

            // LC5: endpoints share a parent.
            if owner_set(&edge.from) != owner_set(&edge.to) {
                diags.push(Diagnostic::error(
                    Rule::Lc5,
                    [conn.id.clone(), edge.from.clone(), edge.to.clone()].into(),
                    format!("edge '{}' -> '{}' crosses parents", edge.from, edge.to),
                ));
            }

            // LC-M: the Model is never an endpoint.
            if edge.from == *root || edge.to == *root {
                diags.push(Diagnostic::error(
                    Rule::LcM,
                    [conn.id.clone(), root.clone()].into(),
                    format!("connector '{}' touches the Model element", conn.id),
                ));
            }
        }
    }

    // LC4: an ordered pair is connected at most once, across all connectors.
    for ((from, to), mut conns) in pair_uses {
        if conns.len() > 1 {
            conns.sort();
            let mut subjects: Vec<ElementId> = conns.into_iter().cloned().collect();
            subjects.push(from.clone());
            subjects.push(to.clone());
            diags.push(Diagnostic::error(
                Rule::Lc4,
                subjects,
                format!("edge '{from}' -> '{to}' appears in more than one connector"),
            ));
        }
    }

    // LC6: per form, children (minus Init) forward-reachable from Init and
    // children (minus End) backward-reachable from End, over all edges.
    let fwd = g.forward_adjacency();
    let bwd = g.backward_adjacency();
    for e in g.elements() {
        if !e.kind.is_form() {
            continue;
        }
        let form = &e.id;
        let mut members: Vec<&ElementId> = g.inner_structs(form).iter().collect();
        members.extend(g.inner_behaviour(form));

        let fwd_reach = g.form_init(form).map(|init| reach(&fwd, init)).unwrap_or_default();
        let bwd_reach = g.form_end(form).map(|end| reach(&bwd, end)).unwrap_or_default();

        let mut fwd_required = members.clone();
        fwd_required.extend(g.form_end(form));
        for missing in fwd_required.into_iter().filter(|m| !fwd_reach.contains(m)) {
            diags.push(Diagnostic::error(
                Rule::Lc6,
                [form.clone(), missing.clone()].into(),
                format!("'{missing}' is not forward-reachable from the Init of '{form}'"),
            ));
        }
        let mut bwd_required = members;
        bwd_required.extend(g.form_init(form));
        for missing in bwd_required.into_iter().filter(|m| !bwd_reach.contains(m)) {
            diags.push(Diagnostic::error(
                Rule::Lc6,
                [form.clone(), missing.clone()].into(),
                format!("'{missing}' is not backward-reachable from the End of '{form}'"),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::minimal;
    use crate::model::{ConnectorKind, GraphBuilder};
    use alloc::vec;

    fn rules_of(g: &ModelGraph) -> Vec<Rule> {
        check_wellformed(g).into_iter().map(|d| d.rule).collect()
    }

    #[test]
    fn minimal_model_is_wellformed() {
        assert_eq!(check_wellformed(&minimal()), vec![]);
    }

    #[test]
    fn orphan_behaviour_is_f1_only() {
        let g = GraphBuilder::with_model("m", "i", "e")
            .behaviour("b")
            .behaviour("stray")
            .child_behaviours("m", ["b"])
            .sequence("c1", "i", "b")
            .sequence("c2", "b", "e")
            .build();
        assert_eq!(rules_of(&g), vec![Rule::F1]);
    }

    #[test]
    fn dangling_reference_aborts_rule_evaluation() {
        let g = GraphBuilder::with_model("m", "i", "e")
            .behaviour("b")
            .child_behaviours("m", ["b", "ghost"])
            .sequence("c1", "i", "b")
            .sequence("c2", "b", "e")
            .build();
        // Without the pre-pass this graph would also hit F-rules; RI wins.
        assert_eq!(rules_of(&g), vec![Rule::Ri1]);
    }

    #[test]
    fn source_fanout_within_a_connector_is_ri4() {
        let g = GraphBuilder::with_model("m", "i", "e")
            .behaviour("a")
            .behaviour("b")
            .child_behaviours("m", ["a", "b"])
            .connector("c1", ConnectorKind::Sequence, [("i", "a"), ("i", "b")])
            .build();
        assert_eq!(rules_of(&g), vec![Rule::Ri4]);
    }

    #[test]
    fn init_to_end_edge_is_lc3() {
        let g = GraphBuilder::with_model("m", "i", "e")
            .behaviour("b")
            .child_behaviours("m", ["b"])
            .sequence("c1", "i", "b")
            .sequence("c2", "b", "e")
            .sequence("c3", "i", "e")
            .build();
        assert_eq!(rules_of(&g), vec![Rule::Lc3]);
    }

    #[test]
    fn missing_return_path_is_lc6() {
        let g = GraphBuilder::with_model("m", "i", "e")
            .behaviour("b")
            .child_behaviours("m", ["b"])
            .sequence("c1", "i", "b")
            .build();
        let diags = check_wellformed(&g);
        assert_eq!(
            diags.iter().map(|d| d.rule).collect::<Vec<_>>(),
            vec![Rule::Lc6, Rule::Lc6, Rule::Lc6]
        );
        // e unreachable forward; i and b unreachable backward.
        let subjects: Vec<_> = diags.iter().map(|d| d.subjects[1].as_str()).collect();
        assert_eq!(subjects, vec!["b", "e", "i"]);
    }

    #[test]
    fn diagnostics_are_insertion_order_independent() {
        // Same broken graph, declarations and connectors permuted.
        let a = GraphBuilder::new()
            .element("m", crate::model::ElementKind::Model)
            .element("i", crate::model::ElementKind::Init)
            .element("e", crate::model::ElementKind::End)
            .behaviour("b")
            .init("m", "i")
            .end("m", "e")
            .root("m")
            .child_behaviours("m", ["b"])
            .sequence("c1", "i", "b")
            .sequence("c3", "i", "e")
            .build();
        let b = GraphBuilder::new()
            .behaviour("b")
            .element("e", crate::model::ElementKind::End)
            .element("i", crate::model::ElementKind::Init)
            .element("m", crate::model::ElementKind::Model)
            .init("m", "i")
            .end("m", "e")
            .root("m")
            .child_behaviours("m", ["b"])
            .sequence("c3", "i", "e")
            .sequence("c1", "i", "b")
            .build();
        assert_eq!(check_wellformed(&a), check_wellformed(&b));
    }
}
