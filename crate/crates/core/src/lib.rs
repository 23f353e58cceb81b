//! Pattern-based GUI testing core: a hierarchical element/connector
//! meta-model for app GUIs, well-formedness checking, a bounded instance
//! finder, the builtin test-pattern catalog, and test-case generation.
//!
//! Everything here is pure and allocation-only; IO, XML ingestion and the
//! command-line front end live in the companion `pbgt-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod canon;
pub mod diag;
pub mod finder;
pub mod json;
pub mod model;
pub mod patterns;
pub mod rules;
pub mod testgen;

pub use diag::{Diagnostic, Rule, Severity};
pub use model::{
    BehaviourInfo, Connector, ConnectorKind, Edge, ElementId, ElementKind, GraphBuilder,
    GraphError, ModelGraph, Parents, WidgetKind,
};
