//! The test-pattern catalog.
//!
//! Each pattern is a quintuple: goals it can certify, a variable schema for
//! user-supplied data, an action template expanded into concrete test steps,
//! a precondition (constant "true" for every built-in pattern) and the check
//! vocabulary its oracles may use. The catalog is static data; configuration
//! validation ([`validate_config`]) and widget-based applicability
//! ([`applicable_patterns`]) are the only logic here.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::diag::{sort_diagnostics, Diagnostic, Rule};
use crate::model::{ElementId, ElementKind, ModelGraph, Parents, WidgetKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatternKind {
    SideDrawer,
    Rotation,
    ResourceDependency,
    TabScroll,
    Input,
    Login,
    MasterDetail,
    Find,
    Sort,
    Call,
}

pub const ALL_PATTERNS: [PatternKind; 10] = [
    PatternKind::SideDrawer,
    PatternKind::Rotation,
    PatternKind::ResourceDependency,
    PatternKind::TabScroll,
    PatternKind::Input,
    PatternKind::Login,
    PatternKind::MasterDetail,
    PatternKind::Find,
    PatternKind::Sort,
    PatternKind::Call,
];

impl PatternKind {
    pub fn name(self) -> &'static str {
        match self {
            PatternKind::SideDrawer => "SideDrawer",
            PatternKind::Rotation => "Rotation",
            PatternKind::ResourceDependency => "ResourceDependency",
            PatternKind::TabScroll => "TabScroll",
            PatternKind::Input => "Input",
            PatternKind::Login => "Login",
            PatternKind::MasterDetail => "MasterDetail",
            PatternKind::Find => "Find",
            PatternKind::Sort => "Sort",
            PatternKind::Call => "Call",
        }
    }

    /// Lowercase form used in predicate names (`has_pattern_side_drawer`).
    pub fn snake_name(self) -> &'static str {
        match self {
            PatternKind::SideDrawer => "side_drawer",
            PatternKind::Rotation => "rotation",
            PatternKind::ResourceDependency => "resource_dependency",
            PatternKind::TabScroll => "tab_scroll",
            PatternKind::Input => "input",
            PatternKind::Login => "login",
            PatternKind::MasterDetail => "master_detail",
            PatternKind::Find => "find",
            PatternKind::Sort => "sort",
            PatternKind::Call => "call",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        ALL_PATTERNS.iter().copied().find(|p| p.name() == name)
    }

    pub fn spec(self) -> &'static PatternSpec {
        &CATALOG[self as usize]
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Verification goal a test case certifies. Tags are the external vocabulary:
/// configs and suite JSON use them verbatim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Goal {
    SideDrawer,
    RotationIsPossible,
    NotCrash,
    Presence,
    InputValid,
    InputInvalid,
    LoginValid,
    LoginInvalid,
    MasterDetail,
    FindValueFound,
    FindNotFound,
    SortAscending,
    SortDescending,
    CallSuccess,
    CallFail,
}

pub const ALL_GOALS: [Goal; 15] = [
    Goal::SideDrawer,
    Goal::RotationIsPossible,
    Goal::NotCrash,
    Goal::Presence,
    Goal::InputValid,
    Goal::InputInvalid,
    Goal::LoginValid,
    Goal::LoginInvalid,
    Goal::MasterDetail,
    Goal::FindValueFound,
    Goal::FindNotFound,
    Goal::SortAscending,
    Goal::SortDescending,
    Goal::CallSuccess,
    Goal::CallFail,
];

impl Goal {
    pub fn tag(self) -> &'static str {
        match self {
            Goal::SideDrawer => "SIDEDRAWER",
            Goal::RotationIsPossible => "ROTATIONISPOSSIBLE",
            Goal::NotCrash => "NOTCRASH",
            Goal::Presence => "PRESENCE",
            Goal::InputValid => "INPVD",
            Goal::InputInvalid => "INPID",
            Goal::LoginValid => "LGVAL",
            Goal::LoginInvalid => "LGINV",
            Goal::MasterDetail => "MD",
            Goal::FindValueFound => "FNDVF",
            Goal::FindNotFound => "FNDNF",
            Goal::SortAscending => "SRTASC",
            Goal::SortDescending => "SRTDESC",
            Goal::CallSuccess => "CLAS",
            Goal::CallFail => "CLAF",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        ALL_GOALS.iter().copied().find(|g| g.tag() == tag)
    }
}

impl Serialize for Goal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Goal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let tag = String::deserialize(deserializer)?;
        Goal::from_tag(&tag)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown goal tag '{tag}'")))
    }
}

/// Abstract GUI action. Only Provide/Select actions carry a data payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    ReadScreen,
    OpenSideDrawer,
    RotateScreen,
    ScrollScreen,
    ReadResourceStatus,
    TurnResourceOff,
    ProvideInput,
    ProvideUsername,
    ProvidePassword,
    PressSubmit,
    SelectMaster,
    Provide,
    Press,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::ReadScreen => "ReadScreen",
            Action::OpenSideDrawer => "OpenSideDrawer",
            Action::RotateScreen => "RotateScreen",
            Action::ScrollScreen => "ScrollScreen",
            Action::ReadResourceStatus => "ReadResourceStatus",
            Action::TurnResourceOff => "TurnResourceOff",
            Action::ProvideInput => "ProvideInput",
            Action::ProvideUsername => "ProvideUsername",
            Action::ProvidePassword => "ProvidePassword",
            Action::PressSubmit => "PressSubmit",
            Action::SelectMaster => "SelectMaster",
            Action::Provide => "Provide",
            Action::Press => "Press",
        }
    }

    pub fn takes_input(self) -> bool {
        matches!(
            self,
            Action::ProvideInput
                | Action::ProvideUsername
                | Action::ProvidePassword
                | Action::SelectMaster
                | Action::Provide
        )
    }
}

/// What bindings a pattern accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableSchema {
    /// Exactly these names, each bound to non-empty text.
    Fixed(&'static [&'static str]),
    /// `v1..vN` for some N >= 0, consecutive from 1.
    Indexed { prefix: &'static str },
    /// `v1..vN` values paired with `c1..cN` criteria, same N.
    IndexedPair { value_prefix: &'static str, criterion_prefix: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemplateStep {
    pub action: Action,
    /// Binding consumed by this step, if the action takes input.
    pub var: Option<&'static str>,
}

const fn step(action: Action) -> TemplateStep {
    TemplateStep { action, var: None }
}

const fn step_with(action: Action, var: &'static str) -> TemplateStep {
    TemplateStep { action, var: Some(var) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionTemplate {
    Fixed(&'static [TemplateStep]),
    /// One step per indexed variable, in index order.
    PerVariable { action: Action },
}

/// Oracle vocabulary. A check is a tagged observation with a fixed number of
/// text parameters. `ChangeToPage` is deliberately shared by Login and Call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    SideDrawerHiddenExists,
    RotationPossible,
    ResourceInUse,
    TabsPresent,
    MessageBox,
    Label,
    ErrorProvider,
    ChangeToPage,
    PopupError,
    SamePage,
    LabelK,
    DetailHasValue,
    DetailNotValue,
    DetailEmpty,
    ResultEmpty,
    ResultHasCount,
    ResultLacksElement,
    ResultElementAtLine,
    ResultMoreThan,
    ResultLessThan,
    ElementAtPositionHasValue,
    SortedByCriteria,
    PopupMessage,
    StayInSamePage,
}

pub const ALL_CHECKS: [CheckKind; 24] = [
    CheckKind::SideDrawerHiddenExists,
    CheckKind::RotationPossible,
    CheckKind::ResourceInUse,
    CheckKind::TabsPresent,
    CheckKind::MessageBox,
    CheckKind::Label,
    CheckKind::ErrorProvider,
    CheckKind::ChangeToPage,
    CheckKind::PopupError,
    CheckKind::SamePage,
    CheckKind::LabelK,
    CheckKind::DetailHasValue,
    CheckKind::DetailNotValue,
    CheckKind::DetailEmpty,
    CheckKind::ResultEmpty,
    CheckKind::ResultHasCount,
    CheckKind::ResultLacksElement,
    CheckKind::ResultElementAtLine,
    CheckKind::ResultMoreThan,
    CheckKind::ResultLessThan,
    CheckKind::ElementAtPositionHasValue,
    CheckKind::SortedByCriteria,
    CheckKind::PopupMessage,
    CheckKind::StayInSamePage,
];

impl CheckKind {
    pub fn tag(self) -> &'static str {
        match self {
            CheckKind::SideDrawerHiddenExists => "SideDrawerHiddenExists",
            CheckKind::RotationPossible => "RotationPossible",
            CheckKind::ResourceInUse => "ResourceInUse",
            CheckKind::TabsPresent => "TabsPresent",
            CheckKind::MessageBox => "MessageBox",
            CheckKind::Label => "Label",
            CheckKind::ErrorProvider => "ErrorProvider",
            CheckKind::ChangeToPage => "ChangeToPage",
            CheckKind::PopupError => "PopupError",
            CheckKind::SamePage => "SamePage",
            CheckKind::LabelK => "LabelK",
            CheckKind::DetailHasValue => "DetailHasValue",
            CheckKind::DetailNotValue => "DetailNotValue",
            CheckKind::DetailEmpty => "DetailEmpty",
            CheckKind::ResultEmpty => "ResultEmpty",
            CheckKind::ResultHasCount => "ResultHasCount",
            CheckKind::ResultLacksElement => "ResultLacksElement",
            CheckKind::ResultElementAtLine => "ResultElementAtLine",
            CheckKind::ResultMoreThan => "ResultMoreThan",
            CheckKind::ResultLessThan => "ResultLessThan",
            CheckKind::ElementAtPositionHasValue => "ElementAtPositionHasValue",
            CheckKind::SortedByCriteria => "SortedByCriteria",
            CheckKind::PopupMessage => "PopupMessage",
            CheckKind::StayInSamePage => "StayInSamePage",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            CheckKind::ChangeToPage
            | CheckKind::PopupError
            | CheckKind::LabelK
            | CheckKind::DetailHasValue
            | CheckKind::DetailNotValue
            | CheckKind::ResultHasCount
            | CheckKind::ResultLacksElement
            | CheckKind::ResultMoreThan
            | CheckKind::ResultLessThan => 1,
            CheckKind::ResultElementAtLine => 2,
            CheckKind::ElementAtPositionHasValue => 3,
            _ => 0,
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        ALL_CHECKS.iter().copied().find(|c| c.tag() == tag)
    }
}

pub struct PatternSpec {
    pub kind: PatternKind,
    pub goals: &'static [Goal],
    pub variables: VariableSchema,
    pub actions: ActionTemplate,
    /// Built-in patterns are unconditionally applicable.
    pub precondition: &'static str,
    pub checks: &'static [CheckKind],
}

pub static CATALOG: [PatternSpec; 10] = [
    PatternSpec {
        kind: PatternKind::SideDrawer,
        goals: &[Goal::SideDrawer],
        variables: VariableSchema::Fixed(&[]),
        actions: ActionTemplate::Fixed(&[
            step(Action::ReadScreen),
            step(Action::OpenSideDrawer),
            step(Action::ReadScreen),
        ]),
        precondition: "true",
        checks: &[CheckKind::SideDrawerHiddenExists],
    },
    PatternSpec {
        kind: PatternKind::Rotation,
        goals: &[Goal::RotationIsPossible],
        variables: VariableSchema::Fixed(&[]),
        actions: ActionTemplate::Fixed(&[
            step(Action::ReadScreen),
            step(Action::RotateScreen),
            step(Action::ReadScreen),
            step(Action::ScrollScreen),
        ]),
        precondition: "true",
        checks: &[CheckKind::RotationPossible],
    },
    PatternSpec {
        kind: PatternKind::ResourceDependency,
        goals: &[Goal::NotCrash],
        variables: VariableSchema::Fixed(&["resource", "resource_name"]),
        actions: ActionTemplate::Fixed(&[
            step(Action::ReadResourceStatus),
            step(Action::TurnResourceOff),
            step(Action::ReadScreen),
        ]),
        precondition: "true",
        checks: &[CheckKind::ResourceInUse],
    },
    PatternSpec {
        kind: PatternKind::TabScroll,
        goals: &[Goal::Presence],
        variables: VariableSchema::Fixed(&[]),
        actions: ActionTemplate::Fixed(&[step(Action::ReadScreen)]),
        precondition: "true",
        checks: &[CheckKind::TabsPresent],
    },
    PatternSpec {
        kind: PatternKind::Input,
        goals: &[Goal::InputValid, Goal::InputInvalid],
        variables: VariableSchema::Fixed(&["input"]),
        actions: ActionTemplate::Fixed(&[step_with(Action::ProvideInput, "input")]),
        precondition: "true",
        checks: &[CheckKind::MessageBox, CheckKind::Label, CheckKind::ErrorProvider],
    },
    PatternSpec {
        kind: PatternKind::Login,
        goals: &[Goal::LoginValid, Goal::LoginInvalid],
        variables: VariableSchema::Fixed(&["username", "password"]),
        actions: ActionTemplate::Fixed(&[
            step_with(Action::ProvideUsername, "username"),
            step_with(Action::ProvidePassword, "password"),
            step(Action::PressSubmit),
        ]),
        precondition: "true",
        checks: &[
            CheckKind::ChangeToPage,
            CheckKind::PopupError,
            CheckKind::SamePage,
            CheckKind::LabelK,
        ],
    },
    PatternSpec {
        kind: PatternKind::MasterDetail,
        goals: &[Goal::MasterDetail],
        variables: VariableSchema::Fixed(&["master", "detail"]),
        actions: ActionTemplate::Fixed(&[step_with(Action::SelectMaster, "master")]),
        precondition: "true",
        checks: &[
            CheckKind::DetailHasValue,
            CheckKind::DetailNotValue,
            CheckKind::DetailEmpty,
        ],
    },
    PatternSpec {
        kind: PatternKind::Find,
        goals: &[Goal::FindValueFound, Goal::FindNotFound],
        variables: VariableSchema::Indexed { prefix: "v" },
        actions: ActionTemplate::PerVariable { action: Action::Provide },
        precondition: "true",
        checks: &[
            CheckKind::ResultEmpty,
            CheckKind::ResultHasCount,
            CheckKind::ResultLacksElement,
            CheckKind::ResultElementAtLine,
            CheckKind::ResultMoreThan,
            CheckKind::ResultLessThan,
        ],
    },
    PatternSpec {
        kind: PatternKind::Sort,
        goals: &[Goal::SortAscending, Goal::SortDescending],
        variables: VariableSchema::IndexedPair { value_prefix: "v", criterion_prefix: "c" },
        actions: ActionTemplate::PerVariable { action: Action::Provide },
        precondition: "true",
        checks: &[CheckKind::ElementAtPositionHasValue, CheckKind::SortedByCriteria],
    },
    PatternSpec {
        kind: PatternKind::Call,
        goals: &[Goal::CallSuccess, Goal::CallFail],
        variables: VariableSchema::Fixed(&[]),
        actions: ActionTemplate::Fixed(&[step(Action::Press)]),
        precondition: "true",
        checks: &[CheckKind::PopupMessage, CheckKind::StayInSamePage, CheckKind::ChangeToPage],
    },
];

/// One requested check: a tag plus its parameters. The tag is kept textual so
/// validation can report unknown tokens instead of failing to parse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckInstance {
    pub tag: String,
    #[serde(default)]
    pub params: Vec<String>,
}

/// A user-authored test configuration: which pattern to instantiate on which
/// Behaviour, toward which goal, with which data and oracle checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternConfig {
    pub pattern: PatternKind,
    pub goal: Goal,
    pub target: ElementId,
    #[serde(default)]
    pub bindings: BTreeMap<String, String>,
    pub checks: Vec<CheckInstance>,
}

/// Graph-independent validation of a configuration against the catalog.
/// Returns a sorted diagnostic list; empty means the config is usable.
pub fn validate_config(config: &PatternConfig) -> Vec<Diagnostic> {
    validate_config_inner(config, true)
}

/// Like [`validate_config`] but without binding completeness. Generation
/// defers that part until data-passing inheritance has filled in values.
pub fn validate_config_shape(config: &PatternConfig) -> Vec<Diagnostic> {
    validate_config_inner(config, false)
}

fn validate_config_inner(config: &PatternConfig, completeness: bool) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let spec = config.pattern.spec();
    let subject = || alloc::vec![config.target.clone()];

    // CFG1: the goal belongs to the pattern.
    if !spec.goals.contains(&config.goal) {
        diags.push(Diagnostic::error(
            Rule::Cfg1,
            subject(),
            format!("goal '{}' does not belong to pattern '{}'", config.goal.tag(), spec.kind),
        ));
    }

    if completeness {
        validate_bindings(spec, &config.bindings, &config.target, &mut diags);
    } else {
        validate_binding_shape(spec, &config.bindings, &config.target, &mut diags);
    }

    // CFG3: at least one check, every check known to the pattern, arities and
    // parameters sound.
    if config.checks.is_empty() {
        diags.push(Diagnostic::error(
            Rule::Cfg3,
            subject(),
            format!("pattern '{}' requires at least one check", spec.kind),
        ));
    }
    for check in &config.checks {
        let Some(kind) = CheckKind::from_tag(&check.tag) else {
            diags.push(Diagnostic::error(
                Rule::Cfg3,
                subject(),
                format!("unknown check '{}'", check.tag),
            ));
            continue;
        };
        if !spec.checks.contains(&kind) {
            diags.push(Diagnostic::error(
                Rule::Cfg3,
                subject(),
                format!("check '{}' is not part of pattern '{}'", kind.tag(), spec.kind),
            ));
            continue;
        }
        if check.params.len() != kind.arity() {
            diags.push(Diagnostic::error(
                Rule::Cfg3,
                subject(),
                format!(
                    "check '{}' takes {} parameter(s), got {}",
                    kind.tag(),
                    kind.arity(),
                    check.params.len()
                ),
            ));
        }
        for (i, p) in check.params.iter().enumerate() {
            if p.is_empty() {
                diags.push(Diagnostic::error(
                    Rule::Cfg3,
                    subject(),
                    format!("check '{}' parameter {} is empty", kind.tag(), i + 1),
                ));
            }
        }
    }

    sort_diagnostics(&mut diags);
    diags
}

/// CFG2 on an arbitrary binding map. Exposed separately because inherited
/// bindings are re-validated after data passing is applied.
pub fn validate_bindings(
    spec: &PatternSpec,
    bindings: &BTreeMap<String, String>,
    target: &ElementId,
    diags: &mut Vec<Diagnostic>,
) {
    validate_binding_shape(spec, bindings, target, diags);
    let subject = || alloc::vec![target.clone()];
    match spec.variables {
        VariableSchema::Fixed(names) => {
            for name in names {
                if !bindings.contains_key(*name) {
                    diags.push(Diagnostic::error(
                        Rule::Cfg2,
                        subject(),
                        format!("pattern '{}' requires binding '{name}'", spec.kind),
                    ));
                }
            }
        }
        VariableSchema::Indexed { prefix } => {
            check_consecutive(spec, bindings.keys(), prefix, target, diags);
        }
        VariableSchema::IndexedPair { value_prefix, criterion_prefix } => {
            let (values, criteria) = split_pair(bindings, criterion_prefix);
            let nv = check_consecutive(spec, values.into_iter(), value_prefix, target, diags);
            let nc = check_consecutive(spec, criteria.into_iter(), criterion_prefix, target, diags);
            if let (Some(nv), Some(nc)) = (nv, nc) {
                if nv != nc {
                    diags.push(Diagnostic::error(
                        Rule::Cfg2,
                        subject(),
                        format!(
                            "pattern '{}' needs as many '{criterion_prefix}' bindings as '{value_prefix}' bindings (got {nc} and {nv})",
                            spec.kind
                        ),
                    ));
                }
            }
        }
    }
}

/// The part of CFG2 that judges only what is present: no empty values, no
/// names the schema cannot accept. Missing or non-consecutive bindings are
/// left to [`validate_bindings`].
pub fn validate_binding_shape(
    spec: &PatternSpec,
    bindings: &BTreeMap<String, String>,
    target: &ElementId,
    diags: &mut Vec<Diagnostic>,
) {
    let subject = || alloc::vec![target.clone()];
    for (name, value) in bindings {
        if value.is_empty() {
            diags.push(Diagnostic::error(
                Rule::Cfg2,
                subject(),
                format!("binding '{name}' is empty"),
            ));
        }
    }
    let bad_shape = |name: &String, prefix: &str, diags: &mut Vec<Diagnostic>| {
        if parse_index(name, prefix).is_none() {
            diags.push(Diagnostic::error(
                Rule::Cfg2,
                alloc::vec![target.clone()],
                format!(
                    "binding '{name}' does not match '{prefix}1'..'{prefix}N' for pattern '{}'",
                    spec.kind
                ),
            ));
        }
    };
    match spec.variables {
        VariableSchema::Fixed(names) => {
            for name in bindings.keys() {
                if !names.contains(&name.as_str()) {
                    diags.push(Diagnostic::error(
                        Rule::Cfg2,
                        subject(),
                        format!("pattern '{}' does not accept binding '{name}'", spec.kind),
                    ));
                }
            }
        }
        VariableSchema::Indexed { prefix } => {
            for name in bindings.keys() {
                bad_shape(name, prefix, diags);
            }
        }
        VariableSchema::IndexedPair { value_prefix, criterion_prefix } => {
            let (values, criteria) = split_pair(bindings, criterion_prefix);
            for name in values {
                bad_shape(name, value_prefix, diags);
            }
            for name in criteria {
                bad_shape(name, criterion_prefix, diags);
            }
        }
    }
}

fn split_pair<'a>(
    bindings: &'a BTreeMap<String, String>,
    criterion_prefix: &str,
) -> (Vec<&'a String>, Vec<&'a String>) {
    bindings.keys().partition(|k| !k.starts_with(criterion_prefix))
}

/// The canonical decimal index of `<prefix><digits>`, rejecting zero, leading
/// zeros and foreign names.
pub(crate) fn parse_index(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)
        .and_then(|digits| digits.parse::<usize>().ok().filter(|n| n.to_string() == digits && *n > 0))
}

/// Well-shaped indices under `prefix` must be exactly 1..N. Returns Some(N)
/// when every name is well shaped and consecutive; ill-shaped names were
/// already reported by [`validate_binding_shape`].
fn check_consecutive<'a>(
    spec: &PatternSpec,
    names: impl Iterator<Item = &'a String>,
    prefix: &str,
    target: &ElementId,
    diags: &mut Vec<Diagnostic>,
) -> Option<usize> {
    let mut indices = BTreeSet::new();
    let mut ok = true;
    for name in names {
        match parse_index(name, prefix) {
            Some(i) => {
                indices.insert(i);
            }
            None => ok = false,
        }
    }
    let n = indices.len();
    if indices.iter().next_back().copied().unwrap_or(0) != n {
        ok = false;
        diags.push(Diagnostic::error(
            Rule::Cfg2,
            alloc::vec![target.clone()],
            format!("'{prefix}' bindings for pattern '{}' are not consecutive from {prefix}1", spec.kind),
        ));
    }
    ok.then_some(n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApplicabilityError {
    UnknownElement(ElementId),
    NotABehaviour(ElementId),
}

impl fmt::Display for ApplicabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApplicabilityError::UnknownElement(id) => write!(f, "unknown element '{id}'"),
            ApplicabilityError::NotABehaviour(id) => {
                write!(f, "'{id}' is not a Behaviour; patterns apply to Behaviours only")
            }
        }
    }
}

/// Which patterns make sense for a Behaviour. An explicit pattern tag on the
/// element decides alone; otherwise the widget vocabulary decides, and the
/// environment-dependent patterns (Rotation, ResourceDependency) always apply.
pub fn applicable_patterns(
    g: &ModelGraph,
    id: &ElementId,
) -> Result<BTreeSet<PatternKind>, ApplicabilityError> {
    let element = g
        .element(id)
        .ok_or_else(|| ApplicabilityError::UnknownElement(id.clone()))?;
    if element.kind != ElementKind::Behaviour {
        return Err(ApplicabilityError::NotABehaviour(id.clone()));
    }
    let info = element.behaviour.as_ref();
    if let Some(tagged) = info.and_then(|i| i.pattern) {
        return Ok(BTreeSet::from([tagged]));
    }

    let mut out = BTreeSet::from([PatternKind::Rotation, PatternKind::ResourceDependency]);
    let Some(widget) = info.and_then(|i| i.widget.as_ref()) else {
        return Ok(out);
    };
    match widget {
        WidgetKind::EditText => {
            out.extend([PatternKind::Input, PatternKind::Find]);
            if in_login_group(g, id) {
                out.insert(PatternKind::Login);
            }
        }
        WidgetKind::Button => {
            out.insert(PatternKind::Call);
            if in_login_group(g, id) {
                out.insert(PatternKind::Login);
            }
        }
        WidgetKind::ListView | WidgetKind::RecyclerView => {
            out.extend([PatternKind::Sort, PatternKind::MasterDetail, PatternKind::Find]);
        }
        WidgetKind::TabHost | WidgetKind::TabLayout => {
            out.insert(PatternKind::TabScroll);
        }
        WidgetKind::DrawerLayout => {
            out.insert(PatternKind::SideDrawer);
        }
        _ => {}
    }
    Ok(out)
}

/// A login form is approximated as a Group holding a password-entry EditText
/// (id or label mentions "password") together with a Button.
fn in_login_group(g: &ModelGraph, id: &ElementId) -> bool {
    let Ok(Parents::One(parent)) = g.parent(id) else {
        return false;
    };
    if g.kind(&parent) != Some(ElementKind::Group) {
        return false;
    }
    let siblings = g.inner_behaviour(&parent);
    let widget_of = |sid: &ElementId| {
        g.element(sid)
            .and_then(|e| e.behaviour.as_ref())
            .and_then(|i| i.widget.clone())
    };
    let mentions_password = |sid: &ElementId| {
        let lowered = sid.as_str().to_lowercase();
        let label = g
            .element(sid)
            .and_then(|e| e.label.as_ref())
            .map(|l| l.to_lowercase())
            .unwrap_or_default();
        lowered.contains("password") || label.contains("password")
    };
    let has_password_field = siblings
        .iter()
        .any(|s| widget_of(s) == Some(WidgetKind::EditText) && mentions_password(s));
    let has_button = siblings.iter().any(|s| widget_of(s) == Some(WidgetKind::Button));
    has_password_field && has_button
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BehaviourInfo, GraphBuilder};
    use alloc::string::ToString;
    use alloc::vec;

    fn config(pattern: PatternKind, goal: Goal, checks: Vec<CheckInstance>) -> PatternConfig {
        PatternConfig {
            pattern,
            goal,
            target: "b".into(),
            bindings: BTreeMap::new(),
            checks,
        }
    }

    fn check(tag: &str, params: &[&str]) -> CheckInstance {
        CheckInstance {
            tag: tag.to_string(),
            params: params.iter().map(|p| p.to_string()).collect(),
        }
    }

    #[test]
    fn catalog_is_indexed_by_kind() {
        for (i, spec) in CATALOG.iter().enumerate() {
            assert_eq!(spec.kind as usize, i);
            assert_eq!(spec.precondition, "true");
            assert!(!spec.goals.is_empty());
            assert!(!spec.checks.is_empty());
        }
    }

    #[test]
    fn every_goal_belongs_to_exactly_one_pattern() {
        for goal in ALL_GOALS {
            let owners: Vec<_> =
                CATALOG.iter().filter(|s| s.goals.contains(&goal)).map(|s| s.kind).collect();
            assert_eq!(owners.len(), 1, "{}", goal.tag());
        }
    }

    #[test]
    fn change_to_page_is_the_only_shared_check() {
        for check in ALL_CHECKS {
            let owners = CATALOG.iter().filter(|s| s.checks.contains(&check)).count();
            if check == CheckKind::ChangeToPage {
                assert_eq!(owners, 2);
            } else {
                assert_eq!(owners, 1, "{}", check.tag());
            }
        }
    }

    #[test]
    fn template_variables_exist_in_schema() {
        for spec in &CATALOG {
            if let ActionTemplate::Fixed(steps) = spec.actions {
                for s in steps {
                    assert_eq!(s.var.is_some(), s.action.takes_input(), "{}", s.action.name());
                    if let (Some(var), VariableSchema::Fixed(names)) = (s.var, spec.variables) {
                        assert!(names.contains(&var));
                    }
                }
            }
        }
    }

    #[test]
    fn goal_membership_is_checked() {
        let cfg = config(PatternKind::Call, Goal::LoginValid, vec![check("PopupMessage", &[])]);
        let diags = validate_config(&cfg);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, Rule::Cfg1);
    }

    #[test]
    fn fixed_bindings_must_match_exactly() {
        let mut cfg = config(PatternKind::Login, Goal::LoginValid, vec![check("SamePage", &[])]);
        cfg.bindings.insert("username".into(), "u".into());
        cfg.bindings.insert("token".into(), "t".into());
        let rules: Vec<Rule> = validate_config(&cfg).into_iter().map(|d| d.rule).collect();
        // Missing 'password' and unexpected 'token'.
        assert_eq!(rules, vec![Rule::Cfg2, Rule::Cfg2]);
    }

    #[test]
    fn indexed_bindings_must_be_consecutive() {
        let mut cfg = config(
            PatternKind::Find,
            Goal::FindValueFound,
            vec![check("ResultEmpty", &[])],
        );
        cfg.bindings.insert("v1".into(), "a".into());
        cfg.bindings.insert("v3".into(), "c".into());
        let rules: Vec<Rule> = validate_config(&cfg).into_iter().map(|d| d.rule).collect();
        assert_eq!(rules, vec![Rule::Cfg2]);

        cfg.bindings.insert("v2".into(), "b".into());
        assert!(validate_config(&cfg).is_empty());

        // Zero indexed bindings are legal.
        cfg.bindings.clear();
        assert!(validate_config(&cfg).is_empty());
    }

    #[test]
    fn paired_bindings_need_matching_counts() {
        let mut cfg = config(
            PatternKind::Sort,
            Goal::SortAscending,
            vec![check("SortedByCriteria", &[])],
        );
        cfg.bindings.insert("v1".into(), "7".into());
        cfg.bindings.insert("v2".into(), "9".into());
        cfg.bindings.insert("c1".into(), "price".into());
        let rules: Vec<Rule> = validate_config(&cfg).into_iter().map(|d| d.rule).collect();
        assert_eq!(rules, vec![Rule::Cfg2]);

        cfg.bindings.insert("c2".into(), "price".into());
        assert!(validate_config(&cfg).is_empty());
    }

    #[test]
    fn checks_are_validated_for_membership_arity_and_params() {
        let cases = [
            (check("NoSuchCheck", &[]), "unknown"),
            (check("TabsPresent", &[]), "not part of"),
            (check("ChangeToPage", &[]), "parameter"),
            (check("ChangeToPage", &[""]), "empty"),
        ];
        for (bad, needle) in cases {
            let cfg = config(PatternKind::Call, Goal::CallSuccess, vec![bad]);
            let diags = validate_config(&cfg);
            assert_eq!(diags.len(), 1);
            assert_eq!(diags[0].rule, Rule::Cfg3);
            assert!(diags[0].message.contains(needle), "{}", diags[0].message);
        }
        let empty = config(PatternKind::Call, Goal::CallSuccess, vec![]);
        assert_eq!(validate_config(&empty)[0].rule, Rule::Cfg3);
    }

    fn widget_graph() -> ModelGraph {
        let widget = |w: WidgetKind| BehaviourInfo { pattern: None, widget: Some(w) };
        GraphBuilder::with_model("m", "i", "e")
            .element("g", ElementKind::Group)
            .child_structs("m", ["g"])
            .behaviour_with("plain", BehaviourInfo::default())
            .behaviour_with("list", widget(WidgetKind::ListView))
            .behaviour_with("drawer", widget(WidgetKind::DrawerLayout))
            .child_behaviours("m", ["plain", "list", "drawer"])
            .behaviour_with("user_field", widget(WidgetKind::EditText))
            .behaviour_with("password_field", widget(WidgetKind::EditText))
            .behaviour_with("submit", widget(WidgetKind::Button))
            .child_behaviours("g", ["user_field", "password_field", "submit"])
            .build()
    }

    #[test]
    fn widgets_drive_applicability() {
        let g = widget_graph();
        let pats = |id: &str| applicable_patterns(&g, &id.into()).unwrap();
        let base = BTreeSet::from([PatternKind::Rotation, PatternKind::ResourceDependency]);

        assert_eq!(pats("plain"), base);
        let mut list = base.clone();
        list.extend([PatternKind::Sort, PatternKind::MasterDetail, PatternKind::Find]);
        assert_eq!(pats("list"), list);
        let mut drawer = base.clone();
        drawer.insert(PatternKind::SideDrawer);
        assert_eq!(pats("drawer"), drawer);

        // The group holds a password EditText and a Button: Login applies to
        // its text fields and button, not to elements elsewhere.
        let mut user = base.clone();
        user.extend([PatternKind::Input, PatternKind::Find, PatternKind::Login]);
        assert_eq!(pats("user_field"), user);
        let mut submit = base.clone();
        submit.extend([PatternKind::Call, PatternKind::Login]);
        assert_eq!(pats("submit"), submit);

        assert_eq!(
            applicable_patterns(&g, &"m".into()),
            Err(ApplicabilityError::NotABehaviour("m".into()))
        );
    }

    #[test]
    fn explicit_pattern_tag_wins() {
        let g = GraphBuilder::with_model("m", "i", "e")
            .behaviour_with(
                "b",
                BehaviourInfo {
                    pattern: Some(PatternKind::Call),
                    widget: Some(WidgetKind::ListView),
                },
            )
            .child_behaviours("m", ["b"])
            .build();
        assert_eq!(
            applicable_patterns(&g, &"b".into()).unwrap(),
            BTreeSet::from([PatternKind::Call])
        );
    }
}
