use thiserror::Error;

/// Failure while reading one of the text formats (`.ts`, `.net`, region files, instances).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: undeclared identifier {id}")]
    Undeclared { line: usize, id: String },
    #[error("line {line}: event {event} already leaves state {state} (line {first_line}); the system must be deterministic")]
    Nondeterministic { line: usize, state: String, event: String, first_line: usize },
    #[error("line {line}: state {state} is not reachable from the initial state")]
    Unreachable { line: usize, state: String },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { line, message: message.into() }
    }

    pub(crate) fn undeclared(line: usize, id: &str) -> Self {
        ParseError::Undeclared { line, id: id.to_string() }
    }
}

/// A region specification that does not describe a region of the given system.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("event {0} is not an event of the transition system")]
    UnknownEvent(String),
    #[error("event {event} is listed in classes ({c1},{p1}) and ({c2},{p2})")]
    OverlappingClasses { event: String, c1: u64, p1: u64, c2: u64, p2: u64 },
    #[error("edge {src} -{event}-> {tgt}: support {support} of {src} is below con({event}) = {con}")]
    InsufficientSupport { src: String, event: String, tgt: String, support: i128, con: u64 },
    #[error("edge {src} -{event}-> {tgt}: support of {tgt} would be negative ({support})")]
    NegativeSupport { src: String, event: String, tgt: String, support: i128 },
    #[error("edge {src} -{event}-> {tgt}: forces support {forced} on {tgt}, which already has {existing}")]
    Conflict { src: String, event: String, tgt: String, forced: i128, existing: i128 },
    #[error("value does not fit into 64 bits")]
    Overflow,
    #[error("{0}")]
    Mismatch(String),
}

/// Invalid input to one of the hardness-gadget builders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("set M{0} is empty")]
    EmptySet(usize),
    #[error("set M{set} refers to X{index}, but the universe has {size} elements")]
    OutOfRange { set: usize, index: usize, size: usize },
    #[error("set M{set} lists X{index} twice")]
    Repeated { set: usize, index: usize },
    #[error("clause M{clause} has {size} variables, expected 3")]
    ClauseSize { clause: usize, size: usize },
    #[error("variable X{var} occurs in {count} clauses, expected exactly 3")]
    NotCubic { var: usize, count: usize },
    #[error("{clauses} clauses over {vars} variables; the counts must agree")]
    CountMismatch { clauses: usize, vars: usize },
    #[error("m = {0} is not a multiple of 3")]
    NotMultipleOfThree(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("reduction check failed: {0}")]
    ReductionFailure(String),
}

/// Misuse of a Petri net or mismatch between a net and a transition system.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PetriError {
    #[error("unknown transition {0}")]
    UnknownTransition(String),
    #[error("net transitions [{net}] differ from the system's events [{ts}]")]
    EventMismatch { ts: String, net: String },
    #[error("more than {cap} reachable markings")]
    CapExceeded { cap: usize },
}
