//! Crate-wide error type.
//!
//! Every variant carries enough context to be reported to a user (constraint
//! index, offending name, expected/actual arity). The CLI maps these onto
//! stable exit codes: input and validation problems are exit code 2, resource
//! caps are exit code 3.

use thiserror::Error;

/// Errors produced by parsing, validation, and the algebraic operations.
#[derive(Debug, Error)]
pub enum Error {
    /// The document is not syntactically valid JSON.
    #[error("malformed syntax at line {line}, column {column}: {message}")]
    MalformedSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// A scope length disagrees with the arity of its relation.
    #[error("constraint {constraint}: relation `{relation}` has arity {expected}, scope has length {actual}")]
    ArityMismatch {
        constraint: usize,
        relation: String,
        expected: usize,
        actual: usize,
    },

    /// A scope mentions a variable that is not declared.
    #[error("constraint {constraint}: variable `{variable}` is not declared")]
    UndeclaredVariable { constraint: usize, variable: String },

    /// A constraint names a relation that the language does not define.
    #[error("constraint {constraint}: unknown relation `{relation}`")]
    UnknownRelation { constraint: usize, relation: String },

    /// A relation tuple has the wrong length or an entry outside {+1, -1}.
    #[error("relation `{relation}`: {message}")]
    BadRelation { relation: String, message: String },

    /// An invalid variable name (must match `[A-Za-z_][A-Za-z0-9_]*`).
    #[error("invalid variable name `{name}`")]
    BadVariableName { name: String },

    /// A Boolean assignment is missing a variable required by the instance.
    #[error("assignment does not cover variable `{variable}`")]
    PartialAssignment { variable: String },

    /// Generic invalid-input condition with context.
    #[error("{0}")]
    InvalidInput(String),

    /// A configured resource cap was exceeded.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// Matrix dimensions are incompatible for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operation requires commuting inputs and got a non-commuting pair.
    #[error("operators at positions {left} and {right} do not commute")]
    NonCommuting { left: usize, right: usize },

    /// An input matrix fails a required predicate (Hermitian, involution,
    /// idempotent, invertible).
    #[error("matrix predicate failed: {0}")]
    PredicateFailed(String),

    /// An operator assignment failed validation against an instance.
    #[error("invalid operator assignment: {0}")]
    InvalidAssignment(String),

    /// A supplied pp-definition does not define the relation it claims to.
    #[error("pp-definition for `{relation}` does not define the target relation")]
    DefinitionMismatch { relation: String },

    /// A precondition of a constructive algorithm failed midway; indicates a
    /// broken caller-side precondition rather than an internal bug.
    #[error("internal assertion failed: {0}")]
    BrokenPrecondition(String),
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded(_) => 3,
            _ => 2,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::MalformedSyntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
