//! Error and diagnostic types shared across the crate.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two values were combined that live over different generator sets.
    #[error("generator set mismatch: {0}")]
    DomainMismatch(String),
    /// A polynomial or map referenced a generator the context does not know.
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    /// A map is missing the image of a generator it must be total on.
    #[error("missing image for generator `{0}`")]
    MissingImage(String),
    /// A structural invariant failed; the report lists every violation.
    #[error("validation failed:\n{0}")]
    Invalid(ValidationReport),
    /// A requested destabilization pair does not have the right shape.
    #[error("not a destabilization pair: {0}")]
    NotDestabilizable(String),
    /// The middle algebras of two cones being glued do not agree.
    #[error("cone gluing mismatch:\n{0}")]
    GlueMismatch(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    /// An internal consistency check failed; this indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

/// The kind of invariant a [`Violation`] reports against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Grading,
    Triangularity,
    DifferentialSquare,
    ChainMap,
    Homotopy,
    Cone,
    Augmentation,
    Structure,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Grading => "grading",
            ViolationKind::Triangularity => "triangularity",
            ViolationKind::DifferentialSquare => "d^2=0",
            ViolationKind::ChainMap => "chain-map",
            ViolationKind::Homotopy => "homotopy",
            ViolationKind::Cone => "cone",
            ViolationKind::Augmentation => "augmentation",
            ViolationKind::Structure => "structure",
        };
        f.write_str(s)
    }
}

/// One violated invariant: which check failed, on which generator, and the
/// residual or explanation.
#[derive(Debug, Clone)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.kind, self.subject, self.detail)
    }
}

/// Collected diagnostics from a validation pass. Empty means valid.
///
/// Validators report every violation instead of failing on the first one,
/// so a caller can print the whole list.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, kind: ViolationKind, subject: impl Into<String>, detail: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            subject: subject.into(),
            detail: detail.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Turns a non-empty report into `Err(Error::Invalid)`.
    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
