//! Error type shared by every module of the crate.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building fields, graphs, censuses,
/// or designs.
///
/// `StructuralFailure` is reserved for violations of properties the graphs
/// are guaranteed to have: hitting one means the build itself is wrong, so
/// callers should treat it as a bug rather than bad input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Field parameters are unusable (p not prime, reducible modulus, ...).
    InvalidSpec(String),
    /// Parameters are well formed but outside the supported case split
    /// (e.g. a Paley graph with q not congruent to 1 mod 4).
    UnsupportedParameters(String),
    /// A caller-supplied argument violates an operation's precondition.
    InvalidArgument(String),
    /// Derived quantities are inconsistent (non-integer count, negative
    /// class size, ...).
    InvalidParameters(String),
    /// Multiplicative inverse of the zero element.
    ZeroInversion,
    /// A structural property of the graph failed to verify.
    StructuralFailure(String),
    /// A computation was refused because it exceeds a configured cap.
    ResourceLimit(String),
    /// A block family violates the pairwise non-isomorphism /
    /// non-complement condition.
    FamilyValidation(String),
    /// A block set is not a 2-design; carries two witness pairs with
    /// different incidence counts.
    NotADesign {
        low_pair: (u32, u32),
        low_count: u64,
        high_pair: (u32, u32),
        high_count: u64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpec(msg) => write!(f, "invalid field spec: {msg}"),
            Error::UnsupportedParameters(msg) => write!(f, "unsupported parameters: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            Error::ZeroInversion => write!(f, "multiplicative inverse of zero"),
            Error::StructuralFailure(msg) => write!(f, "structural failure: {msg}"),
            Error::ResourceLimit(msg) => write!(f, "resource limit: {msg}"),
            Error::FamilyValidation(msg) => write!(f, "invalid block family: {msg}"),
            Error::NotADesign {
                low_pair,
                low_count,
                high_pair,
                high_count,
            } => write!(
                f,
                "not a 2-design: pair {low_pair:?} lies in {low_count} blocks \
                 but pair {high_pair:?} lies in {high_count}"
            ),
        }
    }
}

impl std::error::Error for Error {}
