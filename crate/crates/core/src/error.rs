use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected rank-{expected} H^2 data, got {found} ({what})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        what: &'static str,
    },

    #[error("invalid ring data: {0}")]
    InvalidRing(String),

    #[error("invalid Chern data: {0}")]
    InvalidChernData(String),

    #[error("series root needs leading coefficient 1, got {0}")]
    LeadingTerm(String),

    #[error("flag rejected: {}", .0.join("; "))]
    InvalidFlag(Vec<String>),

    #[error("matrix is not an isometry of the restricted lattice: {0}")]
    NotIsometry(String),

    #[error("matrix is not an involution: {0}")]
    NotInvolution(String),

    #[error("ring is not Calabi-Yau (c1 != 0)")]
    NotCalabiYau,

    #[error("Hodge data gives chi_top = {computed}, stored chi_top = {stored}")]
    EulerMismatch { computed: i64, stored: i64 },

    #[error("registry conflict for {key}: existing value {existing}, new value {new}")]
    RegistryConflict {
        key: String,
        existing: String,
        new: String,
    },

    #[error("no registry entry with id {0}")]
    UnknownEntry(usize),

    #[error("entry {0} is not marked as realized by exceptional stable bundles")]
    NotExceptional(usize),

    #[error("declared pairing does not match the vectors being reflected")]
    DeclarationMismatch,

    #[error("negative h^0 estimate {0}")]
    NegativeSections(String),

    #[error("Schubert: {0}")]
    Schubert(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors that come from malformed input documents rather than
    /// from a failed mathematical check.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Io(_))
    }
}

pub(crate) fn check_len(expected: usize, found: usize, what: &'static str) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            found,
            what,
        })
    }
}
