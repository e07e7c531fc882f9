//! Finitely presented groups: words, presentations, coset enumeration,
//! Reidemeister–Schreier rewriting, Tietze simplification and abelian
//! invariants.

pub mod coset;
pub mod presentation;
pub mod schreier;
pub mod smith;
pub mod tietze;
pub mod word;

pub use coset::{
    coset_strategy, coset_strategy_names, todd_coxeter, CosetStrategy, CosetTable, Enumeration, DEFAULT_STRATEGY,
};
pub use presentation::Presentation;
pub use schreier::{reidemeister_schreier, SchreierRewriter};
pub use smith::{abelian_invariants, smith_normal_form, AbelianInvariants, SmithForm};
pub use tietze::{simplify, simplify_tracked, Simplified};
pub use word::Word;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FpError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("generator {generator} out of range for {n_gens} generators")]
    GeneratorOutOfRange { generator: usize, n_gens: usize },
    #[error("unknown coset enumeration strategy `{0}`")]
    UnknownStrategy(String),
    #[error("coset table is not complete")]
    IncompleteTable,
}

impl FpError {
    /// Attaches a line number, turning any error into a parse error.
    pub fn at_line(self, line: usize) -> Self {
        match self {
            FpError::Parse { message, .. } => FpError::Parse { line, message },
            other => FpError::Parse {
                line,
                message: other.to_string(),
            },
        }
    }
}
