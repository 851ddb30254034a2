use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Validation failures carry the measured residual so callers can print the
/// actual number rather than a bare verdict.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input shape mismatch: {0}")]
    InputShape(String),

    #[error("not a Lie algebra ({what}): residual {residual:.3e} exceeds {tol:.1e}")]
    InvalidAlgebra { what: &'static str, residual: f64, tol: f64 },

    #[error("r-matrix is not antisymmetric: residual {residual:.3e}")]
    NotAntisymmetric { residual: f64 },

    #[error("basis vectors of {name} are linearly dependent (rank {rank} < {len})")]
    DependentBasis { name: String, rank: usize, len: usize },

    #[error("{name} is not contained in {ambient}: residual {residual:.3e}")]
    NotContained { name: String, ambient: String, residual: f64 },

    #[error("{name} is not closed under the bracket: residual {residual:.3e}")]
    Subalgebra { name: String, residual: f64 },

    #[error("cobracket of {name} leaves {name}^2: residual {residual:.3e}")]
    NotSubBialgebra { name: String, residual: f64 },

    #[error("assembled double fails {what}: residual {residual:.3e}")]
    DoubleJacobi { what: &'static str, residual: f64 },

    #[error("H + M is not a direct sum decomposition of K (rank {rank}, expected {expected})")]
    Complement { rank: usize, expected: usize },

    #[error("decomposition is not reductive: [H, M] has H-component {residual:.3e}")]
    Reductivity { residual: f64 },

    #[error("H-annihilator is not an ideal of the dual algebra: residual {residual:.3e}")]
    Ideal { residual: f64 },

    #[error("M-annihilator is not a subalgebra of the dual algebra: residual {residual:.3e}")]
    DualSubalgebra { residual: f64 },

    #[error("H + H* is not closed in the double: residual {residual:.3e}")]
    SubdoubleClosure { residual: f64 },

    #[error("factor {index} of the word has a component {residual:.3e} outside {target}")]
    FactorNotInDual { index: usize, target: &'static str, residual: f64 },

    #[error("{}", degenerate_message(*.cond, *.odd_dimension))]
    CDegenerate { cond: f64, odd_dimension: bool },

    #[error("no second-class sample point found after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn degenerate_message(cond: f64, odd: bool) -> String {
    if odd {
        "constraint matrix is degenerate: M is odd-dimensional, so the antisymmetric C is always singular".to_string()
    } else {
        format!("constraint matrix is degenerate (cond {cond:.3e}); the point lies outside the second-class region")
    }
}
