use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid scalar ring: {0}")]
    InvalidRing(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} is not a unit")]
    NotUnit(String),

    #[error("precision error: {0}")]
    Precision(String),

    /// The standing hypothesis `p - 1 > e h` does not hold.
    #[error("parameter gate violated: p-1 = {p_minus_one} <= eh = {eh}")]
    Gate { p_minus_one: u64, eh: u64 },

    #[error("element is not in the pro-p Iwahori subgroup: {0}")]
    NotInIwahori(String),

    #[error("factorization did not converge at pivot {0}")]
    Factorization(String),

    #[error("character is not rigid: v_p({value}) = {valuation} <= 1/(p-1) - 1")]
    NonRigid { value: String, valuation: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}
