pub mod chevalley;
pub mod error;
pub mod matrix;
pub mod padic;
pub mod pvaluation;
pub mod rigid;
pub mod root_datum;
pub mod scalar;
pub mod verma;

pub use error::{Error, Result};
pub use padic::{Padic, ScalarRing};
pub use scalar::{PValue, Scalar, Valuation};

pub type Rational = num_rational::BigRational;

pub type RationalMatrix = matrix::Matrix<Rational>;
pub use chevalley::PadicMatrix;
pub use rigid::{PadicSeries, RationalSeries};
