pub mod accel;
pub mod classic;
pub mod conformal;
pub mod dd;
pub mod error;
pub mod export;
pub mod expr;
pub mod fit;
pub mod inverse;
pub mod linalg;
pub mod measure;
pub mod padeortho;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod wide;

pub use dd::DoubleDouble;
pub use error::{Error, Result};
pub use scalar::Real;
pub use wide::Float256;

/// Double-precision instances of the main types.
pub type Complex64 = num_complex::Complex<f64>;
pub type Basis = measure::OrthoBasis<f64>;
pub type Measure = measure::MeasureSpec<f64>;
pub type Map = conformal::ConformalMap<f64>;
pub type Series = series::CoeffSeries<f64>;
pub type Approximant = padeortho::RationalApproximant<f64>;
pub type Poly = poly::Polynomial<f64>;
