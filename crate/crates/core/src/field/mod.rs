//! The projective line over a finite field and the coefficient ring.

pub mod character;
pub mod curve;
pub mod cyclotomic;
pub mod series;

pub use character::{character_monomial, CharacterSpec, Mode, MonomialValue};
pub use curve::{place_counts, zeta_series, Curve, PlaceTable, SpinEntry};
pub use cyclotomic::Cyclotomic;
pub use series::{CoefficientValue, LaurentPoly, TruncatedSeries, UPoly};
