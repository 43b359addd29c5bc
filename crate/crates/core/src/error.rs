use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cone is not strongly convex: contains the line through {witness:?}")]
    NotStronglyConvex { witness: Vec<i64> },

    #[error("cone with rays {rays:?} is not a face")]
    NotAFace { rays: Vec<Vec<i64>> },

    #[error("grading {grading:?} is not strictly positive on ray {ray:?}")]
    NotPositiveGrading { grading: Vec<i64>, ray: Vec<i64> },

    #[error("rho {rho:?} is not in the interior of the cone (facet {facet:?} pairs to {pairing})")]
    InvalidGrading {
        rho: Vec<i64>,
        facet: Vec<i64>,
        pairing: i64,
    },

    #[error("eigenform {eta:?} has a pole or zero along ray {ray:?} (pairing {pairing})")]
    InvalidEigenform {
        eta: Vec<i64>,
        ray: Vec<i64>,
        pairing: i64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported curve: {0}")]
    UnsupportedCurve(String),

    #[error("effective weight {weight:?} is not positive on ray {ray:?}; the series does not converge u-adically")]
    PositivityViolation { weight: Vec<i64>, ray: Vec<i64> },

    #[error("fractional exponent {numer:?}/{denom} needs a choice of branch")]
    BranchAmbiguity { numer: Vec<i64>, denom: i64 },

    #[error("character does not restrict to the given parameter")]
    NotALift,

    #[error("cyclotomic order {order} lacks roots of unity of order {needed}")]
    MissingRoots { order: u32, needed: u32 },

    #[error("character is not an extension along the isogeny")]
    NotAnExtension,

    #[error("q = {q} is not 1 modulo the exponent {exponent} of the isogeny kernel")]
    IncompatibleField { q: u64, exponent: u64 },

    #[error("point {point:?} lies outside the support of the fan")]
    OutsideSupport { point: Vec<i64> },

    #[error("height is not continuous across ray {ray:?}")]
    DiscontinuousHeight { ray: Vec<i64> },

    #[error("series has no invertible leading term")]
    NotInvertible,
}
