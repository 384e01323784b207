use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid order m = {order} for degree n = {degree} (need |m| <= n)")]
    InvalidOrder { degree: usize, order: isize },

    #[error("singular argument x = {0} (must be > 0)")]
    SingularArgument(f64),

    #[error("degree {got} too small (need at least {needed})")]
    DegreeTooSmall { needed: usize, got: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid medium constants: density {density}, sound speed {sound_speed}")]
    InvalidMedium { density: f64, sound_speed: f64 },

    #[error("no valid evaluation points inside disk of radius {radius} m")]
    EmptyDisk { radius: f64 },

    #[error("condition number undefined for a zero matrix")]
    UndefinedConditioning,

    #[error("operator cache: {0}")]
    Cache(String),
}
