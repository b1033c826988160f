pub mod bernoulli;
pub mod continuation;
pub mod error;
pub mod geometry;
pub mod point;
pub mod scaled;
pub mod series;
pub mod verify;
pub mod zeros;

pub use error::{Result, ZetaError};
pub use point::{ComplexPoint, Rect};
pub use scaled::{ScaledComplex, ScaledReal};
