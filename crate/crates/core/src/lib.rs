pub mod criteria;
pub mod detector;
pub mod emitter;
pub mod error;
pub mod gaussian;
pub mod hermite;
pub mod optimize;
pub mod table;

pub use error::{QngError, Result};
