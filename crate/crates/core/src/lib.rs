//! Exact computations on smooth complete toric varieties: graded sheaf
//! cohomology, Čech cocycles of the tangent sheaf and certificates for
//! obstructed first-order deformations.

pub mod cech;
pub mod certify;
pub mod error;
pub mod exactla;
pub mod fan;
pub mod formats;
pub mod nerve;
pub mod sheafcoh;

pub use error::{Error, Result};
pub use fan::{Fan, ToricDivisor};
