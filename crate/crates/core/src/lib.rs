//! Geodesic mutual-visibility sets on hexagonal grids and a synchronous
//! simulator for robots that gather into such a set.

pub mod configspace;
pub mod error;
pub mod gmvalgo;
pub mod hexgrid;
pub mod simulator;
pub mod visibility;

pub use configspace::Configuration;
pub use error::{Error, Result};
pub use gmvalgo::{build_pattern, Formation, MoveIntent, Pattern, TaskId};
pub use hexgrid::{Grid, HexVertex, LineFamily, LineId};
pub use visibility::VertexSet;
