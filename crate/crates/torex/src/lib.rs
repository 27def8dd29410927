//! Topological graph algorithms on rotation systems: edge-widths, stretch,
//! surface surgery, planarization with certified crossing counts and
//! toroidal grid minors.

pub mod cycle;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod gridminor;
pub mod homology;
pub mod lemmas;
pub mod planarizer;
pub mod stretchfinder;
pub mod surgery;

pub use cycle::EmbCycle;
pub use embedding::{edge_of, mate, Dart, RotationSystem};
pub use error::{Error, Result};
