//! Unknot and unlink recognition for knot diagrams whose underlying graph
//! has treewidth at most two, in time linear in the number of crossings.
//!
//! The pipeline is [`diagram::parse_pd`] → [`gkd::GeneralizedDiagram::from_plane_diagram`]
//! → [`engine::reduce`]. [`oracle`] holds an exponential Kauffman bracket
//! used to cross-check every rewrite, and [`generator`] builds seeded
//! instances with known answers.

pub mod diagram;
pub mod engine;
pub mod generator;
pub mod gkd;
pub mod oracle;
pub mod rules;

pub use diagram::{parse_pd, serialize_pd, DiagramError, PlaneDiagram};
pub use engine::{classify, classify_with, reduce, Classification, ReduceOptions, Verdict};
pub use gkd::GeneralizedDiagram;


