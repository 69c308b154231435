pub mod convex;
pub mod diagram;
pub mod domain;
pub mod dsl;
pub mod error;
mod hrep;
pub mod lp;
pub mod pregroup;
pub mod relation;
pub mod scalar;
pub mod semantics;
