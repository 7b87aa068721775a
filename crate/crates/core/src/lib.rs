//! Exact workbench for sum-avoiding subsets of finite abelian groups.

pub mod classify;
pub mod construct;
pub mod cover;
pub mod error;
pub mod fourier;
pub mod group;
pub mod io;
pub mod phi;
pub mod runner;
pub mod set;
pub mod subgroup;

pub use error::{Error, Result};
pub use group::{Elem, GroupSpec};
pub use set::ElemSet;
pub use subgroup::Subgroup;
