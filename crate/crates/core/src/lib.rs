#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod assembly;
pub mod basis;
pub mod diagnostics;
pub mod error;
pub mod ghost;
pub mod material;
pub mod mesh;
pub mod seeding;
pub mod solver;
pub mod sparse;
pub mod transfer;

pub use error::{Error, Result};
