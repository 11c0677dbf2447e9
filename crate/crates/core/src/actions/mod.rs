//! Finitely generated groups and their actions on nets.

mod action;
mod group;

pub use action::{ActionModel, PointMap, Turn, WordImage};
pub use group::{Element, Generator, GroupFamily, GroupPresentation, WordBall};
