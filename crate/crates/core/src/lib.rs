pub mod calculus;
pub mod catalog;
pub mod determining;
pub mod expr;
pub mod solver;
pub mod verify;
