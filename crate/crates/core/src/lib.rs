pub mod cli;
pub mod contraction;
pub mod group;
pub mod lattice;
pub mod linalg;
pub mod newton;
pub mod nilpotent;
pub mod padic;
pub mod sample;
pub mod tidy;
