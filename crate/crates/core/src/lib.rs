#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod dunkl;
pub mod error;
pub mod measure;
pub mod par;
pub mod params;
pub mod symbol;
pub mod transform;
pub mod inequalities;
pub mod multiplier;
pub mod suite;
pub mod pde;
pub mod cli;
