#![no_std]
extern crate alloc;

pub mod cad;
pub mod complexity;
pub mod dyadic;
pub mod parse;
pub mod poly;
pub mod projection;
pub mod qff;
pub mod realalg;
pub mod uroots;

pub use poly::Poly;
