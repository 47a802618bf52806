//! Construction and evaluation of two-block group-algebra (2BGA) quantum
//! LDPC codes: girth-controlled generator search over finite groups
//! (including SL(2,Z_p)), message-passing decoders, degeneracy-aware
//! Monte-Carlo simulation under depolarizing noise, and symmetry/entropy
//! diagnostics.

pub mod code;
pub mod codefile;
pub mod decoder;
pub mod diagnostics;
pub mod gf2;
pub mod group;
pub mod rngutil;
pub mod search;
pub mod sim;
pub mod tanner;

pub use code::{CssCode, GeneratorSets};
pub use gf2::{BinMatrix, BinVector};
pub use group::{Group, GroupElement, GroupSpec};
