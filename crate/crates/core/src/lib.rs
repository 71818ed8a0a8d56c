//! Exact-arithmetic checkers for the algebra of graded sign conventions:
//! L∞ and A∞ structures and their relations, Hochschild cochains with the
//! Gerstenhaber bracket, telescope complexes with action filtrations, the
//! closed–open morphism relations, and the tree combinatorics indexing the
//! underlying moduli strata. Everything runs over ℤ, ℚ or ℤ/n with no floats.

pub mod ainfty;
pub mod co;
pub mod format;
pub mod grading;
pub mod linalg;
pub mod linfty;
pub mod module;
pub mod multilinear;
pub mod perm;
pub mod report;
pub mod ring;
pub mod telescope;
pub mod trees;

pub use grading::{check_grading_datum, expected_index, Degree, GradingDatum};
pub use module::{Generator, GradedModule};
pub use multilinear::{MultilinearOp, Symmetry};
pub use perm::{koszul_sign, multi_unshuffles, multi_unshuffles_lt, unshuffles, Permutation};
pub use ring::Ring;
