//! Product-one sequences over finite groups: products, atoms, Davenport
//! constants, class semigroups and arithmetic invariants.

pub mod elemset;
pub mod group;
pub mod arith;
pub mod class_semigroup;
pub mod factor;
pub mod seq;
pub mod structure;

pub use elemset::ElemSet;
pub use group::{analyze, subgroup_generated, Group, GroupError, GroupStructure, Subgroup};
pub use seq::{product_set, subsequence_products, Sequence, SeqError, SubLattice};
