//! Executable hardness reductions with certificate maps.

pub mod ksum;
pub mod mcc;
pub mod tree;

pub use ksum::{exp_enclosure, precision_bits, reduce_ksum_to_kspm, taylor_exp, KsumInstance, KsumReduction};
pub use mcc::{d_gadget, default_f, i_gadget, reduce_mcc_to_unipbds, t_prime, Block, Connector, IGadget, McColoredGraph, MccReduction};
pub use tree::{reduce_kspm_to_tree, TreeReduction};
