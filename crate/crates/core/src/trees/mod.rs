//! Tree types, encodings, the rotation correspondence, fringe counting and
//! shape functionals.

mod binary;
mod enumerate;
mod fringe;
mod key;
mod ordered;
pub(crate) mod property;
mod rotation;
mod shape;
mod toll;

pub use binary::{bst_from_permutation, BinaryNode, BinaryTree};
pub use enumerate::{all_binary_trees, all_ordered_trees, all_trees, all_unordered_keys};
pub use fringe::{
    additive_functional, count_by_size, count_matching, count_property, fringe_key,
    fringe_size_multiset, min_leaf_distances, outdegree_counts, protected_count, AnyTree, Fringe,
    TreeRef,
};
pub use key::{TreeKey, TreeMode};
pub use ordered::{rrt_from_attachments, OrderedNode, OrderedTree};
pub use property::Property;
pub use rotation::{rotation_to_binary, rotation_to_ordered};
pub use shape::{shape_log_prob, shape_prob};
pub use toll::{Toll, TollFunction};

pub type NodeId = usize;
