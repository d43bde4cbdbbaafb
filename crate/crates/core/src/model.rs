use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error};

/// Random tree model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Model {
    /// Binary search tree from a uniformly random insertion order.
    Bst,
    /// Random recursive tree (uniform attachment).
    Rrt,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Bst => "bst",
            Model::Rrt => "rrt",
        }
    }

    /// Period of the stamp circle for a tree of size `n`.
    pub fn period(self, n: usize) -> usize {
        match self {
            Model::Bst => n + 1,
            Model::Rrt => n,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bst" | "BST" => Ok(Model::Bst),
            "rrt" | "RRT" => Ok(Model::Rrt),
            other => Err(invalid(alloc::format!("unknown model `{other}`"))),
        }
    }
}
