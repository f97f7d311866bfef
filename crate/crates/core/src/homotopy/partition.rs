use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered block sizes `(r_1, …, r_k)` grouping a spectrum into clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockPartition {
    sizes: Vec<usize>,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPartition("at least one block is required".into()));
        }
        if let Some(j) = sizes.iter().position(|&r| r == 0) {
            return Err(Error::InvalidPartition(format!("block {} has size 0", j + 1)));
        }
        Ok(Self { sizes })
    }

    /// A single block covering all `n` dimensions.
    pub fn whole(n: usize) -> Self {
        Self { sizes: vec![n] }
    }

    /// `n` blocks of size one.
    pub fn singletons(n: usize) -> Self {
        Self { sizes: vec![1; n] }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn dim(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Start index of each block in a concatenated ordering.
    pub fn offsets(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .scan(0, |acc, &r| {
                let start = *acc;
                *acc += r;
                Some(start)
            })
            .collect()
    }

    /// Errors with `CountMismatch` unless the sizes sum to `n`.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::CountMismatch(format!(
                "partition {} sums to {} but the matrix dimension is {n}",
                self,
                self.dim()
            )));
        }
        Ok(())
    }

    /// Same blocks with block `j` moved to the front; the others keep their
    /// relative order.
    pub fn permutation_with_first(&self, j: usize) -> Vec<usize> {
        std::iter::once(j)
            .chain((0..self.num_blocks()).filter(|&i| i != j))
            .collect()
    }
}

impl TryFrom<Vec<usize>> for BlockPartition {
    type Error = Error;

    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        Self::new(sizes)
    }
}

impl From<BlockPartition> for Vec<usize> {
    fn from(p: BlockPartition) -> Self {
        p.sizes
    }
}

impl fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for BlockPartition {
    type Err = Error;

    /// Parses `"r1,r2,..."`.
    fn from_str(s: &str) -> Result<Self> {
        let sizes = s
            .split(',')
            .map(|p| {
                p.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidPartition(format!("'{}' is not a positive integer", p.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sizes)
    }
}
