//! JSON documents emitted by the commands.

use std::collections::BTreeMap;
use std::path::Path;

use mptk::bounds::BoundReport;
use mptk::homotopy::{EigPath, PathMeta, SvdPath};
use mptk::matcore::ComplexMatrix;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "mptk/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
    pub cols: usize,
}

impl InputDigest {
    pub fn new(path: &Path, bytes: &[u8], m: &ComplexMatrix) -> Self {
        Self {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            rows: m.rows(),
            cols: m.cols(),
        }
    }
}

/// Counts behind the exit status.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub reports: usize,
    pub applicable: usize,
    pub satisfied: usize,
    pub violations: usize,
}

impl Summary {
    pub fn of(reports: &[BoundReport]) -> Self {
        let applicable = reports.iter().filter(|r| r.applicable).count();
        let satisfied = reports.iter().filter(|r| r.applicable && r.satisfied()).count();
        Self {
            reports: reports.len(),
            applicable,
            satisfied,
            violations: applicable - satisfied,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Top-level document; `analysis` is flattened into it.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument<T: Serialize> {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub inputs: BTreeMap<String, InputDigest>,
    pub summary: Summary,
    #[serde(flatten)]
    pub analysis: T,
}

impl<T: Serialize> ReportDocument<T> {
    pub fn new(
        command: &'static str,
        inputs: BTreeMap<String, InputDigest>,
        summary: Summary,
        analysis: T,
    ) -> Self {
        Self {
            schema: SCHEMA,
            tool_version: TOOL_VERSION,
            command,
            inputs,
            summary,
            analysis,
        }
    }
}

/// Matrix as rows of `[re, im]` pairs.
pub type MatrixDump = Vec<Vec<[f64; 2]>>;

pub fn dump_matrix(m: &ComplexMatrix) -> MatrixDump {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockDump {
    /// Eigenvalues or singular values of the block, nonincreasing.
    pub values: Vec<f64>,
    /// `U_j(t)` or `W_j(t)`.
    pub basis: MatrixDump,
    /// `V_j(t)`; SVD paths only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_basis: Option<MatrixDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleDump {
    pub t: f64,
    pub blocks: Vec<BlockDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_block: Option<MatrixDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathDump {
    pub schema: &'static str,
    pub kind: &'static str,
    pub partition: Vec<usize>,
    pub meta: PathMeta,
    pub samples: Vec<SampleDump>,
}

impl PathDump {
    pub fn eig(path: &EigPath) -> Self {
        Self {
            schema: SCHEMA,
            kind: "eig",
            partition: path.partition.sizes().to_vec(),
            meta: path.meta.clone(),
            samples: path
                .samples
                .iter()
                .map(|s| SampleDump {
                    t: s.t,
                    blocks: s
                        .basis_blocks
                        .iter()
                        .zip(&s.block_eigs)
                        .map(|(u, ev)| BlockDump {
                            values: ev.clone(),
                            basis: dump_matrix(u),
                            right_basis: None,
                        })
                        .collect(),
                    null_block: None,
                })
                .collect(),
        }
    }

    pub fn svd(path: &SvdPath) -> Self {
        Self {
            schema: SCHEMA,
            kind: "svd",
            partition: path.partition.sizes().to_vec(),
            meta: path.meta.clone(),
            samples: path
                .samples
                .iter()
                .map(|s| SampleDump {
                    t: s.t,
                    blocks: (0..s.left_blocks.len())
                        .map(|j| BlockDump {
                            values: s.block_sings[j].clone(),
                            basis: dump_matrix(&s.left_blocks[j]),
                            right_basis: Some(dump_matrix(&s.right_blocks[j])),
                        })
                        .collect(),
                    null_block: s.null_block.as_ref().map(dump_matrix),
                })
                .collect(),
        }
    }
}
