//! Nodal displacement fields and their 1-norm deformation magnitudes.
//!
//! Parsing lives in the `qda` crate; this module owns the validated types.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Displacement of one mesh node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeDisplacement {
    pub node_id: u64,
    pub ux: f64,
    pub uy: f64,
    pub uz: f64,
}

impl NodeDisplacement {
    pub const fn new(node_id: u64, ux: f64, uy: f64, uz: f64) -> Self {
        NodeDisplacement { node_id, ux, uy, uz }
    }

    pub fn is_finite(&self) -> bool {
        self.ux.is_finite() && self.uy.is_finite() && self.uz.is_finite()
    }
}

/// All nodal displacements of one design case, in export order.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    case_id: String,
    nodes: Vec<NodeDisplacement>,
}

impl DisplacementField {
    /// Validates and wraps a node list. Node ids must be unique and every
    /// component finite; at least two nodes are required.
    pub fn new(case_id: impl Into<String>, nodes: Vec<NodeDisplacement>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::TooFewNodes(nodes.len()));
        }
        let mut seen = BTreeSet::new();
        for node in &nodes {
            if !node.is_finite() {
                return Err(Error::NonFiniteComponent { node_id: node.node_id });
            }
            if !seen.insert(node.node_id) {
                return Err(Error::DuplicateNode(node.node_id));
            }
        }
        Ok(DisplacementField {
            case_id: case_id.into(),
            nodes,
        })
    }

    pub fn case_id(&self) -> &str {
        &self.case_id
    }

    pub fn set_case_id(&mut self, case_id: impl Into<String>) {
        self.case_id = case_id.into();
    }

    pub fn nodes(&self) -> &[NodeDisplacement] {
        &self.nodes
    }

    /// Node count N_T.
    pub fn n_total(&self) -> usize {
        self.nodes.len()
    }
}

/// 1-norm of a displacement vector: `|ux| + |uy| + |uz|`.
#[inline]
pub fn displacement_norm(v: &NodeDisplacement) -> f64 {
    libm::fabs(v.ux) + libm::fabs(v.uy) + libm::fabs(v.uz)
}

/// Per-node deformation magnitudes with their extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationMagnitudes {
    pub values: Vec<f64>,
    pub v_min: f64,
    pub v_max: f64,
    /// Number of magnitudes exactly equal to zero.
    pub zero_count: usize,
}

impl DeformationMagnitudes {
    /// Builds the summary from raw magnitudes. Values must be finite and
    /// nonnegative.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyMagnitudes);
        }
        let mut v_min = f64::INFINITY;
        let mut v_max = f64::NEG_INFINITY;
        let mut zero_count = 0;
        for &v in &values {
            debug_assert!(v >= 0.0 && v.is_finite());
            v_min = v_min.min(v);
            v_max = v_max.max(v);
            if v == 0.0 {
                zero_count += 1;
            }
        }
        Ok(DeformationMagnitudes {
            values,
            v_min,
            v_max,
            zero_count,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn zero_fraction(&self) -> f64 {
        self.zero_count as f64 / self.values.len() as f64
    }
}

/// Magnitudes of every node of `field`, in node order.
pub fn field_magnitudes(field: &DisplacementField) -> DeformationMagnitudes {
    let values = field.nodes().iter().map(displacement_norm).collect();
    // A valid field has at least two nodes, so this cannot fail.
    DeformationMagnitudes::from_values(values).expect("field is nonempty")
}
