//! Piecewise-linear finite elements on a crisscross triangulation.

mod assembly;
mod mesh;
mod sparse;

pub use assembly::{assemble_f, assemble_k, assemble_mass, integrate_field, Assembler};
pub use mesh::{build_mesh, Mesh};
pub use sparse::{bicgstab, CsrMatrix, SolveStats};

use alloc::vec::Vec;

/// Nodal values of both species at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
    pub t: f64,
}

impl FieldPair {
    pub fn uniform(n_nodes: usize, n1: f64, n2: f64) -> Self {
        FieldPair {
            n1: alloc::vec![n1; n_nodes],
            n2: alloc::vec![n2; n_nodes],
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.n1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n1.is_empty()
    }

    /// Coefficient vector `(n1, n2)` stacked.
    pub fn stacked(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.len());
        v.extend_from_slice(&self.n1);
        v.extend_from_slice(&self.n2);
        v
    }

    pub fn from_stacked(v: &[f64], t: f64) -> Self {
        let n = v.len() / 2;
        FieldPair {
            n1: v[..n].to_vec(),
            n2: v[n..].to_vec(),
            t,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.n1.iter().chain(&self.n2).all(|v| v.is_finite())
    }
}
