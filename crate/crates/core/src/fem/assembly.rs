//! Mass, diffusion and reaction matrices.
//!
//! Coefficients are evaluated at the nodes, interpolated linearly on each
//! triangle and integrated with the edge-midpoint rule, which is exact for
//! quadratics. Two-species operators live on a `2N × 2N` pattern holding all
//! four blocks, so the system matrix is a plain sum of values arrays.

use alloc::vec;
use alloc::vec::Vec;

use super::mesh::Mesh;
use super::sparse::CsrMatrix;
use super::FieldPair;
use crate::error::Result;
use crate::model::{reaction_factors, ModelParams};

/// Local vertex pairs of the three edge midpoints.
const EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];
/// Midpoints adjacent to each local vertex.
const ADJ: [[usize; 2]; 3] = [[0, 2], [0, 1], [1, 2]];

/// Index of the midpoint on the edge between local vertices `a != b`.
fn shared_edge(a: usize, b: usize) -> usize {
    match (a.min(b), a.max(b)) {
        (0, 1) => 0,
        (1, 2) => 1,
        _ => 2,
    }
}

/// Assembly workspace: the mesh, the scalar and block sparsity patterns and
/// per-triangle storage offsets.
#[derive(Debug, Clone)]
pub struct Assembler {
    mesh: Mesh,
    scalar: CsrMatrix,
    block: CsrMatrix,
    /// `offsets[t][a][b]`: position of column `node_b` within row `node_a`.
    offsets: Vec<[[usize; 3]; 3]>,
}

impl Assembler {
    pub fn new(mesh: Mesh) -> Self {
        let n = mesh.n_nodes();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for t in &mesh.triangles {
            for &a in t {
                rows[a].extend_from_slice(t);
            }
        }
        let scalar = CsrMatrix::from_rows(n, rows);
        let mut brows = Vec::with_capacity(2 * n);
        for _ in 0..2 {
            for i in 0..n {
                let cols: Vec<usize> = scalar.row(i).map(|(j, _)| j).collect();
                let mut r = cols.clone();
                r.extend(cols.iter().map(|j| j + n));
                brows.push(r);
            }
        }
        let block = CsrMatrix::from_rows(2 * n, brows);
        let offsets = mesh
            .triangles
            .iter()
            .map(|t| {
                let mut o = [[0; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        o[a][b] = scalar.index_of(t[a], t[b]).unwrap() - scalar.row_ptr[t[a]];
                    }
                }
                o
            })
            .collect();
        Assembler {
            mesh,
            scalar,
            block,
            offsets,
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn n_nodes(&self) -> usize {
        self.mesh.n_nodes()
    }

    /// Zero `N × N` matrix on the mesh pattern.
    pub fn scalar_pattern(&self) -> &CsrMatrix {
        &self.scalar
    }

    /// Zero `2N × 2N` matrix on the two-species pattern.
    pub fn block_pattern(&self) -> &CsrMatrix {
        &self.block
    }

    fn degree(&self, node: usize) -> usize {
        self.scalar.row_ptr[node + 1] - self.scalar.row_ptr[node]
    }

    /// Storage index in the block pattern of `(node_a, node_b)` in block `(r, c)`.
    #[inline]
    fn slot(&self, t: usize, a: usize, b: usize, r: usize, c: usize) -> usize {
        let na = self.mesh.triangles[t][a];
        let n = self.n_nodes();
        self.block.row_ptr[r * n + na] + c * self.degree(na) + self.offsets[t][a][b]
    }

    /// Scalar mass matrix.
    pub fn mass(&self) -> CsrMatrix {
        let mut m = self.scalar.zeroed();
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            let area = self.mesh.areas[t];
            for a in 0..3 {
                let base = self.scalar.row_ptr[tri[a]];
                for b in 0..3 {
                    m.values[base + self.offsets[t][a][b]] += mass_entry(area, a, b);
                }
            }
        }
        m
    }

    /// Adds `scale · M` to both diagonal blocks.
    pub fn add_mass(&self, values: &mut [f64], scale: f64) {
        for (t, &area) in self.mesh.areas.iter().enumerate() {
            for a in 0..3 {
                for b in 0..3 {
                    let v = scale * mass_entry(area, a, b);
                    values[self.slot(t, a, b, 0, 0)] += v;
                    values[self.slot(t, a, b, 1, 1)] += v;
                }
            }
        }
    }

    /// Adds `scale · K(fields)`.
    pub fn add_stiffness(
        &self,
        values: &mut [f64],
        scale: f64,
        p: &ModelParams,
        fields: &FieldPair,
    ) -> Result<()> {
        let n = self.n_nodes();
        let mut c1 = vec![0.0; n];
        let mut c2 = vec![0.0; n];
        let mut l1 = vec![0.0; n];
        let mut l2 = vec![0.0; n];
        for i in 0..n {
            let (a, b) = (fields.n1[i], fields.n2[i]);
            c1[i] = p.c1_at(a, b)?;
            c2[i] = p.c2_at(a, b)?;
            l1[i] = p.lam1_at(a, b)?;
            l2[i] = p.lam2_at(a, b)?;
        }
        let cross = l1.iter().chain(&l2).any(|&v| v != 0.0);
        let d = [p.d1, p.d2()?];
        let c = [&c1, &c2];
        let lam = [&l1, &l2];
        let dens = [&fields.n1, &fields.n2];
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            let area = self.mesh.areas[t];
            let g = &self.mesh.grads[t];
            let mut gg = [[0.0; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    gg[a][b] = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                }
            }
            for s in 0..2 {
                let cv = [c[s][tri[0]], c[s][tri[1]], c[s][tri[2]]];
                let cm = midpoints(&cv);
                let grad_c = [
                    cv[0] * g[0][0] + cv[1] * g[1][0] + cv[2] * g[2][0],
                    cv[0] * g[0][1] + cv[1] * g[1][1] + cv[2] * g[2][1],
                ];
                // ∇φ_j · ∇c
                let gc: [f64; 3] =
                    core::array::from_fn(|b| g[b][0] * grad_c[0] + g[b][1] * grad_c[1]);
                let w = area / 3.0;

                // Self-diffusion block: w = c², u = c.
                let int_cc = w * (cm[0] * cm[0] + cm[1] * cm[1] + cm[2] * cm[2]);
                let int_cphi: [f64; 3] =
                    core::array::from_fn(|a| 0.5 * w * (cm[ADJ[a][0]] + cm[ADJ[a][1]]));
                let k = scale * d[s];
                for a in 0..3 {
                    for b in 0..3 {
                        values[self.slot(t, a, b, s, s)] +=
                            k * (gg[a][b] * int_cc + gc[b] * int_cphi[a]);
                    }
                }

                if !cross {
                    continue;
                }
                // Cross block: w = λ ñ c, u = λ ñ.
                let lm = midpoints(&[lam[s][tri[0]], lam[s][tri[1]], lam[s][tri[2]]]);
                let nm = midpoints(&[dens[s][tri[0]], dens[s][tri[1]], dens[s][tri[2]]]);
                let ln: [f64; 3] = core::array::from_fn(|m| lm[m] * nm[m]);
                let int_lnc = w * (ln[0] * cm[0] + ln[1] * cm[1] + ln[2] * cm[2]);
                let int_lnphi: [f64; 3] =
                    core::array::from_fn(|a| 0.5 * w * (ln[ADJ[a][0]] + ln[ADJ[a][1]]));
                for a in 0..3 {
                    for b in 0..3 {
                        values[self.slot(t, a, b, s, 1 - s)] -=
                            k * (gg[a][b] * int_lnc + gc[b] * int_lnphi[a]);
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds `scale · F(fields)`.
    pub fn add_reaction(
        &self,
        values: &mut [f64],
        scale: f64,
        p: &ModelParams,
        fields: &FieldPair,
    ) -> Result<()> {
        let n = self.n_nodes();
        let mut f1 = vec![0.0; n];
        let mut f2 = vec![0.0; n];
        for i in 0..n {
            (f1[i], f2[i]) = reaction_factors(p, fields.n1[i], fields.n2[i])?;
        }
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            let w = scale * self.mesh.areas[t] / 12.0;
            for (s, f) in [&f1, &f2].into_iter().enumerate() {
                let fm = midpoints(&[f[tri[0]], f[tri[1]], f[tri[2]]]);
                for a in 0..3 {
                    for b in 0..3 {
                        let v = if a == b {
                            fm[ADJ[a][0]] + fm[ADJ[a][1]]
                        } else {
                            fm[shared_edge(a, b)]
                        };
                        values[self.slot(t, a, b, s, s)] += w * v;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn stiffness(&self, p: &ModelParams, fields: &FieldPair) -> Result<CsrMatrix> {
        let mut k = self.block.zeroed();
        self.add_stiffness(&mut k.values, 1.0, p, fields)?;
        Ok(k)
    }

    pub fn reaction(&self, p: &ModelParams, fields: &FieldPair) -> Result<CsrMatrix> {
        let mut f = self.block.zeroed();
        self.add_reaction(&mut f.values, 1.0, p, fields)?;
        Ok(f)
    }

    /// `M` in both diagonal blocks of the two-species pattern.
    pub fn block_mass(&self) -> CsrMatrix {
        let mut m = self.block.zeroed();
        self.add_mass(&mut m.values, 1.0);
        m
    }
}

fn mass_entry(area: f64, a: usize, b: usize) -> f64 {
    if a == b {
        area / 6.0
    } else {
        area / 12.0
    }
}

fn midpoints(v: &[f64; 3]) -> [f64; 3] {
    EDGES.map(|(a, b)| 0.5 * (v[a] + v[b]))
}

/// `M_ij = ∫ φ_j φ_i`.
pub fn assemble_mass(mesh: &Mesh) -> CsrMatrix {
    Assembler::new(mesh.clone()).mass()
}

/// Two-species diffusion operator `K(fields)`.
pub fn assemble_k(mesh: &Mesh, p: &ModelParams, fields: &FieldPair) -> Result<CsrMatrix> {
    Assembler::new(mesh.clone()).stiffness(p, fields)
}

/// Block-diagonal reaction operator `F(fields)`.
pub fn assemble_f(mesh: &Mesh, p: &ModelParams, fields: &FieldPair) -> Result<CsrMatrix> {
    Assembler::new(mesh.clone()).reaction(p, fields)
}

/// `1ᵀ M a`, the integral of the interpolant of `values`.
pub fn integrate_field(mesh: &Mesh, values: &[f64]) -> f64 {
    mesh.triangles
        .iter()
        .zip(&mesh.areas)
        .map(|(t, &area)| area / 3.0 * (values[t[0]] + values[t[1]] + values[t[2]]))
        .sum()
}
