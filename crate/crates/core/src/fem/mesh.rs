use alloc::vec::Vec;

use crate::error::{require_positive, Error, Result};

/// Crisscross triangulation of `[0, Lx] × [0, Ly]`.
///
/// Nodes are the `(nx+1)(ny+1)` grid vertices in row-major order followed by
/// the `nx·ny` cell centers, also row-major. Each cell is split into four
/// triangles meeting at its center, listed counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub areas: Vec<f64>,
    /// Constant gradients of the three local basis functions.
    pub grads: Vec<[[f64; 2]; 3]>,
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_vertices(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn center_index(&self, i: usize, j: usize) -> usize {
        self.n_vertices() + j * self.nx + i
    }

    pub fn total_area(&self) -> f64 {
        super::sparse::compensated_sum(self.areas.iter().copied())
    }

    /// Evaluates `f(x, y)` at every node.
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&[x, y]| f(x, y)).collect()
    }
}

pub fn build_mesh(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "mesh needs at least one cell per direction, got {nx}x{ny}"
        )));
    }
    require_positive("lx", lx)?;
    require_positive("ly", ly)?;
    let hx = lx / nx as f64;
    let hy = ly / ny as f64;
    let n_vert = (nx + 1) * (ny + 1);
    let mut nodes = Vec::with_capacity(n_vert + nx * ny);
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([coord(i, nx, hx, lx), coord(j, ny, hy, ly)]);
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            nodes.push([(i as f64 + 0.5) * hx, (j as f64 + 0.5) * hy]);
        }
    }
    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(4 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            let c = n_vert + j * nx + i;
            triangles.push([v00, v10, c]);
            triangles.push([v10, v11, c]);
            triangles.push([v11, v01, c]);
            triangles.push([v01, v00, c]);
        }
    }
    let mut areas = Vec::with_capacity(triangles.len());
    let mut grads = Vec::with_capacity(triangles.len());
    for t in &triangles {
        let [x0, y0] = nodes[t[0]];
        let [x1, y1] = nodes[t[1]];
        let [x2, y2] = nodes[t[2]];
        let twice = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
        if !(twice > 0.0) {
            return Err(Error::Degenerate("triangle with non-positive area"));
        }
        areas.push(0.5 * twice);
        grads.push([
            [(y1 - y2) / twice, (x2 - x1) / twice],
            [(y2 - y0) / twice, (x0 - x2) / twice],
            [(y0 - y1) / twice, (x1 - x0) / twice],
        ]);
    }
    Ok(Mesh {
        lx,
        ly,
        nx,
        ny,
        nodes,
        triangles,
        areas,
        grads,
    })
}

// Pins the last coordinate to the domain length.
fn coord(i: usize, n: usize, h: f64, l: f64) -> f64 {
    if i == n {
        l
    } else {
        i as f64 * h
    }
}
