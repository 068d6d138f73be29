use serde::{Deserialize, Serialize};

use super::{DiscreteDomain, GeometryError, Result};

/// One periodic axis of a flat torus: `cells` grid points over `length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub cells: usize,
    pub length: f64,
}

impl GridAxis {
    pub fn spacing(&self) -> f64 {
        self.length / self.cells as f64
    }
}

/// Periodic grid with the standard `2d`-point finite-difference Laplacian.
///
/// With equal spacing `h` in `d` dimensions the stiffness is the usual stencil
/// scaled by `h^(d−2)` and the mass is `h^d` per vertex. Unequal spacings use
/// `vol/h_k²` on the axis-`k` neighbours, where `vol = Πh`. The declared
/// dimension defaults to the number of axes.
pub fn build_flat_torus(dims: &[(usize, f64)]) -> Result<DiscreteDomain> {
    if dims.is_empty() || dims.len() > 3 {
        return Err(GeometryError::AxisCount(dims.len()));
    }
    let mut axes = Vec::with_capacity(dims.len());
    for (axis, &(cells, length)) in dims.iter().enumerate() {
        if cells < 3 {
            return Err(GeometryError::TooFewCells { axis, cells });
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(GeometryError::BadLength { axis, length });
        }
        axes.push(GridAxis { cells, length });
    }
    let d = axes.len();
    DiscreteDomain::from_grid(axes, d)
}

/// Vertex positions `(i·h_0, j·h_1, k·h_2)`, padded with zeros, in the
/// first-axis-fastest ordering used by the assembly.
pub(crate) fn grid_coordinates(axes: &[GridAxis]) -> Vec<[f64; 3]> {
    let n: usize = axes.iter().map(|a| a.cells).product();
    (0..n)
        .map(|mut index| {
            let mut p = [0.0; 3];
            for (d, axis) in axes.iter().enumerate() {
                p[d] = (index % axis.cells) as f64 * axis.spacing();
                index /= axis.cells;
            }
            p
        })
        .collect()
}
