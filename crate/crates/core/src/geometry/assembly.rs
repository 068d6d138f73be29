use nalgebra_sparse::{CooMatrix, CsrMatrix};
use serde::{Deserialize, Serialize};

use super::{DiscreteDomain, DomainKind, GeometryError, GridAxis, Result};

/// Off-diagonal stiffness entries above this count as positive.
pub const M_MATRIX_TOL: f64 = 1e-12;

/// Faces smaller than this fraction of the mean face area are rejected.
const DEGENERATE_AREA_RATIO: f64 = 1e-14;

/// Stiffness `L` (sparse, symmetric PSD) and the diagonal of the lumped mass `M`.
#[derive(Debug, Clone)]
pub struct Operators {
    pub stiffness: CsrMatrix<f64>,
    pub mass: Vec<f64>,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn triangle_area(p: [[f64; 3]; 3]) -> f64 {
    0.5 * norm3(cross(sub(p[1], p[0]), sub(p[2], p[0])))
}

/// Local cotangent stiffness of a linear triangle element:
/// `K_ij = −½·cot θ_k` for the angle `θ_k` opposite edge `ij`, and
/// `K_ii = −Σ_{j≠i} K_ij`.
pub fn element_stiffness(p: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut k = [[0.0; 3]; 3];
    for corner in 0..3 {
        let i = (corner + 1) % 3;
        let j = (corner + 2) % 3;
        let e1 = sub(p[i], p[corner]);
        let e2 = sub(p[j], p[corner]);
        let cot = dot3(e1, e2) / norm3(cross(e1, e2));
        k[i][j] = -0.5 * cot;
        k[j][i] = -0.5 * cot;
    }
    for i in 0..3 {
        k[i][i] = -(0..3).filter(|&j| j != i).map(|j| k[i][j]).sum::<f64>();
    }
    k
}

fn has_obtuse_angle(p: [[f64; 3]; 3]) -> bool {
    (0..3).any(|c| dot3(sub(p[(c + 1) % 3], p[c]), sub(p[(c + 2) % 3], p[c])) < 0.0)
}

pub(crate) fn assemble_surface(coords: &[[f64; 3]], faces: &[[usize; 3]]) -> Result<Operators> {
    let n = coords.len();
    if faces.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    for (fi, face) in faces.iter().enumerate() {
        if let Some(&vertex) = face.iter().find(|&&v| v >= n) {
            return Err(GeometryError::FaceIndex { face: fi, vertex, vertex_count: n });
        }
        if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
            return Err(GeometryError::RepeatedVertex { face: fi });
        }
    }
    let corners = |f: &[usize; 3]| [coords[f[0]], coords[f[1]], coords[f[2]]];
    let areas: Vec<f64> = faces.iter().map(|f| triangle_area(corners(f))).collect();
    let mean_area = areas.iter().sum::<f64>() / areas.len() as f64;
    let threshold = DEGENERATE_AREA_RATIO * mean_area;
    if let Some((face, &area)) = areas.iter().enumerate().find(|(_, &a)| !(a > threshold)) {
        return Err(GeometryError::DegenerateFace { face, area, threshold });
    }

    let mut coo = CooMatrix::new(n, n);
    let mut mass = vec![0.0; n];
    for (face, &area) in faces.iter().zip(&areas) {
        let k = element_stiffness(corners(face));
        for a in 0..3 {
            mass[face[a]] += area / 3.0;
            for b in 0..3 {
                coo.push(face[a], face[b], k[a][b]);
            }
        }
    }
    // Unreferenced vertices would give a zero mass entry.
    if let Some(v) = mass.iter().position(|&m| !(m > 0.0)) {
        return Err(GeometryError::UnreferencedVertex { vertex: v });
    }
    Ok(Operators { stiffness: CsrMatrix::from(&coo), mass })
}

pub(crate) fn assemble_grid(axes: &[GridAxis]) -> Operators {
    let cells: Vec<usize> = axes.iter().map(|a| a.cells).collect();
    let n: usize = cells.iter().product();
    let volume: f64 = axes.iter().map(GridAxis::spacing).product();
    let weights: Vec<f64> = axes.iter().map(|a| volume / (a.spacing() * a.spacing())).collect();
    let diagonal: f64 = weights.iter().map(|w| 2.0 * w).sum();

    let mut strides = vec![1usize; axes.len()];
    for d in 1..axes.len() {
        strides[d] = strides[d - 1] * cells[d - 1];
    }

    let mut coo = CooMatrix::new(n, n);
    for index in 0..n {
        coo.push(index, index, diagonal);
        for (d, &w) in weights.iter().enumerate() {
            let c = (index / strides[d]) % cells[d];
            let base = index - c * strides[d];
            let up = base + ((c + 1) % cells[d]) * strides[d];
            let down = base + ((c + cells[d] - 1) % cells[d]) * strides[d];
            coo.push(index, up, -w);
            coo.push(index, down, -w);
        }
    }
    Operators { stiffness: CsrMatrix::from(&coo), mass: vec![volume; n] }
}

/// Assembles `L` and the lumped `M` for a domain from its geometry.
pub fn assemble_operators(domain: &DiscreteDomain) -> Result<Operators> {
    match domain.kind() {
        DomainKind::TriangleSurface { faces } => assemble_surface(domain.coordinates(), faces),
        DomainKind::PeriodicGrid { axes } => Ok(assemble_grid(axes)),
    }
}

/// Sign structure of the stiffness matrix, which decides whether the discrete
/// comparison principle is available.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshQualityReport {
    pub obtuse_triangle_count: usize,
    /// Off-diagonal entries of `L` above [`M_MATRIX_TOL`] (negative cotangent weights).
    pub positive_offdiagonal_count: usize,
    pub is_m_matrix_compatible: bool,
}

pub fn mesh_quality(domain: &DiscreteDomain) -> MeshQualityReport {
    let obtuse_triangle_count = match domain.kind() {
        DomainKind::TriangleSurface { faces } => {
            let c = domain.coordinates();
            faces.iter().filter(|f| has_obtuse_angle([c[f[0]], c[f[1]], c[f[2]]])).count()
        }
        DomainKind::PeriodicGrid { .. } => 0,
    };
    let positive_offdiagonal_count = domain
        .stiffness()
        .triplet_iter()
        .filter(|&(i, j, &v)| i != j && v > M_MATRIX_TOL)
        .count();
    MeshQualityReport {
        obtuse_triangle_count,
        positive_offdiagonal_count,
        is_m_matrix_compatible: positive_offdiagonal_count == 0,
    }
}
