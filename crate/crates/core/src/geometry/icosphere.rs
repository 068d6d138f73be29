use std::collections::HashMap;

use super::{DiscreteDomain, GeometryError, Result};

/// Memory guard: 10·4⁸ + 2 = 655 362 vertices.
pub const MAX_ICOSPHERE_SUBDIVISIONS: u32 = 8;

fn icosahedron() -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let vertices = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (vertices, faces)
}

fn project(p: [f64; 3], radius: f64) -> [f64; 3] {
    let len = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] * radius / len, p[1] * radius / len, p[2] * radius / len]
}

/// Closed triangulated sphere obtained by `subdivisions` rounds of midpoint
/// subdivision of the icosahedron, with every vertex projected to `radius`.
///
/// The declared dimension defaults to 2; use
/// [`DiscreteDomain::with_declared_dimension`] to change it.
pub fn build_icosphere(subdivisions: u32, radius: f64) -> Result<DiscreteDomain> {
    if subdivisions > MAX_ICOSPHERE_SUBDIVISIONS {
        return Err(GeometryError::SubdivisionLimit {
            requested: subdivisions,
            max: MAX_ICOSPHERE_SUBDIVISIONS,
        });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(GeometryError::BadRadius(radius));
    }
    let (vertices, mut faces) = icosahedron();
    let mut vertices: Vec<[f64; 3]> = vertices.into_iter().map(|p| project(p, 1.0)).collect();

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push(project([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, (p[2] + q[2]) / 2.0], 1.0));
                vertices.len() - 1
            })
        };
        let mut refined = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            refined.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = refined;
    }

    let vertices = vertices.into_iter().map(|p| project(p, radius)).collect();
    DiscreteDomain::from_triangles(vertices, faces, 2)
}
