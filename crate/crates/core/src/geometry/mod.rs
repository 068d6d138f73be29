//! Discrete compact manifolds and their stiffness/mass operators.
//!
//! Two discretizations are supported:
//!
//! - closed triangle surfaces embedded in R³, with cotangent-weight linear
//!   finite elements and barycentric mass lumping;
//! - flat periodic grids in 1 to 3 dimensions, with the standard `2d`-point
//!   finite-difference Laplacian.
//!
//! In both cases the stiffness `L` is symmetric positive semidefinite with
//! `L·1 = 0`, and the lumped mass `M` is diagonal and strictly positive. The
//! quadratic form `uᵀLu` stands in for `∫|∇u|² dV` and `uᵀMv` for `∫uv dV`.

mod assembly;
mod export;
mod icosphere;
mod off;
mod spectrum;
mod torus;

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra_sparse::CsrMatrix;
use thiserror::Error;

pub use assembly::{
    assemble_operators, element_stiffness, mesh_quality, triangle_area, MeshQualityReport,
    Operators, M_MATRIX_TOL,
};
pub use export::DomainExport;
pub use icosphere::{build_icosphere, MAX_ICOSPHERE_SUBDIVISIONS};
pub use off::{parse_off, read_off, write_off, OffMesh};
pub use spectrum::{smallest_eigenvalues, MAX_SPECTRUM_VERTICES};
pub use torus::{build_flat_torus, GridAxis};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("icosphere subdivision {requested} exceeds the limit of {max}")]
    SubdivisionLimit { requested: u32, max: u32 },
    #[error("icosphere radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("a periodic grid needs 1 to 3 axes, got {0}")]
    AxisCount(usize),
    #[error("axis {axis} has {cells} cells; at least 3 are required")]
    TooFewCells { axis: usize, cells: usize },
    #[error("axis {axis} has non-positive length {length}")]
    BadLength { axis: usize, length: f64 },
    #[error("face {face} is degenerate (area {area:e} below {threshold:e})")]
    DegenerateFace { face: usize, area: f64, threshold: f64 },
    #[error("face {face} references vertex {vertex}, but the mesh has {vertex_count} vertices")]
    FaceIndex { face: usize, vertex: usize, vertex_count: usize },
    #[error("face {face} repeats a vertex")]
    RepeatedVertex { face: usize },
    #[error("vertex {vertex} is not referenced by any face")]
    UnreferencedVertex { vertex: usize },
    #[error("mesh has no faces")]
    EmptyMesh,
    #[error("vertex {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
    #[error("declared dimension must be at least 1")]
    DeclaredDimension,
    #[error("field has {found} entries, domain has {expected} vertices")]
    FieldLength { expected: usize, found: usize },
    #[error("field entry {index} is not finite")]
    NonFiniteField { index: usize },
    #[error("field belongs to a different domain")]
    DomainMismatch,
    #[error("OFF parse error at line {line}: {message}")]
    Off { line: usize, message: String },
    #[error("{vertex_count} vertices exceeds the limit of {max} for {what}")]
    TooLarge { what: &'static str, vertex_count: usize, max: usize },
    #[error("requested {requested} eigenvalues from a domain with {vertex_count} vertices")]
    TooManyEigenvalues { requested: usize, vertex_count: usize },
    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    EigenNotConverged { iterations: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

/// Identity of an assembled domain; fields and dual vectors carry it so that
/// operations can reject arrays built for a different domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DomainId(u64);

impl DomainId {
    fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        DomainId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    TriangleSurface { faces: Vec<[usize; 3]> },
    PeriodicGrid { axes: Vec<GridAxis> },
}

impl DomainKind {
    pub fn name(&self) -> &'static str {
        match self {
            DomainKind::TriangleSurface { .. } => "triangle-surface",
            DomainKind::PeriodicGrid { .. } => "periodic-grid",
        }
    }
}

/// A discretized compact manifold with its assembled operators.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    id: DomainId,
    kind: DomainKind,
    coordinates: Vec<[f64; 3]>,
    declared_dimension: usize,
    operators: Operators,
}

impl DiscreteDomain {
    /// Builds a triangle-surface domain, validating faces and assembling the
    /// cotangent stiffness and lumped mass.
    pub fn from_triangles(
        coordinates: Vec<[f64; 3]>,
        faces: Vec<[usize; 3]>,
        declared_dimension: usize,
    ) -> Result<Self> {
        if declared_dimension == 0 {
            return Err(GeometryError::DeclaredDimension);
        }
        if let Some(index) = coordinates.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(GeometryError::NonFiniteCoordinate { index });
        }
        let operators = assembly::assemble_surface(&coordinates, &faces)?;
        Ok(DiscreteDomain {
            id: DomainId::fresh(),
            kind: DomainKind::TriangleSurface { faces },
            coordinates,
            declared_dimension,
            operators,
        })
    }

    pub(crate) fn from_grid(axes: Vec<GridAxis>, declared_dimension: usize) -> Result<Self> {
        if declared_dimension == 0 {
            return Err(GeometryError::DeclaredDimension);
        }
        let operators = assembly::assemble_grid(&axes);
        let coordinates = torus::grid_coordinates(&axes);
        Ok(DiscreteDomain {
            id: DomainId::fresh(),
            kind: DomainKind::PeriodicGrid { axes },
            coordinates,
            declared_dimension,
            operators,
        })
    }

    /// Loads a triangle surface from an ASCII OFF file.
    pub fn from_off_file(path: impl AsRef<std::path::Path>, declared_dimension: usize) -> Result<Self> {
        let (coordinates, faces) = read_off(path)?;
        Self::from_triangles(coordinates, faces, declared_dimension)
    }

    /// Returns a copy with a different declared dimension `n`. The operators
    /// do not depend on `n`; it only feeds the critical exponent.
    pub fn with_declared_dimension(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GeometryError::DeclaredDimension);
        }
        self.declared_dimension = n;
        Ok(self)
    }

    pub fn id(&self) -> DomainId {
        self.id
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.coordinates.len()
    }

    pub fn coordinates(&self) -> &[[f64; 3]] {
        &self.coordinates
    }

    pub fn declared_dimension(&self) -> usize {
        self.declared_dimension
    }

    pub fn faces(&self) -> Option<&[[usize; 3]]> {
        match &self.kind {
            DomainKind::TriangleSurface { faces } => Some(faces),
            DomainKind::PeriodicGrid { .. } => None,
        }
    }

    pub fn operators(&self) -> &Operators {
        &self.operators
    }

    pub fn stiffness(&self) -> &CsrMatrix<f64> {
        &self.operators.stiffness
    }

    /// Diagonal of the lumped mass matrix.
    pub fn mass(&self) -> &[f64] {
        &self.operators.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.operators.mass.iter().sum()
    }

    /// Mean grid spacing for periodic grids.
    pub fn grid_spacing(&self) -> Option<f64> {
        match &self.kind {
            DomainKind::PeriodicGrid { axes } => {
                Some(axes.iter().map(GridAxis::spacing).sum::<f64>() / axes.len() as f64)
            }
            DomainKind::TriangleSurface { .. } => None,
        }
    }

    /// `out = L·u`.
    pub fn apply_stiffness(&self, u: &[f64], out: &mut [f64]) {
        let l = &self.operators.stiffness;
        for (i, row) in l.row_iter().enumerate() {
            out[i] = row
                .col_indices()
                .iter()
                .zip(row.values())
                .map(|(&j, &v)| v * u[j])
                .sum();
        }
    }

    /// Whether the stiffness graph is connected, i.e. the system matrix is
    /// irreducible.
    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let l = &self.operators.stiffness;
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            let row = l.row(i);
            for (&j, &v) in row.col_indices().iter().zip(row.values()) {
                if j != i && v != 0.0 && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == n
    }

    pub fn export(&self) -> DomainExport {
        DomainExport::from_domain(self)
    }
}

/// A per-vertex real array on a specific domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    values: Vec<f64>,
    domain: DomainId,
}

impl Field {
    pub fn new(domain: &DiscreteDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.vertex_count() {
            return Err(GeometryError::FieldLength {
                expected: domain.vertex_count(),
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFiniteField { index });
        }
        Ok(Field { values, domain: domain.id() })
    }

    pub fn constant(domain: &DiscreteDomain, value: f64) -> Result<Self> {
        Self::new(domain, vec![value; domain.vertex_count()])
    }

    pub fn from_fn(domain: &DiscreteDomain, f: impl Fn(usize, [f64; 3]) -> f64) -> Result<Self> {
        let values = domain.coordinates().iter().enumerate().map(|(i, &p)| f(i, p)).collect();
        Self::new(domain, values)
    }

    pub(crate) fn from_parts(values: Vec<f64>, domain: DomainId) -> Self {
        Field { values, domain }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn domain_id(&self) -> DomainId {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn norm_max(&self) -> f64 {
        crate::krylov::norm_max(&self.values)
    }

    pub fn ensure_on(&self, domain: &DiscreteDomain) -> Result<()> {
        if self.domain != domain.id() {
            return Err(GeometryError::DomainMismatch);
        }
        Ok(())
    }
}
