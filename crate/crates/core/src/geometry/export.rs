use serde::{Deserialize, Serialize};

use super::{DiscreteDomain, DomainKind, GridAxis};

/// JSON form of a domain: `{kind, vertex_count, coordinates, faces | grid}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainExport {
    pub kind: String,
    pub vertex_count: usize,
    pub coordinates: Vec<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub faces: Option<Vec<[usize; 3]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<Vec<GridAxis>>,
}

impl DomainExport {
    pub fn from_domain(domain: &DiscreteDomain) -> Self {
        let (faces, grid) = match domain.kind() {
            DomainKind::TriangleSurface { faces } => (Some(faces.clone()), None),
            DomainKind::PeriodicGrid { axes } => (None, Some(axes.clone())),
        };
        DomainExport {
            kind: domain.kind().name().to_string(),
            vertex_count: domain.vertex_count(),
            coordinates: domain.coordinates().to_vec(),
            faces,
            grid,
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::geometry::{build_flat_torus, build_icosphere};

    #[test]
    fn surface_export_has_faces() {
        let d = build_icosphere(0, 1.0).unwrap();
        let json: serde_json::Value = serde_json::to_value(d.export()).unwrap();
        assert_eq!(json["kind"], "triangle-surface");
        assert_eq!(json["vertex_count"], 12);
        assert_eq!(json["faces"].as_array().unwrap().len(), 20);
        assert!(json.get("grid").is_none());
    }

    #[test]
    fn grid_export_has_axes() {
        let d = build_flat_torus(&[(4, 1.0), (3, 2.0)]).unwrap();
        let json: serde_json::Value = serde_json::to_value(d.export()).unwrap();
        assert_eq!(json["kind"], "periodic-grid");
        assert_eq!(json["grid"][1]["cells"], 3);
        assert_eq!(json["coordinates"].as_array().unwrap().len(), 12);
        assert!(json.get("faces").is_none());
    }
}
