//! JSON documents for elements and maps.
//!
//! Element document:
//!
//! ```json
//! { "model": "hermitian:2", "level": [1, 1],
//!   "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-2.0, 0.0]]] }
//! ```
//!
//! `entries` holds the payload row-major as `[re, im]` pairs; a lattice
//! element lists its coordinates as plain reals.
//!
//! Map document:
//!
//! ```json
//! { "domain": "hermitian:2", "codomain": "hermitian:2", "label": "transpose",
//!   "action": [[...], ...] }
//! ```
//!
//! `action` is the dense real matrix acting on ambient coordinates (one row
//! per codomain coordinate, one column per domain coordinate); see
//! [`SpaceModel::to_ambient`] for the coordinate order.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{c, CMatrix, RMatrix};
use crate::maps::StarLinearMap;
use crate::model::{Element, SpaceModel};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Real(Vec<f64>),
    Complex(Vec<Vec<[f64; 2]>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub model: SpaceModel,
    pub level: [usize; 2],
    pub entries: Entries,
}

impl ElementDoc {
    pub fn from_element(model: &SpaceModel, v: &Element) -> Self {
        let (m, n) = v.level();
        let entries = if model.is_lattice() {
            Entries::Real(v.coords().iter().map(|z| z.re).collect())
        } else {
            let p = v.coords();
            Entries::Complex(
                (0..p.nrows())
                    .map(|i| {
                        (0..p.ncols())
                            .map(|j| [p[(i, j)].re, p[(i, j)].im])
                            .collect()
                    })
                    .collect(),
            )
        };
        Self {
            model: model.clone(),
            level: [m, n],
            entries,
        }
    }

    /// Parse back into a validated element.
    pub fn to_element(&self) -> Result<(SpaceModel, Element)> {
        let level = (self.level[0], self.level[1]);
        let (rows, cols) = self.model.payload_shape(level)?;
        let coords = match (&self.entries, self.model.is_lattice()) {
            (Entries::Real(x), true) => {
                if x.len() != rows {
                    return Err(Error::ShapeMismatch {
                        expected: (rows, 1),
                        found: (x.len(), 1),
                    });
                }
                CMatrix::from_iterator(rows, 1, x.iter().map(|&r| c(r, 0.0)))
            }
            (Entries::Complex(r), false) => {
                let found = (r.len(), r.first().map_or(0, Vec::len));
                if r.len() != rows || r.iter().any(|row| row.len() != cols) {
                    return Err(Error::ShapeMismatch {
                        expected: (rows, cols),
                        found,
                    });
                }
                CMatrix::from_fn(rows, cols, |i, j| c(r[i][j][0], r[i][j][1]))
            }
            (_, true) => {
                return Err(Error::InvalidDocument(
                    "lattice entries must be a list of reals".into(),
                ))
            }
            (_, false) => {
                return Err(Error::InvalidDocument(
                    "hermitian entries must be rows of [re, im] pairs".into(),
                ))
            }
        };
        let v = Element::new(level, coords);
        self.model.validate(&v)?;
        Ok((self.model.clone(), v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub domain: SpaceModel,
    pub codomain: SpaceModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub action: Vec<Vec<f64>>,
}

impl MapDoc {
    pub fn from_map(map: &StarLinearMap) -> Self {
        let a = map.action();
        Self {
            domain: map.domain().clone(),
            codomain: map.codomain().clone(),
            label: Some(map.label().to_string()),
            action: (0..a.nrows())
                .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
                .collect(),
        }
    }

    /// Build the map, rejecting wrong shapes, non-finite entries and actions
    /// that do not commute with the involution.
    pub fn to_map(&self) -> Result<StarLinearMap> {
        let rows = self.codomain.ambient_dim();
        let cols = self.domain.ambient_dim();
        let found = (self.action.len(), self.action.first().map_or(0, Vec::len));
        if self.action.len() != rows || self.action.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                found,
            });
        }
        let action: RMatrix = DMatrix::from_fn(rows, cols, |i, j| self.action[i][j]);
        let label = self.label.clone().unwrap_or_else(|| "map".to_string());
        StarLinearMap::new(label, self.domain.clone(), self.codomain.clone(), action)
    }
}

pub fn read_element(path: &Path) -> Result<(SpaceModel, Element)> {
    let text = std::fs::read_to_string(path)?;
    let doc: ElementDoc = serde_json::from_str(&text)?;
    doc.to_element()
}

pub fn read_map(path: &Path) -> Result<StarLinearMap> {
    let text = std::fs::read_to_string(path)?;
    let doc: MapDoc = serde_json::from_str(&text)?;
    doc.to_map()
}

pub fn write_map(path: &Path, map: &StarLinearMap) -> Result<()> {
    let text = serde_json::to_string_pretty(&MapDoc::from_map(map))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_round_trip_hermitian() {
        let m = SpaceModel::hermitian(2);
        let mut p = CMatrix::zeros(2, 4);
        p[(0, 3)] = c(1.5, -0.25);
        let v = Element::new((1, 2), p);
        let doc = ElementDoc::from_element(&m, &v);
        let text = serde_json::to_string(&doc).unwrap();
        let back: ElementDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_element().unwrap(), (m, v));
    }

    #[test]
    fn element_round_trip_lattice() {
        let m = SpaceModel::lattice(3);
        let v = Element::from_reals(&[1.0, -2.0, 0.5]);
        let text = serde_json::to_string(&ElementDoc::from_element(&m, &v)).unwrap();
        assert_eq!(
            text,
            r#"{"model":"lattice:3","level":[1,1],"entries":[1.0,-2.0,0.5]}"#
        );
        let back: ElementDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_element().unwrap().1, v);
    }

    #[test]
    fn malformed_documents_rejected() {
        let bad = [
            r#"{"model":"hermitian:2","level":[1,1],"entries":[1.0,2.0]}"#,
            r#"{"model":"lattice:2","level":[1,1],"entries":[[[1.0,0.0]]]}"#,
            r#"{"model":"hermitian:2","level":[1,1],"entries":[[[1.0,0.0]]]}"#,
            r#"{"model":"lattice:2","level":[2,2],"entries":[1.0,2.0]}"#,
        ];
        for s in bad {
            let doc: ElementDoc = serde_json::from_str(s).unwrap();
            assert!(doc.to_element().is_err(), "{s}");
        }
        assert!(serde_json::from_str::<ElementDoc>(
            r#"{"model":"qubit:2","level":[1,1],"entries":[]}"#
        )
        .is_err());
    }

    #[test]
    fn map_document_shape_checked() {
        let doc = MapDoc {
            domain: SpaceModel::lattice(2),
            codomain: SpaceModel::lattice(2),
            label: None,
            action: vec![vec![1.0, 0.0]],
        };
        assert!(matches!(doc.to_map(), Err(Error::ShapeMismatch { .. })));
    }
}
