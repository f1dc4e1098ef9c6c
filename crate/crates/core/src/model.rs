//! Concrete space models and their elements.
//!
//! A Hermitian model is a finite direct sum `M_{k1} ⊕ ... ⊕ M_{kr}` realized
//! as block-diagonal `K × K` matrices (`K = Σ ki`); `hermitian:k` is the
//! single-block case. A lattice model is `R^d` with the coordinatewise order.
//!
//! Elements of `M_{m,n}(V)` over a Hermitian model are `(mK) × (nK)` complex
//! matrices whose `(a, b)` block is an element of the ambient algebra. Lattice
//! elements are `d × 1` columns and only exist at level `(1, 1)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{c, CMatrix};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Hermitian { blocks: Vec<usize> },
    Lattice { dim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceModel {
    kind: ModelKind,
    clamp_sqrt: bool,
}

impl SpaceModel {
    pub fn hermitian(k: usize) -> Self {
        Self::hermitian_blocks(&[k])
    }

    pub fn hermitian_blocks(blocks: &[usize]) -> Self {
        assert!(
            !blocks.is_empty() && blocks.iter().all(|&k| k > 0),
            "block sizes must be positive"
        );
        Self {
            kind: ModelKind::Hermitian {
                blocks: blocks.to_vec(),
            },
            clamp_sqrt: true,
        }
    }

    pub fn lattice(dim: usize) -> Self {
        assert!(dim > 0, "lattice dimension must be positive");
        Self {
            kind: ModelKind::Lattice { dim },
            clamp_sqrt: true,
        }
    }

    /// Same model, but positive square roots skip the eigenvalue clamp.
    /// Used for fault injection only.
    pub fn without_sqrt_clamp(mut self) -> Self {
        self.clamp_sqrt = false;
        self
    }

    pub fn clamps_sqrt(&self) -> bool {
        self.clamp_sqrt
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.kind, ModelKind::Lattice { .. })
    }

    pub fn is_hermitian(&self) -> bool {
        !self.is_lattice()
    }

    pub fn blocks(&self) -> &[usize] {
        match &self.kind {
            ModelKind::Hermitian { blocks } => blocks,
            ModelKind::Lattice { .. } => &[],
        }
    }

    /// Matrix size `K` (Hermitian) or dimension `d` (lattice).
    pub fn size(&self) -> usize {
        match &self.kind {
            ModelKind::Hermitian { blocks } => blocks.iter().sum(),
            ModelKind::Lattice { dim } => *dim,
        }
    }

    /// Block index of each row of the ambient `K × K` matrix.
    pub fn labels(&self) -> Vec<usize> {
        match &self.kind {
            ModelKind::Hermitian { blocks } => blocks
                .iter()
                .enumerate()
                .flat_map(|(b, &k)| std::iter::repeat_n(b, k))
                .collect(),
            ModelKind::Lattice { dim } => (0..*dim).collect(),
        }
    }

    /// Whether payload entry `(i, j)` (at any level) may be non-zero.
    pub fn allowed(&self, labels: &[usize], i: usize, j: usize) -> bool {
        let k = labels.len();
        labels[i % k] == labels[j % k]
    }

    /// Real dimension of the self-adjoint part at level 1.
    pub fn sa_dim(&self) -> usize {
        match &self.kind {
            ModelKind::Hermitian { blocks } => blocks.iter().map(|k| k * k).sum(),
            ModelKind::Lattice { dim } => *dim,
        }
    }

    /// Number of real coordinates of the ambient space at level 1.
    pub fn ambient_dim(&self) -> usize {
        match &self.kind {
            ModelKind::Hermitian { .. } => 2 * self.sa_dim(),
            ModelKind::Lattice { dim } => *dim,
        }
    }

    pub fn check_level(&self, level: (usize, usize)) -> Result<()> {
        let ok = level.0 > 0 && level.1 > 0 && (self.is_hermitian() || level == (1, 1));
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedLevel {
                level,
                model: self.to_string(),
            })
        }
    }

    pub fn payload_shape(&self, level: (usize, usize)) -> Result<(usize, usize)> {
        self.check_level(level)?;
        Ok(match &self.kind {
            ModelKind::Hermitian { .. } => (level.0 * self.size(), level.1 * self.size()),
            ModelKind::Lattice { dim } => (*dim, 1),
        })
    }

    /// `e ⊕ ... ⊕ e` at level `n`.
    pub fn unit(&self, n: usize) -> Element {
        match &self.kind {
            ModelKind::Hermitian { .. } => {
                let size = n * self.size();
                Element::new((n, n), CMatrix::identity(size, size))
            }
            ModelKind::Lattice { dim } => {
                assert_eq!(n, 1, "lattice model has no matrix levels");
                Element::new((1, 1), CMatrix::from_element(*dim, 1, c(1.0, 0.0)))
            }
        }
    }

    pub fn zero(&self, level: (usize, usize)) -> Element {
        let (r, cl) = self
            .payload_shape(level)
            .expect("zero element requested at an unsupported level");
        Element::new(level, CMatrix::zeros(r, cl))
    }

    /// Shape, finiteness and block-pattern check.
    pub fn validate(&self, v: &Element) -> Result<()> {
        let expected = self.payload_shape(v.level)?;
        if v.coords.shape() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: v.coords.shape(),
            });
        }
        if !crate::linalg::all_finite(&v.coords) {
            return Err(Error::NonFinite);
        }
        match &self.kind {
            ModelKind::Hermitian { blocks } if blocks.len() > 1 => {
                let labels = self.labels();
                for i in 0..expected.0 {
                    for j in 0..expected.1 {
                        if !self.allowed(&labels, i, j) && v.coords[(i, j)].norm() != 0.0 {
                            return Err(Error::OutsidePattern(self.to_string()));
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Zero the entries outside the block pattern (rounding noise from
    /// spectral routines on block-diagonal input).
    pub fn clean(&self, mut v: Element) -> Element {
        if self.blocks().len() > 1 {
            let labels = self.labels();
            let (r, cl) = v.coords.shape();
            for i in 0..r {
                for j in 0..cl {
                    if !self.allowed(&labels, i, j) {
                        v.coords[(i, j)] = c(0.0, 0.0);
                    }
                }
            }
        }
        v
    }

    /// Involution: conjugate transpose (Hermitian) or conjugation (lattice).
    pub fn star(&self, v: &Element) -> Element {
        match &self.kind {
            ModelKind::Hermitian { .. } => Element::new((v.level.1, v.level.0), v.coords.adjoint()),
            ModelKind::Lattice { .. } => Element::new(v.level, v.coords.map(|z| z.conj())),
        }
    }

    /// Block `(a, b)` of a matrix-level element, as a level-1 element.
    pub fn block(&self, v: &Element, a: usize, b: usize) -> Element {
        let k = self.size();
        match &self.kind {
            ModelKind::Hermitian { .. } => {
                Element::new((1, 1), v.coords.view((a * k, b * k), (k, k)).into_owned())
            }
            ModelKind::Lattice { .. } => {
                assert_eq!((a, b), (0, 0));
                v.clone()
            }
        }
    }

    /// Assemble a level-`(m, n)` element from level-1 blocks.
    pub fn from_blocks(
        &self,
        level: (usize, usize),
        mut f: impl FnMut(usize, usize) -> Element,
    ) -> Element {
        if self.is_lattice() {
            assert_eq!(level, (1, 1));
            return f(0, 0);
        }
        let k = self.size();
        let mut out = CMatrix::zeros(level.0 * k, level.1 * k);
        for a in 0..level.0 {
            for b in 0..level.1 {
                let blk = f(a, b);
                out.view_mut((a * k, b * k), (k, k)).copy_from(&blk.coords);
            }
        }
        Element::new(level, out)
    }

    /// Allowed `(i, j)` entries of the level-1 ambient matrix, row-major.
    pub fn ambient_entries(&self) -> Vec<(usize, usize)> {
        match &self.kind {
            ModelKind::Hermitian { .. } => {
                let labels = self.labels();
                let k = self.size();
                (0..k)
                    .flat_map(|i| (0..k).map(move |j| (i, j)))
                    .filter(|&(i, j)| labels[i] == labels[j])
                    .collect()
            }
            ModelKind::Lattice { dim } => (0..*dim).map(|i| (i, 0)).collect(),
        }
    }

    /// Real coordinates of a level-1 element: `[re, im]` per allowed entry
    /// (Hermitian) or the real parts (lattice).
    pub fn to_ambient(&self, v: &Element) -> DVector<f64> {
        match &self.kind {
            ModelKind::Hermitian { .. } => {
                let entries = self.ambient_entries();
                let mut out = DVector::zeros(2 * entries.len());
                for (t, &(i, j)) in entries.iter().enumerate() {
                    out[2 * t] = v.coords[(i, j)].re;
                    out[2 * t + 1] = v.coords[(i, j)].im;
                }
                out
            }
            ModelKind::Lattice { dim } => DVector::from_fn(*dim, |i, _| v.coords[(i, 0)].re),
        }
    }

    pub fn from_ambient(&self, x: &DVector<f64>) -> Element {
        match &self.kind {
            ModelKind::Hermitian { .. } => {
                let k = self.size();
                let mut m = CMatrix::zeros(k, k);
                for (t, (i, j)) in self.ambient_entries().into_iter().enumerate() {
                    m[(i, j)] = c(x[2 * t], x[2 * t + 1]);
                }
                Element::new((1, 1), m)
            }
            ModelKind::Lattice { dim } => {
                Element::new((1, 1), CMatrix::from_fn(*dim, 1, |i, _| c(x[i], 0.0)))
            }
        }
    }

    /// Real basis of the ambient space at level 1 (`E_ij`, `i E_ij`, or unit
    /// vectors for the lattice), matching the order of [`Self::to_ambient`].
    pub fn ambient_basis(&self) -> Vec<Element> {
        let n = self.ambient_dim();
        (0..n)
            .map(|t| {
                let mut x = DVector::zeros(n);
                x[t] = 1.0;
                self.from_ambient(&x)
            })
            .collect()
    }

    fn sa_index(&self, n: usize) -> Vec<(usize, usize)> {
        let labels = self.labels();
        let size = n * self.size();
        let mut out = Vec::new();
        for i in 0..size {
            for j in i..size {
                if self.allowed(&labels, i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Coordinates of a self-adjoint level-`(n, n)` element in the
    /// orthonormal basis of [`Self::sa_basis`] (trace inner product).
    pub fn sa_coords(&self, v: &Element) -> DVector<f64> {
        match &self.kind {
            ModelKind::Lattice { dim } => DVector::from_fn(*dim, |i, _| v.coords[(i, 0)].re),
            ModelKind::Hermitian { .. } => {
                let n = v.level.0;
                let mut out = Vec::new();
                for (i, j) in self.sa_index(n) {
                    let z = v.coords[(i, j)];
                    if i == j {
                        out.push(z.re);
                    } else {
                        out.push(std::f64::consts::SQRT_2 * z.re);
                        out.push(std::f64::consts::SQRT_2 * z.im);
                    }
                }
                DVector::from_vec(out)
            }
        }
    }

    pub fn from_sa_coords(&self, n: usize, x: &DVector<f64>) -> Element {
        match &self.kind {
            ModelKind::Lattice { dim } => {
                Element::new((1, 1), CMatrix::from_fn(*dim, 1, |i, _| c(x[i], 0.0)))
            }
            ModelKind::Hermitian { .. } => {
                let size = n * self.size();
                let mut m = CMatrix::zeros(size, size);
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let mut t = 0;
                for (i, j) in self.sa_index(n) {
                    if i == j {
                        m[(i, i)] = c(x[t], 0.0);
                        t += 1;
                    } else {
                        let z = c(h * x[t], h * x[t + 1]);
                        m[(i, j)] = z;
                        m[(j, i)] = z.conj();
                        t += 2;
                    }
                }
                Element::new((n, n), m)
            }
        }
    }

    /// Real dimension of the self-adjoint part at level `n`.
    pub fn sa_dim_at(&self, n: usize) -> usize {
        match &self.kind {
            ModelKind::Lattice { dim } => *dim,
            ModelKind::Hermitian { .. } => self
                .sa_index(n)
                .iter()
                .map(|&(i, j)| if i == j { 1 } else { 2 })
                .sum(),
        }
    }

    /// Orthonormal basis of the self-adjoint part at level `n`.
    pub fn sa_basis(&self, n: usize) -> Vec<Element> {
        let dim = self.sa_dim_at(n);
        (0..dim)
            .map(|t| {
                let mut x = DVector::zeros(dim);
                x[t] = 1.0;
                self.from_sa_coords(n, &x)
            })
            .collect()
    }
}

impl fmt::Display for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ModelKind::Hermitian { blocks } => {
                let parts: Vec<String> = blocks.iter().map(|k| k.to_string()).collect();
                write!(f, "hermitian:{}", parts.join("+"))
            }
            ModelKind::Lattice { dim } => write!(f, "lattice:{dim}"),
        }
    }
}

impl FromStr for SpaceModel {
    type Err = Error;

    /// `hermitian:k`, `hermitian:k1+k2+...` or `lattice:d`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadDescriptor(s.to_string());
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let parse_dim = |t: &str| -> Result<usize> {
            match t.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(bad()),
            }
        };
        match kind.trim() {
            "hermitian" => {
                let blocks = rest.split('+').map(parse_dim).collect::<Result<Vec<_>>>()?;
                Ok(Self::hermitian_blocks(&blocks))
            }
            "lattice" => Ok(Self::lattice(parse_dim(rest)?)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for SpaceModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SpaceModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of `M_{m,n}(V)` stored as its dense complex payload.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    level: (usize, usize),
    coords: CMatrix,
}

impl Element {
    pub fn new(level: (usize, usize), coords: CMatrix) -> Self {
        Self { level, coords }
    }

    /// Level-1 element from a square complex matrix.
    pub fn from_matrix(coords: CMatrix) -> Self {
        Self::new((1, 1), coords)
    }

    /// Level-1 lattice element from real coordinates.
    pub fn from_reals(values: &[f64]) -> Self {
        Self::new(
            (1, 1),
            CMatrix::from_iterator(values.len(), 1, values.iter().map(|&x| c(x, 0.0))),
        )
    }

    /// Level-1 diagonal Hermitian element.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::new(
            (1, 1),
            CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    c(values[i], 0.0)
                } else {
                    c(0.0, 0.0)
                }
            }),
        )
    }

    pub fn level(&self) -> (usize, usize) {
        self.level
    }

    pub fn coords(&self) -> &CMatrix {
        &self.coords
    }

    pub fn into_coords(self) -> CMatrix {
        self.coords
    }

    pub fn with_level(mut self, level: (usize, usize)) -> Self {
        self.level = level;
        self
    }

    pub fn scale(&self, k: f64) -> Element {
        Element::new(self.level, self.coords.map(|z| z * k))
    }

    pub fn max_entry(&self) -> f64 {
        crate::linalg::max_entry(&self.coords)
    }

    pub fn frobenius(&self) -> f64 {
        crate::linalg::frobenius(&self.coords)
    }

    /// Matrix product of payloads (Hermitian models).
    pub fn product(&self, other: &Element) -> Element {
        assert_eq!(self.level.1, other.level.0, "incompatible levels");
        Element::new((self.level.0, other.level.1), &self.coords * &other.coords)
    }

    fn assert_same_level(&self, other: &Element) {
        assert_eq!(
            (self.level, self.coords.shape()),
            (other.level, other.coords.shape()),
            "elements of different shapes"
        );
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.assert_same_level(rhs);
        Element::new(self.level, &self.coords + &rhs.coords)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.assert_same_level(rhs);
        Element::new(self.level, &self.coords - &rhs.coords)
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(-1.0)
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Element {
    type Output = Element;
    fn mul(self, k: f64) -> Element {
        self.scale(k)
    }
}

impl Mul<f64> for Element {
    type Output = Element;
    fn mul(self, k: f64) -> Element {
        self.scale(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_round_trip() {
        for s in ["hermitian:3", "hermitian:2+2", "lattice:5"] {
            let m: SpaceModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
    }

    #[test]
    fn malformed_descriptors_rejected() {
        for s in [
            "",
            "hermitian",
            "hermitian:0",
            "lattice:-1",
            "banach:3",
            "hermitian:2+",
            "lattice:x",
        ] {
            assert!(s.parse::<SpaceModel>().is_err(), "{s}");
        }
    }

    #[test]
    fn dimensions() {
        let h = SpaceModel::hermitian(3);
        assert_eq!((h.size(), h.sa_dim(), h.ambient_dim()), (3, 9, 18));
        let b = SpaceModel::hermitian_blocks(&[2, 1]);
        assert_eq!((b.size(), b.sa_dim(), b.ambient_dim()), (3, 5, 10));
        assert_eq!(b.sa_dim_at(2), 4 * 4 + 2 * 2);
        let l = SpaceModel::lattice(4);
        assert_eq!((l.size(), l.sa_dim(), l.ambient_dim()), (4, 4, 4));
    }

    #[test]
    fn sa_basis_is_orthonormal() {
        let m = SpaceModel::hermitian_blocks(&[2, 1]);
        let basis = m.sa_basis(2);
        assert_eq!(basis.len(), m.sa_dim_at(2));
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let ip = (a.coords().adjoint() * b.coords()).trace().re;
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-14);
            }
            assert!(m.validate(a).is_ok());
        }
    }

    #[test]
    fn ambient_coordinates_round_trip() {
        let m = SpaceModel::hermitian_blocks(&[1, 2]);
        for b in m.ambient_basis() {
            assert_eq!(m.from_ambient(&m.to_ambient(&b)), b);
        }
    }

    #[test]
    fn pattern_violations_rejected() {
        let m = SpaceModel::hermitian_blocks(&[1, 1]);
        let v = Element::from_matrix(CMatrix::from_element(2, 2, c(1.0, 0.0)));
        assert!(matches!(m.validate(&v), Err(Error::OutsidePattern(_))));
        assert!(m.validate(&m.clean(v)).is_ok());
    }

    #[test]
    fn lattice_has_no_matrix_levels() {
        let l = SpaceModel::lattice(3);
        assert!(l.check_level((2, 2)).is_err());
        assert!(l.check_level((1, 1)).is_ok());
    }
}
