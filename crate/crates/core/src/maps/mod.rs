//! Star-linear maps between models, their classifiers and theorem suites.

pub mod classify;
pub mod kernel;
pub mod projections;
pub mod suites;

use nalgebra::DVector;

use crate::linalg::{self, c, RMatrix};
use crate::model::{Element, ModelKind, SpaceModel};
use crate::report::{Method, Verdict, Witness};
use crate::{Error, Result, Tolerance};

pub use classify::{Profile, Property};

/// Relative cutoff on singular values when deciding rank.
pub const RANK_TOL: f64 = 1e-9;

/// A real-linear map `φ: V → W` stored as a dense real matrix on ambient
/// coordinates, commuting with the involution.
///
/// The stored level `n` selects the amplification `φ_n` that classifiers
/// test; [`StarLinearMap::apply`] itself works blockwise at every level.
#[derive(Clone, Debug)]
pub struct StarLinearMap {
    label: String,
    domain: SpaceModel,
    codomain: SpaceModel,
    action: RMatrix,
    level: usize,
    dom_entries: Vec<(usize, usize)>,
    cod_entries: Vec<(usize, usize)>,
}

impl StarLinearMap {
    /// Validated constructor: shape, finiteness and `φ(x*) = φ(x)*` on a
    /// basis of the ambient space (exact, since both sides are real-linear).
    pub fn new(
        label: impl Into<String>,
        domain: SpaceModel,
        codomain: SpaceModel,
        action: RMatrix,
    ) -> Result<Self> {
        let expected = (codomain.ambient_dim(), domain.ambient_dim());
        if action.shape() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: action.shape(),
            });
        }
        if action.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let map = Self::unchecked(label, domain, codomain, action);
        let (defect, _) = map.star_defect();
        let scale = map.action.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if Tolerance::default().accepts(defect, scale) {
            Ok(map)
        } else {
            Err(Error::NotStarLinear(defect))
        }
    }

    /// No star-linearity check. Shapes must still match.
    pub fn unchecked(
        label: impl Into<String>,
        domain: SpaceModel,
        codomain: SpaceModel,
        action: RMatrix,
    ) -> Self {
        assert_eq!(
            action.shape(),
            (codomain.ambient_dim(), domain.ambient_dim()),
            "action shape does not match the models"
        );
        let dom_entries = domain.ambient_entries();
        let cod_entries = codomain.ambient_entries();
        Self {
            label: label.into(),
            domain,
            codomain,
            action,
            level: 1,
            dom_entries,
            cod_entries,
        }
    }

    /// Matrix of a level-1 map given as a function, read off the ambient
    /// basis, then validated.
    pub fn from_fn(
        label: impl Into<String>,
        domain: SpaceModel,
        codomain: SpaceModel,
        f: impl Fn(&Element) -> Element,
    ) -> Result<Self> {
        let action = Self::matrix_of(&domain, &codomain, f);
        Self::new(label, domain, codomain, action)
    }

    fn matrix_of(
        domain: &SpaceModel,
        codomain: &SpaceModel,
        f: impl Fn(&Element) -> Element,
    ) -> RMatrix {
        let basis = domain.ambient_basis();
        let mut action = RMatrix::zeros(codomain.ambient_dim(), domain.ambient_dim());
        for (j, b) in basis.iter().enumerate() {
            let y = codomain.to_ambient(&f(b));
            action.set_column(j, &y);
        }
        action
    }

    pub fn identity(model: &SpaceModel) -> Self {
        let d = model.ambient_dim();
        Self::unchecked(
            "identity",
            model.clone(),
            model.clone(),
            RMatrix::identity(d, d),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn domain(&self) -> &SpaceModel {
        &self.domain
    }

    pub fn codomain(&self) -> &SpaceModel {
        &self.codomain
    }

    pub fn action(&self) -> &RMatrix {
        &self.action
    }

    /// Amplification level classifiers act on.
    pub fn level(&self) -> usize {
        self.level
    }

    /// `φ_n`: the same map, classified on `n × n` block matrices.
    pub fn amplify(&self, n: usize) -> Self {
        assert!(n >= 1, "amplification level must be positive");
        let mut out = self.clone();
        out.level = n;
        out
    }

    /// Both models admit matrix levels above 1.
    pub fn supports_levels(&self) -> bool {
        self.domain.is_hermitian() && self.codomain.is_hermitian()
    }

    pub fn with_models(mut self, domain: SpaceModel, codomain: SpaceModel) -> Self {
        assert_eq!(domain.ambient_dim(), self.domain.ambient_dim());
        assert_eq!(codomain.ambient_dim(), self.codomain.ambient_dim());
        self.domain = domain;
        self.codomain = codomain;
        self
    }

    fn read_block(&self, x: &Element, a: usize, b: usize) -> DVector<f64> {
        let p = x.coords();
        match self.domain.kind() {
            ModelKind::Lattice { dim } => DVector::from_fn(*dim, |i, _| p[(i, 0)].re),
            ModelKind::Hermitian { .. } => {
                let k = self.domain.size();
                let mut out = DVector::zeros(2 * self.dom_entries.len());
                for (t, &(i, j)) in self.dom_entries.iter().enumerate() {
                    let z = p[(a * k + i, b * k + j)];
                    out[2 * t] = z.re;
                    out[2 * t + 1] = z.im;
                }
                out
            }
        }
    }

    /// `φ_{m,n}`: entrywise application to the block structure.
    ///
    /// Panics when the element's level is not supported by both models.
    pub fn apply(&self, x: &Element) -> Element {
        let (m, n) = x.level();
        let shape = self
            .codomain
            .payload_shape((m, n))
            .expect("level unsupported by the codomain");
        let mut out = linalg::CMatrix::zeros(shape.0, shape.1);
        let kc = self.codomain.size();
        for a in 0..m {
            for b in 0..n {
                let y = &self.action * self.read_block(x, a, b);
                match self.codomain.kind() {
                    ModelKind::Lattice { .. } => {
                        for i in 0..y.len() {
                            out[(i, 0)] = c(y[i], 0.0);
                        }
                    }
                    ModelKind::Hermitian { .. } => {
                        for (t, &(i, j)) in self.cod_entries.iter().enumerate() {
                            out[(a * kc + i, b * kc + j)] = c(y[2 * t], y[2 * t + 1]);
                        }
                    }
                }
            }
        }
        Element::new((m, n), out)
    }

    /// Like [`Self::apply`], but validates the input against the domain.
    pub fn try_apply(&self, x: &Element) -> Result<Element> {
        self.domain.validate(x)?;
        self.codomain.check_level(x.level())?;
        Ok(self.apply(x))
    }

    /// `ψ ∘ φ` with `self = ψ`.
    pub fn compose(&self, inner: &StarLinearMap) -> Result<StarLinearMap> {
        if inner.codomain.ambient_dim() != self.domain.ambient_dim()
            || inner.codomain.kind() != self.domain.kind()
        {
            return Err(Error::ModelMismatch(format!(
                "cannot compose {} after {}",
                self.label, inner.label
            )));
        }
        let mut out = Self::unchecked(
            format!("{} . {}", self.label, inner.label),
            inner.domain.clone(),
            self.codomain.clone(),
            &self.action * &inner.action,
        );
        out.level = self.level.max(inner.level);
        Ok(out)
    }

    /// Largest entry of `A S_V − S_W A` and the index of the worst basis
    /// column, `S` being the involution on ambient coordinates.
    pub fn star_defect(&self) -> (f64, usize) {
        let d =
            &self.action * star_matrix(&self.domain) - star_matrix(&self.codomain) * &self.action;
        let mut worst = (0.0f64, 0usize);
        for j in 0..d.ncols() {
            for i in 0..d.nrows() {
                let x = d[(i, j)].abs();
                if x.is_nan() || x > worst.0 {
                    worst = (x, j);
                    if x.is_nan() {
                        return worst;
                    }
                }
            }
        }
        worst
    }

    /// Exact star-linearity verdict with the offending basis element.
    pub fn star_linear_verdict(&self, tol: &Tolerance) -> Verdict {
        let (defect, j) = self.star_defect();
        let scale = self.action.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if tol.accepts(defect, scale) {
            Verdict::Pass {
                method: Method::Exact,
                max_residual: defect,
            }
        } else {
            let b = &self.domain.ambient_basis()[j];
            Verdict::Fail {
                method: Method::Exact,
                witness: Box::new(
                    Witness::new("φ(x*) differs from φ(x)* on a basis element", defect)
                        .with_element(&self.domain, b),
                ),
            }
        }
    }

    /// Restriction to self-adjoint parts in orthonormal coordinates.
    pub fn sa_matrix(&self) -> RMatrix {
        let basis = self.domain.sa_basis(1);
        let rows = self.codomain.sa_dim();
        let mut m = RMatrix::zeros(rows, basis.len());
        for (j, b) in basis.iter().enumerate() {
            m.set_column(j, &self.codomain.sa_coords(&self.apply(b)));
        }
        m
    }

    /// Rank of the restriction to self-adjoint parts.
    pub fn rank(&self) -> usize {
        linalg::real_rank_and_kernel(&self.sa_matrix(), RANK_TOL).0
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.domain.sa_dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.codomain.sa_dim()
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.sa_dim() == self.codomain.sa_dim() && self.is_injective()
    }

    /// `φ⁻¹`, assembled from the inverse on self-adjoint parts and extended
    /// through `x = h + i k`.
    pub fn inverse(&self) -> Result<StarLinearMap> {
        if !self.is_bijective() {
            return Err(Error::Singular);
        }
        let inv = self.sa_matrix().try_inverse().ok_or(Error::Singular)?;
        let domain = self.domain.clone();
        let codomain = self.codomain.clone();
        let psi = |h: &Element| domain.from_sa_coords(1, &(&inv * codomain.sa_coords(h)));
        let f = |x: &Element| -> Element {
            let xs = codomain.star(x);
            let h = (x + &xs) * 0.5;
            let k = Element::new((1, 1), (x.coords() - xs.coords()) * c(0.0, -0.5));
            let ph = psi(&h);
            let pk = psi(&k);
            Element::new((1, 1), ph.coords() + pk.coords() * c(0.0, 1.0))
        };
        let action = Self::matrix_of(&self.codomain, &self.domain, f);
        let mut out = Self::unchecked(
            format!("inverse({})", self.label),
            self.codomain.clone(),
            self.domain.clone(),
            action,
        );
        out.level = self.level;
        Ok(out)
    }
}

/// Matrix of `x ↦ x*` on ambient coordinates.
pub fn star_matrix(model: &SpaceModel) -> RMatrix {
    let d = model.ambient_dim();
    match model.kind() {
        ModelKind::Lattice { .. } => RMatrix::identity(d, d),
        ModelKind::Hermitian { .. } => {
            let entries = model.ambient_entries();
            let index: std::collections::HashMap<(usize, usize), usize> =
                entries.iter().enumerate().map(|(t, &e)| (e, t)).collect();
            let mut s = RMatrix::zeros(d, d);
            for (t, &(i, j)) in entries.iter().enumerate() {
                let u = index[&(j, i)];
                s[(2 * t, 2 * u)] = 1.0;
                s[(2 * t + 1, 2 * u + 1)] = -1.0;
            }
            s
        }
    }
}

/// Matrix of multiplication by `i` on ambient coordinates (Hermitian models).
pub fn times_i_matrix(model: &SpaceModel) -> RMatrix {
    let d = model.ambient_dim();
    let mut j = RMatrix::zeros(d, d);
    if model.is_hermitian() {
        for t in 0..d / 2 {
            j[(2 * t, 2 * t + 1)] = -1.0;
            j[(2 * t + 1, 2 * t)] = 1.0;
        }
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    fn transpose(k: usize) -> StarLinearMap {
        let m = SpaceModel::hermitian(k);
        StarLinearMap::from_fn("transpose", m.clone(), m, |x| {
            Element::new((1, 1), x.coords().transpose())
        })
        .unwrap()
    }

    #[test]
    fn identity_applies_at_every_level() {
        let m = SpaceModel::hermitian(2);
        let id = StarLinearMap::identity(&m);
        let mut rng = crate::rng::stream_rng(0, "t", 0);
        let x = crate::generators::elements::gaussian_element(&m, (2, 3), &mut rng);
        assert_eq!(id.apply(&x), x);
    }

    #[test]
    fn transpose_amplifies_blockwise() {
        let t = transpose(2);
        let m = SpaceModel::hermitian(2);
        let choi = crate::generators::elements::choi_element(&m, 2).unwrap();
        let y = t.apply(&choi);
        let vals = linalg::eigenvalues(y.coords());
        assert!((vals[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn star_defect_detects_multiplication_by_i() {
        let m = SpaceModel::hermitian(2);
        assert!(transpose(2).star_defect().0 == 0.0);
        let bad = times_i_matrix(&m);
        assert!(matches!(
            StarLinearMap::new("i", m.clone(), m, bad),
            Err(Error::NotStarLinear(_))
        ));
    }

    #[test]
    fn transpose_is_self_inverse() {
        let t = transpose(3);
        let inv = t.inverse().unwrap();
        assert!((inv.action() - t.action()).abs().max() < 1e-12);
    }

    #[test]
    fn halving_inverse_is_doubling() {
        let m = SpaceModel::hermitian(2);
        let half = StarLinearMap::from_fn("half", m.clone(), m.clone(), |x| x.scale(0.5)).unwrap();
        let inv = half.inverse().unwrap();
        let d = m.ambient_dim();
        assert!((inv.action() - RMatrix::identity(d, d) * 2.0).abs().max() < 1e-12);
    }

    #[test]
    fn rank_of_compression() {
        let dom = SpaceModel::hermitian_blocks(&[2, 2]);
        let cod = SpaceModel::hermitian(2);
        let f = |x: &Element| Element::new((1, 1), x.coords().view((0, 0), (2, 2)).into_owned());
        let p = StarLinearMap::from_fn("compress", dom, cod, f).unwrap();
        assert_eq!(p.rank(), 4);
        assert!(p.is_surjective());
        assert!(!p.is_injective());
        assert!(matches!(p.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn lattice_maps_apply() {
        let l = SpaceModel::lattice(3);
        let mut a = RMatrix::zeros(3, 3);
        a[(0, 2)] = 1.0;
        a[(1, 0)] = 1.0;
        a[(2, 1)] = 1.0;
        let p = StarLinearMap::new("perm", l.clone(), l, a).unwrap();
        let y = p.apply(&Element::from_reals(&[1.0, 2.0, 3.0]));
        assert_eq!(y, Element::from_reals(&[3.0, 1.0, 2.0]));
        assert!(p.is_bijective());
    }

    #[test]
    fn sa_matrix_of_identity_is_identity() {
        let m = SpaceModel::hermitian_blocks(&[1, 2]);
        let id = StarLinearMap::identity(&m);
        let s = id.sa_matrix();
        assert!((s - RMatrix::identity(m.sa_dim(), m.sa_dim())).abs().max() < 1e-15);
    }
}
