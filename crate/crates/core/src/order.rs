//! Absolute value, orthogonal decomposition, order-unit norm and the three
//! orthogonality relations on the concrete models.

use crate::generators::elements;
use crate::linalg::{self, CMatrix};
use crate::model::{Element, ModelKind, SpaceModel};
use crate::rng::SeededRng;
use crate::{Error, Result, Tolerance};

/// Relative slack used when an operation requires a self-adjoint input but
/// takes no tolerance of its own.
const SELF_ADJOINT_SLACK: f64 = 1e-9;

/// Payloads whose Hermitian defect is below this relative level take the
/// spectral route for `|v|`.
const SPECTRAL_ROUTE_SLACK: f64 = 64.0 * f64::EPSILON;

pub fn self_adjoint_defect(model: &SpaceModel, v: &Element) -> f64 {
    match model.kind() {
        ModelKind::Hermitian { .. } => {
            if v.level().0 != v.level().1 {
                return f64::INFINITY;
            }
            linalg::hermitian_defect(v.coords())
        }
        ModelKind::Lattice { .. } => v.coords().iter().fold(0.0f64, |m, z| m.max(z.im.abs())),
    }
}

pub fn is_self_adjoint(model: &SpaceModel, v: &Element, tol: &Tolerance) -> bool {
    tol.accepts(self_adjoint_defect(model, v), v.max_entry())
}

pub(crate) fn require_self_adjoint(model: &SpaceModel, v: &Element) -> Result<()> {
    model.validate(v)?;
    let defect = self_adjoint_defect(model, v);
    if defect <= SELF_ADJOINT_SLACK * (1.0 + v.max_entry()) {
        Ok(())
    } else {
        Err(Error::NotSelfAdjoint(defect))
    }
}

/// Smallest and largest eigenvalue (coordinate, for the lattice) of a
/// self-adjoint element. NaN when the element has non-finite entries.
pub fn spectral_bounds(model: &SpaceModel, v: &Element) -> (f64, f64) {
    match model.kind() {
        ModelKind::Hermitian { .. } => {
            let vals = linalg::eigenvalues(v.coords());
            match (vals.first(), vals.last()) {
                (Some(&lo), Some(&hi)) => (lo, hi),
                _ => (0.0, 0.0),
            }
        }
        ModelKind::Lattice { .. } => {
            let re = v.coords().iter().map(|z| z.re);
            let lo = re.clone().fold(f64::INFINITY, f64::min);
            let hi = re.fold(f64::NEG_INFINITY, f64::max);
            if v.coords().iter().any(|z| z.re.is_nan()) {
                (f64::NAN, f64::NAN)
            } else {
                (lo, hi)
            }
        }
    }
}

/// `|v|` in the cone of `M_n(V)`.
///
/// Hermitian model: `(v* v)^{1/2}`, computed as `U |Λ| U*` for self-adjoint
/// payloads and from the dilation `[[0, v], [v*, 0]]` otherwise. A model
/// built with [`SpaceModel::without_sqrt_clamp`] instead takes the square
/// root of the eigenvalues of `v* v` without clamping them at zero. Lattice
/// model: coordinatewise modulus.
pub fn abs_element(model: &SpaceModel, v: &Element) -> Result<Element> {
    model.validate(v)?;
    let (_, n) = v.level();
    let coords = match model.kind() {
        ModelKind::Lattice { .. } => v.coords().map(|z| linalg::c(z.norm(), 0.0)),
        ModelKind::Hermitian { .. } => {
            if !model.clamps_sqrt() {
                let gram = v.coords().adjoint() * v.coords();
                linalg::psd_sqrt(&gram, false)
            } else if v.level().0 == n
                && linalg::hermitian_defect(v.coords())
                    <= SPECTRAL_ROUTE_SLACK * (1.0 + v.max_entry())
            {
                linalg::abs_hermitian(v.coords())
            } else {
                linalg::abs_general(v.coords())
            }
        }
    };
    Ok(model.clean(Element::new((n, n), coords)))
}

/// `(v⁺, v⁻) = ((|v| + v)/2, (|v| − v)/2)`.
pub fn pos_neg_parts(model: &SpaceModel, v: &Element) -> Result<(Element, Element)> {
    require_self_adjoint(model, v)?;
    let a = abs_element(model, v)?;
    Ok(((&a + v) * 0.5, (&a - v) * 0.5))
}

/// `inf { k > 0 : k e ± v ∈ V⁺ }`: largest eigenvalue modulus, or largest
/// coordinate modulus on the lattice.
pub fn order_unit_norm(model: &SpaceModel, v: &Element) -> Result<f64> {
    require_self_adjoint(model, v)?;
    let (lo, hi) = spectral_bounds(model, v);
    Ok(lo.abs().max(hi.abs()))
}

/// `l(v) = inf { ‖u‖ : u ≥ 0, u + v ≥ 0 }`, attained at `u = v⁻`.
pub fn lower_bound_functional(model: &SpaceModel, v: &Element) -> Result<f64> {
    require_self_adjoint(model, v)?;
    let (lo, _) = spectral_bounds(model, v);
    Ok((-lo).max(0.0))
}

/// Order-unit norm without the self-adjointness precondition; used for
/// residuals and tolerance scales. NaN propagates.
pub fn residual_norm(model: &SpaceModel, v: &Element) -> f64 {
    match model.kind() {
        ModelKind::Hermitian { .. } => {
            if v.level().0 == v.level().1 && linalg::hermitian_defect(v.coords()) == 0.0 {
                linalg::hermitian_norm(v.coords())
            } else {
                linalg::operator_norm(v.coords())
            }
        }
        ModelKind::Lattice { .. } => {
            if v.coords().iter().any(|z| z.re.is_nan() || z.im.is_nan()) {
                f64::NAN
            } else {
                v.max_entry()
            }
        }
    }
}

/// Membership in `M_n(V)⁺` with the scale-aware slack
/// `λ_min ≥ −(eps_abs + eps_rel ‖v‖)`.
pub fn in_cone(model: &SpaceModel, v: &Element, tol: &Tolerance) -> bool {
    if model.validate(v).is_err() || !is_self_adjoint(model, v, tol) {
        return false;
    }
    let (lo, hi) = spectral_bounds(model, v);
    let norm = lo.abs().max(hi.abs());
    lo >= -tol.bound(norm)
}

fn require_cone(model: &SpaceModel, v: &Element, tol: &Tolerance) -> Result<()> {
    model.validate(v)?;
    if in_cone(model, v, tol) {
        Ok(())
    } else if !is_self_adjoint(model, v, tol) {
        Err(Error::NotSelfAdjoint(self_adjoint_defect(model, v)))
    } else {
        Err(Error::OutsideCone(spectral_bounds(model, v).0))
    }
}

/// `u ⊥ v` iff `|u − v| = u + v`.
pub fn perp(model: &SpaceModel, u: &Element, v: &Element, tol: &Tolerance) -> Result<bool> {
    require_cone(model, u, tol)?;
    require_cone(model, v, tol)?;
    Ok(perp_residual(model, u, v)? <= tol.bound(residual_norm(model, u) + residual_norm(model, v)))
}

/// `‖ |u − v| − (u + v) ‖`
pub fn perp_residual(model: &SpaceModel, u: &Element, v: &Element) -> Result<f64> {
    let lhs = abs_element(model, &(u - v))?;
    Ok(residual_norm(model, &(&lhs - &(u + v))))
}

/// `u ⊥_∞ v`, decided by `‖ u/‖u‖ + v/‖v‖ ‖ = 1` (zero elements are
/// ∞-orthogonal to everything).
pub fn perp_infty(model: &SpaceModel, u: &Element, v: &Element, tol: &Tolerance) -> Result<bool> {
    require_cone(model, u, tol)?;
    require_cone(model, v, tol)?;
    let nu = residual_norm(model, u);
    let nv = residual_norm(model, v);
    if nu <= tol.bound(0.0) || nv <= tol.bound(0.0) {
        return Ok(true);
    }
    let sum = &u.scale(1.0 / nu) + &v.scale(1.0 / nv);
    Ok(residual_norm(model, &sum) <= 1.0 + tol.bound(2.0))
}

/// Cross-check of `u ⊥_∞ v` on a fixed grid of `(α, β)`, sign mixes
/// included. Returns the first pair with `‖αu + βv‖ ≠ max(‖αu‖, ‖βv‖)`.
pub fn perp_infty_grid(
    model: &SpaceModel,
    u: &Element,
    v: &Element,
    tol: &Tolerance,
) -> Result<Option<(f64, f64)>> {
    require_cone(model, u, tol)?;
    require_cone(model, v, tol)?;
    let nu = residual_norm(model, u);
    let nv = residual_norm(model, v);
    let mut alphas = vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    let mut betas = alphas.clone();
    if nu > 0.0 {
        alphas.extend([1.0 / nu, -1.0 / nu]);
    }
    if nv > 0.0 {
        betas.extend([1.0 / nv, -1.0 / nv]);
    }
    for &a in &alphas {
        for &b in &betas {
            let lhs = residual_norm(model, &(&u.scale(a) + &v.scale(b)));
            let rhs = (a.abs() * nu).max(b.abs() * nv);
            if !tol.accepts((lhs - rhs).abs(), a.abs() * nu + b.abs() * nv) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// `u ⊥_∞^a v` by the model's exact oracle: `uv = 0` (Hermitian) or
/// `min(u_i, v_i) = 0` for every coordinate (lattice).
pub fn perp_infty_abs(
    model: &SpaceModel,
    u: &Element,
    v: &Element,
    tol: &Tolerance,
) -> Result<bool> {
    require_cone(model, u, tol)?;
    require_cone(model, v, tol)?;
    let nu = residual_norm(model, u);
    let nv = residual_norm(model, v);
    Ok(match model.kind() {
        ModelKind::Hermitian { .. } => {
            let prod: CMatrix = u.coords() * v.coords();
            linalg::operator_norm(&prod) <= tol.bound(nu * nv)
        }
        ModelKind::Lattice { .. } => {
            let overlap = u
                .coords()
                .iter()
                .zip(v.coords().iter())
                .fold(0.0f64, |m, (a, b)| m.max(a.re.min(b.re)));
            overlap <= tol.bound(nu.max(nv))
        }
    })
}

/// Outcome of the randomized minorant check behind `⊥_∞^a`.
#[derive(Clone, Debug)]
pub struct MinorantCheck {
    /// Verdict of the exact oracle.
    pub oracle: bool,
    pub sampled: usize,
    /// A minorant pair `(u₁, v₁)` that is not ∞-orthogonal.
    pub violation: Option<(Element, Element)>,
}

impl MinorantCheck {
    /// A violation contradicts a positive oracle verdict; the converse is
    /// one-sided and never flagged.
    pub fn consistent(&self) -> bool {
        !(self.oracle && self.violation.is_some())
    }
}

/// Draws `u₁ = u^{1/2} c u^{1/2}`, `v₁ = v^{1/2} c' v^{1/2}` with random
/// `0 ≤ c, c' ≤ e` and tests `u₁ ⊥_∞ v₁`.
pub fn perp_infty_abs_sampled(
    model: &SpaceModel,
    u: &Element,
    v: &Element,
    tol: &Tolerance,
    samples: usize,
    rng: &mut SeededRng,
) -> Result<MinorantCheck> {
    let oracle = perp_infty_abs(model, u, v, tol)?;
    let mut violation = None;
    let mut sampled = 0;
    for t in 0..samples {
        let (u1, v1) = if t == 0 {
            (u.clone(), v.clone())
        } else {
            (
                elements::minorant(model, u, rng),
                elements::minorant(model, v, rng),
            )
        };
        sampled += 1;
        let ok = perp_infty(model, &u1, &v1, tol).unwrap_or(false);
        if !ok {
            violation = Some((u1, v1));
            break;
        }
    }
    Ok(MinorantCheck {
        oracle,
        sampled,
        violation,
    })
}

/// Jordan product `(ab + ba)/2` on the Hermitian model.
pub fn jordan_product(model: &SpaceModel, a: &Element, b: &Element) -> Result<Element> {
    if model.is_lattice() {
        return Err(Error::LatticeUnsupported);
    }
    model.validate(a)?;
    model.validate(b)?;
    Ok((a.product(b) + b.product(a)) * 0.5)
}

/// Coordinatewise product, the lattice's Jordan product.
pub fn lattice_product(model: &SpaceModel, a: &Element, b: &Element) -> Result<Element> {
    if !model.is_lattice() {
        return Err(Error::ModelMismatch(
            "lattice product on a Hermitian model".into(),
        ));
    }
    model.validate(a)?;
    model.validate(b)?;
    Ok(Element::new((1, 1), a.coords().component_mul(b.coords())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn h2() -> SpaceModel {
        SpaceModel::hermitian(2)
    }

    fn close(a: &Element, b: &Element, eps: f64) -> bool {
        (a - b).frobenius() <= eps
    }

    #[test]
    fn abs_of_diagonal() {
        let a = abs_element(&h2(), &Element::diag(&[1.0, -2.0])).unwrap();
        assert!(close(&a, &Element::diag(&[1.0, 2.0]), 1e-14));
    }

    #[test]
    fn abs_of_pauli_x_is_identity() {
        let x = Element::from_matrix(CMatrix::from_row_slice(
            2,
            2,
            &[
                linalg::c(0.0, 0.0),
                linalg::c(1.0, 0.0),
                linalg::c(1.0, 0.0),
                linalg::c(0.0, 0.0),
            ],
        ));
        let a = abs_element(&h2(), &x).unwrap();
        assert!(close(&a, &h2().unit(1), 1e-14));
    }

    #[test]
    fn abs_rejects_shape_mismatch_and_nan() {
        let m = SpaceModel::hermitian(3);
        assert!(matches!(
            abs_element(&m, &Element::diag(&[1.0, 2.0])),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            abs_element(&h2(), &Element::diag(&[f64::NAN, 1.0])),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn parts_of_diagonal() {
        let (p, n) = pos_neg_parts(&h2(), &Element::diag(&[1.0, -2.0])).unwrap();
        assert!(close(&p, &Element::diag(&[1.0, 0.0]), 1e-14));
        assert!(close(&n, &Element::diag(&[0.0, 2.0]), 1e-14));
    }

    #[test]
    fn parts_of_positive_element() {
        let v = Element::diag(&[3.0, 0.5]);
        let (p, n) = pos_neg_parts(&h2(), &v).unwrap();
        assert!(close(&p, &v, 1e-14));
        assert!(n.frobenius() < 1e-14);
    }

    #[test]
    fn parts_require_self_adjoint() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = linalg::c(1.0, 0.0);
        let v = Element::from_matrix(m);
        assert!(matches!(
            pos_neg_parts(&h2(), &v),
            Err(Error::NotSelfAdjoint(_))
        ));
        assert!(matches!(
            order_unit_norm(&h2(), &v),
            Err(Error::NotSelfAdjoint(_))
        ));
        assert!(matches!(
            lower_bound_functional(&h2(), &v),
            Err(Error::NotSelfAdjoint(_))
        ));
    }

    #[test]
    fn norms() {
        assert_eq!(
            order_unit_norm(&h2(), &Element::diag(&[3.0, -5.0])).unwrap(),
            5.0
        );
        assert!((order_unit_norm(&h2(), &h2().unit(1)).unwrap() - 1.0).abs() < 1e-15);
        let l = SpaceModel::lattice(3);
        assert_eq!(
            order_unit_norm(&l, &Element::from_reals(&[1.0, -2.0, 0.5])).unwrap(),
            2.0
        );
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(
            lower_bound_functional(&h2(), &Element::diag(&[1.0, 0.0])).unwrap(),
            0.0
        );
        assert_eq!(
            lower_bound_functional(&h2(), &Element::diag(&[3.0, -5.0])).unwrap(),
            5.0
        );
        let l = SpaceModel::lattice(2);
        assert_eq!(
            lower_bound_functional(&l, &Element::from_reals(&[2.0, -3.0])).unwrap(),
            3.0
        );
    }

    #[test]
    fn perp_basic_cases() {
        let m = h2();
        let p = Element::diag(&[1.0, 0.0]);
        let q = Element::diag(&[0.0, 1.0]);
        assert!(perp(&m, &p, &q, &tol()).unwrap());
        assert!(!perp(&m, &p, &p, &tol()).unwrap());
        assert!(perp(&m, &p, &m.zero((1, 1)), &tol()).unwrap());
        assert!(matches!(
            perp(&m, &Element::diag(&[-1.0, 0.0]), &q, &tol()),
            Err(Error::OutsideCone(_))
        ));
    }

    #[test]
    fn perp_infty_cases() {
        let m = h2();
        let p = Element::diag(&[1.0, 0.0]);
        let q = Element::diag(&[0.0, 1.0]);
        let e = m.unit(1);
        assert!(perp_infty(&m, &p, &q, &tol()).unwrap());
        assert!(perp_infty_grid(&m, &p, &q, &tol()).unwrap().is_none());
        assert!(!perp_infty(&m, &e, &e, &tol()).unwrap());
        assert!(perp_infty_grid(&m, &e, &e, &tol()).unwrap().is_some());
    }

    #[test]
    fn lattice_perp_infty_is_weaker_than_perp() {
        // (1, .2, 0) and (0, .2, 1): normalized sum has norm 1, yet the
        // supports overlap.
        let l = SpaceModel::lattice(3);
        let u = Element::from_reals(&[1.0, 0.2, 0.0]);
        let v = Element::from_reals(&[0.0, 0.2, 1.0]);
        assert!(perp_infty(&l, &u, &v, &tol()).unwrap());
        assert!(!perp(&l, &u, &v, &tol()).unwrap());
        assert!(!perp_infty_abs(&l, &u, &v, &tol()).unwrap());
    }

    #[test]
    fn perp_infty_abs_cases() {
        let m = h2();
        let p = Element::diag(&[1.0, 0.0]);
        let e = m.unit(1);
        let q = &e - &p;
        assert!(perp_infty_abs(&m, &p, &q, &tol()).unwrap());
        assert!(!perp_infty_abs(&m, &e, &e, &tol()).unwrap());
    }

    #[test]
    fn jordan_product_cases() {
        let m = h2();
        let e = m.unit(1);
        assert!(close(&jordan_product(&m, &e, &e).unwrap(), &e, 0.0));
        let p = Element::diag(&[1.0, 0.0]);
        let q = Element::diag(&[0.0, 1.0]);
        assert!(jordan_product(&m, &p, &q).unwrap().frobenius() == 0.0);
        let l = SpaceModel::lattice(2);
        let a = Element::from_reals(&[1.0, 2.0]);
        assert!(matches!(
            jordan_product(&l, &a, &a),
            Err(Error::LatticeUnsupported)
        ));
        let sq = lattice_product(&l, &a, &a).unwrap();
        assert!(close(&sq, &Element::from_reals(&[1.0, 4.0]), 0.0));
    }

    #[test]
    fn unclamped_model_produces_nan_on_rank_deficient_input() {
        // v*v for a rank-one projection has a zero eigenvalue that rounds
        // slightly negative for generic bases.
        let m = SpaceModel::hermitian(3).without_sqrt_clamp();
        let mut found_nan = false;
        let mut rng = crate::rng::stream_rng(1, "unclamped", 0);
        for _ in 0..50 {
            let v = elements::rank_one_psd(&m, 1, &mut rng);
            let a = abs_element(&m, &v).unwrap();
            if !linalg::all_finite(a.coords()) {
                found_nan = true;
                break;
            }
        }
        assert!(found_nan);
    }
}
