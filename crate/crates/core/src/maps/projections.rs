//! Order projections and absolute compatibility, and their transport along
//! `|·|`-preserving maps.

use rand::Rng;

use crate::generators::elements;
use crate::linalg;
use crate::model::{Element, ModelKind, SpaceModel};
use crate::order;
use crate::report::{ClassificationReport, Method, Verdict, Witness};
use crate::rng::SeededRng;
use crate::{Error, Result, Tolerance, ToleranceConfig};

use super::{classify, StarLinearMap};

fn require_interval(model: &SpaceModel, p: &Element, tol: &Tolerance) -> Result<Element> {
    order::require_self_adjoint(model, p)?;
    let e = model.unit(p.level().0);
    let q = &e - p;
    if order::in_cone(model, p, tol) && order::in_cone(model, &q, tol) {
        Ok(q)
    } else {
        Err(Error::OutOfInterval)
    }
}

/// `p ⊥ e − p` for `0 ≤ p ≤ e`.
pub fn is_order_projection(model: &SpaceModel, p: &Element, tol: &Tolerance) -> Result<bool> {
    let q = require_interval(model, p, tol)?;
    order::perp(model, p, &q, tol)
}

/// Algebraic oracle `p² = p` (coordinatewise on the lattice).
pub fn is_idempotent(model: &SpaceModel, p: &Element, tol: &Tolerance) -> bool {
    let sq = match model.kind() {
        ModelKind::Lattice { .. } => Element::new(p.level(), p.coords().component_mul(p.coords())),
        ModelKind::Hermitian { .. } => p.product(p),
    };
    tol.accepts((&sq - p).max_entry(), p.max_entry())
}

/// `|u − v| + |e − u − v| = e` for `u, v ≥ 0`.
pub fn is_abs_compatible(
    model: &SpaceModel,
    u: &Element,
    v: &Element,
    tol: &Tolerance,
) -> Result<bool> {
    Ok(tol.accepts(compatibility_residual(model, u, v, tol)?, 1.0))
}

/// `‖|u − v| + |e − u − v| − e‖`; rejects inputs outside the cone.
pub fn compatibility_residual(
    model: &SpaceModel,
    u: &Element,
    v: &Element,
    tol: &Tolerance,
) -> Result<f64> {
    for x in [u, v] {
        order::require_self_adjoint(model, x)?;
        if !order::in_cone(model, x, tol) {
            return Err(Error::OutsideCone(order::spectral_bounds(model, x).0));
        }
    }
    let e = model.unit(u.level().0);
    let a = order::abs_element(model, &(u - v))?;
    let b = order::abs_element(model, &(&(&e - u) - v))?;
    Ok(order::residual_norm(model, &(&(&a + &b) - &e)))
}

/// `u, v` simultaneously diagonal in `[0, e]` with eigenvalue pairs
/// `(a, b)`, rotated by a random unitary of the model.
fn rotate_diagonal(
    model: &SpaceModel,
    a: &[f64],
    b: &[f64],
    rng: &mut SeededRng,
) -> (Element, Element) {
    match model.kind() {
        ModelKind::Lattice { .. } => (Element::from_reals(a), Element::from_reals(b)),
        ModelKind::Hermitian { .. } => {
            let w = elements::block_unitary(model, rng);
            let conj = |x: &[f64]| {
                let d = Element::diag(x);
                let m = &w * d.coords() * w.adjoint();
                model.clean(Element::new((1, 1), linalg::hermitian_part(&m)))
            };
            (conj(a), conj(b))
        }
    }
}

fn coordinate_count(model: &SpaceModel) -> usize {
    match model.kind() {
        ModelKind::Lattice { dim } => *dim,
        ModelKind::Hermitian { .. } => model.size(),
    }
}

/// A commuting pair in `[0, e]` with `min(a, b) = 0` or `max(a, b) = 1`
/// on every joint eigenvalue, hence absolutely compatible.
pub fn compatible_pair(model: &SpaceModel, rng: &mut SeededRng) -> (Element, Element) {
    let k = coordinate_count(model);
    let mut a = vec![0.0; k];
    let mut b = vec![0.0; k];
    for i in 0..k {
        let x: f64 = rng.random();
        (a[i], b[i]) = match rng.random_range(0..4) {
            0 => (0.0, x),
            1 => (x, 0.0),
            2 => (1.0, x),
            _ => (x, 1.0),
        };
    }
    rotate_diagonal(model, &a, &b, rng)
}

/// A commuting pair in `[0, e]` with independent uniform joint eigenvalues.
pub fn commuting_pair(
    model: &SpaceModel,
    rng: &mut SeededRng,
) -> ((Element, Element), (Vec<f64>, Vec<f64>)) {
    let k = coordinate_count(model);
    let a: Vec<f64> = (0..k).map(|_| rng.random()).collect();
    let b: Vec<f64> = (0..k).map(|_| rng.random()).collect();
    (rotate_diagonal(model, &a, &b, rng), (a, b))
}

fn sampled(
    config: &ToleranceConfig,
    tag: &str,
    structured: Vec<Vec<Element>>,
    mut draw: impl FnMut(&mut SeededRng) -> Vec<Element>,
    mut check: impl FnMut(&[Element]) -> (f64, f64, Witness),
) -> Verdict {
    let tol = config.tol();
    let total = structured.len() + config.samples;
    let mut max_residual = 0.0f64;
    for t in 0..total {
        let xs = if t < structured.len() {
            structured[t].clone()
        } else {
            draw(&mut config.rng(tag, (t - structured.len()) as u64))
        };
        let (r, scale, w) = check(&xs);
        if !tol.accepts(r, scale) {
            return Verdict::Fail {
                method: Method::Sampled { samples: t + 1 },
                witness: Box::new(w),
            };
        }
        max_residual = max_residual.max(r);
    }
    Verdict::Pass {
        method: Method::Sampled { samples: total },
        max_residual,
    }
}

/// Residual of `p` as an order projection: `‖|2p − e| − e‖`, which
/// vanishes iff `p ⊥ e − p`; `NaN` outside `[0, e]`.
fn order_projection_residual(model: &SpaceModel, p: &Element, tol: &Tolerance) -> f64 {
    match require_interval(model, p, tol) {
        Ok(q) => order::perp_residual(model, p, &q).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    }
}

/// For unital `|·|`-preserving `φ`: projections go to order projections,
/// and on the images the order-projection test agrees with `p² = p`.
pub fn op_preservation_suite(
    map: &StarLinearMap,
    config: &ToleranceConfig,
) -> Result<ClassificationReport> {
    let map = map.amplify(1);
    let tol = config.tol();
    if !classify::is_unital(&map, &tol) {
        return Err(Error::NotUnital);
    }
    if !classify::is_abs_preserving(&map, config) {
        return Err(Error::NotAbsPreserving);
    }
    let dom = map.domain();
    let cod = map.codomain();
    let mut structured = vec![vec![dom.zero((1, 1))], vec![dom.unit(1)]];
    let k = coordinate_count(dom);
    if k > 1 {
        let mut d = vec![0.0; k];
        d[0] = 1.0;
        structured.push(vec![match dom.kind() {
            ModelKind::Lattice { .. } => Element::from_reals(&d),
            ModelKind::Hermitian { .. } => Element::diag(&d),
        }]);
    }
    let mut report = ClassificationReport::new(map.label());
    report.insert(
        "order_projections_preserved",
        sampled(
            config,
            "order-projection",
            structured.clone(),
            |rng| vec![elements::random_projection(dom, 1, rng)],
            |xs| {
                let y = map.apply(&xs[0]);
                let r = order_projection_residual(cod, &y, &tol);
                (
                    r,
                    1.0,
                    Witness::new("image of a projection is not an order projection", r)
                        .with_element(dom, &xs[0])
                        .with_element(cod, &y),
                )
            },
        ),
    );
    report.insert(
        "order_projection_matches_idempotent",
        sampled(
            config,
            "order-projection-oracle",
            structured,
            |rng| {
                let p = elements::random_projection(dom, 1, rng);
                let s: f64 = rng.random_range(0.1..0.9);
                vec![p.clone(), p.scale(s)]
            },
            |xs| {
                for x in xs {
                    let y = map.apply(x);
                    let a = is_order_projection(cod, &y, &tol).unwrap_or(false);
                    let b = is_idempotent(cod, &y, &tol);
                    if a != b {
                        let w = Witness::new(format!("order projection {a}, idempotent {b}"), 1.0)
                            .with_element(cod, &y);
                        return (1.0, 0.0, w);
                    }
                }
                (0.0, 1.0, Witness::new("", 0.0))
            },
        ),
    );
    report.add_level(1);
    Ok(report)
}

/// For `|·|`-preserving `φ` with `φ(e)` an order projection: absolutely
/// compatible pairs have absolutely compatible images.
pub fn abs_compat_preservation_suite(
    map: &StarLinearMap,
    config: &ToleranceConfig,
) -> Result<ClassificationReport> {
    let map = map.amplify(1);
    let tol = config.tol();
    if !classify::is_abs_preserving(&map, config) {
        return Err(Error::NotAbsPreserving);
    }
    let dom = map.domain();
    let cod = map.codomain();
    let fe = map.apply(&dom.unit(1));
    if !is_order_projection(cod, &fe, &tol).unwrap_or(false) {
        return Err(Error::NotOrderProjection);
    }
    let k = coordinate_count(dom);
    let mut a = vec![0.0; k];
    a[0] = 1.0;
    let b = vec![1.0; k];
    let pair = match dom.kind() {
        ModelKind::Lattice { .. } => vec![Element::from_reals(&a), Element::from_reals(&b)],
        ModelKind::Hermitian { .. } => vec![Element::diag(&a), Element::diag(&b)],
    };
    let mut report = ClassificationReport::new(map.label());
    report.insert(
        "abs_compatibility_preserved",
        sampled(
            config,
            "abs-compatibility",
            vec![pair],
            |rng| {
                let (u, v) = compatible_pair(dom, rng);
                vec![u, v]
            },
            |xs| {
                let (fu, fv) = (map.apply(&xs[0]), map.apply(&xs[1]));
                let r = compatibility_residual(cod, &fu, &fv, &tol).unwrap_or(f64::NAN);
                (
                    r,
                    1.0,
                    Witness::new("images of a compatible pair are not compatible", r)
                        .with_element(dom, &xs[0])
                        .with_element(dom, &xs[1]),
                )
            },
        ),
    );
    report.notes.push(format!(
        "image of the unit is {}",
        if classify::is_unital(&map, &tol) {
            "the unit"
        } else {
            "a proper order projection"
        }
    ));
    report.add_level(1);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn order_projection_cases() {
        let m = SpaceModel::hermitian(2);
        assert!(is_order_projection(&m, &m.zero((1, 1)), &tol()).unwrap());
        assert!(is_order_projection(&m, &m.unit(1), &tol()).unwrap());
        assert!(is_order_projection(&m, &Element::diag(&[1.0, 0.0]), &tol()).unwrap());
        assert!(!is_order_projection(&m, &m.unit(1).scale(0.5), &tol()).unwrap());
        assert!(matches!(
            is_order_projection(&m, &m.unit(1).scale(2.0), &tol()),
            Err(Error::OutOfInterval)
        ));
    }

    #[test]
    fn compatibility_cases() {
        let m = SpaceModel::hermitian(2);
        let u = Element::diag(&[1.0, 0.0]);
        let v = Element::diag(&[1.0, 1.0]);
        assert!(is_abs_compatible(&m, &u, &v, &tol()).unwrap());
        let h = m.unit(1).scale(0.5);
        assert!(!is_abs_compatible(&m, &h, &h, &tol()).unwrap());
        assert!(is_abs_compatible(&m, &m.unit(1).scale(-1.0), &h, &tol()).is_err());
    }

    #[test]
    fn identity_preserves_projections_and_compatibility() {
        let m = SpaceModel::hermitian(3);
        let id = StarLinearMap::identity(&m);
        let c = ToleranceConfig::default().with_samples(30);
        let r = op_preservation_suite(&id, &c).unwrap();
        assert!(
            r.verdicts.values().all(Verdict::passed),
            "{}",
            r.render_text()
        );
        let r = abs_compat_preservation_suite(&id, &c).unwrap();
        assert!(
            r.verdicts.values().all(Verdict::passed),
            "{}",
            r.render_text()
        );
    }

    #[test]
    fn halving_is_rejected() {
        let m = SpaceModel::hermitian(2);
        let half = StarLinearMap::from_fn("half", m.clone(), m, |x| x.scale(0.5)).unwrap();
        let c = ToleranceConfig::default().with_samples(10);
        assert!(matches!(
            op_preservation_suite(&half, &c),
            Err(Error::NotUnital)
        ));
        assert!(matches!(
            abs_compat_preservation_suite(&half, &c),
            Err(Error::NotOrderProjection)
        ));
    }
}
