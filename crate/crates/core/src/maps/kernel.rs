//! Kernels, positive preimages and quotients of `|·|`-preserving maps.

use nalgebra::DVector;
use rand::Rng;

use crate::axioms::{self, AbsoluteOrderModel, LevelSpace};
use crate::generators::elements;
use crate::linalg::{self, RMatrix};
use crate::model::{Element, SpaceModel};
use crate::order;
use crate::report::{ClassificationReport, Equivalence, Method, Verdict, Witness};
use crate::rng::SeededRng;
use crate::{Error, Result, Tolerance, ToleranceConfig};

use super::{classify, StarLinearMap, RANK_TOL};

/// Self-adjoint kernel of a `|·|`-preserving map.
#[derive(Clone, Debug)]
pub struct KernelData {
    /// Orthonormal basis of `ker(φ) ∩ V_sa`.
    pub basis: Vec<Element>,
    /// Nonzero parts `w⁺, w⁻` of the basis elements; they span `ker⁺(φ)`.
    pub positive_generators: Vec<Element>,
    /// Rank of the span of the positive generators.
    pub generated_rank: usize,
    /// Largest `‖φ(w±)‖` over the basis.
    pub parts_residual: f64,
}

impl KernelData {
    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// `ker = ker⁺ − ker⁺` at the level of ranks.
    pub fn generated(&self) -> bool {
        self.generated_rank == self.basis.len()
    }

    /// Sum of the normalized positive generators: a positive kernel
    /// element whose support contains every other.
    pub fn dominant(&self, model: &SpaceModel) -> Element {
        let mut g = model.zero((1, 1));
        for p in &self.positive_generators {
            let s = order::residual_norm(model, p);
            g = &g + &p.scale(1.0 / s);
        }
        g
    }
}

fn require_abs_preserving(map: &StarLinearMap, config: &ToleranceConfig) -> Result<()> {
    if classify::is_abs_preserving(&map.amplify(1), config) {
        Ok(())
    } else {
        Err(Error::NotAbsPreserving)
    }
}

/// Kernel basis and positive generators; fails with `NotAbsPreserving`
/// unless the map passes the `|·|`-preservation check first.
pub fn kernel_data(map: &StarLinearMap, config: &ToleranceConfig) -> Result<KernelData> {
    require_abs_preserving(map, config)?;
    Ok(kernel_of(map))
}

fn kernel_of(map: &StarLinearMap) -> KernelData {
    let dom = map.domain();
    let cod = map.codomain();
    let (_, null) = linalg::real_rank_and_kernel(&map.sa_matrix(), RANK_TOL);
    let basis: Vec<Element> = null.iter().map(|x| dom.from_sa_coords(1, x)).collect();
    let mut positive_generators = Vec::new();
    let mut parts_residual = 0.0f64;
    for w in &basis {
        let Ok((p, q)) = order::pos_neg_parts(dom, w) else {
            parts_residual = f64::NAN;
            continue;
        };
        for part in [p, q] {
            let r = order::residual_norm(cod, &map.apply(&part));
            parts_residual = if r.is_nan() { r } else { parts_residual.max(r) };
            if order::residual_norm(dom, &part) > 1e-12 {
                positive_generators.push(part);
            }
        }
    }
    let generated_rank = if positive_generators.is_empty() {
        0
    } else {
        let cols: Vec<DVector<f64>> = positive_generators
            .iter()
            .map(|p| dom.sa_coords(p))
            .collect();
        linalg::real_rank_and_kernel(&RMatrix::from_columns(&cols), RANK_TOL).0
    };
    KernelData {
        basis,
        positive_generators,
        generated_rank,
        parts_residual,
    }
}

fn exact(ok: bool, residual: f64, description: &str) -> Verdict {
    if ok {
        Verdict::Pass {
            method: Method::Exact,
            max_residual: residual,
        }
    } else {
        Verdict::Fail {
            method: Method::Exact,
            witness: Box::new(Witness::new(description, residual)),
        }
    }
}

/// Runs `check` on `samples` seeded trials; the first rejected trial is
/// the witness.
fn sampled(
    config: &ToleranceConfig,
    tag: &str,
    samples: usize,
    mut check: impl FnMut(usize, &mut SeededRng) -> (f64, f64, Witness),
) -> Verdict {
    let tol = config.tol();
    let mut max_residual = 0.0f64;
    for t in 0..samples {
        let mut rng = config.rng(tag, t as u64);
        let (r, scale, w) = check(t, &mut rng);
        if !tol.accepts(r, scale) {
            return Verdict::Fail {
                method: Method::Sampled { samples: t + 1 },
                witness: Box::new(w),
            };
        }
        max_residual = max_residual.max(r);
    }
    Verdict::Pass {
        method: Method::Sampled { samples },
        max_residual,
    }
}

fn random_kernel_element(data: &KernelData, model: &SpaceModel, rng: &mut SeededRng) -> Element {
    let mut w = model.zero((1, 1));
    for b in &data.basis {
        let a: f64 = rng.random_range(-1.0..1.0);
        w = &w + &b.scale(a);
    }
    w
}

/// Kernel structure, order-ideal property, and the injectivity and
/// surjectivity criteria, for a `|·|`-preserving map.
pub fn kernel_suite(map: &StarLinearMap, config: &ToleranceConfig) -> Result<ClassificationReport> {
    let data = kernel_data(map, config)?;
    let dom = map.domain();
    let cod = map.codomain();
    let tol = config.tol();
    let mut report = ClassificationReport::new(map.label());
    report.insert(
        "abs_preserving@1",
        classify::abs_preserving_verdict(&map.amplify(1), config),
    );
    report.notes.push(format!(
        "kernel dimension {}, {} positive generators",
        data.basis.len(),
        data.positive_generators.len()
    ));

    report.insert(
        "kernel_parts_in_kernel",
        exact(
            tol.accepts(data.parts_residual, 1.0),
            data.parts_residual,
            "a part w± of a kernel element leaves the kernel",
        ),
    );
    report.insert(
        "kernel_generated_by_positive_part",
        exact(
            data.generated(),
            (data.basis.len() - data.generated_rank.min(data.basis.len())) as f64,
            "positive kernel elements span less than the kernel",
        ),
    );

    let scale_map = 1.0 + map.action().amax();
    let abs_samples = if data.is_trivial() { 0 } else { config.samples };
    report.insert(
        "kernel_abs_closed",
        sampled(config, "kernel-abs", abs_samples, |_, rng| {
            let w = random_kernel_element(&data, dom, rng);
            let r = order::abs_element(dom, &w)
                .map_or(f64::NAN, |a| order::residual_norm(cod, &map.apply(&a)));
            let scale = scale_map * order::residual_norm(dom, &w);
            (
                r,
                scale,
                Witness::new("|w| left the kernel", r).with_element(dom, &w),
            )
        }),
    );

    let ideal_samples = if data.positive_generators.is_empty() {
        0
    } else {
        config.samples
    };
    report.insert(
        "kernel_order_ideal",
        sampled(config, "kernel-ideal", ideal_samples, |_, rng| {
            let mut w = dom.zero((1, 1));
            for g in &data.positive_generators {
                let a: f64 = rng.random_range(0.0..1.0);
                w = &w + &g.scale(a);
            }
            let v = elements::minorant(dom, &w, rng);
            let r = order::residual_norm(cod, &map.apply(&v));
            let scale = scale_map * order::residual_norm(dom, &w);
            (
                r,
                scale,
                Witness::new("a minorant of a positive kernel element left the kernel", r)
                    .with_element(dom, &w)
                    .with_element(dom, &v),
            )
        }),
    );

    report.push(Equivalence::new(
        "injective iff no nonzero positive kernel",
        vec![
            ("injective".into(), map.is_injective()),
            (
                "positive kernel is zero".into(),
                data.positive_generators.is_empty(),
            ),
        ],
    ));

    let preimages = positive_preimage_verdict(map, config);
    report.push(Equivalence::new(
        "surjective iff positive cone maps onto positive cone",
        vec![
            ("surjective".into(), map.is_surjective()),
            ("positive_preimages".into(), preimages.passed()),
        ],
    ));
    report.insert("positive_preimages", preimages);
    report.add_level(1);
    Ok(report)
}

/// Every sampled `w ≥ 0` in the codomain has a positive preimage: a
/// preimage `v` through the pseudo-inverse, replaced by `v⁺`. The
/// structured probe is the codomain unit.
pub fn positive_preimage_verdict(map: &StarLinearMap, config: &ToleranceConfig) -> Verdict {
    let dom = map.domain();
    let cod = map.codomain();
    let pinv = map
        .sa_matrix()
        .pseudo_inverse(RANK_TOL)
        .unwrap_or_else(|_| RMatrix::from_element(dom.sa_dim(), cod.sa_dim(), f64::NAN));
    sampled(config, "positive-preimage", config.samples + 1, |t, rng| {
        let w = if t == 0 {
            cod.unit(1)
        } else if t % 2 == 1 {
            elements::rank_one_psd(cod, 1, rng)
        } else {
            elements::random_psd(cod, 1, rng)
        };
        let v = dom.from_sa_coords(1, &(&pinv * cod.sa_coords(&w)));
        let r = order::pos_neg_parts(dom, &v).map_or(f64::NAN, |(p, _)| {
            order::residual_norm(cod, &(&map.apply(&p) - &w))
        });
        let scale = order::residual_norm(cod, &w);
        (
            r,
            scale,
            Witness::new("positive element without a positive preimage", r).with_element(cod, &w),
        )
    })
}

/// `V / ker(φ)` realized on the orthogonal complement of the kernel in
/// self-adjoint coordinates.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    model: SpaceModel,
    label: String,
    projector: RMatrix,
    dominant: Element,
    kernel: KernelData,
    base: LevelSpace,
}

impl QuotientSpace {
    pub fn kernel(&self) -> &KernelData {
        &self.kernel
    }

    pub fn dimension(&self) -> usize {
        self.model.sa_dim() - self.kernel.basis.len()
    }

    /// Representative of `[v]` in the complement.
    pub fn project(&self, v: &Element) -> Element {
        self.model
            .from_sa_coords(1, &(&self.projector * self.model.sa_coords(v)))
    }

    /// A positive representative `r + s·g` of `[r]`, if one exists on the
    /// ladder `s ∈ {0, ‖r‖·10^j : j = -1..3}`.
    pub fn positive_representative(&self, r: &Element, tol: &Tolerance) -> Option<Element> {
        let n = order::residual_norm(&self.model, r);
        let ladder = std::iter::once(0.0).chain((-1..=3).map(|j| n * 10f64.powi(j)));
        for s in ladder {
            let x = r + &self.dominant.scale(s);
            if order::in_cone(&self.model, &x, tol) {
                return Some(x);
            }
            if self.kernel.positive_generators.is_empty() {
                break;
            }
        }
        None
    }
}

impl AbsoluteOrderModel for QuotientSpace {
    fn describe(&self) -> String {
        format!("{} / ker({})", self.model, self.label)
    }

    fn witness_model(&self) -> &SpaceModel {
        &self.model
    }

    fn abs(&self, v: &Element) -> Result<Element> {
        Ok(self.project(&order::abs_element(&self.model, v)?))
    }

    fn in_cone(&self, v: &Element, tol: &Tolerance) -> bool {
        self.positive_representative(&self.project(v), tol)
            .is_some()
    }

    fn size(&self, v: &Element) -> f64 {
        order::residual_norm(&self.model, &self.project(v))
    }

    fn sample_self_adjoint(&self, rng: &mut SeededRng) -> Element {
        self.project(&self.base.sample_self_adjoint(rng))
    }

    fn sample_cone(&self, rng: &mut SeededRng) -> Element {
        self.project(&self.base.sample_cone(rng))
    }

    fn sample_orthogonal_triple(&self, rng: &mut SeededRng) -> (Element, Element, Element) {
        let (u, v, w) = self.base.sample_orthogonal_triple(rng);
        (self.project(&u), self.project(&v), self.project(&w))
    }

    fn sample_minorant(&self, v: &Element, rng: &mut SeededRng) -> Element {
        let rep = self
            .positive_representative(v, &Tolerance::default())
            .unwrap_or_else(|| v.clone());
        self.project(&elements::minorant(&self.model, &rep, rng))
    }
}

/// The quotient by the kernel of a `|·|`-preserving map.
pub fn quotient_model(map: &StarLinearMap, config: &ToleranceConfig) -> Result<QuotientSpace> {
    require_abs_preserving(map, config)?;
    let model = map.domain().clone();
    let kernel = kernel_of(map);
    let d = model.sa_dim();
    let mut projector = RMatrix::identity(d, d);
    for b in &kernel.basis {
        let x = model.sa_coords(b);
        projector -= &x * x.transpose();
    }
    Ok(QuotientSpace {
        dominant: kernel.dominant(&model),
        base: LevelSpace::new(model.clone(), 1)?,
        label: map.label().to_string(),
        model,
        projector,
        kernel,
    })
}

/// Axioms on the quotient, independence of `|[v]|` from the representative,
/// and bijectivity and `|·|`-preservation of the induced map onto `φ(V)`.
pub fn quotient_suite(
    map: &StarLinearMap,
    config: &ToleranceConfig,
) -> Result<ClassificationReport> {
    let q = quotient_model(map, config)?;
    let dom = map.domain();
    let cod = map.codomain();
    let mut report = ClassificationReport::new(map.label());
    report.notes.push(format!(
        "quotient dimension {} (kernel dimension {})",
        q.dimension(),
        q.kernel.basis.len()
    ));
    report.insert(
        "quotient_axioms",
        axioms::check_absolutely_ordered_axioms(&q, config).verdict(),
    );

    let wd_samples = if q.kernel.is_trivial() {
        0
    } else {
        config.samples
    };
    report.insert(
        "quotient_abs_well_defined",
        sampled(config, "quotient-well-defined", wd_samples, |_, rng| {
            let v = q.sample_self_adjoint(rng);
            let k = random_kernel_element(&q.kernel, dom, rng);
            let r = match (q.abs(&(&v + &k)), q.abs(&v)) {
                (Ok(a), Ok(b)) => order::residual_norm(dom, &(&a - &b)),
                _ => f64::NAN,
            };
            let scale = order::residual_norm(dom, &v) + order::residual_norm(dom, &k);
            (
                r,
                scale,
                Witness::new("|[v + k]| differs from |[v]|", r)
                    .with_element(dom, &v)
                    .with_element(dom, &k),
            )
        }),
    );

    let complement: Vec<DVector<f64>> = dom
        .sa_basis(1)
        .iter()
        .map(|b| q.projector.clone() * dom.sa_coords(b))
        .collect();
    let (dim_complement, _) =
        linalg::real_rank_and_kernel(&RMatrix::from_columns(&complement), RANK_TOL);
    let induced = map.sa_matrix() * RMatrix::from_columns(&complement);
    let (rank_induced, _) = linalg::real_rank_and_kernel(&induced, RANK_TOL);
    let image_rank = map.rank();
    report.insert(
        "induced_map_bijective",
        exact(
            rank_induced == dim_complement && rank_induced == image_rank,
            (dim_complement.max(image_rank) - rank_induced.min(dim_complement)) as f64,
            "induced map on the quotient is not a bijection onto the image",
        ),
    );

    report.insert(
        "induced_map_abs_preserving",
        sampled(config, "quotient-induced-abs", config.samples, |_, rng| {
            let v = q.sample_self_adjoint(rng);
            let r = match (q.abs(&v), order::abs_element(cod, &map.apply(&v))) {
                (Ok(a), Ok(b)) => order::residual_norm(cod, &(&map.apply(&a) - &b)),
                _ => f64::NAN,
            };
            let scale = order::residual_norm(dom, &v) * (1.0 + map.action().amax());
            (
                r,
                scale,
                Witness::new("induced map does not preserve |·|", r).with_element(dom, &v),
            )
        }),
    );
    report.add_level(1);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ToleranceConfig {
        ToleranceConfig::default().with_samples(40).with_seed(5)
    }

    /// `a ⊕ b ↦ a` from `hermitian:2+2` to `hermitian:2`.
    fn compression() -> StarLinearMap {
        let dom = SpaceModel::hermitian_blocks(&[2, 2]);
        let cod = SpaceModel::hermitian(2);
        StarLinearMap::from_fn("compression", dom, cod, |x| {
            Element::new((1, 1), x.coords().view((0, 0), (2, 2)).into_owned())
        })
        .unwrap()
    }

    #[test]
    fn injective_map_has_trivial_kernel() {
        let id = StarLinearMap::identity(&SpaceModel::hermitian(2));
        let k = kernel_data(&id, &config()).unwrap();
        assert!(k.is_trivial() && k.positive_generators.is_empty());
        let r = kernel_suite(&id, &config()).unwrap();
        assert!(r.consistent(), "{}", r.render_text());
        let q = quotient_suite(&id, &config()).unwrap();
        assert!(
            q.verdicts.values().all(Verdict::passed),
            "{}",
            q.render_text()
        );
    }

    #[test]
    fn compression_kernel_is_second_block() {
        let c = compression();
        let k = kernel_data(&c, &config()).unwrap();
        assert_eq!(k.basis.len(), 4);
        for b in &k.basis {
            assert!(b
                .coords()
                .view((0, 0), (2, 2))
                .iter()
                .all(|z| z.norm() < 1e-12));
        }
        let r = kernel_suite(&c, &config()).unwrap();
        assert!(r.consistent(), "{}", r.render_text());
        assert!(
            r.verdicts.values().all(Verdict::passed),
            "{}",
            r.render_text()
        );
    }

    #[test]
    fn compression_quotient_is_first_block() {
        let c = compression();
        let q = quotient_model(&c, &config()).unwrap();
        assert_eq!(q.dimension(), 4);
        let r = quotient_suite(&c, &config()).unwrap();
        assert!(
            r.verdicts.values().all(Verdict::passed),
            "{}",
            r.render_text()
        );
    }

    #[test]
    fn non_preserver_is_rejected() {
        let m = SpaceModel::hermitian(2);
        let neg = StarLinearMap::from_fn("neg", m.clone(), m, |x| x.scale(-1.0)).unwrap();
        assert!(matches!(
            kernel_data(&neg, &config()),
            Err(Error::NotAbsPreserving)
        ));
        assert!(matches!(
            quotient_model(&neg, &config()),
            Err(Error::NotAbsPreserving)
        ));
    }

    #[test]
    fn corner_embedding_is_not_onto_the_cone() {
        let dom = SpaceModel::hermitian(2);
        let cod = SpaceModel::hermitian(3);
        let f = StarLinearMap::from_fn("corner", dom, cod, |x| {
            let mut y = linalg::CMatrix::zeros(3, 3);
            y.view_mut((0, 0), (2, 2)).copy_from(x.coords());
            Element::new((1, 1), y)
        })
        .unwrap();
        let r = kernel_suite(&f, &config()).unwrap();
        assert!(r.consistent(), "{}", r.render_text());
        assert!(!r.passed("positive_preimages"));
    }
}
