//! Property classifiers for star-linear maps.
//!
//! Positivity, isometry, order isometry, `|·|`-preservation and the
//! orthogonal-decomposition conditions are sampled: structured probes
//! (`e`, the Choi element, matrix units) first, then seeded random draws.
//! Unitality, Jordan and multiplicative checks and star-linearity are exact.

use std::cell::RefCell;
use std::collections::BTreeMap;

use crate::generators::elements;
use crate::linalg::{self, Spectrum};
use crate::model::{Element, ModelKind, SpaceModel};
use crate::order;
use crate::report::{ClassificationReport, Method, Verdict, Witness};
use crate::rng::SeededRng;
use crate::{Tolerance, ToleranceConfig};

use super::StarLinearMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Unital,
    Positive,
    Isometry,
    OrderIsometry,
    AbsPreserving,
    /// `φ(u) ⊥ φ(v)` for `u ⊥ v`, sampled on `(v⁺, v⁻)`.
    PreservesOrthogonality,
    /// `φ(v⁺) = φ(v)⁺`
    PositivePart,
    /// `φ(v⁻) = φ(v)⁻`
    NegativePart,
    Jordan,
    /// Level 1 only; multiplicativity at level 1 carries to all levels.
    Multiplicative,
    StarLinear,
    Bijective,
}

impl Property {
    pub const LEVELLED: [Property; 9] = [
        Property::Unital,
        Property::Positive,
        Property::Isometry,
        Property::OrderIsometry,
        Property::AbsPreserving,
        Property::PreservesOrthogonality,
        Property::PositivePart,
        Property::NegativePart,
        Property::Jordan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Unital => "unital",
            Property::Positive => "positive",
            Property::Isometry => "isometry",
            Property::OrderIsometry => "order_isometry",
            Property::AbsPreserving => "abs_preserving",
            Property::PreservesOrthogonality => "preserves_orthogonality",
            Property::PositivePart => "positive_part",
            Property::NegativePart => "negative_part",
            Property::Jordan => "jordan",
            Property::Multiplicative => "multiplicative",
            Property::StarLinear => "star_linear",
            Property::Bijective => "bijective",
        }
    }

    pub fn is_levelled(self) -> bool {
        !matches!(
            self,
            Property::Multiplicative | Property::StarLinear | Property::Bijective
        )
    }

    /// Report key: `name@n` for levelled properties, `name` otherwise.
    pub fn key(self, level: usize) -> String {
        if self.is_levelled() {
            crate::report::at_level(self.name(), level)
        } else {
            self.name().to_string()
        }
    }
}

/// Memoized verdicts for one map and configuration.
pub struct Profile<'a> {
    map: &'a StarLinearMap,
    config: &'a ToleranceConfig,
    cache: RefCell<BTreeMap<String, Verdict>>,
    levels: RefCell<Vec<usize>>,
}

impl<'a> Profile<'a> {
    pub fn new(map: &'a StarLinearMap, config: &'a ToleranceConfig) -> Self {
        Self {
            map,
            config,
            cache: RefCell::new(BTreeMap::new()),
            levels: RefCell::new(Vec::new()),
        }
    }

    pub fn map(&self) -> &StarLinearMap {
        self.map
    }

    pub fn config(&self) -> &ToleranceConfig {
        self.config
    }

    pub fn verdict(&self, p: Property, level: usize) -> Verdict {
        let key = p.key(level);
        if let Some(v) = self.cache.borrow().get(&key) {
            return v.clone();
        }
        let v = if p.is_levelled() && level > 1 && !self.map.supports_levels() {
            Verdict::Untested {
                reason: "lattice models have no matrix levels".into(),
            }
        } else {
            let m = self.map.amplify(level);
            if p.is_levelled() {
                let mut levels = self.levels.borrow_mut();
                if !levels.contains(&level) {
                    levels.push(level);
                }
            }
            compute(p, &m, self.config)
        };
        self.cache.borrow_mut().insert(key, v.clone());
        v
    }

    pub fn holds(&self, p: Property, level: usize) -> bool {
        self.verdict(p, level).passed()
    }

    /// Copy every verdict computed so far into `report`.
    pub fn record_into(&self, report: &mut ClassificationReport) {
        for (k, v) in self.cache.borrow().iter() {
            report.insert(k.clone(), v.clone());
        }
        for &l in self.levels.borrow().iter() {
            report.add_level(l);
        }
    }

    /// Report with every computed verdict.
    pub fn report(&self) -> ClassificationReport {
        let mut r = ClassificationReport::new(self.map.label());
        self.record_into(&mut r);
        r
    }
}

fn compute(p: Property, map: &StarLinearMap, config: &ToleranceConfig) -> Verdict {
    let tol = config.tol();
    match p {
        Property::Unital => unital_verdict(map, &tol),
        Property::Positive => positive_verdict(map, config),
        Property::Isometry => isometry_verdict(map, config),
        Property::OrderIsometry => order_isometry_verdict(map, config),
        Property::AbsPreserving => abs_preserving_verdict(map, config),
        Property::PreservesOrthogonality => orthogonality_verdict(map, config),
        Property::PositivePart => part_verdict(map, config, true),
        Property::NegativePart => part_verdict(map, config, false),
        Property::Jordan => jordan_verdict(map, &tol),
        Property::Multiplicative => multiplicative_verdict(map, &tol),
        Property::StarLinear => map.star_linear_verdict(&tol),
        Property::Bijective => bijective_verdict(map),
    }
}

/// Full per-level classification up to `levels` (level 1 only for maps
/// touching a lattice model).
pub fn classify(
    map: &StarLinearMap,
    levels: usize,
    config: &ToleranceConfig,
) -> ClassificationReport {
    let profile = Profile::new(map, config);
    let top = if map.supports_levels() {
        levels.max(1)
    } else {
        1
    };
    profile.verdict(Property::StarLinear, 1);
    profile.verdict(Property::Bijective, 1);
    profile.verdict(Property::Multiplicative, 1);
    for n in 1..=top {
        for p in [
            Property::Unital,
            Property::Positive,
            Property::Isometry,
            Property::OrderIsometry,
            Property::AbsPreserving,
            Property::Jordan,
        ] {
            profile.verdict(p, n);
        }
    }
    profile.report()
}

// ---------------------------------------------------------------- probes

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ProbeSet {
    SelfAdjoint,
    Cone,
}

/// Deterministic probes tried before random draws.
pub(crate) fn structured_probes(model: &SpaceModel, n: usize, set: ProbeSet) -> Vec<Element> {
    let mut out = vec![model.unit(n)];
    if let Some(choi) = elements::choi_element(model, n) {
        out.push(choi);
    }
    let size = model.payload_shape((n, n)).map(|s| s.0).unwrap_or(1);
    if size > 1 {
        let mut x = model.zero((n, n));
        let p = x.clone().into_coords();
        let mut p = p;
        p[(0, 0)] = linalg::c(1.0, 0.0);
        x = Element::new(x.level(), p);
        if set == ProbeSet::SelfAdjoint {
            let mut q = x.clone().into_coords();
            let last = if model.is_lattice() {
                (size - 1, 0)
            } else {
                (size - 1, size - 1)
            };
            q[last] = linalg::c(-1.0, 0.0);
            out.push(Element::new(x.level(), q));
        }
        out.push(x);
    }
    out
}

pub(crate) fn random_probe(
    model: &SpaceModel,
    n: usize,
    set: ProbeSet,
    t: usize,
    rng: &mut SeededRng,
) -> Element {
    match set {
        ProbeSet::SelfAdjoint => match t % 6 {
            0 => elements::gaussian_self_adjoint(model, n, rng),
            1 => {
                let a = elements::rank_one_psd(model, n, rng);
                let b = elements::rank_one_psd(model, n, rng);
                &a - &b
            }
            2 => elements::random_psd(model, n, rng),
            3 => {
                let (u, v) = elements::orthogonal_pair(model, n, rng);
                &u - &v
            }
            4 => -elements::rank_one_psd(model, n, rng),
            _ => {
                let p = elements::random_projection(model, n, rng);
                &(&p * 2.0) - &model.unit(n)
            }
        },
        ProbeSet::Cone => match t % 5 {
            0 => elements::rank_one_psd(model, n, rng),
            1 => elements::random_psd(model, n, rng),
            2 => elements::random_projection(model, n, rng),
            3 => elements::orthogonal_pair(model, n, rng).0,
            _ => elements::random_contraction(model, n, rng),
        },
    }
}

/// Result of evaluating a property on one probe.
pub(crate) struct Outcome {
    pub residual: f64,
    pub scale: f64,
    pub image: Option<Element>,
    pub min_eigenvalue: Option<f64>,
}

impl Outcome {
    fn nan() -> Self {
        Self {
            residual: f64::NAN,
            scale: 0.0,
            image: None,
            min_eigenvalue: None,
        }
    }
}

/// Negative part of a lower spectral bound, NaN-preserving.
fn neg(lo: f64) -> f64 {
    if lo.is_nan() {
        f64::NAN
    } else {
        (-lo).max(0.0)
    }
}

fn rank(model: &SpaceModel, v: &Element) -> usize {
    let scale = v.max_entry();
    let cut = 1e-9 * scale.max(f64::MIN_POSITIVE);
    match model.kind() {
        ModelKind::Lattice { .. } => v.coords().iter().filter(|z| z.norm() > cut).count(),
        ModelKind::Hermitian { .. } => linalg::eigenvalues(v.coords())
            .iter()
            .filter(|l| l.abs() > cut)
            .count(),
    }
}

/// Candidates simpler than `v`: spectral rank-one components (largest
/// first) and the positive and negative parts.
fn simpler_candidates(model: &SpaceModel, v: &Element, set: ProbeSet) -> Vec<Element> {
    let mut out = Vec::new();
    match model.kind() {
        ModelKind::Lattice { .. } => {
            let mut idx: Vec<usize> = (0..v.coords().nrows()).collect();
            idx.sort_by(|&i, &j| {
                v.coords()[(j, 0)]
                    .re
                    .abs()
                    .total_cmp(&v.coords()[(i, 0)].re.abs())
            });
            for i in idx {
                let mut p = v.coords() * linalg::c(0.0, 0.0);
                p[(i, 0)] = v.coords()[(i, 0)];
                out.push(Element::new(v.level(), p));
            }
        }
        ModelKind::Hermitian { .. } => {
            let Some(spec) = Spectrum::of(v.coords()) else {
                return out;
            };
            let mut idx: Vec<usize> = (0..spec.values.len()).collect();
            idx.sort_by(|&i, &j| spec.values[j].abs().total_cmp(&spec.values[i].abs()));
            for i in idx {
                let l = spec.values[i];
                if set == ProbeSet::Cone && l <= 0.0 {
                    continue;
                }
                let p = spec.projection([i]) * linalg::c(l, 0.0);
                out.push(model.clean(Element::new(v.level(), linalg::hermitian_part(&p))));
            }
        }
    }
    if set == ProbeSet::SelfAdjoint {
        if let Ok((p, q)) = order::pos_neg_parts(model, v) {
            out.push(p);
            out.push(-q);
        }
    }
    out
}

/// Moves a failing probe towards simpler failing elements, then
/// normalizes it. Every accepted step is itself a failing element.
fn shrink(
    model: &SpaceModel,
    set: ProbeSet,
    start: Element,
    fails: &mut dyn FnMut(&Element) -> bool,
) -> Element {
    let mut cur = start;
    for _ in 0..4 {
        let r = rank(model, &cur);
        let mut moved = false;
        for s in simpler_candidates(model, &cur, set) {
            if rank(model, &s) >= r {
                continue;
            }
            for t in [0.0, 0.25, 0.5] {
                let x = &s + &(&(&cur - &s) * t);
                if fails(&x) {
                    cur = x;
                    moved = true;
                    break;
                }
            }
            if moved {
                break;
            }
        }
        if !moved {
            break;
        }
    }
    let n = order::residual_norm(model, &cur);
    if n.is_finite() && n > 0.0 {
        let x = cur.scale(1.0 / n);
        if fails(&x) {
            cur = x;
        }
    }
    cur
}

/// Runs `eval` over structured probes and `config.samples` random draws at
/// the map's level; the first failure becomes the witness.
pub(crate) fn sampled_verdict(
    map: &StarLinearMap,
    config: &ToleranceConfig,
    tag: &str,
    set: ProbeSet,
    description: &str,
    mut eval: impl FnMut(&Element) -> Outcome,
) -> Verdict {
    let n = map.level();
    let model = map.domain();
    let tol = config.tol();
    let structured = structured_probes(model, n, set);
    let total = structured.len() + config.samples;
    let mut max_residual = 0.0f64;
    for idx in 0..total {
        let (x, is_structured) = if idx < structured.len() {
            (structured[idx].clone(), true)
        } else {
            let t = idx - structured.len();
            let mut rng = config.rng(&format!("{tag}@{n}"), t as u64);
            (random_probe(model, n, set, t, &mut rng), false)
        };
        let out = eval(&x);
        if tol.accepts(out.residual, out.scale) {
            max_residual = max_residual.max(out.residual);
            continue;
        }
        let w = if is_structured {
            x
        } else {
            let mut fails = |y: &Element| {
                let o = eval(y);
                !tol.accepts(o.residual, o.scale)
            };
            shrink(model, set, x, &mut fails)
        };
        let o = eval(&w);
        let mut witness = Witness::new(format!("level {n}: {description}"), o.residual)
            .with_element(model, &w)
            .with_min_eigenvalue(o.min_eigenvalue);
        if let Some(img) = &o.image {
            witness = witness.with_element(map.codomain(), img);
        }
        return Verdict::Fail {
            method: Method::Sampled { samples: idx + 1 },
            witness: Box::new(witness),
        };
    }
    Verdict::Pass {
        method: Method::Sampled { samples: total },
        max_residual,
    }
}

/// Self-adjointness gate for images: `Some(outcome)` when `y` is not
/// self-adjoint and the probe must fail.
fn non_self_adjoint(cod: &SpaceModel, y: &Element, tol: &Tolerance) -> Option<Outcome> {
    let defect = order::self_adjoint_defect(cod, y);
    if tol.accepts(defect, y.max_entry()) {
        None
    } else {
        Some(Outcome {
            residual: if defect.is_finite() { defect } else { f64::NAN },
            scale: y.max_entry(),
            image: Some(y.clone()),
            min_eigenvalue: None,
        })
    }
}

// ---------------------------------------------------------------- exact

pub fn unital_verdict(map: &StarLinearMap, tol: &Tolerance) -> Verdict {
    let n = map.level();
    let e = map.domain().unit(n);
    let y = map.apply(&e);
    let r = order::residual_norm(map.codomain(), &(&y - &map.codomain().unit(n)));
    if tol.accepts(r, 1.0) {
        Verdict::Pass {
            method: Method::Exact,
            max_residual: r,
        }
    } else {
        Verdict::Fail {
            method: Method::Exact,
            witness: Box::new(
                Witness::new(format!("level {n}: φ(e) differs from e"), r)
                    .with_element(map.domain(), &e)
                    .with_element(map.codomain(), &y),
            ),
        }
    }
}

pub fn is_unital(map: &StarLinearMap, tol: &Tolerance) -> bool {
    unital_verdict(map, tol).passed()
}

pub fn bijective_verdict(map: &StarLinearMap) -> Verdict {
    let (rank, kernel) = linalg::real_rank_and_kernel(&map.sa_matrix(), super::RANK_TOL);
    let dom = map.domain().sa_dim();
    let cod = map.codomain().sa_dim();
    if rank == dom && rank == cod {
        return Verdict::Pass {
            method: Method::Exact,
            max_residual: 0.0,
        };
    }
    let mut w = Witness::new(
        format!("rank {rank} on self-adjoint parts (domain {dom}, codomain {cod})"),
        (dom.max(cod) - rank) as f64,
    );
    if let Some(k) = kernel.first() {
        w = w.with_element(map.domain(), &map.domain().from_sa_coords(1, k));
    }
    Verdict::Fail {
        method: Method::Exact,
        witness: Box::new(w),
    }
}

fn exact_pairs(
    description: &str,
    pairs: impl Iterator<Item = (Element, Element, f64, f64)>,
    tol: &Tolerance,
    model: &SpaceModel,
) -> Verdict {
    let mut max_residual = 0.0f64;
    for (a, b, r, scale) in pairs {
        if !tol.accepts(r, scale) {
            return Verdict::Fail {
                method: Method::Exact,
                witness: Box::new(
                    Witness::new(description, r)
                        .with_element(model, &a)
                        .with_element(model, &b),
                ),
            };
        }
        max_residual = max_residual.max(r);
    }
    Verdict::Pass {
        method: Method::Exact,
        max_residual,
    }
}

/// `φ_n(a ∘ b) = φ_n(a) ∘ φ_n(b)` on all pairs of the self-adjoint basis of
/// `M_n(V)`; the coordinatewise product plays the Jordan product on lattices.
pub fn jordan_verdict(map: &StarLinearMap, tol: &Tolerance) -> Verdict {
    let n = map.level();
    let dom = map.domain();
    let cod = map.codomain();
    let product = |model: &SpaceModel, a: &Element, b: &Element| -> Element {
        match model.kind() {
            ModelKind::Lattice { .. } => {
                Element::new(a.level(), a.coords().component_mul(b.coords()))
            }
            ModelKind::Hermitian { .. } => (a.product(b) + b.product(a)) * 0.5,
        }
    };
    if dom.is_lattice() != cod.is_lattice() {
        return Verdict::Untested {
            reason: "Jordan products differ between lattice and Hermitian models".into(),
        };
    }
    let basis = dom.sa_basis(n);
    let images: Vec<Element> = basis.iter().map(|b| map.apply(b)).collect();
    let pairs = (0..basis.len())
        .flat_map(|i| (i..basis.len()).map(move |j| (i, j)))
        .map(|(i, j)| {
            let lhs = map.apply(&product(dom, &basis[i], &basis[j]));
            let rhs = product(cod, &images[i], &images[j]);
            let r = (&lhs - &rhs).frobenius();
            let scale = 1.0 + images[i].frobenius() * images[j].frobenius();
            (basis[i].clone(), basis[j].clone(), r, scale)
        });
    exact_pairs(
        &format!("level {n}: φ(a∘b) differs from φ(a)∘φ(b)"),
        pairs,
        tol,
        dom,
    )
}

pub fn is_jordan_hom(map: &StarLinearMap, tol: &Tolerance) -> bool {
    jordan_verdict(map, tol).passed()
}

/// `φ(xy) = φ(x)φ(y)` on all ordered pairs of the real ambient basis at
/// level 1.
pub fn multiplicative_verdict(map: &StarLinearMap, tol: &Tolerance) -> Verdict {
    let dom = map.domain();
    let cod = map.codomain();
    if dom.is_lattice() != cod.is_lattice() {
        return Verdict::Untested {
            reason: "products differ between lattice and Hermitian models".into(),
        };
    }
    let product = |model: &SpaceModel, a: &Element, b: &Element| -> Element {
        match model.kind() {
            ModelKind::Lattice { .. } => {
                Element::new(a.level(), a.coords().component_mul(b.coords()))
            }
            ModelKind::Hermitian { .. } => a.product(b),
        }
    };
    let basis = dom.ambient_basis();
    let level1 = map.amplify(1);
    let images: Vec<Element> = basis.iter().map(|b| level1.apply(b)).collect();
    let pairs = (0..basis.len())
        .flat_map(|i| (0..basis.len()).map(move |j| (i, j)))
        .map(|(i, j)| {
            let lhs = level1.apply(&product(dom, &basis[i], &basis[j]));
            let rhs = product(cod, &images[i], &images[j]);
            let r = (&lhs - &rhs).frobenius();
            let scale = 1.0 + images[i].frobenius() * images[j].frobenius();
            (basis[i].clone(), basis[j].clone(), r, scale)
        });
    exact_pairs("φ(xy) differs from φ(x)φ(y)", pairs, tol, dom)
}

pub fn is_multiplicative(map: &StarLinearMap, tol: &Tolerance) -> bool {
    multiplicative_verdict(map, tol).passed()
}

// -------------------------------------------------------------- sampled

pub fn positive_verdict(map: &StarLinearMap, config: &ToleranceConfig) -> Verdict {
    let cod = map.codomain();
    let tol = config.tol();
    sampled_verdict(
        map,
        config,
        "positive",
        ProbeSet::Cone,
        "φ(v) is not positive",
        |v| {
            let y = map.apply(v);
            if let Some(o) = non_self_adjoint(cod, &y, &tol) {
                return o;
            }
            let (lo, hi) = order::spectral_bounds(cod, &y);
            Outcome {
                residual: neg(lo),
                scale: lo.abs().max(hi.abs()),
                image: Some(y),
                min_eigenvalue: Some(lo),
            }
        },
    )
}

pub fn is_positive(map: &StarLinearMap, config: &ToleranceConfig) -> bool {
    positive_verdict(map, config).passed()
}

fn norm_comparison(
    map: &StarLinearMap,
    config: &ToleranceConfig,
    tag: &str,
    description: &str,
    f: impl Fn(f64, f64) -> f64,
) -> Verdict {
    let dom = map.domain();
    let cod = map.codomain();
    let tol = config.tol();
    sampled_verdict(map, config, tag, ProbeSet::SelfAdjoint, description, |v| {
        let y = map.apply(v);
        if let Some(o) = non_self_adjoint(cod, &y, &tol) {
            return o;
        }
        let (lo_v, hi_v) = order::spectral_bounds(dom, v);
        let (lo_y, hi_y) = order::spectral_bounds(cod, &y);
        let nv = lo_v.abs().max(hi_v.abs());
        let ny = lo_y.abs().max(hi_y.abs());
        let r = (f(lo_y, hi_y) - f(lo_v, hi_v)).abs();
        Outcome {
            residual: r,
            scale: nv.max(ny),
            image: Some(y),
            min_eigenvalue: Some(lo_y),
        }
    })
}

pub fn isometry_verdict(map: &StarLinearMap, config: &ToleranceConfig) -> Verdict {
    norm_comparison(
        map,
        config,
        "isometry",
        "‖φ(v)‖ differs from ‖v‖",
        |lo, hi| lo.abs().max(hi.abs()),
    )
}

pub fn is_isometry(map: &StarLinearMap, config: &ToleranceConfig) -> bool {
    isometry_verdict(map, config).passed()
}

pub fn order_isometry_verdict(map: &StarLinearMap, config: &ToleranceConfig) -> Verdict {
    norm_comparison(
        map,
        config,
        "order-isometry",
        "l(φ(v)) differs from l(v)",
        |lo, _| neg(lo),
    )
}

pub fn is_order_isometry(map: &StarLinearMap, config: &ToleranceConfig) -> bool {
    order_isometry_verdict(map, config).passed()
}

pub fn abs_preserving_verdict(map: &StarLinearMap, config: &ToleranceConfig) -> Verdict {
    let dom = map.domain();
    let cod = map.codomain();
    sampled_verdict(
        map,
        config,
        "abs-preserving",
        ProbeSet::SelfAdjoint,
        "φ(|v|) differs from |φ(v)|",
        |v| {
            let y = map.apply(v);
            let (Ok(av), Ok(ay)) = (order::abs_element(dom, v), order::abs_element(cod, &y)) else {
                return Outcome::nan();
            };
            let r = order::residual_norm(cod, &(&map.apply(&av) - &ay));
            let scale = order::residual_norm(dom, v).max(order::residual_norm(cod, &y));
            let lo = order::spectral_bounds(cod, &y).0;
            Outcome {
                residual: r,
                scale,
                image: Some(y),
                min_eigenvalue: Some(lo),
            }
        },
    )
}

pub fn is_abs_preserving(map: &StarLinearMap, config: &ToleranceConfig) -> bool {
    abs_preserving_verdict(map, config).passed()
}

/// `φ(v⁺) ⊥ φ(v⁻)`, the orthogonal pair `(v⁺, v⁻)` ranging over the
/// decompositions of the probes.
pub fn orthogonality_verdict(map: &StarLinearMap, config: &ToleranceConfig) -> Verdict {
    let dom = map.domain();
    let cod = map.codomain();
    sampled_verdict(
        map,
        config,
        "preserves-orthogonality",
        ProbeSet::SelfAdjoint,
        "φ(v+) not orthogonal to φ(v-)",
        |v| {
            let Ok((p, q)) = order::pos_neg_parts(dom, v) else {
                return Outcome::nan();
            };
            let (fp, fq) = (map.apply(&p), map.apply(&q));
            let r = order::perp_residual(cod, &fp, &fq).unwrap_or(f64::NAN);
            Outcome {
                residual: r,
                scale: order::residual_norm(cod, &fp) + order::residual_norm(cod, &fq),
                image: Some(map.apply(v)),
                min_eigenvalue: None,
            }
        },
    )
}

/// `φ(v⁺) = φ(v)⁺` (`positive = true`) or `φ(v⁻) = φ(v)⁻`.
pub fn part_verdict(map: &StarLinearMap, config: &ToleranceConfig, positive: bool) -> Verdict {
    let dom = map.domain();
    let cod = map.codomain();
    let (tag, description) = if positive {
        ("positive-part", "φ(v+) differs from φ(v)+")
    } else {
        ("negative-part", "φ(v-) differs from φ(v)-")
    };
    sampled_verdict(map, config, tag, ProbeSet::SelfAdjoint, description, |v| {
        let y = map.apply(v);
        let (Ok(pv), Ok(py)) = (order::pos_neg_parts(dom, v), order::pos_neg_parts(cod, &y)) else {
            return Outcome::nan();
        };
        let (a, b) = if positive { (pv.0, py.0) } else { (pv.1, py.1) };
        let r = order::residual_norm(cod, &(&map.apply(&a) - &b));
        let scale = order::residual_norm(dom, v).max(order::residual_norm(cod, &y));
        Outcome {
            residual: r,
            scale,
            image: Some(y),
            min_eigenvalue: None,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ToleranceConfig {
        ToleranceConfig::default().with_samples(40).with_seed(1)
    }

    fn transpose(k: usize) -> StarLinearMap {
        let m = SpaceModel::hermitian(k);
        StarLinearMap::from_fn("transpose", m.clone(), m, |x| {
            Element::new((1, 1), x.coords().transpose())
        })
        .unwrap()
    }

    fn scaling(k: usize, t: f64) -> StarLinearMap {
        let m = SpaceModel::hermitian(k);
        StarLinearMap::from_fn("scaling", m.clone(), m, |x| x.scale(t)).unwrap()
    }

    #[test]
    fn identity_passes_everything() {
        let m = SpaceModel::hermitian(2);
        let id = StarLinearMap::identity(&m);
        let r = classify(&id, 2, &config());
        for (k, v) in &r.verdicts {
            assert!(v.passed(), "{k}: {v:?}");
        }
    }

    #[test]
    fn negation_fails_positivity_with_witness_e() {
        let neg = scaling(2, -1.0);
        let v = positive_verdict(&neg, &config());
        let w = v.witness().unwrap();
        let (_, x) = w.elements[0].to_element().unwrap();
        assert_eq!(x, SpaceModel::hermitian(2).unit(1));
    }

    #[test]
    fn halving_is_not_an_isometry() {
        let half = scaling(2, 0.5);
        assert!(!is_isometry(&half, &config()));
        assert!(!is_unital(&half, &Tolerance::default()));
        assert!(is_abs_preserving(&half, &config()));
    }

    #[test]
    fn transpose_profile() {
        let t = transpose(2);
        let c = config();
        assert!(is_positive(&t, &c));
        assert!(is_abs_preserving(&t, &c));
        assert!(is_jordan_hom(&t, &c.tol()));
        assert!(!is_multiplicative(&t, &c.tol()));
        let t2 = t.amplify(2);
        let v = abs_preserving_verdict(&t2, &c);
        let w = v.witness().expect("level-2 failure");
        assert!(w.min_eigenvalue.unwrap() <= -0.5);
        assert!(!is_positive(&t2, &c));
    }

    #[test]
    fn random_witnesses_are_shrunk_and_still_fail() {
        let m = SpaceModel::hermitian(3);
        let mut rng = crate::rng::stream_rng(9, "u", 0);
        let u = elements::random_unitary(3, &mut rng);
        let map = StarLinearMap::from_fn("mix", m.clone(), m.clone(), |x| {
            let c = u.adjoint() * x.coords() * &u;
            Element::new((1, 1), (x.coords() + c) * linalg::c(0.5, 0.0))
        })
        .unwrap();
        let v = abs_preserving_verdict(&map, &config());
        let w = v.witness().expect("mixture is not |·|-preserving");
        let (_, x) = w.elements[0].to_element().unwrap();
        let y = map.apply(&x);
        let r = order::residual_norm(
            &m,
            &(&map.apply(&order::abs_element(&m, &x).unwrap())
                - &order::abs_element(&m, &y).unwrap()),
        );
        assert!(r > 1e-6);
        assert!((order::residual_norm(&m, &x) - 1.0).abs() < 1e-9 || x == m.unit(1));
    }

    #[test]
    fn structured_probes_are_valid() {
        for (m, n) in [
            (SpaceModel::hermitian(2), 2),
            (SpaceModel::hermitian_blocks(&[1, 2]), 1),
            (SpaceModel::lattice(3), 1),
        ] {
            for set in [ProbeSet::SelfAdjoint, ProbeSet::Cone] {
                for p in structured_probes(&m, n, set) {
                    assert!(m.validate(&p).is_ok());
                    if set == ProbeSet::Cone {
                        assert!(order::in_cone(&m, &p, &Tolerance::default()));
                    }
                }
            }
        }
    }

    #[test]
    fn keys() {
        assert_eq!(Property::Positive.key(2), "positive@2");
        assert_eq!(Property::Multiplicative.key(2), "multiplicative");
    }
}
