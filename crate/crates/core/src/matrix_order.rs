//! Matricial levels `M_{m,n}(V)` over Hermitian models: the absolute value
//! `|·|_{m,n}`, scalar actions, direct sums, and the suites on absolutely
//! matrix ordered spaces and on complete maps.

use rand::Rng;

use crate::axioms::{check_absolutely_ordered_axioms, LevelSpace};
use crate::generators::elements;
use crate::linalg::{self, CMatrix};
use crate::maps::{Profile, Property, StarLinearMap};
use crate::model::{Element, SpaceModel};
use crate::order;
use crate::report::{ClassificationReport, Equivalence, Method, Verdict, Witness};
use crate::rng::SeededRng;
use crate::{Error, Result, Tolerance, ToleranceConfig};

/// Default level cap for the matricial suites.
pub const DEFAULT_LEVELS: usize = 3;

/// Largest block shape drawn by the sampled suites.
const MAX_SHAPE: usize = 3;

fn require_hermitian(model: &SpaceModel) -> Result<()> {
    if model.is_lattice() {
        Err(Error::LatticeUnsupported)
    } else {
        Ok(())
    }
}

/// `|v|_{m,n} = (v* v)^{1/2}` for `v ∈ M_{m,n}(V)`, a cone element of
/// `M_n(V)`.
pub fn abs_mn(model: &SpaceModel, v: &Element) -> Result<Element> {
    require_hermitian(model)?;
    order::abs_element(model, v)
}

/// `α v` for a scalar `α ∈ M_{r,m}`.
pub fn left_mul(model: &SpaceModel, alpha: &CMatrix, v: &Element) -> Result<Element> {
    require_hermitian(model)?;
    let (m, n) = v.level();
    if alpha.ncols() != m {
        return Err(Error::ShapeMismatch {
            expected: (alpha.nrows(), m),
            found: alpha.shape(),
        });
    }
    let p = linalg::inflate(alpha, model.size()) * v.coords();
    Ok(model.clean(Element::new((alpha.nrows(), n), p)))
}

/// `v β` for a scalar `β ∈ M_{n,s}`.
pub fn right_mul(model: &SpaceModel, v: &Element, beta: &CMatrix) -> Result<Element> {
    require_hermitian(model)?;
    let (m, n) = v.level();
    if beta.nrows() != n {
        return Err(Error::ShapeMismatch {
            expected: (n, beta.ncols()),
            found: beta.shape(),
        });
    }
    let p = v.coords() * linalg::inflate(beta, model.size());
    Ok(model.clean(Element::new((m, beta.ncols()), p)))
}

/// `v ⊕ w ∈ M_{m+r,n+s}(V)`.
pub fn direct_sum(v: &Element, w: &Element) -> Element {
    let (m, n) = v.level();
    let (r, s) = w.level();
    Element::new((m + r, n + s), linalg::direct_sum(v.coords(), w.coords()))
}

/// `v*` as an element of `M_{n,m}(V)`.
pub fn adjoint(v: &Element) -> Element {
    let (m, n) = v.level();
    Element::new((n, m), v.coords().adjoint())
}

fn block_matrix(model: &SpaceModel, rows: &[&[&Element]]) -> Element {
    let k = model.size();
    let heights: Vec<usize> = rows.iter().map(|r| r[0].level().0).collect();
    let widths: Vec<usize> = rows[0].iter().map(|e| e.level().1).collect();
    let (m, n) = (heights.iter().sum::<usize>(), widths.iter().sum::<usize>());
    let mut out = CMatrix::zeros(m * k, n * k);
    let mut top = 0;
    for (i, row) in rows.iter().enumerate() {
        let mut left = 0;
        for (j, e) in row.iter().enumerate() {
            assert_eq!(
                e.level(),
                (heights[i], widths[j]),
                "block shapes do not line up"
            );
            out.view_mut((top * k, left * k), e.coords().shape())
                .copy_from(e.coords());
            left += widths[j];
        }
        top += heights[i];
    }
    Element::new((m, n), out)
}

/// `|v|`, or a non-finite element of the right level when `v` itself is
/// non-finite.
fn abs_of(model: &SpaceModel, v: &Element) -> Element {
    let n = v.level().1;
    abs_mn(model, v).unwrap_or_else(|_| {
        let k = model.size();
        Element::new((n, n), linalg::nan_matrix(n * k, n * k))
    })
}

fn norm(v: &Element) -> f64 {
    linalg::operator_norm(v.coords())
}

fn complex_gaussian_matrix(r: usize, c: usize, rng: &mut SeededRng) -> CMatrix {
    let g = elements::gaussian_element(&SpaceModel::hermitian(1), (r, c), rng);
    g.into_coords()
}

fn diagonal_element(model: &SpaceModel, n: usize, rng: &mut SeededRng) -> Element {
    let d = model.size() * n;
    let vals: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
    Element::new(
        (n, n),
        CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |i, _| {
            linalg::c(vals[i], 0.0)
        })),
    )
}

fn shape(rng: &mut SeededRng) -> usize {
    rng.random_range(1..=MAX_SHAPE)
}

/// Running maximum of accepted residuals with the first rejected sample kept
/// as witness.
struct Tally {
    tol: Tolerance,
    samples: usize,
    max_residual: f64,
    witness: Option<Witness>,
}

impl Tally {
    fn new(tol: Tolerance) -> Self {
        Self {
            tol,
            samples: 0,
            max_residual: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, residual: f64, scale: f64, witness: impl FnOnce() -> Witness) {
        self.samples += 1;
        if self.tol.accepts(residual, scale) {
            self.max_residual = self.max_residual.max(residual);
        } else if self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn verdict(self) -> Verdict {
        let method = Method::Sampled {
            samples: self.samples,
        };
        match self.witness {
            Some(w) => Verdict::Fail {
                method,
                witness: Box::new(w),
            },
            None => Verdict::Pass {
                method,
                max_residual: self.max_residual,
            },
        }
    }
}

fn cone_defect(v: &Element) -> f64 {
    let lo = linalg::min_eigenvalue(&linalg::hermitian_part(v.coords()));
    if lo.is_nan() {
        f64::NAN
    } else {
        (-lo).max(0.0)
    }
}

/// Conditions on an absolutely matrix ordered space over `base`: every
/// `M_n(V)` is absolutely ordered (`n ≤ 3`); `|αvβ| ≤ ‖α‖ ||v| β|`; and
/// `|v ⊕ w| = |v| ⊕ |w|`. Shapes are drawn up to 3.
pub fn def17_suite(base: &SpaceModel, config: &ToleranceConfig) -> Result<ClassificationReport> {
    require_hermitian(base)?;
    let tol = config.tol();
    let mut report = ClassificationReport::new(format!("matrix levels over {base}"));

    for n in 1..=DEFAULT_LEVELS {
        let space = LevelSpace::new(base.clone(), n)?;
        report.insert(
            format!("absolutely_ordered@{n}"),
            check_absolutely_ordered_axioms(&space, config).verdict(),
        );
        report.add_level(n);
    }

    let mut compression = Tally::new(tol);
    let mut sums = Tally::new(tol);
    for t in 0..config.samples {
        let mut rng = config.rng("def17", t as u64);
        let (m, n) = (shape(&mut rng), shape(&mut rng));
        let v = elements::gaussian_element(base, (m, n), &mut rng);
        let (alpha, beta) = if t == 0 {
            (linalg::identity(m), linalg::identity(n))
        } else {
            let (r, s) = (shape(&mut rng), shape(&mut rng));
            (
                complex_gaussian_matrix(r, m, &mut rng),
                complex_gaussian_matrix(n, s, &mut rng),
            )
        };
        let a_norm = linalg::operator_norm(&alpha);
        let lhs = abs_of(base, &right_mul(base, &left_mul(base, &alpha, &v)?, &beta)?);
        let inner = abs_of(base, &right_mul(base, &abs_of(base, &v), &beta)?);
        let diff = &(&inner * a_norm) - &lhs;
        let scale = a_norm * norm(&v) * linalg::operator_norm(&beta);
        compression.record(cone_defect(&diff), scale, || {
            Witness::new(
                format!(
                    "|αvβ| exceeds ‖α‖ ||v|β| at shapes α {:?}, β {:?}",
                    alpha.shape(),
                    beta.shape()
                ),
                cone_defect(&diff),
            )
            .with_element(base, &v)
            .with_min_eigenvalue(Some(-cone_defect(&diff)))
        });

        let (v, w) = if t == 0 {
            let (p, q) = (shape(&mut rng), shape(&mut rng));
            (
                diagonal_element(base, p, &mut rng),
                diagonal_element(base, q, &mut rng),
            )
        } else {
            let (r, s) = (shape(&mut rng), shape(&mut rng));
            (v, elements::gaussian_element(base, (r, s), &mut rng))
        };
        let joint = abs_of(base, &direct_sum(&v, &w));
        let split = direct_sum(&abs_of(base, &v), &abs_of(base, &w));
        let r = norm(&(&joint - &split));
        sums.record(r, norm(&v) + norm(&w), || {
            Witness::new("|v ⊕ w| differs from |v| ⊕ |w|", r)
                .with_element(base, &v)
                .with_element(base, &w)
        });
    }
    report.insert("compression_inequality", compression.verdict());
    report.insert("direct_sum_identity", sums.verdict());
    Ok(report)
}

/// The five consequences of the matricial axioms: isometry invariance
/// `|αv| = |v|`; `|[[0, v], [v*, 0]]| = |v*| ⊕ |v|`; positivity of
/// `[[|v*|, v], [v*, |v|]]`; `|[v; 0]| = |v|`; `|[v 0]| = |v| ⊕ 0`.
pub fn prop20_suite(base: &SpaceModel, config: &ToleranceConfig) -> Result<ClassificationReport> {
    require_hermitian(base)?;
    let tol = config.tol();
    let mut isometry = Tally::new(tol);
    let mut off_diagonal = Tally::new(tol);
    let mut block = Tally::new(tol);
    let mut rows = Tally::new(tol);
    let mut cols = Tally::new(tol);

    for t in 0..config.samples {
        let mut rng = config.rng("prop20", t as u64);
        let (m, n) = (shape(&mut rng), shape(&mut rng));
        let v = if t == 0 {
            base.zero((m, n))
        } else {
            elements::gaussian_element(base, (m, n), &mut rng)
        };
        let scale = norm(&v);
        let abs_v = abs_of(base, &v);
        let abs_vs = abs_of(base, &adjoint(&v));

        let alpha = if t == 0 {
            linalg::identity(m)
        } else {
            let r = rng.random_range(m..=MAX_SHAPE.max(m));
            elements::random_isometry(r, m, &mut rng)
        };
        let r = norm(&(&abs_of(base, &left_mul(base, &alpha, &v)?) - &abs_v));
        isometry.record(r, scale, || {
            Witness::new(
                format!(
                    "|αv| differs from |v| for an isometry α of shape {:?}",
                    alpha.shape()
                ),
                r,
            )
            .with_element(base, &v)
        });

        let zero_mm = base.zero((m, m));
        let zero_nn = base.zero((n, n));
        let x = block_matrix(base, &[&[&zero_mm, &v], &[&adjoint(&v), &zero_nn]]);
        let r = norm(&(&abs_of(base, &x) - &direct_sum(&abs_vs, &abs_v)));
        off_diagonal.record(r, scale, || {
            Witness::new("|[[0, v], [v*, 0]]| differs from |v*| ⊕ |v|", r).with_element(base, &v)
        });

        let y = block_matrix(base, &[&[&abs_vs, &v], &[&adjoint(&v), &abs_v]]);
        let d = cone_defect(&y);
        block.record(d, scale, || {
            Witness::new("[[|v*|, v], [v*, |v|]] is not positive", d)
                .with_element(base, &v)
                .with_min_eigenvalue(Some(-d))
        });

        let p = rng.random_range(1..=2);
        let padded = block_matrix(base, &[&[&v], &[&base.zero((p, n))]]);
        let r = norm(&(&abs_of(base, &padded) - &abs_v));
        rows.record(r, scale, || {
            Witness::new("|[v; 0]| differs from |v|", r).with_element(base, &v)
        });

        let padded = block_matrix(base, &[&[&v, &base.zero((m, p))]]);
        let r = norm(&(&abs_of(base, &padded) - &direct_sum(&abs_v, &base.zero((p, p)))));
        cols.record(r, scale, || {
            Witness::new("|[v 0]| differs from |v| ⊕ 0", r).with_element(base, &v)
        });
    }

    let mut report = ClassificationReport::new(format!("matrix levels over {base}"));
    report.insert("isometry_invariance", isometry.verdict());
    report.insert("off_diagonal_abs", off_diagonal.verdict());
    report.insert("abs_block_positive", block.verdict());
    report.insert("zero_row_padding", rows.verdict());
    report.insert("zero_column_padding", cols.verdict());
    Ok(report)
}

fn require_levels(map: &StarLinearMap) -> Result<()> {
    if !map.is_bijective() {
        return Err(Error::Singular);
    }
    if !map.supports_levels() {
        return Err(Error::LatticeUnsupported);
    }
    Ok(())
}

/// Per-level profiles of order isometry and of unital `|·|`-preservation for
/// `φ_1, …, φ_N`. Levels are evaluated until either side fails; the two
/// profiles must fail first at the same level.
pub fn complete_suite(
    map: &StarLinearMap,
    levels: usize,
    config: &ToleranceConfig,
) -> Result<ClassificationReport> {
    complete_with(&Profile::new(map, config), levels)
}

pub fn complete_with(profile: &Profile, levels: usize) -> Result<ClassificationReport> {
    use Property::*;
    require_levels(profile.map())?;
    let mut eqs = Vec::new();
    let (mut left_fail, mut right_fail) = (None, None);
    for n in 1..=levels {
        let left = profile.holds(OrderIsometry, n);
        let right = profile.holds(Unital, n) && profile.holds(AbsPreserving, n);
        eqs.push(Equivalence::new(
            format!("level {n}: order isometry vs unital abs-preserving"),
            vec![
                (OrderIsometry.key(n), left),
                (
                    format!("{} & {}", Unital.key(n), AbsPreserving.key(n)),
                    right,
                ),
            ],
        ));
        if !left {
            left_fail = Some(n);
        }
        if !right {
            right_fail = Some(n);
        }
        if !left || !right {
            break;
        }
    }
    eqs.push(Equivalence::new(
        format!("complete order isometry vs unital completely abs-preserving up to level {levels}"),
        vec![
            (
                format!("order isometry at levels 1..={levels}"),
                left_fail.is_none(),
            ),
            (
                format!("unital abs-preserving at levels 1..={levels}"),
                right_fail.is_none(),
            ),
        ],
    ));
    let mut report = profile.report();
    for e in eqs {
        report.push(e);
    }
    let show = |f: Option<usize>| f.map_or("none".to_string(), |n| n.to_string());
    report.notes.push(format!(
        "first failing level: order isometry {}, unital abs-preserving {}",
        show(left_fail),
        show(right_fail)
    ));
    Ok(report)
}

/// Level of the first failure of `OrderIsometry` recorded by
/// [`complete_suite`], if any.
pub fn first_failing_level(report: &ClassificationReport, property: Property) -> Option<usize> {
    report.levels_tested.iter().copied().find(|&n| {
        report
            .verdict(&property.key(n))
            .is_some_and(Verdict::failed)
    })
}

/// `a = [[0, x, 0], [x*, 0, y], [0, y*, 0]]` at level 3.
pub fn trick_element(model: &SpaceModel, x: &Element, y: &Element) -> Element {
    let z = model.zero((1, 1));
    let (xs, ys) = (adjoint(x), adjoint(y));
    block_matrix(model, &[&[&z, x, &z], &[&xs, &z, y], &[&z, &ys, &z]])
}

/// `(‖φ₃(a²) − φ₃(a)²‖, ‖φ(xy) − φ(x)φ(y)‖)` for the block element `a` of
/// [`trick_element`]; operator norms.
pub fn block_trick_residuals(map: &StarLinearMap, x: &Element, y: &Element) -> Result<(f64, f64)> {
    require_hermitian(map.domain())?;
    require_hermitian(map.codomain())?;
    let dom = map.domain();
    dom.validate(x)?;
    dom.validate(y)?;
    let a = trick_element(dom, x, y);
    let phi_a = map.apply(&a);
    let trick = norm(&(&map.apply(&a.product(&a)) - &phi_a.product(&phi_a)));
    let mult = norm(&(&map.apply(&x.product(y)) - &map.apply(x).product(&map.apply(y))));
    Ok((trick, mult))
}

/// Matrix units `e_12`, `e_21` of the first block of size at least two.
pub fn off_diagonal_units(model: &SpaceModel) -> Option<(Element, Element)> {
    if model.is_lattice() {
        return None;
    }
    let mut offset = 0;
    for &k in model.blocks() {
        if k >= 2 {
            let size = model.size();
            let mut x = CMatrix::zeros(size, size);
            let mut y = CMatrix::zeros(size, size);
            x[(offset, offset + 1)] = linalg::c(1.0, 0.0);
            y[(offset + 1, offset)] = linalg::c(1.0, 0.0);
            return Some((Element::from_matrix(x), Element::from_matrix(y)));
        }
        offset += k;
    }
    None
}

/// Three-way agreement of complete order isometry (levels 1–3), unital
/// complete `|·|`-preservation (levels 1–3) and multiplicativity, together
/// with the 3×3 block trick on sampled pairs `(x, y)` and on `(e_12, e_21)`.
pub fn cor26_suite(map: &StarLinearMap, config: &ToleranceConfig) -> Result<ClassificationReport> {
    cor26_with(&Profile::new(map, config))
}

pub fn cor26_with(profile: &Profile) -> Result<ClassificationReport> {
    use Property::*;
    let map = profile.map();
    require_levels(map)?;
    let config = profile.config();
    let tol = config.tol();
    let dom = map.domain();
    let levels = DEFAULT_LEVELS;

    let complete_oi = (1..=levels).all(|n| profile.holds(OrderIsometry, n));
    let complete_abs =
        (1..=levels).all(|n| profile.holds(Unital, n) && profile.holds(AbsPreserving, n));
    let multiplicative = profile.holds(Multiplicative, 1);

    let mut pairs = Vec::new();
    if let Some(units) = off_diagonal_units(dom) {
        pairs.push(units);
    }
    for t in 0..config.samples {
        let mut rng = config.rng("block-trick", t as u64);
        let x = elements::gaussian_element(dom, (1, 1), &mut rng);
        let y = elements::gaussian_element(dom, (1, 1), &mut rng);
        pairs.push((x, y));
    }

    let mut trick = Tally::new(tol);
    let mut pairwise = Tally::new(tol);
    let mut agreement = Tally::new(tol);
    for (x, y) in &pairs {
        let (rt, rm) = block_trick_residuals(map, x, y)?;
        let phi_a = map.apply(&trick_element(dom, x, y));
        let scale = 1.0 + norm(&phi_a).powi(2);
        let witness = |what: &str, r: f64| {
            Witness::new(what.to_string(), r)
                .with_element(dom, x)
                .with_element(dom, y)
        };
        trick.record(rt, scale, || witness("φ₃(a²) differs from φ₃(a)²", rt));
        pairwise.record(rm, scale, || witness("φ(xy) differs from φ(x)φ(y)", rm));
        let same = tol.accepts(rt, scale) == tol.accepts(rm, scale);
        agreement.record(if same { 0.0 } else { f64::NAN }, scale, || {
            witness(
                &format!("trick residual {rt:.3e} and product residual {rm:.3e} disagree"),
                f64::NAN,
            )
        });
    }
    let trick = trick.verdict();
    let pairwise = pairwise.verdict();

    let mut report = profile.report();
    report.push(Equivalence::new(
        "complete order isometry vs unital completely abs-preserving vs multiplicative",
        vec![
            (
                format!("order isometry at levels 1..={levels}"),
                complete_oi,
            ),
            (
                format!("unital abs-preserving at levels 1..={levels}"),
                complete_abs,
            ),
            (Multiplicative.key(1), multiplicative),
        ],
    ));
    report.push(Equivalence::new(
        "block trick vanishes vs sampled products preserved",
        vec![
            ("block_trick".to_string(), trick.passed()),
            ("sampled_multiplicative".to_string(), pairwise.passed()),
        ],
    ));
    report.insert("block_trick", trick);
    report.insert("sampled_multiplicative", pairwise);
    report.insert("block_trick_agreement", agreement.verdict());
    Ok(report)
}

/// For unital surjective `φ`: isometry at levels 1–3 implies
/// multiplicativity.
pub fn three_isometry_check(
    map: &StarLinearMap,
    config: &ToleranceConfig,
) -> Result<ClassificationReport> {
    three_isometry_with(&Profile::new(map, config))
}

pub fn three_isometry_with(profile: &Profile) -> Result<ClassificationReport> {
    use Property::*;
    let map = profile.map();
    let tol = profile.config().tol();
    let (defect, _) = map.star_defect();
    if !map.star_linear_verdict(&tol).passed() {
        return Err(Error::NotStarLinear(defect));
    }
    if !map.supports_levels() {
        return Err(Error::LatticeUnsupported);
    }
    if !profile.holds(Unital, 1) {
        return Err(Error::NotUnital);
    }
    if !map.is_surjective() {
        return Err(Error::NotSurjective);
    }
    let three = (1..=DEFAULT_LEVELS).all(|n| profile.holds(Isometry, n));
    let mult = profile.holds(Multiplicative, 1);
    let mut report = profile.report();
    report.push(Equivalence::implication(
        "3-isometry implies multiplicative",
        (format!("isometry at levels 1..={DEFAULT_LEVELS}"), three),
        (Multiplicative.key(1), mult),
    ));
    Ok(report)
}

/// Whether `φ` is a 3-isometry; `Err` when the preconditions fail.
pub fn is_three_isometry(map: &StarLinearMap, config: &ToleranceConfig) -> Result<bool> {
    let profile = Profile::new(map, config);
    three_isometry_with(&profile)?;
    Ok((1..=DEFAULT_LEVELS).all(|n| profile.holds(Property::Isometry, n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ToleranceConfig {
        ToleranceConfig::default().with_samples(40).with_seed(5)
    }

    fn h2() -> SpaceModel {
        SpaceModel::hermitian(2)
    }

    fn transpose() -> StarLinearMap {
        StarLinearMap::from_fn("transpose", h2(), h2(), |x| {
            Element::new((1, 1), x.coords().transpose())
        })
        .unwrap()
    }

    fn conjugation(seed: u64) -> StarLinearMap {
        let mut rng = crate::rng::stream_rng(seed, "test-unitary", 0);
        let u = elements::random_unitary(2, &mut rng);
        StarLinearMap::from_fn("conjugation", h2(), h2(), move |x| {
            Element::new((1, 1), &u * x.coords() * u.adjoint())
        })
        .unwrap()
    }

    fn scaling(t: f64) -> StarLinearMap {
        StarLinearMap::from_fn("scaling", h2(), h2(), move |x| x.scale(t)).unwrap()
    }

    #[test]
    fn row_over_scalars_pads_with_zero() {
        let m = SpaceModel::hermitian(1);
        let v = Element::new(
            (1, 2),
            CMatrix::from_row_slice(1, 2, &[linalg::c(1.0, 0.0), linalg::c(0.0, 0.0)]),
        );
        let a = abs_mn(&m, &v).unwrap();
        assert_eq!(a.level(), (2, 2));
        let expect = Element::diag(&[1.0, 0.0]);
        assert!((&a - &expect.with_level((2, 2))).max_entry() < 1e-14);
    }

    #[test]
    fn lattice_is_rejected() {
        let m = SpaceModel::lattice(2);
        assert!(matches!(
            abs_mn(&m, &m.unit(1)),
            Err(Error::LatticeUnsupported)
        ));
        assert!(def17_suite(&m, &config()).is_err());
    }

    #[test]
    fn scalar_action_checks_shapes() {
        let v = h2().zero((2, 1));
        assert!(left_mul(&h2(), &linalg::identity(3), &v).is_err());
        assert_eq!(
            left_mul(&h2(), &CMatrix::zeros(3, 2), &v).unwrap().level(),
            (3, 1)
        );
        assert_eq!(
            right_mul(&h2(), &v, &CMatrix::zeros(1, 2)).unwrap().level(),
            (2, 2)
        );
    }

    #[test]
    fn matricial_suites_pass_on_hermitian() {
        for base in [h2(), SpaceModel::hermitian_blocks(&[1, 2])] {
            let r = def17_suite(&base, &config()).unwrap();
            assert!(
                r.verdicts.values().all(Verdict::passed),
                "{}",
                r.render_text()
            );
            let r = prop20_suite(&base, &config()).unwrap();
            assert!(
                r.verdicts.values().all(Verdict::passed),
                "{}",
                r.render_text()
            );
        }
    }

    #[test]
    fn unclamped_model_breaks_a_matricial_check() {
        let base = h2().without_sqrt_clamp();
        let c = ToleranceConfig::default().with_samples(100).with_seed(1);
        let bad = def17_suite(&base, &c)
            .unwrap()
            .verdicts
            .values()
            .any(Verdict::failed)
            || prop20_suite(&base, &c)
                .unwrap()
                .verdicts
                .values()
                .any(Verdict::failed);
        assert!(bad);
    }

    #[test]
    fn transpose_fails_first_at_level_two() {
        let t = transpose();
        let r = complete_suite(&t, 3, &config()).unwrap();
        assert!(r.consistent(), "{}", r.render_text());
        assert_eq!(first_failing_level(&r, Property::OrderIsometry), Some(2));
        assert_eq!(first_failing_level(&r, Property::AbsPreserving), Some(2));
        let w = r.verdict("abs_preserving@2").unwrap().witness().unwrap();
        assert!(w.min_eigenvalue.unwrap() <= -0.5);
    }

    #[test]
    fn conjugation_passes_every_level() {
        let r = complete_suite(&conjugation(1), 3, &config()).unwrap();
        assert!(r.consistent());
        assert_eq!(first_failing_level(&r, Property::OrderIsometry), None);
        assert_eq!(r.levels_tested, vec![1, 2, 3]);
    }

    #[test]
    fn doubling_fails_at_level_one() {
        let r = complete_suite(&scaling(2.0), 3, &config()).unwrap();
        assert!(r.consistent());
        assert_eq!(first_failing_level(&r, Property::OrderIsometry), Some(1));
        assert!(matches!(
            complete_suite(&scaling(0.0), 2, &config()),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn block_trick_separates_transpose() {
        let (x, y) = off_diagonal_units(&h2()).unwrap();
        let (rt, rm) = block_trick_residuals(&transpose(), &x, &y).unwrap();
        assert!(rt >= 1e-3 && rm >= 1e-3);
        let (rt, rm) = block_trick_residuals(&conjugation(2), &x, &y).unwrap();
        assert!(rt <= 1e-12 && rm <= 1e-12);
    }

    #[test]
    fn cor26_agrees_on_examples() {
        for (map, expect) in [
            (conjugation(3), true),
            (StarLinearMap::identity(&h2()), true),
            (transpose(), false),
        ] {
            let r = cor26_suite(&map, &config()).unwrap();
            assert!(r.consistent(), "{}", r.render_text());
            assert!(r.passed("block_trick_agreement"));
            assert!(r.equivalences[r.equivalences.len() - 2]
                .sides
                .iter()
                .all(|s| s.1 == expect));
        }
    }

    #[test]
    fn three_isometry_examples() {
        assert!(is_three_isometry(&conjugation(4), &config()).unwrap());
        assert!(!is_three_isometry(&transpose(), &config()).unwrap());
        let r = three_isometry_check(&transpose(), &config()).unwrap();
        assert!(r.consistent());
        assert!(matches!(
            three_isometry_check(&scaling(2.0), &config()),
            Err(Error::NotUnital)
        ));
    }
}
