//! Sampled checkers for the absolutely-ordered-space axioms and the
//! absolute-order-unit conditions.

use rand::Rng;

use crate::generators::elements;
use crate::model::{Element, SpaceModel};
use crate::order;
use crate::report::{AxiomCheck, AxiomReport, Witness};
use crate::rng::SeededRng;
use crate::{Result, Tolerance, ToleranceConfig};

/// A concrete space the axiom suite can run on: an absolute value, a cone
/// test, a size for residuals and seeded samplers.
pub trait AbsoluteOrderModel {
    fn describe(&self) -> String;
    /// Model used to serialize witness representatives.
    fn witness_model(&self) -> &SpaceModel;
    fn abs(&self, v: &Element) -> Result<Element>;
    fn in_cone(&self, v: &Element, tol: &Tolerance) -> bool;
    /// Norm used for residuals and tolerance scales.
    fn size(&self, v: &Element) -> f64;
    fn sample_self_adjoint(&self, rng: &mut SeededRng) -> Element;
    fn sample_cone(&self, rng: &mut SeededRng) -> Element;
    /// `(u, v, w)` with `u ⊥ v` and `u ⊥ w` by construction.
    fn sample_orthogonal_triple(&self, rng: &mut SeededRng) -> (Element, Element, Element);
    /// `0 ≤ w ≤ v` for a cone element `v`.
    fn sample_minorant(&self, v: &Element, rng: &mut SeededRng) -> Element;

    /// `‖a − b‖` in this space.
    fn distance(&self, a: &Element, b: &Element) -> f64 {
        self.size(&(a - b))
    }

    fn perp(&self, u: &Element, v: &Element, tol: &Tolerance) -> bool {
        match self.abs(&(u - v)) {
            Ok(a) => tol.accepts(self.distance(&a, &(u + v)), self.size(u) + self.size(v)),
            Err(_) => false,
        }
    }
}

/// `M_n(V)_sa` of a concrete model (`n = 1` for the lattice).
#[derive(Clone, Debug)]
pub struct LevelSpace {
    pub model: SpaceModel,
    pub n: usize,
}

impl LevelSpace {
    pub fn new(model: SpaceModel, n: usize) -> Result<Self> {
        model.check_level((n, n))?;
        Ok(Self { model, n })
    }
}

impl AbsoluteOrderModel for LevelSpace {
    fn describe(&self) -> String {
        if self.n == 1 {
            self.model.to_string()
        } else {
            format!("M_{}({})", self.n, self.model)
        }
    }

    fn witness_model(&self) -> &SpaceModel {
        &self.model
    }

    fn abs(&self, v: &Element) -> Result<Element> {
        order::abs_element(&self.model, v)
    }

    fn in_cone(&self, v: &Element, tol: &Tolerance) -> bool {
        order::in_cone(&self.model, v, tol)
    }

    fn size(&self, v: &Element) -> f64 {
        order::residual_norm(&self.model, v)
    }

    fn sample_self_adjoint(&self, rng: &mut SeededRng) -> Element {
        let m = &self.model;
        match rng.random_range(0..4) {
            0 => elements::gaussian_self_adjoint(m, self.n, rng),
            1 => {
                let a = elements::rank_one_psd(m, self.n, rng);
                let b = elements::rank_one_psd(m, self.n, rng);
                &a - &b
            }
            2 => {
                let (u, v) = elements::orthogonal_pair(m, self.n, rng);
                &u - &v
            }
            _ => {
                let p = elements::random_projection(m, self.n, rng);
                &(&p * 2.0) - &m.unit(self.n)
            }
        }
    }

    fn sample_cone(&self, rng: &mut SeededRng) -> Element {
        let m = &self.model;
        match rng.random_range(0..5) {
            0 => elements::rank_one_psd(m, self.n, rng),
            1 => elements::random_psd(m, self.n, rng),
            2 => elements::random_projection(m, self.n, rng),
            3 => elements::orthogonal_pair(m, self.n, rng).0,
            _ => elements::random_contraction(m, self.n, rng),
        }
    }

    fn sample_orthogonal_triple(&self, rng: &mut SeededRng) -> (Element, Element, Element) {
        elements::orthogonal_triple(&self.model, self.n, rng)
    }

    fn sample_minorant(&self, v: &Element, rng: &mut SeededRng) -> Element {
        elements::minorant(&self.model, v, rng)
    }
}

fn witness<S: AbsoluteOrderModel + ?Sized>(
    space: &S,
    description: &str,
    residual: f64,
    elems: &[&Element],
) -> Witness {
    let mut w = Witness::new(description, residual);
    for e in elems {
        w = w.with_element(space.witness_model(), e);
    }
    w
}

/// Checks axioms (a)–(e) on `config.samples` seeded draws, plus the
/// sampler premise that constructed pairs are orthogonal.
pub fn check_absolutely_ordered_axioms<S: AbsoluteOrderModel + ?Sized>(
    space: &S,
    config: &ToleranceConfig,
) -> AxiomReport {
    let tol = config.tol();
    let mut a = AxiomCheck::new("(a) |v| = v on the cone");
    let mut b = AxiomCheck::new("(b) |v| + v, |v| - v in the cone");
    let mut c = AxiomCheck::new("(c) |kv| = |k| |v|");
    let mut premise = AxiomCheck::new("constructed pairs are orthogonal");
    let mut d = AxiomCheck::new("(d) u ⊥ v, 0 <= w <= v => u ⊥ w");
    let mut e = AxiomCheck::new("(e) u ⊥ v, u ⊥ w => u ⊥ |v ± w|");

    for t in 0..config.samples {
        let mut rng = config.rng("axioms", t as u64);

        let v = space.sample_cone(&mut rng);
        let r = space.abs(&v).map_or(f64::NAN, |av| space.distance(&av, &v));
        a.record(tol.accepts(r, space.size(&v)), || {
            witness(space, "|v| differs from v", r, &[&v])
        });

        let v = space.sample_self_adjoint(&mut rng);
        match space.abs(&v) {
            Ok(av) => {
                let ok = space.in_cone(&(&av + &v), &tol) && space.in_cone(&(&av - &v), &tol);
                b.record(ok, || {
                    witness(space, "|v| ± v left the cone", f64::NAN, &[&v, &av])
                });
            }
            Err(_) => b.record(false, || witness(space, "|v| undefined", f64::NAN, &[&v])),
        }

        let k = if t == 0 {
            -1.0
        } else {
            rng.random_range(-3.0..3.0)
        };
        let r = match (space.abs(&(&v * k)), space.abs(&v)) {
            (Ok(l), Ok(av)) => space.distance(&l, &(&av * k.abs())),
            _ => f64::NAN,
        };
        c.record(tol.accepts(r, k.abs() * space.size(&v)), || {
            witness(
                space,
                &format!("|kv| differs from |k||v| for k = {k}"),
                r,
                &[&v],
            )
        });

        let (u, v, w0) = space.sample_orthogonal_triple(&mut rng);
        let uv = space.perp(&u, &v, &tol);
        let uw0 = space.perp(&u, &w0, &tol);
        premise.record(uv && uw0, || {
            witness(
                space,
                "constructed pair not orthogonal",
                f64::NAN,
                &[&u, &v, &w0],
            )
        });

        let w = space.sample_minorant(&v, &mut rng);
        let ok = !uv || space.perp(&u, &w, &tol);
        d.record(ok, || {
            witness(
                space,
                "minorant lost orthogonality",
                f64::NAN,
                &[&u, &v, &w],
            )
        });

        let ok = !(uv && uw0)
            || [&v + &w0, &v - &w0].iter().all(|s| match space.abs(s) {
                Ok(m) => space.perp(&u, &m, &tol),
                Err(_) => false,
            });
        e.record(ok, || {
            witness(
                space,
                "u not orthogonal to |v ± w|",
                f64::NAN,
                &[&u, &v, &w0],
            )
        });
    }

    AxiomReport {
        space: space.describe(),
        samples: config.samples,
        seed: config.seed,
        checks: vec![a, b, c, premise, d, e],
    }
}

/// Absolute-order-unit conditions on `M_n(V)`: monotone norm, `⊥ = ⊥_∞^a`
/// (oracle plus minorant sampling), `⊥ ⇒ ⊥_∞`, and the norm identities
/// `‖|v|‖ = ‖v‖ = max(‖v⁺‖, ‖v⁻‖)` and `±v ≤ e ⇒ |v| ≤ e`.
pub fn check_absolute_order_unit(space: &LevelSpace, config: &ToleranceConfig) -> AxiomReport {
    let tol = config.tol();
    let m = &space.model;
    let n = space.n;
    let e = m.unit(n);
    let mut mono = AxiomCheck::new("u <= v <= w => ‖v‖ <= max(‖u‖, ‖w‖)");
    let mut orth = AxiomCheck::new("⊥ = ⊥∞a on orthogonal pairs");
    let mut generic = AxiomCheck::new("⊥ = ⊥∞a on independent pairs");
    let mut minorants = AxiomCheck::new("minorant sampling agrees with ⊥∞a");
    let mut infty = AxiomCheck::new("⊥ => ⊥∞");
    let mut norms = AxiomCheck::new("‖|v|‖ = ‖v‖ = max(‖v+‖, ‖v-‖)");
    let mut unit = AxiomCheck::new("±v <= e => |v| <= e");

    let norm = |v: &Element| order::residual_norm(m, v);

    for t in 0..config.samples {
        let mut rng = config.rng("absolute-order-unit", t as u64);

        let v = space.sample_self_adjoint(&mut rng);
        let u = &v - &space.sample_cone(&mut rng);
        let w = &v + &space.sample_cone(&mut rng);
        let excess = norm(&v) - norm(&u).max(norm(&w));
        mono.record(
            tol.accepts(excess.max(0.0), norm(&v)) && !excess.is_nan(),
            || witness(space, "norm not monotone", excess, &[&u, &v, &w]),
        );

        let (p, q, _) = space.sample_orthogonal_triple(&mut rng);
        let a = order::perp(m, &p, &q, &tol).unwrap_or(false);
        let b = order::perp_infty_abs(m, &p, &q, &tol).unwrap_or(false);
        orth.record(a == b, || {
            witness(space, &format!("⊥ = {a}, ⊥∞a = {b}"), f64::NAN, &[&p, &q])
        });
        let i = order::perp_infty(m, &p, &q, &tol).unwrap_or(false);
        infty.record(!a || i, || {
            witness(space, "⊥ without ⊥∞", f64::NAN, &[&p, &q])
        });
        match order::perp_infty_abs_sampled(m, &p, &q, &tol, 4, &mut rng) {
            Ok(check) => minorants.record(check.consistent(), || {
                let (x, y) = check.violation.clone().unwrap_or((p.clone(), q.clone()));
                witness(space, "minorants not ∞-orthogonal", f64::NAN, &[&x, &y])
            }),
            Err(_) => minorants.record(false, || {
                witness(space, "oracle failed", f64::NAN, &[&p, &q])
            }),
        }

        let x = space.sample_cone(&mut rng);
        let y = space.sample_cone(&mut rng);
        let a = order::perp(m, &x, &y, &tol).unwrap_or(false);
        let b = order::perp_infty_abs(m, &x, &y, &tol).unwrap_or(false);
        generic.record(a == b, || {
            witness(space, &format!("⊥ = {a}, ⊥∞a = {b}"), f64::NAN, &[&x, &y])
        });

        let r = match order::pos_neg_parts(m, &v) {
            Ok((vp, vn)) => {
                let nv = norm(&v);
                let na = order::abs_element(m, &v).map_or(f64::NAN, |a| norm(&a));
                let mx = norm(&vp).max(norm(&vn));
                (na - nv).abs().max((mx - nv).abs())
            }
            Err(_) => f64::NAN,
        };
        norms.record(tol.accepts(r, norm(&v)), || {
            witness(space, "norm identities fail", r, &[&v])
        });

        let s = norm(&v);
        let scaled = if s > 0.0 {
            v.scale(1.0 / (s * (1.0 + rng.random::<f64>())))
        } else {
            v.clone()
        };
        let ok = match order::abs_element(m, &scaled) {
            Ok(a) => order::in_cone(m, &(&e - &a), &tol),
            Err(_) => false,
        };
        unit.record(ok, || witness(space, "|v| exceeds e", f64::NAN, &[&scaled]));
    }

    AxiomReport {
        space: space.describe(),
        samples: config.samples,
        seed: config.seed,
        checks: vec![mono, orth, generic, minorants, infty, norms, unit],
    }
}

/// Both suites on one level space.
pub fn verify_space(
    model: &SpaceModel,
    n: usize,
    config: &ToleranceConfig,
) -> Result<Vec<AxiomReport>> {
    let space = LevelSpace::new(model.clone(), n)?;
    Ok(vec![
        check_absolutely_ordered_axioms(&space, config),
        check_absolute_order_unit(&space, config),
    ])
}
