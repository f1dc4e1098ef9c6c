//! Equivalence suites over a single map.
//!
//! Each suite evaluates the sides of one equivalence through a shared
//! [`Profile`], records the verdicts it used and an [`Equivalence`] entry.

use crate::linalg::RMatrix;
use crate::report::{ClassificationReport, Equivalence, Method, Verdict, Witness};
use crate::{Error, Result, ToleranceConfig};

use super::{Profile, Property, StarLinearMap};

fn side(profile: &Profile, props: &[Property], level: usize) -> (String, bool) {
    let name = props
        .iter()
        .map(|p| p.key(level))
        .collect::<Vec<_>>()
        .join(" & ");
    let holds = props.iter().all(|&p| profile.holds(p, level));
    (name, holds)
}

fn finish(
    profile: &Profile,
    keys: &[(Property, usize)],
    eqs: Vec<Equivalence>,
) -> ClassificationReport {
    let mut r = ClassificationReport::new(profile.map().label());
    for &(p, n) in keys {
        r.insert(p.key(n), profile.verdict(p, n));
        if p.is_levelled() {
            r.add_level(n);
        }
    }
    for e in eqs {
        r.push(e);
    }
    r
}

/// The four conditions on `|·|`-preservation: `|·|`-preserving; positive and
/// `⊥`-preserving; positive with `φ(v⁺) = φ(v)⁺`; positive with
/// `φ(v⁻) = φ(v)⁻`.
pub fn prop16_suite(map: &StarLinearMap, config: &ToleranceConfig) -> ClassificationReport {
    prop16_with(&Profile::new(map, config))
}

pub fn prop16_with(profile: &Profile) -> ClassificationReport {
    use Property::*;
    let n = profile.map().level();
    let sides = vec![
        side(profile, &[AbsPreserving], n),
        side(profile, &[Positive, PreservesOrthogonality], n),
        side(profile, &[Positive, PositivePart], n),
        side(profile, &[Positive, NegativePart], n),
    ];
    finish(
        profile,
        &[
            (AbsPreserving, n),
            (Positive, n),
            (PreservesOrthogonality, n),
            (PositivePart, n),
            (NegativePart, n),
        ],
        vec![Equivalence::new("abs-preserving conditions", sides)],
    )
}

/// For surjective `φ`: order isometry iff unital isometry.
pub fn prop21_suite(map: &StarLinearMap, config: &ToleranceConfig) -> Result<ClassificationReport> {
    prop21_with(&Profile::new(map, config))
}

pub fn prop21_with(profile: &Profile) -> Result<ClassificationReport> {
    use Property::*;
    if !profile.map().is_surjective() {
        return Err(Error::NotSurjective);
    }
    let n = profile.map().level();
    let sides = vec![
        side(profile, &[OrderIsometry], n),
        side(profile, &[Unital, Isometry], n),
    ];
    Ok(finish(
        profile,
        &[(OrderIsometry, n), (Unital, n), (Isometry, n)],
        vec![Equivalence::new("order isometry vs unital isometry", sides)],
    ))
}

/// For bijective `φ`: unital and `|·|`-preserving iff order isometry.
pub fn theorem15_suite(
    map: &StarLinearMap,
    config: &ToleranceConfig,
) -> Result<ClassificationReport> {
    theorem15_with(&Profile::new(map, config))
}

pub fn theorem15_with(profile: &Profile) -> Result<ClassificationReport> {
    use Property::*;
    if !profile.map().is_bijective() {
        return Err(Error::Singular);
    }
    let n = profile.map().level();
    let sides = vec![
        side(profile, &[Unital, AbsPreserving], n),
        side(profile, &[OrderIsometry], n),
    ];
    Ok(finish(
        profile,
        &[(Unital, n), (AbsPreserving, n), (OrderIsometry, n)],
        vec![Equivalence::new(
            "unital abs-preserving vs order isometry",
            sides,
        )],
    ))
}

/// For bijective `φ`: order isometry, unital `|·|`-preserving and Jordan
/// isomorphism agree.
pub fn cor22_suite(map: &StarLinearMap, config: &ToleranceConfig) -> Result<ClassificationReport> {
    cor22_with(&Profile::new(map, config))
}

pub fn cor22_with(profile: &Profile) -> Result<ClassificationReport> {
    use Property::*;
    if !profile.map().is_bijective() {
        return Err(Error::Singular);
    }
    let n = profile.map().level();
    let jordan = profile.verdict(Jordan, n);
    if !jordan.is_tested() {
        return Err(Error::ModelMismatch(
            "Jordan isomorphisms need domain and codomain of the same kind".into(),
        ));
    }
    let sides = vec![
        side(profile, &[OrderIsometry], n),
        side(profile, &[Unital, AbsPreserving], n),
        side(profile, &[Jordan, Bijective], n),
    ];
    Ok(finish(
        profile,
        &[
            (OrderIsometry, n),
            (Unital, n),
            (AbsPreserving, n),
            (Jordan, n),
            (Bijective, n),
        ],
        vec![Equivalence::new(
            "order isometry vs unital abs-preserving vs Jordan isomorphism",
            sides,
        )],
    ))
}

/// `φ⁻¹` of a bijective map.
pub fn inverse_map(map: &StarLinearMap) -> Result<StarLinearMap> {
    map.inverse()
}

/// `φ⁻¹` composes to the identity on both sides, and `|·|`-preservation of
/// `φ` carries over to `φ⁻¹`.
pub fn inverse_suite(
    map: &StarLinearMap,
    config: &ToleranceConfig,
) -> Result<ClassificationReport> {
    inverse_with(&Profile::new(map, config))
}

pub fn inverse_with(profile: &Profile) -> Result<ClassificationReport> {
    let map = profile.map();
    let inv = map.inverse()?;
    let n = map.level();
    let tol = profile.config().tol();

    let left = inv.compose(map)?;
    let right = map.compose(&inv)?;
    let defect = |m: &StarLinearMap| {
        let a: RMatrix = m.action().clone();
        let d = a.nrows();
        (a - RMatrix::identity(d, d)).amax()
    };
    let r = defect(&left).max(defect(&right));
    let scale = 1.0 + map.action().amax() * inv.action().amax();
    let composition = if tol.accepts(r, scale) {
        Verdict::Pass {
            method: Method::Exact,
            max_residual: r,
        }
    } else {
        Verdict::Fail {
            method: Method::Exact,
            witness: Box::new(Witness::new(
                "φ⁻¹ ∘ φ or φ ∘ φ⁻¹ differs from the identity",
                r,
            )),
        }
    };

    let inv_profile = Profile::new(&inv, profile.config());
    let forward = profile.verdict(Property::AbsPreserving, n);
    let backward = inv_profile.verdict(Property::AbsPreserving, n);
    let key = Property::AbsPreserving.key(n);
    let eq = Equivalence::implication(
        "abs-preserving map has abs-preserving inverse",
        (key.clone(), forward.passed()),
        (format!("inverse {key}"), backward.passed()),
    );
    let mut report = finish(profile, &[(Property::AbsPreserving, n)], vec![eq]);
    report.insert("inverse_composition", composition);
    report.insert(format!("inverse_{key}"), backward);
    Ok(report)
}
