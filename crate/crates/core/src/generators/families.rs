//! Map families with ground truth derived from their construction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::linalg::{c, CMatrix};
use crate::maps::{times_i_matrix, Property, StarLinearMap};
use crate::model::{Element, SpaceModel};
use crate::report::ClassificationReport;
use crate::rng::{derive_seed, stream_rng};
use crate::{Error, Result};

use super::elements;

/// Highest level ground truth is stated for.
pub const TRUTH_LEVELS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MapFamilySpec {
    /// `x ↦ u* x u` on `hermitian(k)`.
    UnitaryConjugation {
        k: usize,
        seed: u64,
    },
    Transpose {
        k: usize,
    },
    /// Coordinate permutation of `lattice(d)`.
    PermutationLattice {
        d: usize,
        seed: u64,
    },
    /// Blockwise unitary conjugation of `hermitian:k1+k2+…`, optionally
    /// reversing the block order.
    DirectSum {
        blocks: Vec<usize>,
        seed: u64,
        #[serde(default)]
        swap: bool,
    },
    /// `x ↦ u* x u` or `x ↦ u* xᵀ u`.
    JordanMixture {
        k: usize,
        seed: u64,
        #[serde(default)]
        transpose: bool,
    },
    /// `x ↦ (x + u* x u) / 2`.
    PositiveNonpreserver {
        k: usize,
        seed: u64,
    },
    Scaling {
        model: SpaceModel,
        t: f64,
    },
    /// `hermitian(k)` into the top-left corner of `hermitian(into)`.
    CornerEmbedding {
        k: usize,
        into: usize,
    },
    /// `a₁ ⊕ … ⊕ a_m ↦ a_keep`.
    BlockCompression {
        blocks: Vec<usize>,
        keep: usize,
    },
    /// `lattice(d) → lattice(keep.len())`, `x ↦ (x_i)_{i ∈ keep}`.
    CoordinateProjection {
        d: usize,
        keep: Vec<usize>,
    },
    Identity {
        model: SpaceModel,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Certain, and decided exactly by the classifier.
    Pass,
    /// True by construction but only sampled by the classifier.
    ExpectedPass,
    Fail,
    Unknown,
}

impl Expectation {
    fn sampled(holds: bool) -> Self {
        if holds {
            Expectation::ExpectedPass
        } else {
            Expectation::Fail
        }
    }

    fn exact(holds: bool) -> Self {
        if holds {
            Expectation::Pass
        } else {
            Expectation::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub family: String,
    pub expected: BTreeMap<String, Expectation>,
}

impl GroundTruth {
    pub fn get(&self, key: &str) -> Expectation {
        self.expected
            .get(key)
            .copied()
            .unwrap_or(Expectation::Unknown)
    }

    /// Keys where a classifier verdict contradicts the ground truth.
    /// Untested verdicts and unknown expectations are skipped.
    pub fn disagreements(&self, report: &ClassificationReport) -> Vec<String> {
        let mut out = Vec::new();
        for (key, want) in &self.expected {
            let Some(v) = report.verdict(key) else {
                continue;
            };
            if !v.is_tested() {
                continue;
            }
            let bad = match want {
                Expectation::Pass | Expectation::ExpectedPass => !v.passed(),
                Expectation::Fail => !v.failed(),
                Expectation::Unknown => false,
            };
            if bad {
                out.push(format!(
                    "{key}: expected {want:?}, got {}",
                    if v.passed() { "pass" } else { "fail" }
                ));
            }
        }
        out
    }
}

/// Per-property truth of a family.
struct Profile {
    unital: bool,
    positive: bool,
    isometry: bool,
    order_isometry: bool,
    abs: bool,
    jordan: bool,
}

impl Profile {
    fn all(x: bool) -> Self {
        Self {
            unital: x,
            positive: x,
            isometry: x,
            order_isometry: x,
            abs: x,
            jordan: x,
        }
    }
}

fn truth(
    family: &str,
    levels: usize,
    at: impl Fn(usize) -> Profile,
    multiplicative: Option<bool>,
    bijective: Option<bool>,
    unit_projection: bool,
) -> GroundTruth {
    let mut expected = BTreeMap::new();
    for n in 1..=levels {
        let p = at(n);
        let mut put = |prop: Property, e: Expectation| {
            expected.insert(prop.key(n), e);
        };
        put(Property::Unital, Expectation::exact(p.unital));
        put(Property::Positive, Expectation::sampled(p.positive));
        put(Property::Isometry, Expectation::sampled(p.isometry));
        put(
            Property::OrderIsometry,
            Expectation::sampled(p.order_isometry),
        );
        put(Property::AbsPreserving, Expectation::sampled(p.abs));
        put(Property::Jordan, Expectation::exact(p.jordan));
    }
    let opt = |x: Option<bool>| x.map_or(Expectation::Unknown, Expectation::exact);
    expected.insert(Property::Multiplicative.key(1), opt(multiplicative));
    expected.insert(Property::Bijective.key(1), opt(bijective));
    expected.insert(Property::StarLinear.key(1), Expectation::Pass);
    expected.insert(
        "unit_image_order_projection".into(),
        Expectation::exact(unit_projection),
    );
    GroundTruth {
        family: family.to_string(),
        expected,
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidDocument(msg)
}

fn herm_map(
    label: String,
    dom: SpaceModel,
    cod: SpaceModel,
    f: impl Fn(&CMatrix) -> CMatrix,
) -> Result<StarLinearMap> {
    StarLinearMap::from_fn(label, dom, cod, |x| Element::new((1, 1), f(x.coords())))
}

fn conjugate(u: &CMatrix, x: &CMatrix) -> CMatrix {
    u.adjoint() * x * u
}

impl MapFamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            MapFamilySpec::UnitaryConjugation { .. } => "unitary_conjugation",
            MapFamilySpec::Transpose { .. } => "transpose",
            MapFamilySpec::PermutationLattice { .. } => "permutation_lattice",
            MapFamilySpec::DirectSum { .. } => "direct_sum",
            MapFamilySpec::JordanMixture { .. } => "jordan_mixture",
            MapFamilySpec::PositiveNonpreserver { .. } => "positive_nonpreserver",
            MapFamilySpec::Scaling { .. } => "scaling",
            MapFamilySpec::CornerEmbedding { .. } => "corner_embedding",
            MapFamilySpec::BlockCompression { .. } => "block_compression",
            MapFamilySpec::CoordinateProjection { .. } => "coordinate_projection",
            MapFamilySpec::Identity { .. } => "identity",
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            MapFamilySpec::UnitaryConjugation { k, seed } => {
                format!("unitary_conjugation(k={k}, seed={seed})")
            }
            MapFamilySpec::Transpose { k } => format!("transpose(k={k})"),
            MapFamilySpec::PermutationLattice { d, seed } => {
                format!("permutation_lattice(d={d}, seed={seed})")
            }
            MapFamilySpec::DirectSum { blocks, seed, swap } => {
                format!(
                    "direct_sum(blocks={}, seed={seed}, swap={swap})",
                    join(blocks)
                )
            }
            MapFamilySpec::JordanMixture { k, seed, transpose } => {
                format!("jordan_mixture(k={k}, seed={seed}, transpose={transpose})")
            }
            MapFamilySpec::PositiveNonpreserver { k, seed } => {
                format!("positive_nonpreserver(k={k}, seed={seed})")
            }
            MapFamilySpec::Scaling { model, t } => format!("scaling(model={model}, t={t})"),
            MapFamilySpec::CornerEmbedding { k, into } => {
                format!("corner_embedding(k={k}, into={into})")
            }
            MapFamilySpec::BlockCompression { blocks, keep } => {
                format!("block_compression(blocks={}, keep={keep})", join(blocks))
            }
            MapFamilySpec::CoordinateProjection { d, keep } => {
                format!("coordinate_projection(d={d}, keep={})", join(keep))
            }
            MapFamilySpec::Identity { model } => format!("identity(model={model})"),
        }
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("+")
}

/// The map of a family and its ground truth.
pub fn gen_map(spec: &MapFamilySpec) -> Result<(StarLinearMap, GroundTruth)> {
    let label = spec.label();
    let name = spec.name();
    let positive_size = |k: usize| {
        if k == 0 {
            Err(invalid(format!("{name}: size must be positive")))
        } else {
            Ok(())
        }
    };
    match spec {
        MapFamilySpec::UnitaryConjugation { k, seed } => {
            positive_size(*k)?;
            let u = elements::random_unitary(*k, &mut stream_rng(*seed, "unitary-conjugation", 0));
            let m = SpaceModel::hermitian(*k);
            let map = herm_map(label, m.clone(), m, |x| conjugate(&u, x))?;
            Ok((
                map,
                truth(
                    name,
                    TRUTH_LEVELS,
                    |_| Profile::all(true),
                    Some(true),
                    Some(true),
                    true,
                ),
            ))
        }
        MapFamilySpec::Transpose { k } => {
            positive_size(*k)?;
            let m = SpaceModel::hermitian(*k);
            let map = herm_map(label, m.clone(), m, |x| x.transpose())?;
            Ok((map, transpose_truth(name, *k)))
        }
        MapFamilySpec::JordanMixture { k, seed, transpose } => {
            positive_size(*k)?;
            let u = elements::random_unitary(*k, &mut stream_rng(*seed, "jordan-mixture", 0));
            let m = SpaceModel::hermitian(*k);
            let t = *transpose;
            let map = herm_map(label, m.clone(), m, |x| {
                if t {
                    conjugate(&u, &x.transpose())
                } else {
                    conjugate(&u, x)
                }
            })?;
            let gt = if t {
                transpose_truth(name, *k)
            } else {
                truth(
                    name,
                    TRUTH_LEVELS,
                    |_| Profile::all(true),
                    Some(true),
                    Some(true),
                    true,
                )
            };
            Ok((map, gt))
        }
        MapFamilySpec::PermutationLattice { d, seed } => {
            positive_size(*d)?;
            let perm = permutation(*d, *seed);
            let m = SpaceModel::lattice(*d);
            let map = StarLinearMap::from_fn(label, m.clone(), m, |x| {
                let v: Vec<f64> = perm.iter().map(|&i| x.coords()[(i, 0)].re).collect();
                Element::from_reals(&v)
            })?;
            Ok((
                map,
                truth(
                    name,
                    1,
                    |_| Profile::all(true),
                    Some(true),
                    Some(true),
                    true,
                ),
            ))
        }
        MapFamilySpec::DirectSum { blocks, seed, swap } => {
            if blocks.is_empty() || blocks.contains(&0) {
                return Err(invalid(format!("{name}: blocks must be positive")));
            }
            let dom = SpaceModel::hermitian_blocks(blocks);
            let u = elements::block_unitary(&dom, &mut stream_rng(*seed, "direct-sum", 0));
            let (cod, perm) = if *swap {
                let rev: Vec<usize> = blocks.iter().rev().copied().collect();
                (SpaceModel::hermitian_blocks(&rev), block_reversal(blocks))
            } else {
                let n = dom.size();
                (dom.clone(), CMatrix::identity(n, n))
            };
            let map = herm_map(label, dom, cod, |x| {
                &perm * conjugate(&u, x) * perm.adjoint()
            })?;
            Ok((
                map,
                truth(
                    name,
                    TRUTH_LEVELS,
                    |_| Profile::all(true),
                    Some(true),
                    Some(true),
                    true,
                ),
            ))
        }
        MapFamilySpec::PositiveNonpreserver { k, seed } => {
            if *k < 2 {
                return Err(invalid(format!("{name}: needs k >= 2")));
            }
            let u =
                elements::random_unitary(*k, &mut stream_rng(*seed, "positive-nonpreserver", 0));
            let m = SpaceModel::hermitian(*k);
            let map = herm_map(label, m.clone(), m, |x| {
                (x + conjugate(&u, x)) * c(0.5, 0.0)
            })?;
            let at = |_| Profile {
                unital: true,
                positive: true,
                isometry: false,
                order_isometry: false,
                abs: false,
                jordan: false,
            };
            Ok((map, truth(name, TRUTH_LEVELS, at, Some(false), None, true)))
        }
        MapFamilySpec::Scaling { model, t } => {
            let t = *t;
            if !t.is_finite() {
                return Err(invalid(format!("{name}: t must be finite")));
            }
            let map = StarLinearMap::from_fn(label, model.clone(), model.clone(), |x| x.scale(t))?;
            let idem = t == 0.0 || t == 1.0;
            let at = |_| Profile {
                unital: t == 1.0,
                positive: t >= 0.0,
                isometry: t.abs() == 1.0,
                order_isometry: t == 1.0,
                abs: t >= 0.0,
                jordan: idem,
            };
            let levels = if model.is_hermitian() {
                TRUTH_LEVELS
            } else {
                1
            };
            Ok((
                map,
                truth(name, levels, at, Some(idem), Some(t != 0.0), idem),
            ))
        }
        MapFamilySpec::CornerEmbedding { k, into } => {
            positive_size(*k)?;
            if into <= k {
                return Err(invalid(format!("{name}: target size must exceed k")));
            }
            let (k, into) = (*k, *into);
            let map = herm_map(
                label,
                SpaceModel::hermitian(k),
                SpaceModel::hermitian(into),
                |x| {
                    let mut y = CMatrix::zeros(into, into);
                    y.view_mut((0, 0), (k, k)).copy_from(x);
                    y
                },
            )?;
            let at = |_| Profile {
                unital: false,
                ..Profile::all(true)
            };
            Ok((
                map,
                truth(name, TRUTH_LEVELS, at, Some(true), Some(false), true),
            ))
        }
        MapFamilySpec::BlockCompression { blocks, keep } => {
            if blocks.is_empty() || blocks.contains(&0) || *keep >= blocks.len() {
                return Err(invalid(format!(
                    "{name}: need positive blocks and keep < blocks"
                )));
            }
            let dom = SpaceModel::hermitian_blocks(blocks);
            let off: usize = blocks[..*keep].iter().sum();
            let k = blocks[*keep];
            let map = herm_map(label, dom, SpaceModel::hermitian(k), |x| {
                x.view((off, off), (k, k)).into_owned()
            })?;
            let whole = blocks.len() == 1;
            let at = |_| Profile {
                isometry: whole,
                order_isometry: whole,
                ..Profile::all(true)
            };
            Ok((
                map,
                truth(name, TRUTH_LEVELS, at, Some(true), Some(whole), true),
            ))
        }
        MapFamilySpec::CoordinateProjection { d, keep } => {
            let mut sorted = keep.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if keep.is_empty() || sorted.len() != keep.len() || keep.iter().any(|&i| i >= *d) {
                return Err(invalid(format!(
                    "{name}: keep must list distinct indices below d"
                )));
            }
            let keep = keep.clone();
            let whole = keep.len() == *d;
            let map = StarLinearMap::from_fn(
                label,
                SpaceModel::lattice(*d),
                SpaceModel::lattice(keep.len()),
                |x| {
                    let v: Vec<f64> = keep.iter().map(|&i| x.coords()[(i, 0)].re).collect();
                    Element::from_reals(&v)
                },
            )?;
            let at = |_| Profile {
                isometry: whole,
                order_isometry: whole,
                ..Profile::all(true)
            };
            Ok((map, truth(name, 1, at, Some(true), Some(whole), true)))
        }
        MapFamilySpec::Identity { model } => {
            let map = StarLinearMap::identity(model).with_label(label);
            let levels = if model.is_hermitian() {
                TRUTH_LEVELS
            } else {
                1
            };
            Ok((
                map,
                truth(
                    name,
                    levels,
                    |_| Profile::all(true),
                    Some(true),
                    Some(true),
                    true,
                ),
            ))
        }
    }
}

fn transpose_truth(name: &str, k: usize) -> GroundTruth {
    let trivial = k == 1;
    let at = |n: usize| {
        let ok = trivial || n == 1;
        Profile {
            unital: true,
            ..Profile::all(ok)
        }
    };
    truth(name, TRUTH_LEVELS, at, Some(trivial), Some(true), true)
}

/// Seeded permutation of `0..d` (Fisher–Yates).
fn permutation(d: usize, seed: u64) -> Vec<usize> {
    use rand::Rng;
    let mut rng = stream_rng(seed, "permutation", 0);
    let mut p: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Permutation matrix taking `a₁ ⊕ … ⊕ a_m` to `a_m ⊕ … ⊕ a₁`.
fn block_reversal(blocks: &[usize]) -> CMatrix {
    let n: usize = blocks.iter().sum();
    let mut p = CMatrix::zeros(n, n);
    let mut src = Vec::new();
    let mut off = 0;
    for &k in blocks {
        src.push(off);
        off += k;
    }
    let mut dst = 0;
    for (i, &k) in blocks.iter().enumerate().rev() {
        for t in 0..k {
            p[(dst + t, src[i] + t)] = c(1.0, 0.0);
        }
        dst += k;
    }
    p
}

/// A fault injected into a generated map or model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// `|·|` through an unclamped square root of `v* v`.
    NoClamp,
    /// Action perturbed by `δ · (multiplication by i)`, bypassing the
    /// star-linearity check.
    NoStar,
}

impl Fault {
    pub fn apply_model(self, model: &SpaceModel) -> SpaceModel {
        match self {
            Fault::NoClamp => model.clone().without_sqrt_clamp(),
            _ => model.clone(),
        }
    }

    pub fn apply(self, map: StarLinearMap) -> StarLinearMap {
        match self {
            Fault::None => map,
            Fault::NoClamp => {
                let (d, c) = (
                    self.apply_model(map.domain()),
                    self.apply_model(map.codomain()),
                );
                map.with_models(d, c)
            }
            Fault::NoStar => {
                let j = times_i_matrix(map.codomain());
                let action = map.action() + (j * map.action()) * 0.25;
                StarLinearMap::unchecked(
                    map.label().to_string(),
                    map.domain().clone(),
                    map.codomain().clone(),
                    action,
                )
            }
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fault::None => "none",
            Fault::NoClamp => "no-clamp",
            Fault::NoStar => "no-star",
        })
    }
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Fault::None),
            "no-clamp" => Ok(Fault::NoClamp),
            "no-star" => Ok(Fault::NoStar),
            _ => Err(invalid(format!(
                "unknown fault `{s}` (none, no-clamp, no-star)"
            ))),
        }
    }
}

/// `count` specs cycling through every family, Hermitian sizes 2 and 3,
/// each seeded from `(seed, index)`.
pub fn map_matrix(count: usize, seed: u64) -> Vec<MapFamilySpec> {
    const SCALES: [f64; 6] = [2.0, 0.5, -1.0, 1.0, -0.5, 0.0];
    (0..count)
        .map(|i| {
            let s = derive_seed(seed, "map-matrix", i as u64);
            let round = i / 13;
            let k = 2 + (round % 2);
            match i % 13 {
                0 => MapFamilySpec::UnitaryConjugation { k, seed: s },
                1 => MapFamilySpec::Transpose { k },
                2 => MapFamilySpec::PermutationLattice {
                    d: 3 + round % 3,
                    seed: s,
                },
                3 => MapFamilySpec::DirectSum {
                    blocks: if round % 2 == 0 {
                        vec![1, 2]
                    } else {
                        vec![2, 1]
                    },
                    seed: s,
                    swap: round % 3 != 0,
                },
                4 => MapFamilySpec::JordanMixture {
                    k,
                    seed: s,
                    transpose: true,
                },
                5 => MapFamilySpec::JordanMixture {
                    k,
                    seed: s,
                    transpose: false,
                },
                6 => MapFamilySpec::PositiveNonpreserver { k, seed: s },
                7 => MapFamilySpec::Scaling {
                    model: SpaceModel::hermitian(k),
                    t: SCALES[round % SCALES.len()],
                },
                8 => MapFamilySpec::CornerEmbedding { k: 2, into: 3 },
                9 => MapFamilySpec::BlockCompression {
                    blocks: if round % 2 == 0 {
                        vec![2, 1]
                    } else {
                        vec![1, 2]
                    },
                    keep: round % 2,
                },
                10 => MapFamilySpec::CoordinateProjection {
                    d: 3,
                    keep: if round % 2 == 0 { vec![0, 2] } else { vec![1] },
                },
                11 => MapFamilySpec::Identity {
                    model: SpaceModel::hermitian(k),
                },
                _ => MapFamilySpec::Scaling {
                    model: SpaceModel::lattice(2 + round % 3),
                    t: SCALES[(round + 3) % SCALES.len()],
                },
            }
        })
        .collect()
}

/// 100 maps over every family.
pub fn default_matrix(seed: u64) -> Vec<MapFamilySpec> {
    map_matrix(100, seed)
}

/// `name:key=value,key=value`, e.g. `transpose:k=2`,
/// `scaling:model=hermitian:2,t=0.5`, `direct_sum:blocks=1+2,seed=3`.
/// Lists are written with `+`.
impl FromStr for MapFamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        const NAMES: [&str; 11] = [
            "unitary_conjugation",
            "transpose",
            "permutation_lattice",
            "direct_sum",
            "jordan_mixture",
            "positive_nonpreserver",
            "scaling",
            "corner_embedding",
            "block_compression",
            "coordinate_projection",
            "identity",
        ];
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        if !NAMES.contains(&name) {
            return Err(Error::UnknownFamily(name.to_string()));
        }
        let mut obj = serde_json::Map::new();
        obj.insert("family".into(), name.into());
        for kv in rest.split(',').filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value, found `{kv}`")))?;
            obj.insert(k.to_string(), parse_value(name, k, v));
        }
        serde_json::from_value(serde_json::Value::Object(obj))
            .map_err(|e| invalid(format!("{s}: {e}")))
    }
}

fn parse_value(family: &str, key: &str, v: &str) -> serde_json::Value {
    use serde_json::Value;
    let list = key == "blocks" || (family == "coordinate_projection" && key == "keep");
    if list {
        let xs: Option<Vec<Value>> = v
            .split('+')
            .map(|x| x.parse::<u64>().ok().map(Value::from))
            .collect();
        if let Some(xs) = xs {
            return Value::Array(xs);
        }
    }
    if let Ok(i) = v.parse::<u64>() {
        return Value::from(i);
    }
    if let Ok(x) = v.parse::<f64>() {
        return Value::from(x);
    }
    if let Ok(b) = v.parse::<bool>() {
        return Value::from(b);
    }
    Value::from(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_matrix_entry_builds() {
        for spec in map_matrix(60, 9) {
            let (map, gt) = gen_map(&spec).unwrap();
            assert_eq!(gt.family, spec.name());
            assert!(!map.label().is_empty());
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let a = gen_map(&MapFamilySpec::UnitaryConjugation { k: 3, seed: 4 })
            .unwrap()
            .0;
        let b = gen_map(&MapFamilySpec::UnitaryConjugation { k: 3, seed: 4 })
            .unwrap()
            .0;
        assert_eq!(a.action(), b.action());
    }

    #[test]
    fn swapped_direct_sum_changes_codomain() {
        let (m, _) = gen_map(&MapFamilySpec::DirectSum {
            blocks: vec![1, 2],
            seed: 1,
            swap: true,
        })
        .unwrap();
        assert_eq!(m.codomain().to_string(), "hermitian:2+1");
        assert!(m.is_bijective());
    }

    #[test]
    fn spec_strings() {
        let s: MapFamilySpec = "scaling:model=hermitian:2,t=0.5".parse().unwrap();
        assert_eq!(
            s,
            MapFamilySpec::Scaling {
                model: SpaceModel::hermitian(2),
                t: 0.5
            }
        );
        let s: MapFamilySpec = "block_compression:blocks=2+2,keep=0".parse().unwrap();
        assert_eq!(
            s,
            MapFamilySpec::BlockCompression {
                blocks: vec![2, 2],
                keep: 0
            }
        );
        let s: MapFamilySpec = "coordinate_projection:d=3,keep=0+2".parse().unwrap();
        assert_eq!(
            s,
            MapFamilySpec::CoordinateProjection {
                d: 3,
                keep: vec![0, 2]
            }
        );
        let s: MapFamilySpec = "coordinate_projection:d=3,keep=1".parse().unwrap();
        assert_eq!(
            s,
            MapFamilySpec::CoordinateProjection {
                d: 3,
                keep: vec![1]
            }
        );
        assert!(matches!(
            "qubit:k=2".parse::<MapFamilySpec>(),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn no_star_fault_breaks_star_linearity() {
        let (m, _) = gen_map(&MapFamilySpec::Transpose { k: 2 }).unwrap();
        let f = Fault::NoStar.apply(m);
        assert!(!f.star_linear_verdict(&crate::Tolerance::default()).passed());
    }
}
