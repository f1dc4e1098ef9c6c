//! Runs every suite over a matrix of generated maps and a few base spaces,
//! and the counterexample searches at the hypothesis boundaries.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::generators::families::{gen_map, Fault, MapFamilySpec};
use crate::maps::{kernel, projections, suites, Profile, Property, StarLinearMap};
use crate::matrix_order::{self, DEFAULT_LEVELS};
use crate::model::SpaceModel;
use crate::report::{ClassificationReport, Verdict, Witness};
use crate::rng::derive_seed;
use crate::{Error, Result, ToleranceConfig};

/// Outcome of one suite: its report and the assertions that failed, or the
/// precondition that kept it from running.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<ClassificationReport>,
    pub failures: Vec<String>,
}

impl SuiteResult {
    /// `required` verdicts must pass and every equivalence must agree.
    pub fn from_report(suite: &str, report: ClassificationReport, required: &[&str]) -> Self {
        let mut failures = Vec::new();
        for e in report.equivalences.iter().filter(|e| !e.agree) {
            let sides: Vec<String> = e.sides.iter().map(|(n, v)| format!("{n} = {v}")).collect();
            failures.push(format!("{} disagrees: {}", e.name, sides.join(", ")));
        }
        for key in required {
            match report.verdict(key) {
                Some(v) if v.failed() => {
                    let what = v.witness().map_or(String::new(), |w| w.description.clone());
                    failures.push(format!("{key} failed: {what}"));
                }
                _ => {}
            }
        }
        Self {
            suite: suite.to_string(),
            skipped: None,
            report: Some(report),
            failures,
        }
    }

    /// Every verdict of the report is an assertion.
    pub fn all_required(suite: &str, report: ClassificationReport) -> Self {
        let keys: Vec<String> = report.verdicts.keys().cloned().collect();
        let keys: Vec<&str> = keys.iter().map(String::as_str).collect();
        Self::from_report(suite, report, &keys)
    }

    fn from_result(suite: &str, result: Result<ClassificationReport>, required: &[&str]) -> Self {
        match result {
            Ok(r) => Self::from_report(suite, r, required),
            Err(e) if is_precondition(&e) => Self::skip(suite, e.to_string()),
            Err(e) => Self {
                suite: suite.to_string(),
                skipped: None,
                report: None,
                failures: vec![format!("suite error: {e}")],
            },
        }
    }

    fn skip(suite: &str, reason: impl Into<String>) -> Self {
        Self {
            suite: suite.to_string(),
            skipped: Some(reason.into()),
            report: None,
            failures: Vec::new(),
        }
    }

    pub fn ran(&self) -> bool {
        self.report.is_some()
    }

    /// Witnesses of the failed verdicts.
    pub fn witnesses(&self) -> Vec<(&String, &Witness)> {
        self.report
            .as_ref()
            .map_or_else(Vec::new, |r| r.failures().collect())
    }
}

fn is_precondition(e: &Error) -> bool {
    matches!(
        e,
        Error::Singular
            | Error::NotSurjective
            | Error::NotUnital
            | Error::NotAbsPreserving
            | Error::NotOrderProjection
            | Error::ModelMismatch(_)
            | Error::LatticeUnsupported
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapRun {
    pub spec: MapFamilySpec,
    pub map: String,
    pub suites: Vec<SuiteResult>,
    /// Classifier verdicts contradicting the family's construction.
    pub ground_truth: Vec<String>,
}

impl MapRun {
    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.suite == name)
    }

    pub fn consistent(&self) -> bool {
        self.ground_truth.is_empty() && self.suites.iter().all(|s| s.failures.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremRun {
    pub levels: usize,
    pub fault: Fault,
    pub spaces: Vec<SuiteResult>,
    pub maps: Vec<MapRun>,
}

impl TheoremRun {
    pub fn consistent(&self) -> bool {
        self.spaces.iter().all(|s| s.failures.is_empty())
            && self.maps.iter().all(MapRun::consistent)
    }

    /// `"<map or space> / <suite>: <failure>"` for every failure.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.spaces {
            let name = s.report.as_ref().map_or("space", |r| r.map.as_str());
            out.extend(
                s.failures
                    .iter()
                    .map(|f| format!("{name} / {}: {f}", s.suite)),
            );
        }
        for m in &self.maps {
            for s in &m.suites {
                out.extend(
                    s.failures
                        .iter()
                        .map(|f| format!("{} / {}: {f}", m.map, s.suite)),
                );
            }
            out.extend(
                m.ground_truth
                    .iter()
                    .map(|f| format!("{} / ground truth: {f}", m.map)),
            );
        }
        out
    }

    /// Witnesses attached to failed verdicts, labelled by map and suite.
    pub fn witnesses(&self) -> Vec<(String, Witness)> {
        let mut out = Vec::new();
        for s in &self.spaces {
            for (k, w) in s.witnesses() {
                out.push((format!("{} / {k}", s.suite), w.clone()));
            }
        }
        for m in &self.maps {
            for s in &m.suites {
                if s.failures.is_empty() {
                    continue;
                }
                for (k, w) in s.witnesses() {
                    out.push((format!("{} / {} / {k}", m.map, s.suite), w.clone()));
                }
            }
        }
        out
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "theorem suite: {} maps, levels up to {}, fault {}",
            self.maps.len(),
            self.levels,
            self.fault
        );
        for r in &self.spaces {
            let status = if r.failures.is_empty() {
                "ok"
            } else {
                "FAILED"
            };
            let name = r.report.as_ref().map_or("", |r| r.map.as_str());
            let _ = writeln!(s, "  {:<14} {name}: {status}", r.suite);
        }
        for m in &self.maps {
            let ran: Vec<&str> = m
                .suites
                .iter()
                .filter(|r| r.ran())
                .map(|r| r.suite.as_str())
                .collect();
            let status = if m.consistent() { "ok" } else { "FAILED" };
            let _ = writeln!(s, "  {:<40} {status} [{}]", m.map, ran.join(", "));
        }
        let failures = self.failures();
        if failures.is_empty() {
            let _ = writeln!(s, "all equivalences agree");
        } else {
            let _ = writeln!(s, "{} failure(s):", failures.len());
            for f in failures {
                let _ = writeln!(s, "  {f}");
            }
        }
        s
    }
}

/// Base spaces for the matricial suites.
pub fn default_spaces() -> Vec<SpaceModel> {
    vec![SpaceModel::hermitian(2), SpaceModel::hermitian(3)]
}

/// Every suite whose preconditions hold, on one (possibly faulted) map.
pub fn run_map(
    spec: &MapFamilySpec,
    levels: usize,
    fault: Fault,
    config: &ToleranceConfig,
) -> Result<MapRun> {
    use Property::*;
    let (map, truth) = gen_map(spec)?;
    let map = fault.apply(map);
    let profile = Profile::new(&map, config);
    let mut out = Vec::new();

    let star = profile.verdict(StarLinear, 1);
    let mut star_report = ClassificationReport::new(map.label());
    star_report.insert(StarLinear.key(1), star);
    out.push(SuiteResult::from_report(
        "star_linear",
        star_report,
        &["star_linear"],
    ));

    out.push(SuiteResult::from_report(
        "prop16",
        suites::prop16_with(&profile),
        &[],
    ));

    if profile.holds(AbsPreserving, 1) {
        out.push(SuiteResult::from_result(
            "kernel",
            kernel::kernel_suite(&map, config),
            &[
                "kernel_parts_in_kernel",
                "kernel_generated_by_positive_part",
                "kernel_abs_closed",
                "kernel_order_ideal",
            ],
        ));
        if !map.is_injective() {
            out.push(SuiteResult::from_result(
                "quotient",
                kernel::quotient_suite(&map, config),
                &[
                    "quotient_axioms",
                    "quotient_abs_well_defined",
                    "induced_map_bijective",
                    "induced_map_abs_preserving",
                ],
            ));
        }
    } else {
        out.push(SuiteResult::skip(
            "kernel",
            Error::NotAbsPreserving.to_string(),
        ));
    }

    out.push(SuiteResult::from_result(
        "prop21",
        suites::prop21_with(&profile),
        &[],
    ));
    out.push(SuiteResult::from_result(
        "theorem15",
        suites::theorem15_with(&profile),
        &[],
    ));
    out.push(SuiteResult::from_result(
        "cor22",
        suites::cor22_with(&profile),
        &[],
    ));
    if map.is_bijective() {
        out.push(SuiteResult::from_result(
            "inverse",
            suites::inverse_with(&profile),
            &["inverse_composition"],
        ));
    }

    out.push(SuiteResult::from_result(
        "order_projections",
        projections::op_preservation_suite(&map, config),
        &[
            "order_projections_preserved",
            "order_projection_matches_idempotent",
        ],
    ));
    out.push(SuiteResult::from_result(
        "abs_compatibility",
        projections::abs_compat_preservation_suite(&map, config),
        &["abs_compatibility_preserved"],
    ));

    out.push(SuiteResult::from_result(
        "complete",
        matrix_order::complete_with(&profile, levels),
        &[],
    ));
    out.push(SuiteResult::from_result(
        "cor26",
        matrix_order::cor26_with(&profile),
        &["block_trick_agreement"],
    ));
    out.push(SuiteResult::from_result(
        "three_isometry",
        matrix_order::three_isometry_with(&profile),
        &[],
    ));

    let ground_truth = truth.disagreements(&profile.report());
    Ok(MapRun {
        spec: spec.clone(),
        map: map.label().to_string(),
        suites: out,
        ground_truth,
    })
}

/// Matricial suites on each base space.
pub fn run_spaces(
    spaces: &[SpaceModel],
    fault: Fault,
    config: &ToleranceConfig,
) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    for base in spaces {
        let base = fault.apply_model(base);
        for (name, result) in [
            ("def17", matrix_order::def17_suite(&base, config)),
            ("prop20", matrix_order::prop20_suite(&base, config)),
        ] {
            out.push(match result {
                Ok(r) => SuiteResult::all_required(name, r),
                Err(e) => SuiteResult::from_result(name, Err(e), &[]),
            });
        }
    }
    out
}

/// All suites across `specs` and `spaces`.
pub fn run_theorem_suite(
    specs: &[MapFamilySpec],
    spaces: &[SpaceModel],
    levels: usize,
    fault: Fault,
    config: &ToleranceConfig,
) -> Result<TheoremRun> {
    config.validate()?;
    let maps = specs
        .iter()
        .map(|s| run_map(s, levels, fault, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoremRun {
        levels,
        fault,
        spaces: run_spaces(spaces, fault, config),
        maps,
    })
}

// ------------------------------------------------------------ searches

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchEntry {
    pub target: String,
    pub map: String,
    /// Whether a witness must exist.
    pub expect_witness: bool,
    pub found: bool,
    pub verdict: Verdict,
}

impl SearchEntry {
    pub fn ok(&self) -> bool {
        self.found == self.expect_witness
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub entries: Vec<SearchEntry>,
}

impl SearchReport {
    pub fn ok(&self) -> bool {
        self.entries.iter().all(SearchEntry::ok)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let status = match (e.expect_witness, e.found) {
                (true, true) => "witness found",
                (true, false) => "MISSING witness",
                (false, false) => "consistent",
                (false, true) => "UNEXPECTED witness",
            };
            let _ = writeln!(s, "{}: {} on {}", e.target, status, e.map);
            if let Some(w) = e.verdict.witness() {
                let _ = write!(s, "  {}", w.description);
                if let Some(r) = w.residual {
                    let _ = write!(s, ", residual {r:.3e}");
                }
                if let Some(l) = w.min_eigenvalue {
                    let _ = write!(s, ", image min eigenvalue {l:.3e}");
                }
                let _ = writeln!(s);
            }
        }
        s
    }
}

fn search_entry(target: &str, map: &StarLinearMap, expect: bool, verdict: Verdict) -> SearchEntry {
    SearchEntry {
        target: target.to_string(),
        map: map.label().to_string(),
        expect_witness: expect,
        found: verdict.failed(),
        verdict,
    }
}

/// Witness searches within `config.samples` draws: the level-2
/// `|·|`-preservation failure of the transpose, a positive unital map that is
/// not `|·|`-preserving, scalings that are not order isometries, and a
/// unitary conjugation where no witness may exist.
pub fn counterexample_search(fault: Fault, config: &ToleranceConfig) -> Result<SearchReport> {
    use Property::*;
    config.validate()?;
    let seed = |i| derive_seed(config.seed, "search", i);
    let build =
        |spec: MapFamilySpec| -> Result<StarLinearMap> { Ok(fault.apply(gen_map(&spec)?.0)) };
    let mut entries = Vec::new();

    let t = build(MapFamilySpec::Transpose { k: 2 })?;
    let p = Profile::new(&t, config);
    entries.push(search_entry(
        "transpose level-2 abs-preservation",
        &t,
        true,
        p.verdict(AbsPreserving, 2),
    ));

    let avg = build(MapFamilySpec::PositiveNonpreserver {
        k: 2,
        seed: seed(1),
    })?;
    let p = Profile::new(&avg, config);
    let premise = p.verdict(Positive, 1).and(p.verdict(Unital, 1));
    let verdict = if premise.passed() {
        p.verdict(AbsPreserving, 1)
    } else {
        premise
    };
    entries.push(search_entry(
        "positive unital map not abs-preserving",
        &avg,
        true,
        verdict,
    ));

    for t in [2.0, 0.5] {
        let s = build(MapFamilySpec::Scaling {
            model: SpaceModel::hermitian(2),
            t,
        })?;
        let p = Profile::new(&s, config);
        entries.push(search_entry(
            "scaling not an order isometry",
            &s,
            true,
            p.verdict(OrderIsometry, 1),
        ));
    }

    let u = build(MapFamilySpec::UnitaryConjugation {
        k: 2,
        seed: seed(2),
    })?;
    let p = Profile::new(&u, config);
    let v = (1..=DEFAULT_LEVELS)
        .map(|n| p.verdict(AbsPreserving, n).and(p.verdict(OrderIsometry, n)))
        .fold(p.verdict(Unital, 1), Verdict::and);
    entries.push(search_entry("unitary conjugation (control)", &u, false, v));

    Ok(SearchReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::families::map_matrix;

    fn config() -> ToleranceConfig {
        ToleranceConfig::default().with_samples(30).with_seed(11)
    }

    #[test]
    fn small_matrix_is_consistent() {
        let run = run_theorem_suite(
            &map_matrix(26, 4),
            &[SpaceModel::hermitian(2)],
            2,
            Fault::None,
            &config(),
        )
        .unwrap();
        assert!(run.consistent(), "{}", run.render_text());
        assert!(run.witnesses().is_empty());
    }

    #[test]
    fn unclamped_abs_is_detected() {
        let specs = map_matrix(13, 4);
        let run = run_theorem_suite(
            &specs,
            &[SpaceModel::hermitian(2)],
            2,
            Fault::NoClamp,
            &config(),
        )
        .unwrap();
        assert!(!run.consistent());
        assert!(!run.witnesses().is_empty());
    }

    #[test]
    fn star_fault_is_detected() {
        let specs = [MapFamilySpec::Transpose { k: 2 }];
        let run = run_theorem_suite(&specs, &[], 2, Fault::NoStar, &config()).unwrap();
        assert!(!run.consistent());
        assert!(run.failures().iter().any(|f| f.contains("star_linear")));
        assert!(!run.witnesses().is_empty());
    }

    #[test]
    fn empty_matrix_is_vacuous() {
        let run = run_theorem_suite(&[], &[], 3, Fault::None, &config()).unwrap();
        assert!(run.consistent());
    }

    #[test]
    fn search_finds_expected_witnesses() {
        let r = counterexample_search(Fault::None, &config()).unwrap();
        assert!(r.ok(), "{}", r.render_text());
        let w = r.entries[0].verdict.witness().unwrap();
        assert!(w.min_eigenvalue.unwrap() <= -0.5);
    }
}
