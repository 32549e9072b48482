//! Batch verification: every bound on every instance, tallied per theorem id.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generate::{generate, Instance, InstanceSpec, SpectrumSpec, SubspaceMode};
use crate::bounds::{
    apriori_constant_corollary, apriori_invariant_quadratic, apriori_mixed_theorem, apriori_spread_partial,
    check_invariant, consecutive_eigenvalue_bound, dkn_certificate, eigenlist_distance_bound,
    fem_reference_bounds, mixed_bound_cos, mixed_bound_tan, quadratic_aposteriori, rayleigh,
    residual_projection_bound, squared_mixed_bounds, tan_theta_classical, tan_theta_improved, BoundReport,
    FemRegime, Separation,
};
use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;
use crate::subspace::SubspaceBasis;

/// Caps the worker count of [`verify_all`] / [`verify_specs`].
pub const THREADS_ENV: &str = "RITZ_BOUNDS_THREADS";

/// Every theorem id a verification run reports on, in run order.
pub const ALL_IDS: &[&str] = &[
    "eigenlist-distance",
    "mixed-cos",
    "mixed-tan",
    "mixed-cos-squared",
    "mixed-tan-squared",
    "residual-projection",
    "spread-partial",
    "apriori-mixed",
    "invariant-residual-sin2",
    "invariant-quadratic",
    "constant-spread",
    "constant-spread-2sqrt2",
    "constant-invariant",
    "constant-invariant-2sqrt2",
    "fem-width-sin",
    "conjecture-spread-sin",
    "fem-width-sin2",
    "conjecture-spread-sin2",
    "fem-topk",
    "fem-topk-sign",
    "tan-classical",
    "tan-improved",
    "tan-compressed-residual",
    "separation-monotone",
    "quadratic-aposteriori",
    "quadratic-aposteriori-compressed",
    "consecutive-eigenvalues",
];

/// Ids evaluated but not claimed; their failures are not violations.
pub const CONJECTURE_IDS: &[&str] = &["conjecture-spread-sin", "conjecture-spread-sin2"];

/// Tag for a bound whose own conditions rule it out on this instance
/// (e.g. the `2√2` constant when `Θ_1 > π/4`).
const NOT_APPLICABLE: &str = "NotApplicable";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ran(Box<BoundReport>),
    Skipped(String),
}

/// Skip reason for a failed precondition: the error variant's name.
pub fn skip_tag(e: &Error) -> &'static str {
    match e {
        Error::NonFinite => "NonFinite",
        Error::NoConvergence { .. } => "NoConvergence",
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::Empty(_) => "Empty",
        Error::ZeroMatrix => "ZeroMatrix",
        Error::Singular => "Singular",
        Error::NotIsometry { .. } => "NotIsometry",
        Error::FullSpace => "FullSpace",
        Error::DegenerateCut { .. } => "DegenerateCut",
        Error::IndexOutOfRange { .. } => "IndexOutOfRange",
        Error::DivisionByZero { .. } => "DivisionByZero",
        Error::NegativeInput { .. } => "NegativeInput",
        Error::NegativeSingularValue { .. } => "NegativeSingularValue",
        Error::PreconditionViolated { .. } => "PreconditionViolated",
        Error::SingularT => "SingularT",
        Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
        Error::AnglesTooLarge { .. } => "AnglesTooLarge",
        Error::NotInvariant { .. } => "NotInvariant",
        Error::NotTopK => "NotTopK",
        Error::InvalidCertificate(_) => "InvalidCertificate",
        Error::NoSeparation { .. } => "NoSeparation",
        Error::HypothesisFailed { .. } => "HypothesisFailed",
        Error::SpecInvalid(_) => "SpecInvalid",
        Error::GridInvalid(_) => "GridInvalid",
        Error::Parse { .. } => "Parse",
        Error::Io(_) => "Io",
    }
}

struct Recorder {
    seed: Option<u64>,
    out: BTreeMap<&'static str, Outcome>,
}

impl Recorder {
    fn id(name: &str) -> &'static str {
        ALL_IDS
            .iter()
            .copied()
            .find(|&i| i == name)
            .unwrap_or_else(|| panic!("theorem id {name} missing from ALL_IDS"))
    }

    fn ran(&mut self, mut r: BoundReport) {
        r.metadata.seed = self.seed;
        self.out.entry(Self::id(&r.theorem_id)).or_insert(Outcome::Ran(Box::new(r)));
    }

    fn skip(&mut self, ids: &[&str], tag: &str) {
        for id in ids {
            self.out.entry(Self::id(id)).or_insert_with(|| Outcome::Skipped(tag.to_string()));
        }
    }

    /// Records every report, or the error's tag for each of `ids`.
    fn group(&mut self, ids: &[&str], res: Result<Vec<BoundReport>>) {
        match res {
            Ok(reports) => reports.into_iter().for_each(|r| self.ran(r)),
            Err(e) => self.skip(ids, skip_tag(&e)),
        }
    }

    fn one(&mut self, id: &str, res: Result<BoundReport>) {
        self.group(&[id], res.map(|r| vec![r]));
    }
}

/// Runs every bound on one instance. The result has exactly one entry per id
/// of [`ALL_IDS`], in that order.
pub fn verify_instance(inst: &Instance, rel_tol: f64) -> Vec<(&'static str, Outcome)> {
    verify_triple(&inst.a, &inst.x, &inst.y, Some(inst.spec.seed), rel_tol)
}

/// [`verify_instance`] for a triple that did not come from a spec (e.g. files).
pub fn verify_triple(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    seed: Option<u64>,
    rel_tol: f64,
) -> Vec<(&'static str, Outcome)> {
    let mut rec = Recorder {
        seed,
        out: BTreeMap::new(),
    };

    let ritz_pair = rayleigh(a, x).and_then(|rx| Ok((rx, rayleigh(a, y)?)));
    rec.one(
        "eigenlist-distance",
        ritz_pair.and_then(|(rx, ry)| {
            let t = x.matrix().adjoint_matmul(y.matrix())?;
            eigenlist_distance_bound(&rx.rho, &ry.rho, &t, rel_tol)
        }),
    );
    rec.one("mixed-cos", mixed_bound_cos(a, x, y, rel_tol));
    rec.one("mixed-tan", mixed_bound_tan(a, x, y, rel_tol));
    rec.group(
        &["mixed-cos-squared", "mixed-tan-squared"],
        squared_mixed_bounds(a, x, y, rel_tol).map(Vec::from),
    );
    rec.one("residual-projection", residual_projection_bound(a, x, y, rel_tol));
    rec.one("spread-partial", apriori_spread_partial(a, x, y, rel_tol));
    rec.one("apriori-mixed", apriori_mixed_theorem(a, x, y, rel_tol));

    let invariance = check_invariant(a, x).map(|_| ());
    let invariant = invariance.is_ok();
    if let Err(e) = &invariance {
        let tag = skip_tag(e);
        rec.skip(
            &[
                "invariant-residual-sin2",
                "invariant-quadratic",
                "constant-invariant",
                "constant-invariant-2sqrt2",
                "fem-width-sin2",
                "conjecture-spread-sin2",
                "fem-topk",
                "fem-topk-sign",
                "tan-classical",
                "tan-improved",
                "tan-compressed-residual",
                "separation-monotone",
                "quadratic-aposteriori",
                "quadratic-aposteriori-compressed",
            ],
            tag,
        );
    }

    if invariant {
        rec.group(
            &["invariant-residual-sin2", "invariant-quadratic"],
            apriori_invariant_quadratic(a, x, y, rel_tol).map(Vec::from),
        );
    }
    rec.group(
        &["constant-spread", "constant-spread-2sqrt2", "constant-invariant", "constant-invariant-2sqrt2"],
        apriori_constant_corollary(a, x, y, invariant, rel_tol),
    );
    // without an error the 2√2 forms are only absent when Θ_1 > π/4
    rec.skip(&["constant-spread-2sqrt2", "constant-invariant-2sqrt2"], NOT_APPLICABLE);

    let fem_ids = [
        "fem-width-sin",
        "conjecture-spread-sin",
        "fem-width-sin2",
        "conjecture-spread-sin2",
        "fem-topk",
        "fem-topk-sign",
    ];
    if invariant {
        match fem_reference_bounds(a, x, y, FemRegime::TopK, rel_tol) {
            Ok(r) => rec.group(&fem_ids, Ok(r)),
            Err(Error::NotTopK) => {
                rec.skip(&["fem-topk", "fem-topk-sign"], "NotTopK");
                rec.group(&fem_ids, fem_reference_bounds(a, x, y, FemRegime::Invariant, rel_tol));
            }
            Err(e) => rec.skip(&fem_ids, skip_tag(&e)),
        }
    } else {
        rec.group(&fem_ids, fem_reference_bounds(a, x, y, FemRegime::General, rel_tol));
    }

    if invariant {
        let ambient = dkn_certificate(a, x, y);
        match &ambient {
            Ok(Separation::Certified(c)) => rec.one("tan-classical", tan_theta_classical(a, x, y, c, rel_tol)),
            Ok(Separation::NoSeparation { .. }) => rec.skip(&["tan-classical"], "NoSeparation"),
            Err(e) => rec.skip(&["tan-classical"], skip_tag(e)),
        }
        let improved_ids = ["tan-improved", "tan-compressed-residual", "separation-monotone"];
        let improved = tan_theta_improved(a, x, y, rel_tol);
        match &improved {
            Ok(imp) => {
                rec.ran(imp.improved.clone());
                match &imp.corollary {
                    Some(r) => rec.ran(r.clone()),
                    None => rec.skip(&["tan-compressed-residual"], "NoSeparation"),
                }
                match &imp.monotonicity {
                    Some(r) => rec.ran(r.clone()),
                    // δ' = ∞ (X + Y = X) or no ambient certificate
                    None => rec.skip(&["separation-monotone"], NOT_APPLICABLE),
                }
            }
            Err(e) => rec.skip(&improved_ids, skip_tag(e)),
        }

        match ambient.as_ref().ok().and_then(Separation::delta) {
            Some(delta) => rec.one("quadratic-aposteriori", quadratic_aposteriori(a, x, y, delta, rel_tol)),
            None => rec.skip(&["quadratic-aposteriori"], "NoSeparation"),
        }
        match &improved {
            Ok(imp) if imp.delta_prime.is_finite() => {
                let r = quadratic_aposteriori(a, x, y, imp.delta_prime, rel_tol).map(|mut r| {
                    r.theorem_id = "quadratic-aposteriori-compressed".into();
                    r
                });
                rec.one("quadratic-aposteriori-compressed", r);
            }
            Ok(_) => rec.skip(&["quadratic-aposteriori-compressed"], NOT_APPLICABLE),
            Err(e) => rec.skip(&["quadratic-aposteriori-compressed"], skip_tag(e)),
        }
    }

    rec.one(
        "consecutive-eigenvalues",
        consecutive_eigenvalue_bound(a, y, rel_tol).map(|c| c.report),
    );

    rec.skip(ALL_IDS, NOT_APPLICABLE);
    ALL_IDS
        .iter()
        .map(|id| (*id, rec.out.remove(id).expect("every id recorded")))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: BTreeMap<String, usize>,
    /// `false` for conjectures: their failures are not violations.
    pub must_hold: bool,
}

impl Tally {
    pub fn total(&self) -> usize {
        self.passed + self.failed + self.skipped.values().sum::<usize>()
    }

    pub fn skipped_total(&self) -> usize {
        self.skipped.values().sum()
    }

    pub fn violations(&self) -> usize {
        if self.must_hold {
            self.failed
        } else {
            0
        }
    }
}

/// A report worth a second look, with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub trial: usize,
    pub spec: InstanceSpec,
    pub theorem_id: String,
    pub margin: f64,
    /// `violation`, `conjecture_failed` or `flagged`.
    pub kind: String,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instances: usize,
    pub tallies: BTreeMap<String, Tally>,
    /// Smallest verdict margin seen per theorem over the instances it ran on.
    pub worst_margins: BTreeMap<String, f64>,
    pub flagged: Vec<Flagged>,
    pub elapsed_ms: u128,
}

impl RunReport {
    pub fn violations(&self) -> usize {
        self.tallies.values().map(Tally::violations).sum()
    }

    pub fn has_violations(&self) -> bool {
        self.violations() > 0
    }

    /// Same report with the timing field cleared, for determinism checks.
    pub fn without_timing(&self) -> Self {
        Self {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    fn absorb(&mut self, trial: usize, spec: &InstanceSpec, outcomes: Vec<(&'static str, Outcome)>) {
        self.instances += 1;
        for (id, outcome) in outcomes {
            let tally = self.tallies.entry(id.to_string()).or_insert_with(|| Tally {
                must_hold: !CONJECTURE_IDS.contains(&id),
                ..Tally::default()
            });
            match outcome {
                Outcome::Skipped(tag) => *tally.skipped.entry(tag).or_default() += 1,
                Outcome::Ran(r) => {
                    debug_assert_eq!(tally.must_hold, r.must_hold, "{id}");
                    let margin = r.verdict.min_margin();
                    let worst = self.worst_margins.entry(id.to_string()).or_insert(f64::INFINITY);
                    *worst = worst.min(margin);
                    let kind = if r.verdict.holds {
                        tally.passed += 1;
                        (!r.flags.is_empty()).then_some("flagged")
                    } else {
                        tally.failed += 1;
                        Some(if r.must_hold { "violation" } else { "conjecture_failed" })
                    };
                    if let Some(kind) = kind {
                        self.flagged.push(Flagged {
                            trial,
                            spec: spec.clone(),
                            theorem_id: id.to_string(),
                            margin,
                            kind: kind.to_string(),
                            flags: r.flags.clone(),
                        });
                    }
                }
            }
        }
    }
}

/// `Instant::now` panics on `wasm32-unknown-unknown`; timing is reported as 0 there.
fn clock() -> Option<Instant> {
    (!cfg!(target_arch = "wasm32")).then(Instant::now)
}

fn run_one(spec: &InstanceSpec, rel_tol: f64) -> Result<Vec<(&'static str, Outcome)>> {
    Ok(verify_instance(&generate(spec)?, rel_tol))
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

#[cfg(feature = "parallel")]
fn run_batch(specs: &[InstanceSpec], rel_tol: f64) -> Vec<Result<Vec<(&'static str, Outcome)>>> {
    use rayon::prelude::*;
    let work = || specs.par_iter().map(|s| run_one(s, rel_tol)).collect();
    match thread_cap().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(work),
        None => work(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_batch(specs: &[InstanceSpec], rel_tol: f64) -> Vec<Result<Vec<(&'static str, Outcome)>>> {
    let _ = thread_cap();
    specs.iter().map(|s| run_one(s, rel_tol)).collect()
}

/// Verifies a list of instances; results are aggregated in list order.
/// Fails only on an invalid spec.
pub fn verify_specs(specs: &[InstanceSpec], rel_tol: f64) -> Result<RunReport> {
    if specs.is_empty() {
        return Err(Error::SpecInvalid("trials must be >= 1".into()));
    }
    for s in specs {
        s.validate()?;
    }
    let start = clock();
    let mut report = RunReport::default();
    for (trial, (spec, res)) in specs.iter().zip(run_batch(specs, rel_tol)).enumerate() {
        report.absorb(trial, spec, res?);
    }
    report.elapsed_ms = start.map_or(0, |s| s.elapsed().as_millis());
    Ok(report)
}

/// `trials` instances of `spec`, trial `i` seeded with `spec.seed + i`.
pub fn verify_all(spec: &InstanceSpec, trials: usize, rel_tol: f64) -> Result<RunReport> {
    let specs: Vec<InstanceSpec> = (0..trials as u64).map(|i| spec.with_seed(spec.seed.wrapping_add(i))).collect();
    verify_specs(&specs, rel_tol)
}

/// `n` specs with `d ∈ [4, 10]`, `k ∈ [1, d/2]`, cycling through random pairs
/// and invariant subspaces perturbed by `ε ∈ {1e-3, 1e-1}`; spectra are
/// uniform or clustered.
pub fn mixed_suite(n: usize, seed: u64) -> Vec<InstanceSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let d = rng.gen_range(4..=10);
            let k = rng.gen_range(1..=d / 2);
            let subspace_mode = match i % 3 {
                0 => SubspaceMode::RandomPair,
                1 => SubspaceMode::InvariantPlusPerturbation { eps: 1e-3 },
                _ => SubspaceMode::InvariantPlusPerturbation { eps: 1e-1 },
            };
            let spectrum = if rng.gen_bool(0.5) {
                SpectrumSpec::Uniform { lo: -5.0, hi: 5.0 }
            } else {
                SpectrumSpec::Clustered { gap: rng.gen_range(0.0..2.0) }
            };
            InstanceSpec {
                d,
                k,
                spectrum,
                subspace_mode,
                seed: rng.gen(),
            }
        })
        .collect()
}
