//! Synthetic drift scenarios with known ground truth.
//!
//! A scenario builds an accuracy matrix from two independently controlled
//! effects, so the metrics can be tested against a construction where the
//! "right answer" is known in closed form:
//!
//! ```text
//! diagonal (oracle):      A(t, t)   = base_acc · (1 − difficulty_rate)^t
//! transfer target:        γ(h)      = max(floor_g, (1 − lag_rate)^h), capped at 1
//! forward cell:           A(t, t+h) = A(t+h, t+h) · γ(h)
//! backward cell:          A(t, τ)   = A(τ, τ) · γ(t − τ)       (full presence only)
//! ```
//!
//! everything clamped to `[0, 1]`. Powers are computed by iterated
//! multiplication (`p ← p · factor`), so every cell sharing an exponent
//! uses the identical rounded value. Transfer is modeled relative to the
//! eval-time oracle, which makes the transfer ratio the directly
//! controlled quantity: with no noise, the computed ratio of a generated
//! matrix reproduces `γ(h)` to within a unit or two in the last place.
//!
//! **Noise.** `noise_amp > 0` adds uniform jitter, reproducibly across
//! implementations. The algorithm is part of the format: seed a ChaCha8
//! generator with `seed` (`seed_from_u64`); for each cell `(t, τ)`, clone
//! it, set its stream id to `t · periods + τ`, and take one 64-bit draw
//! `x`. The draw maps to `u = (x >> 11) · 2⁻⁵³ ∈ [0, 1)`, the cell becomes
//! `clamp(value + noise_amp · (2u − 1), 0, 1)`. Per-cell streams make the
//! jitter independent of generation order.
//!
//! [`scenario_suite`] returns five canonical scenarios with
//! machine-checkable signatures, including a pair tuned to identical mean
//! in-domain/out-of-domain gaps but very different adaptation scores —
//! the two matrices an accuracy-gap column cannot tell apart.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{AccuracyMatrix, TimeAxis, MAX_LABELS};
use crate::metrics::{
    evaluate_model, EvaluateError, MatrixStats, MetricConfig, MetricReport,
};

/// Which cells of the matrix a scenario fills in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Presence {
    /// Every train/eval pair, backward cells included.
    Full,
    /// Eval at or after train time only.
    UpperTriangle,
    /// Forward band: eval between train time and `k` steps after it.
    Banded(usize),
}

impl Presence {
    /// Whether a scenario with this pattern fills cell `(train, eval)`.
    pub fn includes(&self, train: usize, eval: usize) -> bool {
        match self {
            Presence::Full => true,
            Presence::UpperTriangle => eval >= train,
            Presence::Banded(k) => eval >= train && eval - train <= *k,
        }
    }
}

impl std::fmt::Display for Presence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Presence::Full => write!(f, "full"),
            Presence::UpperTriangle => write!(f, "upper-triangle"),
            Presence::Banded(k) => write!(f, "banded:{k}"),
        }
    }
}

impl std::str::FromStr for Presence {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Presence::Full),
            "upper-triangle" => Ok(Presence::UpperTriangle),
            _ => s
                .strip_prefix("banded:")
                .and_then(|k| k.parse().ok())
                .map(Presence::Banded)
                .ok_or_else(|| ScenarioError::UnknownPresence(s.to_string())),
        }
    }
}

fn default_floor_g() -> f64 {
    0.3
}

fn default_presence() -> Presence {
    Presence::UpperTriangle
}

/// Parameters of one synthetic scenario.
///
/// Serializable as JSON; omitted fields take the documented defaults
/// (rates and noise 0, seed 0, `floor_g` 0.3, upper-triangle presence).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    /// Number of time periods (axis size), at least 2.
    pub periods: usize,
    /// Oracle accuracy at period 0, in (0, 1].
    pub base_acc: f64,
    /// Per-period multiplicative decay of the oracle diagonal, in [0, 1].
    #[serde(default)]
    pub difficulty_rate: f64,
    /// Per-offset multiplicative decay of the transfer target, in [0, 1].
    #[serde(default)]
    pub lag_rate: f64,
    /// Lower bound of the transfer target, in [0, 1].
    #[serde(default = "default_floor_g")]
    pub floor_g: f64,
    /// Uniform jitter amplitude, ≥ 0.
    #[serde(default)]
    pub noise_amp: f64,
    /// Seed for the jitter generator.
    #[serde(default)]
    pub seed: u64,
    /// Which cells to fill.
    #[serde(default = "default_presence")]
    pub presence: Presence,
}

/// Why a scenario spec is unusable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("a scenario needs at least 2 periods, got {periods}")]
    TooFewPeriods { periods: usize },
    #[error("a scenario axis is capped at {max} periods, got {periods}")]
    TooManyPeriods { periods: usize, max: usize },
    #[error("base accuracy {0} is outside (0, 1]")]
    BaseAccOutOfRange(f64),
    #[error("{name} {value} is outside [0, 1]")]
    RateOutOfRange { name: &'static str, value: f64 },
    #[error("noise amplitude {0} must be finite and non-negative")]
    NoiseAmpInvalid(f64),
    #[error("unknown presence pattern '{0}': expected full, upper-triangle, or banded:<k>")]
    UnknownPresence(String),
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.periods < 2 {
            return Err(ScenarioError::TooFewPeriods { periods: self.periods });
        }
        if self.periods > MAX_LABELS {
            return Err(ScenarioError::TooManyPeriods {
                periods: self.periods,
                max: MAX_LABELS,
            });
        }
        if !(self.base_acc > 0.0 && self.base_acc <= 1.0) {
            return Err(ScenarioError::BaseAccOutOfRange(self.base_acc));
        }
        for (name, value) in [
            ("difficulty rate", self.difficulty_rate),
            ("lag rate", self.lag_rate),
            ("transfer floor", self.floor_g),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ScenarioError::RateOutOfRange { name, value });
            }
        }
        if !(self.noise_amp >= 0.0 && self.noise_amp.is_finite()) {
            return Err(ScenarioError::NoiseAmpInvalid(self.noise_amp));
        }
        Ok(())
    }
}

/// Generate the accuracy matrix of a scenario. Deterministic for a fixed
/// spec, including the seed; labels are `t0`, `t1`, … and the model is
/// named `synthetic`.
pub fn generate(spec: &ScenarioSpec) -> Result<AccuracyMatrix, ScenarioError> {
    spec.validate()?;
    let p = spec.periods;

    // Iterated powers: index h holds the h-th power of the factor.
    let mut diagonal = Vec::with_capacity(p);
    let mut acc = spec.base_acc;
    for t in 0..p {
        if t > 0 {
            acc *= 1.0 - spec.difficulty_rate;
        }
        diagonal.push(acc.clamp(0.0, 1.0));
    }
    let mut transfer = Vec::with_capacity(p);
    let mut pow = 1.0f64;
    for h in 0..p {
        if h > 0 {
            pow *= 1.0 - spec.lag_rate;
        }
        transfer.push(pow.max(spec.floor_g).min(1.0));
    }

    let jitter_base = (spec.noise_amp > 0.0).then(|| ChaCha8Rng::seed_from_u64(spec.seed));
    let mut cells = Vec::new();
    for train in 0..p {
        for (eval, &oracle) in diagonal.iter().enumerate() {
            if !spec.presence.includes(train, eval) {
                continue;
            }
            let offset = eval.abs_diff(train);
            let mut value = (oracle * transfer[offset]).clamp(0.0, 1.0);
            if let Some(base) = &jitter_base {
                let mut rng = base.clone();
                rng.set_stream((train * p + eval) as u64);
                let unit = (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
                value = (value + spec.noise_amp * (2.0 * unit - 1.0)).clamp(0.0, 1.0);
            }
            cells.push((train, eval, value));
        }
    }

    let axis = TimeAxis::new((0..p).map(|t| format!("t{t}")))
        .expect("validated periods produce a valid axis");
    Ok(AccuracyMatrix::from_cells(axis, "synthetic", cells)
        .expect("generated cells are unique and in range"))
}

/// Base accuracy of the gap-matched lag member, solved numerically so the
/// member's mean in-domain minus out-of-domain accuracy gap lands on
/// exactly the same bits as the difficulty member's gap under IEEE double
/// arithmetic.
const GAP_MATCHED_BASE: f64 = 0.31348940562711647;

/// One machine-checkable property of a generated scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum SignatureCheck {
    /// Mean adaptation score equals the value bit-for-bit.
    MeanTasExactly(f64),
    /// Mean adaptation score is strictly below the value.
    MeanTasBelow(f64),
    /// Every evaluated stability horizon is data-limited.
    AllShTruncated,
    /// No drift is detected at any train time (all sentinels).
    AllDhTruncated,
    /// Mean in-domain minus out-of-domain accuracy is at least the bound.
    GapAtLeast(f64),
    /// Every present diagonal cell holds the same accuracy.
    FlatDiagonal,
    /// Present diagonal cells strictly decrease over time.
    StrictlyDecayingDiagonal,
    /// The stability horizon at one train time, exactly.
    ShAt { t: usize, value: usize, truncated: bool },
    /// The drift horizon at one train time, exactly.
    DhAt { t: usize, value: usize, truncated: bool },
}

impl SignatureCheck {
    pub fn describe(&self) -> String {
        match self {
            SignatureCheck::MeanTasExactly(v) => {
                format!("mean adaptation score equals {v} exactly")
            }
            SignatureCheck::MeanTasBelow(v) => {
                format!("mean adaptation score is strictly below {v}")
            }
            SignatureCheck::AllShTruncated => {
                "every stability horizon is data-limited".to_string()
            }
            SignatureCheck::AllDhTruncated => "no drift is ever detected".to_string(),
            SignatureCheck::GapAtLeast(b) => {
                format!("mean ID-OOD accuracy gap is at least {b}")
            }
            SignatureCheck::FlatDiagonal => "oracle accuracy stays flat".to_string(),
            SignatureCheck::StrictlyDecayingDiagonal => {
                "oracle accuracy strictly decays".to_string()
            }
            SignatureCheck::ShAt { t, value, truncated } => format!(
                "stability horizon at train time {t} is {value} step(s){}",
                if *truncated { ", data-limited" } else { "" }
            ),
            SignatureCheck::DhAt { t, value, truncated } => format!(
                "drift horizon at train time {t} is {value} step(s){}",
                if *truncated { ", never crossed" } else { "" }
            ),
        }
    }

    /// Evaluate the check against a generated matrix and its report.
    pub fn check(&self, matrix: &AccuracyMatrix, report: &MetricReport) -> (bool, String) {
        match self {
            SignatureCheck::MeanTasExactly(v) => {
                let got = report.aggregates().tas_mean;
                (got == *v, format!("observed {got}"))
            }
            SignatureCheck::MeanTasBelow(v) => {
                let got = report.aggregates().tas_mean;
                (got < *v, format!("observed {got}"))
            }
            SignatureCheck::AllShTruncated => {
                let ok = report.records().iter().all(|r| r.stability_horizon.truncated);
                (ok, format!("over {} record(s)", report.records().len()))
            }
            SignatureCheck::AllDhTruncated => {
                let ok = report.records().iter().all(|r| r.drift_horizon.truncated);
                (ok, format!("over {} record(s)", report.records().len()))
            }
            SignatureCheck::GapAtLeast(b) => match MatrixStats::compute(matrix) {
                Some(stats) => {
                    let gap = stats.id_avg - stats.ood_avg;
                    (gap >= *b, format!("observed gap {gap}"))
                }
                None => (false, "matrix has no forward cells to compare".to_string()),
            },
            SignatureCheck::FlatDiagonal => {
                let diag: Vec<f64> =
                    (0..matrix.periods()).filter_map(|t| matrix.get(t, t)).collect();
                let ok = diag.windows(2).all(|w| w[0] == w[1]);
                match (diag.first(), diag.last()) {
                    (Some(first), Some(last)) => {
                        (ok, format!("diagonal runs from {first} to {last}"))
                    }
                    _ => (false, "no diagonal cells".to_string()),
                }
            }
            SignatureCheck::StrictlyDecayingDiagonal => {
                let diag: Vec<f64> =
                    (0..matrix.periods()).filter_map(|t| matrix.get(t, t)).collect();
                let ok = diag.len() >= 2 && diag.windows(2).all(|w| w[0] > w[1]);
                match (diag.first(), diag.last()) {
                    (Some(first), Some(last)) => {
                        (ok, format!("diagonal runs from {first} to {last}"))
                    }
                    _ => (false, "no diagonal cells".to_string()),
                }
            }
            SignatureCheck::ShAt { t, value, truncated } => {
                match report.records().iter().find(|r| r.t == *t) {
                    Some(r) => {
                        let h = r.stability_horizon;
                        (
                            h.value == *value && h.truncated == *truncated,
                            format!("observed ({}, truncated={})", h.value, h.truncated),
                        )
                    }
                    None => (false, format!("train time {t} was not evaluated")),
                }
            }
            SignatureCheck::DhAt { t, value, truncated } => {
                match report.records().iter().find(|r| r.t == *t) {
                    Some(r) => {
                        let h = r.drift_horizon;
                        (
                            h.value == *value && h.truncated == *truncated,
                            format!("observed ({}, truncated={})", h.value, h.truncated),
                        )
                    }
                    None => (false, format!("train time {t} was not evaluated")),
                }
            }
        }
    }
}

/// A relation between two members of the suite.
#[derive(Debug, Clone, PartialEq)]
pub enum PairedRelation {
    /// The mean ID-OOD gaps of the two members match bit-for-bit.
    EqualGap,
    /// The right member's mean adaptation score is lower than the left's
    /// by at least the margin.
    TasLowerByAtLeast(f64),
    /// The left member's mean adaptation score is strictly greater.
    TasStrictlyGreater,
}

/// A check spanning two named suite members.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedCheck {
    pub left: &'static str,
    pub right: &'static str,
    pub relation: PairedRelation,
}

impl PairedCheck {
    pub fn describe(&self) -> String {
        match self.relation {
            PairedRelation::EqualGap => {
                format!("{} and {} have bit-identical mean ID-OOD gaps", self.left, self.right)
            }
            PairedRelation::TasLowerByAtLeast(m) => format!(
                "{} scores at least {m} below {} in mean adaptation",
                self.right, self.left
            ),
            PairedRelation::TasStrictlyGreater => format!(
                "{} has a strictly greater mean adaptation score than {}",
                self.left, self.right
            ),
        }
    }

    fn gap(matrix: &AccuracyMatrix) -> Option<f64> {
        MatrixStats::compute(matrix).map(|s| s.id_avg - s.ood_avg)
    }

    pub fn check(
        &self,
        left: (&AccuracyMatrix, &MetricReport),
        right: (&AccuracyMatrix, &MetricReport),
    ) -> (bool, String) {
        match self.relation {
            PairedRelation::EqualGap => match (Self::gap(left.0), Self::gap(right.0)) {
                (Some(l), Some(r)) => (l == r, format!("gaps {l} and {r}")),
                _ => (false, "a member has no forward cells".to_string()),
            },
            PairedRelation::TasLowerByAtLeast(margin) => {
                let l = left.1.aggregates().tas_mean;
                let r = right.1.aggregates().tas_mean;
                (l - r >= margin, format!("mean scores {l} vs {r}"))
            }
            PairedRelation::TasStrictlyGreater => {
                let l = left.1.aggregates().tas_mean;
                let r = right.1.aggregates().tas_mean;
                (l > r, format!("mean scores {l} vs {r}"))
            }
        }
    }
}

/// One canonical scenario plus its expected signature.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteMember {
    pub name: &'static str,
    /// The qualitative story this member tells.
    pub description: &'static str,
    pub spec: ScenarioSpec,
    pub checks: Vec<SignatureCheck>,
}

/// The canonical members plus cross-member checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSuite {
    pub members: Vec<SuiteMember>,
    pub paired: Vec<PairedCheck>,
}

/// The canonical scenario suite. All signatures are calibrated for the
/// default [`MetricConfig`], which is what [`run_scenario_suite`] uses.
pub fn scenario_suite() -> ScenarioSuite {
    let base = ScenarioSpec {
        periods: 10,
        base_acc: 0.8,
        difficulty_rate: 0.0,
        lag_rate: 0.0,
        floor_g: 0.3,
        noise_amp: 0.0,
        seed: 0,
        presence: Presence::UpperTriangle,
    };

    let members = vec![
        SuiteMember {
            name: "stationary",
            description: "nothing changes: perfect transfer, horizons limited only by data",
            spec: base.clone(),
            checks: vec![
                SignatureCheck::FlatDiagonal,
                SignatureCheck::MeanTasExactly(1.0),
                SignatureCheck::AllShTruncated,
                SignatureCheck::AllDhTruncated,
            ],
        },
        SuiteMember {
            name: "pure-difficulty",
            description: "the data gets harder but transfer stays perfect: a wide \
                          accuracy gap with nothing wrong about adaptation",
            spec: ScenarioSpec { base_acc: 0.9, difficulty_rate: 0.25, ..base.clone() },
            checks: vec![
                SignatureCheck::StrictlyDecayingDiagonal,
                SignatureCheck::GapAtLeast(0.15),
                SignatureCheck::MeanTasExactly(1.0),
                SignatureCheck::AllShTruncated,
            ],
        },
        SuiteMember {
            name: "pure-lag",
            description: "the oracle is flat but old models fall behind: pure \
                          adaptation failure",
            spec: ScenarioSpec { lag_rate: 0.1, ..base.clone() },
            checks: vec![
                SignatureCheck::FlatDiagonal,
                SignatureCheck::MeanTasBelow(1.0),
                SignatureCheck::ShAt { t: 0, value: 4, truncated: false },
                SignatureCheck::DhAt { t: 0, value: 2, truncated: false },
            ],
        },
        SuiteMember {
            name: "mixed",
            description: "mild difficulty decay and mild lag at once",
            spec: ScenarioSpec {
                base_acc: 0.9,
                difficulty_rate: 0.03,
                lag_rate: 0.08,
                ..base.clone()
            },
            checks: vec![
                SignatureCheck::StrictlyDecayingDiagonal,
                SignatureCheck::MeanTasBelow(1.0),
            ],
        },
        SuiteMember {
            name: "gap-matched-lag",
            description: "a lag scenario tuned to the same mean accuracy gap as \
                          pure-difficulty: the gap cannot tell them apart, the \
                          adaptation score can",
            spec: ScenarioSpec {
                base_acc: GAP_MATCHED_BASE,
                lag_rate: 0.2,
                floor_g: 0.2,
                ..base
            },
            checks: vec![
                SignatureCheck::FlatDiagonal,
                SignatureCheck::GapAtLeast(0.15),
                SignatureCheck::MeanTasBelow(1.0),
            ],
        },
    ];

    let paired = vec![
        PairedCheck {
            left: "pure-difficulty",
            right: "gap-matched-lag",
            relation: PairedRelation::EqualGap,
        },
        PairedCheck {
            left: "pure-difficulty",
            right: "gap-matched-lag",
            relation: PairedRelation::TasLowerByAtLeast(0.2),
        },
        PairedCheck {
            left: "mixed",
            right: "pure-lag",
            relation: PairedRelation::TasStrictlyGreater,
        },
    ];

    ScenarioSuite { members, paired }
}

/// The result of one signature or paired check.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    /// Member name, or `left vs right` for paired checks.
    pub subject: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// All outcomes of a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub outcomes: Vec<SuiteOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    /// One `[PASS]`/`[FAIL]` line per check plus a summary line.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let tag = if o.passed { "[PASS]" } else { "[FAIL]" };
            out.push_str(&format!("{tag} {}: {} ({})\n", o.subject, o.check, o.detail));
        }
        let failed = self.outcomes.iter().filter(|o| !o.passed).count();
        if failed == 0 {
            out.push_str(&format!("all {} checks passed\n", self.outcomes.len()));
        } else {
            out.push_str(&format!("{failed} of {} checks FAILED\n", self.outcomes.len()));
        }
        out
    }
}

/// Why the suite could not run (distinct from checks failing).
#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("scenario '{name}' failed to generate: {source}")]
    Generate {
        name: &'static str,
        #[source]
        source: ScenarioError,
    },
    #[error("scenario '{name}' failed to evaluate: {source}")]
    Evaluate {
        name: &'static str,
        #[source]
        source: EvaluateError,
    },
}

/// Generate and evaluate every suite member under the default
/// configuration, then run all signature and paired checks.
pub fn run_scenario_suite() -> Result<SuiteReport, SuiteError> {
    let suite = scenario_suite();
    let cfg = MetricConfig::default();

    let mut evaluated: Vec<(&'static str, AccuracyMatrix, MetricReport)> = Vec::new();
    for member in &suite.members {
        let matrix = generate(&member.spec)
            .map_err(|source| SuiteError::Generate { name: member.name, source })?;
        let report = evaluate_model(&matrix, &cfg)
            .map_err(|source| SuiteError::Evaluate { name: member.name, source })?;
        evaluated.push((member.name, matrix, report));
    }

    let mut outcomes = Vec::new();
    for member in &suite.members {
        let (_, matrix, report) = evaluated
            .iter()
            .find(|(name, _, _)| *name == member.name)
            .expect("every member was evaluated");
        for check in &member.checks {
            let (passed, detail) = check.check(matrix, report);
            outcomes.push(SuiteOutcome {
                subject: member.name.to_string(),
                check: check.describe(),
                passed,
                detail,
            });
        }
    }
    for pair in &suite.paired {
        let find = |name: &str| {
            evaluated
                .iter()
                .find(|(n, _, _)| *n == name)
                .map(|(_, m, r)| (m, r))
                .expect("paired checks name suite members")
        };
        let (passed, detail) = pair.check(find(pair.left), find(pair.right));
        outcomes.push(SuiteOutcome {
            subject: format!("{} vs {}", pair.left, pair.right),
            check: pair.describe(),
            passed,
            detail,
        });
    }
    Ok(SuiteReport { outcomes })
}
