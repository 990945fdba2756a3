//! Numerical certification of the greedy-versus-widths inequalities on
//! concrete instances, including a step-by-step trace of the dyadic
//! width-decay argument.
//!
//! Every check is a [`BoundReport`] comparing a left-hand side with a
//! right-hand side, each tagged with the direction in which it is known to
//! be accurate. The outcome follows from those directions: a passing check
//! is certified only when the left side is an upper bound and the right side
//! a lower bound, and a failing check is a certified violation only when the
//! left side is a lower bound and the right side an upper bound.

mod theorems;
mod trace;

pub use theorems::{
    dalpha_points, run_example_dalpha, verify_cor35, verify_cor35_lp, verify_cor_lp, verify_thm2n,
    verify_thm31, verify_thm32, DalphaExample, ImageSet, LogBase, Thm31Params, ThmTwoNOutcome,
    DALPHA_TOL, LIFT_AUDIT_TOL, LIFT_NORM_TOL,
};
pub use trace::{
    trace_proof_31, trace_proof_31_unchecked, Branch, ProofTrace31, Relation, Strategy, TraceBlock,
    TraceCheck, TraceOptions, TRACE_TAGS, TRACE_TOL,
};

use alloc::collections::BTreeMap;
use alloc::string::String;
use sha2::{Digest, Sha256};

use crate::widths::EstimateKind;

/// Default relative tolerance of [`BoundReport::pass`].
pub const REPORT_TOL: f64 = 1e-8;

/// A number together with the direction in which it bounds the true quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub value: f64,
    pub kind: EstimateKind,
}

impl Estimate {
    pub fn new(value: f64, kind: EstimateKind) -> Self {
        Estimate { value, kind }
    }

    pub fn exact(value: f64) -> Self {
        Estimate::new(value, EstimateKind::Exact)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TheoremId {
    /// σₙ ≤ C₀C₁2^μ16^s √log(2n) n^{μ−s}.
    Thm31,
    /// The ℓ_p instance of [`TheoremId::Thm31`] with γₙ ≤ n^{|1/2−1/p|}.
    CorLp,
    /// Geometric mean of σ₀…σ_{3n−1} against 3e²Γₙ(E)Γₙ(X) times the width mean.
    Thm32,
    /// [`TheoremId::Thm32`] with Gelfand widths.
    Thm32Gelfand,
    /// σ_{3n−1} ≤ 3e²Γₙ(X)(∏ d_k)^{1/n} for a Euclidean domain.
    Cor35,
    /// σ_{3n−1} ≤ C·3e²·n^{|1/p−1/2|−s} under a power-law width premise.
    Cor35Lp,
    /// σ_{2n−1} ≤ e√2 Γₙ(X)(∏ d_k)^{1/n} for the full image of a Euclidean ball.
    Thm2n,
    /// (∏ d_k)^{1/n} ≤ Γₙ(T).
    Lemma1,
    /// (∏ dᵏ)^{1/n} ≤ Γₙ(T).
    Lemma1Gelfand,
    /// Γₙ(T) ≤ e n^{−1/2} ‖T|B₂‖ Γₙ(X).
    Lemma2,
    /// σₙ = (n+1)^{−α} for the scaled canonical basis in ℓ_q.
    ExampleDalpha,
    /// The twelve displayed inequalities of the dyadic argument.
    ProofTrace31,
}

impl TheoremId {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Thm31 => "thm31",
            TheoremId::CorLp => "cor_lp",
            TheoremId::Thm32 => "thm32",
            TheoremId::Thm32Gelfand => "thm32_gelfand",
            TheoremId::Cor35 => "cor35",
            TheoremId::Cor35Lp => "cor35_lp",
            TheoremId::Thm2n => "thm_2n",
            TheoremId::Lemma1 => "lemma1",
            TheoremId::Lemma1Gelfand => "lemma1_gelfand",
            TheoremId::Lemma2 => "lemma2",
            TheoremId::ExampleDalpha => "example_dalpha",
            TheoremId::ProofTrace31 => "proof_trace_31",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Outcome {
    /// Passes with an upper-bounded left side and a lower-bounded right side.
    Certified,
    /// Passes, and the bound directions would have exposed a violation.
    Consistent,
    /// Neither a certificate nor a violation can be read off.
    Inconclusive,
    /// Fails with a lower-bounded left side and an upper-bounded right side.
    Violated,
}

impl Outcome {
    pub fn decide(pass: bool, lhs: EstimateKind, rhs: EstimateKind) -> Outcome {
        if pass {
            if lhs.is_upper() && rhs.is_lower() {
                Outcome::Certified
            } else if lhs.is_lower() && rhs.is_upper() {
                Outcome::Consistent
            } else {
                Outcome::Inconclusive
            }
        } else if lhs.is_lower() && rhs.is_upper() {
            Outcome::Violated
        } else {
            Outcome::Inconclusive
        }
    }
}

/// Short stable hash of an instance description.
pub fn instance_hash(descriptor: &str) -> String {
    let digest = Sha256::digest(descriptor.as_bytes());
    digest
        .iter()
        .take(8)
        .map(|b| alloc::format!("{b:02x}"))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub instance: String,
    pub n: usize,
    pub lhs: f64,
    pub lhs_kind: EstimateKind,
    pub rhs: f64,
    pub rhs_kind: EstimateKind,
    /// rhs − lhs
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub outcome: Outcome,
    /// How each constant on the right-hand side was obtained.
    pub constants: BTreeMap<String, String>,
    pub note: Option<String>,
}

impl BoundReport {
    pub fn compare(
        theorem_id: TheoremId,
        descriptor: &str,
        n: usize,
        lhs: Estimate,
        rhs: Estimate,
    ) -> Self {
        let mut r = BoundReport {
            theorem_id,
            instance: instance_hash(descriptor),
            n,
            lhs: lhs.value,
            lhs_kind: lhs.kind,
            rhs: rhs.value,
            rhs_kind: rhs.kind,
            slack: rhs.value - lhs.value,
            tolerance: REPORT_TOL,
            pass: false,
            outcome: Outcome::Inconclusive,
            constants: BTreeMap::new(),
            note: None,
        };
        r.decide();
        r
    }

    fn decide(&mut self) {
        self.pass = self.slack >= -self.tolerance * self.rhs.abs().max(1.0);
        self.outcome = Outcome::decide(self.pass, self.lhs_kind, self.rhs_kind);
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.decide();
        self
    }

    pub fn with_constants(mut self, constants: BTreeMap<String, String>) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_constant(mut self, name: &str, provenance: impl Into<String>) -> Self {
        self.constants.insert(name.into(), provenance.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Marks the report inconclusive regardless of the comparison.
    pub fn inconclusive(mut self, note: impl Into<String>) -> Self {
        self.outcome = Outcome::Inconclusive;
        self.note = Some(note.into());
        self
    }

    pub fn is_violation(&self) -> bool {
        self.outcome == Outcome::Violated
    }
}
