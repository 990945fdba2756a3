//! The greedy algorithm: repeatedly select the element worst approximated by
//! the span of the elements selected so far.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::linalg::Vector;
use crate::sampling::rng;
use crate::spaces::{fingerprint_points, CompactSet, NormedSpace};
use crate::subspaces::{dist_to_subspace, Subspace};

/// Greedy steps stop once σ falls below this floor.
pub const SIGMA_FLOOR: f64 = 1e-12;
/// Relative width of the band inside which candidates count as tied.
pub const TIE_TOL: f64 = 1e-12;
/// Tolerance used by [`replay_verify`].
pub const REPLAY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    /// The lowest materialized index among tied maximizers.
    LowestIndex,
    /// A seeded uniform choice among tied maximizers.
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyOptions {
    pub n_max: usize,
    pub tie_break: TieBreak,
    /// Full recomputation interval of the incremental Euclidean residuals.
    pub audit_every: usize,
}

impl GreedyOptions {
    pub fn new(n_max: usize) -> Self {
        GreedyOptions {
            n_max,
            tie_break: TieBreak::LowestIndex,
            audit_every: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyTrace {
    pub selected: Vec<Vector>,
    pub selected_indices: Vec<usize>,
    pub sigmas: Vec<f64>,
    /// b_k with ‖b_k‖′ = 1, b_k ⟂ V_k and ⟨f_k, b_k⟩ = σ_k.
    pub certificates: Option<Vec<Vector>>,
    pub space: NormedSpace,
    pub set_fingerprint: String,
    /// True when the run stopped at the σ floor before reaching n_max.
    pub exhausted: bool,
}

impl GreedyTrace {
    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    /// σ_k, extended by zero past an exhausted trace.
    pub fn sigma(&self, k: usize) -> Option<f64> {
        match self.sigmas.get(k) {
            Some(&s) => Some(s),
            None if self.exhausted => Some(0.0),
            None => None,
        }
    }

    /// V_k = span{f_0, …, f_{k−1}}.
    pub fn span(&self, k: usize) -> Result<Subspace> {
        Subspace::from_vectors(
            &self.selected[..k.min(self.selected.len())],
            self.space.clone(),
        )
    }
}

pub fn run_greedy(set: &CompactSet, space: &NormedSpace, n_max: usize) -> Result<GreedyTrace> {
    run_greedy_with(set, space, &GreedyOptions::new(n_max))
}

pub fn run_greedy_with(
    set: &CompactSet,
    space: &NormedSpace,
    opts: &GreedyOptions,
) -> Result<GreedyTrace> {
    let points = set.materialize()?;
    run_greedy_on_points(&points, space, opts)
}

/// The greedy algorithm on an explicit point list.
pub fn run_greedy_on_points(
    points: &[Vector],
    space: &NormedSpace,
    opts: &GreedyOptions,
) -> Result<GreedyTrace> {
    if points.is_empty() {
        return Err(Error::config("the set is empty"));
    }
    for p in points {
        check_dim(space.dim(), p.len())?;
    }
    if opts.n_max > points.len() {
        return Err(Error::config(alloc::format!(
            "n_max = {} exceeds the {} points of the set",
            opts.n_max,
            points.len()
        )));
    }
    let mut state = State::new(points, space, opts);
    let mut exhausted = false;
    while state.sigmas.len() < opts.n_max {
        let dists = state.distances()?;
        let Some(choice) = state.choose(&dists) else {
            exhausted = true;
            break;
        };
        state.select(choice, dists[choice])?;
    }
    Ok(GreedyTrace {
        selected: state
            .selected_indices
            .iter()
            .map(|&i| points[i].clone())
            .collect(),
        selected_indices: state.selected_indices,
        sigmas: state.sigmas,
        certificates: Some(state.certificates),
        space: space.clone(),
        set_fingerprint: fingerprint_points(points),
        exhausted,
    })
}

struct State<'a> {
    points: &'a [Vector],
    space: &'a NormedSpace,
    opts: &'a GreedyOptions,
    selected_indices: Vec<usize>,
    is_selected: Vec<bool>,
    sigmas: Vec<f64>,
    certificates: Vec<Vector>,
    /// Residuals against the current span, kept for inner-product norms.
    residuals: Option<Vec<Vector>>,
    /// Orthonormal (in the space's inner product) basis of the current span.
    frame: Vec<Vector>,
    tie_rng: Option<crate::sampling::SeededRng>,
}

impl<'a> State<'a> {
    fn new(points: &'a [Vector], space: &'a NormedSpace, opts: &'a GreedyOptions) -> Self {
        State {
            points,
            space,
            opts,
            selected_indices: Vec::new(),
            is_selected: vec![false; points.len()],
            sigmas: Vec::new(),
            certificates: Vec::new(),
            residuals: space.is_inner_product().then(|| points.to_vec()),
            frame: Vec::new(),
            tie_rng: match opts.tie_break {
                TieBreak::LowestIndex => None,
                TieBreak::Seeded(seed) => Some(rng(seed)),
            },
        }
    }

    /// dist(g, V_k) for every point; selected points get zero.
    fn distances(&mut self) -> Result<Vec<f64>> {
        let k = self.selected_indices.len();
        if self.residuals.is_some() {
            let audit =
                k > 0 && self.opts.audit_every > 0 && k.is_multiple_of(self.opts.audit_every);
            if audit {
                self.recompute_residuals()?;
            }
            let residuals = self.residuals.as_ref().expect("checked above");
            return Ok(residuals
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    if self.is_selected[i] {
                        0.0
                    } else {
                        self.space.norm_unchecked(r)
                    }
                })
                .collect());
        }
        let span = self.current_span()?;
        self.points
            .iter()
            .enumerate()
            .map(|(i, g)| {
                if self.is_selected[i] {
                    Ok(0.0)
                } else {
                    dist_to_subspace(g, &span).map(|d| d.value)
                }
            })
            .collect()
    }

    fn current_span(&self) -> Result<Subspace> {
        let vs: Vec<Vector> = self
            .selected_indices
            .iter()
            .map(|&i| self.points[i].clone())
            .collect();
        Subspace::from_vectors(&vs, self.space.clone())
    }

    fn recompute_residuals(&mut self) -> Result<()> {
        let span = self.current_span()?;
        let fresh = self
            .points
            .iter()
            .map(|g| dist_to_subspace(g, &span).map(|d| g - d.approximant(&span)))
            .collect::<Result<Vec<_>>>()?;
        self.residuals = Some(fresh);
        Ok(())
    }

    fn choose(&mut self, dists: &[f64]) -> Option<usize> {
        let best = dists.iter().copied().fold(0.0_f64, f64::max);
        if best < SIGMA_FLOOR {
            return None;
        }
        let band = best - TIE_TOL * best;
        match self.tie_rng.as_mut() {
            None => dists.iter().position(|&d| d >= band),
            Some(r) => {
                let tied: Vec<usize> = (0..dists.len()).filter(|&i| dists[i] >= band).collect();
                Some(tied[r.random_range(0..tied.len())])
            }
        }
    }

    fn select(&mut self, i: usize, sigma: f64) -> Result<()> {
        let certificate = if let Some(residuals) = self.residuals.as_mut() {
            let mut r = residuals[i].clone();
            // reorthogonalize the new direction against the frame
            for q in &self.frame {
                let c = self.space.inner(&r, q).unwrap_or(0.0);
                r -= q * c;
            }
            let n = self.space.norm_unchecked(&r);
            let q = &r / n;
            for (j, res) in residuals.iter_mut().enumerate() {
                if j != i {
                    let c = self.space.inner(res, &q).unwrap_or(0.0);
                    *res -= &q * c;
                }
            }
            let b = self.space.norming_functional(&residuals[i]);
            residuals[i] = Vector::zeros(r.len());
            self.frame.push(q);
            b
        } else {
            let span = self.current_span()?;
            let d = dist_to_subspace(&self.points[i], &span)?;
            d.certificate
                .unwrap_or_else(|| self.space.norming_functional(&self.points[i]))
        };
        self.selected_indices.push(i);
        self.is_selected[i] = true;
        self.sigmas.push(sigma);
        self.certificates.push(certificate);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplayCheck {
    SelectedPoint,
    FirstIsMaxNorm,
    Monotone,
    SigmaIsDistance,
    Maximality,
    Exhaustion,
    Certificate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplayViolation {
    pub step: usize,
    pub check: ReplayCheck,
    pub amount: f64,
}

/// Outcome of an independent re-check of a greedy trace.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplayReport {
    pub pass: bool,
    /// Largest violation over all checks (0 when everything holds exactly).
    pub max_violation: f64,
    /// Every check that exceeded the replay tolerance.
    pub violations: Vec<ReplayViolation>,
}

/// Re-derives every σ_k from scratch and re-checks the trace invariants.
pub fn replay_verify(trace: &GreedyTrace, set: &CompactSet) -> Result<ReplayReport> {
    let points = set.materialize()?;
    let fp = fingerprint_points(&points);
    if fp != trace.set_fingerprint {
        return Err(Error::StaleTrace {
            expected: trace.set_fingerprint.clone(),
            found: fp,
        });
    }
    let space = &trace.space;
    let mut all: Vec<ReplayViolation> = Vec::new();
    let mut record = |step: usize, check: ReplayCheck, amount: f64| {
        all.push(ReplayViolation {
            step,
            check,
            amount,
        });
    };
    let scale = |s: f64| s.abs().max(1.0);

    for (k, &i) in trace.selected_indices.iter().enumerate() {
        let same = points.get(i).is_some_and(|p| *p == trace.selected[k]);
        record(
            k,
            ReplayCheck::SelectedPoint,
            if same { 0.0 } else { f64::INFINITY },
        );
    }
    if let Some(&s0) = trace.sigmas.first() {
        let max_norm = points
            .iter()
            .map(|p| space.norm_unchecked(p))
            .fold(0.0, f64::max);
        record(
            0,
            ReplayCheck::FirstIsMaxNorm,
            (s0 - max_norm).abs() / scale(max_norm),
        );
    }
    for k in 1..trace.sigmas.len() {
        record(
            k,
            ReplayCheck::Monotone,
            (trace.sigmas[k] - trace.sigmas[k - 1]).max(0.0),
        );
    }
    for k in 0..=trace.sigmas.len() {
        let span = trace.span(k)?;
        let mut worst = 0.0_f64;
        for p in &points {
            worst = worst.max(dist_to_subspace(p, &span)?.value);
        }
        if k < trace.sigmas.len() {
            let sigma = trace.sigmas[k];
            let own = dist_to_subspace(&trace.selected[k], &span)?;
            record(
                k,
                ReplayCheck::SigmaIsDistance,
                (sigma - own.value).abs() / scale(sigma),
            );
            record(
                k,
                ReplayCheck::Maximality,
                (worst - sigma).max(0.0) / scale(sigma),
            );
            if let Some(b) = trace.certificates.as_ref().and_then(|c| c.get(k)) {
                let norm_excess = (space.dual_norm_unchecked(b) - 1.0).max(0.0);
                let orth = span
                    .basis_vectors()
                    .iter()
                    .map(|v| v.dot(b).abs())
                    .fold(0.0, f64::max);
                let attain = (sigma - trace.selected[k].dot(b)).max(0.0);
                record(
                    k,
                    ReplayCheck::Certificate,
                    norm_excess.max(orth).max(attain),
                );
            }
        } else if trace.exhausted {
            record(k, ReplayCheck::Exhaustion, worst);
        }
    }
    let max_violation = all.iter().map(|v| v.amount).fold(0.0, f64::max);
    let violations: Vec<ReplayViolation> = all
        .into_iter()
        .filter(|v| !(v.amount <= REPLAY_TOL))
        .collect();
    Ok(ReplayReport {
        pass: violations.is_empty(),
        max_violation,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::vec;

    fn dalpha_cloud(alpha: f64, m: usize) -> CompactSet {
        let pts = (0..m)
            .map(|k| {
                let mut v = Vector::zeros(m);
                v[k] = ((k + 1) as f64).powf(-alpha);
                v
            })
            .collect();
        CompactSet::point_cloud(pts).unwrap()
    }

    #[test]
    fn diagonal_example_sigmas() {
        let set = dalpha_cloud(1.0, 8);
        let space = NormedSpace::lp(8, 4.0).unwrap();
        let trace = run_greedy(&set, &space, 8).unwrap();
        assert_eq!(trace.selected_indices, (0..8).collect::<Vec<_>>());
        for (k, s) in trace.sigmas.iter().enumerate() {
            assert_relative_eq!(*s, 1.0 / (k + 1) as f64, epsilon = 1e-12);
        }
        let report = replay_verify(&trace, &set).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn singleton() {
        let set = CompactSet::point_cloud(vec![Vector::from_vec(vec![1.0, 0.0])]).unwrap();
        let trace = run_greedy(&set, &NormedSpace::lp(2, 3.0).unwrap(), 1).unwrap();
        assert_eq!(trace.sigmas, vec![1.0]);
    }

    #[test]
    fn rejects_oversized_runs() {
        let set = CompactSet::point_cloud(vec![Vector::from_vec(vec![1.0, 0.0])]).unwrap();
        assert!(run_greedy(&set, &NormedSpace::euclidean(2).unwrap(), 2).is_err());
    }

    #[test]
    fn stops_when_the_set_is_exhausted() {
        let pts = vec![
            Vector::from_vec(vec![1.0, 0.0, 0.0]),
            Vector::from_vec(vec![0.0, 1.0, 0.0]),
            Vector::from_vec(vec![1.0, 1.0, 0.0]),
        ];
        let set = CompactSet::point_cloud(pts).unwrap();
        for p in [1.0, 2.0, 3.0, f64::INFINITY] {
            let trace = run_greedy(&set, &NormedSpace::lp(3, p).unwrap(), 3).unwrap();
            assert_eq!(trace.len(), 2);
            assert!(trace.exhausted);
            assert!(replay_verify(&trace, &set).unwrap().pass);
        }
    }

    #[test]
    fn perturbed_sigma_is_caught_at_its_index() {
        let set = dalpha_cloud(1.0, 6);
        let space = NormedSpace::lp(6, 4.0).unwrap();
        let mut trace = run_greedy(&set, &space, 6).unwrap();
        trace.sigmas[3] += 1e-3;
        let report = replay_verify(&trace, &set).unwrap();
        assert!(!report.pass);
        assert!(report
            .violations
            .iter()
            .any(|v| v.step == 3 && v.check == ReplayCheck::SigmaIsDistance));
        assert!(report.violations.iter().all(|v| v.step == 3 || v.step == 4));
    }

    #[test]
    fn stale_traces_are_rejected() {
        let set = dalpha_cloud(1.0, 4);
        let trace = run_greedy(&set, &NormedSpace::lp(4, 4.0).unwrap(), 2).unwrap();
        let other = dalpha_cloud(2.0, 4);
        assert!(matches!(
            replay_verify(&trace, &other),
            Err(Error::StaleTrace { .. })
        ));
    }

    #[test]
    fn ties_go_to_the_lowest_index_or_a_seeded_branch() {
        let pts: Vec<Vector> = (0..4)
            .map(|i| {
                let mut v = Vector::zeros(4);
                v[i] = 1.0;
                v
            })
            .collect();
        let set = CompactSet::point_cloud(pts.clone()).unwrap();
        let space = NormedSpace::euclidean(4).unwrap();
        let trace = run_greedy(&set, &space, 4).unwrap();
        assert_eq!(trace.selected_indices, vec![0, 1, 2, 3]);
        let mut opts = GreedyOptions::new(4);
        opts.tie_break = TieBreak::Seeded(3);
        let a = run_greedy_with(&set, &space, &opts).unwrap();
        let b = run_greedy_with(&set, &space, &opts).unwrap();
        assert_eq!(a, b);
        assert!(replay_verify(&a, &set).unwrap().pass);
    }
}
