//! Spectra along a field path with fixed direction and varying magnitude.
//!
//! Each grid point is diagonalized independently. Tracks then follow states
//! from point to point by greedy maximum-overlap matching, and crossings are
//! located at interior minima of the gap between energy-adjacent tracks.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use crate::analysis::{projection_probabilities, StateComposition};
use crate::eigen::{solve, EigenSolution};
use crate::error::{Error, Result};
use crate::hamiltonian::{FieldVector, HamiltonianModel, SpinSystem};
use crate::minimize::golden_section;
use crate::par::{try_map, Execution};
use crate::spin::{parity_of, Parity, Projection};

/// Gaps below this (K) are classified as real crossings.
pub const REAL_CROSSING_TOL: f64 = 1e-9;
/// Matched overlaps below this flag a segment for refinement.
pub const OVERLAP_THRESHOLD: f64 = 0.5;
/// Bracket width (T) at which gap refinement stops.
pub const REFINE_TOL: f64 = 1e-13;
/// Grid steps between a crossing and the points used for its diabatic labels.
pub const LABEL_OFFSET: usize = 5;
/// Bisection levels used to resolve a poorly matched segment.
pub const MAX_REFINE_DEPTH: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepGrid {
    pub b_min: f64,
    pub b_max: f64,
    /// Number of field points, both ends included.
    pub steps: usize,
    pub theta: f64,
    pub phi: f64,
}

impl SweepGrid {
    pub fn new(b_min: f64, b_max: f64, steps: usize, theta: f64, phi: f64) -> Result<Self> {
        if !(b_min >= 0.0 && b_min.is_finite() && b_max.is_finite()) {
            return Err(Error::Domain(format!("field range [{b_min}, {b_max}] must be finite and nonnegative")));
        }
        if b_min > b_max {
            return Err(Error::Domain(format!("b_min = {b_min} exceeds b_max = {b_max}")));
        }
        if steps < 2 {
            return Err(Error::Domain(format!("a sweep needs at least 2 points, got {steps}")));
        }
        // validates the angles
        let f = FieldVector::new(b_min, theta, phi)?;
        Ok(Self { b_min, b_max, steps, theta: f.theta, phi: f.phi })
    }

    pub fn easy_axis(b_min: f64, b_max: f64, steps: usize) -> Result<Self> {
        Self::new(b_min, b_max, steps, 0.0, 0.0)
    }

    pub fn hard_axis(b_min: f64, b_max: f64, steps: usize) -> Result<Self> {
        Self::new(b_min, b_max, steps, PI / 2.0, 0.0)
    }

    pub fn step(&self) -> f64 {
        (self.b_max - self.b_min) / (self.steps - 1) as f64
    }

    pub fn field_at(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            self.b_max
        } else {
            self.b_min + k as f64 * self.step()
        }
    }

    pub fn fields(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.field_at(k)).collect()
    }

    pub fn field_vector(&self, b0: f64) -> Result<FieldVector> {
        FieldVector::new(b0, self.theta, self.phi)
    }
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self { b_min: 0.0, b_max: 1.0, steps: 1000, theta: 0.0, phi: 0.0 }
    }
}

#[derive(Clone, Debug)]
pub struct FieldPoint {
    pub b: f64,
    pub solution: EigenSolution,
}

/// Track-to-slot map at every point of a sweep.
///
/// Track ids are the energy slots at the first point; `slots[k][t]` is the
/// energy slot occupied by track `t` at point `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackAssignment {
    pub slots: Vec<Vec<usize>>,
    /// Smallest matched overlap on each segment `k → k+1`.
    pub min_overlaps: Vec<f64>,
    /// Segments whose matched overlap stayed below [`OVERLAP_THRESHOLD`].
    pub flagged: Vec<usize>,
}

impl TrackAssignment {
    pub fn n_tracks(&self) -> usize {
        self.slots.first().map_or(0, Vec::len)
    }

    /// Track occupying `slot` at point `k`.
    pub fn track_at(&self, k: usize, slot: usize) -> usize {
        self.slots[k].iter().position(|&s| s == slot).expect("slots form a permutation")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrackPoint<'a> {
    pub b: f64,
    pub energy: f64,
    pub coefficients: &'a [Complex64],
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub system: SpinSystem,
    pub grid: SweepGrid,
    pub points: Vec<FieldPoint>,
    pub tracks: TrackAssignment,
    /// Dominant zero-field (or first-point) projection of each track.
    pub track_labels: Vec<Projection>,
}

impl SweepResult {
    pub fn n_tracks(&self) -> usize {
        self.tracks.n_tracks()
    }

    pub fn slot(&self, track: usize, k: usize) -> usize {
        self.tracks.slots[k][track]
    }

    pub fn track_energy(&self, track: usize, k: usize) -> f64 {
        self.points[k].solution.value(self.slot(track, k))
    }

    pub fn track_vector(&self, track: usize, k: usize) -> &[Complex64] {
        self.points[k].solution.vector(self.slot(track, k))
    }

    pub fn track(&self, track: usize) -> impl Iterator<Item = TrackPoint<'_>> + '_ {
        (0..self.points.len()).map(move |k| TrackPoint {
            b: self.points[k].b,
            energy: self.track_energy(track, k),
            coefficients: self.track_vector(track, k),
        })
    }

    pub fn composition(&self, track: usize, k: usize) -> Result<StateComposition> {
        projection_probabilities(self.track_vector(track, k))
    }

    /// Dominant projection of a track at point `k`.
    pub fn dominant(&self, track: usize, k: usize) -> Result<Projection> {
        Ok(self.composition(track, k)?.dominant)
    }
}

/// Builds and diagonalizes the Hamiltonian at one field.
pub fn diagonalize(model: &HamiltonianModel, field: &FieldVector) -> Result<EigenSolution> {
    solve(&model.hamiltonian(field)).map_err(|e| e.at_field(field.b0))
}

pub fn sweep_spectrum(system: &SpinSystem, grid: &SweepGrid) -> Result<SweepResult> {
    sweep_spectrum_with(system, grid, Execution::default())
}

pub fn sweep_spectrum_with(system: &SpinSystem, grid: &SweepGrid, exec: Execution) -> Result<SweepResult> {
    let model = HamiltonianModel::new(*system);
    let fields = grid.fields();
    let points = try_map(exec, fields.len(), |k| {
        let b = fields[k];
        let field = grid.field_vector(b)?;
        Ok(FieldPoint { b, solution: diagonalize(&model, &field)? })
    })?;

    let segments = try_map(exec, points.len() - 1, |k| {
        let (lo, hi) = (&points[k], &points[k + 1]);
        resolve_segment(&model, grid, lo.b, &lo.solution, hi.b, &hi.solution, 0)
    })?;
    let tracks = compose_segments(segments, points[0].solution.dim());
    for &k in &tracks.flagged {
        warn!(
            "weak state matching between B0 = {} T and {} T (overlap {:.3})",
            points[k].b,
            points[k + 1].b,
            tracks.min_overlaps[k]
        );
    }

    let mut result = SweepResult { system: *system, grid: *grid, points, tracks, track_labels: Vec::new() };
    result.track_labels = track_labels(&result)?;
    Ok(result)
}

/// Greedy maximum-overlap assignment between consecutive solutions.
pub fn track_states(points: &[EigenSolution]) -> Result<TrackAssignment> {
    if points.len() < 2 {
        return Err(Error::Validation(format!("tracking needs at least 2 points, got {}", points.len())));
    }
    let n = points[0].dim();
    if points.iter().any(|p| p.dim() != n) {
        return Err(Error::Validation("points have different dimensions".into()));
    }
    let segments = points.windows(2).map(|w| match_greedy(&w[0], &w[1])).collect();
    Ok(compose_segments(segments, n))
}

/// Slot map `from → to` and its smallest matched overlap.
fn match_greedy(from: &EigenSolution, to: &EigenSolution) -> (Vec<usize>, f64) {
    let n = from.dim();
    let mut candidates = Vec::with_capacity(n * n);
    for a in 0..n {
        let va = from.vector(a);
        for b in 0..n {
            let vb = to.vector(b);
            let overlap: Complex64 = va.iter().zip(vb).map(|(x, y)| x.conj() * y).sum();
            candidates.push((overlap.norm(), a, b));
        }
    }
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut map = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    let mut worst = f64::INFINITY;
    let mut matched = 0;
    for (overlap, a, b) in candidates {
        if map[a] != usize::MAX || taken[b] {
            continue;
        }
        map[a] = b;
        taken[b] = true;
        worst = worst.min(overlap);
        matched += 1;
        if matched == n {
            break;
        }
    }
    (map, worst)
}

/// Matches across a segment, bisecting it while the matching is weak.
fn resolve_segment(
    model: &HamiltonianModel,
    grid: &SweepGrid,
    b_lo: f64,
    lo: &EigenSolution,
    b_hi: f64,
    hi: &EigenSolution,
    depth: u32,
) -> Result<(Vec<usize>, f64)> {
    let (map, worst) = match_greedy(lo, hi);
    if worst >= OVERLAP_THRESHOLD || depth >= MAX_REFINE_DEPTH {
        return Ok((map, worst));
    }
    let b_mid = 0.5 * (b_lo + b_hi);
    let mid = diagonalize(model, &grid.field_vector(b_mid)?)?;
    let (first, w1) = resolve_segment(model, grid, b_lo, lo, b_mid, &mid, depth + 1)?;
    let (second, w2) = resolve_segment(model, grid, b_mid, &mid, b_hi, hi, depth + 1)?;
    Ok((first.iter().map(|&s| second[s]).collect(), w1.min(w2)))
}

fn compose_segments(segments: Vec<(Vec<usize>, f64)>, n: usize) -> TrackAssignment {
    let mut slots = Vec::with_capacity(segments.len() + 1);
    slots.push((0..n).collect::<Vec<_>>());
    let mut min_overlaps = Vec::with_capacity(segments.len());
    let mut flagged = Vec::new();
    for (k, (map, worst)) in segments.into_iter().enumerate() {
        let next = slots[k].iter().map(|&s| map[s]).collect();
        slots.push(next);
        if worst < OVERLAP_THRESHOLD {
            flagged.push(k);
        }
        min_overlaps.push(worst);
    }
    TrackAssignment { slots, min_overlaps, flagged }
}

/// Zero-field labels take `|M|` from the B = 0 point and the sign from the
/// next grid point, where the field has polarized the doublet.
fn track_labels(result: &SweepResult) -> Result<Vec<Projection>> {
    let zero_field = result.points[0].b == 0.0;
    (0..result.n_tracks())
        .map(|t| {
            let at_start = result.composition(t, 0)?;
            if !zero_field || result.points.len() < 2 {
                return Ok(at_start.dominant);
            }
            let magnitude = at_start.dominant.twice().abs();
            let next = result.composition(t, 1)?;
            let sign = if next.dominant.twice() != 0 {
                next.dominant.twice().signum()
            } else if next.sz_expectation < 0.0 {
                -1
            } else {
                1
            };
            Ok(Projection::from_twice(sign * magnitude))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingKind {
    Real,
    Avoided,
}

impl CrossingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CrossingKind::Real => "real",
            CrossingKind::Avoided => "avoided",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingEvent {
    /// Lower track id of the pair.
    pub track_i: usize,
    pub track_j: usize,
    /// Field of minimum separation (T).
    pub b_star: f64,
    /// Minimum separation (K).
    pub gap: f64,
    pub kind: CrossingKind,
    /// Dominant projections of `track_i` and `track_j` before the crossing.
    pub diabatic_labels: (Projection, Projection),
    /// Grid point nearest to the crossing.
    pub grid_index: usize,
}

impl CrossingEvent {
    pub fn same_parity(&self) -> Result<bool> {
        Ok(parity_of(self.diabatic_labels.0)? == parity_of(self.diabatic_labels.1)?)
    }
}

pub fn classify(gap: f64) -> CrossingKind {
    if gap < REAL_CROSSING_TOL {
        CrossingKind::Real
    } else {
        CrossingKind::Avoided
    }
}

struct Candidate {
    k: usize,
    lower_slot: usize,
    track_i: usize,
    track_j: usize,
}

/// Locates interior gap minima between energy-adjacent tracks.
///
/// With `pair_filter`, only the given (unordered) track pair is considered.
pub fn find_crossings(result: &SweepResult, pair_filter: Option<(usize, usize)>) -> Vec<CrossingEvent> {
    find_crossings_with(result, pair_filter, Execution::default())
}

pub fn find_crossings_with(
    result: &SweepResult,
    pair_filter: Option<(usize, usize)>,
    exec: Execution,
) -> Vec<CrossingEvent> {
    let n_points = result.points.len();
    let n = result.n_tracks();
    let wanted = pair_filter.map(|(a, b)| (a.min(b), a.max(b)));
    let pair_gap = |i: usize, j: usize, k: usize| (result.track_energy(i, k) - result.track_energy(j, k)).abs();

    let mut candidates = Vec::new();
    for k in 1..n_points.saturating_sub(1) {
        let values = result.points[k].solution.eigenvalues();
        for s in 0..n.saturating_sub(1) {
            let a = result.tracks.track_at(k, s);
            let b = result.tracks.track_at(k, s + 1);
            let (ti, tj) = (a.min(b), a.max(b));
            if wanted.is_some_and(|w| w != (ti, tj)) {
                continue;
            }
            let gap = values[s + 1] - values[s];
            if gap < pair_gap(ti, tj, k - 1) && gap <= pair_gap(ti, tj, k + 1) {
                candidates.push(Candidate { k, lower_slot: s, track_i: ti, track_j: tj });
            }
        }
    }

    let model = HamiltonianModel::new(result.system);
    let grid = &result.grid;
    let refined = try_map(exec, candidates.len(), |c| {
        let cand = &candidates[c];
        let bracket = (result.points[cand.k - 1].b, result.points[cand.k + 1].b);
        Ok(refine_gap_model(&model, grid.theta, grid.phi, cand.lower_slot, bracket))
    })
    .expect("refinement errors are handled per candidate");

    let mut events: Vec<CrossingEvent> = candidates
        .iter()
        .zip(refined)
        .filter_map(|(cand, r)| match r {
            Ok((b_star, gap)) => {
                let before = cand.k.saturating_sub(LABEL_OFFSET);
                let labels = (result.dominant(cand.track_i, before), result.dominant(cand.track_j, before));
                match labels {
                    (Ok(li), Ok(lj)) => Some(CrossingEvent {
                        track_i: cand.track_i,
                        track_j: cand.track_j,
                        b_star,
                        gap,
                        kind: classify(gap),
                        diabatic_labels: (li, lj),
                        grid_index: cand.k,
                    }),
                    _ => None,
                }
            }
            Err(e) => {
                warn!(
                    "skipping gap minimum of tracks {} and {} near B0 = {} T: {e}",
                    cand.track_i, cand.track_j, result.points[cand.k].b
                );
                None
            }
        })
        .collect();
    events
        .sort_by(|x, y| x.b_star.total_cmp(&y.b_star).then(x.track_i.cmp(&y.track_i)).then(x.track_j.cmp(&y.track_j)));
    events
}

/// Minimizes the separation of energy slots `lower_slot` and `lower_slot + 1`
/// over `bracket` by golden-section search.
///
/// If the minimum sits on the bracket edge the bracket is widened once by its
/// own width; a second edge minimum is an error.
pub fn refine_gap(
    system: &SpinSystem,
    theta: f64,
    phi: f64,
    lower_slot: usize,
    bracket: (f64, f64),
) -> Result<(f64, f64)> {
    refine_gap_model(&HamiltonianModel::new(*system), theta, phi, lower_slot, bracket)
}

fn refine_gap_model(
    model: &HamiltonianModel,
    theta: f64,
    phi: f64,
    lower_slot: usize,
    bracket: (f64, f64),
) -> Result<(f64, f64)> {
    if lower_slot + 1 >= model.system().spin.dim() {
        return Err(Error::Domain(format!("slot {lower_slot} has no upper neighbour")));
    }
    let gap_at = |b: f64| -> Result<f64> {
        let sol = diagonalize(model, &FieldVector::new(b, theta, phi)?)?;
        Ok(sol.value(lower_slot + 1) - sol.value(lower_slot))
    };
    interior_minimum(gap_at, bracket)
}

/// Golden-section minimum of `f` that must lie strictly inside the bracket,
/// widening it once by its own width (clamped at zero field) if needed.
pub fn interior_minimum<F>(f: F, bracket: (f64, f64)) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let attempt = |lo: f64, hi: f64| -> Result<Option<(f64, f64)>> {
        let m = golden_section(&f, lo, hi, REFINE_TOL)?;
        let edge = 4.0 * REFINE_TOL;
        let interior = m.x - lo > edge && hi - m.x > edge && m.value < f(lo)? && m.value < f(hi)?;
        Ok(interior.then_some((m.x, m.value.max(0.0))))
    };
    let (lo, hi) = bracket;
    if let Some(found) = attempt(lo, hi)? {
        return Ok(found);
    }
    let width = hi - lo;
    let (wlo, whi) = ((lo - width).max(0.0), hi + width);
    attempt(wlo, whi)?.ok_or(Error::NoInteriorMinimum { lo: wlo, hi: whi })
}

/// Parity class of the state in slot `slot` at a point, if it is pure.
pub fn state_parity(solution: &EigenSolution, slot: usize) -> Result<Option<Parity>> {
    let c = projection_probabilities(solution.vector(slot))?;
    let odd = c.parity_weight(true);
    let even = c.parity_weight(false);
    Ok(if odd == 0.0 {
        Some(Parity::Even)
    } else if even == 0.0 {
        Some(Parity::Odd)
    } else {
        None
    })
}
