//! Wavefunction composition, `⟨Sz⟩`, and thermally activated relaxation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::SpinSystem;
use crate::spin::{Projection, SpinQuantum};

const NORM_TOL: f64 = 1e-8;
const TIE_TOL: f64 = 1e-12;

/// Probabilities `|c_M|²` of one state, in basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct StateComposition {
    pub spin: SpinQuantum,
    pub probabilities: Vec<f64>,
    pub dominant: Projection,
    pub sz_expectation: f64,
}

impl StateComposition {
    pub fn probability(&self, m: Projection) -> Option<f64> {
        m.index_in(self.spin).ok().map(|i| self.probabilities[i])
    }

    /// Total probability on basis states whose `M` has the given parity bit.
    pub fn parity_weight(&self, odd: bool) -> f64 {
        self.spin
            .projections()
            .zip(&self.probabilities)
            .filter(|(m, _)| ((m.twice() / 2).rem_euclid(2) == 1) == odd)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Splits a normalized coefficient vector into projection probabilities.
pub fn projection_probabilities(coefficients: &[Complex64]) -> Result<StateComposition> {
    let n = coefficients.len();
    if n == 0 {
        return Err(Error::Validation("empty coefficient vector".into()));
    }
    let spin = SpinQuantum::from_twice((n - 1) as u32);
    let probabilities: Vec<f64> = coefficients.iter().map(|c| c.norm_sqr()).collect();
    let norm = probabilities.iter().sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Validation(format!("state is not normalized (‖c‖ = {norm})")));
    }
    let peak = probabilities.iter().copied().fold(0.0, f64::max);
    let dominant_index = probabilities.iter().position(|&p| p >= peak - TIE_TOL).unwrap_or(0);
    let sz_expectation = spin.projections().zip(&probabilities).map(|(m, p)| m.value() * p).sum();
    Ok(StateComposition { spin, dominant: spin.projection_at(dominant_index), probabilities, sz_expectation })
}

/// Largest `|P(M) - P(-M)|` over the basis.
pub fn hard_axis_symmetry_check(coefficients: &[Complex64]) -> f64 {
    let n = coefficients.len();
    (0..n).map(|i| (coefficients[i].norm_sqr() - coefficients[n - 1 - i].norm_sqr()).abs()).fold(0.0, f64::max)
}

/// Arrhenius parameters with `U` and `T` in Kelvin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxationParams {
    pub tau0: f64,
    pub u: f64,
    pub t: f64,
}

/// `τ = τ0 · exp(U / T)` in seconds.
pub fn relaxation_time(p: &RelaxationParams) -> Result<f64> {
    if p.t <= 0.0 || !p.t.is_finite() {
        return Err(Error::Domain(format!("temperature must be positive, got {} K", p.t)));
    }
    if p.tau0 <= 0.0 || !p.tau0.is_finite() {
        return Err(Error::Domain(format!("tau0 must be positive, got {} s", p.tau0)));
    }
    if !p.u.is_finite() {
        return Err(Error::Domain(format!("barrier must be finite, got {} K", p.u)));
    }
    Ok(p.tau0 * (p.u / p.t).exp())
}

/// Uniaxial barrier estimate `|D| S²` for integer spin.
pub fn barrier_height(system: &SpinSystem) -> Result<f64> {
    if !system.spin.is_integer() {
        return Err(Error::Domain(format!("barrier estimate needs integer spin, got S = {}", system.spin)));
    }
    let s = system.spin.value();
    Ok(system.d.abs() * s * s)
}
