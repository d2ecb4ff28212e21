//! Zero-field splitting plus Zeeman Hamiltonian of a giant spin.
//!
//! Energies are in Kelvin (`k_B = 1`) and fields in Tesla. The matrix is built
//! operatorially,
//!
//! ```text
//! H = D (Sz² - S(S+1)/3) + E/2 (S+² + S-²) + g μB B·S
//! ```
//!
//! and [`matrix_element_transcribed`] evaluates the same elements from their
//! closed forms as an independent cross-check.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{build_operators, parity_of, CMatrix, OperatorSet, Parity, Projection, SpinQuantum};

/// Bohr magneton in K/T, four significant digits.
pub const BOHR_MAGNETON_K_PER_T: f64 = 0.6717;
/// Bohr magneton in K/T to eight digits.
pub const BOHR_MAGNETON_K_PER_T_PRECISE: f64 = 0.671_713_94;

/// EPR zero-field-splitting parameters for Fe8.
pub const FE8_D_KELVIN: f64 = -0.292;
pub const FE8_E_KELVIN: f64 = -0.046;
pub const FE8_SPIN: u32 = 10;

const HERMITIAN_TOL: f64 = 1e-12;
const BLOCK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinSystem {
    pub spin: SpinQuantum,
    /// Axial anisotropy `D` (K).
    pub d: f64,
    /// Rhombic anisotropy `E` (K).
    pub e: f64,
    pub g: f64,
    /// Bohr magneton in K/T.
    pub mu_b: f64,
}

impl SpinSystem {
    pub fn new(spin: SpinQuantum, d: f64, e: f64, g: f64) -> Result<Self> {
        Self::with_mu_b(spin, d, e, g, BOHR_MAGNETON_K_PER_T)
    }

    pub fn with_mu_b(spin: SpinQuantum, d: f64, e: f64, g: f64, mu_b: f64) -> Result<Self> {
        if !d.is_finite() || !e.is_finite() {
            return Err(Error::Domain(format!("anisotropy constants must be finite (D = {d}, E = {e})")));
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Domain(format!("g-factor must be positive, got {g}")));
        }
        if !(mu_b > 0.0 && mu_b.is_finite()) {
            return Err(Error::Domain(format!("Bohr magneton must be positive, got {mu_b}")));
        }
        Ok(Self { spin, d, e, g, mu_b })
    }

    /// Fe8 with the EPR parameters, `g = 2`.
    pub fn fe8() -> Self {
        Self {
            spin: SpinQuantum::integer(FE8_SPIN),
            d: FE8_D_KELVIN,
            e: FE8_E_KELVIN,
            g: 2.0,
            mu_b: BOHR_MAGNETON_K_PER_T,
        }
    }

    /// True when `|E| > |D|/3`, outside the usual axis convention.
    pub fn rhombicity_warning(&self) -> bool {
        self.e.abs() > self.d.abs() / 3.0
    }

    /// Zeeman energy per unit projection per Tesla, `g μB`.
    pub fn zeeman_scale(&self) -> f64 {
        self.g * self.mu_b
    }
}

impl Default for SpinSystem {
    fn default() -> Self {
        Self::fe8()
    }
}

/// External field in spherical form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldVector {
    pub b0: f64,
    pub theta: f64,
    pub phi: f64,
}

impl FieldVector {
    /// `phi` is reduced to `[0, 2π)`.
    pub fn new(b0: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(b0 >= 0.0 && b0.is_finite()) {
            return Err(Error::Domain(format!("field magnitude must be finite and nonnegative, got {b0}")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("polar angle {theta} outside [0, π]")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("azimuth {phi} is not finite")));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { b0, theta, phi })
    }

    pub fn zero() -> Self {
        Self { b0: 0.0, theta: 0.0, phi: 0.0 }
    }

    pub fn along_z(b0: f64) -> Result<Self> {
        Self::new(b0, 0.0, 0.0)
    }

    pub fn along_x(b0: f64) -> Result<Self> {
        Self::new(b0, PI / 2.0, 0.0)
    }

    pub fn along_y(b0: f64) -> Result<Self> {
        Self::new(b0, PI / 2.0, PI / 2.0)
    }

    /// `(Bx, By, Bz)` in Tesla.
    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.b0 * st * cp, self.b0 * st * sp, self.b0 * ct]
    }
}

/// Dense complex matrix checked to be Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

impl HermitianMatrix {
    /// Accepts `m` when `|m_ij - conj(m_ji)| ≤ 1e-12 · max(1, max|m|)`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Validation(format!(
                "expected a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("matrix has non-finite entries".into()));
        }
        let dev = hermitian_deviation(&m);
        let tol = HERMITIAN_TOL * max_abs(&m).max(1.0);
        if dev > tol {
            return Err(Error::Validation(format!("matrix is not Hermitian (deviation {dev:.3e})")));
        }
        Ok(Self { entries: m })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Spin operators and the field-independent part of `H`, reusable across fields.
#[derive(Clone, Debug)]
pub struct HamiltonianModel {
    system: SpinSystem,
    ops: OperatorSet,
    zfs: CMatrix,
}

impl HamiltonianModel {
    pub fn new(system: SpinSystem) -> Self {
        let ops = build_operators(system.spin);
        let n = system.spin.dim();
        let c = |x: f64| Complex64::new(x, 0.0);
        let shift = CMatrix::identity(n, n) * c(system.spin.casimir() / 3.0);
        let axial = (&ops.sz * &ops.sz - shift) * c(system.d);
        let rhombic = (&ops.s_plus * &ops.s_plus + &ops.s_minus * &ops.s_minus) * c(0.5 * system.e);
        let zfs = axial + rhombic;
        Self { system, ops, zfs }
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.ops
    }

    pub fn hamiltonian(&self, field: &FieldVector) -> HermitianMatrix {
        let [bx, by, bz] = field.cartesian();
        let k = self.system.zeeman_scale();
        let c = |x: f64| Complex64::new(x, 0.0);
        let mut h = self.zfs.clone();
        if bx != 0.0 {
            h += &self.ops.sx * c(k * bx);
        }
        if by != 0.0 {
            h += &self.ops.sy * c(k * by);
        }
        if bz != 0.0 {
            h += &self.ops.sz * c(k * bz);
        }
        HermitianMatrix { entries: h }
    }
}

pub fn build_hamiltonian(system: &SpinSystem, field: &FieldVector) -> HermitianMatrix {
    HamiltonianModel::new(*system).hamiltonian(field)
}

/// `⟨m|H|m'⟩` from closed-form matrix elements.
///
/// The `ΔM = ±1` Zeeman radicand is evaluated at the ket projection `m'`, and
/// the `ΔM = ±2` rhombic element uses the product of two ladder factors,
/// `E/2 · sqrt[(S(S+1) - m'(m'+1)) (S(S+1) - (m'+1)(m'+2))]` for `m = m' + 2`.
pub fn matrix_element_transcribed(
    system: &SpinSystem,
    field: &FieldVector,
    m: Projection,
    m_prime: Projection,
) -> Result<Complex64> {
    let s = system.spin;
    for p in [m, m_prime] {
        if !p.is_valid_for(s) {
            return Err(Error::Domain(format!("M = {p} is not a valid projection for S = {s}")));
        }
    }
    let ss = s.casimir();
    let mv = m.value();
    let k = m_prime.value();
    let zeeman = system.g * system.mu_b * field.b0;
    let (sin_t, cos_t) = field.theta.sin_cos();
    let phase = Complex64::from_polar(1.0, field.phi);
    let value = match m.twice() - m_prime.twice() {
        0 => Complex64::new(system.d * (mv * mv - ss / 3.0) + zeeman * cos_t * mv, 0.0),
        2 => 0.5 * zeeman * sin_t * phase.conj() * (ss - k * (k + 1.0)).sqrt(),
        -2 => 0.5 * zeeman * sin_t * phase * (ss - k * (k - 1.0)).sqrt(),
        4 => Complex64::new(0.5 * system.e * ((ss - k * (k + 1.0)) * (ss - (k + 1.0) * (k + 2.0))).sqrt(), 0.0),
        -4 => Complex64::new(0.5 * system.e * ((ss - k * (k - 1.0)) * (ss - (k - 1.0) * (k - 2.0))).sqrt(), 0.0),
        _ => Complex64::new(0.0, 0.0),
    };
    Ok(value)
}

/// Partition of an integer-spin basis into parity classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockReport {
    pub is_block_diagonal: bool,
    pub even_block: Vec<usize>,
    pub odd_block: Vec<usize>,
}

/// Checks whether `h` couples even-`M` and odd-`M` basis states.
pub fn parity_block_structure(h: &HermitianMatrix) -> Result<BlockReport> {
    let n = h.dim();
    if n.is_multiple_of(2) {
        return Err(Error::Domain(format!("parity blocks need integer spin, got dimension {n}")));
    }
    let spin = SpinQuantum::from_twice((n - 1) as u32);
    let mut even_block = Vec::new();
    let mut odd_block = Vec::new();
    for (i, m) in spin.projections().enumerate() {
        match parity_of(m)? {
            Parity::Even => even_block.push(i),
            Parity::Odd => odd_block.push(i),
        }
    }
    let is_block_diagonal = even_block.iter().all(|&i| odd_block.iter().all(|&j| h.get(i, j).norm() < BLOCK_TOL));
    Ok(BlockReport { is_block_diagonal, even_block, odd_block })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fe8_uniaxial() -> SpinSystem {
        SpinSystem::new(SpinQuantum::integer(10), -0.292, 0.0, 2.0).unwrap()
    }

    #[test]
    fn zero_field_uniaxial_is_diagonal() {
        let h = build_hamiltonian(&fe8_uniaxial(), &FieldVector::zero());
        for i in 0..21 {
            for j in 0..21 {
                if i != j {
                    assert_eq!(h.get(i, j).norm(), 0.0);
                }
            }
        }
        // -0.292 * (100 - 110/3)
        assert_relative_eq!(h.get(0, 0).re, -18.493_333_333, epsilon = 1e-9);
        assert_relative_eq!(h.get(20, 20).re, -18.493_333_333, epsilon = 1e-9);
    }

    #[test]
    fn fe8_zero_field_is_traceless() {
        let h = build_hamiltonian(&SpinSystem::fe8(), &FieldVector::zero());
        assert!(h.trace().abs() < 1e-9);
    }

    #[test]
    fn zeeman_shift_along_easy_axis() {
        let sys = fe8_uniaxial();
        let h0 = build_hamiltonian(&sys, &FieldVector::zero());
        let h1 = build_hamiltonian(&sys, &FieldVector::along_z(1.0).unwrap());
        assert_relative_eq!(h1.get(20, 20).re - h0.get(20, 20).re, 13.434, epsilon = 1e-12);
        assert_relative_eq!(h1.get(0, 0).re - h0.get(0, 0).re, -13.434, epsilon = 1e-12);
    }

    #[test]
    fn easy_axis_couplings_are_even() {
        let sys = SpinSystem::fe8();
        let h = build_hamiltonian(&sys, &FieldVector::along_z(0.7).unwrap());
        for i in 0..21usize {
            for j in 0..21usize {
                let dm = i.abs_diff(j);
                if dm != 0 && dm != 2 {
                    assert_eq!(h.get(i, j).norm(), 0.0, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn transcribed_examples() {
        let sys = fe8_uniaxial();
        let z = FieldVector::zero();
        let top = Projection::integer(10);
        let v = matrix_element_transcribed(&sys, &z, top, top).unwrap();
        assert_relative_eq!(v.re, -18.493_333_333, epsilon = 1e-9);

        let fx = FieldVector::along_x(1.0).unwrap();
        let v = matrix_element_transcribed(&sys, &fx, top, Projection::integer(9)).unwrap();
        // 0.6717 * sqrt(20)
        assert_relative_eq!(v.re, 3.003_934_0, epsilon = 1e-6);
        assert!(v.im.abs() < 1e-15);

        let v = matrix_element_transcribed(&SpinSystem::fe8(), &fx, Projection::integer(3), Projection::integer(0))
            .unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn transcribed_matches_operators_on_all_couplings() {
        let sys = SpinSystem::fe8();
        let f = FieldVector::new(0.8, 1.1, 2.3).unwrap();
        let h = build_hamiltonian(&sys, &f);
        let scale = h.max_abs();
        for (i, m) in sys.spin.projections().enumerate() {
            for (j, mp) in sys.spin.projections().enumerate() {
                let t = matrix_element_transcribed(&sys, &f, m, mp).unwrap();
                assert!((t - h.get(i, j)).norm() <= 1e-12 * scale, "<{m}|H|{mp}>");
            }
        }
    }

    #[test]
    fn parity_blocks() {
        let sys = SpinSystem::fe8();
        let r = parity_block_structure(&build_hamiltonian(&sys, &FieldVector::along_z(0.4).unwrap())).unwrap();
        assert!(r.is_block_diagonal);
        assert_eq!((r.even_block.len(), r.odd_block.len()), (11, 10));

        let r = parity_block_structure(&build_hamiltonian(&sys, &FieldVector::along_x(0.5).unwrap())).unwrap();
        assert!(!r.is_block_diagonal);

        let r = parity_block_structure(&build_hamiltonian(&sys, &FieldVector::zero())).unwrap();
        assert!(r.is_block_diagonal);

        let half = SpinSystem::new(SpinQuantum::from_twice(3), -1.0, 0.0, 2.0).unwrap();
        assert!(parity_block_structure(&build_hamiltonian(&half, &FieldVector::zero())).is_err());
    }

    #[test]
    fn rhombicity_flag() {
        assert!(!SpinSystem::fe8().rhombicity_warning());
        let s = SpinSystem::new(SpinQuantum::integer(10), -0.292, -0.2, 2.0).unwrap();
        assert!(s.rhombicity_warning());
    }

    #[test]
    fn field_validation() {
        assert!(FieldVector::new(-1.0, 0.0, 0.0).is_err());
        assert!(FieldVector::new(1.0, 4.0, 0.0).is_err());
        let f = FieldVector::new(1.0, 0.5, -PI / 2.0).unwrap();
        assert_relative_eq!(f.phi, 1.5 * PI, epsilon = 1e-15);
        assert!(SpinSystem::new(SpinQuantum::integer(1), 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(HermitianMatrix::new(m).is_err());
    }
}
