//! Dense Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Rotations are skipped for exactly-zero couplings, so a matrix that is block
//! diagonal in the basis stays exactly block diagonal and every eigenvector is
//! supported on a single block.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::HermitianMatrix;
use crate::spin::CMatrix;

pub const MAX_SWEEPS: usize = 100;
/// Sweeps stop once the off-diagonal Frobenius norm drops below this fraction of `‖H‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
/// Eigenvalues closer than this (K) form a degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Ascending eigenvalues and the matching orthonormal eigenvectors.
///
/// Column `i` of `eigenvectors` holds the coefficients of `|ψ_i⟩` in basis
/// order. Each column is phased so its largest-magnitude entry is real and
/// nonnegative, ties going to the lowest index.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSolution {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl EigenSolution {
    /// Assembles a solution from ascending eigenvalues and matching columns.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: CMatrix) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(Error::Validation(format!(
                "{n} eigenvalues but a {}x{} eigenvector matrix",
                eigenvectors.nrows(),
                eigenvectors.ncols()
            )));
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Validation("eigenvalues are not ascending".into()));
        }
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn value(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    /// Coefficients `c_{i,M}` of eigenvector `i`.
    pub fn vector(&self, i: usize) -> &[Complex64] {
        let n = self.dim();
        &self.eigenvectors.as_slice()[i * n..(i + 1) * n]
    }

    /// Distance from eigenvalue `i` to its nearest neighbour.
    pub fn separation(&self, i: usize) -> f64 {
        let v = &self.eigenvalues;
        let below = if i > 0 { v[i] - v[i - 1] } else { f64::INFINITY };
        let above = if i + 1 < v.len() { v[i + 1] - v[i] } else { f64::INFINITY };
        below.min(above)
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.separation(i) < DEGENERACY_TOL
    }
}

pub fn eigh(h: &HermitianMatrix) -> Result<EigenSolution> {
    let (values, vectors) = jacobi(h.as_matrix().clone(), MAX_SWEEPS)?;
    Ok(finish(values, vectors))
}

/// Diagonalizes `h`, splitting it into reflection sectors when
/// [`Reflection::detect`] finds an `M → -M` symmetry.
pub fn solve(h: &HermitianMatrix) -> Result<EigenSolution> {
    match Reflection::detect(h) {
        Some(r) => eigh_reflection(h, &r),
        None => eigh(h),
    }
}

/// An involution `U|i⟩ = u_i |n-1-i⟩` with `u_i = ±1`, i.e. `M → -M` with signs.
#[derive(Clone, Debug, PartialEq)]
pub struct Reflection {
    signs: Vec<f64>,
}

impl Reflection {
    /// Plain flip `|M⟩ → |-M⟩`; commutes with the Hamiltonian for fields along x.
    pub fn flip(n: usize) -> Self {
        Self { signs: vec![1.0; n] }
    }

    /// `|M⟩ → (-1)^(S-M) |-M⟩`; commutes with the Hamiltonian for fields along y.
    /// Only an involution for odd `n` (integer spin).
    pub fn alternating(n: usize) -> Option<Self> {
        (n % 2 == 1).then(|| Self { signs: (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect() })
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    /// Returns the first candidate reflection that commutes with `h` to
    /// within `64 ε · max|h|`.
    pub fn detect(h: &HermitianMatrix) -> Option<Self> {
        let n = h.dim();
        let tol = 64.0 * f64::EPSILON * h.max_abs();
        std::iter::once(Self::flip(n)).chain(Self::alternating(n)).find(|r| r.commutator_deviation(h) <= tol)
    }

    fn commutator_deviation(&self, h: &HermitianMatrix) -> f64 {
        let n = h.dim();
        let u = &self.signs;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mapped = h.get(n - 1 - i, n - 1 - j);
                dev = dev.max((mapped - h.get(i, j) * (u[i] * u[j])).norm());
            }
        }
        dev
    }

    /// Orthonormal real bases of the `+1` and `-1` eigenspaces of `U`.
    fn sector_bases(&self) -> (Vec<SectorVector>, Vec<SectorVector>) {
        let n = self.signs.len();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let u = self.signs[i];
            even.push(vec![(i, r), (j, u * r)]);
            odd.push(vec![(i, r), (j, -u * r)]);
        }
        if n % 2 == 1 {
            let mid = n / 2;
            if self.signs[mid] > 0.0 {
                even.push(vec![(mid, 1.0)]);
            } else {
                odd.push(vec![(mid, 1.0)]);
            }
        }
        (even, odd)
    }
}

/// Sparse real basis vector: `(index, coefficient)` pairs.
type SectorVector = Vec<(usize, f64)>;

/// Diagonalizes `h` separately in each eigenspace of a commuting reflection.
///
/// Every returned eigenvector is an eigenvector of the reflection, so
/// `|c_M| = |c_{-M}|` holds exactly.
pub fn eigh_reflection(h: &HermitianMatrix, reflection: &Reflection) -> Result<EigenSolution> {
    let n = h.dim();
    if reflection.signs.len() != n {
        return Err(Error::Validation(format!(
            "reflection of dimension {} applied to a {n}x{n} matrix",
            reflection.signs.len()
        )));
    }
    let (even, odd) = reflection.sector_bases();
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    let mut col = 0;
    for basis in [even, odd] {
        let k = basis.len();
        if k == 0 {
            continue;
        }
        let block = CMatrix::from_fn(k, k, |a, b| {
            let mut acc = ZERO;
            for &(i, qa) in &basis[a] {
                for &(j, qb) in &basis[b] {
                    acc += h.get(i, j) * (qa * qb);
                }
            }
            acc
        });
        let (w, vecs) = jacobi(block, MAX_SWEEPS)?;
        for (a, lambda) in w.into_iter().enumerate() {
            for (b, q) in basis.iter().enumerate() {
                let coeff = vecs[(b, a)];
                for &(i, qi) in q {
                    vectors[(i, col)] = coeff * qi;
                }
            }
            values.push(lambda);
            col += 1;
        }
    }
    Ok(finish(values, vectors))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

pub(crate) fn jacobi(mut a: CMatrix, max_sweeps: usize) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.nrows();
    let mut v = CMatrix::identity(n, n);
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off == 0.0 || off <= OFF_DIAGONAL_TOL * norm {
            break;
        }
        if sweep == max_sweeps {
            return Err(Error::NoConvergence { sweeps: max_sweeps, off_norm: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, sweep);
            }
        }
        sweep += 1;
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((values, v))
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, sweep: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Negligible against both diagonal entries: drop it.
    if sweep > 3 && app.abs() + 100.0 * mag == app.abs() && aqq.abs() + 100.0 * mag == aqq.abs() {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let theta = (aqq - app) / (2.0 * mag);
    let t =
        if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase = apq / mag;
    let back = phase.conj();
    let n = a.nrows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * back * s;
        a[(k, q)] = akp * s + akq * back * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * back * s;
        v[(k, q)] = vkp * s + vkq * back * c;
    }
}

/// Sorts eigenpairs ascending and applies the phase convention.
fn finish(values: Vec<f64>, vectors: CMatrix) -> EigenSolution {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let column = vectors.column(src);
        let peak = column.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let k = column.iter().position(|z| z.norm() >= peak * (1.0 - 1e-12)).unwrap_or(0);
        let pivot = column[k];
        let rot = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            eigenvectors[(i, dst)] = column[i] * rot;
        }
        eigenvectors[(k, dst)] = Complex64::new(pivot.norm(), 0.0);
    }
    EigenSolution { eigenvalues, eigenvectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, FieldVector, SpinSystem};
    use approx::assert_relative_eq;

    fn real(rows: &[&[f64]]) -> HermitianMatrix {
        let n = rows.len();
        HermitianMatrix::new(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0))).unwrap()
    }

    #[test]
    fn diagonal_input() {
        let sol = eigh(&real(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]])).unwrap();
        assert_eq!(sol.eigenvalues(), &[1.0, 2.0, 3.0]);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(sol.vector(0)[1], one);
        assert_eq!(sol.vector(1)[2], one);
        assert_eq!(sol.vector(2)[0], one);
    }

    #[test]
    fn pauli_x() {
        let sol = eigh(&real(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert_relative_eq!(sol.value(0), -1.0, epsilon = 1e-15);
        assert_relative_eq!(sol.value(1), 1.0, epsilon = 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // tie on magnitude: pivot is index 0
        assert_relative_eq!(sol.vector(0)[0].re, r, epsilon = 1e-15);
        assert_relative_eq!(sol.vector(0)[1].re, -r, epsilon = 1e-15);
        assert_relative_eq!(sol.vector(1)[0].re, r, epsilon = 1e-15);
        assert_relative_eq!(sol.vector(1)[1].re, r, epsilon = 1e-15);
    }

    #[test]
    fn complex_two_by_two() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 2.0);
        m[(1, 0)] = Complex64::new(0.0, -2.0);
        m[(1, 1)] = Complex64::new(-1.0, 0.0);
        let h = HermitianMatrix::new(m.clone()).unwrap();
        let sol = eigh(&h).unwrap();
        let r5 = 5f64.sqrt();
        assert_relative_eq!(sol.value(0), -r5, epsilon = 1e-14);
        assert_relative_eq!(sol.value(1), r5, epsilon = 1e-14);
        for i in 0..2 {
            let v = nalgebra::DVector::from_column_slice(sol.vector(i));
            let res = &m * &v - &v * Complex64::new(sol.value(i), 0.0);
            assert!(res.norm() < 1e-14);
        }
    }

    #[test]
    fn fe8_zero_field_doublet() {
        let h = build_hamiltonian(&SpinSystem::fe8(), &FieldVector::zero());
        for sol in [eigh(&h).unwrap(), solve(&h).unwrap()] {
            let split = sol.value(1) - sol.value(0);
            assert!((0.0..1e-5).contains(&split));
            assert!((sol.value(0) + 18.49).abs() < 0.2);
            // numpy eigh reference: -18.531821214554103
            assert_relative_eq!(sol.value(0), -18.531_821_214_554, epsilon = 1e-10);
        }
        let sol = solve(&h).unwrap();
        // numpy eigh reference splitting 3.96035e-10 K
        assert_relative_eq!(sol.value(1) - sol.value(0), 3.960_35e-10, max_relative = 1e-3);
    }

    #[test]
    fn iteration_cap_reports_off_norm() {
        let h = real(&[&[1.0, 0.5, 0.3], &[0.5, 2.0, 0.7], &[0.3, 0.7, 3.0]]);
        match jacobi(h.as_matrix().clone(), 0) {
            Err(Error::NoConvergence { off_norm, .. }) => assert!(off_norm > 0.0),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn reflection_detection() {
        let sys = SpinSystem::fe8();
        let hx = build_hamiltonian(&sys, &FieldVector::along_x(1.0).unwrap());
        assert_eq!(Reflection::detect(&hx), Some(Reflection::flip(21)));
        let hy = build_hamiltonian(&sys, &FieldVector::along_y(1.0).unwrap());
        assert_eq!(Reflection::detect(&hy), Reflection::alternating(21));
        let hz = build_hamiltonian(&sys, &FieldVector::along_z(1.0).unwrap());
        assert_eq!(Reflection::detect(&hz), None);
        let oblique = build_hamiltonian(&sys, &FieldVector::new(1.0, 0.9, 0.4).unwrap());
        assert_eq!(Reflection::detect(&oblique), None);
    }

    #[test]
    fn reflection_solve_matches_plain_solve() {
        let sys = SpinSystem::fe8();
        for f in [FieldVector::along_x(0.7).unwrap(), FieldVector::along_y(1.3).unwrap()] {
            let h = build_hamiltonian(&sys, &f);
            let a = eigh(&h).unwrap();
            let b = solve(&h).unwrap();
            for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
                assert!((x - y).abs() < 1e-12);
            }
            for i in 0..21 {
                let v = b.vector(i);
                for k in 0..21 {
                    assert_eq!(v[k].norm_sqr(), v[20 - k].norm_sqr());
                }
            }
        }
    }

    #[test]
    fn block_diagonal_input_keeps_exact_zeros() {
        let h = build_hamiltonian(&SpinSystem::fe8(), &FieldVector::along_z(0.37).unwrap());
        let sol = eigh(&h).unwrap();
        for i in 0..21 {
            let v = sol.vector(i);
            let even: f64 = (0..21).step_by(2).map(|k| v[k].norm_sqr()).sum();
            let odd: f64 = (1..21).step_by(2).map(|k| v[k].norm_sqr()).sum();
            assert!(even.min(odd) == 0.0);
        }
    }
}
