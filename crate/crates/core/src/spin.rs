//! Spin operators in the `|S, M⟩` basis.
//!
//! Spin and projection quantum numbers are stored doubled so that half-integer
//! values are exact. Every matrix in this crate uses the ascending basis order
//! `M = -S, -S+1, ..., +S`, so basis index `i` corresponds to `M = i - S`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex square matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Spin quantum number `S`, a nonnegative half-integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinQuantum {
    twice: u32,
}

impl SpinQuantum {
    pub const fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub const fn integer(s: u32) -> Self {
        Self { twice: 2 * s }
    }

    /// Accepts any finite value whose double is a nonnegative integer.
    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !s.is_finite() || s < 0.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(Error::Domain(format!("spin {s} is not a nonnegative half-integer")));
        }
        Ok(Self { twice: twice as u32 })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice.is_multiple_of(2)
    }

    /// Basis dimension `2S + 1`.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// `S(S + 1)`.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }

    /// Projections in basis order.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = Projection> {
        let t = self.twice as i32;
        (0..self.twice as i32 + 1).map(move |k| Projection::from_twice(2 * k - t))
    }

    pub fn projection_at(self, index: usize) -> Projection {
        assert!(index < self.dim(), "basis index {index} out of range for S = {self}");
        Projection::from_twice(2 * index as i32 - self.twice as i32)
    }
}

impl fmt::Display for SpinQuantum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Spin projection `M` along the quantization axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Projection {
    twice: i32,
}

impl Projection {
    pub const fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    pub const fn integer(m: i32) -> Self {
        Self { twice: 2 * m }
    }

    pub fn new(m: f64) -> Result<Self> {
        let twice = 2.0 * m;
        if !m.is_finite() || twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
            return Err(Error::Domain(format!("projection {m} is not a half-integer")));
        }
        Ok(Self { twice: twice as i32 })
    }

    pub fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn is_valid_for(self, s: SpinQuantum) -> bool {
        let t = s.twice as i64;
        let m = self.twice as i64;
        (-t..=t).contains(&m) && (t - m) % 2 == 0
    }

    /// Position of `|M⟩` in the ascending basis.
    pub fn index_in(self, s: SpinQuantum) -> Result<usize> {
        self.check(s)?;
        Ok(((self.twice + s.twice as i32) / 2) as usize)
    }

    fn check(self, s: SpinQuantum) -> Result<()> {
        if self.is_valid_for(s) {
            Ok(())
        } else {
            Err(Error::Domain(format!("M = {self} is not a valid projection for S = {s}")))
        }
    }
}

impl std::ops::Neg for Projection {
    type Output = Self;

    fn neg(self) -> Self {
        Self { twice: -self.twice }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// `⟨M±1|S±|M⟩ = sqrt(S(S+1) - M(M±1))`, exactly zero at the ends of the ladder.
pub fn ladder_element(s: SpinQuantum, m: Projection, direction: Ladder) -> Result<f64> {
    m.check(s)?;
    let (at_end, shift) = match direction {
        Ladder::Raise => (m.twice == s.twice as i32, 1.0),
        Ladder::Lower => (m.twice == -(s.twice as i32), -1.0),
    };
    if at_end {
        return Ok(0.0);
    }
    let mv = m.value();
    Ok((s.casimir() - mv * (mv + shift)).sqrt())
}

/// Parity class of an integer projection.
pub fn parity_of(m: Projection) -> Result<Parity> {
    if !m.is_integer() {
        return Err(Error::Domain(format!("parity is undefined for half-integer M = {m}")));
    }
    Ok(if (m.twice / 2) % 2 == 0 { Parity::Even } else { Parity::Odd })
}

/// Cartesian and ladder spin matrices for one spin.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub spin: SpinQuantum,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
    pub s_plus: CMatrix,
    pub s_minus: CMatrix,
    pub s_squared: CMatrix,
}

pub fn build_operators(s: SpinQuantum) -> OperatorSet {
    let n = s.dim();
    let mut sz = CMatrix::zeros(n, n);
    let mut s_plus = CMatrix::zeros(n, n);
    for (i, m) in s.projections().enumerate() {
        sz[(i, i)] = Complex64::new(m.value(), 0.0);
        if i + 1 < n {
            // valid by construction
            let c = ladder_element(s, m, Ladder::Raise).expect("basis projection");
            s_plus[(i + 1, i)] = Complex64::new(c, 0.0);
        }
    }
    let s_minus = s_plus.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let sx = (&s_plus + &s_minus) * half;
    // (S+ - S-) / 2i
    let sy = (&s_plus - &s_minus) * Complex64::new(0.0, -0.5);
    let s_squared = CMatrix::identity(n, n) * Complex64::new(s.casimir(), 0.0);
    OperatorSet { spin: s, sx, sy, sz, s_plus, s_minus, s_squared }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    #[test]
    fn ladder_examples() {
        let ten = SpinQuantum::integer(10);
        assert_eq!(ladder_element(ten, Projection::integer(10), Ladder::Raise).unwrap(), 0.0);
        assert_eq!(ladder_element(ten, Projection::integer(-10), Ladder::Lower).unwrap(), 0.0);
        assert_relative_eq!(
            ladder_element(SpinQuantum::integer(1), Projection::integer(0), Ladder::Raise).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-15
        );
        // 110 - (-10)(-9) = 20
        assert_relative_eq!(
            ladder_element(ten, Projection::integer(-10), Ladder::Raise).unwrap(),
            4.472_135_955,
            epsilon = 1e-9
        );
    }

    #[test]
    fn ladder_rejects_bad_projection() {
        let s = SpinQuantum::integer(2);
        assert!(ladder_element(s, Projection::integer(3), Ladder::Raise).is_err());
        assert!(ladder_element(s, Projection::from_twice(1), Ladder::Lower).is_err());
        assert!(ladder_element(SpinQuantum::from_twice(3), Projection::integer(1), Ladder::Raise).is_err());
    }

    #[test]
    fn spin_half_sz() {
        let ops = build_operators(SpinQuantum::from_twice(1));
        assert_eq!(ops.sz[(0, 0)].re, -0.5);
        assert_eq!(ops.sz[(1, 1)].re, 0.5);
        assert_eq!(ops.sz[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn spin_one_raising_entries() {
        let ops = build_operators(SpinQuantum::integer(1));
        let nonzero: Vec<_> = ops.s_plus.iter().filter(|z| z.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 2);
        for z in nonzero {
            assert_relative_eq!(z.re, 2f64.sqrt(), epsilon = 1e-15);
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn trace_sz_squared_spin_ten() {
        let ops = build_operators(SpinQuantum::integer(10));
        let brute: f64 = (-10..=10).map(|m| (m * m) as f64).sum();
        assert_eq!(brute, 770.0);
        let tr = (&ops.sz * &ops.sz).trace();
        assert_relative_eq!(tr.re, brute, epsilon = 1e-12);
    }

    #[test]
    fn su2_algebra_up_to_spin_ten() {
        let i = Complex64::new(0.0, 1.0);
        for twice in 0..=20 {
            let ops = build_operators(SpinQuantum::from_twice(twice));
            let pairs = [(&ops.sx, &ops.sy, &ops.sz), (&ops.sy, &ops.sz, &ops.sx), (&ops.sz, &ops.sx, &ops.sy)];
            for (a, b, c) in pairs {
                let diff = commutator(a, b) - c * i;
                assert!(max_abs(&diff) <= 1e-12, "S = {twice}/2: {}", max_abs(&diff));
            }
            assert!(max_abs(&(ops.s_minus.adjoint() - &ops.s_plus)) == 0.0);
            let s2 = &ops.sx * &ops.sx + &ops.sy * &ops.sy + &ops.sz * &ops.sz;
            assert!(max_abs(&(s2 - &ops.s_squared)) <= 1e-11);
            for m in [&ops.sx, &ops.sy, &ops.sz] {
                assert!(m.trace().norm() <= 1e-14);
            }
            assert!(ops.sx.iter().chain(ops.sz.iter()).all(|z| z.im == 0.0));
            assert!(ops.sy.iter().all(|z| z.re == 0.0));
        }
    }

    #[test]
    fn ladder_annihilates_extremes() {
        for twice in 0..=20 {
            let s = SpinQuantum::from_twice(twice);
            let ops = build_operators(s);
            let n = s.dim();
            assert!(ops.s_plus.column(n - 1).iter().all(|z| *z == Complex64::new(0.0, 0.0)));
            assert!(ops.s_minus.column(0).iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity_of(Projection::integer(0)).unwrap(), Parity::Even);
        assert_eq!(parity_of(Projection::integer(-3)).unwrap(), Parity::Odd);
        assert_eq!(parity_of(Projection::integer(10)).unwrap(), Parity::Even);
        assert!(parity_of(Projection::from_twice(3)).is_err());
    }

    #[test]
    fn parity_subspace_dimensions() {
        for s in 0..=10u32 {
            let spin = SpinQuantum::integer(s);
            let even = spin.projections().filter(|&m| parity_of(m).unwrap() == Parity::Even).count();
            assert_eq!(even, if s % 2 == 0 { s as usize + 1 } else { s as usize });
            assert_eq!(spin.dim() - even, if s % 2 == 0 { s as usize } else { s as usize + 1 });
        }
    }

    #[test]
    fn spin_parsing_and_display() {
        assert_eq!(SpinQuantum::new(2.5).unwrap(), SpinQuantum::from_twice(5));
        assert!(SpinQuantum::new(-1.0).is_err());
        assert!(SpinQuantum::new(0.3).is_err());
        assert_eq!(SpinQuantum::from_twice(5).to_string(), "5/2");
        assert_eq!(Projection::integer(-3).to_string(), "-3");
        assert_eq!(Projection::integer(-3).index_in(SpinQuantum::integer(10)).unwrap(), 7);
        assert!(Projection::integer(0).index_in(SpinQuantum::from_twice(1)).is_err());
    }
}
