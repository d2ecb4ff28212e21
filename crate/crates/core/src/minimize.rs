//! Golden-section search for a scalar minimum on a bracket.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Shrinks `[lo, hi]` around a minimum of `f` until it is narrower than `x_tol`
/// or stops shrinking in floating point.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;
    while b - a > x_tol && iterations < 500 {
        let width = b - a;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        iterations += 1;
        if b - a >= width {
            break;
        }
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Ok(Minimum { x, value, iterations })
}
