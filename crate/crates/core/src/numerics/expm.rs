use crate::error::{GkError, Result};
use crate::numerics::matrix::CMatrix;
use crate::C64;

const TAYLOR_DEGREE: usize = 24;

/// Matrix exponential.
///
/// Diagonal inputs are exponentiated entrywise. Everything else uses
/// scaling and squaring around a truncated Taylor series: the matrix is
/// halved until its 1-norm is at most 1/2, at which point degree 24 leaves
/// a remainder below 1e-32 relative.
pub fn matrix_exp(m: &CMatrix) -> Result<CMatrix> {
    if m.entries().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(GkError::Domain("matrix_exp: non-finite entry".into()));
    }
    if m.is_diagonal() {
        let d: Vec<C64> = m.diagonal().iter().map(|v| v.exp()).collect();
        if d.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GkError::ExpOverflow(m.max_abs()));
        }
        return Ok(CMatrix::from_diagonal(&d));
    }
    let norm = m.norm_one();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    if squarings > 1000 {
        return Err(GkError::ExpOverflow(norm));
    }
    let scaled = m.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));

    let dim = m.dim();
    let mut result = CMatrix::identity(dim);
    let mut term = CMatrix::identity(dim);
    for k in 1..=TAYLOR_DEGREE {
        term = (&term * &scaled).scale(C64::new(1.0 / k as f64, 0.0));
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    if result.entries().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(GkError::ExpOverflow(norm));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(matrix_exp(&CMatrix::zeros(4)).unwrap(), CMatrix::identity(4));
    }

    #[test]
    fn diagonal_short_circuit() {
        let thetas = [0.0, 0.3, -1.7, 12.0];
        let m = CMatrix::from_diagonal(&thetas.map(|t| C64::new(0.0, t)));
        let e = matrix_exp(&m).unwrap();
        for (i, t) in thetas.iter().enumerate() {
            assert_eq!(e[(i, i)], C64::new(0.0, *t).exp());
        }
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, -t], [t, 0]]) = [[cos t, -sin t], [sin t, cos t]]
        let t = 2.5;
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = C64::new(-t, 0.0);
        m[(1, 0)] = C64::new(t, 0.0);
        let e = matrix_exp(&m).unwrap();
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn inverse_and_adjoint_consistency() {
        let n = 12;
        let m = CMatrix::from_fn(n, |r, c| {
            if r + 1 == c {
                C64::new(-0.8 * (c as f64).sqrt(), 0.3)
            } else if c + 1 == r {
                C64::new(0.8 * (r as f64).sqrt(), 0.3)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let e = matrix_exp(&m).unwrap();
        let einv = matrix_exp(&m.scale(C64::new(-1.0, 0.0))).unwrap();
        let prod = &e * &einv;
        assert!((&prod - &CMatrix::identity(n)).max_abs() < 1e-10);
        let lhs = e.adjoint();
        let rhs = matrix_exp(&m.adjoint()).unwrap();
        assert!((&lhs - &rhs).max_abs() < 1e-11);
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matrix_exp(&m).is_err());
    }
}
