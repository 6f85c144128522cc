//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{GmlError, Result};

/// Relative tolerance for the symmetry check on dispersion matrices.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Pivots below this fraction of the largest diagonal entry count as zero in
/// [`pivoted_rank`].
pub const RANK_TOLERANCE: f64 = 1e-10;

pub fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(GmlError::Shape {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let n = check_square(m)?;
    let scale = m.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOLERANCE * scale {
                return Err(GmlError::Domain(format!(
                    "matrix is not symmetric: entries ({i}, {j}) and ({j}, {i}) differ"
                )));
            }
        }
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(GmlError::domain("matrix has non-finite entries"));
    }
    Ok(())
}

/// Cholesky factor of a symmetric positive-definite matrix together with
/// `ln det`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    cholesky: Cholesky<f64, Dyn>,
    log_det: f64,
}

impl SpdFactor {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        check_symmetric(m)?;
        if m.nrows() == 0 {
            return Err(GmlError::domain("matrix is empty"));
        }
        let sym = (m + m.transpose()) * 0.5;
        let cholesky = Cholesky::new(sym).ok_or_else(|| GmlError::domain("matrix is not positive definite"))?;
        let log_det = 2.0 * cholesky.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(SpdFactor { cholesky, log_det })
    }

    pub fn dim(&self) -> usize {
        self.cholesky.l_dirty().nrows()
    }

    /// Lower-triangular `L` with `L Lᵀ = M`.
    pub fn lower(&self) -> DMatrix<f64> {
        self.cholesky.l()
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `vᵀ M⁻¹ v`.
    pub fn quadratic_form(&self, v: &DVector<f64>) -> f64 {
        let l = self.cholesky.l_dirty();
        // forward substitution on the lower triangle only
        let n = v.len();
        let mut y = vec![0.0; n];
        let mut q = 0.0;
        for i in 0..n {
            let mut s = v[i];
            for (j, yj) in y.iter().enumerate().take(i) {
                s -= l[(i, j)] * yj;
            }
            y[i] = s / l[(i, i)];
            q += y[i] * y[i];
        }
        q
    }

    /// `L⁻¹ v`.
    pub fn whiten(&self, v: &DVector<f64>) -> DVector<f64> {
        self.cholesky
            .l_dirty()
            .solve_lower_triangular(v)
            .unwrap_or_else(|| v.clone())
    }

    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.cholesky.solve(b)
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        self.cholesky.inverse()
    }
}

/// Numerical rank of a symmetric positive-semidefinite matrix from a
/// diagonally pivoted Cholesky factorization.
pub fn pivoted_rank(m: &DMatrix<f64>) -> Result<usize> {
    check_symmetric(m)?;
    let n = m.nrows();
    let mut a = m.clone();
    let largest = (0..n).map(|i| a[(i, i)]).fold(0.0, f64::max);
    if largest <= 0.0 {
        return Ok(0);
    }
    let threshold = RANK_TOLERANCE * largest;
    for k in 0..n {
        let (pivot, value) =
            (k..n)
                .map(|i| (i, a[(i, i)]))
                .fold((k, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
        if value <= threshold {
            return Ok(k);
        }
        a.swap_rows(k, pivot);
        a.swap_columns(k, pivot);
        let d = value.sqrt();
        a[(k, k)] = d;
        for i in k + 1..n {
            a[(i, k)] /= d;
        }
        for j in k + 1..n {
            for i in j..n {
                let update = a[(i, k)] * a[(j, k)];
                a[(i, j)] -= update;
                a[(j, i)] = a[(i, j)];
            }
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spd3() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, -0.2, 0.5, -0.2, 2.0])
    }

    #[test]
    fn factor_and_log_det() {
        let m = spd3();
        let f = SpdFactor::new(&m).unwrap();
        let l = f.lower();
        assert!((&l * l.transpose() - &m).amax() < 1e-14);
        assert_relative_eq!(f.log_det(), m.determinant().ln(), max_relative = 1e-14);
    }

    #[test]
    fn quadratic_form_matches_inverse() {
        let m = spd3();
        let f = SpdFactor::new(&m).unwrap();
        let v = DVector::from_vec(vec![0.3, -1.2, 2.0]);
        let direct = (v.transpose() * m.try_inverse().unwrap() * &v)[(0, 0)];
        assert_relative_eq!(f.quadratic_form(&v), direct, max_relative = 1e-13);
        assert_relative_eq!(f.whiten(&v).norm_squared(), direct, max_relative = 1e-13);
    }

    #[test]
    fn rejects_bad_matrices() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(SpdFactor::new(&asym).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(SpdFactor::new(&indefinite).is_err());
        let rect = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(SpdFactor::new(&rect), Err(GmlError::Shape { .. })));
    }

    #[test]
    fn ranks() {
        assert_eq!(pivoted_rank(&spd3()).unwrap(), 3);
        let b = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        assert_eq!(pivoted_rank(&(&b * b.transpose())).unwrap(), 1);
        let b = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 3.0, 0.0, 4.0, 6.0]);
        assert_eq!(pivoted_rank(&(&b * b.transpose())).unwrap(), 2);
        assert_eq!(pivoted_rank(&DMatrix::zeros(2, 2)).unwrap(), 0);
    }
}
