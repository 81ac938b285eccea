//! Fixed-size 4x4 linear algebra.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::vector::{minor3, PgVec4};

pub type Mat4 = Matrix4<f64>;

/// Largest `‖Mt‖₁` accepted by [`expm4`].
pub const EXPM_NORM_LIMIT: f64 = 10.0;
const TAYLOR_ORDER: usize = 18;

/// Determinant of the matrix whose columns are `cols`, by cofactor expansion
/// along the first column.
pub fn det4(cols: [PgVec4; 4]) -> f64 {
    // det(A) = det(Aᵀ): treat each column as a row and expand along row 0.
    let rows = cols.map(|c| c.to_array());
    let mut det = 0.0;
    for j in 0..4 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * rows[0][j] * minor3([rows[1], rows[2], rows[3]], j);
    }
    det
}

fn one_norm(m: &Mat4) -> f64 {
    (0..4)
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(M t)` by scaling and squaring with a degree-18 Taylor polynomial.
pub fn expm4(m: &Mat4, t: f64) -> Result<Mat4> {
    let a = m * t;
    let norm = one_norm(&a);
    if !norm.is_finite() || norm > EXPM_NORM_LIMIT {
        return Err(Error::NormTooLarge { norm });
    }
    let mut squarings = 0;
    let mut scaled_norm = norm;
    while scaled_norm > 0.25 {
        scaled_norm /= 2.0;
        squarings += 1;
    }
    let a = a / 2f64.powi(squarings);

    // Horner form of sum_{k<=18} A^k / k!.
    let mut e = Mat4::identity();
    for k in (1..=TAYLOR_ORDER).rev() {
        e = Mat4::identity() + (a * e) / k as f64;
    }
    for _ in 0..squarings {
        e = e * e;
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> PgVec4 {
        let mut a = [0.0; 4];
        a[i] = 1.0;
        PgVec4::from_array(a)
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(det4([e(0), e(1), e(2), e(3)]), 1.0);
        assert_eq!(det4([e(1), e(0), e(2), e(3)]), -1.0);
        let cols = [
            PgVec4::new(2.0, 0.0, 0.0, 0.0),
            PgVec4::new(0.0, 3.0, 0.0, 0.0),
            PgVec4::new(0.0, 0.0, -1.0, 0.0),
            PgVec4::new(7.0, 5.0, 1.0, 0.5),
        ];
        assert_eq!(det4(cols), -3.0);
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        assert_eq!(expm4(&Mat4::zeros(), 3.0).unwrap(), Mat4::identity());
        let d = Mat4::from_diagonal(&nalgebra::Vector4::new(1.0, -2.0, 0.5, 0.0));
        let r = expm4(&d, 1.5).unwrap();
        for (i, lam) in [1.0f64, -2.0, 0.5, 0.0].iter().enumerate() {
            let want = (lam * 1.5).exp();
            assert!((r[(i, i)] - want).abs() <= 1e-12 * want.max(1.0));
        }
        assert!(r.iter().enumerate().all(|(k, v)| k % 5 == 0 || *v == 0.0));
    }

    #[test]
    fn nilpotent_series_terminates() {
        let mut n = Mat4::zeros();
        n[(0, 1)] = 1.0;
        n[(1, 2)] = 2.0;
        n[(2, 3)] = 3.0;
        n[(0, 3)] = -1.0;
        let t = 0.7;
        let nt = n * t;
        let want = Mat4::identity() + nt + nt * nt / 2.0 + nt * nt * nt / 6.0;
        let got = expm4(&n, t).unwrap();
        assert!((got - want).amax() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let mut m = Mat4::zeros();
        m[(1, 2)] = -1.0;
        m[(2, 1)] = 1.0;
        let t = 2.5;
        let r = expm4(&m, t).unwrap();
        assert!((r[(1, 1)] - t.cos()).abs() < 1e-13);
        assert!((r[(2, 1)] - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn refuses_large_norm() {
        let m = Mat4::identity() * 4.0;
        assert!(matches!(expm4(&m, 3.0), Err(Error::NormTooLarge { .. })));
    }
}
