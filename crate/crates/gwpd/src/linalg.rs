//! Small dense linear-algebra helpers shared across the crate.
//!
//! Everything here operates on dynamically sized `nalgebra` matrices with
//! dimensions of the order of the wavepacket dimension D (at most a few tens).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Force exact symmetry on a nearly symmetric real matrix.
pub fn symmetrize(m: &RMat) -> RMat {
    0.5 * (m + m.transpose())
}

/// Force exact (complex) symmetry, `(M + M^T)/2`.
pub fn symmetrize_c(m: &CMat) -> CMat {
    let mt = m.transpose();
    (m + mt).map(|z| 0.5 * z)
}

/// Principal square root of a symmetric positive-definite matrix.
pub fn sym_sqrt(m: &RMat) -> Result<RMat> {
    sym_power(m, 0.5)
}

/// Inverse principal square root of a symmetric positive-definite matrix.
pub fn sym_sqrt_inv(m: &RMat) -> Result<RMat> {
    sym_power(m, -0.5)
}

/// `m^p` through the symmetric eigendecomposition; requires all eigenvalues > 0.
pub fn sym_power(m: &RMat, p: f64) -> Result<RMat> {
    let eig = m.clone().symmetric_eigen();
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v <= 0.0 {
            return Err(Error::InvalidWidth(format!(
                "matrix not positive definite (eigenvalue {v:.3e})"
            )));
        }
        *v = v.powf(p);
    }
    let vecs = eig.eigenvectors;
    Ok(&vecs * RMat::from_diagonal(&vals) * vecs.transpose())
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn sym_min_eigenvalue(m: &RMat) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Pivots of the root-free LDL^T factorization of a complex *symmetric*
/// matrix (no conjugation). Exists whenever all leading principal minors are
/// nonzero; in this crate it is only applied to matrices whose real part is
/// positive definite, which guarantees pivots with positive real part.
pub fn ldlt_pivots(m: &CMat) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let mut l = CMat::identity(n, n);
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let mut dj = m[(j, j)];
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        if dj.norm() == 0.0 {
            return Err(Error::DegenerateState("singular pivot in LDL^T".into()));
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = v / dj;
        }
    }
    Ok(d)
}

/// `det(M)^(-1/2)` for a complex symmetric `M` with positive-definite real
/// part, on the branch analytically continued from real positive-definite
/// matrices: the product of principal square roots of the LDL^T pivots.
pub fn det_inv_sqrt(m: &CMat) -> Result<Complex64> {
    let pivots = ldlt_pivots(m)?;
    let mut out = Complex64::new(1.0, 0.0);
    for d in pivots {
        if d.re <= 0.0 {
            return Err(Error::DegenerateState(format!(
                "LDL^T pivot {d} has nonpositive real part"
            )));
        }
        out /= d.sqrt();
    }
    Ok(out)
}

/// Determinant of a complex matrix in polar, overflow-free form:
/// returns `(ln |det|, Arg det)` with the argument in `(-pi, pi]`.
pub fn det_polar(m: &CMat) -> Result<(f64, f64)> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut ln_abs = 0.0f64;
    let mut arg = 0.0f64;
    for k in 0..n {
        // partial pivoting
        let mut piv = k;
        let mut best = a[(k, k)].norm_sqr();
        for i in (k + 1)..n {
            let v = a[(i, k)].norm_sqr();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Err(Error::DegenerateState("singular matrix in det".into()));
        }
        if piv != k {
            a.swap_rows(piv, k);
            arg += std::f64::consts::PI; // row swap flips the sign
        }
        let akk = a[(k, k)];
        ln_abs += akk.norm().ln();
        arg += akk.arg();
        for i in (k + 1)..n {
            let f = a[(i, k)] / akk;
            for j in (k + 1)..n {
                let v = a[(k, j)];
                a[(i, j)] -= f * v;
            }
        }
    }
    Ok((ln_abs, wrap_angle(arg)))
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x % two_pi;
    if y <= -std::f64::consts::PI {
        y += two_pi;
    } else if y > std::f64::consts::PI {
        y -= two_pi;
    }
    y
}

/// Solve `C x = b` for complex symmetric `C` by LU with partial pivoting.
pub fn solve_complex(c: &CMat, b: &CVec) -> Result<CVec> {
    c.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::DegenerateState("singular linear system".into()))
}

/// `exp(x)`, failing loudly when the argument exceeds `cap`.
pub fn checked_exp(x: f64, cap: f64) -> Result<f64> {
    if x > cap {
        Err(Error::PotentialRange { argument: x, cap })
    } else {
        Ok(x.exp())
    }
}

/// Real part of `Q Q^dagger` (symmetric by construction).
pub fn re_qq_dagger(q: &CMat) -> RMat {
    let n = q.nrows();
    let mut out = RMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for k in 0..n {
                let a = q[(i, k)];
                let b = q[(j, k)];
                s += a.re * b.re + a.im * b.im;
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_inv_sqrt_matches_scalar_branch() {
        // 1x1: det(M)^(-1/2) is the principal inverse square root
        let m = CMat::from_element(1, 1, c(0.3, 2.0));
        let got = det_inv_sqrt(&m).unwrap();
        let want = c(0.3, 2.0).sqrt().inv();
        assert_relative_eq!(got.re, want.re, max_relative = 1e-14);
        assert_relative_eq!(got.im, want.im, max_relative = 1e-14);
    }

    #[test]
    fn det_polar_tracks_magnitude_and_phase() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 1.0), c(0.5, 0.0), c(0.0, 0.3), c(1.0, -2.0)]);
        let det = (c(2.0, 1.0) * c(1.0, -2.0)) - (c(0.5, 0.0) * c(0.0, 0.3));
        let (ln_abs, arg) = det_polar(&m).unwrap();
        assert_relative_eq!(ln_abs, det.norm().ln(), max_relative = 1e-13);
        assert_relative_eq!(arg, det.arg(), max_relative = 1e-13);
    }

    #[test]
    fn sym_sqrt_round_trip() {
        let l = RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.4, 0.8]);
        let y = &l * l.transpose();
        let r = sym_sqrt(&y).unwrap();
        assert_relative_eq!((&r * &r - &y).norm(), 0.0, epsilon = 1e-12);
        let ri = sym_sqrt_inv(&y).unwrap();
        assert_relative_eq!((&r * &ri - RMat::identity(2, 2)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn checked_exp_guards_range() {
        assert!(checked_exp(1.0, 200.0).is_ok());
        assert!(matches!(
            checked_exp(201.0, 200.0),
            Err(Error::PotentialRange { .. })
        ));
    }
}
