//! Gaussian wavepacket parametrizations, conversions, overlaps and norms.
//!
//! Two equivalent parametrizations are used:
//!
//! * Heller form: `psi(q) = exp[(i/hbar)(x^T A x/2 + p^T x + gamma)]` with
//!   `x = q - q_c`, complex symmetric width matrix `A` (Im A positive
//!   definite) and complex scalar `gamma`;
//! * Hagedorn form: `psi(q) = (pi hbar)^(-D/4) (det Q)^(-1/2)
//!   exp[(i/hbar)(x^T P Q^-1 x/2 + p^T x + S)]` with complex `D x D`
//!   matrices `Q, P` satisfying `Q^T P - P^T Q = 0` and
//!   `Q^dag P - P^dag Q = 2i I`, and a real action `S`.
//!
//! The Hagedorn form is used for propagation (both split flows are linear in
//! `Q, P`); the Heller form is derived on demand for overlaps and norms via
//! `A = P Q^-1`. The `(det Q)^(-1/2)` prefactor requires a branch choice: a
//! `GaussianState` carries the continuously tracked argument of `det Q`
//! along the trajectory, updated per substep under the runtime guard that no
//! substep rotates `det Q` by more than pi/2.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    det_polar, re_qq_dagger, solve_complex, sym_min_eigenvalue, sym_power, sym_sqrt_inv,
    symmetrize_c, wrap_angle, CMat, CVec, RMat, RVec,
};

const SYMMETRY_TOL: f64 = 1e-12;
const HAGEDORN_TOL: f64 = 1e-10;

/// Real symmetric positive-definite mass matrix with its cached inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct Mass {
    m: RMat,
    m_inv: RMat,
}

impl Mass {
    pub fn new(m: RMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidParameter("mass matrix not square".into()));
        }
        if (&m - m.transpose()).norm() > SYMMETRY_TOL * m.norm().max(1.0) {
            return Err(Error::InvalidParameter("mass matrix not symmetric".into()));
        }
        if sym_min_eigenvalue(&m) <= 0.0 {
            return Err(Error::InvalidParameter(
                "mass matrix not positive definite".into(),
            ));
        }
        let m_inv = sym_power(&m, -1.0)?;
        Ok(Self { m, m_inv })
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: RMat::identity(dim, dim), m_inv: RMat::identity(dim, dim) }
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(RMat::from_diagonal(&RVec::from_row_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &RMat {
        &self.m
    }

    pub fn inverse(&self) -> &RMat {
        &self.m_inv
    }

    /// Classical kinetic energy `p^T m^-1 p / 2`.
    pub fn kinetic(&self, p: &RVec) -> f64 {
        0.5 * p.dot(&(&self.m_inv * p))
    }
}

/// Wavepacket in the Heller parametrization `(q, p, A, gamma)`.
#[derive(Debug, Clone)]
pub struct HellerParams {
    q: RVec,
    p: RVec,
    a: CMat,
    gamma: Complex64,
    hbar: f64,
    mass: Arc<Mass>,
}

impl HellerParams {
    pub fn new(
        q: RVec,
        p: RVec,
        a: CMat,
        gamma: Complex64,
        hbar: f64,
        mass: Arc<Mass>,
    ) -> Result<Self> {
        let d = q.len();
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: a.nrows() });
        }
        if mass.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: mass.dim() });
        }
        if hbar <= 0.0 {
            return Err(Error::InvalidParameter("hbar must be positive".into()));
        }
        if (&a - a.transpose()).norm() > SYMMETRY_TOL {
            return Err(Error::InvalidWidth("A is not symmetric".into()));
        }
        let im_a = a.map(|z| z.im);
        if sym_min_eigenvalue(&im_a) <= 0.0 {
            return Err(Error::InvalidWidth("Im A is not positive definite".into()));
        }
        Ok(Self { q, p, a, gamma, hbar, mass })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &RVec {
        &self.q
    }

    pub fn p(&self) -> &RVec {
        &self.p
    }

    pub fn width(&self) -> &CMat {
        &self.a
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> &Arc<Mass> {
        &self.mass
    }

    pub fn im_a(&self) -> RMat {
        self.a.map(|z| z.im)
    }

    pub fn re_a(&self) -> RMat {
        self.a.map(|z| z.re)
    }

    /// Position covariance `Sigma = (hbar/2) (Im A)^-1`.
    pub fn position_covariance(&self) -> RMat {
        let y_inv = sym_power(&self.im_a(), -1.0).expect("validated Im A");
        0.5 * self.hbar * y_inv
    }
}

/// `Im gamma` that makes the Heller form unit norm for the given `Im A`.
pub fn unit_norm_gamma_im(im_a: &RMat, hbar: f64) -> f64 {
    let d = im_a.nrows() as f64;
    let ln_det_y: f64 = im_a
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.ln())
        .sum();
    0.25 * hbar * (d * (std::f64::consts::PI * hbar).ln() - ln_det_y)
}

/// Wavepacket in the Hagedorn parametrization `(q, p, Q, P, S)`.
#[derive(Debug, Clone)]
pub struct GaussianState {
    q: RVec,
    p: RVec,
    q_mat: CMat,
    p_mat: CMat,
    action: f64,
    /// Continuously tracked argument of `det Q` (not reduced mod 2 pi).
    detq_arg: f64,
    hbar: f64,
    mass: Arc<Mass>,
}

impl GaussianState {
    /// Validates the Hagedorn relations before accepting the parameters.
    pub fn new(
        q: RVec,
        p: RVec,
        q_mat: CMat,
        p_mat: CMat,
        action: f64,
        hbar: f64,
        mass: Arc<Mass>,
    ) -> Result<Self> {
        let d = q.len();
        if p.len() != d || q_mat.nrows() != d || p_mat.nrows() != d || mass.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
        if hbar <= 0.0 {
            return Err(Error::InvalidParameter("hbar must be positive".into()));
        }
        let r1 = (q_mat.transpose() * &p_mat - p_mat.transpose() * &q_mat).norm();
        if r1 > HAGEDORN_TOL {
            return Err(Error::InvalidWidth(format!(
                "Q^T P - P^T Q residual {r1:.3e}"
            )));
        }
        let two_i = CMat::identity(d, d).map(|z| z * Complex64::new(0.0, 2.0));
        let r2 = (q_mat.adjoint() * &p_mat - p_mat.adjoint() * &q_mat - two_i).norm();
        if r2 > HAGEDORN_TOL {
            return Err(Error::InvalidWidth(format!(
                "Q^dag P - P^dag Q - 2iI residual {r2:.3e}"
            )));
        }
        let (_, arg) = det_polar(&q_mat)
            .map_err(|_| Error::DegenerateState("Q is singular".into()))?;
        Ok(Self { q, p, q_mat, p_mat, action, detq_arg: arg, hbar, mass })
    }

    /// Construction without invariant checks, for internal flow updates and
    /// deliberately off-manifold states (finite differences, RK4).
    pub(crate) fn from_parts_unchecked(
        q: RVec,
        p: RVec,
        q_mat: CMat,
        p_mat: CMat,
        action: f64,
        detq_arg: f64,
        hbar: f64,
        mass: Arc<Mass>,
    ) -> Self {
        Self { q, p, q_mat, p_mat, action, detq_arg, hbar, mass }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &RVec {
        &self.q
    }

    pub fn p(&self) -> &RVec {
        &self.p
    }

    pub fn q_mat(&self) -> &CMat {
        &self.q_mat
    }

    pub fn p_mat(&self) -> &CMat {
        &self.p_mat
    }

    pub fn action(&self) -> f64 {
        self.action
    }

    pub fn detq_arg(&self) -> f64 {
        self.detq_arg
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> &Arc<Mass> {
        &self.mass
    }

    /// Position covariance `Sigma = (hbar/2) Re(Q Q^dag)`.
    pub fn position_covariance(&self) -> RMat {
        0.5 * self.hbar * re_qq_dagger(&self.q_mat)
    }

    /// Momentum covariance `(hbar/2) Re(P P^dag)`.
    pub fn momentum_covariance(&self) -> RMat {
        0.5 * self.hbar * re_qq_dagger(&self.p_mat)
    }

    /// Residuals of the two Hagedorn relations (diagnostic).
    pub fn hagedorn_residuals(&self) -> (f64, f64) {
        let d = self.dim();
        let r1 = (self.q_mat.transpose() * &self.p_mat - self.p_mat.transpose() * &self.q_mat)
            .norm();
        let two_i = CMat::identity(d, d).map(|z| z * Complex64::new(0.0, 2.0));
        let r2 = (self.q_mat.adjoint() * &self.p_mat - self.p_mat.adjoint() * &self.q_mat - two_i)
            .norm();
        (r1, r2)
    }

    /// Continuous `arg det Q` after replacing the width matrix by `new_q`.
    ///
    /// The increment is the principal argument of `det(Q_new)/det(Q_old)`;
    /// a rotation beyond pi/2 in a single substep is rejected as ambiguous.
    pub(crate) fn phase_after_q_update(&self, new_q: &CMat) -> Result<f64> {
        let (_, arg_new) = det_polar(new_q)
            .map_err(|_| Error::DegenerateState("Q became singular".into()))?;
        let increment = wrap_angle(arg_new - wrap_angle(self.detq_arg));
        if increment.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::PhaseTracking(increment));
        }
        Ok(self.detq_arg + increment)
    }
}

/// Convert a Hagedorn state to Heller parameters, `A = P Q^-1`, with `gamma`
/// chosen so that both forms describe the identical wavefunction (the
/// `(det Q)^(-1/2)` prefactor is absorbed using the tracked branch).
pub fn to_heller(s: &GaussianState) -> Result<HellerParams> {
    let lu = s.q_mat.clone().lu();
    let q_inv = lu
        .try_inverse()
        .ok_or_else(|| Error::DegenerateState("Q is singular".into()))?;
    let a = symmetrize_c(&(&s.p_mat * q_inv));
    let (ln_abs, _) = det_polar(&s.q_mat)?;
    let d = s.dim() as f64;
    let gamma = Complex64::new(
        s.action - 0.5 * s.hbar * s.detq_arg,
        s.hbar * (0.25 * d * (std::f64::consts::PI * s.hbar).ln() + 0.5 * ln_abs),
    );
    HellerParams::new(s.q.clone(), s.p.clone(), a, gamma, s.hbar, s.mass.clone())
}

/// Convert Heller parameters to a Hagedorn state.
///
/// Gauge: `Q = (Im A)^(-1/2)` (real symmetric principal root), `P = A Q`,
/// `S = Re gamma`. The result is normalized; `Im gamma` of the input only
/// rescales the norm and is not representable in the Hagedorn form.
pub fn from_heller(h: &HellerParams) -> Result<GaussianState> {
    let y = h.im_a();
    let q_mat_re = sym_sqrt_inv(&y)?;
    let q_mat = q_mat_re.map(|x| Complex64::new(x, 0.0));
    let p_mat = &h.a * &q_mat;
    GaussianState::new(
        h.q.clone(),
        h.p.clone(),
        q_mat,
        p_mat,
        h.gamma.re,
        h.hbar,
        h.mass.clone(),
    )
}

/// Norm `exp(-Im gamma/hbar) [det(pi hbar / Im A)]^(1/4)` of the Heller form.
pub fn norm(h: &HellerParams) -> f64 {
    let d = h.dim() as f64;
    let ln_det_y: f64 = h
        .im_a()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.ln())
        .sum();
    (-h.gamma.im / h.hbar + 0.25 * (d * (std::f64::consts::PI * h.hbar).ln() - ln_det_y)).exp()
}

/// Norm of a Hagedorn state through the Heller conversion. Exactly 1 up to
/// roundoff while the Hagedorn relations hold; drifts when they are violated.
pub fn state_norm(s: &GaussianState) -> Result<f64> {
    Ok(norm(&to_heller(s)?))
}

/// Momentum covariance `(hbar/2) A (Im A)^-1 A^dag`, in the explicitly real
/// form `(hbar/2) (Re A (Im A)^-1 Re A + Im A)`.
pub fn momentum_covariance(h: &HellerParams) -> RMat {
    let x = h.re_a();
    let y = h.im_a();
    let y_inv = sym_power(&y, -1.0).expect("validated Im A");
    0.5 * h.hbar * (&x * y_inv * &x + y)
}

/// Position and momentum covariances of a valid state.
#[derive(Debug, Clone)]
pub struct CovarianceData {
    pub sigma: RMat,
    pub cov_p: RMat,
}

pub fn covariance_data(s: &GaussianState) -> Result<CovarianceData> {
    let sigma = s.position_covariance();
    let cov_p = s.momentum_covariance();
    for (name, m) in [("sigma", &sigma), ("cov_p", &cov_p)] {
        if (m - m.transpose()).norm() > SYMMETRY_TOL * m.norm().max(1.0) {
            return Err(Error::InvalidWidth(format!("{name} not symmetric")));
        }
        if sym_min_eigenvalue(m) <= 0.0 {
            return Err(Error::InvalidWidth(format!("{name} not positive definite")));
        }
    }
    Ok(CovarianceData { sigma, cov_p })
}

/// Inner product `<a|b>` of two Gaussians by the closed-form D-dimensional
/// complex Gaussian integral.
pub fn overlap(a: &HellerParams, b: &HellerParams) -> Result<Complex64> {
    let d = a.dim();
    if b.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.dim() });
    }
    if (a.hbar - b.hbar).abs() > 0.0 {
        return Err(Error::InvalidParameter("hbar mismatch in overlap".into()));
    }
    let hbar = a.hbar;
    let a_conj = a.a.map(|z| z.conj());
    let c_mat = &b.a - &a_conj;

    // linear and constant coefficients of the combined exponent
    let qa = a.q.map(|x| Complex64::new(x, 0.0));
    let qb = b.q.map(|x| Complex64::new(x, 0.0));
    let pa = a.p.map(|x| Complex64::new(x, 0.0));
    let pb = b.p.map(|x| Complex64::new(x, 0.0));
    let b_vec: CVec = -(&b.a * &qb) + &a_conj * &qa + (&pb - &pa);
    let c0 = 0.5 * (qb.transpose() * &b.a * &qb)[(0, 0)]
        - 0.5 * (qa.transpose() * &a_conj * &qa)[(0, 0)]
        - pb.dot(&qb)
        + pa.dot(&qa)
        + b.gamma
        - a.gamma.conj();

    // Gaussian integral: (2 pi)^(D/2) det(-i C / hbar)^(-1/2) e^{(i/hbar)(c0 - b^T C^-1 b / 2)}
    let m = c_mat.map(|z| z * Complex64::new(0.0, -1.0 / hbar));
    let det_factor = crate::linalg::det_inv_sqrt(&m)?;
    let c_inv_b = solve_complex(&c_mat, &b_vec)?;
    let quad = b_vec.dot(&c_inv_b); // plain transpose dot (nalgebra dot on complex conjugates? see below)
    // nalgebra's `dot` on complex vectors is the unconjugated sum product.
    let exponent = Complex64::new(0.0, 1.0 / hbar) * (c0 - 0.5 * quad);
    let pref = (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0);
    Ok(pref * det_factor * exponent.exp())
}

/// L2 distance `|| a - b ||`, clamped at zero against roundoff.
pub fn state_distance(a: &HellerParams, b: &HellerParams) -> Result<f64> {
    let na = norm(a);
    let nb = norm(b);
    let ov = overlap(a, b)?;
    Ok((na * na + nb * nb - 2.0 * ov.re).max(0.0).sqrt())
}

/// Distance between two Hagedorn states.
pub fn hagedorn_distance(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    state_distance(&to_heller(a)?, &to_heller(b)?)
}

const RECORD_DIGITS: usize = 16; // 17 significant digits with {:.16e}

/// One-line text record `(q, p, Re Q, Im Q, Re P, Im P, S)` with matrices
/// flattened column by column, 17 significant digits, comma separated.
pub fn write_record(s: &GaussianState) -> String {
    let mut fields: Vec<String> = Vec::with_capacity(2 * s.dim() + 4 * s.dim() * s.dim() + 1);
    let fmt = |x: f64| format!("{:.*e}", RECORD_DIGITS, x);
    for v in s.q.iter() {
        fields.push(fmt(*v));
    }
    for v in s.p.iter() {
        fields.push(fmt(*v));
    }
    let parts: [fn(&Complex64) -> f64; 2] = [|z| z.re, |z| z.im];
    for part in [&s.q_mat, &s.p_mat] {
        for get in parts {
            for col in 0..s.dim() {
                for row in 0..s.dim() {
                    fields.push(fmt(get(&part[(row, col)])));
                }
            }
        }
    }
    fields.push(fmt(s.action));
    fields.join(",")
}

/// Parse a record produced by [`write_record`]. The branch of `det Q` is
/// reset to the principal one.
pub fn parse_record(line: &str, hbar: f64, mass: Arc<Mass>) -> Result<GaussianState> {
    let values: Vec<f64> = line
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
        .collect::<Result<_>>()?;
    let n = values.len();
    let d = (0..=64usize)
        .find(|&d| 4 * d * d + 2 * d + 1 == n)
        .ok_or_else(|| Error::Parse(format!("record length {n} is not 4D^2+2D+1")))?;
    let q = RVec::from_row_slice(&values[0..d]);
    let p = RVec::from_row_slice(&values[d..2 * d]);
    let mut off = 2 * d;
    let mut mats = Vec::new();
    for _ in 0..2 {
        let re = &values[off..off + d * d];
        let im = &values[off + d * d..off + 2 * d * d];
        let mut m = CMat::zeros(d, d);
        for col in 0..d {
            for row in 0..d {
                m[(row, col)] = Complex64::new(re[col * d + row], im[col * d + row]);
            }
        }
        mats.push(m);
        off += 2 * d * d;
    }
    let action = values[off];
    let p_mat = mats.pop().unwrap();
    let q_mat = mats.pop().unwrap();
    GaussianState::new(q, p, q_mat, p_mat, action, hbar, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_1d() -> HellerParams {
        let mass = Arc::new(Mass::identity(1));
        let a = CMat::from_element(1, 1, c(0.0, 1.0));
        let gamma = c(0.0, unit_norm_gamma_im(&a.map(|z| z.im), 1.0));
        HellerParams::new(
            RVec::zeros(1),
            RVec::zeros(1),
            a,
            gamma,
            1.0,
            mass,
        )
        .unwrap()
    }

    #[test]
    fn identity_case_round_trip() {
        // (q=0, p=0, Q=I, P=iI, S=0, D=1) -> A = i and unit norm
        let mass = Arc::new(Mass::identity(1));
        let s = GaussianState::new(
            RVec::zeros(1),
            RVec::zeros(1),
            CMat::from_element(1, 1, c(1.0, 0.0)),
            CMat::from_element(1, 1, c(0.0, 1.0)),
            0.0,
            1.0,
            mass,
        )
        .unwrap();
        let h = to_heller(&s).unwrap();
        assert_relative_eq!(h.width()[(0, 0)].im, 1.0, epsilon = 1e-14);
        assert_relative_eq!(h.width()[(0, 0)].re, 0.0, epsilon = 1e-14);
        assert_relative_eq!(norm(&h), 1.0, epsilon = 1e-13);
        // Im gamma = (1/4) ln pi for the unit-norm 1D Gaussian with A = i
        assert_relative_eq!(h.gamma().im, 0.25 * std::f64::consts::PI.ln(), epsilon = 1e-14);
    }

    #[test]
    fn from_heller_canonical_and_sigma() {
        // A = 2i -> Sigma = (hbar/2)(Im A)^-1 = 1/4
        let mass = Arc::new(Mass::identity(1));
        let a = CMat::from_element(1, 1, c(0.0, 2.0));
        let h = HellerParams::new(RVec::zeros(1), RVec::zeros(1), a, c(0.0, 0.0), 1.0, mass)
            .unwrap();
        let s = from_heller(&h).unwrap();
        assert_relative_eq!(s.position_covariance()[(0, 0)], 0.25, epsilon = 1e-13);
        assert_relative_eq!(h.position_covariance()[(0, 0)], 0.25, epsilon = 1e-13);
        // canonical A = i gives Q = 1, P = i
        let s1 = from_heller(&unit_1d()).unwrap();
        assert_relative_eq!(s1.q_mat()[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(s1.p_mat()[(0, 0)].im, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn round_trip_preserves_q_p_a() {
        let mass = Arc::new(Mass::identity(2));
        let a = CMat::from_row_slice(
            2,
            2,
            &[c(0.3, 1.2), c(-0.1, 0.4), c(-0.1, 0.4), c(0.2, 0.9)],
        );
        let h = HellerParams::new(
            RVec::from_row_slice(&[0.4, -0.6]),
            RVec::from_row_slice(&[1.0, 0.2]),
            a.clone(),
            c(0.7, unit_norm_gamma_im(&a.map(|z| z.im), 1.0)),
            1.0,
            mass,
        )
        .unwrap();
        let h2 = to_heller(&from_heller(&h).unwrap()).unwrap();
        assert!((h2.width() - h.width()).norm() < 1e-12);
        assert!((h2.q() - h.q()).norm() < 1e-12);
        assert!((h2.p() - h.p()).norm() < 1e-12);
        assert_relative_eq!(h2.gamma().re, h.gamma().re, epsilon = 1e-12);
    }

    #[test]
    fn norm_examples() {
        assert_relative_eq!(norm(&unit_1d()), 1.0, epsilon = 1e-14);
        // solve Eq. for unit norm in 2D with A = diag(i, 2i)
        let mass = Arc::new(Mass::identity(2));
        let a = CMat::from_diagonal(&CVec::from_row_slice(&[c(0.0, 1.0), c(0.0, 2.0)]));
        let gamma = c(1.3, unit_norm_gamma_im(&a.map(|z| z.im), 1.0));
        let h = HellerParams::new(RVec::zeros(2), RVec::zeros(2), a, gamma, 1.0, mass).unwrap();
        assert_relative_eq!(norm(&h), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn overlap_identical_and_displaced() {
        let h = unit_1d();
        let ov = overlap(&h, &h).unwrap();
        assert_relative_eq!(ov.re, 1.0, epsilon = 1e-13);
        assert_relative_eq!(ov.im, 0.0, epsilon = 1e-13);

        // displaced by d with equal widths: exp(-d^2/4)
        let d = 1.7;
        let mass = Arc::new(Mass::identity(1));
        let a = CMat::from_element(1, 1, c(0.0, 1.0));
        let gamma = c(0.0, unit_norm_gamma_im(&a.map(|z| z.im), 1.0));
        let hb = HellerParams::new(
            RVec::from_row_slice(&[d]),
            RVec::zeros(1),
            a,
            gamma,
            1.0,
            mass,
        )
        .unwrap();
        let ov = overlap(&h, &hb).unwrap();
        assert_relative_eq!(ov.re, (-d * d / 4.0).exp(), epsilon = 1e-13);
        assert_relative_eq!(ov.im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn distance_trivial_cases() {
        let h = unit_1d();
        assert_relative_eq!(state_distance(&h, &h).unwrap(), 0.0, epsilon = 1e-7);
        // far separated normalized states: distance -> sqrt(2)
        let mass = Arc::new(Mass::identity(1));
        let a = CMat::from_element(1, 1, c(0.0, 1.0));
        let gamma = c(0.0, unit_norm_gamma_im(&a.map(|z| z.im), 1.0));
        let far = HellerParams::new(
            RVec::from_row_slice(&[40.0]),
            RVec::zeros(1),
            a,
            gamma,
            1.0,
            mass,
        )
        .unwrap();
        assert_relative_eq!(
            state_distance(&h, &far).unwrap(),
            2.0f64.sqrt(),
            epsilon = 1e-6
        );
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let h1 = unit_1d();
        let mass = Arc::new(Mass::identity(2));
        let a = CMat::from_diagonal(&CVec::from_row_slice(&[c(0.0, 1.0), c(0.0, 1.0)]));
        let h2 =
            HellerParams::new(RVec::zeros(2), RVec::zeros(2), a, c(0.0, 0.0), 1.0, mass).unwrap();
        assert!(matches!(
            overlap(&h1, &h2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn invalid_width_is_rejected() {
        let mass = Arc::new(Mass::identity(1));
        // Im A negative
        let a = CMat::from_element(1, 1, c(0.0, -1.0));
        assert!(matches!(
            HellerParams::new(RVec::zeros(1), RVec::zeros(1), a, c(0.0, 0.0), 1.0, mass),
            Err(Error::InvalidWidth(_))
        ));
    }

    #[test]
    fn hagedorn_invariants_are_enforced() {
        let mass = Arc::new(Mass::identity(1));
        // P = 2i violates Q^dag P - P^dag Q = 2i I
        let bad = GaussianState::new(
            RVec::zeros(1),
            RVec::zeros(1),
            CMat::from_element(1, 1, c(1.0, 0.0)),
            CMat::from_element(1, 1, c(0.0, 2.0)),
            0.0,
            1.0,
            mass,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn record_round_trip() {
        let mass = Arc::new(Mass::identity(2));
        let a = CMat::from_row_slice(
            2,
            2,
            &[c(0.3, 1.2), c(-0.1, 0.4), c(-0.1, 0.4), c(0.2, 0.9)],
        );
        let h = HellerParams::new(
            RVec::from_row_slice(&[0.4, -0.6]),
            RVec::from_row_slice(&[1.0, 0.2]),
            a,
            c(0.7, 0.0),
            1.0,
            mass.clone(),
        )
        .unwrap();
        let s = from_heller(&h).unwrap();
        let line = write_record(&s);
        let s2 = parse_record(&line, 1.0, mass).unwrap();
        assert!((s.q_mat() - s2.q_mat()).norm() < 1e-15);
        assert!((s.p_mat() - s2.p_mat()).norm() < 1e-15);
        assert_relative_eq!(s.action(), s2.action(), epsilon = 1e-15);
    }
}
