//! Potential-energy models with analytic derivatives up to fourth order and
//! analytic Gaussian expectation values.
//!
//! The coupled Morse potential
//!
//! ```text
//! V(q) = V_eq + sum_j d_e' [1 - y_j]^2 + d_e [1 - y]^2,
//! y_j = exp[-a_j' (q_j - q_eq,j)],   y = exp[-a^T (q - q_eq)],
//! ```
//!
//! is a sum of "channels" of the common shape `d (1 - e^{-u})^2` with
//! `u = v^T (q - q_eq)` (per-mode: `v = a_j' e_j`; coupling: `v = a`). All
//! q-derivatives of a channel are `d f_n(y) v^(x n)` with
//! `f_n(y) = -2(-1)^n y + (-2)^n y^2`, and the Gaussian expectation value in
//! a state with center `q_c` and position covariance `Sigma` follows from
//! `<exp(-v^T(x - q_eq))> = y(q_c) exp(v^T Sigma v / 2)`, so expectation
//! tensors have the same outer-product structure with
//! `y -> y e^{s/2}, y^2 -> y^2 e^{2s}`, `s = v^T Sigma v`.
//!
//! Decay parameters are derived from the dimensionless anharmonicities once
//! at construction: `a_j' = chi_j' sqrt(8 d_e')`, `a = chi sqrt(8 d_e)`.

use std::cell::Cell;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{checked_exp, sym_power, sym_sqrt, RMat, RVec};
use crate::states::{GaussianState, Mass};
use crate::tensor::{Tensor3, Tensor4};

/// Derivatives and Gaussian expectation values of a potential-energy surface.
///
/// `sigma` is the position covariance of the Gaussian the expectation is
/// taken in; all returned tensors are totally symmetric.
pub trait PotentialModel {
    fn dim(&self) -> usize;

    fn value(&self, q: &RVec) -> Result<f64>;
    fn gradient(&self, q: &RVec) -> Result<RVec>;
    fn hessian(&self, q: &RVec) -> Result<RMat>;
    fn third_derivative(&self, q: &RVec) -> Result<Tensor3>;
    fn fourth_derivative(&self, q: &RVec) -> Result<Tensor4>;

    fn mean_value(&self, q: &RVec, sigma: &RMat) -> Result<f64>;
    fn mean_gradient(&self, q: &RVec, sigma: &RMat) -> Result<RVec>;
    fn mean_hessian(&self, q: &RVec, sigma: &RMat) -> Result<RMat>;
    fn mean_third_derivative(&self, q: &RVec, sigma: &RMat) -> Result<Tensor3>;
    fn mean_fourth_derivative(&self, q: &RVec, sigma: &RMat) -> Result<Tensor4>;

    /// `V'''(q) : Sigma`, contracting the last two indices.
    fn third_contracted(&self, q: &RVec, sigma: &RMat) -> Result<RVec> {
        Ok(self.third_derivative(q)?.contract_last2(sigma))
    }

    /// `V''''(q) : Sigma`, contracting the last two indices.
    fn fourth_contracted(&self, q: &RVec, sigma: &RMat) -> Result<RMat> {
        Ok(self.fourth_derivative(q)?.contract_last2(sigma))
    }
}

/// n-th derivative factor of `(1 - y)^2` with respect to `u`, where
/// `y = e^{-u}`; the two arguments are (a stand-in for) `y` and `y^2`.
#[inline]
fn channel_factor(n: u32, y: f64, y2: f64) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    -2.0 * sign * y + sign * (2.0f64).powi(n as i32) * y2
}

/// D-dimensional coupled Morse potential.
#[derive(Debug, Clone)]
pub struct CoupledMorse {
    q_eq: RVec,
    v_eq: f64,
    de_prime: f64,
    chi_prime: RVec,
    de_cpl: f64,
    chi_cpl: RVec,
    a_prime: RVec,
    a_cpl: RVec,
    exp_cap: f64,
}

pub const DEFAULT_EXP_CAP: f64 = 200.0;

impl CoupledMorse {
    pub fn new(
        q_eq: RVec,
        v_eq: f64,
        de_prime: f64,
        chi_prime: RVec,
        de_cpl: f64,
        chi_cpl: RVec,
    ) -> Result<Self> {
        let d = q_eq.len();
        if chi_prime.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: chi_prime.len() });
        }
        if chi_cpl.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: chi_cpl.len() });
        }
        if de_prime <= 0.0 {
            return Err(Error::InvalidParameter("d_e' must be positive".into()));
        }
        if de_cpl < 0.0 {
            return Err(Error::InvalidParameter("d_e must be nonnegative".into()));
        }
        let a_prime = chi_prime.map(|x| x * (8.0 * de_prime).sqrt());
        let a_cpl = chi_cpl.map(|x| x * (8.0 * de_cpl).sqrt());
        Ok(Self {
            q_eq,
            v_eq,
            de_prime,
            chi_prime,
            de_cpl,
            chi_cpl,
            a_prime,
            a_cpl,
            exp_cap: DEFAULT_EXP_CAP,
        })
    }

    pub fn with_exp_cap(mut self, cap: f64) -> Self {
        self.exp_cap = cap;
        self
    }

    pub fn q_eq(&self) -> &RVec {
        &self.q_eq
    }

    pub fn v_eq(&self) -> f64 {
        self.v_eq
    }

    pub fn de_prime(&self) -> f64 {
        self.de_prime
    }

    pub fn chi_prime(&self) -> &RVec {
        &self.chi_prime
    }

    pub fn de_coupling(&self) -> f64 {
        self.de_cpl
    }

    pub fn chi_coupling(&self) -> &RVec {
        &self.chi_cpl
    }

    /// Per-mode decay parameters `a_j' = chi_j' sqrt(8 d_e')`.
    pub fn a_prime(&self) -> &RVec {
        &self.a_prime
    }

    /// Coupling decay vector `a = chi sqrt(8 d_e)`.
    pub fn a_coupling(&self) -> &RVec {
        &self.a_cpl
    }

    /// `y_j` and `y_j^2` for mode `j` at `q`.
    fn mode_y(&self, q: &RVec, j: usize) -> Result<(f64, f64)> {
        let u = self.a_prime[j] * (q[j] - self.q_eq[j]);
        Ok((checked_exp(-u, self.exp_cap)?, checked_exp(-2.0 * u, self.exp_cap)?))
    }

    /// `y` and `y^2` of the coupling channel at `q`, or None when `d_e = 0`.
    fn coupling_y(&self, q: &RVec) -> Result<Option<(f64, f64)>> {
        if self.de_cpl == 0.0 {
            return Ok(None);
        }
        let u = self.a_cpl.dot(&(q - &self.q_eq));
        Ok(Some((
            checked_exp(-u, self.exp_cap)?,
            checked_exp(-2.0 * u, self.exp_cap)?,
        )))
    }

    /// Expectation analogues `<y>` and `<y^2>`: `y e^{s/2}` and `y^2 e^{2s}`
    /// with `u = v^T (q - q_eq)` and `s = v^T Sigma v`, overflow-guarded on
    /// the combined exponents.
    fn mode_y_mean(&self, q: &RVec, sigma: &RMat, j: usize) -> Result<(f64, f64)> {
        let u = self.a_prime[j] * (q[j] - self.q_eq[j]);
        let s = self.a_prime[j] * self.a_prime[j] * sigma[(j, j)];
        Ok((
            checked_exp(-u + 0.5 * s, self.exp_cap)?,
            checked_exp(-2.0 * u + 2.0 * s, self.exp_cap)?,
        ))
    }

    fn coupling_y_mean(&self, q: &RVec, sigma: &RMat) -> Result<Option<(f64, f64)>> {
        if self.de_cpl == 0.0 {
            return Ok(None);
        }
        let u = self.a_cpl.dot(&(q - &self.q_eq));
        let s = self.a_cpl.dot(&(sigma * &self.a_cpl));
        Ok(Some((
            checked_exp(-u + 0.5 * s, self.exp_cap)?,
            checked_exp(-2.0 * u + 2.0 * s, self.exp_cap)?,
        )))
    }

    /// Shared assembly of the plain and expectation tensors: the only
    /// difference between the two is which `(y, y^2)` pair enters.
    fn assemble<F, G>(&self, order: u32, mode_y: F, cpl_y: G) -> Result<Assembled>
    where
        F: Fn(usize) -> Result<(f64, f64)>,
        G: Fn() -> Result<Option<(f64, f64)>>,
    {
        let d = self.dim();
        let mut out = match order {
            0 => Assembled::Scalar(self.v_eq),
            1 => Assembled::Vector(RVec::zeros(d)),
            2 => Assembled::Matrix(RMat::zeros(d, d)),
            3 => Assembled::Rank3(Tensor3::zeros(d)),
            4 => Assembled::Rank4(Tensor4::zeros(d)),
            n => return Err(Error::UnsupportedOrder(n)),
        };
        for j in 0..d {
            let (y, y2) = mode_y(j)?;
            let aj = self.a_prime[j];
            match &mut out {
                Assembled::Scalar(v) => *v += self.de_prime * (1.0 - 2.0 * y + y2),
                Assembled::Vector(g) => g[j] += self.de_prime * channel_factor(1, y, y2) * aj,
                Assembled::Matrix(h) => {
                    h[(j, j)] += self.de_prime * channel_factor(2, y, y2) * aj * aj
                }
                Assembled::Rank3(t) => {
                    t.add(j, j, j, self.de_prime * channel_factor(3, y, y2) * aj * aj * aj)
                }
                Assembled::Rank4(t) => t.add(
                    j,
                    j,
                    j,
                    j,
                    self.de_prime * channel_factor(4, y, y2) * aj * aj * aj * aj,
                ),
            }
        }
        if let Some((y, y2)) = cpl_y()? {
            let a = &self.a_cpl;
            match &mut out {
                Assembled::Scalar(v) => *v += self.de_cpl * (1.0 - 2.0 * y + y2),
                Assembled::Vector(g) => *g += self.de_cpl * channel_factor(1, y, y2) * a,
                Assembled::Matrix(h) => {
                    *h += self.de_cpl * channel_factor(2, y, y2) * a * a.transpose()
                }
                Assembled::Rank3(t) => t.add_outer3(self.de_cpl * channel_factor(3, y, y2), a),
                Assembled::Rank4(t) => t.add_outer4(self.de_cpl * channel_factor(4, y, y2), a),
            }
        }
        Ok(out)
    }

    fn plain(&self, q: &RVec, order: u32) -> Result<Assembled> {
        self.assemble(order, |j| self.mode_y(q, j), || self.coupling_y(q))
    }

    fn mean(&self, q: &RVec, sigma: &RMat, order: u32) -> Result<Assembled> {
        self.assemble(
            order,
            |j| self.mode_y_mean(q, sigma, j),
            || self.coupling_y_mean(q, sigma),
        )
    }
}

enum Assembled {
    Scalar(f64),
    Vector(RVec),
    Matrix(RMat),
    Rank3(Tensor3),
    Rank4(Tensor4),
}

impl Assembled {
    fn scalar(self) -> f64 {
        match self {
            Assembled::Scalar(v) => v,
            _ => unreachable!(),
        }
    }
    fn vector(self) -> RVec {
        match self {
            Assembled::Vector(v) => v,
            _ => unreachable!(),
        }
    }
    fn matrix(self) -> RMat {
        match self {
            Assembled::Matrix(v) => v,
            _ => unreachable!(),
        }
    }
    fn rank3(self) -> Tensor3 {
        match self {
            Assembled::Rank3(v) => v,
            _ => unreachable!(),
        }
    }
    fn rank4(self) -> Tensor4 {
        match self {
            Assembled::Rank4(v) => v,
            _ => unreachable!(),
        }
    }
}

impl PotentialModel for CoupledMorse {
    fn dim(&self) -> usize {
        self.q_eq.len()
    }

    fn value(&self, q: &RVec) -> Result<f64> {
        Ok(self.plain(q, 0)?.scalar())
    }

    fn gradient(&self, q: &RVec) -> Result<RVec> {
        Ok(self.plain(q, 1)?.vector())
    }

    fn hessian(&self, q: &RVec) -> Result<RMat> {
        Ok(self.plain(q, 2)?.matrix())
    }

    fn third_derivative(&self, q: &RVec) -> Result<Tensor3> {
        Ok(self.plain(q, 3)?.rank3())
    }

    fn fourth_derivative(&self, q: &RVec) -> Result<Tensor4> {
        Ok(self.plain(q, 4)?.rank4())
    }

    fn mean_value(&self, q: &RVec, sigma: &RMat) -> Result<f64> {
        Ok(self.mean(q, sigma, 0)?.scalar())
    }

    fn mean_gradient(&self, q: &RVec, sigma: &RMat) -> Result<RVec> {
        Ok(self.mean(q, sigma, 1)?.vector())
    }

    fn mean_hessian(&self, q: &RVec, sigma: &RMat) -> Result<RMat> {
        Ok(self.mean(q, sigma, 2)?.matrix())
    }

    fn mean_third_derivative(&self, q: &RVec, sigma: &RMat) -> Result<Tensor3> {
        Ok(self.mean(q, sigma, 3)?.rank3())
    }

    fn mean_fourth_derivative(&self, q: &RVec, sigma: &RMat) -> Result<Tensor4> {
        Ok(self.mean(q, sigma, 4)?.rank4())
    }

    // O(D^2) short cuts: a channel contributes `d f_3(y) (v^T Sigma v) v` and
    // `d f_4(y) (v^T Sigma v) v v^T` to the contracted tensors.
    fn third_contracted(&self, q: &RVec, sigma: &RMat) -> Result<RVec> {
        let d = self.dim();
        let mut out = RVec::zeros(d);
        for j in 0..d {
            let (y, y2) = self.mode_y(q, j)?;
            let aj = self.a_prime[j];
            out[j] += self.de_prime * channel_factor(3, y, y2) * aj * aj * aj * sigma[(j, j)];
        }
        if let Some((y, y2)) = self.coupling_y(q)? {
            let s = self.a_cpl.dot(&(sigma * &self.a_cpl));
            out += self.de_cpl * channel_factor(3, y, y2) * s * &self.a_cpl;
        }
        Ok(out)
    }

    fn fourth_contracted(&self, q: &RVec, sigma: &RMat) -> Result<RMat> {
        let d = self.dim();
        let mut out = RMat::zeros(d, d);
        for j in 0..d {
            let (y, y2) = self.mode_y(q, j)?;
            let aj = self.a_prime[j];
            out[(j, j)] +=
                self.de_prime * channel_factor(4, y, y2) * aj.powi(4) * sigma[(j, j)];
        }
        if let Some((y, y2)) = self.coupling_y(q)? {
            let s = self.a_cpl.dot(&(sigma * &self.a_cpl));
            out += self.de_cpl * channel_factor(4, y, y2) * s * &self.a_cpl
                * self.a_cpl.transpose();
        }
        Ok(out)
    }
}

/// Harmonic potential `V = V_eq + (q - q_eq)^T k (q - q_eq) / 2`.
#[derive(Debug, Clone)]
pub struct HarmonicPotential {
    q_eq: RVec,
    k: RMat,
    v_eq: f64,
}

impl HarmonicPotential {
    pub fn new(q_eq: RVec, k: RMat, v_eq: f64) -> Result<Self> {
        let d = q_eq.len();
        if k.nrows() != d || k.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: k.nrows() });
        }
        if (&k - k.transpose()).norm() > 1e-12 * k.norm().max(1.0) {
            return Err(Error::InvalidParameter("force constants not symmetric".into()));
        }
        Ok(Self { q_eq, k, v_eq })
    }

    pub fn q_eq(&self) -> &RVec {
        &self.q_eq
    }

    pub fn force_constants(&self) -> &RMat {
        &self.k
    }
}

impl PotentialModel for HarmonicPotential {
    fn dim(&self) -> usize {
        self.q_eq.len()
    }

    fn value(&self, q: &RVec) -> Result<f64> {
        let x = q - &self.q_eq;
        Ok(self.v_eq + 0.5 * x.dot(&(&self.k * &x)))
    }

    fn gradient(&self, q: &RVec) -> Result<RVec> {
        Ok(&self.k * (q - &self.q_eq))
    }

    fn hessian(&self, _q: &RVec) -> Result<RMat> {
        Ok(self.k.clone())
    }

    fn third_derivative(&self, _q: &RVec) -> Result<Tensor3> {
        Ok(Tensor3::zeros(self.dim()))
    }

    fn fourth_derivative(&self, _q: &RVec) -> Result<Tensor4> {
        Ok(Tensor4::zeros(self.dim()))
    }

    fn mean_value(&self, q: &RVec, sigma: &RMat) -> Result<f64> {
        Ok(self.value(q)? + 0.5 * (&self.k * sigma).trace())
    }

    fn mean_gradient(&self, q: &RVec, _sigma: &RMat) -> Result<RVec> {
        self.gradient(q)
    }

    fn mean_hessian(&self, _q: &RVec, _sigma: &RMat) -> Result<RMat> {
        Ok(self.k.clone())
    }

    fn mean_third_derivative(&self, _q: &RVec, _sigma: &RMat) -> Result<Tensor3> {
        Ok(Tensor3::zeros(self.dim()))
    }

    fn mean_fourth_derivative(&self, _q: &RVec, _sigma: &RMat) -> Result<Tensor4> {
        Ok(Tensor4::zeros(self.dim()))
    }
}

/// Ground vibrational state of a harmonic potential and its zero-point
/// energy `(hbar/2) sum_j omega_j`.
///
/// The width is `A = i m^(1/2) (m^(-1/2) k m^(-1/2))^(1/2) m^(1/2)`; the
/// returned state is stationary under all three GWD methods on this
/// potential (up to the physical phase `S`).
pub fn harmonic_ground_state(
    pot: &HarmonicPotential,
    mass: &Arc<Mass>,
    hbar: f64,
) -> Result<(GaussianState, f64)> {
    let m_sqrt = sym_sqrt(mass.matrix())?;
    let m_isqrt = sym_power(mass.matrix(), -0.5)?;
    let w = &m_isqrt * &pot.k * &m_isqrt;
    let eig = w.symmetric_eigen();
    let mut zpe = 0.0;
    for lam in eig.eigenvalues.iter() {
        if *lam <= 0.0 {
            return Err(Error::InvalidParameter(
                "force constants not positive definite".into(),
            ));
        }
        zpe += 0.5 * hbar * lam.sqrt();
    }
    let w_sqrt = sym_sqrt(&w)?;
    let im_a = &m_sqrt * w_sqrt * &m_sqrt;
    let a = im_a.map(|x| Complex64::new(0.0, x));
    let h = crate::states::HellerParams::new(
        pot.q_eq.clone(),
        RVec::zeros(pot.dim()),
        a,
        Complex64::new(0.0, crate::states::unit_norm_gamma_im(&im_a, hbar)),
        hbar,
        mass.clone(),
    )?;
    Ok((crate::states::from_heller(&h)?, zpe))
}

/// Delegating wrapper that counts potential evaluations (any derivative or
/// expectation call counts as one).
pub struct CountingPotential<'a> {
    inner: &'a dyn PotentialModel,
    count: Cell<u64>,
}

impl<'a> CountingPotential<'a> {
    pub fn new(inner: &'a dyn PotentialModel) -> Self {
        Self { inner, count: Cell::new(0) }
    }

    pub fn evaluations(&self) -> u64 {
        self.count.get()
    }

    fn bump(&self) {
        self.count.set(self.count.get() + 1);
    }
}

impl PotentialModel for CountingPotential<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, q: &RVec) -> Result<f64> {
        self.bump();
        self.inner.value(q)
    }
    fn gradient(&self, q: &RVec) -> Result<RVec> {
        self.bump();
        self.inner.gradient(q)
    }
    fn hessian(&self, q: &RVec) -> Result<RMat> {
        self.bump();
        self.inner.hessian(q)
    }
    fn third_derivative(&self, q: &RVec) -> Result<Tensor3> {
        self.bump();
        self.inner.third_derivative(q)
    }
    fn fourth_derivative(&self, q: &RVec) -> Result<Tensor4> {
        self.bump();
        self.inner.fourth_derivative(q)
    }
    fn mean_value(&self, q: &RVec, sigma: &RMat) -> Result<f64> {
        self.bump();
        self.inner.mean_value(q, sigma)
    }
    fn mean_gradient(&self, q: &RVec, sigma: &RMat) -> Result<RVec> {
        self.bump();
        self.inner.mean_gradient(q, sigma)
    }
    fn mean_hessian(&self, q: &RVec, sigma: &RMat) -> Result<RMat> {
        self.bump();
        self.inner.mean_hessian(q, sigma)
    }
    fn mean_third_derivative(&self, q: &RVec, sigma: &RMat) -> Result<Tensor3> {
        self.bump();
        self.inner.mean_third_derivative(q, sigma)
    }
    fn mean_fourth_derivative(&self, q: &RVec, sigma: &RMat) -> Result<Tensor4> {
        self.bump();
        self.inner.mean_fourth_derivative(q, sigma)
    }
    fn third_contracted(&self, q: &RVec, sigma: &RMat) -> Result<RVec> {
        self.bump();
        self.inner.third_contracted(q, sigma)
    }
    fn fourth_contracted(&self, q: &RVec, sigma: &RMat) -> Result<RMat> {
        self.bump();
        self.inner.fourth_contracted(q, sigma)
    }
}
