//! Dense totally symmetric rank-3 and rank-4 tensors of small dimension.

use nalgebra::{DMatrix, DVector};

/// Rank-3 tensor over `dim^3` entries, index `(i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.dim + j) * self.dim + k] += v;
    }

    /// Add `coef * v_i v_j v_k` (automatically symmetric).
    pub fn add_outer3(&mut self, coef: f64, v: &DVector<f64>) {
        let d = self.dim;
        for i in 0..d {
            let ci = coef * v[i];
            if ci == 0.0 {
                continue;
            }
            for j in 0..d {
                let cij = ci * v[j];
                if cij == 0.0 {
                    continue;
                }
                for k in 0..d {
                    self.data[(i * d + j) * d + k] += cij * v[k];
                }
            }
        }
    }

    /// Contract the last two indices with a matrix: `out_i = T_ijk M_jk`.
    pub fn contract_last2(&self, m: &DMatrix<f64>) -> DVector<f64> {
        let d = self.dim;
        let mut out = DVector::zeros(d);
        for i in 0..d {
            let mut s = 0.0;
            for j in 0..d {
                for k in 0..d {
                    s += self.get(i, j, k) * m[(j, k)];
                }
            }
            out[i] = s;
        }
        out
    }

    /// Largest asymmetry under index permutations (0 for exactly symmetric).
    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = self.get(i, j, k);
                    for w in [self.get(i, k, j), self.get(j, i, k), self.get(k, j, i)] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }
}

/// Rank-4 tensor over `dim^4` entries, index `(i, j, k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.data[((i * self.dim + j) * self.dim + k) * self.dim + l] += v;
    }

    /// Add `coef * v_i v_j v_k v_l`.
    pub fn add_outer4(&mut self, coef: f64, v: &DVector<f64>) {
        let d = self.dim;
        for i in 0..d {
            let ci = coef * v[i];
            if ci == 0.0 {
                continue;
            }
            for j in 0..d {
                let cij = ci * v[j];
                if cij == 0.0 {
                    continue;
                }
                for k in 0..d {
                    let cijk = cij * v[k];
                    for l in 0..d {
                        self.data[((i * d + j) * d + k) * d + l] += cijk * v[l];
                    }
                }
            }
        }
    }

    /// Contract the last two indices with a matrix: `out_ij = T_ijkl M_kl`.
    pub fn contract_last2(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.dim;
        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    for l in 0..d {
                        s += self.get(i, j, k, l) * m[(k, l)];
                    }
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = self.get(i, j, k, l);
                        for w in [
                            self.get(j, i, k, l),
                            self.get(i, k, j, l),
                            self.get(i, j, l, k),
                            self.get(l, k, j, i),
                        ] {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }
}
