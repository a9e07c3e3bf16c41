//! Covariance matrices and symplectic operations on quadrature space.
//!
//! Conventions used across the crate: quadratures are `x = a + a^dag`,
//! `p = i(a^dag - a)` with mode ordering `(x1, p1, ..., xN, pN)`, so the
//! vacuum covariance matrix is the identity and a state `gamma` is physical
//! iff `gamma + i Omega >= 0`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// Relative tolerance for the symmetry check on covariance input.
const SYMMETRY_TOL: f64 = 1e-12;
/// Default relative tolerance for positivity checks.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Singular values of a measured block below this (relative) threshold are
/// treated as zero in the conditioning pseudo-inverse.
const PINV_THRESHOLD: f64 = 1e-12;

/// Quadrature selector for homodyne measurements and noise orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    /// Row/column offset of this quadrature inside a mode's 2x2 block.
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

impl std::fmt::Display for Quadrature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quadrature::X => write!(f, "x"),
            Quadrature::P => write!(f, "p"),
        }
    }
}

/// The symplectic form `Omega`, a direct sum of 2x2 blocks [[0,1],[-1,0]].
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n_modes: usize,
    mat: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        assert!(n_modes >= 1, "need at least one mode");
        let mut mat = DMatrix::<f64>::zeros(2 * n_modes, 2 * n_modes);
        for j in 0..n_modes {
            mat[(2 * j, 2 * j + 1)] = 1.0;
            mat[(2 * j + 1, 2 * j)] = -1.0;
        }
        Self { n_modes, mat }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }
}

/// A real linear map on quadrature space preserving the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    n_modes: usize,
    mat: DMatrix<f64>,
}

impl SymplecticOp {
    /// Wraps an explicit matrix, verifying `S Omega S^T = Omega` to 1e-10.
    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self> {
        let rows = mat.nrows();
        if rows != mat.ncols() || rows == 0 || !rows.is_multiple_of(2) {
            return Err(Error::NotSymmetric);
        }
        let n_modes = rows / 2;
        let omega = SymplecticForm::new(n_modes);
        let residual = (&mat * omega.matrix() * mat.transpose() - omega.matrix()).amax();
        if residual > 1e-10 {
            return Err(Error::NotSymmetric);
        }
        Ok(Self { n_modes, mat })
    }

    pub fn identity(n_modes: usize) -> Self {
        assert!(n_modes >= 1);
        Self {
            n_modes,
            mat: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// The N-port distributor: an orthogonal mixing network acting
    /// identically on the x and p vectors, built as a cascade of Givens
    /// rotations so that input mode N is spread evenly over all outputs
    /// (its column of the mixing matrix is `(1,...,1)/sqrt(N)`).
    pub fn nport_distributor(n_modes: usize) -> Self {
        assert!(n_modes >= 2, "distributor needs at least two modes");
        let n = n_modes;
        // Mixing matrix O = R_{n-2} ... R_0 with rotations in planes
        // (j, n-1); sin(theta_j) = 1/sqrt(n - j) pins the last column.
        let mut o = DMatrix::<f64>::identity(n, n);
        for j in 0..n - 1 {
            let s = 1.0 / ((n - j) as f64).sqrt();
            let c = (1.0 - s * s).sqrt();
            // Left-multiply by the rotation touching rows j and n-1.
            for col in 0..n {
                let vj = o[(j, col)];
                let vn = o[(n - 1, col)];
                o[(j, col)] = c * vj + s * vn;
                o[(n - 1, col)] = -s * vj + c * vn;
            }
        }
        let mut mat = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for r in 0..n {
            for cidx in 0..n {
                mat[(2 * r, 2 * cidx)] = o[(r, cidx)];
                mat[(2 * r + 1, 2 * cidx + 1)] = o[(r, cidx)];
            }
        }
        Self { n_modes: n, mat }
    }

    /// Single-mode squeezer `diag(a^{-1/2}, a^{1/2})` on `mode`: scales the
    /// x variance by `1/a` and the p variance by `a`.
    pub fn local_squeezer(a: f64, mode: usize, n_modes: usize) -> Result<Self> {
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::NonPositiveSqueezing(a));
        }
        if mode >= n_modes {
            return Err(Error::ModeIndexOutOfRange {
                index: mode,
                n_modes,
            });
        }
        let mut mat = DMatrix::<f64>::identity(2 * n_modes, 2 * n_modes);
        mat[(2 * mode, 2 * mode)] = 1.0 / a.sqrt();
        mat[(2 * mode + 1, 2 * mode + 1)] = a.sqrt();
        Ok(Self { n_modes, mat })
    }

    /// The same squeezer applied to every mode.
    pub fn uniform_squeezer(a: f64, n_modes: usize) -> Result<Self> {
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::NonPositiveSqueezing(a));
        }
        let mut mat = DMatrix::<f64>::identity(2 * n_modes, 2 * n_modes);
        for mode in 0..n_modes {
            mat[(2 * mode, 2 * mode)] = 1.0 / a.sqrt();
            mat[(2 * mode + 1, 2 * mode + 1)] = a.sqrt();
        }
        Ok(Self { n_modes, mat })
    }

    /// QND coupling of strength `g`: copies the signal's x quadrature into
    /// the ancilla (`x_anc += g x_sig`) with back action on the signal's
    /// conjugate quadrature (`p_sig -= g p_anc`).
    pub fn qnd_gate(g: f64, signal: usize, ancilla: usize, n_modes: usize) -> Result<Self> {
        for &index in &[signal, ancilla] {
            if index >= n_modes {
                return Err(Error::ModeIndexOutOfRange { index, n_modes });
            }
        }
        if signal == ancilla {
            return Err(Error::ModeIndexOutOfRange {
                index: ancilla,
                n_modes,
            });
        }
        let mut mat = DMatrix::<f64>::identity(2 * n_modes, 2 * n_modes);
        mat[(2 * ancilla, 2 * signal)] = g;
        mat[(2 * signal + 1, 2 * ancilla + 1)] = -g;
        Ok(Self { n_modes, mat })
    }

    /// Two-mode mixer used for Charlie's measurement: sends mode `a` to
    /// `r*a + t*b` and mode `b` to `t*a - r*b`, identically on x and p.
    pub fn split_mixer(t: f64, mode_a: usize, mode_b: usize, n_modes: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidTransmittance(t));
        }
        for &index in &[mode_a, mode_b] {
            if index >= n_modes {
                return Err(Error::ModeIndexOutOfRange { index, n_modes });
            }
        }
        let r = (1.0 - t * t).sqrt();
        let mut mat = DMatrix::<f64>::identity(2 * n_modes, 2 * n_modes);
        for q in 0..2 {
            mat[(2 * mode_a + q, 2 * mode_a + q)] = r;
            mat[(2 * mode_a + q, 2 * mode_b + q)] = t;
            mat[(2 * mode_b + q, 2 * mode_a + q)] = t;
            mat[(2 * mode_b + q, 2 * mode_b + q)] = -r;
        }
        Ok(Self { n_modes, mat })
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &SymplecticOp) -> Result<SymplecticOp> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                got: other.n_modes,
            });
        }
        Ok(SymplecticOp {
            n_modes: self.n_modes,
            mat: &self.mat * &other.mat,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Largest entry of `S Omega S^T - Omega`.
    pub fn symplectic_residual(&self) -> f64 {
        let omega = SymplecticForm::new(self.n_modes);
        (&self.mat * omega.matrix() * self.mat.transpose() - omega.matrix()).amax()
    }
}

/// Second moments of an N-mode Gaussian state (vacuum variance 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    mat: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Wraps a 2N x 2N matrix, requiring symmetry to 1e-12 relative
    /// tolerance. The stored matrix is symmetrized exactly.
    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self> {
        let rows = mat.nrows();
        if rows != mat.ncols() || rows == 0 || !rows.is_multiple_of(2) {
            return Err(Error::NotSymmetric);
        }
        let scale = mat.amax().max(1.0);
        let asym = (&mat - mat.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric);
        }
        let sym = (&mat + mat.transpose()) * 0.5;
        Ok(Self {
            n_modes: rows / 2,
            mat: sym,
        })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        assert!(n_modes >= 1);
        Self {
            n_modes,
            mat: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Product state with per-mode diagonal variances `(v_x, v_p)`.
    pub fn from_mode_variances(variances: &[(f64, f64)]) -> Self {
        assert!(!variances.is_empty());
        let n = variances.len();
        let mut mat = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for (j, &(vx, vp)) in variances.iter().enumerate() {
            mat[(2 * j, 2 * j)] = vx;
            mat[(2 * j + 1, 2 * j + 1)] = vp;
        }
        Self { n_modes: n, mat }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    /// `gamma -> S gamma S^T`.
    pub fn transform(&self, s: &SymplecticOp) -> Result<CovarianceMatrix> {
        if s.n_modes != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                got: s.n_modes,
            });
        }
        let m = &s.mat * &self.mat * s.mat.transpose();
        Ok(CovarianceMatrix {
            n_modes: self.n_modes,
            mat: (&m + m.transpose()) * 0.5,
        })
    }

    /// Adds classical noise: `gamma -> gamma + noise` for PSD `noise`.
    pub fn add_noise(&self, noise: &DMatrix<f64>) -> Result<CovarianceMatrix> {
        if noise.nrows() != 2 * self.n_modes || noise.ncols() != 2 * self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                got: noise.nrows() / 2,
            });
        }
        let scale = noise.amax().max(1.0);
        if (noise - noise.transpose()).amax() > SYMMETRY_TOL * scale {
            return Err(Error::NoiseNotPsd);
        }
        if !linalg::is_psd(noise, PHYSICALITY_TOL) {
            return Err(Error::NoiseNotPsd);
        }
        Ok(CovarianceMatrix {
            n_modes: self.n_modes,
            mat: &self.mat + noise,
        })
    }

    /// Appends `k` vacuum ancilla modes after the existing ones.
    pub fn append_vacuum(&self, k: usize) -> CovarianceMatrix {
        let n = self.n_modes + k;
        let mut mat = DMatrix::<f64>::identity(2 * n, 2 * n);
        mat.view_mut((0, 0), (2 * self.n_modes, 2 * self.n_modes))
            .copy_from(&self.mat);
        CovarianceMatrix { n_modes: n, mat }
    }

    /// Conditional state after an ideal homodyne measurement of one
    /// quadrature of `mode`: the Schur complement
    /// `A - C (Pi B Pi)^+ C^T` over the measured mode, which drops out.
    pub fn condition_homodyne(
        &self,
        mode: usize,
        quadrature: Quadrature,
    ) -> Result<CovarianceMatrix> {
        if mode >= self.n_modes {
            return Err(Error::ModeIndexOutOfRange {
                index: mode,
                n_modes: self.n_modes,
            });
        }
        let q = 2 * mode + quadrature.offset();
        let measured_var = self.mat[(q, q)];
        if measured_var <= 0.0 {
            return Err(Error::MeasuredVarianceNotPositive(measured_var));
        }

        let keep: Vec<usize> = (0..2 * self.n_modes)
            .filter(|&i| i != 2 * mode && i != 2 * mode + 1)
            .collect();
        let dim = keep.len();
        let mut out = DMatrix::<f64>::zeros(dim, dim);

        // Pseudo-inverse of the projected measured block: 1/variance on the
        // measured quadrature unless it is negligible relative to the block.
        let block_scale = self.mat[(2 * mode, 2 * mode)]
            .abs()
            .max(self.mat[(2 * mode + 1, 2 * mode + 1)].abs());
        let inv = if measured_var <= PINV_THRESHOLD * block_scale {
            0.0
        } else {
            1.0 / measured_var
        };

        for (r, &i) in keep.iter().enumerate() {
            for (c, &j) in keep.iter().enumerate() {
                out[(r, c)] = self.mat[(i, j)] - self.mat[(i, q)] * inv * self.mat[(q, j)];
            }
        }
        Ok(CovarianceMatrix {
            n_modes: self.n_modes - 1,
            mat: (&out + out.transpose()) * 0.5,
        })
    }

    /// Uncertainty-relation test `gamma + i Omega >= 0`, evaluated on the
    /// real symmetric embedding `[[gamma, -Omega], [Omega, gamma]]` with the
    /// minimum eigenvalue compared against `-tol * max(1, max diagonal)`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let d = 2 * self.n_modes;
        let omega = SymplecticForm::new(self.n_modes);
        let mut emb = DMatrix::<f64>::zeros(2 * d, 2 * d);
        emb.view_mut((0, 0), (d, d)).copy_from(&self.mat);
        emb.view_mut((d, d), (d, d)).copy_from(&self.mat);
        emb.view_mut((0, d), (d, d)).copy_from(&(-omega.matrix()));
        emb.view_mut((d, 0), (d, d)).copy_from(omega.matrix());
        linalg::is_psd(&emb, tol)
    }

    /// Partial transpose: flips the sign of p on each listed mode.
    /// The set must be nonempty, in range, and free of duplicates.
    pub fn partial_transpose(&self, modes: &[usize]) -> Result<CovarianceMatrix> {
        if modes.is_empty() {
            return Err(Error::InvalidModeSet);
        }
        let mut seen = vec![false; self.n_modes];
        for &m in modes {
            if m >= self.n_modes || seen[m] {
                return Err(Error::InvalidModeSet);
            }
            seen[m] = true;
        }
        let mut lambda = vec![1.0f64; 2 * self.n_modes];
        for &m in modes {
            lambda[2 * m + 1] = -1.0;
        }
        let mut mat = self.mat.clone();
        for i in 0..2 * self.n_modes {
            for j in 0..2 * self.n_modes {
                mat[(i, j)] *= lambda[i] * lambda[j];
            }
        }
        Ok(CovarianceMatrix {
            n_modes: self.n_modes,
            mat,
        })
    }

    /// Reorders modes by `perm` (output mode `i` is input mode `perm[i]`).
    pub fn permute_modes(&self, perm: &[usize]) -> Result<CovarianceMatrix> {
        if perm.len() != self.n_modes {
            return Err(Error::InvalidModeSet);
        }
        let mut seen = vec![false; self.n_modes];
        for &m in perm {
            if m >= self.n_modes || seen[m] {
                return Err(Error::InvalidModeSet);
            }
            seen[m] = true;
        }
        let mut mat = DMatrix::<f64>::zeros(2 * self.n_modes, 2 * self.n_modes);
        for (i, &pi) in perm.iter().enumerate() {
            for (j, &pj) in perm.iter().enumerate() {
                for qa in 0..2 {
                    for qb in 0..2 {
                        mat[(2 * i + qa, 2 * j + qb)] = self.mat[(2 * pi + qa, 2 * pj + qb)];
                    }
                }
            }
        }
        Ok(CovarianceMatrix {
            n_modes: self.n_modes,
            mat,
        })
    }

    /// Symplectic eigenvalues, ascending: the positive square roots of the
    /// eigenvalues of `-(Omega gamma)^2`, each doubly degenerate pair taken
    /// once, computed through the symmetric problem
    /// `gamma^{1/2} Omega^T gamma Omega gamma^{1/2}`.
    pub fn symplectic_spectrum(&self) -> Result<Vec<f64>> {
        let root = linalg::sym_sqrt(&self.mat)?;
        let omega = SymplecticForm::new(self.n_modes);
        let core = omega.matrix().transpose() * &self.mat * omega.matrix();
        let sym = &root * core * &root;
        let sym = (&sym + sym.transpose()) * 0.5;
        let eig = linalg::sym_eigen(&sym)?;
        let mut nus: Vec<f64> = Vec::with_capacity(self.n_modes);
        for j in 0..self.n_modes {
            let a = eig.values[2 * j].max(0.0).sqrt();
            let b = eig.values[2 * j + 1].max(0.0).sqrt();
            nus.push(0.5 * (a + b));
        }
        Ok(nus)
    }
}
