//! Permutation-invariant Gaussian states and their two parameter pictures.
//!
//! A canonical N-party symmetric state is fixed by four reals: diagonal
//! blocks `diag(m, n)` and off-diagonal blocks `diag(c, -d)`. The same
//! state is produced by feeding two independent modes with variances
//! `(V_x, V_p)` (N-1 copies) and `(W_x, W_p)` (one copy) through the
//! N-port distributor, which is the picture the protocols are solved in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::CovarianceMatrix;

/// Canonical parameters `(m, n, c, d)` of an N-party symmetric state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricState {
    n_parties: usize,
    m: f64,
    n: f64,
    c: f64,
    d: f64,
}

/// Variances of the two independent preparation modes.
///
/// Fields may be non-positive for parameter combinations that do not
/// correspond to any state; `is_valid` flags those.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveScheme {
    pub n_parties: usize,
    pub v_x: f64,
    pub v_p: f64,
    pub w_x: f64,
    pub w_p: f64,
}

impl SymmetricState {
    pub fn new(n_parties: usize, m: f64, n: f64, c: f64, d: f64) -> Result<Self> {
        if n_parties < 2 {
            return Err(Error::InvalidPartyCount(n_parties));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::NonPositiveVariance {
                name: "m",
                value: m,
            });
        }
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NonPositiveVariance {
                name: "n",
                value: n,
            });
        }
        if !c.is_finite() || !d.is_finite() {
            return Err(Error::NonPositiveVariance {
                name: "c/d",
                value: f64::NAN,
            });
        }
        Ok(Self {
            n_parties,
            m,
            n,
            c,
            d,
        })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn n(&self) -> f64 {
        self.n
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    /// Variance ratio `k1 = n/m`.
    pub fn k1(&self) -> f64 {
        self.n / self.m
    }

    /// Correlation ratio `k2 = d/c`; absent when `c = 0`.
    pub fn k2(&self) -> Option<f64> {
        if self.c == 0.0 {
            None
        } else {
            Some(self.d / self.c)
        }
    }

    /// The preparation picture: `V_x = m - c`, `V_p = n + d`,
    /// `W_x = m + (N-1)c`, `W_p = n - (N-1)d`.
    pub fn to_effective(&self) -> EffectiveScheme {
        let k = (self.n_parties - 1) as f64;
        EffectiveScheme {
            n_parties: self.n_parties,
            v_x: self.m - self.c,
            v_p: self.n + self.d,
            w_x: self.m + k * self.c,
            w_p: self.n - k * self.d,
        }
    }

    /// Closed-form physicality: both preparation modes must satisfy the
    /// uncertainty relation, `V_x V_p >= 1` and `W_x W_p >= 1`.
    pub fn is_physical(&self) -> bool {
        let e = self.to_effective();
        e.is_physical()
    }

    /// Uncertainty margins `(V_x V_p - 1, W_x W_p - 1)` of the two
    /// preparation modes; both nonnegative for physical states.
    pub fn physicality_margins(&self) -> (f64, f64) {
        let e = self.to_effective();
        (e.v_x * e.v_p - 1.0, e.w_x * e.w_p - 1.0)
    }

    /// The full 2N x 2N covariance matrix.
    pub fn build_cm(&self) -> CovarianceMatrix {
        let n = self.n_parties;
        let mut mat = nalgebra::DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    mat[(2 * i, 2 * j)] = self.m;
                    mat[(2 * i + 1, 2 * j + 1)] = self.n;
                } else {
                    mat[(2 * i, 2 * j)] = self.c;
                    mat[(2 * i + 1, 2 * j + 1)] = -self.d;
                }
            }
        }
        CovarianceMatrix::from_matrix(mat).expect("symmetric by construction")
    }

    /// Reads the four parameters back off a covariance matrix, verifying
    /// the canonical permutation-invariant block structure to `tol`.
    pub fn from_cm(cm: &CovarianceMatrix, tol: f64) -> Result<Self> {
        let n = cm.n_modes();
        if n < 2 {
            return Err(Error::InvalidPartyCount(n));
        }
        let m = cm.get(0, 0);
        let nn = cm.get(1, 1);
        let c = cm.get(0, 2);
        let d = -cm.get(1, 3);
        let state = SymmetricState::new(n, m, nn, c, d)?;
        let rebuilt = state.build_cm();
        let scale = cm.matrix().amax().max(1.0);
        if (rebuilt.matrix() - cm.matrix()).amax() > tol * scale {
            return Err(Error::NotSymmetric);
        }
        Ok(state)
    }
}

impl EffectiveScheme {
    pub fn new(n_parties: usize, v_x: f64, v_p: f64, w_x: f64, w_p: f64) -> Result<Self> {
        if n_parties < 2 {
            return Err(Error::InvalidPartyCount(n_parties));
        }
        Ok(Self {
            n_parties,
            v_x,
            v_p,
            w_x,
            w_p,
        })
    }

    /// Thermal/squeezing factorization of the input modes:
    /// `V_x = n1 e^{2 r1}`, `V_p = n1 e^{-2 r1}` and likewise for mode N.
    pub fn from_thermal_squeezing(
        n_parties: usize,
        n1: f64,
        r1: f64,
        n_last: f64,
        r_last: f64,
    ) -> Result<Self> {
        if n1 <= 0.0 || n_last <= 0.0 {
            return Err(Error::NonPositiveVariance {
                name: "thermal noise",
                value: n1.min(n_last),
            });
        }
        Self::new(
            n_parties,
            n1 * (2.0 * r1).exp(),
            n1 * (-2.0 * r1).exp(),
            n_last * (2.0 * r_last).exp(),
            n_last * (-2.0 * r_last).exp(),
        )
    }

    /// All four variances strictly positive.
    pub fn is_valid(&self) -> bool {
        self.v_x > 0.0 && self.v_p > 0.0 && self.w_x > 0.0 && self.w_p > 0.0
    }

    /// Uncertainty relations of both preparation modes, with the same
    /// relative slack as the matrix-level physicality test so boundary
    /// (pure) states do not flip on rounding.
    pub fn is_physical(&self) -> bool {
        let v = self.v_x * self.v_p;
        let w = self.w_x * self.w_p;
        self.is_valid()
            && v >= 1.0 - crate::symplectic::PHYSICALITY_TOL * v.abs().max(1.0)
            && w >= 1.0 - crate::symplectic::PHYSICALITY_TOL * w.abs().max(1.0)
    }

    /// Canonical parameters: `m = [(N-1)V_x + W_x]/N` and friends.
    /// Fails when any variance is non-positive.
    pub fn to_state(&self) -> Result<SymmetricState> {
        if !self.is_valid() {
            return Err(Error::NonPositiveVariance {
                name: "effective variance",
                value: self.v_x.min(self.v_p).min(self.w_x).min(self.w_p),
            });
        }
        let nn = self.n_parties as f64;
        let k = nn - 1.0;
        SymmetricState::new(
            self.n_parties,
            (k * self.v_x + self.w_x) / nn,
            (k * self.v_p + self.w_p) / nn,
            (self.w_x - self.v_x) / nn,
            (self.v_p - self.w_p) / nn,
        )
    }

    /// The product-state covariance fed into the distributor: N-1 modes at
    /// `(V_x, V_p)` and one mode at `(W_x, W_p)`.
    pub fn input_cm(&self) -> CovarianceMatrix {
        let mut vars = vec![(self.v_x, self.v_p); self.n_parties - 1];
        vars.push((self.w_x, self.w_p));
        CovarianceMatrix::from_mode_variances(&vars)
    }
}

/// Deterministic rejection sampling of physical `(c, d)` pairs at fixed
/// `(m, n)`: uniform draws over the box where all four effective variances
/// stay positive, filtered by the closed-form physicality test.
pub fn sample_physical(
    m: f64,
    n: f64,
    n_parties: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<SymmetricState>> {
    use rand::Rng;
    use rand::SeedableRng;

    if n_parties < 2 {
        return Err(Error::InvalidPartyCount(n_parties));
    }
    if m <= 0.0 || n <= 0.0 {
        return Err(Error::NonPositiveVariance {
            name: "m/n",
            value: m.min(n),
        });
    }
    let k = (n_parties - 1) as f64;
    let c_range = (-m / k, m);
    let d_range = (-n, n / k);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let max_attempts = 2000usize.saturating_mul(count).max(100_000);
    for _ in 0..max_attempts {
        if out.len() == count {
            break;
        }
        let c = rng.random_range(c_range.0..c_range.1);
        let d = rng.random_range(d_range.0..d_range.1);
        let state = SymmetricState::new(n_parties, m, n, c, d)?;
        if state.is_physical() {
            out.push(state);
        }
    }
    if out.len() < count {
        return Err(Error::EmptyRegion);
    }
    Ok(out)
}

/// JSON descriptor carrying both parameter pictures plus the physicality
/// verdict; the wire format of the `prepare` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDescriptor {
    #[serde(rename = "N")]
    pub n_parties: usize,
    pub m: f64,
    pub n: f64,
    pub c: f64,
    pub d: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective: Option<EffectiveDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physical: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margins: Option<MarginsDescriptor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectiveDescriptor {
    pub v_x: f64,
    pub v_p: f64,
    pub w_x: f64,
    pub w_p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginsDescriptor {
    pub v: f64,
    pub w: f64,
}

impl StateDescriptor {
    pub fn from_state(s: &SymmetricState) -> Self {
        let e = s.to_effective();
        let (mv, mw) = s.physicality_margins();
        StateDescriptor {
            n_parties: s.n_parties(),
            m: s.m(),
            n: s.n(),
            c: s.c(),
            d: s.d(),
            effective: Some(EffectiveDescriptor {
                v_x: e.v_x,
                v_p: e.v_p,
                w_x: e.w_x,
                w_p: e.w_p,
            }),
            physical: Some(s.is_physical()),
            margins: Some(MarginsDescriptor { v: mv, w: mw }),
        }
    }

    pub fn to_state(&self) -> Result<SymmetricState> {
        SymmetricState::new(self.n_parties, self.m, self.n, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{SymplecticOp, PHYSICALITY_TOL};
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn vacuum_effective_is_all_ones() {
        let s = SymmetricState::new(3, 1.0, 1.0, 0.0, 0.0).unwrap();
        let e = s.to_effective();
        assert_eq!((e.v_x, e.v_p, e.w_x, e.w_p), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn effective_examples() {
        let s = SymmetricState::new(3, 4.0, 4.0, 1.0, 1.0).unwrap();
        let e = s.to_effective();
        assert_eq!((e.v_x, e.v_p, e.w_x, e.w_p), (3.0, 5.0, 6.0, 2.0));

        let s = SymmetricState::new(3, 7.5, 7.5, 5.0, 3.7).unwrap();
        let e = s.to_effective();
        assert_close(e.v_x, 2.5, 1e-12);
        assert_close(e.v_p, 11.2, 1e-12);
        assert_close(e.w_x, 17.5, 1e-12);
        assert_close(e.w_p, 0.1, 1e-12);
    }

    #[test]
    fn from_effective_examples() {
        let e = EffectiveScheme::new(3, 1.0, 1.0, 1.0, 1.0).unwrap();
        let s = e.to_state().unwrap();
        assert_eq!((s.m(), s.n(), s.c(), s.d()), (1.0, 1.0, 0.0, 0.0));

        let e = EffectiveScheme::new(3, 2.0, 0.5, 8.0, 0.125).unwrap();
        let s = e.to_state().unwrap();
        assert_close(s.m(), 4.0, 1e-14);
        assert_close(s.n(), 0.375, 1e-14);
        assert_close(s.c(), 2.0, 1e-14);
        assert_close(s.d(), 0.125, 1e-14);
    }

    #[test]
    fn from_effective_rejects_nonpositive() {
        let e = EffectiveScheme::new(3, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!(e.to_state().is_err());
    }

    #[test]
    fn build_cm_layout() {
        let s = SymmetricState::new(3, 4.0, 4.0, 1.0, 1.0).unwrap();
        let cm = s.build_cm();
        assert_eq!(cm.n_modes(), 3);
        assert_eq!(cm.get(0, 0), 4.0);
        assert_eq!(cm.get(1, 1), 4.0);
        assert_eq!(cm.get(0, 2), 1.0);
        assert_eq!(cm.get(1, 3), -1.0);
        assert_eq!(cm.get(0, 3), 0.0);

        let vac = SymmetricState::new(4, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(
            (vac.build_cm().matrix() - nalgebra::DMatrix::<f64>::identity(8, 8)).amax() < 1e-15
        );
    }

    #[test]
    fn build_cm_matches_preparation_route() {
        let mut ok = 0;
        for (i, s) in sample_physical(4.0, 2.5, 3, 100, 42)
            .unwrap()
            .iter()
            .enumerate()
        {
            let direct = s.build_cm();
            let b = SymplecticOp::nport_distributor(s.n_parties());
            let routed = s.to_effective().input_cm().transform(&b).unwrap();
            assert!(
                (direct.matrix() - routed.matrix()).amax() < 1e-12,
                "draw {i}"
            );
            ok += 1;
        }
        assert_eq!(ok, 100);
    }

    #[test]
    fn k2_absent_when_uncorrelated() {
        let s = SymmetricState::new(3, 2.0, 2.0, 0.0, 0.5).unwrap();
        assert!(s.k2().is_none());
        let s = SymmetricState::new(3, 2.0, 2.0, 0.5, 1.0).unwrap();
        assert_eq!(s.k2(), Some(2.0));
    }

    #[test]
    fn sampling_is_deterministic_and_physical() {
        let a = sample_physical(4.0, 4.0, 3, 50, 7).unwrap();
        let b = sample_physical(4.0, 4.0, 3, 50, 7).unwrap();
        assert_eq!(a.len(), 50);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.c(), x.d()), (y.c(), y.d()));
            assert!(x.is_physical());
            assert!(x.build_cm().is_physical(PHYSICALITY_TOL));
        }
    }

    #[test]
    fn sampling_vacuum_parameters_is_empty() {
        // At m = n = 1 only (c, d) = (0, 0) is physical: a zero-area region
        // that rejection sampling reports as empty.
        assert!(matches!(
            sample_physical(1.0, 1.0, 3, 5, 1),
            Err(Error::EmptyRegion)
        ));
    }

    #[test]
    fn descriptor_round_trip() {
        let s = SymmetricState::new(3, 4.0, 4.0, 1.0, 1.0).unwrap();
        let json = serde_json::to_string(&StateDescriptor::from_state(&s)).unwrap();
        let back: StateDescriptor = serde_json::from_str(&json).unwrap();
        let s2 = back.to_state().unwrap();
        assert_eq!((s2.m(), s2.n(), s2.c(), s2.d()), (4.0, 4.0, 1.0, 1.0));
        assert_eq!(back.physical, Some(true));
    }

    #[test]
    fn thermal_squeezing_form() {
        let e = EffectiveScheme::from_thermal_squeezing(3, 1.0, 0.5, 2.0, -0.25).unwrap();
        assert_close(e.v_x, 1.0f64 * 1.0f64.exp(), 1e-14);
        assert_close(e.v_p, (-1.0f64).exp(), 1e-14);
        assert_close(e.w_x, 2.0 * (-0.5f64).exp(), 1e-14);
        assert_close(e.w_p, 2.0 * 0.5f64.exp(), 1e-14);
    }

    proptest! {
        #[test]
        fn picture_round_trip(
            m in 0.2f64..8.0,
            n in 0.2f64..8.0,
            c in -3.0f64..3.0,
            d in -3.0f64..3.0,
            parties in 2usize..6,
        ) {
            let s = SymmetricState::new(parties, m, n, c, d).unwrap();
            let e = s.to_effective();
            if e.is_valid() {
                let back = e.to_state().unwrap();
                prop_assert!((back.m() - m).abs() < 1e-12 * m.max(1.0));
                prop_assert!((back.n() - n).abs() < 1e-12 * n.max(1.0));
                prop_assert!((back.c() - c).abs() < 1e-12 * c.abs().max(1.0));
                prop_assert!((back.d() - d).abs() < 1e-12 * d.abs().max(1.0));
            }
        }

        #[test]
        fn closed_form_physicality_matches_matrix_test(
            m in 0.3f64..6.0,
            n in 0.3f64..6.0,
            c in -2.5f64..2.5,
            d in -2.5f64..2.5,
        ) {
            let s = SymmetricState::new(3, m, n, c, d).unwrap();
            let e = s.to_effective();
            // Skip the thin indeterminate band at the physicality boundary.
            let margin_v = e.v_x * e.v_p - 1.0;
            let margin_w = e.w_x * e.w_p - 1.0;
            prop_assume!(margin_v.abs() > 1e-7 && margin_w.abs() > 1e-7);
            prop_assume!(e.v_x.abs() > 1e-7 && e.v_p.abs() > 1e-7
                && e.w_x.abs() > 1e-7 && e.w_p.abs() > 1e-7);
            let closed = s.is_physical();
            let matrix = s.build_cm().is_physical(PHYSICALITY_TOL);
            prop_assert_eq!(closed, matrix, "m={} n={} c={} d={}", m, n, c, d);
        }

        #[test]
        fn positive_c_orders_effective_variances(
            m in 0.5f64..6.0,
            c in 0.01f64..2.0,
            parties in 2usize..6,
        ) {
            prop_assume!(c < m);
            let s = SymmetricState::new(parties, m, 1.0, c, 0.0).unwrap();
            let e = s.to_effective();
            prop_assert!(e.v_x < e.w_x);
            prop_assert!((e.v_x - (m - c)).abs() < 1e-12);
        }
    }
}
