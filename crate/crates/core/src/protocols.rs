//! The two LOCC transformation protocols for symmetric states.
//!
//! Both protocols steer a symmetric state toward prescribed output ratios
//! `k1' = n'/m'` and `k2' = d'/c'`:
//!
//! * correlated noise: every party adds the same classical noise to one
//!   quadrature, then squeezes locally;
//! * partial QND: every party couples its mode to a vacuum ancilla with a
//!   QND gate of strength `g`, measures the ancilla, feeds forward, then
//!   squeezes locally.
//!
//! Because each step is identical across parties, the whole protocol
//! commutes with the distributor and is solved on the two preparation
//! modes. In that picture noise addition is linear in the parameters and
//! solvable directly, while the QND requirement eliminates to a cubic in
//! `g^2` that is solved in closed form.

use serde::{Deserialize, Serialize};

use crate::cubic;
use crate::error::{Error, Result};
use crate::states::{EffectiveScheme, SymmetricState};
use crate::symplectic::{CovarianceMatrix, Quadrature, SymplecticOp};

/// Tolerance under which the noise-plan denominator counts as vanishing.
const DEGENERATE_TOL: f64 = 1e-12;
/// Roots of the QND cubic above this (slightly negative) floor are clamped
/// to zero and considered admissible.
const ROOT_FLOOR: f64 = -1e-12;
/// A selected QND plan must reproduce the target ratios this well when
/// applied, otherwise the root is discarded.
const PLAN_SELF_CHECK: f64 = 1e-9;

/// Requested output ratios `k1' = n'/m'`, `k2' = d'/c'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetRatios {
    pub k1: f64,
    pub k2: f64,
}

impl TargetRatios {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1 > 0.0 && k1.is_finite()) {
            return Err(Error::InvalidTargetRatio {
                name: "k1",
                value: k1,
            });
        }
        if !(k2 > 0.0 && k2.is_finite()) {
            return Err(Error::InvalidTargetRatio {
                name: "k2",
                value: k2,
            });
        }
        Ok(Self { k1, k2 })
    }
}

/// Solved parameters of the correlated-noise protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePlan {
    /// Squeezing `a^2` with `a = e^{2r}`.
    pub a_sq: f64,
    /// Added noise variance `V_N`, nonnegative.
    pub v_noise: f64,
    /// Quadrature receiving the noise.
    pub quadrature: Quadrature,
}

/// Solved parameters of the partial-QND protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QndPlan {
    /// Interaction strength `g^2`, nonnegative.
    pub g_sq: f64,
    /// Squeezing `a^2`; here `a` multiplies the x variance.
    pub a_sq: f64,
}

/// Why a state cannot be brought to the requested ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotTransformable {
    NegativeNoise,
    NonpositiveSqueezing,
    NoRealRoot,
    DegenerateInput,
}

impl std::fmt::Display for NotTransformable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            NotTransformable::NegativeNoise => "negative-noise",
            NotTransformable::NonpositiveSqueezing => "nonpositive-squeezing",
            NotTransformable::NoRealRoot => "no-real-root",
            NotTransformable::DegenerateInput => "degenerate-input",
        };
        write!(f, "{s}")
    }
}

/// Result of planning: either solved parameters or a reason code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanOutcome<P> {
    Transformable(P),
    NotTransformable(NotTransformable),
}

impl<P> PlanOutcome<P> {
    pub fn plan(&self) -> Option<&P> {
        match self {
            PlanOutcome::Transformable(p) => Some(p),
            PlanOutcome::NotTransformable(_) => None,
        }
    }

    pub fn reason(&self) -> Option<NotTransformable> {
        match self {
            PlanOutcome::Transformable(_) => None,
            PlanOutcome::NotTransformable(r) => Some(*r),
        }
    }
}

/// Either protocol's plan, as carried in plan JSON and by `class_map`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum Plan {
    Noise(NoisePlan),
    Qnd(QndPlan),
}

/// Solves the correlated-noise protocol for the given targets.
///
/// In the x orientation the solution is
/// `a^2 = k1 k2 (m - c) / (k2 n - k1 d)` and
/// `V_N = (k1 m d - k2 n c) / (k2 n - k1 d)`;
/// the plan exists iff `a^2 > 0` and `V_N >= 0` (zero-variance noise is
/// realizable). The p orientation solves the mirror problem obtained by
/// exchanging the quadrature pictures and inverting the targets.
pub fn plan_noise(
    s: &SymmetricState,
    t: &TargetRatios,
    quadrature: Quadrature,
) -> Result<PlanOutcome<NoisePlan>> {
    if !s.is_physical() {
        return Err(Error::UnphysicalState);
    }
    let (m, n, c, d, k1, k2) = match quadrature {
        Quadrature::X => (s.m(), s.n(), s.c(), s.d(), t.k1, t.k2),
        // Mirror picture: x <-> p exchanges (m, c) with (n, -d) and
        // inverts both target ratios.
        Quadrature::P => (s.n(), s.m(), -s.d(), -s.c(), 1.0 / t.k1, 1.0 / t.k2),
    };
    if c == 0.0 {
        return Ok(PlanOutcome::NotTransformable(
            NotTransformable::DegenerateInput,
        ));
    }
    let denom = k2 * n - k1 * d;
    if denom.abs() < DEGENERATE_TOL * (k2 * n).abs().max((k1 * d).abs()).max(1.0) {
        return Ok(PlanOutcome::NotTransformable(
            NotTransformable::DegenerateInput,
        ));
    }
    let a_sq = k1 * k2 * (m - c) / denom;
    // Cancellation guard: a numerator that vanishes to rounding is the
    // V_N = 0 boundary, which is realizable noise.
    let mut numerator = k1 * m * d - k2 * n * c;
    let cancel_scale = (k1 * m * d).abs().max((k2 * n * c).abs());
    if numerator < 0.0 && numerator >= -1e-12 * cancel_scale {
        numerator = 0.0;
    }
    let v_noise = numerator / denom;
    if a_sq <= 0.0 || a_sq.is_nan() {
        return Ok(PlanOutcome::NotTransformable(
            NotTransformable::NonpositiveSqueezing,
        ));
    }
    if v_noise < 0.0 {
        return Ok(PlanOutcome::NotTransformable(
            NotTransformable::NegativeNoise,
        ));
    }
    Ok(PlanOutcome::Transformable(NoisePlan {
        a_sq,
        v_noise,
        quadrature,
    }))
}

/// Applies the correlated-noise protocol in the preparation picture:
/// `V_x -> V_x / a`, `V_p -> a V_p`, `W_x -> (W_x + N V_N) / a`,
/// `W_p -> a W_p` for the x orientation, mirrored for p.
pub fn apply_noise(e: &EffectiveScheme, p: &NoisePlan) -> EffectiveScheme {
    let a = p.a_sq.sqrt();
    let nn = e.n_parties as f64;
    match p.quadrature {
        Quadrature::X => EffectiveScheme {
            n_parties: e.n_parties,
            v_x: e.v_x / a,
            v_p: a * e.v_p,
            w_x: (e.w_x + nn * p.v_noise) / a,
            w_p: a * e.w_p,
        },
        Quadrature::P => EffectiveScheme {
            n_parties: e.n_parties,
            v_x: a * e.v_x,
            v_p: e.v_p / a,
            w_x: a * e.w_x,
            w_p: (e.w_p + nn * p.v_noise) / a,
        },
    }
}

/// Coefficients of the planner cubic in `u = g^2`, together with the
/// map from an admissible root to the matching squeezing.
struct QndSystem {
    // delta/sigma/pi/nu aggregates of the preparation variances.
    delta_x: f64,
    delta_p: f64,
    sigma_x: f64,
    pi_x: f64,
    nu_x: f64,
    nu_p: f64,
    n: f64,
    k1: f64,
    k2: f64,
}

impl QndSystem {
    fn new(s: &SymmetricState, t: &TargetRatios) -> Self {
        let e = s.to_effective();
        let n = s.n_parties() as f64;
        QndSystem {
            delta_x: e.v_x - e.w_x,
            delta_p: e.v_p - e.w_p,
            sigma_x: e.v_x + e.w_x,
            pi_x: e.v_x * e.w_x,
            nu_x: (n - 1.0) * e.v_x + e.w_x,
            nu_p: (n - 1.0) * e.v_p + e.w_p,
            n,
            k1: t.k1,
            k2: t.k2,
        }
    }

    /// `P(u) = pi_x u^2 + sigma_x u + 1`, the common denominator of the
    /// transformed x variances.
    fn p_of(&self, u: f64) -> f64 {
        (self.pi_x * u + self.sigma_x) * u + 1.0
    }

    /// Squeezing implied by the correlation-ratio equation at root `u`:
    /// `a^2 = -delta_p P(u) / (k2 delta_x)`.
    fn a_sq_at(&self, u: f64) -> f64 {
        -self.delta_p * self.p_of(u) / (self.k2 * self.delta_x)
    }

    /// Cubic in `u` obtained by eliminating `a^2`: the ratio constraints
    /// become `P(u) * [k2 delta_x (nu_p + N u) + k1 delta_p (nu_x + N pi_x u)] = 0`,
    /// expanded here into standard coefficients.
    fn cubic_coefficients(&self) -> (f64, f64, f64, f64) {
        let lin1 = self.n * (self.k2 * self.delta_x + self.k1 * self.delta_p * self.pi_x);
        let lin0 = self.k2 * self.delta_x * self.nu_p + self.k1 * self.delta_p * self.nu_x;
        // (pi_x u^2 + sigma_x u + 1) * (lin1 u + lin0)
        let c3 = self.pi_x * lin1;
        let c2 = self.pi_x * lin0 + self.sigma_x * lin1;
        let c1 = self.sigma_x * lin0 + lin1;
        let c0 = lin0;
        (c3, c2, c1, c0)
    }
}

/// Solves the partial-QND protocol: eliminates `a^2`, solves the cubic in
/// `u = g^2` in closed form, keeps roots with `u >= 0` (tiny negative
/// values clamped) and `a^2 > 0`, verifies each candidate by applying it,
/// and returns the plan with the smallest interaction strength.
pub fn plan_qnd(s: &SymmetricState, t: &TargetRatios) -> Result<PlanOutcome<QndPlan>> {
    Ok(match plan_qnd_all(s, t)? {
        PlanOutcome::Transformable(plans) => PlanOutcome::Transformable(plans[0]),
        PlanOutcome::NotTransformable(r) => PlanOutcome::NotTransformable(r),
    })
}

/// All admissible QND plans, sorted by interaction strength. The head of
/// the list is the canonical (least-disturbance) choice.
pub fn plan_qnd_all(s: &SymmetricState, t: &TargetRatios) -> Result<PlanOutcome<Vec<QndPlan>>> {
    if !s.is_physical() {
        return Err(Error::UnphysicalState);
    }
    let sys = QndSystem::new(s, t);
    // c = 0 makes delta_x vanish and the elimination singular.
    let scale_x = sys.sigma_x.max(1.0);
    if sys.delta_x.abs() < DEGENERATE_TOL * scale_x {
        return Ok(PlanOutcome::NotTransformable(
            NotTransformable::DegenerateInput,
        ));
    }

    let (c3, c2, c1, c0) = sys.cubic_coefficients();
    let roots = match cubic::real_roots(c3, c2, c1, c0) {
        // Identically satisfied: every u works; least disturbance is u = 0.
        None => vec![0.0],
        Some(r) => r,
    };

    let mut plans: Vec<QndPlan> = Vec::new();
    for u in roots {
        if u < ROOT_FLOOR {
            continue;
        }
        let u = u.max(0.0);
        let a_sq = sys.a_sq_at(u);
        if !(a_sq > 0.0 && a_sq.is_finite()) {
            continue;
        }
        let plan = QndPlan { g_sq: u, a_sq };
        // Self check: the applied map must land on the requested ratios.
        let out = apply_qnd(&s.to_effective(), &plan);
        if let Ok(out_state) = out.to_state() {
            let k1_err = (out_state.k1() - t.k1).abs() / t.k1;
            let k2_ok = match out_state.k2() {
                Some(k2) => (k2 - t.k2).abs() / t.k2 <= PLAN_SELF_CHECK,
                None => false,
            };
            if k1_err <= PLAN_SELF_CHECK && k2_ok {
                plans.push(plan);
            }
        }
    }
    plans.sort_by(|a, b| a.g_sq.partial_cmp(&b.g_sq).unwrap());
    plans.dedup_by(|a, b| (a.g_sq - b.g_sq).abs() <= 1e-10 * (1.0 + b.g_sq));
    if plans.is_empty() {
        Ok(PlanOutcome::NotTransformable(NotTransformable::NoRealRoot))
    } else {
        Ok(PlanOutcome::Transformable(plans))
    }
}

/// Applies the partial-QND protocol in the preparation picture:
/// `V_x -> a V_x / (1 + g^2 V_x)`, `V_p -> (V_p + g^2) / a`, identically
/// for `W_x`, `W_p`.
pub fn apply_qnd(e: &EffectiveScheme, p: &QndPlan) -> EffectiveScheme {
    let a = p.a_sq.sqrt();
    let u = p.g_sq;
    EffectiveScheme {
        n_parties: e.n_parties,
        v_x: a * e.v_x / (1.0 + u * e.v_x),
        v_p: (e.v_p + u) / a,
        w_x: a * e.w_x / (1.0 + u * e.w_x),
        w_p: (e.w_p + u) / a,
    }
}

/// Applies a plan to a state in the scalar picture.
pub fn transform_state(s: &SymmetricState, plan: &Plan) -> Result<SymmetricState> {
    let e = s.to_effective();
    let out = match plan {
        Plan::Noise(p) => apply_noise(&e, p),
        Plan::Qnd(p) => apply_qnd(&e, p),
    };
    out.to_state()
}

/// The correlated-noise matrix: every 2x2 block (diagonal included) is
/// `diag(V_N, 0)` for the x orientation, `diag(0, V_N)` for p.
pub fn correlated_noise_matrix(
    n_modes: usize,
    v_noise: f64,
    quadrature: Quadrature,
) -> nalgebra::DMatrix<f64> {
    let offset = match quadrature {
        Quadrature::X => 0,
        Quadrature::P => 1,
    };
    let mut mat = nalgebra::DMatrix::<f64>::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..n_modes {
        for j in 0..n_modes {
            mat[(2 * i + offset, 2 * j + offset)] = v_noise;
        }
    }
    mat
}

/// Runs a plan on the full 2N x 2N covariance matrix, the way the
/// experiment would: correlated displacements plus local squeezers, or
/// QND gates on vacuum ancillas, ancilla homodyne, and local squeezers.
///
/// Matches the scalar route through the preparation picture to 1e-10.
pub fn apply_protocol_full(gamma: &CovarianceMatrix, plan: &Plan) -> Result<CovarianceMatrix> {
    let n = gamma.n_modes();
    match plan {
        Plan::Noise(p) => {
            if !(p.a_sq > 0.0 && p.a_sq.is_finite()) {
                return Err(Error::NonPositiveSqueezing(p.a_sq));
            }
            if p.v_noise < 0.0 {
                return Err(Error::NoiseNotPsd);
            }
            let noisy = gamma.add_noise(&correlated_noise_matrix(n, p.v_noise, p.quadrature))?;
            // local_squeezer(a) scales the x variance by 1/a; the p
            // orientation needs the reciprocal parameter.
            let a = match p.quadrature {
                Quadrature::X => p.a_sq.sqrt(),
                Quadrature::P => 1.0 / p.a_sq.sqrt(),
            };
            noisy.transform(&SymplecticOp::uniform_squeezer(a, n)?)
        }
        Plan::Qnd(p) => {
            if !(p.a_sq > 0.0 && p.a_sq.is_finite()) {
                return Err(Error::NonPositiveSqueezing(p.a_sq));
            }
            if p.g_sq < 0.0 {
                return Err(Error::NonPositiveSqueezing(p.g_sq));
            }
            let g = p.g_sq.sqrt();
            let mut full = gamma.append_vacuum(n);
            for j in 0..n {
                full = full.transform(&SymplecticOp::qnd_gate(g, j, n + j, 2 * n)?)?;
            }
            // Measure ancillas from the highest index down so the
            // remaining indices stay put.
            for j in (0..n).rev() {
                full = full.condition_homodyne(n + j, Quadrature::X)?;
            }
            // The QND squeezing multiplies the x variance by a.
            let a = p.a_sq.sqrt();
            full.transform(&SymplecticOp::uniform_squeezer(1.0 / a, n)?)
        }
    }
}
