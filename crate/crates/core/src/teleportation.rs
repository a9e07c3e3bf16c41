//! Assisted teleportation of coherent states with a symmetric resource.
//!
//! Alice Bell-measures her mode against the input, Charlie splits his mode
//! on a beam splitter of transmittance `t` and homodynes both outputs, and
//! Bob displaces. For a coherent input the fidelity is `F = 2 / sqrt(det E)`
//! with `E = 2I + R A R^T + R C + C^T R^T + B` built from the conditioned
//! two-mode blocks and the gain matrix `R = diag(-1, 1)`, which assumes
//! `c > 0`, `d > 0`; states outside that convention are rejected.

use crate::error::{Error, Result};
use crate::protocols::{apply_noise, apply_qnd, NoisePlan, QndPlan};
use crate::states::{EffectiveScheme, SymmetricState};
use crate::symplectic::Quadrature;

/// Charlie's measurement: beam-splitter power transmittance `T = t^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharlieSetup {
    transmittance_sq: f64,
}

impl CharlieSetup {
    pub fn new(transmittance_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmittance_sq) {
            return Err(Error::InvalidTransmittance(transmittance_sq));
        }
        Ok(Self { transmittance_sq })
    }

    /// Homodyne of Charlie's p quadrature: the optimal choice.
    pub fn homodyne_p() -> Self {
        Self {
            transmittance_sq: 1.0,
        }
    }

    pub fn transmittance_sq(&self) -> f64 {
        self.transmittance_sq
    }
}

/// Conditioned state of modes A, B after Charlie's measurement; all
/// blocks are diagonal and A = B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionedBlocks {
    /// Diagonal of A (= B).
    pub a: [f64; 2],
    /// Diagonal of the cross block C.
    pub c: [f64; 2],
}

/// Fidelity of the teleported coherent state plus the quantities behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub det_e: f64,
    pub blocks: ConditionedBlocks,
}

fn require_convention(s: &SymmetricState) -> Result<()> {
    if s.c() <= 0.0 || s.d() <= 0.0 {
        return Err(Error::GainConvention { c: s.c(), d: s.d() });
    }
    Ok(())
}

fn require_tripartite(s: &SymmetricState) -> Result<()> {
    if s.n_parties() != 3 {
        return Err(Error::InvalidPartyCount(s.n_parties()));
    }
    Ok(())
}

/// Closed-form conditioned blocks of modes A, B after Charlie splits his
/// mode with vacuum at transmittance `t` and homodynes x on the reflected
/// and p on the transmitted output:
/// `A = B = diag(m - c^2 r^2 / (m r^2 + t^2), n - d^2 t^2 / (n t^2 + r^2))`.
pub fn conditioned_ab(s: &SymmetricState, setup: &CharlieSetup) -> Result<ConditionedBlocks> {
    require_tripartite(s)?;
    if !s.is_physical() {
        return Err(Error::UnphysicalState);
    }
    let t_sq = setup.transmittance_sq;
    let r_sq = 1.0 - t_sq;
    let (m, n, c, d) = (s.m(), s.n(), s.c(), s.d());
    let x_term = c * c * r_sq / (m * r_sq + t_sq);
    let p_term = d * d * t_sq / (n * t_sq + r_sq);
    Ok(ConditionedBlocks {
        a: [m - x_term, n - p_term],
        c: [c - x_term, -d - p_term],
    })
}

/// Teleportation fidelity at a given Charlie transmittance.
pub fn fidelity(s: &SymmetricState, setup: &CharlieSetup) -> Result<FidelityReport> {
    require_convention(s)?;
    let blocks = conditioned_ab(s, setup)?;
    // E = 2I + R A R^T + R C + C^T R^T + B with diagonal blocks and
    // R = diag(-1, 1): everything stays diagonal.
    let e_x = 2.0 + 2.0 * blocks.a[0] - 2.0 * blocks.c[0];
    let e_p = 2.0 + 2.0 * blocks.a[1] + 2.0 * blocks.c[1];
    let det_e = e_x * e_p;
    Ok(FidelityReport {
        fidelity: 2.0 / det_e.sqrt(),
        det_e,
        blocks,
    })
}

/// Closed form at the optimal `T = 1`:
/// `F = 1 / sqrt((m - c + 1)(n - d + 1 - 2 d^2 / n))`.
pub fn fidelity_closed(s: &SymmetricState) -> Result<f64> {
    require_tripartite(s)?;
    require_convention(s)?;
    if !s.is_physical() {
        return Err(Error::UnphysicalState);
    }
    Ok(1.0 / tripartite_det_factor(s.m(), s.n(), s.c(), s.d()).sqrt())
}

/// The quantity under the square root of the closed-form fidelity.
fn tripartite_det_factor(m: f64, n: f64, c: f64, d: f64) -> f64 {
    (m - c + 1.0) * (n - d + 1.0 - 2.0 * d * d / n)
}

/// Two-party teleportation without an assisting measurement:
/// `F = 1 / sqrt((m - c + 1)(n - d + 1))`.
pub fn bipartite_fidelity(s: &SymmetricState) -> Result<f64> {
    if s.n_parties() != 2 {
        return Err(Error::InvalidPartyCount(s.n_parties()));
    }
    require_convention(s)?;
    if !s.is_physical() {
        return Err(Error::UnphysicalState);
    }
    Ok(1.0 / ((s.m() - s.c() + 1.0) * (s.n() - s.d() + 1.0)).sqrt())
}

/// Squeezing that maximizes the tripartite fidelity:
/// `a_opt^2 = V_x (2 V_p + W_p) / (3 V_p W_p)`. Returns `a_opt`.
pub fn optimal_squeezing(e: &EffectiveScheme) -> Result<f64> {
    if e.n_parties != 3 {
        return Err(Error::InvalidPartyCount(e.n_parties));
    }
    if !e.is_valid() {
        return Err(Error::NonPositiveVariance {
            name: "effective variance",
            value: e.v_x.min(e.v_p).min(e.w_x).min(e.w_p),
        });
    }
    Ok((e.v_x * (2.0 * e.v_p + e.w_p) / (3.0 * e.v_p * e.w_p)).sqrt())
}

/// dB value of a squeezing factor (`a` is a variance ratio).
pub fn squeezing_db(a: f64) -> f64 {
    10.0 * a.log10()
}

/// Fidelity after pure local squeezing `a` (the noise protocol at
/// `V_N = 0`).
pub fn fidelity_after_squeezing(s: &SymmetricState, a: f64) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::NonPositiveSqueezing(a));
    }
    let plan = NoisePlan {
        a_sq: a * a,
        v_noise: 0.0,
        quadrature: Quadrature::X,
    };
    let out = apply_noise(&s.to_effective(), &plan).to_state()?;
    fidelity_closed(&out)
}

/// Fidelity after the QND protocol at strength `g` and squeezing `a`.
pub fn fidelity_after_qnd(s: &SymmetricState, g: f64, a: f64) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::NonPositiveSqueezing(a));
    }
    let plan = QndPlan {
        g_sq: g * g,
        a_sq: a * a,
    };
    let out = apply_qnd(&s.to_effective(), &plan).to_state()?;
    fidelity_closed(&out)
}

/// Golden-section minimizer on an expanding bracket: grows the bracket by
/// decades whenever the minimum lands at an edge.
fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const REL_TOL: f64 = 1e-10;
    const EXPAND_LIMIT: f64 = 1e13;
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    loop {
        let mut a = lo;
        let mut b = hi;
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = f(x1);
        let mut f2 = f(x2);
        for _ in 0..200 {
            if f1 > f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = f(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = f(x1);
            }
            if (b - a) <= REL_TOL * (a.abs() + b.abs()) {
                break;
            }
        }
        let x = 0.5 * (a + b);
        // Expand toward whichever edge captured the minimum.
        if x > hi / 2.0 && hi < EXPAND_LIMIT {
            hi *= 10.0;
        } else if x < lo * 2.0 && lo > 1.0 / EXPAND_LIMIT {
            lo /= 10.0;
        } else {
            return x;
        }
    }
}

/// Squeezing minimizing the closed-form determinant factor at fixed QND
/// strength, found numerically on `a` in an expanding bracket.
pub fn optimal_squeezing_for_g(s: &SymmetricState, g: f64) -> Result<f64> {
    require_tripartite(s)?;
    let e = s.to_effective();
    let objective = move |a: f64| -> f64 {
        let out = apply_qnd(
            &e,
            &QndPlan {
                g_sq: g * g,
                a_sq: a * a,
            },
        );
        match out.to_state() {
            Ok(st) => tripartite_det_factor(st.m(), st.n(), st.c(), st.d()),
            Err(_) => f64::INFINITY,
        }
    };
    Ok(golden_min(&objective, 1e-4, 1e4))
}

/// How the squeezing is chosen along a QND-strength sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SqueezingMode {
    Fixed(f64),
    PerGOptimal,
}

/// Fidelity-vs-squeezing curve; grid points whose transformed state
/// violates the gain convention are skipped and reported.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingCurve {
    pub state: SymmetricState,
    pub baseline: f64,
    pub points: Vec<(f64, f64)>,
    pub skipped: Vec<f64>,
}

/// Fidelity-vs-QND-strength curve; `squeezing[i]` records the `a` used at
/// `points[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QndStrengthCurve {
    pub state: SymmetricState,
    pub baseline: f64,
    pub mode: SqueezingMode,
    pub points: Vec<(f64, f64)>,
    pub squeezing: Vec<f64>,
    pub skipped: Vec<f64>,
}

/// Sweeps the fidelity over squeezing values.
pub fn fidelity_vs_squeezing(s: &SymmetricState, a_grid: &[f64]) -> Result<SqueezingCurve> {
    require_tripartite(s)?;
    let baseline = fidelity_closed(s)?;
    let mut points = Vec::with_capacity(a_grid.len());
    let mut skipped = Vec::new();
    for &a in a_grid {
        match fidelity_after_squeezing(s, a) {
            Ok(f) => points.push((a, f)),
            Err(_) => skipped.push(a),
        }
    }
    Ok(SqueezingCurve {
        state: *s,
        baseline,
        points,
        skipped,
    })
}

/// Sweeps the fidelity over QND strengths with fixed or per-g optimal
/// squeezing.
pub fn fidelity_vs_g(
    s: &SymmetricState,
    g_grid: &[f64],
    mode: SqueezingMode,
) -> Result<QndStrengthCurve> {
    require_tripartite(s)?;
    let baseline = fidelity_closed(s)?;
    let mut points = Vec::with_capacity(g_grid.len());
    let mut squeezing = Vec::with_capacity(g_grid.len());
    let mut skipped = Vec::new();
    for &g in g_grid {
        let a = match mode {
            SqueezingMode::Fixed(a) => a,
            SqueezingMode::PerGOptimal => optimal_squeezing_for_g(s, g)?,
        };
        match fidelity_after_qnd(s, g, a) {
            Ok(f) => {
                points.push((g, f));
                squeezing.push(a);
            }
            Err(_) => skipped.push(g),
        }
    }
    Ok(QndStrengthCurve {
        state: *s,
        baseline,
        mode,
        points,
        squeezing,
        skipped,
    })
}

fn curve_csv(
    state: &SymmetricState,
    mode_line: &str,
    baseline: f64,
    axis: &str,
    points: &[(f64, f64)],
) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(
        out,
        "# state m={} n={} c={} d={} N={}",
        state.m(),
        state.n(),
        state.c(),
        state.d(),
        state.n_parties()
    )
    .unwrap();
    writeln!(out, "# mode={mode_line}").unwrap();
    writeln!(out, "# baseline F0={baseline}").unwrap();
    writeln!(out, "{axis},F").unwrap();
    for (x, f) in points {
        writeln!(out, "{x},{f}").unwrap();
    }
    out
}

impl SqueezingCurve {
    pub fn to_csv(&self) -> String {
        curve_csv(&self.state, "squeezing", self.baseline, "a", &self.points)
    }
}

impl QndStrengthCurve {
    pub fn to_csv(&self) -> String {
        let mode = match self.mode {
            SqueezingMode::Fixed(a) => format!("qnd squeezing=fixed:{a}"),
            SqueezingMode::PerGOptimal => "qnd squeezing=optimal".to_string(),
        };
        curve_csv(&self.state, &mode, self.baseline, "g", &self.points)
    }
}
