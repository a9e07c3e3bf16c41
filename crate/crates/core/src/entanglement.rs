//! Entanglement classification of permutation-invariant states.
//!
//! For this family only three of the tripartite classes occur: fully
//! entangled (I), bound entangled (IV), and fully separable (V). The
//! partial-transpose test across any single mode settles I versus the
//! rest; the IV/V split uses a closed-form full-separability criterion
//! backed by an independent decomposition-search oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::protocols::{plan_noise, plan_qnd, transform_state, Plan, TargetRatios};
use crate::states::SymmetricState;
use crate::symplectic::{Quadrature, PHYSICALITY_TOL};

/// Symplectic eigenvalues within this distance of 1 count as PPT, and
/// separability margins within it count as separable (ties break toward
/// the separable side).
const CLASS_TOL: f64 = 1e-9;

/// Entanglement class of a (possibly transformed) grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementClass {
    /// Class I: inseparable across every bipartition.
    FullyEntangled,
    /// Class IV: PPT across every bipartition yet not fully separable.
    BoundEntangled,
    /// Class V: a product of single-mode states up to classical noise.
    FullySeparable,
    Unphysical,
    /// Grid-only marker: the requested protocol has no solution here.
    NotTransformable,
}

impl EntanglementClass {
    /// Integer codes used in CSV output.
    pub fn code(&self) -> i8 {
        match self {
            EntanglementClass::FullyEntangled => 1,
            EntanglementClass::BoundEntangled => 4,
            EntanglementClass::FullySeparable => 5,
            EntanglementClass::Unphysical => -1,
            EntanglementClass::NotTransformable => 0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EntanglementClass::FullyEntangled => "I",
            EntanglementClass::BoundEntangled => "IV",
            EntanglementClass::FullySeparable => "V",
            EntanglementClass::Unphysical => "unphysical",
            EntanglementClass::NotTransformable => "not-transformable",
        }
    }
}

/// Smallest symplectic eigenvalue of the partial transpose across the
/// 1|(N-1) bipartition (all such cuts are equivalent by symmetry).
/// Values below 1 witness entanglement across every bipartition.
pub fn ppt_min_symplectic(s: &SymmetricState) -> Result<f64> {
    if !s.is_physical() {
        return Err(Error::UnphysicalState);
    }
    let pt = s.build_cm().partial_transpose(&[0])?;
    let spectrum = pt.symplectic_spectrum()?;
    Ok(spectrum[0])
}

/// Closed-form full-separability test:
/// `min(V_x, W_x) * min(V_p, W_p) >= 1`.
///
/// A fully separable symmetric state admits `gamma >= (+)_i sigma_0` with
/// one common diagonal single-mode `sigma_0`; the circulant eigenvalues of
/// `gamma - (+) sigma_0` reduce that PSD condition to the bound above.
/// `separability_oracle` verifies this reduction numerically.
pub fn is_fully_separable(s: &SymmetricState) -> Result<bool> {
    if !s.is_physical() {
        return Err(Error::UnphysicalState);
    }
    Ok(separability_margin(s) >= -CLASS_TOL)
}

/// Margin of the closed-form criterion, positive on separable states.
pub fn separability_margin(s: &SymmetricState) -> f64 {
    let e = s.to_effective();
    e.v_x.min(e.w_x) * e.v_p.min(e.w_p) - 1.0
}

/// Independent full-separability witness search: looks for a single-mode
/// diagonal `sigma_0 = diag(s_x, s_p)` with `s_x s_p >= 1` such that
/// `gamma - (+) sigma_0` is PSD, scanning a 2-D grid in `(s_x, s_p)` and
/// refining around the best candidate.
pub fn separability_oracle(s: &SymmetricState, grid_resolution: usize) -> Result<bool> {
    if !s.is_physical() {
        return Err(Error::UnphysicalState);
    }
    let res = grid_resolution.max(4);
    let gamma = s.build_cm();
    let n = s.n_parties();

    // Diagonal feasibility bounds the search box: s_x <= m, s_p <= n.
    let sx_hi = s.m();
    let sp_hi = s.n();
    if sx_hi * sp_hi < 1.0 {
        return Ok(false);
    }
    let sx_lo = (1.0 / sp_hi).min(sx_hi);

    let witness_margin = |s_x: f64, s_p: f64| -> f64 {
        let mut mat = gamma.matrix().clone();
        for mode in 0..n {
            mat[(2 * mode, 2 * mode)] -= s_x;
            mat[(2 * mode + 1, 2 * mode + 1)] -= s_p;
        }
        let scale = gamma.matrix().amax().max(1.0);
        match linalg::min_eigenvalue(&mat) {
            Ok(min) => min / scale,
            Err(_) => f64::NEG_INFINITY,
        }
    };

    // Coarse 2-D scan over log-spaced (s_x, s_p) with s_x s_p >= 1.
    let mut best = (f64::NEG_INFINITY, sx_lo, 1.0 / sx_lo);
    let log_lo = sx_lo.ln();
    let log_hi = sx_hi.ln();
    for i in 0..res {
        let frac = i as f64 / (res - 1) as f64;
        let s_x = (log_lo + frac * (log_hi - log_lo)).exp();
        let p_lo = (1.0 / s_x).min(sp_hi);
        let p_log_lo = p_lo.ln();
        let p_log_hi = sp_hi.ln();
        for j in 0..res {
            let pfrac = j as f64 / (res - 1) as f64;
            let s_p = (p_log_lo + pfrac * (p_log_hi - p_log_lo)).exp();
            let margin = witness_margin(s_x, s_p);
            if margin >= -PHYSICALITY_TOL {
                return Ok(true);
            }
            if margin > best.0 {
                best = (margin, s_x, s_p);
            }
        }
    }

    // Local refinement: the best witness sits on the uncertainty boundary
    // s_p = 1/s_x (shrinking s_p only helps), so polish s_x there by
    // golden-section maximization of the PSD margin.
    let f = |s_x: f64| witness_margin(s_x, 1.0 / s_x);
    let mut lo = (best.1 * 0.25).max(sx_lo.min(best.1));
    let mut hi = (best.1 * 4.0).min(sx_hi);
    if lo >= hi {
        lo = sx_lo;
        hi = sx_hi;
    }
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
        if (hi - lo) < 1e-12 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(f1.max(f2).max(best.0) >= -PHYSICALITY_TOL)
}

/// Classifies a state: unphysical, fully entangled (NPT), fully
/// separable, or bound entangled (the PPT remainder).
pub fn classify(s: &SymmetricState) -> EntanglementClass {
    if !s.is_physical() {
        return EntanglementClass::Unphysical;
    }
    let ppt_min = match ppt_min_symplectic(s) {
        Ok(v) => v,
        Err(_) => return EntanglementClass::Unphysical,
    };
    if ppt_min < 1.0 - CLASS_TOL {
        return EntanglementClass::FullyEntangled;
    }
    if separability_margin(s) >= -CLASS_TOL {
        EntanglementClass::FullySeparable
    } else {
        EntanglementClass::BoundEntangled
    }
}

/// One axis of a classification map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count == 0 || !(min.is_finite() && max.is_finite()) || min > max {
            return Err(Error::InvalidModeSet);
        }
        Ok(Self { min, max, count })
    }

    pub fn point(&self, i: usize) -> f64 {
        if self.count == 1 {
            return self.min;
        }
        let v = self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64;
        if v == 0.0 {
            0.0 // normalize -0.0 for stable output
        } else {
            v
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }
}

/// Which protocol (if any) to apply before classifying each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Noise,
    Qnd,
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProtocolKind::Noise => write!(f, "noise"),
            ProtocolKind::Qnd => write!(f, "qnd"),
        }
    }
}

/// Inputs of a classification sweep over the `(c, d)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSpec {
    pub m: f64,
    pub n: f64,
    pub n_parties: usize,
    pub c_grid: GridSpec,
    pub d_grid: GridSpec,
    pub protocol: Option<(ProtocolKind, TargetRatios)>,
    /// Noise orientation; ignored for the QND protocol.
    pub quadrature: Quadrature,
}

impl MapSpec {
    /// Grid covering the whole box where all four effective variances can
    /// stay positive.
    pub fn default_grids(m: f64, n: f64, n_parties: usize, count: usize) -> (GridSpec, GridSpec) {
        let k = (n_parties - 1) as f64;
        (
            GridSpec {
                min: -m / k,
                max: m,
                count,
            },
            GridSpec {
                min: -n,
                max: n / k,
                count,
            },
        )
    }
}

/// Result grid; codes are stored row-major with `c` as the slow axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMap {
    pub spec: MapSpec,
    pub codes: Vec<i8>,
}

/// Classifies each `(c, d)` cell, optionally planning and applying the
/// requested protocol first. Cells are independent and evaluated in
/// parallel; the output ordering does not depend on the schedule.
pub fn class_map(spec: &MapSpec) -> Result<ClassMap> {
    if spec.n_parties < 2 {
        return Err(Error::InvalidPartyCount(spec.n_parties));
    }
    if spec.m <= 0.0 || spec.n <= 0.0 {
        return Err(Error::NonPositiveVariance {
            name: "m/n",
            value: spec.m.min(spec.n),
        });
    }
    let cells: Vec<(usize, usize)> = (0..spec.c_grid.count)
        .flat_map(|i| (0..spec.d_grid.count).map(move |j| (i, j)))
        .collect();
    let codes: Vec<i8> = cells
        .par_iter()
        .map(|&(i, j)| {
            let c = spec.c_grid.point(i);
            let d = spec.d_grid.point(j);
            classify_cell(spec, c, d).code()
        })
        .collect();
    Ok(ClassMap { spec: *spec, codes })
}

/// Classification of a single cell, as used by `class_map`.
pub fn classify_cell(spec: &MapSpec, c: f64, d: f64) -> EntanglementClass {
    let Ok(state) = SymmetricState::new(spec.n_parties, spec.m, spec.n, c, d) else {
        return EntanglementClass::Unphysical;
    };
    if !state.is_physical() {
        return EntanglementClass::Unphysical;
    }
    match spec.protocol {
        None => classify(&state),
        Some((kind, targets)) => {
            let plan = match kind {
                ProtocolKind::Noise => match plan_noise(&state, &targets, spec.quadrature) {
                    Ok(outcome) => outcome.plan().copied().map(Plan::Noise),
                    Err(_) => None,
                },
                ProtocolKind::Qnd => match plan_qnd(&state, &targets) {
                    Ok(outcome) => outcome.plan().copied().map(Plan::Qnd),
                    Err(_) => None,
                },
            };
            match plan {
                None => EntanglementClass::NotTransformable,
                Some(plan) => match transform_state(&state, &plan) {
                    Ok(out) => classify(&out),
                    Err(_) => EntanglementClass::NotTransformable,
                },
            }
        }
    }
}

impl ClassMap {
    pub fn code_at(&self, c_index: usize, d_index: usize) -> i8 {
        self.codes[c_index * self.spec.d_grid.count + d_index]
    }

    /// Number of cells carrying each code `(I, IV, V, not-transformable,
    /// unphysical)`.
    pub fn counts(&self) -> (usize, usize, usize, usize, usize) {
        let mut t = (0, 0, 0, 0, 0);
        for &code in &self.codes {
            match code {
                1 => t.0 += 1,
                4 => t.1 += 1,
                5 => t.2 += 1,
                0 => t.3 += 1,
                _ => t.4 += 1,
            }
        }
        t
    }

    /// CSV with `#` metadata headers and `c,d,code` rows, `c` varying
    /// slowest. Numbers use the shortest round-trip representation.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let s = &self.spec;
        writeln!(out, "# m={} n={} N={}", s.m, s.n, s.n_parties).unwrap();
        match &s.protocol {
            None => writeln!(out, "# protocol=none").unwrap(),
            Some((kind, t)) => {
                writeln!(out, "# protocol={kind} k1={} k2={}", t.k1, t.k2).unwrap();
                if *kind == ProtocolKind::Noise {
                    writeln!(out, "# quadrature={}", s.quadrature).unwrap();
                }
            }
        }
        writeln!(
            out,
            "# c_grid={}:{}:{}",
            s.c_grid.min, s.c_grid.max, s.c_grid.count
        )
        .unwrap();
        writeln!(
            out,
            "# d_grid={}:{}:{}",
            s.d_grid.min, s.d_grid.max, s.d_grid.count
        )
        .unwrap();
        writeln!(out, "c,d,code").unwrap();
        for i in 0..s.c_grid.count {
            for j in 0..s.d_grid.count {
                writeln!(
                    out,
                    "{},{},{}",
                    s.c_grid.point(i),
                    s.d_grid.point(j),
                    self.code_at(i, j)
                )
                .unwrap();
            }
        }
        out
    }

    /// Binary P6 raster: `c` increases left to right, `d` top to bottom
    /// starting at `d_max`. Palette: I black, IV light gray, V gray,
    /// not-transformable lighter gray, unphysical white.
    pub fn to_ppm(&self) -> Vec<u8> {
        let w = self.spec.c_grid.count;
        let h = self.spec.d_grid.count;
        let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
        for row in 0..h {
            let j = h - 1 - row; // d_max at the top
            for i in 0..w {
                let rgb: [u8; 3] = match self.code_at(i, j) {
                    1 => [0, 0, 0],
                    4 => [160, 160, 160],
                    5 => [96, 96, 96],
                    0 => [224, 224, 224],
                    _ => [255, 255, 255],
                };
                out.extend_from_slice(&rgb);
            }
        }
        out
    }
}
