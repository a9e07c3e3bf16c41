//! Real roots of low-degree polynomials in closed form.
//!
//! The protocol planner reduces to a cubic whose leading coefficients can
//! degenerate, so the solver cascades cubic -> quadratic -> linear based on
//! relative coefficient size and polishes every root with one Newton step.

/// Real roots of `c3 x^3 + c2 x^2 + c1 x + c0 = 0`, ascending, with
/// multiple roots reported once.
///
/// Returns `None` when all coefficients vanish (identically zero polynomial,
/// every `x` is a root).
pub fn real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Option<Vec<f64>> {
    let scale = c3.abs().max(c2.abs()).max(c1.abs()).max(c0.abs());
    if scale == 0.0 || !scale.is_finite() {
        return if scale == 0.0 { None } else { Some(vec![]) };
    }
    let (c3, c2, c1, c0) = (c3 / scale, c2 / scale, c1 / scale, c0 / scale);

    const DEGENERATE: f64 = 1e-14;
    let mut roots = if c3.abs() <= DEGENERATE {
        if c2.abs() <= DEGENERATE {
            if c1.abs() <= DEGENERATE {
                // Nonzero constant: no roots.
                return Some(vec![]);
            }
            vec![-c0 / c1]
        } else {
            quadratic_roots(c2, c1, c0)
        }
    } else {
        cubic_roots(c2 / c3, c1 / c3, c0 / c3)
    };

    for r in roots.iter_mut() {
        *r = newton_polish(*r, c3, c2, c1, c0);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Double roots split by ~sqrt(eps); merge anything closer than that.
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs())));
    Some(roots)
}

/// Real roots of the monic cubic `x^3 + b x^2 + c x + d = 0`.
fn cubic_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    // Depressed form t^3 + p t + q with x = t - b/3.
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let s1 = half_q * half_q;
    let s2 = third_p * third_p * third_p;
    let disc = s1 + s2;
    // A discriminant that vanishes to rounding marks a repeated real root;
    // route it through the trigonometric branch instead of dropping it.
    let disc_floor = 1e-14 * s1.max(s2.abs());

    if disc > disc_floor {
        // One real root; take the cube root with matching sign to avoid
        // cancellation between the two Cardano terms.
        let s = disc.sqrt();
        let u = (-half_q + s.copysign(-half_q)).cbrt();
        let v = if u == 0.0 { 0.0 } else { -third_p / u };
        vec![u + v - shift]
    } else if third_p >= 0.0 {
        // p >= 0 with a non-positive discriminant forces p ~ q ~ 0.
        vec![(-q).cbrt() - shift]
    } else {
        // Three real roots: trigonometric form.
        let m = 2.0 * (-third_p).sqrt();
        let cos_arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = cos_arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .collect()
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let s = disc.sqrt();
    // Citardauq pairing keeps the smaller root stable.
    let q = -0.5 * (b + s.copysign(b));
    if q == 0.0 {
        vec![0.0, -b / a]
    } else {
        vec![q / a, c / q]
    }
}

fn newton_polish(x: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    let eval = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    let f = eval(x);
    let df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
    if df != 0.0 && df.is_finite() {
        let step = f / df;
        // Near repeated roots f' ~ 0 and the raw step is garbage; accept
        // it only when it actually shrinks the residual.
        if step.is_finite() && step.abs() < 1.0 + x.abs() && eval(x - step).abs() <= f.abs() {
            return x - step;
        }
    }
    x
}
