use std::f64::consts::PI;

use serde::Serialize;

use super::{two_outcome_angle, BoundMethod, BoundResult, Interval, IntervalKind, Provenance};
use crate::error::{Error, Result};
use crate::optim::nelder_mead_max;
use crate::states::ParityModel;

/// Half-width of the search box in fringe periods.
pub const SEARCH_PERIODS: f64 = 1.2;
const GRID: usize = 61;
/// Smallest pair separation, in fringe periods.
const MIN_GAP: f64 = 1e-6;
const REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedOptimum {
    pub theta1: f64,
    pub theta2: f64,
    pub value: f64,
}

/// Bhattacharyya bound for the model's parity probabilities at `θ₁` and `θ₂`.
pub fn pair_bound<M: ParityModel>(model: &M, theta1: f64, theta2: f64) -> f64 {
    let step = model.generator_scale() * (theta2 - theta1);
    if step == 0.0 {
        return 0.0;
    }
    let a = two_outcome_angle(
        model.one_plus(theta1),
        model.one_minus(theta1),
        model.one_plus(theta2),
        model.one_minus(theta2),
    );
    a * a / (step * step)
}

fn optimize<M: ParityModel>(model: &M) -> FittedOptimum {
    let period = model.fringe_period();
    let half = SEARCH_PERIODS * period;
    let g_min = MIN_GAP * period;
    let g_max = 2.0 * half;
    let h = 2.0 * half / (GRID - 1) as f64;
    let mut starts: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..GRID {
        for j in (i + 1)..GRID {
            let (t1, t2) = (-half + i as f64 * h, -half + j as f64 * h);
            starts.push((t1, t2, pair_bound(model, t1, t2)));
        }
    }
    starts.sort_by(|a, b| b.2.total_cmp(&a.2));
    // (centre, ln gap) keeps the pair ordered and non-degenerate
    let objective = |x: &[f64]| {
        let g = x[1].exp().clamp(g_min, g_max);
        let c = x[0].clamp(-half, half);
        pair_bound(model, c - 0.5 * g, c + 0.5 * g)
    };
    let mut best = FittedOptimum {
        theta1: starts[0].0,
        theta2: starts[0].1,
        value: starts[0].2,
    };
    for &(t1, t2, _) in starts.iter().take(4) {
        let x0 = [0.5 * (t1 + t2), (t2 - t1).ln()];
        let (x, v) = nelder_mead_max(objective, &x0, &[0.25 * h, 0.5], REL_TOL, 4000);
        if v > best.value {
            let g = x[1].exp().clamp(g_min, g_max);
            let c = x[0].clamp(-half, half);
            best = FittedOptimum {
                theta1: c - 0.5 * g,
                theta2: c + 0.5 * g,
                value: v,
            };
        }
    }
    best
}

/// Delta-method interval of `f(params)` through central differences.
fn delta_interval<M: ParityModel>(
    model: &M,
    value: f64,
    f: impl Fn(&M) -> f64,
) -> (Option<Interval>, Option<String>) {
    let cov = model.covariance();
    if cov.iter().flatten().all(|c| *c == 0.0) {
        return (Some(Interval::exact(value)), None);
    }
    if cov.iter().flatten().any(|c| !c.is_finite()) {
        return (None, Some("singular covariance: point estimate only".into()));
    }
    let p = model.parameters();
    let grad: Vec<f64> = (0..p.len())
        .map(|i| {
            let h = 1e-6 * p[i].abs().max(1e-3);
            let mut up = p.clone();
            let mut dn = p.clone();
            up[i] += h;
            dn[i] -= h;
            (f(&model.with_parameters(&up)) - f(&model.with_parameters(&dn))) / (2.0 * h)
        })
        .collect();
    let mut var = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            var += grad[i] * cov[i][j] * grad[j];
        }
    }
    if !var.is_finite() || var < 0.0 {
        return (None, Some("singular covariance: point estimate only".into()));
    }
    let sd = var.sqrt();
    (
        Some(Interval::new((value - sd).max(0.0), value + sd, IntervalKind::DeltaMethod)),
        None,
    )
}

fn model_provenance<M: ParityModel>(op: &str, model: &M) -> Provenance {
    let mut prov = Provenance::new(op)
        .input("generator_scale", model.generator_scale())
        .input("normalization", model.normalization());
    for (name, v) in model.parameter_names().iter().zip(model.parameters()) {
        prov = prov.input(name, v);
    }
    prov
}

/// Bhattacharyya bound maximized over the pair `(θ₁, θ₂)` of the fitted model. The
/// search covers `±1.2` fringe periods around the origin (coarse grid,
/// then simplex refinement). The interval propagates the model
/// covariance through the optimal pair held fixed.
pub fn fitted_bound<M: ParityModel>(model: &M) -> Result<BoundResult> {
    let params = model.parameters();
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("non-finite model parameter".into()));
    }
    let opt = optimize(model);
    let (t1, t2) = (opt.theta1, opt.theta2);
    let (interval, warning) = delta_interval(model, opt.value, |m| pair_bound(m, t1, t2));
    let mut prov = model_provenance("fitted_bound", model)
        .input("theta1", t1)
        .input("theta2", t2);
    prov.warnings.extend(warning);
    Ok(BoundResult::new(
        BoundMethod::BhattacharyyaFitted,
        opt.value,
        model.normalization(),
        interval,
        prov,
    ))
}

/// Optimal pair for [`fitted_bound`].
pub fn fitted_optimum<M: ParityModel>(model: &M) -> FittedOptimum {
    optimize(model)
}

fn shortcut_value<M: ParityModel>(m: &M) -> f64 {
    let a = m.parameters()[0];
    let omega = 2.0 * PI / m.fringe_period();
    let k = omega / (2.0 * m.generator_scale());
    a * a * k * k
}

/// Quick estimate `A²S` (cut model) or `N_eff ≈ A²N` (fringe model),
/// exact for `φ = π/2` as `θ₂ → θ₁ = 0`. Marked approximate.
pub fn shortcut_a2s<M: ParityModel>(model: &M) -> Result<BoundResult> {
    let v = shortcut_value(model);
    let (interval, warning) = delta_interval(model, v, shortcut_value);
    let mut prov = model_provenance("shortcut_a2s", model);
    prov.warnings.extend(warning);
    let mut r = BoundResult::new(BoundMethod::ShortcutA2S, v, model.normalization(), interval, prov);
    r.approximate = true;
    Ok(r)
}
