//! Derivative-free box-constrained minimization: a coarse parallel grid scan
//! followed by Nelder–Mead refinement with clamping to the box.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Grid points per axis used by [`minimize_boxed`] when the budget allows.
pub const GRID_PER_AXIS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop when the spread of simplex values is below `ftol · (|f_best| + ftol)`…
    pub ftol: f64,
    /// …and the simplex diameter (per axis, relative to the box) below `xtol`.
    pub xtol: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            ftol: 1e-8,
            xtol: 1e-10,
            max_evaluations: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Tolerances met before the evaluation budget ran out.
    pub converged: bool,
}

fn validate_bounds(bounds: &[(f64, f64)]) -> Result<()> {
    for (k, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParameter(format!(
                "bounds for parameter {k} must be finite with lo <= hi, got [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

fn clamp(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(lo, hi);
    }
}

/// NaN counts as worse than anything.
fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Nelder–Mead from `x0` with initial edge lengths `step`. Trial points are
/// clamped into `bounds`; axes with zero width stay fixed.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    bounds: &[(f64, f64)],
    step: &[f64],
    opts: NelderMeadOptions,
) -> Result<Optimum> {
    validate_bounds(bounds)?;
    if x0.len() != bounds.len() || step.len() != bounds.len() {
        return Err(Error::DimensionMismatch {
            context: "nelder_mead",
            expected: bounds.len(),
            found: x0.len().max(step.len()),
        });
    }
    let free: Vec<usize> = (0..bounds.len())
        .filter(|&k| bounds[k].1 > bounds[k].0)
        .collect();
    let mut start = x0.to_vec();
    clamp(&mut start, bounds);
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], n: &mut usize| {
        *n += 1;
        sanitize(f(x))
    };

    let f0 = eval(&start, &mut evaluations);
    if free.is_empty() {
        return Ok(Optimum {
            x: start,
            value: f0,
            evaluations,
            converged: true,
        });
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.clone(), f0)];
    for &k in &free {
        let mut v = start.clone();
        let (lo, hi) = bounds[k];
        // Step inward if the start sits on the upper bound.
        v[k] = if v[k] + step[k] <= hi { v[k] + step[k] } else { v[k] - step[k] };
        v[k] = v[k].clamp(lo, hi);
        let fv = eval(&v, &mut evaluations);
        simplex.push((v, fv));
    }

    let widths: Vec<f64> = bounds.iter().map(|&(lo, hi)| hi - lo).collect();
    let n = free.len();
    let mut converged = false;
    // One iteration costs at most n + 2 evaluations (reflect, contract, shrink).
    while evaluations + n + 2 <= opts.max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = if worst.is_finite() { worst - best } else { f64::INFINITY };
        let diameter = free
            .iter()
            .map(|&k| {
                simplex
                    .iter()
                    .map(|(v, _)| (v[k] - simplex[0].0[k]).abs() / widths[k])
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.ftol * (best.abs() + opts.ftol) && diameter <= opts.xtol.max(opts.ftol) {
            converged = true;
            break;
        }
        if diameter <= opts.xtol {
            converged = spread.is_finite();
            break;
        }

        let mut centroid = vec![0.0; bounds.len()];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect();
            clamp(&mut p, bounds);
            p
        };

        let reflected = along(-1.0);
        let fr = eval(&reflected, &mut evaluations);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = eval(&expanded, &mut evaluations);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[n].1 {
            let c = along(-0.5);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        } else {
            let c = along(0.5);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (contracted, fc);
            continue;
        }
        // Shrink towards the best vertex.
        let best_x = simplex[0].0.clone();
        for (v, fv) in simplex.iter_mut().skip(1) {
            for (x, b) in v.iter_mut().zip(&best_x) {
                *x = b + 0.5 * (*x - b);
            }
            *fv = eval(v, &mut evaluations);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Ok(Optimum {
        x,
        value,
        evaluations,
        converged,
    })
}

/// Regular grid over the box with `per_axis` points on each non-degenerate
/// axis (endpoints included), evaluated in parallel.
pub fn grid_scan<F>(f: &F, bounds: &[(f64, f64)], per_axis: usize) -> Result<Vec<(Vec<f64>, f64)>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    validate_bounds(bounds)?;
    if per_axis < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points per axis".into()));
    }
    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| {
            if hi > lo {
                (0..per_axis)
                    .map(|i| lo + (hi - lo) * i as f64 / (per_axis - 1) as f64)
                    .collect()
            } else {
                vec![lo]
            }
        })
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            axes.iter()
                .map(|axis| {
                    let v = axis[idx % axis.len()];
                    idx /= axis.len();
                    v
                })
                .collect()
        })
        .collect();
    Ok(points
        .into_par_iter()
        .map(|p| {
            let v = sanitize(f(&p));
            (p, v)
        })
        .collect())
}

/// Grid scan (up to [`GRID_PER_AXIS`] points per axis, fewer when the grid
/// would exceed half the budget) seeding a Nelder–Mead refinement. Only a
/// local optimum is guaranteed.
pub fn minimize_boxed<F>(f: &F, bounds: &[(f64, f64)], budget: usize, ftol: f64) -> Result<Optimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if budget < 100 {
        return Err(Error::InvalidParameter(format!(
            "evaluation budget must be at least 100, got {budget}"
        )));
    }
    validate_bounds(bounds)?;
    let free = bounds.iter().filter(|(lo, hi)| hi > lo).count();
    let mut per_axis = GRID_PER_AXIS;
    while per_axis > 2 && per_axis.pow(free as u32) > budget / 2 {
        per_axis -= 1;
    }
    let grid = grid_scan(f, bounds, per_axis)?;
    let spent = grid.len();
    let (seed, seed_value) = grid
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is non-empty");
    if !seed_value.is_finite() {
        return Err(Error::AllDivergent);
    }
    let step: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (per_axis - 1) as f64)
        .collect();
    let opts = NelderMeadOptions {
        ftol,
        max_evaluations: budget.saturating_sub(spent).max(1),
        ..NelderMeadOptions::default()
    };
    let mut refined = nelder_mead(f, &seed, bounds, &step, opts)?;
    refined.evaluations += spent;
    Ok(refined)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_vertex_1d() {
        let f = |x: &[f64]| (x[0] - 0.3721).powi(2) + 2.0;
        let r = minimize_boxed(&f, &[(-3.0, 5.0)], 500, 1e-8).unwrap();
        assert!((r.x[0] - 0.3721).abs() < 1e-6, "{:?}", r);
        assert!(r.converged);
    }

    #[test]
    fn rosenbrock_2d() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize_boxed(&f, &[(-2.0, 2.0), (-1.0, 3.0)], 5000, 1e-12).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r);
    }

    #[test]
    fn minimum_on_boundary_is_exact() {
        let f = |x: &[f64]| -x[0] + 0.1 * (x[1] - 0.5).powi(2);
        let r = minimize_boxed(&f, &[(0.0, 2.0), (0.0, 1.0)], 1000, 1e-10).unwrap();
        assert_eq!(r.x[0], 2.0);
        assert!((r.x[1] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn degenerate_axes_stay_fixed() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + x[1];
        let r = minimize_boxed(&f, &[(-2.0, 2.0), (0.7, 0.7)], 200, 1e-10).unwrap();
        assert_eq!(r.x[1], 0.7);
        assert!((r.x[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn all_divergent_is_reported() {
        let f = |_: &[f64]| f64::INFINITY;
        assert!(matches!(
            minimize_boxed(&f, &[(0.0, 1.0)], 100, 1e-8),
            Err(Error::AllDivergent)
        ));
        assert!(minimize_boxed(&f, &[(0.0, 1.0)], 99, 1e-8).is_err());
    }

    #[test]
    fn grid_includes_corners() {
        let f = |x: &[f64]| x[0] + x[1];
        let g = grid_scan(&f, &[(0.0, 1.0), (2.0, 3.0)], 8).unwrap();
        assert_eq!(g.len(), 64);
        assert!(g.iter().any(|(p, _)| p == &vec![1.0, 3.0]));
        assert!(g.iter().any(|(p, _)| p == &vec![0.0, 2.0]));
    }

    #[test]
    fn budget_limits_grid() {
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let f = |x: &[f64]| {
            calls.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            x.iter().map(|v| v * v).sum::<f64>()
        };
        let r = minimize_boxed(&f, &[(-1.0, 1.0); 4], 300, 1e-8).unwrap();
        assert!(r.evaluations <= 300);
        assert_eq!(r.evaluations, calls.load(std::sync::atomic::Ordering::Relaxed));
    }
}
