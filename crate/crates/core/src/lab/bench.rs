//! Wall-time scaling of the solver over a family of growing instances.

use std::time::Instant;

use serde::Serialize;

use super::generate::{gen_msp, GenShape};
use super::LabError;
use crate::zh::{zh_solve, Answer, SolveOptions};

#[derive(Clone, Debug, Serialize)]
pub struct ScalingPoint {
    pub width: usize,
    /// Mean edge count over the repetitions.
    pub edges: f64,
    /// Median solve time in seconds.
    pub seconds: f64,
    pub max_sweeps: usize,
    pub yes: usize,
    pub runs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub stages: usize,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of log(seconds) against log(edges).
    pub slope: f64,
    /// Every run finished within its sweep bound.
    pub within_bound: bool,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Solves `reps` instances per width, all inner stages of that width, every
/// candidate edge present and labels drawn with `eset_density`.
pub fn scaling_family(
    stages: usize,
    widths: &[usize],
    eset_density: f64,
    reps: usize,
    seed: u64,
) -> Result<ScalingReport, LabError> {
    if widths.len() < 2 || reps == 0 {
        return Err(LabError::Shape("need two widths and one repetition".into()));
    }
    let mut within_bound = true;
    let mut points = Vec::new();
    for &w in widths {
        let mut times = Vec::with_capacity(reps);
        let mut edges = 0usize;
        let mut max_sweeps = 0;
        let mut yes = 0;
        for r in 0..reps {
            let mut ws = vec![w; stages + 1];
            ws[0] = 1;
            ws[stages] = 1;
            let g = gen_msp(&GenShape {
                stages,
                widths: ws,
                edge_density: 1.0,
                eset_density,
                seed: seed.wrapping_add(r as u64),
            })?;
            edges += g.edge_count();
            let t = Instant::now();
            let res = zh_solve(&g, SolveOptions::default()).map_err(|source| LabError::Solver { seed, source })?;
            times.push(t.elapsed().as_secs_f64());
            within_bound &= res.metrics.outer_sweeps <= res.metrics.sweep_bound;
            max_sweeps = max_sweeps.max(res.metrics.outer_sweeps);
            yes += (res.answer == Answer::Yes) as usize;
        }
        times.sort_by(f64::total_cmp);
        points.push(ScalingPoint {
            width: w,
            edges: edges as f64 / reps as f64,
            seconds: times[reps / 2].max(1e-9),
            max_sweeps,
            yes,
            runs: reps,
        });
    }
    let slope = log_log_slope(&points.iter().map(|p| (p.edges, p.seconds)).collect::<Vec<_>>());
    Ok(ScalingReport {
        stages,
        points,
        slope,
        within_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|x| (x as f64, 3.0 * (x as f64).powi(3))).collect();
        assert!((log_log_slope(&pts) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn small_family_runs() {
        let r = scaling_family(4, &[1, 2, 3], 0.5, 2, 9).unwrap();
        assert_eq!(r.points.len(), 3);
        assert!(r.within_bound);
        assert!(r.points[0].edges < r.points[2].edges);
        assert!(r.slope.is_finite());
    }
}
