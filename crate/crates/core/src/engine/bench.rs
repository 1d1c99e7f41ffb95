use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{color_graph, EngineConfig, EngineError, LevelStats};
use crate::gen::{self, Family};
use crate::lists::{ListAssignment, ListMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    /// Requested vertex count.
    pub target: usize,
    pub n: usize,
    pub seconds: f64,
    pub depth: usize,
    /// Largest shrink ratio over non-terminal levels.
    pub worst_shrink: f64,
    pub levels: Vec<LevelStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub family: Family,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `ln t` against `ln n`.
    pub exponent: Option<f64>,
    pub insufficient_data: bool,
}

/// Times `color_graph` on one instance per size; sizes are vertex counts.
pub fn bench_scaling(family: Family, sizes: &[usize], cfg: &EngineConfig) -> Result<ScalingReport, EngineError> {
    let mut points = Vec::new();
    for (i, &target) in sizes.iter().enumerate() {
        let graph = gen::generate_graph(family, family.size_for_vertices(target), i as u64);
        let lists = ListAssignment::generate(graph.n(), family.girth_class(), ListMode::Random, i as u64);
        let started = Instant::now();
        let run = color_graph(&graph, &lists, cfg)?;
        let seconds = started.elapsed().as_secs_f64();
        if run.coloring.is_none() {
            return Err(EngineError::InvariantViolation(format!(
                "no coloring found for {} n = {}",
                family.name(),
                graph.n()
            )));
        }
        let worst_shrink = run
            .stats
            .iter()
            .filter(|s| !s.terminal)
            .map(|s| *s.shrink_ratio.numer() as f64 / *s.shrink_ratio.denom() as f64)
            .fold(0.0, f64::max);
        points.push(ScalingPoint {
            target,
            n: graph.n(),
            seconds,
            depth: run.stats.len(),
            worst_shrink,
            levels: run.stats,
        });
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.seconds)).collect();
    let exponent = fit_power_law(&xy);
    Ok(ScalingReport { family, points, insufficient_data: exponent.is_none(), exponent })
}

/// Slope of the least-squares line through `(ln x, ln y)`; `None` with
/// fewer than two distinct `x` or a non-positive value.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    linear_fit(&logs).map(|(_, slope, _)| slope)
}

/// Least-squares `y = a + b·x` with the coefficient of determination.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if points.len() < 2 || sxx <= f64::EPSILON {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy <= f64::EPSILON { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((a, b, r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_known_exponents() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.5))).collect();
        assert!((fit_power_law(&pts).unwrap() - 1.5).abs() < 1e-9);
        let (a, b, r2) = linear_fit(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let cfg = EngineConfig::default();
        let empty = bench_scaling(Family::TriGrid, &[], &cfg).unwrap();
        assert!(empty.points.is_empty() && empty.insufficient_data);
        let one = bench_scaling(Family::TriGrid, &[100], &cfg).unwrap();
        assert_eq!(one.points.len(), 1);
        assert!(one.insufficient_data && one.exponent.is_none());
    }
}
