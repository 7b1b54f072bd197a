use crate::error::Result;
use crate::exec::{map_ordered, Execution};
use crate::hho::{Bounds, HarrisHawks, HhoConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// `Σ x²`; minimum 0 at the origin.
pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `10·D + Σ (x² − 10 cos 2πx)`; minimum 0 at the origin.
pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (TAU * v).cos()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    Sphere,
    Rastrigin,
}

impl TestFunction {
    pub fn half_width(&self) -> f64 {
        match self {
            TestFunction::Sphere => 100.0,
            TestFunction::Rastrigin => 5.12,
        }
    }

    /// Minimization form.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Sphere => sphere(x),
            TestFunction::Rastrigin => rastrigin(x),
        }
    }

    pub fn optimum(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SanityConfig {
    pub dim: usize,
    pub q: usize,
    pub t: usize,
    pub seeds: Vec<u64>,
    pub functions: Vec<TestFunction>,
    pub execution: Execution,
}

impl Default for SanityConfig {
    fn default() -> Self {
        Self {
            dim: 30,
            q: 30,
            t: 500,
            seeds: (0..20).collect(),
            functions: vec![TestFunction::Sphere, TestFunction::Rastrigin],
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SanityRow {
    pub function: TestFunction,
    pub seed: u64,
    /// Best value of the maximized (negated) objective.
    pub best_fitness: f64,
    /// `|best − optimum|` in the original minimization scale.
    pub gap: f64,
    pub evaluations: usize,
    pub trace_monotone: bool,
}

#[derive(Debug, Clone)]
pub struct SanityReport {
    pub rows: Vec<SanityRow>,
}

impl SanityReport {
    /// Fraction of runs of `function` whose gap is below `tol`.
    pub fn success_rate(&self, function: TestFunction, tol: f64) -> f64 {
        let runs: Vec<&SanityRow> = self.rows.iter().filter(|r| r.function == function).collect();
        runs.iter().filter(|r| r.gap < tol).count() as f64 / runs.len().max(1) as f64
    }

    pub fn all_monotone(&self) -> bool {
        self.rows.iter().all(|r| r.trace_monotone)
    }
}

/// Maximizes the negated test functions from random starts.
pub fn hho_sanity(config: &SanityConfig) -> Result<SanityReport> {
    let cases: Vec<(TestFunction, u64)> = config
        .functions
        .iter()
        .flat_map(|&f| config.seeds.iter().map(move |&s| (f, s)))
        .collect();
    let rows = map_ordered(config.execution, &cases, |_, &(f, seed)| -> Result<SanityRow> {
        let bounds = Bounds::uniform(config.dim, -f.half_width(), f.half_width())?;
        let hho = HarrisHawks::new(
            HhoConfig::new(config.q, config.t, bounds)
                .with_seed(seed)
                .with_execution(Execution::Sequential),
        )?;
        let objective = |x: &[f64]| -f.value(x);
        let r = hho.optimize(&objective, &[])?;
        Ok(SanityRow {
            function: f,
            seed,
            best_fitness: r.best_fitness,
            gap: (-r.best_fitness - f.optimum()).abs(),
            evaluations: r.evaluations,
            trace_monotone: r.trace.windows(2).all(|w| w[1] >= w[0]),
        })
    });
    Ok(SanityReport {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_optima() {
        assert_eq!(sphere(&[0.0; 30]), 0.0);
        assert_eq!(rastrigin(&[0.0; 30]), 0.0);
        assert!(rastrigin(&[1.0, 0.0]) > 0.0);
        assert_eq!(sphere(&[3.0, 4.0]), 25.0);
    }
}
