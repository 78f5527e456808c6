use std::sync::Arc;

use super::SimpleFunction;
use crate::error::Result;
use crate::geometry::{dyadic_inner_runs, Polytope};

/// Which indices a probe should visit up to `k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// `1, 2, ..., k_max`.
    Consecutive,
    /// `1, 2, 4, ..., <= k_max`.
    Doubling,
}

type Generator = dyn Fn(usize) -> Result<SimpleFunction> + Send + Sync;

/// `h_k -> h`, with terms produced on demand.
#[derive(Clone)]
pub struct FunctionSequence {
    label: String,
    generator: Arc<Generator>,
    limit: SimpleFunction,
    schedule: Schedule,
}

impl std::fmt::Debug for FunctionSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctionSequence")
            .field("label", &self.label)
            .field("schedule", &self.schedule)
            .finish_non_exhaustive()
    }
}

impl FunctionSequence {
    pub fn new<F>(label: &str, generator: F, limit: SimpleFunction, schedule: Schedule) -> Self
    where
        F: Fn(usize) -> Result<SimpleFunction> + Send + Sync + 'static,
    {
        FunctionSequence {
            label: label.to_string(),
            generator: Arc::new(generator),
            limit,
            schedule,
        }
    }

    /// `h_k = (alpha + 1/k) 1_P`.
    pub fn coefficient(alpha: f64, p: Polytope) -> Self {
        let support = Arc::new(p);
        let limit = SimpleFunction::indicator(alpha, (*support).clone());
        let s = support.clone();
        Self::new(
            "coefficient",
            move |k| Ok(SimpleFunction::indicator(alpha + 1.0 / k as f64, (*s).clone())),
            limit,
            Schedule::Doubling,
        )
    }

    /// `h_k = alpha 1_{C_k}` with `C_k` the dyadic inner cells of width `2^-k`.
    pub fn inner_cubes(alpha: f64, p: Polytope) -> Self {
        let n = p.dim();
        let limit = SimpleFunction::indicator(alpha, p.clone());
        Self::new(
            "inner_cubes",
            move |k| {
                let approx = dyadic_inner_runs(&p, 0.5f64.powi(k as i32))?;
                Ok(SimpleFunction::from_boxes(alpha, n, &approx.runs))
            },
            limit,
            Schedule::Consecutive,
        )
    }

    /// `h_k = h` for every `k`.
    pub fn constant(h: SimpleFunction) -> Self {
        let term = h.clone();
        Self::new("constant", move |_| Ok(term.clone()), h, Schedule::Consecutive)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn limit(&self) -> &SimpleFunction {
        &self.limit
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn term(&self, k: usize) -> Result<SimpleFunction> {
        (self.generator)(k)
    }

    /// `||h_k - h||_{L^p(mu_n)}`.
    pub fn distance(&self, k: usize, p: f64) -> Result<f64> {
        self.term(k)?.lp_distance(&self.limit, p)
    }

    pub fn indices(&self, k_max: usize) -> Vec<usize> {
        match self.schedule {
            Schedule::Consecutive => (1..=k_max).collect(),
            Schedule::Doubling => std::iter::successors(Some(1usize), |k| k.checked_mul(2))
                .take_while(|&k| k <= k_max)
                .collect(),
        }
    }
}
