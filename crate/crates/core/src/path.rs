use crate::error::{invalid, FlevyError, Result};

/// A real-valued path sampled on a uniform grid.
///
/// Node `i` sits at time `t0 + i * dt`; times are never stored per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
}

/// Integrands and integrators of the grid calculus share the path carrier.
pub type GridFunction = SamplePath;

impl SamplePath {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !t0.is_finite() {
            return Err(invalid("t0", "must be finite"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid("dt", format!("must be positive and finite, got {dt}")));
        }
        if values.len() < 2 {
            return Err(invalid("values", "a path needs at least two nodes"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid("values", format!("non-finite value at node {i}")));
        }
        Ok(Self { t0, dt, values })
    }

    /// Samples `f` at the nodes `t0 + i * dt`, `i < len`.
    pub fn from_fn(t0: f64, dt: f64, len: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..len).map(|i| f(t0 + i as f64 * dt)).collect();
        Self::new(t0, dt, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.len() - 1]
    }

    /// Index of the node at time `t`, if `t` lies on the grid (to 1e-9 of a step).
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let x = (t - self.t0) / self.dt;
        let k = x.round();
        if (x - k).abs() > 1e-9 || k < 0.0 || k as usize >= self.len() {
            return None;
        }
        Some(k as usize)
    }

    pub fn require_node(&self, t: f64) -> Result<usize> {
        self.node_index(t).ok_or(FlevyError::OffGrid { time: t })
    }

    /// Value at grid time `t`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.require_node(t).map(|i| self.values[i])
    }

    pub fn same_grid(&self, other: &SamplePath) -> bool {
        self.len() == other.len()
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt
            && (self.t0 - other.t0).abs() <= 1e-9 * self.dt
    }

    pub fn require_same_grid(&self, other: &SamplePath) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(FlevyError::GridMismatch(format!(
                "(t0={}, dt={}, len={}) vs (t0={}, dt={}, len={})",
                self.t0,
                self.dt,
                self.len(),
                other.t0,
                other.dt,
                other.len()
            )))
        }
    }

    /// Nodes `i` with `from <= i < to` as a new path.
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if to > self.len() || from + 2 > to {
            return Err(invalid("slice", format!("bad node range {from}..{to} of {}", self.len())));
        }
        Self::new(self.time(from), self.dt, self.values[from..to].to_vec())
    }

    /// The sub-path on the grid times `[t_from, t_to]`.
    pub fn restrict(&self, t_from: f64, t_to: f64) -> Result<Self> {
        let a = self.require_node(t_from)?;
        let b = self.require_node(t_to)?;
        self.slice(a, b + 1)
    }

    /// Every `factor`-th node, starting with the first.
    pub fn subsample(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(invalid("factor", "must be positive"));
        }
        let values: Vec<f64> = self.values.iter().copied().step_by(factor).collect();
        Self::new(self.t0, self.dt * factor as f64, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.t0, self.dt, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Forward differences `x[i+1] - x[i]`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Index<usize> for SamplePath {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}
