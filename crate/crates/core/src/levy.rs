//! Zero-mean two-sided Lévy drivers of compound-Poisson type.
//!
//! Jumps are generated in continuous time by exponential inter-arrival gaps,
//! forward from 0 on one random stream and backward from 0 on an independent
//! one. A grid path then aggregates the arrivals cell by cell, so each cell
//! increment is a Poisson(θ·dt) sum of jump draws minus the compensator
//! θ·E[J]·dt. Arrival sequences are prefix-stable: widening the horizon never
//! changes arrivals already generated, which couples runs at different
//! resolutions and windows drawn from the same seed.

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;

use crate::error::{invalid, FlevyError, Result};
use crate::path::SamplePath;

/// Default cap on the number of grid nodes a single path may allocate.
pub const DEFAULT_MAX_NODES: usize = 40_000_000;

const FORWARD_SALT: u64 = 0x6a09_e667_f3bc_c908;
const BACKWARD_SALT: u64 = 0xbb67_ae85_84ca_a73b;

/// SplitMix64 finaliser, used to derive stream and replicate seeds.
pub fn mix_seed(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replicate `index` under `master`.
pub fn replicate_seed(master: u64, index: u64) -> u64 {
    mix_seed(mix_seed(master) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

#[derive(Debug, Clone, PartialEq)]
pub enum DriverKind {
    /// Poisson process with unit jumps, compensated.
    CompensatedPoisson { intensity: f64 },
    /// Compound Poisson process with a discrete jump law, compensated.
    CompoundPoissonCompensated { intensity: f64, jumps: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevyDriverSpec {
    pub kind: DriverKind,
    pub seed: u64,
}

/// A jump of the driver at a continuous time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub time: f64,
    pub size: f64,
}

impl LevyDriverSpec {
    pub fn compensated_poisson(intensity: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            kind: DriverKind::CompensatedPoisson { intensity },
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn compound_poisson(intensity: f64, jumps: Vec<(f64, f64)>, seed: u64) -> Result<Self> {
        let spec = Self {
            kind: DriverKind::CompoundPoissonCompensated { intensity, jumps },
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            kind: self.kind.clone(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let theta = self.intensity();
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(invalid("intensity", format!("must be positive and finite, got {theta}")));
        }
        if let DriverKind::CompoundPoissonCompensated { jumps, .. } = &self.kind {
            if jumps.is_empty() {
                return Err(invalid("jumps", "jump law has no atoms"));
            }
            if jumps.iter().any(|&(x, p)| !x.is_finite() || !(p >= 0.0) || !p.is_finite()) {
                return Err(invalid("jumps", "atoms must be finite with non-negative probabilities"));
            }
            let total: f64 = jumps.iter().map(|j| j.1).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(invalid("jumps", format!("probabilities sum to {total}, not 1")));
            }
        }
        if !(self.jump_second_moment() > 0.0) {
            return Err(invalid("jumps", "second moment of the jump law must be positive"));
        }
        Ok(())
    }

    pub fn intensity(&self) -> f64 {
        match &self.kind {
            DriverKind::CompensatedPoisson { intensity } => *intensity,
            DriverKind::CompoundPoissonCompensated { intensity, .. } => *intensity,
        }
    }

    fn atoms(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            DriverKind::CompensatedPoisson { .. } => vec![(1.0, 1.0)],
            DriverKind::CompoundPoissonCompensated { jumps, .. } => jumps.clone(),
        }
    }

    pub fn mean_jump(&self) -> f64 {
        self.atoms().iter().map(|&(x, p)| x * p).sum()
    }

    pub fn jump_second_moment(&self) -> f64 {
        self.atoms().iter().map(|&(x, p)| x * x * p).sum()
    }

    /// Drift removed per unit time, θ·E[J].
    pub fn compensator_rate(&self) -> f64 {
        self.intensity() * self.mean_jump()
    }

    /// E[L(1)²] = θ·E[J²].
    pub fn second_moment(&self) -> f64 {
        self.intensity() * self.jump_second_moment()
    }

    /// Characteristic exponent ψ_L(u) = θ Σ p_j (e^{iux_j} − 1 − iux_j).
    pub fn psi(&self, u: f64) -> Complex64 {
        let theta = self.intensity();
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, p) in self.atoms() {
            acc += p * exp_i_minus_linear(u * x);
        }
        acc * theta
    }

    /// Arrivals in `[t_min, t_max]`, sorted by time.
    pub fn arrivals(&self, t_min: f64, t_max: f64) -> Vec<Arrival> {
        let mut sampler = ArrivalSampler::new(self);
        let mut backward = sampler.backward_until(t_min);
        backward.reverse();
        backward.extend(sampler.forward_until(t_max));
        backward
    }
}

/// e^{iz} − 1 − iz without cancellation for small |z|.
pub fn exp_i_minus_linear(z: f64) -> Complex64 {
    let half = (0.5 * z).sin();
    let re = -2.0 * half * half;
    let im = if z.abs() < 1e-2 {
        let z2 = z * z;
        -z * z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0))
    } else {
        z.sin() - z
    };
    Complex64::new(re, im)
}

/// Draws arrivals on both half-lines from independent streams.
struct ArrivalSampler {
    gap: Exp<f64>,
    jump_values: Vec<f64>,
    jump_index: Option<WeightedIndex<f64>>,
    forward: ChaCha8Rng,
    backward: ChaCha8Rng,
}

impl ArrivalSampler {
    fn new(spec: &LevyDriverSpec) -> Self {
        let atoms = spec.atoms();
        let jump_index = if atoms.len() > 1 {
            Some(WeightedIndex::new(atoms.iter().map(|a| a.1)).expect("validated jump law"))
        } else {
            None
        };
        Self {
            gap: Exp::new(spec.intensity()).expect("validated intensity"),
            jump_values: atoms.iter().map(|a| a.0).collect(),
            jump_index,
            forward: ChaCha8Rng::seed_from_u64(mix_seed(spec.seed ^ FORWARD_SALT)),
            backward: ChaCha8Rng::seed_from_u64(mix_seed(spec.seed ^ BACKWARD_SALT)),
        }
    }

    fn draw<R: Rng>(gap: &Exp<f64>, values: &[f64], index: &Option<WeightedIndex<f64>>, rng: &mut R) -> (f64, f64) {
        let g = gap.sample(rng);
        let size = match index {
            Some(w) => values[w.sample(rng)],
            None => values[0],
        };
        (g, size)
    }

    fn forward_until(&mut self, t_max: f64) -> Vec<Arrival> {
        let mut out = Vec::new();
        let mut t = 0.0;
        loop {
            let (g, size) = Self::draw(&self.gap, &self.jump_values, &self.jump_index, &mut self.forward);
            t += g;
            if t > t_max {
                return out;
            }
            out.push(Arrival { time: t, size });
        }
    }

    fn backward_until(&mut self, t_min: f64) -> Vec<Arrival> {
        let mut out = Vec::new();
        let mut t = 0.0;
        loop {
            let (g, size) = Self::draw(&self.gap, &self.jump_values, &self.jump_index, &mut self.backward);
            t -= g;
            if t < t_min {
                return out;
            }
            out.push(Arrival { time: t, size });
        }
    }
}

/// Grid cell (of width `1/resolution`) that contains time `t`.
#[inline]
pub fn cell_of(t: f64, resolution: f64) -> i64 {
    (t * resolution).floor() as i64
}

/// Integer node range `[k_lo, k_hi]` of the grid `k·dt` covering `[t_min, t_max]`.
pub(crate) fn covering_nodes(t_min: f64, t_max: f64, dt: f64) -> (i64, i64) {
    let lo = (t_min / dt + 1e-9).floor() as i64;
    let hi = (t_max / dt - 1e-9).ceil() as i64;
    (lo, hi)
}

/// Two-sided driver path on the grid `k·dt` covering `[t_min, t_max]`, with
/// value exactly 0 at the node `t = 0`.
pub fn sample_two_sided_levy(spec: &LevyDriverSpec, t_min: f64, t_max: f64, dt: f64) -> Result<SamplePath> {
    sample_two_sided_levy_capped(spec, t_min, t_max, dt, DEFAULT_MAX_NODES)
}

pub fn sample_two_sided_levy_capped(
    spec: &LevyDriverSpec,
    t_min: f64,
    t_max: f64,
    dt: f64,
    max_nodes: usize,
) -> Result<SamplePath> {
    spec.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(t_min < 0.0) || !(t_max > 0.0) {
        return Err(invalid("horizon", format!("need t_min < 0 < t_max, got [{t_min}, {t_max}]")));
    }
    let nodes = ((t_max - t_min) / dt).ceil() + 3.0;
    if !nodes.is_finite() || nodes > max_nodes as f64 {
        return Err(FlevyError::GridTooLarge {
            nodes: if nodes.is_finite() { nodes as usize } else { usize::MAX },
            cap: max_nodes,
        });
    }
    let (k_lo, k_hi) = covering_nodes(t_min, t_max, dt);
    let len = (k_hi - k_lo + 1) as usize;
    let origin = (-k_lo) as usize;
    let resolution = 1.0 / dt;

    // jump mass per cell, cell k at index k - k_lo
    let mut jumps = vec![0.0; len - 1];
    for a in spec.arrivals(k_lo as f64 * dt, k_hi as f64 * dt) {
        let k = cell_of(a.time, resolution).clamp(k_lo, k_hi - 1);
        jumps[(k - k_lo) as usize] += a.size;
    }
    let drift = spec.compensator_rate();
    let mut values = vec![0.0; len];
    let mut acc = 0.0;
    for i in origin..len - 1 {
        acc += jumps[i];
        let steps = (i + 1 - origin) as f64;
        values[i + 1] = acc - drift * steps * dt;
    }
    acc = 0.0;
    for i in (0..origin).rev() {
        acc += jumps[i];
        let steps = (origin - i) as f64;
        values[i] = -(acc - drift * steps * dt);
    }
    SamplePath::new(k_lo as f64 * dt, dt, values)
}
