//! Globally adaptive Gauss-Legendre quadrature.
//!
//! Each subinterval carries a 15-point rule on the whole interval and on its
//! two halves; the halves' sum is the estimate and the difference is the error
//! bound. The interval with the largest error is bisected until the total
//! error meets the tolerance. Nodes are never placed on interval endpoints, so
//! integrable endpoint singularities are handled by bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{FlevyError, Result};

const RULE_POINTS: usize = 15;

fn legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = RULE_POINTS;
        let mut rule = Vec::with_capacity(n);
        for i in 1..=n {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        rule
    })
}

fn apply_rule<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    legendre_rule().iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Segment {
    fn new<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64) -> Self {
        let m = 0.5 * (a + b);
        let left = apply_rule(f, a, m);
        let right = apply_rule(f, m, b);
        let error = (left + right - whole).abs();
        Segment {
            a,
            b,
            left,
            right,
            error,
        }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }

    fn splittable(&self) -> bool {
        let m = 0.5 * (self.a + self.b);
        let width = self.b - self.a;
        m > self.a && m < self.b && width > 64.0 * f64::EPSILON * self.a.abs().max(self.b.abs())
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadEstimate> {
    if a == b {
        return Ok(QuadEstimate {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if b < a {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadEstimate { value: -r.value, ..r });
    }
    let whole = apply_rule(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment::new(&mut f, a, b, whole));
    // Segments that cannot be bisected further keep their error but leave the heap.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut count = 1;
    loop {
        let (value, error) = heap
            .iter()
            .fold((frozen_value, frozen_error), |(v, e), s| (v + s.value(), e + s.error));
        if !value.is_finite() {
            return Err(FlevyError::Quadrature {
                value,
                error,
                intervals: count,
            });
        }
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target || heap.is_empty() {
            return Ok(QuadEstimate {
                value,
                error,
                intervals: count,
            });
        }
        if count >= opts.max_intervals {
            return Err(FlevyError::Quadrature {
                value,
                error,
                intervals: count,
            });
        }
        let seg = heap.pop().expect("heap is non-empty");
        if !seg.splittable() {
            frozen_value += seg.value();
            frozen_error += seg.error;
            continue;
        }
        let m = 0.5 * (seg.a + seg.b);
        heap.push(Segment::new(&mut f, seg.a, m, seg.left));
        heap.push(Segment::new(&mut f, m, seg.b, seg.right));
        count += 1;
    }
}

/// Integral of `f` over `[a, ∞)` through the map `t = a + (1 - s) / s`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, opts: QuadOptions) -> Result<QuadEstimate> {
    integrate(
        |s| {
            let t = a + (1.0 - s) / s;
            let v = f(t);
            if v == 0.0 {
                0.0
            } else {
                v / (s * s)
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Integral over `[a, b]` split at the given interior points; tolerances are
/// shared evenly between pieces.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<QuadEstimate> {
    let mut points = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(b);
    let pieces = (points.len() - 1) as f64;
    let piece_opts = QuadOptions {
        abs_tol: opts.abs_tol / pieces,
        ..opts
    };
    let mut total = QuadEstimate {
        value: 0.0,
        error: 0.0,
        intervals: 0,
    };
    for w in points.windows(2) {
        let r = integrate(&mut f, w[0], w[1], piece_opts)?;
        total.value += r.value;
        total.error += r.error;
        total.intervals += r.intervals;
    }
    Ok(total)
}
