//! Streaming moment accumulators.
//!
//! Sums are taken around a fixed shift chosen before accumulation (the first
//! observation), so two accumulators with the same shift merge by adding
//! their sums. Central moments come out by the binomial expansion.

use crate::special::CompensatedSum;

const ORDER: usize = 6;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    shift: f64,
    count: u64,
    sums: [CompensatedSum; ORDER + 1],
}

impl Moments {
    pub fn new(shift: f64) -> Self {
        Self {
            shift,
            count: 0,
            sums: Default::default(),
        }
    }

    pub fn push(&mut self, x: f64) {
        let u = x - self.shift;
        let mut p = 1.0;
        for s in self.sums.iter_mut() {
            s.add(p);
            p *= u;
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Moments) {
        assert_eq!(self.shift, other.shift, "accumulators must share a shift");
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.add(b.value());
        }
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    fn raw(&self, k: usize) -> f64 {
        self.sums[k].value() / self.count as f64
    }

    pub fn mean(&self) -> f64 {
        self.shift + self.raw(1)
    }

    /// Population central moment of order `p` (divisor `M`).
    pub fn central(&self, p: usize) -> f64 {
        assert!(p <= ORDER);
        let m1 = self.raw(1);
        (0..=p)
            .map(|k| binomial(p, k) * self.raw(k) * (-m1).powi((p - k) as i32))
            .sum()
    }

    /// Sample variance with divisor `M − 1`.
    pub fn variance(&self) -> f64 {
        let n = self.count as f64;
        self.central(2) * n / (n - 1.0)
    }

    pub fn mean_se(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    pub fn variance_se(&self) -> f64 {
        let m2 = self.central(2);
        ((self.central(4) - m2 * m2).max(0.0) / self.count as f64).sqrt()
    }

    pub fn third_se(&self) -> f64 {
        let (m2, m3, m4, m6) = (self.central(2), self.central(3), self.central(4), self.central(6));
        ((m6 - m3 * m3 - 6.0 * m4 * m2 + 9.0 * m2 * m2 * m2).max(0.0) / self.count as f64).sqrt()
    }

    pub fn skewness(&self) -> f64 {
        self.central(3) / self.central(2).powf(1.5)
    }
}

/// Co-moments `Σ u^a v^b`, `a, b ≤ 2`, of a pair around fixed shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct CoMoments {
    shift: (f64, f64),
    count: u64,
    sums: [[CompensatedSum; 3]; 3],
}

impl CoMoments {
    pub fn new(shift_x: f64, shift_y: f64) -> Self {
        Self {
            shift: (shift_x, shift_y),
            count: 0,
            sums: Default::default(),
        }
    }

    pub fn push(&mut self, x: f64, y: f64) {
        let (u, v) = (x - self.shift.0, y - self.shift.1);
        let us = [1.0, u, u * u];
        let vs = [1.0, v, v * v];
        for a in 0..3 {
            for b in 0..3 {
                self.sums[a][b].add(us[a] * vs[b]);
            }
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &CoMoments) {
        assert_eq!(self.shift, other.shift, "accumulators must share shifts");
        for a in 0..3 {
            for b in 0..3 {
                self.sums[a][b].add(other.sums[a][b].value());
            }
        }
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    fn e(&self, a: usize, b: usize) -> f64 {
        self.sums[a][b].value() / self.count as f64
    }

    fn mu11(&self) -> f64 {
        self.e(1, 1) - self.e(1, 0) * self.e(0, 1)
    }

    /// Sample covariance with divisor `M − 1`.
    pub fn covariance(&self) -> f64 {
        let n = self.count as f64;
        self.mu11() * n / (n - 1.0)
    }

    /// Large-sample standard error `sqrt((µ22 − µ11²)/M)`.
    pub fn covariance_se(&self) -> f64 {
        let (a, b) = (self.e(1, 0), self.e(0, 1));
        let mu22 = self.e(2, 2) - 2.0 * b * self.e(2, 1) - 2.0 * a * self.e(1, 2)
            + b * b * self.e(2, 0)
            + a * a * self.e(0, 2)
            + 4.0 * a * b * self.e(1, 1)
            - 3.0 * a * a * b * b;
        let mu11 = self.mu11();
        ((mu22 - mu11 * mu11).max(0.0) / self.count as f64).sqrt()
    }
}
