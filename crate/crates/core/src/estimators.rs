//! Ogata-Tanemura and uniform estimators of `log Z`, in log domain.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Representation};

/// Streaming `log sum exp` with running-max rescaling.
///
/// Batch and streaming estimates share this accumulator, so a checkpoint after
/// `M` pushes is bitwise equal to the batch value over the same `M` values.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
    count: usize,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self { max: f64::NEG_INFINITY, scaled: 0.0, count: 0 }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        if v == f64::NEG_INFINITY {
            return;
        }
        if v <= self.max {
            self.scaled += (v - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn value(&self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.push(v);
        }
        acc
    }
}

pub fn logsumexp(values: &[f64]) -> f64 {
    values.iter().copied().collect::<LogSumExp>().value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    /// Harmonic mean of `1/f` over samples from the model distribution.
    OgataTanemura,
    /// Sample mean of `f` over uniform samples.
    Uniform,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::OgataTanemura => "ot",
            EstimatorKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Running state of one estimator.
#[derive(Debug, Clone, Copy)]
pub struct EstimateAccumulator {
    kind: EstimatorKind,
    log_support_size: f64,
    sums: LogSumExp,
}

impl EstimateAccumulator {
    pub fn new(kind: EstimatorKind, log_support_size: f64) -> Self {
        Self { kind, log_support_size, sums: LogSumExp::new() }
    }

    #[inline]
    pub fn push(&mut self, log_f: f64) {
        match self.kind {
            EstimatorKind::OgataTanemura => self.sums.push(-log_f),
            EstimatorKind::Uniform => self.sums.push(log_f),
        }
    }

    pub fn count(&self) -> usize {
        self.sums.count()
    }

    pub fn estimate(&self) -> Result<f64> {
        let m = self.sums.count();
        if m == 0 {
            return Err(Error::EmptySample);
        }
        let log_m = (m as f64).ln();
        Ok(match self.kind {
            EstimatorKind::OgataTanemura => self.log_support_size + log_m - self.sums.value(),
            EstimatorKind::Uniform => self.log_support_size - log_m + self.sums.value(),
        })
    }
}

fn batch(kind: EstimatorKind, log_support_size: f64, log_f_values: &[f64]) -> Result<f64> {
    let mut acc = EstimateAccumulator::new(kind, log_support_size);
    for &v in log_f_values {
        acc.push(v);
    }
    acc.estimate()
}

/// `log(|X| / mean(1/f))` over samples from the model distribution.
pub fn ot_log_estimate(log_support_size: f64, log_f_values: &[f64]) -> Result<f64> {
    batch(EstimatorKind::OgataTanemura, log_support_size, log_f_values)
}

/// `log(|X| mean(f))` over uniform samples.
pub fn uniform_log_estimate(log_support_size: f64, log_f_values: &[f64]) -> Result<f64> {
    batch(EstimatorKind::Uniform, log_support_size, log_f_values)
}

/// Dual estimates are rescaled by `q^N`; primal ones pass through.
pub fn to_model_log_z(estimate: f64, representation: Representation, spec: &ModelSpec) -> f64 {
    match representation {
        Representation::Primal => estimate,
        Representation::Dual => estimate + spec.num_sites() as f64 * (spec.q() as f64).ln(),
    }
}

/// Running estimates at increasing sample counts.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSeries {
    pub representation: Representation,
    pub estimator: EstimatorKind,
    pub checkpoints: Vec<(usize, f64)>,
}

impl EstimateSeries {
    pub fn last(&self) -> Option<(usize, f64)> {
        self.checkpoints.last().copied()
    }
}

/// Feeds `values` through an estimator, recording the estimate whenever the
/// sample count reaches the next scheduled checkpoint. Stops after the last
/// checkpoint.
pub fn streaming_curve<I>(
    kind: EstimatorKind,
    representation: Representation,
    log_support_size: f64,
    values: I,
    schedule: &[usize],
) -> Result<EstimateSeries>
where
    I: IntoIterator<Item = f64>,
{
    if schedule.is_empty() {
        return Err(Error::Config("empty checkpoint schedule".into()));
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("checkpoint schedule must be strictly increasing and start at >= 1".into()));
    }
    let mut acc = EstimateAccumulator::new(kind, log_support_size);
    let mut checkpoints = Vec::with_capacity(schedule.len());
    let mut next = schedule.iter().copied().peekable();
    for v in values {
        acc.push(v);
        if next.peek() == Some(&acc.count()) {
            checkpoints.push((acc.count(), acc.estimate()?));
            next.next();
            if next.peek().is_none() {
                break;
            }
        }
    }
    if let Some(&missing) = next.peek() {
        return Err(Error::Config(format!("stream ended before checkpoint {missing}")));
    }
    Ok(EstimateSeries { representation, estimator: kind, checkpoints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn logsumexp_basics() {
        assert_eq!(logsumexp(&[]), f64::NEG_INFINITY);
        assert!((logsumexp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        let big = logsumexp(&[1234.0, 1232.0]);
        assert!((big - (1232.0 + (2f64.exp() + 1.0).ln())).abs() < 1e-12);
        assert_eq!(logsumexp(&[f64::NEG_INFINITY, 3.0]), 3.0);
    }

    #[test]
    fn constant_values() {
        let c = 2.75;
        let ls = 11.0;
        let vals = vec![c; 37];
        assert!((ot_log_estimate(ls, &vals).unwrap() - (ls + c)).abs() < 1e-12);
        assert!((uniform_log_estimate(ls, &vals).unwrap() - (ls + c)).abs() < 1e-12);
        let zeros = vec![0.0; 10];
        assert!((ot_log_estimate(ls, &zeros).unwrap() - ls).abs() < 1e-12);
        assert!((uniform_log_estimate(ls, &zeros).unwrap() - ls).abs() < 1e-12);
    }

    #[test]
    fn empty_sample() {
        assert!(matches!(ot_log_estimate(1.0, &[]), Err(Error::EmptySample)));
        assert!(matches!(uniform_log_estimate(1.0, &[]), Err(Error::EmptySample)));
    }

    #[test]
    fn extreme_values_stay_finite() {
        let vals: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 5000.0 } else { -5000.0 }).collect();
        let ot = ot_log_estimate(0.0, &vals).unwrap();
        let un = uniform_log_estimate(0.0, &vals).unwrap();
        assert!(ot.is_finite() && un.is_finite());
        assert!((ot - (-5000.0 + 2f64.ln())).abs() < 1e-9);
        assert!((un - (5000.0 - 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn rescaling() {
        let spec = ModelSpec::potts(4, 10, 1.0).unwrap();
        let l = -3.5;
        assert_eq!(to_model_log_z(l, Representation::Dual, &spec), l + 100.0 * 4f64.ln());
        assert_eq!(to_model_log_z(l, Representation::Primal, &spec), l);
    }

    #[test]
    fn stream_matches_batch_bitwise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let vals: Vec<f64> = (0..10_000).map(|_| rng.random_range(-40.0..40.0)).collect();
        let schedule = [1, 7, 100, 999, 10_000];
        for kind in [EstimatorKind::OgataTanemura, EstimatorKind::Uniform] {
            let series = streaming_curve(kind, Representation::Primal, 3.0, vals.iter().copied(), &schedule).unwrap();
            assert_eq!(series.checkpoints.len(), schedule.len());
            for &(m, est) in &series.checkpoints {
                let b = batch(kind, 3.0, &vals[..m]).unwrap();
                assert_eq!(est.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn schedule_validation() {
        let vals = [0.0; 5];
        let s = |sched: &[usize]| {
            streaming_curve(EstimatorKind::Uniform, Representation::Primal, 0.0, vals.iter().copied(), sched)
        };
        assert!(s(&[]).is_err());
        assert!(s(&[0, 2]).is_err());
        assert!(s(&[3, 3]).is_err());
        assert!(s(&[2, 6]).is_err());
        assert_eq!(s(&[1]).unwrap().checkpoints, vec![(1, 0.0)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn shift_equivariance(
                vals in proptest::collection::vec(-50.0f64..50.0, 1..200), c in -100.0f64..100.0
            ) {
                let shifted: Vec<f64> = vals.iter().map(|v| v + c).collect();
                let d_ot = ot_log_estimate(0.0, &shifted).unwrap() - ot_log_estimate(0.0, &vals).unwrap();
                let d_un = uniform_log_estimate(0.0, &shifted).unwrap() - uniform_log_estimate(0.0, &vals).unwrap();
                prop_assert!((d_ot - c).abs() < 1e-9);
                prop_assert!((d_un - c).abs() < 1e-9);
            }

            #[test]
            fn ot_never_exceeds_uniform(vals in proptest::collection::vec(-30.0f64..30.0, 1..100)) {
                // Harmonic mean <= arithmetic mean.
                prop_assert!(ot_log_estimate(0.0, &vals).unwrap() <= uniform_log_estimate(0.0, &vals).unwrap() + 1e-9);
            }
        }
    }
}
