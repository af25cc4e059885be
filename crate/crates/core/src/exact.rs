//! Exact references: full enumeration of either representation, a row
//! transfer matrix for the primal graph, and the exact large-`M` variances of
//! the two estimators.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::estimators::LogSumExp;
use crate::model::{DualModel, ModelSpec, PrimalModel, Representation};
use crate::zq::sub_mod;

/// Enumeration limit on the number of configurations.
pub const MAX_EXACT_CONFIGS: f64 = 2e6;
/// Limit on the transfer-matrix row space `q^L`.
pub const MAX_TRANSFER_STATES: usize = 4096;

fn advance(digits: &mut [usize], q: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

fn config_count(spec: &ModelSpec, representation: Representation) -> f64 {
    let n = spec.num_sites() as f64;
    let exponent = match representation {
        Representation::Primal => n,
        Representation::Dual => n + 1.0,
    };
    (spec.q() as f64).powf(exponent)
}

/// Calls `visit(config, log_f)` once for every configuration in the support.
///
/// Primal configurations are spin vectors. Dual configurations are bond
/// vectors, each visited exactly once: face 0 is pinned to zero, which removes
/// the global redundancy of the face parametrization.
pub fn for_each_config<F>(spec: &ModelSpec, representation: Representation, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize], f64),
{
    let count = config_count(spec, representation);
    if count > MAX_EXACT_CONFIGS {
        return Err(Error::TooLargeForExact(count));
    }
    let q = spec.q();
    let n = spec.num_sites();
    match representation {
        Representation::Primal => {
            let model = PrimalModel::new(spec);
            let mut spins = vec![0; n];
            loop {
                visit(&spins, model.log_f_raw(&spins));
                if !advance(&mut spins, q) {
                    break;
                }
            }
        }
        Representation::Dual => {
            let model = DualModel::new(spec)?;
            // free[..n-1] are faces 1..n, free[n-1..] the two windings
            let mut free = vec![0; n + 1];
            let mut faces = vec![0; n];
            let mut bonds = vec![0; 2 * n];
            loop {
                faces[1..].copy_from_slice(&free[..n - 1]);
                model.embed(&faces, [free[n - 1], free[n]], &mut bonds);
                visit(&bonds, model.log_f_bonds(&bonds));
                if !advance(&mut free, q) {
                    break;
                }
            }
        }
    }
    Ok(())
}

/// Log-domain sums over a full support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSums {
    pub log_support_size: f64,
    /// `log Z = log sum f`
    pub log_z: f64,
    /// `log sum 1/f`
    pub log_sum_inverse: f64,
    /// `log sum f^2`
    pub log_sum_square: f64,
}

impl ExactSums {
    pub fn compute(spec: &ModelSpec, representation: Representation) -> Result<Self> {
        let (mut z, mut inv, mut sq) = (LogSumExp::new(), LogSumExp::new(), LogSumExp::new());
        let mut count = 0usize;
        for_each_config(spec, representation, |_, lf| {
            z.push(lf);
            inv.push(-lf);
            sq.push(2.0 * lf);
            count += 1;
        })?;
        Ok(Self {
            log_support_size: (count as f64).ln(),
            log_z: z.value(),
            log_sum_inverse: inv.value(),
            log_sum_square: sq.value(),
        })
    }

    /// `Z sum(1/f) / |X|^2 - 1`
    pub fn asym_var_ot(&self) -> f64 {
        (self.log_z + self.log_sum_inverse - 2.0 * self.log_support_size).exp_m1()
    }

    /// `|X| sum(f^2) / Z^2 - 1`
    pub fn asym_var_uniform(&self) -> f64 {
        (self.log_support_size + self.log_sum_square - 2.0 * self.log_z).exp_m1()
    }
}

pub fn brute_force_log_z(spec: &ModelSpec, representation: Representation) -> Result<f64> {
    let mut z = LogSumExp::new();
    for_each_config(spec, representation, |_, lf| z.push(lf))?;
    Ok(z.value())
}

/// Large-`M` limit of `M Var[log Z_OT(M)]` for independent samples.
pub fn exact_asym_var_ot(spec: &ModelSpec, representation: Representation) -> Result<f64> {
    Ok(ExactSums::compute(spec, representation)?.asym_var_ot())
}

/// Large-`M` limit of `M Var[log Z_U(M)]`.
pub fn exact_asym_var_uniform(spec: &ModelSpec, representation: Representation) -> Result<f64> {
    Ok(ExactSums::compute(spec, representation)?.asym_var_uniform())
}

/// A matrix stored as `exp(log_scale) * matrix` with max entry 1.
struct Scaled {
    matrix: Array2<f64>,
    log_scale: f64,
}

impl Scaled {
    fn normalized(mut matrix: Array2<f64>, mut log_scale: f64) -> Self {
        let max = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max > 0.0 {
            matrix.mapv_inplace(|v| v / max);
            log_scale += max.ln();
        }
        Self { matrix, log_scale }
    }

    fn mul(&self, other: &Scaled) -> Scaled {
        Scaled::normalized(self.matrix.dot(&other.matrix), self.log_scale + other.log_scale)
    }
}

/// `log tr(T^L)` for the symmetric row transfer matrix
/// `T(s, s') = sqrt(H(s)) V(s, s') sqrt(H(s'))`, where `H` collects the
/// wrapped horizontal bonds of one row and `V` the vertical bonds between
/// consecutive rows.
pub fn transfer_matrix_log_z(spec: &ModelSpec) -> Result<f64> {
    let q = spec.q();
    let side = spec.side();
    let states = (q as f64).powi(side as i32);
    if states > MAX_TRANSFER_STATES as f64 {
        return Err(Error::TooLargeForTransfer(states));
    }
    let states = states as usize;
    let log_kernel: Vec<f64> = spec.kernel().values().iter().map(|v| v.ln()).collect();

    let rows: Vec<Vec<usize>> = (0..states)
        .map(|mut s| {
            (0..side)
                .map(|_| {
                    let d = s % q;
                    s /= q;
                    d
                })
                .collect()
        })
        .collect();
    let log_h: Vec<f64> =
        rows.iter().map(|r| (0..side).map(|c| log_kernel[sub_mod(r[c], r[(c + 1) % side], q)]).sum()).collect();

    let mut log_t = Array2::<f64>::zeros((states, states));
    let mut max = f64::NEG_INFINITY;
    for (i, lower) in rows.iter().enumerate() {
        for (j, upper) in rows.iter().enumerate() {
            let log_v: f64 = (0..side).map(|c| log_kernel[sub_mod(lower[c], upper[c], q)]).sum();
            let v = 0.5 * log_h[i] + log_v + 0.5 * log_h[j];
            log_t[[i, j]] = v;
            max = max.max(v);
        }
    }
    let base = Scaled { matrix: log_t.mapv(|v| (v - max).exp()), log_scale: max };

    let mut power: Option<Scaled> = None;
    let mut square = base;
    let mut e = side;
    loop {
        if e & 1 == 1 {
            power = Some(match power {
                None => Scaled { matrix: square.matrix.clone(), log_scale: square.log_scale },
                Some(p) => p.mul(&square),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        square = square.mul(&square);
    }
    let power = power.expect("side >= 2");
    Ok(power.matrix.diag().sum().ln() + power.log_scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_examples() {
        for (q, l) in [(2, 2), (3, 2), (2, 3)] {
            let spec = ModelSpec::potts(q, l, 0.0).unwrap();
            let expected = (l * l) as f64 * (q as f64).ln();
            assert!((brute_force_log_z(&spec, Representation::Primal).unwrap() - expected).abs() < 1e-12);
        }
        // 2x2 torus, 8 bonds: agreement counts 8/4/0 with multiplicities 2/12/2.
        let spec = ModelSpec::potts(2, 2, 0.3).unwrap();
        let expected = (2.0 * 2.4f64.exp() + 12.0 + 2.0 * (-2.4f64).exp()).ln();
        assert!((brute_force_log_z(&spec, Representation::Primal).unwrap() - expected).abs() < 1e-12);

        let spec = ModelSpec::potts(2, 2, 8.0).unwrap();
        let gap = brute_force_log_z(&spec, Representation::Primal).unwrap() - 8.0 * 8.0;
        assert!((gap - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn dual_visits_whole_support_once() {
        let spec = ModelSpec::potts(3, 2, 0.4).unwrap();
        let mut seen = std::collections::HashSet::new();
        for_each_config(&spec, Representation::Dual, |y, _| {
            assert!(seen.insert(y.to_vec()));
        })
        .unwrap();
        assert_eq!(seen.len(), 3usize.pow(5));
    }

    #[test]
    fn size_limits() {
        let spec = ModelSpec::potts(2, 5, 0.3).unwrap();
        assert!(matches!(brute_force_log_z(&spec, Representation::Primal), Err(Error::TooLargeForExact(_))));
        let spec = ModelSpec::potts(5, 6, 0.3).unwrap();
        assert!(matches!(transfer_matrix_log_z(&spec), Err(Error::TooLargeForTransfer(_))));
    }

    #[test]
    fn transfer_matrix_examples() {
        let spec = ModelSpec::potts(2, 4, 0.0).unwrap();
        assert!((transfer_matrix_log_z(&spec).unwrap() - 16.0 * 2f64.ln()).abs() < 1e-12);
        for (q, l, beta) in [(2, 2, 0.3), (3, 3, 0.7), (2, 3, 1.5), (4, 2, 0.2)] {
            let spec = ModelSpec::potts(q, l, beta).unwrap();
            let bf = brute_force_log_z(&spec, Representation::Primal).unwrap();
            let tm = transfer_matrix_log_z(&spec).unwrap();
            assert!(((bf - tm) / bf).abs() < 1e-9, "q={q} L={l}");
        }
        let spec = ModelSpec::clock(5, 2, 1.1).unwrap();
        let bf = brute_force_log_z(&spec, Representation::Primal).unwrap();
        assert!(((bf - transfer_matrix_log_z(&spec).unwrap()) / bf).abs() < 1e-9);
    }

    #[test]
    fn transfer_matrix_large_beta_stays_finite() {
        let spec = ModelSpec::potts(2, 10, 40.0).unwrap();
        let v = transfer_matrix_log_z(&spec).unwrap();
        assert!((v - (200.0 * 40.0 + 2f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn asymptotic_variance_examples() {
        let spec = ModelSpec::potts(2, 2, 0.0).unwrap();
        assert_eq!(exact_asym_var_ot(&spec, Representation::Primal).unwrap(), 0.0);
        assert_eq!(exact_asym_var_uniform(&spec, Representation::Primal).unwrap(), 0.0);

        // Direct linear-domain evaluation over the 2x2 agreement classes.
        let beta = 0.5f64;
        let classes = [(2.0, 8.0 * beta), (12.0, 0.0), (2.0, -8.0 * beta)];
        let z: f64 = classes.iter().map(|(m, lf)| m * lf.exp()).sum();
        let inv: f64 = classes.iter().map(|(m, lf)| m * (-lf).exp()).sum();
        let sq: f64 = classes.iter().map(|(m, lf)| m * (2.0 * lf).exp()).sum();
        let spec = ModelSpec::potts(2, 2, beta).unwrap();
        let ot = exact_asym_var_ot(&spec, Representation::Primal).unwrap();
        let un = exact_asym_var_uniform(&spec, Representation::Primal).unwrap();
        assert!((ot - (z * inv / 256.0 - 1.0)).abs() < 1e-9);
        assert!((un - (16.0 * sq / (z * z) - 1.0)).abs() < 1e-9);
        assert!(un <= 15.0);

        let spec = ModelSpec::potts(2, 2, 1.2).unwrap();
        let mut fs = Vec::new();
        for_each_config(&spec, Representation::Dual, |_, lf| fs.push(lf.exp())).unwrap();
        assert_eq!(fs.len(), 32);
        let z: f64 = fs.iter().sum();
        let inv: f64 = fs.iter().map(|f| 1.0 / f).sum();
        let ot = exact_asym_var_ot(&spec, Representation::Dual).unwrap();
        assert!((ot - (z * inv / 1024.0 - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn uniform_variance_below_support_size() {
        for (q, l) in [(2, 2), (3, 2), (2, 3)] {
            for &beta in &[0.1, 0.5, 1.0, 2.0, 4.0] {
                let spec = ModelSpec::potts(q, l, beta).unwrap();
                for rep in [Representation::Primal, Representation::Dual] {
                    let sums = ExactSums::compute(&spec, rep).unwrap();
                    assert!(sums.asym_var_uniform() <= sums.log_support_size.exp() - 1.0 + 1e-9);
                }
            }
        }
    }
}
