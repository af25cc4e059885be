//! Primal and dual factor-graph evaluation.
//!
//! The primal graph carries one spin per site and the kernel `kappa` on every
//! bond. Its Fourier dual carries one variable per bond, weighted through the
//! spectrum `kappa^`, restricted to configurations whose signed sum vanishes
//! at every site. That support is parametrized here by one variable per face
//! plus two winding variables, which makes the parametrization exactly
//! `q`-to-one onto the `q^(N+1)` parity-valid bond configurations.
//!
//! Each dual bond is weighted by the normalized transform `kappa^(y) / q`.
//! With that scale the two partition functions satisfy `Z_dual = Z / q^N`;
//! the unnormalized `kappa^` would give `Z_dual = q^N Z` instead. The scale
//! is a constant factor, so conditionals, variances and bounds do not see it.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact;
use crate::lattice::{Axis, TorusLattice};
use crate::zq::{self, add_mod, sub_mod, KernelTable, SpectrumTable};

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    Potts,
    Clock,
    Custom(KernelTable),
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Potts => "potts",
            KernelKind::Clock => "clock",
            KernelKind::Custom(_) => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Representation {
    Primal,
    Dual,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Primal => "primal",
            Representation::Dual => "dual",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A nearest-neighbor model on the `side x side` torus.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    q: usize,
    side: usize,
    beta: f64,
    kernel: KernelKind,
}

impl ModelSpec {
    pub fn new(kernel: KernelKind, q: usize, side: usize, beta: f64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidAlphabet(q));
        }
        if side < 2 {
            return Err(Error::LatticeTooSmall(side));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::Config(format!("beta must be finite and non-negative, got {beta}")));
        }
        if let KernelKind::Custom(table) = &kernel {
            if table.q() != q {
                return Err(Error::AlphabetMismatch(format!("custom kernel has {} entries, q = {q}", table.q())));
            }
            if table.values().iter().any(|&v| v <= 0.0) {
                return Err(Error::Config("custom kernel entries must be strictly positive".into()));
            }
        }
        Ok(Self { q, side, beta, kernel })
    }

    pub fn potts(q: usize, side: usize, beta: f64) -> Result<Self> {
        Self::new(KernelKind::Potts, q, side, beta)
    }

    pub fn clock(q: usize, side: usize, beta: f64) -> Result<Self> {
        Self::new(KernelKind::Clock, q, side, beta)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kernel_kind(&self) -> &KernelKind {
        &self.kernel
    }

    pub fn num_sites(&self) -> usize {
        self.side * self.side
    }

    pub fn kernel(&self) -> KernelTable {
        match &self.kernel {
            KernelKind::Potts => zq::potts_kernel(self.beta, self.q).expect("q validated"),
            KernelKind::Clock => zq::clock_kernel(self.beta, self.q).expect("q validated"),
            KernelKind::Custom(t) => t.clone(),
        }
    }

    pub fn spectrum(&self) -> Result<SpectrumTable> {
        zq::dft(&self.kernel())
    }

    pub fn lattice(&self) -> TorusLattice {
        TorusLattice::new(self.side).expect("side validated")
    }

    /// Bond coupling `g(d)` with `kappa(d) = exp(beta g(d))`.
    fn coupling(&self, d: usize) -> Result<f64> {
        match self.kernel {
            KernelKind::Potts => Ok(if d == 0 { 1.0 } else { -1.0 }),
            KernelKind::Clock => Ok(zq::clock_cos(d, self.q)),
            KernelKind::Custom(_) => Err(Error::NoEnergy),
        }
    }
}

fn check_values(values: &[usize], len: usize, q: usize, what: &str) -> Result<()> {
    if values.len() != len {
        return Err(Error::AlphabetMismatch(format!("{what} has length {}, expected {len}", values.len())));
    }
    if let Some(v) = values.iter().find(|&&v| v >= q) {
        return Err(Error::AlphabetMismatch(format!("{what} value {v} not in Z_{q}")));
    }
    Ok(())
}

/// One spin per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    q: usize,
    spins: Vec<usize>,
}

impl SpinConfig {
    pub fn new(spins: Vec<usize>, q: usize) -> Result<Self> {
        check_values(&spins, spins.len(), q, "spin config")?;
        Ok(Self { q, spins })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn spins(&self) -> &[usize] {
        &self.spins
    }
}

/// One value per bond.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BondConfig {
    q: usize,
    values: Vec<usize>,
}

impl BondConfig {
    pub fn new(values: Vec<usize>, q: usize) -> Result<Self> {
        check_values(&values, values.len(), q, "bond config")?;
        Ok(Self { q, values })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

/// Free parameters of the dual support: one value per face and two windings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualConfig {
    q: usize,
    faces: Vec<usize>,
    windings: [usize; 2],
}

impl DualConfig {
    pub fn new(faces: Vec<usize>, windings: [usize; 2], q: usize) -> Result<Self> {
        check_values(&faces, faces.len(), q, "face values")?;
        check_values(&windings, 2, q, "windings")?;
        Ok(Self { q, faces, windings })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn faces(&self) -> &[usize] {
        &self.faces
    }

    pub fn windings(&self) -> [usize; 2] {
        self.windings
    }
}

fn check_spins(spec: &ModelSpec, x: &SpinConfig) -> Result<()> {
    if x.q != spec.q {
        return Err(Error::AlphabetMismatch(format!("config over Z_{}, model over Z_{}", x.q, spec.q)));
    }
    check_values(&x.spins, spec.num_sites(), spec.q, "spin config")
}

/// `E(x) = -sum_bonds g(x_base - x_head)`.
pub fn energy(spec: &ModelSpec, x: &SpinConfig) -> Result<f64> {
    check_spins(spec, x)?;
    let lattice = spec.lattice();
    let q = spec.q;
    let mut total = 0.0;
    for b in lattice.bonds() {
        total -= spec.coupling(sub_mod(x.spins[b.base], x.spins[b.head], q))?;
    }
    Ok(total)
}

pub fn log_f_primal(spec: &ModelSpec, x: &SpinConfig) -> Result<f64> {
    check_spins(spec, x)?;
    Ok(PrimalModel::new(spec).log_f_raw(&x.spins))
}

/// Maps face and winding values to the bond configuration they induce.
pub fn dual_embed(lattice: &TorusLattice, phi: &DualConfig) -> Result<BondConfig> {
    if phi.faces.len() != lattice.num_faces() {
        return Err(Error::AlphabetMismatch(format!(
            "dual config has {} faces, lattice has {}",
            phi.faces.len(),
            lattice.num_faces()
        )));
    }
    let mut values = vec![0; lattice.num_bonds()];
    embed_into(lattice, phi.q, &phi.faces, phi.windings, &mut values);
    Ok(BondConfig { q: phi.q, values })
}

pub(crate) fn embed_into(lattice: &TorusLattice, q: usize, faces: &[usize], windings: [usize; 2], out: &mut [usize]) {
    for (b, y) in out.iter_mut().enumerate() {
        let (plus, minus) = lattice.bond_faces(b);
        *y = sub_mod(faces[plus], faces[minus], q);
    }
    for (axis, w) in [(Axis::Horizontal, windings[0]), (Axis::Vertical, windings[1])] {
        for sb in lattice.winding_bonds(axis) {
            out[sb.bond] = add_mod(out[sb.bond], w, q);
        }
    }
}

/// `true` iff the signed sum of incident bond values vanishes mod q at every site.
pub fn check_parity(lattice: &TorusLattice, y: &BondConfig) -> bool {
    y.values.len() == lattice.num_bonds() && parity_holds(lattice, y.q, &y.values)
}

pub(crate) fn parity_holds(lattice: &TorusLattice, q: usize, y: &[usize]) -> bool {
    (0..lattice.num_sites()).all(|s| {
        let total = lattice.site_bonds(s).expect("site in range").iter().fold(0, |acc, sb| {
            if sb.sign > 0 {
                add_mod(acc, y[sb.bond], q)
            } else {
                sub_mod(acc, y[sb.bond], q)
            }
        });
        total == 0
    })
}

pub fn log_f_dual(spec: &ModelSpec, y: &BondConfig) -> Result<f64> {
    let model = DualModel::new(spec)?;
    if y.q != spec.q {
        return Err(Error::AlphabetMismatch(format!("config over Z_{}, model over Z_{}", y.q, spec.q)));
    }
    check_values(&y.values, model.lattice.num_bonds(), spec.q, "bond config")?;
    if !parity_holds(&model.lattice, spec.q, &y.values) {
        return Err(Error::OutOfSupport);
    }
    Ok(model.log_f_bonds(&y.values))
}

/// `log |X|` for the chosen representation: `N log q` primal, `(N+1) log q` dual.
pub fn support_log_size(spec: &ModelSpec, representation: Representation) -> Result<f64> {
    let n = spec.num_sites() as f64;
    let log_q = (spec.q as f64).ln();
    match representation {
        Representation::Primal => Ok(n * log_q),
        Representation::Dual => {
            DualModel::new(spec)?;
            Ok((n + 1.0) * log_q)
        }
    }
}

/// `log Z - N log q - log Z'` by exact enumeration of both graphs.
pub fn duality_gap(spec: &ModelSpec) -> Result<f64> {
    let primal = exact::brute_force_log_z(spec, Representation::Primal)?;
    let dual = exact::brute_force_log_z(spec, Representation::Dual)?;
    Ok(primal - spec.num_sites() as f64 * (spec.q as f64).ln() - dual)
}

/// Evaluator for the primal graph.
#[derive(Debug, Clone)]
pub struct PrimalModel {
    pub(crate) q: usize,
    pub(crate) lattice: TorusLattice,
    pub(crate) log_kernel: Vec<f64>,
}

impl PrimalModel {
    pub fn new(spec: &ModelSpec) -> Self {
        let log_kernel = spec.kernel().values().iter().map(|v| v.ln()).collect();
        Self { q: spec.q, lattice: spec.lattice(), log_kernel }
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn log_f_raw(&self, spins: &[usize]) -> f64 {
        self.lattice.bonds().iter().map(|b| self.log_kernel[sub_mod(spins[b.base], spins[b.head], self.q)]).sum()
    }
}

/// Evaluator for the dual graph. Construction fails unless the spectrum is
/// strictly positive.
#[derive(Debug, Clone)]
pub struct DualModel {
    pub(crate) q: usize,
    pub(crate) lattice: TorusLattice,
    /// `log(kappa^(y) / q)`
    pub(crate) log_weights: Vec<f64>,
}

impl DualModel {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let spectrum = spec.spectrum()?;
        if let Some((index, &value)) = spectrum.values().iter().enumerate().find(|(_, &v)| v <= 0.0) {
            return Err(Error::DegenerateSpectrum { index, value });
        }
        let log_q = (spec.q as f64).ln();
        let log_weights = spectrum.values().iter().map(|v| v.ln() - log_q).collect();
        Ok(Self { q: spec.q, lattice: spec.lattice(), log_weights })
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn log_f_bonds(&self, y: &[usize]) -> f64 {
        y.iter().map(|&v| self.log_weights[v]).sum()
    }

    pub fn embed(&self, faces: &[usize], windings: [usize; 2], out: &mut [usize]) {
        embed_into(&self.lattice, self.q, faces, windings, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn odometer(digits: &mut [usize], q: usize) -> bool {
        for d in digits.iter_mut() {
            *d += 1;
            if *d < q {
                return true;
            }
            *d = 0;
        }
        false
    }

    #[test]
    fn energy_examples() {
        for q in 2..=4 {
            for l in 2..=4 {
                let spec = ModelSpec::potts(q, l, 0.7).unwrap();
                let n = spec.num_sites();
                let x = SpinConfig::new(vec![1; n], q).unwrap();
                assert_eq!(energy(&spec, &x).unwrap(), -2.0 * n as f64);
            }
        }
        for l in [2, 4, 6] {
            let spec = ModelSpec::potts(2, l, 1.0).unwrap();
            let spins = (0..l * l).map(|s| (s / l + s % l) % 2).collect();
            let x = SpinConfig::new(spins, 2).unwrap();
            assert_eq!(energy(&spec, &x).unwrap(), 2.0 * (l * l) as f64);
        }
        let spec = ModelSpec::potts(2, 2, 0.3).unwrap();
        let x = SpinConfig::new(vec![0, 0, 0, 1], 2).unwrap();
        assert_eq!(energy(&spec, &x).unwrap(), 0.0);
    }

    #[test]
    fn energy_rejects_mismatch() {
        let spec = ModelSpec::potts(3, 2, 0.3).unwrap();
        let wrong_len = SpinConfig::new(vec![0, 0, 0], 3).unwrap();
        assert!(matches!(energy(&spec, &wrong_len), Err(Error::AlphabetMismatch(_))));
        let wrong_q = SpinConfig::new(vec![0, 0, 0, 1], 2).unwrap();
        assert!(matches!(log_f_primal(&spec, &wrong_q), Err(Error::AlphabetMismatch(_))));
        assert!(SpinConfig::new(vec![0, 3], 3).is_err());
    }

    #[test]
    fn log_f_primal_examples() {
        let spec = ModelSpec::potts(3, 3, 0.0).unwrap();
        let x = SpinConfig::new(vec![0, 1, 2, 2, 1, 0, 1, 1, 0], 3).unwrap();
        assert_eq!(log_f_primal(&spec, &x).unwrap(), 0.0);

        let spec = ModelSpec::potts(4, 3, 0.9).unwrap();
        let x = SpinConfig::new(vec![2; 9], 4).unwrap();
        assert!((log_f_primal(&spec, &x).unwrap() - 2.0 * 9.0 * 0.9).abs() < 1e-12);

        let spec = ModelSpec::potts(2, 2, 0.3).unwrap();
        let x = SpinConfig::new(vec![0, 0, 0, 1], 2).unwrap();
        assert!(log_f_primal(&spec, &x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn clock_log_f_matches_energy() {
        let spec = ModelSpec::clock(5, 3, 0.8).unwrap();
        let x = SpinConfig::new(vec![0, 1, 4, 2, 3, 3, 0, 1, 2], 5).unwrap();
        let e = energy(&spec, &x).unwrap();
        assert!((log_f_primal(&spec, &x).unwrap() + 0.8 * e).abs() < 1e-12);
    }

    #[test]
    fn custom_kernel_has_no_energy() {
        let table = KernelTable::new(vec![2.0, 1.0, 1.0]).unwrap();
        let spec = ModelSpec::new(KernelKind::Custom(table), 3, 2, 1.0).unwrap();
        let x = SpinConfig::new(vec![0; 4], 3).unwrap();
        assert!(matches!(energy(&spec, &x), Err(Error::NoEnergy)));
        assert!((log_f_primal(&spec, &x).unwrap() - 8.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn embed_examples() {
        let lat = TorusLattice::new(3).unwrap();
        let zero = DualConfig::new(vec![0; 9], [0, 0], 4).unwrap();
        assert!(dual_embed(&lat, &zero).unwrap().values().iter().all(|&v| v == 0));

        let phi = DualConfig::new(vec![1, 3, 0, 2, 2, 1, 0, 3, 1], [2, 1], 4).unwrap();
        let shifted = DualConfig::new(phi.faces().iter().map(|f| (f + 3) % 4).collect(), [2, 1], 4).unwrap();
        let y = dual_embed(&lat, &phi).unwrap();
        assert_eq!(y, dual_embed(&lat, &shifted).unwrap());
        assert!(check_parity(&lat, &y));
    }

    #[test]
    fn parity_examples() {
        let lat = TorusLattice::new(3).unwrap();
        assert!(check_parity(&lat, &BondConfig::new(vec![0; 18], 3).unwrap()));
        for b in 0..18 {
            let mut v = vec![0; 18];
            v[b] = 1;
            assert!(!check_parity(&lat, &BondConfig::new(v, 3).unwrap()));
        }
    }

    /// Exhaustive: parity count, q-to-1 embedding, image equals parity set.
    #[test]
    fn embedding_is_q_to_one_onto_parity_set() {
        for (q, l) in [(2, 2), (3, 2), (2, 3)] {
            let lat = TorusLattice::new(l).unwrap();
            let n = l * l;
            let mut parity_valid = 0usize;
            let mut bonds = vec![0; 2 * n];
            loop {
                if parity_holds(&lat, q, &bonds) {
                    parity_valid += 1;
                }
                if !odometer(&mut bonds, q) {
                    break;
                }
            }
            assert_eq!(parity_valid, q.pow(n as u32 + 1), "q={q} L={l}");

            let mut hits: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut params = vec![0; n + 2];
            loop {
                let phi = DualConfig::new(params[..n].to_vec(), [params[n], params[n + 1]], q).unwrap();
                let y = dual_embed(&lat, &phi).unwrap();
                assert!(check_parity(&lat, &y));
                *hits.entry(y.values().to_vec()).or_default() += 1;
                if !odometer(&mut params, q) {
                    break;
                }
            }
            assert_eq!(hits.len(), parity_valid);
            assert!(hits.values().all(|&c| c == q));
        }
    }

    #[test]
    fn log_f_dual_examples() {
        let beta = 0.6f64;
        for q in 2..=4 {
            let spec = ModelSpec::potts(q, 3, beta).unwrap();
            let y = BondConfig::new(vec![0; 18], q).unwrap();
            let expected = 18.0 * ((beta.exp() + (q as f64 - 1.0) * (-beta).exp()).ln() - (q as f64).ln());
            assert!((log_f_dual(&spec, &y).unwrap() - expected).abs() < 1e-12);
        }

        // q=2, L=2: the horizontal winding loop sets the two right bonds of row 0,
        // the vertical one sets the two up bonds of column 0.
        let spec = ModelSpec::potts(2, 2, beta).unwrap();
        let lat = spec.lattice();
        let y = dual_embed(&lat, &DualConfig::new(vec![0; 4], [1, 1], 2).unwrap()).unwrap();
        assert_eq!(y.values().iter().filter(|&&v| v == 1).count(), 4);
        let expected =
            4.0 * (beta.exp() - (-beta).exp()).ln() + 4.0 * (beta.exp() + (-beta).exp()).ln() - 8.0 * 2f64.ln();
        assert!((log_f_dual(&spec, &y).unwrap() - expected).abs() < 1e-12);

        let mut bad = vec![0; 8];
        bad[0] = 1;
        let bad = BondConfig::new(bad, 2).unwrap();
        assert!(matches!(log_f_dual(&spec, &bad), Err(Error::OutOfSupport)));

        let cold = ModelSpec::potts(3, 2, 0.0).unwrap();
        let zero = BondConfig::new(vec![0; 8], 3).unwrap();
        assert!(matches!(log_f_dual(&cold, &zero), Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn dual_terms_within_envelope() {
        let (q, beta) = (3usize, 1.7f64);
        let spec = ModelSpec::potts(q, 2, beta).unwrap();
        let model = DualModel::new(&spec).unwrap();
        let a = |k: f64| 1.0 + (k - 1.0) * (-2.0 * beta).exp();
        let log_q = (q as f64).ln();
        let (lo, hi) = (a(0.0).ln() + beta - log_q, a(q as f64).ln() + beta - log_q);
        for &v in &model.log_weights {
            assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }

    #[test]
    fn support_sizes() {
        let spec = ModelSpec::potts(4, 10, 0.5).unwrap();
        assert!((support_log_size(&spec, Representation::Primal).unwrap() - 100.0 * 4f64.ln()).abs() < 1e-12);
        let spec = ModelSpec::potts(2, 2, 0.5).unwrap();
        assert!((support_log_size(&spec, Representation::Dual).unwrap() - 32f64.ln()).abs() < 1e-12);
        let spec = ModelSpec::potts(3, 2, 0.5).unwrap();
        assert!((support_log_size(&spec, Representation::Dual).unwrap() - 5.0 * 3f64.ln()).abs() < 1e-12);
        let spec = ModelSpec::potts(3, 2, 0.0).unwrap();
        assert!(support_log_size(&spec, Representation::Dual).is_err());
    }

    #[test]
    fn duality_gap_examples() {
        for (q, l, beta) in [(2, 2, 0.5), (3, 2, 1.0), (2, 3, 0.3)] {
            let spec = ModelSpec::potts(q, l, beta).unwrap();
            assert!(duality_gap(&spec).unwrap().abs() < 1e-9);
        }
        let spec = ModelSpec::clock(5, 2, 0.9).unwrap();
        assert!(duality_gap(&spec).unwrap().abs() < 1e-9);
    }

    #[test]
    fn orientation_flips_leave_z_unchanged() {
        // Reversing a bond replaces kappa(a - b) by kappa(b - a).
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for spec in [ModelSpec::potts(3, 2, 0.8).unwrap(), ModelSpec::clock(5, 2, 0.6).unwrap()] {
            let model = PrimalModel::new(&spec);
            let flips: Vec<bool> = (0..8).map(|_| rng.random()).collect();
            let q = spec.q();
            let mut spins = vec![0; 4];
            let (mut z, mut z_flipped) = (0.0, 0.0);
            loop {
                z += model.log_f_raw(&spins).exp();
                let lf: f64 = model
                    .lattice
                    .bonds()
                    .iter()
                    .zip(&flips)
                    .map(|(b, &flip)| {
                        let (a, c) = if flip { (b.head, b.base) } else { (b.base, b.head) };
                        model.log_kernel[sub_mod(spins[a], spins[c], q)]
                    })
                    .sum();
                z_flipped += lf.exp();
                if !odometer(&mut spins, q) {
                    break;
                }
            }
            assert!((z.ln() - z_flipped.ln()).abs() < 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn potts_log_f_is_minus_beta_energy(
                q in 2usize..=4, l in 2usize..=3, beta in 0.0f64..2.0, seed in any::<u64>()
            ) {
                let spec = ModelSpec::potts(q, l, beta).unwrap();
                let n = l * l;
                let spins = (0..n).map(|i| ((seed >> (i % 60)) as usize + i) % q).collect();
                let x = SpinConfig::new(spins, q).unwrap();
                let lf = log_f_primal(&spec, &x).unwrap();
                prop_assert!((lf + beta * energy(&spec, &x).unwrap()).abs() < 1e-12);
                let bound = 2.0 * n as f64 * beta;
                prop_assert!(lf >= -bound - 1e-12 && lf <= bound + 1e-12);
            }

            #[test]
            fn embedding_always_parity_valid(
                q in 2usize..=6, l in 2usize..=5,
                faces in proptest::collection::vec(0usize..6, 25), w in (0usize..6, 0usize..6)
            ) {
                let lat = TorusLattice::new(l).unwrap();
                let faces = faces[..l * l].iter().map(|f| f % q).collect();
                let phi = DualConfig::new(faces, [w.0 % q, w.1 % q], q).unwrap();
                prop_assert!(check_parity(&lat, &dual_embed(&lat, &phi).unwrap()));
            }
        }
    }
}
