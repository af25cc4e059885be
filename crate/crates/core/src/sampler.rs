//! Configuration samplers for both representations.
//!
//! Gibbs chains scan their variables in a fixed raster order and report one
//! `log f` value per full sweep. The dual chain updates the face variables
//! first and then the two windings; without the winding moves it would stay
//! inside one homology sector of the parity support.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::Axis;
use crate::model::{DualConfig, DualModel, ModelSpec, PrimalModel, Representation, SpinConfig};
use crate::zq::{add_mod, sub_mod};

pub type SimRng = ChaCha8Rng;

/// Sweeps between full recomputations of the cached `log f`.
pub const REFRESH_INTERVAL: usize = 1000;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gibbs,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub burn_in_sweeps: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, burn_in_sweeps: 0 }
    }
}

/// Draws an index with probability proportional to `exp(log_weights[i])`.
fn sample_categorical(log_weights: &[f64], rng: &mut SimRng) -> usize {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = log_weights.iter().map(|w| (w - max).exp()).sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in log_weights.iter().enumerate() {
        u -= (w - max).exp();
        if u < 0.0 {
            return i;
        }
    }
    log_weights.len() - 1
}

fn normalize(log_weights: &[f64]) -> Vec<f64> {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_weights.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

pub fn uniform_primal(spec: &ModelSpec, rng: &mut SimRng) -> SpinConfig {
    let q = spec.q();
    let spins = (0..spec.num_sites()).map(|_| rng.random_range(0..q)).collect();
    SpinConfig::new(spins, q).expect("values drawn in range")
}

/// Uniform face and winding values. The induced bond configuration is uniform
/// over the parity support since the embedding is exactly `q`-to-one.
pub fn uniform_dual(spec: &ModelSpec, rng: &mut SimRng) -> DualConfig {
    let q = spec.q();
    let faces = (0..spec.num_sites()).map(|_| rng.random_range(0..q)).collect();
    let windings = [rng.random_range(0..q), rng.random_range(0..q)];
    DualConfig::new(faces, windings, q).expect("values drawn in range")
}

/// A source of `log f` values, one per call.
pub trait Chain {
    fn next_log_f(&mut self, rng: &mut SimRng) -> f64;
}

/// Single-site heat-bath chain on the primal graph.
#[derive(Debug, Clone)]
pub struct PrimalGibbs<'a> {
    model: &'a PrimalModel,
    spins: Vec<usize>,
    log_f: f64,
    sweeps: usize,
    scratch: Vec<f64>,
}

impl<'a> PrimalGibbs<'a> {
    pub fn new(model: &'a PrimalModel, start: SpinConfig) -> Result<Self> {
        if start.spins().len() != model.lattice().num_sites() || start.q() != model.q() {
            return Err(Error::AlphabetMismatch("start configuration does not fit the model".into()));
        }
        let spins = start.spins().to_vec();
        let log_f = model.log_f_raw(&spins);
        Ok(Self { model, spins, log_f, sweeps: 0, scratch: vec![0.0; model.q()] })
    }

    pub fn spins(&self) -> &[usize] {
        &self.spins
    }

    pub fn log_f(&self) -> f64 {
        self.log_f
    }

    pub fn recomputed_log_f(&self) -> f64 {
        self.model.log_f_raw(&self.spins)
    }

    fn site_log_weights(&self, site: usize, out: &mut [f64]) {
        let q = self.model.q;
        let lattice = &self.model.lattice;
        let incident = lattice.site_bonds(site).expect("site in range");
        for (a, w) in out.iter_mut().enumerate() {
            *w = incident
                .iter()
                .map(|sb| {
                    let bond = &lattice.bonds()[sb.bond];
                    let d = if sb.sign > 0 {
                        sub_mod(a, self.spins[bond.head], q)
                    } else {
                        sub_mod(self.spins[bond.base], a, q)
                    };
                    self.model.log_kernel[d]
                })
                .sum();
        }
    }

    /// `p(x_site = a | rest)` for every `a`.
    pub fn conditional(&self, site: usize) -> Vec<f64> {
        let mut w = vec![0.0; self.model.q];
        self.site_log_weights(site, &mut w);
        normalize(&w)
    }

    pub fn update_site(&mut self, site: usize, rng: &mut SimRng) {
        let mut w = std::mem::take(&mut self.scratch);
        self.site_log_weights(site, &mut w);
        let old = self.spins[site];
        let new = sample_categorical(&w, rng);
        self.log_f += w[new] - w[old];
        self.spins[site] = new;
        self.scratch = w;
    }

    pub fn sweep(&mut self, rng: &mut SimRng) {
        for site in 0..self.spins.len() {
            self.update_site(site, rng);
        }
        self.sweeps += 1;
        if self.sweeps.is_multiple_of(REFRESH_INTERVAL) {
            self.log_f = self.recomputed_log_f();
        }
    }
}

impl Chain for PrimalGibbs<'_> {
    fn next_log_f(&mut self, rng: &mut SimRng) -> f64 {
        self.sweep(rng);
        self.log_f
    }
}

/// Heat-bath chain on the dual graph over face and winding variables.
#[derive(Debug, Clone)]
pub struct DualGibbs<'a> {
    model: &'a DualModel,
    faces: Vec<usize>,
    windings: [usize; 2],
    bonds: Vec<usize>,
    log_f: f64,
    sweeps: usize,
    scratch: Vec<f64>,
}

impl<'a> DualGibbs<'a> {
    pub fn new(model: &'a DualModel, start: DualConfig) -> Result<Self> {
        if start.faces().len() != model.lattice().num_faces() || start.q() != model.q() {
            return Err(Error::AlphabetMismatch("start configuration does not fit the model".into()));
        }
        let faces = start.faces().to_vec();
        let windings = start.windings();
        let mut bonds = vec![0; model.lattice().num_bonds()];
        model.embed(&faces, windings, &mut bonds);
        let log_f = model.log_f_bonds(&bonds);
        Ok(Self { model, faces, windings, bonds, log_f, sweeps: 0, scratch: vec![0.0; model.q()] })
    }

    pub fn faces(&self) -> &[usize] {
        &self.faces
    }

    pub fn windings(&self) -> [usize; 2] {
        self.windings
    }

    /// The bond configuration induced by the current faces and windings.
    pub fn bonds(&self) -> &[usize] {
        &self.bonds
    }

    pub fn log_f(&self) -> f64 {
        self.log_f
    }

    pub fn recomputed_log_f(&self) -> f64 {
        let mut bonds = vec![0; self.bonds.len()];
        self.model.embed(&self.faces, self.windings, &mut bonds);
        self.model.log_f_bonds(&bonds)
    }

    fn face_log_weights(&self, face: usize, out: &mut [f64]) {
        let q = self.model.q;
        let boundary = self.model.lattice.face_bonds(face).expect("face in range");
        let current = self.faces[face];
        for (a, w) in out.iter_mut().enumerate() {
            let delta = sub_mod(a, current, q);
            *w = boundary
                .iter()
                .map(|sb| {
                    let y = self.bonds[sb.bond];
                    let y = if sb.sign > 0 { add_mod(y, delta, q) } else { sub_mod(y, delta, q) };
                    self.model.log_weights[y]
                })
                .sum();
        }
    }

    fn winding_log_weights(&self, axis: Axis, out: &mut [f64]) {
        let q = self.model.q;
        let current = self.windings[axis_index(axis)];
        let cycle = self.model.lattice.winding_bonds(axis);
        for (a, w) in out.iter_mut().enumerate() {
            let delta = sub_mod(a, current, q);
            *w = cycle.iter().map(|sb| self.model.log_weights[add_mod(self.bonds[sb.bond], delta, q)]).sum();
        }
    }

    pub fn face_conditional(&self, face: usize) -> Vec<f64> {
        let mut w = vec![0.0; self.model.q];
        self.face_log_weights(face, &mut w);
        normalize(&w)
    }

    pub fn winding_conditional(&self, axis: Axis) -> Vec<f64> {
        let mut w = vec![0.0; self.model.q];
        self.winding_log_weights(axis, &mut w);
        normalize(&w)
    }

    pub fn update_face(&mut self, face: usize, rng: &mut SimRng) {
        let q = self.model.q;
        let mut w = std::mem::take(&mut self.scratch);
        self.face_log_weights(face, &mut w);
        let old = self.faces[face];
        let new = sample_categorical(&w, rng);
        self.log_f += w[new] - w[old];
        let delta = sub_mod(new, old, q);
        for sb in self.model.lattice.face_bonds(face).expect("face in range") {
            let y = &mut self.bonds[sb.bond];
            *y = if sb.sign > 0 { add_mod(*y, delta, q) } else { sub_mod(*y, delta, q) };
        }
        self.faces[face] = new;
        self.scratch = w;
    }

    pub fn update_winding(&mut self, axis: Axis, rng: &mut SimRng) {
        let q = self.model.q;
        let mut w = std::mem::take(&mut self.scratch);
        self.winding_log_weights(axis, &mut w);
        let i = axis_index(axis);
        let old = self.windings[i];
        let new = sample_categorical(&w, rng);
        self.log_f += w[new] - w[old];
        let delta = sub_mod(new, old, q);
        for sb in self.model.lattice.winding_bonds(axis) {
            self.bonds[sb.bond] = add_mod(self.bonds[sb.bond], delta, q);
        }
        self.windings[i] = new;
        self.scratch = w;
    }

    pub fn sweep(&mut self, rng: &mut SimRng) {
        for face in 0..self.faces.len() {
            self.update_face(face, rng);
        }
        self.update_winding(Axis::Horizontal, rng);
        self.update_winding(Axis::Vertical, rng);
        self.sweeps += 1;
        if self.sweeps.is_multiple_of(REFRESH_INTERVAL) {
            self.log_f = self.recomputed_log_f();
        }
    }
}

fn axis_index(axis: Axis) -> usize {
    match axis {
        Axis::Horizontal => 0,
        Axis::Vertical => 1,
    }
}

impl Chain for DualGibbs<'_> {
    fn next_log_f(&mut self, rng: &mut SimRng) -> f64 {
        self.sweep(rng);
        self.log_f
    }
}

/// I.i.d. uniform spins.
pub struct PrimalUniform<'a> {
    model: &'a PrimalModel,
    spins: Vec<usize>,
}

impl<'a> PrimalUniform<'a> {
    pub fn new(model: &'a PrimalModel) -> Self {
        Self { model, spins: vec![0; model.lattice().num_sites()] }
    }
}

impl Chain for PrimalUniform<'_> {
    fn next_log_f(&mut self, rng: &mut SimRng) -> f64 {
        let q = self.model.q;
        for s in self.spins.iter_mut() {
            *s = rng.random_range(0..q);
        }
        self.model.log_f_raw(&self.spins)
    }
}

/// I.i.d. uniform points of the parity support.
pub struct DualUniform<'a> {
    model: &'a DualModel,
    faces: Vec<usize>,
    bonds: Vec<usize>,
}

impl<'a> DualUniform<'a> {
    pub fn new(model: &'a DualModel) -> Self {
        let lattice = model.lattice();
        Self { model, faces: vec![0; lattice.num_faces()], bonds: vec![0; lattice.num_bonds()] }
    }
}

impl Chain for DualUniform<'_> {
    fn next_log_f(&mut self, rng: &mut SimRng) -> f64 {
        let q = self.model.q;
        for f in self.faces.iter_mut() {
            *f = rng.random_range(0..q);
        }
        let windings = [rng.random_range(0..q), rng.random_range(0..q)];
        self.model.embed(&self.faces, windings, &mut self.bonds);
        self.model.log_f_bonds(&self.bonds)
    }
}

fn drive<C: Chain>(mut chain: C, rng: &mut SimRng, burn_in: usize, m: usize) -> Vec<f64> {
    for _ in 0..burn_in {
        chain.next_log_f(rng);
    }
    (0..m).map(|_| chain.next_log_f(rng)).collect()
}

/// Runs one chain and returns `m` values of `log f`.
///
/// Gibbs chains start from a uniform configuration drawn with the chain's own
/// RNG, discard `burn_in_sweeps` sweeps and then emit one value per sweep.
/// Uniform sampling ignores burn-in.
pub fn run_chain(
    spec: &ModelSpec,
    representation: Representation,
    method: Method,
    m: usize,
    config: SamplerConfig,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = rng_from_seed(config.seed);
    match (representation, method) {
        (Representation::Primal, Method::Gibbs) => {
            let model = PrimalModel::new(spec);
            let start = uniform_primal(spec, &mut rng);
            let chain = PrimalGibbs::new(&model, start)?;
            Ok(drive(chain, &mut rng, config.burn_in_sweeps, m))
        }
        (Representation::Dual, Method::Gibbs) => {
            let model = DualModel::new(spec)?;
            let start = uniform_dual(spec, &mut rng);
            let chain = DualGibbs::new(&model, start)?;
            Ok(drive(chain, &mut rng, config.burn_in_sweeps, m))
        }
        (Representation::Primal, Method::Uniform) => {
            let model = PrimalModel::new(spec);
            Ok(drive(PrimalUniform::new(&model), &mut rng, 0, m))
        }
        (Representation::Dual, Method::Uniform) => {
            let model = DualModel::new(spec)?;
            Ok(drive(DualUniform::new(&model), &mut rng, 0, m))
        }
    }
}
