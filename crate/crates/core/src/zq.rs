//! Harmonic analysis over the cyclic group Z_q.
//!
//! Kernels are functions on Z_q describing a shift-invariant bond weight
//! `h(x, x') = kappa(x - x')`. Their transforms use the unnormalized forward
//! sum `f^(y) = sum_x f(x) exp(2 pi i x y / q)`; the inverse carries the `1/q`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest imaginary residue tolerated when a transform is stored as a real table.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// An element of Z_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElement {
    value: usize,
    q: usize,
}

impl GroupElement {
    pub fn new(value: usize, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidAlphabet(q));
        }
        if value >= q {
            return Err(Error::ElementOutOfRange { value, q });
        }
        Ok(Self { value, q })
    }

    /// Reduces an arbitrary integer into Z_q.
    pub fn reduce(value: i64, q: usize) -> Self {
        let value = value.rem_euclid(q as i64) as usize;
        Self { value, q }
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn modulus(self) -> usize {
        self.q
    }
}

impl std::ops::Neg for GroupElement {
    type Output = GroupElement;

    fn neg(self) -> Self {
        Self { value: (self.q - self.value) % self.q, q: self.q }
    }
}

impl std::ops::Add for GroupElement {
    type Output = GroupElement;

    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.q, rhs.q);
        Self { value: (self.value + rhs.value) % self.q, q: self.q }
    }
}

impl std::ops::Sub for GroupElement {
    type Output = GroupElement;

    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.q, rhs.q);
        Self { value: (self.value + self.q - rhs.value) % self.q, q: self.q }
    }
}

/// `(a - b) mod q` for raw residues.
#[inline]
pub fn sub_mod(a: usize, b: usize, q: usize) -> usize {
    (a + q - b) % q
}

/// `(a + b) mod q` for raw residues.
#[inline]
pub fn add_mod(a: usize, b: usize, q: usize) -> usize {
    (a + b) % q
}

/// The character `chi_y(x) = exp(2 pi i x y / q)`.
pub fn character(y: GroupElement, x: GroupElement) -> Complex64 {
    let q = y.q;
    // Reduce the product first so the angle stays in [0, 2 pi).
    let k = (x.value * y.value) % q;
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / q as f64)
}

/// A real function on Z_q, `values[x] = kappa(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    values: Vec<f64>,
}

/// The transform of a kernel, `values[y] = kappa^(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    values: Vec<f64>,
}

macro_rules! table_common {
    ($ty:ident) => {
        impl $ty {
            pub fn new(values: Vec<f64>) -> Result<Self> {
                if values.len() < 2 {
                    return Err(Error::InvalidAlphabet(values.len()));
                }
                if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
                    return Err(Error::Config(format!("non-finite table entry {bad}")));
                }
                Ok(Self { values })
            }

            pub fn q(&self) -> usize {
                self.values.len()
            }

            pub fn values(&self) -> &[f64] {
                &self.values
            }

            pub fn get(&self, x: usize) -> f64 {
                self.values[x]
            }

            /// `true` when `values[x] == values[q - x]` up to `tol`.
            pub fn is_even(&self, tol: f64) -> bool {
                let q = self.q();
                (0..q).all(|x| (self.values[x] - self.values[(q - x) % q]).abs() <= tol)
            }
        }
    };
}

table_common!(KernelTable);
table_common!(SpectrumTable);

fn check_alphabet(q: usize) -> Result<()> {
    if q < 2 {
        Err(Error::InvalidAlphabet(q))
    } else {
        Ok(())
    }
}

fn transform(values: &[f64], sign: f64) -> Result<Vec<f64>> {
    let q = values.len();
    let mut out = Vec::with_capacity(q);
    let mut residue: f64 = 0.0;
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for y in 0..q {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, &v) in values.iter().enumerate() {
            let k = (x * y) % q;
            let angle = sign * 2.0 * PI * k as f64 / q as f64;
            acc += Complex64::from_polar(v, angle);
        }
        residue = residue.max(acc.im.abs() / scale);
        out.push(acc.re);
    }
    if residue > IMAG_TOLERANCE {
        return Err(Error::NonRealSpectrum(residue));
    }
    Ok(out)
}

/// Forward transform (unnormalized).
pub fn dft(kernel: &KernelTable) -> Result<SpectrumTable> {
    Ok(SpectrumTable { values: transform(&kernel.values, 1.0)? })
}

/// Inverse transform with `1/q` normalization.
pub fn idft(spectrum: &SpectrumTable) -> Result<KernelTable> {
    let q = spectrum.q() as f64;
    let values = transform(&spectrum.values, -1.0)?.into_iter().map(|v| v / q).collect();
    Ok(KernelTable { values })
}

/// Potts bond kernel: `e^beta` on agreement, `e^-beta` otherwise.
pub fn potts_kernel(beta: f64, q: usize) -> Result<KernelTable> {
    check_alphabet(q)?;
    let mut values = vec![(-beta).exp(); q];
    values[0] = beta.exp();
    Ok(KernelTable { values })
}

pub fn potts_spectrum_closed_form(beta: f64, q: usize) -> Result<SpectrumTable> {
    check_alphabet(q)?;
    let (up, down) = (beta.exp(), (-beta).exp());
    let mut values = vec![up - down; q];
    values[0] = up + (q as f64 - 1.0) * down;
    Ok(SpectrumTable { values })
}

/// Clock bond kernel `exp(beta cos(2 pi x / q))`.
pub fn clock_kernel(beta: f64, q: usize) -> Result<KernelTable> {
    check_alphabet(q)?;
    let values = (0..q).map(|x| (beta * clock_cos(x, q)).exp()).collect();
    Ok(KernelTable { values })
}

/// `cos(2 pi x / q)` with the quarter-turn points returned exactly.
pub(crate) fn clock_cos(x: usize, q: usize) -> f64 {
    let x = x % q;
    // Fold onto [0, q/2] so that cos(x) and cos(q - x) are bitwise equal.
    let x = x.min(q - x);
    if 4 * x == q {
        0.0
    } else if 2 * x == q {
        -1.0
    } else if x == 0 {
        1.0
    } else {
        (2.0 * PI * x as f64 / q as f64).cos()
    }
}

pub fn clock_spectrum_closed_form_q4(beta: f64) -> SpectrumTable {
    let (up, down) = (beta.exp(), (-beta).exp());
    SpectrumTable { values: vec![up + down + 2.0, up - down, up + down - 2.0, up - down] }
}

/// Default truncation order for [`clock_spectrum_series`].
pub fn default_series_order(beta: f64) -> usize {
    (std::f64::consts::E * beta).ceil() as usize + 40
}

/// Truncated character expansion of the clock spectrum at `k`.
///
/// Uses `cos^n(2 pi x/q) = 2^-n sum_l C(n,l) chi_{n-2l}(x)`, whose transform at
/// `k` is `q 2^-n sum_l C(n,l) [n - 2l + k = 0 mod q]`. Every term is
/// non-negative, which is what makes the clock spectrum positive.
pub fn clock_spectrum_series(beta: f64, k: GroupElement, n_max: usize) -> f64 {
    let q = k.q as i64;
    let mut total = 0.0;
    // beta^n / n!
    let mut weight = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            weight *= beta / n as f64;
        }
        if weight == 0.0 && n > 0 {
            break;
        }
        // C(n, l) / 2^n, updated multiplicatively.
        let mut binom = 0.5f64.powi(n as i32);
        let mut hits = 0.0;
        for l in 0..=n {
            if l > 0 {
                binom *= (n - l + 1) as f64 / l as f64;
            }
            if (n as i64 - 2 * l as i64 + k.value as i64).rem_euclid(q) == 0 {
                hits += binom;
            }
        }
        total += weight * q as f64 * hits;
    }
    total
}

/// Tail bound `q (e^beta - sum_{n <= n_max} beta^n / n!)` on the series truncation error.
pub fn clock_series_tail_bound(beta: f64, q: usize, n_max: usize) -> f64 {
    let mut weight = 1.0;
    let mut partial = 1.0;
    for n in 1..=n_max {
        weight *= beta / n as f64;
        partial += weight;
    }
    (q as f64 * (beta.exp() - partial)).max(0.0)
}

pub fn is_positive_spectrum(spectrum: &SpectrumTable) -> bool {
    spectrum.values.iter().all(|&v| v > 0.0)
}
