//! Amplitude vectors on `C^d` and on the two-register space `C^n ⊗ C^k`.
//!
//! Joint states use the fixed layout `idx(x, y) = x * k + y`, with `x` the
//! query position and `y` the value residue. Every other module relies on
//! this convention through [`joint_index`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QsumError, Result};

pub type ComplexAmplitude = Complex64;

/// Tolerance on `Σ|a|² = 1` for every stored state.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// `ω^m` with `ω = e^{2πi/k}`. The exponent is reduced mod k first.
pub fn root_of_unity(k: usize, m: i64) -> Complex64 {
    let m = m.rem_euclid(k as i64);
    Complex64::from_polar(1.0, 2.0 * PI * m as f64 / k as f64)
}

#[inline]
pub fn joint_index(k: usize, x: usize, y: usize) -> usize {
    x * k + y
}

fn check_amplitudes(amps: &[Complex64]) -> Result<()> {
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(QsumError::NonFinite);
    }
    let norm = norm_sqr(amps);
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(QsumError::NotNormalized(norm));
    }
    Ok(())
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn check_modulus(k: usize) -> Result<()> {
    if k < 2 {
        Err(QsumError::InvalidModulus(k))
    } else {
        Ok(())
    }
}

/// A normalized vector in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(QsumError::ZeroDimension);
        }
        check_amplitudes(&amps)?;
        Ok(Self { amps })
    }

    pub(crate) fn from_raw(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(QsumError::ZeroDimension);
        }
        if index >= dim {
            return Err(QsumError::PositionOutOfRange { x: index, n: dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        inner_product(&self.amps, &other.amps)
    }

    /// Computational-basis measurement probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }
}

/// A normalized vector in `C^n ⊗ C^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    n: usize,
    k: usize,
    amps: Vec<Complex64>,
}

impl JointState {
    pub fn new(n: usize, k: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(QsumError::ZeroDimension);
        }
        check_modulus(k)?;
        if amps.len() != n * k {
            return Err(QsumError::DimensionMismatch {
                expected: n * k,
                actual: amps.len(),
            });
        }
        check_amplitudes(&amps)?;
        Ok(Self { n, k, amps })
    }

    pub(crate) fn from_raw(n: usize, k: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), n * k);
        Self { n, k, amps }
    }

    /// `|x⟩ ⊗ |y⟩` in the computational basis.
    pub fn basis(n: usize, k: usize, x: usize, y: usize) -> Result<Self> {
        if n == 0 {
            return Err(QsumError::ZeroDimension);
        }
        check_modulus(k)?;
        if x >= n {
            return Err(QsumError::PositionOutOfRange { x, n });
        }
        if y >= k {
            return Err(QsumError::ResidueOutOfRange {
                value: y,
                modulus: k,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n * k];
        amps[joint_index(k, x, y)] = Complex64::new(1.0, 0.0);
        Ok(Self { n, k, amps })
    }

    /// `|x⟩ ⊗ value`.
    pub fn product(n: usize, x: usize, value: &StateVector) -> Result<Self> {
        let k = value.dim();
        check_modulus(k)?;
        if x >= n {
            return Err(QsumError::PositionOutOfRange { x, n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n * k];
        amps[x * k..(x + 1) * k].copy_from_slice(value.amplitudes());
        Ok(Self { n, k, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, x: usize, y: usize) -> Complex64 {
        self.amps[joint_index(self.k, x, y)]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Probability that the query register reads `x`.
    pub fn position_probability(&self, x: usize) -> f64 {
        norm_sqr(&self.amps[x * self.k..(x + 1) * self.k])
    }

    /// Unnormalized value-register slice at position `x`.
    pub fn value_slice(&self, x: usize) -> &[Complex64] {
        &self.amps[x * self.k..(x + 1) * self.k]
    }
}

/// Probabilities of each residue `y ∈ Z_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    k: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let k = probs.len();
        check_modulus(k)?;
        if probs.iter().any(|p| !p.is_finite() || *p < -NORM_TOLERANCE) {
            return Err(QsumError::NonFinite);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(QsumError::NotNormalized(total));
        }
        Ok(Self { k, probs })
    }

    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        Self {
            k: probs.len(),
            probs,
        }
    }

    pub fn point_mass(k: usize, y: usize) -> Result<Self> {
        check_modulus(k)?;
        if y >= k {
            return Err(QsumError::ResidueOutOfRange {
                value: y,
                modulus: k,
            });
        }
        let mut probs = vec![0.0; k];
        probs[y] = 1.0;
        Ok(Self { k, probs })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        check_modulus(k)?;
        Ok(Self {
            k,
            probs: vec![1.0 / k as f64; k],
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, y: usize) -> f64 {
        self.probs[y % self.k]
    }

    /// Distribution of `a + b mod k` for independent `a ~ self`, `b ~ other`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(QsumError::DimensionMismatch {
                expected: self.k,
                actual: other.k,
            });
        }
        let k = self.k;
        let mut probs = vec![0.0; k];
        for (a, pa) in self.probs.iter().enumerate() {
            if *pa == 0.0 {
                continue;
            }
            for (b, pb) in other.probs.iter().enumerate() {
                probs[(a + b) % k] += pa * pb;
            }
        }
        Ok(Self { k, probs })
    }

    /// Total mass within circular distance `radius` of `center` in `Z_k`.
    pub fn mass_within(&self, center: usize, radius: usize) -> f64 {
        (0..self.k)
            .filter(|&y| circular_distance(self.k, y, center) <= radius)
            .map(|y| self.probs[y])
            .sum()
    }
}

/// Distance between residues on the cycle `Z_k`.
pub fn circular_distance(k: usize, a: usize, b: usize) -> usize {
    let d = (a % k + k - b % k) % k;
    d.min(k - d)
}

/// Fourier (character) state `|ω^a⟩ = k^{-1/2} Σ_ℓ ω^{-aℓ} |ℓ⟩`.
///
/// It is the eigenvector of the cyclic shift with eigenvalue `ω^a`.
pub fn fourier_state(k: usize, a: usize) -> Result<StateVector> {
    check_modulus(k)?;
    if a >= k {
        return Err(QsumError::ResidueOutOfRange {
            value: a,
            modulus: k,
        });
    }
    let scale = 1.0 / (k as f64).sqrt();
    let amps = (0..k)
        .map(|l| root_of_unity(k, -((a * l) as i64)) * scale)
        .collect();
    Ok(StateVector::from_raw(amps))
}

/// Measure the value register in the computational basis.
pub fn measure_second_register(state: &JointState) -> OutcomeDistribution {
    let k = state.k;
    let mut probs = vec![0.0; k];
    for (i, a) in state.amps.iter().enumerate() {
        probs[i % k] += a.norm_sqr();
    }
    OutcomeDistribution::from_raw(probs)
}

/// Anything that is a flat amplitude vector.
pub trait Amplitudes {
    fn amps(&self) -> &[Complex64];
}

impl Amplitudes for StateVector {
    fn amps(&self) -> &[Complex64] {
        &self.amps
    }
}

impl Amplitudes for JointState {
    fn amps(&self) -> &[Complex64] {
        &self.amps
    }
}

impl Amplitudes for [Complex64] {
    fn amps(&self) -> &[Complex64] {
        self
    }
}

impl Amplitudes for Vec<Complex64> {
    fn amps(&self) -> &[Complex64] {
        self
    }
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner_product(u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    if u.len() != v.len() {
        return Err(QsumError::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    Ok(u.iter().zip(v).map(|(a, b)| a.conj() * b).sum())
}

/// Smallest `‖u − φv‖∞` over unit phases `φ`, with `φ` taken from the phase
/// of `⟨v|u⟩` (zero entries stay harmless).
pub fn phase_distance<U, V>(u: &U, v: &V) -> Result<f64>
where
    U: Amplitudes + ?Sized,
    V: Amplitudes + ?Sized,
{
    let (u, v) = (u.amps(), v.amps());
    let overlap = inner_product(v, u)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(u.iter()
        .zip(v)
        .map(|(a, b)| (a - phase * b).norm())
        .fold(0.0, f64::max))
}

/// Equality up to a global phase, within `tol` in the max norm.
pub fn phase_equal<U, V>(u: &U, v: &V, tol: f64) -> Result<bool>
where
    U: Amplitudes + ?Sized,
    V: Amplitudes + ?Sized,
{
    Ok(phase_distance(u, v)? <= tol)
}
