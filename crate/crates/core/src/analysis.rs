//! Closed forms: the `s`-term character state and its measurement law, the
//! block-phase identity behind the circuit, and the exact success formulas
//! for the summation algorithm and for full-function identification.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{QsumError, Result};
use crate::operators::FunctionTable;
use crate::register::{circular_distance, fourier_state, root_of_unity, StateVector};

/// `4/π²`, the guaranteed mass of the central peak.
pub const CENTRAL_MASS_FLOOR: f64 = 4.0 / (PI * PI);

fn check_block_count(k: usize, s: usize) -> Result<()> {
    if k < 2 {
        return Err(QsumError::InvalidModulus(k));
    }
    if s == 0 || s > k {
        return Err(QsumError::InvalidBlockCount { s, k });
    }
    Ok(())
}

/// `|A_s⟩ = s^{-1/2} Σ_{ℓ=1}^{s} ω^{−ℓA} |ω^{s−ℓ}⟩`.
pub fn a_state(k: usize, s: usize, a: usize) -> Result<StateVector> {
    check_block_count(k, s)?;
    if a >= k {
        return Err(QsumError::ResidueOutOfRange {
            value: a,
            modulus: k,
        });
    }
    let scale = 1.0 / (s as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); k];
    for l in 1..=s {
        let coeff = root_of_unity(k, -((l * a) as i64)) * scale;
        for (out, v) in amps.iter_mut().zip(fourier_state(k, s - l)?.amplitudes()) {
            *out += coeff * v;
        }
    }
    Ok(StateVector::from_raw(amps))
}

/// `(1/sk) (sin(πs(y−A)/k) / sin(π(y−A)/k))²`, equal to `s/k` at `y = A`.
///
/// Requires `1 ≤ s ≤ k`; `a` and `y` are read mod k.
pub fn lemma3_prob(k: usize, s: usize, a: usize, y: usize) -> f64 {
    debug_assert!(k >= 2 && (1..=k).contains(&s));
    let d = (y % k + k - a % k) % k;
    if d == 0 {
        return s as f64 / k as f64;
    }
    let (s_f, k_f, d_f) = (s as f64, k as f64, d as f64);
    let ratio = (PI * s_f * d_f / k_f).sin() / (PI * d_f / k_f).sin();
    ratio * ratio / (s_f * k_f)
}

/// Mass of the measurement law within circular distance `⌊k/2s⌋` of the peak.
pub fn central_mass(k: usize, s: usize) -> Result<f64> {
    check_block_count(k, s)?;
    let radius = k / (2 * s);
    Ok((0..k)
        .filter(|&y| circular_distance(k, y, 0) <= radius)
        .map(|y| lemma3_prob(k, s, 0, y))
        .sum())
}

/// Sums `B_m = f((m−1)r) + … + f(mr−1)` for `m = 1..=s`.
fn block_sums(f: &FunctionTable, r: usize) -> Vec<usize> {
    f.values()
        .chunks(r)
        .map(|chunk| chunk.iter().sum::<usize>() % f.k())
        .collect()
}

/// Builds both sides of the block-phase identity
///
/// `ω^{Σ_m m B_m} |Σf_s⟩ = s^{-1/2} Σ_ℓ ω^{Σ_m (m−ℓ) B_m} |ω^{s−ℓ}⟩`
///
/// as explicit vectors and returns their max-norm distance.
pub fn lemma4_check(f: &FunctionTable, r: usize) -> Result<f64> {
    let (n, k) = (f.n(), f.k());
    if r == 0 || r > n {
        return Err(QsumError::InvalidStep { n, r });
    }
    if n % r != 0 {
        return Err(QsumError::StepDoesNotDivide { n, r });
    }
    let s = n / r;
    check_block_count(k, s)?;

    let blocks = block_sums(f, r);
    let global: i64 = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (i as i64 + 1) * *b as i64)
        .sum();
    let global_phase = root_of_unity(k, global);
    let lhs: Vec<Complex64> = a_state(k, s, f.sum())?
        .amplitudes()
        .iter()
        .map(|a| global_phase * a)
        .collect();

    let scale = 1.0 / (s as f64).sqrt();
    let mut rhs = vec![Complex64::new(0.0, 0.0); k];
    for l in 1..=s {
        let coeff = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| root_of_unity(k, (i as i64 + 1 - l as i64) * *b as i64))
            .fold(Complex64::new(scale, 0.0), |acc, w| acc * w);
        for (out, v) in rhs.iter_mut().zip(fourier_state(k, s - l)?.amplitudes()) {
            *out += coeff * v;
        }
    }
    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(QsumError::ZeroDimension);
    }
    if k < 2 {
        return Err(QsumError::InvalidModulus(k));
    }
    Ok(())
}

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Worst-case success of the `n − r` query algorithm: `min{⌊n/r⌋/k, 1}`.
pub fn success_probability(n: usize, k: usize, r: usize) -> Result<BigRational> {
    check_nk(n, k)?;
    if r == 0 || r > n {
        return Err(QsumError::InvalidStep { n, r });
    }
    let p = ratio(n / r, k);
    Ok(if p > BigRational::one() {
        BigRational::one()
    } else {
        p
    })
}

fn binomial(n: usize, j: usize) -> BigInt {
    (0..j).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Probability that `q` queries identify all of `f: Z_n → Z_k`:
/// `k^{−n} Σ_{j=0}^{q} C(n, j) (k−1)^j`.
pub fn vandam_identify_prob(n: usize, k: usize, q: usize) -> Result<BigRational> {
    check_nk(n, k)?;
    if q > n {
        return Err(QsumError::QueryCountOutOfRange { q, n });
    }
    let base = BigInt::from(k - 1);
    let mut power = BigInt::one();
    let mut total = BigInt::zero();
    for j in 0..=q {
        total += binomial(n, j) * &power;
        power *= &base;
    }
    Ok(BigRational::new(total, BigInt::from(k).pow(n as u32)))
}

/// Upper bound on summing via identification: `p_q + (1 − p_q)/k`.
pub fn vandam_sum_bound(n: usize, k: usize, q: usize) -> Result<BigRational> {
    let p = vandam_identify_prob(n, k, q)?;
    let miss = BigRational::one() - &p;
    Ok(p + miss / BigInt::from(k))
}

/// `num/den` rendering of an exact probability.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("probabilities are finite")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub q: usize,
    pub exact: BigRational,
}

impl CurvePoint {
    pub fn p(&self) -> f64 {
        ratio_to_f64(&self.exact)
    }
}

/// Success probability as a function of the query count `q = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub n: usize,
    pub k: usize,
    pub points: Vec<CurvePoint>,
}

impl Curve {
    /// First query count at which the curve reaches probability one.
    pub fn first_certain(&self) -> Option<usize> {
        self.points
            .iter()
            .find(|pt| pt.exact == BigRational::one())
            .map(|pt| pt.q)
    }
}

/// The step curve of the summation algorithm (`q = n − r`, and one at
/// `q = n`) and the smooth identification bound `p_q + (1 − p_q)/k`.
pub fn figure1_curves(n: usize, k: usize) -> Result<(Curve, Curve)> {
    check_nk(n, k)?;
    let mut steps = Vec::with_capacity(n + 1);
    let mut smooth = Vec::with_capacity(n + 1);
    for q in 0..=n {
        let exact = if q < n {
            success_probability(n, k, n - q)?
        } else {
            BigRational::one()
        };
        steps.push(CurvePoint { q, exact });
        smooth.push(CurvePoint {
            q,
            exact: vandam_sum_bound(n, k, q)?,
        });
    }
    Ok((
        Curve {
            n,
            k,
            points: steps,
        },
        Curve {
            n,
            k,
            points: smooth,
        },
    ))
}
