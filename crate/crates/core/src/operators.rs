//! Dense unitaries on `C^d` and `C^n ⊗ C^k`: the cyclic shift, the Fourier
//! transform, the oracle, and the two oracle-independent permutations of the
//! mixed basis `{|x⟩ ⊗ |ω^a⟩}` that steer the adaptive circuit.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QsumError, Result};
use crate::register::{joint_index, JointState, StateVector};

/// Tolerance on `‖U†U − I‖∞` for every builder output.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryOp {
    /// Wraps `entries` after checking shape and unitarity.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(QsumError::ZeroDimension);
        }
        if entries.len() != dim * dim {
            return Err(QsumError::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(QsumError::NonFinite);
        }
        let op = Self { dim, entries };
        let defect = op.unitarity_defect();
        if defect >= UNITARITY_TOLERANCE {
            return Err(QsumError::NotUnitary(defect));
        }
        Ok(op)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(QsumError::ZeroDimension);
        }
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Ok(Self { dim, entries })
    }

    /// Permutation matrix sending `|i⟩` to `|map(i)⟩`.
    fn permutation(dim: usize, map: impl Fn(usize) -> usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for col in 0..dim {
            entries[map(col) * dim + col] = ONE;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Self { dim: d, entries }
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(QsumError::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for m in 0..d {
                let a = self.entries[r * d + m];
                if a == ZERO {
                    continue;
                }
                let row = &other.entries[m * d..(m + 1) * d];
                for (out, b) in entries[r * d..(r + 1) * d].iter_mut().zip(row) {
                    *out += a * b;
                }
            }
        }
        Ok(Self { dim: d, entries })
    }

    /// `self ⊗ other` with `self` acting on the more significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut entries = vec![ZERO; d * d];
        for ar in 0..da {
            for ac in 0..da {
                let a = self.entries[ar * da + ac];
                if a == ZERO {
                    continue;
                }
                for br in 0..db {
                    for bc in 0..db {
                        entries[(ar * db + br) * d + ac * db + bc] = a * other.entries[br * db + bc];
                    }
                }
            }
        }
        Self { dim: d, entries }
    }

    /// `‖U†U − I‖∞`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut gram = vec![ZERO; d * d];
        // Accumulate row by row: (U†U)_{ij} = Σ_m conj(U_mi) U_mj.
        for m in 0..d {
            let row = &self.entries[m * d..(m + 1) * d];
            for (i, a) in row.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                let a = a.conj();
                for (out, b) in gram[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *out += a * b;
                }
            }
        }
        for i in 0..d {
            gram[i * d + i] -= ONE;
        }
        gram.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖∞`.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(QsumError::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn apply_slice(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        if amps.len() != self.dim {
            return Err(QsumError::DimensionMismatch {
                expected: self.dim,
                actual: amps.len(),
            });
        }
        let d = self.dim;
        Ok((0..d)
            .map(|r| {
                self.entries[r * d..(r + 1) * d]
                    .iter()
                    .zip(amps)
                    .map(|(u, a)| u * a)
                    .sum()
            })
            .collect())
    }

    pub fn apply(&self, state: &JointState) -> Result<JointState> {
        let amps = self.apply_slice(state.amplitudes())?;
        Ok(JointState::from_raw(state.n(), state.k(), amps))
    }

    pub fn apply_vector(&self, state: &StateVector) -> Result<StateVector> {
        Ok(StateVector::from_raw(self.apply_slice(state.amplitudes())?))
    }
}

/// The hidden function `f: Z_n → Z_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FunctionTable {
    n: usize,
    k: usize,
    values: Vec<usize>,
}

impl FunctionTable {
    pub fn new(k: usize, values: Vec<usize>) -> Result<Self> {
        if k < 2 {
            return Err(QsumError::InvalidModulus(k));
        }
        if values.is_empty() {
            return Err(QsumError::ZeroDimension);
        }
        if let Some(&value) = values.iter().find(|&&v| v >= k) {
            return Err(QsumError::ResidueOutOfRange { value, modulus: k });
        }
        Ok(Self {
            n: values.len(),
            k,
            values,
        })
    }

    /// Like [`FunctionTable::new`] but also checks the declared length.
    pub fn with_len(n: usize, k: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != n {
            return Err(QsumError::TableLength {
                expected: n,
                actual: values.len(),
            });
        }
        Self::new(k, values)
    }

    pub fn zero(n: usize, k: usize) -> Result<Self> {
        Self::new(k, vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, x: usize) -> usize {
        self.values[x]
    }

    /// `Σ_x f(x) mod k`.
    pub fn sum(&self) -> usize {
        self.values.iter().fold(0, |acc, v| (acc + v) % self.k)
    }

    /// Pointwise sum mod k.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(QsumError::InvalidModulus(other.k));
        }
        if self.n != other.n {
            return Err(QsumError::TableLength {
                expected: self.n,
                actual: other.n,
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a + b) % self.k)
            .collect();
        Ok(Self {
            n: self.n,
            k: self.k,
            values,
        })
    }

    /// Restriction to positions `[offset, offset + len)`, re-indexed from 0.
    pub fn slice(&self, offset: usize, len: usize) -> Result<Self> {
        if len == 0 || offset + len > self.n {
            return Err(QsumError::PositionOutOfRange {
                x: offset + len,
                n: self.n,
            });
        }
        Self::new(self.k, self.values[offset..offset + len].to_vec())
    }
}

/// Cyclic shift `X: |z⟩ ↦ |z + 1 mod d⟩`.
pub fn shift_op(d: usize) -> Result<UnitaryOp> {
    if d == 0 {
        return Err(QsumError::ZeroDimension);
    }
    Ok(UnitaryOp::permutation(d, |z| (z + 1) % d))
}

/// Fourier transform `F|y⟩ = k^{-1/2} Σ_ℓ ω^{ℓy} |ℓ⟩`.
pub fn fourier_op(k: usize) -> Result<UnitaryOp> {
    if k < 2 {
        return Err(QsumError::InvalidModulus(k));
    }
    let scale = 1.0 / (k as f64).sqrt();
    let mut entries = vec![ZERO; k * k];
    for l in 0..k {
        for y in 0..k {
            entries[l * k + y] = crate::register::root_of_unity(k, (l * y) as i64) * scale;
        }
    }
    Ok(UnitaryOp { dim: k, entries })
}

/// Change of basis `W|a⟩ = |ω^a⟩` on `C^k`.
pub fn character_basis_op(k: usize) -> Result<UnitaryOp> {
    // Column a of W is |ω^a⟩, i.e. column (−a mod k) of F.
    let f = fourier_op(k)?;
    let mut entries = vec![ZERO; k * k];
    for l in 0..k {
        for a in 0..k {
            entries[l * k + a] = f.entry(l, (k - a) % k);
        }
    }
    Ok(UnitaryOp { dim: k, entries })
}

/// Oracle `O_f: |x⟩|y⟩ ↦ |x⟩|y + f(x) mod k⟩`.
pub fn oracle_op(f: &FunctionTable) -> UnitaryOp {
    let k = f.k();
    UnitaryOp::permutation(f.n() * k, |i| {
        let (x, y) = (i / k, i % k);
        joint_index(k, x, (y + f.value(x)) % k)
    })
}

/// `X ⊗ I` on `C^n ⊗ C^k`: advances the query position.
pub fn position_shift_op(n: usize, k: usize) -> Result<UnitaryOp> {
    if k < 2 {
        return Err(QsumError::InvalidModulus(k));
    }
    Ok(shift_op(n)?.kron(&UnitaryOp::identity(k)?))
}

/// Realizes a permutation `π` of the mixed basis `|x⟩ ⊗ |ω^a⟩` as the dense
/// matrix `(I ⊗ W) P_π (I ⊗ W)†`.
fn mixed_basis_permutation(
    n: usize,
    k: usize,
    map: impl Fn(usize, usize) -> (usize, usize),
) -> Result<UnitaryOp> {
    if n == 0 {
        return Err(QsumError::ZeroDimension);
    }
    let w = character_basis_op(k)?;
    let d = n * k;
    let mut entries = vec![ZERO; d * d];
    // Σ_{x,a} |x'⟩⟨x| ⊗ |ω^b⟩⟨ω^a| with (x', b) = π(x, a).
    for x in 0..n {
        for a in 0..k {
            let (xt, b) = map(x, a);
            for row in 0..k {
                let wb = w.entry(row, b);
                for col in 0..k {
                    entries[joint_index(k, xt, row) * d + joint_index(k, x, col)] +=
                        wb * w.entry(col, a).conj();
                }
            }
        }
    }
    Ok(UnitaryOp { dim: d, entries })
}

/// Closing permutation for a core circuit with step `r`: swaps
/// `|n−r⟩|ω^{k−1}⟩ ↔ |0⟩|ω^0⟩` and fixes the rest of the mixed basis.
/// `r` is taken mod n.
pub fn k_op_for_step(n: usize, k: usize, r: usize) -> Result<UnitaryOp> {
    if n == 0 {
        return Err(QsumError::ZeroDimension);
    }
    let last = (n - r % n) % n;
    mixed_basis_permutation(n, k, |x, a| {
        if x == last && a == k - 1 {
            (0, 0)
        } else if x == 0 && a == 0 {
            (last, k - 1)
        } else {
            (x, a)
        }
    })
}

/// `K`: swaps `|n−1⟩|ω^{k−1}⟩ ↔ |0⟩|ω^0⟩`, identity elsewhere on the
/// mixed basis. This is [`k_op_for_step`] with `r = 1`.
pub fn k_op(n: usize, k: usize) -> Result<UnitaryOp> {
    k_op_for_step(n, k, 1)
}

/// `J_r` on the mixed basis: `|x⟩|ω^0⟩` is fixed, `|x⟩|ω^{k−1}⟩ ↦
/// |x + r⟩|ω^1⟩`, and `|x⟩|ω^a⟩ ↦ |x⟩|ω^{a+1}⟩` otherwise.
pub fn j_op(n: usize, k: usize, r: usize) -> Result<UnitaryOp> {
    if n == 0 {
        return Err(QsumError::ZeroDimension);
    }
    mixed_basis_permutation(n, k, |x, a| {
        if a == 0 {
            (x, 0)
        } else if a == k - 1 {
            ((x + r) % n, 1)
        } else {
            (x, a + 1)
        }
    })
}
