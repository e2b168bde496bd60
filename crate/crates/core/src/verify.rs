//! Exhaustive verification: every oracle `f: Z_n → Z_k` on a small grid is
//! simulated and compared against the closed forms in [`crate::analysis`].
//!
//! Oracle enumeration runs in parallel; every reduction is taken in
//! lexicographic order, so reports are bit-identical across runs.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::algorithm::{run_core, run_sum, trace_small, SmallInstance};
use crate::analysis::{
    a_state, central_mass, figure1_curves, lemma3_prob, lemma4_check, ratio_to_f64,
    success_probability, vandam_identify_prob, vandam_sum_bound, CENTRAL_MASS_FLOOR,
};
use crate::error::{QsumError, Result};
use crate::operators::{
    character_basis_op, fourier_op, j_op, k_op, k_op_for_step, oracle_op, position_shift_op,
    shift_op, FunctionTable, UnitaryOp,
};
use crate::register::{
    fourier_state, joint_index, phase_distance, root_of_unity, JointState,
};

pub const DEFAULT_CAP: u128 = 1_000_000;

/// Which instances the suite covers and how strictly it compares.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub max_n: usize,
    pub max_k: usize,
    /// Tolerance for end-to-end probabilities.
    pub tolerance: f64,
    /// Tolerance for algebraic identities between states and operators.
    pub algebraic_tolerance: f64,
    /// Largest `k` for the measurement-law checks.
    pub max_lemma_k: usize,
    /// Largest `n` for the `k = 2` parity checks.
    pub max_parity_n: usize,
    /// Grid of the exact-rational formula checks.
    pub max_formula_n: usize,
    pub max_formula_k: usize,
    /// Maximum oracles enumerated per grid cell.
    pub cap: u128,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            max_n: 4,
            max_k: 4,
            tolerance: 1e-9,
            algebraic_tolerance: 1e-12,
            max_lemma_k: 64,
            max_parity_n: 8,
            max_formula_n: 12,
            max_formula_k: 6,
            cap: DEFAULT_CAP,
        }
    }
}

impl GridSpec {
    pub fn extended() -> Self {
        Self {
            max_n: 5,
            max_k: 5,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|observed − expected| ≤ tolerance`
    Equal,
    /// `observed ≥ expected − tolerance`
    AtLeast,
    /// `observed ≤ expected + tolerance`
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub params: String,
    pub relation: Relation,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    fn push(
        &mut self,
        name: &str,
        params: String,
        relation: Relation,
        expected: f64,
        observed: f64,
        tolerance: f64,
    ) {
        let pass = match relation {
            Relation::Equal => (observed - expected).abs() <= tolerance,
            Relation::AtLeast => observed >= expected - tolerance,
            Relation::AtMost => observed <= expected + tolerance,
        };
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.checks.push(Check {
            name: name.to_string(),
            params,
            relation,
            expected,
            observed,
            tolerance,
            pass,
        });
    }

    /// A yes/no claim; recorded as `observed = 1` when it holds.
    fn push_claim(&mut self, name: &str, params: String, holds: bool) {
        let observed = if holds { 1.0 } else { 0.0 };
        self.push(name, params, Relation::Equal, 1.0, observed, 0.0);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.checks.iter().map(|c| c.name.as_str())
    }
}

fn oracle_count(n: usize, k: usize) -> u128 {
    (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

/// The `index`-th table in lexicographic order, `f(0)` most significant.
pub fn oracle_at(n: usize, k: usize, index: u128) -> Result<FunctionTable> {
    let mut values = vec![0usize; n];
    let mut rest = index;
    for slot in values.iter_mut().rev() {
        *slot = (rest % k as u128) as usize;
        rest /= k as u128;
    }
    FunctionTable::new(k, values)
}

/// All `k^n` tables, lexicographically.
pub struct OracleIter {
    n: usize,
    k: usize,
    next: u128,
    count: u128,
}

impl Iterator for OracleIter {
    type Item = FunctionTable;

    fn next(&mut self) -> Option<FunctionTable> {
        if self.next >= self.count {
            return None;
        }
        let f = oracle_at(self.n, self.k, self.next).ok();
        self.next += 1;
        f
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for OracleIter {}

pub fn enumerate_oracles_capped(n: usize, k: usize, cap: u128) -> Result<OracleIter> {
    if n == 0 {
        return Err(QsumError::ZeroDimension);
    }
    if k < 2 {
        return Err(QsumError::InvalidModulus(k));
    }
    let count = oracle_count(n, k);
    if count > cap {
        return Err(QsumError::CapExceeded { count, cap });
    }
    Ok(OracleIter {
        n,
        k,
        next: 0,
        count,
    })
}

pub fn enumerate_oracles(n: usize, k: usize) -> Result<OracleIter> {
    enumerate_oracles_capped(n, k, DEFAULT_CAP)
}

/// Maps `eval` over every oracle in parallel, returning results in
/// lexicographic order.
fn map_oracles<T: Send>(
    n: usize,
    k: usize,
    cap: u128,
    eval: impl Fn(&FunctionTable) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let count = enumerate_oracles_capped(n, k, cap)?.count;
    (0..count as u64)
        .into_par_iter()
        .map(|i| eval(&oracle_at(n, k, i as u128)?))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuccessStats {
    pub oracles: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub min_approx: f64,
    pub min_queries: usize,
    pub max_queries: usize,
}

pub fn exhaustive_success_capped(n: usize, k: usize, r: usize, cap: u128) -> Result<SuccessStats> {
    let runs = map_oracles(n, k, cap, |f| {
        let rep = run_sum(f, r, None)?;
        Ok((rep.success_prob, rep.approx_prob, rep.queries_used))
    })?;
    let mut stats = SuccessStats {
        oracles: runs.len(),
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        mean: 0.0,
        min_approx: f64::INFINITY,
        min_queries: usize::MAX,
        max_queries: 0,
    };
    let mut total = 0.0;
    for (p, approx, queries) in runs {
        stats.min = stats.min.min(p);
        stats.max = stats.max.max(p);
        stats.min_approx = stats.min_approx.min(approx);
        stats.min_queries = stats.min_queries.min(queries);
        stats.max_queries = stats.max_queries.max(queries);
        total += p;
    }
    stats.mean = total / stats.oracles as f64;
    Ok(stats)
}

/// Success probability over every oracle for `(n, k, r)`.
pub fn exhaustive_success(n: usize, k: usize, r: usize) -> Result<SuccessStats> {
    exhaustive_success_capped(n, k, r, DEFAULT_CAP)
}

fn mixed_state(n: usize, k: usize, terms: &[(Complex64, usize, i64)]) -> Vec<Complex64> {
    let mut amps = vec![Complex64::new(0.0, 0.0); n * k];
    for &(coeff, x, a) in terms {
        let a = a.rem_euclid(k as i64) as usize;
        let v = fourier_state(k, a).expect("valid residue");
        for (y, amp) in v.amplitudes().iter().enumerate() {
            amps[joint_index(k, x, y)] += coeff * amp;
        }
    }
    amps
}

/// Hand-derived states after each step of the one-query two-trit circuit.
pub fn two_trit_reference_states(f: &FunctionTable) -> Vec<Vec<Complex64>> {
    let (n, k) = (2, 3);
    let h = 1.0 / 2f64.sqrt();
    let w = |e: i64| root_of_unity(k, e) * h;
    let (f0, f1) = (f.value(0) as i64, f.value(1) as i64);
    vec![
        mixed_state(n, k, &[(w(0), 1, 1), (w(0), 0, -1)]),
        mixed_state(n, k, &[(w(f1), 1, 1), (w(-f0), 0, -1)]),
        mixed_state(n, k, &[(w(f1), 0, 1), (w(-f0), 1, -1)]),
        mixed_state(n, k, &[(w(f1), 0, 1), (w(-f0), 0, 0)]),
    ]
}

/// Hand-derived states after each step of the two-query three-trit circuit.
pub fn three_trit_reference_states(f: &FunctionTable) -> Vec<Vec<Complex64>> {
    let (n, k) = (3, 3);
    let t = 1.0 / 3f64.sqrt();
    let w = |e: i64| root_of_unity(k, e) * t;
    let (f0, f1, f2) = (f.value(0) as i64, f.value(1) as i64, f.value(2) as i64);
    let a = f1 + 2 * f2;
    let b = -f0 + f2;
    let c = -2 * f0 - f1;
    vec![
        mixed_state(n, k, &[(w(0), 1, 1), (w(0), 0, -1), (w(0), 0, -2)]),
        mixed_state(n, k, &[(w(f1), 1, 1), (w(-f0), 0, -1), (w(-2 * f0), 0, -2)]),
        mixed_state(n, k, &[(w(f1), 2, 1), (w(-f0), 1, -1), (w(-2 * f0), 1, -2)]),
        mixed_state(n, k, &[(w(f1), 2, 2), (w(-f0), 2, 1), (w(-2 * f0), 1, -1)]),
        mixed_state(n, k, &[(w(a), 2, 2), (w(b), 2, 1), (w(c), 1, -1)]),
        mixed_state(n, k, &[(w(a), 0, 2), (w(b), 0, 1), (w(c), 2, -1)]),
        mixed_state(n, k, &[(w(a), 0, 2), (w(b), 0, 1), (w(c), 0, 0)]),
    ]
}

/// Closed form of the final value register of the two-trit circuit:
/// `ω^{−f(0)} 6^{-1/2} Σ_y (1 + ω^{Σf − y}) |y⟩`.
pub fn two_trit_final_value(f: &FunctionTable) -> Vec<Complex64> {
    let sum = f.sum() as i64;
    let phase = root_of_unity(3, -(f.value(0) as i64)) / 6f64.sqrt();
    (0..3)
        .map(|y| phase * (Complex64::new(1.0, 0.0) + root_of_unity(3, sum - y)))
        .collect()
}

/// Closed form of the final value register of the three-trit circuit:
/// `ω^{f(0) + 2f(1)} |Σf⟩`.
pub fn three_trit_final_value(f: &FunctionTable) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 3];
    v[f.sum()] = root_of_unity(3, (f.value(0) + 2 * f.value(1)) as i64);
    v
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

fn unitarity_defect_for(n: usize, k: usize) -> Result<f64> {
    let probe = FunctionTable::new(k, (0..n).map(|x| (x * x + 1) % k).collect())?;
    let mut ops: Vec<UnitaryOp> = vec![
        shift_op(n)?,
        shift_op(k)?,
        fourier_op(k)?,
        character_basis_op(k)?,
        oracle_op(&probe),
        position_shift_op(n, k)?,
        k_op(n, k)?,
    ];
    for r in 0..n {
        ops.push(j_op(n, k, r)?);
        ops.push(k_op_for_step(n, k, r)?);
    }
    Ok(ops.iter().map(UnitaryOp::unitarity_defect).fold(0.0, f64::max))
}

fn kickback_defect(f: &FunctionTable) -> Result<f64> {
    let (n, k) = (f.n(), f.k());
    let o = oracle_op(f);
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for a in 0..k {
            let v = JointState::product(n, x, &fourier_state(k, a)?)?;
            let out = o.apply(&v)?;
            let phase = root_of_unity(k, (a * f.value(x)) as i64);
            let expected: Vec<Complex64> = v.amplitudes().iter().map(|c| phase * c).collect();
            worst = worst.max(max_abs_diff(out.amplitudes(), &expected));
        }
    }
    Ok(worst)
}

fn trace_defect(f: &FunctionTable, which: SmallInstance) -> Result<(f64, f64)> {
    let steps = trace_small(f, which)?;
    let (reference, final_value) = match which {
        SmallInstance::Prop1 => (two_trit_reference_states(f), two_trit_final_value(f)),
        SmallInstance::Prop2 => (three_trit_reference_states(f), three_trit_final_value(f)),
    };
    let mut worst: f64 = 0.0;
    for (got, want) in steps.iter().zip(&reference) {
        worst = worst.max(phase_distance(got, want)?);
    }
    let last = steps.last().expect("trace is non-empty");
    let closed = max_abs_diff(last.value_slice(0), &final_value);
    Ok((worst, closed))
}

/// Largest `|closed form − |⟨y|A_s⟩|²|` and peak/argmax defects for one `k`.
fn lemma3_defects(k: usize) -> Result<(f64, f64, bool)> {
    let mut formula: f64 = 0.0;
    let mut peak: f64 = 0.0;
    let mut argmax_ok = true;
    for s in 1..=k {
        for a in 0..k {
            let probs = a_state(k, s, a)?.probabilities();
            for (y, p) in probs.iter().enumerate() {
                formula = formula.max((lemma3_prob(k, s, a, y) - p).abs());
            }
            peak = peak.max((probs[a] - s as f64 / k as f64).abs());
            if s >= 2 {
                let best = probs
                    .iter()
                    .enumerate()
                    .max_by(|x, y| x.1.total_cmp(y.1))
                    .map(|(i, _)| i);
                argmax_ok &= best == Some(a);
            }
        }
    }
    Ok((formula, peak, argmax_ok))
}

/// Runs every check on `spec`. Failures are recorded, never raised; an
/// `Err` means the grid itself is invalid (e.g. over the cap).
pub fn check_suite(spec: &GridSpec) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    let tol = spec.tolerance;
    let alg = spec.algebraic_tolerance;
    let ks = 2..=spec.max_k;

    // Operators.
    let cells: Vec<(usize, usize)> = (1..=spec.max_n)
        .flat_map(|n| ks.clone().map(move |k| (n, k)))
        .collect();
    let defects: Vec<f64> = cells
        .par_iter()
        .map(|&(n, k)| unitarity_defect_for(n, k))
        .collect::<Result<_>>()?;
    for (&(n, k), d) in cells.iter().zip(defects) {
        report.push("unitarity", format!("n={n} k={k}"), Relation::AtMost, 0.0, d, alg);
    }
    for &(n, k) in &cells {
        let worst = map_oracles(n, k, spec.cap, kickback_defect)?
            .into_iter()
            .fold(0.0, f64::max);
        report.push("phase_kickback", format!("n={n} k={k}"), Relation::AtMost, 0.0, worst, alg);
    }

    // Small worked circuits.
    for which in [SmallInstance::Prop1, SmallInstance::Prop2] {
        let (n, k) = which.shape();
        if n > spec.max_n || k > spec.max_k {
            continue;
        }
        let label = match which {
            SmallInstance::Prop1 => "two_trit",
            SmallInstance::Prop2 => "three_trit",
        };
        let defects = map_oracles(n, k, spec.cap, |f| trace_defect(f, which))?;
        let steps = defects.iter().map(|d| d.0).fold(0.0, f64::max);
        let closed = defects.iter().map(|d| d.1).fold(0.0, f64::max);
        let params = format!("n={n} k={k} oracles={}", defects.len());
        report.push(&format!("{label}_trace"), params.clone(), Relation::AtMost, 0.0, steps, alg);
        report.push(&format!("{label}_final_closed_form"), params, Relation::AtMost, 0.0, closed, alg);
    }

    // Measurement law of the character state.
    let lemma_ks: Vec<usize> = (2..=spec.max_lemma_k).collect();
    let lemma: Vec<(f64, f64, bool)> = lemma_ks
        .par_iter()
        .map(|&k| lemma3_defects(k))
        .collect::<Result<_>>()?;
    let formula = lemma.iter().map(|l| l.0).fold(0.0, f64::max);
    let peak = lemma.iter().map(|l| l.1).fold(0.0, f64::max);
    let argmax = lemma.iter().all(|l| l.2);
    let mut mass = f64::INFINITY;
    for &k in &lemma_ks {
        for s in 1..=k {
            mass = mass.min(central_mass(k, s)?);
        }
    }
    let params = format!("k<={}", spec.max_lemma_k);
    report.push("lemma3_closed_form", params.clone(), Relation::AtMost, 0.0, formula, alg);
    report.push("lemma3_peak_value", params.clone(), Relation::AtMost, 0.0, peak, alg);
    report.push_claim("lemma3_peak_at_sum", params.clone(), argmax);
    report.push("lemma3_central_mass", params, Relation::AtLeast, CENTRAL_MASS_FLOOR, mass, 0.0);

    // Block-phase identity and core circuit.
    for n in 1..=spec.max_n {
        for k in ks.clone() {
            for r in (1..=n).filter(|r| n % r == 0 && n / r <= k) {
                let worst = map_oracles(n, k, spec.cap, |f| lemma4_check(f, r))?
                    .into_iter()
                    .fold(0.0, f64::max);
                report.push("lemma4", format!("n={n} k={k} r={r}"), Relation::AtMost, 0.0, worst, alg);
            }
            for r in (1..=n).filter(|r| n % r == 0 && (2..=k).contains(&(n / r))) {
                let s = n / r;
                let results = map_oracles(n, k, spec.cap, |f| {
                    let st = run_core(f, r)?;
                    let leak = 1.0 - st.position_probability(0);
                    let target = a_state(k, s, f.sum())?;
                    Ok((leak, phase_distance(st.value_slice(0), &target)?))
                })?;
                let leak = results.iter().map(|x| x.0).fold(0.0, f64::max);
                let dist = results.iter().map(|x| x.1).fold(0.0, f64::max);
                let params = format!("n={n} k={k} r={r}");
                report.push("core_position_zero", params.clone(), Relation::AtMost, 0.0, leak, alg);
                report.push("core_character_state", params, Relation::AtMost, 0.0, dist, alg);
            }
        }
    }

    // End-to-end success over every oracle.
    for n in 1..=spec.max_n {
        for k in ks.clone() {
            for r in 1..=n {
                let stats = exhaustive_success_capped(n, k, r, spec.cap)?;
                let expected = ratio_to_f64(&success_probability(n, k, r)?);
                let params = format!("n={n} k={k} r={r}");
                report.push("theorem5_worst_case", params.clone(), Relation::Equal, expected, stats.min, tol);
                report.push("theorem5_best_case", params.clone(), Relation::Equal, expected, stats.max, tol);
                report.push("oracle_uniformity", params.clone(), Relation::AtMost, 0.0, stats.max - stats.min, tol);
                let budget = (n - r) as f64;
                report.push("query_count_min", params.clone(), Relation::Equal, budget, stats.min_queries as f64, 0.0);
                report.push("query_count_max", params.clone(), Relation::Equal, budget, stats.max_queries as f64, 0.0);
                if n % r == 0 {
                    report.push("approximate_success", params.clone(), Relation::AtLeast, CENTRAL_MASS_FLOOR, stats.min_approx, tol);
                }
                if n / r == 1 {
                    report.push("uselessness", params, Relation::Equal, 1.0 / k as f64, stats.mean, tol);
                }
            }
        }
    }
    for n in 2..=spec.max_parity_n {
        let r = n / 2;
        let stats = exhaustive_success_capped(n, 2, r, spec.cap)?;
        report.push("parity", format!("n={n} k=2 r={r}"), Relation::Equal, 1.0, stats.min, tol);
    }

    // Exact formulas.
    let mut endpoints = true;
    let mut monotone = true;
    let mut bound_above = true;
    let mut dominance = true;
    let mut curve_shape = true;
    for n in 1..=spec.max_formula_n {
        for k in 2..=spec.max_formula_k {
            let pq: Vec<BigRational> = (0..=n)
                .map(|q| vandam_identify_prob(n, k, q))
                .collect::<Result<_>>()?;
            let chance = BigRational::new(BigInt::one(), BigInt::from(k).pow(n as u32));
            endpoints &= pq[0] == chance && pq[n] == BigRational::one();
            monotone &= pq.windows(2).all(|w| w[0] <= w[1]);
            for (q, p) in pq.iter().enumerate() {
                bound_above &= vandam_sum_bound(n, k, q)? >= *p;
            }
            for r in 1..=n {
                dominance &= success_probability(n, k, r)? >= pq[n - r];
            }
            let (steps, _) = figure1_curves(n, k)?;
            let chance_k = BigRational::new(BigInt::one(), BigInt::from(k));
            let useless = (n - 1) / 2;
            curve_shape &= steps
                .points
                .iter()
                .all(|pt| (pt.exact == chance_k) == (pt.q <= useless));
            curve_shape &= steps.first_certain() == Some(n - n / k);
        }
    }
    let params = format!("n<={} k<={}", spec.max_formula_n, spec.max_formula_k);
    report.push_claim("identify_endpoints", params.clone(), endpoints);
    report.push_claim("identify_monotone", params.clone(), monotone);
    report.push_claim("sum_bound_above_identify", params.clone(), bound_above);
    report.push_claim("dominates_identification", params.clone(), dominance);
    report.push_claim("figure_curve_shape", params, curve_shape);
    report.push(
        "identify_spot_value",
        "n=3 k=3 q=1".into(),
        Relation::Equal,
        7.0 / 27.0,
        ratio_to_f64(&vandam_identify_prob(3, 3, 1)?),
        tol,
    );
    report.push(
        "sum_bound_spot_value",
        "n=3 k=3 q=1".into(),
        Relation::Equal,
        41.0 / 81.0,
        ratio_to_f64(&vandam_sum_bound(3, 3, 1)?),
        tol,
    );
    Ok(report)
}
