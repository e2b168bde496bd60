//! The adaptive multi-query summation circuit and its execution planner.
//!
//! A core block on `n` positions with step `r | n` and `s = n / r` blocks
//! starts from an entangled position/value state, alternates `r` rounds of
//! `Q = (X ⊗ I) O_f` with the fixed permutation `J_r`, and closes with a
//! fixed swap. The value register then holds the `s`-term character
//! superposition whose measurement peaks at `Σ f` with probability `s / k`.
//!
//! Instances that do not fit a single core block are split by [`plan`] into
//! core blocks, classical reads, and (when no block fits) a uniform guess.

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QsumError, Result};
use crate::operators::{j_op, k_op, k_op_for_step, oracle_op, position_shift_op, FunctionTable, UnitaryOp};
use crate::register::{
    fourier_state, joint_index, measure_second_register, JointState, OutcomeDistribution,
};

/// Validated `(n, k, r)` with `s = ⌊n/r⌋` and remainder `w = n − r·s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlgorithmParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub s: usize,
    pub w: usize,
}

impl AlgorithmParams {
    pub fn new(n: usize, k: usize, r: usize) -> Result<Self> {
        if n == 0 {
            return Err(QsumError::ZeroDimension);
        }
        if k < 2 {
            return Err(QsumError::InvalidModulus(k));
        }
        if r == 0 || r > n {
            return Err(QsumError::InvalidStep { n, r });
        }
        let s = n / r;
        Ok(Self {
            n,
            k,
            r,
            s,
            w: n - r * s,
        })
    }

    /// Oracle calls allowed: `n − r`.
    pub fn query_budget(&self) -> usize {
        self.n - self.r
    }

    /// Approximation radius `⌊kr / 2n⌋` claimed for the whole instance.
    pub fn approx_radius(&self) -> usize {
        self.k * self.r / (2 * self.n)
    }

    /// Peak-window radius `⌊k / 2s⌋` of the measured character state.
    pub fn peak_radius(&self) -> usize {
        self.k / (2 * self.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Segment {
    /// Core circuit on `[offset, offset + step·blocks)`.
    CoreBlock {
        offset: usize,
        step: usize,
        blocks: usize,
    },
    ClassicalRead { position: usize },
    /// Unread positions whose sum is guessed uniformly.
    GuessBlock { offset: usize, len: usize },
}

impl Segment {
    pub fn offset(&self) -> usize {
        match *self {
            Segment::CoreBlock { offset, .. } | Segment::GuessBlock { offset, .. } => offset,
            Segment::ClassicalRead { position } => position,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Segment::CoreBlock { step, blocks, .. } => step * blocks,
            Segment::ClassicalRead { .. } => 1,
            Segment::GuessBlock { len, .. } => len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn queries(&self) -> usize {
        match *self {
            Segment::CoreBlock { step, blocks, .. } => step * (blocks - 1),
            Segment::ClassicalRead { .. } => 1,
            Segment::GuessBlock { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecutionPlan {
    pub params: AlgorithmParams,
    /// Ordered, partitioning `[0, n)`.
    pub segments: Vec<Segment>,
    /// Always `n − r`.
    pub total_queries: usize,
    /// Budget not needed by any segment (only when `s > k`). These calls are
    /// still issued, on a discarded register, so the budget is spent exactly.
    pub idle_queries: usize,
}

impl ExecutionPlan {
    pub fn segment_queries(&self) -> usize {
        self.segments.iter().map(Segment::queries).sum()
    }
}

/// Splits an `(n, k, r)` instance into executable segments.
///
/// * `s = ⌊n/r⌋ = 1`: guess the sum of `[0, r)`, read `[r, n)`.
/// * `2 ≤ s ≤ k`: one core block on `[0, rs)` with step `r`, read the
///   `w` trailing positions.
/// * `s > k`: write `rs = uk + v`; `u` core blocks of length `k` with
///   step 1, then read the remaining `v + w` positions. `u − r` calls idle.
pub fn plan(n: usize, k: usize, r: usize) -> Result<ExecutionPlan> {
    let params = AlgorithmParams::new(n, k, r)?;
    let AlgorithmParams { s, .. } = params;
    let mut segments = Vec::new();
    let read_from;
    if s == 1 {
        segments.push(Segment::GuessBlock { offset: 0, len: r });
        read_from = r;
    } else if s <= k {
        segments.push(Segment::CoreBlock {
            offset: 0,
            step: r,
            blocks: s,
        });
        read_from = r * s;
    } else {
        let u = (r * s) / k;
        for b in 0..u {
            segments.push(Segment::CoreBlock {
                offset: b * k,
                step: 1,
                blocks: k,
            });
        }
        read_from = u * k;
    }
    segments.extend((read_from..n).map(|position| Segment::ClassicalRead { position }));
    let total_queries = params.query_budget();
    let used: usize = segments.iter().map(Segment::queries).sum();
    debug_assert!(used <= total_queries);
    Ok(ExecutionPlan {
        params,
        segments,
        total_queries,
        idle_queries: total_queries - used,
    })
}

/// `s^{-1/2} (|r⟩|ω^1⟩ + Σ_{t=1}^{s−1} |0⟩|ω^{−t}⟩)`.
pub fn initial_state(n: usize, k: usize, r: usize, s: usize) -> Result<JointState> {
    if k < 2 {
        return Err(QsumError::InvalidModulus(k));
    }
    if s < 2 || s > k {
        return Err(QsumError::InvalidBlockCount { s, k });
    }
    if r == 0 || r * s > n {
        return Err(QsumError::InvalidStep { n, r });
    }
    let scale = 1.0 / (s as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); n * k];
    let mut add = |x: usize, a: usize| -> Result<()> {
        let v = fourier_state(k, a)?;
        for (y, amp) in v.amplitudes().iter().enumerate() {
            amps[joint_index(k, x, y)] += amp * scale;
        }
        Ok(())
    };
    add(r, 1 % k)?;
    for t in 1..s {
        add(0, (k - t % k) % k)?;
    }
    Ok(JointState::from_raw(n, k, amps))
}

/// Oracle access that counts every application.
struct CountingOracle<'a> {
    op: UnitaryOp,
    calls: &'a mut usize,
}

impl CountingOracle<'_> {
    fn query(&mut self, state: &JointState) -> Result<JointState> {
        *self.calls += 1;
        self.op.apply(state)
    }
}

fn check_core_params(f: &FunctionTable, r: usize) -> Result<usize> {
    let (n, k) = (f.n(), f.k());
    if r == 0 || r > n {
        return Err(QsumError::InvalidStep { n, r });
    }
    if n % r != 0 {
        return Err(QsumError::StepDoesNotDivide { n, r });
    }
    let s = n / r;
    if s < 2 || s > k {
        return Err(QsumError::InvalidBlockCount { s, k });
    }
    Ok(s)
}

fn run_core_counted(f: &FunctionTable, r: usize, calls: &mut usize) -> Result<JointState> {
    let s = check_core_params(f, r)?;
    let (n, k) = (f.n(), f.k());
    let mut oracle = CountingOracle {
        op: oracle_op(f),
        calls,
    };
    let advance = position_shift_op(n, k)?;
    let adapt = j_op(n, k, r)?;
    let close = k_op_for_step(n, k, r)?;

    let mut state = initial_state(n, k, r, s)?;
    let mut round = |state: JointState| -> Result<JointState> {
        let mut state = state;
        for _ in 0..r {
            state = advance.apply(&oracle.query(&state)?)?;
        }
        Ok(state)
    };
    for _ in 0..s.saturating_sub(2) {
        state = adapt.apply(&round(state)?)?;
    }
    state = close.apply(&round(state)?)?;
    Ok(state)
}

/// Runs the core circuit `K_r (Q^r) (J_r Q^r)^{s−2}` on `f` with step `r`,
/// where `r | n` and `2 ≤ n/r ≤ k`. Issues exactly `n − r` oracle calls.
///
/// The closing swap acts on `|n−r⟩|ω^{k−1}⟩`, which is where the last
/// branch lands when `r > 1`; for `r = 1` it is the usual `|n−1⟩` swap.
pub fn run_core(f: &FunctionTable, r: usize) -> Result<JointState> {
    let mut calls = 0;
    run_core_counted(f, r, &mut calls)
}

/// Like [`run_core`], also returning the number of oracle calls issued.
pub fn run_core_with_count(f: &FunctionTable, r: usize) -> Result<(JointState, usize)> {
    let mut calls = 0;
    let state = run_core_counted(f, r, &mut calls)?;
    Ok((state, calls))
}

fn read_counted(f: &FunctionTable, x: usize, calls: &mut usize) -> Result<usize> {
    if x >= f.n() {
        return Err(QsumError::PositionOutOfRange { x, n: f.n() });
    }
    let mut oracle = CountingOracle {
        op: oracle_op(f),
        calls,
    };
    let out = oracle.query(&JointState::basis(f.n(), f.k(), x, 0)?)?;
    let dist = measure_second_register(&out);
    // The post-query value register is a basis state, so this is exact.
    Ok(dist
        .probs()
        .iter()
        .position(|&p| p > 0.5)
        .expect("classical query yields a point mass"))
}

/// Reads `f(x)` with one oracle call on `|x⟩|0⟩`.
pub fn classical_read(f: &FunctionTable, x: usize) -> Result<usize> {
    let mut calls = 0;
    read_counted(f, x, &mut calls)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub params: AlgorithmParams,
    pub values: Vec<usize>,
    pub true_sum: usize,
    /// Exact distribution of the predicted sum.
    pub distribution: OutcomeDistribution,
    pub success_prob: f64,
    /// `⌊kr / 2n⌋`.
    pub approx_radius: usize,
    pub approx_prob: f64,
    /// `⌊k / 2s⌋`, the window of the measured peak; never smaller than
    /// `approx_radius`.
    pub peak_radius: usize,
    pub peak_prob: f64,
    pub queries_used: usize,
    pub idle_queries: usize,
    pub sampled_prediction: Option<usize>,
}

/// Executes [`plan`] for `f` and returns the exact output distribution.
///
/// Segments are independent, so the prediction distribution is the mod-k
/// convolution of the per-segment distributions. With a seed, one
/// prediction is also drawn from it.
pub fn run_sum(f: &FunctionTable, r: usize, seed: Option<u64>) -> Result<RunReport> {
    let (n, k) = (f.n(), f.k());
    let plan = plan(n, k, r)?;
    let mut calls = 0usize;
    let mut dist = OutcomeDistribution::point_mass(k, 0)?;
    for segment in &plan.segments {
        let contribution = match *segment {
            Segment::CoreBlock {
                offset,
                step,
                blocks,
            } => {
                let block = f.slice(offset, step * blocks)?;
                let state = run_core_counted(&block, step, &mut calls)?;
                measure_second_register(&state)
            }
            Segment::ClassicalRead { position } => {
                OutcomeDistribution::point_mass(k, read_counted(f, position, &mut calls)?)?
            }
            Segment::GuessBlock { .. } => OutcomeDistribution::uniform(k)?,
        };
        dist = dist.convolve(&contribution)?;
    }
    for _ in 0..plan.idle_queries {
        // Spent on a scratch register and discarded.
        read_counted(f, 0, &mut calls)?;
    }

    let true_sum = f.sum();
    let params = plan.params;
    let sampled_prediction = seed.map(|s| sample_prediction(&dist, s));
    Ok(RunReport {
        params,
        values: f.values().to_vec(),
        true_sum,
        success_prob: dist.prob(true_sum),
        approx_radius: params.approx_radius(),
        approx_prob: dist.mass_within(true_sum, params.approx_radius()),
        peak_radius: params.peak_radius(),
        peak_prob: dist.mass_within(true_sum, params.peak_radius()),
        queries_used: calls,
        idle_queries: plan.idle_queries,
        sampled_prediction,
        distribution: dist,
    })
}

/// Draws `count` predictions from `dist` with a ChaCha8 stream seeded by `seed`.
pub fn sample_predictions(dist: &OutcomeDistribution, seed: u64, count: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = dist.probs().iter().map(|p| p.max(0.0)).collect();
    let index = WeightedIndex::new(&weights).expect("distribution has positive mass");
    (0..count).map(|_| index.sample(&mut rng)).collect()
}

pub fn sample_prediction(dist: &OutcomeDistribution, seed: u64) -> usize {
    sample_predictions(dist, seed, 1)[0]
}

/// The two worked small instances: two trits with one query, three trits
/// with two queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SmallInstance {
    Prop1,
    Prop2,
}

impl SmallInstance {
    pub fn shape(self) -> (usize, usize) {
        match self {
            SmallInstance::Prop1 => (2, 3),
            SmallInstance::Prop2 => (3, 3),
        }
    }
}

impl std::str::FromStr for SmallInstance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "prop1" => Ok(SmallInstance::Prop1),
            "prop2" => Ok(SmallInstance::Prop2),
            other => Err(format!("unknown instance '{other}', expected prop1 or prop2")),
        }
    }
}

/// States after each numbered step of the small worked circuits, starting
/// with the initial state.
pub fn trace_small(f: &FunctionTable, which: SmallInstance) -> Result<Vec<JointState>> {
    let (n, k) = which.shape();
    if f.n() != n || f.k() != k {
        return Err(QsumError::WrongShape {
            what: match which {
                SmallInstance::Prop1 => "prop1 trace",
                SmallInstance::Prop2 => "prop2 trace",
            },
            n,
            k,
        });
    }
    let oracle = oracle_op(f);
    let advance = position_shift_op(n, k)?;
    let close = k_op(n, k)?;
    let s = n;
    let mut steps = vec![initial_state(n, k, 1, s)?];
    let mut push = |op: &UnitaryOp| -> Result<()> {
        let next = op.apply(steps.last().expect("non-empty"))?;
        steps.push(next);
        Ok(())
    };
    match which {
        SmallInstance::Prop1 => {
            push(&oracle)?;
            push(&advance)?;
            push(&close)?;
        }
        SmallInstance::Prop2 => {
            let adapt = j_op(n, k, 1)?;
            push(&oracle)?;
            push(&advance)?;
            push(&adapt)?;
            push(&oracle)?;
            push(&advance)?;
            push(&close)?;
        }
    }
    Ok(steps)
}
