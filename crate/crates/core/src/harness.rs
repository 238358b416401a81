//! Brute-force verification of compiled programs against Boolean oracles.
//!
//! A sweep evaluates the acceptance probability of every input in the test
//! set, classifies it by the oracle and folds per-class statistics. The fold
//! is associative and commutative (min, max, counts), so parallel sweeps give
//! the same report regardless of how rayon partitions the inputs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::index_to_bits;
use crate::charpoly::{
    eq_polynomial, mod_polynomial, palindrome_polynomial, perm_polynomial, sop_to_polynomial, Characteristic,
    Modulus, SopFormula,
};
use crate::error::{Error, Result};
use crate::fingerprint::{closed_form_general, closed_form_single, compile_general, compile_single, error_bound_general};
use crate::goodset::{sample, sample_until, GoodSet, DEFAULT_VERIFY_LIMIT};
use crate::hsf::HsfInstance;
use crate::qbp::{Metrics, QuantumBranchingProgram};

/// Largest arity swept exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 24;
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Tolerance on "accepted with probability 1".
pub const ONE_TOLERANCE: f64 = 1e-9;
/// Good-set seeds tried before giving up.
pub const GOOD_SET_ATTEMPTS: u64 = 64;

pub type Predicate<'a> = &'a (dyn Fn(&[bool]) -> bool + Sync);
pub type BoxedPredicate = Box<dyn Fn(&[bool]) -> bool + Sync>;
pub type ClosedForm<'a> = dyn Fn(&[bool]) -> f64 + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

impl SweepMode {
    /// Exhaustive when `n ≤ 24`, otherwise the default sample count.
    pub fn auto(n: usize, seed: u64) -> Self {
        if n <= EXHAUSTIVE_LIMIT {
            SweepMode::Exhaustive
        } else {
            SweepMode::Sampled { samples: DEFAULT_SAMPLES, seed }
        }
    }

    /// The swept inputs. Exhaustive order is the enumeration index order.
    pub fn inputs(&self, n: usize) -> Result<Vec<Vec<bool>>> {
        match *self {
            SweepMode::Exhaustive => {
                if n > EXHAUSTIVE_LIMIT {
                    return Err(Error::TooLarge {
                        what: format!("exhaustive sweep over {n} variables"),
                        limit: EXHAUSTIVE_LIMIT.to_string(),
                    });
                }
                Ok((0..1u64 << n).map(|i| index_to_bits(i, n)).collect())
            }
            SweepMode::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..samples).map(|_| (0..n).map(|_| rng.gen::<bool>()).collect()).collect())
            }
        }
    }
}

/// Per-class aggregate of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassStats {
    pub ones: u64,
    pub zeros: u64,
    pub filtered: u64,
    pub min_accept_on_ones: f64,
    pub max_accept_on_zeros: f64,
    pub max_closed_form_gap: f64,
    pub max_norm_drift: f64,
}

impl Default for ClassStats {
    fn default() -> Self {
        ClassStats {
            ones: 0,
            zeros: 0,
            filtered: 0,
            min_accept_on_ones: f64::INFINITY,
            max_accept_on_zeros: f64::NEG_INFINITY,
            max_closed_form_gap: 0.0,
            max_norm_drift: 0.0,
        }
    }
}

impl ClassStats {
    pub fn merge(self, other: ClassStats) -> ClassStats {
        ClassStats {
            ones: self.ones + other.ones,
            zeros: self.zeros + other.zeros,
            filtered: self.filtered + other.filtered,
            min_accept_on_ones: self.min_accept_on_ones.min(other.min_accept_on_ones),
            max_accept_on_zeros: self.max_accept_on_zeros.max(other.max_accept_on_zeros),
            max_closed_form_gap: self.max_closed_form_gap.max(other.max_closed_form_gap),
            max_norm_drift: self.max_norm_drift.max(other.max_norm_drift),
        }
    }
}

/// One input's contribution to a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Observation {
    Filtered,
    Observed { oracle: bool, accept: f64, closed_form_gap: f64, norm_drift: f64 },
}

impl From<Observation> for ClassStats {
    fn from(obs: Observation) -> Self {
        let mut s = ClassStats::default();
        match obs {
            Observation::Filtered => s.filtered = 1,
            Observation::Observed { oracle, accept, closed_form_gap, norm_drift } => {
                if oracle {
                    s.ones = 1;
                    s.min_accept_on_ones = accept;
                } else {
                    s.zeros = 1;
                    s.max_accept_on_zeros = accept;
                }
                s.max_closed_form_gap = closed_form_gap;
                s.max_norm_drift = norm_drift;
            }
        }
        s
    }
}

/// What a sweep checks.
pub struct Target<'a> {
    pub name: String,
    pub program: &'a QuantumBranchingProgram,
    pub oracle: Predicate<'a>,
    /// Inputs failing the promise are counted as filtered and not classified.
    pub promise: Option<Predicate<'a>>,
    pub closed_form: Option<&'a ClosedForm<'a>>,
    pub epsilon: f64,
    pub t: usize,
    /// False accepts must stay strictly below this.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GoodSetCheck {
    /// Good for every `b ∈ [1, m−1]`.
    Exhaustive,
    /// Good on every nonzero residue realized by the swept inputs.
    Spot { residues: usize },
    /// No seed within the attempt budget passed; the last sample is used.
    Failed { residues: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub function: String,
    pub arity: usize,
    pub epsilon: f64,
    pub t: usize,
    pub mode: SweepMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_set_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_set_check: Option<GoodSetCheck>,
    /// `None` when no swept input lies in `f⁻¹(1)`.
    pub min_accept_on_ones: Option<f64>,
    /// `None` when no swept input lies in `f⁻¹(0)`.
    pub max_accept_on_zeros: Option<f64>,
    pub bound: f64,
    pub ones: u64,
    pub zeros: u64,
    pub filtered: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_closed_form_gap: Option<f64>,
    pub max_norm_drift: f64,
    pub pass: bool,
    pub metrics: Metrics,
}

impl VerificationReport {
    fn from_stats(target: &Target<'_>, mode: SweepMode, stats: ClassStats) -> Self {
        let min_ones = (stats.ones > 0).then_some(stats.min_accept_on_ones);
        let max_zeros = (stats.zeros > 0).then_some(stats.max_accept_on_zeros);
        let pass = min_ones.is_none_or(|v| v >= 1.0 - ONE_TOLERANCE) && max_zeros.is_none_or(|v| v < target.bound);
        VerificationReport {
            function: target.name.clone(),
            arity: target.program.arity(),
            epsilon: target.epsilon,
            t: target.t,
            mode,
            good_set_seed: None,
            good_set_check: None,
            min_accept_on_ones: min_ones,
            max_accept_on_zeros: max_zeros,
            bound: target.bound,
            ones: stats.ones,
            zeros: stats.zeros,
            filtered: stats.filtered,
            max_closed_form_gap: target.closed_form.map(|_| stats.max_closed_form_gap),
            max_norm_drift: stats.max_norm_drift,
            pass,
            metrics: target.program.metrics(),
        }
    }
}

/// Evaluates one input.
pub fn observe(target: &Target<'_>, sigma: &[bool]) -> Result<Observation> {
    if let Some(promise) = target.promise {
        if !promise(sigma) {
            return Ok(Observation::Filtered);
        }
    }
    let state = target.program.run(sigma)?;
    let accept: f64 = target.program.accepting().iter().map(|&i| state.probability(i)).sum();
    let closed_form_gap = target.closed_form.map_or(0.0, |cf| (cf(sigma) - accept).abs());
    Ok(Observation::Observed {
        oracle: (target.oracle)(sigma),
        accept,
        closed_form_gap,
        norm_drift: (state.norm() - 1.0).abs(),
    })
}

/// Sweeps `inputs` in parallel.
pub fn sweep(target: &Target<'_>, inputs: &[Vec<bool>]) -> Result<ClassStats> {
    inputs
        .par_iter()
        .map(|sigma| observe(target, sigma).map(ClassStats::from))
        .try_reduce(ClassStats::default, |a, b| Ok(a.merge(b)))
}

pub fn verify(target: &Target<'_>, mode: SweepMode) -> Result<VerificationReport> {
    let inputs = mode.inputs(target.program.arity())?;
    let stats = sweep(target, &inputs)?;
    Ok(VerificationReport::from_stats(target, mode, stats))
}

/// Nonzero values taken by the characteristic's polynomials on `inputs`.
pub fn realized_residues(chi: &Characteristic, inputs: &[Vec<bool>]) -> Result<BTreeSet<BigUint>> {
    inputs
        .par_iter()
        .map(|sigma| {
            let values = chi.evaluate(sigma)?;
            Ok(values.into_iter().filter(|r| !r.is_zero()).map(|r| r.into_value()).collect::<BTreeSet<_>>())
        })
        .try_reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            Ok(a)
        })
}

/// Samples good sets from `seed` upward until one passes: exhaustively when
/// `m ≤ 2^20`, otherwise on the residues realized by `inputs`.
pub fn find_good_set(
    chi: &Characteristic,
    epsilon: f64,
    seed: u64,
    inputs: &[Vec<bool>],
) -> Result<(GoodSet, u64, GoodSetCheck)> {
    let m = chi.modulus();
    let exhaustive = m.value() <= &BigUint::from(DEFAULT_VERIFY_LIMIT);
    let residues = if exhaustive { None } else { Some(realized_residues(chi, inputs)?) };
    let found = sample_until(epsilon, m, seed, GOOD_SET_ATTEMPTS, |k| match &residues {
        None => k.verify_exhaustive(DEFAULT_VERIFY_LIMIT),
        Some(rs) => k.verify_on(rs),
    })?;
    let count = residues.as_ref().map(BTreeSet::len);
    Ok(match found {
        Some((k, s)) if exhaustive => (k, s, GoodSetCheck::Exhaustive),
        Some((k, s)) => (k, s, GoodSetCheck::Spot { residues: count.unwrap_or(0) }),
        None => {
            let last = seed.wrapping_add(GOOD_SET_ATTEMPTS - 1);
            (sample(epsilon, m, last)?, last, GoodSetCheck::Failed { residues: count })
        }
    })
}

/// A Boolean function with a linear characteristic and a brute-force oracle.
pub struct Problem {
    pub name: String,
    pub characteristic: Characteristic,
    pub oracle: BoxedPredicate,
    pub promise: Option<BoxedPredicate>,
    /// Use the characteristic construction even for a single polynomial.
    pub force_general: bool,
}

impl Problem {
    pub fn arity(&self) -> usize {
        self.characteristic.arity()
    }

    pub fn uses_general(&self) -> bool {
        self.force_general || self.characteristic.len() > 1
    }

    pub fn hsf(name: impl Into<String>, inst: HsfInstance) -> Result<Self> {
        let characteristic = inst.characteristic()?;
        let oracle_inst = inst.clone();
        Ok(Problem {
            name: name.into(),
            characteristic,
            oracle: Box::new(move |s| oracle_inst.eval(s).unwrap_or(false)),
            promise: Some(Box::new(move |s| inst.promise_holds(s).unwrap_or(false))),
            force_general: true,
        })
    }
}

/// A compiled problem: either construction, behind one interface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Compiled {
    Single(crate::fingerprint::SingleCompilation),
    General(crate::fingerprint::GeneralCompilation),
}

impl Compiled {
    pub fn program(&self) -> &QuantumBranchingProgram {
        match self {
            Compiled::Single(c) => &c.program,
            Compiled::General(c) => &c.program,
        }
    }

    pub fn good_set(&self) -> &GoodSet {
        match self {
            Compiled::Single(c) => &c.good_set,
            Compiled::General(c) => &c.good_set,
        }
    }

    pub fn closed_form(&self, sigma: &[bool]) -> Result<f64> {
        match self {
            Compiled::Single(c) => closed_form_single(&c.polynomial, &c.good_set, sigma),
            Compiled::General(c) => closed_form_general(&c.characteristic, &c.good_set, sigma),
        }
    }

    /// `ε` for the interference construction, `1/2 + √ε/2` for characteristics.
    pub fn false_accept_bound(&self) -> f64 {
        let eps = self.good_set().epsilon();
        match self {
            Compiled::Single(_) => eps,
            Compiled::General(_) => error_bound_general(eps),
        }
    }
}

pub fn compile_problem(problem: &Problem, k: &GoodSet) -> Result<Compiled> {
    if problem.uses_general() {
        Ok(Compiled::General(compile_general(&problem.characteristic, k)?))
    } else {
        Ok(Compiled::Single(compile_single(&problem.characteristic.polynomials()[0], k)?))
    }
}

/// Full pipeline: choose a good set (verified as far as tractable), compile,
/// and sweep.
pub fn certify(problem: &Problem, epsilon: f64, seed: u64, mode: SweepMode) -> Result<(Compiled, VerificationReport)> {
    let inputs = mode.inputs(problem.arity())?;
    let residue_inputs: Vec<Vec<bool>> = match &problem.promise {
        Some(p) => inputs.iter().filter(|s| p(s)).cloned().collect(),
        None => inputs.clone(),
    };
    let (k, used_seed, check) = find_good_set(&problem.characteristic, epsilon, seed, &residue_inputs)?;
    let compiled = compile_problem(problem, &k)?;
    let closed_form = |s: &[bool]| compiled.closed_form(s).unwrap_or(f64::NAN);
    let target = Target {
        name: problem.name.clone(),
        program: compiled.program(),
        oracle: &*problem.oracle,
        promise: problem.promise.as_deref(),
        closed_form: Some(&closed_form),
        epsilon,
        t: k.size(),
        bound: compiled.false_accept_bound(),
    };
    let stats = sweep(&target, &inputs)?;
    let mut report = VerificationReport::from_stats(&target, mode, stats);
    report.good_set_seed = Some(used_seed);
    report.good_set_check = Some(check);
    Ok((compiled, report))
}

// ---- shipped functions ----------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Mod { n: usize, m: u64 },
    Eq { n: usize },
    Palindrome { n: usize },
    Perm { n: usize },
    /// Sum of products for `¬f`.
    Sop(SopFormula),
    Char(Characteristic),
}

impl FunctionSpec {
    pub fn name(&self) -> String {
        match self {
            FunctionSpec::Mod { n, m } => format!("MOD_{m} (n={n})"),
            FunctionSpec::Eq { n } => format!("EQ_{n}"),
            FunctionSpec::Palindrome { n } => format!("Palindrome_{n}"),
            FunctionSpec::Perm { n } => format!("PERM_{n}"),
            FunctionSpec::Sop(s) => format!("SOP (n={})", s.arity()),
            FunctionSpec::Char(c) => format!("characteristic (n={}, l={})", c.arity(), c.len()),
        }
    }

    pub fn characteristic(&self) -> Result<Characteristic> {
        Ok(match self {
            FunctionSpec::Mod { n, m } => mod_polynomial(*n, &Modulus::from_u64(*m)?)?.into(),
            FunctionSpec::Eq { n } => eq_polynomial(*n)?.into(),
            FunctionSpec::Palindrome { n } => palindrome_polynomial(*n)?.into(),
            FunctionSpec::Perm { n } => perm_polynomial(*n)?.into(),
            FunctionSpec::Sop(sop) => sop_to_polynomial(sop).to_linear()?.into(),
            FunctionSpec::Char(c) => c.clone(),
        })
    }

    /// Brute-force evaluator, independent of the polynomial.
    pub fn oracle(&self) -> BoxedPredicate {
        match self.clone() {
            FunctionSpec::Mod { m, .. } => Box::new(move |s| oracles::popcount_divisible(s, m)),
            FunctionSpec::Eq { .. } => Box::new(oracles::halves_equal),
            FunctionSpec::Palindrome { .. } => Box::new(oracles::is_palindrome),
            FunctionSpec::Perm { n } => Box::new(move |s| oracles::is_permutation_matrix(s, n)),
            FunctionSpec::Sop(sop) => Box::new(move |s| !sop.evaluate(s).unwrap_or(true)),
            FunctionSpec::Char(c) => Box::new(move |s| c.vanishes(s).unwrap_or(false)),
        }
    }

    /// Cited deterministic OBDD lower bound, where one is known.
    pub fn deterministic_bound(&self) -> &'static str {
        match self {
            FunctionSpec::Mod { .. } => "Ω(m)",
            FunctionSpec::Eq { .. } | FunctionSpec::Palindrome { .. } => "2^{Ω(n)}",
            FunctionSpec::Perm { .. } => "Ω(2^n n^{-5/2})",
            FunctionSpec::Sop(_) | FunctionSpec::Char(_) => "n/a",
        }
    }

    /// Asymptotic quantum width of the fingerprint construction.
    pub fn quantum_bound(&self) -> &'static str {
        match self {
            FunctionSpec::Mod { .. } => "O(log m)",
            FunctionSpec::Eq { .. } | FunctionSpec::Palindrome { .. } => "O(n)",
            FunctionSpec::Perm { .. } => "O(n log n)",
            FunctionSpec::Sop(_) | FunctionSpec::Char(_) => "n/a",
        }
    }

    pub fn problem(&self) -> Result<Problem> {
        Ok(Problem {
            name: self.name(),
            characteristic: self.characteristic()?,
            oracle: self.oracle(),
            promise: None,
            force_general: false,
        })
    }
}

/// Direct evaluators of the shipped functions.
pub mod oracles {
    pub fn popcount_divisible(sigma: &[bool], m: u64) -> bool {
        (sigma.iter().filter(|&&b| b).count() as u64).is_multiple_of(m)
    }

    /// First half equals second half.
    pub fn halves_equal(sigma: &[bool]) -> bool {
        let (x, y) = sigma.split_at(sigma.len() / 2);
        x == y
    }

    pub fn is_palindrome(sigma: &[bool]) -> bool {
        sigma.iter().eq(sigma.iter().rev())
    }

    /// Row-major `n × n` matrix with exactly one 1 per row and column.
    pub fn is_permutation_matrix(sigma: &[bool], n: usize) -> bool {
        let row_ok = (0..n).all(|i| (0..n).filter(|&j| sigma[i * n + j]).count() == 1);
        let col_ok = (0..n).all(|j| (0..n).filter(|&i| sigma[i * n + j]).count() == 1);
        row_ok && col_ok
    }
}

// ---- width table ----------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthRow {
    pub function: String,
    pub width: usize,
    pub qubits: usize,
    pub length: usize,
    pub quantum_bound: String,
    pub deterministic_bound: String,
}

/// Measured quantum widths next to documented asymptotic bounds. The bound
/// strings are documentation only.
pub fn width_table(entries: &[(String, &QuantumBranchingProgram, String, String)]) -> Vec<WidthRow> {
    entries
        .iter()
        .map(|(name, program, quantum, deterministic)| {
            let m = program.metrics();
            WidthRow {
                function: name.clone(),
                width: m.width,
                qubits: m.qubits,
                length: m.length,
                quantum_bound: quantum.clone(),
                deterministic_bound: deterministic.clone(),
            }
        })
        .collect()
}

pub fn format_width_table(rows: &[WidthRow]) -> String {
    let mut out = String::new();
    if rows.is_empty() {
        return out;
    }
    let _ = writeln!(
        out,
        "{:<22} {:>8} {:>7} {:>7}  {:<12} OBDD lower bound",
        "function", "width", "qubits", "length", "QOBDD"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<22} {:>8} {:>7} {:>7}  {:<12} {}",
            r.function, r.width, r.qubits, r.length, r.quantum_bound, r.deterministic_bound
        );
    }
    out
}
