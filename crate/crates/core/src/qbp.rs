//! Quantum branching programs and exact state-vector simulation.
//!
//! A program `Q = ⟨T, |ψ_0⟩, M_accept⟩` over `d` basis states reads its input
//! through a sequence of instructions `(x_{i_j}, U_j(0), U_j(1))`: instruction
//! `j` applies `U_j(σ_{i_j})` to the current state. Two optional
//! input-independent transforms run before and after the instruction list.
//! The input is accepted with probability `‖M_accept |ψ_σ⟩‖²`, where
//! `M_accept` projects onto a set of basis states.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::check_len;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Entrywise tolerance for `U†U = I`.
pub const UNITARY_TOLERANCE: f64 = 1e-9;
/// Tolerance for `‖ψ‖ = 1`.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Dense `d × d` complex matrix, row-major. Unitarity is not enforced on
/// construction; [`QuantumBranchingProgram::validate`] reports it.
#[derive(Clone, Debug)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<C64>,
    // nonzero entries per row, built on first application
    rows: OnceLock<Vec<Vec<(usize, C64)>>>,
}

impl PartialEq for UnitaryMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl UnitaryMatrix {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidProgram(vec![format!(
                "matrix of dimension {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            )]));
        }
        Ok(UnitaryMatrix { dim, entries, rows: OnceLock::new() })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        UnitaryMatrix { dim, entries, rows: OnceLock::new() }
    }

    /// Builds a matrix from a per-entry generator.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        UnitaryMatrix { dim, entries, rows: OnceLock::new() }
    }

    /// `R_y(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`.
    pub fn rotation_y(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let re = |x: f64| C64::new(x, 0.0);
        UnitaryMatrix::new(2, vec![re(c), re(-s), re(s), re(c)]).expect("2x2")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn matmul(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matmul");
        let d = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    out[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        UnitaryMatrix { dim: d, entries: out, rows: OnceLock::new() }
    }

    pub fn kron(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        let (a, b) = (self.dim, rhs.dim);
        UnitaryMatrix::from_fn(a * b, |r, c| self.entry(r / b, c / b) * rhs.entry(r % b, c % b))
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim;
        // (U†U)_{ij} = Σ_k conj(U_ki) U_kj, summed over nonzero pairs of each row k
        let mut gram = vec![C64::new(0.0, 0.0); d * d];
        for row in self.sparse_rows() {
            for &(i, ui) in row {
                let ui = ui.conj();
                for &(j, uj) in row {
                    gram[i * d + j] += ui * uj;
                }
            }
        }
        gram.iter()
            .enumerate()
            .map(|(idx, g)| {
                let target = if idx / d == idx % d { 1.0 } else { 0.0 };
                (g - C64::new(target, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() <= UNITARY_TOLERANCE
    }

    pub fn is_identity(&self) -> bool {
        *self == UnitaryMatrix::identity(self.dim)
    }

    fn sparse_rows(&self) -> &[Vec<(usize, C64)>] {
        self.rows.get_or_init(|| {
            self.entries
                .chunks(self.dim)
                .map(|row| row.iter().copied().enumerate().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect())
                .collect()
        })
    }

    /// `U · v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch in apply");
        self.sparse_rows()
            .iter()
            .map(|row| row.iter().map(|&(c, u)| u * v[c]).sum())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let state = StateVector { amplitudes };
        if state.amplitudes.is_empty() {
            return Err(Error::InvalidProgram(vec!["empty state".into()]));
        }
        if (state.norm() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidProgram(vec![format!("state norm {} is not 1", state.norm())]));
        }
        Ok(state)
    }

    /// `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    /// 1-based index of the variable read.
    pub variable: usize,
    pub on_zero: UnitaryMatrix,
    pub on_one: UnitaryMatrix,
}

/// Width, length and qubit count of a program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub width: usize,
    pub length: usize,
    pub qubits: usize,
}

/// A reason a program is malformed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A matrix (identified by a location label) is not unitary.
    NonUnitary(String),
    DimensionMismatch(String),
    IndexOutOfRange { instruction: usize, variable: usize },
    AcceptingIndexOutOfRange(usize),
    EmptyAcceptingSet,
    InitialStateNotNormalized,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonUnitary(at) => write!(f, "non-unitary matrix at {at}"),
            Violation::DimensionMismatch(at) => write!(f, "dimension mismatch at {at}"),
            Violation::IndexOutOfRange { instruction, variable } => {
                write!(f, "index out of range: instruction {instruction} reads variable {variable}")
            }
            Violation::AcceptingIndexOutOfRange(i) => write!(f, "accepting index {i} out of range"),
            Violation::EmptyAcceptingSet => write!(f, "empty accepting set"),
            Violation::InitialStateNotNormalized => write!(f, "initial state is not normalized"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumBranchingProgram {
    dim: usize,
    arity: usize,
    pre: Option<UnitaryMatrix>,
    instructions: Vec<Instruction>,
    post: Option<UnitaryMatrix>,
    initial: StateVector,
    accepting: BTreeSet<usize>,
}

impl QuantumBranchingProgram {
    /// Assembles a program without checking it; call [`validate`](Self::validate)
    /// or use [`new_validated`](Self::new_validated).
    pub fn new(
        arity: usize,
        pre: Option<UnitaryMatrix>,
        instructions: Vec<Instruction>,
        post: Option<UnitaryMatrix>,
        initial: StateVector,
        accepting: BTreeSet<usize>,
    ) -> Self {
        QuantumBranchingProgram { dim: initial.dim(), arity, pre, instructions, post, initial, accepting }
    }

    pub fn new_validated(
        arity: usize,
        pre: Option<UnitaryMatrix>,
        instructions: Vec<Instruction>,
        post: Option<UnitaryMatrix>,
        initial: StateVector,
        accepting: BTreeSet<usize>,
    ) -> Result<Self> {
        let q = Self::new(arity, pre, instructions, post, initial, accepting);
        q.validate().map_err(|v| Error::InvalidProgram(v.iter().map(ToString::to_string).collect()))?;
        Ok(q)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn pre_transform(&self) -> Option<&UnitaryMatrix> {
        self.pre.as_ref()
    }

    pub fn post_transform(&self) -> Option<&UnitaryMatrix> {
        self.post.as_ref()
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    /// Every matrix in application order, labelled by location.
    pub fn matrices(&self) -> impl Iterator<Item = (String, &UnitaryMatrix)> {
        let pre = self.pre.iter().map(|m| ("pre".to_string(), m));
        let body = self.instructions.iter().enumerate().flat_map(|(j, ins)| {
            [(format!("instruction {j} on 0"), &ins.on_zero), (format!("instruction {j} on 1"), &ins.on_one)]
        });
        let post = self.post.iter().map(|m| ("post".to_string(), m));
        pre.chain(body).chain(post)
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        if (self.initial.norm() - 1.0).abs() > NORM_TOLERANCE {
            violations.push(Violation::InitialStateNotNormalized);
        }
        for (label, m) in self.matrices() {
            if m.dim() != self.dim {
                violations.push(Violation::DimensionMismatch(label));
            } else if !m.is_unitary() {
                violations.push(Violation::NonUnitary(label));
            }
        }
        for (j, ins) in self.instructions.iter().enumerate() {
            if ins.variable == 0 || ins.variable > self.arity {
                violations.push(Violation::IndexOutOfRange { instruction: j, variable: ins.variable });
            }
        }
        if self.accepting.is_empty() {
            violations.push(Violation::EmptyAcceptingSet);
        }
        if let Some(&i) = self.accepting.iter().find(|&&i| i >= self.dim) {
            violations.push(Violation::AcceptingIndexOutOfRange(i));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// No variable is read by more than one instruction.
    pub fn is_read_once(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.instructions.iter().all(|ins| seen.insert(ins.variable))
    }

    /// Matrices applied on input `sigma`, in order.
    fn schedule<'a>(&'a self, sigma: &'a [bool]) -> impl Iterator<Item = &'a UnitaryMatrix> + 'a {
        self.pre
            .iter()
            .chain(self.instructions.iter().map(move |ins| if sigma[ins.variable - 1] { &ins.on_one } else { &ins.on_zero }))
            .chain(self.post.iter())
    }

    /// `|ψ_σ⟩`: pre-transform, the selected instruction matrices, post-transform.
    pub fn run(&self, sigma: &[bool]) -> Result<StateVector> {
        check_len(sigma, self.arity)?;
        let mut amps = self.initial.amplitudes.clone();
        for m in self.schedule(sigma) {
            // identity reads dominate compiled programs
            if !m.is_identity_cached() {
                amps = m.apply(&amps);
            }
            debug_assert!(
                (amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs() <= NORM_TOLERANCE,
                "norm drifted during simulation"
            );
        }
        Ok(StateVector { amplitudes: amps })
    }

    /// State norms after every applied matrix (initial state first).
    pub fn norm_trace(&self, sigma: &[bool]) -> Result<Vec<f64>> {
        check_len(sigma, self.arity)?;
        let mut state = self.initial.clone();
        let mut norms = vec![state.norm()];
        for m in self.schedule(sigma) {
            state = StateVector { amplitudes: m.apply(&state.amplitudes) };
            norms.push(state.norm());
        }
        Ok(norms)
    }

    pub fn accept_probability(&self, sigma: &[bool]) -> Result<f64> {
        let state = self.run(sigma)?;
        Ok(self.accepting.iter().map(|&i| state.probability(i)).sum())
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            width: self.dim,
            length: self.instructions.len(),
            qubits: ceil_log2(self.dim),
        }
    }
}

impl UnitaryMatrix {
    fn is_identity_cached(&self) -> bool {
        let rows = self.sparse_rows();
        rows.iter()
            .enumerate()
            .all(|(r, row)| matches!(row.as_slice(), [(c, v)] if *c == r && *v == C64::new(1.0, 0.0)))
    }
}

pub fn ceil_log2(d: usize) -> usize {
    if d <= 1 {
        0
    } else {
        (usize::BITS - (d - 1).leading_zeros()) as usize
    }
}

// ---- JSON encoding --------------------------------------------------------

type MatrixJson = Vec<Vec<[f64; 2]>>;

fn matrix_to_json(m: &UnitaryMatrix) -> MatrixJson {
    m.entries.chunks(m.dim).map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}

fn matrix_from_json(rows: &MatrixJson) -> Result<UnitaryMatrix> {
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Parse("matrix rows must all have the matrix dimension".into()));
    }
    UnitaryMatrix::new(dim, rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect())
}

#[derive(Serialize, Deserialize)]
struct InstructionJson {
    variable: usize,
    on_zero: MatrixJson,
    on_one: MatrixJson,
}

#[derive(Serialize, Deserialize)]
struct ProgramJson {
    dimension: usize,
    arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pre: Option<MatrixJson>,
    instructions: Vec<InstructionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    post: Option<MatrixJson>,
    initial: Vec<[f64; 2]>,
    accepting: Vec<usize>,
}

impl Serialize for QuantumBranchingProgram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProgramJson {
            dimension: self.dim,
            arity: self.arity,
            pre: self.pre.as_ref().map(matrix_to_json),
            instructions: self
                .instructions
                .iter()
                .map(|ins| InstructionJson {
                    variable: ins.variable,
                    on_zero: matrix_to_json(&ins.on_zero),
                    on_one: matrix_to_json(&ins.on_one),
                })
                .collect(),
            post: self.post.as_ref().map(matrix_to_json),
            initial: self.initial.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
            accepting: self.accepting.iter().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumBranchingProgram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = ProgramJson::deserialize(d)?;
        let build = || -> Result<Self> {
            let pre = json.pre.as_ref().map(matrix_from_json).transpose()?;
            let post = json.post.as_ref().map(matrix_from_json).transpose()?;
            let instructions = json
                .instructions
                .iter()
                .map(|ins| {
                    Ok(Instruction {
                        variable: ins.variable,
                        on_zero: matrix_from_json(&ins.on_zero)?,
                        on_one: matrix_from_json(&ins.on_one)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let initial = StateVector::new(json.initial.iter().map(|&[re, im]| C64::new(re, im)).collect())?;
            if initial.dim() != json.dimension {
                return Err(Error::InvalidProgram(vec!["initial state dimension differs from program dimension".into()]));
            }
            Self::new_validated(json.arity, pre, instructions, post, initial, json.accepting.iter().copied().collect())
        };
        build().map_err(D::Error::custom)
    }
}
