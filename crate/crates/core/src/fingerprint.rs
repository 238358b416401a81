//! Fingerprint compilation of linear polynomials and linear characteristics
//! into quantum OBDDs.
//!
//! Register layout: basis index `= branch · 2^l + targets`, with the branch
//! register (log t qubits) in the high bits. Branch `i` carries parameter
//! `k_{i+1}` of the good set. For a characteristic, target qubit `s = 1` is
//! the most significant of the `l` target bits.
//!
//! * Single polynomial `g` (`l = 1`): reading `x_j = 1` rotates the target of
//!   branch `i` by `R_y(4π k_i c_j / m)`. After the constant-term rotations and
//!   a final Hadamard layer the amplitude of `|0…0⟩|0⟩` is
//!   `(1/t) Σ cos(2π k_i g(σ)/m)`; only that state accepts.
//! * Characteristic `{g_1, …, g_l}`: target `s` of branch `i` is rotated by
//!   `R_y(2π k_i c_j^{(s)} / m)`; there is no closing Hadamard layer and every
//!   state with all targets zero accepts, giving
//!   `(1/t) Σ_i Π_s cos²(π k_i g_s(σ)/m)`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::charpoly::{big_ratio, Characteristic, LinearPolynomial, Modulus};
use crate::error::{Error, Result};
use crate::goodset::GoodSet;
use crate::qbp::{Instruction, QuantumBranchingProgram, StateVector, UnitaryMatrix, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleCompilation {
    pub polynomial: LinearPolynomial,
    pub good_set: GoodSet,
    pub program: QuantumBranchingProgram,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralCompilation {
    pub characteristic: Characteristic,
    pub good_set: GoodSet,
    pub program: QuantumBranchingProgram,
}

impl SingleCompilation {
    pub fn closed_form(&self, sigma: &[bool]) -> Result<f64> {
        closed_form_single(&self.polynomial, &self.good_set, sigma)
    }

    pub fn accept_probability(&self, sigma: &[bool]) -> Result<f64> {
        self.program.accept_probability(sigma)
    }
}

impl GeneralCompilation {
    pub fn closed_form(&self, sigma: &[bool]) -> Result<f64> {
        closed_form_general(&self.characteristic, &self.good_set, sigma)
    }

    pub fn accept_probability(&self, sigma: &[bool]) -> Result<f64> {
        self.program.accept_probability(sigma)
    }
}

fn check_good_set(m: &Modulus, k: &GoodSet) -> Result<usize> {
    m.ensure_same(k.modulus())?;
    let t = k.size();
    if !t.is_power_of_two() {
        return Err(Error::NonPowerOfTwoT(t));
    }
    Ok(t)
}

/// `(k · c mod m) / m`.
fn fraction(k: &BigUint, c: &BigUint, m: &Modulus) -> f64 {
    big_ratio(&((k * c) % m.value()), m.value())
}

/// `H^{⊗ log t} ⊗ I_inner`.
fn hadamard_layer(t: usize, inner: usize) -> UnitaryMatrix {
    let scale = 1.0 / (t as f64).sqrt();
    UnitaryMatrix::from_fn(t * inner, |r, c| {
        let (bi, ti) = (r / inner, r % inner);
        let (bj, tj) = (c / inner, c % inner);
        if ti != tj {
            return C64::new(0.0, 0.0);
        }
        let sign = if (bi & bj).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        C64::new(sign * scale, 0.0)
    })
}

/// Block-diagonal matrix with one equally sized block per branch.
fn block_diagonal(blocks: &[UnitaryMatrix]) -> UnitaryMatrix {
    let b = blocks[0].dim();
    UnitaryMatrix::from_fn(blocks.len() * b, |r, c| {
        if r / b == c / b {
            blocks[r / b].entry(r % b, c % b)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Block-diagonal rotation layer: branch `i` gets `⊗_s R_y(scale · π · frac(k_i c^{(s)}))`.
fn rotation_layer(k: &GoodSet, coeffs: &[&BigUint], scale: f64) -> UnitaryMatrix {
    let m = k.modulus();
    let blocks: Vec<UnitaryMatrix> = k
        .params()
        .iter()
        .map(|ki| {
            coeffs
                .iter()
                .map(|c| UnitaryMatrix::rotation_y(scale * PI * fraction(ki, c, m)))
                .reduce(|acc, r| acc.kron(&r))
                .expect("at least one target qubit")
        })
        .collect();
    block_diagonal(&blocks)
}

/// Compiles a linear polynomial with the interference (Hadamard-closed) fingerprint.
pub fn compile_single(p: &LinearPolynomial, k: &GoodSet) -> Result<SingleCompilation> {
    let t = check_good_set(p.modulus(), k)?;
    let d = 2 * t;
    let hadamard = hadamard_layer(t, 2);
    let coeffs = p.coefficients();
    let instructions = (1..=p.arity())
        .map(|j| Instruction {
            variable: j,
            on_zero: UnitaryMatrix::identity(d),
            on_one: rotation_layer(k, &[&coeffs[j]], 4.0),
        })
        .collect();
    let post = hadamard.matmul(&rotation_layer(k, &[&coeffs[0]], 4.0));
    let program = QuantumBranchingProgram::new_validated(
        p.arity(),
        Some(hadamard),
        instructions,
        Some(post),
        StateVector::basis(d, 0),
        BTreeSet::from([0]),
    )?;
    Ok(SingleCompilation { polynomial: p.clone(), good_set: k.clone(), program })
}

/// Compiles a linear characteristic with one target qubit per polynomial.
pub fn compile_general(chi: &Characteristic, k: &GoodSet) -> Result<GeneralCompilation> {
    let t = check_good_set(chi.modulus(), k)?;
    let l = chi.len();
    let inner = 1usize << l;
    let d = t * inner;
    let polys = chi.polynomials();
    let layer_for = |j: usize| {
        let cs: Vec<&BigUint> = polys.iter().map(|p| &p.coefficients()[j]).collect();
        rotation_layer(k, &cs, 2.0)
    };
    let instructions = (1..=chi.arity())
        .map(|j| Instruction { variable: j, on_zero: UnitaryMatrix::identity(d), on_one: layer_for(j) })
        .collect();
    let accepting = (0..t).map(|i| i * inner).collect();
    let program = QuantumBranchingProgram::new_validated(
        chi.arity(),
        Some(hadamard_layer(t, inner)),
        instructions,
        Some(layer_for(0)),
        StateVector::basis(d, 0),
        accepting,
    )?;
    Ok(GeneralCompilation { characteristic: chi.clone(), good_set: k.clone(), program })
}

/// `(1/t²)(Σ_i cos(2π (k_i g(σ) mod m)/m))²`.
pub fn closed_form_single(p: &LinearPolynomial, k: &GoodSet, sigma: &[bool]) -> Result<f64> {
    p.modulus().ensure_same(k.modulus())?;
    let g = p.evaluate(sigma)?;
    let t = k.size() as f64;
    let sum: f64 = k.phase_fractions(g.value()).iter().map(|f| (2.0 * PI * f).cos()).sum();
    Ok((sum / t).powi(2))
}

/// `(1/t) Σ_i Π_s cos²(π (k_i g_s(σ) mod m)/m)`.
pub fn closed_form_general(chi: &Characteristic, k: &GoodSet, sigma: &[bool]) -> Result<f64> {
    chi.modulus().ensure_same(k.modulus())?;
    let values = chi.evaluate(sigma)?;
    let per_poly: Vec<Vec<f64>> = values.iter().map(|g| k.phase_fractions(g.value())).collect();
    let t = k.size();
    let total: f64 = (0..t)
        .map(|i| per_poly.iter().map(|fr| (PI * fr[i]).cos().powi(2)).product::<f64>())
        .sum();
    Ok(total / t as f64)
}

/// `1/2 + √ε/2`: false-accept ceiling of the characteristic construction.
pub fn error_bound_general(epsilon: f64) -> f64 {
    0.5 + epsilon.sqrt() / 2.0
}
