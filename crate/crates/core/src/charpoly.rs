//! Characteristic polynomials over `Z_m`.
//!
//! A characteristic polynomial `g` of a Boolean function `f` vanishes exactly
//! on `f⁻¹(1)`. This module holds the exact modular arithmetic (moduli are
//! unbounded big integers), linear and multilinear polynomials, the
//! sum-of-products translation, and builders for the shipped function
//! families (`MOD_m`, `EQ_n`, `Palindrome_n`, `PERM_n`).
//!
//! Coefficients are always stored as canonical residues in `[0, m)`; negative
//! coefficients are reduced on construction.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::check_len;
use crate::error::{Error, Result};

/// The ring modulus `m ≥ 2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Modulus(Arc<BigUint>);

impl Modulus {
    pub fn new(value: BigUint) -> Result<Self> {
        if value < BigUint::from(2u32) {
            return Err(Error::InvalidModulus(value.to_string()));
        }
        Ok(Modulus(Arc::new(value)))
    }

    pub fn from_u64(value: u64) -> Result<Self> {
        Self::new(BigUint::from(value))
    }

    /// `2^bits`, for `bits ≥ 1`.
    pub fn pow2(bits: usize) -> Result<Self> {
        if bits == 0 {
            return Err(Error::InvalidModulus("1".into()));
        }
        Self::new(BigUint::one() << bits)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    /// Canonical representative of `x` in `[0, m)`.
    pub fn reduce(&self, x: &BigInt) -> Residue {
        let m = BigInt::from_biguint(Sign::Plus, self.value().clone());
        let r = x.mod_floor(&m);
        Residue {
            value: r.to_biguint().expect("mod_floor by a positive modulus is nonnegative"),
            modulus: self.clone(),
        }
    }

    pub fn reduce_unsigned(&self, x: &BigUint) -> Residue {
        Residue { value: x % self.value(), modulus: self.clone() }
    }

    /// Natural logarithm of `m`, accurate for moduli far beyond `f64` range.
    pub fn ln(&self) -> f64 {
        big_ln(self.value())
    }

    pub(crate) fn ensure_same(&self, other: &Modulus) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ModulusMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({})", self.0)
    }
}

/// Free-function form of [`Modulus::reduce`].
pub fn reduce(x: &BigInt, m: &Modulus) -> Residue {
    m.reduce(x)
}

pub(crate) fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let approx: f64 = num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::INFINITY);
        if approx.is_finite() {
            return approx.ln();
        }
    }
    let shift = bits - 64;
    let top: f64 = num_traits::ToPrimitive::to_f64(&(x >> shift)).unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `numerator / denominator` as a double, for `numerator < denominator` of any size.
pub(crate) fn big_ratio(numerator: &BigUint, denominator: &BigUint) -> f64 {
    let shift = denominator.bits().saturating_sub(62);
    let n: f64 = num_traits::ToPrimitive::to_f64(&(numerator >> shift)).unwrap_or(0.0);
    let d: f64 = num_traits::ToPrimitive::to_f64(&(denominator >> shift)).unwrap_or(1.0);
    n / d
}

/// An element of `Z_m` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    value: BigUint,
    modulus: Modulus,
}

impl Residue {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `g = c_0 + c_1 x_1 + … + c_n x_n` over `Z_m`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearPolynomial {
    modulus: Modulus,
    /// `coeffs[0]` is the constant term, `coeffs[j]` multiplies `x_j`.
    coeffs: Vec<BigUint>,
}

impl LinearPolynomial {
    /// Builds from signed coefficients `[c_0, c_1, …, c_n]`, reducing each mod `m`.
    pub fn new(modulus: Modulus, coeffs: &[BigInt]) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArity(coeffs.len().saturating_sub(1)));
        }
        let coeffs = coeffs.iter().map(|c| modulus.reduce(c).into_value()).collect();
        Ok(LinearPolynomial { modulus, coeffs })
    }

    pub fn from_i64(modulus: Modulus, coeffs: &[i64]) -> Result<Self> {
        let big: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        Self::new(modulus, &big)
    }

    pub fn zero(modulus: Modulus, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArity(0));
        }
        Ok(LinearPolynomial { modulus, coeffs: vec![BigUint::zero(); arity + 1] })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Raw canonical coefficients, constant term first.
    pub fn coefficients(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn coefficient(&self, j: usize) -> Residue {
        Residue { value: self.coeffs[j].clone(), modulus: self.modulus.clone() }
    }

    pub fn constant(&self) -> &BigUint {
        &self.coeffs[0]
    }

    /// `(c_0 + Σ_{σ_j = 1} c_j) mod m`.
    pub fn evaluate(&self, sigma: &[bool]) -> Result<Residue> {
        check_len(sigma, self.arity())?;
        let mut acc = self.coeffs[0].clone();
        for (c, _) in self.coeffs[1..].iter().zip(sigma).filter(|(_, &bit)| bit) {
            acc += c;
        }
        Ok(self.modulus.reduce_unsigned(&acc))
    }
}

impl fmt::Debug for LinearPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearPolynomial(m={}, c={:?})", self.modulus, self.coeffs)
    }
}

/// Free-function form of [`LinearPolynomial::evaluate`].
pub fn evaluate_linear(p: &LinearPolynomial, sigma: &[bool]) -> Result<Residue> {
    p.evaluate(sigma)
}

/// A multilinear polynomial in canonical form: one coefficient per distinct
/// variable set, zero coefficients dropped.
#[derive(Clone, PartialEq, Eq)]
pub struct MultilinearPolynomial {
    modulus: Modulus,
    arity: usize,
    /// Sorted, duplicate-free 1-based variable sets.
    monomials: BTreeMap<Vec<usize>, BigUint>,
}

impl MultilinearPolynomial {
    pub fn zero(modulus: Modulus, arity: usize) -> Self {
        MultilinearPolynomial { modulus, arity, monomials: BTreeMap::new() }
    }

    /// Builds from `(coefficient, variables)` pairs, merging repeated variable
    /// sets by coefficient addition.
    pub fn from_terms<I>(modulus: Modulus, arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigInt, Vec<usize>)>,
    {
        let mut acc: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
        for (coeff, mut vars) in terms {
            vars.sort_unstable();
            if vars.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidFormula(format!("repeated variable in monomial {vars:?}")));
            }
            if let Some(&v) = vars.iter().find(|&&v| v == 0 || v > arity) {
                return Err(Error::InvalidFormula(format!("variable {v} outside [1, {arity}]")));
            }
            *acc.entry(vars).or_default() += coeff;
        }
        Ok(Self::from_accumulated(modulus, arity, acc))
    }

    fn from_accumulated(modulus: Modulus, arity: usize, acc: BTreeMap<Vec<usize>, BigInt>) -> Self {
        let monomials = acc
            .into_iter()
            .map(|(vars, c)| (vars, modulus.reduce(&c).into_value()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        MultilinearPolynomial { modulus, arity, monomials }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&[usize], &BigUint)> {
        self.monomials.iter().map(|(v, c)| (v.as_slice(), c))
    }

    pub fn degree(&self) -> usize {
        self.monomials.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn evaluate(&self, sigma: &[bool]) -> Result<Residue> {
        check_len(sigma, self.arity)?;
        let mut acc = BigUint::zero();
        for (vars, c) in &self.monomials {
            if vars.iter().all(|&v| sigma[v - 1]) {
                acc += c;
            }
        }
        Ok(self.modulus.reduce_unsigned(&acc))
    }

    /// Converts a degree ≤ 1 polynomial to its linear form.
    pub fn to_linear(&self) -> Result<LinearPolynomial> {
        if self.arity == 0 {
            return Err(Error::InvalidArity(0));
        }
        let mut coeffs = vec![BigUint::zero(); self.arity + 1];
        for (vars, c) in &self.monomials {
            match vars.as_slice() {
                [] => coeffs[0] = c.clone(),
                [v] => coeffs[*v] = c.clone(),
                longer => return Err(Error::NonLinear(longer.len())),
            }
        }
        Ok(LinearPolynomial { modulus: self.modulus.clone(), coeffs })
    }
}

impl fmt::Debug for MultilinearPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultilinearPolynomial(m={}, n={}, {:?})", self.modulus, self.arity, self.monomials)
    }
}

pub fn evaluate_multilinear(p: &MultilinearPolynomial, sigma: &[bool]) -> Result<Residue> {
    p.evaluate(sigma)
}

/// A nonempty set of linear polynomials sharing modulus and arity; `f(σ) = 1`
/// iff every member vanishes on `σ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Characteristic {
    polynomials: Vec<LinearPolynomial>,
}

impl Characteristic {
    pub fn new(polynomials: Vec<LinearPolynomial>) -> Result<Self> {
        let first = polynomials.first().ok_or(Error::EmptyCharacteristic)?;
        for p in &polynomials[1..] {
            first.modulus.ensure_same(&p.modulus)?;
            if p.arity() != first.arity() {
                return Err(Error::ArityMismatch { left: first.arity(), right: p.arity() });
            }
        }
        Ok(Characteristic { polynomials })
    }

    pub fn modulus(&self) -> &Modulus {
        self.polynomials[0].modulus()
    }

    pub fn arity(&self) -> usize {
        self.polynomials[0].arity()
    }

    pub fn len(&self) -> usize {
        self.polynomials.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn polynomials(&self) -> &[LinearPolynomial] {
        &self.polynomials
    }

    pub fn evaluate(&self, sigma: &[bool]) -> Result<Vec<Residue>> {
        self.polynomials.iter().map(|p| p.evaluate(sigma)).collect()
    }

    pub fn vanishes(&self, sigma: &[bool]) -> Result<bool> {
        Ok(self.evaluate(sigma)?.iter().all(Residue::is_zero))
    }
}

impl From<LinearPolynomial> for Characteristic {
    fn from(p: LinearPolynomial) -> Self {
        Characteristic { polynomials: vec![p] }
    }
}

/// A literal `x_j` or `¬x_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub positive: bool,
}

/// A sum of products `K_1 ∨ … ∨ K_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SopFormula {
    arity: usize,
    products: Vec<Vec<Literal>>,
}

impl SopFormula {
    pub fn new(arity: usize, products: Vec<Vec<Literal>>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArity(0));
        }
        for product in &products {
            if product.is_empty() {
                return Err(Error::InvalidFormula("empty product".into()));
            }
            let mut seen = vec![false; arity + 1];
            for lit in product {
                if lit.var == 0 || lit.var > arity {
                    return Err(Error::InvalidFormula(format!("variable {} outside [1, {arity}]", lit.var)));
                }
                if std::mem::replace(&mut seen[lit.var], true) {
                    return Err(Error::InvalidFormula(format!("variable {} repeated in a product", lit.var)));
                }
            }
        }
        Ok(SopFormula { arity, products })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn products(&self) -> &[Vec<Literal>] {
        &self.products
    }

    /// Boolean value of the formula on `sigma`.
    pub fn evaluate(&self, sigma: &[bool]) -> Result<bool> {
        check_len(sigma, self.arity)?;
        Ok(self
            .products
            .iter()
            .any(|p| p.iter().all(|lit| sigma[lit.var - 1] == lit.positive)))
    }
}

/// One full minterm per row of `table` where the tabulated function is 1.
/// Row `r` corresponds to the input whose MSB is `x_1`.
pub fn truth_table_to_sop(table: &[bool]) -> Result<SopFormula> {
    if table.len() < 2 || !table.len().is_power_of_two() {
        return Err(Error::InvalidTruthTable(table.len()));
    }
    let n = table.len().trailing_zeros() as usize;
    let products = table
        .iter()
        .enumerate()
        .filter(|(_, &v)| v)
        .map(|(row, _)| {
            crate::bits::index_to_bits(row as u64, n)
                .into_iter()
                .enumerate()
                .map(|(j, bit)| Literal { var: j + 1, positive: bit })
                .collect()
        })
        .collect();
    SopFormula::new(n, products)
}

/// Translates a sum of products for `¬f` into a characteristic polynomial of
/// `f` over `Z_{2^n}`: each `¬x_j` becomes `1 − x_j` and every product is
/// expanded into multilinear monomials.
pub fn sop_to_polynomial(sop_of_negation: &SopFormula) -> MultilinearPolynomial {
    let n = sop_of_negation.arity();
    let modulus = Modulus::pow2(n).expect("SOP arity is at least 1");
    let mut acc: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    for product in sop_of_negation.products() {
        let mut expansion: BTreeMap<Vec<usize>, BigInt> = BTreeMap::from([(Vec::new(), BigInt::one())]);
        for lit in product {
            let mut next: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
            for (vars, c) in expansion {
                let mut with_var = vars.clone();
                let pos = with_var.binary_search(&lit.var).unwrap_err();
                with_var.insert(pos, lit.var);
                if lit.positive {
                    *next.entry(with_var).or_default() += c;
                } else {
                    *next.entry(with_var).or_default() -= &c;
                    *next.entry(vars).or_default() += c;
                }
            }
            expansion = next;
        }
        for (vars, c) in expansion {
            *acc.entry(vars).or_default() += c;
        }
    }
    MultilinearPolynomial::from_accumulated(modulus, n, acc)
}

fn pow_big(base: u64, exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), exp)
}

/// `Σ x_i` over `Z_m`: vanishes iff the number of ones is divisible by `m`.
pub fn mod_polynomial(n: usize, m: &Modulus) -> Result<LinearPolynomial> {
    if n == 0 {
        return Err(Error::InvalidArity(0));
    }
    let mut coeffs = vec![BigInt::one(); n + 1];
    coeffs[0] = BigInt::zero();
    LinearPolynomial::new(m.clone(), &coeffs)
}

/// `Σ x_i 2^{i−1} − Σ y_i 2^{i−1}` over `Z_{2^n}`, arity `2n` with all `x`
/// bits before all `y` bits.
pub fn eq_polynomial(n: usize) -> Result<LinearPolynomial> {
    if n == 0 {
        return Err(Error::InvalidArity(0));
    }
    let mut coeffs = vec![BigInt::zero(); 2 * n + 1];
    for i in 1..=n {
        coeffs[i] = pow_big(2, i - 1);
        coeffs[n + i] = -pow_big(2, i - 1);
    }
    LinearPolynomial::new(Modulus::pow2(n)?, &coeffs)
}

/// `Σ_{i ≤ ⌊n/2⌋} x_i 2^{i−1} − Σ_{i ≥ ⌈n/2⌉} x_i 2^{n−i}` over `Z_{2^{⌊n/2⌋}}`.
pub fn palindrome_polynomial(n: usize) -> Result<LinearPolynomial> {
    if n < 2 {
        return Err(Error::InvalidArity(n));
    }
    let half_floor = n / 2;
    let half_ceil = n.div_ceil(2);
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for (i, c) in coeffs.iter_mut().enumerate().skip(1) {
        if i <= half_floor {
            *c += pow_big(2, i - 1);
        }
        if i >= half_ceil {
            *c -= pow_big(2, n - i);
        }
    }
    LinearPolynomial::new(Modulus::pow2(half_floor)?, &coeffs)
}

/// Permutation-matrix test on `n²` row-major variables over `Z_{(n+1)^{2n}}`.
pub fn perm_polynomial(n: usize) -> Result<LinearPolynomial> {
    if n == 0 {
        return Err(Error::InvalidArity(0));
    }
    let base = n as u64 + 1;
    let modulus = Modulus::new(num_traits::pow(BigUint::from(base), 2 * n))?;
    let mut coeffs = vec![BigInt::zero(); n * n + 1];
    coeffs[0] = -(0..2 * n).map(|e| pow_big(base, e)).sum::<BigInt>();
    for i in 1..=n {
        for j in 1..=n {
            coeffs[(i - 1) * n + j] = pow_big(base, i - 1) + pow_big(base, n + j - 1);
        }
    }
    LinearPolynomial::new(modulus, &coeffs)
}

// ---- JSON encodings -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct LinearJson {
    m: String,
    n: usize,
    coeffs: Vec<String>,
}

fn parse_big_uint(text: &str) -> Result<BigUint> {
    text.parse().map_err(|_| Error::Parse(format!("not a nonnegative integer: {text:?}")))
}

fn parse_big_int(text: &str) -> Result<BigInt> {
    text.parse().map_err(|_| Error::Parse(format!("not an integer: {text:?}")))
}

impl TryFrom<LinearJson> for LinearPolynomial {
    type Error = Error;

    fn try_from(json: LinearJson) -> Result<Self> {
        if json.coeffs.len() != json.n + 1 {
            return Err(Error::CoefficientCount { expected: json.n + 1, got: json.coeffs.len() });
        }
        let modulus = Modulus::new(parse_big_uint(&json.m)?)?;
        let coeffs = json.coeffs.iter().map(|c| parse_big_int(c)).collect::<Result<Vec<_>>>()?;
        LinearPolynomial::new(modulus, &coeffs)
    }
}

impl From<&LinearPolynomial> for LinearJson {
    fn from(p: &LinearPolynomial) -> Self {
        LinearJson {
            m: p.modulus.to_string(),
            n: p.arity(),
            coeffs: p.coeffs.iter().map(ToString::to_string).collect(),
        }
    }
}

impl Serialize for LinearPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LinearJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        LinearJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Characteristic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.polynomials.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Characteristic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let polys = Vec::<LinearPolynomial>::deserialize(d)?;
        Characteristic::new(polys).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialJson {
    coeff: String,
    vars: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MultilinearJson {
    m: String,
    n: usize,
    monomials: Vec<MonomialJson>,
}

impl Serialize for MultilinearPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MultilinearJson {
            m: self.modulus.to_string(),
            n: self.arity,
            monomials: self
                .monomials
                .iter()
                .map(|(vars, c)| MonomialJson { coeff: c.to_string(), vars: vars.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultilinearPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = MultilinearJson::deserialize(d)?;
        let build = || -> Result<Self> {
            let modulus = Modulus::new(parse_big_uint(&json.m)?)?;
            let terms = json
                .monomials
                .iter()
                .map(|mono| Ok((parse_big_int(&mono.coeff)?, mono.vars.clone())))
                .collect::<Result<Vec<_>>>()?;
            MultilinearPolynomial::from_terms(modulus, json.n, terms)
        };
        build().map_err(serde::de::Error::custom)
    }
}

/// SOP files: `{"n": 3, "products": [[1, -2], [3]]}`; a negative index is a
/// negated literal.
#[derive(Serialize, Deserialize)]
struct SopJson {
    n: usize,
    products: Vec<Vec<i64>>,
}

impl Serialize for SopFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SopJson {
            n: self.arity,
            products: self
                .products
                .iter()
                .map(|p| p.iter().map(|l| if l.positive { l.var as i64 } else { -(l.var as i64) }).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SopFormula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = SopJson::deserialize(d)?;
        let products = json
            .products
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&lit| Literal { var: lit.unsigned_abs() as usize, positive: lit > 0 })
                    .collect()
            })
            .collect();
        SopFormula::new(json.n, products).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{index_to_bits, parse_bits};

    fn m(v: u64) -> Modulus {
        Modulus::from_u64(v).unwrap()
    }

    fn eval(p: &LinearPolynomial, bits: &str) -> BigUint {
        p.evaluate(&parse_bits(bits).unwrap()).unwrap().into_value()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&BigInt::from(-1), &m(4)).value(), &BigUint::from(3u32));
        assert_eq!(reduce(&BigInt::from(0), &m(7)).value(), &BigUint::zero());
        assert_eq!(reduce(&BigInt::from(40), &m(81)).value(), &BigUint::from(40u32));
    }

    #[test]
    fn modulus_below_two_rejected() {
        assert!(Modulus::from_u64(1).is_err());
        assert!(Modulus::from_u64(0).is_err());
        assert!(Modulus::pow2(0).is_err());
    }

    #[test]
    fn big_ln_matches_f64_where_representable() {
        assert!((m(2048).ln() - 2048f64.ln()).abs() < 1e-12);
        let huge = Modulus::pow2(4000).unwrap();
        assert!((huge.ln() - 4000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn linear_length_mismatch() {
        let p = mod_polynomial(3, &m(3)).unwrap();
        assert_eq!(
            p.evaluate(&[true, false]).unwrap_err(),
            Error::LengthMismatch { expected: 3, got: 2 }
        );
    }

    #[test]
    fn mod_examples() {
        assert_eq!(eval(&mod_polynomial(3, &m(3)).unwrap(), "111"), BigUint::zero());
        assert_eq!(eval(&mod_polynomial(4, &m(3)).unwrap(), "1111"), BigUint::one());
        assert_eq!(eval(&mod_polynomial(3, &m(3)).unwrap(), "000"), BigUint::zero());
    }

    #[test]
    fn eq_examples() {
        let p2 = eq_polynomial(2).unwrap();
        assert_eq!(p2.coefficients(), &[0u32, 1, 2, 3, 2].map(BigUint::from));
        assert_eq!(eval(&p2, "1001"), BigUint::from(3u32));
        assert_eq!(eval(&eq_polynomial(3).unwrap(), "101101"), BigUint::zero());
    }

    #[test]
    fn palindrome_examples() {
        let p = palindrome_polynomial(5).unwrap();
        assert_eq!(p.modulus().value(), &BigUint::from(4u32));
        // x_1 + 2x_2 + 0x_3 − 2x_4 − x_5 mod 4
        assert_eq!(p.coefficients(), &[0u32, 1, 2, 0, 2, 3].map(BigUint::from));
        assert_eq!(eval(&p, "10101"), BigUint::zero());
        assert_eq!(eval(&p, "10001"), BigUint::zero());
        assert_eq!(eval(&p, "10000"), BigUint::one());
    }

    #[test]
    fn palindrome_even_overlap() {
        // n = 4: x_2 sits in both sums; −2^{2} vanishes mod 4
        let p = palindrome_polynomial(4).unwrap();
        assert_eq!(p.coefficients(), &[0u32, 1, 2, 2, 3].map(BigUint::from));
    }

    #[test]
    fn perm_examples() {
        let p = perm_polynomial(2).unwrap();
        assert_eq!(p.modulus().value(), &BigUint::from(81u32));
        assert_eq!(p.constant(), &BigUint::from(41u32));
        assert_eq!(eval(&p, "1001"), BigUint::zero());
        assert_eq!(eval(&p, "0110"), BigUint::zero());
        assert_eq!(eval(&p, "0000"), BigUint::from(41u32));
    }

    #[test]
    fn multilinear_examples() {
        let zero = MultilinearPolynomial::zero(m(8), 2);
        assert!(zero.evaluate(&[true, false]).unwrap().is_zero());
        let xy = MultilinearPolynomial::from_terms(m(8), 2, [(BigInt::one(), vec![2, 1])]).unwrap();
        assert_eq!(xy.evaluate(&[true, true]).unwrap().into_value(), BigUint::one());
        assert!(xy.evaluate(&[true]).is_err());
        assert!(MultilinearPolynomial::from_terms(m(8), 2, [(BigInt::one(), vec![1, 1])]).is_err());
        assert!(MultilinearPolynomial::from_terms(m(8), 2, [(BigInt::one(), vec![3])]).is_err());
    }

    #[test]
    fn monomials_merge() {
        let p = MultilinearPolynomial::from_terms(
            m(8),
            2,
            [(BigInt::from(3), vec![1, 2]), (BigInt::from(5), vec![2, 1]), (BigInt::from(1), vec![1])],
        )
        .unwrap();
        // 3 + 5 = 8 ≡ 0 drops the x1x2 term
        assert_eq!(p.monomials().count(), 1);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.to_linear().unwrap().coefficients(), &[0u32, 1, 0].map(BigUint::from));
    }

    #[test]
    fn sop_single_literal_cases() {
        let pos = SopFormula::new(1, vec![vec![Literal { var: 1, positive: true }]]).unwrap();
        let g = sop_to_polynomial(&pos);
        assert_eq!(g.modulus().value(), &BigUint::from(2u32));
        assert!(g.evaluate(&[false]).unwrap().is_zero());
        assert_eq!(g.evaluate(&[true]).unwrap().into_value(), BigUint::one());

        let neg = SopFormula::new(1, vec![vec![Literal { var: 1, positive: false }]]).unwrap();
        let g = sop_to_polynomial(&neg);
        assert!(g.evaluate(&[true]).unwrap().is_zero());
        assert_eq!(g.evaluate(&[false]).unwrap().into_value(), BigUint::one());
    }

    #[test]
    fn sop_not_and2_nonzero_on_01() {
        // f = AND_2, ¬f true on 00, 01, 10
        let sop = truth_table_to_sop(&[true, true, true, false]).unwrap();
        let g = sop_to_polynomial(&sop);
        assert!(!g.evaluate(&[false, true]).unwrap().is_zero());
        assert!(g.evaluate(&[true, true]).unwrap().is_zero());
    }

    #[test]
    fn sop_validation() {
        assert!(SopFormula::new(2, vec![vec![]]).is_err());
        assert!(SopFormula::new(2, vec![vec![Literal { var: 3, positive: true }]]).is_err());
        let repeated = vec![Literal { var: 1, positive: true }, Literal { var: 1, positive: false }];
        assert!(SopFormula::new(2, vec![repeated]).is_err());
    }

    #[test]
    fn truth_table_examples() {
        assert!(truth_table_to_sop(&[false; 4]).unwrap().products().is_empty());
        let sop = truth_table_to_sop(&[false, false, true, false]).unwrap();
        assert_eq!(
            sop.products(),
            &[vec![Literal { var: 1, positive: true }, Literal { var: 2, positive: false }]]
        );
        assert!(truth_table_to_sop(&[true; 3]).is_err());
    }

    #[test]
    fn empty_sop_is_zero_polynomial() {
        let g = sop_to_polynomial(&SopFormula::new(3, vec![]).unwrap());
        assert_eq!(g.monomials().count(), 0);
    }

    #[test]
    fn characteristic_invariants() {
        assert_eq!(Characteristic::new(vec![]).unwrap_err(), Error::EmptyCharacteristic);
        let a = mod_polynomial(3, &m(3)).unwrap();
        let b = mod_polynomial(3, &m(5)).unwrap();
        let c = mod_polynomial(4, &m(3)).unwrap();
        assert!(matches!(Characteristic::new(vec![a.clone(), b]), Err(Error::ModulusMismatch { .. })));
        assert!(matches!(Characteristic::new(vec![a.clone(), c]), Err(Error::ArityMismatch { .. })));
        let chi = Characteristic::new(vec![a.clone(), a]).unwrap();
        assert!(chi.vanishes(&index_to_bits(7, 3)).unwrap());
        assert!(!chi.vanishes(&index_to_bits(1, 3)).unwrap());
    }

    #[test]
    fn linear_json_shape() {
        let p = eq_polynomial(2).unwrap();
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json, serde_json::json!({"m": "4", "n": 4, "coeffs": ["0", "1", "2", "3", "2"]}));
        let back: LinearPolynomial = serde_json::from_value(json).unwrap();
        assert_eq!(back, p);
        // negative decimal coefficients are reduced on load
        let neg: LinearPolynomial =
            serde_json::from_str(r#"{"m":"4","n":1,"coeffs":["-1","5"]}"#).unwrap();
        assert_eq!(neg.coefficients(), &[3u32, 1].map(BigUint::from));
        assert!(serde_json::from_str::<LinearPolynomial>(r#"{"m":"4","n":2,"coeffs":["1"]}"#).is_err());
    }

    #[test]
    fn multilinear_and_sop_json() {
        let sop: SopFormula = serde_json::from_str(r#"{"n":2,"products":[[1,-2]]}"#).unwrap();
        let g = sop_to_polynomial(&sop);
        let text = serde_json::to_string(&g).unwrap();
        let back: MultilinearPolynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        let sop_text = serde_json::to_string(&sop).unwrap();
        assert_eq!(sop_text, r#"{"n":2,"products":[[1,-2]]}"#);
    }
}
