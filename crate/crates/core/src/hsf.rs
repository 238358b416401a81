//! Hidden Subgroup Function over finite groups given by Cayley tables.
//!
//! An input encodes a map `χ : G → {1, …, r}` with `r = (G:K)`: one block of
//! `w = ⌈log2 r⌉` bits per group element (element-index order, most
//! significant bit first), and `χ = block + 1`. Blocks `≥ r` violate the
//! input promise. `HSF(σ) = 1` iff `χ` is constant on every coset of `K` and
//! takes distinct values on distinct cosets.
//!
//! The characteristic has two linear polynomials over `Z_{2^n}`:
//! `g1` weights the cyclic within-coset differences by distinct powers of
//! `2^w`, and `g2` compares the sum of the coset representatives' values with
//! `S = r(r+1)/2`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::check_len;
use crate::charpoly::{Characteristic, LinearPolynomial, Modulus};
use crate::error::{Error, Result};
use crate::fingerprint::{compile_general, GeneralCompilation};
use crate::goodset::{sample, GoodSet};

/// Associativity is checked exhaustively only up to this order.
pub const ASSOCIATIVITY_CHECK_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl FiniteGroup {
    /// Validates a Cayley table: Latin square, two-sided identity, inverses,
    /// and (for order ≤ 64) associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let is_perm = |it: &mut dyn Iterator<Item = usize>| {
            let mut seen = vec![false; n];
            for x in it {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return false;
                }
            }
            true
        };
        for (a, row) in table.iter().enumerate() {
            if row.len() != n || !is_perm(&mut row.iter().copied()) {
                return Err(Error::InvalidGroup(format!("row {a} is not a permutation of 0..{n}")));
            }
        }
        for c in 0..n {
            if !is_perm(&mut table.iter().map(|row| row[c])) {
                return Err(Error::InvalidGroup(format!("column {c} is not a permutation of 0..{n}")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        // two-sided inverses; not implied when associativity goes unchecked
        for (a, row) in table.iter().enumerate() {
            if !(0..n).any(|b| row[b] == identity && table[b][a] == identity) {
                return Err(Error::InvalidGroup(format!("element {a} has no inverse")));
            }
        }
        if n <= ASSOCIATIVITY_CHECK_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if table[table[a][b]][c] != table[a][table[b][c]] {
                            return Err(Error::InvalidGroup(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                        }
                    }
                }
            }
        }
        Ok(FiniteGroup { table, identity })
    }

    /// `Z_n` under addition.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        Self::from_table((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
    }

    /// `S_3` as permutations of three points, elements in lexicographic order.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> =
            vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("closed");
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        Self::from_table(table).expect("S_3 table is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == self.identity).expect("validated group")
    }

    /// Subgroup generated by `generators`.
    pub fn generated(&self, generators: &[usize]) -> BTreeSet<usize> {
        let mut set = BTreeSet::from([self.identity]);
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in generators {
                let y = self.op(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalSubgroup {
    elements: BTreeSet<usize>,
}

impl NormalSubgroup {
    pub fn new(group: &FiniteGroup, elements: BTreeSet<usize>) -> Result<Self> {
        let n = group.order();
        if let Some(&x) = elements.iter().find(|&&x| x >= n) {
            return Err(Error::NotSubgroup(format!("element {x} outside the group")));
        }
        if !elements.contains(&group.identity()) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        for &a in &elements {
            if !elements.contains(&group.inverse(a)) {
                return Err(Error::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in &elements {
                if !elements.contains(&group.op(a, b)) {
                    return Err(Error::NotSubgroup(format!("{a}·{b} not in the subset")));
                }
            }
        }
        for a in 0..n {
            let left: BTreeSet<usize> = elements.iter().map(|&k| group.op(a, k)).collect();
            let right: BTreeSet<usize> = elements.iter().map(|&k| group.op(k, a)).collect();
            if left != right {
                return Err(Error::NotNormal(format!("{a}K ≠ K{a}")));
            }
        }
        Ok(NormalSubgroup { elements })
    }

    pub fn elements(&self) -> &BTreeSet<usize> {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Cosets ordered by minimal element, each listed in ascending order; the
/// representative of a coset is its first element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetDecomposition {
    cosets: Vec<Vec<usize>>,
}

impl CosetDecomposition {
    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    pub fn representatives(&self) -> impl Iterator<Item = usize> + '_ {
        self.cosets.iter().map(|c| c[0])
    }

    /// `(a, q)`: coset number and position of every element.
    pub fn positions(&self, order: usize) -> Vec<(usize, usize)> {
        let mut pos = vec![(0, 0); order];
        for (a, coset) in self.cosets.iter().enumerate() {
            for (q, &e) in coset.iter().enumerate() {
                pos[e] = (a, q);
            }
        }
        pos
    }
}

pub fn coset_decomposition(group: &FiniteGroup, subgroup: &NormalSubgroup) -> CosetDecomposition {
    let mut assigned = vec![false; group.order()];
    let mut cosets = Vec::new();
    for a in 0..group.order() {
        if assigned[a] {
            continue;
        }
        let mut coset: Vec<usize> = subgroup.elements().iter().map(|&k| group.op(a, k)).collect();
        coset.sort_unstable();
        for &e in &coset {
            assigned[e] = true;
        }
        cosets.push(coset);
    }
    CosetDecomposition { cosets }
}

/// Outcome of decoding an input string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoding {
    /// `χ_0, …, χ_{N−1}`, each in `[1, r]`.
    Values(Vec<usize>),
    /// Element `element` carries block value `block ≥ r`.
    PromiseViolation { element: usize, block: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsfInstance {
    group: FiniteGroup,
    subgroup: NormalSubgroup,
    cosets: CosetDecomposition,
    index: usize,
    bits_per_value: usize,
}

impl HsfInstance {
    pub fn new(group: FiniteGroup, subgroup: NormalSubgroup) -> Result<Self> {
        let cosets = coset_decomposition(&group, &subgroup);
        let index = cosets.cosets().len();
        if index < 2 {
            return Err(Error::InvalidGroup(format!("subgroup index {index} must be at least 2")));
        }
        let bits_per_value = crate::qbp::ceil_log2(index);
        Ok(HsfInstance { group, subgroup, cosets, index, bits_per_value })
    }

    /// `Z_n` with the subgroup generated by `generator`.
    pub fn cyclic(n: usize, generator: usize) -> Result<Self> {
        let group = FiniteGroup::cyclic(n)?;
        if generator >= n {
            return Err(Error::NotSubgroup(format!("generator {generator} outside Z_{n}")));
        }
        let elements = group.generated(&[generator]);
        let subgroup = NormalSubgroup::new(&group, elements)?;
        Self::new(group, subgroup)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn subgroup(&self) -> &NormalSubgroup {
        &self.subgroup
    }

    pub fn cosets(&self) -> &CosetDecomposition {
        &self.cosets
    }

    /// `r = (G:K)`.
    pub fn index(&self) -> usize {
        self.index
    }

    /// `w = ⌈log2 r⌉`.
    pub fn bits_per_value(&self) -> usize {
        self.bits_per_value
    }

    /// `n = |G| · w`.
    pub fn arity(&self) -> usize {
        self.group.order() * self.bits_per_value
    }

    /// Block value + 1 for every element, without the range check.
    pub fn raw_values(&self, sigma: &[bool]) -> Result<Vec<usize>> {
        check_len(sigma, self.arity())?;
        Ok(sigma
            .chunks(self.bits_per_value)
            .map(|block| block.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize) + 1)
            .collect())
    }

    pub fn decode(&self, sigma: &[bool]) -> Result<Decoding> {
        let values = self.raw_values(sigma)?;
        if let Some((element, &v)) = values.iter().enumerate().find(|(_, &v)| v > self.index) {
            return Ok(Decoding::PromiseViolation { element, block: v - 1 });
        }
        Ok(Decoding::Values(values))
    }

    /// Inverse of [`decode`](Self::decode) for values in `[1, 2^w]`.
    pub fn encode(&self, values: &[usize]) -> Result<Vec<bool>> {
        if values.len() != self.group.order() {
            return Err(Error::LengthMismatch { expected: self.group.order(), got: values.len() });
        }
        let w = self.bits_per_value;
        let mut bits = Vec::with_capacity(self.arity());
        for &v in values {
            if v == 0 || v > 1 << w {
                return Err(Error::InvalidBits(format!("value {v} does not fit in {w} bits")));
            }
            bits.extend((0..w).map(|b| ((v - 1) >> (w - 1 - b)) & 1 == 1));
        }
        Ok(bits)
    }

    /// The Boolean function itself.
    pub fn eval(&self, sigma: &[bool]) -> Result<bool> {
        let values = match self.decode(sigma)? {
            Decoding::Values(v) => v,
            Decoding::PromiseViolation { .. } => return Ok(false),
        };
        let mut seen = BTreeSet::new();
        for coset in self.cosets.cosets() {
            let v = values[coset[0]];
            if coset.iter().any(|&e| values[e] != v) || !seen.insert(v) {
                return Ok(false);
            }
        }
        Ok(seen.len() == self.index)
    }

    /// The input decodes validly and takes exactly `r` distinct values.
    pub fn promise_holds(&self, sigma: &[bool]) -> Result<bool> {
        Ok(match self.decode(sigma)? {
            Decoding::Values(v) => v.iter().collect::<BTreeSet<_>>().len() == self.index,
            Decoding::PromiseViolation { .. } => false,
        })
    }

    /// `{g1, g2}` over `Z_{2^n}`.
    pub fn characteristic(&self) -> Result<Characteristic> {
        let n = self.arity();
        let w = self.bits_per_value;
        let modulus = Modulus::pow2(n)?;
        let order_k = self.subgroup.order();

        // χ_e = 1 + Σ_b bit(e, b) 2^{w−1−b}; accumulate a coefficient per χ_e,
        // then spread it across the element's bits.
        let mut value_weight = vec![BigInt::zero(); self.group.order()];
        for (a, coset) in self.cosets.cosets().iter().enumerate() {
            for q in 0..order_k {
                let weight = BigInt::one() << ((order_k * a + q) * w);
                value_weight[coset[q]] += &weight;
                value_weight[coset[(q + order_k - 1) % order_k]] -= weight;
            }
        }
        let g1 = self.spread(&modulus, &value_weight, BigInt::zero())?;

        let mut rep_weight = vec![BigInt::zero(); self.group.order()];
        for rep in self.cosets.representatives() {
            rep_weight[rep] = BigInt::one();
        }
        let r = self.index as u64;
        let g2 = self.spread(&modulus, &rep_weight, -BigInt::from(r * (r + 1) / 2))?;
        Characteristic::new(vec![g1, g2])
    }

    /// Linear polynomial `Σ_e weight_e · χ_e + constant` in the input bits.
    fn spread(&self, modulus: &Modulus, weight: &[BigInt], constant: BigInt) -> Result<LinearPolynomial> {
        let w = self.bits_per_value;
        let mut coeffs = vec![BigInt::zero(); self.arity() + 1];
        coeffs[0] = constant + weight.iter().sum::<BigInt>();
        for (e, we) in weight.iter().enumerate() {
            for b in 0..w {
                coeffs[1 + e * w + b] = we << (w - 1 - b);
            }
        }
        LinearPolynomial::new(modulus.clone(), &coeffs)
    }
}

/// Builds the characteristic, samples a good set over `Z_{2^n}` and compiles.
pub fn compile_hsf(inst: &HsfInstance, epsilon: f64, seed: u64) -> Result<GeneralCompilation> {
    let chi = inst.characteristic()?;
    let k = sample(epsilon, chi.modulus(), seed)?;
    compile_general(&chi, &k)
}

/// Compiles with an explicitly chosen good set.
pub fn compile_hsf_with(inst: &HsfInstance, k: &GoodSet) -> Result<GeneralCompilation> {
    compile_general(&inst.characteristic()?, k)
}

/// Explicit group description: `{"order": N, "table": [[…]], "subgroup": […]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupSpec {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub subgroup: Vec<usize>,
}

impl GroupSpec {
    pub fn into_instance(self) -> Result<HsfInstance> {
        if self.table.len() != self.order {
            return Err(Error::InvalidGroup(format!("order {} but table has {} rows", self.order, self.table.len())));
        }
        let group = FiniteGroup::from_table(self.table)?;
        let subgroup = NormalSubgroup::new(&group, self.subgroup.into_iter().collect())?;
        HsfInstance::new(group, subgroup)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{index_to_bits, parse_bits};

    fn z4() -> HsfInstance {
        HsfInstance::cyclic(4, 2).unwrap()
    }

    fn z6() -> HsfInstance {
        HsfInstance::cyclic(6, 3).unwrap()
    }

    #[test]
    fn cyclic_group_structure() {
        let g = FiniteGroup::cyclic(6).unwrap();
        assert_eq!(g.identity(), 0);
        assert_eq!(g.inverse(2), 4);
        assert_eq!(g.generated(&[3]), BTreeSet::from([0, 3]));
    }

    #[test]
    fn bad_tables_rejected() {
        assert!(FiniteGroup::from_table(vec![]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![0, 1]]).is_err());
        // Latin square without associativity: a loop of order 5
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::from_table(loop5).unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(ref s) if s.contains('≠')), "{err}");
    }

    #[test]
    fn coset_examples() {
        assert_eq!(z4().cosets().cosets(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(z6().cosets().cosets(), &[vec![0, 3], vec![1, 4], vec![2, 5]]);
        let g = FiniteGroup::cyclic(4).unwrap();
        let whole = NormalSubgroup::new(&g, (0..4).collect()).unwrap();
        assert_eq!(coset_decomposition(&g, &whole).cosets(), &[vec![0, 1, 2, 3]]);
        // index 1 cannot carry an HSF instance
        assert!(HsfInstance::new(g, whole).is_err());
    }

    #[test]
    fn s3_order_two_subgroup_is_not_normal() {
        let s3 = FiniteGroup::symmetric3();
        // element 1 is the transposition swapping points 1 and 2
        let k = s3.generated(&[1]);
        assert_eq!(k.len(), 2);
        assert!(matches!(NormalSubgroup::new(&s3, k), Err(Error::NotNormal(_))));
        // A_3 is normal
        let a3 = s3.generated(&[3]);
        assert_eq!(a3.len(), 3);
        let inst = HsfInstance::new(s3.clone(), NormalSubgroup::new(&s3, a3).unwrap()).unwrap();
        assert_eq!(inst.index(), 2);
    }

    #[test]
    fn non_subgroup_rejected() {
        let g = FiniteGroup::cyclic(6).unwrap();
        assert!(matches!(NormalSubgroup::new(&g, BTreeSet::from([0, 1])), Err(Error::NotSubgroup(_))));
        assert!(matches!(NormalSubgroup::new(&g, BTreeSet::from([3])), Err(Error::NotSubgroup(_))));
    }

    #[test]
    fn instance_sizes() {
        assert_eq!((z4().index(), z4().bits_per_value(), z4().arity()), (2, 1, 4));
        assert_eq!((z6().index(), z6().bits_per_value(), z6().arity()), (3, 2, 12));
    }

    #[test]
    fn decode_examples() {
        let inst = z4();
        assert_eq!(inst.decode(&parse_bits("0101").unwrap()).unwrap(), Decoding::Values(vec![1, 2, 1, 2]));
        // r = 3 < 2^w = 4: block 11 is out of range
        let inst6 = z6();
        let all_max = vec![true; 12];
        assert!(matches!(inst6.decode(&all_max).unwrap(), Decoding::PromiseViolation { element: 0, block: 3 }));
        assert!(matches!(inst.decode(&[true]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn encode_decode_round_trip() {
        let inst = z6();
        for i in 0..(1u64 << 12) {
            let sigma = index_to_bits(i, 12);
            if let Decoding::Values(v) = inst.decode(&sigma).unwrap() {
                assert_eq!(inst.encode(&v).unwrap(), sigma);
            }
        }
    }

    #[test]
    fn eval_examples() {
        let inst = z4();
        assert!(inst.eval(&inst.encode(&[1, 2, 1, 2]).unwrap()).unwrap());
        assert!(!inst.eval(&inst.encode(&[1, 1, 1, 1]).unwrap()).unwrap());
        assert!(!inst.eval(&inst.encode(&[1, 1, 2, 2]).unwrap()).unwrap());
        let inst6 = z6();
        assert!(!inst6.eval(&inst6.encode(&[2; 6]).unwrap()).unwrap());
        assert!(inst6.eval(&inst6.encode(&[3, 1, 2, 3, 1, 2]).unwrap()).unwrap());
        assert!(!inst6.eval(&[true; 12]).unwrap());
    }

    #[test]
    fn characteristic_examples() {
        let inst = z4();
        let chi = inst.characteristic().unwrap();
        assert_eq!(chi.len(), 2);
        assert_eq!(chi.modulus().value(), &num_bigint::BigUint::from(16u32));
        let valid = inst.encode(&[1, 2, 1, 2]).unwrap();
        assert!(chi.evaluate(&valid).unwrap().iter().all(|r| r.is_zero()));
        let broken = inst.encode(&[1, 2, 2, 2]).unwrap();
        assert!(!chi.polynomials()[0].evaluate(&broken).unwrap().is_zero());
        // representatives 0 and 1 carry a permutation of {1, 2}
        let swapped = inst.encode(&[2, 1, 1, 2]).unwrap();
        assert!(chi.polynomials()[1].evaluate(&swapped).unwrap().is_zero());
    }

    #[test]
    fn degenerate_values_pass_g2_but_fail_promise() {
        let inst = z6();
        let sigma = inst.encode(&[2; 6]).unwrap();
        assert!(inst.characteristic().unwrap().vanishes(&sigma).unwrap());
        assert!(!inst.promise_holds(&sigma).unwrap());
        assert!(!inst.eval(&sigma).unwrap());
    }

    #[test]
    fn compile_hsf_shape() {
        let c = compile_hsf(&z4(), 0.25, 0).unwrap();
        let t = c.good_set.size();
        assert_eq!(c.characteristic.len(), 2);
        assert_eq!(c.program.metrics().qubits, t.trailing_zeros() as usize + 2);
        let valid = z4().encode(&[1, 2, 1, 2]).unwrap();
        assert!((c.accept_probability(&valid).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn group_spec_json() {
        let spec: GroupSpec = serde_json::from_str(
            r#"{"order": 4, "table": [[0,1,2,3],[1,2,3,0],[2,3,0,1],[3,0,1,2]], "subgroup": [0, 2]}"#,
        )
        .unwrap();
        assert_eq!(spec.into_instance().unwrap(), z4());
    }
}
