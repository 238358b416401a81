//! Good parameter sets for fingerprinting.
//!
//! A multiset `K = {k_1, …, k_t}` is good for `b ≢ 0 (mod m)` when
//! `(1/t²)(Σ cos(2π k_i b / m))² < ε`. A uniformly random `K` of size
//! `⌈(2/ε) ln 2m⌉` is good for every nonzero `b` with positive probability;
//! [`sample`] draws such a set and the `verify_*` functions check it.
//!
//! `t` is padded up to a power of two so the branch register can be prepared
//! by an exact Hadamard layer. Extra random parameters only tighten the
//! concentration bound.

use std::f64::consts::PI;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charpoly::{big_ratio, Modulus};
use crate::error::{Error, Result};

/// Default bound on `m` for exhaustive verification.
pub const DEFAULT_VERIFY_LIMIT: u64 = 1 << 20;

#[derive(Clone, PartialEq, Debug)]
pub struct GoodSet {
    modulus: Modulus,
    epsilon: f64,
    params: Vec<BigUint>,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// `⌈(2/ε) ln 2m⌉`, before power-of-two padding.
pub fn raw_required_size(epsilon: f64, m: &Modulus) -> Result<usize> {
    check_epsilon(epsilon)?;
    let ln_2m = m.ln() + std::f64::consts::LN_2;
    Ok(((2.0 / epsilon) * ln_2m).ceil() as usize)
}

/// Smallest power of two not below [`raw_required_size`].
pub fn required_size(epsilon: f64, m: &Modulus) -> Result<usize> {
    Ok(raw_required_size(epsilon, m)?.next_power_of_two())
}

/// `2·exp(−εt/2)`: the chance that a uniformly random `K` of size `t` fails
/// for one fixed nonzero `b`.
pub fn azuma_failure_bound(epsilon: f64, t: usize) -> f64 {
    2.0 * (-epsilon * t as f64 / 2.0).exp()
}

/// Draws `required_size(ε, m)` parameters uniformly from `[0, m)`. The result
/// is not verified.
pub fn sample(epsilon: f64, m: &Modulus, seed: u64) -> Result<GoodSet> {
    let t = required_size(epsilon, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = (0..t).map(|_| rng.gen_biguint_below(m.value())).collect();
    Ok(GoodSet { modulus: m.clone(), epsilon, params })
}

impl GoodSet {
    /// Wraps explicit parameters. `t` must be a power of two and every
    /// parameter is reduced into `[0, m)`. No minimum size is enforced here so
    /// that small hand-built sets can be studied.
    pub fn from_params(m: Modulus, epsilon: f64, params: Vec<BigUint>) -> Result<Self> {
        check_epsilon(epsilon)?;
        if params.is_empty() || !params.len().is_power_of_two() {
            return Err(Error::NonPowerOfTwoT(params.len()));
        }
        let params = params.into_iter().map(|k| k % m.value()).collect();
        Ok(GoodSet { modulus: m, epsilon, params })
    }

    pub fn from_u64(m: u64, epsilon: f64, params: &[u64]) -> Result<Self> {
        Self::from_params(Modulus::from_u64(m)?, epsilon, params.iter().map(|&k| BigUint::from(k)).collect())
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn size(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[BigUint] {
        &self.params
    }

    /// `(k_i · b mod m) / m` for every parameter, with the product reduced
    /// exactly before conversion to a double.
    pub fn phase_fractions(&self, b: &BigUint) -> Vec<f64> {
        let m = self.modulus.value();
        self.params.iter().map(|k| big_ratio(&((k * b) % m), m)).collect()
    }

    /// `(1/t²)(Σ cos(2π (k_i b mod m)/m))²`.
    pub fn cosine_sum(&self, b: &BigUint) -> Result<f64> {
        if (b % self.modulus.value()).is_zero() {
            return Err(Error::ZeroB);
        }
        Ok(self.cosine_sum_unchecked(b))
    }

    fn cosine_sum_unchecked(&self, b: &BigUint) -> f64 {
        let t = self.size() as f64;
        let sum: f64 = self.phase_fractions(b).iter().map(|f| (2.0 * PI * f).cos()).sum();
        (sum / t) * (sum / t)
    }

    pub fn is_good_for(&self, b: &BigUint) -> Result<bool> {
        Ok(self.cosine_sum(b)? < self.epsilon)
    }

    /// Checks goodness for every `b ∈ [1, m−1]`. Periodicity of the cosine in
    /// `b` makes this range sufficient for all `b ≢ 0`.
    pub fn verify_exhaustive(&self, limit: u64) -> Result<bool> {
        let too_large = || Error::TooLarge { what: format!("modulus {}", self.modulus), limit: limit.to_string() };
        let m = self.modulus.value().to_u64().ok_or_else(too_large)?;
        if m > limit {
            return Err(too_large());
        }
        let ks: Vec<u64> = self.params.iter().map(|k| k.to_u64().expect("k < m fits in u64")).collect();
        let t = ks.len() as f64;
        let eps = self.epsilon;
        let good_for = |b: u64| {
            let sum: f64 = ks
                .iter()
                .map(|&k| {
                    let r = ((k as u128 * b as u128) % m as u128) as f64;
                    (2.0 * PI * r / m as f64).cos()
                })
                .sum();
            (sum / t) * (sum / t) < eps
        };
        Ok((1..m).into_par_iter().all(good_for))
    }

    /// Checks goodness on a finite collection of residues, e.g. the values a
    /// polynomial actually takes on a swept input set.
    pub fn verify_on<'a, I>(&self, residues: I) -> Result<bool>
    where
        I: IntoIterator<Item = &'a BigUint>,
    {
        for b in residues {
            if !self.is_good_for(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Samples with seeds `seed, seed + 1, …` until `accept` approves a set, up to
/// `attempts` tries. Returns the set together with the seed that produced it.
pub fn sample_until<F>(epsilon: f64, m: &Modulus, seed: u64, attempts: u64, mut accept: F) -> Result<Option<(GoodSet, u64)>>
where
    F: FnMut(&GoodSet) -> Result<bool>,
{
    for offset in 0..attempts {
        let s = seed.wrapping_add(offset);
        let set = sample(epsilon, m, s)?;
        if accept(&set)? {
            return Ok(Some((set, s)));
        }
    }
    Ok(None)
}

#[derive(Serialize, Deserialize)]
struct GoodSetJson {
    m: String,
    epsilon: f64,
    params: Vec<String>,
}

impl Serialize for GoodSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GoodSetJson {
            m: self.modulus.to_string(),
            epsilon: self.epsilon,
            params: self.params.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GoodSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = GoodSetJson::deserialize(d)?;
        let m: BigUint = json.m.parse().map_err(|_| D::Error::custom("bad modulus"))?;
        let params = json
            .params
            .iter()
            .map(|p| p.parse::<BigUint>().map_err(|_| D::Error::custom("bad parameter")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let m = Modulus::new(m).map_err(D::Error::custom)?;
        GoodSet::from_params(m, json.epsilon, params).map_err(D::Error::custom)
    }
}
