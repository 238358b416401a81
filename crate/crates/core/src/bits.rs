//! Bit-string helpers shared by the evaluators and sweeps.
//!
//! Inputs are `&[bool]` with `sigma[0]` holding variable `x_1`. When an input
//! is enumerated by an integer index, `x_1` is the most significant bit, so
//! index 2 at n = 2 is the string `10`.

use crate::error::{Error, Result};

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidBits(format!("unexpected character {other:?}"))),
        })
        .collect()
}

pub fn format_bits(sigma: &[bool]) -> String {
    sigma.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// The `n`-bit input with enumeration index `index` (MSB = `x_1`).
pub fn index_to_bits(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|j| (index >> (n - 1 - j)) & 1 == 1).collect()
}

pub fn bits_to_index(sigma: &[bool]) -> u64 {
    sigma.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

pub(crate) fn check_len(sigma: &[bool], expected: usize) -> Result<()> {
    if sigma.len() == expected {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got: sigma.len() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for n in 1..8 {
            for i in 0..(1u64 << n) {
                assert_eq!(bits_to_index(&index_to_bits(i, n)), i);
            }
        }
        assert_eq!(format_bits(&index_to_bits(2, 2)), "10");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert_eq!(parse_bits("0110").unwrap(), vec![false, true, true, false]);
        assert!(parse_bits("01a").is_err());
    }
}
