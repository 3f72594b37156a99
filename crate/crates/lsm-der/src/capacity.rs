//! Pattern-memorization capacity of a multi-branch cell with binary
//! synapses, obtained by counting the distinct wiring configurations.
//!
//! A cell with `m` branches of `k` synapse slots drawing from `d` afferent
//! lines realizes `C(C(k+d-1, k) + m - 1, m)` distinct functions; the
//! capacity in bits is the base-2 log of that count. The binomials overflow
//! any fixed-width integer for realistic shapes, so they are computed
//! exactly with arbitrary-precision integers and only the final log is
//! carried out in floating point.

use std::io::Write;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::Result;

/// The shape of one cell: branch count, slots per branch, afferent lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellShape {
    pub branches: usize,
    pub slots: usize,
    pub input_dim: usize,
}

impl CellShape {
    pub fn new(branches: usize, slots: usize, input_dim: usize) -> Self {
        CellShape {
            branches,
            slots,
            input_dim,
        }
    }
}

/// Exact binomial coefficient `C(n, k)` over machine-sized `n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut res = BigUint::one();
    for i in 0..k {
        res = res * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    res
}

/// Exact binomial coefficient `C(n, k)` where `n` is itself a big integer
/// (needed for the outer count, whose `n` is the inner count).
pub fn binomial_big(n: &BigUint, k: u64) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::ZERO;
    }
    let mut res = BigUint::one();
    for i in 0..k {
        res = res * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    res
}

/// Base-2 logarithm of a positive big integer, accurate to within a few
/// ulps: the top 64 bits provide the mantissa, the remaining bit length
/// the exponent.
pub fn log2_biguint(n: &BigUint) -> f64 {
    assert!(*n != BigUint::ZERO, "log2 of zero");
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap();
    shift as f64 + (top as f64).log2()
}

/// Number of distinct wirings of one cell.
pub fn wiring_count(shape: &CellShape) -> BigUint {
    let per_branch = binomial(
        (shape.slots + shape.input_dim - 1) as u64,
        shape.slots as u64,
    );
    let n = per_branch + BigUint::from(shape.branches - 1);
    binomial_big(&n, shape.branches as u64)
}

/// Pattern-memorization capacity of one cell, in bits.
pub fn bn_capacity(shape: &CellShape) -> f64 {
    log2_biguint(&wiring_count(shape))
}

/// One row of a capacity sweep: a branch count `m` dividing the synapse
/// budget, its slots-per-branch `k = s/m`, the single-cell capacity and
/// the two-cell (opponent pair) capacity, which is twice the single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityPoint {
    pub branches: usize,
    pub slots: usize,
    pub bits: f64,
    pub pair_bits: f64,
}

/// Evaluates the capacity for every divisor `m` of the per-cell synapse
/// budget `s`, with `k = s/m`, in ascending order of `m`.
pub fn capacity_sweep(total_synapses: usize, input_dim: usize) -> Vec<CapacityPoint> {
    assert!(total_synapses >= 1, "synapse budget must be at least 1");
    let mut points = Vec::new();
    for m in 1..=total_synapses {
        if total_synapses % m != 0 {
            continue;
        }
        let k = total_synapses / m;
        let bits = bn_capacity(&CellShape::new(m, k, input_dim));
        points.push(CapacityPoint {
            branches: m,
            slots: k,
            bits,
            pair_bits: 2.0 * bits,
        });
    }
    points
}

/// Writes a sweep as delimited text with columns `m k bits pair_bits`.
pub fn write_sweep<W: Write>(mut w: W, points: &[CapacityPoint]) -> Result<()> {
    writeln!(w, "# m k bits pair_bits")?;
    for p in points {
        writeln!(w, "{} {} {} {}", p.branches, p.slots, p.bits, p.pair_bits)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(4, 7), BigUint::ZERO);
        assert_eq!(binomial(1000, 2), BigUint::from(499_500u32));
    }

    #[test]
    fn binomial_big_agrees_with_small() {
        for n in 0..30u64 {
            for k in 0..=n {
                assert_eq!(binomial_big(&BigUint::from(n), k), binomial(n, k));
            }
        }
    }

    #[test]
    fn log2_matches_f64_for_small_values() {
        for v in [1u64, 2, 3, 21, 1024, 999_983] {
            let got = log2_biguint(&BigUint::from(v));
            assert!((got - (v as f64).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn log2_of_power_of_two_is_exact() {
        let n = BigUint::one() << 5000;
        assert!((log2_biguint(&n) - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn capacity_degenerate_cell() {
        // One branch, one slot, one line: a single realizable wiring.
        let bits = bn_capacity(&CellShape::new(1, 1, 1));
        assert!(bits.abs() < 1e-12);
    }

    #[test]
    fn capacity_single_synapse_four_lines() {
        // The lone synapse chooses one of 4 lines: 2 bits.
        let bits = bn_capacity(&CellShape::new(1, 1, 4));
        assert!((bits - 2.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_hand_enumerated() {
        // m=2, k=2, d=3: per-branch C(4,2)=6, cell C(7,2)=21.
        assert_eq!(wiring_count(&CellShape::new(2, 2, 3)), BigUint::from(21u32));
        let bits = bn_capacity(&CellShape::new(2, 2, 3));
        assert!((bits - 21f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn sweep_prime_budget_has_two_rows() {
        let points = capacity_sweep(7, 10);
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].branches, 1);
        assert_eq!(points[1].branches, 7);
    }

    #[test]
    fn sweep_rows_match_direct_recomputation() {
        for p in capacity_sweep(70, 140) {
            let direct = bn_capacity(&CellShape::new(p.branches, p.slots, 140));
            assert_eq!(p.bits, direct);
            assert_eq!(p.pair_bits, 2.0 * direct);
        }
    }

    #[test]
    fn capacity_increases_with_input_dim() {
        let mut last = f64::NEG_INFINITY;
        for d in [10, 20, 50, 100, 200] {
            let bits = bn_capacity(&CellShape::new(3, 4, d));
            assert!(bits > last);
            last = bits;
        }
    }

    #[test]
    fn sweep_text_has_one_line_per_divisor() {
        let points = capacity_sweep(70, 140);
        let mut buf = Vec::new();
        write_sweep(&mut buf, &points).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), points.len() + 1);
    }
}
