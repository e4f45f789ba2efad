//! Seeded random instances: rationals of prescribed valuation, automorphisms,
//! lattices and conjugators. Shared by the test suites and the benchmarks the
//! command line tool runs.

use num_traits::Zero;
use rand::Rng;

use crate::lattice::Lattice;
use crate::linalg::QMatrix;
use crate::padic::{p_pow, ratio, Rational};

pub const PRIMES: [u64; 3] = [2, 3, 5];

/// A `p`-adic unit `a/b` with `1 ≤ |a|, b ≤ bound`, signed at random.
pub fn unit<R: Rng>(rng: &mut R, p: u64, bound: i64) -> Rational {
    loop {
        let a = rng.gen_range(1..=bound);
        let b = rng.gen_range(1..=bound);
        if a % p as i64 != 0 && b % p as i64 != 0 {
            let r = ratio(a, b);
            return if rng.gen_bool(0.5) { -r } else { r };
        }
    }
}

/// `u · p^v` with `v` uniform in `[lo, hi]`.
pub fn with_valuation<R: Rng>(rng: &mut R, p: u64, lo: i64, hi: i64) -> Rational {
    let v = rng.gen_range(lo..=hi);
    unit(rng, p, 6) * p_pow(p, v)
}

/// Invertible `n×n` matrix whose nonzero entries have valuations in `[lo, hi]`;
/// roughly a quarter of the entries are zero.
pub fn automorphism<R: Rng>(rng: &mut R, p: u64, n: usize, lo: i64, hi: i64) -> QMatrix {
    loop {
        let rows = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| if rng.gen_bool(0.25) { Rational::zero() } else { with_valuation(rng, p, lo, hi) })
                    .collect()
            })
            .collect();
        let m = QMatrix::from_rows(rows).expect("square");
        if !m.det().expect("square").is_zero() {
            return m;
        }
    }
}

/// `diag(p^{a_1}, …, p^{a_n})` with exponents in `[lo, hi]`, returned with the
/// exponents.
pub fn diagonal<R: Rng>(rng: &mut R, p: u64, n: usize, lo: i64, hi: i64) -> (QMatrix, Vec<i64>) {
    let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    (crate::contraction::diag_p_powers(p, &exps), exps)
}

/// Block-diagonal automorphism assembled from `1×1` blocks `u p^a` and `2×2`
/// companion blocks of `x² - c₁x - c₀`, so the characteristic polynomial
/// splits into factors of degree at most two.
pub fn block_diagonal<R: Rng>(rng: &mut R, p: u64, n: usize, lo: i64, hi: i64) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && rng.gen_bool(0.5) {
            let c0 = with_valuation(rng, p, lo, hi);
            let c1 = if rng.gen_bool(0.3) { Rational::zero() } else { with_valuation(rng, p, lo, hi) };
            m[(i, i + 1)] = c0;
            m[(i + 1, i)] = Rational::from_integer(1.into());
            m[(i + 1, i + 1)] = c1;
            i += 2;
        } else {
            m[(i, i)] = with_valuation(rng, p, lo, hi);
            i += 1;
        }
    }
    m
}

/// Random invertible matrix with small rational entries (no valuation
/// constraint), for similarity tests.
pub fn conjugator<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    loop {
        let rows = (0..n)
            .map(|_| (0..n).map(|_| ratio(rng.gen_range(-4..=4), rng.gen_range(1..=4))).collect())
            .collect();
        let m = QMatrix::from_rows(rows).expect("square");
        if !m.det().expect("square").is_zero() {
            return m;
        }
    }
}

/// Unimodular integer matrix (product of elementary matrices), so it fixes the
/// standard lattice at every prime.
pub fn unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> QMatrix {
    let mut m = QMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = Rational::from_integer(rng.gen_range(-2i64..=2).into());
        let mut e = QMatrix::identity(n);
        e[(i, j)] = c;
        m = &m * &e;
    }
    m
}

/// Full-rank lattice spanned by `n` random vectors with entry valuations in
/// `[lo, hi]`.
pub fn lattice<R: Rng>(rng: &mut R, p: u64, n: usize, lo: i64, hi: i64) -> Lattice {
    let m = automorphism(rng, p, n, lo, hi);
    Lattice::from_columns(p, n, &m.columns()).expect("prime checked by caller")
}
