//! Factorization of rational polynomials of small degree: squarefree split,
//! Cantor-Zassenhaus modulo an auxiliary prime, linear Hensel lifting and
//! exhaustive factor recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{MonicPoly, Poly};
use super::LinalgError;
use crate::padic::{is_prime, Rational};

pub const DEFAULT_DEGREE_CAP: usize = 8;

/// Irreducible monic factors with multiplicities, ordered by degree and then
/// coefficients so the output is deterministic.
pub fn factor_over_q(f: &MonicPoly) -> Result<Vec<(MonicPoly, usize)>, LinalgError> {
    factor_over_q_with_cap(f, DEFAULT_DEGREE_CAP)
}

pub fn factor_over_q_with_cap(
    f: &MonicPoly,
    cap: usize,
) -> Result<Vec<(MonicPoly, usize)>, LinalgError> {
    if f.degree() > cap {
        return Err(LinalgError::DegreeCapExceeded { degree: f.degree(), cap });
    }
    let mut out = Vec::new();
    for (part, mult) in squarefree_decomposition(f.as_poly()) {
        for g in factor_squarefree(&part) {
            out.push((MonicPoly::from_poly(g).expect("monic factor"), mult));
        }
    }
    out.sort_by(|(a, _), (b, _)| {
        a.degree().cmp(&b.degree()).then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    Ok(out)
}

/// Yun's algorithm: monic squarefree parts `a_i` with `f = prod a_i^i`.
pub fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, usize)> {
    let f = f.make_monic();
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let df = f.derivative();
    let mut a = f.gcd(&df);
    let mut b = f.div_rem(&a).0;
    let mut c = df.div_rem(&a).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    loop {
        a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_rem(&a).0;
        if b.degree().unwrap_or(0) == 0 {
            break;
        }
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Primitive integer polynomial with positive leading coefficient associated to `f`.
fn primitive_integer(f: &Poly) -> Vec<BigInt> {
    let l = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut v: Vec<BigInt> = f.coeffs().iter().map(|c| c.numer() * (&l / c.denom())).collect();
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() {
        for c in v.iter_mut() {
            *c = &*c / &g;
        }
    }
    if v.last().is_some_and(|c| c.is_negative()) {
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }
    v
}

fn int_poly_to_q(v: &[BigInt]) -> Poly {
    Poly::new(v.iter().map(|c| Rational::from_integer(c.clone())).collect())
}

/// Factors a squarefree rational polynomial into monic irreducibles.
fn factor_squarefree(f: &Poly) -> Vec<Poly> {
    let a = primitive_integer(f);
    if a.len() <= 2 {
        return vec![f.make_monic()];
    }
    zassenhaus(&a).into_iter().map(|g| int_poly_to_q(&g).make_monic()).collect()
}

// ---------------------------------------------------------------------------
// Arithmetic in F_q[x], coefficients as u64 with q < 2^31.

type Fq = Vec<u64>;

fn fq_trim(mut a: Fq) -> Fq {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fq_from_int(a: &[BigInt], q: u64) -> Fq {
    let qb = BigInt::from(q);
    fq_trim(a.iter().map(|c| c.mod_floor(&qb).to_u64().unwrap()).collect())
}

fn fq_inv(a: u64, q: u64) -> u64 {
    fq_pow_scalar(a, q - 2, q)
}

fn fq_pow_scalar(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1u64;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % q;
        }
        a = a * a % q;
        e >>= 1;
    }
    r
}

fn fq_sub(a: &Fq, b: &Fq, q: u64) -> Fq {
    let n = a.len().max(b.len());
    fq_trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + q - b.get(i).copied().unwrap_or(0)) % q)
            .collect(),
    )
}

fn fq_add(a: &Fq, b: &Fq, q: u64) -> Fq {
    let n = a.len().max(b.len());
    fq_trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % q)
            .collect(),
    )
}

fn fq_mul(a: &Fq, b: &Fq, q: u64) -> Fq {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % q;
        }
    }
    fq_trim(out)
}

fn fq_divrem(a: &Fq, b: &Fq, q: u64) -> (Fq, Fq) {
    assert!(!b.is_empty());
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let inv = fq_inv(*b.last().unwrap(), q);
    let mut quo = vec![0u64; r.len() - db];
    for k in (0..quo.len()).rev() {
        let c = r[k + db] * inv % q;
        quo[k] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + q - c * bj % q) % q;
            }
        }
    }
    r.truncate(db);
    (fq_trim(quo), fq_trim(r))
}

fn fq_monic(a: &Fq, q: u64) -> Fq {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = fq_inv(l, q);
            a.iter().map(|&c| c * inv % q).collect()
        }
    }
}

fn fq_gcd(a: &Fq, b: &Fq, q: u64) -> Fq {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = fq_divrem(&a, &b, q).1;
        a = b;
        b = r;
    }
    fq_monic(&a, q)
}

/// `(g, s, t)` with `s a + t b = g`, `g` monic.
fn fq_ext_gcd(a: &Fq, b: &Fq, q: u64) -> (Fq, Fq, Fq) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (quo, r) = fq_divrem(&r0, &r1, q);
        let s = fq_sub(&s0, &fq_mul(&quo, &s1, q), q);
        let t = fq_sub(&t0, &fq_mul(&quo, &t1, q), q);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = fq_inv(*r0.last().unwrap(), q);
    let sc = |v: &Fq| fq_trim(v.iter().map(|&c| c * inv % q).collect());
    (sc(&r0), sc(&s0), sc(&t0))
}

fn fq_powmod(base: &Fq, mut e: u128, m: &Fq, q: u64) -> Fq {
    let mut result = vec![1u64];
    let mut b = fq_divrem(base, m, q).1;
    while e > 0 {
        if e & 1 == 1 {
            result = fq_divrem(&fq_mul(&result, &b, q), m, q).1;
        }
        b = fq_divrem(&fq_mul(&b, &b, q), m, q).1;
        e >>= 1;
    }
    result
}

fn fq_derivative(a: &Fq, q: u64) -> Fq {
    fq_trim(a.iter().enumerate().skip(1).map(|(i, &c)| (i as u64 % q) * c % q).collect())
}

/// Factors a monic squarefree polynomial over F_q (q odd) into monic irreducibles.
fn fq_factor(f: &Fq, q: u64, rng: &mut ChaCha8Rng) -> Vec<Fq> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let mut i = 1usize;
    while rest.len() > 1 && 2 * i < rest.len() {
        h = fq_powmod(&h, q as u128, &rest, q);
        let g = fq_gcd(&fq_sub(&h, &x, q), &rest, q);
        if g.len() > 1 {
            equal_degree_split(&g, i, q, rng, &mut out);
            rest = fq_divrem(&rest, &g, q).0;
            h = fq_divrem(&h, &rest, q).1;
        }
        i += 1;
    }
    if rest.len() > 1 {
        out.push(fq_monic(&rest, q));
    }
    out
}

fn equal_degree_split(g: &Fq, d: usize, q: u64, rng: &mut ChaCha8Rng, out: &mut Vec<Fq>) {
    let n = g.len() - 1;
    if n == d {
        out.push(fq_monic(g, q));
        return;
    }
    let exp = ((q as u128).pow(d as u32) - 1) / 2;
    loop {
        let a: Fq = fq_trim((0..n).map(|_| rng.gen_range(0..q)).collect());
        if a.len() < 2 {
            continue;
        }
        let b = fq_sub(&fq_powmod(&a, exp, g, q), &vec![1u64], q);
        let c = fq_gcd(&b, g, q);
        if c.len() > 1 && c.len() < g.len() {
            let other = fq_divrem(g, &c, q).0;
            equal_degree_split(&c, d, q, rng, out);
            equal_degree_split(&other, d, q, rng, out);
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Lifting and recombination over Z.

fn mod_sym(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn zpoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn zpoly_reduce(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    a.iter().map(|c| c.mod_floor(m)).collect()
}

fn fq_to_z(a: &Fq) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lifts `f ≡ g h (mod q)`, `g` monic, to `f ≡ g h (mod q^k)`; returns the
/// lifted pair with coefficients reduced into `[0, q^k)`.
fn hensel_lift(f: &[BigInt], g: &Fq, h: &Fq, q: u64, k: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let (one, s, t) = fq_ext_gcd(g, h, q);
    debug_assert_eq!(one, vec![1u64]);
    let mut gz = fq_to_z(g);
    let mut hz = fq_to_z(h);
    let qb = BigInt::from(q);
    let mut qk = qb.clone();
    for _ in 1..k {
        let prod = zpoly_mul(&gz, &hz);
        let n = f.len().max(prod.len());
        let diff: Vec<BigInt> = (0..n)
            .map(|i| {
                let a = f.get(i).cloned().unwrap_or_default();
                let b = prod.get(i).cloned().unwrap_or_default();
                let d = a - b;
                debug_assert!((&d % &qk).is_zero());
                d / &qk
            })
            .collect();
        let e = fq_from_int(&diff, q);
        let te = fq_mul(&t, &e, q);
        let (quo, rem) = fq_divrem(&te, g, q);
        let dh = fq_add(&fq_mul(&s, &e, q), &fq_mul(&quo, h, q), q);
        let dg = rem;
        let add = |base: &mut Vec<BigInt>, delta: &Fq| {
            if base.len() < delta.len() {
                base.resize(delta.len(), BigInt::zero());
            }
            for (i, &c) in delta.iter().enumerate() {
                base[i] += &qk * BigInt::from(c);
            }
        };
        add(&mut gz, &dg);
        add(&mut hz, &dh);
        qk *= &qb;
        gz = zpoly_reduce(&gz, &qk);
        hz = zpoly_reduce(&hz, &qk);
    }
    (gz, hz)
}

/// Exact division in Z[x]; `None` unless `b` divides `a` with integral quotient.
fn zpoly_exact_div(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let (quo, rem) = int_poly_to_q(a).div_rem(&int_poly_to_q(b));
    if !rem.is_zero() || quo.coeffs().iter().any(|c| !c.is_integer()) {
        return None;
    }
    Some(quo.coeffs().iter().map(|c| c.to_integer()).collect())
}

fn primitive_part(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: Vec<BigInt> = v.iter().map(|c| c / &g).collect();
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    if out.last().is_some_and(|c| c.is_negative()) {
        out.iter_mut().for_each(|c| *c = -&*c);
    }
    out
}

/// Irreducible factors over Z of a primitive squarefree polynomial of degree >= 2.
fn zassenhaus(a: &[BigInt]) -> Vec<Vec<BigInt>> {
    let lc = a.last().unwrap().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let q = (3u64..)
        .filter(|&q| is_prime(q))
        .find(|&q| {
            if (&lc % BigInt::from(q)).is_zero() {
                return false;
            }
            let fq = fq_from_int(a, q);
            fq_gcd(&fq, &fq_derivative(&fq, q), q) == vec![1u64]
        })
        .expect("some prime keeps a squarefree polynomial squarefree");
    let fq = fq_monic(&fq_from_int(a, q), q);
    let mut modular = fq_factor(&fq, q, &mut rng);
    if modular.len() <= 1 {
        return vec![a.to_vec()];
    }
    modular.sort();

    // Coefficients of lc * (any factor) are bounded by |lc| 2^deg ||a||_1.
    let deg = a.len() - 1;
    let norm1: BigInt = a.iter().map(|c| c.abs()).sum();
    let bound = lc.abs() * (BigInt::one() << deg) * norm1 * 2;
    let qb = BigInt::from(q);
    let mut k = 1u32;
    let mut modulus = qb.clone();
    while modulus <= bound {
        modulus *= &qb;
        k += 1;
    }

    // Multifactor lift by peeling one monic factor at a time.
    let lc_q = lc.mod_floor(&qb).to_u64().unwrap();
    let mut lifted = Vec::with_capacity(modular.len());
    let mut current = a.to_vec();
    for i in 0..modular.len() - 1 {
        let rest = modular[i + 1..].iter().fold(vec![lc_q], |acc, g| fq_mul(&acc, g, q));
        let (g, h) = hensel_lift(&current, &modular[i], &rest, q, k);
        lifted.push(g);
        // h ≡ lc * prod(rest) mod q^k; continue lifting against it.
        current = h.iter().map(|c| mod_sym(c, &modulus)).collect();
        if i == modular.len() - 2 {
            let lc_inv = crate::padic::mod_inverse(&lc.mod_floor(&modulus), &modulus);
            lifted.push(zpoly_reduce(&current.iter().map(|c| c * &lc_inv).collect::<Vec<_>>(), &modulus));
        }
    }

    let mut factors = Vec::new();
    let mut remaining: Vec<Vec<BigInt>> = lifted;
    let mut f = a.to_vec();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        for combo in combinations(remaining.len(), size) {
            let lcf = f.last().unwrap().clone();
            let prod = combo
                .iter()
                .fold(vec![lcf.clone()], |acc, &i| zpoly_reduce(&zpoly_mul(&acc, &remaining[i]), &modulus));
            let cand = primitive_part(&prod.iter().map(|c| mod_sym(c, &modulus)).collect::<Vec<_>>());
            if let Some(quo) = zpoly_exact_div(&f, &cand) {
                factors.push(cand);
                f = primitive_part(&quo);
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !combo.contains(i))
                    .map(|(_, g)| g)
                    .collect();
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if f.len() > 1 {
        factors.push(f);
    }
    factors
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{int, ratio};
    use proptest::prelude::*;

    fn monic(c: &[i64]) -> MonicPoly {
        MonicPoly::from_ints(c).unwrap()
    }

    fn remultiply(factors: &[(MonicPoly, usize)]) -> Poly {
        factors.iter().fold(Poly::one(), |acc, (g, m)| acc.mul(&g.as_poly().pow(*m)))
    }

    #[test]
    fn small_examples() {
        let f = factor_over_q(&monic(&[-1, 0, 1])).unwrap();
        assert_eq!(f, vec![(monic(&[-1, 1]), 1), (monic(&[1, 1]), 1)]);
        for p in [2, 3, 5, 7] {
            let f = factor_over_q(&monic(&[-p, 0, 1])).unwrap();
            assert_eq!(f, vec![(monic(&[-p, 0, 1]), 1)]);
        }
        let f = factor_over_q(&monic(&[1, -2, 1])).unwrap();
        assert_eq!(f, vec![(monic(&[-1, 1]), 2)]);
        assert!(factor_over_q(&monic(&[1])).unwrap().is_empty());
    }

    #[test]
    fn swinnerton_dyer_like_cases() {
        // x^4 + 1 is irreducible over Q but splits modulo every prime.
        let f = factor_over_q(&monic(&[1, 0, 0, 0, 1])).unwrap();
        assert_eq!(f.len(), 1);
        // x^4 - 10x^2 + 1 likewise.
        let f = factor_over_q(&monic(&[1, 0, -10, 0, 1])).unwrap();
        assert_eq!(f.len(), 1);
        // (x^2+1)(x^2-2)(x^3 - x - 1) of degree 7
        let g = Poly::from_ints(&[1, 0, 1]).mul(&Poly::from_ints(&[-2, 0, 1])).mul(&Poly::from_ints(&[-1, -1, 0, 1]));
        let f = factor_over_q(&MonicPoly::from_poly(g.clone()).unwrap()).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(remultiply(&f), g);
    }

    #[test]
    fn rational_coefficients() {
        // (x - 1/2)(x^2 - 1/3)
        let g = Poly::linear(ratio(1, 2)).mul(&Poly::new(vec![ratio(-1, 3), int(0), int(1)]));
        let f = factor_over_q(&MonicPoly::from_poly(g.clone()).unwrap()).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].0.as_poly(), &Poly::linear(ratio(1, 2)));
        assert_eq!(remultiply(&f), g);
    }

    #[test]
    fn degree_cap() {
        let f = monic(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(
            factor_over_q(&f),
            Err(LinalgError::DegreeCapExceeded { degree: 9, cap: 8 })
        );
    }

    fn arb_factor() -> impl Strategy<Value = Poly> {
        prop_oneof![
            (-6i64..7, 1i64..4).prop_map(|(a, b)| Poly::linear(ratio(a, b))),
            (-6i64..7, -6i64..7).prop_map(|(a, b)| Poly::from_ints(&[a, b, 1])),
            (-4i64..5, -4i64..5, -4i64..5).prop_map(|(a, b, c)| Poly::from_ints(&[a, b, c, 1])),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn remultiplies_to_input(parts in proptest::collection::vec(arb_factor(), 1..4)) {
            let g = parts.iter().fold(Poly::one(), |acc, p| acc.mul(p));
            prop_assume!(g.degree().unwrap() <= 8);
            let f = MonicPoly::from_poly(g.clone()).unwrap();
            let factors = factor_over_q(&f).unwrap();
            prop_assert_eq!(remultiply(&factors), g);
            // each factor irreducible: refactoring returns itself
            for (h, _) in &factors {
                let again = factor_over_q(h).unwrap();
                prop_assert_eq!(again, vec![(h.clone(), 1)]);
            }
        }
    }
}
