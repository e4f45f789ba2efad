//! Finite nilpotent groups as direct products of finite p-groups given by
//! Cayley tables: subgroup closure, Sylow decomposition of subgroups and
//! homomorphism enumeration.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::OnceLock;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::padic::is_prime;

pub const DEFAULT_CLOSURE_CAP: usize = 4096;
pub const DEFAULT_HOM_CAP: usize = 1 << 20;
const EXHAUSTIVE_ASSOCIATIVITY: usize = 128;
const SAMPLED_TRIPLES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NilpotentError {
    #[error("closure exceeds the cap of {0} elements")]
    CapExceeded(usize),
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("order {0} is not a prime power")]
    NotPrimePower(usize),
    #[error("factor primes must be distinct, {0} repeats")]
    RepeatedPrime(u64),
    #[error("{0} is not a prime")]
    UnknownPrime(u64),
    #[error("element does not belong to the group")]
    NotAnElement,
}

/// `(p, k)` with `n = p^k`, if `n > 1` is a prime power.
fn prime_power(n: usize) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = n;
    let mut k = 0;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p as u64, k))
}

/// A finite p-group by its multiplication table on `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePGroup {
    prime: u64,
    table: Vec<Vec<u32>>,
    identity: u32,
    inverses: Vec<u32>,
}

impl FinitePGroup {
    /// Validates closure, identity, inverses, and associativity (exhaustive up
    /// to order 128, sampled above).
    pub fn from_table(table: Vec<Vec<u32>>) -> Result<Self, NilpotentError> {
        let n = table.len();
        let (prime, _) = prime_power(n).ok_or(NilpotentError::NotPrimePower(n))?;
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x as usize >= n)) {
            return Err(NilpotentError::InvalidTable("rows must be permutations of 0..n".into()));
        }
        for r in &table {
            let distinct: BTreeSet<_> = r.iter().collect();
            if distinct.len() != n {
                return Err(NilpotentError::InvalidTable("rows must be permutations of 0..n".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] as usize == x && table[x][e] as usize == x))
            .ok_or_else(|| NilpotentError::InvalidTable("no identity".into()))? as u32;
        let mut inverses = vec![0u32; n];
        for (x, inv) in inverses.iter_mut().enumerate() {
            *inv = (0..n as u32)
                .find(|&y| table[x][y as usize] == identity && table[y as usize][x] == identity)
                .ok_or_else(|| NilpotentError::InvalidTable(format!("{x} has no inverse")))?;
        }
        let g = FinitePGroup { prime, table, identity, inverses };
        g.check_associative()?;
        Ok(g)
    }

    fn check_associative(&self) -> Result<(), NilpotentError> {
        let n = self.order();
        let ok = |a: u32, b: u32, c: u32| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        let bad = if n <= EXHAUSTIVE_ASSOCIATIVITY {
            let n = n as u32;
            (0..n).any(|a| (0..n).any(|b| (0..n).any(|c| !ok(a, b, c))))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            (0..SAMPLED_TRIPLES).any(|_| {
                let [a, b, c] = [0; 3].map(|_| rng.gen_range(0..n as u32));
                !ok(a, b, c)
            })
        };
        if bad {
            return Err(NilpotentError::InvalidTable("not associative".into()));
        }
        Ok(())
    }

    pub fn cyclic(n: usize) -> Result<Self, NilpotentError> {
        prime_power(n).ok_or(NilpotentError::NotPrimePower(n))?;
        let table = (0..n).map(|a| (0..n).map(|b| ((a + b) % n) as u32).collect()).collect();
        Self::from_table(table)
    }

    /// The quaternion group `Q₈`, elements `±1, ±i, ±j, ±k` as `0..8`
    /// (`2m + s` is `(-1)^s · [1, i, j, k][m]`).
    pub fn quaternion() -> Self {
        // unit products: (m1, m2) -> (sign, m)
        let unit = |a: usize, b: usize| -> (usize, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (0, x),
                (x, y) if x == y => (1, 0),
                (1, 2) => (0, 3),
                (2, 3) => (0, 1),
                (3, 1) => (0, 2),
                (2, 1) => (1, 3),
                (3, 2) => (1, 1),
                (1, 3) => (1, 2),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (s, m) = unit(x / 2, y / 2);
                        (2 * m + (s + x % 2 + y % 2) % 2) as u32
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("Q8 table")
    }

    /// The dihedral group of order 8, `r^a s^b` as `2a + b`.
    pub fn dihedral8() -> Self {
        let table = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (a1, b1, a2, b2) = (x / 2, x % 2, y / 2, y % 2);
                        // r^a1 s^b1 r^a2 s^b2 = r^(a1 ± a2) s^(b1 + b2)
                        let a = if b1 == 0 { a1 + a2 } else { a1 + 4 - a2 } % 4;
                        (2 * a + (b1 + b2) % 2) as u32
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("D4 table")
    }

    /// Direct product of two groups of the same prime, `(a, b)` as `a·|H| + b`.
    pub fn direct_product(&self, other: &FinitePGroup) -> Result<Self, NilpotentError> {
        if self.prime != other.prime {
            return Err(NilpotentError::NotPrimePower(self.order() * other.order()));
        }
        let m = other.order();
        let n = self.order() * m;
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| self.mul((x / m) as u32, (y / m) as u32) * m as u32 + other.mul((x % m) as u32, (y % m) as u32))
                    .collect()
            })
            .collect();
        Self::from_table(table)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize][b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// A generating set built greedily (each element chosen outside the span
    /// of the previous ones, largest order first).
    pub fn generators(&self) -> Vec<u32> {
        let mut by_order: Vec<u32> = (0..self.order() as u32).collect();
        by_order.sort_by_key(|&x| std::cmp::Reverse(self.element_order(x)));
        let mut gens = Vec::new();
        let mut span: BTreeSet<u32> = BTreeSet::from([self.identity]);
        for x in by_order {
            if span.len() == self.order() {
                break;
            }
            if !span.contains(&x) {
                gens.push(x);
                span = self.span(&gens);
            }
        }
        gens
    }

    fn span(&self, gens: &[u32]) -> BTreeSet<u32> {
        let mut seen = BTreeSet::from([self.identity]);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}

pub type Element = Vec<u32>;

/// Direct product of p-groups for pairwise distinct primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductGroup {
    factors: Vec<FinitePGroup>,
}

impl ProductGroup {
    pub fn new(factors: Vec<FinitePGroup>) -> Result<Self, NilpotentError> {
        let mut seen = BTreeSet::new();
        for f in &factors {
            if !seen.insert(f.prime) {
                return Err(NilpotentError::RepeatedPrime(f.prime));
            }
        }
        Ok(ProductGroup { factors })
    }

    /// Product of cyclic groups; orders sharing a prime are combined into one
    /// factor.
    pub fn cyclic(orders: &[usize]) -> Result<Self, NilpotentError> {
        let mut by_prime: BTreeMap<u64, FinitePGroup> = BTreeMap::new();
        for &n in orders {
            if n == 1 {
                continue;
            }
            let c = FinitePGroup::cyclic(n)?;
            let merged = match by_prime.remove(&c.prime) {
                Some(g) => g.direct_product(&c)?,
                None => c,
            };
            by_prime.insert(merged.prime, merged);
        }
        Self::new(by_prime.into_values().collect())
    }

    pub fn factors(&self) -> &[FinitePGroup] {
        &self.factors
    }

    pub fn primes(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.prime).collect()
    }

    pub fn order(&self) -> usize {
        self.factors.iter().map(|f| f.order()).product()
    }

    pub fn identity(&self) -> Element {
        self.factors.iter().map(|f| f.identity).collect()
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Element {
        self.factors.iter().enumerate().map(|(i, f)| f.mul(a[i], b[i])).collect()
    }

    pub fn inv(&self, a: &[u32]) -> Element {
        self.factors.iter().enumerate().map(|(i, f)| f.inv(a[i])).collect()
    }

    pub fn contains(&self, a: &[u32]) -> bool {
        a.len() == self.factors.len() && a.iter().zip(&self.factors).all(|(&x, f)| (x as usize) < f.order())
    }

    pub fn element_order(&self, a: &[u32]) -> usize {
        self.factors.iter().enumerate().fold(1, |acc, (i, f)| acc.lcm(&f.element_order(a[i])))
    }

    /// Mixed-radix index of an element in `0..order`.
    pub fn index_of(&self, a: &[u32]) -> usize {
        a.iter().zip(&self.factors).fold(0, |acc, (&x, f)| acc * f.order() + x as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> Element {
        let mut out = vec![0; self.factors.len()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            out[i] = (idx % f.order()) as u32;
            idx /= f.order();
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order()).map(|i| self.element_at(i))
    }

    /// Generators of the whole group, one list per factor embedded.
    pub fn generators(&self) -> Vec<Element> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            for g in f.generators() {
                let mut e = self.identity();
                e[i] = g;
                out.push(e);
            }
        }
        out
    }
}

/// Smallest subgroup containing `gens`, sorted.
pub fn close(g: &ProductGroup, gens: &[Element], cap: usize) -> Result<Vec<Element>, NilpotentError> {
    if gens.iter().any(|x| !g.contains(x)) {
        return Err(NilpotentError::NotAnElement);
    }
    let id = g.identity();
    let mut seen = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = g.mul(&x, s);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(NilpotentError::CapExceeded(cap));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// A subgroup given by generators; the closure is computed once on first use.
/// Concurrent first readers may each compute it, and one result is kept.
#[derive(Debug)]
pub struct SubgroupHandle {
    gens: Vec<Element>,
    cap: usize,
    closure: OnceLock<Vec<Element>>,
}

impl SubgroupHandle {
    pub fn new(gens: Vec<Element>) -> Self {
        Self::with_cap(gens, DEFAULT_CLOSURE_CAP)
    }

    pub fn with_cap(gens: Vec<Element>, cap: usize) -> Self {
        SubgroupHandle { gens, cap, closure: OnceLock::new() }
    }

    pub fn generators(&self) -> &[Element] {
        &self.gens
    }

    pub fn elements(&self, g: &ProductGroup) -> Result<&[Element], NilpotentError> {
        if let Some(c) = self.closure.get() {
            return Ok(c);
        }
        let c = close(g, &self.gens, self.cap)?;
        Ok(self.closure.get_or_init(|| c))
    }
}

impl Clone for SubgroupHandle {
    fn clone(&self) -> Self {
        let closure = OnceLock::new();
        if let Some(c) = self.closure.get() {
            let _ = closure.set(c.clone());
        }
        SubgroupHandle { gens: self.gens.clone(), cap: self.cap, closure }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SylowDecomposition {
    /// `(p, S_p)` per factor prime, elements sorted.
    pub parts: Vec<(u64, Vec<Element>)>,
    pub order: usize,
    pub verified: bool,
}

/// `x` with every coordinate outside factor `i` replaced by the identity.
fn embed(g: &ProductGroup, x: &[u32], i: usize) -> Element {
    let mut e = g.identity();
    e[i] = x[i];
    e
}

pub fn sylow_decompose(g: &ProductGroup, s: &SubgroupHandle) -> Result<SylowDecomposition, NilpotentError> {
    let elems = s.elements(g)?;
    let members: BTreeSet<&Element> = elems.iter().collect();
    let id = g.identity();
    let mut parts = Vec::with_capacity(g.factors.len());
    for (i, f) in g.factors.iter().enumerate() {
        let part: Vec<Element> = elems
            .iter()
            .filter(|x| x.iter().enumerate().all(|(j, &c)| j == i || c == id[j]))
            .cloned()
            .collect();
        parts.push((f.prime, part));
    }
    let product: usize = parts.iter().map(|(_, p)| p.len()).product();
    // every element must split into components that lie in S
    let splits = elems.iter().all(|x| {
        let comps: Vec<Element> = (0..g.factors.len()).map(|i| embed(g, x, i)).collect();
        let rebuilt = comps.iter().fold(id.clone(), |acc, c| g.mul(&acc, c));
        rebuilt == *x && comps.iter().all(|c| members.contains(c))
    });
    Ok(SylowDecomposition { parts, order: elems.len(), verified: splits && product == elems.len() })
}

/// The `p`-component of `x`, embedded; the identity when `p` is not a factor
/// prime.
pub fn element_sylow_part(g: &ProductGroup, x: &[u32], p: u64) -> Result<Element, NilpotentError> {
    if !is_prime(p) {
        return Err(NilpotentError::UnknownPrime(p));
    }
    if !g.contains(x) {
        return Err(NilpotentError::NotAnElement);
    }
    Ok(match g.factors.iter().position(|f| f.prime == p) {
        Some(i) => embed(g, x, i),
        None => g.identity(),
    })
}

/// A homomorphism as the table of images `f(0), …, f(|P|-1)`.
pub type Homomorphism = Vec<u32>;

pub fn hom_search(p: &FinitePGroup, q: &FinitePGroup) -> Result<Vec<Homomorphism>, NilpotentError> {
    hom_search_with_cap(p, q, DEFAULT_HOM_CAP)
}

/// All homomorphisms `P → Q`, found by assigning generator images of
/// compatible order and propagating along the Cayley graph.
pub fn hom_search_with_cap(p: &FinitePGroup, q: &FinitePGroup, cap: usize) -> Result<Vec<Homomorphism>, NilpotentError> {
    let gens = p.generators();
    let candidates: Vec<Vec<u32>> = gens
        .iter()
        .map(|&g| {
            let k = p.element_order(g);
            (0..q.order() as u32).filter(|&y| k.is_multiple_of(q.element_order(y))).collect()
        })
        .collect();
    let total = candidates.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    if total.is_none_or(|t| t > cap) {
        return Err(NilpotentError::CapExceeded(cap));
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        let images: Vec<u32> = choice.iter().zip(&candidates).map(|(&c, cs)| cs[c]).collect();
        if let Some(f) = extend(p, q, &gens, &images) {
            out.push(f);
        }
        // odometer
        let mut k = 0;
        loop {
            if k == choice.len() {
                out.sort();
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn extend(p: &FinitePGroup, q: &FinitePGroup, gens: &[u32], images: &[u32]) -> Option<Homomorphism> {
    const UNSET: u32 = u32::MAX;
    let mut f = vec![UNSET; p.order()];
    f[p.identity as usize] = q.identity;
    let mut queue = VecDeque::from([p.identity]);
    while let Some(x) = queue.pop_front() {
        for (&g, &img) in gens.iter().zip(images) {
            let y = p.mul(x, g);
            let fy = q.mul(f[x as usize], img);
            match f[y as usize] {
                UNSET => {
                    f[y as usize] = fy;
                    queue.push_back(y);
                }
                v if v != fy => return None,
                _ => {}
            }
        }
    }
    Some(f)
}

/// Validates that `map` (indexed by [`ProductGroup::index_of`]) is a bijective
/// homomorphism of `g`.
pub fn is_automorphism(g: &ProductGroup, map: &[usize]) -> bool {
    let n = g.order();
    if map.len() != n || map.iter().collect::<BTreeSet<_>>().len() != n || map.iter().any(|&y| y >= n) {
        return false;
    }
    let gens = g.generators();
    let image = |x: &Element| g.element_at(map[g.index_of(x)]);
    g.elements().all(|x| gens.iter().all(|s| image(&g.mul(&x, s)) == g.mul(&image(&x), &image(s))))
}

/// JSON description of a finite nilpotent group.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default)]
    pub cyclic: Vec<usize>,
    /// Explicit Cayley tables of p-groups.
    #[serde(default)]
    pub tables: Vec<Vec<Vec<u32>>>,
    /// `"Q8"` or `"D4"`.
    #[serde(default)]
    pub named: Vec<String>,
}

impl GroupSpec {
    pub fn build(&self) -> Result<ProductGroup, NilpotentError> {
        let mut pieces: Vec<FinitePGroup> = Vec::new();
        for &n in self.cyclic.iter().filter(|&&n| n > 1) {
            pieces.push(FinitePGroup::cyclic(n)?);
        }
        for t in &self.tables {
            pieces.push(FinitePGroup::from_table(t.clone())?);
        }
        for name in &self.named {
            pieces.push(match name.as_str() {
                "Q8" => FinitePGroup::quaternion(),
                "D4" | "D8" => FinitePGroup::dihedral8(),
                other => return Err(NilpotentError::InvalidTable(format!("unknown group {other}"))),
            });
        }
        let mut by_prime: BTreeMap<u64, FinitePGroup> = BTreeMap::new();
        for c in pieces {
            let merged = match by_prime.remove(&c.prime) {
                Some(g) => g.direct_product(&c)?,
                None => c,
            };
            by_prime.insert(merged.prime, merged);
        }
        ProductGroup::new(by_prime.into_values().collect())
    }
}

/// Orders of the elements of `elems`, for reporting.
pub fn order_histogram(g: &ProductGroup, elems: &[Element]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for x in elems {
        *h.entry(g.element_order(x)).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(orders: &[usize]) -> ProductGroup {
        ProductGroup::cyclic(orders).unwrap()
    }

    #[test]
    fn closure_examples() {
        let g = c(&[4, 9]);
        assert_eq!(close(&g, &[g.identity()], 4096).unwrap(), vec![g.identity()]);
        assert_eq!(close(&g, &[vec![1, 1]], 4096).unwrap().len(), 36);
        let h = c(&[2, 3]);
        assert_eq!(close(&h, &[vec![1, 0]], 4096).unwrap().len(), 2);
        assert_eq!(close(&g, &[vec![1, 1]], 10), Err(NilpotentError::CapExceeded(10)));
    }

    #[test]
    fn sylow_examples() {
        let g = c(&[2, 3]);
        let all = SubgroupHandle::new(g.generators());
        let d = sylow_decompose(&g, &all).unwrap();
        assert!(d.verified);
        assert_eq!(d.parts.iter().map(|(p, s)| (*p, s.len())).collect::<Vec<_>>(), vec![(2, 2), (3, 3)]);

        let g = c(&[4, 9]);
        let d = sylow_decompose(&g, &SubgroupHandle::new(vec![vec![1, 1]])).unwrap();
        assert!(d.verified);
        assert_eq!((d.order, d.parts[0].1.len(), d.parts[1].1.len()), (36, 4, 9));

        let d = sylow_decompose(&g, &SubgroupHandle::new(vec![])).unwrap();
        assert!(d.verified && d.parts.iter().all(|(_, s)| s.len() == 1));
    }

    #[test]
    fn sylow_parts_of_elements() {
        let g = c(&[2, 3]);
        let x = vec![1, 2];
        assert_eq!(element_sylow_part(&g, &x, 2).unwrap(), vec![1, 0]);
        assert_eq!(element_sylow_part(&g, &x, 5).unwrap(), g.identity());
        assert_eq!(element_sylow_part(&g, &x, 4), Err(NilpotentError::UnknownPrime(4)));
        let parts: Vec<_> = [2, 3].iter().map(|&p| element_sylow_part(&g, &x, p).unwrap()).collect();
        assert_eq!(g.mul(&parts[0], &parts[1]), x);
        assert_eq!(g.mul(&parts[1], &parts[0]), x);
    }

    #[test]
    fn homomorphism_counts() {
        let c2 = FinitePGroup::cyclic(2).unwrap();
        let c3 = FinitePGroup::cyclic(3).unwrap();
        let c4 = FinitePGroup::cyclic(4).unwrap();
        let c9 = FinitePGroup::cyclic(9).unwrap();
        assert_eq!(hom_search(&c4, &c9).unwrap(), vec![vec![0; 4]]);
        assert_eq!(hom_search(&c2, &c2).unwrap().len(), 2);
        assert_eq!(hom_search(&FinitePGroup::quaternion(), &c3).unwrap(), vec![vec![0; 8]]);
        // Hom(C4, C4) ≅ C4, Hom(Q8, C2) has 4 elements
        assert_eq!(hom_search(&c4, &c4).unwrap().len(), 4);
        assert_eq!(hom_search(&FinitePGroup::quaternion(), &c2).unwrap().len(), 4);
        assert_eq!(hom_search(&FinitePGroup::dihedral8(), &c2).unwrap().len(), 4);
    }

    #[test]
    fn named_tables() {
        let q = FinitePGroup::quaternion();
        let d = FinitePGroup::dihedral8();
        // Q8 has one involution, D4 has five
        let involutions = |g: &FinitePGroup| (0..8).filter(|&x| g.element_order(x) == 2).count();
        assert_eq!(involutions(&q), 1);
        assert_eq!(involutions(&d), 5);
        assert!(q.generators().len() == 2 && d.generators().len() == 2);
    }

    #[test]
    fn invalid_tables() {
        assert!(matches!(FinitePGroup::cyclic(6), Err(NilpotentError::NotPrimePower(6))));
        let bad = vec![vec![0, 1], vec![0, 1]];
        assert!(FinitePGroup::from_table(bad).is_err());
        let c2 = FinitePGroup::cyclic(2).unwrap();
        assert!(matches!(ProductGroup::new(vec![c2.clone(), c2]), Err(NilpotentError::RepeatedPrime(2))));
        // a Latin square that is not associative: x*y = -x-y mod 3
        let t: Vec<Vec<u32>> = (0..3).map(|x| (0..3).map(|y| ((6 - x - y) % 3) as u32).collect()).collect();
        assert!(FinitePGroup::from_table(t).is_err());
    }

    #[test]
    fn automorphism_tables() {
        let g = c(&[4]);
        assert!(is_automorphism(&g, &[0, 3, 2, 1]));
        assert!(!is_automorphism(&g, &[0, 2, 1, 3]));
        assert!(!is_automorphism(&g, &[0, 0, 2, 3]));
    }
}
