//! Products `∏_{p∈F} Q_p^{n_p} × K` of p-adic vector groups and a finite
//! nilpotent group `K`, with automorphisms acting block-diagonally by prime.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use crate::contraction::{contraction_split_auto, ContractionError, DEFAULT_PRECISION};
use crate::lattice::{Lattice, LatticeError};
use crate::linalg::{LinalgError, QMatrix};
use crate::newton::{eigenvalue_valuations, scale_exponent, NewtonError};
use crate::nilpotent::{is_automorphism, GroupSpec, NilpotentError, ProductGroup};
use crate::padic::{abs_p, check_prime, format_rational, parse_rational, PadicError, Rational};
use crate::tidy::{check_t1, tidying_with_caps, TidyCaps, TidyCertificate, TidyError};

pub const DEFAULT_BUDGET: i64 = 32;
const WITNESS_BEAM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("automorphism blocks do not match the model: {0}")]
    BlockMismatch(String),
    #[error("model has no finite factor")]
    NoFiniteFactor,
    #[error("model must have a vector factor or a finite factor")]
    EmptyModel,
    #[error(transparent)]
    Finite(#[from] NilpotentError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    Tidy(#[from] TidyError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("invalid input: {0}")]
    Input(String),
}

impl From<LinalgError> for GroupError {
    fn from(e: LinalgError) -> Self {
        GroupError::BlockMismatch(e.to_string())
    }
}

impl From<NewtonError> for GroupError {
    fn from(e: NewtonError) -> Self {
        match e {
            NewtonError::Padic(e) => GroupError::Padic(e),
            NewtonError::SingularPolynomial => GroupError::BlockMismatch("singular block".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupModel {
    pub factors: BTreeMap<u64, usize>,
    pub finite_factor: Option<ProductGroup>,
}

impl GroupModel {
    pub fn new(factors: BTreeMap<u64, usize>, finite_factor: Option<ProductGroup>) -> Result<Self, GroupError> {
        for &p in factors.keys() {
            check_prime(p)?;
        }
        if factors.is_empty() && finite_factor.is_none() {
            return Err(GroupError::EmptyModel);
        }
        Ok(GroupModel { factors, finite_factor })
    }

    pub fn vector(factors: &[(u64, usize)]) -> Result<Self, GroupError> {
        Self::new(factors.iter().copied().collect(), None)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }
}

/// One invertible block per model prime, plus an optional automorphism of the
/// finite factor given as a permutation of element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelAutomorphism {
    pub blocks: BTreeMap<u64, QMatrix>,
    pub finite_block: Option<Vec<usize>>,
}

impl ModelAutomorphism {
    pub fn new(blocks: BTreeMap<u64, QMatrix>, finite_block: Option<Vec<usize>>) -> Self {
        ModelAutomorphism { blocks, finite_block }
    }

    pub fn from_blocks(blocks: Vec<(u64, QMatrix)>) -> Self {
        ModelAutomorphism { blocks: blocks.into_iter().collect(), finite_block: None }
    }

    pub fn identity(model: &GroupModel) -> Self {
        ModelAutomorphism {
            blocks: model.factors.iter().map(|(&p, &n)| (p, QMatrix::identity(n))).collect(),
            finite_block: model.finite_factor.as_ref().map(|g| (0..g.order()).collect()),
        }
    }

    pub fn validate(&self, model: &GroupModel) -> Result<(), GroupError> {
        let want: Vec<_> = model.factors.keys().collect();
        let got: Vec<_> = self.blocks.keys().collect();
        if want != got {
            return Err(GroupError::BlockMismatch(format!("model primes {want:?}, blocks {got:?}")));
        }
        for (p, m) in &self.blocks {
            let n = model.factors[p];
            if m.rows() != n || m.cols() != n {
                return Err(GroupError::BlockMismatch(format!("block at {p} must be {n}x{n}")));
            }
            if m.det()?.is_zero() {
                return Err(GroupError::BlockMismatch(format!("block at {p} is singular")));
            }
        }
        match (&model.finite_factor, &self.finite_block) {
            (Some(g), Some(f)) if !is_automorphism(g, f) => {
                Err(GroupError::BlockMismatch("finite block is not an automorphism".into()))
            }
            (None, Some(_)) => Err(GroupError::BlockMismatch("finite block without finite factor".into())),
            _ => Ok(()),
        }
    }

    pub fn inverse(&self) -> Result<Self, GroupError> {
        let blocks = self.blocks.iter().map(|(&p, m)| Ok((p, m.inverse()?))).collect::<Result<_, GroupError>>()?;
        let finite_block = self.finite_block.as_ref().map(|f| {
            let mut inv = vec![0; f.len()];
            for (x, &y) in f.iter().enumerate() {
                inv[y] = x;
            }
            inv
        });
        Ok(ModelAutomorphism { blocks, finite_block })
    }

    pub fn compose(&self, other: &ModelAutomorphism) -> Self {
        let blocks = self.blocks.iter().map(|(&p, m)| (p, m * &other.blocks[&p])).collect();
        let finite_block = match (&self.finite_block, &other.finite_block) {
            (Some(f), Some(g)) => Some(g.iter().map(|&y| f[y]).collect()),
            (Some(f), None) | (None, Some(f)) => Some(f.clone()),
            (None, None) => None,
        };
        ModelAutomorphism { blocks, finite_block }
    }

    pub fn pow(&self, n: u32) -> Self {
        let blocks = self.blocks.iter().map(|(&p, m)| (p, m.pow(n))).collect();
        let finite_block = self.finite_block.as_ref().map(|f| {
            (0..f.len()).map(|x| (0..n).fold(x, |acc, _| f[acc])).collect()
        });
        ModelAutomorphism { blocks, finite_block }
    }
}

/// `∏ p^{e_p}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactoredScale {
    pub exponents: BTreeMap<u64, u64>,
}

impl FactoredScale {
    pub fn value(&self) -> BigInt {
        self.exponents.iter().fold(BigInt::one(), |acc, (&p, &e)| acc * num_traits::pow(BigInt::from(p), e as usize))
    }

    pub fn value_rational(&self) -> Rational {
        Rational::from_integer(self.value())
    }

    /// Primes with a nonzero exponent.
    pub fn support(&self) -> BTreeSet<u64> {
        self.exponents.iter().filter(|(_, &e)| e > 0).map(|(&p, _)| p).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let scale: serde_json::Map<String, serde_json::Value> =
            self.exponents.iter().map(|(p, e)| (p.to_string(), json!(e))).collect();
        json!({ "scale": scale, "value": self.value().to_string() })
    }
}

/// Scale from the characteristic polynomials of the blocks; the finite factor
/// contributes nothing.
pub fn scale(model: &GroupModel, aut: &ModelAutomorphism) -> Result<FactoredScale, GroupError> {
    aut.validate(model)?;
    let mut exponents = BTreeMap::new();
    for (&p, m) in &aut.blocks {
        let e = if m.rows() == 0 { 0 } else { scale_exponent(&eigenvalue_valuations(&m.charpoly()?, p)?) };
        exponents.insert(p, e);
    }
    Ok(FactoredScale { exponents })
}

/// `∏_p |det α_p|_p`.
pub fn module_of(model: &GroupModel, aut: &ModelAutomorphism) -> Result<Rational, GroupError> {
    aut.validate(model)?;
    let mut acc = Rational::one();
    for (&p, m) in &aut.blocks {
        acc *= abs_p(&m.det()?, p)?;
    }
    Ok(acc)
}

/// Primes dividing `scale(α)` or `scale(α⁻¹)` for some `α` in the family.
pub fn prime_spectrum(model: &GroupModel, auts: &[ModelAutomorphism]) -> Result<BTreeSet<u64>, GroupError> {
    let mut out = BTreeSet::new();
    for a in auts {
        out.extend(scale(model, a)?.support());
        out.extend(scale(model, &a.inverse()?)?.support());
    }
    Ok(out)
}

/// `{p : n_p > 0}`.
pub fn local_prime_content(model: &GroupModel) -> BTreeSet<u64> {
    model.factors.iter().filter(|(_, &n)| n > 0).map(|(&p, _)| p).collect()
}

pub fn uniscalar_check(model: &GroupModel, auts: &[ModelAutomorphism]) -> Result<bool, GroupError> {
    Ok(prime_spectrum(model, auts)?.is_empty())
}

pub fn quotient_by_finite(
    model: &GroupModel,
    aut: &ModelAutomorphism,
) -> Result<(GroupModel, ModelAutomorphism), GroupError> {
    if model.finite_factor.is_none() {
        return Err(GroupError::NoFiniteFactor);
    }
    aut.validate(model)?;
    // the quotient may be the trivial group, so bypass the non-empty check
    let q = GroupModel { factors: model.factors.clone(), finite_factor: None };
    Ok((q, ModelAutomorphism { blocks: aut.blocks.clone(), finite_block: None }))
}

/// A compact open subgroup `∏ V_p × K'` with per-prime tidy certificates; `K'`
/// is either the whole finite factor or trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelTidy {
    pub certificates: BTreeMap<u64, TidyCertificate>,
    pub finite_order: usize,
}

impl ModelTidy {
    pub fn scale(&self) -> FactoredScale {
        FactoredScale { exponents: self.certificates.iter().map(|(&p, c)| (p, c.scale_exponent)).collect() }
    }
}

/// Tidies each block from the standard lattice. The finite part of the
/// subgroup is the whole finite factor, which every automorphism preserves.
pub fn tidy_model(model: &GroupModel, aut: &ModelAutomorphism, caps: TidyCaps) -> Result<ModelTidy, GroupError> {
    aut.validate(model)?;
    let mut certificates = BTreeMap::new();
    for (&p, m) in &aut.blocks {
        let split = contraction_split_auto(m, p, DEFAULT_PRECISION)?;
        let cert = tidying_with_caps(&Lattice::standard(p, m.rows())?, m, &split, caps)?;
        certificates.insert(p, cert);
    }
    Ok(ModelTidy { certificates, finite_order: model.finite_factor.as_ref().map_or(1, |g| g.order()) })
}

/// Preimage of a tidy subgroup of `G/K` under the quotient map: the same
/// lattices times all of `K`.
pub fn pull_back(tidy: &ModelTidy, model: &GroupModel) -> Result<ModelTidy, GroupError> {
    let k = model.finite_factor.as_ref().ok_or(GroupError::NoFiniteFactor)?;
    Ok(ModelTidy { certificates: tidy.certificates.clone(), finite_order: k.order() })
}

/// Checks the tidiness contract of `tidy` for `aut` on `model`: every lattice
/// passes T1 for its block, and the finite part is `α`-stable (all of `K`, or
/// trivial).
pub fn verify_tidy(model: &GroupModel, aut: &ModelAutomorphism, tidy: &ModelTidy) -> Result<bool, GroupError> {
    aut.validate(model)?;
    let k = model.finite_factor.as_ref().map_or(1, |g| g.order());
    if tidy.finite_order != k && tidy.finite_order != 1 {
        return Ok(false);
    }
    if tidy.certificates.keys().ne(aut.blocks.keys()) {
        return Ok(false);
    }
    for (&p, m) in &aut.blocks {
        let cert = &tidy.certificates[&p];
        let split = contraction_split_auto(m, p, DEFAULT_PRECISION)?;
        if !check_t1(&cert.lattice, m, &split)? {
            return Ok(false);
        }
        let moved = cert.v_plus.apply(split.effective())?;
        if !moved.contains(&cert.v_plus) || moved.index(&cert.v_plus)? as u64 != cert.scale_exponent {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the invariant-lattice search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantOutcome {
    /// `g L = L` for every generator.
    Invariant(Lattice),
    /// The generated group moves the standard lattice past the budget.
    Unbounded(UnboundedWitness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundedWitness {
    /// Generator labels, applied right to left: `"g0"`, `"g1^-1"`, ...
    pub word: Vec<String>,
    /// Smallest entry valuation of the word's matrix (`None` if no word within
    /// the search reached below the budget).
    pub word_valuation: Option<i64>,
    pub iterations: usize,
    pub lattice_valuation: i64,
}

fn min_entry_valuation(m: &QMatrix, p: u64) -> i64 {
    m.entries().filter_map(|x| crate::padic::vp_int(x, p)).min().unwrap_or(i64::MAX)
}

/// Iterates `L ← L + Σ gᵢL + gᵢ⁻¹L` from the standard lattice.
pub fn invariant_lattice(p: u64, n: usize, mats: &[QMatrix], budget: i64) -> Result<InvariantOutcome, GroupError> {
    check_prime(p)?;
    let mut both = Vec::with_capacity(2 * mats.len());
    for m in mats {
        if m.rows() != n || m.cols() != n || m.det()?.is_zero() {
            return Err(GroupError::BlockMismatch("generators must be invertible n x n matrices".into()));
        }
        both.push(m.clone());
        both.push(m.inverse()?);
    }
    let mut l = Lattice::standard(p, n)?;
    let mut iterations = 0;
    loop {
        let images: Vec<Lattice> = both.iter().map(|g| l.apply_unchecked(g)).collect();
        let next = Lattice::sum_all(&l, images.iter())?;
        if next == l {
            debug_assert!(mats.iter().all(|g| l.apply_unchecked(g) == l));
            return Ok(InvariantOutcome::Invariant(l));
        }
        l = next;
        iterations += 1;
        let v = l.min_valuation().unwrap_or(0);
        if v < -budget {
            let (word, word_valuation) = witness_word(p, n, &both, budget, 4 * (iterations + 1));
            return Ok(InvariantOutcome::Unbounded(UnboundedWitness {
                word,
                word_valuation,
                iterations,
                lattice_valuation: v,
            }));
        }
    }
}

/// Beam search for a short word whose matrix has an entry of valuation below
/// `-budget`.
fn witness_word(p: u64, n: usize, gens: &[QMatrix], budget: i64, max_len: usize) -> (Vec<String>, Option<i64>) {
    let label = |i: usize| if i.is_multiple_of(2) { format!("g{}", i / 2) } else { format!("g{}^-1", i / 2) };
    let mut beam: Vec<(Vec<usize>, QMatrix)> = vec![(Vec::new(), QMatrix::identity(n))];
    let mut best: (Vec<usize>, i64) = (Vec::new(), 0);
    for _ in 0..max_len {
        let mut next: Vec<(i64, Vec<usize>, QMatrix)> = Vec::new();
        for (w, m) in &beam {
            for (i, g) in gens.iter().enumerate() {
                // skip immediate cancellation
                if w.last().is_some_and(|&j| j ^ 1 == i) {
                    continue;
                }
                let gm = g * m;
                let mut w2 = w.clone();
                w2.push(i);
                next.push((min_entry_valuation(&gm, p), w2, gm));
            }
        }
        next.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        next.truncate(WITNESS_BEAM);
        if let Some((v, w, _)) = next.first() {
            if *v < best.1 {
                best = (w.clone(), *v);
            }
            if *v < -budget {
                return (w.iter().rev().map(|&i| label(i)).collect(), Some(*v));
            }
        }
        beam = next.into_iter().map(|(_, w, m)| (w, m)).collect();
    }
    (best.0.iter().rev().map(|&i| label(i)).collect(), None)
}

// ---------------------------------------------------------------------------
// JSON input.

pub type MatrixJson = Vec<Vec<String>>;

pub fn parse_matrix(rows: &MatrixJson) -> Result<QMatrix, GroupError> {
    let parsed: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let n = parsed.len();
    if parsed.iter().any(|r| r.len() != n) {
        return Err(GroupError::Input("matrices must be square".into()));
    }
    Ok(QMatrix::from_rows(parsed).unwrap_or_else(|_| QMatrix::zeros(0, 0)))
}

pub fn matrix_json(m: &QMatrix) -> MatrixJson {
    m.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub factors: BTreeMap<String, usize>,
    #[serde(default)]
    pub finite_factor: Option<GroupSpec>,
    #[serde(default)]
    pub automorphism: Option<BTreeMap<String, MatrixJson>>,
    #[serde(default)]
    pub finite_automorphism: Option<Vec<usize>>,
    #[serde(default)]
    pub family: Option<Vec<BTreeMap<String, MatrixJson>>>,
}

fn parse_prime(s: &str) -> Result<u64, GroupError> {
    let p: u64 = s.trim().parse().map_err(|_| GroupError::Input(format!("bad prime key {s:?}")))?;
    check_prime(p)?;
    Ok(p)
}

impl ModelJson {
    pub fn model(&self) -> Result<GroupModel, GroupError> {
        let factors = self.factors.iter().map(|(k, &n)| Ok((parse_prime(k)?, n))).collect::<Result<_, GroupError>>()?;
        let finite = self.finite_factor.as_ref().map(|g| g.build()).transpose()?;
        GroupModel::new(factors, finite)
    }

    fn blocks(raw: &BTreeMap<String, MatrixJson>) -> Result<BTreeMap<u64, QMatrix>, GroupError> {
        raw.iter().map(|(k, m)| Ok((parse_prime(k)?, parse_matrix(m)?))).collect()
    }

    /// The single automorphism, defaulting to the identity.
    pub fn automorphism(&self, model: &GroupModel) -> Result<ModelAutomorphism, GroupError> {
        let blocks = match &self.automorphism {
            Some(raw) => Self::blocks(raw)?,
            None => ModelAutomorphism::identity(model).blocks,
        };
        let finite_block = match (&model.finite_factor, &self.finite_automorphism) {
            (_, Some(f)) => Some(f.clone()),
            (Some(g), None) => Some((0..g.order()).collect()),
            (None, None) => None,
        };
        let aut = ModelAutomorphism { blocks, finite_block };
        aut.validate(model)?;
        Ok(aut)
    }

    /// `family` when present, otherwise the single automorphism.
    pub fn family(&self, model: &GroupModel) -> Result<Vec<ModelAutomorphism>, GroupError> {
        match &self.family {
            None => Ok(vec![self.automorphism(model)?]),
            Some(list) => list
                .iter()
                .map(|raw| {
                    let aut = ModelAutomorphism::new(Self::blocks(raw)?, None);
                    aut.validate(model)?;
                    Ok(aut)
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{int, ratio};

    fn one_block(p: u64, m: QMatrix) -> (GroupModel, ModelAutomorphism) {
        let model = GroupModel::vector(&[(p, m.rows())]).unwrap();
        (model, ModelAutomorphism::from_blocks(vec![(p, m)]))
    }

    #[test]
    fn scale_examples() {
        let (m, a) = one_block(5, QMatrix::from_fracs(&[&[(1, 5)]]));
        assert_eq!(scale(&m, &a).unwrap().value(), BigInt::from(5));

        let model = GroupModel::vector(&[(2, 1), (3, 2)]).unwrap();
        let aut = ModelAutomorphism::from_blocks(vec![
            (2, QMatrix::from_fracs(&[&[(1, 2)]])),
            (3, QMatrix::from_fracs(&[&[(0, 1), (1, 1)], &[(1, 3), (0, 1)]])),
        ]);
        let s = scale(&model, &aut).unwrap();
        assert_eq!(s.value(), BigInt::from(6));
        assert_eq!(s.to_json(), json!({"scale": {"2": 1, "3": 1}, "value": "6"}));
        assert_eq!(scale(&model, &ModelAutomorphism::identity(&model)).unwrap().value(), BigInt::one());
    }

    #[test]
    fn module_examples() {
        let (m, a) = one_block(3, QMatrix::from_fracs(&[&[(1, 3)]]));
        assert_eq!(module_of(&m, &a).unwrap(), int(3));
        let (m, a) = one_block(3, QMatrix::from_fracs(&[&[(3, 1), (0, 1)], &[(0, 1), (1, 3)]]));
        assert_eq!(module_of(&m, &a).unwrap(), int(1));
        let model = GroupModel::vector(&[(2, 1), (3, 1)]).unwrap();
        let aut = ModelAutomorphism::from_blocks(vec![(2, QMatrix::from_fracs(&[&[(1, 2)]])), (3, QMatrix::from_ints(&[&[9]]))]);
        assert_eq!(module_of(&model, &aut).unwrap(), ratio(2, 9));
        let s = scale(&model, &aut).unwrap().value_rational();
        let si = scale(&model, &aut.inverse().unwrap()).unwrap().value_rational();
        assert_eq!(s / si, ratio(2, 9));
    }

    #[test]
    fn spectrum_examples() {
        let model = GroupModel::vector(&[(2, 1), (3, 1)]).unwrap();
        let id = ModelAutomorphism::identity(&model);
        assert!(prime_spectrum(&model, std::slice::from_ref(&id)).unwrap().is_empty());
        let a = ModelAutomorphism::from_blocks(vec![(2, QMatrix::from_fracs(&[&[(1, 2)]])), (3, QMatrix::identity(1))]);
        assert_eq!(prime_spectrum(&model, &[a]).unwrap(), BTreeSet::from([2]));
        let b = ModelAutomorphism::from_blocks(vec![(2, QMatrix::from_ints(&[&[2]])), (3, QMatrix::identity(1))]);
        assert_eq!(scale(&model, &b).unwrap().value(), BigInt::one());
        assert_eq!(prime_spectrum(&model, &[b]).unwrap(), BTreeSet::from([2]));
        assert!(uniscalar_check(&model, &[id]).unwrap());
    }

    #[test]
    fn uniscalar_examples() {
        let (m, a) = one_block(2, QMatrix::from_ints(&[&[2, 1], &[1, 1]]));
        assert!(uniscalar_check(&m, &[a]).unwrap());
        let (m, a) = one_block(2, QMatrix::from_fracs(&[&[(1, 2)]]));
        assert!(!uniscalar_check(&m, &[a]).unwrap());
        let (m, a) = one_block(3, QMatrix::from_ints(&[&[0, 3], &[1, 0]]));
        assert_eq!(scale(&m, &a).unwrap().value(), BigInt::one());
        assert!(!uniscalar_check(&m, &[a]).unwrap());
    }

    #[test]
    fn local_content_examples() {
        assert_eq!(local_prime_content(&GroupModel::vector(&[(2, 1), (3, 2)]).unwrap()), BTreeSet::from([2, 3]));
        let fin = ProductGroup::cyclic(&[8]).unwrap();
        let m = GroupModel::new(BTreeMap::from([(5, 0)]), Some(fin)).unwrap();
        assert!(local_prime_content(&m).is_empty());
        assert_eq!(local_prime_content(&GroupModel::vector(&[(2, 3)]).unwrap()), BTreeSet::from([2]));
    }

    #[test]
    fn quotient_examples() {
        let fin = ProductGroup::cyclic(&[4]).unwrap();
        let model = GroupModel::new(BTreeMap::from([(2, 1)]), Some(fin)).unwrap();
        let aut = ModelAutomorphism::new(BTreeMap::from([(2, QMatrix::from_fracs(&[&[(1, 2)]]))]), Some(vec![0, 3, 2, 1]));
        let (q, qa) = quotient_by_finite(&model, &aut).unwrap();
        assert_eq!(q.finite_factor, None);
        assert_eq!(scale(&model, &aut).unwrap(), scale(&q, &qa).unwrap());
        let t = tidy_model(&q, &qa, TidyCaps::default()).unwrap();
        let pulled = pull_back(&t, &model).unwrap();
        assert_eq!(pulled.finite_order, 4);
        assert!(verify_tidy(&model, &aut, &pulled).unwrap());
        assert_eq!(pulled.scale(), scale(&model, &aut).unwrap());

        let only = GroupModel::new(BTreeMap::new(), Some(ProductGroup::cyclic(&[3]).unwrap())).unwrap();
        let (q, qa) = quotient_by_finite(&only, &ModelAutomorphism::identity(&only)).unwrap();
        assert!(q.factors.is_empty());
        assert_eq!(scale(&q, &qa).unwrap().value(), BigInt::one());

        let plain = GroupModel::vector(&[(2, 1)]).unwrap();
        assert_eq!(
            quotient_by_finite(&plain, &ModelAutomorphism::identity(&plain)),
            Err(GroupError::NoFiniteFactor)
        );
    }

    #[test]
    fn invariant_lattice_examples() {
        let u = QMatrix::from_ints(&[&[1, 1], &[0, 1]]);
        for p in [2, 3, 5] {
            assert_eq!(
                invariant_lattice(p, 2, std::slice::from_ref(&u), DEFAULT_BUDGET).unwrap(),
                InvariantOutcome::Invariant(Lattice::standard(p, 2).unwrap())
            );
            let r = invariant_lattice(p, 1, &[QMatrix::from_ints(&[&[p as i64]])], DEFAULT_BUDGET).unwrap();
            let InvariantOutcome::Unbounded(w) = r else { panic!("bounded") };
            assert!(w.word_valuation.unwrap() < -DEFAULT_BUDGET);
            assert!(w.word.iter().all(|s| s == "g0^-1"));

            let l = QMatrix::from_fracs(&[&[(1, 1), (0, 1)], &[(1, p as i64), (1, 1)]]);
            let r = invariant_lattice(p, 2, &[u.clone(), l.clone()], DEFAULT_BUDGET).unwrap();
            let InvariantOutcome::Unbounded(w) = r else { panic!("bounded") };
            assert!(w.word_valuation.is_some(), "{w:?}");
            // the product has eigenvalue valuations ±1
            let prod = &u * &l;
            let v = eigenvalue_valuations(&prod.charpoly().unwrap(), p).unwrap();
            assert_eq!(v.entries, vec![(int(-1), 1), (int(1), 1)]);
        }
    }

    #[test]
    fn conjugated_units_have_invariant_lattice() {
        let c = QMatrix::from_fracs(&[&[(1, 1), (1, 3)], &[(0, 1), (1, 1)]]);
        let ci = c.inverse().unwrap();
        let g = &(&c * &QMatrix::from_ints(&[&[2, 1], &[1, 1]])) * &ci;
        let InvariantOutcome::Invariant(l) = invariant_lattice(3, 2, std::slice::from_ref(&g), DEFAULT_BUDGET).unwrap() else {
            panic!("unbounded")
        };
        assert_eq!(l.apply(&g).unwrap(), l);
    }

    #[test]
    fn json_model() {
        let j: ModelJson = serde_json::from_str(
            r#"{"factors": {"2": 2, "3": 1}, "finite_factor": null,
                "automorphism": {"2": [["1/2","0"],["0","2"]], "3": [["3"]]}}"#,
        )
        .unwrap();
        let m = j.model().unwrap();
        let a = j.automorphism(&m).unwrap();
        assert_eq!(scale(&m, &a).unwrap().to_json(), json!({"scale": {"2": 1, "3": 0}, "value": "2"}));
        let bad: ModelJson = serde_json::from_str(r#"{"factors": {"2": 1}, "automorphism": {"3": [["1"]]}}"#).unwrap();
        assert!(matches!(bad.automorphism(&bad.model().unwrap()), Err(GroupError::BlockMismatch(_))));
    }
}
