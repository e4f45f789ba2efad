//! Contraction decomposition `E = E_p ⊕ E_0 ⊕ E_m` of `Q_p^n` for a linear
//! automorphism, and lattices adapted to it.
//!
//! `E_p` collects the generalized eigenspaces of eigenvalues with negative
//! valuation (expanding), `E_0` those of valuation zero and `E_m` those of
//! positive valuation (contracting).
//!
//! When no rational-irreducible factor of the characteristic polynomial has
//! root valuations of two different signs, the three pieces are kernels of rational polynomials
//! in `α` and the split is exact. Otherwise the pieces are not defined over `Q`;
//! they are approximated to precision `p^N` from high powers of `α^{±1}` and the
//! split is reported as precision-qualified. A qualified split carries a
//! surrogate automorphism `α̃ = P·diag(β_p, β_0, β_m)·P⁻¹`, which agrees with `α`
//! to the working precision and for which the approximate pieces are exactly
//! invariant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;
use thiserror::Error;

use crate::lattice::{Lattice, LatticeError};
use crate::linalg::{factor_over_q, LinalgError, MonicPoly, Poly, QMatrix};
use crate::newton::{eigenvalue_valuations, NewtonError, SlopeSignature, ValuationMultiset};
use crate::padic::{check_prime, format_rational, p_pow, reduce_mod_p_power, vp_int, PadicError, Rational};

pub const DEFAULT_PRECISION: u32 = 64;
pub const MAX_PRECISION: u32 = 1024;
const ITERATION_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractionError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("automorphism is not an invertible square matrix")]
    Singular,
    #[error("rank tests are ambiguous at precision {0}; raise the precision")]
    PrecisionExhausted(u32),
    #[error("split is precision-qualified and the adapted lattice could not be certified")]
    InexactSplit,
    #[error("adapted lattice iteration did not stabilize")]
    IterationCap,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl From<LinalgError> for ContractionError {
    fn from(_: LinalgError) -> Self {
        ContractionError::Singular
    }
}

impl From<NewtonError> for ContractionError {
    fn from(e: NewtonError) -> Self {
        match e {
            NewtonError::Padic(e) => ContractionError::Padic(e),
            NewtonError::SingularPolynomial => ContractionError::Singular,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// `E_p`: `α^{-n} x → 0`.
    Expanding,
    /// `E_0`: `α^Z x` relatively compact.
    Bounded,
    /// `E_m`: `α^n x → 0`.
    Contracting,
}

impl Piece {
    fn of_valuation(v: &Rational) -> Piece {
        if v.is_negative() {
            Piece::Expanding
        } else if v.is_zero() {
            Piece::Bounded
        } else {
            Piece::Contracting
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionSplit {
    prime: u64,
    alpha: QMatrix,
    effective: QMatrix,
    /// `P = [E_p | E_0 | E_m]`, columns are the piece bases.
    change: QMatrix,
    change_inv: QMatrix,
    /// `P⁻¹ α̃ P`, block diagonal.
    blocks: QMatrix,
    valuations: ValuationMultiset,
    precision: Option<u32>,
}

impl ContractionSplit {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn alpha(&self) -> &QMatrix {
        &self.alpha
    }

    /// The automorphism for which the pieces are exactly invariant: `α` itself
    /// for exact splits, the surrogate `α̃` otherwise.
    pub fn effective(&self) -> &QMatrix {
        &self.effective
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    pub fn dim(&self) -> usize {
        self.alpha.rows()
    }

    /// Column range of a piece inside [`Self::change_of_basis`].
    pub fn piece_range(&self, piece: Piece) -> std::ops::Range<usize> {
        let sig = self.valuations.signature();
        match piece {
            Piece::Expanding => 0..sig.negative,
            Piece::Bounded => sig.negative..sig.negative + sig.zero,
            Piece::Contracting => sig.negative + sig.zero..self.dim(),
        }
    }

    /// Basis (as columns) of a piece.
    pub fn piece(&self, piece: Piece) -> QMatrix {
        let r = self.piece_range(piece);
        self.change.select_columns(&r.collect::<Vec<_>>())
    }

    /// `E_+ = E_p ⊕ E_0`.
    pub fn plus_space(&self) -> QMatrix {
        let end = self.piece_range(Piece::Bounded).end;
        self.change.select_columns(&(0..end).collect::<Vec<_>>())
    }

    /// `E_- = E_0 ⊕ E_m`.
    pub fn minus_space(&self) -> QMatrix {
        let start = self.piece_range(Piece::Bounded).start;
        self.change.select_columns(&(start..self.dim()).collect::<Vec<_>>())
    }

    /// The matrix `P` whose columns are the bases of `E_p`, `E_0`, `E_m` in order.
    pub fn change_of_basis(&self) -> &QMatrix {
        &self.change
    }

    pub fn change_of_basis_inverse(&self) -> &QMatrix {
        &self.change_inv
    }

    /// `P⁻¹ α̃ P`, block diagonal with one block per piece.
    pub fn block_form(&self) -> &QMatrix {
        &self.blocks
    }

    pub fn valuations(&self) -> &ValuationMultiset {
        &self.valuations
    }

    pub fn signature(&self) -> SlopeSignature {
        self.valuations.signature()
    }

    /// `θ = p^m` with `m` the smallest nonzero |eigenvalue valuation|; `None`
    /// when every eigenvalue is a unit.
    pub fn theta_exponent(&self) -> Option<Rational> {
        self.valuations.min_nonzero_abs()
    }

    /// Matrix of `α̃|piece` in the piece basis.
    pub fn restriction(&self, piece: Piece) -> QMatrix {
        let r = self.piece_range(piece);
        self.blocks.block(r.start, r.len())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let basis = |m: &QMatrix| -> Vec<Vec<String>> {
            m.columns().iter().map(|c| c.iter().map(format_rational).collect()).collect()
        };
        let sig = self.signature();
        json!({
            "p": self.prime,
            "dims": { "expanding": sig.negative, "bounded": sig.zero, "contracting": sig.positive },
            "bases": {
                "expanding": basis(&self.piece(Piece::Expanding)),
                "bounded": basis(&self.piece(Piece::Bounded)),
                "contracting": basis(&self.piece(Piece::Contracting)),
            },
            "exact": self.is_exact(),
            "precision": self.precision,
            "theta_exponent": self.theta_exponent().map(|t| format_rational(&t)),
        })
    }
}

fn columns_of(vectors: Vec<Vec<Rational>>, n: usize) -> QMatrix {
    QMatrix::from_columns(n, &vectors)
}

/// Contraction decomposition at a fixed working precision (used only when the
/// exact path is unavailable).
pub fn contraction_split(alpha: &QMatrix, p: u64, precision: u32) -> Result<ContractionSplit, ContractionError> {
    check_prime(p)?;
    if !alpha.is_square() || alpha.det()?.is_zero() {
        return Err(ContractionError::Singular);
    }
    let n = alpha.rows();
    let chi = alpha.charpoly()?;
    let valuations = eigenvalue_valuations(&chi, p)?;
    if n == 0 {
        let empty = QMatrix::zeros(0, 0);
        return Ok(ContractionSplit {
            prime: p,
            alpha: alpha.clone(),
            effective: alpha.clone(),
            change: empty.clone(),
            change_inv: empty.clone(),
            blocks: empty,
            valuations,
            precision: None,
        });
    }
    if let Some(split) = exact_split(alpha, p, &chi, &valuations)? {
        return Ok(split);
    }
    approximate_split(alpha, p, precision, valuations)
}

/// Runs [`contraction_split`] from `precision`, doubling on
/// `PrecisionExhausted` up to [`MAX_PRECISION`].
pub fn contraction_split_auto(alpha: &QMatrix, p: u64, precision: u32) -> Result<ContractionSplit, ContractionError> {
    let mut n = precision.max(8);
    loop {
        match contraction_split(alpha, p, n) {
            Err(ContractionError::PrecisionExhausted(_)) if n < MAX_PRECISION => n = (n * 2).min(MAX_PRECISION),
            other => return other,
        }
    }
}

fn exact_split(
    alpha: &QMatrix,
    p: u64,
    chi: &MonicPoly,
    valuations: &ValuationMultiset,
) -> Result<Option<ContractionSplit>, ContractionError> {
    let Ok(factors) = factor_over_q(chi) else { return Ok(None) };
    let mut polys = [Poly::one(), Poly::one(), Poly::one()];
    for (g, m) in &factors {
        let v = eigenvalue_valuations(g, p)?;
        let piece = Piece::of_valuation(&v.entries[0].0);
        if v.entries.iter().any(|(x, _)| Piece::of_valuation(x) != piece) {
            return Ok(None);
        }
        let slot = match piece {
            Piece::Expanding => 0,
            Piece::Bounded => 1,
            Piece::Contracting => 2,
        };
        polys[slot] = polys[slot].mul(&g.as_poly().pow(*m));
    }
    let n = alpha.rows();
    let [pe, pb, pc] = polys.map(|h| columns_of(h.eval_matrix(alpha).kernel(), n));
    let change = pe.hcat(&pb).hcat(&pc);
    let change_inv = change.inverse()?;
    let blocks = &(&change_inv * alpha) * &change;
    let split = ContractionSplit {
        prime: p,
        alpha: alpha.clone(),
        effective: alpha.clone(),
        change,
        change_inv,
        blocks,
        valuations: valuations.clone(),
        precision: None,
    };
    debug_assert_eq!(split.signature(), valuations.signature());
    Ok(Some(split))
}

// ---------------------------------------------------------------------------
// Precision-qualified path.

/// `p^exp · mant` with integer mantissas reduced modulo `p^digits`; `prec`
/// relative p-adic digits are trustworthy.
#[derive(Clone)]
struct PadicMatrix {
    n: usize,
    exp: i64,
    mant: Vec<BigInt>,
    prec: i64,
}

fn big_pow(p: u64, e: i64) -> BigInt {
    num_traits::pow(BigInt::from(p), e.max(0) as usize)
}

fn to_residue(x: &Rational, modulus: &BigInt) -> BigInt {
    let d = x.denom().mod_floor(modulus);
    let inv = crate::padic::mod_inverse(&d, modulus);
    (x.numer() * inv).mod_floor(modulus)
}

impl PadicMatrix {
    fn from_rational(m: &QMatrix, p: u64, digits: i64) -> PadicMatrix {
        let n = m.rows();
        let exp = m.entries().filter_map(|x| vp_int(x, p)).min().unwrap_or(0);
        let modulus = big_pow(p, digits);
        let scale = p_pow(p, -exp);
        let mant = m.entries().map(|x| to_residue(&(x * &scale), &modulus)).collect();
        PadicMatrix { n, exp, mant, prec: digits }
    }

    fn mul(&self, o: &PadicMatrix, p: u64, digits: i64) -> Option<PadicMatrix> {
        let n = self.n;
        let mut raw = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.mant[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    raw[i * n + j] += a * &o.mant[k * n + j];
                }
            }
        }
        let prec = self.prec.min(o.prec);
        let shift = raw
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| crate::padic::vp_bigint(x, p))
            .filter(|&v| v < prec)
            .min()?;
        let div = big_pow(p, shift);
        let modulus = big_pow(p, digits);
        let mant = raw.into_iter().map(|x| (x / &div).mod_floor(&modulus)).collect();
        Some(PadicMatrix { n, exp: self.exp + o.exp + shift, mant, prec: prec - shift })
    }

    fn pow2(&self, squarings: u32, p: u64, digits: i64) -> Option<PadicMatrix> {
        let mut m = self.clone();
        for _ in 0..squarings {
            m = m.mul(&m, p, digits)?;
        }
        Some(m)
    }

    fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.n).map(|i| self.mant[i * self.n + j].clone()).collect()
    }
}

/// Picks `d` columns spanning the dominant `d`-dimensional part of the column
/// space by complete pivoting; returns them in echelon form with the valuation
/// gap separating the pivots from the residual.
fn dominant_columns(m: &PadicMatrix, d: usize, p: u64) -> Option<(Vec<Vec<BigInt>>, i64)> {
    let n = m.n;
    let modulus = big_pow(p, m.prec.max(1));
    let mut cols: Vec<Vec<BigInt>> = (0..n).map(|j| m.column(j)).collect();
    for c in cols.iter_mut() {
        for x in c.iter_mut() {
            *x = x.mod_floor(&modulus);
        }
    }
    let val = |x: &BigInt| (!x.is_zero()).then(|| crate::padic::vp_bigint(x, p));
    let mut used_rows = vec![false; n];
    let mut used_cols = vec![false; n];
    let mut chosen = Vec::with_capacity(d);
    let mut max_pivot = 0;
    for _ in 0..d {
        let mut best: Option<(i64, usize, usize)> = None;
        for j in (0..n).filter(|&j| !used_cols[j]) {
            for i in (0..n).filter(|&i| !used_rows[i]) {
                if let Some(v) = val(&cols[j][i]) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, j, i));
                    }
                }
            }
        }
        let (v, j, i) = best?;
        max_pivot = max_pivot.max(v);
        used_rows[i] = true;
        used_cols[j] = true;
        chosen.push(j);
        // eliminate row i from the other unused columns, working modulo p^prec
        let piv = cols[j][i].clone();
        let pv = big_pow(p, v);
        let unit = &piv / &pv;
        let unit_inv = crate::padic::mod_inverse(&unit.mod_floor(&modulus), &modulus);
        for k in (0..n).filter(|&k| !used_cols[k]) {
            if cols[k][i].is_zero() {
                continue;
            }
            let f = ((&cols[k][i] / &pv) * &unit_inv).mod_floor(&modulus);
            for r in 0..n {
                let t = (&cols[k][r] - &f * &cols[j][r]).mod_floor(&modulus);
                cols[k][r] = t;
            }
        }
    }
    let residual = (0..n)
        .filter(|&k| !used_cols[k])
        .flat_map(|k| (0..n).filter(|&i| !used_rows[i]).filter_map(|i| val(&cols[k][i])).collect::<Vec<_>>())
        .min()
        .unwrap_or(m.prec);
    let gap = residual.min(m.prec) - max_pivot;
    // The chosen columns were reduced against earlier pivots, so they form an
    // echelon basis whose weak directions survive rounding.
    Some((chosen.into_iter().map(|j| std::mem::take(&mut cols[j])).collect(), gap))
}

/// Normalizes an integer vector to primitive p-adic size and truncates it to
/// `digits` p-adic digits.
fn round_vector(v: &[BigInt], p: u64, digits: i64) -> Vec<Rational> {
    let shift = v.iter().filter(|x| !x.is_zero()).map(|x| crate::padic::vp_bigint(x, p)).min().unwrap_or(0);
    let div = big_pow(p, shift);
    let modulus = big_pow(p, digits);
    v.iter().map(|x| Rational::from_integer((x / &div).mod_floor(&modulus))).collect()
}

fn approximate_split(
    alpha: &QMatrix,
    p: u64,
    precision: u32,
    valuations: ValuationMultiset,
) -> Result<ContractionSplit, ContractionError> {
    let n = alpha.rows();
    let exhausted = || ContractionError::PrecisionExhausted(precision);
    let sig = valuations.signature();
    let target = precision as i64;
    let gap = valuations.min_nonzero_abs().expect("mixed slopes imply a nonzero valuation");
    let inv = alpha.inverse()?;

    // α^K with K ≥ 2·target/gap, plus room for Jordan blocks.
    let needed = (Rational::from_integer((2 * target + 4 * n as i64).into()) / &gap).ceil();
    let needed = needed.to_integer().to_u64().unwrap_or(u64::MAX).max(2);
    let squarings = 64 - (needed - 1).leading_zeros();
    let k = 1i64 << squarings;

    // Digits needed so that the weakest eigenvalue of valuation ≤ 0 in α^K
    // survives next to the strongest one, plus the cancellation from entries
    // smaller than the dominant eigenvalue.
    let digits = |m: &QMatrix, vals: &ValuationMultiset| -> i64 {
        let floor = |v: &Rational| v.floor().to_integer().to_i64().expect("small valuation");
        let ceil = |v: &Rational| v.ceil().to_integer().to_i64().expect("small valuation");
        let min_entry = m.entries().filter_map(|x| vp_int(x, p)).min().unwrap_or(0);
        let min_eig = vals.entries.first().map(|(v, _)| floor(v)).unwrap_or(0);
        let top = vals.entries.iter().filter(|(v, _)| !v.is_positive()).map(|(v, _)| ceil(v)).max().unwrap_or(min_eig);
        2 * target + k * ((top - min_eig) + (min_eig - min_entry).max(0)) + 8 * n as i64
    };
    let inv_vals = valuations.negated();
    let digits_fwd = digits(alpha, &valuations);
    let digits_bwd = digits(&inv, &inv_vals);

    let fwd = PadicMatrix::from_rational(alpha, p, digits_fwd).pow2(squarings, p, digits_fwd).ok_or_else(exhausted)?;
    let bwd = PadicMatrix::from_rational(&inv, p, digits_bwd).pow2(squarings, p, digits_bwd).ok_or_else(exhausted)?;

    let round = target + 2 * n as i64;
    let take = |m: &PadicMatrix, d: usize| -> Result<QMatrix, ContractionError> {
        if d == 0 {
            return Ok(QMatrix::zeros(n, 0));
        }
        if d == n {
            return Ok(QMatrix::identity(n));
        }
        let (cols, gap) = dominant_columns(m, d, p).ok_or_else(exhausted)?;
        if gap < target {
            return Err(exhausted());
        }
        let rounded: Vec<_> = cols.iter().map(|c| round_vector(c, p, round)).collect();
        Ok(QMatrix::from_columns(n, &rounded))
    };
    let expanding = take(&fwd, sig.negative)?;
    let plus = take(&fwd, sig.negative + sig.zero)?;
    let contracting = take(&bwd, sig.positive)?;
    let minus = take(&bwd, sig.positive + sig.zero)?;

    let bounded = if sig.zero == 0 {
        QMatrix::zeros(n, 0)
    } else {
        let ker = plus.hcat(&minus.scale(&-Rational::one())).kernel();
        if ker.len() != sig.zero {
            return Err(exhausted());
        }
        let vecs: Vec<_> = ker.iter().map(|x| plus.mul_vec(&x[..plus.cols()])).collect();
        QMatrix::from_columns(n, &vecs)
    };

    let basis = expanding.hcat(&bounded).hcat(&contracting);
    let basis_inv = basis.inverse().map_err(|_| exhausted())?;
    let beta = &(&basis_inv * alpha) * &basis;
    let sizes = [sig.negative, sig.zero, sig.positive];
    let offsets = [0, sig.negative, sig.negative + sig.zero];
    let mut truncated = QMatrix::zeros(n, n);
    let mut diag_min = i64::MAX;
    let mut off_min = i64::MAX;
    for i in 0..n {
        for j in 0..n {
            let bi = (0..3).rfind(|&b| i >= offsets[b] && sizes[b] > 0).unwrap();
            let bj = (0..3).rfind(|&b| j >= offsets[b] && sizes[b] > 0).unwrap();
            let x = &beta[(i, j)];
            if bi == bj {
                if let Some(v) = vp_int(x, p) {
                    diag_min = diag_min.min(v);
                }
            } else if let Some(v) = vp_int(x, p) {
                off_min = off_min.min(v);
            }
        }
    }
    if off_min != i64::MAX && off_min - diag_min < target / 2 {
        return Err(exhausted());
    }
    // Round the diagonal blocks to short p-adic expansions so that the
    // surrogate stays cheap to work with.
    let cutoff = diag_min + target + 2 * n as i64;
    for b in 0..3 {
        for i in offsets[b]..offsets[b] + sizes[b] {
            for j in offsets[b]..offsets[b] + sizes[b] {
                truncated[(i, j)] = reduce_mod_p_power(&beta[(i, j)], p, cutoff);
            }
        }
    }
    // Each diagonal block must carry exactly the slopes of its piece.
    for b in 0..3 {
        if sizes[b] == 0 {
            continue;
        }
        let blk = truncated.block(offsets[b], sizes[b]);
        let v = eigenvalue_valuations(&blk.charpoly()?, p)?;
        let want = [Piece::Expanding, Piece::Bounded, Piece::Contracting][b];
        if v.entries.iter().any(|(x, _)| Piece::of_valuation(x) != want) {
            return Err(exhausted());
        }
    }
    let effective = &(&basis * &truncated) * &basis_inv;
    Ok(ContractionSplit {
        prime: p,
        alpha: alpha.clone(),
        effective,
        change: basis,
        change_inv: basis_inv,
        blocks: truncated,
        valuations,
        precision: Some(precision),
    })
}

// ---------------------------------------------------------------------------
// Adapted lattices.

/// A full-rank lattice `L = (L∩E_p) ⊕ (L∩E_0) ⊕ (L∩E_m)` with
/// `α(L∩E_0) = L∩E_0`, `α⁻¹(L∩E_p) ⊆ L∩E_p` and `α(L∩E_m) ⊆ L∩E_m`.
/// The filtration `p^k L` induces the ultrametric norm
/// `‖x‖ = p^{-max{k : x ∈ p^k L}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedLattice {
    pub lattice: Lattice,
    pub pieces: [Lattice; 3],
    pub theta_exponent: Option<Rational>,
    pub split: ContractionSplit,
    pub precision_qualified: bool,
}

impl AdaptedLattice {
    pub fn piece(&self, piece: Piece) -> &Lattice {
        match piece {
            Piece::Expanding => &self.pieces[0],
            Piece::Bounded => &self.pieces[1],
            Piece::Contracting => &self.pieces[2],
        }
    }

    /// `‖x‖` as the exponent `-max{k : x ∈ p^k L}`; `None` for `x = 0`.
    pub fn norm_exponent(&self, x: &[Rational]) -> Option<i64> {
        let coords = self.lattice.coordinates(x)?;
        coords.iter().filter_map(|c| vp_int(c, self.lattice.prime())).min().map(|k| -k)
    }
}

/// Grows `start` under the given maps until it is stable under all of them.
fn saturate(start: Lattice, maps: &[QMatrix]) -> Result<Lattice, ContractionError> {
    let mut l = start;
    for _ in 0..ITERATION_CAP {
        let images: Vec<Lattice> = maps.iter().map(|m| l.apply_unchecked(m)).collect();
        let next = Lattice::sum_all(&l, images.iter())?;
        if next == l {
            return Ok(l);
        }
        l = next;
    }
    Err(ContractionError::IterationCap)
}

pub fn adapted_lattice(split: &ContractionSplit) -> Result<AdaptedLattice, ContractionError> {
    let p = split.prime;
    let n = split.dim();
    let mut pieces = Vec::with_capacity(3);
    for piece in [Piece::Expanding, Piece::Bounded, Piece::Contracting] {
        let basis = split.piece(piece);
        let d = basis.cols();
        let a = split.restriction(piece);
        let maps = match piece {
            Piece::Expanding => vec![a.inverse()?],
            Piece::Bounded => vec![a.clone(), a.inverse()?],
            Piece::Contracting => vec![a],
        };
        let local = saturate(Lattice::standard(p, d)?, &maps)?;
        let gens: Vec<Vec<Rational>> = local.basis().columns().iter().map(|c| basis.mul_vec(c)).collect();
        pieces.push(Lattice::from_columns(p, n, &gens)?);
    }
    let pieces: [Lattice; 3] = pieces.try_into().expect("three pieces");
    let lattice = Lattice::sum_all(&pieces[0], pieces[1..].iter())?;
    if !split.is_exact() {
        // certify that α and α̃ move the lattice identically
        let a = split.alpha();
        let same = lattice.apply(a)? == lattice.apply(split.effective())?
            && lattice.apply(&a.inverse()?)? == lattice.apply(&split.effective().inverse()?)?;
        if !same {
            return Err(ContractionError::InexactSplit);
        }
    }
    Ok(AdaptedLattice {
        lattice,
        pieces,
        theta_exponent: split.theta_exponent(),
        split: split.clone(),
        precision_qualified: !split.is_exact(),
    })
}

/// `diag` helper used throughout tests and examples.
pub fn diag_p_powers(p: u64, exps: &[i64]) -> QMatrix {
    QMatrix::diag(&exps.iter().map(|&e| p_pow(p, e)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{int, ratio};

    fn span_equal(a: &QMatrix, b: &QMatrix) -> bool {
        a.cols() == b.cols() && a.hcat(b).rank() == a.cols()
    }

    #[test]
    fn diagonal_split() {
        let a = diag_p_powers(3, &[-1, 0, 1]);
        let s = contraction_split(&a, 3, DEFAULT_PRECISION).unwrap();
        assert!(s.is_exact());
        assert!(span_equal(&s.piece(Piece::Expanding), &QMatrix::from_ints(&[&[1], &[0], &[0]])));
        assert!(span_equal(&s.piece(Piece::Bounded), &QMatrix::from_ints(&[&[0], &[1], &[0]])));
        assert!(span_equal(&s.piece(Piece::Contracting), &QMatrix::from_ints(&[&[0], &[0], &[1]])));
        assert_eq!(s.theta_exponent(), Some(int(1)));
    }

    #[test]
    fn companion_is_contracting() {
        for p in [2u64, 3, 5] {
            let a = QMatrix::from_ints(&[&[0, p as i64], &[1, 0]]);
            let s = contraction_split(&a, p, DEFAULT_PRECISION).unwrap();
            assert!(s.is_exact());
            assert_eq!(s.signature(), SlopeSignature { negative: 0, zero: 0, positive: 2 });
            assert_eq!(s.theta_exponent(), Some(ratio(1, 2)));
            // α^n e1 gains valuation: α^2 = p·I
            let e1 = vec![int(1), int(0)];
            let v = a.pow(6).mul_vec(&e1);
            assert_eq!(v.iter().filter_map(|x| vp_int(x, p)).min(), Some(3));
        }
    }

    #[test]
    fn unimodular_is_bounded() {
        let a = QMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        let s = contraction_split(&a, 5, DEFAULT_PRECISION).unwrap();
        assert_eq!(s.signature(), SlopeSignature { negative: 0, zero: 2, positive: 0 });
        assert!(s.is_exact());
        assert_eq!(s.theta_exponent(), None);
    }

    #[test]
    fn empty_space() {
        let s = contraction_split(&QMatrix::identity(0), 2, DEFAULT_PRECISION).unwrap();
        assert_eq!(s.signature(), SlopeSignature::default());
        let adapted = adapted_lattice(&s).unwrap();
        assert_eq!(adapted.lattice.rank(), 0);
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(
            contraction_split(&QMatrix::zeros(2, 2), 2, DEFAULT_PRECISION),
            Err(ContractionError::Singular)
        );
        assert!(matches!(contraction_split(&QMatrix::identity(2), 4, 64), Err(ContractionError::Padic(_))));
    }

    #[test]
    fn mixed_slope_factor_goes_precision_qualified() {
        // x^2 - x/2 + 2 is irreducible over Q with root valuations -1 and 2 at p = 2
        let a = QMatrix::from_fracs(&[&[(0, 1), (-2, 1)], &[(1, 1), (1, 2)]]);
        let f = a.charpoly().unwrap();
        assert_eq!(crate::linalg::factor_over_q(&f).unwrap().len(), 1);
        let s = contraction_split_auto(&a, 2, DEFAULT_PRECISION).unwrap();
        assert!(!s.is_exact());
        assert_eq!(s.signature(), SlopeSignature { negative: 1, zero: 0, positive: 1 });
        // pieces are exactly invariant for the surrogate
        for piece in [Piece::Expanding, Piece::Contracting] {
            let b = s.piece(piece);
            let img = s.effective() * &b;
            assert!(span_equal(&b, &img));
        }
        // surrogate is p-adically close to α
        let diff = s.effective().sub(&a);
        let v = diff.entries().filter_map(|x| vp_int(x, 2)).min().unwrap_or(i64::MAX);
        assert!(v >= 32, "surrogate differs at valuation {v}");
    }

    #[test]
    fn adapted_lattice_examples() {
        let a = diag_p_powers(5, &[-1, 1]);
        let s = contraction_split(&a, 5, DEFAULT_PRECISION).unwrap();
        let l = adapted_lattice(&s).unwrap();
        assert_eq!(l.lattice, Lattice::standard(5, 2).unwrap());
        assert_eq!(l.theta_exponent, Some(int(1)));

        let s = contraction_split(&QMatrix::identity(3), 2, DEFAULT_PRECISION).unwrap();
        let l = adapted_lattice(&s).unwrap();
        assert_eq!(l.lattice, Lattice::standard(2, 3).unwrap());
        assert_eq!(l.theta_exponent, None);
        assert_eq!(s.piece(Piece::Bounded).cols(), 3);
    }

    #[test]
    fn triangular_with_rational_eigenvectors() {
        let p = 3u64;
        let a = QMatrix::from_fracs(&[&[(1, 3), (1, 1)], &[(0, 1), (3, 1)]]);
        let s = contraction_split(&a, p, DEFAULT_PRECISION).unwrap();
        assert!(s.is_exact());
        // eigenvectors from kernel(α - λI)
        let ev = |lambda: Rational| a.sub(&QMatrix::identity(2).scale(&lambda)).kernel();
        assert!(span_equal(&s.piece(Piece::Expanding), &QMatrix::from_columns(2, &ev(ratio(1, 3)))));
        assert!(span_equal(&s.piece(Piece::Contracting), &QMatrix::from_columns(2, &ev(int(3)))));
        let l = adapted_lattice(&s).unwrap();
        let direct = Lattice::sum_all(&l.pieces[0], l.pieces[1..].iter()).unwrap();
        assert_eq!(direct, l.lattice);
        assert_eq!(l.lattice.intersect_subspace(&s.piece(Piece::Expanding)).unwrap(), l.pieces[0]);
        assert_eq!(l.lattice.intersect_subspace(&s.piece(Piece::Contracting)).unwrap(), l.pieces[2]);
    }

    #[test]
    fn norm_from_filtration() {
        let a = diag_p_powers(2, &[-1, 1]);
        let l = adapted_lattice(&contraction_split(&a, 2, 64).unwrap()).unwrap();
        assert_eq!(l.norm_exponent(&[int(4), int(0)]), Some(-2));
        assert_eq!(l.norm_exponent(&[ratio(1, 2), int(3)]), Some(1));
        assert_eq!(l.norm_exponent(&[int(0), int(0)]), None);
    }
}
