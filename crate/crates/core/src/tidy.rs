//! Tidying procedure for linear automorphisms of `Q_p^n` acting on
//! `Z_(p)`-lattices, and the scale as a tidy index.
//!
//! A full-rank lattice `V` is tidy above for `α` when `V = V₊ + V₋`, where
//! `V₊ = ⋂_{n≥0} αⁿV` and `V₋ = ⋂_{n≥0} α⁻ⁿV`. Tidiness below holds
//! automatically in this model, so the certificate only records it. For a tidy
//! `V` the scale exponent is `log_p [αV₊ : V₊]`.

use serde_json::json;
use thiserror::Error;

use crate::contraction::{AdaptedLattice, ContractionSplit, Piece};
use crate::lattice::{Lattice, LatticeError};
use crate::linalg::QMatrix;

pub const DEFAULT_UPLUS_CAP: usize = 64;
pub const DEFAULT_STEP_CAP: usize = 128;

pub const T2_NOTE: &str =
    "tidy below is implied by tidy above: closed subgroups of a p-adic vector group satisfy the ascending chain condition";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TidyError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("automorphism does not match the contraction split")]
    SplitMismatch,
    #[error("lattice must be full rank")]
    NotFullRank,
    #[error("iteration cap {0} reached")]
    IterationCap(usize),
    #[error("adapted ball failed the tidiness check")]
    AssertionFailure,
    #[error("scale cross-check failed: tidy index {tidy}, displacement index {displacement}")]
    CertificateMismatch { tidy: i64, displacement: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TidyCaps {
    pub u_plus: usize,
    pub steps: usize,
}

impl Default for TidyCaps {
    fn default() -> Self {
        TidyCaps { u_plus: DEFAULT_UPLUS_CAP, steps: DEFAULT_STEP_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TidyCertificate {
    pub prime: u64,
    pub alpha: QMatrix,
    pub start: Lattice,
    pub steps: usize,
    pub lattice: Lattice,
    pub v_plus: Lattice,
    pub v_minus: Lattice,
    pub scale_exponent: u64,
    pub t1_verified: bool,
    pub t2_note: &'static str,
    pub precision_qualified: bool,
}

impl TidyCertificate {
    /// `αⁿV₊` for `n = 0..=k`; an increasing chain whose union is `V₊₊`.
    pub fn u_plus_plus_generators(&self, k: usize) -> Vec<Lattice> {
        let mut out = Vec::with_capacity(k + 1);
        let mut cur = self.v_plus.clone();
        for _ in 0..=k {
            let next = cur.apply_unchecked(&self.alpha);
            out.push(cur);
            cur = next;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.prime,
            "steps": self.steps,
            "lattice": self.lattice.to_json(),
            "v_plus": self.v_plus.to_json(),
            "v_minus": self.v_minus.to_json(),
            "scale_exponent": self.scale_exponent,
            "t1_verified": self.t1_verified,
            "t2_note": self.t2_note,
            "precision_qualified": self.precision_qualified,
        })
    }
}

/// The automorphism in the coordinates of the split, where it is block
/// diagonal and `E_±` are coordinate subspaces.
struct Frame<'a> {
    split: &'a ContractionSplit,
    block: &'a QMatrix,
    block_inv: QMatrix,
    plus: QMatrix,
    minus: QMatrix,
}

impl<'a> Frame<'a> {
    fn new(alpha: &QMatrix, split: &'a ContractionSplit) -> Result<Frame<'a>, TidyError> {
        if alpha != split.alpha() && alpha != split.effective() {
            return Err(TidyError::SplitMismatch);
        }
        let n = split.dim();
        let block = split.block_form();
        let block_inv = block.inverse().map_err(LatticeError::from)?;
        let id = QMatrix::identity(n);
        let plus_end = split.piece_range(Piece::Bounded).end;
        let minus_start = split.piece_range(Piece::Bounded).start;
        Ok(Frame {
            split,
            block,
            block_inv,
            plus: id.select_columns(&(0..plus_end).collect::<Vec<_>>()),
            minus: id.select_columns(&(minus_start..n).collect::<Vec<_>>()),
        })
    }

    fn to_local(&self, l: &Lattice) -> Lattice {
        l.apply_unchecked(self.split.change_of_basis_inverse())
    }

    fn to_global(&self, l: &Lattice) -> Lattice {
        l.apply_unchecked(self.split.change_of_basis())
    }

    fn plus_core(&self, v: &Lattice, cap: usize) -> Result<Lattice, TidyError> {
        stable_core(v, self.block, &self.block_inv, &self.plus, cap)
    }

    fn minus_core(&self, v: &Lattice, cap: usize) -> Result<Lattice, TidyError> {
        stable_core(v, &self.block_inv, self.block, &self.minus, cap)
    }
}

/// Largest submodule of `V` with `α⁻¹S ⊆ S`, where `subspace` carries the
/// subspace the answer must lie in and `a` plays the role of `α`.
fn stable_core(v: &Lattice, a: &QMatrix, a_inv: &QMatrix, subspace: &QMatrix, cap: usize) -> Result<Lattice, TidyError> {
    if !v.is_full_rank() {
        return Err(TidyError::NotFullRank);
    }
    if subspace.cols() == 0 {
        return Ok(Lattice::zero(v.prime(), v.ambient())?);
    }
    let full = subspace.cols() == v.ambient();
    let slice = |m: &Lattice| -> Result<Lattice, TidyError> {
        Ok(if full { m.clone() } else { m.intersect_subspace(subspace)? })
    };
    let mut m = v.clone();
    let mut s = slice(&m)?;
    for _ in 0..cap {
        m = m.intersect(&m.apply_unchecked(a))?;
        let next = slice(&m)?;
        if next == s && s.contains(&s.apply_unchecked(a_inv)) {
            return Ok(s);
        }
        s = next;
    }
    Err(TidyError::IterationCap(cap))
}

pub fn u_plus_with_cap(v: &Lattice, alpha: &QMatrix, split: &ContractionSplit, cap: usize) -> Result<Lattice, TidyError> {
    let f = Frame::new(alpha, split)?;
    Ok(f.to_global(&f.plus_core(&f.to_local(v), cap)?))
}

pub fn u_minus_with_cap(v: &Lattice, alpha: &QMatrix, split: &ContractionSplit, cap: usize) -> Result<Lattice, TidyError> {
    let f = Frame::new(alpha, split)?;
    Ok(f.to_global(&f.minus_core(&f.to_local(v), cap)?))
}

/// `V₊ = ⋂_{n≥0} αⁿV`.
pub fn u_plus(v: &Lattice, alpha: &QMatrix, split: &ContractionSplit) -> Result<Lattice, TidyError> {
    u_plus_with_cap(v, alpha, split, DEFAULT_UPLUS_CAP)
}

/// `V₋ = ⋂_{n≥0} α⁻ⁿV`.
pub fn u_minus(v: &Lattice, alpha: &QMatrix, split: &ContractionSplit) -> Result<Lattice, TidyError> {
    u_minus_with_cap(v, alpha, split, DEFAULT_UPLUS_CAP)
}

/// T1 verdict with `V₊`, `V₋`, all in local coordinates.
fn t1_parts(f: &Frame, v: &Lattice, cap: usize) -> Result<(bool, Lattice, Lattice), TidyError> {
    let plus = f.plus_core(v, cap)?;
    let minus = f.minus_core(v, cap)?;
    Ok((&plus.sum(&minus)? == v, plus, minus))
}

/// Whether `V = V₊ + V₋`.
pub fn check_t1(v: &Lattice, alpha: &QMatrix, split: &ContractionSplit) -> Result<bool, TidyError> {
    let f = Frame::new(alpha, split)?;
    Ok(t1_parts(&f, &f.to_local(v), DEFAULT_UPLUS_CAP)?.0)
}

pub fn tidying(u0: &Lattice, alpha: &QMatrix, split: &ContractionSplit) -> Result<TidyCertificate, TidyError> {
    tidying_with_caps(u0, alpha, split, TidyCaps::default())
}

/// Finds the smallest `N` with `V_N = ⋂_{n=0..N} αⁿU₀` tidy above.
pub fn tidying_with_caps(
    u0: &Lattice,
    alpha: &QMatrix,
    split: &ContractionSplit,
    caps: TidyCaps,
) -> Result<TidyCertificate, TidyError> {
    let f = Frame::new(alpha, split)?;
    if !u0.is_full_rank() {
        return Err(TidyError::NotFullRank);
    }
    let start = f.to_local(u0);
    let mut v = start.clone();
    let mut image = start;
    for steps in 0..=caps.steps {
        if steps > 0 {
            image = image.apply_unchecked(f.block);
            v = v.intersect(&image)?;
        }
        let (ok, plus, minus) = t1_parts(&f, &v, caps.u_plus)?;
        if !ok {
            continue;
        }
        let tidy_index = plus.apply_unchecked(f.block).index(&plus)?;
        let (v, plus, minus) = (f.to_global(&v), f.to_global(&plus), f.to_global(&minus));
        // [αV : αV ∩ V] measured with the original automorphism
        let moved = v.apply_unchecked(split.alpha());
        let displacement = moved.index(&moved.intersect(&v)?)?;
        if tidy_index != displacement {
            return Err(TidyError::CertificateMismatch { tidy: tidy_index, displacement });
        }
        return Ok(TidyCertificate {
            prime: u0.prime(),
            alpha: split.effective().clone(),
            start: u0.clone(),
            steps,
            lattice: v,
            v_plus: plus,
            v_minus: minus,
            scale_exponent: tidy_index as u64,
            t1_verified: true,
            t2_note: T2_NOTE,
            precision_qualified: !split.is_exact(),
        });
    }
    Err(TidyError::IterationCap(caps.steps))
}

/// `p^k L` for an adapted lattice `L`; such balls are tidy without any
/// intersection steps.
pub fn tidy_ball(adapted: &AdaptedLattice, k: i64) -> Result<Lattice, TidyError> {
    let ball = adapted.lattice.scaled(k);
    let split = &adapted.split;
    if !check_t1(&ball, split.effective(), split)? {
        return Err(TidyError::AssertionFailure);
    }
    Ok(ball)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{adapted_lattice, contraction_split, diag_p_powers, DEFAULT_PRECISION};
    use crate::padic::int;

    fn split(a: &QMatrix, p: u64) -> ContractionSplit {
        contraction_split(a, p, DEFAULT_PRECISION).unwrap()
    }

    fn lat(p: u64, cols: &[&[i64]]) -> Lattice {
        let cols: Vec<Vec<_>> = cols.iter().map(|c| c.iter().map(|&x| int(x)).collect()).collect();
        Lattice::from_columns(p, cols[0].len(), &cols).unwrap()
    }

    /// `⋂_{n=0..=k} α^{±n} V` by brute force.
    fn brute(v: &Lattice, a: &QMatrix, k: usize) -> Lattice {
        let mut acc = v.clone();
        let mut img = v.clone();
        for _ in 0..k {
            img = img.apply(a).unwrap();
            acc = acc.intersect(&img).unwrap();
        }
        acc
    }

    #[test]
    fn diagonal_plus_minus() {
        let p = 2;
        let a = diag_p_powers(p, &[-1, 1]);
        let s = split(&a, p);
        let v = Lattice::standard(p, 2).unwrap();
        assert_eq!(u_plus(&v, &a, &s).unwrap(), lat(p, &[&[1, 0]]));
        assert_eq!(u_minus(&v, &a, &s).unwrap(), lat(p, &[&[0, 1]]));
        assert!(check_t1(&v, &a, &s).unwrap());
        let c = tidying(&v, &a, &s).unwrap();
        assert_eq!((c.steps, c.scale_exponent), (0, 1));
    }

    #[test]
    fn identity_is_trivially_tidy() {
        let a = QMatrix::identity(2);
        let s = split(&a, 3);
        let v = lat(3, &[&[1, 1], &[0, 27]]);
        assert_eq!(u_plus(&v, &a, &s).unwrap(), v);
        assert_eq!(u_minus(&v, &a, &s).unwrap(), v);
        let c = tidying(&v, &a, &s).unwrap();
        assert_eq!((c.steps, c.scale_exponent), (0, 0));
    }

    #[test]
    fn skewed_start_needs_steps() {
        let p = 2;
        let a = diag_p_powers(p, &[-1, 1]);
        let s = split(&a, p);
        let v = lat(p, &[&[1, 1], &[0, 8]]);
        // brute force: the E_+ parts of the chain stabilize by K = 10
        let e_plus = s.plus_space();
        let slices: Vec<_> = (0..=10).map(|k| brute(&v, &a, k).intersect_subspace(&e_plus).unwrap()).collect();
        let up = u_plus(&v, &a, &s).unwrap();
        assert_eq!(up.rank(), 1);
        assert_eq!(&up, slices.last().unwrap());
        assert_eq!(slices[9], slices[10]);
        assert!(!check_t1(&v, &a, &s).unwrap());
        let c = tidying(&v, &a, &s).unwrap();
        assert!(c.steps >= 1);
        assert_eq!(c.scale_exponent, 1);
        assert_eq!(c.lattice, brute(&v, &a, c.steps));
    }

    #[test]
    fn pure_contraction() {
        let p = 3;
        let a = QMatrix::from_ints(&[&[0, 3], &[1, 0]]);
        let s = split(&a, p);
        let v = Lattice::standard(p, 2).unwrap();
        assert_eq!(u_plus(&v, &a, &s).unwrap().rank(), 0);
        assert_eq!(u_minus(&v, &a, &s).unwrap(), v);
        assert_eq!(tidying(&v, &a, &s).unwrap().scale_exponent, 0);
        let inv = a.inverse().unwrap();
        let si = split(&inv, p);
        assert_eq!(tidying(&v, &inv, &si).unwrap().scale_exponent, 1);
    }

    #[test]
    fn adapted_balls() {
        let p = 3;
        let a = diag_p_powers(p, &[-1, 1]);
        let adapted = adapted_lattice(&split(&a, p)).unwrap();
        let b = tidy_ball(&adapted, 3).unwrap();
        assert_eq!(b, Lattice::standard(p, 2).unwrap().scaled(3));
        assert_eq!(tidy_ball(&adapted, 0).unwrap(), adapted.lattice);
        let c = tidying(&b, &a, &adapted.split).unwrap();
        assert_eq!((c.steps, c.scale_exponent), (0, 1));

        let tri = QMatrix::from_fracs(&[&[(1, 3), (1, 1)], &[(0, 1), (3, 1)]]);
        let adapted = adapted_lattice(&split(&tri, p)).unwrap();
        let b = tidy_ball(&adapted, 1).unwrap();
        assert_eq!(tidying(&b, &tri, &adapted.split).unwrap().steps, 0);
    }

    #[test]
    fn generator_stream_increases() {
        let p = 2;
        let a = diag_p_powers(p, &[-2, 0, 1]);
        let s = split(&a, p);
        let c = tidying(&Lattice::standard(p, 3).unwrap(), &a, &s).unwrap();
        assert_eq!(c.scale_exponent, 2);
        let chain = c.u_plus_plus_generators(4);
        assert!(chain.windows(2).all(|w| w[1].contains(&w[0])));
        assert_eq!(chain[1].index(&chain[0]).unwrap(), 2);
    }

    #[test]
    fn mismatched_split() {
        let a = diag_p_powers(2, &[-1, 1]);
        let s = split(&QMatrix::identity(2), 2);
        assert_eq!(u_plus(&Lattice::standard(2, 2).unwrap(), &a, &s), Err(TidyError::SplitMismatch));
    }
}
