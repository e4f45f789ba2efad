//! Finitely generated `Z_(p)`-submodules of `Q^n`.
//!
//! A full-rank lattice stands in for a compact open subgroup of `Q_p^n`;
//! sub-rank lattices model modules such as `U₊` that live inside a proper
//! subspace. Every lattice is stored in a canonical column Hermite form over
//! the local ring `Z_(p)`, so structural equality is module equality:
//!
//! * pivot rows strictly increase from column to column and each column is
//!   zero above its pivot row;
//! * each pivot entry is a power of `p`;
//! * an entry sitting in the pivot row of a later column with pivot `p^v` is
//!   the canonical residue modulo `p^v Z_(p)` (an element of `Z[1/p] ∩ [0, p^v)`).

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{LinalgError, QMatrix};
use crate::padic::{
    check_prime, format_rational, is_p_integral, p_pow, parse_rational, reduce_mod_p_power,
    split_unit, vp_int, PadicError, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("lattices live in different spaces ({0} vs {1})")]
    AmbientMismatch(String, String),
    #[error("second lattice is not contained in the first")]
    NotNested,
    #[error("lattices have ranks {0} and {1}")]
    RankMismatch(usize, usize),
    #[error("matrix is singular or has the wrong shape")]
    Singular,
    #[error("operation needs a full-rank lattice")]
    NotFullRank,
}

impl From<LinalgError> for LatticeError {
    fn from(_: LinalgError) -> Self {
        LatticeError::Singular
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    p: u64,
    ambient: usize,
    basis: QMatrix,
    pivot_rows: Vec<usize>,
}

/// Column reduction over `Z_(p)` using only unimodular column operations.
///
/// Returns the reduced generator columns (nonzero ones first), the pivot row
/// of each nonzero column, and, when requested, the accumulated transform `T`
/// with `gens · T = reduced`.
struct Echelon {
    columns: Vec<Vec<Rational>>,
    pivot_rows: Vec<usize>,
    transform: Option<Vec<Vec<Rational>>>,
}

fn axpy(target: &mut [Rational], f: &Rational, src: &[Rational]) {
    for (t, s) in target.iter_mut().zip(src) {
        if !s.is_zero() {
            *t -= f * s;
        }
    }
}

fn column_echelon(rows: usize, mut cols: Vec<Vec<Rational>>, p: u64, track: bool) -> Echelon {
    let ncols = cols.len();
    let mut transform: Option<Vec<Vec<Rational>>> = track.then(|| {
        (0..ncols)
            .map(|j| (0..ncols).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect()
    });
    let mut pivot_rows = Vec::new();
    let mut pivot_vals: Vec<i64> = Vec::new();
    let mut r = 0;
    for row in 0..rows {
        if r == ncols {
            break;
        }
        // lowest valuation in this row among the unused columns; ties go to the lowest index
        let best = (r..ncols)
            .filter_map(|j| vp_int(&cols[j][row], p).map(|v| (v, j)))
            .min();
        let Some((v, j)) = best else { continue };
        cols.swap(r, j);
        if let Some(t) = transform.as_mut() {
            t.swap(r, j);
        }
        let (_, unit) = split_unit(&cols[r][row], p);
        let unit_inv = unit.recip();
        for x in cols[r].iter_mut() {
            *x *= &unit_inv;
        }
        if let Some(t) = transform.as_mut() {
            for x in t[r].iter_mut() {
                *x *= &unit_inv;
            }
        }
        let pivot = p_pow(p, v);
        let pivot_inv = pivot.recip();
        for k in r + 1..ncols {
            if cols[k][row].is_zero() {
                continue;
            }
            let f = &cols[k][row] * &pivot_inv;
            let (head, tail) = cols.split_at_mut(k);
            axpy(&mut tail[0], &f, &head[r]);
            if let Some(t) = transform.as_mut() {
                let (head, tail) = t.split_at_mut(k);
                axpy(&mut tail[0], &f, &head[r]);
            }
        }
        pivot_rows.push(row);
        pivot_vals.push(v);
        r += 1;
    }
    // Reduce entries in later pivot rows to canonical residues.
    for j in 0..r {
        for k in j + 1..r {
            let c = cols[j][pivot_rows[k]].clone();
            if c.is_zero() {
                continue;
            }
            let rep = reduce_mod_p_power(&c, p, pivot_vals[k]);
            let f = (c - rep) * p_pow(p, -pivot_vals[k]);
            if f.is_zero() {
                continue;
            }
            let (head, tail) = cols.split_at_mut(k);
            axpy(&mut head[j], &f, &tail[0]);
            if let Some(t) = transform.as_mut() {
                let (head, tail) = t.split_at_mut(k);
                axpy(&mut head[j], &f, &tail[0]);
            }
        }
    }
    Echelon { columns: cols, pivot_rows, transform }
}

/// `Z_(p)`-basis (as columns) of `Z_(p)^N ∩ ker A` for an `m × N` matrix `A`.
pub fn saturated_kernel(a: &QMatrix, p: u64) -> QMatrix {
    let ech = column_echelon(a.rows(), a.columns(), p, true);
    let t = ech.transform.unwrap();
    let rank = ech.pivot_rows.len();
    QMatrix::from_columns(a.cols(), &t[rank..])
}

impl Lattice {
    /// Canonical lattice generated by the columns of `generators`.
    pub fn canonicalize(generators: &QMatrix, p: u64) -> Result<Lattice, LatticeError> {
        check_prime(p)?;
        Ok(Self::canonicalize_unchecked(generators.rows(), generators.columns(), p))
    }

    fn canonicalize_unchecked(ambient: usize, gens: Vec<Vec<Rational>>, p: u64) -> Lattice {
        let ech = column_echelon(ambient, gens, p, false);
        let rank = ech.pivot_rows.len();
        let basis = QMatrix::from_columns(ambient, &ech.columns[..rank]);
        Lattice { p, ambient, basis, pivot_rows: ech.pivot_rows }
    }

    pub fn from_columns(p: u64, ambient: usize, columns: &[Vec<Rational>]) -> Result<Lattice, LatticeError> {
        check_prime(p)?;
        if columns.iter().any(|c| c.len() != ambient) {
            return Err(LatticeError::AmbientMismatch(ambient.to_string(), "column length".into()));
        }
        Ok(Self::canonicalize_unchecked(ambient, columns.to_vec(), p))
    }

    /// `Z_(p)^n`.
    pub fn standard(p: u64, n: usize) -> Result<Lattice, LatticeError> {
        Self::canonicalize(&QMatrix::identity(n), p)
    }

    pub fn zero(p: u64, n: usize) -> Result<Lattice, LatticeError> {
        Self::canonicalize(&QMatrix::zeros(n, 0), p)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient
    }

    /// `n × r` canonical basis matrix.
    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.pivot_rows
    }

    fn compatible(&self, other: &Lattice) -> Result<(), LatticeError> {
        if self.p != other.p || self.ambient != other.ambient {
            return Err(LatticeError::AmbientMismatch(
                format!("p={} n={}", self.p, self.ambient),
                format!("p={} n={}", other.p, other.ambient),
            ));
        }
        Ok(())
    }

    /// Smallest module containing both.
    pub fn sum(&self, other: &Lattice) -> Result<Lattice, LatticeError> {
        self.compatible(other)?;
        let mut gens = self.basis.columns();
        gens.extend(other.basis.columns());
        Ok(Self::canonicalize_unchecked(self.ambient, gens, self.p))
    }

    pub fn sum_all<'a>(first: &Lattice, rest: impl IntoIterator<Item = &'a Lattice>) -> Result<Lattice, LatticeError> {
        let mut gens = first.basis.columns();
        for l in rest {
            first.compatible(l)?;
            gens.extend(l.basis.columns());
        }
        Ok(Self::canonicalize_unchecked(first.ambient, gens, first.p))
    }

    /// Largest module contained in both. Full-rank pairs go through duals
    /// (`(L ∩ M)* = L* + M*`); everything else through a kernel computation.
    pub fn intersect(&self, other: &Lattice) -> Result<Lattice, LatticeError> {
        self.compatible(other)?;
        if self.is_full_rank() && other.is_full_rank() {
            self.intersect_via_duals(other)
        } else {
            self.intersect_via_kernel(other)
        }
    }

    pub fn intersect_via_duals(&self, other: &Lattice) -> Result<Lattice, LatticeError> {
        self.compatible(other)?;
        self.dual()?.sum(&other.dual()?)?.dual()
    }

    /// `L ∩ M = { B x : B x = C y, x, y ∈ Z_(p) }`, read off the saturated
    /// kernel of `[B | -C]`.
    pub fn intersect_via_kernel(&self, other: &Lattice) -> Result<Lattice, LatticeError> {
        self.compatible(other)?;
        let r = self.rank();
        let stacked = self.basis.hcat(&other.basis.scale(&-Rational::one()));
        let k = saturated_kernel(&stacked, self.p);
        let xs: Vec<Vec<Rational>> = k.columns().into_iter().map(|c| self.basis.mul_vec(&c[..r])).collect();
        Ok(Self::canonicalize_unchecked(self.ambient, xs, self.p))
    }

    /// Dual lattice `{ y : y·x ∈ Z_(p) for all x ∈ L }` of a full-rank lattice.
    pub fn dual(&self) -> Result<Lattice, LatticeError> {
        if !self.is_full_rank() {
            return Err(LatticeError::NotFullRank);
        }
        let d = self.basis.inverse()?.transpose();
        Ok(Self::canonicalize_unchecked(self.ambient, d.columns(), self.p))
    }

    /// `L ∩ span_Q(columns of subspace)`.
    pub fn intersect_subspace(&self, subspace: &QMatrix) -> Result<Lattice, LatticeError> {
        if subspace.rows() != self.ambient {
            return Err(LatticeError::AmbientMismatch(self.ambient.to_string(), subspace.rows().to_string()));
        }
        // rows of `ann` span the annihilator of the subspace
        let ann_vecs = subspace.transpose().kernel();
        if ann_vecs.is_empty() {
            return Ok(self.clone());
        }
        let ann = QMatrix::from_rows(ann_vecs).expect("rectangular");
        let k = saturated_kernel(&(&ann * &self.basis), self.p);
        let gens: Vec<_> = k.columns().into_iter().map(|c| self.basis.mul_vec(&c)).collect();
        Ok(Self::canonicalize_unchecked(self.ambient, gens, self.p))
    }

    /// Image `A · L` under an invertible matrix.
    pub fn apply(&self, a: &QMatrix) -> Result<Lattice, LatticeError> {
        if a.rows() != self.ambient || a.cols() != self.ambient || a.det()?.is_zero() {
            return Err(LatticeError::Singular);
        }
        Ok(self.apply_unchecked(a))
    }

    pub(crate) fn apply_unchecked(&self, a: &QMatrix) -> Lattice {
        let img = a * &self.basis;
        Self::canonicalize_unchecked(self.ambient, img.columns(), self.p)
    }

    /// `p^k L`.
    pub fn scaled(&self, k: i64) -> Lattice {
        Lattice {
            p: self.p,
            ambient: self.ambient,
            basis: self.basis.scale(&p_pow(self.p, k)),
            pivot_rows: self.pivot_rows.clone(),
        }
        .recanonicalized()
    }

    fn recanonicalized(self) -> Lattice {
        Self::canonicalize_unchecked(self.ambient, self.basis.columns(), self.p)
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if v.len() != self.ambient {
            return None;
        }
        let r = self.rank();
        let mut x = vec![Rational::zero(); r];
        for j in 0..r {
            let row = self.pivot_rows[j];
            let mut acc = v[row].clone();
            for (k, xk) in x.iter().enumerate().take(j) {
                acc -= xk * &self.basis[(row, k)];
            }
            x[j] = acc / &self.basis[(row, j)];
        }
        (self.basis.mul_vec(&x) == v).then_some(x)
    }

    pub fn member(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some_and(|x| x.iter().all(|c| is_p_integral(c, self.p)))
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Lattice) -> bool {
        self.p == other.p
            && self.ambient == other.ambient
            && other.basis.columns().iter().all(|c| self.member(c))
    }

    /// `log_p [self : other]` for `other ⊆ self` of the same rank.
    pub fn index(&self, other: &Lattice) -> Result<i64, LatticeError> {
        self.compatible(other)?;
        if self.rank() != other.rank() {
            return Err(LatticeError::RankMismatch(self.rank(), other.rank()));
        }
        if !self.contains(other) {
            return Err(LatticeError::NotNested);
        }
        let coords: Vec<Vec<Rational>> = other
            .basis
            .columns()
            .iter()
            .map(|c| self.coordinates(c).expect("contained"))
            .collect();
        let x = QMatrix::from_columns(self.rank(), &coords);
        Ok(vp_int(&x.det()?, self.p).expect("nonsingular change of basis"))
    }

    /// Smallest entry valuation among basis entries (`None` for rank 0).
    pub fn min_valuation(&self) -> Option<i64> {
        self.basis.entries().filter_map(|x| vp_int(x, self.p)).min()
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            p: self.p,
            ambient: self.ambient,
            basis: self
                .basis
                .columns()
                .iter()
                .map(|c| c.iter().map(format_rational).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &LatticeJson) -> Result<Lattice, LatticeError> {
        let cols = j
            .basis
            .iter()
            .map(|c| c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_columns(j.p, j.ambient, &cols)
    }
}

impl std::fmt::Debug for Lattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Lattice(p={}, n={}, cols={:?})", self.p, self.ambient, self.basis.transpose())
    }
}

/// Wire format: basis listed column by column, entries as rational strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub p: u64,
    pub ambient: usize,
    pub basis: Vec<Vec<String>>,
}
