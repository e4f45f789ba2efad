use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::MonicPoly;
use super::LinalgError;
use crate::padic::{format_rational, int, Rational};

/// Dense exact matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Ragged);
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor from small integer fractions `(num, den)`.
    pub fn from_fracs(rows: &[&[(i64, i64)]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&(n, d)| Rational::new(n.into(), d.into())).collect())
            .collect();
        Self::from_rows(rows).expect("rectangular literal")
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(rows).expect("rectangular literal")
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &QMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &QMatrix) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &QMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let cols: Vec<_> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(self.rows, &cols)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        Self::from_rows(rows).unwrap_or_else(|_| Self::zeros(0, self.cols))
    }

    /// Square submatrix on rows and columns `range`.
    pub fn block(&self, start: usize, len: usize) -> Self {
        let mut b = Self::zeros(len, len);
        for i in 0..len {
            for j in 0..len {
                b[(i, j)] = self[(start + i, start + j)].clone();
            }
        }
        b
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, mut e: u32) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination on the
    /// row-scaled integer matrix.
    pub fn det(&self) -> Result<Rational, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rational::one());
        }
        // Clear denominators row by row: det(M) = det(D M) / prod(d_i).
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let l = self.row(i).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            a.push(self.row(i).iter().map(|x| x.numer() * (&l / x.denom())).collect());
            scale *= l;
        }
        let mut sign = 1;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Ok(Rational::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        let d = &a[n - 1][n - 1] * BigInt::from(sign);
        Ok(Rational::new(d, scale))
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, pr);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let t = &f * &m[(r, j)];
                        m[(i, j)] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<QMatrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, 0));
        }
        let (r, pivots) = self.hcat(&Self::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(LinalgError::Singular);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    /// Basis of the right null space; empty iff the matrix is injective.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Solves `self * x = b` when the columns are independent. `None` if `b` is
    /// outside the column span.
    pub fn solve_columns(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        let aug = self.hcat(&Self::from_columns(self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Characteristic polynomial `det(xI - M)` by the division-free Berkowitz
    /// algorithm.
    pub fn charpoly(&self) -> Result<MonicPoly, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        // v holds the coefficients, leading first, of the charpoly of the
        // leading r×r principal submatrix.
        let mut v: Vec<Rational> = vec![Rational::one()];
        for r in 0..n {
            let a = &self[(r, r)];
            // R = row r left of the diagonal, C = column r above the diagonal, A = top-left r×r
            let row: Vec<Rational> = (0..r).map(|j| self[(r, j)].clone()).collect();
            let mut col: Vec<Rational> = (0..r).map(|i| self[(i, r)].clone()).collect();
            // Toeplitz column: 1, -a, -R C, -R A C, ...
            let mut t = Vec::with_capacity(r + 2);
            t.push(Rational::one());
            t.push(-a.clone());
            for _ in 0..r {
                let rc: Rational = row.iter().zip(&col).map(|(x, y)| x * y).sum();
                t.push(-rc);
                col = (0..r)
                    .map(|i| (0..r).map(|j| &self[(i, j)] * &col[j]).sum())
                    .collect();
            }
            let mut next = vec![Rational::zero(); r + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (k, vk) in v.iter().enumerate() {
                    if i >= k {
                        if let Some(tc) = t.get(i - k) {
                            *slot += tc * vk;
                        }
                    }
                }
            }
            v = next;
        }
        v.reverse();
        Ok(MonicPoly::from_coeffs(v).expect("Berkowitz output is monic"))
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ratio;
    use proptest::prelude::*;

    #[test]
    fn determinants() {
        assert_eq!(QMatrix::identity(3).det().unwrap(), int(1));
        assert_eq!(QMatrix::diag(&[ratio(1, 2), int(3)]).det().unwrap(), ratio(3, 2));
        assert_eq!(QMatrix::from_ints(&[&[0, 1], &[1, 0]]).det().unwrap(), int(-1));
        assert_eq!(QMatrix::from_ints(&[&[1, 2], &[2, 4]]).det().unwrap(), int(0));
        assert_eq!(QMatrix::identity(0).det().unwrap(), int(1));
        assert!(matches!(QMatrix::zeros(2, 3).det(), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn charpolys() {
        let (a, b) = (ratio(2, 3), int(-5));
        let f = QMatrix::diag(&[a.clone(), b.clone()]).charpoly().unwrap();
        assert_eq!(f.coeffs(), &[&a * &b, -(&a + &b), int(1)]);
        let f = QMatrix::from_ints(&[&[0, 7], &[1, 0]]).charpoly().unwrap();
        assert_eq!(f.coeffs(), &[int(-7), int(0), int(1)]);
        let f = QMatrix::identity(3).charpoly().unwrap();
        assert_eq!(f.coeffs(), &[int(-1), int(3), int(-3), int(1)]);
        assert_eq!(QMatrix::identity(0).charpoly().unwrap().degree(), 0);
    }

    #[test]
    fn inverses() {
        let inv = QMatrix::diag(&[int(2), ratio(1, 3)]).inverse().unwrap();
        assert_eq!(inv, QMatrix::diag(&[ratio(1, 2), int(3)]));
        assert_eq!(QMatrix::identity(4).inverse().unwrap(), QMatrix::identity(4));
        let u = QMatrix::from_ints(&[&[1, 1], &[0, 1]]).inverse().unwrap();
        assert_eq!(u, QMatrix::from_ints(&[&[1, -1], &[0, 1]]));
        assert_eq!(QMatrix::from_ints(&[&[1, 2], &[2, 4]]).inverse(), Err(LinalgError::Singular));
    }

    #[test]
    fn kernels() {
        assert_eq!(QMatrix::zeros(2, 2).kernel().len(), 2);
        assert!(QMatrix::identity(3).kernel().is_empty());
        let k = QMatrix::from_ints(&[&[1, 1], &[1, 1]]).kernel();
        assert_eq!(k, vec![vec![int(-1), int(1)]]);
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec((-9i64..10, 1i64..5), n * n).prop_map(move |v| {
            let rows = v.chunks(n).map(|r| r.iter().map(|&(a, b)| ratio(a, b)).collect()).collect();
            QMatrix::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn charpoly_constant_term_is_signed_det(m in (1usize..5).prop_flat_map(arb_matrix)) {
            let f = m.charpoly().unwrap();
            let n = m.rows();
            let sign = if n % 2 == 0 { int(1) } else { int(-1) };
            prop_assert_eq!(f.coeffs()[0].clone(), sign * m.det().unwrap());
            prop_assert_eq!(f.coeffs()[n - 1].clone(), -m.trace());
        }

        #[test]
        fn charpoly_similarity_invariant(m in arb_matrix(3), g in arb_matrix(3)) {
            if let Ok(gi) = g.inverse() {
                let conj = &(&g * &m) * &gi;
                prop_assert_eq!(conj.charpoly().unwrap(), m.charpoly().unwrap());
            }
        }

        #[test]
        fn kernel_vectors_are_null(m in (1usize..5).prop_flat_map(arb_matrix)) {
            let rank = m.rank();
            let k = m.kernel();
            prop_assert_eq!(k.len() + rank, m.cols());
            for v in k {
                prop_assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn inverse_round_trip(m in arb_matrix(3)) {
            if let Ok(inv) = m.inverse() {
                prop_assert_eq!(&m * &inv, QMatrix::identity(3));
            } else {
                prop_assert!(m.det().unwrap().is_zero());
            }
        }
    }
}
