use std::fmt;

use num_traits::{One, Zero};

use super::matrix::QMatrix;
use super::LinalgError;
use crate::padic::{format_rational, int, Rational};

/// Dense univariate polynomial over the rationals, constant term first, with
/// no trailing zero coefficients. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| int(x)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Rational::one()] }
    }

    /// `x - a`
    pub fn linear(a: Rational) -> Self {
        Poly { coeffs: vec![-a, Rational::one()] }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn add(&self, o: &Poly) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.lead().recip();
        let mut r = self.coeffs.clone();
        let Some(n) = self.degree() else { return (Poly::zero(), Poly::zero()) };
        if n < dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = &r[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Evaluates at a square matrix by Horner's rule.
    pub fn eval_matrix(&self, m: &QMatrix) -> QMatrix {
        let n = m.rows();
        let mut acc = QMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = (&acc * m).add(&QMatrix::identity(n).scale(c));
        }
        acc
    }

    /// `x^deg * f(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Poly::new(c)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("({})x", format_rational(c)),
                _ => format!("({})x^{}", format_rational(c), i),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Monic polynomial over the rationals, constant term first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonicPoly(Poly);

impl MonicPoly {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Result<Self, LinalgError> {
        let p = Poly::new(coeffs);
        if p.is_zero() || !p.lead().is_one() {
            return Err(LinalgError::NotMonic);
        }
        Ok(MonicPoly(p))
    }

    pub fn from_poly(p: Poly) -> Result<Self, LinalgError> {
        Self::from_coeffs(p.coeffs)
    }

    pub fn from_ints(c: &[i64]) -> Result<Self, LinalgError> {
        Self::from_poly(Poly::from_ints(c))
    }

    pub fn coeffs(&self) -> &[Rational] {
        self.0.coeffs()
    }

    pub fn degree(&self) -> usize {
        self.0.degree().unwrap()
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    pub fn constant_term(&self) -> Rational {
        self.0.coeff(0)
    }

    /// Monic reciprocal `x^n f(1/x) / f(0)`; its roots are the inverses of the
    /// roots of `self`. Requires `f(0) != 0`.
    pub fn reciprocal(&self) -> Result<MonicPoly, LinalgError> {
        if self.constant_term().is_zero() {
            return Err(LinalgError::Singular);
        }
        Ok(MonicPoly(self.0.reversed().make_monic()))
    }
}

impl fmt::Debug for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ratio;

    #[test]
    fn division_and_gcd() {
        let f = Poly::from_ints(&[-1, 0, 1]);
        let g = Poly::from_ints(&[-1, 1]);
        let (q, r) = f.div_rem(&g);
        assert_eq!(q, Poly::from_ints(&[1, 1]));
        assert!(r.is_zero());
        let h = Poly::from_ints(&[1, 2, 1]);
        assert_eq!(f.gcd(&h), Poly::from_ints(&[1, 1]));
        assert_eq!(Poly::from_ints(&[3]).gcd(&f), Poly::one());
    }

    #[test]
    fn matrix_evaluation() {
        let m = QMatrix::from_ints(&[&[0, 2], &[1, 0]]);
        let f = m.charpoly().unwrap();
        assert!(f.as_poly().eval_matrix(&m).is_zero());
    }

    #[test]
    fn reciprocal_polynomial() {
        // (x - 2)(x - 1/3) -> (x - 1/2)(x - 3)
        let f = MonicPoly::from_poly(Poly::linear(int(2)).mul(&Poly::linear(ratio(1, 3)))).unwrap();
        let g = Poly::linear(ratio(1, 2)).mul(&Poly::linear(int(3)));
        assert_eq!(f.reciprocal().unwrap().as_poly(), &g);
        assert!(MonicPoly::from_ints(&[0, 1]).unwrap().reciprocal().is_err());
        assert!(MonicPoly::from_ints(&[1, 2]).is_err());
    }
}
