//! Newton polygons and the p-adic valuations of eigenvalues.
//!
//! For `f = Σ a_i x^i` the lower convex hull of the points `(i, vp(a_i))`
//! determines the valuations of the roots of `f` in an algebraic closure of
//! `Q_p`: a hull segment of slope `s` and horizontal length `ℓ` accounts for
//! `ℓ` roots of valuation `-s`. For `x² - p` the hull is the single segment
//! `(0, 1) → (2, 0)` of slope `-1/2`, so both roots have valuation `1/2`.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{MonicPoly, Poly};
use crate::padic::{check_prime, format_rational, int, vp_int, PadicError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NewtonError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("polynomial has zero constant term")]
    SingularPolynomial,
}

/// One edge of the lower hull, from `(start, start_val)` to `(end, end_val)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub start_val: i64,
    pub end: usize,
    pub end_val: i64,
}

impl Segment {
    pub fn length(&self) -> usize {
        self.end - self.start
    }

    pub fn slope(&self) -> Rational {
        Rational::new(
            (self.end_val - self.start_val).into(),
            (self.length() as i64).into(),
        )
    }

    /// Valuation shared by the roots this segment accounts for.
    pub fn root_valuation(&self) -> Rational {
        -self.slope()
    }
}

/// Valuations of the roots of a polynomial, with multiplicities, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationMultiset {
    pub prime: u64,
    pub entries: Vec<(Rational, usize)>,
    pub segments: Vec<Segment>,
}

/// Counts of roots with negative, zero and positive valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SlopeSignature {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl ValuationMultiset {
    pub fn degree(&self) -> usize {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// `Σ v · mult`, the valuation of the product of all roots.
    pub fn total(&self) -> Rational {
        self.entries.iter().map(|(v, m)| v * int(*m as i64)).sum()
    }

    pub fn signature(&self) -> SlopeSignature {
        let mut s = SlopeSignature::default();
        for (v, m) in &self.entries {
            if v.is_negative() {
                s.negative += m;
            } else if v.is_zero() {
                s.zero += m;
            } else {
                s.positive += m;
            }
        }
        s
    }

    /// True when every root has the same valuation.
    pub fn is_pure(&self) -> bool {
        self.entries.len() <= 1
    }

    /// Smallest absolute value of a nonzero root valuation.
    pub fn min_nonzero_abs(&self) -> Option<Rational> {
        self.entries.iter().filter(|(v, _)| !v.is_zero()).map(|(v, _)| v.abs()).min()
    }

    pub fn negated(&self) -> ValuationMultiset {
        let mut entries: Vec<_> = self.entries.iter().map(|(v, m)| (-v.clone(), *m)).collect();
        entries.reverse();
        ValuationMultiset { prime: self.prime, entries, segments: Vec::new() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.prime,
            "segments": self.segments.iter().map(|s| serde_json::json!({
                "start": [s.start, s.start_val],
                "end": [s.end, s.end_val],
                "slope": format_rational(&s.slope()),
                "length": s.length(),
            })).collect::<Vec<_>>(),
            "valuations": self.entries.iter().map(|(v, m)| serde_json::json!({
                "valuation": format_rational(v),
                "multiplicity": m,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Lower convex hull of the points `(i, vp(a_i))`, with collinear points merged.
pub fn newton_polygon(f: &Poly, p: u64) -> Result<Vec<Segment>, NewtonError> {
    check_prime(p)?;
    if f.coeff(0).is_zero() {
        return Err(NewtonError::SingularPolynomial);
    }
    let points: Vec<(usize, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| vp_int(c, p).map(|v| (i, v)))
        .collect();
    let mut hull: Vec<(usize, i64)> = Vec::with_capacity(points.len());
    for pt in points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when slope(a, b) >= slope(a, pt), i.e. b is on or above chord a-pt
            let lhs = (b.1 - a.1) as i128 * (pt.0 - a.0) as i128;
            let rhs = (pt.1 - a.1) as i128 * (b.0 - a.0) as i128;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    Ok(hull
        .windows(2)
        .map(|w| Segment { start: w[0].0, start_val: w[0].1, end: w[1].0, end_val: w[1].1 })
        .collect())
}

pub fn eigenvalue_valuations(f: &MonicPoly, p: u64) -> Result<ValuationMultiset, NewtonError> {
    poly_root_valuations(f.as_poly(), p)
}

pub fn poly_root_valuations(f: &Poly, p: u64) -> Result<ValuationMultiset, NewtonError> {
    let segments = newton_polygon(f, p)?;
    // Slopes increase along the hull, so root valuations decrease.
    let entries = segments.iter().rev().map(|s| (s.root_valuation(), s.length())).collect();
    Ok(ValuationMultiset { prime: p, entries, segments })
}

/// Exponent `e` of the scale factor `p^e = Π_{|λ|_p ≥ 1} |λ|_p`, i.e.
/// `e = -Σ_{v ≤ 0} v · mult`.
pub fn scale_exponent(vals: &ValuationMultiset) -> u64 {
    let e: Rational = vals
        .entries
        .iter()
        .filter(|(v, _)| !v.is_positive())
        .map(|(v, m)| -v * int(*m as i64))
        .sum();
    assert!(e.is_integer(), "hull vertices are lattice points");
    e.to_integer().to_u64().expect("nonnegative exponent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{p_pow, ratio};
    use proptest::prelude::*;

    #[test]
    fn square_root_of_p() {
        let f = MonicPoly::from_ints(&[-2, 0, 1]).unwrap();
        let v = eigenvalue_valuations(&f, 2).unwrap();
        assert_eq!(v.entries, vec![(ratio(1, 2), 2)]);
        assert_eq!(v.segments.len(), 1);
        assert_eq!(scale_exponent(&v), 0);
    }

    #[test]
    fn two_segments() {
        // (x - 3)(x - 1/3) = x^2 - (10/3) x + 1
        let f = MonicPoly::from_coeffs(vec![int(1), ratio(-10, 3), int(1)]).unwrap();
        let v = eigenvalue_valuations(&f, 3).unwrap();
        assert_eq!(v.entries, vec![(int(-1), 1), (int(1), 1)]);
        assert_eq!(v.segments[0].end, 1);
        assert_eq!(v.segments[0].end_val, -1);
        assert_eq!(scale_exponent(&v), 1);
    }

    #[test]
    fn linear_unit_root() {
        for p in [2, 3, 5] {
            let v = eigenvalue_valuations(&MonicPoly::from_ints(&[-1, 1]).unwrap(), p).unwrap();
            assert_eq!(v.entries, vec![(int(0), 1)]);
            assert_eq!(scale_exponent(&v), 0);
        }
    }

    #[test]
    fn inverse_square_root() {
        // x^2 - 1/p: hull (0,-1) -> (2,0), valuations -1/2 twice
        for p in [2u64, 3, 5] {
            let f = MonicPoly::from_coeffs(vec![-p_pow(p, -1), int(0), int(1)]).unwrap();
            let v = eigenvalue_valuations(&f, p).unwrap();
            assert_eq!(v.entries, vec![(ratio(-1, 2), 2)]);
            assert_eq!(scale_exponent(&v), 1);
        }
    }

    #[test]
    fn collinear_points_merge() {
        // x^2 + 2x + 4 at p=2: points (0,2),(1,1),(2,0) are collinear
        let v = eigenvalue_valuations(&MonicPoly::from_ints(&[4, 2, 1]).unwrap(), 2).unwrap();
        assert_eq!(v.segments.len(), 1);
        assert_eq!(v.entries, vec![(int(1), 2)]);
    }

    #[test]
    fn errors() {
        let f = MonicPoly::from_ints(&[0, 1]).unwrap();
        assert_eq!(eigenvalue_valuations(&f, 2), Err(NewtonError::SingularPolynomial));
        let g = MonicPoly::from_ints(&[1, 1]).unwrap();
        assert!(matches!(eigenvalue_valuations(&g, 9), Err(NewtonError::Padic(_))));
    }

    fn arb_roots() -> impl Strategy<Value = (u64, Vec<Rational>)> {
        (0usize..3, proptest::collection::vec((-3i64..4, 1i64..20, 1i64..20, any::<bool>()), 1..6)).prop_map(
            |(pi, raw)| {
                let p = [2u64, 3, 5][pi];
                let roots = raw
                    .into_iter()
                    .map(|(e, a, b, neg)| {
                        let u = ratio(a * p as i64 + 1, b * p as i64 + 1);
                        let r = u * p_pow(p, e);
                        if neg { -r } else { r }
                    })
                    .collect();
                (p, roots)
            },
        )
    }

    proptest! {
        #[test]
        fn valuations_of_split_polynomials((p, roots) in arb_roots()) {
            let f = roots.iter().fold(Poly::one(), |acc, r| acc.mul(&Poly::linear(r.clone())));
            let f = MonicPoly::from_poly(f).unwrap();
            let vals = eigenvalue_valuations(&f, p).unwrap();
            prop_assert_eq!(vals.degree(), roots.len());

            let mut expected: Vec<i64> = roots.iter().map(|r| vp_int(r, p).unwrap()).collect();
            expected.sort();
            let mut got = Vec::new();
            for (v, m) in &vals.entries {
                for _ in 0..*m { got.push(v.to_integer().to_i64().unwrap()); }
            }
            prop_assert_eq!(got, expected);

            // total valuation is vp(f(0))
            prop_assert_eq!(vals.total(), int(vp_int(&f.constant_term(), p).unwrap()));

            // inversion duality
            let rec = eigenvalue_valuations(&f.reciprocal().unwrap(), p).unwrap();
            prop_assert_eq!(rec.entries.clone(), vals.negated().entries);
            let lhs = scale_exponent(&vals) as i64 - scale_exponent(&rec) as i64;
            prop_assert_eq!(lhs, -vp_int(&f.constant_term(), p).unwrap());
        }

        #[test]
        fn scale_exponent_integral_for_any_coefficients(
            c in proptest::collection::vec((-50i64..50, 1i64..50), 1..7), pi in 0usize..3
        ) {
            let p = [2u64, 3, 5][pi];
            let mut coeffs: Vec<Rational> = c.into_iter().map(|(a, b)| ratio(a, b)).collect();
            prop_assume!(!coeffs[0].is_zero());
            coeffs.push(int(1));
            let f = MonicPoly::from_coeffs(coeffs).unwrap();
            let v = eigenvalue_valuations(&f, p).unwrap();
            let _ = scale_exponent(&v);
            prop_assert_eq!(v.degree(), f.degree());
            prop_assert!(v.entries.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }
}
