use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdscale::contraction::{adapted_lattice, contraction_split, contraction_split_auto, diag_p_powers, Piece, DEFAULT_PRECISION};
use tdscale::lattice::Lattice;
use tdscale::linalg::QMatrix;
use tdscale::newton::{eigenvalue_valuations, scale_exponent};
use tdscale::sample;
use tdscale::tidy::{check_t1, tidying};

fn setup(seed: u64) -> (ChaCha8Rng, u64) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let p = sample::PRIMES[r.gen_range(0..3)];
    (r, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn index_is_multiplicative(seed in any::<u64>(), n in 1usize..=4) {
        let (mut r, p) = setup(seed);
        let l1 = sample::lattice(&mut r, p, n, -2, 2);
        let m2 = sample::automorphism(&mut r, p, n, 0, 2);
        let l2 = Lattice::canonicalize(&(l1.basis() * &m2), p).unwrap();
        let m3 = sample::automorphism(&mut r, p, n, 0, 2);
        let l3 = Lattice::canonicalize(&(l2.basis() * &m3), p).unwrap();
        prop_assert!(l1.contains(&l2) && l2.contains(&l3));
        prop_assert_eq!(l1.index(&l3).unwrap(), l1.index(&l2).unwrap() + l2.index(&l3).unwrap());
        prop_assert_eq!(l1.index(&l1).unwrap(), 0);
    }

    #[test]
    fn canonical_form_ignores_generators(seed in any::<u64>(), n in 1usize..=4, extra in 0usize..3) {
        let (mut r, p) = setup(seed);
        let l = sample::lattice(&mut r, p, n, -3, 3);
        // redundant generators from integral combinations
        let mut gens = (l.basis() * &sample::unimodular(&mut r, n, 6)).columns();
        for _ in 0..extra {
            let c: Vec<_> = (0..n).map(|_| sample::with_valuation(&mut r, p, 0, 2)).collect();
            gens.push(l.basis().mul_vec(&c));
        }
        let again = Lattice::from_columns(p, n, &gens).unwrap();
        prop_assert_eq!(again, l);
    }

    #[test]
    fn intersection_methods_agree(seed in any::<u64>(), n in 1usize..=3) {
        let (mut r, p) = setup(seed);
        let a = sample::lattice(&mut r, p, n, -2, 2);
        let b = sample::lattice(&mut r, p, n, -2, 2);
        let i = a.intersect(&b).unwrap();
        prop_assert_eq!(&i, &a.intersect_via_duals(&b).unwrap());
        prop_assert_eq!(&i, &a.intersect_via_kernel(&b).unwrap());
        prop_assert!(a.contains(&i) && b.contains(&i));
        // [a+b : a] = [b : a∩b]
        let s = a.sum(&b).unwrap();
        prop_assert_eq!(s.index(&a).unwrap(), b.index(&i).unwrap());
    }

    #[test]
    fn split_dimensions_and_invariance(seed in any::<u64>(), n in 1usize..=4) {
        let (mut r, p) = setup(seed);
        let a = sample::automorphism(&mut r, p, n, -3, 3);
        let split = contraction_split_auto(&a, p, DEFAULT_PRECISION).unwrap();
        let sig = eigenvalue_valuations(&a.charpoly().unwrap(), p).unwrap().signature();
        let dims: Vec<usize> = [Piece::Expanding, Piece::Bounded, Piece::Contracting]
            .iter()
            .map(|&piece| split.piece(piece).cols())
            .collect();
        prop_assert_eq!(dims, vec![sig.negative, sig.zero, sig.positive]);
        let m = split.effective();
        for piece in [Piece::Expanding, Piece::Bounded, Piece::Contracting] {
            let basis = split.piece(piece);
            if basis.cols() == 0 {
                continue;
            }
            let moved = m * &basis;
            prop_assert_eq!(basis.hcat(&moved).rank(), basis.cols());
        }
        if split.is_exact() {
            prop_assert_eq!(m, &a);
        }
    }

    #[test]
    fn adapted_lattice_contract(seed in any::<u64>(), n in 1usize..=4) {
        let (mut r, p) = setup(seed);
        let (d, _) = sample::diagonal(&mut r, p, n, -3, 3);
        let c = sample::conjugator(&mut r, n);
        let a = &(&c * &d) * &c.inverse().unwrap();
        let split = contraction_split(&a, p, DEFAULT_PRECISION).unwrap();
        let adapted = adapted_lattice(&split).unwrap();
        let (lp, l0, lm) = (adapted.piece(Piece::Expanding), adapted.piece(Piece::Bounded), adapted.piece(Piece::Contracting));
        let inv = a.inverse().unwrap();
        prop_assert_eq!(&l0.apply(&a).unwrap(), l0);
        prop_assert!(lp.contains(&lp.apply(&inv).unwrap()));
        prop_assert!(lm.contains(&lm.apply(&a).unwrap()));
        prop_assert!(adapted.lattice.is_full_rank());
        prop_assert!(check_t1(&adapted.lattice, &a, &split).unwrap());
    }

    #[test]
    fn tidy_scale_independent_of_start(seed in any::<u64>(), n in 1usize..=3) {
        let (mut r, p) = setup(seed);
        let a = sample::automorphism(&mut r, p, n, -2, 2);
        let split = contraction_split_auto(&a, p, DEFAULT_PRECISION).unwrap();
        let want = scale_exponent(&eigenvalue_valuations(&a.charpoly().unwrap(), p).unwrap());
        for _ in 0..3 {
            let start = sample::lattice(&mut r, p, n, -2, 2);
            let cert = tidying(&start, &a, &split).unwrap();
            prop_assert_eq!(cert.scale_exponent, want);
            prop_assert!(check_t1(&cert.lattice, split.effective(), &split).unwrap());
            prop_assert!(start.contains(&cert.lattice));
        }
    }

    #[test]
    fn diagonal_scale_inverse_pair(seed in any::<u64>(), n in 1usize..=5) {
        let (mut r, p) = setup(seed);
        let exps: Vec<i64> = (0..n).map(|_| r.gen_range(-4..=4)).collect();
        let a = diag_p_powers(p, &exps);
        let inv: QMatrix = a.inverse().unwrap();
        let s = |m: &QMatrix| scale_exponent(&eigenvalue_valuations(&m.charpoly().unwrap(), p).unwrap()) as i64;
        // s(α) / s(α⁻¹) = Δ(α)
        prop_assert_eq!(s(&a) - s(&inv), -exps.iter().sum::<i64>());
    }
}
