use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use likit::embeddings::{linearly_equivalent, EmbeddingSource, ToralEmbedding};
use likit::linalg::{
    frac, lattice_index, linear_map_from_images, rank_of, rat, smith_normal_form, Lattice,
    Rational, RationalMatrix, RationalVector,
};
use likit::reps::{decompose, direct_sum, disentangle, freudenthal_weights, IrrepLabel};
use likit::roots::{Family, RootSystem};
use likit::trace::{canonicalize, TracePolynomial};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

fn rational_vector(dim: usize) -> impl Strategy<Value = RationalVector> {
    prop::collection::vec(small_rational(), dim).prop_map(RationalVector::new)
}

fn int_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, n), n)
}

fn to_vectors(rows: &[Vec<i64>]) -> Vec<RationalVector> {
    rows.iter().map(|r| RationalVector::from_ints(r)).collect()
}

fn small_system() -> impl Strategy<Value = (Family, usize)> {
    prop::sample::select(vec![
        (Family::A, 1),
        (Family::A, 2),
        (Family::A, 3),
        (Family::B, 2),
        (Family::B, 3),
        (Family::C, 3),
        (Family::G, 2),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dot_is_symmetric_and_bilinear(
        a in rational_vector(4),
        b in rational_vector(4),
        c in rational_vector(4),
        k in small_rational(),
    ) {
        prop_assert_eq!(a.dot(&b).unwrap(), b.dot(&a).unwrap());
        let lhs = (&a + &(&k * &b)).dot(&c).unwrap();
        prop_assert_eq!(lhs, a.dot(&c).unwrap() + k * b.dot(&c).unwrap());
    }

    #[test]
    fn lattice_index_is_multiplicative(a in int_matrix(3), b in int_matrix(3)) {
        let ma = RationalMatrix::from_rows(&to_vectors(&a)).unwrap();
        let mb = RationalMatrix::from_rows(&to_vectors(&b)).unwrap();
        prop_assume!(!ma.determinant().unwrap().is_zero());
        prop_assume!(!mb.determinant().unwrap().is_zero());
        // rows of B·A span a sublattice of the rows of A, which lie in Z³
        let ba = mb.mul(&ma).unwrap();
        let rows = |m: &RationalMatrix| (0..3).map(|i| m.row(i)).collect::<Vec<_>>();
        let z = Lattice::new((0..3).map(|i| RationalVector::unit(3, i)).collect()).unwrap();
        let la = Lattice::new(rows(&ma)).unwrap();
        let lba = Lattice::new(rows(&ba)).unwrap();
        let outer = lattice_index(&la, &z).unwrap().index;
        let inner = lattice_index(&lba, &la).unwrap().index;
        let total = lattice_index(&lba, &z).unwrap().index;
        prop_assert_eq!(total, outer * inner);
    }

    #[test]
    fn smith_divisors_multiply_to_determinant(a in int_matrix(4)) {
        let big: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let det = RationalMatrix::from_rows(&to_vectors(&a)).unwrap().determinant().unwrap();
        let d = smith_normal_form(&big);
        let product: BigInt = d.iter().product();
        if det.is_zero() {
            prop_assert!(d.len() < 4 || d.iter().any(|x| x == &BigInt::from(0)));
        } else {
            prop_assert_eq!(Rational::from_integer(product.abs()), det.abs());
            for w in d.windows(2) {
                prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
            }
        }
    }

    #[test]
    fn map_from_images_reproduces_images(a in int_matrix(3), imgs in prop::collection::vec(rational_vector(3), 3)) {
        let domain = to_vectors(&a);
        prop_assume!(rank_of(&domain) == 3);
        let m = linear_map_from_images(&domain, &imgs).unwrap();
        for (d, i) in domain.iter().zip(&imgs) {
            prop_assert_eq!(&m.apply(d).unwrap(), i);
        }
    }

    #[test]
    fn dominant_form_is_an_orbit_invariant(
        sys in small_system(),
        labels in prop::collection::vec(-3i64..=3, 3),
        word in prop::collection::vec(0usize..3, 0..8),
    ) {
        let rs = RootSystem::build(sys.0, sys.1).unwrap();
        let labels: Vec<Rational> = labels.iter().take(rs.rank()).map(|&x| rat(x)).collect();
        let v = rs.from_dynkin_labels(&labels).unwrap();
        let refl = rs.simple_reflections();
        let moved = word
            .iter()
            .filter(|&&i| i < rs.rank())
            .fold(v.clone(), |acc, &i| refl[i].apply(&acc));
        let (d1, w1) = rs.dominant_form(&v);
        let (d2, _) = rs.dominant_form(&moved);
        prop_assert!(rs.is_dominant(&d1));
        prop_assert_eq!(&d1, &d2);
        prop_assert_eq!(w1.apply(&v), d1);
    }

    #[test]
    fn decompose_inverts_direct_sum(
        sys in small_system(),
        hws in prop::collection::vec((prop::collection::vec(0i64..=1, 3), 1u64..=2), 1..=3),
    ) {
        let rs = Arc::new(RootSystem::build(sys.0, sys.1).unwrap());
        let mut expected: BTreeMap<Vec<Rational>, u64> = BTreeMap::new();
        let mut parts = Vec::new();
        for (labels, mult) in &hws {
            let label = IrrepLabel::from_dynkin_labels(rs.clone(), &labels[..rs.rank()]).unwrap();
            let ws = freudenthal_weights(&label, 10_000).unwrap();
            for _ in 0..*mult {
                parts.push(ws.clone());
            }
            *expected.entry(label.dynkin_labels()).or_insert(0) += mult;
        }
        let sum = direct_sum(&parts).unwrap();
        let got: BTreeMap<Vec<Rational>, u64> = decompose(&sum, &rs)
            .unwrap()
            .into_iter()
            .map(|(l, m)| (l.dynkin_labels(), m))
            .collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn disentangle_recovers_both_parts(
        n in 2u64..=6,
        first in prop::collection::btree_map(-6i64..=6, 1u64..6, 0..6),
        second in prop::collection::btree_map(-6i64..=6, 1u64..5, 0..6),
    ) {
        let first: BTreeMap<Rational, u64> = first.into_iter().map(|(v, m)| (rat(v), m % n)).filter(|(_, m)| *m > 0).collect();
        let second: BTreeMap<Rational, u64> = second.into_iter().map(|(v, m)| (rat(v), m)).collect();
        let mut total = first.clone();
        for (v, m) in &second {
            *total.entry(v.clone()).or_insert(0) += n * m;
        }
        let (a, b) = disentangle(&total, n).unwrap();
        prop_assert_eq!(a, first);
        prop_assert_eq!(b, second);
    }

    #[test]
    fn linear_equivalence_survives_weyl_moves(
        word in prop::collection::vec(0usize..4, 0..10),
        images in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 2),
    ) {
        let d4 = Arc::new(RootSystem::build(Family::D, 4).unwrap());
        let images: Vec<RationalVector> = images.iter().map(|v| RationalVector::from_ints(v)).collect();
        prop_assume!(rank_of(&images) == 2);
        let e = ToralEmbedding::new(EmbeddingSource::Torus(2), d4.clone(), images).unwrap();
        let refl = d4.simple_reflections();
        let g = word.iter().fold(likit::group::OrthogonalMap::identity(4), |acc, &i| refl[i].compose(&acc));
        let moved = e.transformed(&g).unwrap();
        let probe = likit::embeddings::d_tautological(4);
        prop_assert!(linearly_equivalent(&e, &e, &probe).unwrap());
        prop_assert!(linearly_equivalent(&e, &moved, &probe).unwrap());
        prop_assert!(linearly_equivalent(&moved, &e, &probe).unwrap());
    }

    #[test]
    fn canonical_form_is_rotation_invariant(letters in prop::collection::vec(1usize..=3, 1..7), r in 0usize..7) {
        let r = r % letters.len();
        let rotated: Vec<usize> = letters[r..].iter().chain(&letters[..r]).copied().collect();
        let c = canonicalize(&letters).unwrap();
        prop_assert_eq!(&canonicalize(&rotated).unwrap(), &c);
        prop_assert_eq!(canonicalize(c.letters()).unwrap(), c.clone());
    }

    #[test]
    fn evaluation_is_conjugation_invariant(
        words in prop::collection::vec(prop::collection::vec(1usize..=2, 1..5), 1..4),
        entries in prop::collection::vec(-3i64..=3, 8),
        conj in prop::collection::vec(-2i64..=2, 4),
    ) {
        let p = words.iter().fold(TracePolynomial::zero(), |acc, w| {
            &acc + &TracePolynomial::from_letters(w).unwrap()
        });
        let x1 = RationalMatrix::from_ints(2, 2, &entries[..4]);
        let x2 = RationalMatrix::from_ints(2, 2, &entries[4..]);
        let g = RationalMatrix::from_ints(2, 2, &conj);
        prop_assume!(!g.determinant().unwrap().is_zero());
        let gi = g.inverse().unwrap();
        let conjugate = |x: &RationalMatrix| g.mul(x).unwrap().mul(&gi).unwrap();
        let before = p.evaluate(&[x1.clone(), x2.clone()]).unwrap();
        let after = p.evaluate(&[conjugate(&x1), conjugate(&x2)]).unwrap();
        prop_assert_eq!(before, after);
    }
}
