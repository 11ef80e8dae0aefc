use std::sync::Arc;

use gkm::cartan::{int, rat, symmetrize, CartanDatum, Rational};
use gkm::freealg::{free_mul, FreeElement, Multidegree, Word};
use gkm::linalg::Matrix;
use gkm::qpairing::PairingEngine;
use gkm::scalars::QScalar;
use num_complex::Complex64;
use proptest::prelude::*;

fn laurent() -> impl Strategy<Value = QScalar> {
    prop::collection::vec((-3i64..4, -4i64..5), 1..4).prop_map(|terms| {
        terms
            .into_iter()
            .fold(QScalar::zero(), |acc, (c, k)| acc.add(&QScalar::from_int(c).mul(&QScalar::v_power(k))))
    })
}

fn qscalar() -> impl Strategy<Value = QScalar> {
    (laurent(), laurent()).prop_map(|(n, d)| if d.is_zero() { n } else { n.div(&d).unwrap() })
}

fn nonzero() -> impl Strategy<Value = QScalar> {
    qscalar().prop_filter("nonzero", |x| !x.is_zero())
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-8 * (1.0 + a.norm().max(b.norm()))
}

/// A symmetrizable matrix `a_ij = b_ij / d_i` with symmetric `b`, plus the `d` used.
fn symmetrizable(n: usize) -> impl Strategy<Value = (Matrix<Rational>, Vec<i64>)> {
    (prop::collection::vec(1i64..4, n), prop::collection::vec(-3i64..=0, n * n)).prop_map(move |(d, off)| {
        let a = Matrix::from_fn(n, n, |i, j| {
            let b = if i == j { 2 * d[i] } else { off[i.min(j) * n + i.max(j)] };
            rat(b, d[i])
        });
        (a, d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qscalar_ring_axioms(a in qscalar(), b in qscalar(), c in qscalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&QScalar::one()), a.clone());
    }

    #[test]
    fn qscalar_inverse_and_bar(a in nonzero(), b in qscalar()) {
        prop_assert!(a.mul(&a.inv().unwrap()).is_one());
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert_eq!(a.mul(&b).bar(), a.bar().mul(&b.bar()));
        prop_assert_eq!(b.div(&a).unwrap().mul(&a), b);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in qscalar(), b in qscalar(), phase in 0.05f64..3.0) {
        let v = Complex64::from_polar(1.1, phase);
        let ea = a.eval_at_v(v).unwrap();
        let eb = b.eval_at_v(v).unwrap();
        prop_assert!(close(a.add(&b).eval_at_v(v).unwrap(), ea + eb));
        prop_assert!(close(a.mul(&b).eval_at_v(v).unwrap(), ea * eb));
        if let (Some(x), Some(y), Some(z)) = (a.at_one(), b.at_one(), a.mul(&b).at_one()) {
            prop_assert_eq!(z, x * y);
        }
    }

    #[test]
    fn free_product_is_associative(
        xs in prop::collection::vec((prop::collection::vec(0usize..3, 0..3), -3i64..4), 1..4),
        ys in prop::collection::vec((prop::collection::vec(0usize..3, 0..3), -3i64..4), 1..4),
        zs in prop::collection::vec((prop::collection::vec(0usize..3, 0..3), -3i64..4), 1..4),
    ) {
        let build = |ts: Vec<(Vec<usize>, i64)>| -> FreeElement<Rational> {
            FreeElement::from_terms(ts.into_iter().map(|(w, c)| (Word::new(w), int(c))))
        };
        let (x, y, z) = (build(xs), build(ys), build(zs));
        prop_assert_eq!(free_mul(&free_mul(&x, &y), &z), free_mul(&x, &free_mul(&y, &z)));
        prop_assert_eq!(free_mul(&x, &FreeElement::one()), x.clone());
    }

    #[test]
    fn symmetrizers_symmetrize((a, d) in (1usize..5).prop_flat_map(symmetrizable)) {
        let n = a.rows();
        let found = symmetrize(&a).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(&found[i] * a.get(i, j), &found[j] * a.get(j, i));
            }
        }
        // proportional to the generating d on each component, so the ratio is constant on edges
        for i in 0..n {
            for j in 0..n {
                if *a.get(i, j) != int(0) {
                    prop_assert_eq!(&found[i] / int(d[i]), &found[j] / int(d[j]));
                }
            }
        }
        prop_assert_eq!(&found[0], &int(1));
    }

    #[test]
    fn one_sided_zero_is_rejected(n in 2usize..5, i in 0usize..5, j in 0usize..5, x in 1i64..4) {
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let a = Matrix::from_fn(n, n, |r, c| {
            if r == c { int(2) } else if (r, c) == (i, j) { int(-x) } else { int(0) }
        });
        prop_assert!(symmetrize(&a).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gram_blocks_are_symmetric(
        (a, _) in symmetrizable(2),
        m1 in 0u32..3,
        m2 in 0u32..3,
    ) {
        let cd = Arc::new(CartanDatum::from_matrix(&a).unwrap());
        let engine = PairingEngine::new(cd).unwrap();
        let block = engine.gram_block(&Multidegree::new(vec![m1, m2])).unwrap();
        prop_assert!(block.is_symmetric());
        let kernel = block.kernel();
        prop_assert_eq!(kernel.gram_rank + kernel.kernel_rank(), block.size());
    }
}
