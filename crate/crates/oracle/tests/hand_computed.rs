use gkm::cartan::{int, CartanDatum};
use gkm::freealg::Word;
use gkm_oracle::{HopfOracle, QExp};
use num_bigint::BigInt;
use num_traits::One;

fn qexp(terms: &[(gkm::cartan::Rational, i64)]) -> QExp {
    terms.iter().map(|(e, c)| (e.clone(), BigInt::from(*c))).collect()
}

fn word(s: &str) -> Word {
    Word::parse(s).unwrap()
}

#[test]
fn single_generator_is_normalized_to_one() {
    let cd = CartanDatum::from_rows(&[&[2, -1], &[-1, 2]]).unwrap();
    let o = HopfOracle::new(&cd);
    assert_eq!(o.normalized(&word("1"), &word("1")), qexp(&[(int(0), 1)]));
    assert!(o.normalized(&word("1"), &word("2")).is_empty());
    assert!(o.normalized(&word("1"), &word("11")).is_empty());
}

#[test]
fn empty_words_pair_to_one() {
    let cd = CartanDatum::from_rows(&[&[2]]).unwrap();
    let o = HopfOracle::new(&cd);
    let mut one = QExp::new();
    one.insert(int(0), BigInt::one());
    assert_eq!(o.normalized(&Word::empty(), &Word::empty()), one);
}

/// `B(E^2, E^2) (q - q^{-1})^2 = 1 + q^{-2}` for sl2.
#[test]
fn sl2_square() {
    let cd = CartanDatum::from_rows(&[&[2]]).unwrap();
    let o = HopfOracle::new(&cd);
    assert_eq!(o.normalized(&word("11"), &word("11")), qexp(&[(int(-2), 1), (int(0), 1)]));
}

/// With `(alpha_1, alpha_2) = -1` the swapped order picks up a single `q^{1}`.
#[test]
fn sl3_mixed_words() {
    let cd = CartanDatum::from_rows(&[&[2, -1], &[-1, 2]]).unwrap();
    let o = HopfOracle::new(&cd);
    assert_eq!(o.normalized(&word("12"), &word("12")), qexp(&[(int(0), 1)]));
    assert_eq!(o.normalized(&word("12"), &word("21")), qexp(&[(int(1), 1)]));
}
