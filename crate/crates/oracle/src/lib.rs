//! Slow reference evaluation of the Hopf pairing straight from its axioms.
//!
//! `B(x_1 ... x_k, z) = B(x_1 (x) ... (x) x_k, Delta^{(k)}(z))`, with the k-fold
//! coproduct built by iterating `Delta(E_j) = E_j (x) K_{gamma_j} + 1 (x) E_j`,
//! `Delta(K_a) = K_a (x) K_a`. Each tensor slot is then normal ordered with
//! `K_a E_j = q^{alpha_j(a)} E_j K_a` and paired using
//! `B(E_i, E_j K_c) = delta_ij q^{-(c, gamma_i)} / (q - q^{-1})`.
//! Scalars are kept as maps from rational q-exponents to integer coefficients so
//! that nothing is shared with the production scalar type.

use std::collections::BTreeMap;

use gkm::cartan::{rat, CartanDatum, Rational};
use gkm::freealg::{enumerate_words, Multidegree, Word};
use gkm::linalg::Matrix;
use gkm::qpairing::PairingEngine;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Laurent polynomial in `q` with rational exponents.
pub type QExp = BTreeMap<Rational, BigInt>;

#[derive(Clone, Debug, PartialEq)]
enum Letter {
    E(usize),
    K(Vec<Rational>),
}

type Slot = Vec<Letter>;

#[derive(Clone, Debug)]
struct Term {
    exp: Rational,
    slots: Vec<Slot>,
}

fn add_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub struct HopfOracle {
    pub n: usize,
    alpha: Matrix<Rational>,
    form: Matrix<Rational>,
    gammas: Vec<Vec<Rational>>,
}

impl HopfOracle {
    pub fn new(cd: &CartanDatum) -> Self {
        HopfOracle {
            n: cd.rank(),
            alpha: cd.alpha().clone(),
            form: cd.form().clone(),
            gammas: (0..cd.rank()).map(|i| cd.gamma(i)).collect(),
        }
    }

    fn alpha_of(&self, j: usize, a: &[Rational]) -> Rational {
        self.alpha.row(j).iter().zip(a).map(|(x, y)| x * y).sum()
    }

    fn inner(&self, a: &[Rational], b: &[Rational]) -> Rational {
        let gb = self.form.mul_vec(b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    }

    /// Delta applied to slot `s` of every term: splits that slot into two.
    fn split_slot(&self, terms: Vec<Term>, s: usize) -> Vec<Term> {
        let mut out = Vec::new();
        for t in terms {
            // expand the product of coproducts of the letters in slot s
            let mut partial: Vec<(Slot, Slot)> = vec![(Vec::new(), Vec::new())];
            for l in &t.slots[s] {
                let mut next = Vec::new();
                for (a, b) in &partial {
                    match l {
                        Letter::K(v) => {
                            let mut a2 = a.clone();
                            let mut b2 = b.clone();
                            a2.push(Letter::K(v.clone()));
                            b2.push(Letter::K(v.clone()));
                            next.push((a2, b2));
                        }
                        Letter::E(j) => {
                            let mut a2 = a.clone();
                            let mut b2 = b.clone();
                            a2.push(Letter::E(*j));
                            b2.push(Letter::K(self.gammas[*j].clone()));
                            next.push((a2, b2));
                            let mut b3 = b.clone();
                            b3.push(Letter::E(*j));
                            next.push((a.clone(), b3));
                        }
                    }
                }
                partial = next;
            }
            for (a, b) in partial {
                let mut slots = t.slots[..s].to_vec();
                slots.push(a);
                slots.push(b);
                slots.extend_from_slice(&t.slots[s + 1..]);
                out.push(Term {
                    exp: t.exp.clone(),
                    slots,
                });
            }
        }
        out
    }

    /// Move every K to the right end of the slot, merging them; returns the exponent picked up.
    fn normal_order(&self, slot: &Slot) -> (Rational, Vec<usize>, Vec<Rational>) {
        let mut exp = Rational::zero();
        let mut es = Vec::new();
        let mut k_total = vec![Rational::zero(); self.alpha.cols()];
        // scanning left to right, the K's seen so far must pass every later E
        for l in slot {
            match l {
                Letter::K(v) => k_total = add_vec(&k_total, v),
                Letter::E(j) => {
                    exp += self.alpha_of(*j, &k_total);
                    es.push(*j);
                }
            }
        }
        (exp, es, k_total)
    }

    /// `(q - q^{-1})^{|x|} B(x, z)`.
    pub fn normalized(&self, x: &Word, z: &Word) -> QExp {
        let k = x.len();
        let mut out = QExp::new();
        if k != z.len() {
            return out;
        }
        if k == 0 {
            out.insert(Rational::zero(), BigInt::one());
            return out;
        }
        let mut terms = vec![Term {
            exp: Rational::zero(),
            slots: vec![z.letters().iter().map(|&j| Letter::E(j)).collect()],
        }];
        // repeatedly split the last slot until there are k of them
        for s in 0..k - 1 {
            terms = self.split_slot(terms, s);
        }
        for t in terms {
            let mut exp = t.exp.clone();
            let mut ok = true;
            for (r, slot) in t.slots.iter().enumerate() {
                let (e, es, c) = self.normal_order(slot);
                if es.len() != 1 || es[0] != x.letters()[r] {
                    ok = false;
                    break;
                }
                exp += e;
                exp -= self.inner(&c, &self.gammas[es[0]]);
            }
            if ok {
                *out.entry(exp).or_insert_with(BigInt::zero) += BigInt::one();
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

/// The engine's normalized pairing in the oracle's representation.
pub fn engine_as_qexp(e: &PairingEngine, x: &Word, z: &Word) -> QExp {
    let p = e.normalized(x, z);
    let d = e.denominator().value() as i64;
    let mut out = QExp::new();
    for (k, c) in p.poly().coeffs().iter().enumerate() {
        if !c.is_zero() {
            out.insert(rat(p.shift() + k as i64, d), c.clone());
        }
    }
    out
}

/// First pair of words up to `max_total` where engine and oracle differ.
pub fn first_disagreement(engine: &PairingEngine, max_total: usize) -> Option<(Word, Word)> {
    let oracle = HopfOracle::new(engine.cartan());
    for m in Multidegree::up_to(oracle.n, max_total) {
        let words = enumerate_words(&m, None).ok()?;
        for x in &words {
            for z in &words {
                if engine_as_qexp(engine, x, z) != oracle.normalized(x, z) {
                    return Some((x.clone(), z.clone()));
                }
            }
        }
    }
    None
}

/// Number of word pairs in degree `m` where engine and oracle differ.
pub fn disagreements(engine: &PairingEngine, m: &Multidegree) -> usize {
    let oracle = HopfOracle::new(engine.cartan());
    let words = enumerate_words(m, None).unwrap_or_default();
    words
        .iter()
        .flat_map(|x| words.iter().map(move |z| (x, z)))
        .filter(|(x, z)| engine_as_qexp(engine, x, z) != oracle.normalized(x, z))
        .count()
}
