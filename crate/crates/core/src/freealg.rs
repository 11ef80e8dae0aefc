//! The free associative algebra on generators `1..=n`, graded by multidegree.
//!
//! Letters are stored 0-based and displayed 1-based, so the word `E_1 E_1 E_2`
//! prints as `112` (with dots between letters once `n > 9`).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Field;

/// A vector of nonnegative generator counts `(m_1, ..., m_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Multidegree(Vec<u32>);

impl Multidegree {
    pub fn new(counts: Vec<u32>) -> Self {
        Multidegree(counts)
    }

    pub fn zero(n: usize) -> Self {
        Multidegree(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = vec![0; n];
        m[i] = 1;
        Multidegree(m)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &u32> {
        self.0.iter()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &Multidegree) -> Multidegree {
        Multidegree(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// `self - o` when it stays nonnegative.
    pub fn checked_sub(&self, o: &Multidegree) -> Option<Multidegree> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Multidegree)
    }

    /// `self - 1_i` when `m_i > 0`.
    pub fn decrement(&self, i: usize) -> Option<Multidegree> {
        if self.0[i] == 0 {
            return None;
        }
        let mut m = self.0.clone();
        m[i] -= 1;
        Some(Multidegree(m))
    }

    pub fn increment(&self, i: usize) -> Multidegree {
        let mut m = self.0.clone();
        m[i] += 1;
        Multidegree(m)
    }

    pub fn scaled(&self, k: u32) -> Multidegree {
        Multidegree(self.0.iter().map(|x| x * k).collect())
    }

    /// Componentwise `<=`.
    pub fn le(&self, o: &Multidegree) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    /// Number of words with this multidegree.
    pub fn multinomial(&self) -> u128 {
        let mut acc: u128 = 1;
        let mut placed: u128 = 0;
        for &m in &self.0 {
            for k in 1..=m as u128 {
                placed += 1;
                acc = acc * placed / k;
            }
        }
        acc
    }

    /// Indices with a nonzero count.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0).collect()
    }

    /// All multidegrees with `1 <= total <= max_total`, by total degree then lexicographically.
    pub fn up_to(n: usize, max_total: usize) -> Vec<Multidegree> {
        let mut out = Vec::new();
        for t in 1..=max_total {
            out.extend(Multidegree::of_total(n, t));
        }
        out
    }

    /// All multidegrees of the given total in lexicographic (descending first entry) order.
    pub fn of_total(n: usize, total: usize) -> Vec<Multidegree> {
        fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Multidegree>) {
            if prefix.len() + 1 == n {
                prefix.push(left);
                out.push(Multidegree(prefix.clone()));
                prefix.pop();
                return;
            }
            for k in (0..=left).rev() {
                prefix.push(k);
                rec(n, left - k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, total as u32, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, m) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", m)?;
        }
        write!(f, ")")
    }
}

/// A word in the generators, letters 0-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Parse 1-based digits such as `"112"`.
    pub fn parse(s: &str) -> Option<Self> {
        if s.contains('.') {
            s.split('.')
                .map(|t| t.parse::<usize>().ok().and_then(|x| x.checked_sub(1)))
                .collect::<Option<Vec<_>>>()
                .map(Word)
        } else {
            s.chars()
                .map(|c| c.to_digit(10).and_then(|x| (x as usize).checked_sub(1)))
                .collect::<Option<Vec<_>>>()
                .map(Word)
        }
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multidegree(&self, n: usize) -> Multidegree {
        word_weight(self, n)
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    pub fn prepend(&self, letter: usize) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn append(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    /// The word with position `t` deleted.
    pub fn remove(&self, t: usize) -> Word {
        let mut v = self.0.clone();
        v.remove(t);
        Word(v)
    }

    /// Split off the first letter.
    pub fn split_first(&self) -> Option<(usize, Word)> {
        self.0.split_first().map(|(a, rest)| (*a, Word(rest.to_vec())))
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let dotted = self.0.iter().any(|&x| x >= 9);
        for (k, &x) in self.0.iter().enumerate() {
            if dotted && k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", x + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

/// Letter counts of a word over `n` generators.
pub fn word_weight(w: &Word, n: usize) -> Multidegree {
    let mut m = vec![0u32; n];
    for &x in &w.0 {
        m[x] += 1;
    }
    Multidegree(m)
}

/// All words of multidegree `m` in lexicographic order. Fails when the total degree exceeds `cap`.
pub fn enumerate_words(m: &Multidegree, cap: Option<usize>) -> Result<Vec<Word>> {
    let total = m.total();
    if let Some(cap) = cap {
        if total > cap {
            return Err(Error::DegreeCap { degree: total, cap });
        }
    }
    fn rec(left: &mut Vec<u32>, prefix: &mut Vec<usize>, remaining: usize, out: &mut Vec<Word>) {
        if remaining == 0 {
            out.push(Word(prefix.clone()));
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                left[i] -= 1;
                prefix.push(i);
                rec(left, prefix, remaining - 1, out);
                prefix.pop();
                left[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut m.0.clone(), &mut Vec::with_capacity(total), total, &mut out);
    Ok(out)
}

/// A finite linear combination of words.
#[derive(Clone, PartialEq, Debug)]
pub struct FreeElement<F> {
    terms: BTreeMap<Word, F>,
}

impl<F: Field> Default for FreeElement<F> {
    fn default() -> Self {
        FreeElement::zero()
    }
}

impl<F: Field> FreeElement<F> {
    pub fn zero() -> Self {
        FreeElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        FreeElement::word(Word::empty())
    }

    pub fn word(w: Word) -> Self {
        FreeElement::monomial(w, F::one())
    }

    pub fn generator(i: usize) -> Self {
        FreeElement::word(Word(vec![i]))
    }

    pub fn monomial(w: Word, c: F) -> Self {
        let mut e = FreeElement::zero();
        e.add_term(w, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, F)>) -> Self {
        let mut e = FreeElement::zero();
        for (w, c) in terms {
            e.add_term(w, c);
        }
        e
    }

    pub fn add_term(&mut self, w: Word, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &F)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> F {
        self.terms.get(w).cloned().unwrap_or_else(F::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&F::one().neg()))
    }

    pub fn scale(&self, c: &F) -> Self {
        FreeElement::from_terms(self.terms.iter().map(|(w, x)| (w.clone(), x.mul(c))))
    }

    pub fn mul(&self, o: &Self) -> Self {
        free_mul(self, o)
    }

    /// The multidegree shared by all terms, if the element is nonzero and homogeneous.
    pub fn homogeneous_degree(&self, n: usize) -> Option<Multidegree> {
        let mut it = self.terms.keys().map(|w| word_weight(w, n));
        let first = it.next()?;
        it.all(|m| m == first).then_some(first)
    }

    /// Coefficients along an ordered list of words.
    pub fn coordinates(&self, basis: &[Word]) -> Vec<F> {
        basis.iter().map(|w| self.coefficient(w)).collect()
    }
}

/// Product in the free algebra (concatenation, extended bilinearly).
pub fn free_mul<F: Field>(x: &FreeElement<F>, y: &FreeElement<F>) -> FreeElement<F> {
    let mut out = FreeElement::zero();
    for (a, ca) in &x.terms {
        for (b, cb) in &y.terms {
            out.add_term(a.concat(b), ca.mul(cb));
        }
    }
    out
}

impl<F: Field> fmt::Display for FreeElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:?})*E[{}]", c, w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn enumeration_counts() {
        let m = Multidegree::new(vec![2, 1]);
        let ws = enumerate_words(&m, None).unwrap();
        let shown: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["112", "121", "211"]);
        assert_eq!(m.multinomial(), 3);
        assert_eq!(Multidegree::new(vec![2, 2, 1]).multinomial(), 30);
        assert_eq!(enumerate_words(&Multidegree::new(vec![2, 2, 1]), None).unwrap().len(), 30);
    }

    #[test]
    fn degree_cap() {
        let m = Multidegree::new(vec![3, 2]);
        assert_eq!(
            enumerate_words(&m, Some(4)),
            Err(Error::DegreeCap { degree: 5, cap: 4 })
        );
    }

    #[test]
    fn word_roundtrip() {
        let w = Word::parse("1121").unwrap();
        assert_eq!(w.letters(), &[0, 0, 1, 0]);
        assert_eq!(w.to_string(), "1121");
        assert_eq!(word_weight(&w, 2), Multidegree::new(vec![3, 1]));
        let long = Word::new(vec![0, 10]);
        assert_eq!(long.to_string(), "1.11");
        assert_eq!(Word::parse("1.11"), Some(long));
    }

    #[test]
    fn product_is_concatenation() {
        let x = FreeElement::<Q>::generator(0).add(&FreeElement::generator(1));
        let y = FreeElement::<Q>::generator(0);
        let p = free_mul(&x, &y);
        assert_eq!(p.coefficient(&Word::parse("11").unwrap()), Q::from_integer(BigInt::from(1)));
        assert_eq!(p.coefficient(&Word::parse("21").unwrap()), Q::from_integer(BigInt::from(1)));
        assert_eq!(p.len(), 2);
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn multidegrees_by_total() {
        let ms = Multidegree::up_to(2, 2);
        let shown: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["(1,0)", "(0,1)", "(2,0)", "(1,1)", "(0,2)"]);
    }
}
