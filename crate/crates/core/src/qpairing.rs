//! The Hopf pairing `B` on the free algebra generated by `E_1, ..., E_n`,
//! its Gram blocks, their kernels and the quantum Serre elements.
//!
//! Values are kept in the normalized form `P = (q - q^{-1})^{|m|} B`, which is a
//! Laurent polynomial in `v = q^{1/D}` for words of multidegree `m`. The
//! recursion follows from `B(E_i w, y) = B(E_i (x) w, Delta(y))` with
//! `Delta(E_j) = E_j (x) q^{gamma_j} + 1 (x) E_j`: the letter `y_t = i` goes to the
//! first slot, the group-like `q^{gamma_i}` is moved to the right of the later
//! letters and then absorbed by the remaining pairing, leaving
//!
//! `P(E_i w, y) = sum_{t : y_t = i} q^{-sum_{u<t} (alpha_i, alpha_{y_u})} P(w, y \ t)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::cartan::{int, CartanDatum};
use crate::error::{Error, Result};
use crate::freealg::{enumerate_words, FreeElement, Multidegree, Word};
use crate::linalg::{fraction_free_kernel, Matrix};
use crate::scalars::{Denominator, Laurent, Poly, QScalar};

/// Which side of the deleted letter contributes to the q-exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExponentConvention {
    /// `q^{-sum_{u<t}(alpha_i, alpha_{y_u})}`: the pairing determined by the coproduct.
    #[default]
    Coproduct,
    /// `q^{+sum_{u>t}(alpha_i, alpha_{y_u})}`. Differs from the coproduct pairing by a unit
    /// `q^{c(m)}` on each graded block, so it has the same kernels but is not a Hopf pairing.
    Mirrored,
}

/// Evaluates `B` on words, sharing one memo table across all blocks.
pub struct PairingEngine {
    cd: Arc<CartanDatum>,
    den: Denominator,
    /// v-exponent of `q^{(alpha_i, alpha_j)}`.
    root_exps: Vec<Vec<i64>>,
    convention: ExponentConvention,
    cap: Option<usize>,
    memo: DashMap<(Word, Word), Laurent>,
}

impl PairingEngine {
    /// Engine with the smallest denominator covering the root pairings.
    pub fn new(cd: Arc<CartanDatum>) -> Result<Self> {
        let den = cd.session_denominator(&[])?;
        PairingEngine::with_denominator(cd, den)
    }

    pub fn with_denominator(cd: Arc<CartanDatum>, den: Denominator) -> Result<Self> {
        let n = cd.rank();
        let mut root_exps = vec![vec![0; n]; n];
        for (i, row) in root_exps.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = den.exponent(cd.root_pairing(i, j))?;
            }
        }
        // q_i = q^{d_i} appears in Serre coefficients
        for i in 0..n {
            den.exponent(cd.d(i))?;
        }
        Ok(PairingEngine {
            cd,
            den,
            root_exps,
            convention: ExponentConvention::Coproduct,
            cap: None,
            memo: DashMap::new(),
        })
    }

    pub fn with_convention(mut self, convention: ExponentConvention) -> Self {
        self.convention = convention;
        self.memo.clear();
        self
    }

    /// Refuse blocks of total degree above `cap`.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn cartan(&self) -> &CartanDatum {
        &self.cd
    }

    pub fn cartan_arc(&self) -> Arc<CartanDatum> {
        self.cd.clone()
    }

    pub fn denominator(&self) -> Denominator {
        self.den
    }

    pub fn convention(&self) -> ExponentConvention {
        self.convention
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    /// v-exponent of `q^{(alpha_i, alpha_j)}`.
    pub fn root_exponent(&self, i: usize, j: usize) -> i64 {
        self.root_exps[i][j]
    }

    /// `(q - q^{-1})^{|m|} B(x, y)` as a Laurent polynomial in v.
    pub fn normalized(&self, x: &Word, y: &Word) -> Laurent {
        let n = self.cd.rank();
        if x.multidegree(n) != y.multidegree(n) {
            return Laurent::zero();
        }
        self.normalized_same_degree(x, y)
    }

    fn normalized_same_degree(&self, x: &Word, y: &Word) -> Laurent {
        let Some((i, rest)) = x.split_first() else {
            return Laurent::one();
        };
        let key = (x.clone(), y.clone());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let letters = y.letters();
        let mut acc = Laurent::zero();
        for t in 0..letters.len() {
            if letters[t] != i {
                continue;
            }
            let e: i64 = match self.convention {
                ExponentConvention::Coproduct => {
                    -letters[..t].iter().map(|&u| self.root_exps[i][u]).sum::<i64>()
                }
                ExponentConvention::Mirrored => {
                    letters[t + 1..].iter().map(|&u| self.root_exps[i][u]).sum::<i64>()
                }
            };
            let sub = self.normalized_same_degree(&rest, &y.remove(t));
            if !sub.is_zero() {
                acc = acc.add(&sub.shifted(e));
            }
        }
        self.memo.insert(key, acc.clone());
        acc
    }

    /// `(q - q^{-1})^{-k}`.
    pub fn normalization(&self, k: usize) -> QScalar {
        let base = self.den.q_minus_q_inv();
        let mut p = Laurent::one();
        for _ in 0..k {
            p = p.mul(&base);
        }
        QScalar::from_laurents(&Laurent::one(), &p).expect("q - q^-1 is nonzero")
    }

    /// `B(x, y)`.
    pub fn pair_words(&self, x: &Word, y: &Word) -> QScalar {
        let p = self.normalized(x, y);
        if p.is_zero() {
            return QScalar::zero();
        }
        p.to_qscalar().mul(&self.normalization(x.len()))
    }

    /// Gram block of `B` on the words of multidegree `m`.
    pub fn gram_block(&self, m: &Multidegree) -> Result<GramBlock> {
        self.check_len(m)?;
        let basis = enumerate_words(m, self.cap)?;
        let normalized: Vec<Vec<Laurent>> = basis
            .par_iter()
            .map(|x| {
                basis
                    .iter()
                    .map(|y| self.normalized_same_degree(x, y))
                    .collect()
            })
            .collect();
        Ok(GramBlock {
            degree: m.clone(),
            basis,
            normalized,
            scale: self.normalization(m.total()),
        })
    }

    fn check_len(&self, m: &Multidegree) -> Result<()> {
        if m.len() != self.cd.rank() {
            return Err(Error::Dimension(format!(
                "multidegree {} has {} entries, datum has rank {}",
                m,
                m.len(),
                self.cd.rank()
            )));
        }
        Ok(())
    }

    /// Null space of the Gram block in degree `m`, by fraction-free elimination over Z[v].
    pub fn kernel_block(&self, m: &Multidegree) -> Result<KernelBasis> {
        let block = self.gram_block(m)?;
        Ok(block.kernel())
    }

    /// Quotient dimensions `dim U_+[m]` for `1 <= |m| <= max_total`.
    pub fn quotient_dims(&self, max_total: usize) -> Result<BTreeMap<Multidegree, usize>> {
        if let Some(cap) = self.cap {
            if max_total > cap {
                return Err(Error::DegreeCap {
                    degree: max_total,
                    cap,
                });
            }
        }
        let degrees = Multidegree::up_to(self.cd.rank(), max_total);
        let dims: Vec<Result<(Multidegree, usize)>> = degrees
            .par_iter()
            .map(|m| {
                let block = self.gram_block(m)?;
                Ok((m.clone(), block.rank()))
            })
            .collect();
        dims.into_iter().collect()
    }

    /// `sum_w c_w P(w, y)` for a homogeneous element `x`.
    pub fn pair_element_word(&self, x: &FreeElement<QScalar>, y: &Word) -> QScalar {
        let mut acc = QScalar::zero();
        for (w, c) in x.terms() {
            let p = self.normalized(w, y);
            if !p.is_zero() {
                acc = acc.add(&c.mul(&p.to_qscalar()));
            }
        }
        acc
    }

    /// Whether `x` pairs to zero with every word of multidegree `m`; returns the offending words.
    pub fn nonvanishing_words(&self, x: &FreeElement<QScalar>, m: &Multidegree) -> Result<Vec<Word>> {
        let words = enumerate_words(m, self.cap)?;
        Ok(words
            .into_par_iter()
            .filter(|y| !self.pair_element_word(x, y).is_zero())
            .collect())
    }

    /// `sum_{k=0}^{N} (-1)^k / ([k]_{q_i}! [N-k]_{q_i}!) E_i^{N-k} E_j E_i^k` with `N = 1 - a_ij`.
    pub fn quantum_serre_element(&self, i: usize, j: usize) -> Result<FreeElement<QScalar>> {
        let big_n = serre_exponent(&self.cd, i, j)?;
        let di = self.cd.d(i);
        let mut out = FreeElement::zero();
        for k in 0..=big_n {
            let denom = self
                .den
                .q_factorial(k, di)?
                .mul(&self.den.q_factorial(big_n - k, di)?);
            let mut c = denom.inv()?;
            if k % 2 == 1 {
                c = c.neg();
            }
            let mut letters = vec![i; (big_n - k) as usize];
            letters.push(j);
            letters.extend(std::iter::repeat_n(i, k as usize));
            out.add_term(Word::new(letters), c);
        }
        Ok(out)
    }

    pub fn verify_serre_in_kernel(&self, i: usize, j: usize) -> Result<SerreReport> {
        let element = self.quantum_serre_element(i, j)?;
        let n = self.cd.rank();
        let degree = element
            .homogeneous_degree(n)
            .ok_or_else(|| Error::Internal("Serre element is not homogeneous".into()))?;
        let failures = self.nonvanishing_words(&element, &degree)?;
        Ok(SerreReport {
            i,
            j,
            degree,
            element,
            in_kernel: failures.is_empty(),
            failures,
        })
    }

    /// Serre membership for every ordered pair `i != j`.
    pub fn verify_all_serre(&self) -> Result<Vec<SerreReport>> {
        let n = self.cd.rank();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(self.verify_serre_in_kernel(i, j)?);
                }
            }
        }
        Ok(out)
    }

    /// Left and right multiples of every kernel vector by every generator pair to zero
    /// with all words of the next degree.
    pub fn check_ideal_property(&self, kernel: &KernelBasis) -> Result<bool> {
        let n = self.cd.rank();
        for r in &kernel.vectors {
            for i in 0..n {
                let next = kernel.degree.increment(i);
                let g = FreeElement::generator(i);
                let left = g.mul(r);
                let right = r.mul(&g);
                if !self.nonvanishing_words(&left, &next)?.is_empty()
                    || !self.nonvanishing_words(&right, &next)?.is_empty()
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `1 - a_ij` for a pair satisfying the generalized Cartan conditions.
pub fn serre_exponent(cd: &CartanDatum, i: usize, j: usize) -> Result<u32> {
    let n = cd.rank();
    if i >= n || j >= n || i == j {
        return Err(Error::NotApplicable(format!(
            "Serre element needs distinct indices in 1..={}, got ({}, {})",
            n,
            i + 1,
            j + 1
        )));
    }
    let aii = cd.a(i, i);
    let aij = cd.a(i, j);
    if *aii != int(2) || !aij.is_integer() || *aij > int(0) {
        return Err(Error::NotApplicable(format!(
            "quantum Serre element needs a_ii = 2 and a_ij a nonpositive integer, got a_{}{} = {}, a_{}{} = {}",
            i + 1,
            i + 1,
            aii,
            i + 1,
            j + 1,
            aij
        )));
    }
    let neg: BigInt = -aij.to_integer();
    let neg: u32 = neg
        .try_into()
        .map_err(|_| Error::NotApplicable("a_ij too large".into()))?;
    Ok(1 + neg)
}

/// The pairing restricted to words of a single multidegree.
#[derive(Clone, Debug)]
pub struct GramBlock {
    pub degree: Multidegree,
    pub basis: Vec<Word>,
    /// `(q - q^{-1})^{|m|} B(w_a, w_b)`.
    pub normalized: Vec<Vec<Laurent>>,
    scale: QScalar,
}

impl GramBlock {
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    /// Exact block `M[a][b] = B(w_a, w_b)`.
    pub fn matrix(&self) -> Matrix<QScalar> {
        let k = self.basis.len();
        Matrix::from_fn(k, k, |a, b| {
            let p = &self.normalized[a][b];
            if p.is_zero() {
                QScalar::zero()
            } else {
                p.to_qscalar().mul(&self.scale)
            }
        })
    }

    pub fn is_symmetric(&self) -> bool {
        let k = self.basis.len();
        (0..k).all(|a| (0..a).all(|b| self.normalized[a][b] == self.normalized[b][a]))
    }

    /// Entries shifted by a common power of v into Z[v].
    pub fn polynomial_rows(&self) -> Vec<Vec<Poly>> {
        let lowest = self
            .normalized
            .iter()
            .flatten()
            .filter_map(|p| p.exponent_range())
            .map(|(lo, _)| lo)
            .min()
            .unwrap_or(0);
        self.normalized
            .iter()
            .map(|row| row.iter().map(|p| p.to_poly_from(lowest)).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        fraction_free_kernel(&self.polynomial_rows()).rank
    }

    pub fn kernel(&self) -> KernelBasis {
        let k = fraction_free_kernel(&self.polynomial_rows());
        let vectors = k
            .vectors
            .iter()
            .map(|v| {
                FreeElement::from_terms(
                    self.basis
                        .iter()
                        .zip(v)
                        .map(|(w, p)| (w.clone(), Laurent::new(0, p.clone()).to_qscalar())),
                )
            })
            .collect();
        KernelBasis {
            degree: self.degree.clone(),
            basis: self.basis.clone(),
            gram_rank: k.rank,
            quotient_dim: self.basis.len() - k.vectors.len(),
            vectors,
        }
    }
}

/// Basis of `Ker(B)` in one multidegree.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    pub degree: Multidegree,
    pub basis: Vec<Word>,
    pub vectors: Vec<FreeElement<QScalar>>,
    pub gram_rank: usize,
    pub quotient_dim: usize,
}

impl KernelBasis {
    pub fn kernel_rank(&self) -> usize {
        self.vectors.len()
    }
}

#[derive(Clone, Debug)]
pub struct SerreReport {
    pub i: usize,
    pub j: usize,
    pub degree: Multidegree,
    pub element: FreeElement<QScalar>,
    pub in_kernel: bool,
    /// Words of the same degree with nonzero pairing against the element.
    pub failures: Vec<Word>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::int_matrix;

    fn engine(rows: &[&[i64]]) -> PairingEngine {
        let cd = CartanDatum::from_matrix(&int_matrix(rows)).unwrap();
        PairingEngine::new(Arc::new(cd)).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn degree_one_values() {
        let e = engine(&[&[2, -1], &[-1, 2]]);
        let d = e.denominator();
        let expect = QScalar::from_laurents(&Laurent::one(), &d.q_minus_q_inv()).unwrap();
        assert_eq!(e.pair_words(&w("1"), &w("1")), expect);
        assert!(e.pair_words(&w("1"), &w("2")).is_zero());
        assert!(e.pair_words(&w("12"), &w("11")).is_zero());
        assert!(e.pair_words(&Word::empty(), &Word::empty()).is_one());
    }

    #[test]
    fn sl2_square() {
        let e = engine(&[&[2]]);
        // (q - q^-1)^2 B(E1E1, E1E1) = 1 + q^-2 = q^-1 [2]_q
        let p = e.normalized(&w("11"), &w("11"));
        let d = e.denominator();
        let two = d.q_integer(2, &int(1)).unwrap();
        let expect = d.q_power(&int(-1)).unwrap().mul(&two);
        assert_eq!(p.to_qscalar(), expect);
    }

    #[test]
    fn sl3_block_21() {
        let e = engine(&[&[2, -1], &[-1, 2]]);
        let b = e.gram_block(&Multidegree::new(vec![2, 1])).unwrap();
        assert_eq!(b.size(), 3);
        assert!(b.is_symmetric());
        assert!(b.matrix().is_symmetric());
        assert_eq!(b.rank(), 2);
        let k = b.kernel();
        assert_eq!(k.kernel_rank(), 1);
        assert_eq!(k.quotient_dim, 2);
        for y in &b.basis {
            assert!(e.pair_element_word(&k.vectors[0], y).is_zero());
        }
    }

    #[test]
    fn both_conventions_share_kernels() {
        let a: &[&[i64]] = &[&[2, -1], &[-1, 2]];
        let c = engine(a);
        let m = engine(a).with_convention(ExponentConvention::Mirrored);
        for deg in [vec![2, 1], vec![2, 2], vec![1, 2]] {
            let deg = Multidegree::new(deg);
            let bc = c.gram_block(&deg).unwrap();
            let bm = m.gram_block(&deg).unwrap();
            assert!(bc.is_symmetric() && bm.is_symmetric());
            assert_eq!(bc.rank(), bm.rank());
        }
        assert!(c.verify_serre_in_kernel(0, 1).unwrap().in_kernel);
        assert!(m.verify_serre_in_kernel(0, 1).unwrap().in_kernel);
    }

    #[test]
    fn serre_elements() {
        let e = engine(&[&[2, 0], &[0, 2]]);
        let s = e.quantum_serre_element(0, 1).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.coefficient(&w("12")).is_one());
        assert_eq!(s.coefficient(&w("21")), QScalar::from_int(-1));
        assert!(e.verify_serre_in_kernel(0, 1).unwrap().in_kernel);

        let aff = engine(&[&[2, -2], &[-2, 2]]);
        let s = aff.quantum_serre_element(0, 1).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.homogeneous_degree(2), Some(Multidegree::new(vec![3, 1])));
        assert!(aff.verify_serre_in_kernel(0, 1).unwrap().in_kernel);
        assert!(aff.verify_serre_in_kernel(1, 0).unwrap().in_kernel);
    }

    #[test]
    fn serre_rejects_non_gcm() {
        let cd = CartanDatum::from_matrix(&Matrix::from_rows(vec![
            vec![int(2), crate::cartan::rat(-1, 2)],
            vec![crate::cartan::rat(-1, 2), int(2)],
        ]))
        .unwrap();
        let e = PairingEngine::new(Arc::new(cd)).unwrap();
        assert!(matches!(e.quantum_serre_element(0, 1), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn quotient_dims_sl3() {
        let e = engine(&[&[2, -1], &[-1, 2]]);
        let dims = e.quotient_dims(4).unwrap();
        assert_eq!(dims[&Multidegree::new(vec![1, 1])], 2);
        assert_eq!(dims[&Multidegree::new(vec![2, 1])], 2);
        assert_eq!(dims[&Multidegree::new(vec![2, 2])], 3);
        assert_eq!(dims[&Multidegree::new(vec![3, 0])], 1);
    }

    #[test]
    fn zero_degree_block() {
        let e = engine(&[&[2]]);
        let b = e.gram_block(&Multidegree::zero(1)).unwrap();
        assert_eq!(b.size(), 1);
        assert!(b.matrix().get(0, 0).is_one());
    }

    #[test]
    fn cap_is_enforced() {
        let e = engine(&[&[2]]).with_cap(3);
        assert!(matches!(
            e.gram_block(&Multidegree::new(vec![4])),
            Err(Error::DegreeCap { degree: 4, cap: 3 })
        ));
    }

    #[test]
    fn kernel_is_an_ideal() {
        let e = engine(&[&[2, -1], &[-1, 2]]);
        let k = e.kernel_block(&Multidegree::new(vec![2, 1])).unwrap();
        assert!(e.check_ideal_property(&k).unwrap());
    }
}
