//! The classical Kac-Moody side: graded pieces of `n_+ = n~_+ / (I cap n~_+)`, the relation
//! ideal of `U(n_+)`, root multiplicities, classical highest-weight modules and the Casimir
//! two-tensor on tensor products of them.
//!
//! `I` is the kernel of the invariant form on the free Lie algebra `g~(A)`. Its graded pieces
//! are read off from the block of `(l_e(w), l_f(u))` over right-normed brackets
//! `l_e(w) = [e_{w_1}, [e_{w_2}, ..., e_{w_k}]]` and `l_f(u)` likewise, evaluated with
//! `([x, y], z) = -(y, [x, z])` and `(e_i, f_j) = delta_ij / d_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::cartan::{int, CartanDatum, Weight};
use crate::error::{Error, Result};
use crate::freealg::{enumerate_words, FreeElement, Multidegree, Word};
use crate::linalg::Matrix;
use crate::qmodules::{build_module, ClassicalFlavor, ContravariantForm, ModuleKind, Quotient, WeightModule};
use crate::qpairing::PairingEngine;

type Q = BigRational;

/// Truncated power series in `t^beta`, keyed by multidegree.
pub type Series = BTreeMap<Multidegree, BigInt>;

/// Graded classical data, memoized per multidegree.
pub struct ClassicalSide {
    cd: Arc<CartanDatum>,
    cap: Option<usize>,
    lie_memo: DashMap<(Word, Word), Q>,
    relations: DashMap<Multidegree, Arc<Vec<Vec<Q>>>>,
}

/// The invariant-form block between right-normed `e`- and `f`-brackets of one multidegree.
#[derive(Clone, Debug)]
pub struct LieBlock {
    pub degree: Multidegree,
    pub words: Vec<Word>,
    /// `matrix[a][b] = (l_e(words[a]), l_f(words[b]))`.
    pub matrix: Matrix<Q>,
}

impl LieBlock {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

/// One row of the classical graded table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalGradedEntry {
    pub words: usize,
    /// `dim` of the degree-`m` part of the two-sided ideal generated by `I cap n~_+`.
    pub relation_dim: usize,
    /// `dim U(n_+)[m]`.
    pub quotient_dim: usize,
    /// `dim n_+[m]`.
    pub multiplicity: usize,
}

impl ClassicalSide {
    pub fn new(cd: Arc<CartanDatum>) -> Self {
        ClassicalSide {
            cd,
            cap: None,
            lie_memo: DashMap::new(),
            relations: DashMap::new(),
        }
    }

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

    /// `(l_e(w), l_f(u))`.
    pub fn lie_pair(&self, w: &Word, u: &Word) -> Q {
        let n = self.cd.rank();
        if w.is_empty() || w.multidegree(n) != u.multidegree(n) {
            return Q::zero();
        }
        self.lie_pair_same_degree(w, u)
    }

    fn lie_pair_same_degree(&self, w: &Word, u: &Word) -> Q {
        let (i, rest) = w.split_first().expect("nonempty word");
        if rest.is_empty() {
            return Q::from_integer(BigInt::from(1)) / self.cd.d(i);
        }
        let key = (w.clone(), u.clone());
        if let Some(v) = self.lie_memo.get(&key) {
            return v.clone();
        }
        // (l_e(i.rest), Y) = ([e_i, l_e(rest)], Y) = -(l_e(rest), [e_i, Y])
        let mut acc = Q::zero();
        for (t, c) in self.raise_f_bracket(i, u) {
            acc -= c * self.lie_pair_same_degree(&rest, &u.remove(t));
        }
        self.lie_memo.insert(key, acc.clone());
        acc
    }

    /// `[e_i, l_f(u)] = sum_t c_t l_f(u \ t)` for `|u| >= 2`.
    fn raise_f_bracket(&self, i: usize, u: &Word) -> Vec<(usize, Q)> {
        let letters = u.letters();
        let k = letters.len();
        let mut out = Vec::new();
        for t in 0..k {
            if letters[t] != i {
                continue;
            }
            let c = if t + 1 < k {
                // [h_i, l_f(u_{t+1..})] = -(sum_{s>t} a_{i u_s}) l_f(u_{t+1..})
                -letters[t + 1..].iter().map(|&s| self.cd.a(i, s).clone()).sum::<Q>()
            } else {
                // innermost [f_{u_{k-2}}, h_i] = a_{i u_{k-2}} f_{u_{k-2}}
                self.cd.a(i, letters[k - 2]).clone()
            };
            if !c.is_zero() {
                out.push((t, c));
            }
        }
        out
    }

    fn check_cap(&self, m: &Multidegree) -> Result<()> {
        match self.cap {
            Some(cap) if m.total() > cap => Err(Error::DegreeCap {
                degree: m.total(),
                cap,
            }),
            _ => Ok(()),
        }
    }

    pub fn lie_block(&self, m: &Multidegree) -> Result<LieBlock> {
        self.check_cap(m)?;
        let words = enumerate_words(m, self.cap)?;
        let rows: Vec<Vec<Q>> = words
            .par_iter()
            .map(|w| words.iter().map(|u| self.lie_pair(w, u)).collect())
            .collect();
        Ok(LieBlock {
            degree: m.clone(),
            words,
            matrix: Matrix::from_rows(rows),
        })
    }

    /// `dim n_+[m]`, the rank of the invariant-form block.
    pub fn multiplicity(&self, m: &Multidegree) -> Result<usize> {
        if m.is_zero() {
            return Ok(0);
        }
        Ok(self.lie_block(m)?.rank())
    }

    /// A basis of `I cap n~_+` in degree `m`, as elements of the free associative algebra.
    pub fn ideal_part(&self, m: &Multidegree) -> Result<Vec<FreeElement<Q>>> {
        if m.is_zero() {
            return Ok(Vec::new());
        }
        let block = self.lie_block(m)?;
        let words = &block.words;
        let expansions: Vec<Vec<Q>> = words.iter().map(|w| bracket_expansion(w).coordinates(words)).collect();
        // brackets may expand to zero or coincide, so reduce the images to a basis
        let images: Vec<Vec<Q>> = block
            .matrix
            .left_nullspace()
            .into_iter()
            .map(|c| {
                let mut x = vec![Q::zero(); words.len()];
                for (cw, e) in c.iter().zip(&expansions) {
                    if cw.is_zero() {
                        continue;
                    }
                    for (xk, ek) in x.iter_mut().zip(e) {
                        *xk += cw * ek;
                    }
                }
                x
            })
            .collect();
        if images.is_empty() {
            return Ok(Vec::new());
        }
        let (rref, pivots) = Matrix::from_rows(images).rref();
        Ok((0..pivots.len())
            .map(|k| FreeElement::from_terms(words.iter().cloned().zip(rref.row(k).iter().cloned())))
            .collect())
    }

    /// A basis of the degree-`m` part of the two-sided ideal generated by `I cap n~_+`,
    /// as coordinate rows over `enumerate_words(m)`.
    pub fn relations(&self, m: &Multidegree) -> Result<Arc<Vec<Vec<Q>>>> {
        if let Some(r) = self.relations.get(m) {
            return Ok(r.clone());
        }
        self.check_cap(m)?;
        let n = self.cd.rank();
        let words = enumerate_words(m, None)?;
        let index: std::collections::HashMap<&Word, usize> = words.iter().zip(0..).collect();
        let mut spanning: Vec<Vec<Q>> = Vec::new();
        if m.total() >= 2 {
            for x in self.ideal_part(m)? {
                spanning.push(x.coordinates(&words));
            }
            for i in 0..n {
                let Some(p) = m.decrement(i) else { continue };
                let lower = self.relations(&p)?;
                let lower_words = enumerate_words(&p, None)?;
                for row in lower.iter() {
                    let mut left = vec![Q::zero(); words.len()];
                    let mut right = vec![Q::zero(); words.len()];
                    for (w, c) in lower_words.iter().zip(row) {
                        if c.is_zero() {
                            continue;
                        }
                        left[index[&w.prepend(i)]] += c;
                        right[index[&w.append(i)]] += c;
                    }
                    spanning.push(left);
                    spanning.push(right);
                }
            }
        }
        let basis = if spanning.is_empty() {
            Vec::new()
        } else {
            let mat = Matrix::from_rows(spanning);
            let (rref, pivots) = mat.rref();
            (0..pivots.len()).map(|k| rref.row(k).to_vec()).collect()
        };
        let basis = Arc::new(basis);
        self.relations.insert(m.clone(), basis.clone());
        Ok(basis)
    }

    pub fn graded_entry(&self, m: &Multidegree) -> Result<ClassicalGradedEntry> {
        let words = usize::try_from(m.multinomial())
            .map_err(|_| Error::Internal("multinomial overflow".into()))?;
        let relation_dim = self.relations(m)?.len();
        Ok(ClassicalGradedEntry {
            words,
            relation_dim,
            quotient_dim: words - relation_dim,
            multiplicity: self.multiplicity(m)?,
        })
    }

    /// The graded table for `1 <= |m| <= max_total`.
    pub fn graded_data(&self, max_total: usize) -> Result<BTreeMap<Multidegree, ClassicalGradedEntry>> {
        let n = self.cd.rank();
        let mut out = BTreeMap::new();
        for total in 1..=max_total {
            let layer = Multidegree::of_total(n, total);
            let entries: Vec<Result<(Multidegree, ClassicalGradedEntry)>> = layer
                .par_iter()
                .map(|m| Ok((m.clone(), self.graded_entry(m)?)))
                .collect();
            for e in entries {
                let (m, entry) = e?;
                out.insert(m, entry);
            }
        }
        Ok(out)
    }

    /// `dim U(n_+)[m]` for `1 <= |m| <= max_total`.
    pub fn quotient_dims(&self, max_total: usize) -> Result<BTreeMap<Multidegree, usize>> {
        Ok(self
            .graded_data(max_total)?
            .into_iter()
            .map(|(m, e)| (m, e.quotient_dim))
            .collect())
    }

    /// Root multiplicities by inverting the Poincare-Birkhoff-Witt product
    /// `prod_beta (1 - t^beta)^{-mult(beta)}` against the graded dimensions of `U(n_+)`.
    pub fn root_multiplicities(&self, max_total: usize) -> Result<BTreeMap<Multidegree, usize>> {
        let dims = self.quotient_dims(max_total)?;
        pbw_invert(self.cd.rank(), &dims, max_total)
    }

    /// Root multiplicities as ranks of the invariant-form blocks.
    pub fn lie_multiplicities(&self, max_total: usize) -> Result<BTreeMap<Multidegree, usize>> {
        let degrees = Multidegree::up_to(self.cd.rank(), max_total);
        let ranks: Vec<Result<(Multidegree, usize)>> = degrees
            .par_iter()
            .map(|m| Ok((m.clone(), self.multiplicity(m)?)))
            .collect();
        ranks.into_iter().collect()
    }
}

/// Expansion of the right-normed bracket `[x_{w_1}, [x_{w_2}, ...]]` into words.
pub fn bracket_expansion(w: &Word) -> FreeElement<Q> {
    let Some((i, rest)) = w.split_first() else {
        return FreeElement::one();
    };
    if rest.is_empty() {
        return FreeElement::generator(i);
    }
    let inner = bracket_expansion(&rest);
    let g = FreeElement::generator(i);
    g.mul(&inner).sub(&inner.mul(&g))
}

/// `prod_beta (1 - t^beta)^{-mult(beta)}` truncated at `max_total`.
pub fn pbw_series(n: usize, mults: &BTreeMap<Multidegree, usize>, max_total: usize) -> Series {
    let mut s = unit_series(n);
    for (beta, &k) in mults {
        for _ in 0..k {
            divide_by_one_minus(&mut s, beta, n, max_total);
        }
    }
    s
}

/// `prod_beta (1 - t^beta)^{mult(beta)}` truncated at `max_total`.
pub fn root_product(n: usize, mults: &BTreeMap<Multidegree, usize>, max_total: usize) -> Series {
    let mut s = unit_series(n);
    for (beta, &k) in mults {
        for _ in 0..k {
            multiply_by_one_minus(&mut s, beta, n, max_total);
        }
    }
    s
}

fn unit_series(n: usize) -> Series {
    Series::from([(Multidegree::zero(n), BigInt::from(1))])
}

fn all_degrees(n: usize, max_total: usize) -> Vec<Multidegree> {
    let mut v = vec![Multidegree::zero(n)];
    v.extend(Multidegree::up_to(n, max_total));
    v
}

fn divide_by_one_minus(s: &mut Series, beta: &Multidegree, n: usize, max_total: usize) {
    // increasing total degree, so s[m - beta] is already updated
    for m in all_degrees(n, max_total) {
        if let Some(p) = m.checked_sub(beta) {
            if let Some(c) = s.get(&p).cloned() {
                *s.entry(m).or_insert_with(BigInt::zero) += c;
            }
        }
    }
    s.retain(|_, c| !c.is_zero());
}

fn multiply_by_one_minus(s: &mut Series, beta: &Multidegree, n: usize, max_total: usize) {
    for m in all_degrees(n, max_total).into_iter().rev() {
        if let Some(p) = m.checked_sub(beta) {
            if let Some(c) = s.get(&p).cloned() {
                *s.entry(m).or_insert_with(BigInt::zero) -= c;
            }
        }
    }
    s.retain(|_, c| !c.is_zero());
}

/// Recover multiplicities from graded dimensions of the enveloping algebra.
pub fn pbw_invert(
    n: usize,
    dims: &BTreeMap<Multidegree, usize>,
    max_total: usize,
) -> Result<BTreeMap<Multidegree, usize>> {
    let mut s = unit_series(n);
    let mut mults = BTreeMap::new();
    for total in 1..=max_total {
        let layer = Multidegree::of_total(n, total);
        let mut found = Vec::new();
        for m in &layer {
            let dim = dims
                .get(m)
                .ok_or_else(|| Error::Internal(format!("missing dimension at {}", m)))?;
            let have = s.get(m).cloned().unwrap_or_default();
            let k = BigInt::from(*dim) - have;
            if k.is_negative() {
                return Err(Error::Internal(format!(
                    "negative multiplicity {} at {}: dimensions are not a PBW series",
                    k, m
                )));
            }
            let k = k.to_usize().ok_or_else(|| Error::Internal("multiplicity overflow".into()))?;
            found.push((m.clone(), k));
        }
        for (m, k) in found {
            for _ in 0..k {
                divide_by_one_minus(&mut s, &m, n, max_total);
            }
            mults.insert(m, k);
        }
    }
    Ok(mults)
}

/// `sum_w eps(w) t^{rho - w rho}` over the Weyl group, truncated at `max_total`.
///
/// Elements are enumerated through `x = w rho - rho = -sum c_i alpha_i`: `s_i` lengthens `w`
/// exactly when `<rho + x, h_i> = 1 - sum_j c_j a_ij > 0`, and then adds that amount to `c_i`.
pub fn weyl_kac_sum(cd: &CartanDatum, max_total: usize) -> Result<Series> {
    if !cd.is_generalized_cartan() {
        return Err(Error::NotApplicable(
            "the Weyl-Kac denominator identity needs a generalized Cartan matrix".into(),
        ));
    }
    let n = cd.rank();
    let mut out = unit_series(n);
    let mut level: BTreeSet<Vec<i64>> = BTreeSet::from([vec![0; n]]);
    let mut sign = 1i64;
    let a: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| cd.a(i, j).to_integer().to_i64().unwrap_or(0)).collect())
        .collect();
    while !level.is_empty() {
        sign = -sign;
        let mut next = BTreeSet::new();
        for c in &level {
            for i in 0..n {
                let v = 1 - (0..n).map(|j| c[j] * a[i][j]).sum::<i64>();
                if v <= 0 {
                    continue;
                }
                let mut c2 = c.clone();
                c2[i] += v;
                if c2.iter().sum::<i64>() as usize <= max_total {
                    next.insert(c2);
                }
            }
        }
        for c in &next {
            let m = Multidegree::new(c.iter().map(|&x| x as u32).collect());
            *out.entry(m).or_insert_with(BigInt::zero) += BigInt::from(sign);
        }
        level = next;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Multiplicities read off the denominator identity: the reciprocal of the Weyl–Kac sum is the
/// graded dimension of `U(n_+)`, which `pbw_invert` turns into root multiplicities.
pub fn weyl_kac_multiplicities(cd: &CartanDatum, max_total: usize) -> Result<BTreeMap<Multidegree, usize>> {
    let n = cd.rank();
    let wk = weyl_kac_sum(cd, max_total)?;
    let mut inverse = unit_series(n);
    for m in Multidegree::up_to(n, max_total) {
        // (wk * inverse)[m] = 0 for m != 0 and wk[0] = 1
        let mut c = BigInt::zero();
        for (p, x) in &wk {
            if p.is_zero() {
                continue;
            }
            if let Some(rest) = m.checked_sub(p) {
                if let Some(y) = inverse.get(&rest) {
                    c -= x * y;
                }
            }
        }
        if !c.is_zero() {
            inverse.insert(m, c);
        }
    }
    let dims = Multidegree::up_to(n, max_total)
        .into_iter()
        .map(|m| {
            let c = inverse.get(&m).cloned().unwrap_or_default();
            let d = c
                .to_usize()
                .ok_or_else(|| Error::Internal(format!("negative coefficient {} in 1/WK at {}", c, m)))?;
            Ok((m, d))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    pbw_invert(n, &dims, max_total)
}

/// `(q - q^{-1})^{|m|} B` specialized at `v = 1`.
///
/// Every entry equals `prod_i m_i!`, so the block has rank one; it records the classical
/// limit of the normalized pairing, not the classical relation space.
pub fn specialized_normalized_block(engine: &PairingEngine, m: &Multidegree) -> Result<Matrix<Q>> {
    let block = engine.gram_block(m)?;
    let k = block.size();
    Ok(Matrix::from_fn(k, k, |a, b| {
        Q::from_integer(block.normalized[a][b].at_one())
    }))
}

/// Kernel dimensions of one multidegree on both sides of the deformation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatnessRow {
    pub degree: Multidegree,
    pub words: usize,
    /// Kernel rank of the generic-`q` Gram block.
    pub quantum_kernel: usize,
    /// Dimension of the classical relation space of `U(n_+)` in this degree.
    pub classical_relations: usize,
    /// Kernel rank of the normalized block evaluated at `v = 1`.
    pub specialized_kernel: usize,
}

impl FlatnessRow {
    pub fn flat(&self) -> bool {
        self.quantum_kernel == self.classical_relations
    }
}

/// Flatness data for every multidegree with `1 <= |m| <= max_total`.
pub fn flatness(engine: &PairingEngine, side: &ClassicalSide, max_total: usize) -> Result<Vec<FlatnessRow>> {
    let n = engine.cartan().rank();
    let classical = side.graded_data(max_total)?;
    Multidegree::up_to(n, max_total)
        .into_iter()
        .map(|m| {
            let block = engine.gram_block(&m)?;
            let words = block.size();
            let specialized = specialized_normalized_block(engine, &m)?;
            Ok(FlatnessRow {
                quantum_kernel: words - block.rank(),
                classical_relations: classical[&m].relation_dim,
                specialized_kernel: words - specialized.rank(),
                words,
                degree: m,
            })
        })
        .collect()
}

/// Classical highest-weight module: the Verma module uses the relation ideal of `U(n_-)`, the
/// irreducible quotient uses the contravariant form.
pub fn classical_module(
    side: &ClassicalSide,
    highest: Weight,
    kind: ModuleKind,
    depth: usize,
) -> Result<WeightModule<Q>> {
    if let Some(cap) = side.cap {
        if depth > cap {
            return Err(Error::DegreeCap { degree: depth, cap });
        }
    }
    let flavor = ClassicalFlavor::new(side.cartan_arc());
    match kind {
        ModuleKind::Verma => {
            // U(n_-) has the same word relations as U(n_+) under e_i -> f_i
            let rel = |m: &Multidegree| side.relations(m).map(|r| r.as_ref().clone());
            build_module(&flavor, highest, kind, depth, Quotient::Relations(&rel))
        }
        ModuleKind::Irreducible => {
            let form = ContravariantForm::new(&flavor, highest.clone());
            let pair = |x: &Word, y: &Word| form.pair(x, y);
            build_module(&flavor, highest, kind, depth, Quotient::Form(&pair))
        }
    }
}

/// Classical irreducible built until a layer vanishes.
pub fn classical_irreducible_full(side: &ClassicalSide, highest: Weight, max_depth: usize) -> Result<WeightModule<Q>> {
    let module = classical_module(side, highest, ModuleKind::Irreducible, max_depth + 1)?;
    if !module.is_complete() {
        return Err(Error::DepthExceeded {
            needed: max_depth + 2,
            depth: max_depth + 1,
        });
    }
    Ok(module)
}

/// `Omega` restricted to the weight block of `V (x) W` with total offset `degree`.
#[derive(Clone, Debug)]
pub struct OmegaBlock {
    pub degree: Multidegree,
    /// Offsets `(m_V, m_W)` with `m_V + m_W = degree` and both spaces nonzero.
    pub pairs: Vec<(Multidegree, Multidegree)>,
    /// Start of each pair's `dim V_{m_V} * dim W_{m_W}` coordinates.
    pub starts: Vec<usize>,
    pub matrix: Matrix<Q>,
}

impl OmegaBlock {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// The nonzero summands `V_{m_V} (x) W_{m_W}` of a weight block, with coordinate offsets.
pub fn tensor_layout(
    v: &WeightModule<Q>,
    w: &WeightModule<Q>,
    degree: &Multidegree,
) -> (Vec<(Multidegree, Multidegree)>, Vec<usize>, usize) {
    let n = v.cartan().rank();
    let mut pairs = Vec::new();
    let mut starts = Vec::new();
    let mut at = 0;
    let mut candidates = vec![Multidegree::zero(n)];
    for t in 1..=degree.total() {
        candidates.extend(Multidegree::of_total(n, t));
    }
    candidates.sort();
    for mv in candidates {
        if !mv.le(degree) {
            continue;
        }
        let mw = degree.checked_sub(&mv).unwrap();
        let size = v.dim(&mv) * w.dim(&mw);
        if size == 0 {
            continue;
        }
        pairs.push((mv, mw));
        starts.push(at);
        at += size;
    }
    (pairs, starts, at)
}

fn check_reach(v: &WeightModule<Q>, w: &WeightModule<Q>, degree: &Multidegree) -> Result<()> {
    for module in [v, w] {
        if !module.is_complete() && degree.total() > module.depth() {
            return Err(Error::DepthExceeded {
                needed: degree.total(),
                depth: module.depth(),
            });
        }
    }
    Ok(())
}

/// Dual bases of `n_+[beta]` and `n_-[-beta]`: bracket words `e_words` and coefficient vectors
/// `f_duals[a]` over `f_words` with `(l_e(e_words[a]), sum_c f_duals[b][c] l_f(f_words[c])) = delta_ab`.
pub struct RootDualBasis {
    pub beta: Multidegree,
    pub e_words: Vec<Word>,
    pub f_words: Vec<Word>,
    pub f_duals: Vec<Vec<Q>>,
}

pub fn root_dual_basis(side: &ClassicalSide, beta: &Multidegree) -> Result<RootDualBasis> {
    let block = side.lie_block(beta)?;
    let rows = block.matrix.independent_rows();
    let sub = Matrix::from_fn(rows.len(), block.words.len(), |a, c| block.matrix.get(rows[a], c).clone());
    let cols = sub.transpose().independent_rows();
    let square = Matrix::from_fn(rows.len(), cols.len(), |a, c| sub.get(a, cols[c]).clone());
    let inv = square
        .inverse()
        .ok_or_else(|| Error::Internal(format!("invariant form degenerate on n[{}]", beta)))?;
    Ok(RootDualBasis {
        beta: beta.clone(),
        e_words: rows.iter().map(|&r| block.words[r].clone()).collect(),
        f_words: cols.iter().map(|&c| block.words[c].clone()).collect(),
        f_duals: (0..rows.len()).map(|b| inv.column(b)).collect(),
    })
}

/// The action of `sum_c coeffs[c] l_f(words[c])` on `V_m`.
fn f_combination(module: &WeightModule<Q>, words: &[Word], coeffs: &[Q], m: &Multidegree) -> Result<Matrix<Q>> {
    let mut acc: Option<Matrix<Q>> = None;
    for (u, c) in words.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let op = module.bracket_operator(u, m, false)?.scale(c);
        acc = Some(match acc {
            Some(a) => a.add(&op),
            None => op,
        });
    }
    Ok(acc.unwrap_or_else(|| {
        let n = module.cartan().rank();
        let target = words.first().map_or(m.clone(), |u| m.add(&u.multidegree(n)));
        Matrix::zeros(module.dim(&target), module.dim(m))
    }))
}

/// `Omega = sum_a x_a (x) x^a + sum_{beta > 0} sum_a (e_a (x) f^a + f^a (x) e_a)` on one weight block.
pub fn casimir_block(
    side: &ClassicalSide,
    v: &WeightModule<Q>,
    w: &WeightModule<Q>,
    degree: &Multidegree,
) -> Result<OmegaBlock> {
    check_reach(v, w, degree)?;
    let cd = side.cartan();
    let (pairs, starts, size) = tensor_layout(v, w, degree);
    let mut omega = Matrix::zeros(size, size);
    let locate = |mv: &Multidegree, mw: &Multidegree| -> Option<usize> {
        pairs.iter().position(|(a, b)| a == mv && b == mw).map(|k| starts[k])
    };
    for (k, (mv, mw)) in pairs.iter().enumerate() {
        let c = cd.weight_form(&v.weight(mv), &w.weight(mw))?;
        for d in 0..v.dim(mv) * w.dim(mw) {
            omega.set(starts[k] + d, starts[k] + d, c.clone());
        }
    }
    let mut betas = Multidegree::up_to(cd.rank(), degree.total());
    // only root spaces that map some summand of the block to another one contribute
    betas.retain(|b| {
        !b.is_zero()
            && pairs.iter().any(|(mv, mw)| {
                mv.checked_sub(b).is_some_and(|t| v.dim(&t) > 0) || mw.checked_sub(b).is_some_and(|t| w.dim(&t) > 0)
            })
    });
    for beta in betas {
        if side.multiplicity(&beta)? == 0 {
            continue;
        }
        let duals = root_dual_basis(side, &beta)?;
        for (mv, mw) in &pairs {
            let src = locate(mv, mw).unwrap();
            // e_a (x) f^a : (mv, mw) -> (mv - beta, mw + beta)
            if let Some(tv) = mv.checked_sub(&beta) {
                let tw = mw.add(&beta);
                if let Some(dst) = locate(&tv, &tw) {
                    for (ew, fd) in duals.e_words.iter().zip(&duals.f_duals) {
                        let ev = v.bracket_operator(ew, mv, true)?;
                        let fw = f_combination(w, &duals.f_words, fd, mw)?;
                        omega.add_block(dst, src, &ev.kron(&fw));
                    }
                }
            }
            // f^a (x) e_a : (mv, mw) -> (mv + beta, mw - beta)
            if let Some(tw) = mw.checked_sub(&beta) {
                let tv = mv.add(&beta);
                if let Some(dst) = locate(&tv, &tw) {
                    for (ew, fd) in duals.e_words.iter().zip(&duals.f_duals) {
                        let fv = f_combination(v, &duals.f_words, fd, mv)?;
                        let ewm = w.bracket_operator(ew, mw, true)?;
                        omega.add_block(dst, src, &fv.kron(&ewm));
                    }
                }
            }
        }
    }
    Ok(OmegaBlock {
        degree: degree.clone(),
        pairs,
        starts,
        matrix: omega,
    })
}

/// `x (x) 1 + 1 (x) x` for `x = e_i` (raising) or `f_i`, from the block at `degree` to its neighbour.
pub fn diagonal_action(
    v: &WeightModule<Q>,
    w: &WeightModule<Q>,
    degree: &Multidegree,
    i: usize,
    raising: bool,
) -> Result<Matrix<Q>> {
    let target = if raising {
        degree
            .decrement(i)
            .ok_or_else(|| Error::NotApplicable(format!("no block above offset {}", degree)))?
    } else {
        degree.increment(i)
    };
    let (src_pairs, src_starts, src_size) = tensor_layout(v, w, degree);
    let (dst_pairs, dst_starts, dst_size) = tensor_layout(v, w, &target);
    let mut out = Matrix::zeros(dst_size, src_size);
    let op = |module: &WeightModule<Q>, m: &Multidegree| -> Result<Matrix<Q>> {
        if raising {
            Ok(module.raising(i, m))
        } else {
            module.lowering(i, m)
        }
    };
    let shift = |m: &Multidegree| -> Option<Multidegree> {
        if raising {
            m.decrement(i)
        } else {
            Some(m.increment(i))
        }
    };
    for (k, (mv, mw)) in src_pairs.iter().enumerate() {
        if let Some(tv) = shift(mv) {
            if let Some(d) = dst_pairs.iter().position(|(a, b)| *a == tv && b == mw) {
                let block = op(v, mv)?.kron(&Matrix::identity(w.dim(mw)));
                out.add_block(dst_starts[d], src_starts[k], &block);
            }
        }
        if let Some(tw) = shift(mw) {
            if let Some(d) = dst_pairs.iter().position(|(a, b)| a == mv && *b == tw) {
                let block = Matrix::identity(v.dim(mv)).kron(&op(w, mw)?);
                out.add_block(dst_starts[d], src_starts[k], &block);
            }
        }
    }
    Ok(out)
}

/// `Omega` on all of `V (x) W` for finite modules, in the Kronecker order of the global bases.
pub fn casimir_full(side: &ClassicalSide, v: &WeightModule<Q>, w: &WeightModule<Q>) -> Result<Matrix<Q>> {
    if !v.is_complete() || !w.is_complete() {
        return Err(Error::NotApplicable("full Casimir needs finite-dimensional modules".into()));
    }
    let n = side.cartan().rank();
    let dv = v.total_dim();
    let dw = w.total_dim();
    let mut out = Matrix::zeros(dv * dw, dv * dw);
    let max_total = v
        .offsets()
        .filter(|m| v.dim(m) > 0)
        .chain(w.offsets().filter(|m| w.dim(m) > 0))
        .map(|m| m.total())
        .max()
        .unwrap_or(0);
    let mut degrees = vec![Multidegree::zero(n)];
    for t in 1..=2 * max_total {
        degrees.extend(Multidegree::of_total(n, t));
    }
    for degree in degrees {
        if tensor_layout(v, w, &degree).2 == 0 {
            continue;
        }
        let block = casimir_block(side, v, w, &degree)?;
        if block.dim() == 0 {
            continue;
        }
        // map block coordinates to global Kronecker coordinates
        let mut global = Vec::with_capacity(block.dim());
        for (mv, mw) in &block.pairs {
            for a in 0..v.dim(mv) {
                for b in 0..w.dim(mw) {
                    global.push(v.global_index(mv, a) * dw + w.global_index(mw, b));
                }
            }
        }
        for (r, &gr) in global.iter().enumerate() {
            for (c, &gc) in global.iter().enumerate() {
                let x = block.matrix.get(r, c);
                if !x.is_zero() {
                    out.set(gr, gc, x.clone());
                }
            }
        }
    }
    Ok(out)
}

/// Helper for tests and reports: `lambda(h_i)` as integers.
pub fn int_weight(cd: &CartanDatum, values: &[i64]) -> Result<Weight> {
    Weight::from_coroot_values(&values.iter().map(|&x| int(x)).collect::<Vec<_>>(), cd)
}
