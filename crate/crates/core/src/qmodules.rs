//! Highest-weight modules: Verma modules, the contravariant form and irreducible quotients.
//!
//! A module is built weight space by weight space. The space at offset `m` has
//! weight `lambda - sum m_i alpha_i` and is spanned by vectors `F_w v` for words
//! `w` of multidegree `m`; a subset of those words is kept as a basis and every
//! other word is reduced onto it, either through a nondegenerate form on the
//! quotient or through an explicit relation space.
//!
//! The same construction serves the quantum side (scalars in Q(v), `[E_i, F_i]`
//! acting by `[mu(h_i)]_{q_i}`) and the classical side (rational scalars,
//! `[e_i, f_i] = h_i`).

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use dashmap::DashMap;
use num_rational::BigRational;

use crate::cartan::{CartanDatum, Weight};
use crate::error::{Error, Result};
use crate::freealg::{enumerate_words, Multidegree, Word};
use crate::linalg::{Field, Matrix};
use crate::qpairing::PairingEngine;
use crate::scalars::{Denominator, QScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    Verma,
    Irreducible,
}

impl ModuleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModuleKind::Verma => "verma",
            ModuleKind::Irreducible => "irreducible",
        }
    }
}

/// How the lowering words of one multidegree are cut down to a basis.
pub enum Quotient<'a, F> {
    /// Keep a maximal set of candidates on which the form is nondegenerate; reduce by solving
    /// against that block.
    Form(&'a (dyn Fn(&Word, &Word) -> Result<F> + Sync)),
    /// Words modulo an explicitly spanned relation subspace.
    Relations(&'a (dyn Fn(&Multidegree) -> Result<Vec<Vec<F>>> + Sync)),
}

/// Data that differs between the quantum and classical settings.
pub trait Flavor: Sync {
    type Scalar: Field;
    fn cartan(&self) -> &CartanDatum;
    /// The scalar by which `[E_i, F_i]` acts on weight `mu`.
    fn commutator_value(&self, i: usize, mu: &Weight) -> Result<Self::Scalar>;
    /// Eigenvalue of the Cartan generator attached to `i` (`K_i` or `h_i`) on weight `mu`.
    fn cartan_value(&self, i: usize, mu: &Weight) -> Result<Self::Scalar>;
    /// The eigenvalue of generator `i` after moving from weight `mu` (eigenvalue `before`)
    /// to `mu - alpha_j`, or to `mu + alpha_j` when `raising`.
    fn shifted_cartan_value(&self, i: usize, j: usize, before: &Self::Scalar, raising: bool) -> Result<Self::Scalar>;
}

/// `U_q(g)`: `K_i = q^{gamma_i}` acts by `q^{(alpha_i, mu)}`.
pub struct QuantumFlavor {
    cd: Arc<CartanDatum>,
    den: Denominator,
}

impl QuantumFlavor {
    pub fn new(cd: Arc<CartanDatum>, den: Denominator) -> Self {
        QuantumFlavor { cd, den }
    }

    pub fn denominator(&self) -> Denominator {
        self.den
    }
}

impl Flavor for QuantumFlavor {
    type Scalar = QScalar;

    fn cartan(&self) -> &CartanDatum {
        &self.cd
    }

    fn commutator_value(&self, i: usize, mu: &Weight) -> Result<QScalar> {
        // (K_i - K_i^{-1}) / (q_i - q_i^{-1}) = [mu(h_i)]_{q_i}
        let di = self.cd.d(i);
        let x = self.cd.root_weight_pairing(i, mu)? / di;
        self.den.q_number(&x, di)
    }

    fn cartan_value(&self, i: usize, mu: &Weight) -> Result<QScalar> {
        self.den.q_power(&self.cd.root_weight_pairing(i, mu)?)
    }

    fn shifted_cartan_value(&self, i: usize, j: usize, before: &QScalar, raising: bool) -> Result<QScalar> {
        let e = self.cd.root_pairing(i, j);
        let e = if raising { e.clone() } else { -e };
        Ok(before.mul(&self.den.q_power(&e)?))
    }
}

/// `U(g)`: `h_i` acts by `mu(h_i)`.
pub struct ClassicalFlavor {
    cd: Arc<CartanDatum>,
}

impl ClassicalFlavor {
    pub fn new(cd: Arc<CartanDatum>) -> Self {
        ClassicalFlavor { cd }
    }
}

impl Flavor for ClassicalFlavor {
    type Scalar = BigRational;

    fn cartan(&self) -> &CartanDatum {
        &self.cd
    }

    fn commutator_value(&self, i: usize, mu: &Weight) -> Result<BigRational> {
        self.cd.coroot_value(i, mu)
    }

    fn cartan_value(&self, i: usize, mu: &Weight) -> Result<BigRational> {
        self.cd.coroot_value(i, mu)
    }

    fn shifted_cartan_value(&self, i: usize, j: usize, before: &BigRational, raising: bool) -> Result<BigRational> {
        let a = self.cd.a(i, j);
        Ok(if raising { before + a } else { before - a })
    }
}

/// The contravariant form on words: `S(F_i x, y) = S(x, E_i y)`, `S(v, v) = 1`.
pub struct ContravariantForm<'a, P: Flavor> {
    flavor: &'a P,
    highest: Weight,
    memo: DashMap<(Word, Word), P::Scalar>,
}

impl<'a, P: Flavor> ContravariantForm<'a, P> {
    pub fn new(flavor: &'a P, highest: Weight) -> Self {
        ContravariantForm {
            flavor,
            highest,
            memo: DashMap::new(),
        }
    }

    pub fn pair(&self, x: &Word, y: &Word) -> Result<P::Scalar> {
        let n = self.flavor.cartan().rank();
        if x.multidegree(n) != y.multidegree(n) {
            return Ok(P::Scalar::zero());
        }
        self.pair_same_degree(x, y)
    }

    fn pair_same_degree(&self, x: &Word, y: &Word) -> Result<P::Scalar> {
        let Some((i, rest)) = x.split_first() else {
            return Ok(P::Scalar::one());
        };
        let key = (x.clone(), y.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let mut acc = P::Scalar::zero();
        for (t, c) in raising_terms(self.flavor, &self.highest, i, y)? {
            let s = self.pair_same_degree(&rest, &y.remove(t))?;
            if !s.is_zero() {
                acc = acc.add(&c.mul(&s));
            }
        }
        self.memo.insert(key, acc.clone());
        Ok(acc)
    }
}

/// `E_i F_w v = sum_t c_t F_{w \ t} v`: the positions `t` with `w_t = i` and their coefficients.
fn raising_terms<P: Flavor>(
    flavor: &P,
    highest: &Weight,
    i: usize,
    w: &Word,
) -> Result<Vec<(usize, P::Scalar)>> {
    let n = flavor.cartan().rank();
    let letters = w.letters();
    let mut out = Vec::new();
    for t in 0..letters.len() {
        if letters[t] != i {
            continue;
        }
        let suffix = Word::new(letters[t + 1..].to_vec()).multidegree(n);
        let mu = highest.lowered(&suffix);
        let c = flavor.commutator_value(i, &mu)?;
        if !c.is_zero() {
            out.push((t, c));
        }
    }
    Ok(out)
}

/// Reduction of arbitrary words of one multidegree onto the chosen basis.
enum Reducer<F> {
    Form {
        basis: Vec<Word>,
        inverse: Matrix<F>,
    },
    Relations {
        index: HashMap<Word, usize>,
        /// For each word: its coordinates on the basis.
        coords: Vec<Vec<F>>,
        basis: Vec<Word>,
    },
}

impl<F: Field> Reducer<F> {
    fn basis(&self) -> &[Word] {
        match self {
            Reducer::Form { basis, .. } | Reducer::Relations { basis, .. } => basis,
        }
    }

    #[allow(clippy::type_complexity)]
    fn reduce(&self, w: &Word, form: Option<&(dyn Fn(&Word, &Word) -> Result<F> + Sync)>) -> Result<Vec<F>> {
        match self {
            Reducer::Form { basis, inverse } => {
                if basis.is_empty() {
                    return Ok(Vec::new());
                }
                let form = form.expect("form reducer needs its form");
                let rhs = basis.iter().map(|b| form(b, w)).collect::<Result<Vec<F>>>()?;
                Ok(inverse.mul_vec(&rhs))
            }
            Reducer::Relations { index, coords, .. } => {
                let k = index
                    .get(w)
                    .ok_or_else(|| Error::Internal(format!("word {} outside its weight space", w)))?;
                Ok(coords[*k].clone())
            }
        }
    }
}

/// A truncated highest-weight module with exact generator actions on weight spaces.
#[derive(Clone, Debug)]
pub struct WeightModule<F> {
    cd: Arc<CartanDatum>,
    highest: Weight,
    kind: ModuleKind,
    depth: usize,
    /// Basis words of each weight space, keyed by offset.
    spaces: BTreeMap<Multidegree, Vec<Word>>,
    /// `E_i : V_m -> V_{m - 1_i}`, keyed by `(i, m)`.
    raising: HashMap<(usize, Multidegree), Matrix<F>>,
    /// `F_i : V_m -> V_{m + 1_i}`, keyed by `(i, m)`, for `|m| < depth`.
    lowering: HashMap<(usize, Multidegree), Matrix<F>>,
    /// Eigenvalues of the Cartan generators on each space.
    cartan: BTreeMap<Multidegree, Vec<F>>,
    complete: bool,
}

/// Build the weight spaces with `|m| <= depth`.
pub fn build_module<P: Flavor>(
    flavor: &P,
    highest: Weight,
    kind: ModuleKind,
    depth: usize,
    quotient: Quotient<'_, P::Scalar>,
) -> Result<WeightModule<P::Scalar>> {
    let cd = flavor.cartan();
    let n = cd.rank();
    let form = match &quotient {
        Quotient::Form(f) => Some(*f),
        Quotient::Relations(_) => None,
    };
    let mut reducers: BTreeMap<Multidegree, Reducer<P::Scalar>> = BTreeMap::new();
    reducers.insert(
        Multidegree::zero(n),
        Reducer::Relations {
            index: HashMap::from([(Word::empty(), 0)]),
            coords: vec![vec![P::Scalar::one()]],
            basis: vec![Word::empty()],
        },
    );
    let mut last_layer_empty = false;
    for total in 1..=depth {
        let mut layer_dim = 0;
        for m in Multidegree::of_total(n, total) {
            let mut candidates = Vec::new();
            for i in 0..n {
                if let Some(p) = m.decrement(i) {
                    for b in reducers[&p].basis() {
                        candidates.push(b.prepend(i));
                    }
                }
            }
            let reducer = match &quotient {
                Quotient::Form(pair) => form_reducer(&candidates, *pair)?,
                Quotient::Relations(rel) => relation_reducer(&m, &candidates, rel(&m)?)?,
            };
            layer_dim += reducer.basis().len();
            reducers.insert(m, reducer);
        }
        last_layer_empty = layer_dim == 0;
        if last_layer_empty {
            // every deeper layer is generated from this one
            for t in total + 1..=depth {
                for m in Multidegree::of_total(n, t) {
                    reducers.insert(
                        m,
                        Reducer::Relations {
                            index: HashMap::new(),
                            coords: Vec::new(),
                            basis: Vec::new(),
                        },
                    );
                }
            }
            break;
        }
    }

    let mut spaces = BTreeMap::new();
    let mut cartan = BTreeMap::new();
    for (m, r) in &reducers {
        spaces.insert(m.clone(), r.basis().to_vec());
        let mu = highest.lowered(m);
        cartan.insert(
            m.clone(),
            (0..n).map(|i| flavor.cartan_value(i, &mu)).collect::<Result<Vec<_>>>()?,
        );
    }

    let mut lowering = HashMap::new();
    let mut raising = HashMap::new();
    for (m, r) in &reducers {
        let src = r.basis();
        for i in 0..n {
            if m.total() < depth {
                let target = m.increment(i);
                let tr = &reducers[&target];
                let cols = src
                    .iter()
                    .map(|b| tr.reduce(&b.prepend(i), form))
                    .collect::<Result<Vec<_>>>()?;
                lowering.insert((i, m.clone()), columns_to_matrix(tr.basis().len(), &cols));
            }
            if let Some(target) = m.decrement(i) {
                let tr = &reducers[&target];
                let dim = tr.basis().len();
                let mut cols = Vec::with_capacity(src.len());
                for w in src {
                    let mut col = vec![P::Scalar::zero(); dim];
                    for (t, c) in raising_terms(flavor, &highest, i, w)? {
                        let red = tr.reduce(&w.remove(t), form)?;
                        for (x, y) in col.iter_mut().zip(&red) {
                            *x = x.add(&c.mul(y));
                        }
                    }
                    cols.push(col);
                }
                raising.insert((i, m.clone()), columns_to_matrix(dim, &cols));
            }
        }
    }
    Ok(WeightModule {
        cd: Arc::new(cd.clone()),
        highest,
        kind,
        depth,
        spaces,
        raising,
        lowering,
        cartan,
        complete: last_layer_empty,
    })
}

fn columns_to_matrix<F: Field>(rows: usize, cols: &[Vec<F>]) -> Matrix<F> {
    Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
}

fn form_reducer<F: Field>(
    candidates: &[Word],
    pair: &(dyn Fn(&Word, &Word) -> Result<F> + Sync),
) -> Result<Reducer<F>> {
    let k = candidates.len();
    let mut gram = Matrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let x = pair(&candidates[a], &candidates[b])?;
            gram.set(b, a, x.clone());
            gram.set(a, b, x);
        }
    }
    // for a symmetric matrix, a maximal set of independent rows gives a nonsingular principal block
    let rows = gram.independent_rows();
    let block = Matrix::from_fn(rows.len(), rows.len(), |a, b| gram.get(rows[a], rows[b]).clone());
    let inverse = block
        .inverse()
        .ok_or_else(|| Error::Internal("principal block of the form is singular".into()))?;
    Ok(Reducer::Form {
        basis: rows.iter().map(|&r| candidates[r].clone()).collect(),
        inverse,
    })
}

fn relation_reducer<F: Field>(
    m: &Multidegree,
    candidates: &[Word],
    relations: Vec<Vec<F>>,
) -> Result<Reducer<F>> {
    let words = enumerate_words(m, None)?;
    let index: HashMap<Word, usize> = words.iter().cloned().zip(0..).collect();
    // candidates are spanning; order them first so they are preferred as basis words
    let mut order: Vec<usize> = candidates.iter().map(|c| index[c]).collect();
    for k in 0..words.len() {
        if !order.contains(&k) {
            order.push(k);
        }
    }
    // columns in reversed preference order so that pivots fall on the least preferred words
    let cols: Vec<usize> = order.iter().rev().cloned().collect();
    let rel = Matrix::from_fn(relations.len(), words.len(), |r, c| relations[r][cols[c]].clone());
    let (rref, pivots) = rel.rref();
    let free: Vec<usize> = (0..words.len()).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<Word> = free.iter().map(|&c| words[cols[c]].clone()).collect();
    let mut coords = vec![Vec::new(); words.len()];
    for (c, &word_idx) in cols.iter().enumerate() {
        let v = if let Some(k) = pivots.iter().position(|&p| p == c) {
            free.iter().map(|&f| rref.get(k, f).neg()).collect()
        } else {
            free.iter().map(|&f| if f == c { F::one() } else { F::zero() }).collect()
        };
        coords[word_idx] = v;
    }
    Ok(Reducer::Relations {
        index,
        coords,
        basis,
    })
}

impl<F: Field> WeightModule<F> {
    pub fn cartan(&self) -> &CartanDatum {
        &self.cd
    }

    pub fn highest_weight(&self) -> &Weight {
        &self.highest
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// True when some layer of the construction was zero, so the module is finite and fully built.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn offsets(&self) -> impl Iterator<Item = &Multidegree> {
        self.spaces.keys()
    }

    /// Dimension of the space at offset `m`; zero when `m` is outside the computed range.
    pub fn dim(&self, m: &Multidegree) -> usize {
        self.spaces.get(m).map_or(0, |b| b.len())
    }

    pub fn has_space(&self, m: &Multidegree) -> bool {
        self.spaces.contains_key(m)
    }

    pub fn basis(&self, m: &Multidegree) -> &[Word] {
        self.spaces.get(m).map_or(&[], |b| b.as_slice())
    }

    pub fn weight(&self, m: &Multidegree) -> Weight {
        self.highest.lowered(m)
    }

    /// Position of the `k`-th basis vector of `V_m` in the concatenation of all spaces in offset order.
    pub fn global_index(&self, m: &Multidegree, k: usize) -> usize {
        self.spaces.range(..m.clone()).map(|(_, b)| b.len()).sum::<usize>() + k
    }

    /// Total dimension over the computed range.
    pub fn total_dim(&self) -> usize {
        self.spaces.values().map(|b| b.len()).sum()
    }

    /// Weight multiplicities keyed by offset.
    pub fn character(&self) -> BTreeMap<Multidegree, usize> {
        self.spaces.iter().map(|(m, b)| (m.clone(), b.len())).collect()
    }

    /// `E_i : V_m -> V_{m - 1_i}`. Zero map (with the right shape) when the target is outside the module.
    pub fn raising(&self, i: usize, m: &Multidegree) -> Matrix<F> {
        match self.raising.get(&(i, m.clone())) {
            Some(x) => x.clone(),
            None => {
                let target = m.decrement(i).map_or(0, |t| self.dim(&t));
                Matrix::zeros(target, self.dim(m))
            }
        }
    }

    /// `F_i : V_m -> V_{m + 1_i}`.
    pub fn lowering(&self, i: usize, m: &Multidegree) -> Result<Matrix<F>> {
        if !self.has_space(m) {
            return Ok(Matrix::zeros(0, 0));
        }
        if self.dim(m) == 0 {
            return Ok(Matrix::zeros(self.dim(&m.increment(i)), 0));
        }
        self.lowering.get(&(i, m.clone())).cloned().ok_or(Error::DepthExceeded {
            needed: m.total() + 1,
            depth: self.depth,
        })
    }

    /// Eigenvalue of the Cartan generator `i` on `V_m`.
    pub fn cartan_value(&self, i: usize, m: &Multidegree) -> F {
        self.cartan[m][i].clone()
    }

    /// Right-normed bracket `[X_{w_1}, [X_{w_2}, ..., X_{w_k}]]` of raising (or lowering) operators,
    /// restricted to `V_m`.
    pub fn bracket_operator(&self, word: &Word, m: &Multidegree, raising: bool) -> Result<Matrix<F>> {
        let n = self.cd.rank();
        let beta = word.multidegree(n);
        let target_of = |src: &Multidegree, shift: &Multidegree| -> Option<Multidegree> {
            if raising {
                src.checked_sub(shift)
            } else {
                Some(src.add(shift))
            }
        };
        let dim_at = |x: &Option<Multidegree>| x.as_ref().map_or(0, |t| self.dim(t));
        let target = target_of(m, &beta);
        if target.is_none() || self.dim(m) == 0 || dim_at(&target) == 0 {
            return Ok(Matrix::zeros(dim_at(&target), self.dim(m)));
        }
        let step = |i: usize, src: &Multidegree| -> Result<Matrix<F>> {
            if raising {
                Ok(self.raising(i, src))
            } else {
                self.lowering(i, src)
            }
        };
        let Some((i, rest)) = word.split_first() else {
            return Ok(Matrix::identity(self.dim(m)));
        };
        if rest.is_empty() {
            return step(i, m);
        }
        let rest_beta = rest.multidegree(n);
        let unit = Multidegree::unit(n, i);
        // X_i (rest) - (rest) X_i
        let mid_a = target_of(m, &rest_beta);
        let term_a = match &mid_a {
            Some(mid) if self.dim(mid) > 0 => step(i, mid)?.mul(&self.bracket_operator(&rest, m, raising)?),
            _ => Matrix::zeros(dim_at(&target), self.dim(m)),
        };
        let mid_b = target_of(m, &unit);
        let term_b = match &mid_b {
            Some(mid) if self.dim(mid) > 0 => self.bracket_operator(&rest, mid, raising)?.mul(&step(i, m)?),
            _ => Matrix::zeros(dim_at(&target), self.dim(m)),
        };
        Ok(term_a.sub(&term_b))
    }
}

/// Outcome of checking the defining relations of the algebra on a module.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// `[E_i, F_j] = delta_ij (K_i - K_i^{-1}) / (q_i - q_i^{-1})` (resp. `delta_ij h_i`) and
/// conjugation by the Cartan generators, on every space where both sides are computed.
pub fn check_relations<P: Flavor>(flavor: &P, module: &WeightModule<P::Scalar>) -> Result<RelationReport> {
    let n = module.cd.rank();
    let mut report = RelationReport::default();
    let offsets: Vec<Multidegree> = module.offsets().cloned().collect();
    for m in &offsets {
        let dim = module.dim(m);
        if dim == 0 {
            continue;
        }
        let mu = module.weight(m);
        for i in 0..n {
            for j in 0..n {
                if m.total() < module.depth {
                    let up = m.increment(j);
                    let ef = module.raising(i, &up).mul(&module.lowering(j, m)?);
                    let fe = match m.decrement(i) {
                        Some(down) if module.dim(&down) > 0 => module.lowering(j, &down)?.mul(&module.raising(i, m)),
                        _ => Matrix::zeros(ef.rows(), dim),
                    };
                    let lhs = ef.sub(&fe);
                    let rhs = if i == j {
                        Matrix::identity(dim).scale(&flavor.commutator_value(i, &mu)?)
                    } else {
                        Matrix::zeros(lhs.rows(), dim)
                    };
                    report.record(lhs == rhs, || format!("[E_{}, F_{}] on offset {}", i + 1, j + 1, m));

                    // Cartan generator i against F_j
                    let f = module.lowering(j, m)?;
                    let before = module.cartan_value(i, m);
                    let after = module.cartan_value(i, &up);
                    report.record(
                        cartan_compatible(flavor, i, j, &before, &after, false, &f),
                        || format!("Cartan {} against F_{} on offset {}", i + 1, j + 1, m),
                    );
                }
                if let Some(down) = m.decrement(j) {
                    let e = module.raising(j, m);
                    let before = module.cartan_value(i, m);
                    let after = module.cartan_value(i, &down);
                    report.record(
                        cartan_compatible(flavor, i, j, &before, &after, true, &e),
                        || format!("Cartan {} against E_{} on offset {}", i + 1, j + 1, m),
                    );
                }
            }
        }
    }
    Ok(report)
}

/// `K_i X K_i^{-1} = q^{-+(alpha_i, alpha_j)} X` (resp. `[h_i, X] = -+a_ij X`) for `X = F_j` or `E_j`,
/// checked as `X * after == X * expected` where `after` is the Cartan eigenvalue on the target.
fn cartan_compatible<P: Flavor>(
    flavor: &P,
    i: usize,
    j: usize,
    before: &P::Scalar,
    after: &P::Scalar,
    raising: bool,
    x: &Matrix<P::Scalar>,
) -> bool {
    match flavor.shifted_cartan_value(i, j, before, raising) {
        Ok(expected) => x.scale(after) == x.scale(&expected),
        Err(_) => false,
    }
}

/// Quantum Verma module `M(lambda)` to the given depth.
pub fn verma(engine: &PairingEngine, highest: Weight, depth: usize) -> Result<WeightModule<QScalar>> {
    check_cap(engine, depth)?;
    let flavor = QuantumFlavor::new(engine.cartan_arc(), engine.denominator());
    check_weight_exponents(&flavor, &highest)?;
    let pair = |x: &Word, y: &Word| Ok(engine.normalized(x, y).to_qscalar());
    build_module(&flavor, highest, ModuleKind::Verma, depth, Quotient::Form(&pair))
}

/// Quantum irreducible `L(lambda)` to the given depth.
pub fn irreducible(engine: &PairingEngine, highest: Weight, depth: usize) -> Result<WeightModule<QScalar>> {
    check_cap(engine, depth)?;
    let flavor = QuantumFlavor::new(engine.cartan_arc(), engine.denominator());
    check_weight_exponents(&flavor, &highest)?;
    let form = ContravariantForm::new(&flavor, highest.clone());
    let pair = |x: &Word, y: &Word| form.pair(x, y);
    build_module(&flavor, highest, ModuleKind::Irreducible, depth, Quotient::Form(&pair))
}

/// Quantum irreducible built until a layer vanishes; fails if that does not happen by `max_depth`.
pub fn irreducible_full(engine: &PairingEngine, highest: Weight, max_depth: usize) -> Result<WeightModule<QScalar>> {
    let module = irreducible(engine, highest, max_depth + 1)?;
    if !module.is_complete() {
        return Err(Error::DepthExceeded {
            needed: max_depth + 2,
            depth: max_depth + 1,
        });
    }
    Ok(module)
}

fn check_cap(engine: &PairingEngine, depth: usize) -> Result<()> {
    match engine.cap() {
        Some(cap) if depth > cap => Err(Error::DegreeCap { degree: depth, cap }),
        _ => Ok(()),
    }
}

fn check_weight_exponents(flavor: &QuantumFlavor, highest: &Weight) -> Result<()> {
    let cd = flavor.cartan();
    for i in 0..cd.rank() {
        flavor.den.exponent(&cd.root_weight_pairing(i, highest)?)?;
    }
    Ok(())
}

/// Entrywise comparison of two characters over the union of their offsets.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterComparison {
    /// `(offset, first, second)`.
    pub entries: Vec<(Multidegree, usize, usize)>,
}

impl CharacterComparison {
    pub fn agree(&self) -> bool {
        self.entries.iter().all(|(_, a, b)| a == b)
    }

    pub fn mismatches(&self) -> Vec<&(Multidegree, usize, usize)> {
        self.entries.iter().filter(|(_, a, b)| a != b).collect()
    }
}

pub fn compare_characters(
    first: &BTreeMap<Multidegree, usize>,
    second: &BTreeMap<Multidegree, usize>,
) -> CharacterComparison {
    let mut keys: Vec<&Multidegree> = first.keys().chain(second.keys()).collect();
    keys.sort();
    keys.dedup();
    CharacterComparison {
        entries: keys
            .into_iter()
            .map(|m| {
                (
                    m.clone(),
                    first.get(m).copied().unwrap_or(0),
                    second.get(m).copied().unwrap_or(0),
                )
            })
            .collect(),
    }
}

/// Rational weight helper: `lambda(h_i)` values as integers.
pub fn weight_from_ints(cd: &CartanDatum, values: &[i64]) -> Result<Weight> {
    let vals: Vec<BigRational> = values.iter().map(|&x| crate::cartan::int(x)).collect();
    Weight::from_coroot_values(&vals, cd)
}

#[cfg(test)]
mod tests {
    use super::*;
    fn setup(rows: &[&[i64]], hw: &[i64]) -> (PairingEngine, Weight) {
        let cd = Arc::new(CartanDatum::from_rows(rows).unwrap());
        let lam = weight_from_ints(&cd, hw).unwrap();
        let den = cd.session_denominator(std::slice::from_ref(&lam)).unwrap();
        (PairingEngine::with_denominator(cd, den).unwrap(), lam)
    }

    fn dims(m: &WeightModule<QScalar>) -> Vec<usize> {
        m.character().values().cloned().collect()
    }

    #[test]
    fn sl2_verma_and_irreducible() {
        let (e, lam) = setup(&[&[2]], &[3]);
        let v = verma(&e, lam.clone(), 6).unwrap();
        assert_eq!(dims(&v), vec![1; 7]);
        let l = irreducible(&e, lam, 6).unwrap();
        assert_eq!(dims(&l), vec![1, 1, 1, 1, 0, 0, 0]);
        assert!(l.is_complete());
    }

    #[test]
    fn sl2_two_dimensional() {
        let (e, lam) = setup(&[&[2]], &[1]);
        let l = irreducible_full(&e, lam, 4).unwrap();
        assert_eq!(l.total_dim(), 2);
        let flavor = QuantumFlavor::new(e.cartan_arc(), e.denominator());
        assert!(check_relations(&flavor, &l).unwrap().holds());
    }

    #[test]
    fn sl3_fundamental() {
        let (e, lam) = setup(&[&[2, -1], &[-1, 2]], &[1, 0]);
        let l = irreducible_full(&e, lam, 4).unwrap();
        assert_eq!(l.total_dim(), 3);
        assert_eq!(l.dim(&Multidegree::new(vec![1, 0])), 1);
        assert_eq!(l.dim(&Multidegree::new(vec![1, 1])), 1);
        assert_eq!(l.dim(&Multidegree::new(vec![0, 1])), 0);
    }

    #[test]
    fn sl3_adjoint() {
        let (e, lam) = setup(&[&[2, -1], &[-1, 2]], &[1, 1]);
        let l = irreducible_full(&e, lam, 6).unwrap();
        assert_eq!(l.total_dim(), 8);
        assert_eq!(l.dim(&Multidegree::new(vec![1, 1])), 2);
        let flavor = QuantumFlavor::new(e.cartan_arc(), e.denominator());
        assert!(check_relations(&flavor, &l).unwrap().holds());
    }

    #[test]
    fn verma_relations_hold() {
        let (e, lam) = setup(&[&[2, -1], &[-1, 2]], &[1, 2]);
        let v = verma(&e, lam, 3).unwrap();
        assert_eq!(v.dim(&Multidegree::new(vec![1, 1])), 2);
        assert_eq!(v.dim(&Multidegree::new(vec![2, 1])), 2);
        let flavor = QuantumFlavor::new(e.cartan_arc(), e.denominator());
        let report = check_relations(&flavor, &v).unwrap();
        assert!(report.holds(), "{:?}", report.failures);
        assert!(report.checked > 0);
    }

    #[test]
    fn broken_action_is_detected() {
        let (e, lam) = setup(&[&[2]], &[2]);
        let mut l = irreducible_full(&e, lam, 4).unwrap();
        let key = (0, Multidegree::new(vec![1]));
        let bad = l.raising[&key].scale(&QScalar::from_int(2));
        l.raising.insert(key, bad);
        let flavor = QuantumFlavor::new(e.cartan_arc(), e.denominator());
        assert!(!check_relations(&flavor, &l).unwrap().holds());
    }

    #[test]
    fn half_integral_weight_needs_denominator() {
        let cd = Arc::new(CartanDatum::from_rows(&[&[2]]).unwrap());
        let lam = Weight::from_coroot_values(&[crate::cartan::rat(1, 2)], &cd).unwrap();
        let coarse = PairingEngine::new(cd.clone()).unwrap();
        assert!(matches!(
            verma(&coarse, lam.clone(), 2),
            Err(Error::DenominatorTooSmall { .. })
        ));
        let den = cd.session_denominator(std::slice::from_ref(&lam)).unwrap();
        let fine = PairingEngine::with_denominator(cd, den).unwrap();
        let v = verma(&fine, lam, 2).unwrap();
        assert_eq!(v.total_dim(), 3);
        assert!(!v.cartan_value(0, &Multidegree::zero(1)).is_zero());
    }
}
