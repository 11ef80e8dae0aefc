//! Symmetrizable matrices, their realizations and the invariant form on the Cartan subalgebra.
//!
//! Coordinates on the Cartan subalgebra `h` are taken in the basis
//! `h_1, ..., h_n, c_1, ..., c_{n-r}` where the first `n` vectors are the
//! coroots and the remaining ones extend the realization when `A` has rank
//! `r < n`. A functional on `h` is stored by its values on this basis.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::freealg::Multidegree;
use crate::linalg::Matrix;
use crate::scalars::Denominator;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// A symmetrizable matrix with a fixed realization `(h, simple roots, simple coroots)`
/// and a nondegenerate invariant form on `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanDatum {
    n: usize,
    a: Matrix<Rational>,
    d: Vec<Rational>,
    h_dim: usize,
    /// Row i: the simple root alpha_i evaluated on the basis of h.
    alpha: Matrix<Rational>,
    /// Row i: coordinates of the coroot h_i.
    h_coords: Matrix<Rational>,
    g: Matrix<Rational>,
    g_inv: Matrix<Rational>,
    /// (alpha_i, alpha_j) = d_i a_ij.
    root_form: Matrix<Rational>,
}

/// Symmetrizers `d` with `d_i a_ij = d_j a_ji`, normalized to 1 at the first index of each
/// connected component of the graph with edges `{i, j : a_ij != 0}`.
pub fn symmetrize(a: &Matrix<Rational>) -> Result<Vec<Rational>> {
    let n = a.rows();
    if a.cols() != n || n == 0 {
        return Err(Error::Dimension(format!(
            "Cartan matrix must be square and nonempty, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    for i in 0..n {
        for j in i + 1..n {
            if a.get(i, j).is_zero() != a.get(j, i).is_zero() {
                let (z, nz) = if a.get(i, j).is_zero() { (i, j) } else { (j, i) };
                return Err(Error::NotSymmetrizable {
                    pair: (i + 1, j + 1),
                    cycle: vec![i + 1, j + 1],
                    reason: format!(
                        "a_{}{} = 0 but a_{}{} != 0 forces d_{} = 0",
                        z + 1,
                        nz + 1,
                        nz + 1,
                        z + 1,
                        nz + 1
                    ),
                });
            }
        }
    }
    let mut d: Vec<Option<Rational>> = vec![None; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for root in 0..n {
        if d[root].is_some() {
            continue;
        }
        d[root] = Some(Rational::one());
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let di = d[i].clone().unwrap();
            for j in 0..n {
                if j == i || a.get(i, j).is_zero() {
                    continue;
                }
                let forced = &di * a.get(i, j) / a.get(j, i);
                match &d[j] {
                    None => {
                        d[j] = Some(forced);
                        parent[j] = Some(i);
                        queue.push_back(j);
                    }
                    Some(dj) if *dj != forced => {
                        let path = |mut k: usize| {
                            let mut p = vec![k + 1];
                            while let Some(up) = parent[k] {
                                p.push(up + 1);
                                k = up;
                            }
                            p
                        };
                        let mut cycle = path(i);
                        cycle.reverse();
                        let mut back = path(j);
                        back.pop();
                        back.reverse();
                        cycle.extend(back.into_iter().rev());
                        cycle.push(cycle[0]);
                        return Err(Error::NotSymmetrizable {
                            pair: (i.min(j) + 1, i.max(j) + 1),
                            cycle,
                            reason: "products of a_ij / a_ji around a cycle differ from 1".into(),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(d.into_iter().map(|x| x.unwrap()).collect())
}

/// Build the realization and the invariant form for a symmetrizable `a` with symmetrizers `d`.
pub fn build_realization(a: &Matrix<Rational>, d: &[Rational]) -> Result<CartanDatum> {
    let n = a.rows();
    if a.cols() != n || d.len() != n {
        return Err(Error::Dimension(format!(
            "need a square matrix and {} symmetrizers, got {}x{} and {}",
            n,
            a.rows(),
            a.cols(),
            d.len()
        )));
    }
    for (i, di) in d.iter().enumerate() {
        if di.is_zero() {
            return Err(Error::NotSymmetrizable {
                pair: (i + 1, i + 1),
                cycle: vec![i + 1],
                reason: format!("d_{} = 0", i + 1),
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if &d[i] * a.get(i, j) != &d[j] * a.get(j, i) {
                return Err(Error::NotSymmetrizable {
                    pair: (i.min(j) + 1, i.max(j) + 1),
                    cycle: vec![i + 1, j + 1, i + 1],
                    reason: "supplied d does not symmetrize A".into(),
                });
            }
        }
    }
    let at = a.transpose();
    let independent = at.independent_rows();
    let rank = independent.len();
    let extra: Vec<usize> = (0..n).filter(|i| !independent.contains(i)).collect();
    let h_dim = 2 * n - rank;

    // alpha_i(h_j) = a_ji; alpha_i(c_k) = 1 iff i is the k-th dependent row of A^T
    let alpha = Matrix::from_fn(n, h_dim, |i, j| {
        if j < n {
            a.get(j, i).clone()
        } else if extra[j - n] == i {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let h_coords = Matrix::from_fn(n, h_dim, |i, j| if i == j { int(1) } else { int(0) });
    // (x, h_i) = d_i^{-1} alpha_i(x); the extra vectors pair to zero among themselves
    let g = Matrix::from_fn(h_dim, h_dim, |j, i| {
        if i < n {
            alpha.get(i, j) / &d[i]
        } else if j < n {
            alpha.get(j, i) / &d[j]
        } else {
            Rational::zero()
        }
    });
    let g_inv = g
        .inverse()
        .ok_or_else(|| Error::Internal("realization form is degenerate".into()))?;
    let root_form = Matrix::from_fn(n, n, |i, j| &d[i] * a.get(i, j));
    let cd = CartanDatum {
        n,
        a: a.clone(),
        d: d.to_vec(),
        h_dim,
        alpha,
        h_coords,
        g,
        g_inv,
        root_form,
    };
    cd.check_invariants()?;
    Ok(cd)
}

impl CartanDatum {
    /// Symmetrize and realize in one step.
    pub fn from_matrix(a: &Matrix<Rational>) -> Result<Self> {
        let d = symmetrize(a)?;
        build_realization(a, &d)
    }

    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect());
        CartanDatum::from_matrix(&m)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn matrix(&self) -> &Matrix<Rational> {
        &self.a
    }

    pub fn a(&self, i: usize, j: usize) -> &Rational {
        self.a.get(i, j)
    }

    pub fn symmetrizers(&self) -> &[Rational] {
        &self.d
    }

    pub fn d(&self, i: usize) -> &Rational {
        &self.d[i]
    }

    pub fn alpha(&self) -> &Matrix<Rational> {
        &self.alpha
    }

    pub fn coroots(&self) -> &Matrix<Rational> {
        &self.h_coords
    }

    pub fn form(&self) -> &Matrix<Rational> {
        &self.g
    }

    pub fn form_inverse(&self) -> &Matrix<Rational> {
        &self.g_inv
    }

    /// `(alpha_i, alpha_j) = d_i a_ij`.
    pub fn root_pairing(&self, i: usize, j: usize) -> &Rational {
        self.root_form.get(i, j)
    }

    /// `a_ii = 2` and off-diagonal entries are nonpositive integers.
    pub fn is_generalized_cartan(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let x = self.a.get(i, j);
                if i == j {
                    *x == int(2)
                } else {
                    x.is_integer() && !x.is_positive()
                }
            })
        })
    }

    /// Coordinates of `gamma_i = d_i h_i`.
    pub fn gamma(&self, i: usize) -> Vec<Rational> {
        self.h_coords.row(i).iter().map(|x| x * &self.d[i]).collect()
    }

    /// The `(,)` pairing of two vectors of `h` in coordinates.
    pub fn h_pairing(&self, x: &[Rational], y: &[Rational]) -> Rational {
        bilinear(&self.g, x, y)
    }

    /// Evaluate a functional (values on the basis) at a vector (coordinates).
    pub fn evaluate(&self, functional: &[Rational], h: &[Rational]) -> Rational {
        functional.iter().zip(h).map(|(a, b)| a * b).sum()
    }

    /// `(x, y)` for weights over this datum.
    pub fn weight_form(&self, x: &Weight, y: &Weight) -> Result<Rational> {
        let fx = x.functional(self)?;
        let fy = y.functional(self)?;
        Ok(bilinear(&self.g_inv, &fx, &fy))
    }

    /// `(alpha_i, mu)`.
    pub fn root_weight_pairing(&self, i: usize, mu: &Weight) -> Result<Rational> {
        // (alpha_i, lambda) = d_i lambda(h_i) on the base part
        self.check_weight(mu)?;
        let mut x = &self.d[i] * &mu.base[i];
        for (j, &m) in mu.offset.iter().enumerate() {
            if m != 0 {
                x -= self.root_pairing(i, j) * int(m as i64);
            }
        }
        Ok(x)
    }

    /// `mu(h_i)`.
    pub fn coroot_value(&self, i: usize, mu: &Weight) -> Result<Rational> {
        Ok(self.root_weight_pairing(i, mu)? / &self.d[i])
    }

    fn check_weight(&self, w: &Weight) -> Result<()> {
        if w.base.len() != self.h_dim || w.offset.len() != self.n {
            return Err(Error::Dimension(format!(
                "weight has {} base coordinates and {} offsets, datum needs {} and {}",
                w.base.len(),
                w.offset.len(),
                self.h_dim,
                self.n
            )));
        }
        Ok(())
    }

    /// Session denominator covering every q-exponent that arises from this datum
    /// and the supplied highest weights.
    pub fn session_denominator(&self, weights: &[Weight]) -> Result<Denominator> {
        let mut exps: Vec<Rational> = self.d.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                exps.push(self.root_pairing(i, j).clone());
            }
        }
        for (k, w) in weights.iter().enumerate() {
            for i in 0..self.n {
                exps.push(self.root_weight_pairing(i, w)?);
            }
            for w2 in &weights[..=k] {
                exps.push(self.weight_form(w, w2)?);
            }
        }
        Ok(Denominator::default().covering(exps.iter()))
    }

    /// Verify the realization invariants exactly.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Internal(format!("realization invariant failed: {}", what)));
        if self.alpha.mul(&self.h_coords.transpose()) != self.a.transpose() {
            return fail("alpha_i(h_j) = a_ji");
        }
        if self.alpha.rank() != self.n || self.h_coords.rank() != self.n {
            return fail("independence of simple roots and coroots");
        }
        if !self.g.is_symmetric() || self.g.mul(&self.g_inv) != Matrix::identity(self.h_dim) {
            return fail("symmetric nondegenerate form");
        }
        for i in 0..self.n {
            let col = self.g.mul_vec(self.h_coords.row(i));
            let expect: Vec<Rational> = self.alpha.row(i).iter().map(|x| x / &self.d[i]).collect();
            if col != expect {
                return fail("G h_i = d_i^{-1} alpha_i");
            }
            for j in 0..self.n {
                let ip = bilinear(&self.g_inv, self.alpha.row(i), self.alpha.row(j));
                if &ip != self.root_pairing(i, j) {
                    return fail("(alpha_i, alpha_j) = d_i a_ij");
                }
            }
        }
        Ok(())
    }
}

fn bilinear(m: &Matrix<Rational>, x: &[Rational], y: &[Rational]) -> Rational {
    let my = m.mul_vec(y);
    x.iter().zip(&my).map(|(a, b)| a * b).sum()
}

/// A weight `base - sum_i offset_i alpha_i`, where `base` is a functional on `h`
/// given by its values on the basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub base: Vec<Rational>,
    pub offset: Multidegree,
}

impl Weight {
    pub fn new(base: Vec<Rational>, offset: Multidegree) -> Self {
        Weight { base, offset }
    }

    /// The highest weight itself (zero offset).
    pub fn highest(base: Vec<Rational>, n: usize) -> Self {
        Weight {
            base,
            offset: Multidegree::zero(n),
        }
    }

    /// A weight from the values `lambda(h_i)` only, padding extension coordinates with zero.
    pub fn from_coroot_values(values: &[Rational], cd: &CartanDatum) -> Result<Self> {
        if values.len() != cd.rank() && values.len() != cd.h_dim() {
            return Err(Error::Dimension(format!(
                "highest weight needs {} or {} coordinates, got {}",
                cd.rank(),
                cd.h_dim(),
                values.len()
            )));
        }
        let mut base = values.to_vec();
        base.resize(cd.h_dim(), Rational::zero());
        Ok(Weight::highest(base, cd.rank()))
    }

    /// The root `sum_i m_i alpha_i` as a weight with zero base, stored as `0 - (-m)`; only
    /// nonnegative combinations are representable, so this returns `-(sum m_i alpha_i)`.
    pub fn negative_root(m: &Multidegree, h_dim: usize) -> Self {
        Weight {
            base: vec![Rational::zero(); h_dim],
            offset: m.clone(),
        }
    }

    /// Same base, offset shifted down by `m`.
    pub fn lowered(&self, m: &Multidegree) -> Self {
        Weight {
            base: self.base.clone(),
            offset: self.offset.add(m),
        }
    }

    /// Values on the basis of h of the functional `base - sum m_i alpha_i`.
    pub fn functional(&self, cd: &CartanDatum) -> Result<Vec<Rational>> {
        cd.check_weight(self)?;
        let mut f = self.base.clone();
        for (i, &m) in self.offset.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let mi = int(m as i64);
            for (fk, ak) in f.iter_mut().zip(cd.alpha.row(i)) {
                *fk -= &mi * ak;
            }
        }
        Ok(f)
    }

    /// Weights are comparable only over a common base.
    pub fn compare(&self, other: &Weight) -> Option<std::cmp::Ordering> {
        if self.base != other.base {
            return None;
        }
        // larger offset means lower weight
        match (self.offset.le(&other.offset), other.offset.le(&self.offset)) {
            (true, true) => Some(std::cmp::Ordering::Equal),
            (true, false) => Some(std::cmp::Ordering::Greater),
            (false, true) => Some(std::cmp::Ordering::Less),
            (false, false) => None,
        }
    }
}

/// Rational matrix from integer rows, for tests and examples.
pub fn int_matrix(rows: &[&[i64]]) -> Matrix<Rational> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrize_examples() {
        assert_eq!(symmetrize(&int_matrix(&[&[2, -1], &[-1, 2]])).unwrap(), vec![int(1), int(1)]);
        assert_eq!(symmetrize(&int_matrix(&[&[2, -2], &[-1, 2]])).unwrap(), vec![int(1), int(2)]);
        match symmetrize(&int_matrix(&[&[2, -1], &[0, 2]])) {
            Err(Error::NotSymmetrizable { pair, .. }) => assert_eq!(pair, (1, 2)),
            other => panic!("expected NotSymmetrizable, got {:?}", other),
        }
    }

    #[test]
    fn inconsistent_cycle_is_rejected() {
        // d1 a12 = d2 a21 -> d2 = 2 d1; d2 a23 = d3 a32 -> d3 = d2; d3 a31 = d1 a13 -> d1 = d3: contradiction
        let a = int_matrix(&[&[2, -2, -1], &[-1, 2, -1], &[-1, -1, 2]]);
        match symmetrize(&a) {
            Err(Error::NotSymmetrizable { cycle, .. }) => {
                assert_eq!(cycle.first(), cycle.last());
                assert!(cycle.len() >= 4);
            }
            other => panic!("expected NotSymmetrizable, got {:?}", other),
        }
    }

    #[test]
    fn rank_one_realization() {
        let cd = CartanDatum::from_rows(&[&[2]]).unwrap();
        assert_eq!(cd.h_dim(), 1);
        assert_eq!(cd.form(), &int_matrix(&[&[2]]));
        assert_eq!(cd.root_pairing(0, 0), &int(2));
    }

    #[test]
    fn sl3_form() {
        let cd = CartanDatum::from_rows(&[&[2, -1], &[-1, 2]]).unwrap();
        assert_eq!(cd.form(), &int_matrix(&[&[2, -1], &[-1, 2]]));
        let a1 = Weight::negative_root(&Multidegree::unit(2, 0), 2);
        let a2 = Weight::negative_root(&Multidegree::unit(2, 1), 2);
        assert_eq!(cd.weight_form(&a1, &a2).unwrap(), int(-1));
        // (gamma_i, gamma_j) = d_i a_ij
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(&cd.h_pairing(&cd.gamma(i), &cd.gamma(j)), cd.root_pairing(i, j));
            }
        }
    }

    #[test]
    fn sl2_weight_form() {
        let cd = CartanDatum::from_rows(&[&[2]]).unwrap();
        let lam = Weight::from_coroot_values(&[int(1)], &cd).unwrap();
        let a1 = Weight::negative_root(&Multidegree::unit(1, 0), 1);
        // (lambda, -alpha_1) = -d_1 lambda(h_1)
        assert_eq!(cd.weight_form(&lam, &a1).unwrap(), int(-1));
        assert_eq!(cd.weight_form(&a1, &a1).unwrap(), int(2));
        assert_eq!(cd.weight_form(&lam, &lam).unwrap(), rat(1, 2));
    }

    #[test]
    fn gamma_nonsymmetric() {
        let cd = CartanDatum::from_rows(&[&[2, -2], &[-1, 2]]).unwrap();
        assert_eq!(cd.symmetrizers(), &[int(1), int(2)]);
        let g2 = cd.gamma(1);
        assert_eq!(g2, vec![int(0), int(2)]);
        // alpha_1(gamma_2) = d_2 a_21 = (alpha_2, alpha_1)
        assert_eq!(cd.evaluate(cd.alpha().row(0), &g2), int(-2));
        assert_eq!(cd.root_pairing(1, 0), &int(-2));
    }

    #[test]
    fn affine_extension() {
        let cd = CartanDatum::from_rows(&[&[2, -2], &[-2, 2]]).unwrap();
        assert_eq!(cd.h_dim(), 3);
        assert!(!cd.form().determinant().is_zero());
        cd.check_invariants().unwrap();
    }

    #[test]
    fn rational_entries() {
        let a = Matrix::from_rows(vec![vec![int(2), rat(-1, 2)], vec![rat(-1, 2), int(2)]]);
        let cd = CartanDatum::from_matrix(&a).unwrap();
        let den = cd.session_denominator(&[]).unwrap();
        assert_eq!(den.value(), 2);
    }

    #[test]
    fn symmetrize_is_deterministic() {
        let a = int_matrix(&[&[2, -3, 0], &[-1, 2, -2], &[0, -1, 2]]);
        assert_eq!(symmetrize(&a).unwrap(), symmetrize(&a).unwrap());
        let d = symmetrize(&a).unwrap();
        assert_eq!(d[0], int(1));
    }
}
