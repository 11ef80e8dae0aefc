//! Exact dense linear algebra over the fields used in this crate (Q and Q(v)),
//! plus fraction-free elimination for polynomial matrices over Z[v].

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalars::{Poly, QScalar};

/// A commutative field with exact equality.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(x: i64) -> Self;
    fn from_rational(x: &BigRational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;

    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    /// Pivot preference: smaller is cheaper.
    fn pivot_weight(&self) -> usize {
        0
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn from_rational(x: &BigRational) -> Self {
        x.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn pivot_weight(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl Field for QScalar {
    fn zero() -> Self {
        QScalar::zero()
    }
    fn one() -> Self {
        QScalar::one()
    }
    fn from_i64(x: i64) -> Self {
        QScalar::from_int(x)
    }
    fn from_rational(x: &BigRational) -> Self {
        QScalar::from_rational(x)
    }
    fn is_zero(&self) -> bool {
        QScalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        QScalar::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        QScalar::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        QScalar::mul(self, o)
    }
    fn neg(&self) -> Self {
        QScalar::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        QScalar::inv(self).ok()
    }
    fn pivot_weight(&self) -> usize {
        self.weight()
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = Matrix::<F>::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by_key(|&i| m.get(i, c).pivot_weight())
            else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let x = m.get(r, j).mul(&inv);
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rj = m.get(r, j);
                    if rj.is_zero() {
                        continue;
                    }
                    let x = m.get(i, j).sub(&f.mul(rj));
                    m.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![F::zero(); self.cols];
                x[f] = F::one();
                for (k, &p) in pivots.iter().enumerate() {
                    x[p] = r.get(k, f).neg();
                }
                x
            })
            .collect()
    }

    /// Basis of the left null space `{y : y^T M = 0}`.
    pub fn left_nullspace(&self) -> Vec<Vec<F>> {
        self.transpose().nullspace()
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                F::one()
            } else {
                F::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    pub fn determinant(&self) -> F {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = F::one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return F::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg();
            }
            let piv = m.get(c, c).clone();
            det = det.mul(&piv);
            let inv = piv.inv().unwrap();
            for i in c + 1..m.rows {
                let f = m.get(i, c).mul(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let x = m.get(i, j).sub(&f.mul(m.get(c, j)));
                    m.set(i, j, x);
                }
            }
        }
        det
    }

    /// Greedy choice of rows that are linearly independent, scanning top to bottom.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut echelon: Vec<(usize, Vec<F>)> = Vec::new();
        let mut chosen = Vec::new();
        for i in 0..self.rows {
            let mut v = self.row(i).to_vec();
            for (p, e) in &echelon {
                let f = v[*p].clone();
                if !f.is_zero() {
                    for (x, y) in v.iter_mut().zip(e) {
                        *x = x.sub(&f.mul(y));
                    }
                }
            }
            if let Some(p) = v.iter().position(|x| !x.is_zero()) {
                let inv = v[p].inv().unwrap();
                let v: Vec<F> = v.iter().map(|x| x.mul(&inv)).collect();
                echelon.push((p, v));
                chosen.push(i);
            }
        }
        chosen
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Self) -> Self {
        Matrix::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            self.get(i / o.rows, j / o.cols).mul(o.get(i % o.rows, j % o.cols))
        })
    }

    /// Add `block` into the submatrix with top-left corner `(r, c)`.
    pub fn add_block(&mut self, r: usize, c: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                let x = block.get(i, j);
                if !x.is_zero() {
                    let y = self.get(r + i, c + j).add(x);
                    self.set(r + i, c + j, y);
                }
            }
        }
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, o: &Self) -> Self {
        Matrix::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols).clone()
            } else {
                F::zero()
            }
        })
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

/// Result of fraction-free elimination on a polynomial matrix.
#[derive(Clone, Debug)]
pub struct PolyKernel {
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// Null-space basis with polynomial entries, one vector per free column.
    pub vectors: Vec<Vec<Poly>>,
}

/// Fraction-free Gauss-Jordan elimination over Z[v].
///
/// Every intermediate entry is a minor of the input, so each division by the
/// previous pivot is exact. Pivots are chosen with the smallest weight in their
/// column. For a free column `f` the kernel vector is `x_f = d`,
/// `x_{p_k} = -M[k][f]` where `d` is the final pivot value.
pub fn fraction_free_kernel(input: &[Vec<Poly>]) -> PolyKernel {
    let rows = input.len();
    let cols = input.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Poly>> = input.to_vec();
    let mut prev = Poly::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].weight())
        else {
            continue;
        };
        m.swap(p, r);
        let piv = m[r][c].clone();
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c].clone();
            for j in 0..cols {
                if j == c {
                    row[j] = Poly::zero();
                    continue;
                }
                let num = piv.mul(&row[j]).sub(&f.mul(&pivot_row[j]));
                row[j] = num
                    .div_exact(&prev)
                    .expect("fraction-free step divides exactly");
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    let d = prev;
    let vectors = (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut x = vec![Poly::zero(); cols];
            x[f] = d.clone();
            for (k, &p) in pivots.iter().enumerate() {
                x[p] = m[k][f].neg();
            }
            primitive_vector(x)
        })
        .collect();
    PolyKernel {
        rank: pivots.len(),
        pivots,
        vectors,
    }
}

/// Divide a polynomial vector by the gcd of its entries and make the first nonzero entry's lead positive.
pub fn primitive_vector(mut x: Vec<Poly>) -> Vec<Poly> {
    let mut g = Poly::zero();
    for e in &x {
        if !e.is_zero() {
            g = g.gcd(e);
            if g.is_one() {
                break;
            }
        }
    }
    if g.is_zero() {
        return x;
    }
    let neg = x
        .iter()
        .find(|e| !e.is_zero())
        .and_then(|e| e.lead())
        .is_some_and(|l| l < &BigInt::zero());
    for e in x.iter_mut() {
        let y = if g.is_one() { e.clone() } else { e.div_exact(&g).unwrap() };
        *e = if neg { y.neg() } else { y };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn rref_rank_nullspace() {
        let m = Matrix::from_rows(vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
            vec![q(1), q(0), q(1)],
        ]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(Field::is_zero));
        assert_eq!(m.left_nullspace().len(), 1);
    }

    #[test]
    fn inverse_and_determinant() {
        let m = Matrix::from_rows(vec![vec![q(2), q(-1)], vec![q(-1), q(2)]]);
        assert_eq!(m.determinant(), q(3));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        let sing = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(1), q(1)]]);
        assert!(sing.inverse().is_none());
        assert_eq!(sing.determinant(), q(0));
    }

    #[test]
    fn fraction_free_matches_field_elimination() {
        let p = |c: &[i64]| Poly::from_i64(c);
        // rank-2 3x3 matrix with polynomial entries: row3 = v*row1 + row2
        let r1 = vec![p(&[1, 1]), p(&[0, 1]), p(&[2])];
        let r2 = vec![p(&[0, 0, 1]), p(&[1]), p(&[-1, 1])];
        let r3: Vec<Poly> = r1
            .iter()
            .zip(&r2)
            .map(|(a, b)| a.mul(&p(&[0, 1])).add(b))
            .collect();
        let k = fraction_free_kernel(&[r1.clone(), r2.clone(), r3.clone()]);
        assert_eq!(k.rank, 2);
        assert_eq!(k.vectors.len(), 1);
        for row in [&r1, &r2, &r3] {
            let dot = row
                .iter()
                .zip(&k.vectors[0])
                .fold(Poly::zero(), |acc, (a, b)| acc.add(&a.mul(b)));
            assert!(dot.is_zero());
        }
    }
}
