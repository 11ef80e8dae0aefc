//! The Knizhnik–Zamolodchikov system on tensor powers of a classical module, its braid
//! monodromy, and comparison with the braid action of the R-matrix.
//!
//! `dF/dz_i = (hbar / 2 pi i) sum_{j != i} Omega_ij F / (z_i - z_j)`. Along a path `z(t)` this is
//! the linear system `dF/dt = A(t) F` with
//! `A(t) = (hbar / 2 pi i) sum_{i<j} Omega_ij (z_i' - z_j') / (z_i - z_j)`, integrated with an
//! embedded Dormand–Prince 5(4) pair.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::cartan::Rational;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalars::{Denominator, QScalar};

pub type CMatrix = DMatrix<Complex64>;

/// Sense of the half-turn exchanging `z_i` and `z_{i+1}`: `+1` is counterclockwise about their
/// midpoint. With `q = e^{hbar/2}` this matches `sigma R` rather than its inverse.
pub const EXCHANGE_ORIENTATION: f64 = 1.0;

/// Integration controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    /// Refuse paths that come closer than this to a diagonal.
    pub safety_radius: f64,
    /// Step ceiling as a fraction of `distance to diagonal / speed`.
    pub step_fraction: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            relative: 1e-9,
            absolute: 1e-12,
            safety_radius: 1e-3,
            step_fraction: 0.1,
            max_steps: 2_000_000,
        }
    }
}

impl Tolerance {
    pub fn with_relative(relative: f64) -> Self {
        Tolerance {
            relative,
            absolute: relative * 1e-3,
            ..Tolerance::default()
        }
    }
}

/// A smooth curve `[0, 1] -> C^k`.
pub trait Path: Sync {
    fn points(&self) -> usize;
    fn position(&self, t: f64) -> Vec<Complex64>;
    fn velocity(&self, t: f64) -> Vec<Complex64>;
}

/// The reference configuration `(1, 2, ..., k)`.
pub fn reference_point(k: usize) -> Vec<Complex64> {
    (1..=k).map(|x| Complex64::new(x as f64, 0.0)).collect()
}

/// `z_i` and `z_{i+1}` swap by a half-turn about their midpoint; the others stay put.
#[derive(Clone, Debug)]
pub struct ExchangePath {
    pub base: Vec<Complex64>,
    /// 0-based index of the first point of the pair.
    pub i: usize,
    pub orientation: f64,
}

impl ExchangePath {
    pub fn new(k: usize, i: usize) -> Self {
        ExchangePath {
            base: reference_point(k),
            i,
            orientation: EXCHANGE_ORIENTATION,
        }
    }

    fn half_gap(&self) -> Complex64 {
        (self.base[self.i + 1] - self.base[self.i]) / 2.0
    }
}

impl Path for ExchangePath {
    fn points(&self) -> usize {
        self.base.len()
    }

    fn position(&self, t: f64) -> Vec<Complex64> {
        let mid = (self.base[self.i] + self.base[self.i + 1]) / 2.0;
        let rot = Complex64::from_polar(1.0, self.orientation * PI * t) * self.half_gap();
        let mut z = self.base.clone();
        z[self.i] = mid - rot;
        z[self.i + 1] = mid + rot;
        z
    }

    fn velocity(&self, t: f64) -> Vec<Complex64> {
        let d = Complex64::new(0.0, self.orientation * PI)
            * Complex64::from_polar(1.0, self.orientation * PI * t)
            * self.half_gap();
        let mut v = vec![Complex64::new(0.0, 0.0); self.base.len()];
        v[self.i] = -d;
        v[self.i + 1] = d;
        v
    }
}

/// Each listed point runs once around a circle of the given radius centred at its base position,
/// starting and ending there. Contractible when no circle encloses another point.
#[derive(Clone, Debug)]
pub struct CircleLoop {
    pub base: Vec<Complex64>,
    /// `(point, radius, initial phase, turns)`.
    pub movers: Vec<(usize, f64, f64, i32)>,
}

impl Path for CircleLoop {
    fn points(&self) -> usize {
        self.base.len()
    }

    fn position(&self, t: f64) -> Vec<Complex64> {
        let mut z = self.base.clone();
        for &(p, r, phase, turns) in &self.movers {
            let angle = phase + 2.0 * PI * turns as f64 * t;
            z[p] += r * (Complex64::from_polar(1.0, angle) - Complex64::from_polar(1.0, phase));
        }
        z
    }

    fn velocity(&self, t: f64) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.base.len()];
        for &(p, r, phase, turns) in &self.movers {
            let w = 2.0 * PI * turns as f64;
            let angle = phase + w * t;
            v[p] += r * w * Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, angle);
        }
        v
    }
}

/// Straight segment between two configurations.
#[derive(Clone, Debug)]
pub struct SegmentPath {
    pub start: Vec<Complex64>,
    pub end: Vec<Complex64>,
}

impl Path for SegmentPath {
    fn points(&self) -> usize {
        self.start.len()
    }

    fn position(&self, t: f64) -> Vec<Complex64> {
        self.start.iter().zip(&self.end).map(|(a, b)| a + (b - a) * t).collect()
    }

    fn velocity(&self, _t: f64) -> Vec<Complex64> {
        self.start.iter().zip(&self.end).map(|(a, b)| b - a).collect()
    }
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn to_complex(m: &Matrix<Rational>) -> CMatrix {
    CMatrix::from_fn(m.rows(), m.cols(), |i, j| Complex64::new(rational_to_f64(m.get(i, j)), 0.0))
}

/// An exact matrix over Q(v) evaluated at `q = e^{hbar/2}`.
pub fn evaluate_matrix(m: &Matrix<QScalar>, hbar: Complex64, den: Denominator) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let x = m.get(i, j);
            if !x.is_zero() {
                out[(i, j)] = x.evaluate_numeric(hbar, den)?;
            }
        }
    }
    Ok(out)
}

/// Embed an operator on `V (x) V` acting on factors `a < b` of `V^{(x) k}`.
pub fn embed_pair(op: &CMatrix, dim: usize, k: usize, a: usize, b: usize) -> CMatrix {
    let total = dim.pow(k as u32);
    let place = |f: usize| dim.pow((k - 1 - f) as u32);
    let (pa, pb) = (place(a), place(b));
    let mut out = CMatrix::zeros(total, total);
    for col in 0..total {
        let xa = (col / pa) % dim;
        let xb = (col / pb) % dim;
        let rest = col - xa * pa - xb * pb;
        for ya in 0..dim {
            for yb in 0..dim {
                let c = op[(ya * dim + yb, xa * dim + xb)];
                if c != Complex64::new(0.0, 0.0) {
                    out[(rest + ya * pa + yb * pb, col)] += c;
                }
            }
        }
    }
    out
}

/// The permutation swapping factors `i` and `i+1` of `V^{(x) k}`.
pub fn swap_factors(dim: usize, k: usize, i: usize) -> CMatrix {
    let mut flip = CMatrix::zeros(dim * dim, dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            flip[(b * dim + a, a * dim + b)] = Complex64::new(1.0, 0.0);
        }
    }
    embed_pair(&flip, dim, k, i, i + 1)
}

/// The KZ system on `V^{(x) k}`, optionally restricted to a set of basis indices that spans a
/// sum of total-weight blocks.
#[derive(Clone, Debug)]
pub struct KzSystem {
    k: usize,
    dim: usize,
    /// `Omega_ab` for `a < b`, in lexicographic order of pairs.
    omegas: Vec<((usize, usize), CMatrix)>,
    hbar: Complex64,
    block: Option<Vec<usize>>,
}

impl KzSystem {
    /// `omega` is the Casimir tensor on `V (x) V`.
    pub fn new(omega: &CMatrix, dim: usize, k: usize, hbar: Complex64) -> Result<Self> {
        if omega.nrows() != dim * dim || omega.ncols() != dim * dim {
            return Err(Error::Dimension(format!(
                "Casimir is {}x{}, expected {}x{}",
                omega.nrows(),
                omega.ncols(),
                dim * dim,
                dim * dim
            )));
        }
        if k < 2 {
            return Err(Error::Dimension(format!("KZ needs at least two points, got {}", k)));
        }
        let mut omegas = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                omegas.push(((a, b), embed_pair(omega, dim, k, a, b)));
            }
        }
        Ok(KzSystem {
            k,
            dim,
            omegas,
            hbar,
            block: None,
        })
    }

    /// Restrict every operator to the span of the given basis vectors, which must be invariant.
    pub fn restricted(mut self, indices: Vec<usize>) -> Self {
        let pick = |m: &CMatrix| CMatrix::from_fn(indices.len(), indices.len(), |r, c| m[(indices[r], indices[c])]);
        self.omegas = self.omegas.iter().map(|(p, m)| (*p, pick(m))).collect();
        self.block = Some(indices);
        self
    }

    pub fn points(&self) -> usize {
        self.k
    }

    pub fn factor_dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.omegas[0].1.nrows()
    }

    pub fn hbar(&self) -> Complex64 {
        self.hbar
    }

    pub fn block(&self) -> Option<&[usize]> {
        self.block.as_deref()
    }

    pub fn omega(&self, a: usize, b: usize) -> &CMatrix {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        &self.omegas.iter().find(|(p, _)| *p == (a, b)).expect("pair in range").1
    }

    /// Largest entry of `[Omega_ij, Omega_ik + Omega_jk]` and of `[Omega_ij, Omega_kl]` over distinct
    /// indices; zero exactly when the connection is flat.
    pub fn integrability_defect(&self) -> f64 {
        let norm = |m: &CMatrix| m.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let comm = |x: &CMatrix, y: &CMatrix| x * y - y * x;
        let mut worst: f64 = 0.0;
        for i in 0..self.k {
            for j in (0..self.k).filter(|&j| j != i) {
                for k in (0..self.k).filter(|&k| k != i && k != j) {
                    let sum = self.omega(i, k) + self.omega(j, k);
                    worst = worst.max(norm(&comm(self.omega(i, j), &sum)));
                    for l in (0..self.k).filter(|&l| l != i && l != j && l != k) {
                        worst = worst.max(norm(&comm(self.omega(i, j), self.omega(k, l))));
                    }
                }
            }
        }
        worst
    }

    fn coefficient(&self, z: &[Complex64], dz: &[Complex64]) -> CMatrix {
        let factor = self.hbar / Complex64::new(0.0, 2.0 * PI);
        let mut a = CMatrix::zeros(self.size(), self.size());
        for ((i, j), m) in &self.omegas {
            let w = factor * (dz[*i] - dz[*j]) / (z[*i] - z[*j]);
            a += m * w;
        }
        a
    }

    fn distance(z: &[Complex64]) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                d = d.min((z[i] - z[j]).norm());
            }
        }
        d
    }

    /// Fundamental solution transported along `path`: `F(1) = T F(0)`.
    pub fn transport(&self, path: &dyn Path, tol: &Tolerance) -> Result<CMatrix> {
        if path.points() != self.k {
            return Err(Error::Dimension(format!(
                "path moves {} points, system has {}",
                path.points(),
                self.k
            )));
        }
        let n = self.size();
        let mut y = CMatrix::identity(n, n);
        if self.hbar == Complex64::new(0.0, 0.0) {
            self.scan_path(path, tol)?;
            return Ok(y);
        }
        let rhs = |t: f64, y: &CMatrix| -> Result<CMatrix> {
            let z = path.position(t);
            let dist = Self::distance(&z);
            if dist < tol.safety_radius {
                return Err(Error::NearDiagonal {
                    t,
                    distance: dist,
                    radius: tol.safety_radius,
                });
            }
            Ok(self.coefficient(&z, &path.velocity(t)) * y)
        };
        let ceiling = |t: f64| -> f64 {
            let z = path.position(t);
            let speed = path.velocity(t).iter().map(|v| v.norm()).fold(0.0, f64::max);
            if speed == 0.0 {
                1.0
            } else {
                (tol.step_fraction * Self::distance(&z) / speed).min(1.0)
            }
        };
        let mut t = 0.0;
        let mut h = ceiling(0.0).min(1e-2);
        let mut k1 = rhs(t, &y)?;
        let mut steps = 0;
        while t < 1.0 {
            steps += 1;
            if steps > tol.max_steps {
                return Err(Error::Integration(format!("step limit {} reached at t = {}", tol.max_steps, t)));
            }
            h = h.min(ceiling(t)).min(1.0 - t);
            if h < 1e-14 {
                return Err(Error::Integration(format!("step size underflow at t = {}", t)));
            }
            let (y5, err, k7) = dopri_step(&rhs, t, &y, &k1, h)?;
            let scale = tol.absolute + tol.relative * y.iter().chain(y5.iter()).map(|x| x.norm()).fold(0.0, f64::max);
            let ratio = err / scale;
            if ratio <= 1.0 {
                t += h;
                y = y5;
                k1 = k7;
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        }
        Ok(y)
    }

    fn scan_path(&self, path: &dyn Path, tol: &Tolerance) -> Result<()> {
        let samples = 4096;
        for s in 0..=samples {
            let t = s as f64 / samples as f64;
            let dist = Self::distance(&path.position(t));
            if dist < tol.safety_radius {
                return Err(Error::NearDiagonal {
                    t,
                    distance: dist,
                    radius: tol.safety_radius,
                });
            }
        }
        Ok(())
    }

    /// Monodromy of the `i`-th generator (0-based): transport along the exchange path, followed by
    /// the identification of the swapped fiber with the reference fiber.
    pub fn braid_monodromy(&self, i: usize, tol: &Tolerance) -> Result<CMatrix> {
        if i + 1 >= self.k {
            return Err(Error::Dimension(format!("generator {} does not exist on {} strands", i + 1, self.k)));
        }
        let transport = self.transport(&ExchangePath::new(self.k, i), tol)?;
        let swap = swap_factors(self.dim, self.k, i);
        let swap = match &self.block {
            Some(idx) => CMatrix::from_fn(idx.len(), idx.len(), |r, c| swap[(idx[r], idx[c])]),
            None => swap,
        };
        Ok(swap * transport)
    }

    /// All generators, integrated concurrently, in generator order.
    pub fn all_monodromies(&self, tol: &Tolerance) -> Result<Vec<CMatrix>> {
        (0..self.k - 1)
            .into_par_iter()
            .map(|i| self.braid_monodromy(i, tol))
            .collect()
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand–Prince step; returns the fifth-order solution, the error estimate and the slope
/// at the new point (reused as the first stage of the next step).
fn dopri_step(
    rhs: &dyn Fn(f64, &CMatrix) -> Result<CMatrix>,
    t: f64,
    y: &CMatrix,
    k1: &CMatrix,
    h: f64,
) -> Result<(CMatrix, f64, CMatrix)> {
    let s = |c: f64| Complex64::new(h * c, 0.0);
    let k2 = rhs(t + h / 5.0, &(y + k1 * s(A21)))?;
    let k3 = rhs(t + 3.0 * h / 10.0, &(y + k1 * s(A31) + &k2 * s(A32)))?;
    let k4 = rhs(t + 4.0 * h / 5.0, &(y + k1 * s(A41) + &k2 * s(A42) + &k3 * s(A43)))?;
    let k5 = rhs(
        t + 8.0 * h / 9.0,
        &(y + k1 * s(A51) + &k2 * s(A52) + &k3 * s(A53) + &k4 * s(A54)),
    )?;
    let k6 = rhs(
        t + h,
        &(y + k1 * s(A61) + &k2 * s(A62) + &k3 * s(A63) + &k4 * s(A64) + &k5 * s(A65)),
    )?;
    let y5 = y + k1 * s(B1) + &k3 * s(B3) + &k4 * s(B4) + &k5 * s(B5) + &k6 * s(B6);
    let k7 = rhs(t + h, &y5)?;
    let err = k1 * s(E1) + &k3 * s(E3) + &k4 * s(E4) + &k5 * s(E5) + &k6 * s(E6) + &k7 * s(E7);
    let err = err.iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok((y5, err, k7))
}

/// Eigenvalues via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().cloned().collect()
}

/// Largest distance under a greedy nearest-neighbour matching of two multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("sizes agree");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// A word in the braid generators and their inverses: `(generator, exponent +-1)`, 0-based.
pub type BraidWord = Vec<(usize, i8)>;

/// Every word of length `1..=max_len` in `strands - 1` generators and their inverses,
/// shortest first, then lexicographic.
pub fn braid_words(strands: usize, max_len: usize) -> Vec<BraidWord> {
    let letters: Vec<(usize, i8)> = (0..strands.saturating_sub(1))
        .flat_map(|i| [(i, 1), (i, -1)])
        .collect();
    let mut out = Vec::new();
    let mut layer: Vec<BraidWord> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn format_word(w: &BraidWord) -> String {
    w.iter()
        .map(|(i, e)| if *e > 0 { format!("b{}", i + 1) } else { format!("b{}^-1", i + 1) })
        .collect::<Vec<_>>()
        .join(" ")
}

fn word_matrix(w: &BraidWord, gens: &[CMatrix], invs: &[CMatrix]) -> CMatrix {
    let n = gens[0].nrows();
    let mut acc = CMatrix::identity(n, n);
    for (i, e) in w {
        acc = if *e > 0 { acc * &gens[*i] } else { acc * &invs[*i] };
    }
    acc
}

#[derive(Clone, Debug)]
pub struct TraceRow {
    pub word: String,
    pub monodromy: Complex64,
    pub braiding: Complex64,
}

impl TraceRow {
    pub fn deviation(&self) -> f64 {
        (self.monodromy - self.braiding).norm()
    }
}

#[derive(Clone, Debug)]
pub struct EigenRow {
    pub generator: usize,
    pub monodromy: Vec<Complex64>,
    pub braiding: Vec<Complex64>,
    pub deviation: f64,
}

/// Conjugation invariants of the two braid group representations.
#[derive(Clone, Debug)]
pub struct MonodromyReport {
    pub monodromy: Vec<CMatrix>,
    pub braiding: Vec<CMatrix>,
    pub traces: Vec<TraceRow>,
    pub eigenvalues: Vec<EigenRow>,
}

impl MonodromyReport {
    pub fn max_trace_deviation(&self) -> f64 {
        self.traces.iter().map(|r| r.deviation()).fold(0.0, f64::max)
    }

    pub fn max_eigen_deviation(&self) -> f64 {
        self.eigenvalues.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }

    pub fn max_deviation(&self) -> f64 {
        self.max_trace_deviation().max(self.max_eigen_deviation())
    }
}

/// Compare two lists of generator matrices by traces of words up to `word_len` and generator
/// eigenvalues.
pub fn compare_representations(monodromy: Vec<CMatrix>, braiding: Vec<CMatrix>, strands: usize, word_len: usize) -> Result<MonodromyReport> {
    let invert = |ms: &[CMatrix]| -> Result<Vec<CMatrix>> {
        ms.iter()
            .map(|m| {
                m.clone()
                    .try_inverse()
                    .ok_or_else(|| Error::Integration("braid generator is singular".into()))
            })
            .collect()
    };
    let mono_inv = invert(&monodromy)?;
    let braid_inv = invert(&braiding)?;
    let traces = braid_words(strands, word_len)
        .into_iter()
        .map(|w| TraceRow {
            word: format_word(&w),
            monodromy: word_matrix(&w, &monodromy, &mono_inv).trace(),
            braiding: word_matrix(&w, &braiding, &braid_inv).trace(),
        })
        .collect();
    let eigen = monodromy
        .iter()
        .zip(&braiding)
        .enumerate()
        .map(|(g, (a, b))| {
            let ea = eigenvalues(a);
            let eb = eigenvalues(b);
            let deviation = multiset_distance(&ea, &eb);
            EigenRow {
                generator: g,
                monodromy: ea,
                braiding: eb,
                deviation,
            }
        })
        .collect();
    Ok(MonodromyReport {
        monodromy,
        braiding,
        traces,
        eigenvalues: eigen,
    })
}

/// Numeric braid generators `(sigma R)_{i,i+1}` on `V^{(x) strands}` from an exact `sigma R`.
pub fn braiding_generators(check: &Matrix<QScalar>, dim: usize, strands: usize, hbar: Complex64, den: Denominator) -> Result<Vec<CMatrix>> {
    let numeric = evaluate_matrix(check, hbar, den)?;
    Ok((0..strands - 1).map(|i| embed_pair(&numeric, dim, strands, i, i + 1)).collect())
}

/// Transport around a contractible loop in which the first and last points circle their base
/// positions with different radii and phases; the result should be the identity.
pub fn contractible_loop(k: usize) -> CircleLoop {
    let mut movers = vec![(0, 0.35, 0.3, 1)];
    if k > 2 {
        movers.push((k - 1, 0.25, 1.9, -1));
    }
    if k > 3 {
        movers.push((1, 0.2, 4.0, 2));
    }
    CircleLoop {
        base: reference_point(k),
        movers,
    }
}

pub fn identity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    (m - CMatrix::identity(n, n)).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Everything needed to run the comparison for one highest weight.
#[derive(Clone, Debug)]
pub struct DkSetup {
    pub strands: usize,
    pub hbar: Complex64,
    pub tolerance: Tolerance,
    pub word_len: usize,
    /// Depth bound used to build the (finite) irreducible modules.
    pub max_depth: usize,
}

impl Default for DkSetup {
    fn default() -> Self {
        DkSetup {
            strands: 3,
            hbar: Complex64::new(0.1, 0.0),
            tolerance: Tolerance::default(),
            word_len: 4,
            max_depth: 8,
        }
    }
}

/// KZ monodromy of the classical `L(lambda)^{(x) k}` against `sigma R` on the quantum `L(lambda)^{(x) k}`.
pub fn drinfeld_kohno_compare(
    engine: &crate::qpairing::PairingEngine,
    side: &crate::classical::ClassicalSide,
    highest: &crate::cartan::Weight,
    setup: &DkSetup,
) -> Result<MonodromyReport> {
    let quantum = crate::qmodules::irreducible_full(engine, highest.clone(), setup.max_depth)?;
    let action = crate::rmatrix::ModuleAction::new(&quantum, engine.denominator())?;
    let classical = crate::classical::classical_irreducible_full(side, highest.clone(), setup.max_depth)?;
    let dim = action.dim();
    if classical.total_dim() != dim {
        return Err(Error::Internal(format!(
            "classical module has dimension {}, quantum {}",
            classical.total_dim(),
            dim
        )));
    }
    let omega = to_complex(&crate::classical::casimir_full(side, &classical, &classical)?);
    let system = KzSystem::new(&omega, dim, setup.strands, setup.hbar)?;
    let monodromy = system.all_monodromies(&setup.tolerance)?;
    let check = crate::rmatrix::braiding(engine, &action, &action)?;
    let braiding = braiding_generators(&check, dim, setup.strands, setup.hbar, engine.denominator())?;
    compare_representations(monodromy, braiding, setup.strands, setup.word_len)
}

/// Transport around `contractible_loop` for the classical `L(lambda)^{(x) k}`.
pub fn loop_defect(
    side: &crate::classical::ClassicalSide,
    highest: &crate::cartan::Weight,
    setup: &DkSetup,
) -> Result<f64> {
    let classical = crate::classical::classical_irreducible_full(side, highest.clone(), setup.max_depth)?;
    let omega = to_complex(&crate::classical::casimir_full(side, &classical, &classical)?);
    let system = KzSystem::new(&omega, classical.total_dim(), setup.strands, setup.hbar)?;
    let t = system.transport(&contractible_loop(setup.strands), &setup.tolerance)?;
    Ok(identity_defect(&t))
}

/// Largest distance between the `hbar = 0` monodromies and the plain factor swaps.
pub fn permutation_defect(
    side: &crate::classical::ClassicalSide,
    highest: &crate::cartan::Weight,
    setup: &DkSetup,
) -> Result<f64> {
    let classical = crate::classical::classical_irreducible_full(side, highest.clone(), setup.max_depth)?;
    let dim = classical.total_dim();
    let omega = to_complex(&crate::classical::casimir_full(side, &classical, &classical)?);
    let system = KzSystem::new(&omega, dim, setup.strands, Complex64::new(0.0, 0.0))?;
    let mut worst: f64 = 0.0;
    for (i, m) in system.all_monodromies(&setup.tolerance)?.iter().enumerate() {
        worst = worst.max((m - swap_factors(dim, setup.strands, i)).camax());
    }
    Ok(worst)
}
