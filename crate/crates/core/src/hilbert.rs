//! Dense complex linear algebra on small truncated Hilbert spaces.
//!
//! [`StateVector`] and [`OperatorMatrix`] are plain owned buffers; every
//! operation returns a new value. Dimensions are checked at the public
//! boundary ([`inner`], [`apply`], [`commutator`]) and return
//! [`Error::DimensionMismatch`]; the arithmetic operator impls panic on a
//! mismatch instead, like slice indexing.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Complex amplitude vector over a truncated Fock or Dicke basis.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    amp: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amp: Vec<Complex64>) -> Result<Self> {
        if amp.is_empty() {
            return Err(Error::InvalidParameter("state dimension must be >= 1".into()));
        }
        Ok(Self { amp })
    }

    pub fn from_real(amp: &[f64]) -> Result<Self> {
        Self::new(amp.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The zero vector. Panics if `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "state dimension must be >= 1");
        Self { amp: vec![ZERO; dim] }
    }

    /// Basis vector `e_k`. Panics if `k >= dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amp[k] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Returns the unit vector along `self`; the zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { amp: self.amp.iter().map(|a| a * c).collect() }
    }

    /// Zero-pads (or truncates) to `dim` levels. Truncation fails if it
    /// would drop any nonzero amplitude.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("state dimension must be >= 1".into()));
        }
        if dim < self.dim() && self.amp[dim..].iter().any(|a| *a != ZERO) {
            return Err(Error::InsufficientDimension { needed: self.support_len(), dim });
        }
        let mut amp = self.amp.clone();
        amp.resize(dim, ZERO);
        Ok(Self { amp })
    }

    /// One past the index of the last nonzero amplitude.
    pub fn support_len(&self) -> usize {
        self.amp.iter().rposition(|a| *a != ZERO).map_or(0, |i| i + 1)
    }

    /// Largest componentwise modulus of `self - other`. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|<self|other>|^2 / (|self|^2 |other|^2)`; insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        let ov = inner(self, other)?;
        Ok(ov.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// Multiplies by the unit phase that makes the first amplitude with
    /// modulus above `1e-12 * max|amp|` real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        let max = self.amp.iter().map(|a| a.norm()).fold(0.0, f64::max);
        match self.amp.iter().find(|a| a.norm() > 1e-12 * max) {
            Some(a) => self.scale(a.conj() / a.norm()),
            None => self.clone(),
        }
    }

    /// Multiplies by the unit phase that makes `<reference|self>` real and positive.
    pub fn aligned_to(&self, reference: &Self) -> Result<Self> {
        let ov = inner(reference, self)?;
        if ov.norm() == 0.0 {
            return Ok(self.clone());
        }
        Ok(self.scale(ov.conj() / ov.norm()))
    }
}

impl Index<usize> for StateVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.amp[i]
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amp.iter()).finish()
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        StateVector { amp: self.amp.iter().zip(&rhs.amp).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        StateVector { amp: self.amp.iter().zip(&rhs.amp).map(|(a, b)| a - b).collect() }
    }
}

/// `sum_n conj(u_n) v_n`.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    Ok(u.amp.iter().zip(&v.amp).map(|(a, b)| a.conj() * b).sum())
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl OperatorMatrix {
    /// The zero operator. Panics if `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be >= 1");
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Builds from rows; rejects ragged or non-square input.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::NotSquare { rows: dim, cols: r.len() });
            }
            data.extend(r);
        }
        Ok(Self { dim, data })
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Column `j` as a state vector.
    pub fn column(&self, j: usize) -> StateVector {
        StateVector { amp: (0..self.dim).map(|i| self[(i, j)]).collect() }
    }

    pub fn from_columns(cols: &[StateVector]) -> Result<Self> {
        let dim = cols.len();
        if let Some(c) = cols.iter().find(|c| c.dim() != dim) {
            return Err(Error::NotSquare { rows: c.dim(), cols: dim });
        }
        Ok(Self::from_fn(dim, |i, j| cols[j][i]))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_dims(self.dim, rhs.dim)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim: n, data: out })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `|| self self^dagger - I ||_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self * &self.adjoint();
        p.frobenius_distance(&Self::identity(self.dim))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Solves `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        check_dims(self.dim, rhs.dim)?;
        let lu = Lu::factor(self)?;
        Ok(lu.solve(rhs))
    }

    pub fn determinant(&self) -> Complex64 {
        match Lu::factor(self) {
            Ok(lu) => lu.determinant(),
            Err(_) => ZERO,
        }
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

impl Index<(usize, usize)> for OperatorMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for OperatorMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.dim).map(|i| self.row(i))).finish()
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        OperatorMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        OperatorMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.matmul(rhs).expect("dimension mismatch")
    }
}

impl Mul<&StateVector> for &OperatorMatrix {
    type Output = StateVector;
    fn mul(self, rhs: &StateVector) -> StateVector {
        apply(self, rhs).expect("dimension mismatch")
    }
}

/// Matrix-vector product.
pub fn apply(a: &OperatorMatrix, v: &StateVector) -> Result<StateVector> {
    check_dims(a.dim, v.dim())?;
    let amp = (0..a.dim)
        .map(|i| a.row(i).iter().zip(&v.amp).map(|(x, y)| x * y).sum())
        .collect();
    Ok(StateVector { amp })
}

pub fn adjoint(a: &OperatorMatrix) -> OperatorMatrix {
    a.adjoint()
}

/// `AB - BA`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    Ok(&ab - &ba)
}

/// `<v|A|v>`.
pub fn expectation(a: &OperatorMatrix, v: &StateVector) -> Result<Complex64> {
    inner(v, &apply(a, v)?)
}

/// Bosonic annihilation operator truncated to `dim` levels.
pub fn annihilation(dim: usize) -> OperatorMatrix {
    let mut a = OperatorMatrix::zeros(dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(dim: usize) -> OperatorMatrix {
    annihilation(dim).adjoint()
}

/// Photon-number operator `a^dagger a`.
pub fn number_operator(dim: usize) -> OperatorMatrix {
    OperatorMatrix::real_diagonal(&(0..dim).map(|n| n as f64).collect::<Vec<_>>())
}

struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    fn factor(a: &OperatorMatrix) -> Result<Self> {
        let n = a.dim;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= f * u;
                }
            }
        }
        Ok(Self { n, lu, perm, sign })
    }

    fn solve(&self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let n = self.n;
        let mut x = OperatorMatrix::zeros(n);
        for col in 0..n {
            let mut y: Vec<Complex64> = (0..n).map(|i| rhs[(self.perm[i], col)]).collect();
            for i in 0..n {
                for k in 0..i {
                    let l = self.lu[i * n + k];
                    y[i] = y[i] - l * y[k];
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let u = self.lu[i * n + k];
                    y[i] = y[i] - u * y[k];
                }
                y[i] /= self.lu[i * n + i];
            }
            for i in 0..n {
                x[(i, col)] = y[i];
            }
        }
        x
    }

    fn determinant(&self) -> Complex64 {
        (0..self.n).map(|i| self.lu[i * self.n + i]).product::<Complex64>() * self.sign
    }
}

// Pade coefficients b_0..b_m and the 1-norm bounds theta_m below which the
// degree-m approximant meets double-precision backward error.
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a diagonal Pade approximant.
pub fn expm(a: &OperatorMatrix) -> OperatorMatrix {
    let n = a.dim;
    let ident = OperatorMatrix::identity(n);
    let norm = a.one_norm();
    if norm == 0.0 {
        return ident;
    }
    for &(m, theta) in &THETA {
        if norm <= theta {
            let b: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            return pade_low(a, b);
        }
    }
    let s = ((norm / THETA13).log2().ceil()).max(0.0) as i32;
    let scaled = a.scale_re(0.5f64.powi(s));
    let mut r = pade13(&scaled);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn pade_low(a: &OperatorMatrix, b: &[f64]) -> OperatorMatrix {
    let n = a.dim;
    let ident = OperatorMatrix::identity(n);
    let a2 = a * a;
    let mut powers = vec![ident.clone(), a2.clone()];
    let degree = b.len() - 1;
    while 2 * powers.len() <= degree {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut u = OperatorMatrix::zeros(n);
    let mut v = OperatorMatrix::zeros(n);
    for (k, p) in powers.iter().enumerate() {
        if 2 * k < degree {
            u = &u + &p.scale_re(b[2 * k + 1]);
        }
        v = &v + &p.scale_re(b[2 * k]);
    }
    let u = a * &u;
    finish_pade(&u, &v)
}

fn pade13(a: &OperatorMatrix) -> OperatorMatrix {
    let b = &PADE13;
    let ident = OperatorMatrix::identity(a.dim);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &(&a6.scale_re(b[13]) + &a4.scale_re(b[11])) + &a2.scale_re(b[9]);
    let u = &(&(&(&a6 * &inner_u) + &a6.scale_re(b[7])) + &(&a4.scale_re(b[5]) + &a2.scale_re(b[3])))
        + &ident.scale_re(b[1]);
    let u = a * &u;
    let inner_v = &(&a6.scale_re(b[12]) + &a4.scale_re(b[10])) + &a2.scale_re(b[8]);
    let v = &(&(&(&a6 * &inner_v) + &a6.scale_re(b[6])) + &(&a4.scale_re(b[4]) + &a2.scale_re(b[2])))
        + &ident.scale_re(b[0]);
    finish_pade(&u, &v)
}

fn finish_pade(u: &OperatorMatrix, v: &OperatorMatrix) -> OperatorMatrix {
    let p = v + u;
    let q = v - u;
    // q = V - U is well conditioned inside the theta_m bounds
    q.solve(&p).expect("Pade denominator is nonsingular inside its norm bound")
}
