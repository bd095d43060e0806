//! Quadrature squeezing of generalized binomial states.
//!
//! With `a_X = a + a^dagger`, `a_P = (a - a^dagger)/i` and
//! `S_K = 1 - <Delta a_K^2>`, a GBS has
//!
//! ```text
//! S_X = -2Np - A cos(2 phi) + B^2 cos^2(phi)
//! S_P = -2Np + A cos(2 phi) + B^2 sin^2(phi)
//! ```
//!
//! where `A = 2 Re(e^{-2i phi} <a^2>)` and `B = 2 |<a>|` reduce to the
//! binomial sums in [`squeezing_terms`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::gbs::{gbs_state, GbsParams};
use crate::hilbert::{annihilation, apply, expectation, inner, OperatorMatrix, StateVector};
use crate::numeric::paired_binomial_term;
use crate::{Error, Result};

/// First and second moments of both quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureStats {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub s_x: f64,
    pub s_p: f64,
}

/// The sums `A(N,p)` and `B(N,p)` entering the closed-form indexes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingTerms {
    pub a_term: f64,
    pub b_term: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    ClosedForm,
    Direct,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::ClosedForm => "closed_form",
            Source::Direct => "direct",
        }
    }
}

/// One grid point of a squeezing scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeRow {
    pub n: usize,
    pub p: f64,
    pub phi: f64,
    pub s_x: f64,
    pub s_p: f64,
    pub source: Source,
}

/// `(a_X, a_P)` on a `dim`-level truncation. `[a_X, a_P] = 2i` holds away
/// from the last level.
pub fn quadrature_ops(dim: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("quadratures need dim >= 2, got {dim}")));
    }
    let a = annihilation(dim);
    let ad = a.adjoint();
    let ax = &a + &ad;
    // (a - a^dagger)/i = -i (a - a^dagger)
    let ap = (&a - &ad).scale(Complex64::new(0.0, -1.0));
    Ok((ax, ap))
}

/// Moments by direct expectation values. The state must be normalized and
/// empty on the top two levels so that `a_K^2` is unaffected by truncation.
pub fn direct_stats(psi: &StateVector) -> Result<QuadratureStats> {
    let norm = psi.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let dim = psi.dim();
    if dim < 3 {
        return Err(Error::InsufficientDimension { needed: 3, dim });
    }
    let top: f64 = psi.amplitudes()[dim - 2..].iter().map(|a| a.norm_sqr()).sum();
    if top > 0.0 {
        return Err(Error::TruncationContaminated(top));
    }
    let (ax, ap) = quadrature_ops(dim)?;
    let moments = |op: &OperatorMatrix| -> Result<(f64, f64)> {
        let mean = expectation(op, psi)?.re;
        let v = apply(op, psi)?;
        let second = inner(&v, &v)?.re;
        Ok((mean, second - mean * mean))
    };
    let (mean_x, var_x) = moments(&ax)?;
    let (mean_p, var_p) = moments(&ap)?;
    Ok(QuadratureStats { mean_x, mean_p, var_x, var_p, s_x: 1.0 - var_x, s_p: 1.0 - var_p })
}

/// `A(N,p) = 2 sqrt(N(N-1)) p(1-p) sum_{n<=N-2} [C(N,n) C(N-2,n)]^{1/2} p^n (1-p)^{N-2-n}`,
/// `B(N,p) = 2 sqrt(N p(1-p)) sum_{n<=N-1} [C(N,n) C(N-1,n)]^{1/2} p^n (1-p)^{N-1-n}`.
pub fn squeezing_terms(n: usize, p: f64) -> Result<SqueezingTerms> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let q = 1.0 - p;
    let a_term = if n >= 2 {
        let sum: f64 = (0..=n - 2).map(|k| paired_binomial_term(n, n - 2, k, n - 2 - k, p)).sum();
        2.0 * ((n * (n - 1)) as f64).sqrt() * p * q * sum
    } else {
        0.0
    };
    let b_term = if n >= 1 {
        let sum: f64 = (0..n).map(|k| paired_binomial_term(n, n - 1, k, n - 1 - k, p)).sum();
        2.0 * (n as f64 * p * q).sqrt() * sum
    } else {
        0.0
    };
    Ok(SqueezingTerms { a_term, b_term })
}

/// `(S_X, S_P)` from the closed form.
pub fn closed_form_indexes(n: usize, p: f64, phi: f64) -> Result<(f64, f64)> {
    let SqueezingTerms { a_term, b_term } = squeezing_terms(n, p)?;
    let np2 = 2.0 * n as f64 * p;
    let (s, c) = phi.sin_cos();
    let cos2 = (2.0 * phi).cos();
    let b2 = b_term * b_term;
    Ok((-np2 - a_term * cos2 + b2 * c * c, -np2 + a_term * cos2 + b2 * s * s))
}

/// Direct evaluation on `|N,p,phi>` embedded in `N + 3` levels.
pub fn direct_indexes(n: usize, p: f64, phi: f64) -> Result<(f64, f64)> {
    let params = GbsParams::new(n, p, phi)?;
    let stats = direct_stats(&gbs_state(&params, n + 3)?)?;
    Ok((stats.s_x, stats.s_p))
}

/// Squeezing indexes over a `(p, phi)` grid, `p` outer and `phi` inner.
/// Rows are computed in parallel but always returned in grid order.
pub fn squeeze_scan(n: usize, p_grid: &[f64], phi_grid: &[f64], source: Source) -> Result<Vec<SqueezeRow>> {
    if p_grid.is_empty() || phi_grid.is_empty() {
        return Err(Error::InvalidParameter("scan grids must be non-empty".into()));
    }
    if let Some(&p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidProbability(p));
    }
    if let Some(&phi) = phi_grid.iter().find(|f| !f.is_finite()) {
        return Err(Error::InvalidParameter(format!("phase must be finite, got {phi}")));
    }
    let cells: Vec<(f64, f64)> = p_grid.iter().flat_map(|&p| phi_grid.iter().map(move |&f| (p, f))).collect();
    cells
        .par_iter()
        .map(|&(p, phi)| {
            let (s_x, s_p) = match source {
                Source::ClosedForm => closed_form_indexes(n, p, phi)?,
                Source::Direct => direct_indexes(n, p, phi)?,
            };
            Ok(SqueezeRow { n, p, phi, s_x, s_p, source })
        })
        .collect()
}
