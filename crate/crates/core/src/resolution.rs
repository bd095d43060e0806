//! Over-complete GBS basis: the resolution of identity
//! `(N+1) int dOmega/4pi |N,p,phi><N,p,phi| = 1` evaluated by quadrature on
//! the Bloch sphere, and the expansion of arbitrary states over GBSs.
//!
//! The polar integral runs over `u = cos(theta)` with Gauss-Legendre nodes
//! (interior nodes never touch the poles `p = 0, 1`); the azimuth uses a
//! uniform grid, which averages `e^{i(m-n)phi}` to zero exactly whenever
//! the node count exceeds `|m - n|`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::gbs::{angles_to_params, gbs_state, BlochAngles, GbsParams};
use crate::hilbert::{inner, OperatorMatrix, StateVector};
use crate::numeric::binomial;
use crate::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess for the i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Product quadrature on the sphere: Gauss-Legendre in `u = cos(theta)`
/// times a uniform azimuthal grid `varphi_j = 2 pi j / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    /// `(u_k, w_k)`, with `sum w_k = 2`.
    pub theta_nodes: Vec<(f64, f64)>,
    pub phi_nodes: usize,
}

impl SphereQuadrature {
    pub fn new(theta_nodes: usize, phi_nodes: usize) -> Result<Self> {
        if theta_nodes == 0 || phi_nodes == 0 {
            return Err(Error::InvalidParameter("quadrature needs at least one node per axis".into()));
        }
        Ok(Self { theta_nodes: gauss_legendre(theta_nodes), phi_nodes })
    }

    /// Smallest grid that integrates the `N`-photon projector exactly.
    pub fn minimal_for(n: usize) -> Self {
        Self::new((n + 1).div_ceil(2), n + 1).unwrap()
    }

    /// `ceil((N+1)/2) + 2` polar nodes and `N + 3` azimuthal nodes.
    pub fn default_for(n: usize) -> Self {
        Self::new((n + 1).div_ceil(2) + 2, n + 3).unwrap()
    }

    pub fn is_exact_for(&self, n: usize) -> bool {
        self.theta_nodes.len() >= (n + 1).div_ceil(2) && self.phi_nodes > n
    }

    /// `(angles, weight)` for each grid point, weights summing to `4 pi`.
    pub fn points(&self) -> Vec<(BlochAngles, f64)> {
        let dphi = TAU / self.phi_nodes as f64;
        let mut pts = Vec::with_capacity(self.theta_nodes.len() * self.phi_nodes);
        for &(u, w) in &self.theta_nodes {
            let theta = u.clamp(-1.0, 1.0).acos();
            for j in 0..self.phi_nodes {
                let angles = BlochAngles::new(theta, dphi * j as f64).expect("grid angles in range");
                pts.push((angles, w * dphi));
            }
        }
        pts
    }
}

/// Result of [`identity_resolution`]; `under_resolved` is set when the grid
/// is below the exactness threshold for this `N`.
#[derive(Debug, Clone)]
pub struct IdentityResolution {
    pub operator: OperatorMatrix,
    pub under_resolved: bool,
}

/// Quadrature value of `(N+1) int dOmega/4pi |N,p,phi><N,p,phi|`.
pub fn identity_resolution(n: usize, quad: &SphereQuadrature) -> IdentityResolution {
    let dim = n + 1;
    let pref = dim as f64 / (4.0 * PI);
    let terms: Vec<OperatorMatrix> = quad
        .points()
        .par_iter()
        .map(|(angles, w)| {
            let s = gbs_state(&angles_to_params(angles, n), dim).expect("dim = N + 1");
            OperatorMatrix::from_fn(dim, |i, j| s[i] * s[j].conj() * (w * pref))
        })
        .collect();
    IdentityResolution {
        operator: pairwise_sum(&terms, |a, b| a + b).unwrap_or_else(|| OperatorMatrix::zeros(dim)),
        under_resolved: !quad.is_exact_for(n),
    }
}

/// Expansion amplitude of a state at one GBS, in the variables
/// `tau = e^{i phi} sqrt((1-p)/p)`.
///
/// `overlap = <N,p,phi|psi>` is always finite. `tau`, `value`
/// (`[1+|tau|^2]^{N/2} overlap`) and `polynomial` (the same number expanded
/// as the polynomial `e^{-iN phi} sum_n c_n C(N,n)^{1/2} tau^{N-n}`) are
/// `None` at `p = 0`, where `tau` diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionAmplitude {
    pub tau: Option<Complex64>,
    pub value: Option<Complex64>,
    pub polynomial: Option<Complex64>,
    pub overlap: Complex64,
}

impl ExpansionAmplitude {
    /// Relative disagreement between the overlap and polynomial forms.
    pub fn consistency_error(&self) -> f64 {
        match (self.value, self.polynomial) {
            (Some(v), Some(poly)) => (v - poly).norm() / v.norm().max(poly.norm()).max(1.0),
            _ => 0.0,
        }
    }
}

pub fn expansion_amplitude(psi: &StateVector, params: &GbsParams) -> Result<ExpansionAmplitude> {
    let n = params.n();
    if psi.dim() < n + 1 {
        return Err(Error::InsufficientDimension { needed: n + 1, dim: psi.dim() });
    }
    let overlap = inner(&gbs_state(params, psi.dim())?, psi)?;
    let p = params.p();
    if p == 0.0 {
        return Ok(ExpansionAmplitude { tau: None, value: None, polynomial: None, overlap });
    }
    let tau = Complex64::from_polar(((1.0 - p) / p).sqrt(), params.phi());
    let value = overlap * (1.0 + tau.norm_sqr()).powf(n as f64 / 2.0);
    let poly: Complex64 = (0..=n)
        .map(|k| psi[k] * binomial(n, k).sqrt() * tau.powu((n - k) as u32))
        .sum();
    let polynomial = poly * Complex64::from_polar(1.0, -(n as f64) * params.phi());
    Ok(ExpansionAmplitude { tau: Some(tau), value: Some(value), polynomial: Some(polynomial), overlap })
}

/// Quadrature evaluation of
/// `(N+1) int dOmega/4pi A(tau*)/[1+|tau|^2]^{N/2} |N,p,phi>`.
///
/// The weight `A/[1+|tau|^2]^{N/2}` is taken as the bounded overlap
/// `<N,p,phi|psi>`. Components of `psi` above `N` are outside the span of
/// the `N`-photon GBSs and are dropped, so the result is the projection of
/// `psi` onto the first `N+1` levels, in `psi.dim()` levels.
pub fn reconstruct(psi: &StateVector, n: usize, quad: &SphereQuadrature) -> Result<StateVector> {
    let dim = psi.dim();
    if dim < n + 1 {
        return Err(Error::InsufficientDimension { needed: n + 1, dim });
    }
    let pref = (n + 1) as f64 / (4.0 * PI);
    let terms: Vec<StateVector> = quad
        .points()
        .par_iter()
        .map(|(angles, w)| {
            let params = angles_to_params(angles, n);
            let s = gbs_state(&params, dim).expect("dim >= N + 1");
            let weight = inner(&s, psi).expect("same dim") * (w * pref);
            s.scale(weight)
        })
        .collect();
    Ok(pairwise_sum(&terms, |a, b| a + b).unwrap_or_else(|| StateVector::zeros(dim)))
}

/// Deterministic pairwise reduction: the association order depends only
/// on the slice length.
pub(crate) fn pairwise_sum<T: Clone>(items: &[T], add: impl Fn(&T, &T) -> T + Copy) -> Option<T> {
    match items.len() {
        0 => None,
        1 => Some(items[0].clone()),
        len => {
            let (l, r) = items.split_at(len / 2);
            let a = pairwise_sum(l, add)?;
            let b = pairwise_sum(r, add)?;
            Some(add(&a, &b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(rng: &mut impl Rng, dim: usize) -> StateVector {
        StateVector::new((0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .unwrap()
            .normalized()
    }

    #[test]
    fn gauss_legendre_weights_and_exactness() {
        for n in 1..=40 {
            let nodes = gauss_legendre(n);
            let wsum: f64 = nodes.iter().map(|(_, w)| w).sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n}");
            assert!(nodes.windows(2).all(|w| w[0].0 < w[1].0));
            // exact for x^k, k <= 2n-1
            for k in 0..2 * n {
                let q: f64 = nodes.iter().map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
        let two = gauss_legendre(2);
        assert!((two[1].0 - 1.0 / 3f64.sqrt()).abs() < 4e-16);
        assert!((two[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_weights_cover_sphere() {
        let q = SphereQuadrature::new(5, 7).unwrap();
        let total: f64 = q.points().iter().map(|(_, w)| w).sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
        assert!(SphereQuadrature::new(0, 3).is_err());
    }

    #[test]
    fn zero_photon_resolution_is_trivial() {
        for (k, m) in [(1, 1), (3, 2), (1, 7)] {
            let r = identity_resolution(0, &SphereQuadrature::new(k, m).unwrap());
            assert!(r.operator.max_abs_diff(&OperatorMatrix::identity(1)) < 1e-14);
        }
    }

    #[test]
    fn three_photons_minimal_grid_is_exact() {
        let r = identity_resolution(3, &SphereQuadrature::new(2, 4).unwrap());
        assert!(!r.under_resolved);
        assert!(r.operator.max_abs_diff(&OperatorMatrix::identity(4)) <= 1e-12);
    }

    #[test]
    fn aliasing_with_too_few_azimuthal_nodes() {
        let r = identity_resolution(3, &SphereQuadrature::new(2, 2).unwrap());
        assert!(r.under_resolved);
        assert!(r.operator.max_abs_diff(&OperatorMatrix::identity(4)) > 1e-3);
    }

    #[test]
    fn default_grids_are_exact() {
        for n in 0..=20 {
            let q = SphereQuadrature::default_for(n);
            let r = identity_resolution(n, &q);
            assert!(!r.under_resolved);
            assert!(r.operator.max_abs_diff(&OperatorMatrix::identity(n + 1)) <= 1e-12, "n={n}");
            let m = SphereQuadrature::minimal_for(n);
            assert!(m.is_exact_for(n));
            let r = identity_resolution(n, &m);
            assert!(r.operator.max_abs_diff(&OperatorMatrix::identity(n + 1)) <= 1e-12, "minimal n={n}");
        }
    }

    #[test]
    fn error_decays_as_polar_grid_refines() {
        let n = 12;
        let errs: Vec<f64> = (1..=7)
            .map(|k| {
                let r = identity_resolution(n, &SphereQuadrature::new(k, n + 1).unwrap());
                r.operator.max_abs_diff(&OperatorMatrix::identity(n + 1))
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(errs[6] < 1e-12);
    }

    #[test]
    fn amplitude_examples() {
        let params = GbsParams::new(3, 0.3, 0.9).unwrap();
        let psi = gbs_state(&params, 4).unwrap();
        let amp = expansion_amplitude(&psi, &params).unwrap();
        let tau = amp.tau.unwrap();
        assert!((amp.value.unwrap() - c((1.0 + tau.norm_sqr()).powf(1.5), 0.0)).norm() < 1e-12);
        assert!(amp.consistency_error() < 1e-10);

        // tau = 0 at p = 1: only the top level contributes
        let e0 = StateVector::basis(3, 0);
        let amp = expansion_amplitude(&e0, &GbsParams::new(2, 1.0, 0.4).unwrap()).unwrap();
        assert_eq!(amp.value.unwrap(), c(0.0, 0.0));
        assert_eq!(amp.polynomial.unwrap(), c(0.0, 0.0));
        let amp = expansion_amplitude(&StateVector::basis(1, 0), &GbsParams::new(0, 1.0, 0.0).unwrap()).unwrap();
        assert!((amp.value.unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let e1 = StateVector::basis(2, 1);
        let amp = expansion_amplitude(&e1, &GbsParams::new(1, 0.5, 0.0).unwrap()).unwrap();
        assert!((amp.value.unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((amp.polynomial.unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let amp = expansion_amplitude(&e1, &GbsParams::new(1, 0.0, 0.0).unwrap()).unwrap();
        assert!(amp.tau.is_none() && amp.value.is_none());
        assert_eq!(amp.overlap, c(0.0, 0.0));
    }

    #[test]
    fn amplitude_forms_agree_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let n = rng.gen_range(0..=15);
            let psi = random_state(&mut rng, n + 1);
            let params = GbsParams::new(n, rng.gen_range(0.05..=1.0), rng.gen_range(0.0..TAU)).unwrap();
            let amp = expansion_amplitude(&psi, &params).unwrap();
            assert!(amp.consistency_error() <= 1e-10, "{amp:?}");
        }
    }

    #[test]
    fn reconstruction_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let e0 = StateVector::basis(5, 0);
        let q = SphereQuadrature::default_for(4);
        assert!(reconstruct(&e0, 4, &q).unwrap().max_abs_diff(&e0) < 1e-12);
        let g = gbs_state(&GbsParams::new(4, 0.7, 1.0).unwrap(), 5).unwrap();
        assert!(reconstruct(&g, 4, &q).unwrap().max_abs_diff(&g) < 1e-12);
        for _ in 0..20 {
            let n = rng.gen_range(0..=12);
            let psi = random_state(&mut rng, n + 1);
            let back = reconstruct(&psi, n, &SphereQuadrature::default_for(n)).unwrap();
            assert!(back.max_abs_diff(&psi) <= 1e-10);
        }
        assert!(reconstruct(&StateVector::basis(2, 0), 3, &q).is_err());
    }

    #[test]
    fn reconstruction_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let n = 6;
        let q = SphereQuadrature::new(3, 5).unwrap(); // deliberately under-resolved
        let u = random_state(&mut rng, n + 1);
        let v = random_state(&mut rng, n + 1);
        let (a, b) = (c(0.3, -1.1), c(2.0, 0.5));
        let combo = &u.scale(a) + &v.scale(b);
        let lhs = reconstruct(&combo, n, &q).unwrap();
        let rhs = &reconstruct(&u, n, &q).unwrap().scale(a) + &reconstruct(&v, n, &q).unwrap().scale(b);
        assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
    }

    #[test]
    fn reconstruction_is_bit_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let psi = random_state(&mut rng, 9);
        let q = SphereQuadrature::default_for(8);
        let a = reconstruct(&psi, 8, &q).unwrap();
        let b = reconstruct(&psi, 8, &q).unwrap();
        assert_eq!(a, b);
    }
}
