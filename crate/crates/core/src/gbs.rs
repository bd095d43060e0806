//! N-photon generalized binomial states `|N,p,phi>`, their overlaps and the
//! parameter map onto Bloch-sphere angles.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::hilbert::StateVector;
use crate::numeric::{binomial, binomial_weight, wrap_angle};
use crate::{Error, Result};

/// Parameters `(N, p, phi)` of a generalized binomial state.
///
/// `phi` is kept reduced to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbsParams {
    n: usize,
    p: f64,
    phi: f64,
}

impl GbsParams {
    pub fn new(n: usize, p: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("phase must be finite, got {phi}")));
        }
        Ok(Self { n, p, phi: wrap_angle(phi) })
    }

    /// Maximum photon number `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Single-photon occurrence probability.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Mean phase in `[0, 2pi)`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Same parameters up to `tol`, phases compared on the circle.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n
            && (self.p - other.p).abs() <= tol
            && crate::numeric::angle_distance(self.phi, other.phi) <= tol
    }
}

/// Polar and azimuthal angles `(theta, varphi)` on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    theta: f64,
    varphi: f64,
}

impl BlochAngles {
    /// `theta` must lie in `[0, pi]`; `varphi` is reduced to `[0, 2pi)`.
    pub fn new(theta: f64, varphi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!("polar angle {theta} outside [0, pi]")));
        }
        if !varphi.is_finite() {
            return Err(Error::InvalidParameter(format!("azimuth must be finite, got {varphi}")));
        }
        Ok(Self { theta, varphi: wrap_angle(varphi) })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn varphi(&self) -> f64 {
        self.varphi
    }

    /// The opposite direction `(pi - theta, pi + varphi)`.
    pub fn antipode(&self) -> Self {
        Self { theta: PI - self.theta, varphi: wrap_angle(self.varphi + PI) }
    }

    /// Unit vector `(sin t cos f, sin t sin f, cos t)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sf, cf) = self.varphi.sin_cos();
        [st * cf, st * sf, ct]
    }
}

/// Amplitudes `sqrt(C(N,n) p^n (1-p)^(N-n)) e^{i n phi}` for `n <= N`,
/// zero-padded to `dim` levels.
pub fn gbs_state(params: &GbsParams, dim: usize) -> Result<StateVector> {
    let n_max = params.n;
    if dim < n_max + 1 {
        return Err(Error::InsufficientDimension { needed: n_max + 1, dim });
    }
    let mut amp = vec![Complex64::new(0.0, 0.0); dim];
    for (n, a) in amp.iter_mut().enumerate().take(n_max + 1) {
        let modulus = binomial_weight(n_max, n, params.p).sqrt();
        *a = Complex64::from_polar(modulus, n as f64 * params.phi);
    }
    StateVector::new(amp)
}

/// Closed-form overlap `<a|b>`:
/// `sum_n C(N,n) (p p')^{n/2} [(1-p)(1-p')]^{(N-n)/2} e^{i n (phi' - phi)}`.
pub fn gbs_overlap(a: &GbsParams, b: &GbsParams) -> Result<Complex64> {
    if a.n != b.n {
        return Err(Error::PhotonNumberMismatch(a.n, b.n));
    }
    let n_max = a.n;
    let pp = (a.p * b.p).sqrt();
    let qq = ((1.0 - a.p) * (1.0 - b.p)).sqrt();
    let dphi = b.phi - a.phi;
    Ok((0..=n_max)
        .map(|n| {
            let m = binomial(n_max, n) * pp.powi(n as i32) * qq.powi((n_max - n) as i32);
            Complex64::from_polar(m, n as f64 * dphi)
        })
        .sum())
}

/// The unique GBS orthogonal to `params`: `(N, 1-p, phi+pi)`.
pub fn orthogonal_partner(params: &GbsParams) -> GbsParams {
    GbsParams { n: params.n, p: 1.0 - params.p, phi: wrap_angle(params.phi + PI) }
}

/// `theta = 2 arccos(sqrt p)`, `varphi = 2pi - phi`. The polar angle is
/// evaluated as `2 atan2(sqrt(1-p), sqrt p)`, which stays accurate near
/// `p = 1`.
pub fn params_to_angles(params: &GbsParams) -> BlochAngles {
    let theta = 2.0 * (1.0 - params.p).sqrt().atan2(params.p.sqrt());
    BlochAngles { theta: theta.min(PI), varphi: wrap_angle(TAU - params.phi) }
}

/// Inverse of [`params_to_angles`] with `N = n`.
pub fn angles_to_params(angles: &BlochAngles, n: usize) -> GbsParams {
    let c = (angles.theta / 2.0).cos();
    GbsParams { n, p: (c * c).clamp(0.0, 1.0), phi: wrap_angle(TAU - angles.varphi) }
}

/// Glauber coherent state `e^{-|a|^2/2} a^n / sqrt(n!)` truncated to `dim`
/// levels and renormalized.
///
/// Fails unless `|a|^2 + 10|a| + 20 <= dim`, which keeps the discarded tail
/// mass below `1e-12`.
pub fn coherent_state_truncated(alpha: Complex64, dim: usize) -> Result<StateVector> {
    let r = alpha.norm();
    let needed = (r * r + 10.0 * r + 20.0).ceil() as usize;
    if dim < needed {
        return Err(Error::InsufficientDimension { needed, dim });
    }
    let mut amp = Vec::with_capacity(dim);
    let mut term = Complex64::new((-0.5 * r * r).exp(), 0.0);
    amp.push(term);
    for n in 1..dim {
        term = term * alpha / (n as f64).sqrt();
        amp.push(term);
    }
    Ok(StateVector::new(amp)?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::inner;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(n: usize, p: f64, phi: f64) -> GbsParams {
        GbsParams::new(n, p, phi).unwrap()
    }

    #[test]
    fn endpoints_are_vacuum_and_number_state() {
        for phi in [0.0, 1.3, 5.9] {
            assert_eq!(gbs_state(&params(5, 0.0, phi), 6).unwrap(), StateVector::basis(6, 0));
        }
        assert_eq!(gbs_state(&params(5, 1.0, 0.0), 6).unwrap(), StateVector::basis(6, 5));
    }

    #[test]
    fn half_probability_two_photons() {
        let s = gbs_state(&params(2, 0.5, 0.0), 3).unwrap();
        let expected = StateVector::from_real(&[0.5, FRAC_1_SQRT_2, 0.5]).unwrap();
        assert!(s.max_abs_diff(&expected) < 1e-16);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(GbsParams::new(3, 1.5, 0.0), Err(Error::InvalidProbability(1.5)));
        assert!(GbsParams::new(3, -0.1, 0.0).is_err());
        assert!(GbsParams::new(3, 0.5, f64::NAN).is_err());
        assert_eq!(
            gbs_state(&params(4, 0.5, 0.0), 4),
            Err(Error::InsufficientDimension { needed: 5, dim: 4 })
        );
        assert!(BlochAngles::new(3.5, 0.0).is_err());
    }

    #[test]
    fn phase_is_normalized() {
        let p = params(2, 0.3, -FRAC_PI_2);
        assert!((p.phi() - 3.0 * FRAC_PI_2).abs() < 1e-15);
        assert_eq!(params(2, 0.3, TAU).phi(), 0.0);
    }

    #[test]
    fn zero_padding_above_n() {
        let s = gbs_state(&params(3, 0.4, 0.7), 8).unwrap();
        assert!(s.amplitudes()[4..].iter().all(|a| *a == c(0.0, 0.0)));
        assert!(s.is_normalized(1e-14));
    }

    #[test]
    fn overlap_examples() {
        let a = params(4, 0.37, 1.1);
        assert!((gbs_overlap(&a, &a).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let partner = params(4, 0.63, 1.1 + PI);
        assert!(gbs_overlap(&a, &partner).unwrap().norm() < 1e-15);
        let x = params(1, 0.5, 0.0);
        let y = params(1, 0.5, FRAC_PI_2);
        assert!((gbs_overlap(&x, &y).unwrap() - c(0.5, 0.5)).norm() < 1e-15);
        assert_eq!(gbs_overlap(&x, &params(2, 0.5, 0.0)), Err(Error::PhotonNumberMismatch(1, 2)));
    }

    #[test]
    fn partner_examples() {
        let a = params(3, 0.3, 0.2);
        let b = orthogonal_partner(&a);
        assert!(b.approx_eq(&params(3, 0.7, 0.2 + PI), 1e-15));
        assert!(orthogonal_partner(&b).approx_eq(&a, 1e-14));
        let v = params(2, 0.0, 0.0);
        let w = orthogonal_partner(&v);
        assert!(w.approx_eq(&params(2, 1.0, PI), 0.0));
        assert_eq!(gbs_overlap(&v, &w).unwrap().norm(), 0.0);
    }

    #[test]
    fn angle_map_examples() {
        let a = params_to_angles(&params(4, 1.0, 0.0));
        assert_eq!((a.theta(), a.varphi()), (0.0, 0.0));
        assert!((params_to_angles(&params(4, 0.0, 0.0)).theta() - PI).abs() < 1e-15);
        let a = params_to_angles(&params(4, 0.5, FRAC_PI_2));
        assert!((a.theta() - FRAC_PI_2).abs() < 1e-15);
        assert!((a.varphi() - 3.0 * FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn coherent_state_examples() {
        assert!(coherent_state_truncated(c(0.0, 0.0), 20).unwrap().max_abs_diff(&StateVector::basis(20, 0)) < 1e-16);
        let s = coherent_state_truncated(c(1.2, -0.4), 40).unwrap();
        assert!(s.is_normalized(1e-14));
        assert!(coherent_state_truncated(c(3.0, 0.0), 30).is_err());
    }

    #[test]
    fn coherent_limit_fidelity_grows_with_n() {
        let alpha = c(1.0, 0.0);
        let mut last = 0.0;
        for n in [10usize, 50, 200] {
            let dim = (n + 1).max(31);
            let g = gbs_state(&params(n, 1.0 / n as f64, 0.0), dim).unwrap();
            let coh = coherent_state_truncated(alpha, dim).unwrap();
            let f = g.fidelity(&coh).unwrap();
            assert!(f >= last);
            last = f;
        }
        assert!(last >= 0.99);
    }

    #[test]
    fn uniqueness_of_orthogonal_partner_on_grid() {
        let a = params(3, 0.3, 0.2);
        let partner = orthogonal_partner(&a);
        for i in 0..=100 {
            let p2 = i as f64 / 100.0;
            for j in 0..629 {
                let phi2 = j as f64 / 100.0;
                let b = params(3, p2, phi2);
                let dist = (p2 - partner.p()).abs().max(crate::numeric::angle_distance(phi2, partner.phi()));
                if dist > 0.05 {
                    assert!(gbs_overlap(&a, &b).unwrap().norm() > 1e-10, "p'={p2} phi'={phi2}");
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn closed_form_overlap_matches_inner_product(
                n in 0usize..60, p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0,
                f1 in 0.0f64..TAU, f2 in 0.0f64..TAU,
            ) {
                let a = params(n, p1, f1);
                let b = params(n, p2, f2);
                let closed = gbs_overlap(&a, &b).unwrap();
                let direct = inner(&gbs_state(&a, n + 1).unwrap(), &gbs_state(&b, n + 1).unwrap()).unwrap();
                prop_assert!((closed - direct).norm() <= 1e-12);
            }

            #[test]
            fn phase_covariance(n in 0usize..40, p in 0.0f64..=1.0, phi in 0.0f64..TAU) {
                let s = gbs_state(&params(n, p, phi), n + 1).unwrap();
                let s0 = gbs_state(&params(n, p, 0.0), n + 1).unwrap();
                for k in 0..=n {
                    let expected = s0[k] * Complex64::from_polar(1.0, k as f64 * phi);
                    prop_assert!((s[k] - expected).norm() <= 1e-13);
                }
            }

            #[test]
            fn angle_maps_are_mutually_inverse(n in 0usize..20, p in 0.0f64..=1.0, phi in 0.0f64..TAU) {
                let a = params(n, p, phi);
                let back = angles_to_params(&params_to_angles(&a), n);
                prop_assert!(back.approx_eq(&a, 1e-12));
            }
        }
    }

    #[test]
    fn random_partner_overlaps_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = params(rng.gen_range(1..=50), rng.gen(), rng.gen_range(0.0..TAU));
            let ov = gbs_overlap(&a, &orthogonal_partner(&a)).unwrap().norm();
            assert!(ov <= 1e-12, "{a:?} {ov}");
        }
    }
}
