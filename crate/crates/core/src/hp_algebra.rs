//! Holstein-Primakoff pseudo-angular-momentum operators on the
//! `(N+1)`-level Fock space, Bloch rotations and rotated operators.

use num_complex::Complex64;

use crate::gbs::{params_to_angles, BlochAngles, GbsParams};
use crate::hilbert::{annihilation, commutator, creation, expm, number_operator, OperatorMatrix};
use crate::numeric::wrap_angle;
use crate::{Error, Result};

/// `J_3`, `J_+`, `J_-` and the Casimir `J^2` on an `(N+1)`-dimensional space.
#[derive(Debug, Clone)]
pub struct PseudoSpinSet {
    pub n: usize,
    pub j3: OperatorMatrix,
    pub jplus: OperatorMatrix,
    pub jminus: OperatorMatrix,
    pub jsq: OperatorMatrix,
}

impl PseudoSpinSet {
    /// Assembles a set from `J_3` and `J_+`; `J_-` is the adjoint of `J_+`
    /// and `J^2 = J_3^2 + (J_+J_- + J_-J_+)/2`.
    pub fn from_j3_jplus(n: usize, j3: OperatorMatrix, jplus: OperatorMatrix) -> Self {
        let jminus = jplus.adjoint();
        let jsq = casimir(&j3, &jplus, &jminus);
        Self { n, j3, jplus, jminus, jsq }
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Largest entrywise residual over `[J+,J-] = 2J3`, `[J3,J+-] = +-J+-`
    /// and `[J^2, J_i] = 0`.
    pub fn algebra_residual(&self) -> f64 {
        ladder_algebra_residual(&self.j3, &self.jplus, &self.jminus, &self.jsq)
    }
}

pub(crate) fn ladder_algebra_residual(
    j3: &OperatorMatrix,
    jplus: &OperatorMatrix,
    jminus: &OperatorMatrix,
    jsq: &OperatorMatrix,
) -> f64 {
    let r1 = commutator(jplus, jminus).unwrap().max_abs_diff(&j3.scale_re(2.0));
    let r2 = commutator(j3, jplus).unwrap().max_abs_diff(jplus);
    let r3 = commutator(j3, jminus).unwrap().max_abs_diff(&jminus.scale_re(-1.0));
    let r4 = [j3, jplus, jminus].iter().map(|op| commutator(jsq, op).unwrap().max_abs()).fold(0.0, f64::max);
    r1.max(r2).max(r3).max(r4)
}

pub(crate) fn casimir(j3: &OperatorMatrix, jplus: &OperatorMatrix, jminus: &OperatorMatrix) -> OperatorMatrix {
    let sym = &(jplus * jminus) + &(jminus * jplus);
    &(j3 * j3) + &sym.scale_re(0.5)
}

/// Rotation parameters derived from Bloch angles:
/// `eta = (theta/2) e^{-i varphi}` and `tau = tan(theta/2) e^{-i varphi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSpec {
    pub angles: BlochAngles,
    pub eta: Complex64,
    pub tau: Complex64,
}

impl RotationSpec {
    pub fn new(angles: BlochAngles) -> Self {
        let half = angles.theta() / 2.0;
        let dir = Complex64::from_polar(1.0, -angles.varphi());
        Self { angles, eta: dir * half, tau: dir * half.tan() }
    }

    pub fn from_params(params: &GbsParams) -> Self {
        Self::new(params_to_angles(params))
    }
}

/// `J_3 = a^dagger a - N/2`, `J_+ = a^dagger sqrt(N - a^dagger a)`,
/// `J_- = sqrt(N - a^dagger a) a`, built from truncated ladder operators.
pub fn hp_operators(n: usize) -> PseudoSpinSet {
    let dim = n + 1;
    let half_n = n as f64 / 2.0;
    let num = number_operator(dim);
    let j3 = &num - &OperatorMatrix::identity(dim).scale_re(half_n);
    let root = OperatorMatrix::real_diagonal(&(0..dim).map(|k| ((n - k) as f64).sqrt()).collect::<Vec<_>>());
    let jplus = &creation(dim) * &root;
    let jminus = &root * &annihilation(dim);
    let jsq = casimir(&j3, &jplus, &jminus);
    PseudoSpinSet { n, j3, jplus, jminus, jsq }
}

/// `R = exp(-eta J_+ + conj(eta) J_-)`.
pub fn rotation_operator(n: usize, spec: &RotationSpec) -> OperatorMatrix {
    let ops = hp_operators(n);
    rotation_from_ladder(&ops.jplus, &ops.jminus, spec.eta)
}

pub(crate) fn rotation_from_ladder(jplus: &OperatorMatrix, jminus: &OperatorMatrix, eta: Complex64) -> OperatorMatrix {
    let generator = &jminus.scale(eta.conj()) - &jplus.scale(eta);
    expm(&generator)
}

/// Rotated operators written out in terms of the unrotated ones:
///
/// `J3' = (2p-1) J3 + sqrt(p(1-p)) [e^{i phi} J+ + e^{-i phi} J-]`,
/// `J+' = e^{-i phi} [p e^{i phi} J+ - (1-p) e^{-i phi} J- - 2 sqrt(p(1-p)) J3]`.
pub fn rotated_operators(n: usize, p: f64, phi: f64) -> Result<PseudoSpinSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let ops = hp_operators(n);
    let s = (p * (1.0 - p)).sqrt();
    let e = Complex64::from_polar(1.0, phi);
    let e_conj = e.conj();
    let j3 = &(&ops.j3.scale_re(2.0 * p - 1.0) + &ops.jplus.scale(e * s)) + &ops.jminus.scale(e_conj * s);
    let bracket = &(&ops.jplus.scale(e * p) - &ops.jminus.scale(e_conj * (1.0 - p))) - &ops.j3.scale_re(2.0 * s);
    let jplus = bracket.scale(e_conj);
    Ok(PseudoSpinSet::from_j3_jplus(n, j3, jplus))
}

/// The same rotated set obtained as `R J R^dagger`.
pub fn conjugated_operators(n: usize, spec: &RotationSpec) -> PseudoSpinSet {
    let ops = hp_operators(n);
    let r = rotation_from_ladder(&ops.jplus, &ops.jminus, spec.eta);
    let r_inv = r.adjoint();
    let j3 = &(&r * &ops.j3) * &r_inv;
    let jplus = &(&r * &ops.jplus) * &r_inv;
    PseudoSpinSet::from_j3_jplus(n, j3, jplus)
}

/// `T = R(b) R(a)^{-1}`, carrying `|N,a>` onto `|N,b>` up to a global phase.
pub fn link_operator(n: usize, a: &GbsParams, b: &GbsParams) -> Result<OperatorMatrix> {
    if a.n() != n {
        return Err(Error::PhotonNumberMismatch(n, a.n()));
    }
    if b.n() != n {
        return Err(Error::PhotonNumberMismatch(n, b.n()));
    }
    let ra = rotation_operator(n, &RotationSpec::from_params(a));
    let rb = rotation_operator(n, &RotationSpec::from_params(b));
    Ok(&rb * &ra.adjoint())
}

/// Composite rotation angles `(Theta, Phi)` and the scalar phase
/// `exp{i theta theta'/4 sin(varphi - varphi')}` proposed for
/// `R(b) R(a)^{-1}`. These are leading-order expressions; see
/// [`composition_discrepancy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionAngles {
    pub theta: f64,
    pub phi: f64,
    pub phase: Complex64,
}

pub fn composition_angles(a: &BlochAngles, b: &BlochAngles) -> CompositionAngles {
    let (t1, f1) = (a.theta(), a.varphi());
    let (t2, f2) = (b.theta(), b.varphi());
    let theta = (t1 * t1 + t2 * t2 - 2.0 * t1 * t2 * (f1 - f2).cos()).max(0.0).sqrt();
    let phi = wrap_angle((t2 * f2.sin() - t1 * f1.sin()).atan2(t2 * f2.cos() - t1 * f1.cos()));
    let phase = Complex64::from_polar(1.0, t1 * t2 / 4.0 * (f1 - f2).sin());
    CompositionAngles { theta, phi, phase }
}

/// `|| R(b) R(a)^{-1} - phase R(Theta, Phi) ||_F` on the `(N+1)`-level space.
///
/// `Theta` may exceed pi for widely separated directions; the rotation is
/// still well defined, so it is built from the raw `eta` rather than
/// through [`BlochAngles`].
pub fn composition_discrepancy(n: usize, a: &BlochAngles, b: &BlochAngles) -> f64 {
    let ops = hp_operators(n);
    let ra = rotation_from_ladder(&ops.jplus, &ops.jminus, RotationSpec::new(*a).eta);
    let rb = rotation_from_ladder(&ops.jplus, &ops.jminus, RotationSpec::new(*b).eta);
    let t = &rb * &ra.adjoint();
    let comp = composition_angles(a, b);
    let eta = Complex64::from_polar(comp.theta / 2.0, -comp.phi);
    let approx = rotation_from_ladder(&ops.jplus, &ops.jminus, eta).scale(comp.phase);
    t.frobenius_distance(&approx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbs::{gbs_state, orthogonal_partner};
    use crate::hilbert::{apply, inner, StateVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(n: usize, p: f64, phi: f64) -> GbsParams {
        GbsParams::new(n, p, phi).unwrap()
    }

    #[test]
    fn ladder_matrix_elements() {
        for n in [1usize, 2, 5, 10] {
            let ops = hp_operators(n);
            for k in 0..=n {
                assert!((ops.j3[(k, k)] - c(k as f64 - n as f64 / 2.0, 0.0)).norm() < 1e-15);
                if k < n {
                    let expected = (((n - k) * (k + 1)) as f64).sqrt();
                    assert!((ops.jplus[(k + 1, k)] - c(expected, 0.0)).norm() < 1e-14);
                }
                if k > 0 {
                    let expected = (((n - k + 1) * k) as f64).sqrt();
                    assert!((ops.jminus[(k - 1, k)] - c(expected, 0.0)).norm() < 1e-14);
                }
            }
            let top = apply(&ops.jplus, &StateVector::basis(n + 1, n)).unwrap();
            assert_eq!(top.norm(), 0.0);
            let bottom = apply(&ops.jminus, &StateVector::basis(n + 1, 0)).unwrap();
            assert_eq!(bottom.norm(), 0.0);
            let j3_top = apply(&ops.j3, &StateVector::basis(n + 1, n)).unwrap();
            assert!(j3_top.max_abs_diff(&StateVector::basis(n + 1, n).scale(c(n as f64 / 2.0, 0.0))) < 1e-15);
        }
    }

    #[test]
    fn single_photon_raising_matrix() {
        let ops = hp_operators(1);
        let expected = OperatorMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert_eq!(ops.jplus, expected);
    }

    #[test]
    fn algebra_and_casimir() {
        for n in [0usize, 1, 2, 5, 10, 30] {
            let ops = hp_operators(n);
            assert!(ops.algebra_residual() <= 1e-12);
            assert_eq!(ops.jminus, ops.jplus.adjoint());
            let j = n as f64 / 2.0;
            let expected = OperatorMatrix::identity(n + 1).scale_re(j * (j + 1.0));
            assert!(ops.jsq.max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn zero_angle_rotation_is_identity() {
        let spec = RotationSpec::new(BlochAngles::new(0.0, 1.7).unwrap());
        assert_eq!(rotation_operator(4, &spec), OperatorMatrix::identity(5));
    }

    #[test]
    fn rotation_of_top_state_gives_gbs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(0..=30);
            let prm = params(n, rng.gen(), rng.gen_range(0.0..TAU));
            let r = rotation_operator(n, &RotationSpec::from_params(&prm));
            let rotated = apply(&r, &StateVector::basis(n + 1, n)).unwrap();
            let target = gbs_state(&prm, n + 1).unwrap();
            assert!(rotated.fidelity(&target).unwrap() >= 1.0 - 1e-10);
            assert!(r.unitarity_defect() <= 1e-10);
            assert!((r.determinant().norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn quarter_turn_on_a_single_photon() {
        let spec = RotationSpec::new(BlochAngles::new(FRAC_PI_2, 0.0).unwrap());
        let r = rotation_operator(1, &spec);
        // 2x2 oracle: exp of [[0, eta*], [-eta, 0]] = cos|eta| I + sin|eta|/|eta| G
        assert!((r[(0, 1)].norm_sqr() - 0.5).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let oracle = OperatorMatrix::from_rows(vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(-h, 0.0), c(h, 0.0)]]).unwrap();
        assert!(r.max_abs_diff(&oracle) < 1e-15);
    }

    #[test]
    fn rotated_operators_at_p_one_are_unrotated() {
        let ops = hp_operators(4);
        let rot = rotated_operators(4, 1.0, 0.9).unwrap();
        assert!(rot.j3.max_abs_diff(&ops.j3) < 1e-15);
        assert!(rot.jplus.max_abs_diff(&ops.jplus) < 1e-15);
        assert!(rotated_operators(4, 1.2, 0.0).is_err());
    }

    #[test]
    fn rotated_eigen_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let n = rng.gen_range(1..=30);
            let prm = params(n, rng.gen(), rng.gen_range(0.0..TAU));
            let partner = orthogonal_partner(&prm);
            let rot = rotated_operators(n, prm.p(), prm.phi()).unwrap();
            let v = gbs_state(&prm, n + 1).unwrap();
            let w = gbs_state(&partner, n + 1).unwrap();
            let half = n as f64 / 2.0;
            assert!(apply(&rot.j3, &v).unwrap().max_abs_diff(&v.scale(c(half, 0.0))) <= 1e-10);
            assert!(apply(&rot.j3, &w).unwrap().max_abs_diff(&w.scale(c(-half, 0.0))) <= 1e-10);
            assert!(apply(&rot.jplus, &v).unwrap().norm() <= 1e-10);
            assert!(apply(&rot.jminus, &w).unwrap().norm() <= 1e-10);
            assert!(rot.algebra_residual() <= 1e-10);
            assert!(commutator(&hp_operators(n).jsq, &rot.jplus).unwrap().max_abs() <= 1e-10);
        }
    }

    #[test]
    fn literal_rotated_operators_equal_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let n = rng.gen_range(0..=30);
            let prm = params(n, rng.gen(), rng.gen_range(0.0..TAU));
            let lit = rotated_operators(n, prm.p(), prm.phi()).unwrap();
            let conj = conjugated_operators(n, &RotationSpec::from_params(&prm));
            assert!(lit.j3.max_abs_diff(&conj.j3) <= 1e-10);
            assert!(lit.jplus.max_abs_diff(&conj.jplus) <= 1e-10);
            assert!(lit.jminus.max_abs_diff(&conj.jminus) <= 1e-10);
        }
    }

    #[test]
    fn link_operator_examples() {
        let a = params(3, 0.4, 0.3);
        assert!(link_operator(3, &a, &a).unwrap().max_abs_diff(&OperatorMatrix::identity(4)) < 1e-13);
        let top = params(3, 1.0, 0.0);
        let b = params(3, 0.2, 2.0);
        let t = link_operator(3, &top, &b).unwrap();
        assert!(t.max_abs_diff(&rotation_operator(3, &RotationSpec::from_params(&b))) < 1e-15);
        assert_eq!(link_operator(3, &a, &params(4, 0.1, 0.0)), Err(Error::PhotonNumberMismatch(3, 4)));

        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..30 {
            let n = rng.gen_range(0..=20);
            let a = params(n, rng.gen(), rng.gen_range(0.0..TAU));
            let b = params(n, rng.gen(), rng.gen_range(0.0..TAU));
            let t = link_operator(n, &a, &b).unwrap();
            let moved = apply(&t, &gbs_state(&a, n + 1).unwrap()).unwrap();
            let ov = inner(&gbs_state(&b, n + 1).unwrap(), &moved).unwrap();
            assert!((ov.norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn composition_angle_examples() {
        let a = BlochAngles::new(0.8, 1.2).unwrap();
        assert_eq!(composition_angles(&a, &a).theta, 0.0);
        let b = BlochAngles::new(2.1, 1.2).unwrap();
        let comp = composition_angles(&a, &b);
        assert!((comp.theta - 1.3).abs() < 1e-15);
        assert!((comp.phase - c(1.0, 0.0)).norm() < 1e-15);
        // collinear axes commute, so the decomposition is exact there
        assert!(composition_discrepancy(6, &a, &b) < 1e-12);
        let b = BlochAngles::new(0.3, 1.2).unwrap();
        assert!(composition_discrepancy(6, &a, &b) < 1e-12);

        let x = BlochAngles::new(0.1, FRAC_PI_2).unwrap();
        let y = BlochAngles::new(0.1, 0.0).unwrap();
        assert!((composition_angles(&x, &y).theta - 0.1 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn composition_discrepancy_is_finite_off_axis() {
        let a = BlochAngles::new(1.0, 0.0).unwrap();
        let b = BlochAngles::new(1.0, PI / 2.0).unwrap();
        let d = composition_discrepancy(4, &a, &b);
        assert!(d.is_finite());
    }
}
