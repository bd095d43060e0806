//! Collective spin of `N` two-level atoms: Dicke ladder operators, a
//! brute-force `2^N` tensor-product space, coherent atomic states (CAS)
//! and their rotations.
//!
//! On the `(2J+1)`-dimensional ladder the basis is `|J, -J+n>`,
//! `n = 0..=2J`. A CAS has coefficients
//! `C(2J,n)^{1/2} cos^n(theta/2) sin^{2J-n}(theta/2) e^{-i n varphi}`.
//! With `J = N/2` and the map of [`params_to_angles`] these coincide with
//! the amplitudes of the GBS `|N,p,phi>`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::compensated::{Dd, DdComplex, DdMatrix};
use crate::gbs::{params_to_angles, BlochAngles, GbsParams};
use crate::hilbert::{expm, inner, OperatorMatrix, StateVector};
use crate::hp_algebra::{casimir, ladder_algebra_residual, rotation_from_ladder};
use crate::numeric::{binomial, ln_binomial};
use crate::resolution::{pairwise_sum, ExpansionAmplitude, IdentityResolution, SphereQuadrature};
use crate::{Error, Result};

/// Largest atom number accepted by [`TensorAtomSpace`].
pub const MAX_TENSOR_ATOMS: usize = 12;

/// A spin quantum number `J`, stored as the integer `2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: usize,
}

impl Spin {
    pub fn from_twice(twice: usize) -> Self {
        Self { twice }
    }

    /// `J = N/2` for `N` atoms.
    pub fn for_atoms(n: usize) -> Self {
        Self { twice: n }
    }

    /// Parses `J` given as a float; `2J` must be a non-negative integer.
    pub fn from_value(j: f64) -> Result<Self> {
        let t = 2.0 * j;
        if !t.is_finite() || t < 0.0 || t.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!("spin {j} is not a non-negative half-integer")));
        }
        Ok(Self { twice: t as usize })
    }

    pub fn twice(&self) -> usize {
        self.twice
    }

    pub fn value(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice + 1
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// `J_z`, `J_+`, `J_-` and `J^2` on the Dicke ladder of one spin-`J` block.
#[derive(Debug, Clone)]
pub struct SpinJOperators {
    pub spin: Spin,
    pub jz: OperatorMatrix,
    pub jplus: OperatorMatrix,
    pub jminus: OperatorMatrix,
    pub jsq: OperatorMatrix,
}

impl SpinJOperators {
    fn from_jz_jplus(spin: Spin, jz: OperatorMatrix, jplus: OperatorMatrix) -> Self {
        let jminus = jplus.adjoint();
        let jsq = casimir(&jz, &jplus, &jminus);
        Self { spin, jz, jplus, jminus, jsq }
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    /// `(J_+ + J_-)/2`
    pub fn jx(&self) -> OperatorMatrix {
        (&self.jplus + &self.jminus).scale_re(0.5)
    }

    /// `(J_+ - J_-)/2i`
    pub fn jy(&self) -> OperatorMatrix {
        (&self.jplus - &self.jminus).scale(Complex64::new(0.0, -0.5))
    }

    /// Largest residual of `[J+,J-] = 2Jz`, `[Jz,J+-] = +-J+-`, `[J^2,J_i] = 0`.
    pub fn algebra_residual(&self) -> f64 {
        ladder_algebra_residual(&self.jz, &self.jplus, &self.jminus, &self.jsq)
    }
}

/// `J_+|J,M> = sqrt((J-M)(J+M+1)) |J,M+1>` with `M = -J + n`.
pub fn spin_j_operators(spin: Spin) -> SpinJOperators {
    let two_j = spin.twice;
    let dim = spin.dim();
    let jz = OperatorMatrix::real_diagonal(&(0..dim).map(|n| n as f64 - spin.value()).collect::<Vec<_>>());
    let jplus = OperatorMatrix::from_fn(dim, |i, j| {
        if i == j + 1 {
            Complex64::new((((two_j - j) * (j + 1)) as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    SpinJOperators::from_jz_jplus(spin, jz, jplus)
}

/// `exp(-xi J_+ + conj(xi) J_-)` with `xi = (theta/2) e^{-i varphi}`.
pub fn spin_rotation(spin: Spin, angles: &BlochAngles) -> OperatorMatrix {
    let ops = spin_j_operators(spin);
    rotation_from_ladder(&ops.jplus, &ops.jminus, xi(angles))
}

fn xi(angles: &BlochAngles) -> Complex64 {
    Complex64::from_polar(angles.theta() / 2.0, -angles.varphi())
}

/// CAS direction together with its spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasParams {
    pub spin: Spin,
    pub angles: BlochAngles,
}

impl CasParams {
    pub fn new(spin: Spin, angles: BlochAngles) -> Self {
        Self { spin, angles }
    }

    /// The CAS with `J = N/2` that corresponds to a GBS.
    pub fn from_gbs(params: &GbsParams) -> Self {
        Self { spin: Spin::for_atoms(params.n()), angles: params_to_angles(params) }
    }
}

/// Dicke-ladder coefficients of `|theta, varphi>`.
pub fn cas_state(params: &CasParams) -> StateVector {
    let two_j = params.spin.twice;
    let half = params.angles.theta() / 2.0;
    let (s, c) = half.sin_cos();
    let varphi = params.angles.varphi();
    let amps = (0..=two_j)
        .map(|n| Complex64::from_polar(cas_modulus(two_j, n, c, s), -(n as f64) * varphi))
        .collect();
    StateVector::new(amps).expect("non-empty")
}

/// `C(m,n)^{1/2} c^n s^{m-n}`, with `0^0 = 1`.
fn cas_modulus(m: usize, n: usize, c: f64, s: f64) -> f64 {
    let k = m - n;
    if (c == 0.0 && n > 0) || (s == 0.0 && k > 0) {
        return 0.0;
    }
    let lin = binomial(m, n).sqrt() * c.powi(n as i32) * s.powi(k as i32);
    if lin.is_finite() && lin > 1e-250 {
        return lin;
    }
    let mut log = 0.5 * ln_binomial(m, n);
    if n > 0 {
        log += n as f64 * c.ln();
    }
    if k > 0 {
        log += k as f64 * s.ln();
    }
    log.exp()
}

/// `e^{tau* J_-} e^{-ln(1+|tau|^2) J_z} e^{-tau J_+}`, `tau = tan(theta/2) e^{-i varphi}`.
///
/// The three factors have entries of order `|tau|^{2J}` that cancel in the
/// product, so the product is formed in double-double arithmetic and
/// rounded once at the end. The middle factor is evaluated as
/// `diag(q^{-2M})` with `q = (1+|tau|^2)^{1/2}`.
pub fn disentangled_rotation(spin: Spin, angles: &BlochAngles) -> Result<OperatorMatrix> {
    if angles.theta() == std::f64::consts::PI {
        return Err(Error::SingularAtPole);
    }
    let two_j = spin.twice;
    let dim = spin.dim();
    let tau = DdComplex::from_c64(Complex64::from_polar((angles.theta() / 2.0).tan(), -angles.varphi()));

    let mut jplus = DdMatrix::zeros(dim);
    let mut jminus = DdMatrix::zeros(dim);
    for n in 0..two_j {
        let e = DdComplex::from_real(Dd::from_f64(((two_j - n) * (n + 1)) as f64).sqrt());
        jplus.set(n + 1, n, e);
        jminus.set(n, n + 1, e);
    }
    let minus_one = Dd::from_f64(-1.0);
    let right = jplus.scale(tau.scale(minus_one)).exp_nilpotent();
    let left = jminus.scale(tau.conj()).exp_nilpotent();

    let q = (Dd::ONE + tau.norm_sqr()).sqrt();
    let mut middle = DdMatrix::zeros(dim);
    for k in 0..dim {
        middle.set(k, k, DdComplex::from_real(q.powi(two_j as i32 - 2 * k as i32)));
    }
    let product = left.matmul(&middle).matmul(&right);
    Ok(OperatorMatrix::from_fn(dim, |i, j| product.get(i, j).to_c64()))
}

/// Rotated operators in closed form:
///
/// `J'_z = J_z cos(theta) + sin(theta) (J_+ e^{-i varphi} + J_- e^{i varphi}) / 2`,
/// `J'_+ = e^{i varphi} [J_+ e^{-i varphi} cos^2(theta/2) - J_- e^{i varphi} sin^2(theta/2) - J_z sin(theta)]`,
/// `J'_- = (J'_+)^dagger`.
pub fn rotated_cas_operators(spin: Spin, angles: &BlochAngles) -> SpinJOperators {
    let ops = spin_j_operators(spin);
    let (st, ct) = angles.theta().sin_cos();
    let (sh, ch) = (angles.theta() / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, angles.varphi());
    let e_conj = e.conj();
    let jz = &ops.jz.scale_re(ct) + &(&ops.jplus.scale(e_conj) + &ops.jminus.scale(e)).scale_re(st / 2.0);
    let bracket =
        &(&ops.jplus.scale(e_conj * (ch * ch)) - &ops.jminus.scale(e * (sh * sh))) - &ops.jz.scale_re(st);
    SpinJOperators::from_jz_jplus(spin, jz, bracket.scale(e))
}

/// The same operators as `R J R^{-1}`.
pub fn conjugated_cas_operators(spin: Spin, angles: &BlochAngles) -> SpinJOperators {
    let ops = spin_j_operators(spin);
    let r = rotation_from_ladder(&ops.jplus, &ops.jminus, xi(angles));
    let r_inv = r.adjoint();
    let jz = &(&r * &ops.jz) * &r_inv;
    let jplus = &(&r * &ops.jplus) * &r_inv;
    SpinJOperators::from_jz_jplus(spin, jz, jplus)
}

/// Angle between two directions on the sphere, in `[0, pi]`.
pub fn great_circle_angle(a: &BlochAngles, b: &BlochAngles) -> f64 {
    let u = a.unit_vector();
    let v = b.unit_vector();
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    sin.atan2(dot)
}

/// `|<a|b>|^2 = cos^{4J}(Theta/2) = ((1 + cos Theta)/2)^{2J}`, with
/// `Theta` the great-circle angle between the two directions.
pub fn cas_overlap_modulus_sq(spin: Spin, a: &BlochAngles, b: &BlochAngles) -> f64 {
    let half = great_circle_angle(a, b) / 2.0;
    half.cos().powi(2 * spin.twice as i32)
}

/// Quadrature value of `(2J+1) int dOmega/4pi |theta,varphi><theta,varphi|`.
pub fn cas_identity_resolution(spin: Spin, quad: &SphereQuadrature) -> IdentityResolution {
    let dim = spin.dim();
    let pref = dim as f64 / (4.0 * std::f64::consts::PI);
    let terms: Vec<OperatorMatrix> = quad
        .points()
        .par_iter()
        .map(|(angles, w)| {
            let s = cas_state(&CasParams::new(spin, *angles));
            OperatorMatrix::from_fn(dim, |i, j| s[i] * s[j].conj() * (w * pref))
        })
        .collect();
    IdentityResolution {
        operator: pairwise_sum(&terms, |a, b| a + b).unwrap_or_else(|| OperatorMatrix::zeros(dim)),
        under_resolved: !quad.is_exact_for(spin.twice),
    }
}

/// Rebuilds `psi` from its CAS expansion
/// `(2J+1) int dOmega/4pi f(tau*)/[1+|tau|^2]^J |theta,varphi>`, where the
/// weight `f/[1+|tau|^2]^J` is the overlap `<theta,varphi|psi>`.
pub fn cas_expansion_check(spin: Spin, psi: &StateVector, quad: &SphereQuadrature) -> Result<StateVector> {
    let dim = spin.dim();
    if psi.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: psi.dim() });
    }
    let pref = dim as f64 / (4.0 * std::f64::consts::PI);
    let terms: Vec<StateVector> = quad
        .points()
        .par_iter()
        .map(|(angles, w)| {
            let s = cas_state(&CasParams::new(spin, *angles));
            let weight = inner(&s, psi).expect("same dim") * (w * pref);
            s.scale(weight)
        })
        .collect();
    Ok(pairwise_sum(&terms, |a, b| a + b).unwrap_or_else(|| StateVector::zeros(dim)))
}

/// Amplitude function at one CAS, `tau = tan(theta/2) e^{-i varphi}`.
///
/// `value = [1+|tau|^2]^J <theta,varphi|psi>`; `polynomial` is the same
/// number written as `e^{2iJ varphi} sum_n c_n C(2J,n)^{1/2} tau^{2J-n}`.
/// Both are `None` at `theta = pi`.
pub fn cas_amplitude(psi: &StateVector, params: &CasParams) -> Result<ExpansionAmplitude> {
    let two_j = params.spin.twice;
    if psi.dim() != params.spin.dim() {
        return Err(Error::DimensionMismatch { expected: params.spin.dim(), found: psi.dim() });
    }
    let overlap = inner(&cas_state(params), psi)?;
    let theta = params.angles.theta();
    if theta == std::f64::consts::PI {
        return Ok(ExpansionAmplitude { tau: None, value: None, polynomial: None, overlap });
    }
    let varphi = params.angles.varphi();
    let tau = Complex64::from_polar((theta / 2.0).tan(), -varphi);
    let value = overlap * (1.0 + tau.norm_sqr()).powf(params.spin.value());
    let poly: Complex64 =
        (0..=two_j).map(|n| psi[n] * binomial(two_j, n).sqrt() * tau.powu((two_j - n) as u32)).sum();
    let polynomial = poly * Complex64::from_polar(1.0, two_j as f64 * varphi);
    Ok(ExpansionAmplitude { tau: Some(tau), value: Some(value), polynomial: Some(polynomial), overlap })
}

/// The `2^N`-dimensional space of `N` distinguishable two-level atoms.
///
/// Basis index bit `j` is the state of atom `j` (`0 = |g>`, `1 = |e>`).
/// Collective operators are dense and built on first use; at twelve atoms
/// each one takes about 270 MB.
#[derive(Debug)]
pub struct TensorAtomSpace {
    n_atoms: usize,
    jz: OnceLock<OperatorMatrix>,
    jplus: OnceLock<OperatorMatrix>,
    jminus: OnceLock<OperatorMatrix>,
    jsq: OnceLock<OperatorMatrix>,
}

type SpaceCache = RwLock<HashMap<usize, Arc<TensorAtomSpace>>>;

fn space_cache() -> &'static SpaceCache {
    static CACHE: OnceLock<SpaceCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

const SIGMA_PLUS: [[f64; 2]; 2] = [[0.0, 0.0], [1.0, 0.0]];
const HALF_SIGMA_Z: [[f64; 2]; 2] = [[-0.5, 0.0], [0.0, 0.5]];

impl TensorAtomSpace {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms > MAX_TENSOR_ATOMS {
            return Err(Error::TooManyAtoms(n_atoms));
        }
        Ok(Self {
            n_atoms,
            jz: OnceLock::new(),
            jplus: OnceLock::new(),
            jminus: OnceLock::new(),
            jsq: OnceLock::new(),
        })
    }

    /// Process-wide instance for `n_atoms`, so operator matrices are built once.
    pub fn shared(n_atoms: usize) -> Result<Arc<Self>> {
        if let Some(space) = space_cache().read().unwrap().get(&n_atoms) {
            return Ok(space.clone());
        }
        let fresh = Arc::new(Self::new(n_atoms)?);
        let mut guard = space_cache().write().unwrap();
        Ok(guard.entry(n_atoms).or_insert(fresh).clone())
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        1 << self.n_atoms
    }

    /// `sum_j I x .. x op_j x .. x I` for a single-atom operator in the
    /// `(g, e)` basis.
    fn collective(&self, op: &[[f64; 2]; 2]) -> OperatorMatrix {
        let mut m = OperatorMatrix::zeros(self.dim());
        for atom in 0..self.n_atoms {
            let bit = 1usize << atom;
            for col in 0..self.dim() {
                let b = usize::from(col & bit != 0);
                for (a, row_op) in op.iter().enumerate() {
                    let v = row_op[b];
                    if v != 0.0 {
                        let row = if a == 1 { col | bit } else { col & !bit };
                        m[(row, col)] += Complex64::new(v, 0.0);
                    }
                }
            }
        }
        m
    }

    pub fn jz(&self) -> &OperatorMatrix {
        self.jz.get_or_init(|| self.collective(&HALF_SIGMA_Z))
    }

    pub fn jplus(&self) -> &OperatorMatrix {
        self.jplus.get_or_init(|| self.collective(&SIGMA_PLUS))
    }

    pub fn jminus(&self) -> &OperatorMatrix {
        self.jminus.get_or_init(|| self.jplus().adjoint())
    }

    pub fn jx(&self) -> OperatorMatrix {
        (self.jplus() + self.jminus()).scale_re(0.5)
    }

    pub fn jy(&self) -> OperatorMatrix {
        (self.jplus() - self.jminus()).scale(Complex64::new(0.0, -0.5))
    }

    /// `J^2 = 3N/4 + sum_{i<j} (P_ij - 1/2)` with `P_ij` the swap of atoms
    /// `i` and `j`.
    pub fn jsq(&self) -> &OperatorMatrix {
        self.jsq.get_or_init(|| {
            let n = self.n_atoms;
            let pairs = n * n.saturating_sub(1) / 2;
            let base = 0.75 * n as f64 - 0.5 * pairs as f64;
            let mut m = OperatorMatrix::zeros(self.dim());
            for col in 0..self.dim() {
                let mut diag = base;
                for i in 0..n {
                    for j in i + 1..n {
                        let (bi, bj) = ((col >> i) & 1, (col >> j) & 1);
                        if bi == bj {
                            diag += 1.0;
                        } else {
                            let row = col ^ (1 << i) ^ (1 << j);
                            m[(row, col)] += Complex64::new(1.0, 0.0);
                        }
                    }
                }
                m[(col, col)] += Complex64::new(diag, 0.0);
            }
            m
        })
    }

    /// `J_+ v` without forming the dense matrix.
    pub fn raise(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.dim() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (col, &a) in v.amplitudes().iter().enumerate() {
            for atom in 0..self.n_atoms {
                if col & (1 << atom) == 0 {
                    out[col | (1 << atom)] += a;
                }
            }
        }
        StateVector::new(out)
    }

    /// Product state `|k_1 k_2 ... k_N>`, `true` meaning excited.
    pub fn product_state(&self, excited: &[bool]) -> Result<StateVector> {
        if excited.len() != self.n_atoms {
            return Err(Error::DimensionMismatch { expected: self.n_atoms, found: excited.len() });
        }
        let index = excited.iter().enumerate().filter(|(_, &e)| e).map(|(j, _)| 1usize << j).sum();
        Ok(StateVector::basis(self.dim(), index))
    }

    /// Dense `exp(-xi J_+ + conj(xi) J_-)` on the whole tensor space.
    pub fn rotation(&self, angles: &BlochAngles) -> OperatorMatrix {
        let e = xi(angles);
        expm(&(&self.jminus().scale(e.conj()) - &self.jplus().scale(e)))
    }

    /// Applies the same 2x2 matrix to every atom.
    fn apply_each(&self, v: &StateVector, u: &OperatorMatrix) -> StateVector {
        let mut amps = v.amplitudes().to_vec();
        for atom in 0..self.n_atoms {
            let bit = 1usize << atom;
            for idx in (0..self.dim()).filter(|i| i & bit == 0) {
                let (g, e) = (amps[idx], amps[idx | bit]);
                amps[idx] = u[(0, 0)] * g + u[(0, 1)] * e;
                amps[idx | bit] = u[(1, 0)] * g + u[(1, 1)] * e;
            }
        }
        StateVector::new(amps).expect("non-empty")
    }
}

/// `|J, -J+n> = (1/n!) C(N,n)^{-1/2} J_+^n |g...g>` for `n = 0..=N`.
pub fn dicke_states_tensor(n_atoms: usize) -> Result<Vec<StateVector>> {
    let space = TensorAtomSpace::shared(n_atoms)?;
    let mut raised = StateVector::basis(space.dim(), 0);
    let mut out = Vec::with_capacity(n_atoms + 1);
    out.push(raised.clone());
    for n in 1..=n_atoms {
        raised = space.raise(&raised)?.scale(Complex64::new(1.0 / n as f64, 0.0));
        out.push(raised.scale(Complex64::new(binomial(n_atoms, n).sqrt().recip(), 0.0)));
    }
    Ok(out)
}

/// CAS of `n_atoms` built in the tensor space by rotating `|e...e>`.
///
/// The collective rotation factorizes into one `2x2` rotation per atom,
/// and that is how it is applied here.
pub fn cas_state_tensor(n_atoms: usize, angles: &BlochAngles) -> Result<StateVector> {
    let space = TensorAtomSpace::shared(n_atoms)?;
    let single = spin_rotation(Spin::from_twice(1), angles);
    let top = StateVector::basis(space.dim(), space.dim() - 1);
    Ok(space.apply_each(&top, &single))
}

/// `<J, -J+n | psi>` for each Dicke state of the tensor space.
pub fn project_onto_dicke(psi: &StateVector, n_atoms: usize) -> Result<StateVector> {
    let dicke = dicke_states_tensor(n_atoms)?;
    let coeffs = dicke.iter().map(|d| inner(d, psi)).collect::<Result<Vec<_>>>()?;
    StateVector::new(coeffs)
}
