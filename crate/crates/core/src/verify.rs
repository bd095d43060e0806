//! Seeded invariant suites, grouped by topic.
//!
//! Numerical checks pass when their residual is at most the configured
//! tolerance. A few qualitative checks (sign patterns, monotonicity, the
//! coherent-limit fidelity bound) are pass/fail and do not depend on it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cas::{
    cas_overlap_modulus_sq, cas_state, cas_state_tensor, disentangled_rotation, project_onto_dicke,
    rotated_cas_operators, spin_rotation, CasParams, Spin,
};
use crate::delta_basis::delta_basis;
use crate::gbs::{coherent_state_truncated, gbs_overlap, gbs_state, orthogonal_partner, BlochAngles, GbsParams};
use crate::hilbert::{apply, commutator, inner, StateVector};
use crate::hp_algebra::{hp_operators, link_operator, rotated_operators, rotation_operator, RotationSpec};
use crate::numeric::linspace;
use crate::resolution::{identity_resolution, reconstruct, SphereQuadrature};
use crate::squeezing::{closed_form_indexes, direct_indexes};
use crate::{Error, Result, DEFAULT_TOLERANCE};

pub const GROUPS: [&str; 10] = [
    "orthogonality",
    "overlap",
    "rotation",
    "algebra",
    "completeness",
    "delta",
    "squeezing",
    "bijection",
    "atomic",
    "coherent",
];

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub tolerance: f64,
    pub seed: u64,
    /// Restrict every group to this photon or atom number.
    pub n: Option<usize>,
    /// Run only these groups; `None` runs all of them.
    pub groups: Option<Vec<String>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, seed: 0, n: None, groups: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    pub max_residual: f64,
    /// Labels of the first few failing checks.
    pub failed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub groups: Vec<GroupReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.groups.iter().all(|g| g.passed)
    }
}

const MAX_LISTED_FAILURES: usize = 8;

struct Ctx {
    tol: f64,
    n: Option<usize>,
    rng: ChaCha8Rng,
    checks: usize,
    failures: usize,
    max_residual: f64,
    failed: Vec<String>,
}

impl Ctx {
    fn residual(&mut self, label: impl FnOnce() -> String, r: f64) {
        self.checks += 1;
        if r.is_nan() || r > self.max_residual {
            self.max_residual = if r.is_nan() { f64::NAN } else { r };
        }
        if r.is_nan() || r > self.tol {
            self.fail(label());
        }
    }

    fn holds(&mut self, label: impl FnOnce() -> String, ok: bool) {
        self.checks += 1;
        if !ok {
            self.fail(label());
        }
    }

    fn fail(&mut self, label: String) {
        self.failures += 1;
        if self.failed.len() < MAX_LISTED_FAILURES {
            self.failed.push(label);
        }
    }

    fn ns(&self, default: &[usize]) -> Vec<usize> {
        self.n.map(|n| vec![n]).unwrap_or_else(|| default.to_vec())
    }

    fn params(&mut self, n: usize) -> GbsParams {
        let p = self.rng.gen_range(0.0..=1.0);
        let phi = self.rng.gen_range(0.0..std::f64::consts::TAU);
        GbsParams::new(n, p, phi).expect("sampled in range")
    }

    fn angles(&mut self, theta_max: f64) -> BlochAngles {
        let t = self.rng.gen_range(0.0..=theta_max);
        let f = self.rng.gen_range(0.0..std::f64::consts::TAU);
        BlochAngles::new(t, f).expect("sampled in range")
    }

    fn state(&mut self, dim: usize) -> StateVector {
        let amps = (0..dim).map(|_| Complex64::new(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0)));
        StateVector::new(amps.collect()).expect("dim > 0").normalized()
    }
}

/// Runs the selected groups. Groups are independent and seeded separately,
/// so the report does not depend on which other groups were selected.
pub fn run(config: &VerifyConfig) -> Result<VerifyReport> {
    if config.tolerance.is_nan() || config.tolerance <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", config.tolerance)));
    }
    let selected: Vec<(usize, &str)> = match &config.groups {
        None => GROUPS.iter().copied().enumerate().collect(),
        Some(names) => {
            let mut out = Vec::new();
            for name in names {
                let idx = GROUPS
                    .iter()
                    .position(|g| g == name)
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown group '{name}'")))?;
                if !out.iter().any(|(i, _)| *i == idx) {
                    out.push((idx, GROUPS[idx]));
                }
            }
            out.sort();
            out
        }
    };
    let groups = selected
        .par_iter()
        .map(|&(idx, name)| {
            let mut ctx = Ctx {
                tol: config.tolerance,
                n: config.n,
                rng: ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(idx as u64)),
                checks: 0,
                failures: 0,
                max_residual: 0.0,
                failed: Vec::new(),
            };
            run_group(name, &mut ctx);
            GroupReport {
                name: name.to_string(),
                passed: ctx.failures == 0,
                checks: ctx.checks,
                failures: ctx.failures,
                max_residual: ctx.max_residual,
                failed: ctx.failed,
            }
        })
        .collect();
    Ok(VerifyReport { groups })
}

fn run_group(name: &str, ctx: &mut Ctx) {
    match name {
        "orthogonality" => orthogonality(ctx),
        "overlap" => overlap(ctx),
        "rotation" => rotation(ctx),
        "algebra" => algebra(ctx),
        "completeness" => completeness(ctx),
        "delta" => delta(ctx),
        "squeezing" => squeezing(ctx),
        "bijection" => bijection(ctx),
        "atomic" => atomic_formulas(ctx),
        "coherent" => coherent(ctx),
        _ => unreachable!("group names validated in run"),
    }
}

fn orthogonality(ctx: &mut Ctx) {
    for n in ctx.ns(&[0, 1, 2, 5, 10, 30, 50]) {
        for _ in 0..20 {
            let a = ctx.params(n);
            let b = orthogonal_partner(&a);
            let closed = gbs_overlap(&a, &b).unwrap().norm();
            let label = || format!("partner overlap N={n} p={} phi={}", a.p(), a.phi());
            if n == 0 {
                // a single level has no orthogonal partner
                ctx.residual(label, (closed - 1.0).abs());
                continue;
            }
            ctx.residual(label, closed);
            let direct = inner(&gbs_state(&a, n + 1).unwrap(), &gbs_state(&b, n + 1).unwrap()).unwrap().norm();
            ctx.residual(|| format!("partner inner product N={n}"), direct);
        }
    }
}

fn overlap(ctx: &mut Ctx) {
    for n in ctx.ns(&[0, 1, 2, 5, 10, 30, 50]) {
        for _ in 0..20 {
            let a = ctx.params(n);
            let b = ctx.params(n);
            let closed = gbs_overlap(&a, &b).unwrap();
            let direct = inner(&gbs_state(&a, n + 1).unwrap(), &gbs_state(&b, n + 1).unwrap()).unwrap();
            ctx.residual(|| format!("closed vs direct overlap N={n}"), (closed - direct).norm());
            let back = gbs_overlap(&b, &a).unwrap();
            ctx.residual(|| format!("overlap symmetry N={n}"), (back - closed.conj()).norm());
        }
    }
}

fn rotation(ctx: &mut Ctx) {
    for n in ctx.ns(&[1, 2, 5, 10, 20]) {
        let top = StateVector::basis(n + 1, n);
        for _ in 0..5 {
            let a = ctx.params(n);
            let r = rotation_operator(n, &RotationSpec::from_params(&a));
            let rotated = apply(&r, &top).unwrap();
            let target = gbs_state(&a, n + 1).unwrap();
            ctx.residual(|| format!("R|N> vs GBS N={n}"), 1.0 - target.fidelity(&rotated).unwrap());
            ctx.residual(|| format!("unitarity N={n}"), r.unitarity_defect());
            let b = ctx.params(n);
            let link = link_operator(n, &a, &b).unwrap();
            let moved = apply(&link, &target).unwrap();
            let goal = gbs_state(&b, n + 1).unwrap();
            ctx.residual(|| format!("link operator N={n}"), 1.0 - goal.fidelity(&moved).unwrap());
        }
    }
}

fn algebra(ctx: &mut Ctx) {
    for n in ctx.ns(&[1, 2, 5, 10, 30]) {
        let ops = hp_operators(n);
        let half = n as f64 / 2.0;
        let casimir = half * (half + 1.0);
        ctx.residual(|| format!("unrotated commutators N={n}"), ops.algebra_residual());
        let id = crate::hilbert::OperatorMatrix::identity(n + 1);
        ctx.residual(|| format!("unrotated Casimir N={n}"), ops.jsq.max_abs_diff(&id.scale_re(casimir)));
        let top = StateVector::basis(n + 1, n);
        let eig = apply(&ops.j3, &top).unwrap().max_abs_diff(&top.scale(Complex64::new(half, 0.0)));
        ctx.residual(|| format!("J3|N> N={n}"), eig);
        for _ in 0..3 {
            let a = ctx.params(n);
            let rot = rotated_operators(n, a.p(), a.phi()).unwrap();
            ctx.residual(|| format!("rotated commutators N={n}"), rot.algebra_residual());
            ctx.residual(
                || format!("[J^2, J+'] N={n}"),
                commutator(&ops.jsq, &rot.jplus).unwrap().max_abs(),
            );
            let g = gbs_state(&a, n + 1).unwrap();
            let partner = gbs_state(&orthogonal_partner(&a), n + 1).unwrap();
            let up = apply(&rot.j3, &g).unwrap().max_abs_diff(&g.scale(Complex64::new(half, 0.0)));
            ctx.residual(|| format!("J3' on GBS N={n} p={}", a.p()), up);
            let down = apply(&rot.j3, &partner).unwrap().max_abs_diff(&partner.scale(Complex64::new(-half, 0.0)));
            ctx.residual(|| format!("J3' on partner N={n} p={}", a.p()), down);
            ctx.residual(|| format!("J+' annihilates GBS N={n}"), apply(&rot.jplus, &g).unwrap().norm());
        }
    }
}

fn completeness(ctx: &mut Ctx) {
    let ns = ctx.ns(&(0..=12).collect::<Vec<_>>());
    for &n in &ns {
        let quad = SphereQuadrature::default_for(n);
        let res = identity_resolution(n, &quad);
        let id = crate::hilbert::OperatorMatrix::identity(n + 1);
        ctx.residual(|| format!("identity resolution N={n}"), res.operator.max_abs_diff(&id));
    }
    for i in 0..10 {
        let n = ns[i % ns.len()];
        let quad = SphereQuadrature::default_for(n);
        let psi = ctx.state(n + 1);
        let back = reconstruct(&psi, n, &quad).unwrap();
        ctx.residual(|| format!("reconstruction round trip N={n}"), back.max_abs_diff(&psi));
    }
}

fn delta(ctx: &mut Ctx) {
    for n in ctx.ns(&[1, 2, 3, 7, 15, 30]) {
        for _ in 0..2 {
            let a = ctx.params(n);
            let b = delta_basis(n, a.p(), a.phi()).unwrap();
            ctx.residual(|| format!("orthonormality N={n} p={}", a.p()), b.orthonormality_defect());
            ctx.residual(|| format!("completeness N={n} p={}", a.p()), b.completeness_defect());
            ctx.residual(|| format!("J3' eigenvalues N={n} p={}", a.p()), b.eigen_residual());
        }
    }
    if ctx.n.is_none() || ctx.n == Some(2) {
        for _ in 0..10 {
            let a = ctx.params(2);
            let (p, phi) = (a.p(), a.phi());
            let s = (2.0 * p * (1.0 - p)).sqrt();
            let expected = StateVector::new(vec![
                Complex64::new(s, 0.0),
                Complex64::from_polar(2.0 * p - 1.0, phi),
                Complex64::from_polar(-s, 2.0 * phi),
            ])
            .unwrap();
            let mid = &delta_basis(2, p, phi).unwrap().states[1];
            ctx.residual(|| format!("two-photon middle state p={p} phi={phi}"), mid.max_abs_diff(&expected));
        }
    }
}

fn squeezing(ctx: &mut Ctx) {
    let ps = linspace(0.0, 1.0, 11);
    let phis = linspace(0.0, std::f64::consts::TAU, 11);
    for n in ctx.ns(&[1, 2, 5, 20]) {
        for &p in &ps {
            for &phi in &phis {
                let (cx, cp) = closed_form_indexes(n, p, phi).unwrap();
                let (dx, dp) = direct_indexes(n, p, phi).unwrap();
                ctx.residual(|| format!("closed vs direct N={n} p={p} phi={phi}"), (cx - dx).abs().max((cp - dp).abs()));
                ctx.holds(|| format!("both quadratures squeezed N={n} p={p} phi={phi}"), !(cx > 1e-12 && cp > 1e-12));
            }
        }
        let (x0, p0) = closed_form_indexes(n, 0.0, 0.7).unwrap();
        ctx.residual(|| format!("vacuum endpoint N={n}"), x0.abs().max(p0.abs()));
        let (x1, p1) = closed_form_indexes(n, 1.0, 0.7).unwrap();
        let nn = 2.0 * n as f64;
        ctx.residual(|| format!("number-state endpoint N={n}"), (x1 + nn).abs().max((p1 + nn).abs()));
        if n >= 1 {
            let max = ps
                .iter()
                .flat_map(|&p| phis.iter().map(move |&f| closed_form_indexes(n, p, f).unwrap().0))
                .fold(f64::MIN, f64::max);
            ctx.holds(|| format!("squeezing present N={n}"), max > 0.0);
        }
    }
}

fn bijection(ctx: &mut Ctx) {
    for n in ctx.ns(&(0..=12).collect::<Vec<_>>()) {
        for _ in 0..5 {
            let a = ctx.params(n);
            let cas = cas_state(&CasParams::from_gbs(&a));
            let gbs = gbs_state(&a, n + 1).unwrap();
            ctx.residual(|| format!("CAS vs GBS amplitudes N={n} p={}", a.p()), cas.max_abs_diff(&gbs));
        }
        if n <= 8 {
            let angles = ctx.angles(std::f64::consts::PI);
            let coeffs = project_onto_dicke(&cas_state_tensor(n, &angles).unwrap(), n).unwrap();
            let phase = Complex64::from_polar(1.0, -(n as f64) * angles.varphi());
            let cas = cas_state(&CasParams::new(Spin::for_atoms(n), angles));
            ctx.residual(|| format!("tensor-space oracle N={n}"), coeffs.scale(phase).max_abs_diff(&cas));
        }
    }
}

fn atomic_formulas(ctx: &mut Ctx) {
    let spins: Vec<usize> = ctx.n.map(|n| vec![n]).unwrap_or_else(|| (0..=10).collect());
    for &two_j in &spins {
        let spin = Spin::from_twice(two_j);
        for _ in 0..3 {
            let a = ctx.angles(3.0);
            let d = disentangled_rotation(spin, &a).unwrap();
            ctx.residual(
                || format!("disentangled rotation 2J={two_j} theta={}", a.theta()),
                d.frobenius_distance(&spin_rotation(spin, &a)),
            );
            let rot = rotated_cas_operators(spin, &a);
            let cas = cas_state(&CasParams::new(spin, a));
            let jz = apply(&rot.jz, &cas).unwrap().max_abs_diff(&cas.scale(Complex64::new(spin.value(), 0.0)));
            ctx.residual(|| format!("J'_z eigenvalue 2J={two_j}"), jz);
            ctx.residual(|| format!("J'_+ annihilates CAS 2J={two_j}"), apply(&rot.jplus, &cas).unwrap().norm());
        }
        for _ in 0..10 {
            let a = ctx.angles(std::f64::consts::PI);
            let b = ctx.angles(std::f64::consts::PI);
            let sa = cas_state(&CasParams::new(spin, a));
            let sb = cas_state(&CasParams::new(spin, b));
            let direct = inner(&sa, &sb).unwrap().norm_sqr();
            ctx.residual(|| format!("CAS overlap law 2J={two_j}"), (cas_overlap_modulus_sq(spin, &a, &b) - direct).abs());
            if two_j > 0 {
                let anti = inner(&sa, &cas_state(&CasParams::new(spin, a.antipode()))).unwrap().norm();
                ctx.residual(|| format!("antipodal CAS overlap 2J={two_j}"), anti);
            }
        }
    }
}

fn coherent(ctx: &mut Ctx) {
    let ns = ctx.ns(&[10, 50, 200]);
    let mut fidelities = Vec::with_capacity(ns.len());
    for &n in &ns {
        let dim = (n + 1).max(40);
        let alpha = coherent_state_truncated(Complex64::new(1.0, 0.0), dim).unwrap();
        let params = GbsParams::new(n, 1.0 / n.max(1) as f64, 0.0).unwrap();
        let f = alpha.fidelity(&gbs_state(&params, dim).unwrap()).unwrap();
        fidelities.push((n, f));
    }
    for w in fidelities.windows(2) {
        let ((n1, f1), (n2, f2)) = (w[0], w[1]);
        ctx.holds(|| format!("fidelity N={n1} -> N={n2} decreased"), n2 < n1 || f2 >= f1);
    }
    for &(n, f) in &fidelities {
        if n >= 200 {
            ctx.holds(|| format!("fidelity at N={n} is {f}"), f >= 0.99);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let report = run(&VerifyConfig::default()).unwrap();
        assert_eq!(report.groups.len(), GROUPS.len());
        for g in &report.groups {
            assert!(g.passed, "{g:?}");
            assert!(g.checks > 0);
        }
        assert!(report.passed());
    }

    #[test]
    fn over_tight_tolerance_reports_failures() {
        let config = VerifyConfig { tolerance: 1e-16, groups: Some(vec!["delta".into(), "rotation".into()]), ..Default::default() };
        let report = run(&config).unwrap();
        assert!(!report.passed());
        assert!(report.groups.iter().any(|g| g.failures > 0 && !g.failed.is_empty()));
    }

    #[test]
    fn filtering_and_validation() {
        let config = VerifyConfig { n: Some(5), groups: Some(vec!["completeness".into()]), ..Default::default() };
        let report = run(&config).unwrap();
        assert_eq!(report.groups.len(), 1);
        assert_eq!(report.groups[0].name, "completeness");
        assert_eq!(report.groups[0].checks, 11);
        assert!(report.passed());
        assert!(run(&VerifyConfig { groups: Some(vec!["nope".into()]), ..Default::default() }).is_err());
        assert!(run(&VerifyConfig { tolerance: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let config = VerifyConfig { seed: 7, groups: Some(vec!["overlap".into(), "atomic".into()]), ..Default::default() };
        assert_eq!(run(&config).unwrap(), run(&config).unwrap());
    }
}
