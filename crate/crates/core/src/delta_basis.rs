//! The orthonormal "Delta" basis: eigenstates of the rotated `J3'`
//! interpolating between the orthogonal pair `|N,1-p,phi+pi>` (m = 0) and
//! `|N,p,phi>` (m = N).

use num_complex::Complex64;

use crate::gbs::{gbs_state, orthogonal_partner, GbsParams};
use crate::hilbert::{apply, OperatorMatrix, StateVector};
use crate::hp_algebra::rotated_operators;
use crate::numeric::binomial;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct DeltaBasis {
    pub n: usize,
    pub p: f64,
    pub phi: f64,
    /// `states[m]` carries the label `(N/2, m - N/2)`.
    pub states: Vec<StateVector>,
}

impl DeltaBasis {
    /// Matrix whose columns are the basis states.
    pub fn as_matrix(&self) -> OperatorMatrix {
        OperatorMatrix::from_columns(&self.states).expect("N+1 states of dimension N+1")
    }

    /// Largest `| <s_i|s_j> - delta_ij |`.
    pub fn orthonormality_defect(&self) -> f64 {
        let u = self.as_matrix();
        (&u.adjoint() * &u).max_abs_diff(&OperatorMatrix::identity(self.n + 1))
    }

    /// Largest `| sum_m |s_m><s_m| - I |` entry.
    pub fn completeness_defect(&self) -> f64 {
        let u = self.as_matrix();
        (&u * &u.adjoint()).max_abs_diff(&OperatorMatrix::identity(self.n + 1))
    }

    /// Largest `|| J3' s_m - (m - N/2) s_m ||_max`.
    pub fn eigen_residual(&self) -> f64 {
        let rot = rotated_operators(self.n, self.p, self.phi).expect("p validated at construction");
        self.states
            .iter()
            .enumerate()
            .map(|(m, s)| {
                let eig = m as f64 - self.n as f64 / 2.0;
                apply(&rot.j3, s).unwrap().max_abs_diff(&s.scale(Complex64::new(eig, 0.0)))
            })
            .fold(0.0, f64::max)
    }
}

/// Builds the basis by the step recursion
/// `s_m = J+' s_{m-1} / sqrt(m (N - m + 1))` starting from the orthogonal
/// partner of `|N,p,phi>`.
///
/// Every state is renormalized and given the canonical phase (first
/// nonzero amplitude real positive). At `p = 1` the result is the number
/// basis, at `p = 0` the reversed number basis.
pub fn delta_basis(n: usize, p: f64, phi: f64) -> Result<DeltaBasis> {
    let params = GbsParams::new(n, p, phi)?;
    let phi = params.phi();
    let dim = n + 1;
    let states = if p == 1.0 {
        (0..dim).map(|m| StateVector::basis(dim, m)).collect()
    } else if p == 0.0 {
        (0..dim).map(|m| StateVector::basis(dim, n - m)).collect()
    } else {
        let rot = rotated_operators(n, p, phi)?;
        let mut states = Vec::with_capacity(dim);
        let mut current = gbs_state(&orthogonal_partner(&params), dim)?;
        states.push(current.with_canonical_phase());
        for m in 1..=n {
            let norm = ((m * (n - m + 1)) as f64).sqrt();
            current = apply(&rot.jplus, &current)?.scale(Complex64::new(1.0 / norm, 0.0)).normalized();
            states.push(current.with_canonical_phase());
        }
        states
    };
    Ok(DeltaBasis { n, p, phi, states })
}

/// Closed form `C(N,m)^{-1/2} (J+')^m / m! |N,1-p,phi+pi>`, renormalized
/// and with the canonical phase.
pub fn delta_state(n: usize, m: usize, p: f64, phi: f64) -> Result<StateVector> {
    if m > n {
        return Err(Error::IndexOutOfRange { index: m, max: n });
    }
    let params = GbsParams::new(n, p, phi)?;
    let dim = n + 1;
    if p == 1.0 {
        return Ok(StateVector::basis(dim, m));
    }
    if p == 0.0 {
        return Ok(StateVector::basis(dim, n - m));
    }
    let rot = rotated_operators(n, p, params.phi())?;
    let mut v = gbs_state(&orthogonal_partner(&params), dim)?;
    for k in 1..=m {
        // fold the 1/m! in step by step
        v = apply(&rot.jplus, &v)?.scale(Complex64::new(1.0 / k as f64, 0.0));
    }
    let v = v.scale(Complex64::new(binomial(n, m).sqrt().recip(), 0.0));
    Ok(v.normalized().with_canonical_phase())
}
