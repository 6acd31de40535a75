//! Companion entanglement measures: logarithmic negativity and the Gaussian
//! Renyi-2 entanglement of formation (GR2EoF) for states with a three-mode
//! purification.

use crate::gaussian::{StdTwoModeState, GLEMS_TOL};
use crate::{Error, Result};

/// Smaller symplectic eigenvalue of the partial transpose. Partial
/// transposition of mode B flips the sign of c_p, i.e. kp -> -kp, so the
/// spectrum follows from the standard formulas with Delta -> a^2 + b^2 + 2 kx kp.
pub fn ptranspose_nu_minus(s: &StdTwoModeState) -> Result<f64> {
    if !s.is_physical() {
        return Err(Error::NonPhysical);
    }
    let (a, b, kx, kp) = (s.a(), s.b(), s.kx(), s.kp());
    let delta = a * a + b * b + 2.0 * kx * kp;
    let det = s.det_gamma();
    let d = (delta * delta - 4.0 * det).max(0.0);
    Ok((2.0 * det.max(0.0) / (delta + d.sqrt())).sqrt())
}

/// Logarithmic negativity max(0, -ln nu~_-).
pub fn log_negativity(s: &StdTwoModeState) -> Result<f64> {
    Ok((-ptranspose_nu_minus(s)?.ln()).max(0.0))
}

/// Local symplectic eigenvalues (a1, a2, a3) of a pure three-mode Gaussian
/// state. They satisfy the triangle-like inequalities
/// |a_j - a_k| + 1 <= a_i <= a_j + a_k - 1 for every permutation.
#[derive(Clone, Copy, Debug)]
pub struct PureThreeModeParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl PureThreeModeParams {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        let v = [a1, a2, a3];
        if v.iter().any(|&x| !x.is_finite() || x < 1.0 - 1e-12) {
            return Err(Error::InvalidState(
                "local symplectic eigenvalues must be >= 1".into(),
            ));
        }
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let lo = (v[j] - v[k]).abs() + 1.0;
            let hi = v[j] + v[k] - 1.0;
            let tol = 1e-9 * v[i].max(1.0);
            if v[i] < lo - tol || v[i] > hi + tol {
                return Err(Error::InvalidState(format!(
                    "({a1}, {a2}, {a3}) violates the pure-state triangle condition"
                )));
            }
        }
        Ok(Self { a1, a2, a3 })
    }

    /// GR2EoF of the reduction to modes 1 and 2 (mode 3 traced out):
    /// (1/2) ln g_3 with the three-branch g_k expression.
    pub fn gr2eof(&self) -> Result<f64> {
        Ok(0.5 * self.g3()?.ln())
    }

    fn g3(&self) -> Result<f64> {
        let (a1, a2, a3) = (self.a1, self.a2, self.a3);
        let (s1, s2, s3) = (a1 * a1, a2 * a2, a3 * a3);
        let upper = (s1 + s2 - 1.0).sqrt();
        let diff = (s1 - s2).abs();
        let alpha3 = (1.0 + diff * diff / (2.0 * (s1 + s2))
            + diff / (2.0 * (s1 + s2)) * (diff * diff + 8.0 * (s1 + s2)).sqrt())
        .sqrt();

        let collar = 1e-12 * a3.max(1.0);
        let branch2 = || -> Result<f64> {
            let delta = ((a1 - a2 - a3).powi(2) - 1.0)
                * ((a1 + a2 - a3).powi(2) - 1.0)
                * ((a1 - a2 + a3).powi(2) - 1.0)
                * ((a1 + a2 + a3).powi(2) - 1.0);
            if delta < -1e-9 * (s1 + s2 + s3).powi(2).max(1.0) {
                return Err(Error::Numeric(format!(
                    "negative delta = {delta} in the GR2EoF branch expression"
                )));
            }
            let zeta = 2.0 * (s1 + s2 + s3)
                + 2.0 * (s1 * s2 + s1 * s3 + s2 * s3)
                - s1 * s1
                - s2 * s2
                - s3 * s3
                - delta.max(0.0).sqrt()
                - 1.0;
            Ok(zeta / (8.0 * s3))
        };
        let branch3 = || {
            let r = (s1 - s2) / (s3 - 1.0);
            r * r
        };

        if a3 >= upper - collar {
            if (a3 - upper).abs() <= collar {
                debug_assert!((branch2()? - 1.0).abs() < 1e-6);
            }
            return Ok(1.0);
        }
        if a3 > alpha3 + collar {
            branch2()
        } else if a3 < alpha3 - collar {
            Ok(branch3())
        } else {
            // Within the collar: both branches must agree.
            let b2 = branch2()?;
            let b3 = branch3();
            if (b2 - b3).abs() > 1e-6 * b3.max(1.0) {
                return Err(Error::Numeric(format!(
                    "GR2EoF branches disagree at the boundary: {b2} vs {b3}"
                )));
            }
            Ok(b3)
        }
    }
}

/// GR2EoF of a GLEMS through its three-mode purification: the pure-state
/// parameters are (a, b, nu). Pure two-mode states short-circuit to ln a,
/// the marginal Renyi-2 entropy.
pub fn gr2eof_glems(s: &StdTwoModeState) -> Result<f64> {
    let (nu1, nu2) = s.symplectic_eigenvalues()?;
    if (nu2 - 1.0).abs() > GLEMS_TOL {
        return Err(Error::NotGlems);
    }
    if !s.is_entangled()? {
        return Ok(0.0);
    }
    if (nu1 - 1.0).abs() <= GLEMS_TOL {
        return Ok(s.a().ln());
    }
    PureThreeModeParams::new(s.a(), s.b(), nu1)?.gr2eof()
}

/// Closed-form GR2EoF for symmetric two-mode states (a = b):
/// ln[(nt^2 + 1)/(2 nt)] for nt < 1, else 0, with nt the smaller symplectic
/// eigenvalue of the partial transpose.
pub fn gr2eof_symmetric(s: &StdTwoModeState) -> Result<f64> {
    if (s.a() - s.b()).abs() > GLEMS_TOL * s.a().max(s.b()) {
        return Err(Error::InvalidState(
            "symmetric GR2EoF requires a = b".into(),
        ));
    }
    let nt = ptranspose_nu_minus(s)?;
    if nt >= 1.0 {
        Ok(0.0)
    } else {
        Ok(((nt * nt + 1.0) / (2.0 * nt)).ln())
    }
}
