//! Gaussian measurements and conditional states.
//!
//! A single-mode Gaussian measurement is parametrized by a rotation angle
//! `phi`, a thermal factor `tau >= 1` and a squeezing parameter `t >= 0`,
//! giving the measurement CM `P(phi) diag(tau e^{2t}, tau e^{-2t}) P(phi)^T`.
//! Ideal homodyne of the x quadrature is the limit t -> +inf at phi = pi/2,
//! tau = 1; it is represented by a limit tag and handled by closed-form
//! limits rather than by large finite parameters.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use serde::Serialize;
use std::f64::consts::PI;

use crate::gaussian::{PurificationCM, StdTwoModeState, SymplecticDecomposition};
use crate::{Error, Result};

/// Limit tag of a single-mode Gaussian measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasLimit {
    Finite,
    HomodyneX,
    Heterodyne,
}

/// Single-mode Gaussian measurement CM parameters.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SingleModeMeasurement {
    pub phi: f64,
    pub tau: f64,
    pub t: f64,
    pub limit: MeasLimit,
}

/// Rotation matrix P(phi).
pub fn rotation(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

impl SingleModeMeasurement {
    /// Finite-parameter measurement; `phi` is reduced modulo pi.
    pub fn finite(phi: f64, tau: f64, t: f64) -> Result<Self> {
        if !(tau.is_finite() && t.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidState("measurement parameters must be finite".into()));
        }
        if tau < 1.0 {
            return Err(Error::InvalidState(format!("tau = {tau} must be >= 1")));
        }
        if t < 0.0 {
            return Err(Error::InvalidState(format!("t = {t} must be >= 0")));
        }
        Ok(Self {
            phi: phi.rem_euclid(PI),
            tau,
            t,
            limit: MeasLimit::Finite,
        })
    }

    /// Ideal homodyne detection of the x quadrature (phi = pi/2, tau = 1,
    /// t -> +inf).
    pub fn homodyne_x() -> Self {
        Self {
            phi: PI / 2.0,
            tau: 1.0,
            t: f64::INFINITY,
            limit: MeasLimit::HomodyneX,
        }
    }

    /// Heterodyne detection (projection onto coherent states), CM = identity.
    pub fn heterodyne() -> Self {
        Self {
            phi: 0.0,
            tau: 1.0,
            t: 0.0,
            limit: MeasLimit::Heterodyne,
        }
    }

    /// Reads a measurement from JSON:
    /// `{"phi": f, "tau": f, "t": f, "limit": "finite"|"homodyne_x"|"heterodyne"}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let num = |name: &str, default: Option<f64>| -> Result<f64> {
            match v.get(name) {
                Some(serde_json::Value::Number(n)) => n
                    .as_f64()
                    .ok_or_else(|| Error::Parse(format!("field `{name}` is not a float"))),
                None => default.ok_or_else(|| Error::Parse(format!("missing field `{name}`"))),
                Some(_) => Err(Error::Parse(format!("field `{name}` must be a number"))),
            }
        };
        match v.get("limit").and_then(|l| l.as_str()).unwrap_or("finite") {
            "finite" => Self::finite(num("phi", None)?, num("tau", None)?, num("t", None)?),
            "homodyne_x" => Ok(Self::homodyne_x()),
            "heterodyne" => Ok(Self::heterodyne()),
            other => Err(Error::Parse(format!("unknown limit tag `{other}`"))),
        }
    }

    /// Measurement variances (V_x, V_p) = (tau e^{2t}, tau e^{-2t}).
    pub fn variances(&self) -> (f64, f64) {
        match self.limit {
            MeasLimit::Finite => (self.tau * (2.0 * self.t).exp(), self.tau * (-2.0 * self.t).exp()),
            MeasLimit::HomodyneX => (f64::INFINITY, 0.0),
            MeasLimit::Heterodyne => (1.0, 1.0),
        }
    }

    /// The 2x2 measurement CM. The ideal homodyne limit has no finite CM and
    /// signals `Error::LimitTag`; callers must use the limit-aware paths.
    pub fn cm(&self) -> Result<Matrix2<f64>> {
        match self.limit {
            MeasLimit::HomodyneX => Err(Error::LimitTag),
            MeasLimit::Heterodyne => Ok(Matrix2::identity()),
            MeasLimit::Finite => {
                let v_plus = self.tau * (2.0 * self.t).cosh();
                let v_minus = self.tau * (2.0 * self.t).sinh();
                let (s2, c2) = (2.0 * self.phi).sin_cos();
                Ok(Matrix2::new(
                    v_plus + v_minus * c2,
                    v_minus * s2,
                    v_minus * s2,
                    v_plus - v_minus * c2,
                ))
            }
        }
    }
}

/// Standard-form parameters of a (conditional) two-mode CM; `cp_t` carries
/// the sign of det C, so `cx_t >= |cp_t|`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CondStdParams {
    pub a_t: f64,
    pub b_t: f64,
    pub cx_t: f64,
    pub cp_t: f64,
}

/// Conditional CM of modes A, B after a Gaussian measurement with CM
/// `gamma_e_meas` on the purifying system: the Schur complement
/// `gamma_ab - gamma_abe (gamma_e + Gamma_E)^{-1} gamma_abe^T`.
pub fn conditional_cm(p: &PurificationCM, gamma_e_meas: &DMatrix<f64>) -> Result<Matrix4<f64>> {
    let n = 2 * p.rank();
    if n == 0 {
        return Ok(*p.gamma_ab());
    }
    if gamma_e_meas.nrows() != n || gamma_e_meas.ncols() != n {
        return Err(Error::InvalidState(format!(
            "measurement CM must be {n}x{n} for a rank-{} purification",
            p.rank()
        )));
    }
    let scale = gamma_e_meas.abs().max().max(1.0);
    if (gamma_e_meas - gamma_e_meas.transpose()).abs().max() > 1e-9 * scale {
        return Err(Error::InvalidState("measurement CM must be symmetric".into()));
    }
    let eig = gamma_e_meas.clone().symmetric_eigenvalues();
    if eig.iter().any(|&l| l < -1e-9 * scale) {
        return Err(Error::InvalidState(
            "measurement CM must be positive semidefinite".into(),
        ));
    }
    let total = p.gamma_e() + gamma_e_meas;
    let inv = total
        .try_inverse()
        .ok_or_else(|| Error::Numeric("gamma_E + Gamma_E is singular".into()))?;
    let update = p.gamma_abe() * inv * p.gamma_abe().transpose();
    let mut cond = *p.gamma_ab();
    for r in 0..4 {
        for c in 0..4 {
            cond[(r, c)] -= update[(r, c)];
        }
    }
    // Symmetrize away round-off.
    let cond = (cond + cond.transpose()) * 0.5;
    Ok(cond)
}

/// Conditional state of a GLEMS after a single-mode measurement on E,
/// computed in the normal-mode frame and mapped back with S^{-1}.
#[derive(Clone, Debug)]
pub struct GlemsConditional {
    /// Standard-form invariants of the conditional CM.
    pub a_sq: f64,
    pub b_sq: f64,
    pub cxcp: f64,
    /// det of the conditional CM (= cal_Vx * cal_Vp).
    pub det: f64,
    /// The full 4x4 conditional CM.
    pub cm: Matrix4<f64>,
}

/// Conditioned single-mode variances (cal_Vx, cal_Vp) for a GLEMS with larger
/// symplectic eigenvalue `nu`; handles the measurement limits analytically.
pub fn conditioned_variances(m: &SingleModeMeasurement, nu: f64) -> (f64, f64) {
    match m.limit {
        MeasLimit::Finite => {
            let (vx, vp) = m.variances();
            ((nu * vx + 1.0) / (nu + vx), (nu * vp + 1.0) / (nu + vp))
        }
        MeasLimit::HomodyneX => (nu, 1.0 / nu),
        MeasLimit::Heterodyne => (1.0, 1.0),
    }
}

pub fn glems_conditional(
    s: &StdTwoModeState,
    dec: &SymplecticDecomposition,
    m: &SingleModeMeasurement,
) -> Result<GlemsConditional> {
    if !s.is_glems() {
        return Err(Error::NotGlems);
    }
    let nu = dec.nu1();
    let (cvx, cvp) = conditioned_variances(m, nu);
    let v_plus = (cvx + cvp) / 2.0;
    let v_minus = (cvx - cvp) / 2.0;
    let (s2, c2) = (2.0 * m.phi).sin_cos();
    // gamma_{A|E} = P^T(phi) diag(cal_Vx, cal_Vp) P(phi).
    let g11 = v_plus + v_minus * c2;
    let g22 = v_plus - v_minus * c2;
    let g12 = -v_minus * s2;

    let mut core = Matrix4::identity();
    core[(0, 0)] = g11;
    core[(0, 1)] = g12;
    core[(1, 0)] = g12;
    core[(1, 1)] = g22;
    let s_inv = dec.s_inverse();
    let cm = s_inv * core * s_inv.transpose();

    let [x1, x2, x3, x4, x5, x6, x7, x8] = dec.xs();
    let det_cond = cvx * cvp;
    let a_sq = x1 * x1 * x3 * x3 * det_cond
        + x3 * x3 * x5 * x5 * g11
        + x1 * x1 * x7 * x7 * g22
        + x5 * x5 * x7 * x7;
    let b_sq = x2 * x2 * x4 * x4 * det_cond
        + x4 * x4 * x6 * x6 * g11
        + x2 * x2 * x8 * x8 * g22
        + x6 * x6 * x8 * x8;
    let cxcp = x1 * x2 * x3 * x4 * det_cond
        + x3 * x4 * x5 * x6 * g11
        + x1 * x2 * x7 * x8 * g22
        + x5 * x6 * x7 * x8;
    Ok(GlemsConditional {
        a_sq,
        b_sq,
        cxcp,
        det: det_cond,
        cm,
    })
}

impl GlemsConditional {
    /// Standard-form parameters recovered from the invariants.
    pub fn std_params(&self) -> Result<CondStdParams> {
        split_std_params(self.a_sq.sqrt(), self.b_sq.sqrt(), self.cxcp, self.det)
    }
}

/// Extracts standard-form parameters from an arbitrary physical two-mode CM.
///
/// a~ = sqrt(det A), b~ = sqrt(det B); cx~^2 and cp~^2 are the roots of
/// lambda^2 - sigma lambda + (det C)^2 = 0 with
/// sigma = (a~^2 b~^2 + (det C)^2 - det gamma) / (a~ b~), and cp~ takes the
/// sign of det C.
pub fn std_params_of(cm: &Matrix4<f64>) -> Result<CondStdParams> {
    let a_blk = cm.fixed_view::<2, 2>(0, 0);
    let b_blk = cm.fixed_view::<2, 2>(2, 2);
    let c_blk = cm.fixed_view::<2, 2>(0, 2);
    let det_a = a_blk[(0, 0)] * a_blk[(1, 1)] - a_blk[(0, 1)] * a_blk[(1, 0)];
    let det_b = b_blk[(0, 0)] * b_blk[(1, 1)] - b_blk[(0, 1)] * b_blk[(1, 0)];
    if det_a <= 0.0 || det_b <= 0.0 {
        return Err(Error::Numeric("non-positive local determinant".into()));
    }
    let det_c = c_blk[(0, 0)] * c_blk[(1, 1)] - c_blk[(0, 1)] * c_blk[(1, 0)];
    split_std_params(det_a.sqrt(), det_b.sqrt(), det_c, cm.determinant())
}

fn split_std_params(a_t: f64, b_t: f64, det_c: f64, det_cm: f64) -> Result<CondStdParams> {
    let ab = a_t * b_t;
    let sigma = (ab * ab + det_c * det_c - det_cm) / ab;
    let disc = sigma * sigma - 4.0 * det_c * det_c;
    let scale = (sigma * sigma).max(1.0);
    if disc < -1e-9 * scale {
        return Err(Error::Numeric(format!(
            "negative discriminant {disc} extracting standard-form parameters"
        )));
    }
    let sq = disc.max(0.0).sqrt();
    let u = ((sigma + sq) / 2.0).max(0.0);
    let v = if u > 0.0 {
        (det_c * det_c / u).min(u)
    } else {
        0.0
    };
    Ok(CondStdParams {
        a_t,
        b_t,
        cx_t: u.sqrt(),
        cp_t: det_c.signum() * v.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::StdTwoModeState;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn glems4() -> StdTwoModeState {
        StdTwoModeState::new(2.0 * 2f64.sqrt(), 2f64.sqrt(), 2f64.sqrt(), 1.0 / 2f64.sqrt())
            .unwrap()
    }

    #[test]
    fn measurement_cm_examples() {
        assert_eq!(
            SingleModeMeasurement::heterodyne().cm().unwrap(),
            Matrix2::identity()
        );
        let m = SingleModeMeasurement::finite(PI / 2.0, 1.0, 1.0).unwrap();
        let cm = m.cm().unwrap();
        assert_relative_eq!(cm[(0, 0)], (-2f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(cm[(1, 1)], 2f64.exp(), epsilon = 1e-12);
        assert_relative_eq!(cm[(0, 1)], 0.0, epsilon = 1e-12);

        // det = tau^2 independent of phi and t.
        for (phi, tau, t) in [(0.3, 1.7, 0.4), (2.1, 3.0, 2.0), (1.0, 1.0, 0.0)] {
            let m = SingleModeMeasurement::finite(phi, tau, t).unwrap();
            assert_relative_eq!(m.cm().unwrap().determinant(), tau * tau, max_relative = 1e-12);
        }

        assert!(matches!(
            SingleModeMeasurement::homodyne_x().cm(),
            Err(Error::LimitTag)
        ));
    }

    #[test]
    fn conditional_cm_rank0_is_identity_map() {
        let s = StdTwoModeState::new(2.0, 2.0, 3f64.sqrt(), 3f64.sqrt()).unwrap();
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let cond = conditional_cm(&p, &DMatrix::zeros(0, 0)).unwrap();
        assert_eq!(cond, s.cov_matrix());
    }

    #[test]
    fn infinitely_noisy_measurement_reveals_nothing() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let noisy = DMatrix::identity(2, 2) * 1e12;
        let cond = conditional_cm(&p, &noisy).unwrap();
        assert_relative_eq!(cond, s.cov_matrix(), epsilon = 1e-6);
    }

    #[test]
    fn glems_conditional_class4_reduction() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        let nu = dec.nu1();
        let kxkp = s.kx() * s.kp();
        for (phi, tau, t) in [(0.0, 1.0, 0.5), (PI / 2.0, 2.0, 1.0), (1.1, 1.3, 0.0)] {
            let m = SingleModeMeasurement::finite(phi, tau, t).unwrap();
            let g = glems_conditional(&s, &dec, &m).unwrap();
            let (cvx, cvp) = conditioned_variances(&m, nu);
            let bracket = (cvx + cvp) / 2.0 + (cvx - cvp) / 2.0 * (2.0 * phi).cos();
            assert_relative_eq!(g.a_sq, cvx * cvp + kxkp / nu * bracket, max_relative = 1e-12);
            assert_relative_eq!(g.b_sq, 1.0 + kxkp / nu * bracket, max_relative = 1e-12);
            assert_relative_eq!(g.cxcp, -kxkp / nu * bracket, max_relative = 1e-12);
            assert!(g.cxcp < 0.0);
        }
    }

    #[test]
    fn glems_conditional_noisy_limit_recovers_state() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        let m = SingleModeMeasurement::finite(0.7, 1e10, 0.0).unwrap();
        let g = glems_conditional(&s, &dec, &m).unwrap();
        assert_relative_eq!(g.a_sq.sqrt(), s.a(), epsilon = 1e-6);
        assert_relative_eq!(g.b_sq.sqrt(), s.b(), epsilon = 1e-6);
    }

    #[test]
    fn glems_conditional_class5_mirrors_class4() {
        let s4 = glems4();
        let s5 = StdTwoModeState::new(2f64.sqrt(), 2.0 * 2f64.sqrt(), 2f64.sqrt(), 1.0 / 2f64.sqrt())
            .unwrap();
        let d4 = s4.williamson().unwrap();
        let d5 = s5.williamson().unwrap();
        assert_relative_eq!(d4.nu1(), d5.nu1(), epsilon = 1e-12);
        let m = SingleModeMeasurement::finite(0.9, 1.4, 0.8).unwrap();
        let g4 = glems_conditional(&s4, &d4, &m).unwrap();
        let g5 = glems_conditional(&s5, &d5, &m).unwrap();
        // Same formulas with a~^2 and b~^2 exchanged.
        assert_relative_eq!(g5.a_sq, g4.b_sq, max_relative = 1e-12);
        assert_relative_eq!(g5.b_sq, g4.a_sq, max_relative = 1e-12);
        assert_relative_eq!(g5.cxcp, g4.cxcp, max_relative = 1e-12);
    }

    #[test]
    fn glems_conditional_matches_generic_schur() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let m = SingleModeMeasurement::finite(1.234, 2.5, 0.7).unwrap();
        let g = glems_conditional(&s, &dec, &m).unwrap();
        let cond = conditional_cm(&p, &crate::gaussian::to_dmatrix(&m.cm().unwrap())).unwrap();
        assert_relative_eq!(g.cm, cond, epsilon = 1e-10);
    }

    #[test]
    fn std_params_fixed_point() {
        let s = StdTwoModeState::new(2.2, 1.7, 0.9, 0.4).unwrap();
        let p = std_params_of(&s.cov_matrix()).unwrap();
        assert_relative_eq!(p.a_t, 2.2, max_relative = 1e-12);
        assert_relative_eq!(p.b_t, 1.7, max_relative = 1e-12);
        assert_relative_eq!(p.cx_t, 0.9, max_relative = 1e-10);
        assert_relative_eq!(p.cp_t, -0.4, max_relative = 1e-10);
    }

    #[test]
    fn std_params_local_rotation_invariance() {
        let s = StdTwoModeState::new(2.2, 1.7, 0.9, 0.4).unwrap();
        let base = std_params_of(&s.cov_matrix()).unwrap();
        for (ta, tb) in [(0.3, 1.1), (2.0, 0.4), (1.57, 2.9)] {
            let mut o = Matrix4::zeros();
            o.fixed_view_mut::<2, 2>(0, 0).copy_from(&rotation(ta));
            o.fixed_view_mut::<2, 2>(2, 2).copy_from(&rotation(tb));
            let rotated = o * s.cov_matrix() * o.transpose();
            let p = std_params_of(&rotated).unwrap();
            assert_relative_eq!(p.a_t, base.a_t, epsilon = 1e-10);
            assert_relative_eq!(p.b_t, base.b_t, epsilon = 1e-10);
            assert_relative_eq!(p.cx_t, base.cx_t, epsilon = 1e-10);
            assert_relative_eq!(p.cp_t, base.cp_t, epsilon = 1e-10);
        }
    }

    #[test]
    fn measurement_json_round() {
        let m = SingleModeMeasurement::from_json(r#"{"phi": 1.2, "tau": 1.5, "t": 0.3}"#).unwrap();
        assert_eq!(m.limit, MeasLimit::Finite);
        let m = SingleModeMeasurement::from_json(r#"{"limit": "homodyne_x"}"#).unwrap();
        assert_eq!(m.limit, MeasLimit::HomodyneX);
        let m = SingleModeMeasurement::from_json(r#"{"limit": "heterodyne"}"#).unwrap();
        assert_eq!(m.limit, MeasLimit::Heterodyne);
        assert!(SingleModeMeasurement::from_json(r#"{"phi": 0.0, "tau": 0.5, "t": 0}"#).is_err());
    }
}
