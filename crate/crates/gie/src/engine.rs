//! GIE machinery: homodyne-optimality criterion, upper bound via
//! h-minimization, lower bound via minimization of K_h over the single
//! variable Q, and closed-form dispatch for the solved state classes.
//!
//! Conventions: GIE = sup over pure Gaussian measurements on A, B of the inf
//! over Gaussian measurements on E of the Gaussian conditional mutual
//! information; all values in nats.

use serde::Serialize;

use crate::conditioning::{CondStdParams, MeasLimit, SingleModeMeasurement};
use crate::gaussian::{StateClass, StdTwoModeState, SymplecticDecomposition, GLEMS_TOL};
use crate::{Error, Result};

/// Tolerance for the U = L equality certifying a closed-form GIE value.
pub const BOUND_EQ_TOL: f64 = 1e-9;

/// G = sqrt(a/b) + sqrt(b/a) + 1/sqrt(ab) - sqrt(ab - cx^2). When G >= 0 the
/// Gaussian classical mutual information is attained by double homodyne
/// detection of the x quadratures.
pub fn g_quantity(a: f64, b: f64, cx: f64) -> f64 {
    (a / b).sqrt() + (b / a).sqrt() + 1.0 / (a * b).sqrt() - (a * b - cx * cx).sqrt()
}

/// GCMI under double x-homodyne: (1/2) ln( a~ b~ / (a~ b~ - cx~^2) ).
pub fn gcmi_homodyne(p: &CondStdParams) -> f64 {
    let ab = p.a_t * p.b_t;
    0.5 * (ab / (ab - p.cx_t * p.cx_t)).ln()
}

/// Lower bound on the conditional G quantity over every Eve measurement:
/// G~_min = 2 + 1/sqrt(ab) - sqrt(nu1 nu2). Nonnegativity of this bound is
/// the homodyne-optimality condition used by all closed forms.
pub fn g_tilde_min(s: &StdTwoModeState) -> Result<f64> {
    let (nu1, nu2) = s.symplectic_eigenvalues()?;
    Ok(2.0 + 1.0 / (s.a() * s.b()).sqrt() - (nu1 * nu2).sqrt())
}

/// Specialized forms of the homodyne-optimality bound for symmetric states.
#[derive(Clone, Copy, Debug)]
pub struct GTildeVariants {
    /// 2 + 1/a - nu (the generic bound at a = b).
    pub g_min_sym: f64,
    /// 2 + 1/a - sqrt(a^2 - kx^2); the optimized bound, defined for
    /// symmetric GLEMS.
    pub g_opt_sym_glems: Option<f64>,
    /// nu <= 2 + 1/a; the condition specialized to symmetric squeezed
    /// thermal states (defined when kx = kp).
    pub cond_sym_sqth: Option<bool>,
}

pub fn g_tilde_variants(s: &StdTwoModeState) -> Result<GTildeVariants> {
    let (a, b) = (s.a(), s.b());
    if (a - b).abs() > GLEMS_TOL * a.max(b) {
        return Err(Error::InvalidState(
            "g_tilde_variants requires a symmetric state (a = b)".into(),
        ));
    }
    let (nu1, nu2) = s.symplectic_eigenvalues()?;
    let nu = nu1;
    let g_min_sym = 2.0 + 1.0 / a - (nu1 * nu2).sqrt();
    let g_opt_sym_glems = if (nu2 - 1.0).abs() <= GLEMS_TOL {
        Some(2.0 + 1.0 / a - (a * a - s.kx() * s.kx()).sqrt())
    } else {
        None
    };
    let cond_sym_sqth = if (s.kx() - s.kp()).abs() <= GLEMS_TOL * s.kx().max(1.0) {
        Some(nu <= 2.0 + 1.0 / a)
    } else {
        None
    };
    Ok(GTildeVariants {
        g_min_sym,
        g_opt_sym_glems,
        cond_sym_sqth,
    })
}

/// Coefficients of K_h(Q) = (1 - alpha_A Q)(1 - alpha_B Q) / (1 - alpha_AB Q)
/// for a GLEMS, in terms of the diagonalizing matrix elements x3, x4.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AlphaTriple {
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub alpha_ab: f64,
}

pub fn alphas(s: &StdTwoModeState, dec: &SymplecticDecomposition) -> Result<AlphaTriple> {
    if !s.is_glems() {
        return Err(Error::NotGlems);
    }
    let nu = dec.nu1();
    let xs = dec.xs();
    let (x3, x4) = (xs[2], xs[3]);
    let f = nu * nu - 1.0;
    let (a, b, kx) = (s.a(), s.b(), s.kx());
    Ok(AlphaTriple {
        alpha_a: f / a * x3 * x3,
        alpha_b: f / b * x4 * x4,
        alpha_ab: f / (a * b - kx * kx) * (a * x4 * x4 + b * x3 * x3 - 2.0 * kx * x3 * x4),
    })
}

/// K_h evaluated at Q.
pub fn k_h(q: f64, al: &AlphaTriple) -> Result<f64> {
    let den = 1.0 - al.alpha_ab * q;
    if den.abs() < 1e-14 * (al.alpha_ab * q).abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "K_h pole at Q = {q} (alpha_AB = {})",
            al.alpha_ab
        )));
    }
    Ok((1.0 - al.alpha_a * q) * (1.0 - al.alpha_b * q) / den)
}

/// Q = <0|(Gamma_E + nu I)^{-1}|0> for a measurement CM Gamma_E.
pub fn q_of(m: &SingleModeMeasurement, nu: f64) -> f64 {
    match m.limit {
        MeasLimit::HomodyneX => 1.0 / nu,
        MeasLimit::Heterodyne => 1.0 / (nu + 1.0),
        MeasLimit::Finite => {
            let ch = (2.0 * m.t).cosh();
            let sh = (2.0 * m.t).sinh();
            (m.tau * (ch - sh * (2.0 * m.phi).cos()) + nu)
                / (m.tau * m.tau + 2.0 * m.tau * nu * ch + nu * nu)
        }
    }
}

/// Stationary points (Q1, Q2) of K_h with Q1 >= Q2, or None when the
/// function is linear (alpha_A = alpha_AB or alpha_B = alpha_AB).
pub fn stationary_qs(al: &AlphaTriple) -> Option<(f64, f64)> {
    let rel = 1e-12 * al.alpha_ab.abs().max(1.0);
    if (al.alpha_a - al.alpha_ab).abs() <= rel || (al.alpha_b - al.alpha_ab).abs() <= rel {
        return None;
    }
    let ra = al.alpha_ab / al.alpha_a;
    let rb = al.alpha_ab / al.alpha_b;
    let root = ((ra - 1.0) * (rb - 1.0)).max(0.0).sqrt();
    Some((
        (1.0 + root) / al.alpha_ab,
        (1.0 - root) / al.alpha_ab,
    ))
}

/// A measurement with CM Gamma(phi = pi/2, tau = 1, t) or Gamma(phi, tau, 0)
/// realizing a prescribed Q in (0, 1/nu); the boundary 1/nu itself is the
/// homodyne limit.
pub fn realize_q(q: f64, nu: f64) -> Result<SingleModeMeasurement> {
    if !(q > 0.0 && q < 1.0 / nu) {
        return Err(Error::Numeric(format!("Q = {q} outside (0, 1/nu)")));
    }
    let q_het = 1.0 / (1.0 + nu);
    if q <= q_het + 1e-15 {
        // t = 0: Gamma_E = tau * identity, Q = 1/(tau + nu).
        let tau = (1.0 / q - nu).max(1.0);
        if (tau - 1.0).abs() < 1e-12 {
            return Ok(SingleModeMeasurement::heterodyne());
        }
        return SingleModeMeasurement::finite(0.0, tau, 0.0);
    }
    // phi = pi/2, tau = 1: quadratic in u = e^{2t}.
    let a = q * nu - 1.0;
    let b = q * (1.0 + nu * nu) - nu;
    let c = q * nu;
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 && a != 0.0 {
        let sq = disc.sqrt();
        let mut best: Option<f64> = None;
        for u in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
            if u >= 1.0 - 1e-12 && best.is_none_or(|cur| u < cur) {
                best = Some(u.max(1.0));
            }
        }
        if let Some(u) = best {
            return SingleModeMeasurement::finite(std::f64::consts::PI / 2.0, 1.0, 0.5 * u.ln());
        }
    }
    // Fallback: bisect in t at phi = pi/2, tau = 1 (Q is increasing in t).
    let (mut lo, mut hi) = (0.0f64, 30.0f64);
    let target = q;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let probe = SingleModeMeasurement::finite(std::f64::consts::PI / 2.0, 1.0, mid)?;
        if q_of(&probe, nu) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let m = SingleModeMeasurement::finite(std::f64::consts::PI / 2.0, 1.0, 0.5 * (lo + hi))?;
    if (q_of(&m, nu) - target).abs() <= 1e-9 * target {
        Ok(m)
    } else {
        Err(Error::Numeric(format!("could not realize Q = {q}")))
    }
}

/// Result of the K_h minimization over Q in (0, 1/nu].
#[derive(Clone, Debug)]
pub struct KhMinimum {
    pub k_min: f64,
    pub q_star: f64,
    /// Measurement attaining the minimum; None when no measurement is needed
    /// (pure states, where K_h = 1 identically).
    pub eve: Option<SingleModeMeasurement>,
}

/// Minimizes K_h over the admissible interval. Interior stationary points in
/// (0, 1/nu) are compared against the boundary value at 1/nu (attained by
/// ideal x-homodyne); the endpoint 0 is the no-measurement value K_h = 1 and
/// is never a minimizer for entangled GLEMS. Classes with alpha_A = alpha_AB
/// or alpha_B = alpha_AB make K_h linear and go straight to the boundary.
pub fn minimize_k_h(
    s: &StdTwoModeState,
    dec: &SymplecticDecomposition,
    al: &AlphaTriple,
) -> Result<KhMinimum> {
    let _ = s;
    let nu = dec.nu1();
    if nu <= 1.0 + GLEMS_TOL {
        return Ok(KhMinimum {
            k_min: 1.0,
            q_star: 0.0,
            eve: None,
        });
    }
    let q_boundary = 1.0 / nu;
    let mut best = KhMinimum {
        k_min: k_h(q_boundary, al)?,
        q_star: q_boundary,
        eve: Some(SingleModeMeasurement::homodyne_x()),
    };
    if let Some((q1, q2)) = stationary_qs(al) {
        for q in [q2, q1] {
            if q > 0.0 && q < q_boundary * (1.0 - 1e-12) {
                let k = k_h(q, al)?;
                if k < best.k_min {
                    best = KhMinimum {
                        k_min: k,
                        q_star: q,
                        eve: Some(realize_q(q, nu)?),
                    };
                }
            }
        }
    }
    Ok(best)
}

/// Lower bound on GIE for an entangled GLEMS: the conditional mutual
/// information of fixed x-homodyne on A and B minimized over every Eve
/// measurement, L = (1/2) ln(ab/(ab - kx^2)) + (1/2) ln K_min.
pub fn lower_bound_l(s: &StdTwoModeState) -> Result<f64> {
    let dec = s.williamson()?;
    lower_bound_l_with(s, &dec)
}

/// Same as [`lower_bound_l`] with a caller-provided decomposition (any sign
/// variant gives the same value).
pub fn lower_bound_l_with(s: &StdTwoModeState, dec: &SymplecticDecomposition) -> Result<f64> {
    Ok(lower_bound_detail(s, dec)?.0)
}

pub fn lower_bound_detail(
    s: &StdTwoModeState,
    dec: &SymplecticDecomposition,
) -> Result<(f64, KhMinimum)> {
    if !s.is_entangled()? {
        return Err(Error::InvalidState(
            "lower bound is defined for entangled states".into(),
        ));
    }
    let al = alphas(s, dec)?;
    let min = minimize_k_h(s, dec, &al)?;
    let ab = s.a() * s.b();
    let l = 0.5 * (ab / (ab - s.kx() * s.kx())).ln() + 0.5 * min.k_min.ln();
    Ok((l, min))
}

/// Intermediate quantities of the generic (class-6) upper-bound derivation.
#[derive(Clone, Copy, Debug)]
pub struct Glems6Detail {
    /// Positive stationary point z1 = -x3 x5 / (x1 x7) of the conditional
    /// purity direction.
    pub z1: f64,
    /// Candidate minimum on kappa in [1, nu/z1] (attained at kappa = 1):
    /// -4 M M~ / (a^2 - b^2)^2.
    pub h_min_1: f64,
    /// Candidate minimum on kappa in (nu/z1, nu].
    pub h_min_2: f64,
    /// The upper bound ln((a^2 - b^2)/sqrt(D)).
    pub u: f64,
}

/// Closed-form h minimization for GLEMS with a > b and M~ < 0, valid under
/// the guards z1 in [1, nu) and x5 x7 nu^2 + x1 x3 > 0. Both candidate minima
/// are computed and compared; the closed form requires h_min_1 <= h_min_2.
pub fn glems6_upper_detail(
    s: &StdTwoModeState,
    dec: &SymplecticDecomposition,
) -> Result<Glems6Detail> {
    let inv = s.invariants();
    let (a, b) = (s.a(), s.b());
    if !(a > b && inv.m_tilde < 0.0) {
        return Err(Error::NoClosedForm);
    }
    let xs = dec.xs();
    let (x1, x3, x5, x7) = (xs[0], xs[2], xs[4], xs[6]);
    let nu = dec.nu1();
    if x1 * x7 == 0.0 {
        return Err(Error::NoClosedForm);
    }
    let z1 = -(x3 * x5) / (x1 * x7);
    let prod = x1 * x3 * x5 * x7; // = M M~ / D < 0
    if !(z1 >= 1.0 && z1 < nu && x5 * x7 * nu * nu + x1 * x3 > 0.0 && prod < 0.0) {
        return Err(Error::NoClosedForm);
    }
    let asq_bsq = a * a - b * b;
    let h_min_1 = -4.0 * inv.m * inv.m_tilde / (asq_bsq * asq_bsq);
    let kappa = nu / z1;
    let h_min_2 = 1.0 / (1.0 - kappa / (prod * (kappa + 1.0) * (kappa + 1.0)));
    if h_min_1 > h_min_2 + 1e-12 {
        return Err(Error::NoClosedForm);
    }
    Ok(Glems6Detail {
        z1,
        h_min_1,
        h_min_2,
        u: (asq_bsq / inv.d.sqrt()).ln(),
    })
}

/// Upper bound U = inf over Eve measurements of the GCMI of the conditional
/// state, in closed form for the solved classes. Requires the
/// homodyne-optimality condition G~_min >= 0; signals `NoClosedForm` when no
/// proven expression applies.
pub fn upper_bound_u(s: &StdTwoModeState, dec: &SymplecticDecomposition) -> Result<f64> {
    if !s.is_entangled()? {
        return Err(Error::InvalidState(
            "upper bound is defined for entangled states".into(),
        ));
    }
    if g_tilde_min(s)? < 0.0 {
        return Err(Error::NoClosedForm);
    }
    let (a, b, kx, kp) = (s.a(), s.b(), s.kx(), s.kp());
    match s.classify(GLEMS_TOL)? {
        StateClass::Pure => Ok(a.ln()),
        StateClass::SymGlems => Ok((a / (a * a - kp * kp).sqrt()).ln()),
        StateClass::SymSqueezedThermal => {
            let ak = a - kx;
            Ok(((ak * ak + 1.0) / (2.0 * ak)).ln())
        }
        StateClass::AsymSqueezedThermalGlems => Ok(((a + b) / ((a - b).abs() + 2.0)).ln()),
        StateClass::Glems4 => Ok((a / (a * a - kx * kp).sqrt()).ln()),
        StateClass::Glems5 => Ok((b / (b * b - kx * kp).sqrt()).ln()),
        StateClass::Glems6 => Ok(glems6_upper_detail(s, dec)?.u),
        StateClass::Glems7 | StateClass::GenericNonGlems => Err(Error::NoClosedForm),
    }
}

/// Compact symmetric-state GIE: ln[(nt + 1/nt)/2] for nt < 1, else 0, with
/// nt = sqrt((a - kx)(a - kp)) the smaller symplectic eigenvalue of the
/// partial transpose.
pub fn gie_symmetric_compact(s: &StdTwoModeState) -> Result<f64> {
    let (a, b) = (s.a(), s.b());
    if (a - b).abs() > GLEMS_TOL * a.max(b) {
        return Err(Error::InvalidState(
            "compact form requires a symmetric state".into(),
        ));
    }
    let nt = ((a - s.kx()) * (a - s.kp())).max(0.0).sqrt();
    if nt >= 1.0 {
        Ok(0.0)
    } else {
        Ok(((nt + 1.0 / nt) / 2.0).ln())
    }
}

/// How a GIE value was obtained.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GieMethod {
    /// Proven closed form for the given class.
    ClosedForm(StateClass),
    /// Generic GLEMS procedure (class-6 guards): U and L computed
    /// independently and equal within tolerance.
    GenericGlemsProcedure,
    /// No proven value; `lo`/`hi` bracket from the oracle. `lo_certified` is
    /// false when the lower estimate relies on the heuristic two-mode Eve
    /// family.
    OracleBracket {
        lo: f64,
        hi: Option<f64>,
        lo_certified: bool,
    },
}

/// Full GIE evaluation record.
#[derive(Clone, Debug, Serialize)]
pub struct GieReport {
    /// GIE in nats (for brackets: the best lower estimate).
    pub value: f64,
    pub method: GieMethod,
    pub upper_u: Option<f64>,
    pub lower_l: Option<f64>,
    /// Eve measurement attaining the lower bound, when known.
    pub optimal_eve: Option<SingleModeMeasurement>,
    /// G~_min >= 0, i.e. double x-homodyne on A, B is optimal for every Eve
    /// measurement.
    pub homodyne_cond_ok: bool,
    pub g_tilde_min: f64,
}

/// Computes GIE with the default oracle grid for unsolved classes.
pub fn gie(s: &StdTwoModeState) -> Result<GieReport> {
    gie_with_grid(s, &crate::oracle::GridSpec::default())
}

pub fn gie_with_grid(s: &StdTwoModeState, grid: &crate::oracle::GridSpec) -> Result<GieReport> {
    if !s.is_physical() {
        return Err(Error::NonPhysical);
    }
    let gtm = g_tilde_min(s)?;
    let cond_ok = gtm >= 0.0;
    let class = s.classify(GLEMS_TOL)?;
    if !s.is_entangled()? {
        return Ok(GieReport {
            value: 0.0,
            method: GieMethod::ClosedForm(class),
            upper_u: Some(0.0),
            lower_l: Some(0.0),
            optimal_eve: None,
            homodyne_cond_ok: cond_ok,
            g_tilde_min: gtm,
        });
    }
    let (a, b, kx, kp) = (s.a(), s.b(), s.kx(), s.kp());

    let closed = |value: f64| -> Result<GieReport> {
        let dec = s.williamson()?;
        let (upper, lower, eve) = if class.is_glems() && cond_ok {
            let u = upper_bound_u(s, &dec)?;
            let (l, min) = lower_bound_detail(s, &dec)?;
            if (u - l).abs() > BOUND_EQ_TOL || (u - value).abs() > BOUND_EQ_TOL {
                return Err(Error::Numeric(format!(
                    "closed-form consistency failure: U = {u}, L = {l}, value = {value}"
                )));
            }
            (u, l, min.eve)
        } else {
            // Proven closed form whose U/L machinery does not apply here
            // (class 1 without the homodyne condition, class 2): the bounds
            // coincide with the proven value by definition.
            (value, value, None)
        };
        Ok(GieReport {
            value,
            method: GieMethod::ClosedForm(class),
            upper_u: Some(upper),
            lower_l: Some(lower),
            optimal_eve: eve,
            homodyne_cond_ok: cond_ok,
            g_tilde_min: gtm,
        })
    };

    match class {
        StateClass::Pure => closed(a.ln()),
        StateClass::SymGlems => closed((a / (a * a - kp * kp).sqrt()).ln()),
        StateClass::SymSqueezedThermal if cond_ok => {
            let ak = a - kx;
            closed(((ak * ak + 1.0) / (2.0 * ak)).ln())
        }
        StateClass::AsymSqueezedThermalGlems if cond_ok => {
            closed(((a + b) / ((a - b).abs() + 2.0)).ln())
        }
        StateClass::Glems4 if cond_ok => closed((a / (a * a - kx * kp).sqrt()).ln()),
        StateClass::Glems5 if cond_ok => closed((b / (b * b - kx * kp).sqrt()).ln()),
        StateClass::Glems6 if cond_ok => {
            let dec = s.williamson()?;
            match glems6_upper_detail(s, &dec) {
                Ok(detail) => {
                    let (l, min) = lower_bound_detail(s, &dec)?;
                    if (detail.u - l).abs() > BOUND_EQ_TOL {
                        return Err(Error::Numeric(format!(
                            "class-6 U = {} and L = {l} disagree",
                            detail.u
                        )));
                    }
                    Ok(GieReport {
                        value: detail.u,
                        method: GieMethod::GenericGlemsProcedure,
                        upper_u: Some(detail.u),
                        lower_l: Some(l),
                        optimal_eve: min.eve,
                        homodyne_cond_ok: cond_ok,
                        g_tilde_min: gtm,
                    })
                }
                Err(Error::NoClosedForm) => bracket_report(s, grid, cond_ok, gtm),
                Err(e) => Err(e),
            }
        }
        _ => bracket_report(s, grid, cond_ok, gtm),
    }
}

fn bracket_report(
    s: &StdTwoModeState,
    grid: &crate::oracle::GridSpec,
    cond_ok: bool,
    gtm: f64,
) -> Result<GieReport> {
    let br = crate::oracle::gie_bracket(s, grid)?;
    Ok(GieReport {
        value: br.lo,
        method: GieMethod::OracleBracket {
            lo: br.lo,
            hi: br.hi,
            lo_certified: br.lo_certified,
        },
        upper_u: br.hi,
        lower_l: br.lo_certified.then_some(br.lo),
        optimal_eve: br.eve,
        homodyne_cond_ok: cond_ok,
        g_tilde_min: gtm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditioning::glems_conditional;
    use crate::gaussian::StdTwoModeState;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn state(a: f64, b: f64, kx: f64, kp: f64) -> StdTwoModeState {
        StdTwoModeState::new(a, b, kx, kp).unwrap()
    }

    fn rho6() -> StdTwoModeState {
        let s97 = 97f64.sqrt();
        state(
            2.0 * 2f64.sqrt(),
            2f64.sqrt(),
            (s97 + 1.0) / 8.0,
            (s97 - 1.0) / 8.0,
        )
    }

    fn glems4() -> StdTwoModeState {
        state(2.0 * 2f64.sqrt(), 2f64.sqrt(), 2f64.sqrt(), 1.0 / 2f64.sqrt())
    }

    /// Symmetric GLEMS (a = b, nu2 = 1) built by solving for kp.
    fn sym_glems(a: f64, kx: f64) -> StdTwoModeState {
        let kp = (1.0 - a * a + a * kx) / (a - kx);
        state(a, a, kx, kp)
    }

    /// Asymmetric squeezed thermal GLEMS from the saturation condition.
    fn asym_sqth_glems(a: f64, b: f64) -> StdTwoModeState {
        let k = if a >= b {
            ((a + 1.0) * (b - 1.0)).sqrt()
        } else {
            ((a - 1.0) * (b + 1.0)).sqrt()
        };
        state(a, b, k, k)
    }

    #[test]
    fn g_quantity_examples() {
        assert_relative_eq!(g_quantity(1.0, 1.0, 0.0), 2.0, epsilon = 1e-15);
        let s = rho6();
        let g = g_quantity(s.a(), s.b(), s.kx());
        let gtm = g_tilde_min(&s).unwrap();
        assert!(g >= gtm);
    }

    #[test]
    fn gcmi_examples() {
        let p = CondStdParams {
            a_t: 1.3,
            b_t: 2.0,
            cx_t: 0.0,
            cp_t: 0.0,
        };
        assert_eq!(gcmi_homodyne(&p), 0.0);

        let p = CondStdParams {
            a_t: 1.2,
            b_t: 1.2,
            cx_t: 0.5,
            cp_t: -0.5,
        };
        assert_relative_eq!(
            gcmi_homodyne(&p),
            0.5 * (1.44f64 / 1.19).ln(),
            epsilon = 1e-12
        );

        // Monotone increasing in cx at fixed a~ b~.
        let mut last = 0.0;
        for cx in [0.1, 0.3, 0.5, 0.7] {
            let v = gcmi_homodyne(&CondStdParams {
                a_t: 1.2,
                b_t: 1.2,
                cx_t: cx,
                cp_t: 0.0,
            });
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn g_tilde_min_paper_values() {
        assert_relative_eq!(
            g_tilde_min(&glems4()).unwrap(),
            2.5 - 7f64.powf(0.25),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            g_tilde_min(&rho6()).unwrap(),
            2.5 - 6f64.powf(0.25),
            epsilon = 1e-12
        );
        let s = state(6f64.sqrt(), 6f64.sqrt(), 2.0, 2.0);
        let gtm = g_tilde_min(&s).unwrap();
        assert_relative_eq!(gtm, 2.0 + 1.0 / 6f64.sqrt() - 2f64.sqrt(), epsilon = 1e-12);
        assert!((gtm - 0.99).abs() < 5e-3);
    }

    #[test]
    fn g_tilde_variants_examples() {
        // Symmetric squeezed thermal with a = sqrt 6, k = 2: nu = sqrt 2 and
        // the condition nu <= 2 + 1/a holds.
        let s = state(6f64.sqrt(), 6f64.sqrt(), 2.0, 2.0);
        let v = g_tilde_variants(&s).unwrap();
        assert_eq!(v.cond_sym_sqth, Some(true));
        assert_relative_eq!(
            v.g_min_sym,
            2.0 + 1.0 / 6f64.sqrt() - 2f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(v.g_opt_sym_glems.is_none());

        // Mixed symmetric GLEMS: the generic bound is strictly below the
        // optimized one.
        let s = sym_glems(1.5, 1.0);
        let v = g_tilde_variants(&s).unwrap();
        let opt = v.g_opt_sym_glems.unwrap();
        assert_relative_eq!(
            opt,
            2.0 + 1.0 / 1.5 - (1.5f64 * 1.5 - 1.0).sqrt(),
            epsilon = 1e-12
        );
        assert!(v.g_min_sym < opt);

        // Pure states: g_opt = 1 + 1/a > 0.
        let s = state(2.0, 2.0, 3f64.sqrt(), 3f64.sqrt());
        let v = g_tilde_variants(&s).unwrap();
        assert_relative_eq!(v.g_opt_sym_glems.unwrap(), 1.0 + 0.5, epsilon = 1e-9);

        assert!(g_tilde_variants(&glems4()).is_err());
    }

    #[test]
    fn alphas_class4() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        let al = alphas(&s, &dec).unwrap();
        let nu = dec.nu1();
        let f = (nu * nu - 1.0) / nu;
        assert_relative_eq!(al.alpha_a, f, epsilon = 1e-12);
        assert_relative_eq!(al.alpha_ab, f, epsilon = 1e-12);
        assert_relative_eq!(
            al.alpha_b,
            f * s.kx() * s.kx() / (s.a() * s.b()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn alphas_class1() {
        let s = sym_glems(1.5, 1.0);
        let dec = s.williamson().unwrap();
        let al = alphas(&s, &dec).unwrap();
        let nu = dec.nu1();
        let za2 = ((s.a() + s.kx()) / (s.a() - s.kp())).sqrt();
        let expect = (nu * nu - 1.0) / s.a() * za2 / 2.0;
        assert_relative_eq!(al.alpha_a, expect, epsilon = 1e-12);
        assert_relative_eq!(al.alpha_b, expect, epsilon = 1e-12);
        assert_relative_eq!(al.alpha_ab, (nu * nu - 1.0) / nu, epsilon = 1e-12);
    }

    #[test]
    fn alphas_class3a() {
        let (a, b) = (2.0, 1.5);
        let s = asym_sqth_glems(a, b);
        let dec = s.williamson().unwrap();
        let al = alphas(&s, &dec).unwrap();
        assert_relative_eq!(al.alpha_a, (a - b) * (a + 1.0) / a, epsilon = 1e-10);
        assert_relative_eq!(al.alpha_b, (a - b) * (b - 1.0) / b, epsilon = 1e-10);
        assert_relative_eq!(
            al.alpha_ab,
            (a - b) * (a - b + 2.0) / (a - b + 1.0),
            epsilon = 1e-10
        );
    }

    #[test]
    fn k_h_boundary_and_paper_values() {
        let s = rho6();
        let dec = s.williamson().unwrap();
        let al = alphas(&s, &dec).unwrap();
        assert_relative_eq!(k_h(0.0, &al).unwrap(), 1.0, epsilon = 0.0);

        let (q1, q2) = stationary_qs(&al).unwrap();
        assert!((q1 - 0.578).abs() < 1e-3);
        assert!((q2 - 0.402).abs() < 1e-3);
        let s97 = 97f64.sqrt();
        assert_relative_eq!(
            k_h(q2, &al).unwrap(),
            9.0 / 800.0 * (79.0 - s97),
            epsilon = 1e-9
        );
        let nu = dec.nu1();
        assert_relative_eq!(
            k_h(1.0 / nu, &al).unwrap(),
            (3169.0 - 79.0 * s97) / 3072.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn q_of_examples() {
        let nu = 2.3;
        assert_relative_eq!(
            q_of(&SingleModeMeasurement::heterodyne(), nu),
            1.0 / (nu + 1.0),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            q_of(&SingleModeMeasurement::homodyne_x(), nu),
            1.0 / nu,
            epsilon = 1e-15
        );
        // Large-t finite measurement approaches the homodyne value.
        let m = SingleModeMeasurement::finite(PI / 2.0, 1.0, 12.0).unwrap();
        assert_relative_eq!(q_of(&m, nu), 1.0 / nu, epsilon = 1e-9);

        let m = SingleModeMeasurement::finite(PI / 2.0, 1.0, 1.613).unwrap();
        assert!((q_of(&m, 6f64.sqrt()) - 0.402).abs() < 1e-3);
    }

    #[test]
    fn realize_q_round_trips() {
        for nu in [1.5, 6f64.sqrt(), 4.0] {
            for frac in [0.05, 0.3, 0.6, 0.9, 0.999] {
                let q = frac / nu;
                let m = realize_q(q, nu).unwrap();
                assert_relative_eq!(q_of(&m, nu), q, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn minimize_k_h_class4() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        let al = alphas(&s, &dec).unwrap();
        let min = minimize_k_h(&s, &dec, &al).unwrap();
        assert_relative_eq!(min.k_min, 4.0 / 7.0, epsilon = 1e-12);
        assert_relative_eq!(min.q_star, 1.0 / dec.nu1(), epsilon = 1e-15);
        assert_eq!(min.eve.unwrap().limit, MeasLimit::HomodyneX);
    }

    #[test]
    fn minimize_k_h_rho6() {
        let s = rho6();
        let dec = s.williamson().unwrap();
        let al = alphas(&s, &dec).unwrap();
        let nu = dec.nu1();
        let (q1, q2) = stationary_qs(&al).unwrap();
        assert!(q1 > 1.0 / nu && 1.0 / nu > q2);
        let min = minimize_k_h(&s, &dec, &al).unwrap();
        assert_relative_eq!(min.q_star, q2, epsilon = 1e-12);
        assert_relative_eq!(
            min.k_min,
            9.0 / 800.0 * (79.0 - 97f64.sqrt()),
            epsilon = 1e-9
        );
        let eve = min.eve.unwrap();
        assert_eq!(eve.limit, MeasLimit::Finite);
        assert_relative_eq!(eve.phi, PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(eve.tau, 1.0, epsilon = 1e-12);
        assert!((eve.t - 1.613).abs() < 5e-3);
    }

    #[test]
    fn minimize_k_h_class3_heterodyne() {
        let (a, b) = (2.0, 1.5);
        let s = asym_sqth_glems(a, b);
        let dec = s.williamson().unwrap();
        let al = alphas(&s, &dec).unwrap();
        let nu = dec.nu1();
        // K_h(1/nu) = 1 for this class.
        assert_relative_eq!(k_h(1.0 / nu, &al).unwrap(), 1.0, epsilon = 1e-12);
        let min = minimize_k_h(&s, &dec, &al).unwrap();
        let expect = (a + b).powi(2) * (a - b + 1.0) / (a * b * (a - b + 2.0).powi(2));
        assert_relative_eq!(min.k_min, expect, epsilon = 1e-10);
        assert_relative_eq!(min.q_star, 1.0 / (nu + 1.0), epsilon = 1e-10);
        let eve = min.eve.unwrap();
        assert_eq!(eve.limit, MeasLimit::Heterodyne);
    }

    #[test]
    fn lower_bound_examples() {
        assert_relative_eq!(
            lower_bound_l(&glems4()).unwrap(),
            0.5 * (8f64 / 7.0).ln(),
            epsilon = 1e-12
        );
        assert_relative_eq!(lower_bound_l(&rho6()).unwrap(), (6f64 / 5.0).ln(), epsilon = 1e-9);
        // Pure state: K = 1 and L = ln a.
        let pure = state(2.0, 2.0, 3f64.sqrt(), 3f64.sqrt());
        assert_relative_eq!(lower_bound_l(&pure).unwrap(), 2f64.ln(), epsilon = 1e-9);
        // Class 1: L = ln(a / sqrt(a^2 - kp^2)).
        let s1 = sym_glems(1.5, 1.0);
        assert_relative_eq!(
            lower_bound_l(&s1).unwrap(),
            (s1.a() / (s1.a() * s1.a() - s1.kp() * s1.kp()).sqrt()).ln(),
            epsilon = 1e-10
        );
        // Class 3: L = ln((a+b)/(|a-b|+2)) on both orderings.
        for (a, b) in [(2.0, 1.5), (1.5, 2.0)] {
            let s3 = asym_sqth_glems(a, b);
            assert_relative_eq!(
                lower_bound_l(&s3).unwrap(),
                ((a + b) / ((a - b).abs() + 2.0)).ln(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn upper_bound_examples() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        assert_relative_eq!(
            upper_bound_u(&s, &dec).unwrap(),
            (2.0 * 2f64.sqrt() / 7f64.sqrt()).ln(),
            epsilon = 1e-12
        );

        let s = rho6();
        let dec = s.williamson().unwrap();
        let detail = glems6_upper_detail(&s, &dec).unwrap();
        assert_relative_eq!(detail.h_min_1, 11.0 / 36.0, epsilon = 1e-9);
        assert_relative_eq!(
            detail.h_min_2,
            (49.0 - 97f64.sqrt()) / 128.0,
            epsilon = 1e-9
        );
        assert!(detail.h_min_1 < detail.h_min_2);
        assert!((detail.z1 - 2.269).abs() < 1e-3);
        assert!(detail.z1 < dec.nu1());
        assert_relative_eq!(detail.u, (6f64 / 5.0).ln(), epsilon = 1e-9);
    }

    #[test]
    fn saturation_h_at_optimal_eve() {
        // At the measurement realizing Q2 the conditional state attains the
        // minimal h = cx~^2/(a~ b~), and its homodyne GCMI equals U.
        let s = rho6();
        let dec = s.williamson().unwrap();
        let al = alphas(&s, &dec).unwrap();
        let min = minimize_k_h(&s, &dec, &al).unwrap();
        let eve = min.eve.unwrap();
        let g = glems_conditional(&s, &dec, &eve).unwrap();
        let p = g.std_params().unwrap();
        let h = p.cx_t * p.cx_t / (p.a_t * p.b_t);
        assert_relative_eq!(h, 11.0 / 36.0, epsilon = 1e-9);
        assert_relative_eq!(gcmi_homodyne(&p), (6f64 / 5.0).ln(), epsilon = 1e-9);
    }

    #[test]
    fn gie_closed_forms() {
        let r = gie(&glems4()).unwrap();
        assert!(matches!(r.method, GieMethod::ClosedForm(StateClass::Glems4)));
        assert_relative_eq!(r.value, (2.0 * (2f64 / 7.0).sqrt()).ln(), epsilon = 1e-12);
        assert!((r.value - 0.067).abs() < 1e-3);

        let s5 = state(2f64.sqrt(), 2.0 * 2f64.sqrt(), 2f64.sqrt(), 1.0 / 2f64.sqrt());
        let r5 = gie(&s5).unwrap();
        assert_relative_eq!(r5.value, r.value, epsilon = 1e-12);

        let r6 = gie(&rho6()).unwrap();
        assert!(matches!(r6.method, GieMethod::GenericGlemsProcedure));
        assert_relative_eq!(r6.value, (6f64 / 5.0).ln(), epsilon = 1e-9);

        let sym = state(1.2, 1.2, 0.5, 0.5);
        let rs = gie(&sym).unwrap();
        assert_relative_eq!(rs.value, (1.49f64 / 1.4).ln(), epsilon = 1e-12);
        assert!((rs.value - 0.0623).abs() < 1e-4);

        let vac_like = StdTwoModeState::new_boundary(1.0, 1.0, 0.0, 0.0).unwrap();
        let rv = gie(&vac_like).unwrap();
        assert_eq!(rv.value, 0.0);
    }

    #[test]
    fn gie_symmetric_compact_consistency() {
        let s = state(1.2, 1.2, 0.5, 0.5);
        let compact = gie_symmetric_compact(&s).unwrap();
        assert_relative_eq!(compact, (1.49f64 / 1.4).ln(), epsilon = 1e-12);
        assert_relative_eq!(compact, gie(&s).unwrap().value, epsilon = 1e-12);

        // Separability boundary: nt = 1 gives 0.
        let s = state(2.0, 2.0, 1.0, 1.0);
        assert_eq!(gie_symmetric_compact(&s).unwrap(), 0.0);

        // Monotone decreasing in nt on (0, 1).
        let f = |nt: f64| ((nt + 1.0 / nt) / 2.0).ln();
        assert!(f(0.3) > f(0.5) && f(0.5) > f(0.9));

        // Symmetric GLEMS agree with the class-1 closed form to 1e-12.
        let s1 = sym_glems(1.5, 1.0);
        assert_relative_eq!(
            gie_symmetric_compact(&s1).unwrap(),
            (s1.a() / (s1.a() * s1.a() - s1.kp() * s1.kp()).sqrt()).ln(),
            epsilon = 1e-12
        );
    }
}
