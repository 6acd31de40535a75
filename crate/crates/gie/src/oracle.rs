//! Brute-force verification of the GIE sup-inf by nested grid search with
//! local refinement. The oracle makes no structural assumptions: it
//! evaluates the Gaussian conditional mutual information directly from
//! covariance matrices and optimizes over measurement parameters only.
//!
//! Homodyne detection is approximated by finite squeezing capped at
//! `r_max` (= the Eve squeezing cap `t_max`); convergence is reported by
//! comparing runs at different caps.

use nalgebra::{DMatrix, Matrix2, Matrix4, Matrix4x2};
use rayon::prelude::*;

use crate::conditioning::{self, glems_conditional, rotation, SingleModeMeasurement};
use crate::engine;
use crate::gaussian::{omega, to_dmatrix, PurificationCM, StdTwoModeState};
use crate::{Error, Result};

/// Pure-state Gaussian measurement on a single mode: CM
/// P(theta) diag(e^{-2r}, e^{2r}) P(theta)^T, det = 1. theta = 0 with large
/// r approximates x-homodyne.
#[derive(Clone, Copy, Debug)]
pub struct PureLocalMeasurement {
    pub theta: f64,
    pub r: f64,
}

impl PureLocalMeasurement {
    pub fn x_homodyne(r: f64) -> Self {
        Self { theta: 0.0, r }
    }

    pub fn cm(&self) -> Matrix2<f64> {
        let p = rotation(self.theta);
        p * Matrix2::new((-2.0 * self.r).exp(), 0.0, 0.0, (2.0 * self.r).exp()) * p.transpose()
    }
}

/// Grid densities and caps for the oracle searches.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_r: usize,
    pub n_phi: usize,
    pub n_tau: usize,
    pub n_t: usize,
    pub r_max: f64,
    pub tau_max: f64,
    pub refinement_rounds: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_theta: 6,
            n_r: 4,
            n_phi: 6,
            n_tau: 4,
            n_t: 4,
            r_max: 8.0,
            tau_max: 20.0,
            refinement_rounds: 3,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [self.n_theta, self.n_r, self.n_phi, self.n_tau, self.n_t];
        if counts.iter().any(|&n| n < 3) {
            return Err(Error::InvalidState("grid counts must be >= 3".into()));
        }
        if !(self.r_max > 0.0 && self.tau_max > 1.0) {
            return Err(Error::InvalidState("grid caps must be positive".into()));
        }
        Ok(())
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }
}

/// Incumbent after each refinement round, for audit trails.
#[derive(Clone, Debug)]
pub struct Incumbent {
    pub round: usize,
    pub params: Vec<f64>,
    pub value: f64,
}

/// Result of one oracle optimization.
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub value: f64,
    pub params: Vec<f64>,
    pub trajectory: Vec<Incumbent>,
}

#[derive(Clone, Copy)]
struct ParamDomain {
    lo: f64,
    hi: f64,
    n: usize,
    /// Half-open interval (used for angles, where hi wraps to lo).
    half_open: bool,
    /// Grid and refinement operate on ln(x) (used for thermal factors).
    log_scale: bool,
}

impl ParamDomain {
    fn fwd(&self, x: f64) -> f64 {
        if self.log_scale {
            x.ln()
        } else {
            x
        }
    }

    fn back(&self, u: f64) -> f64 {
        if self.log_scale {
            u.exp()
        } else {
            u
        }
    }
}

#[derive(Clone)]
struct Candidate {
    value: f64,
    tie: f64,
    flat: usize,
    params: Vec<f64>,
}

fn better_min(a: Candidate, b: Candidate) -> Candidate {
    if a.value < b.value {
        a
    } else if b.value < a.value {
        b
    } else if a.tie < b.tie {
        a
    } else if b.tie < a.tie {
        b
    } else if a.flat <= b.flat {
        a
    } else {
        b
    }
}

fn linspace(lo: f64, hi: f64, n: usize, half_open: bool) -> Vec<f64> {
    if n == 1 || hi <= lo {
        return vec![lo];
    }
    let div = if half_open { n as f64 } else { (n - 1) as f64 };
    (0..n).map(|i| lo + (hi - lo) * i as f64 / div).collect()
}

/// Deterministic grid minimization with `rounds` rounds of 4x zoom around
/// the incumbent, clipped to the original domain. Ties prefer the smaller
/// value of the `tie_idx` parameter, then the smaller flattened index;
/// evaluation order never affects the result.
fn grid_minimize<F>(
    domains: &[ParamDomain],
    rounds: usize,
    tie_idx: Option<usize>,
    f: F,
) -> OracleRun
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if domains.is_empty() {
        let value = f(&[]);
        return OracleRun {
            value,
            params: Vec::new(),
            trajectory: vec![Incumbent {
                round: 0,
                params: Vec::new(),
                value,
            }],
        };
    }
    // Boxes live in transformed (possibly log) coordinates.
    let mut boxes: Vec<(f64, f64)> = domains.iter().map(|d| (d.fwd(d.lo), d.fwd(d.hi))).collect();
    let mut best: Option<Candidate> = None;
    let mut trajectory = Vec::with_capacity(rounds + 1);

    for round in 0..=rounds {
        let pts: Vec<Vec<f64>> = domains
            .iter()
            .zip(&boxes)
            .map(|(d, b)| {
                linspace(b.0, b.1, d.n, round == 0 && d.half_open)
                    .into_iter()
                    .map(|u| d.back(u))
                    .collect()
            })
            .collect();
        let total: usize = pts.iter().map(Vec::len).product();
        let round_best = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut idx = flat;
                let mut params = Vec::with_capacity(domains.len());
                for p in &pts {
                    params.push(p[idx % p.len()]);
                    idx /= p.len();
                }
                let value = f(&params);
                Candidate {
                    value,
                    tie: tie_idx.map_or(0.0, |i| params[i]),
                    flat,
                    params,
                }
            })
            .reduce_with(better_min)
            .expect("non-empty grid");

        let improved = match &best {
            None => true,
            Some(cur) => {
                round_best.value < cur.value
                    || (round_best.value == cur.value && round_best.tie < cur.tie)
            }
        };
        if improved {
            best = Some(round_best);
        }
        let cur = best.as_ref().expect("incumbent");
        trajectory.push(Incumbent {
            round,
            params: cur.params.clone(),
            value: cur.value,
        });

        // 4x zoom around the incumbent, clipped to the original domain.
        for (i, d) in domains.iter().enumerate() {
            let w = (boxes[i].1 - boxes[i].0) / 4.0;
            let c = d.fwd(cur.params[i]);
            let mut lo = (c - w / 2.0).max(d.fwd(d.lo));
            let hi = (lo + w).min(d.fwd(d.hi));
            lo = (hi - w).max(d.fwd(d.lo));
            boxes[i] = (lo, hi);
        }
    }
    let cur = best.expect("incumbent");
    OracleRun {
        value: cur.value,
        params: cur.params,
        trajectory,
    }
}

/// Precomputed purification blocks in fixed-size form for the hot loops.
enum FastPurification {
    R0 {
        gab: Matrix4<f64>,
    },
    R1 {
        gab: Matrix4<f64>,
        gabe: Matrix4x2<f64>,
        ge: Matrix2<f64>,
    },
    R2 {
        gab: Matrix4<f64>,
        gabe: Matrix4<f64>,
        ge: Matrix4<f64>,
    },
}

impl FastPurification {
    fn new(p: &PurificationCM) -> Self {
        match p.rank() {
            0 => FastPurification::R0 { gab: *p.gamma_ab() },
            1 => FastPurification::R1 {
                gab: *p.gamma_ab(),
                gabe: Matrix4x2::from_fn(|r, c| p.gamma_abe()[(r, c)]),
                ge: Matrix2::from_fn(|r, c| p.gamma_e()[(r, c)]),
            },
            2 => FastPurification::R2 {
                gab: *p.gamma_ab(),
                gabe: Matrix4::from_fn(|r, c| p.gamma_abe()[(r, c)]),
                ge: Matrix4::from_fn(|r, c| p.gamma_e()[(r, c)]),
            },
            r => unreachable!("two-mode states have symplectic rank <= 2, got {r}"),
        }
    }

    fn rank(&self) -> usize {
        match self {
            FastPurification::R0 { .. } => 0,
            FastPurification::R1 { .. } => 1,
            FastPurification::R2 { .. } => 2,
        }
    }

    /// Schur-complement conditional CM for an Eve measurement CM given as a
    /// flat slice of length (2R)^2 in row-major order.
    fn conditional(&self, eve: &[f64]) -> Option<Matrix4<f64>> {
        match self {
            FastPurification::R0 { gab } => Some(*gab),
            FastPurification::R1 { gab, gabe, ge } => {
                let g = Matrix2::new(eve[0], eve[1], eve[2], eve[3]);
                let total = ge + g;
                let inv = total.try_inverse()?;
                Some(gab - gabe * inv * gabe.transpose())
            }
            FastPurification::R2 { gab, gabe, ge } => {
                let g = Matrix4::from_fn(|r, c| eve[4 * r + c]);
                let total = ge + g;
                let inv = total.try_inverse()?;
                Some(gab - gabe * inv * gabe.transpose())
            }
        }
    }
}

fn det2(m: &Matrix4<f64>, r: usize, c: usize) -> f64 {
    m[(r, c)] * m[(r + 1, c + 1)] - m[(r, c + 1)] * m[(r + 1, c)]
}

/// I(A;B|E) from a conditional CM and the A/B measurement CMs.
fn mutual_info_of_conditional(
    cond: &Matrix4<f64>,
    ga: &Matrix2<f64>,
    gb: &Matrix2<f64>,
) -> Option<f64> {
    let mut sigma = *cond;
    for r in 0..2 {
        for c in 0..2 {
            sigma[(r, c)] += ga[(r, c)];
            sigma[(r + 2, c + 2)] += gb[(r, c)];
        }
    }
    let det_a = det2(&sigma, 0, 0);
    let det_b = det2(&sigma, 2, 2);
    let det_ab = sigma.determinant();
    if det_a <= 0.0 || det_b <= 0.0 || det_ab <= 0.0 {
        return None;
    }
    Some(0.5 * (det_a * det_b / det_ab).ln())
}

/// Gaussian conditional mutual information
/// I(A;B|E) = (1/2) ln(det sigma_A det sigma_B / det sigma_AB)
/// for pure local measurements on A, B and an Eve measurement CM of shape
/// 2R x 2R acting on the purifying modes.
pub fn cond_mutual_info(
    p: &PurificationCM,
    ga: &PureLocalMeasurement,
    gb: &PureLocalMeasurement,
    gamma_e: &DMatrix<f64>,
) -> Result<f64> {
    let cond = conditioning::conditional_cm(p, gamma_e)?;
    mutual_info_of_conditional(&cond, &ga.cm(), &gb.cm())
        .ok_or_else(|| Error::Numeric("non-positive determinant in I(A;B|E)".into()))
}

/// Wrapper for rank-1 purifications with a single-mode Eve measurement.
pub fn cond_mutual_info_single(
    p: &PurificationCM,
    ga: &PureLocalMeasurement,
    gb: &PureLocalMeasurement,
    ge: &SingleModeMeasurement,
) -> Result<f64> {
    cond_mutual_info(p, ga, gb, &to_dmatrix(&ge.cm()?))
}

/// Same quantity through the determinant decomposition
/// I(A;B|E) = I(A;B) + (1/2) ln K with
/// K = det(G_E + X_A) det(G_E + X_B) / (det(G_E + X_AB) det(G_E + gamma_E));
/// used as an independent cross-check of [`cond_mutual_info`].
pub fn cond_mutual_info_decomposed(
    p: &PurificationCM,
    ga: &PureLocalMeasurement,
    gb: &PureLocalMeasurement,
    gamma_e: &DMatrix<f64>,
) -> Result<f64> {
    let gab = p.gamma_ab();
    let (ga_cm, gb_cm) = (ga.cm(), gb.cm());
    let mut sum = *gab;
    for r in 0..2 {
        for c in 0..2 {
            sum[(r, c)] += ga_cm[(r, c)];
            sum[(r + 2, c + 2)] += gb_cm[(r, c)];
        }
    }
    let det_ga = (gab.fixed_view::<2, 2>(0, 0) + ga_cm).determinant();
    let det_gb = (gab.fixed_view::<2, 2>(2, 2) + gb_cm).determinant();
    let i_ab = 0.5 * (det_ga * det_gb / sum.determinant()).ln();
    if p.rank() == 0 {
        return Ok(i_ab);
    }

    let schur = |outer: DMatrix<f64>, rows: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let inv = outer
            .try_inverse()
            .ok_or_else(|| Error::Numeric("singular block in decomposition".into()))?;
        Ok(p.gamma_e() - rows.transpose() * inv * rows)
    };
    let gamma_ae = p.gamma_abe().rows(0, 2).into_owned();
    let gamma_be = p.gamma_abe().rows(2, 2).into_owned();
    let x_a = schur(
        to_dmatrix(&(gab.fixed_view::<2, 2>(0, 0) + ga_cm)),
        &gamma_ae,
    )?;
    let x_b = schur(
        to_dmatrix(&(gab.fixed_view::<2, 2>(2, 2) + gb_cm)),
        &gamma_be,
    )?;
    let x_ab = schur(to_dmatrix(&sum), &p.gamma_abe().clone())?;
    let det = |m: DMatrix<f64>| (m + gamma_e).determinant();
    let k = det(x_a) * det(x_b) / (det(x_ab) * det(p.gamma_e().clone()));
    if k <= 0.0 {
        return Err(Error::Numeric("non-positive K in decomposition".into()));
    }
    Ok(i_ab + 0.5 * k.ln())
}

/// Number of Eve grid parameters for a given symplectic rank.
pub fn eve_param_count(rank: usize) -> usize {
    match rank {
        0 => 0,
        1 => 3,
        _ => 7,
    }
}

/// Eve measurement CM from grid parameters (row-major flat output).
///
/// Rank 1: (phi, tau, t). Rank 2: the heuristic family
/// R(beta) [Gamma(phi1,tau1,t1) (+) Gamma(phi2,tau2,t2)] R(beta)^T with a
/// beam-splitter rotation R(beta); this is a sub-family of all two-mode
/// measurement CMs and results on rank-2 states are flagged accordingly.
fn eve_cm_flat(rank: usize, params: &[f64], out: &mut [f64]) {
    let gamma = |phi: f64, tau: f64, t: f64| -> Matrix2<f64> {
        let vp = tau * (2.0 * t).cosh();
        let vm = tau * (2.0 * t).sinh();
        let (s2, c2) = (2.0 * phi).sin_cos();
        Matrix2::new(vp + vm * c2, vm * s2, vm * s2, vp - vm * c2)
    };
    match rank {
        1 => {
            let g = gamma(params[0], params[1], params[2]);
            out[..4].copy_from_slice(&[g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]]);
        }
        2 => {
            let g1 = gamma(params[0], params[1], params[2]);
            let g2 = gamma(params[3], params[4], params[5]);
            let (sb, cb) = params[6].sin_cos();
            let mut direct = Matrix4::zeros();
            direct.fixed_view_mut::<2, 2>(0, 0).copy_from(&g1);
            direct.fixed_view_mut::<2, 2>(2, 2).copy_from(&g2);
            let mut rot = Matrix4::zeros();
            for i in 0..2 {
                rot[(i, i)] = cb;
                rot[(i + 2, i + 2)] = cb;
                rot[(i, i + 2)] = sb;
                rot[(i + 2, i)] = -sb;
            }
            let full = rot * direct * rot.transpose();
            for r in 0..4 {
                for c in 0..4 {
                    out[4 * r + c] = full[(r, c)];
                }
            }
        }
        _ => {}
    }
}

fn eve_domains(rank: usize, grid: &GridSpec) -> Vec<ParamDomain> {
    use std::f64::consts::PI;
    let phi = ParamDomain {
        lo: 0.0,
        hi: PI,
        n: grid.n_phi,
        half_open: true,
        log_scale: false,
    };
    let tau = ParamDomain {
        lo: 1.0,
        hi: grid.tau_max,
        n: grid.n_tau,
        half_open: false,
        log_scale: true,
    };
    let t = ParamDomain {
        lo: 0.0,
        hi: grid.r_max,
        n: grid.n_t,
        half_open: false,
        log_scale: false,
    };
    match rank {
        0 => Vec::new(),
        1 => vec![phi, tau, t],
        _ => vec![
            phi,
            tau,
            t,
            phi,
            tau,
            t,
            ParamDomain {
                lo: 0.0,
                hi: PI,
                n: grid.n_phi.min(5),
                half_open: true,
                log_scale: false,
            },
        ],
    }
}

/// Infimum of I(A;B|E) over Eve's measurement family for fixed measurements
/// on A and B. Grid + refinement; ties prefer smaller Eve squeezing t.
pub fn inf_over_eve(
    p: &PurificationCM,
    ga: &PureLocalMeasurement,
    gb: &PureLocalMeasurement,
    grid: &GridSpec,
) -> Result<OracleRun> {
    grid.validate()?;
    let fast = FastPurification::new(p);
    let (ga_cm, gb_cm) = (ga.cm(), gb.cm());
    let domains = eve_domains(fast.rank(), grid);
    let rank = fast.rank();
    let run = grid_minimize(&domains, grid.refinement_rounds, Some(2), |params| {
        let mut buf = [0.0f64; 16];
        eve_cm_flat(rank, params, &mut buf);
        match fast.conditional(&buf[..(2 * rank) * (2 * rank)]) {
            Some(cond) => {
                mutual_info_of_conditional(&cond, &ga_cm, &gb_cm).unwrap_or(f64::INFINITY)
            }
            None => f64::INFINITY,
        }
    });
    if !run.value.is_finite() {
        return Err(Error::Numeric("no finite value on the Eve grid".into()));
    }
    Ok(run)
}

/// The sup-inf defining GIE: outer grid over pure measurements
/// (theta_A, r_A, theta_B, r_B), inner [`inf_over_eve`]. The returned value
/// is a lower-side estimate of the supremum.
pub fn sup_inf(p: &PurificationCM, grid: &GridSpec) -> Result<OracleRun> {
    use std::f64::consts::PI;
    grid.validate()?;
    let theta = ParamDomain {
        lo: 0.0,
        hi: PI,
        n: grid.n_theta,
        half_open: true,
        log_scale: false,
    };
    let r = ParamDomain {
        lo: 0.0,
        hi: grid.r_max,
        n: grid.n_r,
        half_open: false,
        log_scale: false,
    };
    let domains = [theta, r, theta, r];
    let run = grid_minimize(&domains, grid.refinement_rounds, None, |params| {
        let ga = PureLocalMeasurement {
            theta: params[0],
            r: params[1],
        };
        let gb = PureLocalMeasurement {
            theta: params[2],
            r: params[3],
        };
        match inf_over_eve(p, &ga, &gb, grid) {
            Ok(inner) => -inner.value,
            Err(_) => f64::INFINITY,
        }
    });
    if !run.value.is_finite() {
        return Err(Error::Numeric("no finite value on the A/B grid".into()));
    }
    Ok(OracleRun {
        value: -run.value,
        params: run.params,
        trajectory: run
            .trajectory
            .into_iter()
            .map(|i| Incumbent {
                value: -i.value,
                ..i
            })
            .collect(),
    })
}

/// Direct grid minimization of K_h over (phi, tau, t) through Q; must agree
/// with the closed-form minimization after refinement.
pub fn min_k_h_grid(
    s: &StdTwoModeState,
    dec: &crate::gaussian::SymplecticDecomposition,
    grid: &GridSpec,
) -> Result<f64> {
    grid.validate()?;
    let al = engine::alphas(s, dec)?;
    let nu = dec.nu1();
    let domains = eve_domains(1, grid);
    let run = grid_minimize(&domains, grid.refinement_rounds, Some(2), |params| {
        match SingleModeMeasurement::finite(params[0], params[1], params[2]) {
            Ok(m) => engine::k_h(engine::q_of(&m, nu), &al).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    });
    Ok(run.value)
}

/// Moduli of the eigenvalues of Omega gamma (one per mode): the symplectic
/// spectrum of `cm` computed by a generic eigensolver, independent of the
/// closed-form spectra elsewhere in the crate.
pub fn symplectic_spectrum(cm: &DMatrix<f64>) -> Vec<f64> {
    let n = cm.nrows() / 2;
    let prod = omega(n) * cm;
    let eig = prod.complex_eigenvalues();
    let mut mods: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| b.partial_cmp(a).expect("finite moduli"));
    mods.into_iter().step_by(2).collect()
}

/// Best known bracket on the GIE of a state without a proven closed form.
#[derive(Clone, Debug)]
pub struct Bracket {
    /// Best lower estimate (the exact lower bound L for GLEMS; a heuristic
    /// value for rank-2 states).
    pub lo: f64,
    /// Best upper bound, available when the homodyne-optimality condition
    /// holds (every probed Eve point then certifies an upper bound).
    pub hi: Option<f64>,
    /// False when `lo` relies on the heuristic two-mode Eve family.
    pub lo_certified: bool,
    /// Eve measurement attaining `lo`, when available in closed form.
    pub eve: Option<SingleModeMeasurement>,
}

/// Computes a GIE bracket by the cheapest available route.
pub fn gie_bracket(s: &StdTwoModeState, grid: &GridSpec) -> Result<Bracket> {
    grid.validate()?;
    if !s.is_entangled()? {
        return Ok(Bracket {
            lo: 0.0,
            hi: Some(0.0),
            lo_certified: true,
            eve: None,
        });
    }
    let cond52 = engine::g_tilde_min(s)? >= 0.0;
    let dec = s.williamson()?;

    if s.is_glems() {
        let (lo, min) = engine::lower_bound_detail(s, &dec)?;
        let hi = if cond52 {
            // Any Eve point upper-bounds GIE through the homodyne GCMI of
            // the conditional state; minimize it over the single-mode family.
            let domains = eve_domains(1, grid);
            let run = grid_minimize(&domains, grid.refinement_rounds, Some(2), |params| {
                let m = match SingleModeMeasurement::finite(params[0], params[1], params[2]) {
                    Ok(m) => m,
                    Err(_) => return f64::INFINITY,
                };
                match glems_conditional(s, &dec, &m).and_then(|g| g.std_params()) {
                    Ok(p) => engine::gcmi_homodyne(&p),
                    Err(_) => f64::INFINITY,
                }
            });
            // The ideal-homodyne boundary point is part of the family too.
            let hom = glems_conditional(s, &dec, &SingleModeMeasurement::homodyne_x())
                .and_then(|g| g.std_params())
                .map(|p| engine::gcmi_homodyne(&p))?;
            Some(run.value.min(hom))
        } else {
            None
        };
        return Ok(Bracket {
            lo,
            hi,
            lo_certified: true,
            eve: min.eve,
        });
    }

    // Rank-2 state: heuristic Eve family, fixed x-homodyne on A and B for
    // the lower estimate.
    let p = s.purification(&dec)?;
    let fast = FastPurification::new(&p);
    let ga = PureLocalMeasurement::x_homodyne(grid.r_max);
    let (ga_cm, gb_cm) = (ga.cm(), ga.cm());
    let domains = eve_domains(2, grid);
    let lo_run = grid_minimize(&domains, grid.refinement_rounds, Some(2), |params| {
        let mut buf = [0.0f64; 16];
        eve_cm_flat(2, params, &mut buf);
        match fast.conditional(&buf) {
            Some(cond) => mutual_info_of_conditional(&cond, &ga_cm, &gb_cm)
                .unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        }
    });
    let hi = if cond52 {
        let run = grid_minimize(&domains, grid.refinement_rounds, Some(2), |params| {
            let mut buf = [0.0f64; 16];
            eve_cm_flat(2, params, &mut buf);
            match fast.conditional(&buf) {
                Some(cond) => match conditioning::std_params_of(&cond) {
                    Ok(p) => engine::gcmi_homodyne(&p),
                    Err(_) => f64::INFINITY,
                },
                None => f64::INFINITY,
            }
        });
        run.value.is_finite().then_some(run.value)
    } else {
        None
    };
    Ok(Bracket {
        lo: lo_run.value.max(0.0),
        hi,
        lo_certified: false,
        eve: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn small_grid() -> GridSpec {
        GridSpec {
            n_theta: 4,
            n_r: 3,
            n_phi: 5,
            n_tau: 3,
            n_t: 3,
            refinement_rounds: 2,
            ..GridSpec::default()
        }
    }

    #[test]
    fn pure_state_conditional_info_ignores_eve() {
        let s = state(2.0, 2.0, 3f64.sqrt(), 3f64.sqrt());
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let ga = PureLocalMeasurement { theta: 0.4, r: 2.0 };
        let gb = PureLocalMeasurement { theta: 1.3, r: 1.0 };
        let i = cond_mutual_info(&p, &ga, &gb, &DMatrix::zeros(0, 0)).unwrap();
        // Equals I(A;B) computed from the state CM directly.
        let direct = cond_mutual_info_decomposed(&p, &ga, &gb, &DMatrix::zeros(0, 0)).unwrap();
        assert_relative_eq!(i, direct, epsilon = 1e-12);
        assert!(i > 0.0);
    }

    #[test]
    fn decomposition_path_agrees() {
        let cases = [
            (rho6(), 0.0, 8.0, 0.0, 8.0),
            (glems4(), 0.3, 2.0, 1.1, 3.0),
            (state(3.0, 2.0, 2.0, 4.0 / 3.0), 0.0, 4.0, 0.7, 2.5),
        ];
        for (s, ta, ra, tb, rb) in cases {
            let dec = s.williamson().unwrap();
            let p = s.purification(&dec).unwrap();
            let ga = PureLocalMeasurement { theta: ta, r: ra };
            let gb = PureLocalMeasurement { theta: tb, r: rb };
            for (phi, tau, t) in [(0.0, 1.0, 0.0), (PI / 2.0, 1.0, 1.6), (0.8, 2.0, 0.5)] {
                let base = SingleModeMeasurement::finite(phi, tau, t).unwrap().cm().unwrap();
                let ge = if p.rank() == 1 {
                    to_dmatrix(&base)
                } else {
                    let mut m = DMatrix::identity(4, 4);
                    m.view_mut((0, 0), (2, 2)).copy_from(&base);
                    m
                };
                let i1 = cond_mutual_info(&p, &ga, &gb, &ge).unwrap();
                let i2 = cond_mutual_info_decomposed(&p, &ga, &gb, &ge).unwrap();
                assert_relative_eq!(i1, i2, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn rho6_optimal_point_reproduces_gie() {
        let s = rho6();
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let ga = PureLocalMeasurement::x_homodyne(8.0);
        let eve = SingleModeMeasurement::finite(PI / 2.0, 1.0, 1.613).unwrap();
        let i = cond_mutual_info(&p, &ga, &ga, &to_dmatrix(&eve.cm().unwrap())).unwrap();
        assert!((i - (6f64 / 5.0).ln()).abs() < 2e-3, "got {i}");
    }

    #[test]
    fn class4_x_homodyne_point() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let ga = PureLocalMeasurement::x_homodyne(8.0);
        let eve = SingleModeMeasurement::finite(PI / 2.0, 1.0, 8.0).unwrap();
        let i = cond_mutual_info(&p, &ga, &ga, &to_dmatrix(&eve.cm().unwrap())).unwrap();
        assert!((i - 0.5 * (8f64 / 7.0).ln()).abs() < 2e-3, "got {i}");
    }

    #[test]
    fn inf_over_eve_class4_finds_x_homodyne() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let ga = PureLocalMeasurement::x_homodyne(8.0);
        let grid = GridSpec::default();
        let run = inf_over_eve(&p, &ga, &ga, &grid).unwrap();
        // Optimal Eve measurement is x_E homodyne: t at the cap, phi near
        // pi/2, tau near 1.
        assert_relative_eq!(run.params[2], grid.r_max, epsilon = 1e-9);
        assert!((run.params[0] - PI / 2.0).abs() < 0.2, "phi = {}", run.params[0]);
        assert!(run.params[1] < 1.5, "tau = {}", run.params[1]);
        assert!((run.value - 0.5 * (8f64 / 7.0).ln()).abs() < 2e-3);
        // Infimum property: no probed point is below the returned value.
        for (phi, tau, t) in [(0.1, 3.0, 1.0), (PI / 2.0, 1.0, 4.0), (2.0, 1.5, 0.3)] {
            let ge = SingleModeMeasurement::finite(phi, tau, t).unwrap();
            let i = cond_mutual_info(&p, &ga, &ga, &to_dmatrix(&ge.cm().unwrap())).unwrap();
            assert!(i >= run.value - 1e-12);
        }
        // Monotone non-increasing trajectory.
        for w in run.trajectory.windows(2) {
            assert!(w[1].value <= w[0].value + 1e-15);
        }
    }

    #[test]
    fn inf_over_eve_class3_finds_heterodyne() {
        let (a, b) = (2.0f64, 1.5f64);
        let k = ((a + 1.0) * (b - 1.0)).sqrt();
        let s = state(a, b, k, k);
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let ga = PureLocalMeasurement::x_homodyne(8.0);
        let run = inf_over_eve(&p, &ga, &ga, &GridSpec::default()).unwrap();
        // Heterodyne: tau = 1, t = 0 (phi is then irrelevant).
        assert!(run.params[1] < 1.3, "tau = {}", run.params[1]);
        assert!(run.params[2] < 0.3, "t = {}", run.params[2]);
        let expect = engine::lower_bound_l(&s).unwrap();
        assert!((run.value - expect).abs() < 2e-3);
    }

    #[test]
    fn sup_inf_class4() {
        let s = glems4();
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let run = sup_inf(&p, &small_grid()).unwrap();
        let expect = (2.0 * (2f64 / 7.0).sqrt()).ln();
        assert!((run.value - expect).abs() < 2e-3, "got {}", run.value);
    }

    #[test]
    fn sup_inf_separable_is_tiny() {
        let s = state(1.1, 1.1, 0.05, 0.04);
        assert!(!s.is_entangled().unwrap());
        let dec = s.williamson().unwrap();
        let p = s.purification(&dec).unwrap();
        let grid = GridSpec {
            n_theta: 3,
            n_r: 3,
            n_phi: 3,
            n_tau: 3,
            n_t: 3,
            refinement_rounds: 1,
            ..GridSpec::default()
        };
        let run = sup_inf(&p, &grid).unwrap();
        assert!(run.value <= 2e-3, "got {}", run.value);
    }

    #[test]
    fn min_k_h_grid_matches_engine() {
        let dense = GridSpec {
            n_phi: 9,
            n_tau: 7,
            n_t: 9,
            refinement_rounds: 5,
            ..GridSpec::default()
        };
        let s = rho6();
        let dec = s.williamson().unwrap();
        let al = engine::alphas(&s, &dec).unwrap();
        let exact = engine::minimize_k_h(&s, &dec, &al).unwrap().k_min;
        let gridded = min_k_h_grid(&s, &dec, &dense).unwrap();
        assert_relative_eq!(gridded, 9.0 / 800.0 * (79.0 - 97f64.sqrt()), epsilon = 1e-6);
        assert!(gridded >= exact - 1e-12);

        let s = glems4();
        let dec = s.williamson().unwrap();
        let gridded = min_k_h_grid(&s, &dec, &dense).unwrap();
        assert_relative_eq!(gridded, 4.0 / 7.0, epsilon = 1e-6);
    }

    #[test]
    fn spectrum_oracle_matches_closed_form() {
        for s in [rho6(), glems4(), state(3.0, 2.0, 2.0, 4.0 / 3.0)] {
            let (nu1, nu2) = s.symplectic_eigenvalues().unwrap();
            let spec = symplectic_spectrum(&to_dmatrix(&s.cov_matrix()));
            assert_relative_eq!(spec[0], nu1, epsilon = 1e-10);
            assert_relative_eq!(spec[1], nu2, epsilon = 1e-10);
        }
    }

    #[test]
    fn bracket_for_class7_glems() {
        // A class-7 GLEMS: a < b, a kx != b kp, nu2 = 1.
        let (a, b, kx) = (1.6f64, 2.8f64, 1.6f64);
        let kp = crate::scan::glems_kp(a, b, kx).unwrap();
        let s = state(a, b, kx, kp);
        assert!(s.is_glems());
        assert_eq!(
            s.classify(1e-9).unwrap(),
            crate::gaussian::StateClass::Glems7
        );
        let br = gie_bracket(&s, &small_grid()).unwrap();
        assert!(br.lo_certified);
        let hi = br.hi.expect("condition 52 holds for this state");
        assert!(br.lo <= hi + 1e-9, "lo {} hi {}", br.lo, hi);
        assert!(br.lo > 0.0);
        // Conjectured value sits inside the bracket.
        let r2 = crate::measures::gr2eof_glems(&s).unwrap();
        assert!(br.lo <= r2 + 1e-6 && r2 <= hi + 1e-3, "lo {} r2 {r2} hi {hi}", br.lo);
    }
}
