//! Two-mode Gaussian states in standard form and their symplectic algebra.
//!
//! Units: vacuum CM = identity, so physical states have all symplectic
//! eigenvalues >= 1 and pure states have spectrum {1, 1}.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use serde::Serialize;

use crate::{expr, Error, Result};

/// Relative tolerance deciding whether nu2 = 1 (GLEMS membership) and whether
/// the case-2a/3a discriminant b*kx - a*kp (resp. a*kx - b*kp) vanishes.
pub const GLEMS_TOL: f64 = 1e-9;

/// Tolerance for the physicality and entanglement inequalities; boundary
/// states (saturated uncertainty relation) count as physical.
pub const PHYS_TOL: f64 = 1e-12;

/// 2x2 single-mode symplectic form J = [[0,1],[-1,0]].
pub fn j_block() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// Symplectic form of `n_modes` modes: the direct sum of `n_modes` copies of J.
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    assert!(n_modes >= 1, "omega needs at least one mode");
    let mut m = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..n_modes {
        m[(2 * i, 2 * i + 1)] = 1.0;
        m[(2 * i + 1, 2 * i)] = -1.0;
    }
    m
}

/// Copies a fixed-size matrix into a dynamically-sized one.
pub fn to_dmatrix<const R: usize, const C: usize>(
    m: &nalgebra::SMatrix<f64, R, C>,
) -> DMatrix<f64> {
    DMatrix::from_fn(R, C, |r, c| m[(r, c)])
}

/// Two-mode symplectic form as a fixed-size matrix.
pub fn omega2() -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m[(0, 1)] = 1.0;
    m[(1, 0)] = -1.0;
    m[(2, 3)] = 1.0;
    m[(3, 2)] = -1.0;
    m
}

/// Standard-form parameters (a, b, kx, kp) of a two-mode covariance matrix
///
/// ```text
///     [ a  0   kx  0  ]
///     [ 0  a   0  -kp ]
///     [ kx 0   b   0  ]
///     [ 0 -kp  0   b  ]
/// ```
///
/// with a, b >= 1 and kx >= kp. The restricted standard form used by all
/// entanglement machinery additionally has kp > 0; kp = 0 states are at the
/// separability boundary and are accepted only by [`StdTwoModeState::new_boundary`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StdTwoModeState {
    a: f64,
    b: f64,
    kx: f64,
    kp: f64,
}

/// Symplectic invariants of a standard-form state.
///
/// `delta` and `d` are the quantities entering the symplectic spectrum,
/// `m = a*kx - b*kp`, `m_tilde = b*kx - a*kp`, and `l1`, `l2` are
/// `b^2 - kx*kp - nu_{1,2}^2 = (b^2 - a^2 -/+ sqrt(d)) / 2`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SymplecticInvariants {
    pub delta: f64,
    pub d: f64,
    pub m: f64,
    pub m_tilde: f64,
    pub l1: f64,
    pub l2: f64,
}

/// State classes relevant for GIE dispatch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StateClass {
    /// nu1 = nu2 = 1.
    Pure,
    /// GLEMS with a = b.
    SymGlems,
    /// a = b, kx = kp, nu2 > 1.
    SymSqueezedThermal,
    /// GLEMS with kx = kp and a != b.
    AsymSqueezedThermalGlems,
    /// GLEMS with a > b and b*kx = a*kp.
    Glems4,
    /// GLEMS with a < b and a*kx = b*kp.
    Glems5,
    /// GLEMS with a > b and b*kx != a*kp.
    Glems6,
    /// GLEMS with a < b and a*kx != b*kp.
    Glems7,
    /// Everything else (symplectic rank 2, no extra symmetry).
    GenericNonGlems,
}

impl StateClass {
    pub fn is_glems(self) -> bool {
        !matches!(
            self,
            StateClass::SymSqueezedThermal | StateClass::GenericNonGlems
        )
    }
}

/// Case tag of the Williamson diagonalization dispatch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WilliamsonCase {
    /// a = b.
    Sym,
    /// a > b, b*kx = a*kp.
    Case2a,
    /// a > b, b*kx != a*kp.
    Case2b,
    /// a < b, a*kx = b*kp.
    Case3a,
    /// a < b, a*kx != b*kp.
    Case3b,
}

/// Symplectic matrix S with S gamma S^T = diag(nu1, nu1, nu2, nu2), plus the
/// spectrum and the dispatch case. S never mixes position and momentum
/// quadratures, so it has the checkerboard pattern
///
/// ```text
///     [ x1 0  x2 0  ]
///     [ 0  x3 0  x4 ]
///     [ x5 0  x6 0  ]
///     [ 0  x7 0  x8 ]
/// ```
#[derive(Clone, Debug)]
pub struct SymplecticDecomposition {
    s: Matrix4<f64>,
    nu1: f64,
    nu2: f64,
    case: WilliamsonCase,
}

impl SymplecticDecomposition {
    pub fn s(&self) -> &Matrix4<f64> {
        &self.s
    }

    pub fn nu1(&self) -> f64 {
        self.nu1
    }

    pub fn nu2(&self) -> f64 {
        self.nu2
    }

    pub fn case(&self) -> WilliamsonCase {
        self.case
    }

    /// Elements [x1..x8] of the checkerboard pattern above.
    pub fn xs(&self) -> [f64; 8] {
        let s = &self.s;
        [
            s[(0, 0)],
            s[(0, 2)],
            s[(1, 1)],
            s[(1, 3)],
            s[(2, 0)],
            s[(2, 2)],
            s[(3, 1)],
            s[(3, 3)],
        ]
    }

    /// Closed-form symplectic inverse S^{-1} = Omega S^T Omega^T.
    pub fn s_inverse(&self) -> Matrix4<f64> {
        let om = omega2();
        om * self.s.transpose() * om.transpose()
    }

    /// The four sign variants [(+-1) (+) (+-1)] S that solve the same
    /// diagonalization problem; index 0 is `self`.
    pub fn sign_variants(&self) -> [SymplecticDecomposition; 4] {
        let flip = |top: f64, bottom: f64| {
            let mut s = self.s;
            for c in 0..4 {
                s[(0, c)] *= top;
                s[(1, c)] *= top;
                s[(2, c)] *= bottom;
                s[(3, c)] *= bottom;
            }
            SymplecticDecomposition { s, ..*self }
        };
        [
            flip(1.0, 1.0),
            flip(1.0, -1.0),
            flip(-1.0, 1.0),
            flip(-1.0, -1.0),
        ]
    }
}

/// Covariance matrix of a pure (2+R)-mode extension of a two-mode state.
///
/// Blocks are laid out as
///
/// ```text
///     [ gamma_ab   gamma_abe ]
///     [ gamma_abe^T  gamma_e ]
/// ```
///
/// with `gamma_abe` of shape 4 x 2R and `gamma_e` of shape 2R x 2R, where R
/// is the symplectic rank (number of symplectic eigenvalues > 1).
#[derive(Clone, Debug)]
pub struct PurificationCM {
    rank: usize,
    gamma_ab: Matrix4<f64>,
    gamma_abe: DMatrix<f64>,
    gamma_e: DMatrix<f64>,
}

impl PurificationCM {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gamma_ab(&self) -> &Matrix4<f64> {
        &self.gamma_ab
    }

    pub fn gamma_abe(&self) -> &DMatrix<f64> {
        &self.gamma_abe
    }

    pub fn gamma_e(&self) -> &DMatrix<f64> {
        &self.gamma_e
    }

    /// Assembles the full (4+2R) x (4+2R) covariance matrix.
    pub fn assemble(&self) -> DMatrix<f64> {
        let n = 4 + 2 * self.rank;
        let mut m = DMatrix::zeros(n, n);
        for r in 0..4 {
            for c in 0..4 {
                m[(r, c)] = self.gamma_ab[(r, c)];
            }
        }
        for r in 0..4 {
            for c in 0..2 * self.rank {
                m[(r, 4 + c)] = self.gamma_abe[(r, c)];
                m[(4 + c, r)] = self.gamma_abe[(r, c)];
            }
        }
        for r in 0..2 * self.rank {
            for c in 0..2 * self.rank {
                m[(4 + r, 4 + c)] = self.gamma_e[(r, c)];
            }
        }
        m
    }
}

impl StdTwoModeState {
    /// Restricted standard form: a, b >= 1 and kx >= kp > 0.
    pub fn new(a: f64, b: f64, kx: f64, kp: f64) -> Result<Self> {
        let s = Self::new_boundary(a, b, kx, kp)?;
        if kp <= 0.0 {
            return Err(Error::InvalidState(format!(
                "kp = {kp} must be strictly positive in the restricted standard form"
            )));
        }
        Ok(s)
    }

    /// Standard form including the separability boundary kp = 0 (and the
    /// product-state case kx = kp = 0). Such states are flagged non-standard
    /// by [`Self::is_standard`] and always classify as separable.
    pub fn new_boundary(a: f64, b: f64, kx: f64, kp: f64) -> Result<Self> {
        let all_finite = a.is_finite() && b.is_finite() && kx.is_finite() && kp.is_finite();
        if !all_finite {
            return Err(Error::InvalidState("parameters must be finite".into()));
        }
        if a < 1.0 || b < 1.0 {
            return Err(Error::InvalidState(format!(
                "local variances must satisfy a >= 1, b >= 1 (got a = {a}, b = {b})"
            )));
        }
        if kp < 0.0 || kx < kp {
            return Err(Error::InvalidState(format!(
                "correlations must satisfy kx >= kp >= 0 (got kx = {kx}, kp = {kp})"
            )));
        }
        Ok(Self { a, b, kx, kp })
    }

    /// Reads a state from JSON; each field accepts a number or an expression
    /// string such as `"2*sqrt(2)"`.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let field = |name: &str| -> Result<f64> {
            match v.get(name) {
                Some(serde_json::Value::Number(n)) => n
                    .as_f64()
                    .ok_or_else(|| Error::Parse(format!("field `{name}` is not a float"))),
                Some(serde_json::Value::String(s)) => expr::eval(s),
                Some(_) => Err(Error::Parse(format!(
                    "field `{name}` must be a number or an expression string"
                ))),
                None => Err(Error::Parse(format!("missing field `{name}`"))),
            }
        };
        Self::new_boundary(field("a")?, field("b")?, field("kx")?, field("kp")?)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn kx(&self) -> f64 {
        self.kx
    }

    pub fn kp(&self) -> f64 {
        self.kp
    }

    /// True when kx >= kp > 0 (the restricted standard form).
    pub fn is_standard(&self) -> bool {
        self.kp > 0.0
    }

    /// The 4x4 covariance matrix.
    pub fn cov_matrix(&self) -> Matrix4<f64> {
        let (a, b, kx, kp) = (self.a, self.b, self.kx, self.kp);
        Matrix4::new(
            a, 0.0, kx, 0.0, //
            0.0, a, 0.0, -kp, //
            kx, 0.0, b, 0.0, //
            0.0, -kp, 0.0, b,
        )
    }

    /// det gamma = (ab - kx^2)(ab - kp^2).
    pub fn det_gamma(&self) -> f64 {
        let ab = self.a * self.b;
        (ab - self.kx * self.kx) * (ab - self.kp * self.kp)
    }

    /// Physicality test: both uncertainty inequalities hold within `PHYS_TOL`
    /// (relative); saturated boundaries count as physical.
    pub fn is_physical(&self) -> bool {
        let (a, b, kx, kp) = (self.a, self.b, self.kx, self.kp);
        let ab = a * b;
        let lhs = (ab - kx * kx) * (ab - kp * kp) + 1.0;
        let rhs = a * a + b * b - 2.0 * kx * kp;
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        lhs - rhs >= -PHYS_TOL * scale && ab - kx * kx - 1.0 >= -PHYS_TOL * ab.max(1.0)
    }

    /// Entanglement test. States with kp = 0 are separable; otherwise the
    /// state is entangled iff the PPT inequality is strictly violated.
    pub fn is_entangled(&self) -> Result<bool> {
        if !self.is_physical() {
            return Err(Error::NonPhysical);
        }
        if self.kp <= 0.0 || self.kx <= 0.0 {
            return Ok(false);
        }
        let (a, b, kx, kp) = (self.a, self.b, self.kx, self.kp);
        let ab = a * b;
        let lhs = (ab - kx * kx) * (ab - kp * kp) + 1.0;
        let rhs = a * a + b * b + 2.0 * kx * kp;
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        Ok(rhs - lhs > PHYS_TOL * scale)
    }

    /// Symplectic invariants entering the spectrum and the diagonalization.
    pub fn invariants(&self) -> SymplecticInvariants {
        let (a, b, kx, kp) = (self.a, self.b, self.kx, self.kp);
        let delta = a * a + b * b - 2.0 * kx * kp;
        let m = a * kx - b * kp;
        let m_tilde = b * kx - a * kp;
        let d = (a * a - b * b).powi(2) + 4.0 * m * m_tilde;
        let sq = d.max(0.0).sqrt();
        SymplecticInvariants {
            delta,
            d,
            m,
            m_tilde,
            l1: (b * b - a * a - sq) / 2.0,
            l2: (b * b - a * a + sq) / 2.0,
        }
    }

    /// Symplectic eigenvalues nu1 >= nu2 (>= 1 for physical states).
    ///
    /// nu1 = sqrt((Delta + sqrt(D))/2); nu2 is computed through the product
    /// form nu1 nu2 = sqrt(det gamma) to avoid cancellation near nu2 = 1.
    pub fn symplectic_eigenvalues(&self) -> Result<(f64, f64)> {
        if !self.is_physical() {
            return Err(Error::NonPhysical);
        }
        let inv = self.invariants();
        let sq = inv.d.max(0.0).sqrt();
        let nu1_sq = (inv.delta + sq) / 2.0;
        let nu1 = nu1_sq.max(0.0).sqrt();
        let nu2 = (2.0 * self.det_gamma().max(0.0) / (inv.delta + sq)).sqrt();
        Ok((nu1, nu2))
    }

    /// True when the smaller symplectic eigenvalue equals 1 within `GLEMS_TOL`.
    pub fn is_glems(&self) -> bool {
        match self.symplectic_eigenvalues() {
            Ok((_, nu2)) => (nu2 - 1.0).abs() <= GLEMS_TOL,
            Err(_) => false,
        }
    }

    /// Classifies the state; `tol` is the relative tolerance for all the
    /// defining equalities (nu2 = 1, a = b, kx = kp, b*kx = a*kp, ...).
    ///
    /// Precedence at degenerate boundaries: Pure > SymGlems >
    /// AsymSqueezedThermalGlems > Glems4/5/6/7.
    pub fn classify(&self, tol: f64) -> Result<StateClass> {
        if !self.is_physical() {
            return Err(Error::NonPhysical);
        }
        let (nu1, nu2) = self.symplectic_eigenvalues()?;
        let (a, b, kx, kp) = (self.a, self.b, self.kx, self.kp);
        let sym = (a - b).abs() <= tol * a.max(b);
        let sq_thermal = (kx - kp).abs() <= tol * kx.max(1.0);
        if (nu2 - 1.0).abs() <= tol {
            if (nu1 - 1.0).abs() <= tol {
                return Ok(StateClass::Pure);
            }
            if sym {
                return Ok(StateClass::SymGlems);
            }
            if sq_thermal {
                return Ok(StateClass::AsymSqueezedThermalGlems);
            }
            let disc_tol = tol * a.max(b) * kx.max(1.0);
            if a > b {
                if (b * kx - a * kp).abs() <= disc_tol {
                    Ok(StateClass::Glems4)
                } else {
                    Ok(StateClass::Glems6)
                }
            } else if (a * kx - b * kp).abs() <= disc_tol {
                Ok(StateClass::Glems5)
            } else {
                Ok(StateClass::Glems7)
            }
        } else if sym && sq_thermal {
            Ok(StateClass::SymSqueezedThermal)
        } else {
            Ok(StateClass::GenericNonGlems)
        }
    }

    /// Williamson diagonalization with the case dispatch of the standard-form
    /// construction. Boundary precedence: a = b within tolerance goes to the
    /// symmetric case even when the 2a/3a condition also holds.
    pub fn williamson(&self) -> Result<SymplecticDecomposition> {
        if !self.is_physical() {
            return Err(Error::NonPhysical);
        }
        if !self.is_standard() {
            return Err(Error::NonStandard);
        }
        let (a, b, kx, kp) = (self.a, self.b, self.kx, self.kp);
        let disc_tol = GLEMS_TOL * a.max(b) * kx.max(1.0);

        if (a - b).abs() <= GLEMS_TOL * a.max(b) {
            return self.williamson_sym();
        }
        if a > b {
            if (b * kx - a * kp).abs() <= disc_tol {
                self.williamson_2a()
            } else {
                self.williamson_2b()
            }
        } else if (a * kx - b * kp).abs() <= disc_tol {
            self.williamson_3a()
        } else {
            self.williamson_3b()
        }
    }

    fn williamson_sym(&self) -> Result<SymplecticDecomposition> {
        let (a, kx, kp) = (self.a, self.kx, self.kp);
        let nu1 = ((a + kx) * (a - kp)).sqrt();
        let nu2 = ((a - kx) * (a + kp)).max(0.0).sqrt();
        if a - kx <= 0.0 || a - kp <= 0.0 {
            return Err(Error::Numeric("degenerate symmetric state".into()));
        }
        let za = ((a + kx) / (a - kp)).powf(0.25);
        let zb = ((a + kp) / (a - kx)).powf(0.25);
        let r = 1.0 / 2f64.sqrt();
        let s = Matrix4::new(
            r / za,
            0.0,
            r / za,
            0.0,
            0.0,
            r * za,
            0.0,
            r * za,
            -r * zb,
            0.0,
            r * zb,
            0.0,
            0.0,
            -r / zb,
            0.0,
            r / zb,
        );
        Ok(SymplecticDecomposition {
            s,
            nu1,
            nu2,
            case: WilliamsonCase::Sym,
        })
    }

    fn williamson_2a(&self) -> Result<SymplecticDecomposition> {
        let (a, b, kx, kp) = (self.a, self.b, self.kx, self.kp);
        let nu1 = (a * a - kx * kp).sqrt();
        let nu2 = (b * b - kx * kp).max(0.0).sqrt();
        let s = Matrix4::new(
            (nu1 / a).sqrt(),
            0.0,
            0.0,
            0.0,
            0.0,
            (a / nu1).sqrt(),
            0.0,
            kx / (a * nu1).sqrt(),
            -kp / (b * nu2).sqrt(),
            0.0,
            (b / nu2).sqrt(),
            0.0,
            0.0,
            0.0,
            0.0,
            (nu2 / b).sqrt(),
        );
        Ok(SymplecticDecomposition {
            s,
            nu1,
            nu2,
            case: WilliamsonCase::Case2a,
        })
    }

    fn williamson_2b(&self) -> Result<SymplecticDecomposition> {
        let (a, b, kp) = (self.a, self.b, self.kp);
        let (nu1, nu2) = self.symplectic_eigenvalues()?;
        let SymplecticInvariants { m, l1, l2, .. } = self.invariants();
        let den1 = a * l1 * l1 + 2.0 * kp * l1 * m + b * m * m;
        let den2 = a * l2 * l2 + 2.0 * kp * l2 * m + b * m * m;
        if den1 <= 0.0 || den2 <= 0.0 || m == 0.0 {
            return Err(Error::Numeric("degenerate case-2b normalization".into()));
        }
        // Canonical sign choice: the radicals for x4 and x8 taken positive.
        let x4 = m * (nu1 / den1).sqrt();
        let x8 = m * (nu2 / den2).sqrt();
        let x3 = -(l1 / m) * x4;
        let x7 = -(l2 / m) * x8;
        let x1 = -(a * l1 + kp * m) / (nu1 * m) * x4;
        let x2 = (kp * l1 + b * m) / (nu1 * m) * x4;
        let x5 = -(a * l2 + kp * m) / (nu2 * m) * x8;
        let x6 = (kp * l2 + b * m) / (nu2 * m) * x8;
        Ok(SymplecticDecomposition {
            s: checkerboard([x1, x2, x3, x4, x5, x6, x7, x8]),
            nu1,
            nu2,
            case: WilliamsonCase::Case2b,
        })
    }

    fn williamson_3a(&self) -> Result<SymplecticDecomposition> {
        let (a, b, kx, kp) = (self.a, self.b, self.kx, self.kp);
        let nu1 = (b * b - kx * kp).sqrt();
        let nu2 = (a * a - kx * kp).max(0.0).sqrt();
        let s = Matrix4::new(
            0.0,
            0.0,
            (nu1 / b).sqrt(),
            0.0,
            0.0,
            kx / (b * nu1).sqrt(),
            0.0,
            (b / nu1).sqrt(),
            (a / nu2).sqrt(),
            0.0,
            -kp / (a * nu2).sqrt(),
            0.0,
            0.0,
            (nu2 / a).sqrt(),
            0.0,
            0.0,
        );
        Ok(SymplecticDecomposition {
            s,
            nu1,
            nu2,
            case: WilliamsonCase::Case3a,
        })
    }

    fn williamson_3b(&self) -> Result<SymplecticDecomposition> {
        let (a, b, kp) = (self.a, self.b, self.kp);
        let (nu1, nu2) = self.symplectic_eigenvalues()?;
        let SymplecticInvariants {
            m_tilde, l1, l2, ..
        } = self.invariants();
        let den1 = b * l2 * l2 - 2.0 * kp * l2 * m_tilde + a * m_tilde * m_tilde;
        let den2 = b * l1 * l1 - 2.0 * kp * l1 * m_tilde + a * m_tilde * m_tilde;
        if den1 <= 0.0 || den2 <= 0.0 || m_tilde == 0.0 {
            return Err(Error::Numeric("degenerate case-3b normalization".into()));
        }
        let y4 = m_tilde * (nu1 / den1).sqrt();
        let y8 = m_tilde * (nu2 / den2).sqrt();
        let y3 = (l2 / m_tilde) * y4;
        let y7 = (l1 / m_tilde) * y8;
        let y1 = (b * l2 - kp * m_tilde) / (nu1 * m_tilde) * y4;
        let y2 = (a * m_tilde - kp * l2) / (nu1 * m_tilde) * y4;
        let y5 = (b * l1 - kp * m_tilde) / (nu2 * m_tilde) * y8;
        let y6 = (a * m_tilde - kp * l1) / (nu2 * m_tilde) * y8;
        // Right-multiplying the solution for the mode-swapped CM by the swap
        // matrix permutes the checkerboard slots.
        Ok(SymplecticDecomposition {
            s: checkerboard([y2, y1, y4, y3, y6, y5, y8, y7]),
            nu1,
            nu2,
            case: WilliamsonCase::Case3b,
        })
    }

    /// Pure (2+R)-mode extension built from the Williamson decomposition:
    /// each normal mode with nu > 1 is purified by one half of a two-mode
    /// squeezed vacuum, then mapped back with S^{-1}.
    pub fn purification(&self, dec: &SymplecticDecomposition) -> Result<PurificationCM> {
        if !self.is_physical() {
            return Err(Error::NonPhysical);
        }
        let nus = [dec.nu1, dec.nu2];
        let rank = nus.iter().filter(|&&nu| nu > 1.0 + GLEMS_TOL).count();
        let mut gamma_abe0 = DMatrix::zeros(4, 2 * rank);
        let mut gamma_e = DMatrix::zeros(2 * rank, 2 * rank);
        for (i, &nu) in nus.iter().take(rank).enumerate() {
            let c = (nu * nu - 1.0).sqrt();
            gamma_abe0[(2 * i, 2 * i)] = c;
            gamma_abe0[(2 * i + 1, 2 * i + 1)] = -c;
            gamma_e[(2 * i, 2 * i)] = nu;
            gamma_e[(2 * i + 1, 2 * i + 1)] = nu;
        }
        let s_inv = dec.s_inverse();
        let mut gamma_abe = DMatrix::zeros(4, 2 * rank);
        for r in 0..4 {
            for c in 0..2 * rank {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += s_inv[(r, k)] * gamma_abe0[(k, c)];
                }
                gamma_abe[(r, c)] = acc;
            }
        }
        Ok(PurificationCM {
            rank,
            gamma_ab: self.cov_matrix(),
            gamma_abe,
            gamma_e,
        })
    }
}

fn checkerboard(x: [f64; 8]) -> Matrix4<f64> {
    Matrix4::new(
        x[0], 0.0, x[1], 0.0, //
        0.0, x[2], 0.0, x[3], //
        x[4], 0.0, x[5], 0.0, //
        0.0, x[6], 0.0, x[7],
    )
}

/// Williamson normal form diag(nu1, nu1, nu2, nu2).
pub fn normal_form(nu1: f64, nu2: f64) -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(nu1, nu1, nu2, nu2))
}

/// Max-norm residuals of a decomposition: (|S Omega S^T - Omega|, |S gamma S^T - N|).
pub fn williamson_residuals(s: &StdTwoModeState, dec: &SymplecticDecomposition) -> (f64, f64) {
    let om = omega2();
    let r1 = dec.s * om * dec.s.transpose() - om;
    let r2 = dec.s * s.cov_matrix() * dec.s.transpose() - normal_form(dec.nu1, dec.nu2);
    (r1.abs().max(), r2.abs().max())
}
