//! Seeded sampling of states per class and the batch conjecture scan.
//!
//! GLEMS classes stay exactly on the nu2 = 1 manifold by construction: kx is
//! drawn (or fixed by the class constraint) and kp is solved from the
//! saturated uncertainty relation. Class 2 (symmetric squeezed thermal) is
//! the one non-GLEMS class; it is sampled on the entangled strip a - 1 < k
//! < sqrt(a^2 - 1) and kept when the symmetric homodyne condition holds.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

use crate::engine::{self, GieMethod};
use crate::gaussian::{StateClass, StdTwoModeState};
use crate::measures;
use crate::oracle::GridSpec;
use crate::{Error, Result};

/// One row of the conjecture scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRecord {
    pub a: f64,
    pub b: f64,
    pub kx: f64,
    pub kp: f64,
    pub class: StateClass,
    pub homodyne_cond_ok: bool,
    pub gie: f64,
    pub gr2eof: f64,
    pub log_neg: f64,
    pub abs_diff: f64,
    pub method: &'static str,
}

fn method_label(m: &GieMethod) -> &'static str {
    match m {
        GieMethod::ClosedForm(_) => "closed_form",
        GieMethod::GenericGlemsProcedure => "generic_glems",
        GieMethod::OracleBracket { .. } => "oracle_bracket",
    }
}

/// Solves kp from the GLEMS condition nu2 = 1 given (a, b, kx): the root of
/// P kp^2 - 2 kx kp + (a^2 + b^2 - 1 - a b P) = 0 with P = a b - kx^2 that
/// lies in (0, kx], if any.
pub fn glems_kp(a: f64, b: f64, kx: f64) -> Option<f64> {
    let p = a * b - kx * kx;
    if p <= 0.0 {
        return None;
    }
    let c = a * a + b * b - 1.0 - a * b * p;
    let disc = kx * kx - p * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    for kp in [(kx - sq) / p, (kx + sq) / p] {
        if kp > 0.0 && kp <= kx {
            let s = StdTwoModeState::new(a, b, kx, kp).ok()?;
            if s.is_physical() && s.is_glems() {
                return Some(kp);
            }
        }
    }
    None
}

/// Draws one state of the requested class (1..=7). States are physical,
/// entangled, and satisfy the homodyne-optimality condition.
pub fn sample_class(class: u8, rng: &mut ChaCha8Rng) -> Result<StdTwoModeState> {
    for _ in 0..10_000 {
        let cand = try_sample(class, rng);
        if let Some(s) = cand {
            let ok = s.is_physical()
                && s.is_entangled().unwrap_or(false)
                && engine::g_tilde_min(&s).map(|g| g >= 0.0).unwrap_or(false);
            if ok {
                return Ok(s);
            }
        }
    }
    Err(Error::Numeric(format!(
        "could not sample a class-{class} state in 10000 attempts"
    )))
}

fn try_sample(class: u8, rng: &mut ChaCha8Rng) -> Option<StdTwoModeState> {
    match class {
        // Symmetric GLEMS: a = b, kp solved from (a - kx)(a + kp) = 1.
        1 => {
            let a = rng.random_range(1.02f64..5.0);
            let lo = (a * a - 1.0) / a;
            let hi = (a * a - 1.0).sqrt();
            let kx = rng.random_range(lo..hi);
            let kp = (1.0 - a * a + a * kx) / (a - kx);
            (kp > 0.0 && kp <= kx)
                .then(|| StdTwoModeState::new(a, a, kx, kp).ok())
                .flatten()
        }
        // Symmetric squeezed thermal, entangled: a - 1 < k < sqrt(a^2 - 1).
        2 => {
            let a = rng.random_range(1.02f64..3.0);
            let k = rng.random_range((a - 1.0)..(a * a - 1.0).sqrt());
            StdTwoModeState::new(a, a, k, k).ok()
        }
        // Asymmetric squeezed thermal GLEMS: k fixed by the saturation.
        3 => {
            let a = rng.random_range(1.05f64..5.0);
            let b = rng.random_range(1.05f64..5.0);
            if (a - b).abs() < 1e-6 {
                return None;
            }
            let k = if a >= b {
                ((a + 1.0) * (b - 1.0)).sqrt()
            } else {
                ((a - 1.0) * (b + 1.0)).sqrt()
            };
            StdTwoModeState::new(a, b, k, k).ok()
        }
        // a > b with b kx = a kp: kx^2 = a (b^2 - 1) / b.
        4 => {
            let b = rng.random_range(1.05f64..3.0);
            let a = rng.random_range((b + 1e-3)..5.0);
            let kx = (a * (b * b - 1.0) / b).sqrt();
            let kp = b * kx / a;
            StdTwoModeState::new(a, b, kx, kp).ok()
        }
        // Mirror image of class 4.
        5 => {
            let a = rng.random_range(1.05f64..3.0);
            let b = rng.random_range((a + 1e-3)..5.0);
            let kx = (b * (a * a - 1.0) / a).sqrt();
            let kp = a * kx / b;
            StdTwoModeState::new(a, b, kx, kp).ok()
        }
        // Generic GLEMS with a > b; reject near-class-4 draws.
        6 => {
            let b = rng.random_range(1.05f64..3.0);
            let a = rng.random_range((b + 0.05)..5.0);
            let kx = rng.random_range(0.2 * (a * b - 1.0).sqrt()..(a * b - 1.0).sqrt());
            let kp = glems_kp(a, b, kx)?;
            if (b * kx - a * kp).abs() <= 1e-6 * a.max(b) * kx {
                return None;
            }
            StdTwoModeState::new(a, b, kx, kp).ok()
        }
        // Generic GLEMS with a < b; reject near-class-5 draws.
        7 => {
            let a = rng.random_range(1.05f64..3.0);
            let b = rng.random_range((a + 0.05)..5.0);
            let kx = rng.random_range(0.2 * (a * b - 1.0).sqrt()..(a * b - 1.0).sqrt());
            let kp = glems_kp(a, b, kx)?;
            if (a * kx - b * kp).abs() <= 1e-6 * a.max(b) * kx {
                return None;
            }
            StdTwoModeState::new(a, b, kx, kp).ok()
        }
        _ => None,
    }
}

/// Runs the scan: `n` seeded states of `class`, evaluated in parallel with
/// index-ordered (deterministic) output.
pub fn scan(n: usize, seed: u64, class: u8, grid: &GridSpec) -> Result<Vec<ScanRecord>> {
    if !(1..=7).contains(&class) {
        return Err(Error::InvalidState(format!(
            "class must be in 1..=7, got {class}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<StdTwoModeState> = (0..n)
        .map(|_| sample_class(class, &mut rng))
        .collect::<Result<_>>()?;
    states
        .par_iter()
        .map(|s| {
            let report = engine::gie_with_grid(s, grid)?;
            let gr2eof = if s.is_glems() {
                measures::gr2eof_glems(s)?
            } else {
                measures::gr2eof_symmetric(s)?
            };
            Ok(ScanRecord {
                a: s.a(),
                b: s.b(),
                kx: s.kx(),
                kp: s.kp(),
                class: s.classify(1e-9)?,
                homodyne_cond_ok: report.homodyne_cond_ok,
                gie: report.value,
                gr2eof,
                log_neg: measures::log_negativity(s)?,
                abs_diff: (report.value - gr2eof).abs(),
                method: method_label(&report.method),
            })
        })
        .collect()
}

/// Fixed CSV schema; floats at 15 significant digits, "\n" line endings.
pub const CSV_HEADER: &str =
    "a,b,kx,kp,class,homodyne_cond_ok,gie,gr2eof,log_neg,abs_diff,method";

pub fn write_csv<W: Write>(records: &[ScanRecord], mut w: W) -> Result<()> {
    w.write_all(CSV_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    for r in records {
        writeln!(
            w,
            "{:.14e},{:.14e},{:.14e},{:.14e},{:?},{},{:.14e},{:.14e},{:.14e},{:.14e},{}",
            r.a,
            r.b,
            r.kx,
            r.kp,
            r.class,
            r.homodyne_cond_ok,
            r.gie,
            r.gr2eof,
            r.log_neg,
            r.abs_diff,
            r.method
        )?;
    }
    Ok(())
}
