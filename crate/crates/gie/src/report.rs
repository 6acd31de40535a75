//! Full single-state analysis and its JSON form.

use serde::Serialize;
use serde_json::{json, Value};

use crate::engine::{self, GieReport};
use crate::gaussian::{StateClass, StdTwoModeState, SymplecticInvariants};
use crate::measures;
use crate::oracle::GridSpec;
use crate::Result;

/// Everything the analyze command reports for one state.
#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub schema: u32,
    pub a: f64,
    pub b: f64,
    pub kx: f64,
    pub kp: f64,
    pub physical: bool,
    pub standard: bool,
    pub entangled: bool,
    pub class: StateClass,
    pub nu1: f64,
    pub nu2: f64,
    pub invariants: SymplecticInvariants,
    pub g_tilde_min: f64,
    pub homodyne_cond_ok: bool,
    pub gie: GieReport,
    pub gr2eof: Option<f64>,
    pub log_negativity: f64,
}

/// Analyzes a physical state; signals `NonPhysical` otherwise.
pub fn analyze(s: &StdTwoModeState, grid: &GridSpec) -> Result<Analysis> {
    let (nu1, nu2) = s.symplectic_eigenvalues()?;
    let gie = engine::gie_with_grid(s, grid)?;
    let gr2eof = if s.is_glems() {
        measures::gr2eof_glems(s).ok()
    } else if (s.a() - s.b()).abs() <= 1e-9 * s.a().max(s.b()) {
        measures::gr2eof_symmetric(s).ok()
    } else {
        None
    };
    Ok(Analysis {
        schema: 1,
        a: s.a(),
        b: s.b(),
        kx: s.kx(),
        kp: s.kp(),
        physical: true,
        standard: s.is_standard(),
        entangled: s.is_entangled()?,
        class: s.classify(1e-9)?,
        nu1,
        nu2,
        invariants: s.invariants(),
        g_tilde_min: gie.g_tilde_min,
        homodyne_cond_ok: gie.homodyne_cond_ok,
        gie,
        gr2eof,
        log_negativity: measures::log_negativity(s)?,
    })
}

/// Serializes with every float rounded to 15 significant digits.
pub fn to_json(analysis: &Analysis) -> Result<Value> {
    let raw = serde_json::to_value(analysis)
        .map_err(|e| crate::Error::Numeric(format!("serialization failure: {e}")))?;
    Ok(round_floats(raw))
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => {
                let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
                json!(rounded)
            }
            _ => Value::Number(n),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_rho6() {
        let s97 = 97f64.sqrt();
        let s = StdTwoModeState::new(
            2.0 * 2f64.sqrt(),
            2f64.sqrt(),
            (s97 + 1.0) / 8.0,
            (s97 - 1.0) / 8.0,
        )
        .unwrap();
        let a = analyze(&s, &GridSpec::default()).unwrap();
        assert!(a.entangled && a.physical);
        assert_eq!(a.class, StateClass::Glems6);
        let g = a.gie.value;
        let r = a.gr2eof.unwrap();
        assert!((g - (6f64 / 5.0).ln()).abs() < 1e-9);
        assert!((g - r).abs() < 1e-8);
        assert!((g - 0.182322).abs() < 1e-6);

        let v = to_json(&a).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(v["gie"]["value"].is_f64());
    }

    #[test]
    fn analyze_vacuum_like() {
        let s = StdTwoModeState::new_boundary(1.0, 1.0, 0.0, 0.0).unwrap();
        let a = analyze(&s, &GridSpec::default()).unwrap();
        assert!(!a.entangled);
        assert_eq!(a.gie.value, 0.0);
        assert_eq!(a.log_negativity, 0.0);
        assert_eq!(a.gr2eof, Some(0.0));
    }

    #[test]
    fn rejects_non_physical() {
        let s = StdTwoModeState::new(1.0, 1.0, 0.5, 0.5).unwrap();
        assert!(analyze(&s, &GridSpec::default()).is_err());
    }
}
