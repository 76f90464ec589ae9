//! Browser bindings: worst-case risk curves, Pareto frontiers, and the stable
//! outcome of a small instance. Every export returns a JSON string.
//!
//! The `*_json` functions hold the logic and run natively in tests; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use coord_risk::io::{parse_attack_spec, parse_generator, parse_rational_list};
use coord_risk::randomized::{pareto_frontier, staircase_gains, Gains};
use coord_risk::rational::{parse, to_f64, to_fraction, zero};
use coord_risk::risk::{gain_grid, risk, tradeoff_broad_to_focused, worst_case_broad, worst_case_focused};
use coord_risk::sss::exact_sss;
use coord_risk::Rational;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest grid the page may request, to keep the tab responsive.
const MAX_GRID: usize = 2000;
/// Largest instance the page may solve.
const MAX_NODES: usize = 16;

type Result<T> = std::result::Result<T, String>;

fn exact(q: &Rational) -> Value {
    json!({ "exact": to_fraction(q), "value": to_f64(q) })
}

fn num(text: &str, what: &str) -> Result<Rational> {
    parse(text).map_err(|e| format!("{what}: {e}"))
}

fn positive_system_gain(text: &str) -> Result<Rational> {
    let s = num(text, "alpha_sys")?;
    if s <= zero() {
        return Err("alpha_sys must be positive".into());
    }
    Ok(s)
}

fn check_grid(grid: usize) -> Result<()> {
    if grid == 0 || grid > MAX_GRID {
        return Err(format!("grid must lie in 1..={MAX_GRID}"));
    }
    Ok(())
}

/// Both worst-case curves on the gain grid `(from, to]`.
pub fn risk_curves_json(alpha_sys: &str, from: &str, to: &str, grid: usize) -> Result<String> {
    let s = positive_system_gain(alpha_sys)?;
    let (lo, hi) = (num(from, "from")?, num(to, "to")?);
    check_grid(grid)?;
    if lo < zero() || hi <= lo {
        return Err("need 0 <= from < to".into());
    }
    let mut points = Vec::with_capacity(grid);
    for a in gain_grid(&lo, &hi, grid) {
        let b = worst_case_broad(&a, &s).map_err(|e| e.to_string())?;
        let f = worst_case_focused(&a, &s).map_err(|e| e.to_string())?;
        points.push(json!({ "alpha": exact(&a), "broad": exact(b.value()), "focused": exact(f.value()) }));
    }
    Ok(json!({ "alpha_sys": exact(&s), "points": points }).to_string())
}

/// `Par(α)` for comma-separated gains or `staircase:M:EPS`, with the
/// deterministic lower bound on the same broad budgets.
pub fn frontier_json(gains: &str, alpha_sys: &str, grid: usize) -> Result<String> {
    let s = positive_system_gain(alpha_sys)?;
    check_grid(grid)?;
    let gains = match gains.trim().strip_prefix("staircase:") {
        Some(rest) => {
            let (m, eps) = rest.split_once(':').ok_or("staircase preset is staircase:M:EPS")?;
            let m: usize = m.trim().parse().map_err(|_| format!("bad staircase length {m:?}"))?;
            if m > 50 {
                return Err("staircase length is limited to 50 here".into());
            }
            staircase_gains(m, &num(eps, "eps")?, &s)
        }
        None => parse_rational_list(gains).and_then(|v| Gains::new(v, s.clone())),
    }
    .map_err(|e| e.to_string())?;
    let front = pareto_frontier(&gains, grid.max(2)).map_err(|e| e.to_string())?;
    let mut points = Vec::with_capacity(front.len());
    for p in &front {
        let bound = tradeoff_broad_to_focused(p.expected_broad.value(), &s).map_err(|e| e.to_string())?;
        points.push(json!({
            "gamma_b": exact(p.expected_broad.value()),
            "v_f": exact(p.expected_focused.value()),
            "deterministic": exact(bound.value.value()),
            "strict": bound.strict,
            "probs": p.distribution.iter().map(to_fraction).collect::<Vec<_>>(),
        }));
    }
    let values: Vec<String> = gains.values().iter().map(to_fraction).collect();
    Ok(json!({ "gains": values, "points": points }).to_string())
}

/// Stable set, welfare-minimizing outcome and risk of an instance given by a
/// generator spec (`line:3`) and an attack shorthand (`broad:1,2`, `focused:3/1,2`).
pub fn solve_instance_json(graph: &str, attack: &str, alpha: &str, alpha_sys: &str) -> Result<String> {
    let s = positive_system_gain(alpha_sys)?;
    let a = num(alpha, "alpha")?;
    let g = parse_generator(graph.trim()).map_err(|e| e.to_string())?;
    if g.node_count() > MAX_NODES {
        return Err(format!("the demo solves at most {MAX_NODES} nodes"));
    }
    let attack = parse_attack_spec(attack, g.node_count()).map_err(|e| e.to_string())?;
    attack.validate(&g).map_err(|e| e.to_string())?;
    let sss = exact_sss(&g, &a, &attack, &s).map_err(|e| e.to_string())?;
    let r = risk(&g, &attack, &a, &s).map_err(|e| e.to_string())?;
    let attack_json = serde_json::to_value(&attack).map_err(|e| e.to_string())?;
    Ok(json!({
        "nodes": g.node_count(),
        "edges": g.edges(),
        "attack": attack_json,
        "welfare_min": sss.welfare_min.to_string(),
        "stable_set": sss.stable_set.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "potential": exact(&sss.potential_value),
        "risk": exact(r.value()),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn risk_curves(alpha_sys: &str, from: &str, to: &str, grid: usize) -> std::result::Result<String, JsError> {
    risk_curves_json(alpha_sys, from, to, grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn frontier(gains: &str, alpha_sys: &str, grid: usize) -> std::result::Result<String, JsError> {
    frontier_json(gains, alpha_sys, grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve_instance(graph: &str, attack: &str, alpha: &str, alpha_sys: &str) -> std::result::Result<String, JsError> {
    solve_instance_json(graph, attack, alpha, alpha_sys).map_err(|e| JsError::new(&e))
}
