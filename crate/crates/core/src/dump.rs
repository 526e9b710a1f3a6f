//! File renderings of curves, profiles and solver results.
//!
//! Curve CSV: header `t,x1,...,xN` with `t` the cumulative normalized
//! Euclidean arc length. Profile CSV: `x,u1,...,uN,W,ekin` with
//! `ekin = 1/2 |U'|^2`. The JSON documents carry no timestamps, so identical
//! inputs render byte-identical output.

use serde_json::{json, Value};

use crate::curve::{weighted_length, DiscreteCurve};
use crate::geodesic::GeodesicResult;
use crate::heteroclinic::HeteroclinicProfile;
use crate::metric::{DistanceMatrix, ObstructionReport};
use crate::potential::Potential;
use crate::Result;

/// Formats a float with 12 significant digits (the CLI-wide convention).
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let formatted = format!("{x:.11e}");
    // round-trip so "1.23000000000e0" renders as 1.23
    let rounded: f64 = formatted.parse().unwrap_or(x);
    format!("{rounded}")
}

/// Rounds every number in a JSON tree to 12 significant digits.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if x != 0.0 && x.is_finite() && n.as_i64().is_none() && n.as_u64().is_none() {
                    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *value = Value::Number(num);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn curve_to_csv(c: &DiscreteCurve) -> String {
    let dim = c.dimension();
    let mut out = String::from("t");
    for i in 1..=dim {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    let cum = c.cumulative_lengths();
    let total = *cum.last().unwrap();
    for (i, node) in c.nodes().enumerate() {
        let t = if total > 0.0 { cum[i] / total } else { 0.0 };
        out.push_str(&fmt_sig(t));
        for &x in node {
            out.push(',');
            out.push_str(&fmt_sig(x));
        }
        out.push('\n');
    }
    out
}

pub fn curve_to_json(c: &DiscreteCurve, pot: &Potential) -> Result<Value> {
    let cum = c.cumulative_lengths();
    let total = *cum.last().unwrap();
    let t: Vec<f64> = cum
        .iter()
        .map(|&l| if total > 0.0 { l / total } else { 0.0 })
        .collect();
    let nodes: Vec<Vec<f64>> = c.nodes().map(|n| n.to_vec()).collect();
    let w: Result<Vec<f64>> = c.nodes().map(|n| pot.eval_w(n)).collect();
    Ok(json!({
        "dimension": c.dimension(),
        "energy": weighted_length(c, pot)?,
        "t": t,
        "nodes": nodes,
        "w": w?,
    }))
}

pub fn profile_to_csv(prof: &HeteroclinicProfile, pot: &Potential) -> Result<String> {
    let dim = prof.dim;
    let mut out = String::from("x");
    for i in 1..=dim {
        out.push_str(&format!(",u{i}"));
    }
    out.push_str(",W,ekin\n");
    let m = prof.sample_count();
    for k in 0..m {
        let (lo, hi) = if k == 0 {
            (0, 1)
        } else if k == m - 1 {
            (m - 2, m - 1)
        } else {
            (k - 1, k + 1)
        };
        let dx = prof.xs[hi] - prof.xs[lo];
        let mut du2 = 0.0;
        for c in 0..dim {
            let d = (prof.u(hi)[c] - prof.u(lo)[c]) / dx;
            du2 += d * d;
        }
        let w = pot.eval_w(prof.u(k))?;
        out.push_str(&fmt_sig(prof.xs[k]));
        for &u in prof.u(k) {
            out.push(',');
            out.push_str(&fmt_sig(u));
        }
        out.push(',');
        out.push_str(&fmt_sig(w));
        out.push(',');
        out.push_str(&fmt_sig(0.5 * du2));
        out.push('\n');
    }
    Ok(out)
}

/// JSON summary of a solve; `curve_ref` names the side file holding the
/// curve CSV (the curve itself is not embedded).
pub fn geodesic_to_json(gr: &GeodesicResult, curve_ref: &str) -> Value {
    json!({
        "energy": gr.energy,
        "converged": gr.converged,
        "iterations": gr.iterations,
        "el_residual": gr.el_residual,
        "restart_index": gr.restart_index,
        "restart_energies": gr.restart_energies,
        "restart_converged": gr.restart_converged,
        "well_proximity": gr.well_proximity,
        "curve": curve_ref,
    })
}

pub fn profile_summary_json(prof: &HeteroclinicProfile, csv_ref: &str) -> Value {
    json!({
        "wells": {
            "from": prof.source_wells.0,
            "to": prof.source_wells.1,
            "indices": prof.source_well_indices,
        },
        "action": prof.action,
        "truncation": { "left": prof.truncation.0, "right": prof.truncation.1 },
        "cutoff": prof.cutoff,
        "samples": prof.sample_count(),
        "residuals": prof.residuals,
        "tail_action_bound": prof.tail_action_bound,
        "csv": csv_ref,
    })
}

pub fn matrix_to_json(dm: &DistanceMatrix, report: &ObstructionReport) -> Value {
    let pair_info: Vec<Value> = dm
        .pairs
        .iter()
        .map(|p| {
            json!({
                "j": p.j,
                "k": p.k,
                "energy": p.result.as_ref().map(|r| r.energy),
                "converged": p.result.as_ref().map(|r| r.converged),
                "error": p.error,
            })
        })
        .collect();
    json!({
        "size": dm.size(),
        "entries": dm.entries,
        "pairs": pair_info,
        "resolved_pairs": dm.resolved_pairs,
        "classification": report.pairs,
        "triples": report.triples,
        "tol": report.tol,
    })
}
