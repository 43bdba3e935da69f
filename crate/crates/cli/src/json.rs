//! JSON views of library results. Big integers become numbers when they fit
//! in `u64` and decimal strings otherwise.

use std::fmt::Display;

use cosetcr_core::exactmath::Rational;
use cosetcr_core::graph::{DrFailure, EquitabilityViolation, IntegerQuotient};
use cosetcr_core::screen::{
    Annotation, AnnotationStatus, CandidateReport, DivisibilityWitness, FeasibilityReport, HammingCandidate,
    KrawtchoukFailure, PredictionFailure, Predicted, Rejection, SearchTarget, Side, Status,
};
use cosetcr_core::search::{SearchProblem, SearchStats, PRUNE_REASONS};
use cosetcr_core::{IntersectionArray, WeightDistribution};
use serde_json::{json, Map, Value};

pub fn big(v: &impl Display) -> Value {
    let s = v.to_string();
    match s.parse::<u64>() {
        Ok(x) => json!(x),
        Err(_) => Value::String(s),
    }
}

pub fn rational(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn array(a: &IntersectionArray) -> Value {
    json!({ "text": a.to_string(), "b": a.b(), "c": a.c() })
}

pub fn distribution(w: &WeightDistribution) -> Value {
    json!({
        "compact": w.compact(),
        "counts": w.counts().iter().map(big).collect::<Vec<_>>(),
    })
}

pub fn quotient(q: &IntegerQuotient) -> Value {
    json!(q.rows())
}

pub fn violation(v: &EquitabilityViolation) -> Value {
    json!({
        "vertex": v.vertex,
        "vertex_cell": v.vertex_cell,
        "target_cell": v.target_cell,
        "expected": v.expected,
        "found": v.found,
    })
}

pub fn dr_failure(f: &DrFailure) -> Value {
    match f {
        DrFailure::Empty => json!({ "reason": "empty" }),
        DrFailure::NotRegular { vertex } => json!({ "reason": "not_regular", "vertex": vertex }),
        DrFailure::Disconnected { base } => json!({ "reason": "disconnected", "base": base }),
        DrFailure::NotEquitable { base, violation: v } => {
            json!({ "reason": "not_equitable", "base": base, "violation": violation(v) })
        }
        DrFailure::Trivial => json!({ "reason": "trivial" }),
        DrFailure::Mismatch { base, expected, found } => json!({
            "reason": "mismatch",
            "base": base,
            "expected": expected.to_string(),
            "found": found.to_string(),
        }),
    }
}

fn witness(w: &DivisibilityWitness) -> Value {
    let side = match w.side {
        Side::Beta => "beta",
        Side::Gamma => "gamma",
    };
    json!({ "side": side, "i": w.i, "j": w.j, "product": big(&w.product), "modulus": big(&w.modulus) })
}

fn candidate(c: &HammingCandidate) -> Value {
    json!({ "q": c.q, "n": c.n })
}

fn krawtchouk_failure(f: &KrawtchoukFailure) -> Value {
    json!({ "w": f.w, "row": f.cell.row, "col": f.cell.col, "value": rational(&f.cell.value) })
}

fn predicted(p: &Predicted) -> Value {
    json!({ "k": p.k, "weights": distribution(&p.weights), "dual": distribution(&p.dual) })
}

fn prediction_failure(f: &PredictionFailure) -> Value {
    match f {
        PredictionFailure::NonIntegralClasses(c) => json!({
            "reason": "non_integral_class",
            "index": c.index,
            "value": format!("{}/{}", c.numerator, c.denominator),
        }),
        PredictionFailure::Krawtchouk(k) => json!({ "reason": "krawtchouk", "failure": krawtchouk_failure(k) }),
        PredictionFailure::OrderNotPowerOfQ { order, q } => {
            json!({ "reason": "order_not_power_of_q", "order": big(order), "q": q })
        }
        PredictionFailure::NegativeCount { w, value } => {
            json!({ "reason": "negative_count", "w": w, "value": big(value) })
        }
        PredictionFailure::Inconsistent(m) => json!({ "reason": "inconsistent", "detail": m }),
    }
}

pub fn search_target(t: &SearchTarget) -> Value {
    json!({ "q": t.q, "n": t.n, "k": t.k, "weights": t.weights })
}

fn candidate_report(c: &CandidateReport) -> Value {
    json!({
        "q": c.candidate.q,
        "n": c.candidate.n,
        "krawtchouk": match &c.krawtchouk {
            Ok(()) => json!("integral"),
            Err(f) => krawtchouk_failure(f),
        },
        "prediction": match &c.prediction {
            None => Value::Null,
            Some(Ok(p)) => predicted(p),
            Some(Err(f)) => json!({ "failure": prediction_failure(f) }),
        },
        "reduces_to": c.reduces_to.as_ref().map(candidate),
        "search_target": c.search_target.as_ref().map(search_target),
    })
}

pub fn rejection_name(r: Rejection) -> &'static str {
    match r {
        Rejection::NonIntegralClassSizes => "non_integral_class_sizes",
        Rejection::OrderNotPrimePower => "order_not_prime_power",
        Rejection::Divisibility => "divisibility",
        Rejection::Krawtchouk => "krawtchouk",
        Rejection::NoConsistentCandidate => "no_consistent_candidate",
    }
}

pub fn annotation(a: &Annotation) -> Value {
    let status = match a.status {
        AnnotationStatus::Exists => "exists",
        AnnotationStatus::Nonexistent => "nonexistent",
    };
    json!({ "array": a.array.to_string(), "status": status, "citation": a.citation })
}

fn status(s: &Status) -> Value {
    let mut m = Map::new();
    m.insert("label".into(), json!(s.label()));
    match s {
        Status::Rejected(r) => {
            m.insert("rejections".into(), json!(r.iter().map(|&x| rejection_name(x)).collect::<Vec<_>>()));
        }
        Status::ReferToSearch(t) => {
            m.insert("search_targets".into(), json!(t.iter().map(search_target).collect::<Vec<_>>()));
        }
        _ => {}
    }
    Value::Object(m)
}

pub fn feasibility(r: &FeasibilityReport) -> Value {
    let (v, class_sizes) = match &r.class_sizes {
        Ok(s) => (big(&s.order), json!(s.sizes.iter().map(big).collect::<Vec<_>>())),
        Err(e) => (
            Value::Null,
            json!({ "non_integral": { "index": e.index, "value": format!("{}/{}", e.numerator, e.denominator) } }),
        ),
    };
    let mut verdicts = vec![json!({ "test": "class_sizes_integral", "pass": r.class_sizes.is_ok() })];
    verdicts.push(json!({ "test": "order_prime_power", "pass": r.order_prime_power.is_some() }));
    verdicts.push(json!({ "test": "divisibility", "pass": r.divisibility.is_empty() }));
    for c in &r.candidates {
        verdicts.push(json!({
            "test": "krawtchouk",
            "q": c.candidate.q,
            "n": c.candidate.n,
            "pass": c.krawtchouk.is_ok(),
        }));
    }
    for a in &r.annotations {
        verdicts.push(json!({ "test": "annotation", "citation": a.citation, "status": annotation(a)["status"] }));
    }
    json!({
        "array": array(&r.array),
        "v": v,
        "prime_power": r.order_prime_power.map(|(p, e)| json!({ "p": p, "e": e })),
        "class_sizes": class_sizes,
        "candidates": r.candidates.iter().map(candidate_report).collect::<Vec<_>>(),
        "verdicts": verdicts,
        "witnesses": r.divisibility.iter().map(witness).collect::<Vec<_>>(),
        "annotations": r.annotations.iter().map(annotation).collect::<Vec<_>>(),
        "status": status(&r.status),
    })
}

pub fn problem(p: &SearchProblem) -> Value {
    json!({ "q": p.q, "n": p.n, "k": p.k, "weights": p.weights })
}

pub fn stats(s: &SearchStats) -> Value {
    let prunes: Map<String, Value> = PRUNE_REASONS.iter().map(|&r| (r.name().into(), json!(s.prune_count(r)))).collect();
    json!({
        "nodes": s.nodes,
        "leaves": s.leaves,
        "max_depth": s.max_depth,
        "subtrees": s.subtrees,
        "prunes": prunes,
    })
}

pub fn stats_from(v: &Value) -> Option<SearchStats> {
    let mut s = SearchStats {
        nodes: v["nodes"].as_u64()?,
        leaves: v["leaves"].as_u64()?,
        max_depth: v["max_depth"].as_u64()? as usize,
        subtrees: v["subtrees"].as_u64()? as usize,
        ..SearchStats::default()
    };
    for (i, r) in PRUNE_REASONS.iter().enumerate() {
        s.prunes[i] = v["prunes"][r.name()].as_u64()?;
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_round_trip() {
        let mut s = SearchStats { nodes: 10, leaves: 2, max_depth: 4, subtrees: 3, ..SearchStats::default() };
        s.prunes[2] = 7;
        assert_eq!(stats_from(&stats(&s)), Some(s));
    }

    #[test]
    fn big_numbers() {
        assert_eq!(big(&12u32), json!(12));
        assert_eq!(big(&"123456789012345678901234567890"), json!("123456789012345678901234567890"));
    }
}
