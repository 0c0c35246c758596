//! Machine-readable (`--json`) and human-readable renderings of reports.

use std::fmt::Write as _;

use serde_json::{json, Value};

use lasgap::certify::{
    CertKind, CertReport, GapRatio, NoGapPrecheck, Optimum, SearchOutcome, SignPattern,
    SvcFailure, SvcVerdict,
};
use lasgap::instances::KnapScan;
use lasgap::moment::{FeasibilityReport, MatrixLabel, MatrixVerdict, PsdRoute, PsdWitness};
use lasgap::scalar::format_rational;
use lasgap::speig::{CornerCase, SpectrumReport};
use lasgap::{Rational, Scalar, SubsetIndex};

fn r(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn subsets(v: &[SubsetIndex]) -> Value {
    Value::Array(v.iter().map(|s| Value::String(s.to_string())).collect())
}

fn approx(x: &Rational) -> String {
    format!("{:.6e}", x.to_f64())
}

fn optimum_json(opt: &Optimum) -> Value {
    match opt {
        Optimum::Feasible { value, argmin } => json!({
            "feasible": true,
            "value": r(value),
            "argmin": argmin.to_string(),
        }),
        Optimum::Infeasible => json!({ "feasible": false }),
    }
}

fn ratio_json(ratio: &GapRatio) -> Value {
    match ratio {
        GapRatio::Finite(v) => json!({ "kind": "finite", "value": r(v), "approx": v.to_f64() }),
        GapRatio::Infinite => json!({ "kind": "infinite" }),
        GapRatio::Undefined => json!({ "kind": "undefined" }),
    }
}

fn pattern_json(p: &SignPattern) -> Value {
    json!({
        "negative": subsets(&p.negative),
        "zero": subsets(&p.zero),
        "reciprocal_sum": p.reciprocal_sum.as_ref().map(r),
        "unique_negative": p.unique_negative(),
        "positive_elsewhere": p.positive_elsewhere(),
        "reciprocal_ok": p.reciprocal_ok(),
    })
}

pub fn cert_json(rep: &CertReport) -> Value {
    let kind = match rep.kind {
        CertKind::Constrained => "constrained",
        CertKind::Unconstrained => "unconstrained",
    };
    let conditions: Vec<Value> = rep
        .conditions()
        .into_iter()
        .map(|(c, ok)| json!({ "condition": c.to_string(), "holds": ok }))
        .collect();
    json!({
        "kind": kind,
        "n": rep.n,
        "verdict": rep.verdict(),
        "first_failure": rep.first_failure().map(|c| c.to_string()),
        "conditions": conditions,
        "constraints": rep.constraints.iter().map(pattern_json).collect::<Vec<_>>(),
        "sign": rep.sign.as_ref().map(pattern_json),
        "relaxation_value": r(&rep.gap.relaxation_value),
        "relaxation_value_approx": rep.gap.relaxation_value.to_f64(),
        "integral_optimum": optimum_json(&rep.gap.integral_optimum),
        "gap_ratio": ratio_json(&rep.gap.ratio),
        "lasserre_feasible": rep.feasible,
    })
}

pub fn cert_text(rep: &CertReport) -> String {
    let mut out = String::new();
    let verdict = if rep.verdict() {
        "gap certified"
    } else {
        "no gap certified"
    };
    let _ = writeln!(out, "verdict: {verdict}");
    for (c, ok) in rep.conditions() {
        let _ = writeln!(out, "  [{}] {c}", if ok { "ok" } else { "FAIL" });
    }
    if let Some(c) = rep.first_failure() {
        let _ = writeln!(out, "first failing condition: {c}");
    }
    let _ = writeln!(
        out,
        "relaxation value: {} (~{})",
        format_rational(&rep.gap.relaxation_value),
        approx(&rep.gap.relaxation_value)
    );
    let _ = writeln!(out, "integral optimum: {}", rep.gap.integral_optimum);
    let ratio = match &rep.gap.ratio {
        GapRatio::Finite(v) => format!("{} (~{})", format_rational(v), approx(v)),
        GapRatio::Infinite => "infinite (empty integer hull)".to_owned(),
        GapRatio::Undefined => "undefined".to_owned(),
    };
    let _ = writeln!(out, "gap ratio: {ratio}");
    let _ = writeln!(
        out,
        "level-(n-1) feasible: {}",
        if rep.feasible { "yes" } else { "no" }
    );
    out
}

fn route_name(route: PsdRoute) -> &'static str {
    match route {
        PsdRoute::ExactDiagonal => "exact-diagonal",
        PsdRoute::ExactCornerForm => "exact-corner-form",
        PsdRoute::Dense => "dense",
    }
}

fn label_name(label: MatrixLabel, level: usize) -> String {
    match label {
        MatrixLabel::Moment => format!("M_{level}(y)"),
        MatrixLabel::Constraint(l) => format!("M_{level}(g{l}*y)"),
    }
}

fn witness_json(w: &PsdWitness<Rational>) -> Value {
    match w {
        PsdWitness::MinCornerEntry { subset, value } => json!({
            "kind": "min_corner_entry", "subset": subset.to_string(), "value": r(value),
        }),
        PsdWitness::Corner(case) => match case {
            CornerCase::AllNonnegative => json!({ "kind": "all_nonnegative" }),
            CornerCase::SingleNegative { negative, reciprocal_sum } => json!({
                "kind": "single_negative",
                "negative": negative.to_string(),
                "reciprocal_sum": r(reciprocal_sum),
            }),
            CornerCase::SeveralNegative { first, second } => json!({
                "kind": "several_negative", "first": first.to_string(), "second": second.to_string(),
            }),
            CornerCase::NegativeWithZero { negative, zero } => json!({
                "kind": "negative_with_zero", "negative": negative.to_string(), "zero": zero.to_string(),
            }),
        },
        PsdWitness::MinEigenvalue(l) => json!({ "kind": "min_eigenvalue", "value": l }),
    }
}

fn witness_text(w: &PsdWitness<Rational>) -> String {
    match w {
        PsdWitness::MinCornerEntry { subset, value } => {
            format!("min corner y^N_{subset} = {}", format_rational(value))
        }
        PsdWitness::Corner(CornerCase::AllNonnegative) => "all corners >= 0".into(),
        PsdWitness::Corner(CornerCase::SingleNegative {
            negative,
            reciprocal_sum,
        }) => format!(
            "one negative corner at {negative}, reciprocal sum {}",
            format_rational(reciprocal_sum)
        ),
        PsdWitness::Corner(CornerCase::SeveralNegative { first, second }) => {
            format!("negative corners at {first} and {second}")
        }
        PsdWitness::Corner(CornerCase::NegativeWithZero { negative, zero }) => {
            format!("negative corner at {negative} with zero corner at {zero}")
        }
        PsdWitness::MinEigenvalue(l) => format!("min eigenvalue {l:.6e}"),
    }
}

fn verdict_json(v: &MatrixVerdict<Rational>) -> Value {
    json!({
        "matrix": label_name(v.label, v.level),
        "level": v.level,
        "psd": v.psd,
        "route": route_name(v.route),
        "exact": v.route.is_exact(),
        "witness": witness_json(&v.witness),
    })
}

pub fn feas_json(rep: &FeasibilityReport<Rational>) -> Value {
    json!({
        "t": rep.t,
        "d": rep.d,
        "feasible": rep.feasible(),
        "normalized": rep.normalized,
        "matrices": std::iter::once(&rep.moment)
            .chain(&rep.constraints)
            .map(verdict_json)
            .collect::<Vec<_>>(),
        "redundant_constraints": rep.redundant_constraints,
    })
}

pub fn feas_text(rep: &FeasibilityReport<Rational>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "y_[] = 1: {}",
        if rep.normalized { "yes" } else { "no" }
    );
    for v in std::iter::once(&rep.moment).chain(&rep.constraints) {
        let _ = writeln!(
            out,
            "{}: {} [{} route] {}",
            label_name(v.label, v.level),
            if v.psd { "PSD" } else { "not PSD" },
            route_name(v.route),
            witness_text(&v.witness)
        );
    }
    for l in &rep.redundant_constraints {
        let _ = writeln!(out, "warning: constraint {l} is redundant");
    }
    let _ = writeln!(
        out,
        "level {} feasible: {}",
        rep.t,
        if rep.feasible() { "yes" } else { "no" }
    );
    out
}

pub fn eig_line(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.10}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn eig_json(rep: &SpectrumReport, dense: Option<(&[f64], f64)>) -> Value {
    json!({
        "float": true,
        "eigenvalues": rep.eigenvalues,
        "secular_roots": rep.secular_roots,
        "residuals": rep.residuals,
        "repeated": rep.repeated.iter().map(|(v, m)| json!({ "value": v, "extra_multiplicity": m })).collect::<Vec<_>>(),
        "dense_check": dense.map(|(spec, diff)| json!({ "eigenvalues": spec, "max_abs_difference": diff })),
    })
}

pub fn scan_json(scan: &KnapScan) -> Value {
    json!({
        "n": scan.n,
        "k": r(&scan.k),
        "rows": scan.rows.iter().map(|row| json!({
            "P": row.p.to_string(),
            "relaxation_value_approx": row.relaxation_value.to_f64(),
            "certified": row.certified,
            "gap_at_least_k": row.gap_at_least_k,
        })).collect::<Vec<_>>(),
        "threshold": scan.threshold.as_ref().map(|t| t.to_string()),
        "threshold_is_upper_estimate": true,
        "lower_bound": r(&scan.lower_bound),
        "upper_bound": r(&scan.upper_bound),
    })
}

pub fn scan_text(scan: &KnapScan) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>24}  {:>14}  {:>9}  {:>8}", "P", "relaxation", "certified", "gap>=k");
    for row in &scan.rows {
        let _ = writeln!(
            out,
            "{:>24}  {:>14.6e}  {:>9}  {:>8}",
            row.p.to_string(),
            row.relaxation_value.to_f64(),
            if row.certified { "yes" } else { "no" },
            if row.gap_at_least_k { "yes" } else { "no" }
        );
    }
    let threshold = scan
        .threshold
        .as_ref()
        .map_or_else(|| "none on the grid".to_owned(), |t| t.to_string());
    let _ = writeln!(
        out,
        "threshold: {threshold} (upper estimate: only the closed-form certificate family is tried)"
    );
    let _ = writeln!(out, "lower bound (k-1)(2^n-1)^2 = {}", format_rational(&scan.lower_bound));
    let _ = writeln!(out, "upper bound k*2^(2n+1) = {}", format_rational(&scan.upper_bound));
    out
}

pub fn degree_json(n: usize, top: &Rational, pre: Option<&NoGapPrecheck>) -> Value {
    json!({
        "n": n,
        "top_fourier": r(top),
        "degree_n": !num_traits::Zero::is_zero(top),
        "constant": pre.is_none(),
        "no_gap_precheck": pre.map(|p| json!({
            "normalized_sum": r(&p.normalized_sum),
            "no_gap_certified": p.no_gap_certified,
        })),
    })
}

pub fn degree_text(n: usize, top: &Rational, pre: Option<&NoGapPrecheck>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "top Fourier coefficient: {}", format_rational(top));
    let degree_n = !num_traits::Zero::is_zero(top);
    let _ = writeln!(
        out,
        "degree {n}: {}",
        if degree_n {
            "yes"
        } else {
            "no (no gap at level n-1)"
        }
    );
    match pre {
        None => {
            let _ = writeln!(out, "no-gap precheck: objective is constant");
        }
        Some(p) => {
            let _ = writeln!(
                out,
                "no-gap precheck: normalized sum {} -> {}",
                format_rational(&p.normalized_sum),
                if p.no_gap_certified {
                    "no gap at level n-1"
                } else {
                    "inconclusive"
                }
            );
        }
    }
    out
}

fn svc_failure_text(f: &SvcFailure) -> String {
    match f {
        SvcFailure::ZeroCoefficient { index } => format!("x{index} has coefficient 0"),
        SvcFailure::ZeroValue { at } => format!("g vanishes at x_{at}"),
        SvcFailure::NoViolation => "no 0/1 point violates it".into(),
        SvcFailure::SeveralViolations { first, second } => {
            format!("violated at x_{first} and x_{second}")
        }
    }
}

pub fn svc_json(verdicts: &[SvcVerdict]) -> Value {
    json!({
        "constraints": verdicts.iter().enumerate().map(|(l, v)| json!({
            "index": l,
            "svc": v.is_svc,
            "cut_vertex": v.cut_vertex.map(|s| s.to_string()),
            "reason": v.failure.as_ref().map(svc_failure_text),
        })).collect::<Vec<_>>(),
        "eligible": !verdicts.is_empty() && verdicts.iter().all(|v| v.is_svc),
    })
}

pub fn svc_text(verdicts: &[SvcVerdict]) -> String {
    let mut out = String::new();
    for (l, v) in verdicts.iter().enumerate() {
        match (&v.cut_vertex, &v.failure) {
            (Some(cut), _) => {
                let _ = writeln!(out, "constraint {l}: SVC, cuts x_{cut}");
            }
            (None, Some(f)) => {
                let _ = writeln!(out, "constraint {l}: not SVC ({})", svc_failure_text(f));
            }
            (None, None) => {
                let _ = writeln!(out, "constraint {l}: not SVC");
            }
        }
    }
    let eligible = !verdicts.is_empty() && verdicts.iter().all(|v| v.is_svc);
    let _ = writeln!(
        out,
        "eligible for level-(n-1) gap: {}",
        if eligible { "yes" } else { "no" }
    );
    out
}

pub fn search_json(outcome: &SearchOutcome) -> Value {
    match outcome {
        SearchOutcome::Found {
            report, attempts, ..
        } => json!({ "found": true, "attempts": attempts, "report": cert_json(report) }),
        SearchOutcome::NotFound { attempts } => json!({ "found": false, "attempts": attempts }),
    }
}
