//! One function per task id; each returns JSON plus a CSV table.

use anyhow::{anyhow, bail, Context};
use serde::Serialize;
use serde_json::{json, Value};
use shiftlab::dynamics::{self, hypercyclic};
use shiftlab::operator::{self, rank_one_matrix_orbit, rank_one_perturb_orbit};
use shiftlab::orbit::{self, OrbitRecord, OrbitVec};
use shiftlab::report::CriterionReport;
use shiftlab::sequences::{CertKind, LogWeightTable};
use shiftlab::space::{DualVec, Space};
use shiftlab::C;

use crate::render::fmt_f64;
use crate::scenario::{parse_complex, Scenario};

pub struct TaskOutput {
    pub json: Value,
    pub csv: String,
    /// `x,y` series for plotting, where the task has one.
    pub plot: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn cert_str(c: CertKind) -> String {
    to_value(&c).as_str().unwrap_or_default().to_string()
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

fn reports_csv(reports: &[&CriterionReport]) -> anyhow::Result<String> {
    let mut rows = Vec::new();
    for r in reports {
        let head = [r.criterion_id.clone(), to_value(&r.verdict).as_str().unwrap_or_default().to_string(), to_value(&r.conclusion).as_str().unwrap_or_default().to_string()];
        if r.quantities.is_empty() {
            rows.push([head.to_vec(), vec![String::new(); 4]].concat());
        }
        for (name, q) in &r.quantities {
            let bound = q.bound.map(fmt_f64).unwrap_or_default();
            rows.push([head.to_vec(), vec![name.clone(), fmt_f64(q.value), bound, cert_str(q.cert)]].concat());
        }
    }
    table(&["criterion_id", "verdict", "conclusion", "quantity", "value", "bound", "cert"], rows)
}

fn xy(points: impl IntoIterator<Item = (f64, f64)>) -> anyhow::Result<String> {
    table(&["x", "y"], points.into_iter().map(|(x, y)| vec![fmt_f64(x), fmt_f64(y)]).collect())
}

pub fn run(task: &str, sc: &Scenario, space: Option<&Space>) -> anyhow::Result<TaskOutput> {
    if task == "rank-one" {
        return rank_one(sc);
    }
    let s = space.ok_or_else(|| anyhow!("task {task:?} needs a space"))?;
    match task {
        "space" => space_info(s, sc),
        "matrix" => matrix(s, sc),
        "norm" => norm(s),
        "decompose" => decompose(s),
        "dynamics" => dynamics_check(s),
        "orbit" => orbit_run(s, sc),
        "orbit-demo" => orbit_demo(s, sc),
        _ => bail!("unknown task {task:?}"),
    }
}

fn space_info(s: &Space, sc: &Scenario) -> anyhow::Result<TaskOutput> {
    let (radius, rc) = s.radius()?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut member = true;
    let mut cert = rc.kind;
    for n in 0..sc.params.monomials.max(1) {
        let (norm, sv) = s.monomial_norm(n)?;
        let root = sv.root(s.p());
        member &= norm.is_finite();
        cert = cert.and(sv.cert);
        entries.push(json!({"n": n, "norm": {"value": to_value(&Finite(norm)), "bound": to_value(&Finite(root.tail_bound)), "cert": sv.cert}, "terms": sv.terms}));
        rows.push(vec![n.to_string(), fmt_f64(norm), fmt_f64(root.tail_bound), cert_str(sv.cert)]);
    }
    let csv = table(&["n", "norm", "bound", "cert"], rows.clone())?;
    let plot = xy(rows.iter().enumerate().map(|(n, _)| (n as f64, s.monomial_norm(n).map(|x| x.0).unwrap_or(f64::NAN))))?;
    Ok(TaskOutput {
        json: json!({
            "label": s.triple.label,
            "radius": {"value": to_value(&Finite(radius)), "cert": rc.kind},
            "monomial_norms": entries,
            "polynomials_in_space": {"value": member, "cert": cert},
        }),
        csv,
        plot: Some(plot),
    })
}

/// Serializes infinities as strings, like the reports do.
struct Finite(f64);

impl Serialize for Finite {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0.is_nan() {
            s.serialize_str("nan")
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

fn matrix(s: &Space, sc: &Scenario) -> anyhow::Result<TaskOutput> {
    let m = operator::build_matrix(s, sc.params.nu.max(1))?;
    let rows = m.triplets().into_iter().map(|(i, j, z)| vec![i.to_string(), j.to_string(), fmt_f64(z.re), fmt_f64(z.im)]).collect();
    Ok(TaskOutput { json: to_value(&m), csv: table(&["i", "j", "re", "im"], rows)?, plot: None })
}

fn norm(s: &Space) -> anyhow::Result<TaskOutput> {
    let b = operator::beta_bounds(s)?;
    let m = operator::build_matrix(s, 1)?;
    let proven = b.proven_bound.is_finite().then_some(b.proven_bound);
    let bracket = operator::p_norm_estimate(&m, proven);
    let report = b.report();
    let mut csv = reports_csv(&[&report])?;
    // the truncation's norm is a lower bound for ||F_w||; the upper end is an estimate
    csv.push_str(&table(
        &["bracket", "value", "cert"],
        vec![
            vec!["lower".into(), fmt_f64(bracket.lower), "CERTIFIED".into()],
            vec!["upper".into(), fmt_f64(bracket.upper), cert_str(if proven.is_some() { b.cert } else { CertKind::Heuristic })],
        ],
    )?);
    Ok(TaskOutput {
        json: json!({
            "beta_bounds": to_value(&report),
            "bracket": {
                "lower": {"value": to_value(&Finite(bracket.lower)), "cert": CertKind::Certified},
                "upper": {"value": to_value(&Finite(bracket.upper)), "cert": if proven.is_some() { b.cert } else { CertKind::Heuristic }},
                "iterations": bracket.iterations,
                "converged": bracket.converged,
            },
        }),
        csv,
        plot: None,
    })
}

fn decompose(s: &Space) -> anyhow::Result<TaskOutput> {
    let d = operator::decompose_compact(s)?;
    let report = d.report();
    let r = &d.essential_radii;
    let plot = xy(r.windows.iter().map(|w| (w.m as f64, w.outer)))?;
    Ok(TaskOutput {
        json: json!({"report": to_value(&report), "essential_radii": to_value(r), "c_decay": to_value(&d.c_decay), "notes": d.notes}),
        csv: reports_csv(&[&report])?,
        plot: Some(plot),
    })
}

fn dynamics_check(s: &Space) -> anyhow::Result<TaskOutput> {
    let mut reports = dynamics::all_criteria(s)?;
    reports.push(orbit::supercyclic_vanishing_check(s, 32)?);
    let refs: Vec<&CriterionReport> = reports.iter().collect();
    let conclusions: Vec<Value> = reports.iter().filter(|r| r.verdict.holds()).map(|r| to_value(&r.conclusion)).collect();
    // scan of ln q(0, n), the quantity behind the hypercyclicity criteria
    let table = LogWeightTable::new(&s.triple.w, dynamics::N_MAX + 1)?;
    let scan = (0..=dynamics::N_MAX).map(|n| Ok((n as f64, hypercyclic::ln_q(s, &table, 0, n)?))).collect::<anyhow::Result<Vec<_>>>()?;
    Ok(TaskOutput { json: json!({"reports": to_value(&reports), "conclusions": conclusions}), csv: reports_csv(&refs)?, plot: Some(xy(scan)?) })
}

/// `k:N`, `e:N` or `ev:<complex>` at the space's stored length.
fn parse_vector(s: &Space, spec: &str) -> anyhow::Result<OrbitVec> {
    let len = s.cfg.n;
    let (kind, arg) = spec.split_once(':').ok_or_else(|| anyhow!("vector {spec:?} must look like k:N, e:N or ev:<complex>"))?;
    let index = || -> anyhow::Result<usize> {
        let n: usize = arg.trim().parse().with_context(|| format!("index in {spec:?}"))?;
        if n + 1 >= len {
            bail!("index {n} does not fit in the stored length {len}");
        }
        Ok(n)
    };
    match kind.trim() {
        "k" => Ok(OrbitVec::from_dual(&s.coeff_functional_kn_len(index()?, len)?, format!("k_{arg}"))),
        "e" => Ok(OrbitVec::from_dual(&DualVec::unit(index()?, len), format!("f*_{arg}"))),
        "ev" => Ok(OrbitVec::ev(s, parse_complex(arg)?, len)?),
        _ => bail!("vector {spec:?} must look like k:N, e:N or ev:<complex>"),
    }
}

fn orbit_output(record: &OrbitRecord, extra: Value) -> anyhow::Result<TaskOutput> {
    let plot = xy(record.steps.iter().map(|s| (s.step as f64, s.distance.unwrap_or(s.norm))))?;
    let mut json = record.to_json();
    if let (Value::Object(m), Value::Object(e)) = (&mut json, extra) {
        m.extend(e);
    }
    Ok(TaskOutput { json, csv: record.to_csv()?, plot: Some(plot) })
}

fn orbit_run(s: &Space, sc: &Scenario) -> anyhow::Result<TaskOutput> {
    let u = parse_vector(s, &sc.params.vector)?;
    let target = sc.params.target.as_deref().map(|t| parse_vector(s, t)).transpose()?;
    let record = orbit::iterate_orbit(s, &u, sc.params.steps, target.as_ref().map(|t| (t, C::new(1.0, 0.0))))?;
    orbit_output(&record, json!({}))
}

fn orbit_demo(s: &Space, sc: &Scenario) -> anyhow::Result<TaskOutput> {
    let (radius, _) = s.radius()?;
    let lambda = match &sc.params.lambda {
        Some(l) => parse_complex(l)?,
        None => sc.tridiag_lambda().unwrap_or(C::new(radius, 0.0)),
    };
    if !lambda.norm().is_finite() {
        bail!("the space has infinite radius; give --lambda");
    }
    let z = match &sc.params.z {
        Some(z) => parse_complex(z)?,
        None => lambda * 0.5,
    };
    let demo = orbit::limit_point_demo(s, z, lambda, sc.params.steps)?;
    let out = orbit_output(&demo.record, json!({"subsequence": to_value(&demo.subsequence), "limit_norm": to_value(&Finite(demo.limit_norm)), "z": [z.re, z.im], "lambda": [lambda.re, lambda.im]}))?;
    Ok(out)
}

fn rank_one(sc: &Scenario) -> anyhow::Result<TaskOutput> {
    let lambda = parse_complex(&sc.params.rank_one_lambda)?;
    let mut x = sc.params.x.iter().map(|v| parse_complex(v)).collect::<anyhow::Result<Vec<C>>>()?;
    x.resize(x.len().max(8), C::new(0.0, 0.0));
    let n = sc.params.steps;
    let closed = rank_one_perturb_orbit(lambda, &x, n)?;
    let powers = rank_one_matrix_orbit(lambda, &x, n)?;
    let gap = closed.iter().zip(&powers).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let rows = closed.iter().enumerate().map(|(i, z)| vec![i.to_string(), fmt_f64(z.re), fmt_f64(z.im)]).collect();
    Ok(TaskOutput {
        json: json!({
            "lambda": [lambda.re, lambda.im],
            "steps": n,
            "x": x.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "orbit": closed.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "matrix_power_gap": {"value": gap, "cert": CertKind::Heuristic},
        }),
        csv: table(&["i", "re", "im"], rows)?,
        plot: None,
    })
}
