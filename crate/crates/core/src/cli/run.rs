//! Command dispatch and report rendering.

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::document::CurveDocument;
use crate::blowup::classify_with;
use crate::coeffcore::field::parse_q;
use crate::coeffcore::{BivariatePoly, Fe, TruncatedSeries};
use crate::curvegerm::{CurveGerm, DEFAULT_N0};
use crate::error::{Error, Result};
use crate::normalform::{act, marked_equivalence_probe, normal_form, orbit_reduce, JetTuple, NormalizedGenerators};
use crate::saito::{default_degree_bound, saito_data_seeded};
use crate::semiring::minimal_generators;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Semiring,
    Normalize,
    Saito,
    Classify,
    Dimension,
    Action,
    Equiv,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Semiring => "semiring",
            Command::Normalize => "normalize",
            Command::Saito => "saito",
            Command::Classify => "classify",
            Command::Dimension => "dimension",
            Command::Action => "action",
            Command::Equiv => "equiv",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Working precision N0 for branch series.
    pub truncation: usize,
    /// Saito slice degree bound; defaults to twice the degree of the equation.
    pub degree_bound: Option<u32>,
    pub format: Format,
    /// Offset into the generic-scalar sequence.
    pub seed: usize,
    /// One-based branch permutation: new branch i is old branch marking[i].
    pub marking: Option<Vec<usize>>,
    /// Jets for `action`, one per branch: coefficients of t, t², ... separated
    /// by commas, branches separated by semicolons. Identity when absent.
    pub phi: Option<String>,
    /// Also reduce to an orbit representative in `action`.
    pub reduce: bool,
    /// Second curve for `equiv`.
    pub against: Option<CurveDocument>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { truncation: DEFAULT_N0, degree_bound: None, format: Format::Json, seed: 0, marking: None, phi: None, reduce: false, against: None }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.truncation < 8 {
            return Err(Error::Input(format!("truncation {} is below the minimum 8", self.truncation)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Computed, but the answer is "unclassified" or "unsupported".
    Unsupported,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub value: Value,
    pub status: Status,
}

/// 0 on success, 2 for unclassified or unsupported, 1 for input and other errors.
pub fn exit_code(r: &Result<Report>) -> i32 {
    match r {
        Ok(Report { status: Status::Ok, .. }) => 0,
        Ok(Report { status: Status::Unsupported, .. }) => 2,
        Err(Error::Unsupported(_)) | Err(Error::Bound(_)) => 2,
        Err(_) => 1,
    }
}

fn header(cmd: Command, doc: &CurveDocument) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(cmd.name()));
    m.insert("name".into(), doc.name.as_ref().map_or(Value::Null, |n| json!(n)));
    m
}

fn extend(mut m: Map<String, Value>, v: Value) -> Value {
    if let Value::Object(o) = v {
        m.extend(o);
    }
    Value::Object(m)
}

fn marked_curve(doc: &CurveDocument, cfg: &RunConfig) -> Result<(CurveGerm, Vec<String>)> {
    let curve = doc.curve(cfg.truncation)?;
    let labels = doc.branch_labels();
    match &cfg.marking {
        None => Ok((curve, labels)),
        Some(m) => {
            if m.contains(&0) {
                return Err(Error::Input("marking is one-based".into()));
            }
            let perm: Vec<usize> = m.iter().map(|i| i - 1).collect();
            let curve = curve.remark(&perm)?;
            Ok((curve, perm.iter().map(|p| labels[*p].clone()).collect()))
        }
    }
}

fn equation(doc: &CurveDocument, cfg: &RunConfig) -> Result<(BivariatePoly, u32)> {
    let f = doc.equation_or_eliminate(cfg.truncation)?;
    let deg = f.degree().ok_or_else(|| Error::Input("zero equation".into()))?;
    let d = cfg.degree_bound.unwrap_or_else(|| default_degree_bound(&f));
    if d < deg {
        return Err(Error::Input(format!("degree bound {d} is below deg f = {deg}")));
    }
    Ok((f, d))
}

fn parse_phi(text: &str, ctx: &NormalizedGenerators) -> Result<JetTuple> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != ctx.r() {
        return Err(Error::Input(format!("phi has {} jets for {} branches", parts.len(), ctx.r())));
    }
    let jets = parts
        .iter()
        .zip(&ctx.orders)
        .map(|(p, n)| {
            let cs = p.split(',').map(|c| parse_q(c).map(Fe::from_q)).collect::<Result<Vec<_>>>()?;
            Ok(TruncatedSeries::from_terms(cs.into_iter().enumerate().map(|(k, c)| (k + 1, c)), *n))
        })
        .collect::<Result<Vec<_>>>()?;
    JetTuple::new(jets)
}

fn labels_json(ctx: &NormalizedGenerators, idx: &[usize]) -> Value {
    Value::Array(
        idx.iter()
            .map(|i| {
                let (g, l, k) = ctx.positions[*i].label();
                json!([g, l, k])
            })
            .collect(),
    )
}

fn fe_list(v: &[Fe]) -> Value {
    Value::Array(v.iter().map(Fe::to_json).collect())
}

/// Run one command on one document.
pub fn run(cmd: Command, doc: &CurveDocument, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let head = header(cmd, doc);
    let ok = |value| Ok(Report { value, status: Status::Ok });
    match cmd {
        Command::Semiring => {
            let (curve, labels) = marked_curve(doc, cfg)?;
            let (sigma, gamma) = curve.semiring()?;
            let gens = minimal_generators(&curve, &gamma)?;
            let abs = gamma.absolute_points()?;
            ok(extend(
                head,
                json!({
                    "branches": labels,
                    "multiplicity": curve.multiplicity,
                    "conductor": sigma,
                    "absolute": abs.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
                    "generators": gens.values.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
                    "independent_pair": gens.pair.map(|(i, j)| json!([i + 1, j + 1])),
                }),
            ))
        }
        Command::Normalize => {
            let (curve, labels) = marked_curve(doc, cfg)?;
            let ctx = normal_form(&curve)?;
            ok(extend(head, extend(Map::from_iter([("branches".to_string(), json!(labels))]), ctx.to_json())))
        }
        Command::Action => {
            let (curve, labels) = marked_curve(doc, cfg)?;
            let ctx = normal_form(&curve)?;
            let phi = match &cfg.phi {
                Some(p) => parse_phi(p, &ctx)?,
                None => JetTuple::identity(&ctx.orders),
            };
            let a = ctx.coeff_vector().to_vec();
            let acted = act(&phi, &a, &ctx)?;
            let all: Vec<usize> = (0..a.len()).collect();
            let mut body = json!({
                "branches": labels,
                "positions": labels_json(&ctx, &all),
                "coefficients": fe_list(&a),
                "acted": fe_list(&acted),
            });
            if cfg.reduce {
                let rep = orbit_reduce(&a, &ctx)?;
                body["orbit"] = json!({
                    "point": fe_list(&rep.point),
                    "killed": labels_json(&ctx, &rep.killed),
                    "unit": labels_json(&ctx, &rep.unit),
                    "free": labels_json(&ctx, &rep.free),
                });
            }
            ok(extend(head, body))
        }
        Command::Equiv => {
            let other = cfg.against.as_ref().ok_or_else(|| Error::Input("equiv needs a second curve (--against)".into()))?;
            let (c1, _) = marked_curve(doc, cfg)?;
            let c2 = other.curve(cfg.truncation)?;
            let (eq, reason) = match marked_equivalence_probe(&c1, &c2) {
                Ok(b) => (b, None),
                Err(Error::Precondition(m)) => (false, Some(m)),
                Err(e) => return Err(e),
            };
            ok(extend(head, json!({"against": other.name, "equivalent": eq, "reason": reason})))
        }
        Command::Saito | Command::Classify | Command::Dimension => {
            let (f, d) = equation(doc, cfg)?;
            let (slice, basis) = saito_data_seeded(&f, d, cfg.seed)?;
            if cmd == Command::Saito {
                let b = basis.to_json();
                return ok(extend(
                    head,
                    json!({
                        "equation": f.to_string(),
                        "nuS": f.order(),
                        "saito_number": basis.nu1(),
                        "degree_bound": slice.degree_bound,
                        "nu1": b["nu1"], "nu2": b["nu2"], "type": b["type"],
                        "unit_constant": b["unit_constant"], "x1": b["x1"], "x2": b["x2"],
                    }),
                ));
            }
            let rep = classify_with(&f, &slice, basis)?;
            let mut full = rep.to_json();
            let status = match cmd {
                Command::Classify if rep.type_label().is_none() => Status::Unsupported,
                Command::Dimension if rep.dimension.is_none() => Status::Unsupported,
                _ => Status::Ok,
            };
            let body = if cmd == Command::Classify {
                full["equation"] = json!(f.to_string());
                full["degree_bound"] = json!(rep.degree_bound);
                full
            } else {
                let keys = ["nuS", "nu1", "nu2", "type", "nu0", "free_points", "dimension", "dimension_note"];
                Value::Object(keys.iter().map(|k| (k.to_string(), full[*k].take())).collect())
            };
            Ok(Report { value: extend(head, body), status })
        }
    }
}

/// Run a command over several documents, optionally in parallel; results keep
/// input order.
pub fn run_many(cmd: Command, docs: &[CurveDocument], cfg: &RunConfig, parallel: bool) -> Vec<Result<Report>> {
    if parallel {
        docs.par_iter().map(|d| run(cmd, d, cfg)).collect()
    } else {
        docs.iter().map(|d| run(cmd, d, cfg)).collect()
    }
}

/// Summary value for a batch: one entry per document with its exit code.
pub fn batch_value(docs: &[CurveDocument], results: &[Result<Report>]) -> Value {
    Value::Array(
        docs.iter()
            .zip(results)
            .map(|(d, r)| {
                let mut m = Map::new();
                m.insert("name".into(), json!(d.name));
                m.insert("exit".into(), json!(exit_code(r)));
                match r {
                    Ok(rep) => m.insert("report".into(), rep.value.clone()),
                    Err(e) => m.insert("error".into(), json!(e.to_string())),
                };
                Value::Object(m)
            })
            .collect(),
    )
}

fn inline(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) if s == "inf" => "∞".into(),
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Object(o) => format!("{{{}}}", o.iter().map(|(k, v)| format!("{k}: {}", inline(v))).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(o) if !o.is_empty() => {
            for (k, x) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        _ => rows.push((prefix.to_string(), inline(v))),
    }
}

fn table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, x)| format!("{k:<w$}  {x}\n")).collect()
}

/// Render a report value. JSON keeps construction order; tables flatten
/// nested objects to dotted keys in two aligned columns.
pub fn emit(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("JSON values always serialize") + "\n",
        Format::Table => match v {
            Value::Array(items) => items.iter().map(table).collect::<Vec<_>>().join("\n"),
            _ => table(v),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_uses_infinity_glyph_and_aligns() {
        let t = emit(&json!({"a": ["inf", 1], "long_key": {"b": null}}), Format::Table);
        assert_eq!(t, "a           [∞, 1]\nlong_key.b  -\n");
        assert!(emit(&json!(["inf"]), Format::Json).contains("\"inf\""));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Err(Error::Input("x".into()))), 1);
        assert_eq!(exit_code(&Err(Error::Unsupported("x".into()))), 2);
        assert_eq!(exit_code(&Ok(Report { value: Value::Null, status: Status::Unsupported })), 2);
    }

    #[test]
    fn config_bounds() {
        let doc = CurveDocument::parse(r#"{"equation": [[1, 1, "1"]]}"#).unwrap();
        let cfg = RunConfig { truncation: 4, ..RunConfig::default() };
        assert!(matches!(run(Command::Saito, &doc, &cfg), Err(Error::Input(_))));
        let cfg = RunConfig { degree_bound: Some(1), ..RunConfig::default() };
        assert!(matches!(run(Command::Saito, &doc, &cfg), Err(Error::Input(_))));
        assert!(matches!(run(Command::Semiring, &doc, &RunConfig::default()), Err(Error::Unsupported(_))));
    }
}
