//! JSON curve descriptions.
//!
//! ```json
//! {
//!   "name": "line-cusp",
//!   "field": {"var": "z", "minpoly": ["1", "1", "1"]},
//!   "branches": [{"x": [[1, "1"]], "y": []}, {"x": [[2, "1"]], "y": [[3, "1"]]}],
//!   "equation": [[0, 3, "1"], [3, 1, "-1"]],
//!   "labels": ["L", "C"]
//! }
//! ```
//!
//! Coefficients are rational strings, integers, or coefficient vectors in the
//! extension generator (low degree first).

use serde_json::{json, Map, Value};

use crate::coeffcore::field::{fmt_q, parse_q};
use crate::coeffcore::{BivariatePoly, Fe, FieldSpec, Q};
use crate::curvegerm::{Branch, CurveGerm};
use crate::error::{Error, Result};

const KEYS: [&str; 6] = ["name", "description", "field", "branches", "equation", "labels"];

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDoc {
    pub var: String,
    pub minpoly: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchDoc {
    pub x: Vec<(usize, Fe)>,
    pub y: Vec<(usize, Fe)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveDocument {
    pub name: Option<String>,
    pub description: Option<String>,
    pub field: Option<FieldDoc>,
    pub branches: Vec<BranchDoc>,
    pub equation: Option<Vec<(u32, u32, Fe)>>,
    pub labels: Option<Vec<String>>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

fn rational(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => n.as_i64().map(crate::coeffcore::field::q).ok_or_else(|| bad(format!("non-integer number {n}; write rationals as strings"))),
        _ => Err(bad(format!("expected a rational, got {v}"))),
    }
}

fn coefficient(v: &Value, field: &FieldSpec) -> Result<Fe> {
    match v {
        Value::Array(cs) => {
            if field.ext.is_none() {
                return Err(bad("coefficient vector given but no extension field declared"));
            }
            if cs.len() > field.degree() {
                return Err(bad(format!("coefficient vector longer than the extension degree {}", field.degree())));
            }
            Ok(field.from_coeffs(cs.iter().map(rational).collect::<Result<_>>()?))
        }
        _ => Ok(Fe::from_q(rational(v)?)),
    }
}

fn index(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| bad(format!("{what} must be a nonnegative integer, got {v}")))
}

fn terms(v: &Value, field: &FieldSpec) -> Result<Vec<(usize, Fe)>> {
    let arr = v.as_array().ok_or_else(|| bad("series must be a list of [exp, coeff] pairs"))?;
    let mut out: Vec<(usize, Fe)> = Vec::with_capacity(arr.len());
    for t in arr {
        match t.as_array().map(|p| p.as_slice()) {
            Some([e, c]) => {
                let e = index(e, "exponent")? as usize;
                if out.iter().any(|(k, _)| *k == e) {
                    return Err(bad(format!("repeated exponent {e}")));
                }
                out.push((e, coefficient(c, field)?));
            }
            _ => return Err(bad(format!("series term must be [exp, coeff], got {t}"))),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out.sort_by_key(|(k, _)| *k);
    Ok(out)
}

fn series_json(ts: &[(usize, Fe)]) -> Value {
    Value::Array(ts.iter().map(|(k, c)| json!([k, c.to_json()])).collect())
}

impl CurveDocument {
    pub fn parse(text: &str) -> Result<CurveDocument> {
        let v: Value = serde_json::from_str(text).map_err(|e| bad(format!("malformed JSON: {e}")))?;
        CurveDocument::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<CurveDocument> {
        let obj = v.as_object().ok_or_else(|| bad("curve document must be a JSON object"))?;
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(bad(format!("unknown key {k:?}")));
        }
        let text = |k: &str| -> Result<Option<String>> {
            obj.get(k).map(|v| v.as_str().map(str::to_string).ok_or_else(|| bad(format!("{k} must be a string")))).transpose()
        };
        let field = match obj.get("field") {
            None | Some(Value::Null) => None,
            Some(f) => {
                let var = f.get("var").and_then(Value::as_str).unwrap_or("z").to_string();
                let mp = f.get("minpoly").and_then(Value::as_array).ok_or_else(|| bad("field.minpoly must be a list"))?;
                Some(FieldDoc { var, minpoly: mp.iter().map(rational).collect::<Result<_>>()? })
            }
        };
        let spec = match &field {
            None => FieldSpec::rationals(),
            Some(f) => FieldSpec::extension(&f.var, f.minpoly.clone())?,
        };
        let branches = match obj.get("branches") {
            None => Vec::new(),
            Some(bs) => bs
                .as_array()
                .ok_or_else(|| bad("branches must be a list"))?
                .iter()
                .map(|b| {
                    let get = |k: &str| b.get(k).ok_or_else(|| bad(format!("branch lacks {k:?}")));
                    Ok(BranchDoc { x: terms(get("x")?, &spec)?, y: terms(get("y")?, &spec)? })
                })
                .collect::<Result<_>>()?,
        };
        let equation = match obj.get("equation") {
            None | Some(Value::Null) => None,
            Some(e) => {
                let arr = e.as_array().ok_or_else(|| bad("equation must be a list of [i, j, coeff]"))?;
                let mut out: Vec<(u32, u32, Fe)> = Vec::new();
                for t in arr {
                    match t.as_array().map(|p| p.as_slice()) {
                        Some([i, j, c]) => {
                            let (i, j) = (index(i, "exponent")? as u32, index(j, "exponent")? as u32);
                            if out.iter().any(|(a, b, _)| (*a, *b) == (i, j)) {
                                return Err(bad(format!("repeated monomial x^{i} y^{j}")));
                            }
                            out.push((i, j, coefficient(c, &spec)?));
                        }
                        _ => return Err(bad(format!("equation term must be [i, j, coeff], got {t}"))),
                    }
                }
                out.retain(|(_, _, c)| !c.is_zero());
                out.sort_by_key(|a| (a.0 + a.1, std::cmp::Reverse(a.0)));
                Some(out)
            }
        };
        let labels = match obj.get("labels") {
            None | Some(Value::Null) => None,
            Some(l) => Some(
                l.as_array()
                    .ok_or_else(|| bad("labels must be a list"))?
                    .iter()
                    .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad("labels must be strings")))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let doc = CurveDocument { name: text("name")?, description: text("description")?, field, branches, equation, labels };
        doc.validate_shape()?;
        Ok(doc)
    }

    fn validate_shape(&self) -> Result<()> {
        if self.branches.is_empty() && self.equation.is_none() {
            return Err(bad("document has neither branches nor an equation"));
        }
        if let Some(l) = &self.labels {
            if l.len() != self.branches.len() {
                return Err(bad(format!("{} labels for {} branches", l.len(), self.branches.len())));
            }
        }
        Ok(())
    }

    /// Canonical JSON: fixed key order, absent optional keys omitted.
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        if let Some(n) = &self.name {
            m.insert("name".into(), json!(n));
        }
        if let Some(d) = &self.description {
            m.insert("description".into(), json!(d));
        }
        if let Some(f) = &self.field {
            m.insert("field".into(), json!({"var": f.var, "minpoly": f.minpoly.iter().map(fmt_q).collect::<Vec<_>>()}));
        }
        if !self.branches.is_empty() {
            m.insert("branches".into(), Value::Array(self.branches.iter().map(|b| json!({"x": series_json(&b.x), "y": series_json(&b.y)})).collect()));
        }
        if let Some(e) = &self.equation {
            m.insert("equation".into(), Value::Array(e.iter().map(|(i, j, c)| json!([i, j, c.to_json()])).collect()));
        }
        if let Some(l) = &self.labels {
            m.insert("labels".into(), json!(l));
        }
        Value::Object(m)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("JSON values always serialize")
    }

    pub fn equation_poly(&self) -> Option<BivariatePoly> {
        self.equation.as_ref().map(|e| BivariatePoly::from_terms(e.iter().cloned()))
    }

    pub fn has_branches(&self) -> bool {
        !self.branches.is_empty()
    }

    pub fn branch_list(&self) -> Result<Vec<Branch>> {
        self.branches.iter().map(|b| Branch::from_terms(&b.x, &b.y)).collect()
    }

    /// The marked curve; a declared equation is checked against the branches.
    pub fn curve(&self, n0: usize) -> Result<CurveGerm> {
        if !self.has_branches() {
            return Err(Error::Unsupported("this command needs branch parametrizations; the document gives only an equation".into()));
        }
        CurveGerm::new(self.branch_list()?, self.equation_poly(), n0)
    }

    /// The reduced equation: the declared one, else eliminated from the branches.
    pub fn equation_or_eliminate(&self, n0: usize) -> Result<BivariatePoly> {
        match self.equation_poly() {
            Some(f) if !self.has_branches() => Ok(f),
            _ => Ok(self.curve(n0)?.equation),
        }
    }

    /// Branch labels, defaulting to 1, 2, ...
    pub fn branch_labels(&self) -> Vec<String> {
        self.labels.clone().unwrap_or_else(|| (1..=self.branches.len()).map(|i| i.to_string()).collect())
    }
}
