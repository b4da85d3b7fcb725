//! JSON encodings. Every encoder has a decoder that inverts it.

use serde_json::{json, Value};

use crate::ck::{Forest, RootedTree};
use crate::error::ParseError;
use crate::lincomb::{LinComb, Tensor};
use crate::loops::LoopGraph;
use crate::perm::Perm;
use crate::quantize::HSeries;
use crate::scalar::Scalar;
use crate::toprec::{CorrExpr, CorrFactor, CorrRef, KernelStep, Label, Monomial};
use crate::tree::{graft, Tree};

pub trait Json: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, ParseError>;
}

fn bad(what: &str) -> ParseError {
    ParseError::new(0, format!("malformed {what} JSON"))
}

/// Serialize compactly.
pub fn to_json_string<T: Json>(x: &T) -> String {
    x.to_json().to_string()
}

/// Parse text and decode; syntax errors carry the byte offset of the
/// failing line start plus column.
pub fn from_json_str<T: Json>(text: &str) -> Result<T, ParseError> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        let line_start: usize = text.split_inclusive('\n').take(e.line().saturating_sub(1)).map(str::len).sum();
        ParseError::new(line_start + e.column().saturating_sub(1), e.to_string())
    })?;
    T::from_json(&v)
}

fn usize_of(v: &Value, what: &str) -> Result<usize, ParseError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(what))
}

impl Json for Perm {
    fn to_json(&self) -> Value {
        json!({ "perm": self.images() })
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        let arr = v.get("perm").and_then(Value::as_array).ok_or_else(|| bad("permutation"))?;
        let images = arr.iter().map(|x| usize_of(x, "permutation")).collect::<Result<_, _>>()?;
        Perm::new(images).map_err(|e| ParseError::new(0, e.to_string()))
    }
}

impl Json for Tree {
    fn to_json(&self) -> Value {
        match self.children() {
            None => json!({ "leaf": true }),
            Some((l, r)) => json!({ "left": l.to_json(), "right": r.to_json() }),
        }
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        if v.get("leaf") == Some(&Value::Bool(true)) {
            return Ok(Tree::Leaf);
        }
        match (v.get("left"), v.get("right")) {
            (Some(l), Some(r)) => Ok(graft(&Tree::from_json(l)?, &Tree::from_json(r)?)),
            _ => Err(bad("tree")),
        }
    }
}

impl Json for LoopGraph {
    fn to_json(&self) -> Value {
        let loops: Vec<[usize; 2]> = self.loops().iter().map(|&(a, b)| [a, b]).collect();
        json!({ "base": self.base().to_json(), "loops": loops })
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        let base = Tree::from_json(v.get("base").ok_or_else(|| bad("graph"))?)?;
        let loops = v
            .get("loops")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("graph"))?
            .iter()
            .map(|p| match p.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok((usize_of(a, "loop")?, usize_of(b, "loop")?)),
                _ => Err(bad("loop")),
            })
            .collect::<Result<_, _>>()?;
        LoopGraph::new(base, loops).map_err(|e| ParseError::new(0, e.to_string()))
    }
}

impl Json for RootedTree {
    fn to_json(&self) -> Value {
        json!({ "children": self.children.iter().map(Json::to_json).collect::<Vec<_>>() })
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        let children = v.get("children").and_then(Value::as_array).ok_or_else(|| bad("rooted tree"))?;
        Ok(RootedTree::with_children(
            children.iter().map(RootedTree::from_json).collect::<Result<_, _>>()?,
        ))
    }
}

impl Json for Forest {
    fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(Json::to_json).collect())
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        let arr = v.as_array().ok_or_else(|| bad("forest"))?;
        Ok(Forest(arr.iter().map(RootedTree::from_json).collect::<Result<_, _>>()?))
    }
}

macro_rules! serde_json_codec {
    ($($t:ty),*) => {$(
        impl Json for $t {
            fn to_json(&self) -> Value {
                serde_json::to_value(self).expect("plain data serializes")
            }

            fn from_json(v: &Value) -> Result<Self, ParseError> {
                serde_json::from_value(v.clone()).map_err(|e| ParseError::new(0, e.to_string()))
            }
        }
    )*};
}

serde_json_codec!(Label, CorrRef, CorrExpr, Monomial);

impl Json for CorrFactor {
    fn to_json(&self) -> Value {
        match self {
            CorrFactor::Unit => json!("unit"),
            CorrFactor::Ref(r) => r.to_json(),
        }
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        if v == "unit" {
            Ok(CorrFactor::Unit)
        } else {
            CorrRef::from_json(v).map(CorrFactor::Ref)
        }
    }
}

impl<B: Json> Json for Tensor<B> {
    fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(Json::to_json).collect())
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        let arr = v.as_array().ok_or_else(|| bad("tensor"))?;
        Ok(Tensor(arr.iter().map(B::from_json).collect::<Result<_, _>>()?))
    }
}

/// `[{"coeff": "p/q", "basis": …}, …]` in basis order.
impl<B: Json + Ord + Clone, R: Scalar> Json for LinComb<B, R> {
    fn to_json(&self) -> Value {
        Value::Array(
            self.iter()
                .map(|(b, c)| json!({ "coeff": c.to_text(), "basis": b.to_json() }))
                .collect(),
        )
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        let arr = v.as_array().ok_or_else(|| bad("linear combination"))?;
        let mut out = LinComb::zero();
        for term in arr {
            let c = term
                .get("coeff")
                .and_then(Value::as_str)
                .and_then(R::parse_text)
                .ok_or_else(|| bad("coefficient"))?;
            let b = B::from_json(term.get("basis").ok_or_else(|| bad("term"))?)?;
            out.add_term(b, c);
        }
        Ok(out)
    }
}

/// One coefficient object per power of `h`.
impl<R: Scalar> Json for HSeries<R> {
    fn to_json(&self) -> Value {
        Value::Array(self.coeffs().iter().map(Json::to_json).collect())
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        let arr = v.as_array().ok_or_else(|| bad("series"))?;
        Ok(HSeries::new(arr.iter().map(LinComb::from_json).collect::<Result<_, _>>()?))
    }
}

impl<R: Scalar> Json for KernelStep<R> {
    fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(c, refs)| json!({ "coeff": c.to_text(), "factors": refs.iter().map(Json::to_json).collect::<Vec<_>>() }))
            .collect();
        json!({ "kernel": self.base.to_json(), "terms": terms })
    }

    fn from_json(v: &Value) -> Result<Self, ParseError> {
        let base = Label::from_json(v.get("kernel").ok_or_else(|| bad("kernel step"))?)?;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("kernel step"))?
            .iter()
            .map(|t| {
                let c = t.get("coeff").and_then(Value::as_str).and_then(R::parse_text).ok_or_else(|| bad("coefficient"))?;
                let fs = t.get("factors").and_then(Value::as_array).ok_or_else(|| bad("term"))?;
                Ok((c, fs.iter().map(CorrRef::from_json).collect::<Result<_, _>>()?))
            })
            .collect::<Result<_, ParseError>>()?;
        Ok(KernelStep { base, terms })
    }
}
