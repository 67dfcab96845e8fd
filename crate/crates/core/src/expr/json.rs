//! `{op, args}` JSON records for expression trees.

use super::{BinOp, Expr, Func, NamedConst};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid expression JSON: {0}")]
pub struct JsonError(String);

fn bin_name(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "add",
        BinOp::Sub => "sub",
        BinOp::Mul => "mul",
        BinOp::Div => "div",
    }
}

impl Expr {
    pub fn to_json(&self) -> Value {
        match self {
            Expr::Const(v) => json!({"op": "const", "value": v}),
            Expr::Named(n) => json!({"op": n.name()}),
            Expr::Var => json!({"op": "x"}),
            Expr::Neg(a) => json!({"op": "neg", "args": [a.to_json()]}),
            Expr::Binary(op, a, b) => {
                json!({"op": bin_name(*op), "args": [a.to_json(), b.to_json()]})
            }
            Expr::Pow(a, n) => json!({"op": "pow", "args": [a.to_json()], "exponent": n}),
            Expr::Call(f, a) => json!({"op": f.name(), "args": [a.to_json()]}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Expr, JsonError> {
        let err = |m: &str| JsonError(m.to_string());
        let op = v.get("op").and_then(Value::as_str).ok_or_else(|| err("missing `op`"))?;
        let args: Vec<Expr> = match v.get("args") {
            None => Vec::new(),
            Some(Value::Array(items)) => items.iter().map(Expr::from_json).collect::<Result<_, _>>()?,
            Some(_) => return Err(err("`args` must be an array")),
        };
        let arity = |n: usize| -> Result<(), JsonError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(JsonError(format!("`{op}` takes {n} argument(s)")))
            }
        };
        let mut it = args.clone().into_iter();
        let e = match op {
            "const" => {
                arity(0)?;
                let value = v
                    .get("value")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| err("`const` needs a numeric `value`"))?;
                Expr::Const(value)
            }
            "x" => {
                arity(0)?;
                Expr::Var
            }
            "pi" => Expr::Named(NamedConst::Pi),
            "e" => Expr::Named(NamedConst::E),
            "neg" => {
                arity(1)?;
                -it.next().unwrap()
            }
            "add" | "sub" | "mul" | "div" => {
                arity(2)?;
                let a = it.next().unwrap();
                let b = it.next().unwrap();
                let op = match op {
                    "add" => BinOp::Add,
                    "sub" => BinOp::Sub,
                    "mul" => BinOp::Mul,
                    _ => BinOp::Div,
                };
                Expr::binary(op, a, b)
            }
            "pow" => {
                arity(1)?;
                let n = v
                    .get("exponent")
                    .and_then(Value::as_i64)
                    .and_then(|n| i32::try_from(n).ok())
                    .ok_or_else(|| err("`pow` needs an integer `exponent`"))?;
                it.next().unwrap().powi(n)
            }
            name => {
                let f = Func::from_name(name).ok_or_else(|| JsonError(format!("unknown op `{name}`")))?;
                arity(1)?;
                Expr::call(f, it.next().unwrap())
            }
        };
        Ok(e)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(text) => super::parse(&text).map_err(D::Error::custom),
            v => Expr::from_json(&v).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn nested_records() {
        let e = parse("sin(x)^2+1").unwrap();
        let v = e.to_json();
        assert_eq!(
            v,
            json!({"op": "add", "args": [
                {"op": "pow", "exponent": 2, "args": [{"op": "sin", "args": [{"op": "x"}]}]},
                {"op": "const", "value": 1.0}
            ]})
        );
        assert_eq!(Expr::from_json(&v).unwrap(), e);
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<Expr>(&text).unwrap(), e);
        assert_eq!(serde_json::from_str::<Expr>("\"sin(x)^2+1\"").unwrap(), e);
    }

    #[test]
    fn rejects_malformed_records() {
        assert!(Expr::from_json(&json!({"op": "add", "args": [{"op": "x"}]})).is_err());
        assert!(Expr::from_json(&json!({"op": "tan", "args": [{"op": "x"}]})).is_err());
        assert!(Expr::from_json(&json!({"args": []})).is_err());
        assert!(Expr::from_json(&json!({"op": "pow", "args": [{"op": "x"}], "exponent": 1.5})).is_err());
    }
}
