use serde_json::{json, Map, Value};

use super::{DeductionTree, RuleApp, SepInstance};
use crate::ltl::{parse_formula, Formula};
use crate::trace::{parse_trace, FuturePoint, TraceSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("tree JSON: {0}")]
pub struct TreeJsonError(pub String);

fn set_json(s: &TraceSet) -> Value {
    Value::Array(s.iter().map(|t| Value::String(t.to_string())).collect())
}

fn indices(whole: &TraceSet, part: &TraceSet) -> Value {
    Value::Array(part.iter().filter_map(|s| whole.position(s)).map(Value::from).collect())
}

/// Serializes a tree: `{"a", "b", "rule", "arg", "children"}` per node.
pub fn tree_to_json(t: &DeductionTree) -> Value {
    let SepInstance { a, b } = &t.instance;
    let arg = match &t.rule {
        RuleApp::Atomic(p, pos) => Value::String(Formula::lit(p, *pos).to_string()),
        RuleApp::OrSplit(l, r) => json!({"left": indices(a, l), "right": indices(a, r)}),
        RuleApp::AndSplit(l, r) => json!({"left": indices(b, l), "right": indices(b, r)}),
        RuleApp::Next | RuleApp::WeakNext => Value::Null,
        RuleApp::Future(f) | RuleApp::Globally(f) => json!(f.0),
        RuleApp::Until(f, g) => json!({"f": f.0, "g": g.0}),
    };
    json!({
        "a": set_json(a),
        "b": set_json(b),
        "rule": t.rule.name(),
        "arg": arg,
        "children": t.children.iter().map(tree_to_json).collect::<Vec<_>>(),
    })
}

fn err<T>(msg: impl Into<String>) -> Result<T, TreeJsonError> {
    Err(TreeJsonError(msg.into()))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, TreeJsonError> {
    obj.get(key).ok_or_else(|| TreeJsonError(format!("missing field {key:?}")))
}

fn parse_set(v: &Value) -> Result<TraceSet, TreeJsonError> {
    let arr = v.as_array().ok_or_else(|| TreeJsonError("trace list must be an array".into()))?;
    arr.iter()
        .map(|x| {
            let s = x.as_str().ok_or_else(|| TreeJsonError("traces must be strings".into()))?;
            parse_trace(s).map_err(|e| TreeJsonError(e.to_string()))
        })
        .collect()
}

fn parse_positions(v: &Value) -> Result<FuturePoint, TreeJsonError> {
    let arr = v.as_array().ok_or_else(|| TreeJsonError("future point must be an array".into()))?;
    arr.iter()
        .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| TreeJsonError("positions must be integers".into())))
        .collect::<Result<_, _>>()
        .map(FuturePoint)
}

fn pick(whole: &TraceSet, v: &Value) -> Result<TraceSet, TreeJsonError> {
    let arr = v.as_array().ok_or_else(|| TreeJsonError("split part must be an index array".into()))?;
    arr.iter()
        .map(|x| {
            x.as_u64()
                .and_then(|i| whole.members().get(i as usize))
                .cloned()
                .ok_or_else(|| TreeJsonError(format!("bad split index {x}")))
        })
        .collect()
}

/// Inverse of [`tree_to_json`]. Only the shape is checked; use
/// `verify_tree` for the rules.
pub fn tree_from_json(v: &Value) -> Result<DeductionTree, TreeJsonError> {
    let obj = v.as_object().ok_or_else(|| TreeJsonError("node must be an object".into()))?;
    let a = parse_set(field(obj, "a")?)?;
    let b = parse_set(field(obj, "b")?)?;
    let arg = obj.get("arg").unwrap_or(&Value::Null);
    let tag = field(obj, "rule")?.as_str().ok_or_else(|| TreeJsonError("rule must be a string".into()))?;
    let rule = match tag {
        "atomic" => {
            let text = arg.as_str().ok_or_else(|| TreeJsonError("atomic arg must be a literal".into()))?;
            match parse_formula(text) {
                Ok(Formula::Lit(p, pos)) => RuleApp::Atomic(p, pos),
                _ => return err(format!("not a literal: {text:?}")),
            }
        }
        "or" => RuleApp::OrSplit(pick(&a, field_of(arg, "left")?)?, pick(&a, field_of(arg, "right")?)?),
        "and" => RuleApp::AndSplit(pick(&b, field_of(arg, "left")?)?, pick(&b, field_of(arg, "right")?)?),
        "next" => RuleApp::Next,
        "weak_next" => RuleApp::WeakNext,
        "future" => RuleApp::Future(parse_positions(arg)?),
        "globally" => RuleApp::Globally(parse_positions(arg)?),
        "until" => RuleApp::Until(parse_positions(field_of(arg, "f")?)?, parse_positions(field_of(arg, "g")?)?),
        other => return err(format!("unknown rule {other:?}")),
    };
    let children = match obj.get("children") {
        None => vec![],
        Some(Value::Array(kids)) => kids.iter().map(tree_from_json).collect::<Result<_, _>>()?,
        Some(_) => return err("children must be an array"),
    };
    Ok(DeductionTree {
        instance: SepInstance::new(a, b),
        rule,
        children,
    })
}

fn field_of<'a>(v: &'a Value, key: &str) -> Result<&'a Value, TreeJsonError> {
    field(v.as_object().ok_or_else(|| TreeJsonError("arg must be an object".into()))?, key)
}
