//! Validator for the subset of JSON Schema used by docs/schema: `type`, `const`,
//! `enum`, `required`, `properties`, `additionalProperties`, `items`, `minimum`,
//! `maximum` and `exclusiveMinimum`. Other keywords are ignored.

use serde_json::Value;

fn type_ok(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => false,
    }
}

pub fn validate(schema: &Value, v: &Value, path: &str, errors: &mut Vec<String>) {
    let Some(s) = schema.as_object() else { return };
    if let Some(t) = s.get("type") {
        let ok = match t {
            Value::String(name) => type_ok(name, v),
            Value::Array(names) => names
                .iter()
                .filter_map(Value::as_str)
                .any(|n| type_ok(n, v)),
            _ => true,
        };
        if !ok {
            errors.push(format!("{path}: expected type {t}, got {v}"));
            return;
        }
    }
    if let Some(c) = s.get("const") {
        if c != v && c.as_f64() != v.as_f64() {
            errors.push(format!("{path}: expected {c}, got {v}"));
        }
    }
    if let Some(Value::Array(options)) = s.get("enum") {
        if !options.contains(v) {
            errors.push(format!("{path}: {v} not in {options:?}"));
        }
    }
    if let Some(x) = v.as_f64() {
        let bound = |k: &str| s.get(k).and_then(Value::as_f64);
        if bound("minimum").is_some_and(|m| x < m) || bound("maximum").is_some_and(|m| x > m) {
            errors.push(format!("{path}: {x} out of bounds"));
        }
        if bound("exclusiveMinimum").is_some_and(|m| x <= m) {
            errors.push(format!("{path}: {x} not above the exclusive minimum"));
        }
    }
    if let Value::Object(map) = v {
        if let Some(Value::Array(req)) = s.get("required") {
            for k in req.iter().filter_map(Value::as_str) {
                if !map.contains_key(k) {
                    errors.push(format!("{path}: missing `{k}`"));
                }
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, x) in map {
            let sub = format!("{path}/{k}");
            match (props.and_then(|p| p.get(k)), s.get("additionalProperties")) {
                (Some(ps), _) => validate(ps, x, &sub, errors),
                (None, Some(Value::Bool(false))) => errors.push(format!("{sub}: not allowed")),
                (None, Some(extra)) => validate(extra, x, &sub, errors),
                (None, None) => {}
            }
        }
    }
    if let (Value::Array(xs), Some(items)) = (v, s.get("items")) {
        for (i, x) in xs.iter().enumerate() {
            validate(items, x, &format!("{path}/{i}"), errors);
        }
    }
}

#[test]
fn validator_rejects_what_it_should() {
    let schema = serde_json::json!({
        "type": "object",
        "required": ["a"],
        "additionalProperties": false,
        "properties": { "a": { "type": "integer", "minimum": 1 }, "b": { "enum": ["x"] } }
    });
    let check = |v: Value| {
        let mut e = Vec::new();
        validate(&schema, &v, "", &mut e);
        e.len()
    };
    assert_eq!(check(serde_json::json!({"a": 2, "b": "x"})), 0);
    assert_eq!(check(serde_json::json!({"b": "y"})), 2);
    assert_eq!(check(serde_json::json!({"a": 0.5, "c": 1})), 2);
}
