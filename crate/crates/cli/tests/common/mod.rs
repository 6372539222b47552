//! Checker for the subset of JSON Schema used by the files in `schemas/`: `type`, `required`,
//! `properties`, `additionalProperties: false`, `items`, `enum`, `anyOf`, `pattern`, `minimum`,
//! `maximum`. Unknown keywords are rejected so a schema edit cannot silently weaken the check.

use serde_json::Value;

const KNOWN: &[&str] = &[
    "$schema", "$id", "title", "type", "required", "properties", "additionalProperties", "items", "enum", "anyOf",
    "pattern", "minimum", "maximum",
];

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_u64() || v.is_i64(),
        other => panic!("unsupported type {other}"),
    }
}

pub fn validate(schema: &Value, v: &Value, path: &str, errors: &mut Vec<String>) {
    let obj = schema.as_object().expect("schema object");
    for key in obj.keys() {
        assert!(KNOWN.contains(&key.as_str()), "unsupported schema keyword {key}");
    }
    if let Some(t) = obj.get("type") {
        let ok = match t {
            Value::String(s) => type_matches(s, v),
            Value::Array(ts) => ts.iter().any(|s| type_matches(s.as_str().unwrap(), v)),
            _ => panic!("bad type"),
        };
        if !ok {
            errors.push(format!("{path}: {v} is not {t}"));
            return;
        }
    }
    if let Some(Value::Array(options)) = obj.get("enum") {
        if !options.contains(v) {
            errors.push(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(Value::Array(alts)) = obj.get("anyOf") {
        let ok = alts.iter().any(|a| {
            let mut e = Vec::new();
            validate(a, v, path, &mut e);
            e.is_empty()
        });
        if !ok {
            errors.push(format!("{path}: {v} matches no alternative"));
        }
    }
    if let (Some(Value::String(p)), Some(s)) = (obj.get("pattern"), v.as_str()) {
        if !regex::Regex::new(p).unwrap().is_match(s) {
            errors.push(format!("{path}: `{s}` does not match {p}"));
        }
    }
    if let Some(x) = v.as_f64() {
        if obj.get("minimum").and_then(Value::as_f64).is_some_and(|m| x < m) {
            errors.push(format!("{path}: {x} below minimum"));
        }
        if obj.get("maximum").and_then(Value::as_f64).is_some_and(|m| x > m) {
            errors.push(format!("{path}: {x} above maximum"));
        }
    }
    if let Some(map) = v.as_object() {
        for r in obj.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !map.contains_key(r.as_str().unwrap()) {
                errors.push(format!("{path}: missing {r}"));
            }
        }
        let props = obj.get("properties").and_then(Value::as_object);
        for (k, child) in map {
            match props.and_then(|p| p.get(k)) {
                Some(s) => validate(s, child, &format!("{path}/{k}"), errors),
                None if obj.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{path}: unexpected key {k}"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (obj.get("items"), v.as_array()) {
        for (i, child) in arr.iter().enumerate() {
            validate(items, child, &format!("{path}/{i}"), errors);
        }
    }
}
