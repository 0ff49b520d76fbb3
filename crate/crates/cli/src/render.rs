//! Text and CSV renderings derived from the canonical JSON report.

use serde_json::Value;

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_leaf(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn write_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    _ if is_leaf(x) => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x))),
                    Value::Array(a) if a.iter().all(is_leaf) => {
                        let items: Vec<String> = a.iter().map(scalar_text).collect();
                        out.push_str(&format!("{pad}{k}: [{}]\n", items.join(", ")));
                    }
                    _ => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_text(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if is_leaf(x) {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    write_text(x, indent + 1, out);
                }
            }
        }
        leaf => out.push_str(&format!("{pad}{}\n", scalar_text(leaf))),
    }
}

/// Indented `key: value` listing.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_text(v, 0, &mut out);
    out
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&join(k), x, rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, rows)),
        leaf => rows.push((prefix.to_string(), scalar_text(leaf))),
    }
}

/// One `path,value` row per leaf.
pub fn to_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["path", "value"]).expect("in-memory write");
    for (p, x) in rows {
        w.write_record([p, x]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_and_csv() {
        let v = json!({"a": 1, "b": {"c": [1, 2]}, "d": [{"e": "x,y"}]});
        assert_eq!(to_text(&v), "a: 1\nb:\n  c: [1, 2]\nd:\n  -\n    e: x,y\n");
        assert_eq!(to_csv(&v), "path,value\na,1\nb.c.0,1\nb.c.1,2\nd.0.e,\"x,y\"\n");
    }
}
