use serde_json::Value;

use crate::Format;

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("reports serialize"),
        Format::Table => table(report),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Arrays of objects become column tables; everything else `key: value`.
fn table(report: &Value) -> String {
    let Value::Object(map) = report else { return scalar(report) };
    let mut lines = Vec::new();
    let mut tables = Vec::new();
    for (key, value) in map {
        match value {
            Value::Array(rows) if !rows.is_empty() && rows.iter().all(Value::is_object) => tables.push((key, rows)),
            _ => lines.push(format!("{key}: {}", scalar(value))),
        }
    }
    for (key, rows) in tables {
        lines.push(String::new());
        lines.push(format!("{key}:"));
        let mut columns: Vec<&String> = Vec::new();
        for row in rows {
            for k in row.as_object().expect("checked").keys() {
                if !columns.contains(&k) {
                    columns.push(k);
                }
            }
        }
        let cells: Vec<Vec<String>> =
            rows.iter().map(|r| columns.iter().map(|c| r.get(c.as_str()).map_or("-".into(), scalar)).collect()).collect();
        let widths: Vec<usize> = columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).max().unwrap_or(0).max(c.len()))
            .collect();
        let fmt_row = |row: Vec<String>| {
            row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        lines.push(fmt_row(columns.iter().map(|c| c.to_string()).collect()));
        lines.extend(cells.into_iter().map(fmt_row));
    }
    lines.join("\n")
}
