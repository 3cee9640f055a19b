//! Flat `key = value` configuration files.
//!
//! One assignment per line, dotted keys, `#` starts a comment outside
//! quotes. Values are quoted strings, numbers, booleans or `[a, b, ...]`
//! lists of numbers. Every malformed line is reported, not just the first.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String),
    Num(f64),
    Bool(bool),
    List(Vec<f64>),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Str(_) => "string",
            Value::Num(_) => "number",
            Value::Bool(_) => "boolean",
            Value::List(_) => "list",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: Value,
    /// 1-based source line; 0 for values set programmatically.
    pub line: usize,
}

/// A problem found while reading or validating a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub line: usize,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: ", self.line)?;
        }
        if let Some(k) = &self.key {
            write!(f, "{k}: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
}

fn parse_number(s: &str) -> Option<f64> {
    match s {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => s.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_value(text: &str) -> Result<Value, String> {
    if let Some(rest) = text.strip_prefix('"') {
        return match rest.strip_suffix('"') {
            Some(inner) if !inner.contains('"') => Ok(Value::Str(inner.to_string())),
            _ => Err(format!("unterminated or malformed string {text}")),
        };
    }
    if let Some(rest) = text.strip_prefix('[') {
        let inner = rest.strip_suffix(']').ok_or_else(|| format!("unterminated list {text}"))?;
        if inner.trim().is_empty() {
            return Ok(Value::List(Vec::new()));
        }
        return inner
            .split(',')
            .map(|item| parse_number(item.trim()).ok_or_else(|| format!("list item '{}' is not a number", item.trim())))
            .collect::<Result<Vec<_>, _>>()
            .map(Value::List);
    }
    match text {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    parse_number(text)
        .map(Value::Num)
        .ok_or_else(|| format!("cannot read value '{text}' (strings must be quoted)"))
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .split('.')
            .all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, Vec<Issue>> {
        let mut entries = BTreeMap::new();
        let mut issues = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let body = strip_comment(raw).trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                issues.push(Issue {
                    line,
                    key: None,
                    message: format!("expected `key = value`, found '{body}'"),
                });
                continue;
            };
            let key = key.trim();
            if !valid_key(key) {
                issues.push(Issue {
                    line,
                    key: None,
                    message: format!("malformed key '{key}'"),
                });
                continue;
            }
            match parse_value(value.trim()) {
                Ok(value) => {
                    if let Some(prev) = entries.insert(key.to_string(), Entry { value, line }) {
                        issues.push(Issue {
                            line,
                            key: Some(key.to_string()),
                            message: format!("duplicate key (first set on line {})", prev.line),
                        });
                    }
                }
                Err(message) => issues.push(Issue {
                    line,
                    key: Some(key.to_string()),
                    message,
                }),
            }
        }
        if issues.is_empty() {
            Ok(Self { entries })
        } else {
            Err(issues)
        }
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        let line = self.entries.get(key).map_or(0, |e| e.line);
        self.entries.insert(key.to_string(), Entry { value, line });
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = (&String, &Entry)> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_all_value_kinds() {
        let c = Config::parse(
            "# comment\nmanifold.type = \"hyperbolic\"  # trailing\nmanifold.m = 3\nsolver.R_schedule = [10, 20.5]\nab.numerics = false\nempty = []\na = \"x # not a comment\"\n",
        )
        .unwrap();
        assert_eq!(c.get("manifold.type").unwrap().value, Value::Str("hyperbolic".into()));
        assert_eq!(c.get("manifold.m").unwrap().line, 3);
        assert_eq!(c.get("solver.R_schedule").unwrap().value, Value::List(vec![10.0, 20.5]));
        assert_eq!(c.get("ab.numerics").unwrap().value, Value::Bool(false));
        assert_eq!(c.get("empty").unwrap().value, Value::List(vec![]));
        assert_eq!(c.get("a").unwrap().value, Value::Str("x # not a comment".into()));
    }

    #[test]
    fn collects_every_issue() {
        let issues = Config::parse("a = 1\nno equals\nb = hello\na = 2\nbad key = 3\nc = [1, x]\n").unwrap_err();
        let lines: Vec<usize> = issues.iter().map(|i| i.line).collect();
        assert_eq!(lines, vec![2, 3, 4, 5, 6]);
        assert!(issues[2].to_string().contains("duplicate"));
    }
}
