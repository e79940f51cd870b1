//! A reader for the subset of GML used by the classic network datasets:
//! `graph [ directed 0|1 node [ id N ... ] edge [ source N target N value W ] ]`.

use std::collections::{BTreeMap, HashMap};

use log::warn;

use super::{Graph, Ingested};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Key(String),
    Num(String),
    Str(String),
    Open,
    Close,
}

#[derive(Debug)]
enum Value {
    Num(String),
    Str(String),
    List(Vec<Entry>),
}

#[derive(Debug)]
struct Entry {
    key: String,
    value: Value,
    line: usize,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut chars = line.char_indices().peekable();
        while let Some(&(start, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if c == '[' {
                chars.next();
                out.push((Token::Open, line_no));
            } else if c == ']' {
                chars.next();
                out.push((Token::Close, line_no));
            } else if c == '"' {
                chars.next();
                let mut s = String::new();
                let mut closed = false;
                for (_, ch) in chars.by_ref() {
                    if ch == '"' {
                        closed = true;
                        break;
                    }
                    s.push(ch);
                }
                if !closed {
                    return Err(Error::parse(line_no, "unterminated string"));
                }
                out.push((Token::Str(s), line_no));
            } else {
                let mut end = start;
                while let Some(&(i, ch)) = chars.peek() {
                    if ch.is_whitespace() || ch == '[' || ch == ']' || ch == '"' {
                        break;
                    }
                    end = i + ch.len_utf8();
                    chars.next();
                }
                let word = &line[start..end];
                let first = word.chars().next().expect("non-empty word");
                let tok = if first.is_ascii_alphabetic() || first == '_' {
                    Token::Key(word.to_owned())
                } else if word.parse::<f64>().is_ok() {
                    Token::Num(word.to_owned())
                } else {
                    return Err(Error::parse(line_no, format!("unexpected token `{word}`")));
                };
                out.push((tok, line_no));
            }
        }
    }
    Ok(out)
}

fn parse_list(
    tokens: &[(Token, usize)],
    pos: &mut usize,
    nested: Option<usize>,
) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    loop {
        let Some((tok, line)) = tokens.get(*pos) else {
            return match nested {
                Some(open_line) => Err(Error::parse(
                    open_line,
                    "unbalanced `[`: list is never closed",
                )),
                None => Ok(entries),
            };
        };
        *pos += 1;
        let key = match tok {
            Token::Close if nested.is_some() => return Ok(entries),
            Token::Close => return Err(Error::parse(*line, "unbalanced `]`")),
            Token::Key(k) => k.clone(),
            other => {
                return Err(Error::parse(
                    *line,
                    format!("expected a key, found {other:?}"),
                ))
            }
        };
        let Some((vtok, vline)) = tokens.get(*pos) else {
            return Err(Error::parse(*line, format!("key `{key}` has no value")));
        };
        *pos += 1;
        let value = match vtok {
            Token::Num(s) => Value::Num(s.clone()),
            Token::Str(s) => Value::Str(s.clone()),
            Token::Key(s) => Value::Str(s.clone()),
            Token::Open => Value::List(parse_list(tokens, pos, Some(*vline))?),
            Token::Close => return Err(Error::parse(*vline, format!("key `{key}` has no value"))),
        };
        entries.push(Entry {
            key,
            value,
            line: *line,
        });
    }
}

fn integer(entry: &Entry) -> Result<i64> {
    match &entry.value {
        Value::Num(s) => s
            .parse::<i64>()
            .or_else(|_| {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.fract() == 0.0 && x.abs() < 9.0e15)
                    .map(|x| x as i64)
                    .ok_or(())
            })
            .map_err(|_| {
                Error::parse(
                    entry.line,
                    format!("`{}` must be an integer, found {s}", entry.key),
                )
            }),
        _ => Err(Error::parse(
            entry.line,
            format!("`{}` must be an integer", entry.key),
        )),
    }
}

fn find<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Entry> {
    entries.iter().find(|e| e.key == key)
}

/// Parses a GML document. Dense ids follow ascending GML `id`; node names
/// are the ids rendered as text. Scalar node attributes (such as `label` or
/// `value`) are kept for ground-truth lookup. Edges with a `value` (or
/// `weight`) mark the graph as weighted.
pub fn parse_gml(text: &str) -> Result<Ingested> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let top = parse_list(&tokens, &mut pos, None)?;

    let graph_entry =
        find(&top, "graph").ok_or_else(|| Error::parse(1, "no `graph [ ... ]` block"))?;
    let Value::List(body) = &graph_entry.value else {
        return Err(Error::parse(graph_entry.line, "`graph` must be a list"));
    };

    // Directed arcs are folded by summing both directions per unordered
    // pair, the same path undirected duplicates take, so the flag is only
    // validated.
    if let Some(e) = find(body, "directed") {
        integer(e)?;
    }

    let mut nodes: Vec<(i64, BTreeMap<String, String>)> = Vec::new();
    let mut arcs_raw: Vec<(i64, i64, f64, usize)> = Vec::new();
    let mut has_values = false;

    for entry in body {
        match (entry.key.as_str(), &entry.value) {
            ("node", Value::List(fields)) => {
                let id_entry = find(fields, "id")
                    .ok_or_else(|| Error::parse(entry.line, "node without `id`"))?;
                let id = integer(id_entry)?;
                let mut attrs = BTreeMap::new();
                for f in fields.iter().filter(|f| f.key != "id") {
                    match &f.value {
                        Value::Num(s) | Value::Str(s) => {
                            attrs.entry(f.key.clone()).or_insert_with(|| s.clone());
                        }
                        Value::List(_) => {}
                    }
                }
                nodes.push((id, attrs));
            }
            ("edge", Value::List(fields)) => {
                let source = find(fields, "source")
                    .ok_or_else(|| Error::parse(entry.line, "edge without `source`"))?;
                let target = find(fields, "target")
                    .ok_or_else(|| Error::parse(entry.line, "edge without `target`"))?;
                let weight = match find(fields, "value").or_else(|| find(fields, "weight")) {
                    Some(w) => {
                        has_values = true;
                        let Value::Num(s) = &w.value else {
                            return Err(Error::parse(w.line, "edge weight must be numeric"));
                        };
                        let x: f64 = s
                            .parse()
                            .map_err(|_| Error::parse(w.line, "edge weight must be numeric"))?;
                        if !(x.is_finite() && x > 0.0) {
                            return Err(Error::parse(
                                w.line,
                                format!("edge weight {x} must be positive"),
                            ));
                        }
                        x
                    }
                    None => 1.0,
                };
                arcs_raw.push((integer(source)?, integer(target)?, weight, entry.line));
            }
            ("node" | "edge", _) => {
                return Err(Error::parse(
                    entry.line,
                    format!("`{}` must be a list", entry.key),
                ));
            }
            _ => {}
        }
    }

    nodes.sort_by_key(|(id, _)| *id);
    if let Some(w) = nodes.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::parse(1, format!("duplicate node id {}", w[0].0)));
    }
    let dense: HashMap<i64, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (*id, i))
        .collect();

    let mut arcs = Vec::with_capacity(arcs_raw.len());
    let mut dropped = 0;
    for (s, t, w, line) in arcs_raw {
        let lookup = |x: i64| {
            dense
                .get(&x)
                .copied()
                .ok_or_else(|| Error::parse(line, format!("edge references unknown node id {x}")))
        };
        let (u, v) = (lookup(s)?, lookup(t)?);
        if u == v {
            dropped += 1;
        }
        arcs.push((u, v, w));
    }
    if dropped > 0 {
        warn!("dropped {dropped} self-loop edge(s)");
    }
    let names = nodes.iter().map(|(id, _)| id.to_string()).collect();
    let attributes = nodes.into_iter().map(|(_, a)| a).collect();
    let graph = Graph::from_arcs(names, arcs, has_values)?.with_attributes(attributes);
    Ok(Ingested {
        graph,
        dropped_self_loops: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn minimal_graph() {
        let g = parse_gml("graph [ node [ id 0 ] node [ id 1 ] edge [ source 0 target 1 ] ]")
            .unwrap()
            .graph;
        assert_eq!(g.node_count(), 2);
        assert_eq!(
            g.edges(),
            &[Edge {
                u: 0,
                v: 1,
                weight: 1.0
            }]
        );
        assert!(!g.is_weighted());
    }

    #[test]
    fn directed_arcs_fold() {
        let text = "graph [\n directed 1\n node [ id 0 ]\n node [ id 1 ]\n edge [ source 0 target 1 value 1 ]\n edge [ source 1 target 0 value 1 ]\n]";
        let g = parse_gml(text).unwrap().graph;
        assert_eq!(
            g.edges(),
            &[Edge {
                u: 0,
                v: 1,
                weight: 2.0
            }]
        );
    }

    #[test]
    fn ids_sorted_and_attributes_kept() {
        let text = r#"Creator "someone"
graph
[
  node
  [
    id 7
    label "Seven Up"
    value "c"
    graphics [ x 1.0 y 2.0 ]
  ]
  node [ id 3 label "three" value 1 ]
  edge [ source 7 target 3 value 2.5 ]
]"#;
        let g = parse_gml(text).unwrap().graph;
        assert_eq!(g.node_names(), &["3", "7"]);
        assert_eq!(g.attribute(1, "label"), Some("Seven Up"));
        assert_eq!(g.attribute(1, "value"), Some("c"));
        assert_eq!(g.attribute(0, "value"), Some("1"));
        assert_eq!(g.attribute(1, "x"), None);
        assert!(g.is_weighted());
        assert_eq!(g.edges()[0].weight, 2.5);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            parse_gml("graph [ node [ id 0 ]"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_gml("graph [ ] ]"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_gml("graph [ node [ label \"x\" ] ]"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_gml("graph [ node [ id 0 ] edge [ target 0 ] ]"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_gml("graph [ node [ id 0 ] edge [ source 0 target 4 ] ]"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_gml("nothing 1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn error_line_points_at_unclosed_list() {
        match parse_gml("graph [\n node [ id 0 ]\n node [\n id 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
