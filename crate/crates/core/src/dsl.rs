//! Line-oriented text format for systems.
//!
//! ```text
//! # comment
//! place p1 init 2
//! place p2
//! trans t1
//! arc p1 -> t1 weight 2
//! arc t1 -> p2
//! ```

use std::fmt::Write;

use thiserror::Error;

use crate::net::{Marking, Net, NetError, System};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct DslError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> DslError {
    DslError {
        line,
        message: message.into(),
    }
}

fn number(line: usize, tok: Option<&str>, what: &str) -> Result<u64, DslError> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| err(line, format!("`{tok}` is not a valid {what}")))
}

pub fn parse(text: &str) -> Result<System, DslError> {
    let mut b = Net::builder();
    let mut places: Vec<(String, u64)> = Vec::new();
    let mut arcs: Vec<(usize, String, String, u64)> = Vec::new();
    let mut seen = std::collections::HashMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["place", id, rest @ ..] => {
                let init = match rest {
                    [] => 0,
                    ["init", n] => number(line, Some(n), "token count")?,
                    _ => return Err(err(line, "expected `place <id> [init <n>]`")),
                };
                if let Some(prev) = seen.insert(id.to_string(), line) {
                    return Err(err(line, format!("`{id}` already declared on line {prev}")));
                }
                b.place(*id);
                places.push((id.to_string(), init));
            }
            ["trans", id] => {
                if let Some(prev) = seen.insert(id.to_string(), line) {
                    return Err(err(line, format!("`{id}` already declared on line {prev}")));
                }
                b.transition(*id);
            }
            ["arc", from, "->", to, rest @ ..] => {
                let w = match rest {
                    [] => 1,
                    ["weight", n] => number(line, Some(n), "weight")?,
                    _ => return Err(err(line, "expected `arc <a> -> <b> [weight <n>]`")),
                };
                if w == 0 {
                    return Err(err(line, "arc weight must be positive"));
                }
                arcs.push((line, from.to_string(), to.to_string(), w));
            }
            [kw, ..] => return Err(err(line, format!("unknown statement `{kw}`"))),
        }
    }
    // resolve arcs one at a time so failures point at their line
    for (line, from, to, w) in &arcs {
        for id in [from, to] {
            if !seen.contains_key(id.as_str()) {
                return Err(err(*line, format!("unknown identifier `{id}`")));
            }
        }
        b.arc(from.as_str(), to.as_str(), *w);
        if let Err(e) = b.build() {
            return Err(err(*line, e.to_string()));
        }
    }
    let net = b.build().map_err(|e: NetError| err(0, e.to_string()))?;
    let m0 = Marking(places.iter().map(|(_, k)| *k).collect());
    System::new(net, m0).map_err(|e| err(0, e.to_string()))
}

/// Canonical text: places, transitions, then arcs grouped by transition.
pub fn to_text(s: &System) -> String {
    let net = &s.net;
    let mut out = String::new();
    for (p, name) in net.place_names().iter().enumerate() {
        if s.m0[p] > 0 {
            let _ = writeln!(out, "place {} init {}", name, s.m0[p]);
        } else {
            let _ = writeln!(out, "place {name}");
        }
    }
    for name in net.transition_names() {
        let _ = writeln!(out, "trans {name}");
    }
    for (a, b, w) in net.arcs() {
        if w == 1 {
            let _ = writeln!(out, "arc {a} -> {b}");
        } else {
            let _ = writeln!(out, "arc {a} -> {b} weight {w}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_small() {
        let s = parse("place p init 2 # two tokens\nplace q\ntrans t\narc p -> t weight 2\narc t -> q\n").unwrap();
        assert_eq!(s.m0, Marking(vec![2, 0]));
        let t = s.net.transition("t").unwrap();
        assert_eq!(s.net.weight_pt(0, t), 2);
        assert_eq!(s.net.weight_tp(t, 1), 1);
        assert_eq!(parse(&to_text(&s)).unwrap(), s);
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse("place p\n\ntrans t\narc p -> u\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse("place p\nplace p\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse("place p init x\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse("place p\ntrans t\narc p -> t weight 0\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse("place p\ntrans t\narc p -> t\narc p -> t\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse("place p\nplace q\narc p -> q\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse("transition t\n").unwrap_err();
        assert_eq!(e.line, 1);
    }
}
