//! CPLEX LP text output.

use std::collections::BTreeSet;
use std::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::model::{LinearModel, Sense, VarId};

const SPECIAL: &str = "!\"#$%&()/,.;?@_`'{}|~";

/// Maps arbitrary names onto LP-legal identifiers, keeping them unique.
fn sanitize_names<'a>(names: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut used = BTreeSet::new();
    names
        .map(|raw| {
            let mut s: String = raw
                .chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() || SPECIAL.contains(c) {
                        c
                    } else {
                        '_'
                    }
                })
                .collect();
            let bad_start = s
                .chars()
                .next()
                .is_none_or(|c| c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E');
            if bad_start {
                s.insert_str(0, "x_");
            }
            s.truncate(250);
            let mut candidate = s.clone();
            let mut k = 1;
            while !used.insert(candidate.clone()) {
                candidate = format!("{s}~{k}");
                k += 1;
            }
            candidate
        })
        .collect()
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    values.fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

fn write_terms(out: &mut String, terms: &[(VarId, BigInt)], names: &[String]) {
    if terms.is_empty() {
        // the format needs at least one term on a row
        match names.first() {
            Some(n) => {
                let _ = write!(out, " 0 {n}");
            }
            None => out.push_str(" 0"),
        }
        return;
    }
    for (i, (v, c)) in terms.iter().enumerate() {
        let sign = if c.is_negative() { "-" } else { "+" };
        let mag = c.abs();
        if i == 0 {
            if c.is_negative() {
                out.push_str(" -");
            }
        } else {
            let _ = write!(out, " {sign}");
        }
        if mag.is_one() {
            let _ = write!(out, " {}", names[v.0]);
        } else {
            let _ = write!(out, " {} {}", mag, names[v.0]);
        }
    }
}

fn scaled(terms: &[(VarId, BigRational)], rhs: Option<&BigRational>) -> (Vec<(VarId, BigInt)>, BigInt) {
    let l = lcm_of_denominators(terms.iter().map(|(_, c)| c).chain(rhs));
    let lq = BigRational::from_integer(l);
    let t = terms
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(v, c)| (*v, (c * &lq).to_integer()))
        .collect();
    let r = rhs.map(|r| (r * &lq).to_integer()).unwrap_or_default();
    (t, r)
}

/// Renders `model` in LP format. Rows with fractional data are multiplied
/// through by the lcm of their denominators.
pub fn export_lp(model: &LinearModel) -> String {
    let names = sanitize_names(model.vars.iter().map(|v| v.name.as_str()));
    let row_names = sanitize_names(model.constraints.iter().map(|c| c.name.as_str()));
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", model.name);
    match &model.objective {
        Some(o) => {
            out.push_str(match o.sense {
                Sense::Minimize => "Minimize\n",
                Sense::Maximize => "Maximize\n",
            });
            out.push_str(" obj:");
            let (t, _) = scaled(&o.terms, None);
            write_terms(&mut out, &t, &names);
            out.push('\n');
        }
        None => out.push_str("Minimize\n obj:\n"),
    }
    out.push_str("Subject To\n");
    for (c, name) in model.constraints.iter().zip(&row_names) {
        if let Some(comment) = &c.comment {
            for line in comment.lines() {
                let _ = writeln!(out, "\\ {line}");
            }
        }
        let (t, r) = scaled(&c.terms, Some(&c.rhs));
        let _ = write!(out, " {name}:");
        write_terms(&mut out, &t, &names);
        let _ = writeln!(out, " {} {}", c.relation.symbol(), r);
    }
    if !model.vars.is_empty() {
        out.push_str("Bounds\n");
        for n in &names {
            let _ = writeln!(out, " {n} >= 0");
        }
    }
    let ints: Vec<&String> = model
        .vars
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.integer)
        .map(|(_, n)| n)
        .collect();
    if !ints.is_empty() {
        out.push_str("Generals\n");
        for n in ints {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rat, Relation};

    #[test]
    fn names_are_made_legal() {
        let n = sanitize_names(["M(p a)", "2x", "M(p a)", "e1"].into_iter());
        assert_eq!(n, vec!["M(p_a)", "x_2x", "M(p_a)~1", "x_e1"]);
    }

    #[test]
    fn small_model_text() {
        let mut m = LinearModel::new("demo");
        let x = m.add_var("x", true);
        let y = m.add_var("y", false);
        m.add_constraint(
            "half",
            vec![(x, rat(1) / rat(2)), (y, rat(-1))],
            Relation::Le,
            rat(3) / rat(4),
        )
        .comment = Some("scaled row".into());
        m.add_int_constraint("tie", &[(x, 1), (y, 3)], Relation::Eq, 2);
        let text = export_lp(&m);
        let expected = "\\ demo\nMinimize\n obj:\nSubject To\n\\ scaled row\n half: 2 x - 4 y <= 3\n tie: x + 3 y = 2\nBounds\n x >= 0\n y >= 0\nGenerals\n x\nEnd\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn empty_model() {
        let m = LinearModel::new("empty");
        assert_eq!(export_lp(&m), "\\ empty\nMinimize\n obj:\nSubject To\nEnd\n");
    }
}
