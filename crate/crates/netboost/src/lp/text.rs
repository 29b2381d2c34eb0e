//! Plain-text LP interchange (the classic fixed "LP file" layout: objective,
//! constraint, bounds and end sections). Written for external-solver
//! debugging; the parser reads back exactly the subset the writer emits, and
//! a write/parse round trip preserves the optimum.
//!
//! Restrictions: minimization only, names must start with a letter and use
//! only letters, digits, `_`, `.`, `/` — guaranteed by the id rules of the
//! data model plus the `family/index` naming convention.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{LinearProgram, LpError, Sense};

/// Renders the program in LP text format. Every variable appears in the
/// Bounds section, so the parser can reconstruct the full variable set.
pub fn write_lp(lp: &LinearProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", lp.name());
    out.push_str("Minimize\n obj:");
    let mut first = true;
    for v in &lp.vars {
        if v.obj != 0.0 {
            push_term(&mut out, &mut first, v.obj, &v.name);
        }
    }
    if first {
        out.push_str(" 0 zero_objective_placeholder");
    }
    out.push_str("\nSubject To\n");
    for c in &lp.cons {
        let _ = write!(out, " {}:", c.name);
        let mut first = true;
        for &(v, coef) in &c.terms {
            push_term(&mut out, &mut first, coef, &lp.vars[v].name);
        }
        if first {
            out.push_str(" 0 zero_objective_placeholder");
        }
        let _ = writeln!(out, " {} {}", c.sense, fmt_num(c.rhs));
    }
    out.push_str("Bounds\n");
    let needs_placeholder = (lp.vars.iter().all(|v| v.obj == 0.0) || lp.cons.iter().any(|c| c.terms.is_empty()))
        && lp.variable("zero_objective_placeholder").is_none();
    if needs_placeholder {
        out.push_str(" zero_objective_placeholder = 0\n");
    }
    for v in &lp.vars {
        match (v.lb.is_finite(), v.ub.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " {} free", v.name);
            }
            _ if v.lb == v.ub => {
                let _ = writeln!(out, " {} = {}", v.name, fmt_num(v.lb));
            }
            (true, false) => {
                let _ = writeln!(out, " {} >= {}", v.name, fmt_num(v.lb));
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= {} <= {}", v.name, fmt_num(v.ub));
            }
            (true, true) => {
                let _ = writeln!(out, " {} <= {} <= {}", fmt_num(v.lb), v.name, fmt_num(v.ub));
            }
        }
    }
    out.push_str("End\n");
    out
}

fn push_term(out: &mut String, first: &mut bool, coef: f64, name: &str) {
    if *first {
        if coef < 0.0 {
            let _ = write!(out, " -{} {}", fmt_num(-coef), name);
        } else {
            let _ = write!(out, " {} {}", fmt_num(coef), name);
        }
        *first = false;
    } else if coef < 0.0 {
        let _ = write!(out, " - {} {}", fmt_num(-coef), name);
    } else {
        let _ = write!(out, " + {} {}", fmt_num(coef), name);
    }
}

/// Shortest representation that parses back to the same f64.
fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(f64),
    Plus,
    Minus,
    Le,
    Ge,
    Eq,
    Colon,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, LpError> {
    let mut toks = Vec::new();
    for line in src.lines() {
        let line = line.split('\\').next().unwrap_or(""); // strip comments
        let mut chars = line.chars().peekable();
        while let Some(&ch) = chars.peek() {
            match ch {
                c if c.is_whitespace() => {
                    chars.next();
                }
                ':' => {
                    chars.next();
                    toks.push(Tok::Colon);
                }
                '+' => {
                    chars.next();
                    toks.push(Tok::Plus);
                }
                '-' => {
                    chars.next();
                    toks.push(Tok::Minus);
                }
                '<' | '>' | '=' => {
                    chars.next();
                    if chars.peek() == Some(&'=') {
                        chars.next();
                    }
                    toks.push(match ch {
                        '<' => Tok::Le,
                        '>' => Tok::Ge,
                        _ => Tok::Eq,
                    });
                }
                _ => {
                    let mut word = String::new();
                    while let Some(&c) = chars.peek() {
                        let number_exponent_sign = (c == '-' || c == '+')
                            && word
                                .chars()
                                .next()
                                .map(|f| f.is_ascii_digit() || f == '.')
                                .unwrap_or(false)
                            && word.ends_with(['e', 'E']);
                        if c.is_whitespace() || (['+', '-', '<', '>', '=', ':'].contains(&c) && !number_exponent_sign) {
                            break;
                        }
                        word.push(c);
                        chars.next();
                    }
                    if word.is_empty() {
                        return Err(LpError::Text(format!("unexpected character '{ch}'")));
                    }
                    let first = word.chars().next().unwrap();
                    if first.is_ascii_digit() || first == '.' || word == "inf" {
                        let v: f64 = word.parse().map_err(|_| LpError::Text(format!("bad number '{word}'")))?;
                        toks.push(Tok::Num(v));
                    } else {
                        toks.push(Tok::Word(word));
                    }
                }
            }
        }
    }
    Ok(toks)
}

/// Parses the subset of LP text `write_lp` produces back into a program.
pub fn parse_lp(src: &str) -> Result<LinearProgram, LpError> {
    let toks = tokenize(src)?;
    let mut pos = 0usize;
    let err = |msg: &str| LpError::Text(msg.to_string());

    let section = |toks: &[Tok], pos: usize, kw: &str| -> bool {
        matches!(toks.get(pos), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    };

    if !section(&toks, pos, "minimize") {
        return Err(err("expected 'Minimize'"));
    }
    pos += 1;

    // objective: [label ':'] terms, up to 'Subject'
    let mut obj_terms: Vec<(String, f64)> = Vec::new();
    if matches!(toks.get(pos), Some(Tok::Word(_))) && matches!(toks.get(pos + 1), Some(Tok::Colon)) {
        pos += 2;
    }
    let stop_obj = |toks: &[Tok], p: usize| section(toks, p, "subject") || section(toks, p, "st") || section(toks, p, "s.t.");
    parse_terms(&toks, &mut pos, &mut obj_terms, &stop_obj)?;
    if !stop_obj(&toks, pos) {
        return Err(err("expected 'Subject To' after objective"));
    }
    pos += 1;
    if section(&toks, pos, "to") {
        pos += 1;
    }

    // constraints until 'Bounds' or 'End'
    struct RawCon {
        name: String,
        terms: Vec<(String, f64)>,
        sense: Sense,
        rhs: f64,
    }
    let mut raw_cons = Vec::new();
    loop {
        if section(&toks, pos, "bounds") || section(&toks, pos, "end") {
            break;
        }
        let Some(Tok::Word(name)) = toks.get(pos) else {
            return Err(err("expected constraint name"));
        };
        let name = name.clone();
        pos += 1;
        if !matches!(toks.get(pos), Some(Tok::Colon)) {
            return Err(LpError::Text(format!("constraint '{name}': expected ':'")));
        }
        pos += 1;
        let mut terms = Vec::new();
        let stop = |toks: &[Tok], p: usize| matches!(toks.get(p), Some(Tok::Le | Tok::Ge | Tok::Eq));
        parse_terms(&toks, &mut pos, &mut terms, &stop)?;
        let sense = match toks.get(pos) {
            Some(Tok::Le) => Sense::Le,
            Some(Tok::Ge) => Sense::Ge,
            Some(Tok::Eq) => Sense::Eq,
            _ => return Err(LpError::Text(format!("constraint '{name}': expected <=, >= or ="))),
        };
        pos += 1;
        let rhs = parse_signed_num(&toks, &mut pos).ok_or_else(|| LpError::Text(format!("constraint '{name}': expected rhs")))?;
        raw_cons.push(RawCon { name, terms, sense, rhs });
    }

    // bounds
    let mut bounds: HashMap<String, (f64, f64)> = HashMap::new();
    if section(&toks, pos, "bounds") {
        pos += 1;
        while !section(&toks, pos, "end") {
            match toks.get(pos).cloned() {
                Some(Tok::Word(name)) => {
                    pos += 1;
                    match toks.get(pos) {
                        Some(Tok::Word(w)) if w.eq_ignore_ascii_case("free") => {
                            pos += 1;
                            bounds.insert(name, (f64::NEG_INFINITY, f64::INFINITY));
                        }
                        Some(Tok::Ge) => {
                            pos += 1;
                            let v = parse_signed_num(&toks, &mut pos).ok_or_else(|| err("expected bound value"))?;
                            let e = bounds.entry(name).or_insert((0.0, f64::INFINITY));
                            e.0 = v;
                        }
                        Some(Tok::Le) => {
                            pos += 1;
                            let v = parse_signed_num(&toks, &mut pos).ok_or_else(|| err("expected bound value"))?;
                            let e = bounds.entry(name).or_insert((0.0, f64::INFINITY));
                            e.1 = v;
                        }
                        Some(Tok::Eq) => {
                            pos += 1;
                            let v = parse_signed_num(&toks, &mut pos).ok_or_else(|| err("expected bound value"))?;
                            bounds.insert(name, (v, v));
                        }
                        _ => return Err(LpError::Text(format!("bad bound line for '{name}'"))),
                    }
                }
                Some(Tok::Num(_)) | Some(Tok::Minus) | Some(Tok::Plus) => {
                    // lb <= name <= ub
                    let lb = parse_signed_num(&toks, &mut pos).ok_or_else(|| err("expected lower bound"))?;
                    if !matches!(toks.get(pos), Some(Tok::Le)) {
                        return Err(err("expected '<=' in range bound"));
                    }
                    pos += 1;
                    let Some(Tok::Word(name)) = toks.get(pos).cloned() else {
                        return Err(err("expected variable in range bound"));
                    };
                    pos += 1;
                    if !matches!(toks.get(pos), Some(Tok::Le)) {
                        return Err(err("expected second '<=' in range bound"));
                    }
                    pos += 1;
                    let ub = parse_signed_num(&toks, &mut pos).ok_or_else(|| err("expected upper bound"))?;
                    bounds.insert(name, (lb, ub));
                }
                _ => return Err(err("bad bounds section")),
            }
        }
    }
    if !section(&toks, pos, "end") {
        return Err(err("expected 'End'"));
    }

    // assemble: register every name seen anywhere
    let mut order: Vec<String> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let note = |n: &str, order: &mut Vec<String>, seen: &mut HashMap<String, usize>| {
        if !seen.contains_key(n) {
            seen.insert(n.to_string(), order.len());
            order.push(n.to_string());
        }
    };
    for (n, _) in &obj_terms {
        note(n, &mut order, &mut seen);
    }
    for c in &raw_cons {
        for (n, _) in &c.terms {
            note(n, &mut order, &mut seen);
        }
    }
    for n in bounds.keys() {
        note(n, &mut order, &mut seen);
    }

    let mut obj: HashMap<&str, f64> = HashMap::new();
    for (n, coef) in &obj_terms {
        *obj.entry(n).or_insert(0.0) += coef;
    }
    let mut lp = LinearProgram::new("parsed");
    for name in &order {
        if name == "zero_objective_placeholder" && !bounds.contains_key(name) {
            bounds.insert(name.clone(), (0.0, 0.0));
        }
        let (lb, ub) = bounds.get(name).copied().unwrap_or((0.0, f64::INFINITY));
        lp.add_variable(name, lb, ub, obj.get(name.as_str()).copied().unwrap_or(0.0))?;
    }
    for c in raw_cons {
        let terms: Vec<_> = c
            .terms
            .iter()
            .map(|(n, coef)| (lp.variable(n).expect("registered above"), *coef))
            .collect();
        lp.add_constraint(&c.name, terms, c.sense, c.rhs)?;
    }
    Ok(lp)
}

/// Parses `{[+|-] [coef] name}` sequences, accumulating (name, coefficient),
/// until `stop` says the current token starts the next section.
fn parse_terms(
    toks: &[Tok],
    pos: &mut usize,
    out: &mut Vec<(String, f64)>,
    stop: &dyn Fn(&[Tok], usize) -> bool,
) -> Result<(), LpError> {
    loop {
        if *pos >= toks.len() || stop(toks, *pos) {
            return Ok(());
        }
        let mut sign = 1.0;
        loop {
            match toks.get(*pos) {
                Some(Tok::Plus) => *pos += 1,
                Some(Tok::Minus) => {
                    sign = -sign;
                    *pos += 1;
                }
                _ => break,
            }
        }
        let coef = match toks.get(*pos) {
            Some(Tok::Num(v)) => {
                *pos += 1;
                *v
            }
            _ => 1.0,
        };
        match toks.get(*pos) {
            Some(Tok::Word(name)) => {
                out.push((name.clone(), sign * coef));
                *pos += 1;
            }
            _ => return Err(LpError::Text("expected variable name in expression".into())),
        }
    }
}

fn parse_signed_num(toks: &[Tok], pos: &mut usize) -> Option<f64> {
    let mut sign = 1.0;
    loop {
        match toks.get(*pos) {
            Some(Tok::Plus) => *pos += 1,
            Some(Tok::Minus) => {
                sign = -sign;
                *pos += 1;
            }
            _ => break,
        }
    }
    match toks.get(*pos) {
        Some(Tok::Num(v)) => {
            *pos += 1;
            Some(sign * v)
        }
        _ => None,
    }
}
