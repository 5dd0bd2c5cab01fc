//! Reader and writer for a subset of the CPLEX LP text format.
//!
//! The writer emits one row per line and lists every variable in `Bounds`
//! in declaration order, so `write(read(write(m))) == write(m)`. The reader
//! accepts that layout plus `Binary`/`Binaries`/`Bin` and `st`/`s.t.`
//! section aliases. Rows may not span lines.

use std::fmt::Write as _;

use thiserror::Error;

use super::model::{Model, ModelError, Terms, VarKind};
use crate::lp::Relation;

const MAX_NAME_LEN: usize = 255;
const NAME_SYMBOLS: &str = "!\"#$%&()/,.;?@_`'{}|~";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpFormatError {
    #[error("name `{0}` is not legal in the LP format")]
    IllegalName(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn is_legal_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else { return false };
    name.len() <= MAX_NAME_LEN
        && !first.is_ascii_digit()
        && first != '.'
        && name.chars().all(|c| c.is_ascii_alphanumeric() || NAME_SYMBOLS.contains(c))
}

fn check_name(name: &str) -> Result<(), LpFormatError> {
    if is_legal_name(name) {
        Ok(())
    } else {
        Err(LpFormatError::IllegalName(name.to_string()))
    }
}

fn write_expr(out: &mut String, model: &Model, terms: &[(usize, f64)], constant: f64) {
    let mut first = true;
    for &(j, c) in terms {
        let sign = if c < 0.0 { "-" } else { "+" };
        if first {
            if c < 0.0 {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        let _ = write!(out, "{} {}", c.abs(), model.variables()[j].name);
        first = false;
    }
    if constant != 0.0 || first {
        if first {
            let _ = write!(out, "{constant}");
        } else {
            let sign = if constant < 0.0 { "-" } else { "+" };
            let _ = write!(out, " {sign} {}", constant.abs());
        }
    }
}

fn relation_str(relation: Relation) -> &'static str {
    match relation {
        Relation::Le => "<=",
        Relation::Ge => ">=",
        Relation::Eq => "=",
    }
}

fn bound_str(value: f64) -> String {
    if value == f64::INFINITY {
        "+inf".into()
    } else if value == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{value}")
    }
}

/// Serializes `model`. Indicator rows use `name: guard = v -> expr rel rhs`.
pub fn export_lp_format(model: &Model) -> Result<String, LpFormatError> {
    for v in model.variables() {
        check_name(&v.name)?;
    }
    for name in model.constraints().iter().map(|c| &c.name).chain(model.indicators().iter().map(|i| &i.name)) {
        check_name(name)?;
    }
    let mut out = String::from("Minimize\n obj: ");
    write_expr(&mut out, model, model.objective(), model.objective_constant());
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}: ", c.name);
        write_expr(&mut out, model, &c.terms, 0.0);
        let _ = writeln!(out, " {} {}", relation_str(c.relation), c.rhs);
    }
    for ind in model.indicators() {
        let guard = &model.variables()[ind.guard].name;
        let _ = write!(out, " {}: {} = {} -> ", ind.name, guard, ind.active_when as u8);
        write_expr(&mut out, model, &ind.terms, 0.0);
        let _ = writeln!(out, " {} {}", relation_str(ind.relation), ind.rhs);
    }
    out.push_str("Bounds\n");
    for v in model.variables() {
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", bound_str(v.lower), v.name, bound_str(v.upper));
        }
    }
    out.push_str("Binary\n");
    for v in model.variables().iter().filter(|v| v.kind == VarKind::Binary) {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    Binary,
    End,
}

fn section_header(line: &str) -> Option<Section> {
    match line.to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" => Some(Section::Bounds),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "end" => Some(Section::End),
        _ => None,
    }
}

fn parse_number(token: &str) -> Option<f64> {
    match token.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => token.parse().ok().filter(|v: &f64| v.is_finite()),
    }
}

fn parse_relation(token: &str) -> Option<Relation> {
    match token {
        "<=" | "=<" | "<" => Some(Relation::Le),
        ">=" | "=>" | ">" => Some(Relation::Ge),
        "=" => Some(Relation::Eq),
        _ => None,
    }
}

/// Parsed linear expression: named terms plus constant.
struct Expr {
    terms: Vec<(String, f64)>,
    constant: f64,
}

fn parse_expr(tokens: &[&str], line: usize) -> Result<Expr, LpFormatError> {
    let err = |message: String| LpFormatError::Syntax { line, message };
    let mut expr = Expr { terms: Vec::new(), constant: 0.0 };
    let mut i = 0;
    while i < tokens.len() {
        let mut sign = 1.0;
        if tokens[i] == "+" || tokens[i] == "-" {
            if tokens[i] == "-" {
                sign = -1.0;
            }
            i += 1;
        }
        let token = *tokens.get(i).ok_or_else(|| err("dangling sign".into()))?;
        if let Some(value) = parse_number(token) {
            match tokens.get(i + 1) {
                Some(&name) if name != "+" && name != "-" => {
                    expr.terms.push((name.to_string(), sign * value));
                    i += 2;
                }
                _ => {
                    expr.constant += sign * value;
                    i += 1;
                }
            }
        } else if is_legal_name(token) {
            expr.terms.push((token.to_string(), sign));
            i += 1;
        } else {
            return Err(err(format!("unexpected token `{token}`")));
        }
    }
    Ok(expr)
}

struct RawRow {
    line: usize,
    name: String,
    guard: Option<(String, bool)>,
    expr: Expr,
    relation: Relation,
    rhs: f64,
}

/// Parses text produced by [`export_lp_format`] (and hand-written files in
/// the same layout) back into a model.
pub fn import_lp_format(text: &str) -> Result<Model, LpFormatError> {
    let mut section = None;
    let mut objective: Option<Expr> = None;
    let mut rows: Vec<RawRow> = Vec::new();
    let mut bounds: Vec<(String, f64, f64)> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| LpFormatError::Syntax { line, message };
        let content = raw.split('\\').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(s) = section_header(content) {
            section = Some(s);
            continue;
        }
        let (label, body) = match content.split_once(':') {
            Some((l, b)) => (Some(l.trim()), b.trim()),
            None => (None, content),
        };
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match section {
            None => return Err(err("content before `Minimize`".into())),
            Some(Section::End) => return Err(err("content after `End`".into())),
            Some(Section::Objective) => {
                if objective.is_some() {
                    return Err(err("second objective".into()));
                }
                objective = Some(parse_expr(&tokens, line)?);
            }
            Some(Section::Constraints) => {
                let name = label.ok_or_else(|| err("row without a name".into()))?.to_string();
                check_name(&name).map_err(|_| err(format!("illegal row name `{name}`")))?;
                let (guard, rest) = match tokens.iter().position(|&t| t == "->") {
                    Some(p) => {
                        let [g, eq, v] = tokens[..p] else {
                            return Err(err("malformed indicator guard".into()));
                        };
                        let active = match (eq, v) {
                            ("=", "1") => true,
                            ("=", "0") => false,
                            _ => return Err(err("malformed indicator guard".into())),
                        };
                        (Some((g.to_string(), active)), &tokens[p + 1..])
                    }
                    None => (None, &tokens[..]),
                };
                let p = rest
                    .iter()
                    .position(|t| parse_relation(t).is_some())
                    .ok_or_else(|| err("row without a relation".into()))?;
                let relation = parse_relation(rest[p]).expect("checked");
                let [rhs] = rest[p + 1..] else {
                    return Err(err("right-hand side must be a single number".into()));
                };
                let rhs = parse_number(rhs).filter(|v| v.is_finite()).ok_or_else(|| err(format!("bad rhs `{rhs}`")))?;
                let expr = parse_expr(&rest[..p], line)?;
                rows.push(RawRow { line, name, guard, expr, relation, rhs });
            }
            Some(Section::Bounds) => match tokens.as_slice() {
                [name, free] if free.eq_ignore_ascii_case("free") => {
                    bounds.push((name.to_string(), f64::NEG_INFINITY, f64::INFINITY))
                }
                [lo, "<=", name, "<=", hi] => {
                    let lo = parse_number(lo).ok_or_else(|| err(format!("bad bound `{lo}`")))?;
                    let hi = parse_number(hi).ok_or_else(|| err(format!("bad bound `{hi}`")))?;
                    bounds.push((name.to_string(), lo, hi));
                }
                _ => return Err(err(format!("unsupported bound `{body}`"))),
            },
            Some(Section::Binary) => binaries.extend(tokens.iter().map(|t| t.to_string())),
        }
    }
    if section != Some(Section::End) {
        return Err(LpFormatError::Syntax { line: text.lines().count(), message: "missing `End`".into() });
    }
    let objective = objective.unwrap_or(Expr { terms: Vec::new(), constant: 0.0 });

    // Declaration order: Bounds first, then first appearance elsewhere.
    let mut order: Vec<String> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut note = |name: &str| {
        if seen.insert(name.to_string()) {
            order.push(name.to_string());
        }
    };
    for (name, _, _) in &bounds {
        note(name);
    }
    for (name, _) in &objective.terms {
        note(name);
    }
    for row in &rows {
        if let Some((g, _)) = &row.guard {
            note(g);
        }
        for (name, _) in &row.expr.terms {
            note(name);
        }
    }
    for name in &binaries {
        note(name);
    }

    let mut model = Model::new();
    for name in &order {
        check_name(name)?;
        let binary = binaries.contains(name);
        let (lo, hi) = bounds
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|&(_, lo, hi)| (lo, hi))
            .unwrap_or(if binary { (0.0, 1.0) } else { (0.0, f64::INFINITY) });
        let kind = if binary { VarKind::Binary } else { VarKind::Continuous };
        model.add_variable(name, kind, lo, hi)?;
    }
    let resolve = |model: &Model, terms: &[(String, f64)]| -> Terms {
        terms.iter().map(|(n, c)| (model.variable(n).expect("declared"), *c)).collect()
    };
    let obj_terms = resolve(&model, &objective.terms);
    model.set_objective(obj_terms, objective.constant)?;
    for row in &rows {
        let terms = resolve(&model, &row.expr.terms);
        let rhs = row.rhs - row.expr.constant;
        match &row.guard {
            Some((g, active)) => {
                let guard = model.variable(g).expect("declared");
                model.add_indicator(&row.name, guard, *active, terms, row.relation, rhs).map_err(|e| {
                    LpFormatError::Syntax { line: row.line, message: e.to_string() }
                })?;
            }
            None => {
                model.add_constraint(&row.name, terms, row.relation, rhs)?;
            }
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_model_is_header_and_footer() {
        assert_eq!(
            export_lp_format(&Model::new()).unwrap(),
            "Minimize\n obj: 0\nSubject To\nBounds\nBinary\nEnd\n"
        );
    }

    #[test]
    fn golden_single_binary() {
        let mut m = Model::new();
        let x = m.add_binary("x").unwrap();
        m.add_constraint("c1", vec![(x, 2.5)], Relation::Le, 1.0).unwrap();
        m.set_objective(vec![(x, -1.0)], 0.0).unwrap();
        let text = export_lp_format(&m).unwrap();
        assert_eq!(
            text,
            "Minimize\n obj: - 1 x\nSubject To\n c1: 2.5 x <= 1\nBounds\n 0 <= x <= 1\nBinary\n x\nEnd\n"
        );
    }

    fn sample() -> Model {
        let mut m = Model::new();
        let y = m.add_continuous("y_1", 0.0, f64::INFINITY).unwrap();
        let z = m.add_continuous("z", f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let w = m.add_continuous("w", -2.0, 0.125).unwrap();
        let k = m.add_binary("k_1_1").unwrap();
        m.add_constraint("r", vec![(y, 1.0), (z, -0.1), (w, 3.0)], Relation::Ge, -4.5).unwrap();
        m.add_constraint("e", vec![(k, 1.0)], Relation::Eq, 1.0).unwrap();
        m.add_indicator("ind", k, false, vec![(y, 1.0), (w, -1.0)], Relation::Ge, 0.0).unwrap();
        m.set_objective(vec![(y, 1.0), (z, 1e-7)], 2.0).unwrap();
        m
    }

    #[test]
    fn round_trip_is_idempotent() {
        let m = sample();
        let text = export_lp_format(&m).unwrap();
        let back = import_lp_format(&text).unwrap();
        assert_eq!(back.variables(), m.variables());
        assert_eq!(back.constraints(), m.constraints());
        assert_eq!(back.indicators(), m.indicators());
        assert_eq!(export_lp_format(&back).unwrap(), text);
    }

    #[test]
    fn reads_hand_written_layout() {
        let text = "\\ comment\nminimize\n obj: x + 2 y - 1\nst\n c: x + y >= 1\nbounds\nbinaries\n x\nend\n";
        let m = import_lp_format(text).unwrap();
        assert_eq!(m.variables()[0].kind, VarKind::Binary);
        assert_eq!(m.variables()[1].upper, f64::INFINITY);
        assert_eq!(m.objective_constant(), -1.0);
        assert_eq!(m.constraints()[0].terms, vec![(0, 1.0), (1, 1.0)]);
    }

    #[test]
    fn errors() {
        let mut m = Model::new();
        m.add_binary("1x").unwrap();
        assert_eq!(export_lp_format(&m), Err(LpFormatError::IllegalName("1x".into())));
        let mut m = Model::new();
        m.add_binary("a b").unwrap();
        assert!(export_lp_format(&m).is_err());
        assert!(matches!(import_lp_format("Minimize\n obj: x\n"), Err(LpFormatError::Syntax { .. })));
        assert!(matches!(
            import_lp_format("Minimize\n obj: x\nSubject To\n c: x >= \nEnd\n"),
            Err(LpFormatError::Syntax { line: 4, .. })
        ));
        assert!(import_lp_format("x\nMinimize\nEnd\n").is_err());
    }

    fn random_model() -> impl Strategy<Value = Model> {
        let bound = prop_oneof![Just(f64::NEG_INFINITY), Just(f64::INFINITY), (-40i32..40).prop_map(|v| f64::from(v) / 8.0)];
        let var = (any::<bool>(), bound.clone(), bound);
        (prop::collection::vec(var, 1..6), prop::collection::vec((0usize..3, -9i32..9, -9i32..9), 0..5), -5i32..5)
            .prop_map(|(vars, rows, constant)| {
                let mut m = Model::new();
                for (i, (binary, a, b)) in vars.iter().enumerate() {
                    if *binary {
                        m.add_binary(&format!("b_{i}")).unwrap();
                    } else {
                        let (lo, hi) = if a <= b { (*a, *b) } else { (*b, *a) };
                        let (lo, hi) = if lo == hi && lo.is_infinite() { (f64::NEG_INFINITY, f64::INFINITY) } else { (lo, hi) };
                        m.add_continuous(&format!("v{i}"), lo, hi).unwrap();
                    }
                }
                let n = m.num_vars();
                for (r, (rel, a, b)) in rows.into_iter().enumerate() {
                    let rel = [Relation::Le, Relation::Ge, Relation::Eq][rel];
                    let terms = vec![(r % n, f64::from(a) / 4.0), ((r + 1) % n, 0.5)];
                    let terms = if r % n == (r + 1) % n { vec![terms[0]] } else { terms };
                    m.add_constraint(&format!("c{r}"), terms, rel, f64::from(b) / 3.0).unwrap();
                }
                let obj = (0..n).map(|j| (j, j as f64 - 1.5)).collect();
                m.set_objective(obj, f64::from(constant)).unwrap();
                m
            })
    }

    proptest! {
        #[test]
        fn export_import_export_is_stable(m in random_model()) {
            let text = export_lp_format(&m).unwrap();
            let back = import_lp_format(&text).unwrap();
            prop_assert_eq!(back.variables(), m.variables());
            prop_assert_eq!(back.constraints(), m.constraints());
            prop_assert_eq!(export_lp_format(&back).unwrap(), text);
        }
    }
}
