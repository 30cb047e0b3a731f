//! The game-specification language.
//!
//! ```text
//! sort int;
//! vars x;
//! env { x' = x + 1 }
//! move reset { x' = 0 }
//! guarantee { 0 <= x <= 2 }
//! objective safety;
//! mode EA;
//! ```
//!
//! Formulas use infix linear arithmetic with exact decimal and fractional
//! literals (`1.9`, `3/2`, and `1.9rep(20)` for 1.9 followed by twenty
//! nines in total), comparisons (which may be chained), `k | t` and `k !| t`
//! for divisibility, `not`, `and`, `or` and `=>`. A trailing `'` names the
//! next-state copy of a variable. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::{Atom, Formula, LinTerm, Rel, Sort, Var};
use crate::game::{GameSpec, Mode, Move, Objective};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Num(r) => write!(f, "`{}`", r),
            Tok::Sym(s) => write!(f, "`{}`", s),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 22] = [
    "=>", "<=", ">=", "==", "!=", "!|", "&&", "||", "<", ">", "=", "+", "-", "*", "/", "(", ")", "{", "}",
    ";", ",", ":",
];

fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (l, cl) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump(&mut i, &mut line, &mut col, 1);
            }
            while i < chars.len() && chars[i] == '\'' {
                bump(&mut i, &mut line, &mut col, 1);
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l, col: cl });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                bump(&mut i, &mut line, &mut col, 1);
            }
            let rest: String = chars[i..chars.len().min(i + 4)].iter().collect();
            if rest == "rep(" {
                while i < chars.len() && chars[i] != ')' {
                    bump(&mut i, &mut line, &mut col, 1);
                }
                if i < chars.len() {
                    bump(&mut i, &mut line, &mut col, 1);
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = Rational::parse_literal(&text).ok_or_else(|| Diagnostic {
                line: l,
                col: cl,
                message: format!("malformed number `{}`", text),
            })?;
            out.push(Token { tok: Tok::Num(value), line: l, col: cl });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let sym = SYMBOLS.iter().find(|s| rest.starts_with(**s)).copied().or(match c {
            '|' => Some("|"),
            _ => None,
        });
        match sym {
            Some(s) => {
                bump(&mut i, &mut line, &mut col, s.len());
                out.push(Token { tok: Tok::Sym(s), line: l, col: cl });
            }
            None => {
                return Err(Diagnostic { line: l, col: cl, message: format!("unexpected character `{}`", c) })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Which variables a formula section may mention.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Scope {
    Step,
    State,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    sort: Sort,
    vars: BTreeMap<String, Var>,
    scope: Scope,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, col) = self.here();
        Err(Diagnostic { line, col, message: message.into() })
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(x) if *x == s) || matches!(self.peek(), Tok::Ident(x) if x == s) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{}`, found {}", s, self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            t => self.err(format!("expected a name, found {}", t)),
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat("=>") {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut items = vec![self.conjunction()?];
        while self.eat("or") || self.eat("||") {
            items.push(self.conjunction()?);
        }
        Ok(Formula::or(items))
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut items = vec![self.unary()?];
        while self.eat("and") || self.eat("&&") {
            items.push(self.unary()?);
        }
        Ok(Formula::and(items))
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat("not") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat("true") {
            return Ok(Formula::True);
        }
        if self.eat("false") {
            return Ok(Formula::False);
        }
        if matches!(self.peek(), Tok::Sym("(")) {
            let save = self.pos;
            match self.comparison() {
                Ok(f) => return Ok(f),
                Err(e1) => {
                    let far = self.pos;
                    self.pos = save;
                    self.next();
                    let inner = self.formula().and_then(|f| self.expect(")").map(|_| f));
                    return match inner {
                        Ok(f) => Ok(f),
                        Err(e2) => {
                            if far > self.pos {
                                Err(e1)
                            } else {
                                Err(e2)
                            }
                        }
                    };
                }
            }
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Formula> {
        if let Tok::Num(k) = self.peek().clone() {
            let save = self.pos;
            self.next();
            let negated = match self.peek() {
                Tok::Sym("|") => false,
                Tok::Sym("!|") => true,
                _ => {
                    self.pos = save;
                    return self.chain();
                }
            };
            self.next();
            if self.sort != Sort::Int || !k.is_integer() || !k.is_positive() {
                self.pos = save;
                return self.err("divisibility needs int variables and a positive integer modulus");
            }
            let t = self.expr()?;
            return Ok(Atom::divides(k.numer(), t, negated).into());
        }
        self.chain()
    }

    fn rel(&mut self) -> Option<(Rel, bool, bool)> {
        // (relation, operands swapped, negated)
        let r = match self.peek() {
            Tok::Sym("<=") => (Rel::Le, false, false),
            Tok::Sym("<") => (Rel::Lt, false, false),
            Tok::Sym(">=") => (Rel::Le, true, false),
            Tok::Sym(">") => (Rel::Lt, true, false),
            Tok::Sym("=") | Tok::Sym("==") => (Rel::Eq, false, false),
            Tok::Sym("!=") => (Rel::Eq, false, true),
            _ => return None,
        };
        self.next();
        Some(r)
    }

    fn chain(&mut self) -> PResult<Formula> {
        let mut lhs = self.expr()?;
        let mut parts = Vec::new();
        while let Some((rel, swap, neg)) = self.rel() {
            let rhs = self.expr()?;
            let (a, b) = if swap { (&rhs, &lhs) } else { (&lhs, &rhs) };
            let f = Formula::compare(a, rel, b);
            parts.push(if neg { Formula::not(f) } else { f });
            lhs = rhs;
        }
        if parts.is_empty() {
            return self.err(format!("expected a comparison, found {}", self.peek()));
        }
        Ok(Formula::and(parts))
    }

    fn expr(&mut self) -> PResult<LinTerm> {
        let mut t = self.product()?;
        loop {
            if self.eat("+") {
                t = t.add(&self.product()?);
            } else if self.eat("-") {
                t = t.sub(&self.product()?);
            } else {
                return Ok(t);
            }
        }
    }

    fn product(&mut self) -> PResult<LinTerm> {
        let mut t = self.factor()?;
        loop {
            let (line, col) = self.here();
            if self.eat("*") {
                let u = self.factor()?;
                t = if t.is_constant() {
                    u.scale(t.constant_part())
                } else if u.is_constant() {
                    t.scale(u.constant_part())
                } else {
                    return Err(Diagnostic { line, col, message: "nonlinear product".into() });
                };
            } else if self.eat("/") {
                let u = self.factor()?;
                if !u.is_constant() || u.constant_part().is_zero() {
                    return Err(Diagnostic { line, col, message: "division by a non-constant or zero".into() });
                }
                t = t.scale(&u.constant_part().recip());
            } else {
                break;
            }
        }
        if self.sort == Sort::Int
            && (!t.constant_part().is_integer() || t.coeffs().iter().any(|(_, c)| !c.is_integer()))
        {
            return self.err("non-integer coefficient in an int spec");
        }
        Ok(t)
    }

    fn factor(&mut self) -> PResult<LinTerm> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Sym("-") => {
                self.next();
                Ok(self.factor()?.negate())
            }
            Tok::Sym("(") => {
                self.next();
                let t = self.expr()?;
                self.expect(")")?;
                Ok(t)
            }
            Tok::Num(k) => {
                self.next();
                Ok(LinTerm::constant(k))
            }
            Tok::Ident(name) => {
                self.next();
                let primes = name.len() - name.trim_end_matches('\'').len();
                let base = name.trim_end_matches('\'');
                let Some(v) = self.vars.get(base) else {
                    return Err(Diagnostic { line, col, message: format!("unknown variable `{}`", name) });
                };
                let limit = if self.scope == Scope::Step { 1 } else { 0 };
                if primes > limit {
                    let message = if self.scope == Scope::State {
                        format!("primed variable in property: `{}`", name)
                    } else {
                        format!("unknown variable `{}`", name)
                    };
                    return Err(Diagnostic { line, col, message });
                }
                Ok(LinTerm::var(&v.suffixed(&"'".repeat(primes))))
            }
            t => Err(Diagnostic { line, col, message: format!("expected a term, found {}", t) }),
        }
    }

    fn block(&mut self, scope: Scope) -> PResult<Formula> {
        self.expect("{")?;
        self.scope = scope;
        let f = if matches!(self.peek(), Tok::Sym("}")) { Formula::True } else { self.formula()? };
        self.expect("}")?;
        Ok(f)
    }

    fn sort_name(&mut self) -> PResult<Sort> {
        match self.ident()?.as_str() {
            "int" => Ok(Sort::Int),
            "real" => Ok(Sort::Real),
            s => self.err(format!("unknown sort `{}`", s)),
        }
    }
}

/// Parses a spec; on failure the diagnostics carry line and column.
pub fn parse_spec(src: &str) -> Result<GameSpec, Vec<Diagnostic>> {
    let toks = lex(src).map_err(|d| vec![d])?;
    let mut p = Parser { toks, pos: 0, sort: Sort::Real, vars: BTreeMap::new(), scope: Scope::Step };
    let mut declared_sort: Option<Sort> = None;
    let mut order: Vec<Var> = Vec::new();
    let mut env = None;
    let mut moves: Vec<Move> = Vec::new();
    let mut property = None;
    let mut objective = None;
    let mut mode = None;
    let mut diags = Vec::new();
    let fail = |d: Diagnostic| vec![d];
    while !matches!(p.peek(), Tok::Eof) {
        let (line, col) = p.here();
        let kw = p.ident().map_err(fail)?;
        let needs_vars = matches!(kw.as_str(), "env" | "move" | "guarantee" | "goal");
        if needs_vars && order.is_empty() {
            return Err(vec![Diagnostic { line, col, message: format!("`{}` before `vars`", kw) }]);
        }
        match kw.as_str() {
            "sort" => {
                let s = p.sort_name().map_err(fail)?;
                declared_sort = Some(s);
                p.sort = s;
                p.expect(";").map_err(fail)?;
            }
            "vars" => {
                let mut sorts = Vec::new();
                loop {
                    let (l, c) = p.here();
                    let name = p.ident().map_err(fail)?;
                    if name.ends_with('\'') {
                        diags.push(Diagnostic { line: l, col: c, message: format!("variable `{}` ends in a prime", name) });
                    }
                    let s = if p.eat(":") { Some(p.sort_name().map_err(fail)?) } else { None };
                    sorts.push((name, s, l, c));
                    if !p.eat(",") {
                        break;
                    }
                }
                p.expect(";").map_err(fail)?;
                let default = declared_sort;
                let resolved: Vec<Option<Sort>> = sorts.iter().map(|(_, s, _, _)| s.or(default)).collect();
                if resolved.iter().any(|s| s.is_none()) {
                    return Err(vec![Diagnostic { line, col, message: "variable sort not given (use `sort int;` or `x: int`)".into() }]);
                }
                let first = resolved[0].unwrap();
                if resolved.iter().any(|s| *s != Some(first)) || declared_sort.is_some_and(|d| d != first) {
                    return Err(vec![Diagnostic { line, col, message: "mixed sorts unsupported".into() }]);
                }
                p.sort = first;
                for (name, _, l, c) in sorts {
                    if p.vars.contains_key(&name) {
                        diags.push(Diagnostic { line: l, col: c, message: format!("duplicate variable `{}`", name) });
                        continue;
                    }
                    let v = Var::new(name.as_str(), first);
                    p.vars.insert(name, v.clone());
                    order.push(v);
                }
            }
            "env" => {
                let f = p.block(Scope::Step).map_err(fail)?;
                if env.replace(f).is_some() {
                    diags.push(Diagnostic { line, col, message: "duplicate `env`".into() });
                }
            }
            "move" => {
                let name = p.ident().map_err(fail)?;
                let relation = p.block(Scope::Step).map_err(fail)?;
                if moves.iter().any(|m| m.name == name) {
                    diags.push(Diagnostic { line, col, message: format!("duplicate move `{}`", name) });
                }
                moves.push(Move { name, relation });
            }
            "guarantee" | "goal" => {
                let f = p.block(Scope::State).map_err(fail)?;
                if property.replace(f).is_some() {
                    diags.push(Diagnostic { line, col, message: "duplicate property".into() });
                }
                let implied = if kw == "goal" { Objective::Reachability } else { Objective::Safety };
                if objective.is_some_and(|o| o != implied) {
                    diags.push(Diagnostic { line, col, message: format!("`{}` contradicts the objective", kw) });
                }
                objective.get_or_insert(implied);
            }
            "objective" => {
                let o = match p.ident().map_err(fail)?.as_str() {
                    "safety" => Objective::Safety,
                    "reach" | "reachability" => Objective::Reachability,
                    s => return Err(vec![Diagnostic { line, col, message: format!("unknown objective `{}`", s) }]),
                };
                if objective.is_some_and(|x| x != o) {
                    diags.push(Diagnostic { line, col, message: "objective contradicts the property keyword".into() });
                }
                objective = Some(o);
                p.expect(";").map_err(fail)?;
            }
            "mode" => {
                mode = Some(match p.ident().map_err(fail)?.as_str() {
                    "EA" => Mode::EA,
                    "AE" => Mode::AE,
                    s => return Err(vec![Diagnostic { line, col, message: format!("unknown mode `{}`", s) }]),
                });
                p.expect(";").map_err(fail)?;
            }
            other => {
                return Err(vec![Diagnostic { line, col, message: format!("unknown section `{}`", other) }]);
            }
        }
    }
    let (line, col) = p.here();
    let missing = |what: &str| Diagnostic { line, col, message: format!("missing {}", what) };
    if order.is_empty() {
        diags.push(missing("`vars`"));
    }
    if env.is_none() {
        diags.push(missing("`env`"));
    }
    if moves.is_empty() {
        diags.push(missing("`move`"));
    }
    if property.is_none() {
        diags.push(missing("`guarantee` or `goal`"));
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let spec = GameSpec {
        state_vars: order,
        env: env.unwrap(),
        moves,
        property: property.unwrap(),
        objective: objective.unwrap_or(Objective::Safety),
        mode: mode.unwrap_or(Mode::EA),
    };
    spec.validate().map_err(|e| vec![Diagnostic { line, col, message: e.to_string() }])?;
    Ok(spec)
}

fn print_term(t: &LinTerm) -> String {
    let mut out = String::new();
    for (v, c) in t.coeffs() {
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&format!("{}*", mag));
        }
        out.push_str(v.name());
    }
    let k = t.constant_part();
    if out.is_empty() {
        return k.to_string();
    }
    if !k.is_zero() {
        out.push_str(if k.is_negative() { " - " } else { " + " });
        out.push_str(&k.abs().to_string());
    }
    out
}

fn print_atom(a: &Atom) -> String {
    match a {
        Atom::Cmp { rel, term } => {
            let lhs = term.linear_part();
            let rhs = term.constant_part().clone();
            format!("{} {} {}", print_term(&lhs), rel.symbol(), -rhs)
        }
        Atom::Divides { modulus, term } => format!("{} | {}", modulus, print_term(term)),
        Atom::NotDivides { modulus, term } => format!("{} !| {}", modulus, print_term(term)),
    }
}

/// Infix rendering of a quantifier-free formula, parenthesized so that
/// reparsing gives back the same tree.
pub fn print_formula(f: &Formula) -> String {
    fn wrap(f: &Formula) -> String {
        match f {
            Formula::And(_) | Formula::Or(_) => format!("({})", print_formula(f)),
            _ => print_formula(f),
        }
    }
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Atom(a) => print_atom(a),
        Formula::Not(g) => format!("not {}", wrap(g)),
        Formula::And(xs) => xs.iter().map(wrap).collect::<Vec<_>>().join(" and "),
        Formula::Or(xs) => xs.iter().map(wrap).collect::<Vec<_>>().join(" or "),
        Formula::Exists(..) | Formula::Forall(..) => {
            panic!("quantified formulas have no DSL form")
        }
    }
}

/// Renders a spec in the input language.
pub fn emit_spec(spec: &GameSpec) -> String {
    let sort = match spec.sort() {
        Sort::Int => "int",
        Sort::Real => "real",
    };
    let names: Vec<&str> = spec.state_vars.iter().map(|v| v.name()).collect();
    let mut out = format!("sort {};\nvars {};\n", sort, names.join(", "));
    out.push_str(&format!("env {{ {} }}\n", print_formula(&spec.env)));
    for m in &spec.moves {
        out.push_str(&format!("move {} {{ {} }}\n", m.name, print_formula(&m.relation)));
    }
    let kw = match spec.objective {
        Objective::Safety => "guarantee",
        Objective::Reachability => "goal",
    };
    out.push_str(&format!("{} {{ {} }}\n", kw, print_formula(&spec.property)));
    out.push_str(&format!("objective {};\nmode {};\n", spec.objective, spec.mode));
    out
}
