//! OpenQASM 2.0 export and import for the circuits this crate builds.
//!
//! Emitted files look like
//!
//! ```text
//! OPENQASM 2.0;
//! include "qelib1.inc";
//! qreg q[3];
//! creg c[3];
//! u3(1.5707963267948966e0,0.0000000000000000e0,0.0000000000000000e0) q[0];
//! cx q[0],q[2];
//! rz(7.8539816339744828e-1) q[2];
//! measure q[0] -> c[0];
//! ```
//!
//! The parser accepts exactly this subset: one `qreg`, optional `creg`s,
//! the gates `id x sx rz u3 cx`, terminal `measure`, `//` comments, and
//! angle expressions built from decimal literals, `pi`, parentheses and
//! `+ - * /`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate};

const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

fn angle(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders `circuit` as OpenQASM 2.0 text, optionally measuring every qubit
/// into the classical register at the end. Output is deterministic.
pub fn emit_qasm(circuit: &Circuit, measure_all: bool) -> String {
    let n = circuit.n_qubits();
    let mut out = String::from(HEADER);
    let _ = writeln!(out, "qreg q[{n}];");
    let _ = writeln!(out, "creg c[{n}];");
    for g in circuit.gates() {
        let _ = match *g {
            Gate::Id(q) => writeln!(out, "id q[{q}];"),
            Gate::X(q) => writeln!(out, "x q[{q}];"),
            Gate::SX(q) => writeln!(out, "sx q[{q}];"),
            Gate::RZ { qubit, phi } => writeln!(out, "rz({}) q[{qubit}];", angle(phi)),
            Gate::U3 {
                qubit,
                theta,
                phi,
                lambda,
            } => writeln!(
                out,
                "u3({},{},{}) q[{qubit}];",
                angle(theta),
                angle(phi),
                angle(lambda)
            ),
            Gate::CX { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
        };
    }
    if measure_all {
        for q in 0..n {
            let _ = writeln!(out, "measure q[{q}] -> c[{q}];");
        }
    }
    out
}

/// A parsed program: the quantum register, classical registers, the gate
/// sequence and the terminal measurements `(qubit, bit)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QasmDocument {
    pub qreg: String,
    pub cregs: Vec<(String, usize)>,
    pub circuit: Circuit,
    pub measurements: Vec<(usize, usize)>,
}

/// Parses OpenQASM text into a circuit.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    Ok(parse_document(text)?.circuit)
}

pub fn parse_document(text: &str) -> Result<QasmDocument> {
    let tokens = tokenize(text)?;
    Parser {
        tokens,
        pos: 0,
        end: end_position(text),
    }
    .document()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Real(f64),
    Int(usize),
    Str(String),
    Sym(char),
    Arrow,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Qasm {
        line,
        column,
        message: message.into(),
    }
}

fn end_position(text: &str) -> (usize, usize) {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line_no, col) = (li + 1, i + 1);
            let push = |tok, out: &mut Vec<Token>| out.push(Token { tok, line: line_no, col });
            if c.is_whitespace() {
                i += 1;
            } else if c == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(Tok::Ident(chars[start..i].iter().collect()), &mut out);
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                let mut real = false;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    real = true;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        real = true;
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let tok = if real {
                    Tok::Real(s.parse().map_err(|_| err(line_no, col, format!("bad number {s:?}")))?)
                } else {
                    Tok::Int(s.parse().map_err(|_| err(line_no, col, format!("bad integer {s:?}")))?)
                };
                push(tok, &mut out);
            } else if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(err(line_no, col, "unterminated string"));
                }
                push(Tok::Str(chars[start..i].iter().collect()), &mut out);
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                push(Tok::Arrow, &mut out);
                i += 2;
            } else if "[](),;+-*/".contains(c) {
                push(Tok::Sym(c), &mut out);
                i += 1;
            } else {
                return Err(err(line_no, col, format!("unexpected character {c:?}")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.end, |t| (t.line, t.col))
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(err(l, c, message))
    }

    fn next(&mut self) -> Result<Token> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.fail("unexpected end of input"),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Token { tok: Tok::Sym(s), .. }) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                let found = format!("{:?}", t.tok);
                self.fail(format!("expected '{c}', found {found}"))
            }
            None => self.fail(format!("expected '{c}', found end of input")),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected identifier"),
        }
    }

    fn int(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Token { tok: Tok::Int(n), .. }) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.fail("expected integer"),
        }
    }

    fn document(mut self) -> Result<QasmDocument> {
        match self.next()? {
            Token { tok: Tok::Ident(ref s), .. } if s == "OPENQASM" => {}
            t => return Err(err(t.line, t.col, "program must start with 'OPENQASM 2.0;'")),
        }
        let (vl, vc) = self.here();
        match self.next()?.tok {
            Tok::Real(2.0) => {}
            _ => return Err(err(vl, vc, "only OpenQASM version 2.0 is supported")),
        }
        self.expect_sym(';')?;

        let mut qreg: Option<(String, usize)> = None;
        let mut cregs: Vec<(String, usize)> = Vec::new();
        let mut gates = Vec::new();
        let mut measurements = Vec::new();

        while let Some(tok) = self.peek().cloned() {
            let name = match tok.tok {
                Tok::Ident(s) => s,
                other => return Err(err(tok.line, tok.col, format!("expected statement, found {other:?}"))),
            };
            self.pos += 1;
            match name.as_str() {
                "include" => {
                    match self.next()?.tok {
                        Tok::Str(_) => {}
                        _ => return Err(err(tok.line, tok.col, "include needs a file name")),
                    }
                    self.expect_sym(';')?;
                }
                "qreg" | "creg" => {
                    let reg = self.ident()?;
                    self.expect_sym('[')?;
                    let size = self.int()?;
                    self.expect_sym(']')?;
                    self.expect_sym(';')?;
                    if name == "qreg" {
                        if qreg.is_some() {
                            return Err(err(tok.line, tok.col, "only one qreg is supported"));
                        }
                        if size == 0 {
                            return Err(err(tok.line, tok.col, "qreg must have at least one qubit"));
                        }
                        qreg = Some((reg, size));
                    } else {
                        cregs.push((reg, size));
                    }
                }
                "measure" => {
                    let q = self.qubit_arg(&qreg)?;
                    match self.next()? {
                        Token { tok: Tok::Arrow, .. } => {}
                        t => return Err(err(t.line, t.col, "expected '->'")),
                    }
                    let (cl, cc) = self.here();
                    let creg = self.ident()?;
                    self.expect_sym('[')?;
                    let bit = self.int()?;
                    self.expect_sym(']')?;
                    self.expect_sym(';')?;
                    match cregs.iter().find(|(n, _)| *n == creg) {
                        Some((_, size)) if bit < *size => measurements.push((q, bit)),
                        Some((_, size)) => {
                            return Err(err(cl, cc, format!("bit {bit} out of range for creg {creg}[{size}]")))
                        }
                        None => return Err(err(cl, cc, format!("undeclared classical register {creg:?}"))),
                    }
                }
                "id" | "x" | "sx" | "rz" | "u3" | "cx" => {
                    if !measurements.is_empty() {
                        return Err(err(tok.line, tok.col, "gates after measurement are not supported"));
                    }
                    let params = if self.eat_sym('(') {
                        let mut ps = vec![self.expr()?];
                        while self.eat_sym(',') {
                            ps.push(self.expr()?);
                        }
                        self.expect_sym(')')?;
                        ps
                    } else {
                        Vec::new()
                    };
                    let arity = match name.as_str() {
                        "rz" => 1,
                        "u3" => 3,
                        _ => 0,
                    };
                    if params.len() != arity {
                        return Err(err(
                            tok.line,
                            tok.col,
                            format!("{name} takes {arity} parameter(s), got {}", params.len()),
                        ));
                    }
                    let a = self.qubit_arg(&qreg)?;
                    let gate = if name == "cx" {
                        self.expect_sym(',')?;
                        let b = self.qubit_arg(&qreg)?;
                        if a == b {
                            return Err(err(tok.line, tok.col, "cx control and target coincide"));
                        }
                        Gate::cx(a, b)
                    } else {
                        match name.as_str() {
                            "id" => Gate::Id(a),
                            "x" => Gate::X(a),
                            "sx" => Gate::SX(a),
                            "rz" => Gate::rz(a, params[0]),
                            _ => Gate::u3(a, params[0], params[1], params[2]),
                        }
                    };
                    self.expect_sym(';')?;
                    gates.push(gate);
                }
                other => {
                    return Err(err(tok.line, tok.col, format!("unsupported gate or statement '{other}'")))
                }
            }
        }

        let Some((qname, n)) = qreg else {
            return self.fail("no qreg declared");
        };
        let circuit = Circuit::from_gates(n, gates).map_err(|e| err(self.end.0, self.end.1, e.to_string()))?;
        Ok(QasmDocument {
            qreg: qname,
            cregs,
            circuit,
            measurements,
        })
    }

    fn qubit_arg(&mut self, qreg: &Option<(String, usize)>) -> Result<usize> {
        let (l, c) = self.here();
        let name = self.ident()?;
        self.expect_sym('[')?;
        let idx = self.int()?;
        self.expect_sym(']')?;
        match qreg {
            Some((q, size)) if *q == name => {
                if idx >= *size {
                    Err(err(l, c, format!("qubit {name}[{idx}] out of range for qreg {q}[{size}]")))
                } else {
                    Ok(idx)
                }
            }
            Some((q, _)) => Err(err(l, c, format!("register {name:?} does not match qreg {q:?}"))),
            None => Err(err(l, c, format!("register {name:?} used before any qreg declaration"))),
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym('*') {
                v *= self.unary()?;
            } else if self.eat_sym('/') {
                let (l, c) = self.here();
                let d = self.unary()?;
                if d == 0.0 {
                    return Err(err(l, c, "division by zero in angle expression"));
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        let (l, c) = self.here();
        match self.next().map_err(|_| err(l, c, "malformed angle expression: unexpected end"))?.tok {
            Tok::Real(v) => Ok(v),
            Tok::Int(v) => Ok(v as f64),
            Tok::Ident(s) if s == "pi" => Ok(PI),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            other => Err(err(l, c, format!("malformed angle expression at {other:?}"))),
        }
    }
}

/// Evaluates a standalone angle expression such as `2*pi` or `pi/20`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: end_position(text),
    };
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.fail("trailing input after angle expression");
    }
    Ok(v)
}
