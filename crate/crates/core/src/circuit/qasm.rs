//! Restricted OpenQASM 2.0 front end and canonical printer.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, CircuitError, Gate, SingleQubitOp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unsupported construct `{construct}` at {line}:{col}")]
    Unsupported { construct: String, line: usize, col: usize },
    #[error("index {index} out of range for register `{register}` of size {size} at {line}:{col}")]
    OutOfRange { register: String, index: usize, size: usize, line: usize, col: usize },
    #[error("invalid circuit: {0}")]
    Invalid(#[from] CircuitError),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Int(usize),
    Str(String),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 13] = ["->", "==", ";", ",", "[", "]", "(", ")", "{", "}", "+", "-", "*"];

fn lex(text: &str) -> Result<Vec<Token>, QasmError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| QasmError::Syntax { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, col: tc });
        } else if c.is_ascii_digit() || c == '.' {
            let mut real = false;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                real |= chars[i] == '.';
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                real = true;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let tok = if real {
                Tok::Num(s.parse().map_err(|_| err(tl, tc, format!("malformed number `{s}`")))?)
            } else {
                Tok::Int(s.parse().map_err(|_| err(tl, tc, format!("malformed integer `{s}`")))?)
            };
            out.push(Token { tok, line: tl, col: tc });
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) != Some(&'"') {
                return Err(err(tl, tc, "unterminated string".into()));
            }
            out.push(Token { tok: Tok::Str(chars[start + 1..i].iter().collect()), line: tl, col: tc });
            i += 1;
        } else if c == '/' {
            out.push(Token { tok: Tok::Sym("/"), line: tl, col: tc });
            i += 1;
        } else if c == '^' {
            out.push(Token { tok: Tok::Sym("^"), line: tl, col: tc });
            i += 1;
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| err(tl, tc, format!("unexpected character `{c}`")))?;
            out.push(Token { tok: Tok::Sym(sym), line: tl, col: tc });
            i += sym.len();
        }
        col += i - start;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

/// An operand: a whole register or one element of it.
enum Arg {
    Reg { name: String, line: usize, col: usize },
    Bit { name: String, index: usize, line: usize, col: usize },
}

struct Register {
    offset: usize,
    size: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.eof, |t| (t.line, t.col))
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, QasmError> {
        let (line, col) = self.here();
        Err(QasmError::Syntax { line, col, message: message.into() })
    }

    fn next(&mut self) -> Result<Token, QasmError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.syntax("unexpected end of input"),
        }
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, sym: &str) -> Result<(), QasmError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            self.syntax(format!("expected `{sym}`"))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize, usize), QasmError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.col)),
            _ => Err(QasmError::Syntax { line: t.line, col: t.col, message: "expected identifier".into() }),
        }
    }

    fn expect_int(&mut self) -> Result<usize, QasmError> {
        let t = self.next()?;
        match t.tok {
            Tok::Int(n) => Ok(n),
            _ => Err(QasmError::Syntax { line: t.line, col: t.col, message: "expected integer".into() }),
        }
    }

    fn arg(&mut self) -> Result<Arg, QasmError> {
        let (name, line, col) = self.expect_ident()?;
        if self.eat_sym("[") {
            let index = self.expect_int()?;
            self.expect_sym("]")?;
            Ok(Arg::Bit { name, index, line, col })
        } else {
            Ok(Arg::Reg { name, line, col })
        }
    }

    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym("+") {
                v += self.term()?;
            } else if self.eat_sym("-") {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.power()?;
        loop {
            if self.eat_sym("*") {
                v *= self.power()?;
            } else if self.eat_sym("/") {
                v /= self.power()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn power(&mut self) -> Result<f64, QasmError> {
        let base = self.unary()?;
        if self.eat_sym("^") {
            Ok(base.powf(self.power()?))
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<f64, QasmError> {
        if self.eat_sym("-") {
            return Ok(-self.unary()?);
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<f64, QasmError> {
        let t = self.next()?;
        match t.tok {
            Tok::Num(v) => Ok(v),
            Tok::Int(v) => Ok(v as f64),
            Tok::Sym("(") => {
                let v = self.expr()?;
                self.expect_sym(")")?;
                Ok(v)
            }
            Tok::Ident(ref s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::Ident(ref s) => {
                let f: fn(f64) -> f64 = match s.as_str() {
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "exp" => f64::exp,
                    "ln" => f64::ln,
                    "sqrt" => f64::sqrt,
                    _ => {
                        return Err(QasmError::Syntax {
                            line: t.line,
                            col: t.col,
                            message: format!("unknown identifier `{s}` in expression"),
                        })
                    }
                };
                self.expect_sym("(")?;
                let v = self.expr()?;
                self.expect_sym(")")?;
                Ok(f(v))
            }
            _ => Err(QasmError::Syntax { line: t.line, col: t.col, message: "expected expression".into() }),
        }
    }
}

/// Parses OpenQASM 2.0 source into a circuit named `circuit`.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    parse_qasm_named("circuit", text)
}

/// Parses OpenQASM 2.0 source restricted to a single quantum register and
/// the standard single-qubit gates, `cx`, `swap`, `barrier` and `measure`.
pub fn parse_qasm_named(name: &str, text: &str) -> Result<Circuit, QasmError> {
    let toks = lex(text)?;
    let eof = toks.last().map_or((1, 1), |t| (t.line, t.col + 1));
    let mut p = Parser { toks, pos: 0, eof };
    let mut qreg: Option<(String, usize)> = None;
    let mut cregs: HashMap<String, Register> = HashMap::new();
    let mut num_clbits = 0;
    let mut gates = Vec::new();

    while p.peek().is_some() {
        let (word, line, col) = p.expect_ident()?;
        let unsupported = |construct: &str| QasmError::Unsupported { construct: construct.to_string(), line, col };
        match word.as_str() {
            "OPENQASM" => {
                let t = p.next()?;
                let ok = matches!(t.tok, Tok::Num(v) if v == 2.0) || matches!(t.tok, Tok::Int(2));
                if !ok {
                    return Err(unsupported("OpenQASM version other than 2.0"));
                }
                p.expect_sym(";")?;
            }
            "include" => {
                let t = p.next()?;
                match t.tok {
                    Tok::Str(ref s) if s == "qelib1.inc" => {}
                    Tok::Str(s) => return Err(unsupported(&format!("include \"{s}\""))),
                    _ => return p.syntax("expected file name"),
                }
                p.expect_sym(";")?;
            }
            "qreg" => {
                let (reg, ..) = p.expect_ident()?;
                p.expect_sym("[")?;
                let size = p.expect_int()?;
                p.expect_sym("]")?;
                p.expect_sym(";")?;
                if qreg.is_some() {
                    return Err(unsupported("multiple quantum registers"));
                }
                qreg = Some((reg, size));
            }
            "creg" => {
                let (reg, ..) = p.expect_ident()?;
                p.expect_sym("[")?;
                let size = p.expect_int()?;
                p.expect_sym("]")?;
                p.expect_sym(";")?;
                cregs.insert(reg, Register { offset: num_clbits, size });
                num_clbits += size;
            }
            "gate" | "opaque" | "if" | "reset" | "OPENQASM3" | "def" | "while" | "for" => {
                return Err(unsupported(&word));
            }
            "measure" => {
                let src = p.arg()?;
                p.expect_sym("->")?;
                let dst = p.arg()?;
                p.expect_sym(";")?;
                let qs = resolve_qubits(&qreg, &src)?;
                let cs = resolve_clbits(&cregs, &dst)?;
                if qs.len() != cs.len() {
                    return Err(QasmError::Syntax {
                        line,
                        col,
                        message: "measure operands have different sizes".into(),
                    });
                }
                gates.extend(qs.into_iter().zip(cs).map(|(q, c)| Gate::measure(q, c)));
            }
            "barrier" => {
                let mut qubits = Vec::new();
                loop {
                    let a = p.arg()?;
                    for q in resolve_qubits(&qreg, &a)? {
                        if !qubits.contains(&q) {
                            qubits.push(q);
                        }
                    }
                    if !p.eat_sym(",") {
                        break;
                    }
                }
                p.expect_sym(";")?;
                gates.push(Gate::Barrier { qubits });
            }
            gate => {
                let mut params = Vec::new();
                if p.eat_sym("(") && !p.eat_sym(")") {
                    loop {
                        params.push(p.expr()?);
                        if p.eat_sym(")") {
                            break;
                        }
                        p.expect_sym(",")?;
                    }
                }
                let mut args = vec![p.arg()?];
                while p.eat_sym(",") {
                    args.push(p.arg()?);
                }
                p.expect_sym(";")?;
                match gate {
                    "cx" | "CX" | "swap" => {
                        if args.len() != 2 || !params.is_empty() {
                            return Err(QasmError::Syntax {
                                line,
                                col,
                                message: format!("`{gate}` takes two qubit operands and no parameters"),
                            });
                        }
                        let a = resolve_qubits(&qreg, &args[0])?;
                        let b = resolve_qubits(&qreg, &args[1])?;
                        if a.len() != 1 || b.len() != 1 {
                            return Err(unsupported("register broadcast on a two-qubit gate"));
                        }
                        gates.push(if gate == "swap" { Gate::swap(a[0], b[0]) } else { Gate::cx(a[0], b[0]) });
                    }
                    _ if SingleQubitOp::is_known(gate) => {
                        let op = SingleQubitOp::from_name(gate, &params).ok_or_else(|| QasmError::Syntax {
                            line,
                            col,
                            message: format!("wrong number of parameters for `{gate}`"),
                        })?;
                        if args.len() != 1 {
                            return Err(QasmError::Syntax {
                                line,
                                col,
                                message: format!("`{gate}` takes one qubit operand"),
                            });
                        }
                        for q in resolve_qubits(&qreg, &args[0])? {
                            gates.push(Gate::single(op, q));
                        }
                    }
                    other => return Err(unsupported(other)),
                }
            }
        }
    }

    let num_qubits = qreg.map_or(0, |(_, n)| n);
    Ok(Circuit::new(name, num_qubits, num_clbits, gates)?)
}

fn resolve_qubits(qreg: &Option<(String, usize)>, arg: &Arg) -> Result<Vec<usize>, QasmError> {
    let (name, line, col) = match arg {
        Arg::Reg { name, line, col } | Arg::Bit { name, line, col, .. } => (name, *line, *col),
    };
    let Some((reg, size)) = qreg else {
        return Err(QasmError::Syntax { line, col, message: format!("unknown quantum register `{name}`") });
    };
    if reg != name {
        return Err(QasmError::Syntax { line, col, message: format!("unknown quantum register `{name}`") });
    }
    match arg {
        Arg::Reg { .. } => Ok((0..*size).collect()),
        Arg::Bit { index, .. } if index < size => Ok(vec![*index]),
        Arg::Bit { index, .. } => {
            Err(QasmError::OutOfRange { register: name.clone(), index: *index, size: *size, line, col })
        }
    }
}

fn resolve_clbits(cregs: &HashMap<String, Register>, arg: &Arg) -> Result<Vec<usize>, QasmError> {
    let (name, line, col) = match arg {
        Arg::Reg { name, line, col } | Arg::Bit { name, line, col, .. } => (name, *line, *col),
    };
    let reg = cregs.get(name).ok_or_else(|| QasmError::Syntax {
        line,
        col,
        message: format!("unknown classical register `{name}`"),
    })?;
    match arg {
        Arg::Reg { .. } => Ok((reg.offset..reg.offset + reg.size).collect()),
        Arg::Bit { index, .. } if *index < reg.size => Ok(vec![reg.offset + index]),
        Arg::Bit { index, .. } => {
            Err(QasmError::OutOfRange { register: name.clone(), index: *index, size: reg.size, line, col })
        }
    }
}

/// Canonical serialization: `q`/`c` registers, one gate per line, angles in
/// shortest round-trip decimal form.
pub(super) fn to_qasm(c: &Circuit) -> String {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", c.num_qubits());
    if c.num_clbits() > 0 {
        let _ = writeln!(s, "creg c[{}];", c.num_clbits());
    }
    for g in c.gates() {
        match g {
            Gate::Single { op, qubit } => {
                let params = op.params();
                if params.is_empty() {
                    let _ = writeln!(s, "{} q[{qubit}];", op.name());
                } else {
                    let ps: Vec<String> = params.iter().map(|v| format!("{v:?}")).collect();
                    let _ = writeln!(s, "{}({}) q[{qubit}];", op.name(), ps.join(","));
                }
            }
            Gate::Cx { control, target } => {
                let _ = writeln!(s, "cx q[{control}],q[{target}];");
            }
            Gate::Swap { a, b } => {
                let _ = writeln!(s, "swap q[{a}],q[{b}];");
            }
            Gate::Measure { qubit, clbit } => {
                let _ = writeln!(s, "measure q[{qubit}] -> c[{clbit}];");
            }
            Gate::Barrier { qubits } => {
                let qs: Vec<String> = qubits.iter().map(|q| format!("q[{q}]")).collect();
                let _ = writeln!(s, "barrier {};", qs.join(","));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cnot_program() {
        let c = parse_qasm("qreg q[2]; cx q[0],q[1];").unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.gates(), &[Gate::cx(0, 1)]);
    }

    #[test]
    fn empty_program() {
        let c = parse_qasm("qreg q[1];").unwrap();
        assert_eq!(c.num_qubits(), 1);
        assert!(c.gates().is_empty());
    }

    #[test]
    fn header_parameters_and_broadcast() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncreg c[3];\n\
                   u3(pi/2, -pi/4, 2*pi) q[0];\nh q;\nswap q[0],q[2];\nbarrier q;\nmeasure q -> c;\n";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.num_clbits(), 3);
        let pi = std::f64::consts::PI;
        assert_eq!(c.gates()[0], Gate::single(SingleQubitOp::U3(pi / 2.0, -pi / 4.0, 2.0 * pi), 0));
        assert_eq!(c.gates().len(), 1 + 3 + 1 + 1 + 3);
        assert_eq!(c.gates()[4], Gate::swap(0, 2));
        assert_eq!(c.gates()[8], Gate::measure(2, 2));
    }

    #[test]
    fn multiple_cregs_are_flattened() {
        let src = "qreg q[2]; creg a[1]; creg b[1]; measure q[0] -> a[0]; measure q[1] -> b[0];";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.gates(), &[Gate::measure(0, 0), Gate::measure(1, 1)]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_qasm("qreg q[2];\ncx q[0] q[1];").unwrap_err();
        assert!(matches!(err, QasmError::Syntax { line: 2, col: 9, .. }), "{err:?}");
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let err = parse_qasm("qreg q[2]; creg c[2]; if(c==1) x q[0];").unwrap_err();
        assert_eq!(err, QasmError::Unsupported { construct: "if".into(), line: 1, col: 23 });
        let err = parse_qasm("qreg q[1]; qreg r[1];").unwrap_err();
        assert!(matches!(err, QasmError::Unsupported { ref construct, .. } if construct.contains("registers")));
        let err = parse_qasm("qreg q[3]; ccx q[0],q[1],q[2];").unwrap_err();
        assert!(matches!(err, QasmError::Unsupported { ref construct, .. } if construct == "ccx"));
        let err = parse_qasm("gate foo a { x a; }").unwrap_err();
        assert!(matches!(err, QasmError::Unsupported { ref construct, .. } if construct == "gate"));
    }

    #[test]
    fn out_of_range_operand() {
        let err = parse_qasm("qreg q[2];\nx q[5];").unwrap_err();
        assert_eq!(err, QasmError::OutOfRange { register: "q".into(), index: 5, size: 2, line: 2, col: 3 });
    }

    #[test]
    fn canonical_printer_round_trips() {
        let src = "qreg q[3]; creg c[2]; rz(0.1) q[1]; u2(0,pi) q[2]; cx q[2],q[0]; swap q[1],q[0]; \
                   barrier q[0],q[2]; measure q[0] -> c[1];";
        let c = parse_qasm(src).unwrap();
        let again = parse_qasm(&c.to_qasm()).unwrap();
        assert_eq!(c, again);
    }
}
