//! Recursive-descent parser for the adaptive-circuit text language.
//!
//! Grammar (whitespace-insensitive, `//` comments):
//!
//! ```text
//! program := { stmt }
//! stmt    := "qreg" ID "[" INT "]" ";" | "creg" ID "[" INT "]" ";"
//!          | gate ";" | "measure" qarg "->" carg ";" | "reset" qarg ";"
//!          | "if" "(" carg "==" INT ")" gate ";" | carg "=" cexpr ";"
//!          | "barrier" ";"
//! gate    := ("h"|"x"|"z"|"s") qarg | "cx" qarg "," qarg
//! cexpr   := term { "^" term } ;  term := carg | "0" | "1"
//! qarg    := ID "[" INT "]" ;     carg := ID "[" INT "]"
//! ```

use super::{AdaptiveCircuit, CTerm, Condition, Instruction, RegDecl, XorExpr};
use crate::tableau::CliffordGate;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: undeclared register `{name}`")]
    UndeclaredRegister { line: usize, col: usize, name: String },
    #[error("{line}:{col}: index {index} out of range for `{name}[{width}]`")]
    IndexOutOfRange { line: usize, col: usize, name: String, index: usize, width: usize },
    #[error("{line}:{col}: duplicate declaration of `{name}`")]
    DuplicateDeclaration { line: usize, col: usize, name: String },
    #[error("{line}:{col}: duplicate gate targets")]
    DuplicateTargets { line: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Comma,
    Arrow,
    EqEq,
    Eq,
    Caret,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '/' {
            bump(&mut chars);
            if chars.peek() == Some(&'/') {
                while let Some(&c) = chars.peek() {
                    bump(&mut chars);
                    if c == '\n' {
                        break;
                    }
                }
                continue;
            }
            return Err(ParseError::Syntax {
                line: tline,
                col: tcol,
                message: "unexpected `/` (comments are `//`)".into(),
            });
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(s), line: tline, col: tcol });
            continue;
        }
        if c.is_ascii_digit() {
            let mut v: usize = 0;
            while let Some(&c) = chars.peek() {
                if let Some(d) = c.to_digit(10) {
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(d as usize))
                        .ok_or_else(|| ParseError::Syntax {
                            line: tline,
                            col: tcol,
                            message: "integer literal too large".into(),
                        })?;
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Int(v), line: tline, col: tcol });
            continue;
        }
        let tok = match c {
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '^' => Tok::Caret,
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    out.push(Spanned { tok: Tok::Arrow, line: tline, col: tcol });
                    continue;
                }
                return Err(ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    message: "expected `->`".into(),
                });
            }
            '=' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    out.push(Spanned { tok: Tok::EqEq, line: tline, col: tcol });
                } else {
                    out.push(Spanned { tok: Tok::Eq, line: tline, col: tcol });
                }
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        bump(&mut chars);
        out.push(Spanned { tok, line: tline, col: tcol });
    }
    Ok(out)
}

// Structural keywords may not name registers. Gate names (h, x, z, s, cx)
// may: `s[0] = 1;` is an assignment to register `s`, `s q[0];` is an S gate —
// one token of lookahead tells them apart.
const RESERVED: &[&str] = &["qreg", "creg", "measure", "reset", "if", "barrier"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    circuit: AdaptiveCircuit,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or((1, 1), |s| (s.line, s.col))
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, message: message.into() })
    }

    fn next(&mut self, what: &str) -> Result<Spanned, ParseError> {
        match self.toks.get(self.pos).cloned() {
            Some(s) => {
                self.pos += 1;
                Ok(s)
            }
            None => self.syntax(format!("unexpected end of input, expected {what}")),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Spanned, ParseError> {
        let s = self.next(what)?;
        if s.tok == tok {
            Ok(s)
        } else {
            Err(ParseError::Syntax {
                line: s.line,
                col: s.col,
                message: format!("expected {what}, found {:?}", s.tok),
            })
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        let s = self.next(what)?;
        match s.tok {
            Tok::Ident(name) => Ok((name, s.line, s.col)),
            other => Err(ParseError::Syntax {
                line: s.line,
                col: s.col,
                message: format!("expected {what}, found {other:?}"),
            }),
        }
    }

    fn int(&mut self, what: &str) -> Result<usize, ParseError> {
        let s = self.next(what)?;
        match s.tok {
            Tok::Int(v) => Ok(v),
            other => Err(ParseError::Syntax {
                line: s.line,
                col: s.col,
                message: format!("expected {what}, found {other:?}"),
            }),
        }
    }

    fn declare(&mut self, quantum: bool) -> Result<(), ParseError> {
        let (name, line, col) = self.ident("register name")?;
        if RESERVED.contains(&name.as_str()) {
            return Err(ParseError::Syntax {
                line,
                col,
                message: format!("`{name}` is a reserved word"),
            });
        }
        let taken = self.circuit.qregs.iter().chain(&self.circuit.cregs).any(|r| r.name == name);
        if taken {
            return Err(ParseError::DuplicateDeclaration { line, col, name });
        }
        self.expect(Tok::LBracket, "`[`")?;
        let width = self.int("register width")?;
        if width == 0 {
            return self.syntax("register width must be positive");
        }
        self.expect(Tok::RBracket, "`]`")?;
        self.expect(Tok::Semi, "`;`")?;
        if quantum {
            self.circuit.add_qreg(&name, width);
        } else {
            self.circuit.add_creg(&name, width);
        }
        Ok(())
    }

    fn resolve(&self, regs: &[RegDecl], name: &str, index: usize, line: usize, col: usize) -> Result<usize, ParseError> {
        match regs.iter().find(|r| r.name == name) {
            None => Err(ParseError::UndeclaredRegister { line, col, name: name.to_string() }),
            Some(r) if index >= r.width => Err(ParseError::IndexOutOfRange {
                line,
                col,
                name: name.to_string(),
                index,
                width: r.width,
            }),
            Some(r) => Ok(r.offset + index),
        }
    }

    fn arg(&mut self, quantum: bool) -> Result<usize, ParseError> {
        let what = if quantum { "qubit reference" } else { "classical bit reference" };
        let (name, line, col) = self.ident(what)?;
        self.expect(Tok::LBracket, "`[`")?;
        let index = self.int("index")?;
        self.expect(Tok::RBracket, "`]`")?;
        let regs = if quantum { &self.circuit.qregs } else { &self.circuit.cregs };
        self.resolve(regs, &name, index, line, col)
    }

    fn gate(&mut self, name: &str, line: usize, col: usize) -> Result<CliffordGate, ParseError> {
        match name {
            "h" => Ok(CliffordGate::H(self.arg(true)?)),
            "x" => Ok(CliffordGate::X(self.arg(true)?)),
            "z" => Ok(CliffordGate::Z(self.arg(true)?)),
            "s" => Ok(CliffordGate::S(self.arg(true)?)),
            "cx" => {
                let c = self.arg(true)?;
                self.expect(Tok::Comma, "`,`")?;
                let t = self.arg(true)?;
                if c == t {
                    return Err(ParseError::DuplicateTargets { line, col });
                }
                Ok(CliffordGate::Cnot(c, t))
            }
            other => Err(ParseError::Syntax {
                line,
                col,
                message: format!("unknown gate `{other}`"),
            }),
        }
    }

    fn cterm(&mut self) -> Result<CTerm, ParseError> {
        match self.peek().map(|s| s.tok.clone()) {
            Some(Tok::Int(0)) => {
                self.pos += 1;
                Ok(CTerm::Const(false))
            }
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(CTerm::Const(true))
            }
            Some(Tok::Int(_)) => self.syntax("classical constants must be 0 or 1"),
            _ => Ok(CTerm::Bit(self.arg(false)?)),
        }
    }

    fn stmt(&mut self) -> Result<(), ParseError> {
        let (name, line, col) = match self.next("statement")? {
            Spanned { tok: Tok::Ident(name), line, col } => (name, line, col),
            s => {
                return Err(ParseError::Syntax {
                    line: s.line,
                    col: s.col,
                    message: format!("expected statement, found {:?}", s.tok),
                })
            }
        };
        match name.as_str() {
            "qreg" => self.declare(true),
            "creg" => self.declare(false),
            "measure" => {
                let qubit = self.arg(true)?;
                self.expect(Tok::Arrow, "`->`")?;
                let target = self.arg(false)?;
                self.expect(Tok::Semi, "`;`")?;
                self.circuit.push(Instruction::Measure { qubit, target });
                Ok(())
            }
            "reset" => {
                let qubit = self.arg(true)?;
                self.expect(Tok::Semi, "`;`")?;
                self.circuit.push(Instruction::Reset { qubit });
                Ok(())
            }
            "barrier" => {
                self.expect(Tok::Semi, "`;`")?;
                self.circuit.push(Instruction::Barrier);
                Ok(())
            }
            "if" => {
                self.expect(Tok::LParen, "`(`")?;
                let bit = self.arg(false)?;
                self.expect(Tok::EqEq, "`==`")?;
                let v = self.int("condition value")?;
                if v > 1 {
                    return self.syntax("condition value must be 0 or 1");
                }
                self.expect(Tok::RParen, "`)`")?;
                let (gname, gline, gcol) = self.ident("gate")?;
                let gate = self.gate(&gname, gline, gcol)?;
                self.expect(Tok::Semi, "`;`")?;
                self.circuit.push(Instruction::CondGate {
                    cond: Condition { bit, value: v == 1 },
                    gate,
                });
                Ok(())
            }
            "h" | "x" | "z" | "s" | "cx"
                if self.peek().map(|s| &s.tok) != Some(&Tok::LBracket) =>
            {
                let gate = self.gate(&name, line, col)?;
                self.expect(Tok::Semi, "`;`")?;
                self.circuit.push(Instruction::Gate(gate));
                Ok(())
            }
            _ => {
                // carg = cexpr ;
                self.pos -= 1; // rewind to re-read as a classical reference
                let target = self.arg(false)?;
                self.expect(Tok::Eq, "`=`")?;
                let mut terms = vec![self.cterm()?];
                while self.peek().map(|s| &s.tok) == Some(&Tok::Caret) {
                    self.pos += 1;
                    terms.push(self.cterm()?);
                }
                self.expect(Tok::Semi, "`;`")?;
                self.circuit.push(Instruction::Assign { target, expr: XorExpr { terms } });
                Ok(())
            }
        }
    }
}

/// Parse circuit text into IR.
pub fn parse(text: &str) -> Result<AdaptiveCircuit, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, circuit: AdaptiveCircuit::new() };
    while p.peek().is_some() {
        p.stmt()?;
    }
    Ok(p.circuit)
}
