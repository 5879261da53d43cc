//! OpenQASM 2.0 output and a parser for the subset we emit.

use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{cry_decomposed, Circuit, Gate};

pub const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QasmOptions {
    /// Expand `cry` into `ry` and `cx`.
    pub qelib_only: bool,
    /// Measure the ancilla qubits into a classical register.
    pub measure_ancillas: bool,
}

fn angle(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_qasm(c: &Circuit) -> String {
    to_qasm_with(c, QasmOptions::default())
}

pub fn to_qasm_with(c: &Circuit, opts: QasmOptions) -> String {
    let mut out = String::from(HEADER);
    writeln!(out, "qreg q[{}];", c.num_qubits).unwrap();
    let anc = c.num_initial_ancillas;
    if opts.measure_ancillas && anc > 0 {
        writeln!(out, "creg c[{anc}];").unwrap();
    }
    for g in &c.gates {
        match *g {
            Gate::CRY(a, b, t) if opts.qelib_only => {
                for h in cry_decomposed(a, b, t) {
                    out.push_str(&gate_line(&h));
                }
            }
            _ => out.push_str(&gate_line(g)),
        }
    }
    if opts.measure_ancillas {
        let first = c.num_qubits - anc;
        for i in 0..anc {
            writeln!(out, "measure q[{}] -> c[{i}];", first + i).unwrap();
        }
    }
    out
}

fn gate_line(g: &Gate) -> String {
    use Gate::*;
    match *g {
        X(q) => format!("x q[{q}];\n"),
        CX(a, b) => format!("cx q[{a}],q[{b}];\n"),
        CCX(a, b, c) => format!("ccx q[{a}],q[{b}],q[{c}];\n"),
        RY(q, t) => format!("ry({}) q[{q}];\n", angle(t)),
        CRY(a, b, t) => format!("cry({}) q[{a}],q[{b}];\n", angle(t)),
        Phase(q, p) => format!("u1({}) q[{q}];\n", angle(p)),
        H(q) => format!("h q[{q}];\n"),
        CH(a, b) => format!("ch q[{a}],q[{b}];\n"),
        T(q) => format!("t q[{q}];\n"),
        Tdg(q) => format!("tdg q[{q}];\n"),
        S(q) => format!("s q[{q}];\n"),
        Sdg(q) => format!("sdg q[{q}];\n"),
        Z(q) => format!("z q[{q}];\n"),
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {msg}")]
pub struct QasmError {
    pub line: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedQasm {
    pub circuit: Circuit,
    /// `(qubit, classical bit)` pairs in file order.
    pub measurements: Vec<(usize, usize)>,
}

/// Parses the subset written by [`to_qasm_with`]: one qreg named `q`, at most
/// one creg, the gates of [`Gate`], and `measure`. Statements may share a
/// line but must not span lines.
pub fn parse_qasm(text: &str) -> Result<ParsedQasm, QasmError> {
    let mut num_qubits = None;
    let mut gates = Vec::new();
    let mut measurements = Vec::new();
    let mut seen_header = false;

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let err = |msg: String| QasmError { line, msg };
        let code = raw.split("//").next().unwrap_or("").trim();
        if code.is_empty() {
            continue;
        }
        if !code.ends_with(';') {
            return Err(err("statement must end with ';'".into()));
        }
        for stmt in code.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if !seen_header {
                if stmt != "OPENQASM 2.0" {
                    return Err(err(format!("expected OPENQASM 2.0 header, got {stmt:?}")));
                }
                seen_header = true;
                continue;
            }
            if stmt.starts_with("include") {
                continue;
            }
            if let Some(rest) = stmt.strip_prefix("qreg") {
                if num_qubits.is_some() {
                    return Err(err("only one qreg is supported".into()));
                }
                num_qubits = Some(register(rest, "q").map_err(err)?);
                continue;
            }
            if let Some(rest) = stmt.strip_prefix("creg") {
                register(rest, "c").map_err(err)?;
                continue;
            }
            let n = num_qubits.ok_or_else(|| err("gate before qreg".into()))?;
            if let Some(rest) = stmt.strip_prefix("measure") {
                let (q, c) = rest
                    .split_once("->")
                    .ok_or_else(|| err("measure needs '->'".into()))?;
                let q = operand(q.trim(), "q", n).map_err(err)?;
                let c = operand(c.trim(), "c", usize::MAX).map_err(err)?;
                measurements.push((q, c));
                continue;
            }
            gates.push(gate(stmt, n).map_err(err)?);
        }
    }
    let num_qubits = num_qubits.ok_or(QasmError {
        line: text.lines().count(),
        msg: "missing qreg".into(),
    })?;
    let circuit = Circuit::from_gates(num_qubits, gates).map_err(|e| QasmError {
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(ParsedQasm {
        circuit,
        measurements,
    })
}

fn register(decl: &str, name: &str) -> Result<usize, String> {
    let d = decl.trim();
    let inner = d
        .strip_prefix(name)
        .and_then(|r| r.trim().strip_prefix('['))
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("bad register declaration {d:?}"))?;
    inner
        .trim()
        .parse()
        .map_err(|_| format!("bad register size {inner:?}"))
}

fn operand(s: &str, reg: &str, size: usize) -> Result<usize, String> {
    let idx = register(s, reg)?;
    if idx >= size {
        return Err(format!("index {idx} out of range for {reg}[{size}]"));
    }
    Ok(idx)
}

fn gate(stmt: &str, n: usize) -> Result<Gate, String> {
    let name_end = stmt
        .find(|c: char| c == '(' || c.is_whitespace())
        .ok_or_else(|| format!("malformed statement {stmt:?}"))?;
    let name = &stmt[..name_end];
    let mut rest = stmt[name_end..].trim_start();
    let mut param = None;
    if let Some(r) = rest.strip_prefix('(') {
        let close = r.rfind(')').ok_or("unclosed parameter list")?;
        param = Some(eval(&r[..close])?);
        rest = &r[close + 1..];
    }
    let qs = rest
        .split(',')
        .map(|a| operand(a.trim(), "q", n))
        .collect::<Result<Vec<_>, _>>()?;
    let arity = |k: usize| {
        if qs.len() == k {
            Ok(())
        } else {
            Err(format!("{name} takes {k} qubits, got {}", qs.len()))
        }
    };
    let need = |p: Option<f64>| p.ok_or_else(|| format!("{name} needs an angle"));
    let none = |p: Option<f64>| match p {
        Some(_) => Err(format!("{name} takes no angle")),
        None => Ok(()),
    };
    use Gate::*;
    let g = match name {
        "x" | "h" | "t" | "tdg" | "s" | "sdg" | "z" => {
            arity(1)?;
            none(param)?;
            let q = qs[0];
            match name {
                "x" => X(q),
                "h" => H(q),
                "t" => T(q),
                "tdg" => Tdg(q),
                "s" => S(q),
                "sdg" => Sdg(q),
                _ => Z(q),
            }
        }
        "ry" => {
            arity(1)?;
            RY(qs[0], need(param)?)
        }
        "u1" | "p" => {
            arity(1)?;
            Phase(qs[0], need(param)?)
        }
        "cx" => {
            arity(2)?;
            none(param)?;
            CX(qs[0], qs[1])
        }
        "ch" => {
            arity(2)?;
            none(param)?;
            CH(qs[0], qs[1])
        }
        "cry" => {
            arity(2)?;
            CRY(qs[0], qs[1], need(param)?)
        }
        "ccx" => {
            arity(3)?;
            none(param)?;
            CCX(qs[0], qs[1], qs[2])
        }
        other => return Err(format!("unsupported gate {other:?}")),
    };
    Ok(g)
}

/// Evaluates `+ - * /`, unary minus, parentheses, `pi` and decimal literals.
fn eval(expr: &str) -> Result<f64, String> {
    struct P<'a> {
        s: &'a [u8],
        i: usize,
    }
    impl P<'_> {
        fn ws(&mut self) {
            while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
                self.i += 1;
            }
        }
        fn peek(&mut self) -> Option<u8> {
            self.ws();
            self.s.get(self.i).copied()
        }
        fn sum(&mut self) -> Result<f64, String> {
            let mut v = self.product()?;
            while let Some(op @ (b'+' | b'-')) = self.peek() {
                self.i += 1;
                let r = self.product()?;
                v = if op == b'+' { v + r } else { v - r };
            }
            Ok(v)
        }
        fn product(&mut self) -> Result<f64, String> {
            let mut v = self.unary()?;
            while let Some(op @ (b'*' | b'/')) = self.peek() {
                self.i += 1;
                let r = self.unary()?;
                v = if op == b'*' { v * r } else { v / r };
            }
            Ok(v)
        }
        fn unary(&mut self) -> Result<f64, String> {
            match self.peek() {
                Some(b'-') => {
                    self.i += 1;
                    Ok(-self.unary()?)
                }
                Some(b'+') => {
                    self.i += 1;
                    self.unary()
                }
                _ => self.atom(),
            }
        }
        fn atom(&mut self) -> Result<f64, String> {
            match self.peek() {
                Some(b'(') => {
                    self.i += 1;
                    let v = self.sum()?;
                    if self.peek() != Some(b')') {
                        return Err("expected ')'".into());
                    }
                    self.i += 1;
                    Ok(v)
                }
                Some(b'p') if self.s[self.i..].starts_with(b"pi") => {
                    self.i += 2;
                    Ok(std::f64::consts::PI)
                }
                Some(c) if c.is_ascii_digit() || c == b'.' => {
                    let start = self.i;
                    while self.i < self.s.len() {
                        let c = self.s[self.i];
                        let exp_sign = (c == b'-' || c == b'+')
                            && matches!(self.s[self.i - 1], b'e' | b'E');
                        if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                            self.i += 1;
                        } else {
                            break;
                        }
                    }
                    let lit = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                    lit.parse().map_err(|_| format!("bad number {lit:?}"))
                }
                other => Err(format!(
                    "unexpected {:?}",
                    other.map(char::from).unwrap_or(' ')
                )),
            }
        }
    }
    let mut p = P {
        s: expr.as_bytes(),
        i: 0,
    };
    let v = p.sum()?;
    if p.peek().is_some() {
        return Err(format!("trailing input in {expr:?}"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_circuit() {
        assert_eq!(
            to_qasm(&Circuit::new(1)),
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n"
        );
    }

    #[test]
    fn basic_lines() {
        let c = Circuit::from_gates(2, vec![Gate::X(0), Gate::CX(0, 1)]).unwrap();
        assert!(to_qasm(&c).ends_with("qreg q[2];\nx q[0];\ncx q[0],q[1];\n"));
    }

    #[test]
    fn angles_round_trip_exactly() {
        let gates = vec![
            Gate::CRY(0, 1, 1.0 / 3.0),
            Gate::Phase(1, -PI / 7.0),
            Gate::RY(0, 1e-300),
            Gate::CCX(0, 1, 2),
            Gate::CH(2, 0),
            Gate::Tdg(1),
        ];
        let c = Circuit::from_gates(3, gates).unwrap();
        let back = parse_qasm(&to_qasm(&c)).unwrap();
        assert_eq!(back.circuit, c);
    }

    #[test]
    fn qelib_only_expands_cry() {
        let c = Circuit::from_gates(2, vec![Gate::CRY(0, 1, 0.5)]).unwrap();
        let opts = QasmOptions {
            qelib_only: true,
            ..Default::default()
        };
        let back = parse_qasm(&to_qasm_with(&c, opts)).unwrap();
        assert_eq!(back.circuit.gates, cry_decomposed(0, 1, 0.5));
    }

    #[test]
    fn measurements() {
        let mut c = Circuit::from_gates(3, vec![Gate::X(0)]).unwrap();
        c.num_initial_ancillas = 2;
        let opts = QasmOptions {
            measure_ancillas: true,
            ..Default::default()
        };
        let text = to_qasm_with(&c, opts);
        assert!(text.contains("creg c[2];"));
        let back = parse_qasm(&text).unwrap();
        assert_eq!(back.measurements, vec![(1, 0), (2, 1)]);
    }

    #[test]
    fn expressions() {
        assert_eq!(eval("pi/2").unwrap(), PI / 2.0);
        assert_eq!(eval("-pi*3/4").unwrap(), -PI * 3.0 / 4.0);
        assert_eq!(eval("-(1.5e-1 + 2)").unwrap(), -2.15);
        assert!(eval("1 +").is_err());
        assert!(eval("2 3").is_err());
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[5];\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n").unwrap_err();
        assert!(e.msg.contains("unsupported"));
        assert!(parse_qasm("qreg q[1];").is_err());
    }
}
