//! Line-oriented circuit format.
//!
//! ```text
//! QUBITS 3
//! X 2 0,!1 -
//! U 0 - 0.6:0,0.8:0,0.8:0,-0.6:0
//! PERM 0,1 - 1,2,3,0
//! MUX 0 - 2
//! BRANCH
//! END
//! BRANCH
//! H 1 - -
//! END
//! ```
//!
//! Every gate line is `KIND targets controls payload`. Qubit lists are
//! comma separated, `-` when empty; `!q` is an open control. U payloads are
//! row-major `re:im` entries, PERM payloads the image of each local basis
//! index, MUX payloads the branch count followed by that many
//! `BRANCH` … `END` blocks. Lines starting with `#` are comments.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::circuit::Circuit;
use super::gate::{Control, Gate, GateKind};
use crate::error::{Error, Result};

pub fn to_text(c: &Circuit) -> String {
    let mut out = format!("QUBITS {}\n", c.num_qubits());
    for g in c.gates() {
        write_gate(g, &mut out);
    }
    out
}

fn list(q: &[usize]) -> String {
    if q.is_empty() {
        "-".into()
    } else {
        q.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }
}

fn write_gate(g: &Gate, out: &mut String) {
    let controls = if g.controls.is_empty() {
        "-".to_string()
    } else {
        g.controls
            .iter()
            .map(|c| if c.value { c.qubit.to_string() } else { format!("!{}", c.qubit) })
            .collect::<Vec<_>>()
            .join(",")
    };
    let payload = match &g.kind {
        GateKind::X | GateKind::H => "-".to_string(),
        GateKind::Unitary(m) => {
            let mut e = Vec::with_capacity(m.len());
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    e.push(format!("{}:{}", m[(i, j)].re, m[(i, j)].im));
                }
            }
            e.join(",")
        }
        GateKind::Permutation(t) => list(t),
        GateKind::Multiplexer(b) => b.len().to_string(),
    };
    out.push_str(&format!("{} {} {} {}\n", g.label(), list(&g.targets), controls, payload));
    if let GateKind::Multiplexer(branches) = &g.kind {
        for b in branches {
            out.push_str("BRANCH\n");
            for inner in b {
                write_gate(inner, out);
            }
            out.push_str("END\n");
        }
    }
}

pub fn from_text(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, head) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty circuit".into() })?;
    let n = head
        .strip_prefix("QUBITS ")
        .and_then(|s| s.trim().parse::<usize>().ok())
        .ok_or(Error::Parse { line: ln, msg: "expected `QUBITS n`".into() })?;
    let mut c = Circuit::new(n);
    while let Some((ln, l)) = lines.next() {
        let g = parse_gate(ln, l, &mut lines)?;
        c.push(g).map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
    }
    Ok(c)
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_list(line: usize, s: &str) -> Result<Vec<usize>> {
    if s == "-" {
        return Ok(vec![]);
    }
    s.split(',').map(|t| t.parse().map_err(|_| perr(line, format!("bad index `{t}`")))).collect()
}

fn parse_gate<'a>(ln: usize, l: &str, rest: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<Gate> {
    let f: Vec<&str> = l.split_whitespace().collect();
    if f.len() != 4 {
        return Err(perr(ln, "expected `KIND targets controls payload`"));
    }
    let targets = parse_list(ln, f[1])?;
    let controls = if f[2] == "-" {
        vec![]
    } else {
        f[2].split(',')
            .map(|t| match t.strip_prefix('!') {
                Some(q) => q.parse().map(Control::off),
                None => t.parse().map(Control::on),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| perr(ln, "bad control list"))?
    };
    let kind = match f[0] {
        "X" => GateKind::X,
        "H" => GateKind::H,
        "PERM" => GateKind::Permutation(parse_list(ln, f[3])?),
        "U" => {
            let d = 1usize << targets.len();
            let vals = f[3]
                .split(',')
                .map(|e| {
                    let (re, im) = e.split_once(':').ok_or_else(|| perr(ln, "entry must be re:im"))?;
                    let re = re.parse().map_err(|_| perr(ln, "bad number"))?;
                    let im = im.parse().map_err(|_| perr(ln, "bad number"))?;
                    Ok(Complex64::new(re, im))
                })
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != d * d {
                return Err(perr(ln, format!("expected {} entries", d * d)));
            }
            GateKind::Unitary(DMatrix::from_row_slice(d, d, &vals))
        }
        "MUX" => {
            let count: usize = f[3].parse().map_err(|_| perr(ln, "bad branch count"))?;
            let mut branches = Vec::with_capacity(count);
            for _ in 0..count {
                match rest.next() {
                    Some((_, "BRANCH")) => {}
                    _ => return Err(perr(ln, "expected BRANCH")),
                }
                let mut b = Vec::new();
                loop {
                    let (bl, line) = rest.next().ok_or_else(|| perr(ln, "unterminated BRANCH"))?;
                    if line == "END" {
                        break;
                    }
                    b.push(parse_gate(bl, line, rest)?);
                }
                branches.push(b);
            }
            GateKind::Multiplexer(branches)
        }
        k => return Err(perr(ln, format!("unknown gate kind `{k}`"))),
    };
    Ok(Gate { kind, targets, controls })
}
