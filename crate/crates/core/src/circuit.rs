//! Gate records, circuits, and the line-based circuit text format.
//!
//! One gate per line, `GATE q[,q2][,angle]`, angles in radians with 17
//! significant digits. Lines starting with `#` are comments.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    S(usize),
    Sdg(usize),
    /// `diag(e^{-iθ/2}, e^{iθ/2})`
    Rz(usize, f64),
    /// `cos(θ/2)·I - i·sin(θ/2)·X`
    Rx(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::Rz(..) => "RZ",
            Gate::Rx(..) => "RX",
            Gate::Cnot { .. } => "CNOT",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(q)
            | Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::Rz(q, _)
            | Gate::Rx(q, _) => {
                vec![q]
            }
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    pub fn check(&self, n_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if let Gate::Cnot { control, target } = *self {
            if control == target {
                return Err(Error::SameControlTarget(control));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::X(q) | Gate::H(q) | Gate::S(q) | Gate::Sdg(q) => write!(f, "{} {q}", self.name()),
            Gate::Rz(q, a) | Gate::Rx(q, a) => write!(f, "{} {q},{a:.16e}", self.name()),
            Gate::Cnot { control, target } => write!(f, "CNOT {control},{target}"),
        }
    }
}

impl FromStr for Gate {
    type Err = String;

    fn from_str(line: &str) -> std::result::Result<Self, String> {
        let line = line.trim();
        let (name, args) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| format!("missing operands in {line:?}"))?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let qubit = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| format!("bad qubit {s:?}: {e}"))
        };
        let angle = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| format!("bad angle {s:?}: {e}"))
        };
        let name = name.to_ascii_uppercase();
        let expected = match name.as_str() {
            "X" | "H" | "S" | "SDG" => 1,
            "RZ" | "RX" | "CNOT" => 2,
            other => return Err(format!("unknown gate {other:?}")),
        };
        if args.len() != expected {
            return Err(format!(
                "{name} takes {expected} operands, got {}",
                args.len()
            ));
        }
        match name.as_str() {
            "X" => Ok(Gate::X(qubit(args[0])?)),
            "H" => Ok(Gate::H(qubit(args[0])?)),
            "S" => Ok(Gate::S(qubit(args[0])?)),
            "SDG" => Ok(Gate::Sdg(qubit(args[0])?)),
            "RZ" => Ok(Gate::Rz(qubit(args[0])?, angle(args[1])?)),
            "RX" => Ok(Gate::Rx(qubit(args[0])?, angle(args[1])?)),
            "CNOT" => Ok(Gate::Cnot {
                control: qubit(args[0])?,
                target: qubit(args[1])?,
            }),
            _ => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        for g in &other.gates {
            self.push(*g)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Number of layers when every gate is scheduled as early as its qubits allow.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        for g in &self.gates {
            let qs = g.qubits();
            let next = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = next;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {}\n", self.n_qubits);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses [`Circuit::to_text`] output. Without a `# qubits` line the
    /// register is sized to the largest index used.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(n) = comment.trim().strip_prefix("qubits") {
                    let n = n.trim().parse::<usize>().map_err(|e| Error::Parse {
                        line: i + 1,
                        msg: e.to_string(),
                    })?;
                    declared = Some(n);
                }
                continue;
            }
            let gate = line
                .parse::<Gate>()
                .map_err(|msg| Error::Parse { line: i + 1, msg })?;
            gates.push((i + 1, gate));
        }
        let inferred = gates
            .iter()
            .flat_map(|(_, g)| g.qubits())
            .max()
            .map_or(1, |q| q + 1);
        let mut circuit = Circuit::new(declared.unwrap_or(inferred))?;
        for (line, g) in gates {
            circuit.push(g).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(circuit)
    }
}
