//! Four-qubit encoding of the mode pair and synthesis of the Strang block.
//!
//! Qubits 0,1 hold the `+k` mode and qubits 2,3 the `-k` mode; `|01>` is an
//! empty mode and `|10>` a singly occupied one, so the vacuum reads `0101`.
//! Qubit 0 is the leftmost tensor factor and the leftmost bitstring character.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::schedule::StepCoeffs;

pub const N_QUBITS: usize = 4;

/// Largest register [`pauli_to_matrix`] will expand densely.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Computational-basis indices of `|0101>, |1001>, |0110>, |1010>`.
pub const PHYS_INDICES: [usize; 4] = [0b0101, 0b1001, 0b0110, 0b1010];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Real coefficient times a tensor product of Pauli letters; position = qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub letters: Vec<Pauli>,
    pub coeff: f64,
}

impl PauliString {
    /// Parses letters such as `"XIYZ"`; panics on anything else.
    pub fn new(letters: &str, coeff: f64) -> Self {
        Self::parse(letters, coeff).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn parse(letters: &str, coeff: f64) -> Result<Self> {
        let letters = letters
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidParams(format!(
                    "not a Pauli letter: {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidParams("empty Pauli string".into()));
        }
        Ok(Self { letters, coeff })
    }

    pub fn identity(n: usize, coeff: f64) -> Self {
        Self {
            letters: vec![Pauli::I; n],
            coeff,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn count(&self, p: Pauli) -> usize {
        self.letters.iter().filter(|&&l| l == p).count()
    }

    /// Two Pauli strings commute iff they anticommute on an even number of sites.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.letters.iter().map(|p| p.letter()).collect();
        write!(f, "{:+}*{s}", self.coeff)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    pub terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn new(terms: Vec<PauliString>) -> Self {
        Self { terms }
    }

    pub fn non_identity(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.iter().filter(|t| !t.is_identity())
    }
}

/// Number operator `N_+ + N_-` on the encoded register.
pub fn z_q() -> PauliSum {
    PauliSum::new(vec![
        PauliString::new("IIII", 0.5),
        PauliString::new("ZIII", -0.25),
        PauliString::new("IZII", 0.25),
        PauliString::new("IIZI", -0.25),
        PauliString::new("IIIZ", 0.25),
        PauliString::new("ZZII", -0.25),
        PauliString::new("IIZZ", -0.25),
    ])
}

/// Pair generator `|1010><0101| + |0101><1010|`.
pub fn a_q() -> PauliSum {
    let e = 0.125;
    PauliSum::new(vec![
        PauliString::new("XXXX", e),
        PauliString::new("XXYY", e),
        PauliString::new("XYXY", -e),
        PauliString::new("XYYX", e),
        PauliString::new("YXXY", e),
        PauliString::new("YXYX", -e),
        PauliString::new("YYXX", e),
        PauliString::new("YYYY", e),
    ])
}

fn pauli_string_matrix(p: &PauliString, n_qubits: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n_qubits;
    let factors: Vec<_> = p.letters.iter().map(|l| l.matrix()).collect();
    DMatrix::from_fn(dim, dim, |r, c| {
        let mut v = Complex64::new(p.coeff, 0.0);
        for (q, m) in factors.iter().enumerate() {
            let shift = n_qubits - 1 - q;
            v *= m[(r >> shift) & 1][(c >> shift) & 1];
            if v == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        v
    })
}

/// Dense Kronecker expansion, qubit 0 leftmost.
pub fn pauli_to_matrix(sum: &PauliSum, n_qubits: usize) -> Result<DMatrix<Complex64>> {
    if n_qubits == 0 || n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            n_qubits,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n_qubits;
    let mut out = DMatrix::zeros(dim, dim);
    for term in &sum.terms {
        if term.letters.len() != n_qubits {
            return Err(Error::QubitOutOfRange {
                index: term.letters.len().max(1) - 1,
                n_qubits,
            });
        }
        out += pauli_string_matrix(term, n_qubits);
    }
    Ok(out)
}

/// Rows/columns of `m` at the physical basis indices.
pub fn restrict_to_physical(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(4, 4, |r, c| m[(PHYS_INDICES[r], PHYS_INDICES[c])])
}

/// Circuit for `exp(-i·angle·P)`, where `P` is the bare string (its
/// coefficient is expected to be folded into `angle` by the caller).
///
/// X letters are rotated with H, Y letters with SDG then H; parities are
/// collected onto the highest active qubit by a CNOT ladder.
pub fn synthesize_pauli_rotation(p: &PauliString, angle: f64, n_qubits: usize) -> Result<Circuit> {
    if p.is_identity() {
        return Err(Error::IdentityRotation);
    }
    let mut c = Circuit::new(n_qubits)?;
    let support = p.support();

    for &q in &support {
        match p.letters[q] {
            Pauli::X => c.push(Gate::H(q))?,
            Pauli::Y => {
                c.push(Gate::Sdg(q))?;
                c.push(Gate::H(q))?;
            }
            _ => {}
        }
    }
    for w in support.windows(2) {
        c.push(Gate::Cnot {
            control: w[0],
            target: w[1],
        })?;
    }
    let last = *support.last().expect("non-identity string has support");
    c.push(Gate::Rz(last, 2.0 * angle))?;
    for w in support.windows(2).rev() {
        c.push(Gate::Cnot {
            control: w[0],
            target: w[1],
        })?;
    }
    for &q in support.iter().rev() {
        match p.letters[q] {
            Pauli::X => c.push(Gate::H(q))?,
            Pauli::Y => {
                c.push(Gate::H(q))?;
                c.push(Gate::S(q))?;
            }
            _ => {}
        }
    }
    Ok(c)
}

fn push_exponential(c: &mut Circuit, sum: &PauliSum, theta: f64) -> Result<()> {
    for term in sum.non_identity() {
        c.append(&synthesize_pauli_rotation(
            term,
            theta * term.coeff,
            c.n_qubits(),
        )?)?;
    }
    Ok(())
}

/// Operators whose exponentials make up one Strang block.
#[derive(Debug, Clone, PartialEq)]
pub struct Generators {
    pub z: PauliSum,
    pub a: PauliSum,
}

impl Default for Generators {
    fn default() -> Self {
        Self { z: z_q(), a: a_q() }
    }
}

impl Generators {
    /// `e^{-iθ_z Z_q} e^{-iθ_a A_q} e^{-iθ_z Z_q}` with identity terms dropped.
    /// The `A_q` strings commute, so their product is the exact exponential.
    pub fn synthesize_step(&self, step: &StepCoeffs) -> Result<Circuit> {
        let angles = step.strang_angles();
        let mut c = Circuit::new(N_QUBITS)?;
        push_exponential(&mut c, &self.z, angles.theta_z_half)?;
        if angles.theta_a != 0.0 {
            push_exponential(&mut c, &self.a, angles.theta_a)?;
        }
        push_exponential(&mut c, &self.z, angles.theta_z_half)?;
        Ok(c)
    }

    pub fn build_full_circuit<'a, I>(&self, steps: I) -> Result<Circuit>
    where
        I: IntoIterator<Item = &'a StepCoeffs>,
    {
        let mut c = vacuum_preparation()?;
        for step in steps {
            c.append(&self.synthesize_step(step)?)?;
        }
        Ok(c)
    }
}

/// `X` on qubits 1 and 3 maps `|0000>` to the encoded vacuum `|0101>`.
pub fn vacuum_preparation() -> Result<Circuit> {
    let mut c = Circuit::new(N_QUBITS)?;
    c.push(Gate::X(1))?;
    c.push(Gate::X(3))?;
    Ok(c)
}

pub fn synthesize_step(step: &StepCoeffs) -> Result<Circuit> {
    Generators::default().synthesize_step(step)
}

/// Vacuum preparation followed by one Strang block per step.
pub fn build_full_circuit<'a, I>(steps: I) -> Result<Circuit>
where
    I: IntoIterator<Item = &'a StepCoeffs>,
{
    Generators::default().build_full_circuit(steps)
}
