//! Hamiltonians as real linear combinations of Pauli strings, the model
//! families used in threshold studies, and the plain-text term-list format.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use log::warn;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::pauli::{self, Pauli, PauliError, PauliString};

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coefficient {0} is not finite and nonzero")]
    InvalidCoefficient(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: term acts on {found} qubits, expected {expected}")]
    InconsistentQubits {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("term {index} acts on {found} qubits, Hamiltonian has {expected}")]
    TermQubitMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("Hamiltonian has no terms")]
    Empty,
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A real coefficient attached to a Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    coefficient: f64,
    pauli: PauliString,
}

impl Term {
    pub fn new(coefficient: f64, pauli: PauliString) -> Result<Self, HamiltonianError> {
        if !coefficient.is_finite() || coefficient == 0.0 {
            return Err(HamiltonianError::InvalidCoefficient(coefficient));
        }
        Ok(Term { coefficient, pauli })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn pauli(&self) -> &PauliString {
        &self.pauli
    }
}

/// `H = offset·I + Σ_α c_α P_α` with distinct, non-identity `P_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
    offset: f64,
}

impl Hamiltonian {
    /// Builds a Hamiltonian, merging duplicate strings by adding their
    /// coefficients (first occurrence keeps its position), dropping terms that
    /// cancel, and folding identity terms into the scalar offset.
    pub fn new(n_qubits: usize, terms: Vec<Term>) -> Result<Self, HamiltonianError> {
        if n_qubits == 0 {
            return Err(HamiltonianError::InvalidParameter(
                "Hamiltonian needs at least one qubit".into(),
            ));
        }
        let mut offset = 0.0;
        let mut merged: Vec<(PauliString, f64)> = Vec::with_capacity(terms.len());
        let mut position: HashMap<PauliString, usize> = HashMap::new();
        for (index, term) in terms.into_iter().enumerate() {
            let found = term.pauli.n_qubits();
            if found != n_qubits {
                return Err(HamiltonianError::TermQubitMismatch {
                    index,
                    found,
                    expected: n_qubits,
                });
            }
            if term.pauli.is_identity() {
                offset += term.coefficient;
                continue;
            }
            match position.get(&term.pauli) {
                Some(&at) => {
                    warn!("merging duplicate term {}", term.pauli);
                    merged[at].1 += term.coefficient;
                }
                None => {
                    position.insert(term.pauli.clone(), merged.len());
                    merged.push((term.pauli, term.coefficient));
                }
            }
        }
        let terms = merged
            .into_iter()
            .filter_map(|(p, c)| {
                if c == 0.0 {
                    warn!("dropping term {p}: coefficients cancel");
                    None
                } else {
                    Some(Term {
                        coefficient: c,
                        pauli: p,
                    })
                }
            })
            .collect();
        Ok(Hamiltonian {
            n_qubits,
            terms,
            offset,
        })
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity, carried outside the term list.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn coefficient_of(&self, pauli: &PauliString) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| &t.pauli == pauli)
            .map(|t| t.coefficient)
    }
}

/// Linear qubit ordering of a rectangular lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOrdering {
    /// Qubit `(row, col)` has index `col * rows + row`; columns are contiguous.
    ColumnMajor,
    /// Qubit `(row, col)` has index `row * cols + col`; rows are contiguous.
    RowMajor,
}

fn lattice_index(row: usize, col: usize, rows: usize, cols: usize, ordering: LatticeOrdering) -> usize {
    match ordering {
        LatticeOrdering::ColumnMajor => col * rows + row,
        LatticeOrdering::RowMajor => row * cols + col,
    }
}

/// Bacon-Shor stabilizer Hamiltonian on a `rows × cols` lattice.
///
/// One X-type term per pair of adjacent columns (X on every qubit of both
/// columns) followed by one Z-type term per pair of adjacent rows (Z on every
/// qubit of both rows). All coefficients are 1.
pub fn bacon_shor(
    rows: usize,
    cols: usize,
    ordering: LatticeOrdering,
) -> Result<Hamiltonian, HamiltonianError> {
    if rows < 2 || cols < 2 {
        return Err(HamiltonianError::InvalidParameter(format!(
            "Bacon-Shor lattice needs at least 2x2, got {rows}x{cols}"
        )));
    }
    let n = rows * cols;
    let mut terms = Vec::with_capacity(rows + cols - 2);
    for c in 0..cols - 1 {
        let ops = (0..rows).flat_map(|r| {
            [c, c + 1].map(|cc| (lattice_index(r, cc, rows, cols, ordering), Pauli::X))
        });
        terms.push(Term::new(1.0, PauliString::from_sparse(n, ops)?)?);
    }
    for r in 0..rows - 1 {
        let ops = (0..cols).flat_map(|c| {
            [r, r + 1].map(|rr| (lattice_index(rr, c, rows, cols, ordering), Pauli::Z))
        });
        terms.push(Term::new(1.0, PauliString::from_sparse(n, ops)?)?);
    }
    Hamiltonian::new(n, terms)
}

fn push_if_nonzero(terms: &mut Vec<Term>, c: f64, p: PauliString) -> Result<(), HamiltonianError> {
    if c != 0.0 {
        terms.push(Term::new(c, p)?);
    }
    Ok(())
}

/// Open-boundary transverse-field Ising chain `J Σ Z_i Z_{i+1} + g Σ X_i`.
pub fn tfim(n: usize, coupling: f64, field: f64) -> Result<Hamiltonian, HamiltonianError> {
    if n < 2 {
        return Err(HamiltonianError::InvalidParameter(format!(
            "TFIM needs at least 2 sites, got {n}"
        )));
    }
    let mut terms = Vec::with_capacity(2 * n - 1);
    for i in 0..n - 1 {
        let p = PauliString::from_sparse(n, [(i, Pauli::Z), (i + 1, Pauli::Z)])?;
        push_if_nonzero(&mut terms, coupling, p)?;
    }
    for i in 0..n {
        push_if_nonzero(&mut terms, field, PauliString::from_sparse(n, [(i, Pauli::X)])?)?;
    }
    Hamiltonian::new(n, terms)
}

/// One-dimensional hardcore-boson chain
/// `t/2 Σ (X_i X_{i+1} + Y_i Y_{i+1}) + 2g Σ (I − Z_j)`.
///
/// Terms are ordered XX, YY, then Z; the identity part `2g·n` is the offset.
pub fn hardcore_boson_1d(n: usize, hopping: f64, site_energy: f64) -> Result<Hamiltonian, HamiltonianError> {
    if n < 2 {
        return Err(HamiltonianError::InvalidParameter(format!(
            "hardcore boson chain needs at least 2 sites, got {n}"
        )));
    }
    let mut terms = Vec::with_capacity(3 * n - 2);
    for op in [Pauli::X, Pauli::Y] {
        for i in 0..n - 1 {
            let p = PauliString::from_sparse(n, [(i, op), (i + 1, op)])?;
            push_if_nonzero(&mut terms, hopping / 2.0, p)?;
        }
    }
    for j in 0..n {
        let p = PauliString::from_sparse(n, [(j, Pauli::Z)])?;
        push_if_nonzero(&mut terms, -2.0 * site_energy, p)?;
    }
    Ok(Hamiltonian::new(n, terms)?.with_offset(2.0 * site_energy * n as f64))
}

/// Random `n`-term Hamiltonian with unit coefficients.
///
/// Each term's weight is drawn from an exponential distribution with mean
/// `mean_weight`, rounded to the nearest integer and clamped to `[1, n]`. The
/// sites are sampled without replacement and each carries a uniform choice of
/// X, Y or Z. Strings already present are redrawn. The generator is
/// `ChaCha8Rng::seed_from_u64(seed)`.
pub fn random_hamiltonian(n: usize, mean_weight: f64, seed: u64) -> Result<Hamiltonian, HamiltonianError> {
    if n == 0 {
        return Err(HamiltonianError::InvalidParameter("need at least one qubit".into()));
    }
    if mean_weight.is_nan() || mean_weight <= 0.0 || mean_weight.is_infinite() {
        return Err(HamiltonianError::InvalidParameter(format!(
            "mean weight must be positive, got {mean_weight}"
        )));
    }
    let exp = Exp::new(1.0 / mean_weight)
        .map_err(|e| HamiltonianError::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::with_capacity(n);
    let mut terms = Vec::with_capacity(n);
    while terms.len() < n {
        let t = (exp.sample(&mut rng).round() as usize).clamp(1, n);
        let sites = sample(&mut rng, n, t);
        let ops = sites.into_iter().map(|i| {
            let op = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
            (i, op)
        });
        let ops: Vec<_> = ops.collect();
        let p = PauliString::from_sparse(n, ops)?;
        if seen.insert(p.clone()) {
            terms.push(Term::new(1.0, p)?);
        }
    }
    Hamiltonian::new(n, terms)
}

enum ParsedPauli {
    Dense(Vec<Pauli>),
    Sparse(Vec<(usize, Pauli)>),
}

fn parse_term_pauli(text: &str) -> Result<ParsedPauli, PauliError> {
    if pauli::looks_sparse(text) {
        let ops = text
            .split_whitespace()
            .map(pauli::parse_sparse_token)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ParsedPauli::Sparse(ops))
    } else {
        let ops = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ParsedPauli::Dense(ops))
    }
}

/// Parses the term-list format: `#` comments, an optional leading
/// `qubits: n` header, then one `<coefficient> <pauli>` term per line.
pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian, HamiltonianError> {
    let mut declared: Option<usize> = None;
    let mut saw_term = false;
    let mut rows: Vec<(usize, f64, ParsedPauli)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("qubits:") {
            if saw_term || declared.is_some() {
                return Err(HamiltonianError::Parse {
                    line: line_no,
                    message: "qubits header must precede all terms".into(),
                });
            }
            let n: usize = rest.trim().parse().map_err(|_| HamiltonianError::Parse {
                line: line_no,
                message: format!("invalid qubit count {:?}", rest.trim()),
            })?;
            if n == 0 {
                return Err(HamiltonianError::Parse {
                    line: line_no,
                    message: "qubit count must be positive".into(),
                });
            }
            declared = Some(n);
            continue;
        }
        saw_term = true;
        let (coef_text, pauli_text) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| HamiltonianError::Parse {
                line: line_no,
                message: "expected `<coefficient> <pauli>`".into(),
            })?;
        let coefficient: f64 = coef_text.parse().map_err(|_| HamiltonianError::Parse {
            line: line_no,
            message: format!("invalid coefficient {coef_text:?}"),
        })?;
        if !coefficient.is_finite() {
            return Err(HamiltonianError::Parse {
                line: line_no,
                message: format!("non-finite coefficient {coef_text:?}"),
            });
        }
        let parsed = parse_term_pauli(pauli_text).map_err(|e| HamiltonianError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        rows.push((line_no, coefficient, parsed));
    }
    if rows.is_empty() {
        return Err(HamiltonianError::Empty);
    }

    let dense_len = rows.iter().find_map(|(line, _, p)| match p {
        ParsedPauli::Dense(ops) => Some((*line, ops.len())),
        ParsedPauli::Sparse(_) => None,
    });
    let max_sparse = rows
        .iter()
        .filter_map(|(line, _, p)| match p {
            ParsedPauli::Sparse(ops) => ops.iter().map(|&(i, _)| i + 1).max().map(|m| (*line, m)),
            ParsedPauli::Dense(_) => None,
        })
        .max_by_key(|&(_, m)| m);
    let n = match (declared, dense_len, max_sparse) {
        (Some(n), _, _) => n,
        (None, Some((_, len)), _) => len,
        (None, None, Some((_, m))) => m,
        (None, None, None) => unreachable!("rows is nonempty"),
    };

    let mut terms = Vec::with_capacity(rows.len());
    for (line, coefficient, parsed) in rows {
        let p = match parsed {
            ParsedPauli::Dense(ops) => {
                if ops.len() != n {
                    return Err(HamiltonianError::InconsistentQubits {
                        line,
                        found: ops.len(),
                        expected: n,
                    });
                }
                PauliString::from_paulis(ops)
            }
            ParsedPauli::Sparse(ops) => {
                if let Some(&(i, _)) = ops.iter().find(|&&(i, _)| i >= n) {
                    return Err(HamiltonianError::InconsistentQubits {
                        line,
                        found: i + 1,
                        expected: n,
                    });
                }
                PauliString::from_sparse(n, ops).map_err(|e| HamiltonianError::Parse {
                    line,
                    message: e.to_string(),
                })?
            }
        };
        if coefficient == 0.0 {
            warn!("line {line}: dropping zero-coefficient term {p}");
            continue;
        }
        terms.push(Term::new(coefficient, p)?);
    }
    Hamiltonian::new(n, terms)
}

/// Renders the term-list format in dense notation. A nonzero offset is
/// written as an identity term, which `parse_hamiltonian` folds back.
pub fn render_hamiltonian(h: &Hamiltonian) -> String {
    let mut out = String::new();
    writeln!(out, "qubits: {}", h.n_qubits()).unwrap();
    if h.offset() != 0.0 {
        writeln!(out, "{} {}", h.offset(), PauliString::identity(h.n_qubits())).unwrap();
    }
    for t in h.terms() {
        writeln!(out, "{} {}", t.coefficient(), t.pauli()).unwrap();
    }
    out
}

pub fn load_hamiltonian(path: impl AsRef<Path>) -> Result<Hamiltonian, HamiltonianError> {
    parse_hamiltonian(&std::fs::read_to_string(path)?)
}

pub fn save_hamiltonian(h: &Hamiltonian, path: impl AsRef<Path>) -> Result<(), HamiltonianError> {
    std::fs::write(path, render_hamiltonian(h))?;
    Ok(())
}
