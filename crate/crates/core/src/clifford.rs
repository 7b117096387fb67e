//! {CNOT, H, S} circuits acting on phaseless Paulis, and per-block synthesis
//! of circuits that diagonalize a set of block-commuting strings.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::pauli::{BlockSpec, PauliError, PauliString};

/// Largest qubit count accepted by [`count_diagonalized`].
pub const MAX_ENUMERATION_QUBITS: usize = 6;

#[derive(Debug, Error, PartialEq)]
pub enum CliffordError {
    #[error("gate {gate} does not fit a {n}-qubit circuit")]
    InvalidGate { gate: Gate, n: usize },
    #[error("circuit acts on {circuit} qubits, Pauli on {pauli}")]
    QubitMismatch { circuit: usize, pauli: usize },
    #[error("members {a} and {b} do not block-commute")]
    NotCommuting { a: usize, b: usize },
    #[error("{n} qubits is too many to enumerate (limit {limit})")]
    TooManyQubits { n: usize, limit: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("internal synthesis failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::S(q) => (q, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }

    fn fits(&self, n: usize) -> bool {
        match self.qubits() {
            (q, None) => q < n,
            (c, Some(t)) => c < n && t < n && c != t,
        }
    }

    fn shifted(self, offset: usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(q + offset),
            Gate::S(q) => Gate::S(q + offset),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: control + offset,
                target: target + offset,
            },
        }
    }

    /// Phaseless conjugation `P ↦ G P G†`.
    pub(crate) fn apply(&self, p: &mut PauliString) {
        match *self {
            Gate::H(q) => {
                let (x, z) = (p.x_bit(q), p.z_bit(q));
                p.set_x(q, z);
                p.set_z(q, x);
            }
            Gate::S(q) => {
                let z = p.z_bit(q) ^ p.x_bit(q);
                p.set_z(q, z);
            }
            Gate::Cnot { control, target } => {
                let xt = p.x_bit(target) ^ p.x_bit(control);
                let zc = p.z_bit(control) ^ p.z_bit(target);
                p.set_x(target, xt);
                p.set_z(control, zc);
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

/// An ordered gate list; the first gate is applied first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn new(n_qubits: usize) -> Self {
        CliffordCircuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self, CliffordError> {
        let mut c = CliffordCircuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CliffordError> {
        if !gate.fits(self.n_qubits) {
            return Err(CliffordError::InvalidGate {
                gate,
                n: self.n_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Greedy layering: each gate goes one layer after the latest layer that
    /// already touches one of its qubits.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let layer = match g.qubits() {
                (q, None) => {
                    level[q] += 1;
                    level[q]
                }
                (c, Some(t)) => {
                    let l = level[c].max(level[t]) + 1;
                    level[c] = l;
                    level[t] = l;
                    l
                }
            };
            depth = depth.max(layer);
        }
        depth
    }

    /// Image `U P U†` of `P` under this circuit, phase dropped.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString, CliffordError> {
        if p.n_qubits() != self.n_qubits {
            return Err(CliffordError::QubitMismatch {
                circuit: self.n_qubits,
                pauli: p.n_qubits(),
            });
        }
        let mut out = p.clone();
        for g in &self.gates {
            g.apply(&mut out);
        }
        Ok(out)
    }

    pub fn tableau(&self) -> Tableau {
        Tableau::from_circuit(self)
    }

    /// Plain-text export: `qubits: n` followed by one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits: {}\n", self.n_qubits);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for CliffordCircuit {
    type Err = CliffordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut circuit: Option<CliffordCircuit> = None;
        for (idx, raw) in s.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let err = |message: String| CliffordError::Parse { line, message };
            let tokens: Vec<&str> = text.split_whitespace().collect();
            let num = |t: &str| t.parse::<usize>().map_err(|_| err(format!("bad qubit index {t:?}")));
            match (&mut circuit, tokens.as_slice()) {
                (None, ["qubits:", n]) => circuit = Some(CliffordCircuit::new(num(n)?)),
                (None, _) => return Err(err("expected `qubits: n` header".into())),
                (Some(c), [op, rest @ ..]) => {
                    let gate = match (op.to_ascii_uppercase().as_str(), rest) {
                        ("H", [q]) => Gate::H(num(q)?),
                        ("S", [q]) => Gate::S(num(q)?),
                        ("CNOT" | "CX", [a, b]) => Gate::Cnot {
                            control: num(a)?,
                            target: num(b)?,
                        },
                        _ => return Err(err(format!("unrecognized gate {text:?}"))),
                    };
                    c.push(gate).map_err(|e| err(e.to_string()))?;
                }
                (Some(_), []) => unreachable!("blank lines are skipped"),
            }
        }
        circuit.ok_or(CliffordError::Parse {
            line: 0,
            message: "missing `qubits: n` header".into(),
        })
    }
}

/// Symplectic action of a circuit: the images of `X_j` and `Z_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
}

impl Tableau {
    pub fn from_circuit(c: &CliffordCircuit) -> Self {
        let n = c.n_qubits();
        let basis = |x: bool, j: usize| {
            let mut p = PauliString::identity(n);
            if x {
                p.set_x(j, true);
            } else {
                p.set_z(j, true);
            }
            c.conjugate(&p).expect("same qubit count")
        };
        Tableau {
            x_images: (0..n).map(|j| basis(true, j)).collect(),
            z_images: (0..n).map(|j| basis(false, j)).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.x_images.len()
    }

    pub fn x_image(&self, j: usize) -> &PauliString {
        &self.x_images[j]
    }

    pub fn z_image(&self, j: usize) -> &PauliString {
        &self.z_images[j]
    }

    /// Image of `P` as the phaseless product of generator images.
    pub fn apply(&self, p: &PauliString) -> Result<PauliString, CliffordError> {
        let n = self.n_qubits();
        if p.n_qubits() != n {
            return Err(CliffordError::QubitMismatch {
                circuit: n,
                pauli: p.n_qubits(),
            });
        }
        let mut out = PauliString::identity(n);
        for j in 0..n {
            if p.x_bit(j) {
                out.mul_assign(&self.x_images[j]);
            }
            if p.z_bit(j) {
                out.mul_assign(&self.z_images[j]);
            }
        }
        Ok(out)
    }

    /// Checks that the images satisfy the canonical commutation relations,
    /// i.e. that the 2n×2n binary matrix preserves the symplectic form.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n_qubits();
        let anti = |a: &PauliString, b: &PauliString| !a.commutes(b).expect("same size");
        for i in 0..n {
            for j in 0..n {
                if anti(&self.x_images[i], &self.x_images[j])
                    || anti(&self.z_images[i], &self.z_images[j])
                    || anti(&self.x_images[i], &self.z_images[j]) != (i == j)
                {
                    return false;
                }
            }
        }
        true
    }
}

/// True iff `P` is diagonal in the computational basis (no X or Y factor).
pub fn is_diagonal(p: &PauliString) -> bool {
    p.is_z_type()
}

/// Number of phaseless `n`-qubit Paulis whose image under `c` is diagonal.
pub fn count_diagonalized(c: &CliffordCircuit) -> Result<u64, CliffordError> {
    let n = c.n_qubits();
    if n > MAX_ENUMERATION_QUBITS {
        return Err(CliffordError::TooManyQubits {
            n,
            limit: MAX_ENUMERATION_QUBITS,
        });
    }
    let tab = c.tableau();
    let mut count = 0;
    for p in PauliString::enumerate(n) {
        if is_diagonal(&tab.apply(&p)?) {
            count += 1;
        }
    }
    Ok(count)
}

/// A uniformly random sequence of `len` gates from {H, S, CNOT}, drawn from
/// `ChaCha8Rng::seed_from_u64(seed)`. CNOT is skipped on one qubit.
pub fn random_circuit(n_qubits: usize, len: usize, seed: u64) -> CliffordCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = CliffordCircuit::new(n_qubits);
    let kinds = if n_qubits > 1 { 3 } else { 2 };
    for _ in 0..len {
        let gate = match rng.gen_range(0..kinds) {
            0 => Gate::H(rng.gen_range(0..n_qubits)),
            1 => Gate::S(rng.gen_range(0..n_qubits)),
            _ => {
                let control = rng.gen_range(0..n_qubits);
                let mut target = rng.gen_range(0..n_qubits - 1);
                if target >= control {
                    target += 1;
                }
                Gate::Cnot { control, target }
            }
        };
        c.push(gate).expect("indices drawn in range");
    }
    c
}

/// Greedy F₂ basis selection: the members that are not products of earlier
/// ones, in input order.
fn independent_subset(members: &[PauliString]) -> Vec<PauliString> {
    // (pivot bit, reduced vector); pivot is an index into the 2n-bit (x|z) vector
    let mut basis: Vec<(usize, PauliString)> = Vec::new();
    let mut chosen = Vec::new();
    for m in members {
        let mut v = m.clone();
        for (pivot, b) in &basis {
            if symplectic_bit(&v, *pivot) {
                v.mul_assign(b);
            }
        }
        if let Some(pivot) = first_set_bit(&v) {
            for (_, b) in basis.iter_mut() {
                if symplectic_bit(b, pivot) {
                    b.mul_assign(&v);
                }
            }
            basis.push((pivot, v));
            chosen.push(m.clone());
        }
    }
    chosen
}

fn symplectic_bit(p: &PauliString, bit: usize) -> bool {
    let n = p.n_qubits();
    if bit < n {
        p.x_bit(bit)
    } else {
        p.z_bit(bit - n)
    }
}

fn first_set_bit(p: &PauliString) -> Option<usize> {
    let n = p.n_qubits();
    (0..n)
        .find(|&i| p.x_bit(i))
        .or_else(|| (0..n).find(|&i| p.z_bit(i)).map(|i| i + n))
}

/// Working set of generators; gates act on every row, row operations
/// replace a generator by its product with another (same generated group).
struct Elimination {
    n: usize,
    rows: Vec<PauliString>,
    gates: Vec<Gate>,
}

impl Elimination {
    fn apply(&mut self, g: Gate) {
        for r in &mut self.rows {
            g.apply(r);
        }
        // H and CNOT are involutions; cancel an immediate repeat
        if !matches!(g, Gate::S(_)) && self.gates.last() == Some(&g) {
            self.gates.pop();
        } else {
            self.gates.push(g);
        }
    }

    fn add_row(&mut self, target: usize, source: usize) {
        let src = self.rows[source].clone();
        self.rows[target].mul_assign(&src);
    }

    /// Reduced row echelon form of the X part. Returns the pivot columns;
    /// row `i` owns pivot `i`.
    fn reduce_x(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.n {
            if rank == self.rows.len() {
                break;
            }
            let Some(p) = (rank..self.rows.len()).find(|&r| self.rows[r].x_bit(col)) else {
                continue;
            };
            self.rows.swap(rank, p);
            for r in 0..self.rows.len() {
                if r != rank && self.rows[r].x_bit(col) {
                    self.add_row(r, rank);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        pivots
    }

    fn run(mut self) -> Result<Vec<Gate>, CliffordError> {
        let r = self.rows.len();
        if r == 0 {
            return Ok(self.gates);
        }
        if r > self.n {
            return Err(CliffordError::Internal(format!(
                "{r} independent generators on {} qubits",
                self.n
            )));
        }

        // 1. Make the X part full rank. The rows without X support have
        //    Z parts of full rank on the non-pivot columns; Hadamards there
        //    complete the X part.
        let x_pivots = self.reduce_x();
        let a = x_pivots.len();
        if a < r {
            let mut is_pivot = vec![false; self.n];
            for &p in &x_pivots {
                is_pivot[p] = true;
            }
            let mut hadamards = Vec::new();
            let mut rank = a;
            for col in (0..self.n).filter(|&c| !is_pivot[c]) {
                if rank == r {
                    break;
                }
                let Some(p) = (rank..r).find(|&i| self.rows[i].z_bit(col)) else {
                    continue;
                };
                self.rows.swap(rank, p);
                for i in a..r {
                    if i != rank && self.rows[i].z_bit(col) {
                        self.add_row(i, rank);
                    }
                }
                hadamards.push(col);
                rank += 1;
            }
            if rank < r {
                return Err(CliffordError::Internal(
                    "Z-only generators are not independent off the X pivots".into(),
                ));
            }
            for q in hadamards {
                self.apply(Gate::H(q));
            }
        }

        // 2. X part to a permutation of [I | 0] with CNOTs from pivot columns.
        let pivots = self.reduce_x();
        if pivots.len() != r {
            return Err(CliffordError::Internal("X part is not full rank".into()));
        }
        for (i, &p) in pivots.iter().enumerate() {
            for col in 0..self.n {
                if col != p && self.rows[i].x_bit(col) {
                    self.apply(Gate::Cnot {
                        control: p,
                        target: col,
                    });
                }
            }
        }

        // 3. Clear the Z part on pivot columns (a symmetric matrix by
        //    commutation): S on the diagonal, CZ = H·CNOT·H off it.
        for i in 0..r {
            if self.rows[i].z_bit(pivots[i]) {
                self.apply(Gate::S(pivots[i]));
            }
            for j in i + 1..r {
                if self.rows[i].z_bit(pivots[j]) {
                    let (c, t) = (pivots[i], pivots[j]);
                    self.apply(Gate::H(t));
                    self.apply(Gate::Cnot { control: c, target: t });
                    self.apply(Gate::H(t));
                }
            }
        }

        // 4. Every generator is now X on its pivot times Z off the pivots.
        for &p in &pivots {
            self.apply(Gate::H(p));
        }
        if let Some(bad) = self.rows.iter().find(|row| !row.is_z_type()) {
            return Err(CliffordError::Internal(format!(
                "generator {bad} not diagonalized"
            )));
        }
        Ok(self.gates)
    }
}

/// Synthesizes a circuit that conjugates every member to a Z-type string.
///
/// Each block of `blocks` gets its own sub-circuit, built by symplectic
/// elimination over an independent subset of the members' restrictions to
/// that block; the sub-circuits are concatenated in block order and no gate
/// crosses a block boundary.
pub fn diagonalize_group(members: &[PauliString], blocks: &BlockSpec) -> Result<CliffordCircuit, CliffordError> {
    let n = blocks.n_qubits();
    for m in members {
        blocks.check_fits(m.n_qubits())?;
    }
    for (i, a) in members.iter().enumerate() {
        for (j, b) in members.iter().enumerate().skip(i + 1) {
            if !a.k_commutes(b, blocks)? {
                return Err(CliffordError::NotCommuting { a: i, b: j });
            }
        }
    }
    let mut circuit = CliffordCircuit::new(n);
    for (lo, hi) in blocks.ranges() {
        let restricted = members
            .iter()
            .map(|m| m.restrict(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        if restricted.iter().all(is_diagonal) {
            continue;
        }
        let elim = Elimination {
            n: hi - lo,
            rows: independent_subset(&restricted),
            gates: Vec::new(),
        };
        for g in elim.run()? {
            circuit.push(g.shifted(lo))?;
        }
    }
    for (i, m) in members.iter().enumerate() {
        if !is_diagonal(&circuit.conjugate(m)?) {
            return Err(CliffordError::Internal(format!("member {i} ({m}) not diagonalized")));
        }
    }
    Ok(circuit)
}

/// True iff every gate's qubits lie inside a single block.
pub fn respects_blocks(c: &CliffordCircuit, blocks: &BlockSpec) -> bool {
    c.gates().iter().all(|g| match g.qubits() {
        (q, None) => blocks.block_of(q).is_some(),
        (a, Some(b)) => blocks.block_of(a).is_some() && blocks.block_of(a) == blocks.block_of(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn circuit(n: usize, gates: &[Gate]) -> CliffordCircuit {
        CliffordCircuit::from_gates(n, gates.to_vec()).unwrap()
    }

    #[test]
    fn single_gate_actions() {
        assert_eq!(circuit(1, &[Gate::H(0)]).conjugate(&p("X")).unwrap(), p("Z"));
        assert_eq!(circuit(1, &[Gate::H(0)]).conjugate(&p("Z")).unwrap(), p("X"));
        assert_eq!(circuit(1, &[Gate::H(0)]).conjugate(&p("Y")).unwrap(), p("Y"));
        assert_eq!(circuit(1, &[Gate::S(0)]).conjugate(&p("X")).unwrap(), p("Y"));
        assert_eq!(circuit(1, &[Gate::S(0)]).conjugate(&p("Y")).unwrap(), p("X"));
        assert_eq!(circuit(1, &[Gate::S(0)]).conjugate(&p("Z")).unwrap(), p("Z"));
        let cx = circuit(2, &[Gate::Cnot { control: 0, target: 1 }]);
        assert_eq!(cx.conjugate(&p("XI")).unwrap(), p("XX"));
        assert_eq!(cx.conjugate(&p("IX")).unwrap(), p("IX"));
        assert_eq!(cx.conjugate(&p("ZI")).unwrap(), p("ZI"));
        assert_eq!(cx.conjugate(&p("IZ")).unwrap(), p("ZZ"));
        assert!(cx.conjugate(&p("X")).is_err());
    }

    #[test]
    fn gate_validation() {
        let mut c = CliffordCircuit::new(2);
        assert!(c.push(Gate::H(2)).is_err());
        assert!(c.push(Gate::Cnot { control: 1, target: 1 }).is_err());
        assert!(c.push(Gate::Cnot { control: 1, target: 0 }).is_ok());
    }

    #[test]
    fn diagonal_predicate() {
        assert!(is_diagonal(&p("ZZIZ")));
        assert!(is_diagonal(&p("IIII")));
        assert!(!is_diagonal(&p("XZZZ")));
        assert!(!is_diagonal(&p("IYII")));
    }

    #[test]
    fn depth_examples() {
        assert_eq!(CliffordCircuit::new(3).depth(), 0);
        assert_eq!(circuit(3, &[Gate::H(0), Gate::H(1), Gate::H(2)]).depth(), 1);
        let c = circuit(
            3,
            &[
                Gate::Cnot { control: 0, target: 1 },
                Gate::Cnot { control: 1, target: 2 },
            ],
        );
        assert_eq!(c.depth(), 2);
        let c = circuit(4, &[Gate::Cnot { control: 0, target: 1 }, Gate::H(2), Gate::S(2), Gate::H(0)]);
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn count_diagonalized_examples() {
        assert_eq!(count_diagonalized(&CliffordCircuit::new(2)).unwrap(), 4);
        assert_eq!(count_diagonalized(&circuit(1, &[Gate::H(0)])).unwrap(), 2);
        for seed in 0..10 {
            assert_eq!(count_diagonalized(&random_circuit(3, 20, seed)).unwrap(), 8);
        }
        assert!(matches!(
            count_diagonalized(&CliffordCircuit::new(7)),
            Err(CliffordError::TooManyQubits { n: 7, .. })
        ));
    }

    #[test]
    fn diagonalize_block_example() {
        let blocks = BlockSpec::uniform(4, 2).unwrap();
        let members = [p("XXXX"), p("ZZZZ")];
        let c = diagonalize_group(&members, &blocks).unwrap();
        assert!(respects_blocks(&c, &blocks));
        assert!(c.gate_count() > 0);
        for m in &members {
            assert!(is_diagonal(&c.conjugate(m).unwrap()));
        }
        let touched: Vec<_> = c.gates().iter().map(|g| blocks.block_of(g.qubits().0).unwrap()).collect();
        assert!(touched.contains(&0) && touched.contains(&1));
    }

    #[test]
    fn diagonalize_trivial_cases() {
        let blocks = BlockSpec::uniform(3, 2).unwrap();
        let c = diagonalize_group(&[p("ZZI"), p("IZZ"), p("ZIZ")], &blocks).unwrap();
        assert_eq!(c.gate_count(), 0);
        let c = diagonalize_group(&[p("X")], &BlockSpec::uniform(1, 1).unwrap()).unwrap();
        assert_eq!(c.gates(), &[Gate::H(0)]);
        let c = diagonalize_group(&[], &blocks).unwrap();
        assert_eq!(c.gate_count(), 0);
    }

    #[test]
    fn diagonalize_rejects_non_commuting() {
        let blocks = BlockSpec::uniform(2, 1).unwrap();
        assert_eq!(
            diagonalize_group(&[p("XX"), p("ZZ")], &blocks),
            Err(CliffordError::NotCommuting { a: 0, b: 1 })
        );
        let blocks = BlockSpec::uniform(2, 2).unwrap();
        assert!(diagonalize_group(&[p("XXX")], &blocks).is_err());
    }

    #[test]
    fn diagonalize_maximal_stabilizer_groups() {
        // Full generating sets of random stabilizer groups: images of Z_j
        // under random circuits.
        for n in 1..=6 {
            for seed in 0..30 {
                let c = random_circuit(n, 40, seed);
                let tab = c.tableau();
                let members: Vec<_> = (0..n).map(|j| tab.z_image(j).clone()).collect();
                let blocks = BlockSpec::uniform(n, n).unwrap();
                let d = diagonalize_group(&members, &blocks).unwrap();
                assert!(members.iter().all(|m| is_diagonal(&d.conjugate(m).unwrap())));
            }
        }
    }

    #[test]
    fn block_depth_is_max_of_block_depths() {
        for seed in 0..20 {
            let h = crate::hamiltonian::random_hamiltonian(12, 2.0, seed).unwrap();
            let blocks = BlockSpec::uniform(12, 4).unwrap();
            let g = crate::grouping::sorted_insertion(&h, &blocks).unwrap();
            for gi in 0..g.num_groups() {
                let members: Vec<_> = g.group_paulis(&h, gi).into_iter().cloned().collect();
                let c = diagonalize_group(&members, &blocks).unwrap();
                assert!(respects_blocks(&c, &blocks));
                let per_block = blocks
                    .ranges()
                    .map(|(lo, hi)| {
                        let restricted: Vec<_> = members.iter().map(|m| m.restrict(lo, hi).unwrap()).collect();
                        diagonalize_group(&restricted, &BlockSpec::uniform(hi - lo, hi - lo).unwrap())
                            .unwrap()
                            .depth()
                    })
                    .max()
                    .unwrap();
                assert_eq!(c.depth(), per_block);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let c = random_circuit(5, 30, 4);
        let text = c.to_text();
        assert!(text.starts_with("qubits: 5\n"));
        assert_eq!(text.parse::<CliffordCircuit>().unwrap(), c);
        assert!("H 0".parse::<CliffordCircuit>().is_err());
        assert!("qubits: 2\nCNOT 0 0".parse::<CliffordCircuit>().is_err());
        assert!("qubits: 2\nT 0".parse::<CliffordCircuit>().is_err());
    }

    #[test]
    fn independent_subset_drops_products() {
        let members = [p("XX"), p("ZZ"), p("YY"), p("XX"), p("II"), p("ZI")];
        let chosen = independent_subset(&members);
        assert_eq!(chosen, vec![p("XX"), p("ZZ"), p("ZI")]);
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        prop::collection::vec(0u8..4, n).prop_map(|v| {
            PauliString::from_paulis(v.into_iter().map(|b| Pauli::from_bits(b & 1 == 1, b & 2 == 2)))
        })
    }

    proptest! {
        #[test]
        fn conjugation_preserves_commutation(
            (n, a, b) in (1usize..=8).prop_flat_map(|n| (Just(n), arb_pauli(n), arb_pauli(n))),
            len in 0usize..60,
            seed in any::<u64>(),
        ) {
            let c = random_circuit(n, len, seed);
            let (ca, cb) = (c.conjugate(&a).unwrap(), c.conjugate(&b).unwrap());
            prop_assert_eq!(a.commutes(&b).unwrap(), ca.commutes(&cb).unwrap());
            let tab = c.tableau();
            prop_assert!(tab.is_symplectic());
            prop_assert_eq!(tab.apply(&a).unwrap(), ca);
        }
    }
}
