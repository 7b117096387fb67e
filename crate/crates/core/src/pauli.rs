//! Phaseless n-qubit Pauli strings in the binary symplectic representation,
//! plus full and block-wise commutativity.
//!
//! A string is stored as two bit vectors packed into `u64` words: bit `i` of
//! `x` is set when qubit `i` carries X or Y, bit `i` of `z` when it carries Z
//! or Y. Qubit 0 is the leftmost character of the dense notation.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("invalid Pauli character {0:?}")]
    InvalidChar(char),
    #[error("invalid sparse Pauli token {0:?}")]
    InvalidToken(String),
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("qubit index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("dense Pauli has length {len}, expected {n}")]
    LengthMismatch { len: usize, n: usize },
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("invalid range {a}..{b} for {n} qubits")]
    InvalidRange { a: usize, b: usize, n: usize },
    #[error("invalid block specification: {0}")]
    InvalidBlocks(String),
    #[error("a Pauli string needs at least one qubit")]
    Empty,
}

/// Single-qubit Pauli operator, phase dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Result<Self, PauliError> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(PauliError::InvalidChar(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Parity of the set bits of `words` restricted to positions `a..b`.
#[inline]
fn range_parity(words: &[u64], a: usize, b: usize) -> bool {
    let (wa, wb) = (a / WORD, (b - 1) / WORD);
    let lo_mask = !0u64 << (a % WORD);
    let hi_mask = if b % WORD == 0 {
        !0u64
    } else {
        (1u64 << (b % WORD)) - 1
    };
    if wa == wb {
        return (words[wa] & lo_mask & hi_mask).count_ones() & 1 == 1;
    }
    let mut ones = (words[wa] & lo_mask).count_ones();
    for w in &words[wa + 1..wb] {
        ones += w.count_ones();
    }
    ones += (words[wb] & hi_mask).count_ones();
    ones & 1 == 1
}

/// An immutable phaseless Pauli string on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    /// Builds a string from per-qubit operators, qubit 0 first.
    pub fn from_paulis<I: IntoIterator<Item = Pauli>>(paulis: I) -> Self {
        let ops: Vec<Pauli> = paulis.into_iter().collect();
        let mut p = PauliString::identity(ops.len());
        for (i, op) in ops.into_iter().enumerate() {
            p.set(i, op);
        }
        p
    }

    /// Builds an `n`-qubit string with the given operators at the given sites.
    pub fn from_sparse<I>(n: usize, ops: I) -> Result<Self, PauliError>
    where
        I: IntoIterator<Item = (usize, Pauli)>,
    {
        let mut p = PauliString::identity(n);
        let mut seen = vec![false; n];
        for (i, op) in ops {
            if i >= n {
                return Err(PauliError::IndexOutOfRange { index: i, n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(PauliError::DuplicateIndex(i));
            }
            p.set(i, op);
        }
        Ok(p)
    }

    /// Decodes the `index`-th string of the 4^n enumeration, two bits per
    /// qubit (`x` in the low bit, `z` in the high bit of each pair).
    pub fn from_index(n: usize, index: u64) -> Self {
        let mut p = PauliString::identity(n);
        for q in 0..n {
            let pair = (index >> (2 * q)) & 3;
            p.set(q, Pauli::from_bits(pair & 1 == 1, pair & 2 == 2));
        }
        p
    }

    /// Iterates over all 4^n phaseless strings on `n` qubits (n < 32).
    pub fn enumerate(n: usize) -> impl Iterator<Item = PauliString> {
        assert!(n < 32, "enumeration of 4^{n} strings is not supported");
        (0..1u64 << (2 * n)).map(move |i| PauliString::from_index(n, i))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bit(&self, i: usize) -> bool {
        assert!(i < self.n);
        (self.x[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn z_bit(&self, i: usize) -> bool {
        assert!(i < self.n);
        (self.z[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn get(&self, i: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(i), self.z_bit(i))
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True iff the string is a product of Z and I only (diagonal in the
    /// computational basis).
    pub fn is_z_type(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// Sites where the operator is not the identity, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.x_bit(i) || self.z_bit(i))
            .collect()
    }

    pub(crate) fn set(&mut self, i: usize, op: Pauli) {
        let (x, z) = op.bits();
        self.set_x(i, x);
        self.set_z(i, z);
    }

    pub(crate) fn set_x(&mut self, i: usize, v: bool) {
        let m = 1u64 << (i % WORD);
        if v {
            self.x[i / WORD] |= m;
        } else {
            self.x[i / WORD] &= !m;
        }
    }

    pub(crate) fn set_z(&mut self, i: usize, v: bool) {
        let m = 1u64 << (i % WORD);
        if v {
            self.z[i / WORD] |= m;
        } else {
            self.z[i / WORD] &= !m;
        }
    }

    /// In-place phaseless product.
    pub(crate) fn mul_assign(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// Phaseless product, i.e. the bitwise sum of the symplectic vectors.
    pub fn mul_phaseless(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.mul_assign(other);
        Ok(out)
    }

    fn check_same(&self, other: &PauliString) -> Result<(), PauliError> {
        if self.n != other.n {
            return Err(PauliError::QubitMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Per-qubit anticommutation mask: bit `i` is set iff the single-qubit
    /// factors at site `i` anticommute.
    fn anticommute_words(&self, other: &PauliString) -> Vec<u64> {
        (0..self.x.len())
            .map(|w| (self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w]))
            .collect()
    }

    /// Full operator commutation: even symplectic inner product.
    pub fn commutes(&self, other: &PauliString) -> Result<bool, PauliError> {
        self.check_same(other)?;
        let ones: u32 = (0..self.x.len())
            .map(|w| ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones())
            .sum();
        Ok(ones & 1 == 0)
    }

    /// Commutation restricted to the sites `a..b` of both strings.
    pub fn commutes_on(&self, other: &PauliString, a: usize, b: usize) -> Result<bool, PauliError> {
        self.check_same(other)?;
        if a >= b || b > self.n {
            return Err(PauliError::InvalidRange { a, b, n: self.n });
        }
        Ok(!range_parity(&self.anticommute_words(other), a, b))
    }

    /// Block-wise commutation: every block of `blocks` commutes on its own.
    pub fn k_commutes(&self, other: &PauliString, blocks: &BlockSpec) -> Result<bool, PauliError> {
        self.check_same(other)?;
        blocks.check_fits(self.n)?;
        let anti = self.anticommute_words(other);
        Ok(blocks.ranges().all(|(a, b)| !range_parity(&anti, a, b)))
    }

    /// The `(b - a)`-qubit string `P_a ⊗ … ⊗ P_{b-1}`.
    pub fn restrict(&self, a: usize, b: usize) -> Result<PauliString, PauliError> {
        if a >= b || b > self.n {
            return Err(PauliError::InvalidRange { a, b, n: self.n });
        }
        let mut out = PauliString::identity(b - a);
        for i in a..b {
            out.set_x(i - a, self.x_bit(i));
            out.set_z(i - a, self.z_bit(i));
        }
        Ok(out)
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut out = PauliString::identity(self.n + other.n);
        for i in 0..self.n {
            out.set(i, self.get(i));
        }
        for i in 0..other.n {
            out.set(self.n + i, other.get(i));
        }
        out
    }

    /// Dense rendering, qubit 0 leftmost.
    pub fn render(&self) -> String {
        (0..self.n).map(|i| self.get(i).as_char()).collect()
    }

    /// Sparse rendering such as `X0 Z3`; the identity renders as an empty string.
    pub fn render_sparse(&self) -> String {
        self.support()
            .into_iter()
            .map(|i| format!("{}{}", self.get(i).as_char(), i))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.render())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Dense notation only; the qubit count is the string length.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PauliError::Empty);
        }
        parse_dense(s, s.chars().count())
    }
}

fn parse_dense(text: &str, n: usize) -> Result<PauliString, PauliError> {
    let ops = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(Pauli::from_char)
        .collect::<Result<Vec<_>, _>>()?;
    if ops.len() != n {
        return Err(PauliError::LengthMismatch { len: ops.len(), n });
    }
    Ok(PauliString::from_paulis(ops))
}

/// Parses one sparse token such as `X12`.
pub(crate) fn parse_sparse_token(token: &str) -> Result<(usize, Pauli), PauliError> {
    let mut chars = token.chars();
    let op = chars
        .next()
        .ok_or_else(|| PauliError::InvalidToken(token.to_string()))?;
    let op = Pauli::from_char(op)?;
    let index: usize = chars
        .as_str()
        .parse()
        .map_err(|_| PauliError::InvalidToken(token.to_string()))?;
    Ok((index, op))
}

/// True if every whitespace token looks like a sparse `<op><index>` token.
pub(crate) fn looks_sparse(text: &str) -> bool {
    let mut tokens = text.split_whitespace().peekable();
    tokens.peek().is_some()
        && tokens.all(|t| {
            let mut c = t.chars();
            matches!(c.next(), Some('I' | 'X' | 'Y' | 'Z'))
                && !c.as_str().is_empty()
                && c.as_str().chars().all(|d| d.is_ascii_digit())
        })
}

/// Parses dense (`"XIZY"`, whitespace between characters allowed) or sparse
/// (`"X0 Z3"`) notation into an `n`-qubit string.
pub fn parse_pauli(text: &str, n: usize) -> Result<PauliString, PauliError> {
    if n == 0 {
        return Err(PauliError::Empty);
    }
    if looks_sparse(text) {
        let ops = text
            .split_whitespace()
            .map(parse_sparse_token)
            .collect::<Result<Vec<_>, _>>()?;
        PauliString::from_sparse(n, ops)
    } else {
        parse_dense(text, n)
    }
}

/// An ordered partition `(k_1, …, k_m)` of the qubits into contiguous blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockSpec {
    sizes: Vec<usize>,
    starts: Vec<usize>,
    n: usize,
}

impl BlockSpec {
    pub fn new(sizes: Vec<usize>) -> Result<Self, PauliError> {
        if sizes.is_empty() {
            return Err(PauliError::InvalidBlocks("no blocks".into()));
        }
        if sizes.contains(&0) {
            return Err(PauliError::InvalidBlocks("zero-sized block".into()));
        }
        let mut starts = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for &s in &sizes {
            starts.push(acc);
            acc += s;
        }
        Ok(BlockSpec {
            sizes,
            starts,
            n: acc,
        })
    }

    /// `⌊n/k⌋` blocks of size `k`, followed by one block of size `n mod k`
    /// when `k` does not divide `n`.
    pub fn uniform(n: usize, k: usize) -> Result<Self, PauliError> {
        if n == 0 || k == 0 || k > n {
            return Err(PauliError::InvalidBlocks(format!(
                "block size {k} must lie in 1..={n}"
            )));
        }
        let mut sizes = vec![k; n / k];
        if n % k != 0 {
            sizes.push(n % k);
        }
        BlockSpec::new(sizes)
    }

    /// Every composition of `n` into positive parts, in lexicographic order.
    pub fn compositions(n: usize) -> Vec<BlockSpec> {
        fn rec(rem: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rem == 0 {
                out.push(cur.clone());
                return;
            }
            for s in 1..=rem {
                cur.push(s);
                rec(rem - s, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, &mut Vec::new(), &mut out);
        }
        out.into_iter()
            .map(|s| BlockSpec::new(s).expect("compositions have positive parts"))
            .collect()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    /// Half-open qubit ranges `(a_j, b_j)` of the blocks, in order.
    pub fn ranges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.starts.iter().zip(&self.sizes).map(|(&a, &s)| (a, a + s))
    }

    /// Index of the block containing `qubit`.
    pub fn block_of(&self, qubit: usize) -> Option<usize> {
        if qubit >= self.n {
            return None;
        }
        Some(self.starts.partition_point(|&s| s <= qubit) - 1)
    }

    pub(crate) fn check_fits(&self, n: usize) -> Result<(), PauliError> {
        if self.n != n {
            return Err(PauliError::InvalidBlocks(format!(
                "blocks cover {} qubits, strings have {n}",
                self.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
