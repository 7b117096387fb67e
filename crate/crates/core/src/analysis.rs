//! Block-size sweeps, threshold (k*) extraction, family scaling studies, and
//! counting results for block-commuting sets.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::clifford::{diagonalize_group, CliffordError};
use crate::grouping::{group_terms, GroupingError, InsertionOrder};
use crate::hamiltonian::{self, Hamiltonian, HamiltonianError, LatticeOrdering};
use crate::pauli::{BlockSpec, PauliError, PauliString};

/// Default relative tolerance when locating the first maximum of R̂.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Largest qubit count for the exhaustive oracles over 4^n strings.
pub const MAX_ENUMERATE_QUBITS: usize = 8;

/// Largest qubit count for [`max_set_size_check`].
pub const MAX_SET_CHECK_QUBITS: usize = 4;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty input")]
    EmptyInput,
    #[error("{n} qubits exceeds the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("Pauli is the identity on block {block}; the closed-form count does not apply")]
    IdentityBlock { block: usize },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Grouping(#[from] GroupingError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

/// One block size of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub num_groups: usize,
    pub r_hat: f64,
    /// Largest gate count over the groups' diagonalization circuits.
    pub max_block_circuit_gates: Option<usize>,
    /// Largest depth over the groups' diagonalization circuits.
    pub max_block_circuit_depth: Option<usize>,
}

fn sweep_row(
    h: &Hamiltonian,
    k: usize,
    order: InsertionOrder,
    with_circuits: bool,
) -> Result<SweepRow, AnalysisError> {
    let blocks = BlockSpec::uniform(h.n_qubits(), k)?;
    let grouping = group_terms(h, &blocks, order)?;
    let (mut gates, mut depth) = (None, None);
    if with_circuits {
        let (mut g_max, mut d_max) = (0, 0);
        for gi in 0..grouping.num_groups() {
            let members: Vec<PauliString> = grouping.group_paulis(h, gi).into_iter().cloned().collect();
            let c = diagonalize_group(&members, &blocks)?;
            g_max = g_max.max(c.gate_count());
            d_max = d_max.max(c.depth());
        }
        gates = Some(g_max);
        depth = Some(d_max);
    }
    Ok(SweepRow {
        k,
        num_groups: grouping.num_groups(),
        r_hat: grouping.r_hat(),
        max_block_circuit_gates: gates,
        max_block_circuit_depth: depth,
    })
}

/// Groups `h` independently at every block size in `ks` (in parallel) and
/// returns the rows ordered by `k`.
pub fn k_sweep(
    h: &Hamiltonian,
    ks: &[usize],
    order: InsertionOrder,
    with_circuits: bool,
) -> Result<Vec<SweepRow>, AnalysisError> {
    if ks.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let n = h.n_qubits();
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > n) {
        return Err(AnalysisError::InvalidParameter(format!(
            "block size {k} outside 1..={n}"
        )));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    ks.par_iter()
        .map(|&k| sweep_row(h, k, order, with_circuits))
        .collect()
}

/// Smallest block sizes at which R̂ first reaches its maximum and the group
/// count first reaches its minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KStarResult {
    pub k_star_rhat: usize,
    pub k_star_groups: usize,
}

pub fn find_k_star(rows: &[SweepRow], rel_tol: f64) -> Result<KStarResult, AnalysisError> {
    if rows.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    if rel_tol.is_nan() || rel_tol < 0.0 {
        return Err(AnalysisError::InvalidParameter(format!("rel_tol {rel_tol} < 0")));
    }
    let max_r = rows.iter().map(|r| r.r_hat).fold(f64::MIN, f64::max);
    let min_g = rows.iter().map(|r| r.num_groups).min().expect("nonempty");
    let by_k = |pred: &dyn Fn(&SweepRow) -> bool| {
        rows.iter().filter(|r| pred(r)).map(|r| r.k).min().expect("extremum attained")
    };
    Ok(KStarResult {
        k_star_rhat: by_k(&|r| r.r_hat >= (1.0 - rel_tol) * max_r),
        k_star_groups: by_k(&|r| r.num_groups == min_g),
    })
}

/// Mean weight rule for random Hamiltonians as a function of size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightRule {
    Constant(f64),
    /// `w = ln n`
    Log,
    /// `w = n / 2`
    Linear,
}

impl WeightRule {
    pub fn mean_weight(&self, n: usize) -> f64 {
        match *self {
            WeightRule::Constant(w) => w,
            WeightRule::Log => (n as f64).ln(),
            WeightRule::Linear => n as f64 / 2.0,
        }
    }
}

/// A Hamiltonian family parameterized by qubit count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Square `√n × √n` lattice; `n` must be a perfect square.
    BaconShor { ordering: LatticeOrdering },
    Tfim { coupling: f64, field: f64 },
    HardcoreBoson { hopping: f64, site_energy: f64 },
    Random { weight: WeightRule },
}

impl Family {
    pub fn is_randomized(&self) -> bool {
        matches!(self, Family::Random { .. })
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<Hamiltonian, AnalysisError> {
        Ok(match *self {
            Family::BaconShor { ordering } => {
                let side = exact_sqrt(n).ok_or_else(|| {
                    AnalysisError::InvalidParameter(format!("{n} is not a square lattice size"))
                })?;
                hamiltonian::bacon_shor(side, side, ordering)?
            }
            Family::Tfim { coupling, field } => hamiltonian::tfim(n, coupling, field)?,
            Family::HardcoreBoson { hopping, site_energy } => {
                hamiltonian::hardcore_boson_1d(n, hopping, site_energy)?
            }
            Family::Random { weight } => hamiltonian::random_hamiltonian(n, weight.mean_weight(n), seed)?,
        })
    }
}

fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// SplitMix64 finalizer, used to derive per-instance seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `replicate` at size `n` in a scaling study.
pub fn instance_seed(base_seed: u64, n: usize, replicate: usize) -> u64 {
    mix(mix(base_seed ^ mix(n as u64)) ^ replicate as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub samples: usize,
    pub k_star_rhat_mean: f64,
    pub k_star_rhat_std: f64,
    pub k_star_groups_mean: f64,
    pub k_star_groups_std: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, var.sqrt())
}

/// k* of one instance, sweeping every `k` in `1..=n` with sorted insertion.
pub fn k_star_of(h: &Hamiltonian, rel_tol: f64) -> Result<KStarResult, AnalysisError> {
    let ks: Vec<usize> = (1..=h.n_qubits()).collect();
    find_k_star(&k_sweep(h, &ks, InsertionOrder::Sorted, false)?, rel_tol)
}

/// k*(n) over `sizes`. Randomized families are repeated over `seeds`
/// instances per size (seeded by [`instance_seed`]); others run once.
/// Standard deviations are sample deviations (zero for a single instance).
pub fn k_star_scaling(
    family: &Family,
    sizes: &[usize],
    seeds: usize,
    base_seed: u64,
) -> Result<Vec<ScalingRow>, AnalysisError> {
    if sizes.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let replicates = if family.is_randomized() { seeds.max(1) } else { 1 };
    let cells: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&n| (0..replicates).map(move |r| (n, r)))
        .collect();
    let results: Vec<KStarResult> = cells
        .par_iter()
        .map(|&(n, r)| {
            let h = family.generate(n, instance_seed(base_seed, n, r))?;
            k_star_of(&h, DEFAULT_REL_TOL)
        })
        .collect::<Result<_, _>>()?;
    Ok(sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let chunk = &results[i * replicates..(i + 1) * replicates];
            let rh: Vec<f64> = chunk.iter().map(|k| k.k_star_rhat as f64).collect();
            let gr: Vec<f64> = chunk.iter().map(|k| k.k_star_groups as f64).collect();
            let (rm, rs) = mean_std(&rh);
            let (gm, gs) = mean_std(&gr);
            ScalingRow {
                n,
                samples: replicates,
                k_star_rhat_mean: rm,
                k_star_rhat_std: rs,
                k_star_groups_mean: gm,
                k_star_groups_std: gs,
            }
        })
        .collect())
}

/// Closed-form number of phaseless `n`-qubit strings that block-commute with
/// `p`: `4^n / 2^m` for `m` blocks. Requires `p` to be non-identity on every
/// block; otherwise the count differs and an error is returned.
pub fn count_block_commuting(p: &PauliString, blocks: &BlockSpec) -> Result<u128, AnalysisError> {
    let n = p.n_qubits();
    blocks.check_fits(n)?;
    if n > 63 {
        return Err(AnalysisError::TooLarge { n, limit: 63 });
    }
    for (j, (a, b)) in blocks.ranges().enumerate() {
        if p.restrict(a, b)?.is_identity() {
            return Err(AnalysisError::IdentityBlock { block: j });
        }
    }
    Ok((1u128 << (2 * n)) >> blocks.num_blocks())
}

/// Brute-force count over all 4^n phaseless strings.
pub fn enumerate_block_commuting(p: &PauliString, blocks: &BlockSpec) -> Result<u64, AnalysisError> {
    let n = p.n_qubits();
    blocks.check_fits(n)?;
    if n > MAX_ENUMERATE_QUBITS {
        return Err(AnalysisError::TooLarge {
            n,
            limit: MAX_ENUMERATE_QUBITS,
        });
    }
    let mut count = 0;
    for q in PauliString::enumerate(n) {
        if p.k_commutes(&q, blocks)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Greedy maximal commuting set of `k`-qubit strings in enumeration order.
fn greedy_maximal_commuting(k: usize) -> Vec<PauliString> {
    let mut set: Vec<PauliString> = Vec::new();
    for p in PauliString::enumerate(k) {
        if set.iter().all(|s| s.commutes(&p).expect("same size")) {
            set.push(p);
        }
    }
    set
}

/// A maximum-size block-commuting set built as the tensor product of
/// maximal commuting sets on each block.
#[derive(Debug, Clone)]
pub struct MaxCommutingSet {
    pub blocks: BlockSpec,
    pub members: Vec<PauliString>,
}

impl MaxCommutingSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Builds the product of per-block maximal commuting sets and verifies that
/// it is pairwise block-commuting, closed under phaseless multiplication,
/// and not extendable by any other string. The caller checks the size
/// against `2^n`.
pub fn max_set_size_check(blocks: &BlockSpec) -> Result<MaxCommutingSet, AnalysisError> {
    let n = blocks.n_qubits();
    if n > MAX_SET_CHECK_QUBITS {
        return Err(AnalysisError::TooLarge {
            n,
            limit: MAX_SET_CHECK_QUBITS,
        });
    }
    let mut members = vec![PauliString::from_paulis([])];
    for &k in blocks.sizes() {
        let local = greedy_maximal_commuting(k);
        members = members
            .iter()
            .flat_map(|prefix| local.iter().map(move |s| prefix.tensor(s)))
            .collect();
    }
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if !a.k_commutes(b, blocks)? {
                return Err(AnalysisError::VerificationFailed(format!(
                    "{a} and {b} do not block-commute"
                )));
            }
        }
    }
    let lookup: HashSet<&PauliString> = members.iter().collect();
    if lookup.len() != members.len() {
        return Err(AnalysisError::VerificationFailed("duplicate members".into()));
    }
    for a in &members {
        for b in &members {
            let prod = a.mul_phaseless(b)?;
            if !lookup.contains(&prod) {
                return Err(AnalysisError::VerificationFailed(format!(
                    "product of {a} and {b} is not in the set"
                )));
            }
        }
    }
    for q in PauliString::enumerate(n) {
        if lookup.contains(&q) {
            continue;
        }
        let extends = members
            .iter()
            .all(|m| m.k_commutes(&q, blocks).expect("same size"));
        if extends {
            return Err(AnalysisError::VerificationFailed(format!(
                "{q} extends the set"
            )));
        }
    }
    Ok(MaxCommutingSet {
        blocks: blocks.clone(),
        members,
    })
}

/// Gate-count bound for diagonalizing `r` independent commuting Paulis on
/// `n` qubits with the gate set {CNOT, H, S, I}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateBound {
    pub n: usize,
    pub r: usize,
    /// `Σ_{k<r} log₂(1 + 2^{n−k}) / log₂(n² + n + 1)`: with fewer gates some
    /// such set is not diagonalized by any circuit.
    pub gates: f64,
    /// Smallest gate count not below `gates`.
    pub min_gates: u64,
    /// `⌈min_gates / n⌉`, the matching depth floor.
    pub min_depth: u64,
}

pub fn diag_gate_lower_bound(n: usize, r: usize) -> Result<GateBound, AnalysisError> {
    if n < 2 || r < 1 || r > n {
        return Err(AnalysisError::InvalidParameter(format!(
            "need 2 <= n and 1 <= r <= n, got n={n}, r={r}"
        )));
    }
    let numerator: f64 = (0..r).map(|k| (1.0 + 2f64.powi((n - k) as i32)).log2()).sum();
    // n(n−1) CNOTs, n H, n S and the identity
    let choices = (n * n + n + 1) as f64;
    let gates = numerator / choices.log2();
    let min_gates = gates.ceil() as u64;
    Ok(GateBound {
        n,
        r,
        gates,
        min_gates,
        min_depth: min_gates.div_ceil(n as u64),
    })
}

fn factorial(r: usize) -> Option<u128> {
    (1..=r as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// Number of unordered sets of `r` independent, pairwise commuting
/// phaseless `n`-qubit Paulis: `(1/r!) Π_{k<r} (4^n/2^k − 2^k)`.
/// `None` on overflow.
pub fn count_independent_commuting_sets(n: usize, r: usize) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let mut prod: u128 = 1;
    for k in 0..r {
        let term = 1u128.checked_shl((2 * n - k) as u32)? - (1u128 << k);
        prod = prod.checked_mul(term)?;
    }
    Some(prod / factorial(r)?)
}

/// Number of unordered sets of `r` linearly independent vectors in F₂^t:
/// `(1/r!) Π_{k<r} (2^t − 2^k)`. `None` on overflow.
pub fn count_independent_vector_sets(t: usize, r: usize) -> Option<u128> {
    if r > t {
        return Some(0);
    }
    let mut prod: u128 = 1;
    for k in 0..r {
        let term = 1u128.checked_shl(t as u32)? - (1u128 << k);
        prod = prod.checked_mul(term)?;
    }
    Some(prod / factorial(r)?)
}
