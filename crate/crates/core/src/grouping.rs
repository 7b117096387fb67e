//! Greedy partitioning of Hamiltonian terms into mutually k-commuting groups
//! and the R̂ shot-reduction estimate.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::Hamiltonian;
use crate::pauli::{BlockSpec, PauliError, PauliString};

#[derive(Debug, Error, PartialEq)]
pub enum GroupingError {
    #[error("Hamiltonian has no terms")]
    EmptyHamiltonian,
    #[error("grouping has no groups")]
    EmptyGrouping,
    #[error("term {0} is out of range")]
    TermOutOfRange(usize),
    #[error("term {0} appears in more than one group")]
    DuplicateTerm(usize),
    #[error("term {0} is not assigned to any group")]
    MissingTerm(usize),
    #[error("group {group} is empty")]
    EmptyGroup { group: usize },
    #[error("terms {a} and {b} share group {group} but do not block-commute")]
    NotCommuting { group: usize, a: usize, b: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// How terms are visited during greedy insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertionOrder {
    /// Decreasing |coefficient|, ties kept in input order.
    Sorted,
    /// Uniform permutation from `ChaCha8Rng::seed_from_u64(seed)`.
    Random { seed: u64 },
}

/// A partition of term indices into block-commuting groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    blocks: BlockSpec,
    groups: Vec<Vec<usize>>,
    r_hat: f64,
}

/// Serialized form of a [`Grouping`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingExport {
    pub block_sizes: Vec<usize>,
    pub groups: Vec<Vec<usize>>,
    pub r_hat: f64,
    pub num_groups: usize,
}

impl Grouping {
    /// Validates a caller-supplied partition against `h` and `blocks`.
    pub fn from_groups(
        h: &Hamiltonian,
        blocks: BlockSpec,
        groups: Vec<Vec<usize>>,
    ) -> Result<Self, GroupingError> {
        blocks.check_fits(h.n_qubits())?;
        check_partition(h.len(), &groups)?;
        for (g, members) in groups.iter().enumerate() {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    if !h.terms()[a].pauli().k_commutes(h.terms()[b].pauli(), &blocks)? {
                        return Err(GroupingError::NotCommuting { group: g, a, b });
                    }
                }
            }
        }
        let r_hat = r_hat(h, &groups)?;
        Ok(Grouping {
            blocks,
            groups,
            r_hat,
        })
    }

    pub fn block_spec(&self) -> &BlockSpec {
        &self.blocks
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn r_hat(&self) -> f64 {
        self.r_hat
    }

    /// The Pauli strings of group `index`, in insertion order.
    pub fn group_paulis<'h>(&self, h: &'h Hamiltonian, index: usize) -> Vec<&'h PauliString> {
        self.groups[index]
            .iter()
            .map(|&t| h.terms()[t].pauli())
            .collect()
    }

    /// Re-checks the partition and every intra-group pair from scratch.
    pub fn verify(&self, h: &Hamiltonian) -> Result<(), GroupingError> {
        Grouping::from_groups(h, self.blocks.clone(), self.groups.clone()).map(|_| ())
    }

    pub fn export(&self) -> GroupingExport {
        GroupingExport {
            block_sizes: self.blocks.sizes().to_vec(),
            groups: self.groups.clone(),
            r_hat: self.r_hat,
            num_groups: self.groups.len(),
        }
    }
}

fn check_partition(n_terms: usize, groups: &[Vec<usize>]) -> Result<(), GroupingError> {
    if groups.is_empty() {
        return Err(GroupingError::EmptyGrouping);
    }
    let mut seen = vec![false; n_terms];
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(GroupingError::EmptyGroup { group: g });
        }
        for &t in members {
            let slot = seen.get_mut(t).ok_or(GroupingError::TermOutOfRange(t))?;
            if std::mem::replace(slot, true) {
                return Err(GroupingError::DuplicateTerm(t));
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(t) => Err(GroupingError::MissingTerm(t)),
        None => Ok(()),
    }
}

/// `R̂ = (Σ_i Σ_j |c_ij| / Σ_i ‖c_i‖₂)²`, summed in group order.
pub fn r_hat(h: &Hamiltonian, groups: &[Vec<usize>]) -> Result<f64, GroupingError> {
    if groups.is_empty() {
        return Err(GroupingError::EmptyGrouping);
    }
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for members in groups {
        let mut sq = 0.0;
        for &t in members {
            let c = h
                .terms()
                .get(t)
                .ok_or(GroupingError::TermOutOfRange(t))?
                .coefficient()
                .abs();
            numerator += c;
            sq += c * c;
        }
        denominator += sq.sqrt();
    }
    if denominator == 0.0 {
        return Err(GroupingError::EmptyGrouping);
    }
    Ok((numerator / denominator).powi(2))
}

/// A group under construction. A candidate joins only if it block-commutes
/// with every member; block commutation is not transitive.
struct GroupState<'h> {
    members: Vec<usize>,
    paulis: Vec<&'h PauliString>,
}

impl GroupState<'_> {
    fn accepts(&self, candidate: &PauliString, blocks: &BlockSpec) -> bool {
        self.paulis
            .iter()
            .all(|p| p.k_commutes(candidate, blocks).expect("sizes checked up front"))
    }
}

fn insert_in_order(
    h: &Hamiltonian,
    blocks: &BlockSpec,
    order: &[usize],
) -> Result<Grouping, GroupingError> {
    let mut groups: Vec<GroupState<'_>> = Vec::new();
    for &t in order {
        let p = h.terms()[t].pauli();
        match groups.iter_mut().find(|g| g.accepts(p, blocks)) {
            Some(g) => {
                g.members.push(t);
                g.paulis.push(p);
            }
            None => groups.push(GroupState {
                members: vec![t],
                paulis: vec![p],
            }),
        }
    }
    let groups: Vec<Vec<usize>> = groups.into_iter().map(|g| g.members).collect();
    let r_hat = r_hat(h, &groups)?;
    Ok(Grouping {
        blocks: blocks.clone(),
        groups,
        r_hat,
    })
}

fn check_inputs(h: &Hamiltonian, blocks: &BlockSpec) -> Result<(), GroupingError> {
    if h.is_empty() {
        return Err(GroupingError::EmptyHamiltonian);
    }
    blocks.check_fits(h.n_qubits())?;
    Ok(())
}

/// Sorted insertion: visit terms by decreasing |coefficient| (stable on ties)
/// and put each into the first group it block-commutes with entirely.
pub fn sorted_insertion(h: &Hamiltonian, blocks: &BlockSpec) -> Result<Grouping, GroupingError> {
    check_inputs(h, blocks)?;
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (h.terms()[a].coefficient().abs(), h.terms()[b].coefficient().abs());
        cb.total_cmp(&ca)
    });
    insert_in_order(h, blocks, &order)
}

/// Greedy insertion over a seeded uniform permutation of the terms.
pub fn random_insertion(h: &Hamiltonian, blocks: &BlockSpec, seed: u64) -> Result<Grouping, GroupingError> {
    check_inputs(h, blocks)?;
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    insert_in_order(h, blocks, &order)
}

pub fn group_terms(h: &Hamiltonian, blocks: &BlockSpec, order: InsertionOrder) -> Result<Grouping, GroupingError> {
    match order {
        InsertionOrder::Sorted => sorted_insertion(h, blocks),
        InsertionOrder::Random { seed } => random_insertion(h, blocks, seed),
    }
}
