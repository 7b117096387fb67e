//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kcommute::analysis::{
    count_block_commuting, count_independent_commuting_sets, count_independent_vector_sets,
    diag_gate_lower_bound, enumerate_block_commuting, find_k_star, k_sweep, max_set_size_check,
    DEFAULT_REL_TOL,
};
use kcommute::clifford::{count_diagonalized, diagonalize_group, is_diagonal, random_circuit, respects_blocks};
use kcommute::grouping::{r_hat, random_insertion, sorted_insertion, InsertionOrder};
use kcommute::hamiltonian::{
    bacon_shor, hardcore_boson_1d, parse_hamiltonian, random_hamiltonian, tfim, Hamiltonian, LatticeOrdering,
};
use kcommute::pauli::{BlockSpec, Pauli, PauliString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)*));
        }
    };
}

fn all_k(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

// Commutation from single-qubit factors, independent of the bitset code.
fn anticommuting_sites(p: &PauliString, q: &PauliString, lo: usize, hi: usize) -> usize {
    (lo..hi)
        .filter(|&i| {
            let (a, b) = (p.get(i), q.get(i));
            a != Pauli::I && b != Pauli::I && a != b
        })
        .count()
}

fn naive_block_commutes(p: &PauliString, q: &PauliString, blocks: &BlockSpec) -> bool {
    blocks.ranges().all(|(lo, hi)| anticommuting_sites(p, q, lo, hi) % 2 == 0)
}

fn bacon_shor_threshold() -> Outcome {
    let mut seen = Vec::new();
    for side in 2..=6usize {
        let n = side * side;
        let h = bacon_shor(side, side, LatticeOrdering::ColumnMajor).map_err(|e| e.to_string())?;
        let rows = k_sweep(&h, &all_k(n), InsertionOrder::Sorted, false).map_err(|e| e.to_string())?;
        let ks = find_k_star(&rows, DEFAULT_REL_TOL).map_err(|e| e.to_string())?;
        ensure!(ks.k_star_groups == side, "n={n}: k_star_groups={} expected {side}", ks.k_star_groups);
        let at_side = rows.iter().find(|r| r.k == side).unwrap();
        ensure!(at_side.num_groups == 1, "n={n}: {} groups at k={side}", at_side.num_groups);
        seen.push(format!("{n}->{}", ks.k_star_groups));
    }
    Ok(format!("k_star_groups: {}", seen.join(" ")))
}

fn tfim_two_groups() -> Outcome {
    for n in [4usize, 8, 16, 32, 64] {
        let h = tfim(n, 1.0, 1.0).map_err(|e| e.to_string())?;
        let rows = k_sweep(&h, &all_k(n), InsertionOrder::Sorted, false).map_err(|e| e.to_string())?;
        if let Some(r) = rows.iter().find(|r| r.num_groups != 2) {
            return Err(format!("n={n} k={}: {} groups", r.k, r.num_groups));
        }
        let ks = find_k_star(&rows, DEFAULT_REL_TOL).map_err(|e| e.to_string())?;
        ensure!(ks.k_star_groups == 1 && ks.k_star_rhat == 1, "n={n}: k*={ks:?}");
    }
    Ok("2 groups at every k, k*=1 for n in 4..64".into())
}

fn hardcore_boson_classes() -> Outcome {
    for n in [4usize, 8, 16, 32] {
        let h = hardcore_boson_1d(n, 1.0, 1.0).map_err(|e| e.to_string())?;
        let g = sorted_insertion(&h, &BlockSpec::uniform(n, 1).unwrap()).map_err(|e| e.to_string())?;
        ensure!(g.num_groups() == 3, "n={n}: {} groups at k=1", g.num_groups());
        let mut classes = HashSet::new();
        for gi in 0..g.num_groups() {
            let kinds: HashSet<Vec<Pauli>> = g
                .group_paulis(&h, gi)
                .iter()
                .map(|p| {
                    let mut ops: Vec<Pauli> = (0..n).map(|i| p.get(i)).filter(|&o| o != Pauli::I).collect();
                    ops.dedup();
                    ops
                })
                .collect();
            ensure!(kinds.len() == 1, "n={n}: group {gi} mixes term classes");
            classes.extend(kinds);
        }
        let expected: HashSet<Vec<Pauli>> = [vec![Pauli::X], vec![Pauli::Y], vec![Pauli::Z]].into();
        ensure!(classes == expected, "n={n}: classes {classes:?}");
        let rows = k_sweep(&h, &all_k(n), InsertionOrder::Sorted, false).map_err(|e| e.to_string())?;
        let ks = find_k_star(&rows, DEFAULT_REL_TOL).map_err(|e| e.to_string())?;
        ensure!(ks.k_star_groups == 1 && ks.k_star_rhat == 1, "n={n}: k*={ks:?}");
    }
    Ok("3 groups (XX, YY, Z) at k=1, k*=1 for n in 4..32".into())
}

fn r_hat_example() -> Outcome {
    let h = parse_hamiltonian("4 XI\n4 IX\n1 IZ\n1 ZX").map_err(|e| e.to_string())?;
    let heavy_first = r_hat(&h, &[vec![0, 1], vec![2], vec![3]]).map_err(|e| e.to_string())?;
    let other = r_hat(&h, &[vec![0, 2], vec![1, 3]]).map_err(|e| e.to_string())?;
    // by hand: (Σ|c|)² / (Σ‖c_g‖)²
    let expected = 100.0 / (32f64.sqrt() + 2.0).powi(2);
    ensure!((heavy_first - expected).abs() < 1e-12, "R̂={heavy_first} expected {expected}");
    ensure!((other - 100.0 / 68.0).abs() < 1e-12, "alternative R̂={other}");
    ensure!(heavy_first > other, "{heavy_first} <= {other}");
    let grouped = sorted_insertion(&h, &BlockSpec::uniform(2, 2).unwrap()).map_err(|e| e.to_string())?;
    ensure!((grouped.r_hat() - expected).abs() < 1e-12, "sorted insertion R̂={}", grouped.r_hat());
    Ok(format!("R̂={heavy_first:.15} > {other:.15}"))
}

fn random_composition(n: usize, rng: &mut ChaCha8Rng) -> BlockSpec {
    let mut sizes = vec![1usize];
    for _ in 1..n {
        if rng.gen_bool(0.5) {
            sizes.push(1);
        } else {
            *sizes.last_mut().unwrap() += 1;
        }
    }
    BlockSpec::new(sizes).unwrap()
}

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    PauliString::from_index(n, rng.gen_range(0..1u64 << (2 * n)))
}

fn nontrivial_on_every_block(p: &PauliString, blocks: &BlockSpec) -> bool {
    blocks.ranges().all(|(lo, hi)| (lo..hi).any(|i| p.get(i) != Pauli::I))
}

fn block_commuting_count() -> Outcome {
    let check = |p: &PauliString, blocks: &BlockSpec| -> Result<(), String> {
        let n = p.n_qubits();
        let expected = (1u64 << (2 * n)) >> blocks.num_blocks();
        let brute = enumerate_block_commuting(p, blocks).map_err(|e| e.to_string())?;
        let closed = count_block_commuting(p, blocks).map_err(|e| e.to_string())?;
        ensure!(
            brute == expected && closed == expected as u128,
            "{p} [{blocks}]: brute {brute}, closed {closed}, expected {expected}"
        );
        Ok(())
    };
    let mut exhaustive = 0;
    for n in 1..=4 {
        for blocks in BlockSpec::compositions(n) {
            for p in PauliString::enumerate(n).filter(|p| nontrivial_on_every_block(p, &blocks)) {
                check(&p, &blocks)?;
                exhaustive += 1;
            }
        }
    }
    // the brute-force count itself, against a naive count on a few small cases
    for n in 1..=3 {
        for blocks in BlockSpec::compositions(n) {
            for p in PauliString::enumerate(n) {
                let naive = PauliString::enumerate(n).filter(|q| naive_block_commutes(&p, q, &blocks)).count();
                let brute = enumerate_block_commuting(&p, &blocks).map_err(|e| e.to_string())?;
                ensure!(naive as u64 == brute, "{p} [{blocks}]: naive {naive}, brute {brute}");
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut sampled = 0;
    for n in 5..=8 {
        while sampled < (n - 4) * 1000 {
            let blocks = random_composition(n, &mut rng);
            let p = random_pauli(n, &mut rng);
            if !nontrivial_on_every_block(&p, &blocks) {
                continue;
            }
            check(&p, &blocks)?;
            sampled += 1;
        }
    }
    Ok(format!("{exhaustive} exhaustive + {sampled} sampled, 0 mismatches"))
}

fn max_set_size() -> Outcome {
    let mut checked = 0;
    for n in 2..=4 {
        for blocks in BlockSpec::compositions(n) {
            let set = max_set_size_check(&blocks).map_err(|e| format!("[{blocks}]: {e}"))?;
            ensure!(set.len() == 1 << n, "[{blocks}]: size {} expected {}", set.len(), 1 << n);
            let members: HashSet<&PauliString> = set.members.iter().collect();
            for a in &set.members {
                for b in &set.members {
                    ensure!(naive_block_commutes(a, b, &blocks), "[{blocks}]: {a} {b} do not commute");
                    let prod = a.mul_phaseless(b).unwrap();
                    ensure!(members.contains(&prod), "[{blocks}]: {a}·{b} not in set");
                }
            }
            checked += 1;
        }
    }
    Ok(format!("size 2^n and closed for {checked} block compositions"))
}

fn diagonalized_count() -> Outcome {
    for n in 1..=5usize {
        for seed in 0..100u64 {
            let len = 1 + (seed as usize * 7) % (6 * n + 10);
            let c = random_circuit(n, len, seed * 31 + n as u64);
            let count = count_diagonalized(&c).map_err(|e| e.to_string())?;
            ensure!(count == 1 << n, "n={n} seed={seed}: {count} diagonalized");
            // second route: conjugate each Z-type string gate by gate
            let mut direct = 0u64;
            for p in PauliString::enumerate(n) {
                if c.conjugate(&p).map_err(|e| e.to_string())?.is_z_type() {
                    direct += 1;
                }
            }
            ensure!(direct == count, "n={n} seed={seed}: tableau {count}, direct {direct}");
        }
    }
    Ok("100 circuits at each n in 1..5 map exactly 2^n strings to Z-type".into())
}

fn check_sweep_circuits(name: &str, h: &Hamiltonian) -> Result<usize, String> {
    let n = h.n_qubits();
    let mut groups = 0;
    for k in 1..=n {
        let blocks = BlockSpec::uniform(n, k).unwrap();
        let g = sorted_insertion(h, &blocks).map_err(|e| e.to_string())?;
        for gi in 0..g.num_groups() {
            let members: Vec<PauliString> = g.group_paulis(h, gi).into_iter().cloned().collect();
            let c = diagonalize_group(&members, &blocks).map_err(|e| format!("{name} k={k}: {e}"))?;
            ensure!(respects_blocks(&c, &blocks), "{name} k={k} group {gi}: gate crosses a block");
            let tab = c.tableau();
            for m in &members {
                let image = tab.apply(m).map_err(|e| e.to_string())?;
                ensure!(is_diagonal(&image), "{name} k={k}: {m} -> {image}");
                ensure!(image == c.conjugate(m).unwrap(), "{name} k={k}: routes disagree on {m}");
            }
            groups += 1;
        }
    }
    Ok(groups)
}

fn diagonalization_soundness() -> Outcome {
    let mut groups = 0;
    for side in 2..=6 {
        let h = bacon_shor(side, side, LatticeOrdering::ColumnMajor).unwrap();
        groups += check_sweep_circuits(&format!("bacon-shor {side}x{side}"), &h)?;
    }
    for n in [4, 8, 16, 32, 64] {
        groups += check_sweep_circuits(&format!("tfim n={n}"), &tfim(n, 1.0, 1.0).unwrap())?;
    }
    for n in [4, 8, 16, 32] {
        groups += check_sweep_circuits(&format!("boson n={n}"), &hardcore_boson_1d(n, 1.0, 1.0).unwrap())?;
    }
    Ok(format!("{groups} groups diagonalized within blocks"))
}

fn coarsening(n: usize) -> Vec<(BlockSpec, BlockSpec)> {
    let mut pairs = Vec::new();
    for k in 1..=n {
        for c in 1..=n / k {
            pairs.push((BlockSpec::uniform(n, k).unwrap(), BlockSpec::uniform(n, c * k).unwrap()));
        }
    }
    pairs
}

fn coarsening_property() -> Outcome {
    let pairs = coarsening(4);
    let mut tested = 0u64;
    for p in PauliString::enumerate(4) {
        for q in PauliString::enumerate(4) {
            for (fine, coarse) in &pairs {
                let kc = p.k_commutes(&q, fine).unwrap();
                ensure!(kc == naive_block_commutes(&p, &q, fine), "{p} {q} [{fine}]: oracle disagrees");
                if kc {
                    ensure!(p.k_commutes(&q, coarse).unwrap(), "{p} {q}: [{fine}] but not [{coarse}]");
                }
                tested += 1;
            }
        }
    }
    let pairs = coarsening(64);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100_000 {
        let paulis = |rng: &mut ChaCha8Rng| {
            PauliString::from_paulis((0..64).map(|_| Pauli::from_bits(rng.gen(), rng.gen())))
        };
        let p = paulis(&mut rng);
        // bias towards commuting pairs so the implication is exercised
        let mut q = paulis(&mut rng);
        if rng.gen_bool(0.5) {
            q = PauliString::from_paulis(
                (0..64).map(|i| if rng.gen_bool(0.8) { p.get(i) } else { q.get(i) }),
            );
        }
        let (fine, coarse) = &pairs[rng.gen_range(0..pairs.len())];
        if p.k_commutes(&q, fine).unwrap() {
            ensure!(p.k_commutes(&q, coarse).unwrap(), "n=64: [{fine}] but not [{coarse}]");
        }
        tested += 1;
    }
    Ok(format!("{tested} (P, Q, k, c) cases, no counterexample"))
}

fn gate_bound() -> Outcome {
    // 25-digit reference values
    let reference = [
        (2, 2, 1.391662509400495764108302),
        (4, 4, 2.541774048570057468882441),
        (8, 4, 4.213950409884249130714586),
        (3, 1, 0.8566346820627893619815488),
    ];
    let mut out = Vec::new();
    for (n, r, want) in reference {
        let b = diag_gate_lower_bound(n, r).map_err(|e| e.to_string())?;
        ensure!((b.gates - want).abs() < 1e-12, "({n},{r}): {} vs {want}", b.gates);
        let all = count_independent_commuting_sets(n, r).unwrap() as f64;
        let per_u = count_independent_vector_sets(n, r).unwrap() as f64;
        let via_counts = (all / per_u).log2() / ((n * n + n + 1) as f64).log2();
        ensure!((b.gates - via_counts).abs() < 1e-9, "({n},{r}): count ratio gives {via_counts}");
        out.push(format!("({n},{r})={:.12}", b.gates));
    }
    let closed = (5f64.log2() + 3f64.log2()) / 7f64.log2();
    ensure!((diag_gate_lower_bound(2, 2).unwrap().gates - closed).abs() < 1e-12, "(2,2) closed form");
    Ok(out.join(" "))
}

fn random_vs_sorted() -> Outcome {
    let n = 10;
    let blocks = BlockSpec::uniform(n, n).unwrap();
    let mut wins = 0;
    let mut detail = Vec::new();
    for instance in 0..20u64 {
        let h = random_hamiltonian(n, 2.0, instance).map_err(|e| e.to_string())?;
        let sorted = sorted_insertion(&h, &blocks).map_err(|e| e.to_string())?.r_hat();
        let mean = (0..100u64)
            .map(|seed| random_insertion(&h, &blocks, seed).map(|g| g.r_hat()))
            .sum::<Result<f64, _>>()
            .map_err(|e| e.to_string())?
            / 100.0;
        if mean <= sorted * (1.0 + 1e-12) {
            wins += 1;
        }
        detail.push(format!("{:+.3}", sorted - mean));
    }
    let summary = format!("{wins}/20 instances with mean random R̂ <= sorted R̂ (k=n; sorted-mean: {})", detail.join(" "));
    if wins >= 18 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn large_lattice_sweep() -> Outcome {
    let start = Instant::now();
    let h = bacon_shor(20, 20, LatticeOrdering::ColumnMajor).map_err(|e| e.to_string())?;
    let rows = k_sweep(&h, &all_k(400), InsertionOrder::Sorted, true).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let ks = find_k_star(&rows, DEFAULT_REL_TOL).map_err(|e| e.to_string())?;
    ensure!(ks.k_star_groups == 20, "k_star_groups={}", ks.k_star_groups);
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!("n=400 sweep over 400 block sizes in {:.2}s, k*={}", elapsed.as_secs_f64(), ks.k_star_groups))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("bacon-shor threshold", bacon_shor_threshold),
        ("tfim two groups", tfim_two_groups),
        ("hardcore boson classes", hardcore_boson_classes),
        ("r-hat worked example", r_hat_example),
        ("block-commuting count", block_commuting_count),
        ("maximum set size", max_set_size),
        ("diagonalized count", diagonalized_count),
        ("diagonalization soundness", diagonalization_soundness),
        ("coarsening preserves commutation", coarsening_property),
        ("gate lower bound", gate_bound),
        ("random vs sorted insertion", random_vs_sorted),
        ("20x20 lattice sweep", large_lattice_sweep),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} {name}: PASS ({secs:.2}s) {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.2}s) {msg}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
