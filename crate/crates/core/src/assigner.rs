//! Mapping optimization: assigns each letter a pool symbol to minimize the
//! expected confusion between consecutive letters.
//!
//! The objective for a mapping pi is the sum over ordered letter pairs
//! (i, j), i != j, of C[i][j] * F'[pi(i)][pi(j)], where C holds
//! row-conditional bigram probabilities and F' is the confusion matrix
//! restricted to the mapped symbols and row-renormalized over them. Because
//! the renormalization denominators depend on the whole mapped subset, the
//! objective is quadratic in the assignment, hence the search methods here.

use rand_chacha::ChaCha8Rng;

use crate::corpus::{Alphabet, BigramMatrix};
use crate::error::{Error, Result};
use crate::glyphset::{native_family, SymbolPool};
use crate::observer::ConfusionMatrix;
use crate::rng::{draw_distinct, substream, Stage};

pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Alternating descent stops after this many accepted rounds even if still
/// improving.
const MAX_ALT_ROUNDS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignMethod {
    Native,
    Randomized { draw: u64 },
    HungarianAlt,
    LocalSearch,
    BruteForce,
}

impl AssignMethod {
    pub fn parse(s: &str) -> Result<AssignMethod> {
        match s {
            "native" => Ok(AssignMethod::Native),
            "randomized" => Ok(AssignMethod::Randomized { draw: 0 }),
            "hungarian_alt" => Ok(AssignMethod::HungarianAlt),
            "local_search" => Ok(AssignMethod::LocalSearch),
            "brute_force" => Ok(AssignMethod::BruteForce),
            other => Err(Error::invalid(format!(
                "unknown method `{other}` (expected native, randomized, hungarian_alt, local_search, or brute_force)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AssignMethod::Native => "native",
            AssignMethod::Randomized { .. } => "randomized",
            AssignMethod::HungarianAlt => "hungarian_alt",
            AssignMethod::LocalSearch => "local_search",
            AssignMethod::BruteForce => "brute_force",
        }
    }

    /// The baseline draw index, for randomized assignments.
    pub fn draw(self) -> Option<u64> {
        match self {
            AssignMethod::Randomized { draw } => Some(draw),
            _ => None,
        }
    }
}

/// A letter-to-symbol mapping with its objective value. `mapping[i]` is the
/// pool index drawn for letter i.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub mapping: Vec<usize>,
    pub method: AssignMethod,
    pub cost: f64,
}

impl Assignment {
    /// Validates the mapping and computes its cost.
    pub fn evaluated(
        c: &BigramMatrix,
        f: &ConfusionMatrix,
        mapping: Vec<usize>,
        method: AssignMethod,
    ) -> Result<Assignment> {
        let cost = expected_confusion_cost(c, f, &mapping)?;
        Ok(Assignment {
            mapping,
            method,
            cost,
        })
    }
}

fn check_mapping(l: usize, s: usize, mapping: &[usize]) -> Result<()> {
    if mapping.len() != l {
        return Err(Error::invalid(format!(
            "mapping covers {} letters, alphabet has {l}",
            mapping.len()
        )));
    }
    let mut used = vec![false; s];
    for &m in mapping {
        if m >= s {
            return Err(Error::invalid(format!(
                "mapping uses symbol {m}, pool has {s}"
            )));
        }
        if used[m] {
            return Err(Error::invalid(format!("mapping repeats symbol {m}")));
        }
        used[m] = true;
    }
    Ok(())
}

/// Checks that the three pipeline inputs describe one instance.
fn check_instance(c: &BigramMatrix, f: &ConfusionMatrix, pool: &SymbolPool) -> Result<()> {
    if f.len() != pool.len() {
        return Err(Error::invalid(format!(
            "confusion matrix covers {} symbols, pool has {}",
            f.len(),
            pool.len()
        )));
    }
    let pool_labels = pool.labels();
    if f.labels() != pool_labels.as_slice() {
        let detail = f
            .labels()
            .iter()
            .zip(&pool_labels)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(i, (a, b))| format!("entry {i} is `{a}` vs pool `{b}`"))
            .unwrap_or_default();
        return Err(Error::invalid(format!(
            "confusion labels do not match the pool: {detail}"
        )));
    }
    if c.len() > pool.len() {
        return Err(Error::invalid(format!(
            "alphabet has {} letters but the pool offers only {} symbols",
            c.len(),
            pool.len()
        )));
    }
    Ok(())
}

struct Evaluator<'a> {
    l: usize,
    s: usize,
    c: &'a [f64],
    f: &'a [f64],
}

impl<'a> Evaluator<'a> {
    fn new(c: &'a BigramMatrix, f: &'a ConfusionMatrix) -> Evaluator<'a> {
        Evaluator {
            l: c.len(),
            s: f.len(),
            c: c.probs(),
            f: f.values(),
        }
    }

    /// Restriction denominators: denom[i] is the confusion mass the row of
    /// mapping[i] keeps on the mapped subset.
    fn denominators(&self, mapping: &[usize], denom: &mut Vec<f64>) {
        denom.clear();
        denom.extend(mapping.iter().map(|&a| {
            let row = &self.f[a * self.s..(a + 1) * self.s];
            mapping.iter().map(|&b| row[b]).sum::<f64>()
        }));
    }

    fn cost_with_denoms(&self, mapping: &[usize], denom: &[f64]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.l {
            let di = denom[i];
            if di <= 0.0 {
                continue;
            }
            let frow = &self.f[mapping[i] * self.s..(mapping[i] + 1) * self.s];
            let crow = &self.c[i * self.l..(i + 1) * self.l];
            let mut acc = 0.0;
            for j in 0..self.l {
                if j != i {
                    acc += crow[j] * frow[mapping[j]];
                }
            }
            total += acc / di;
        }
        total
    }

    fn cost(&self, mapping: &[usize], denom: &mut Vec<f64>) -> f64 {
        self.denominators(mapping, denom);
        self.cost_with_denoms(mapping, denom)
    }
}

/// The objective value of `mapping`: bigram-weighted confusion after
/// restricting the confusion matrix to the mapped symbols and renormalizing
/// its rows. Symbols whose row keeps no mass on the subset contribute zero.
pub fn expected_confusion_cost(
    c: &BigramMatrix,
    f: &ConfusionMatrix,
    mapping: &[usize],
) -> Result<f64> {
    check_mapping(c.len(), f.len(), mapping)?;
    let eval = Evaluator::new(c, f);
    let mut denom = Vec::new();
    Ok(eval.cost(mapping, &mut denom))
}

/// Identity mapping: each letter gets its own family's glyph of the same
/// name. Errors when the pool lacks the family or a specific letter.
pub fn native_mapping(alphabet: &Alphabet, pool: &SymbolPool) -> Result<Vec<usize>> {
    let family = native_family(alphabet.language()).ok_or_else(|| {
        Error::invalid("no native symbol family exists for a custom alphabet")
    })?;
    alphabet
        .letters()
        .iter()
        .map(|&ch| {
            let name = ch.to_string();
            pool.index_of(family, &name).ok_or_else(|| {
                Error::invalid(format!("pool has no {family} glyph named `{name}`"))
            })
        })
        .collect()
}

pub fn native_assignment(
    c: &BigramMatrix,
    f: &ConfusionMatrix,
    pool: &SymbolPool,
) -> Result<Assignment> {
    check_instance(c, f, pool)?;
    let mapping = native_mapping(c.alphabet(), pool)?;
    Assignment::evaluated(c, f, mapping, AssignMethod::Native)
}

/// True when (cost, mapping) orders strictly before the incumbent. Equal
/// costs fall back to lexicographic mapping order, keeping every search
/// deterministic.
fn improves(cost: f64, mapping: &[usize], best: &Option<(f64, Vec<usize>)>) -> bool {
    match best {
        None => true,
        Some((bc, bm)) => cost < *bc || (cost == *bc && mapping < bm.as_slice()),
    }
}

#[derive(Clone, Debug)]
pub struct RandomizedBaseline {
    /// One assignment per draw, in draw order.
    pub assignments: Vec<Assignment>,
    pub mean: f64,
    /// Population standard deviation over the draws.
    pub std: f64,
    pub best: Assignment,
}

/// Costs `n_seeds` uniform injective mappings. Draw k always comes from the
/// same derived stream, so a longer run extends a shorter one.
pub fn randomized_baseline(
    c: &BigramMatrix,
    f: &ConfusionMatrix,
    pool: &SymbolPool,
    n_seeds: usize,
    seed: u64,
) -> Result<RandomizedBaseline> {
    check_instance(c, f, pool)?;
    if n_seeds == 0 {
        return Err(Error::invalid("need at least one baseline draw"));
    }
    let l = c.len();
    let s = pool.len();
    let assignments: Vec<Assignment> = (0..n_seeds)
        .map(|k| {
            let mut rng = substream(seed, Stage::Baseline, k as u64);
            let mapping = draw_distinct(&mut rng, s, l);
            Assignment::evaluated(c, f, mapping, AssignMethod::Randomized { draw: k as u64 })
        })
        .collect::<Result<_>>()?;

    let n = n_seeds as f64;
    let mean = assignments.iter().map(|a| a.cost).sum::<f64>() / n;
    let var = assignments
        .iter()
        .map(|a| (a.cost - mean) * (a.cost - mean))
        .sum::<f64>()
        / n;
    let std = var.sqrt();

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut best_idx = 0;
    for (idx, a) in assignments.iter().enumerate() {
        if improves(a.cost, &a.mapping, &best) {
            best = Some((a.cost, a.mapping.clone()));
            best_idx = idx;
        }
    }
    let best = assignments[best_idx].clone();
    Ok(RandomizedBaseline {
        assignments,
        mean,
        std,
        best,
    })
}

/// Number of injective mappings of `letters` letters into `symbols` symbols,
/// saturating at u128::MAX.
pub fn injective_map_count(symbols: usize, letters: usize) -> u128 {
    if letters > symbols {
        return 0;
    }
    let mut acc: u128 = 1;
    for k in 0..letters {
        acc = acc.saturating_mul((symbols - k) as u128);
    }
    acc
}

/// Exhaustive minimum over every injective mapping, in lexicographic order
/// so cost ties keep the smallest mapping. Refuses search spaces above
/// `BRUTE_FORCE_LIMIT`.
pub fn brute_force(
    c: &BigramMatrix,
    f: &ConfusionMatrix,
    pool: &SymbolPool,
) -> Result<Assignment> {
    check_instance(c, f, pool)?;
    let count = injective_map_count(pool.len(), c.len());
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::SearchSpace {
            count,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let eval = Evaluator::new(c, f);
    let mut mapping = Vec::with_capacity(eval.l);
    let mut used = vec![false; eval.s];
    let mut denom = Vec::new();
    let mut best: Option<(f64, Vec<usize>)> = None;
    enumerate_mappings(&eval, &mut mapping, &mut used, &mut denom, &mut best);
    let (_, best_mapping) = best.expect("at least one mapping exists");
    Assignment::evaluated(c, f, best_mapping, AssignMethod::BruteForce)
}

fn enumerate_mappings(
    eval: &Evaluator,
    mapping: &mut Vec<usize>,
    used: &mut [bool],
    denom: &mut Vec<f64>,
    best: &mut Option<(f64, Vec<usize>)>,
) {
    if mapping.len() == eval.l {
        let cost = eval.cost(mapping, denom);
        // Strict improvement keeps the first minimum in enumeration order,
        // which is the lexicographically smallest.
        let better = match best {
            None => true,
            Some((bc, _)) => cost < *bc,
        };
        if better {
            *best = Some((cost, mapping.clone()));
        }
        return;
    }
    for sym in 0..eval.s {
        if !used[sym] {
            used[sym] = true;
            mapping.push(sym);
            enumerate_mappings(eval, mapping, used, denom, best);
            mapping.pop();
            used[sym] = false;
        }
    }
}

/// Solves the linear assignment problem for a rows x cols cost matrix
/// (rows <= cols), minimizing the total cost. Among optimal solutions the
/// lexicographically smallest column vector is returned.
pub fn hungarian_lap(cost: &[f64], rows: usize, cols: usize) -> Result<Vec<usize>> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("cost matrix cannot be empty"));
    }
    if cost.len() != rows * cols {
        return Err(Error::invalid(format!(
            "expected {} costs for {rows}x{cols}, got {}",
            rows * cols,
            cost.len()
        )));
    }
    if rows > cols {
        return Err(Error::invalid(format!(
            "cannot assign {rows} rows into {cols} columns"
        )));
    }
    if !cost.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("cost matrix entries must be finite"));
    }

    let at = |i: usize, j: usize| if i < rows { cost[i * cols + j] } else { 0.0 };
    let (assignment, u, v) = solve_square(cols, &at);
    let chosen: Vec<usize> = assignment[..rows].to_vec();
    let v_star: f64 = chosen
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i * cols + j])
        .sum();

    // With one tight column per row the optimum is unique and already
    // canonical; otherwise resolve ties explicitly.
    let scale = 1.0 + cost.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let eps_t = 1e-9 * scale;
    let ambiguous = (0..rows).any(|i| {
        (0..cols)
            .filter(|&j| (cost[i * cols + j] - u[i] - v[j]).abs() <= eps_t)
            .count()
            > 1
    });
    if !ambiguous {
        return Ok(chosen);
    }
    Ok(canonical_assignment(cost, rows, cols, v_star))
}

/// Potential-based shortest augmenting path solver on an n x n matrix given
/// by `at`. Returns (column of each row, row potentials, column potentials).
fn solve_square(n: usize, at: &dyn Fn(usize, usize) -> f64) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    // p[j] = row matched to column j; column n is the virtual root.
    let mut u = vec![0.0f64; n];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![usize::MAX; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 0..n {
        p[n] = i;
        let mut j0 = n;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 0..n {
                if !used[j] {
                    let cur = at(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    if p[j] != usize::MAX {
                        u[p[j]] += delta;
                    }
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == usize::MAX {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == n {
                break;
            }
        }
    }
    let mut row_to_col = vec![usize::MAX; n];
    for j in 0..n {
        if p[j] != usize::MAX {
            row_to_col[p[j]] = j;
        }
    }
    (row_to_col, u, v[..n].to_vec())
}

/// Fixes columns row by row, keeping the smallest column whose completion
/// still reaches the optimal value within a relative tolerance.
fn canonical_assignment(cost: &[f64], rows: usize, cols: usize, v_star: f64) -> Vec<usize> {
    let eps_v = 1e-9 * (1.0 + v_star.abs());
    let mut chosen = Vec::with_capacity(rows);
    let mut used_cols = vec![false; cols];
    let mut prefix = 0.0f64;
    for i in 0..rows {
        let mut fixed = false;
        for j in 0..cols {
            if used_cols[j] {
                continue;
            }
            let rest = if i + 1 == rows {
                0.0
            } else {
                let free: Vec<usize> = (0..cols)
                    .filter(|&jj| !used_cols[jj] && jj != j)
                    .collect();
                let sub_rows = rows - i - 1;
                let sub_at = |r: usize, cidx: usize| {
                    if r < sub_rows {
                        cost[(i + 1 + r) * cols + free[cidx]]
                    } else {
                        0.0
                    }
                };
                let (sub_assign, _, _) = solve_square(free.len(), &sub_at);
                sub_assign[..sub_rows]
                    .iter()
                    .enumerate()
                    .map(|(r, &cidx)| cost[(i + 1 + r) * cols + free[cidx]])
                    .sum()
            };
            if prefix + cost[i * cols + j] + rest <= v_star + eps_v {
                prefix += cost[i * cols + j];
                chosen.push(j);
                used_cols[j] = true;
                fixed = true;
                break;
            }
        }
        assert!(fixed, "an optimal column always exists within tolerance");
    }
    chosen
}

/// One round of linear costs for the alternating solver: the cost of
/// putting symbol t on letter i while every other letter keeps its current
/// symbol. Swapping t in changes the retained subset, so the restriction
/// denominators are recomputed for each candidate's own subset; for an
/// unused t the cell is the exact both-direction cost of that single move.
fn alternating_linear_costs(
    eval: &Evaluator,
    cur: &[usize],
    lin: &mut [f64],
    denom_full: &mut [f64],
) {
    let (l, s) = (eval.l, eval.s);
    for a in 0..s {
        let row = &eval.f[a * s..(a + 1) * s];
        denom_full[a] = cur.iter().map(|&b| row[b]).sum();
    }
    for i in 0..l {
        let pi = cur[i];
        for t in 0..s {
            let dt = denom_full[t] - eval.f[t * s + pi] + eval.f[t * s + t];
            let mut acc = 0.0;
            for j in 0..l {
                if j == i {
                    continue;
                }
                let pj = cur[j];
                if dt > 0.0 {
                    acc += eval.c[i * l + j] * eval.f[t * s + pj] / dt;
                }
                let dj = denom_full[pj] - eval.f[pj * s + pi] + eval.f[pj * s + t];
                if dj > 0.0 {
                    acc += eval.c[j * l + i] * eval.f[pj * s + t] / dj;
                }
            }
            lin[i * s + t] = acc;
        }
    }
}

fn holds(cur: &[usize], sym: usize) -> bool {
    cur.iter().any(|&b| b == sym)
}

/// Splits the change from `cur` to `proposal` into the smallest letter
/// groups that can move together without breaking injectivity: chains that
/// end on a symbol free in `cur`, and rotations among held symbols. Each
/// group lists (letter, new symbol) pairs.
fn difference_chains(cur: &[usize], proposal: &[usize], s: usize) -> Vec<Vec<(usize, usize)>> {
    let l = cur.len();
    let mut holder = vec![usize::MAX; s];
    for (i, &sym) in cur.iter().enumerate() {
        holder[sym] = i;
    }
    let moved: Vec<usize> = (0..l).filter(|&i| cur[i] != proposal[i]).collect();
    // Letter -> the letter whose current symbol it wants. Both mappings are
    // injective, so every letter has at most one predecessor and the moved
    // set splits into disjoint chains and cycles.
    let mut pointed = vec![false; l];
    for &i in &moved {
        let h = holder[proposal[i]];
        if h != usize::MAX {
            pointed[h] = true;
        }
    }
    let mut visited = vec![false; l];
    let mut chains = Vec::new();
    for &head in &moved {
        if pointed[head] {
            continue;
        }
        let mut chain = Vec::new();
        let mut cursor = head;
        loop {
            visited[cursor] = true;
            chain.push((cursor, proposal[cursor]));
            match holder[proposal[cursor]] {
                h if h == usize::MAX || visited[h] => break,
                h => cursor = h,
            }
        }
        chains.push(chain);
    }
    for &start in &moved {
        if visited[start] {
            continue;
        }
        let mut chain = Vec::new();
        let mut cursor = start;
        loop {
            visited[cursor] = true;
            chain.push((cursor, proposal[cursor]));
            cursor = holder[proposal[cursor]];
            if cursor == start {
                break;
            }
        }
        chains.push(chain);
    }
    chains
}

/// Alternating linearization: each round solves the linear assignment
/// problem obtained by freezing the partner symbols at the current mapping,
/// then steps to the proposal or, when the simultaneous jump overshoots, to
/// the best of its injectivity-preserving sub-steps ([`difference_chains`]).
/// Every accepted step strictly decreases the true cost; a round accepting
/// nothing is the fixed point. Runs from `restarts` random starts plus the
/// native mapping when the pool carries one.
pub fn optimize_alternating_lap(
    c: &BigramMatrix,
    f: &ConfusionMatrix,
    pool: &SymbolPool,
    restarts: usize,
    seed: u64,
) -> Result<Assignment> {
    check_instance(c, f, pool)?;
    if restarts == 0 {
        return Err(Error::invalid("need at least one restart"));
    }
    let eval = Evaluator::new(c, f);
    let (l, s) = (eval.l, eval.s);
    let mut starts: Vec<Vec<usize>> = Vec::new();
    if let Ok(nm) = native_mapping(c.alphabet(), pool) {
        starts.push(nm);
    }
    for k in 0..restarts {
        let mut rng: ChaCha8Rng = substream(seed, Stage::Optimizer, k as u64);
        starts.push(draw_distinct(&mut rng, s, l));
    }

    let mut lin = vec![0.0; l * s];
    let mut denom_full = vec![0.0; s];
    let mut denom = Vec::new();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for start in starts {
        let mut cur = start;
        let mut cur_cost = eval.cost(&cur, &mut denom);
        for _ in 0..MAX_ALT_ROUNDS {
            alternating_linear_costs(&eval, &cur, &mut lin, &mut denom_full);
            let proposal = hungarian_lap(&lin, l, s)?;
            if proposal == cur {
                break;
            }
            let mut round: Option<(f64, Vec<usize>)> = None;
            let proposal_cost = eval.cost(&proposal, &mut denom);
            if proposal_cost < cur_cost {
                round = Some((proposal_cost, proposal.clone()));
            }
            let chains = difference_chains(&cur, &proposal, s);
            for chain in &chains {
                // A chain stays injective when applied from any point down
                // to its tail; a rotation only moves whole.
                let cycle = holds(&cur, chain[chain.len() - 1].1);
                let cuts = if cycle { 1 } else { chain.len() };
                for cut in 0..cuts {
                    let mut cand = cur.clone();
                    for &(letter, sym) in &chain[cut..] {
                        cand[letter] = sym;
                    }
                    let cost = eval.cost(&cand, &mut denom);
                    if cost < cur_cost && improves(cost, &cand, &round) {
                        round = Some((cost, cand));
                    }
                }
            }
            if chains.len() > 2 {
                // Chains touch disjoint letters and symbols, so dropping one
                // from the proposal still yields an injective mapping.
                for skip in 0..chains.len() {
                    let mut cand = proposal.clone();
                    for &(letter, _) in &chains[skip] {
                        cand[letter] = cur[letter];
                    }
                    let cost = eval.cost(&cand, &mut denom);
                    if cost < cur_cost && improves(cost, &cand, &round) {
                        round = Some((cost, cand));
                    }
                }
            }
            match round {
                Some((cost, mapping)) => {
                    cur_cost = cost;
                    cur = mapping;
                }
                None => break,
            }
        }
        if improves(cur_cost, &cur, &best) {
            best = Some((cur_cost, cur));
        }
    }
    let (_, mapping) = best.expect("at least one start ran");
    Assignment::evaluated(c, f, mapping, AssignMethod::HungarianAlt)
}

/// Steepest-descent pass from one start: each round scans every
/// transposition of two letters' symbols and every replacement of one
/// letter's symbol by an unused one, applies the best strict improvement,
/// and stops when none exists. Move scan order breaks cost ties.
fn descend(eval: &Evaluator, start: Vec<usize>) -> (Vec<usize>, f64) {
    let (l, s) = (eval.l, eval.s);
    let mut cur = start;
    let mut denom = Vec::new();
    let mut cur_cost = eval.cost(&cur, &mut denom);
    let mut cand = cur.clone();
    let mut used = vec![false; s];
    loop {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for i in 0..l {
            for j in i + 1..l {
                cand.copy_from_slice(&cur);
                cand.swap(i, j);
                let cost = eval.cost(&cand, &mut denom);
                if cost < cur_cost && best.as_ref().map_or(true, |(bc, _)| cost < *bc) {
                    best = Some((cost, cand.clone()));
                }
            }
        }
        used.iter_mut().for_each(|u| *u = false);
        for &m in &cur {
            used[m] = true;
        }
        for i in 0..l {
            for sym in 0..s {
                if used[sym] {
                    continue;
                }
                cand.copy_from_slice(&cur);
                cand[i] = sym;
                let cost = eval.cost(&cand, &mut denom);
                if cost < cur_cost && best.as_ref().map_or(true, |(bc, _)| cost < *bc) {
                    best = Some((cost, cand.clone()));
                }
            }
        }
        match best {
            Some((bc, bm)) => {
                cur_cost = bc;
                cur.copy_from_slice(&bm);
            }
            None => break,
        }
    }
    (cur, cur_cost)
}

/// Steepest-descent local search over swaps and replacements. Restart k
/// descends from the same mapping baseline draw k costs, so the result never
/// trails a randomized baseline of at most `restarts` draws; the native
/// mapping joins the starts when available.
pub fn optimize_local_search(
    c: &BigramMatrix,
    f: &ConfusionMatrix,
    pool: &SymbolPool,
    restarts: usize,
    seed: u64,
) -> Result<Assignment> {
    check_instance(c, f, pool)?;
    if restarts == 0 {
        return Err(Error::invalid("need at least one restart"));
    }
    let eval = Evaluator::new(c, f);
    let (l, s) = (eval.l, eval.s);
    let mut starts: Vec<Vec<usize>> = Vec::new();
    if let Ok(nm) = native_mapping(c.alphabet(), pool) {
        starts.push(nm);
    }
    for k in 0..restarts {
        let mut rng = substream(seed, Stage::Baseline, k as u64);
        starts.push(draw_distinct(&mut rng, s, l));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for start in starts {
        let (mapping, cost) = descend(&eval, start);
        if improves(cost, &mapping, &best) {
            best = Some((cost, mapping));
        }
    }
    let (_, mapping) = best.expect("at least one start ran");
    Assignment::evaluated(c, f, mapping, AssignMethod::LocalSearch)
}

/// Single steepest descent from a caller-provided start.
pub fn refine_local_search(
    c: &BigramMatrix,
    f: &ConfusionMatrix,
    pool: &SymbolPool,
    start: &[usize],
) -> Result<Assignment> {
    check_instance(c, f, pool)?;
    check_mapping(c.len(), f.len(), start)?;
    let eval = Evaluator::new(c, f);
    let (mapping, _) = descend(&eval, start.to_vec());
    Assignment::evaluated(c, f, mapping, AssignMethod::LocalSearch)
}
