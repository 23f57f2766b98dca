//! Binary quadratic programs with per-side knapsack constraints.
//!
//! Variable `x_k = 0` puts item `k` on side 0, `x_k = 1` on side 1. The
//! objective is `constant + Σ lin_k x_k + Σ_{k<l} q_kl x_k x_l` and each side
//! has a componentwise resource capacity:
//! `Σ_{x_k=0} occ0_k ≤ cap0` and `Σ_{x_k=1} occ1_k ≤ cap1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fabric::{ResourceKind, ResourceVector};

#[derive(Debug, Clone, PartialEq)]
pub struct BqpModel {
    constant: f64,
    linear: Vec<f64>,
    // row-major n x n, only k < l entries are used
    quadratic: Vec<f64>,
    occ0: Vec<ResourceVector>,
    occ1: Vec<ResourceVector>,
    cap0: ResourceVector,
    cap1: ResourceVector,
}

impl BqpModel {
    pub fn new(n: usize, cap0: ResourceVector, cap1: ResourceVector) -> Self {
        BqpModel {
            constant: 0.0,
            linear: vec![0.0; n],
            quadratic: vec![0.0; n * n],
            occ0: vec![ResourceVector::ZERO; n],
            occ1: vec![ResourceVector::ZERO; n],
            cap0,
            cap1,
        }
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn add_constant(&mut self, v: f64) {
        self.constant += v;
    }

    pub fn add_linear(&mut self, k: usize, v: f64) {
        self.linear[k] += v;
    }

    pub fn add_quadratic(&mut self, k: usize, l: usize, v: f64) {
        assert_ne!(k, l, "use add_linear for x_k^2 = x_k");
        let (a, b) = (k.min(l), k.max(l));
        let n = self.len();
        self.quadratic[a * n + b] += v;
    }

    pub fn set_occupancy(&mut self, k: usize, occ0: ResourceVector, occ1: ResourceVector) {
        self.occ0[k] = occ0;
        self.occ1[k] = occ1;
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn linear(&self, k: usize) -> f64 {
        self.linear[k]
    }

    pub fn quadratic(&self, k: usize, l: usize) -> f64 {
        let (a, b) = (k.min(l), k.max(l));
        self.quadratic[a * self.len() + b]
    }

    pub fn capacities(&self) -> (ResourceVector, ResourceVector) {
        (self.cap0, self.cap1)
    }

    pub fn occupancy(&self, k: usize) -> (ResourceVector, ResourceVector) {
        (self.occ0[k], self.occ1[k])
    }

    pub fn objective(&self, x: &[bool]) -> f64 {
        let n = self.len();
        let mut v = self.constant;
        for k in 0..n {
            if !x[k] {
                continue;
            }
            v += self.linear[k];
            for l in k + 1..n {
                if x[l] {
                    v += self.quadratic[k * n + l];
                }
            }
        }
        v
    }

    /// Resource totals on each side for assignment `x`.
    pub fn usage(&self, x: &[bool]) -> ([u64; 3], [u64; 3]) {
        let mut used = ([0u64; 3], [0u64; 3]);
        for (k, &side) in x.iter().enumerate() {
            let (occ, acc) = if side { (&self.occ1[k], &mut used.1) } else { (&self.occ0[k], &mut used.0) };
            add_into(acc, occ);
        }
        used
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        let (u0, u1) = self.usage(x);
        fits(&u0, &self.cap0) && fits(&u1, &self.cap1)
    }
}

fn add_into(acc: &mut [u64; 3], v: &ResourceVector) {
    for (slot, kind) in acc.iter_mut().zip(ResourceKind::ALL) {
        *slot += v.get(kind) as u64;
    }
}

fn fits(used: &[u64; 3], cap: &ResourceVector) -> bool {
    used.iter().zip(ResourceKind::ALL).all(|(&u, k)| u <= cap.get(k) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Models up to this size are enumerated exhaustively.
    pub exhaustive_limit: usize,
    /// Branch-and-bound node budget. Work-based so results do not depend on
    /// machine speed.
    pub node_limit: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { exhaustive_limit: 16, node_limit: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub assignment: Vec<bool>,
    pub objective: f64,
    /// Assignments evaluated (exhaustive) or nodes expanded (branch and bound).
    pub work: u64,
    /// `false` when the node budget ran out and the best-found point is returned.
    pub proven_optimal: bool,
}

fn tolerance(reference: f64) -> f64 {
    1e-9 * reference.abs().max(1.0)
}

// Lower objective wins; ties go to the lexicographically smaller vector.
fn improves(obj: f64, x: &[bool], best_obj: f64, best_x: &[bool]) -> bool {
    let eps = tolerance(best_obj);
    obj < best_obj - eps || (obj <= best_obj + eps && x < best_x)
}

/// Exact minimum for small models, branch and bound seeded by greedy plus
/// swap local search above [`SolverConfig::exhaustive_limit`].
pub fn solve_bqp(model: &BqpModel, config: &SolverConfig) -> Result<Solution> {
    if model.len() <= config.exhaustive_limit {
        solve_exhaustive(model)
    } else {
        solve_branch_and_bound(model, config)
    }
}

pub fn solve_exhaustive(model: &BqpModel) -> Result<Solution> {
    let n = model.len();
    assert!(n < 63, "exhaustive enumeration is limited to small models");
    let mut best: Option<(Vec<bool>, f64)> = None;
    let mut x = vec![false; n];
    let total = 1u64 << n;
    for code in 0..total {
        // x[0] is the most significant bit so codes run in lexicographic order
        for (k, slot) in x.iter_mut().enumerate() {
            *slot = (code >> (n - 1 - k)) & 1 == 1;
        }
        if !model.is_feasible(&x) {
            continue;
        }
        let obj = model.objective(&x);
        if best.as_ref().is_none_or(|(bx, bo)| improves(obj, &x, *bo, bx)) {
            best = Some((x.clone(), obj));
        }
    }
    let (assignment, objective) = best.ok_or(Error::BqpInfeasible)?;
    Ok(Solution { assignment, objective, work: total, proven_optimal: true })
}

/// Sequential greedy: each variable takes the side with the lower incremental
/// cost given the variables already set, falling back to the other side when
/// the preferred one is full.
pub fn greedy_seed(model: &BqpModel) -> Option<(Vec<bool>, f64)> {
    let n = model.len();
    let mut x = vec![false; n];
    let mut used = ([0u64; 3], [0u64; 3]);
    for k in 0..n {
        let mut gain_one = model.linear(k);
        for l in 0..k {
            if x[l] {
                gain_one += model.quadratic(l, k);
            }
        }
        let order = if gain_one < 0.0 { [true, false] } else { [false, true] };
        let mut placed = false;
        for side in order {
            let (occ, acc, cap) = if side {
                (&model.occ1[k], &mut used.1, &model.cap1)
            } else {
                (&model.occ0[k], &mut used.0, &model.cap0)
            };
            let mut trial = *acc;
            add_into(&mut trial, occ);
            if fits(&trial, cap) {
                *acc = trial;
                x[k] = side;
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    let obj = model.objective(&x);
    Some((x, obj))
}

/// Single flips and pairwise swaps until no feasible move improves.
pub fn local_search(model: &BqpModel, x: &mut [bool]) -> f64 {
    let n = model.len();
    let mut obj = model.objective(x);
    loop {
        let mut moved = false;
        for k in 0..n {
            x[k] = !x[k];
            let cand = model.objective(x);
            if cand < obj - tolerance(obj) && model.is_feasible(x) {
                obj = cand;
                moved = true;
            } else {
                x[k] = !x[k];
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if x[i] == x[j] {
                    continue;
                }
                x.swap(i, j);
                let cand = model.objective(x);
                if cand < obj - tolerance(obj) && model.is_feasible(x) {
                    obj = cand;
                    moved = true;
                } else {
                    x.swap(i, j);
                }
            }
        }
        if !moved {
            return obj;
        }
    }
}

struct Search<'a> {
    model: &'a BqpModel,
    // Σ_{m>j} min(0, q_jm)
    negative_tail: Vec<f64>,
    // linear coefficient of each variable given the ones already set to 1
    effective: Vec<f64>,
    x: Vec<bool>,
    used0: [u64; 3],
    used1: [u64; 3],
    // Σ_{j≥k} min(occ0_j, occ1_j) per kind, for the capacity lookahead
    min_tail: Vec<[u64; 3]>,
    best: Option<(Vec<bool>, f64)>,
    nodes: u64,
    node_limit: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn lower_bound(&self, depth: usize) -> f64 {
        (depth..self.x.len()).map(|j| (self.effective[j] + self.negative_tail[j]).min(0.0)).sum()
    }

    fn capacity_room(&self, depth: usize) -> bool {
        let (c0, c1) = (&self.model.cap0, &self.model.cap1);
        ResourceKind::ALL.iter().enumerate().all(|(i, &k)| {
            let room =
                (c0.get(k) as u64).saturating_sub(self.used0[i]) + (c1.get(k) as u64).saturating_sub(self.used1[i]);
            self.min_tail[depth][i] <= room
        })
    }

    fn descend(&mut self, depth: usize, partial: f64) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.exhausted = true;
            return;
        }
        let n = self.x.len();
        if depth == n {
            let better = match &self.best {
                None => true,
                Some((bx, bo)) => improves(partial, &self.x, *bo, bx),
            };
            if better {
                self.best = Some((self.x.clone(), partial));
            }
            return;
        }
        if let Some((bx, bo)) = &self.best {
            let bound = partial + self.lower_bound(depth);
            let eps = tolerance(*bo);
            if bound > *bo + eps {
                return;
            }
            // a tie can only win if it is lexicographically smaller
            if bound >= *bo - eps && self.x[..depth] > bx[..depth] {
                return;
            }
        }
        if !self.capacity_room(depth) {
            return;
        }

        for side in [false, true] {
            let model = self.model;
            let occ = if side { &model.occ1[depth] } else { &model.occ0[depth] };
            let (acc, cap) = if side { (&mut self.used1, &model.cap1) } else { (&mut self.used0, &model.cap0) };
            let before = *acc;
            add_into(acc, occ);
            if fits(acc, cap) {
                self.x[depth] = side;
                if side {
                    let gain = self.effective[depth];
                    for l in depth + 1..n {
                        self.effective[l] += model.quadratic(depth, l);
                    }
                    self.descend(depth + 1, partial + gain);
                    for l in depth + 1..n {
                        self.effective[l] -= model.quadratic(depth, l);
                    }
                } else {
                    self.descend(depth + 1, partial);
                }
                self.x[depth] = false;
            }
            if side {
                self.used1 = before;
            } else {
                self.used0 = before;
            }
        }
    }
}

fn solve_branch_and_bound(model: &BqpModel, config: &SolverConfig) -> Result<Solution> {
    let n = model.len();
    let seed = greedy_seed(model).map(|(mut x, _)| {
        let obj = local_search(model, &mut x);
        (x, obj)
    });

    let negative_tail = (0..n).map(|j| (j + 1..n).map(|m| model.quadratic(j, m).min(0.0)).sum()).collect();
    let mut min_tail = vec![[0u64; 3]; n + 1];
    for j in (0..n).rev() {
        let mut row = min_tail[j + 1];
        let least = model.occ0[j].component_min(&model.occ1[j]);
        add_into(&mut row, &least);
        min_tail[j] = row;
    }
    let mut search = Search {
        model,
        negative_tail,
        effective: model.linear.clone(),
        x: vec![false; n],
        used0: [0; 3],
        used1: [0; 3],
        min_tail,
        best: seed.map(|(x, obj)| (x, obj - model.constant)),
        nodes: 0,
        node_limit: config.node_limit,
        exhausted: false,
    };
    search.descend(0, 0.0);
    let proven_optimal = !search.exhausted;
    let work = search.nodes;
    match search.best {
        Some((assignment, _)) => {
            let objective = model.objective(&assignment);
            Ok(Solution { assignment, objective, work, proven_optimal })
        }
        None if proven_optimal => Err(Error::BqpInfeasible),
        None => Err(Error::BqpBudgetExhausted),
    }
}
