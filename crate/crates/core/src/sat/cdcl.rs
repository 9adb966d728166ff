//! Conflict-driven clause learning with two watched literals, first-UIP
//! learning with recursive minimisation, Luby or LBD-driven restarts and
//! LBD-based clause database reduction.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Budget, SolveOutcome, SolveStats, Status};
use crate::cnf::CnfFormula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Heuristic {
    /// Lowest-numbered unassigned variable, always tried false first.
    LowestIndex,
    /// Activity-based (VSIDS) with phase saving, false as initial phase.
    Vsids,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Restarts {
    Never,
    /// Luby sequence scaled by the given number of conflicts.
    Luby(u64),
    /// Restart when recent learnt clauses have worse LBD than average,
    /// postponed while the trail is unusually long.
    Glucose,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolverConfig {
    pub heuristic: Heuristic,
    /// Seeds the initial activity perturbation (VSIDS only).
    pub seed: u64,
    pub restarts: Restarts,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            heuristic: Heuristic::Vsids,
            seed: 0,
            restarts: Restarts::Glucose,
        }
    }
}

impl SolverConfig {
    /// Lowest-index, false-first branching with Luby restarts.
    pub fn lowest_index() -> Self {
        SolverConfig {
            heuristic: Heuristic::LowestIndex,
            seed: 0,
            restarts: Restarts::Luby(100),
        }
    }
}

const REDUCE_FIRST: u64 = 2000;
const REDUCE_STEP: u64 = 300;
const LBD_WINDOW: usize = 50;
const TRAIL_WINDOW: usize = 5000;
const RESTART_MARGIN: f64 = 0.8;
const BLOCK_MARGIN: f64 = 1.4;

/// Fixed-size window with a running sum.
#[derive(Debug)]
struct Window {
    items: std::collections::VecDeque<u64>,
    cap: usize,
    sum: u64,
}

impl Window {
    fn new(cap: usize) -> Self {
        Window {
            items: std::collections::VecDeque::with_capacity(cap),
            cap,
            sum: 0,
        }
    }

    fn push(&mut self, x: u64) {
        if self.items.len() == self.cap {
            self.sum -= self.items.pop_front().expect("full window");
        }
        self.items.push_back(x);
        self.sum += x;
    }

    fn full(&self) -> bool {
        self.items.len() == self.cap
    }

    fn mean(&self) -> f64 {
        self.sum as f64 / self.items.len().max(1) as f64
    }

    fn clear(&mut self) {
        self.items.clear();
        self.sum = 0;
    }
}

/// Internal literal: `2 * var + negated`, variables from 0.
type L = u32;

const UNDEF: u8 = 0;
const TRUE: u8 = 1;
const FALSE: u8 = 2;
const NO_REASON: usize = usize::MAX;

fn var(l: L) -> usize {
    (l >> 1) as usize
}

fn from_dimacs(lit: i32) -> L {
    ((lit.unsigned_abs() - 1) << 1) | (lit < 0) as u32
}

#[derive(Debug)]
struct Clause {
    lits: Vec<L>,
    learnt: bool,
    lbd: u32,
    activity: f64,
    deleted: bool,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: usize,
    blocker: L,
}

/// Max-heap of variables keyed by activity.
#[derive(Debug, Default)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: Vec::with_capacity(n),
            pos: vec![None; n],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len()
                && Self::better(act, self.heap[right], self.heap[left])
            {
                right
            } else {
                left
            };
            if !Self::better(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.sift_down(0, act);
        }
        Some(top)
    }
}

struct Solver<'a> {
    config: &'a SolverConfig,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<u8>,
    /// Value of each literal, kept in step with `assigns`.
    lit_values: Vec<u8>,
    level_stamp: Vec<u64>,
    stamp: u64,
    level: Vec<u32>,
    reason: Vec<usize>,
    trail: Vec<L>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    next_lowest: usize,
    stats: SolveStats,
}

enum Search {
    Sat,
    Unsat,
    Budget,
}

impl<'a> Solver<'a> {
    fn new(num_vars: usize, config: &'a SolverConfig) -> Self {
        let mut activity = vec![0.0; num_vars];
        if config.heuristic == Heuristic::Vsids && config.seed != 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            for a in &mut activity {
                *a = rng.gen::<f64>() * 1e-5;
            }
        }
        let mut heap = VarHeap::new(num_vars);
        if config.heuristic == Heuristic::Vsids {
            for v in 0..num_vars {
                heap.insert(v, &activity);
            }
        }
        Solver {
            config,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assigns: vec![UNDEF; num_vars],
            lit_values: vec![UNDEF; 2 * num_vars],
            level_stamp: vec![0; num_vars + 1],
            stamp: 0,
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            heap,
            phase: vec![true; num_vars],
            seen: vec![false; num_vars],
            next_lowest: 0,
            stats: SolveStats::default(),
        }
    }

    fn value(&self, l: L) -> u8 {
        self.lit_values[l as usize]
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: L, reason: usize) {
        let v = var(l);
        self.assigns[v] = if l & 1 == 0 { TRUE } else { FALSE };
        self.lit_values[l as usize] = TRUE;
        self.lit_values[(l ^ 1) as usize] = FALSE;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, cref: usize) {
        let c = &self.clauses[cref];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[a as usize].push(Watcher { cref, blocker: b });
        self.watches[b as usize].push(Watcher { cref, blocker: a });
    }

    /// Adds an original clause at level 0. Returns false on a top-level conflict.
    fn add_clause(&mut self, lits: &[i32]) -> bool {
        let mut lits: Vec<L> = lits.iter().map(|&l| from_dimacs(l)).collect();
        if lits.iter().any(|&l| self.value(l) == TRUE) {
            return true;
        }
        lits.retain(|&l| self.value(l) != FALSE);
        match lits.len() {
            0 => false,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                true
            }
            _ => {
                let cref = self.clauses.len();
                self.clauses.push(Clause {
                    lits,
                    learnt: false,
                    lbd: 0,
                    activity: 0.0,
                    deleted: false,
                });
                self.attach(cref);
                true
            }
        }
    }

    /// Unit propagation over the watch lists; returns a conflicting clause.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                if self.clauses[w.cref].deleted {
                    continue;
                }
                let c = &mut self.clauses[w.cref].lits;
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                let watcher = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = watcher;
                    j += 1;
                    continue;
                }
                let c = &self.clauses[w.cref].lits;
                if let Some(k) = (2..c.len()).find(|&k| self.value(c[k]) != FALSE) {
                    let c = &mut self.clauses[w.cref].lits;
                    c.swap(1, k);
                    let new_watch = c[1];
                    self.watches[new_watch as usize].push(watcher);
                    continue;
                }
                ws[j] = watcher;
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut cref: usize) -> (Vec<L>, u32) {
        let mut learnt: Vec<L> = vec![0];
        let mut counter = 0usize;
        let mut p: Option<L> = None;
        let mut idx = self.trail.len();
        loop {
            if self.clauses[cref].learnt {
                self.bump_clause(cref);
            }
            let start = usize::from(p.is_some());
            for k in start..self.clauses[cref].lits.len() {
                let q = self.clauses[cref].lits[k];
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= self.decision_level() {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[var(lit)] = false;
            counter -= 1;
            if counter == 0 {
                break;
            }
            cref = self.reason[var(lit)];
        }
        learnt[0] = p.expect("conflict has a UIP") ^ 1;

        // drop literals implied by the rest of the clause
        let abstract_levels = learnt[1..]
            .iter()
            .fold(0u32, |m, &q| m | 1 << (self.level[var(q)] & 31));
        let mut to_clear = learnt.clone();
        let mut kept = vec![learnt[0]];
        for &q in &learnt[1..] {
            if self.reason[var(q)] == NO_REASON
                || !self.redundant(q, abstract_levels, &mut to_clear)
            {
                kept.push(q);
            }
        }
        for &q in &to_clear {
            self.seen[var(q)] = false;
        }
        let mut learnt = kept;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let (best, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(i, &q)| (self.level[var(q)], std::cmp::Reverse(*i)))
                .expect("at least two literals");
            learnt.swap(1, best);
            self.level[var(learnt[1])]
        };
        (learnt, bt)
    }

    /// Whether `p` follows from literals already in the learnt clause by
    /// a chain of reasons. Marks visited literals in `seen`.
    fn redundant(&mut self, p: L, abstract_levels: u32, to_clear: &mut Vec<L>) -> bool {
        let mut stack = vec![p];
        let top = to_clear.len();
        while let Some(q) = stack.pop() {
            let r = self.reason[var(q)];
            for k in 1..self.clauses[r].lits.len() {
                let l = self.clauses[r].lits[k];
                let v = var(l);
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v] != NO_REASON && abstract_levels & (1 << (self.level[v] & 31)) != 0
                {
                    self.seen[v] = true;
                    stack.push(l);
                    to_clear.push(l);
                } else {
                    for &x in &to_clear[top..] {
                        self.seen[var(x)] = false;
                    }
                    to_clear.truncate(top);
                    return false;
                }
            }
        }
        true
    }

    fn lbd(&mut self, lits: &[L]) -> u32 {
        self.stamp += 1;
        let mut count = 0;
        for &l in lits {
            let lv = self.level[var(l)] as usize;
            if self.level_stamp[lv] != self.stamp {
                self.level_stamp[lv] = self.stamp;
                count += 1;
            }
        }
        count
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = var(l);
            self.assigns[v] = UNDEF;
            self.lit_values[l as usize] = UNDEF;
            self.lit_values[(l ^ 1) as usize] = UNDEF;
            self.reason[v] = NO_REASON;
            self.phase[v] = l & 1 == 1;
            if self.config.heuristic == Heuristic::Vsids {
                self.heap.insert(v, &self.activity);
            }
            if v < self.next_lowest {
                self.next_lowest = v;
            }
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<L> {
        match self.config.heuristic {
            Heuristic::LowestIndex => {
                while self.next_lowest < self.assigns.len()
                    && self.assigns[self.next_lowest] != UNDEF
                {
                    self.next_lowest += 1;
                }
                let v = self.next_lowest;
                (v < self.assigns.len()).then_some(((v as u32) << 1) | 1)
            }
            Heuristic::Vsids => {
                while let Some(v) = self.heap.pop(&self.activity) {
                    if self.assigns[v] == UNDEF {
                        return Some(((v as u32) << 1) | self.phase[v] as u32);
                    }
                }
                None
            }
        }
    }

    fn locked(&self, cref: usize) -> bool {
        let first = self.clauses[cref].lits[0];
        self.reason[var(first)] == cref && self.value(first) == TRUE
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lbd > 2 && !self.locked(i)
            })
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a], &self.clauses[b]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.total_cmp(&cb.activity))
                .then(a.cmp(&b))
        });
        for &i in &cands[..cands.len() / 2] {
            let c = &mut self.clauses[i];
            c.deleted = true;
            c.lits = Vec::new();
        }
        self.collect_garbage();
    }

    /// Drops deleted clauses, renumbers the rest and rebuilds the watches.
    fn collect_garbage(&mut self) {
        let mut remap = vec![NO_REASON; self.clauses.len()];
        let mut kept = Vec::with_capacity(self.clauses.len());
        for (i, c) in std::mem::take(&mut self.clauses).into_iter().enumerate() {
            if !c.deleted {
                remap[i] = kept.len();
                kept.push(c);
            }
        }
        self.clauses = kept;
        for r in &mut self.reason {
            if *r != NO_REASON {
                *r = remap[*r];
            }
        }
        for w in &mut self.watches {
            w.clear();
        }
        for cref in 0..self.clauses.len() {
            self.attach(cref);
        }
    }

    fn search(&mut self, budget: &Budget, started: Instant) -> Search {
        if self.propagate().is_some() {
            return Search::Unsat;
        }
        let mut next_reduce = REDUCE_FIRST;
        let mut reductions = 0u64;
        let mut restart_index = 0u32;
        let mut until_restart = match self.config.restarts {
            Restarts::Luby(base) => base * luby(0),
            _ => 0,
        };
        let mut recent_lbd = Window::new(LBD_WINDOW);
        let mut recent_trail = Window::new(TRAIL_WINDOW);
        let mut lbd_sum = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    return Search::Unsat;
                }
                recent_trail.push(self.trail.len() as u64);
                if self.config.restarts == Restarts::Glucose
                    && self.stats.conflicts > 10_000
                    && recent_lbd.full()
                    && recent_trail.full()
                    && self.trail.len() as f64 > BLOCK_MARGIN * recent_trail.mean()
                {
                    recent_lbd.clear();
                }
                let (learnt, bt) = self.analyze(confl);
                let lbd = self.lbd(&learnt);
                recent_lbd.push(lbd as u64);
                lbd_sum += lbd as u64;
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let cref = self.clauses.len();
                    let asserting = learnt[0];
                    self.clauses.push(Clause {
                        lits: learnt,
                        learnt: true,
                        lbd,
                        activity: 0.0,
                        deleted: false,
                    });
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.enqueue(asserting, cref);
                }
                self.stats.learned += 1;
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;

                if budget
                    .conflicts
                    .is_some_and(|lim| self.stats.conflicts >= lim)
                {
                    return Search::Budget;
                }
                if self.stats.conflicts.is_multiple_of(64)
                    && budget.time.is_some_and(|t| started.elapsed() >= t)
                {
                    return Search::Budget;
                }
                let restart = match self.config.restarts {
                    Restarts::Never => false,
                    Restarts::Luby(base) => {
                        until_restart -= 1;
                        if until_restart == 0 {
                            restart_index += 1;
                            until_restart = base.max(1) * luby(restart_index);
                            true
                        } else {
                            false
                        }
                    }
                    Restarts::Glucose => {
                        let global = lbd_sum as f64 / self.stats.conflicts as f64;
                        if recent_lbd.full() && recent_lbd.mean() * RESTART_MARGIN > global {
                            recent_lbd.clear();
                            true
                        } else {
                            false
                        }
                    }
                };
                if restart {
                    self.stats.restarts += 1;
                    self.cancel_until(0);
                }
            } else {
                if self.stats.conflicts >= next_reduce {
                    reductions += 1;
                    next_reduce = self.stats.conflicts + REDUCE_FIRST + REDUCE_STEP * reductions;
                    self.reduce_db();
                }
                let Some(lit) = self.pick_branch() else {
                    return Search::Sat;
                };
                self.stats.decisions += 1;
                if self.stats.decisions.is_multiple_of(1024)
                    && budget.time.is_some_and(|t| started.elapsed() >= t)
                {
                    return Search::Budget;
                }
                self.trail_lim.push(self.trail.len());
                self.enqueue(lit, NO_REASON);
            }
        }
    }
}

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, ... at index `i`.
fn luby(mut i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i as u64 {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size as u32;
    }
    1 << seq
}

/// Solves `f` in-process. Deterministic for a fixed configuration as long
/// as the time limit is not hit.
pub fn solve_embedded(f: &CnfFormula, budget: &Budget, config: &SolverConfig) -> SolveOutcome {
    let started = Instant::now();
    let mut s = Solver::new(f.num_vars() as usize, config);
    let mut ok = true;
    for clause in f.clauses() {
        if !s.add_clause(clause) {
            ok = false;
            break;
        }
    }
    let result = if ok {
        s.search(budget, started)
    } else {
        Search::Unsat
    };
    let mut stats = s.stats;
    stats.wall_time = started.elapsed();
    match result {
        Search::Unsat => SolveOutcome::without_model(Status::Unsatisfiable, stats, None),
        Search::Budget => SolveOutcome::without_model(Status::Timeout, stats, None),
        Search::Sat => {
            let model: Vec<bool> = s.assigns.iter().map(|&a| a == TRUE).collect();
            if let Some(i) = f.first_falsified(&model) {
                return SolveOutcome::without_model(
                    Status::Unknown,
                    stats,
                    Some(format!("internal error: model falsifies clause {i}")),
                );
            }
            SolveOutcome {
                status: Status::Satisfiable,
                model: Some(model),
                stats,
                diagnostic: None,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn formula(num_vars: u32, clauses: &[&[i32]]) -> CnfFormula {
        let mut f = CnfFormula::new(num_vars);
        f.extend(clauses.iter().map(|c| c.to_vec())).unwrap();
        f
    }

    fn brute_sat(f: &CnfFormula) -> bool {
        let nv = f.num_vars();
        (0..1u32 << nv).any(|m| {
            let model: Vec<bool> = (0..nv).map(|i| m >> i & 1 == 1).collect();
            f.is_satisfied_by(&model)
        })
    }

    fn configs() -> Vec<SolverConfig> {
        vec![
            SolverConfig::default(),
            SolverConfig::lowest_index(),
            SolverConfig {
                heuristic: Heuristic::Vsids,
                seed: 7,
                restarts: Restarts::Luby(10),
            },
            SolverConfig {
                heuristic: Heuristic::LowestIndex,
                seed: 0,
                restarts: Restarts::Never,
            },
        ]
    }

    #[test]
    fn trivial_formulas() {
        let out = solve_embedded(
            &formula(1, &[&[1]]),
            &Budget::default(),
            &SolverConfig::default(),
        );
        assert_eq!(out.status, Status::Satisfiable);
        assert_eq!(out.model, Some(vec![true]));

        let out = solve_embedded(
            &formula(1, &[&[1], &[-1]]),
            &Budget::default(),
            &SolverConfig::default(),
        );
        assert_eq!(out.status, Status::Unsatisfiable);
        assert!(out.model.is_none());

        let out = solve_embedded(
            &CnfFormula::new(3),
            &Budget::default(),
            &SolverConfig::default(),
        );
        assert_eq!(out.model, Some(vec![false; 3]));
    }

    #[test]
    fn false_first_finds_small_models() {
        let out = solve_embedded(
            &formula(3, &[&[1, 2, 3]]),
            &Budget::default(),
            &SolverConfig::default(),
        );
        assert_eq!(out.model, Some(vec![false, false, true]));
    }

    /// Pigeonhole: p + 1 pigeons into p holes.
    fn pigeonhole(p: u32) -> CnfFormula {
        let var = |i: u32, h: u32| (i * p + h + 1) as i32;
        let mut f = CnfFormula::new((p + 1) * p);
        for i in 0..=p {
            f.add_clause((0..p).map(|h| var(i, h)).collect()).unwrap();
        }
        for h in 0..p {
            for i in 0..=p {
                for j in i + 1..=p {
                    f.add_clause(vec![-var(i, h), -var(j, h)]).unwrap();
                }
            }
        }
        f
    }

    #[test]
    fn pigeonhole_is_unsat() {
        for config in configs() {
            for p in 2..=6 {
                let out = solve_embedded(&pigeonhole(p), &Budget::default(), &config);
                assert_eq!(out.status, Status::Unsatisfiable, "{config:?} p={p}");
            }
        }
    }

    #[test]
    fn conflict_budget_yields_timeout() {
        let budget = Budget {
            time: None,
            conflicts: Some(5),
        };
        let out = solve_embedded(&pigeonhole(7), &budget, &SolverConfig::default());
        assert_eq!(out.status, Status::Timeout);
        assert_eq!(out.stats.conflicts, 5);
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn deterministic_stats() {
        for config in configs() {
            let a = solve_embedded(&pigeonhole(5), &Budget::unlimited(), &config);
            let b = solve_embedded(&pigeonhole(5), &Budget::unlimited(), &config);
            assert_eq!(a.status, b.status);
            assert_eq!(a.stats.counters(), b.stats.counters());
        }
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (1u32..=10).prop_flat_map(|nv| {
            let lit = (1..=nv as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
            prop::collection::vec(prop::collection::vec(lit, 1..=4), 0..40).prop_map(move |cls| {
                let mut f = CnfFormula::new(nv);
                for c in cls {
                    let _ = f.add_clause(c);
                }
                f
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn agrees_with_truth_table(f in arb_formula()) {
            let expected = brute_sat(&f);
            for config in configs() {
                let out = solve_embedded(&f, &Budget::unlimited(), &config);
                prop_assert_eq!(out.status == Status::Satisfiable, expected);
                if let Some(m) = &out.model {
                    prop_assert!(f.is_satisfied_by(m));
                }
            }
        }
    }
}
