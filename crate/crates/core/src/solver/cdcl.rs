//! Conflict-driven clause learning with weighted at-most constraints.

use std::ops::Not;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Self {
        Lit(((var as u32) << 1) | u32::from(!positive))
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn index(self) -> usize {
        self.0 as usize
    }

    fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SatResult {
    Sat,
    Unsat,
    Unknown,
}

/// Shared step and time allowance.
#[derive(Clone, Debug)]
pub(crate) struct Budget {
    pub steps_left: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Budget {
    /// Charges one step; false once the allowance is exhausted.
    pub fn charge(&mut self, check_clock: bool) -> bool {
        if let Some(left) = &mut self.steps_left {
            if *left == 0 {
                return false;
            }
            *left -= 1;
        }
        !(check_clock && self.deadline.is_some_and(|d| Instant::now() >= d))
    }
}

#[derive(Clone, Copy, Debug)]
enum Reason {
    Decision,
    Clause(usize),
    AtMost(usize),
}

struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

/// `sum of weights of true literals <= bound`.
struct AtMost {
    lits: Vec<(Lit, u64)>,
    bound: u64,
    sum: u64,
}

enum Conflict {
    Clause(usize),
    AtMost(usize),
}

const UNASSIGNED: i8 = 0;

pub(crate) struct Solver {
    values: Vec<i8>,
    level: Vec<usize>,
    reason: Vec<Reason>,
    trail_pos: Vec<usize>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    clauses: Vec<ClauseData>,
    watches: Vec<Vec<usize>>,
    at_most: Vec<AtMost>,
    at_most_occ: Vec<Vec<(usize, u64)>>,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    model: Vec<bool>,
    unsat: bool,
    learnt_count: usize,
    max_learnts: f64,
}

impl Solver {
    pub fn new() -> Self {
        Self {
            values: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail_pos: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            clauses: Vec::new(),
            watches: Vec::new(),
            at_most: Vec::new(),
            at_most_occ: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            clause_inc: 1.0,
            heap: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            model: Vec::new(),
            unsat: false,
            learnt_count: 0,
            max_learnts: 0.0,
        }
    }

    pub fn new_var(&mut self) -> usize {
        let v = self.values.len();
        self.values.push(UNASSIGNED);
        self.level.push(0);
        self.reason.push(Reason::Decision);
        self.trail_pos.push(0);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.at_most_occ.push(Vec::new());
        self.at_most_occ.push(Vec::new());
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.heap.insert(v, &self.activity);
        v
    }

    pub fn set_phase(&mut self, var: usize, positive: bool) {
        self.phase[var] = positive;
    }

    /// Value of a variable in the last model found.
    pub fn model_value(&self, var: usize) -> bool {
        self.model[var]
    }

    fn lit_value(&self, lit: Lit) -> i8 {
        let v = self.values[lit.var()];
        if lit.is_positive() {
            v
        } else {
            -v
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Adds a clause; false once the formula is known unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if self.unsat {
            return false;
        }
        self.cancel_until(0);
        let mut clause: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            match self.lit_value(l) {
                1 => return true,
                -1 => {}
                _ => {
                    if clause.contains(&!l) {
                        return true;
                    }
                    if !clause.contains(&l) {
                        clause.push(l);
                    }
                }
            }
        }
        match clause.len() {
            0 => {
                self.unsat = true;
                false
            }
            1 => {
                self.enqueue(clause[0], Reason::Decision);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
                !self.unsat
            }
            _ => {
                self.attach(clause, false);
                true
            }
        }
    }

    /// Adds `sum of weights of true literals <= bound`.
    pub fn add_at_most(&mut self, lits: &[(Lit, u64)], bound: u64) -> bool {
        if self.unsat {
            return false;
        }
        self.cancel_until(0);
        let mut kept: Vec<(Lit, u64)> = lits.iter().copied().filter(|&(_, w)| w > 0).collect();
        kept.sort_by_key(|k| std::cmp::Reverse(k.1));
        let sum = kept
            .iter()
            .filter(|&&(l, _)| self.lit_value(l) == 1)
            .map(|&(_, w)| w)
            .sum::<u64>();
        if sum > bound {
            self.unsat = true;
            return false;
        }
        let idx = self.at_most.len();
        for &(l, w) in &kept {
            self.at_most_occ[l.index()].push((idx, w));
        }
        self.at_most.push(AtMost {
            lits: kept,
            bound,
            sum,
        });
        if self.propagate_at_most(idx).is_some() || self.propagate().is_some() {
            self.unsat = true;
        }
        !self.unsat
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> usize {
        let idx = self.clauses.len();
        self.watches[lits[0].index()].push(idx);
        self.watches[lits[1].index()].push(idx);
        self.clauses.push(ClauseData {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        if learnt {
            self.learnt_count += 1;
        }
        idx
    }

    fn enqueue(&mut self, lit: Lit, reason: Reason) {
        let v = lit.var();
        self.values[v] = if lit.is_positive() { 1 } else { -1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len();
        self.trail.push(lit);
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level];
        for i in (start..self.trail.len()).rev() {
            let lit = self.trail[i];
            if i < self.qhead {
                for &(c, w) in &self.at_most_occ[lit.index()] {
                    self.at_most[c].sum -= w;
                }
            }
            let v = lit.var();
            self.phase[v] = lit.is_positive();
            self.values[v] = UNASSIGNED;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level);
        self.qhead = self.qhead.min(start);
    }

    fn propagate_at_most(&mut self, c: usize) -> Option<Conflict> {
        let con = &self.at_most[c];
        if con.sum > con.bound {
            return Some(Conflict::AtMost(c));
        }
        let slack = con.bound - con.sum;
        let mut forced = Vec::new();
        for &(l, w) in &con.lits {
            if w <= slack {
                break;
            }
            if self.lit_value(l) == UNASSIGNED {
                forced.push(!l);
            }
        }
        for l in forced {
            if self.lit_value(l) == UNASSIGNED {
                self.enqueue(l, Reason::AtMost(c));
            }
        }
        None
    }

    fn propagate(&mut self) -> Option<Conflict> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;

            let occ = std::mem::take(&mut self.at_most_occ[p.index()]);
            for &(c, w) in &occ {
                self.at_most[c].sum += w;
            }
            let mut conflict = None;
            for &(c, _) in &occ {
                conflict = self.propagate_at_most(c);
                if conflict.is_some() {
                    break;
                }
            }
            self.at_most_occ[p.index()] = occ;
            if conflict.is_some() {
                return conflict;
            }

            let false_lit = !p;
            let watching = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut kept = Vec::with_capacity(watching.len());
            let mut i = 0;
            while i < watching.len() {
                let cref = watching[i];
                i += 1;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if self.lit_value(first) == 1 {
                    kept.push(cref);
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let cand = self.clauses[cref].lits[k];
                    if self.lit_value(cand) != -1 {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[cand.index()].push(cref);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                kept.push(cref);
                if self.lit_value(first) == -1 {
                    kept.extend_from_slice(&watching[i..]);
                    self.watches[false_lit.index()] = kept;
                    return Some(Conflict::Clause(cref));
                }
                self.enqueue(first, Reason::Clause(cref));
            }
            self.watches[false_lit.index()] = kept;
        }
        None
    }

    /// Literals of the reason for `lit`, all false except `lit` itself.
    fn reason_lits(&self, lit: Lit) -> Vec<Lit> {
        match self.reason[lit.var()] {
            Reason::Decision => vec![lit],
            Reason::Clause(c) => self.clauses[c].lits.clone(),
            Reason::AtMost(c) => {
                let pos = self.trail_pos[lit.var()];
                let mut out = vec![lit];
                for &(l, _) in &self.at_most[c].lits {
                    if self.lit_value(l) == 1 && self.trail_pos[l.var()] < pos {
                        out.push(!l);
                    }
                }
                out
            }
        }
    }

    fn conflict_lits(&self, conflict: &Conflict) -> Vec<Lit> {
        match *conflict {
            Conflict::Clause(c) => self.clauses[c].lits.clone(),
            Conflict::AtMost(c) => self.at_most[c]
                .lits
                .iter()
                .filter(|&&(l, _)| self.lit_value(l) == 1)
                .map(|&(l, _)| !l)
                .collect(),
        }
    }

    fn analyze(&mut self, conflict: Conflict) -> (Vec<Lit>, usize) {
        if let Conflict::Clause(c) = conflict {
            self.bump_clause(c);
        }
        let current = self.decision_level();
        let mut learnt = vec![Lit(0)];
        let mut pending = 0usize;
        let mut lits = self.conflict_lits(&conflict);
        let mut skip: Option<usize> = None;
        let mut index = self.trail.len();
        let implied = loop {
            for &q in &lits {
                let v = q.var();
                if Some(v) == skip || self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                self.bump_var(v);
                if self.level[v] >= current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let p = self.trail[index];
            self.seen[p.var()] = false;
            pending -= 1;
            if pending == 0 {
                break p;
            }
            if let Reason::Clause(c) = self.reason[p.var()] {
                self.bump_clause(c);
            }
            lits = self.reason_lits(p);
            skip = Some(p.var());
        };
        learnt[0] = !implied;

        // Drop literals implied by the rest of the clause.
        let marked: Vec<usize> = learnt[1..].iter().map(|l| l.var()).collect();
        let mut keep = vec![learnt[0]];
        for &l in &learnt[1..] {
            let v = l.var();
            let redundant = !matches!(self.reason[v], Reason::Decision)
                && self
                    .reason_lits(!l)
                    .iter()
                    .filter(|q| q.var() != v)
                    .all(|q| self.seen[q.var()] || self.level[q.var()] == 0);
            if !redundant {
                keep.push(l);
            }
        }
        for v in marked {
            self.seen[v] = false;
        }
        let mut learnt = keep;

        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[best].var()] {
                    best = i;
                }
            }
            learnt.swap(1, best);
            back = self.level[learnt[1].var()];
        }
        (learnt, back)
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

    fn bump_clause(&mut self, c: usize) {
        if !self.clauses[c].learnt {
            return;
        }
        self.clauses[c].activity += self.clause_inc;
        if self.clauses[c].activity > 1e20 {
            for cl in self.clauses.iter_mut().filter(|cl| cl.learnt) {
                cl.activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    fn locked(&self, c: usize) -> bool {
        let first = self.clauses[c].lits[0];
        self.lit_value(first) == 1
            && matches!(self.reason[first.var()], Reason::Clause(r) if r == c)
    }

    fn reduce_learnts(&mut self) {
        let mut learnts: Vec<usize> = (0..self.clauses.len())
            .filter(|&c| {
                let cl = &self.clauses[c];
                cl.learnt && !cl.deleted && cl.lits.len() > 2 && !self.locked(c)
            })
            .collect();
        learnts.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for &c in &learnts[..learnts.len() / 2] {
            self.clauses[c].deleted = true;
            self.clauses[c].lits = Vec::new();
            self.learnt_count -= 1;
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.values[v] == UNASSIGNED {
                return Some(Lit::new(v, self.phase[v]));
            }
        }
        None
    }

    pub fn solve(&mut self, budget: &mut Budget) -> SatResult {
        if self.unsat {
            return SatResult::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.unsat = true;
            return SatResult::Unsat;
        }
        self.max_learnts = self
            .max_learnts
            .max(self.clauses.len() as f64 / 3.0 + 1000.0);
        let mut restart = 1u32;
        let mut restart_left = luby(restart) * 100;
        let mut conflicts = 0u64;
        let mut decisions = 0u64;
        loop {
            if let Some(conflict) = self.propagate() {
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return SatResult::Unsat;
                }
                let (learnt, back) = self.analyze(conflict);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], Reason::Decision);
                } else {
                    let first = learnt[0];
                    let c = self.attach(learnt, true);
                    self.bump_clause(c);
                    self.enqueue(first, Reason::Clause(c));
                }
                self.var_inc /= 0.95;
                self.clause_inc /= 0.999;
                if !budget.charge(conflicts.is_multiple_of(32)) {
                    self.cancel_until(0);
                    return SatResult::Unknown;
                }
                restart_left = restart_left.saturating_sub(1);
                if restart_left == 0 {
                    restart += 1;
                    restart_left = luby(restart) * 100;
                    self.cancel_until(0);
                }
            } else {
                if self.learnt_count as f64 > self.max_learnts {
                    self.reduce_learnts();
                    self.max_learnts *= 1.1;
                }
                match self.pick_branch() {
                    Some(lit) => {
                        decisions += 1;
                        if decisions.is_multiple_of(1024)
                            && budget.deadline.is_some_and(|d| Instant::now() >= d)
                        {
                            self.cancel_until(0);
                            return SatResult::Unknown;
                        }
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(lit, Reason::Decision);
                    }
                    None => {
                        self.model = self.values.iter().map(|&v| v == 1).collect();
                        self.cancel_until(0);
                        return SatResult::Sat;
                    }
                }
            }
        }
    }
}

/// Element `i` (1-based) of 1, 1, 2, 1, 1, 2, 4, ...
fn luby(i: u32) -> u64 {
    let mut x = u64::from(i) - 1;
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

/// Max-heap of variables by activity.
#[derive(Default)]
struct VarHeap {
    heap: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl VarHeap {
    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.position.len() <= v {
            self.position.resize(v + 1, None);
        }
        if self.position[v].is_some() {
            return;
        }
        self.position[v] = Some(self.heap.len());
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if let Some(Some(pos)) = self.position.get(v).copied() {
            self.sift_up(pos, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("nonempty");
        self.position[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut pos: usize, act: &[f64]) {
        let v = self.heap[pos];
        while pos > 0 {
            let parent = (pos - 1) / 2;
            let pv = self.heap[parent];
            if act[pv] >= act[v] {
                break;
            }
            self.heap[pos] = pv;
            self.position[pv] = Some(pos);
            pos = parent;
        }
        self.heap[pos] = v;
        self.position[v] = Some(pos);
    }

    fn sift_down(&mut self, mut pos: usize, act: &[f64]) {
        let v = self.heap[pos];
        loop {
            let left = 2 * pos + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && act[self.heap[right]] > act[self.heap[left]] {
                right
            } else {
                left
            };
            let cv = self.heap[child];
            if act[cv] <= act[v] {
                break;
            }
            self.heap[pos] = cv;
            self.position[cv] = Some(pos);
            pos = child;
        }
        self.heap[pos] = v;
        self.position[v] = Some(pos);
    }
}
