//! The k-sparse random removal process.
//!
//! State: the available triples `A(i)`, the chosen triples `C(i)` with pair
//! and vertex indices, and the uncovered pairs. Each step picks a uniformly
//! random available triple `T*`, moves it to the chosen set, and removes
//! from `A` every triple `T` for which `{T, T*}` plus some chosen triples
//! form an Erdős configuration on at most `k + 2` points.

mod brute;
mod dense;

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use brute::{brute_excluded_by, BRUTE_MAX_N};
pub(crate) use dense::DenseSet;

use crate::configs::ErdosCatalog;
use crate::embed::{Host, Plan};
use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, Rng};
use crate::triple::{binom, pair_rank, sort3, Pair, Triple, TripleSystem};

/// Largest `n` whose triple ranks fit the dense 32-bit store.
pub const MAX_N: usize = 2344;

const NO_BLOCK: u32 = u32::MAX;

/// Outcome of one step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    /// Index of the step (the value of `i` before it).
    pub i: usize,
    pub selected: Triple,
    /// Triples removed besides the selected one, sorted.
    pub excluded: Vec<Triple>,
    pub available_after: usize,
}

impl StepReport {
    /// `i selected=a,b,c excluded_count=m`
    pub fn journal_line(&self) -> String {
        format!("{} selected={} excluded_count={}", self.i, self.selected, self.excluded.len())
    }
}

/// When [`ProcessState::run`] stops besides exhaustion.
#[derive(Clone, Debug, Default)]
pub struct StopCondition {
    pub max_steps: Option<usize>,
    /// Stop once this many triples are chosen.
    pub target_chosen: Option<usize>,
    pub wall_clock: Option<Duration>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Exhausted,
    StepBudget,
    TargetReached,
    WallClock,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    /// Number of steps taken, which equals the number of chosen triples.
    pub steps: usize,
    pub available_left: usize,
    pub uncovered_pairs: usize,
    pub stop_reason: StopReason,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub struct ProcessState {
    n: usize,
    k: usize,
    jmax: usize,
    i: usize,
    seed: u64,
    avail: DenseSet,
    uncovered: DenseSet,
    pair_block: Vec<u32>,
    vertex_blocks: Vec<Vec<Triple>>,
    chosen: Vec<Triple>,
    rng: Rng,
    catalog: Arc<ErdosCatalog>,
    debug_checks: bool,
    scratch: Vec<Triple>,
}

impl Host for ProcessState {
    fn n(&self) -> u32 {
        self.n as u32
    }

    #[inline]
    fn chosen_on_pair(&self, a: u32, b: u32) -> Option<Triple> {
        let idx = self.pair_block[pair_rank(a, b)];
        (idx != NO_BLOCK).then(|| self.chosen[idx as usize])
    }

    fn chosen_at(&self, v: u32) -> &[Triple] {
        &self.vertex_blocks[v as usize]
    }

    #[inline]
    fn is_available(&self, t: Triple) -> bool {
        self.avail.contains(t.rank())
    }
}

impl ProcessState {
    /// All `C(n,3)` triples available, nothing chosen.
    pub fn new(n: usize, k: usize, seed: u64, catalog: Arc<ErdosCatalog>) -> Result<ProcessState> {
        if n < 6 {
            return Err(invalid(format!("n must be at least 6, got {n}")));
        }
        if n > MAX_N {
            return Err(invalid(format!("n must be at most {MAX_N}, got {n}")));
        }
        if k < 2 {
            return Err(invalid(format!("k must be at least 2, got {k}")));
        }
        if k + 2 > catalog.jmax() {
            return Err(invalid(format!(
                "k={k} needs a catalog up to j={}, have j_max={}",
                k + 2,
                catalog.jmax()
            )));
        }
        let triples = binom(n as u64, 3) as usize;
        let pairs = binom(n as u64, 2) as usize;
        Ok(ProcessState {
            n,
            k,
            jmax: k + 2,
            i: 0,
            seed,
            avail: DenseSet::full(triples),
            uncovered: DenseSet::full(pairs),
            pair_block: vec![NO_BLOCK; pairs],
            vertex_blocks: vec![Vec::new(); n],
            chosen: Vec::new(),
            rng: rng_from_seed(seed),
            catalog,
            debug_checks: false,
            scratch: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn jmax(&self) -> usize {
        self.jmax
    }

    /// Steps taken so far.
    pub fn i(&self) -> usize {
        self.i
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn catalog(&self) -> &Arc<ErdosCatalog> {
        &self.catalog
    }

    /// Re-check every state invariant after each step (slow; for tests).
    pub fn set_debug_checks(&mut self, on: bool) {
        self.debug_checks = on;
    }

    pub fn available_count(&self) -> usize {
        self.avail.len()
    }

    pub fn is_available(&self, t: Triple) -> bool {
        (t.c() as usize) < self.n && self.avail.contains(t.rank())
    }

    pub fn is_chosen(&self, t: Triple) -> bool {
        (t.c() as usize) < self.n && Host::is_chosen(self, t)
    }

    /// Available triples in storage order.
    pub fn available(&self) -> impl Iterator<Item = Triple> + '_ {
        self.avail.iter().map(Triple::unrank)
    }

    /// The `idx`-th available triple in storage order.
    pub fn available_at(&self, idx: usize) -> Triple {
        Triple::unrank(self.avail.get(idx))
    }

    /// Chosen triples in selection order.
    pub fn chosen(&self) -> &[Triple] {
        &self.chosen
    }

    pub fn chosen_system(&self) -> TripleSystem {
        TripleSystem::from_blocks(self.n, self.chosen.iter().copied()).expect("chosen triples are in range")
    }

    pub fn chosen_at(&self, v: u32) -> &[Triple] {
        &self.vertex_blocks[v as usize]
    }

    pub fn chosen_on_pair(&self, e: Pair) -> Option<Triple> {
        Host::chosen_on_pair(self, e.a(), e.b())
    }

    pub fn is_uncovered(&self, e: Pair) -> bool {
        self.uncovered.contains(e.rank())
    }

    pub fn uncovered_count(&self) -> usize {
        self.uncovered.len()
    }

    pub fn uncovered(&self) -> impl Iterator<Item = Pair> + '_ {
        self.uncovered.iter().map(Pair::unrank)
    }

    pub fn uncovered_at(&self, idx: usize) -> Pair {
        Pair::unrank(self.uncovered.get(idx))
    }

    fn non_diamond_plans(&self) -> impl Iterator<Item = &Plan> {
        let jmax = self.jmax;
        self.catalog
            .entries()
            .iter()
            .filter(move |e| e.j() >= 5 && e.j() <= jmax)
            .flat_map(|e| e.exclusion_plans().iter())
    }

    /// Appends every available `T != root` with `T ↔ root` to `out`, possibly
    /// with repetitions. `root` itself need not be available.
    fn collect_partners(&self, root: Triple, out: &mut Vec<Triple>) {
        for plan in self.non_diamond_plans() {
            let free = plan.available_slot().expect("exclusion plans have an available slot");
            plan.for_each(self, root, &mut |map| out.push(Plan::image(map, free)));
        }
        for e in root.pairs() {
            let third = root.third(e).unwrap();
            for w in 0..self.n as u32 {
                if w == e.a() || w == e.b() || w == third {
                    continue;
                }
                let t = Triple::from_sorted(sort3(e.a(), e.b(), w));
                if self.avail.contains(t.rank()) {
                    out.push(t);
                }
            }
        }
    }

    fn partner_set(&self, t: Triple) -> Vec<Triple> {
        let mut out = Vec::new();
        self.collect_partners(t, &mut out);
        out.retain(|&x| x != t && self.avail.contains(x.rank()));
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The set `A'` a selection of `t_star` would remove (besides `t_star`).
    pub fn excluded_by(&self, t_star: Triple) -> Result<Vec<Triple>> {
        if !self.is_available(t_star) {
            return Err(Error::NotAvailable(t_star));
        }
        Ok(self.partner_set(t_star))
    }

    /// All available `T*` that exclude `t`, i.e. the threat set of `t`.
    pub fn threats_of(&self, t: Triple) -> Result<Vec<Triple>> {
        if !self.is_available(t) {
            return Err(Error::NotAvailable(t));
        }
        Ok(self.partner_set(t))
    }

    /// Samples the next selection uniformly from the available triples
    /// without applying it.
    pub fn sample_selection(&mut self) -> Option<Triple> {
        if self.avail.is_empty() {
            return None;
        }
        let idx = self.rng.gen_range(0..self.avail.len());
        Some(Triple::unrank(self.avail.get(idx)))
    }

    /// One step of the process with a uniformly random selection.
    pub fn step(&mut self) -> Result<StepReport> {
        let t = self.sample_selection().ok_or(Error::Exhausted(self.i))?;
        self.step_with(t)
    }

    /// One step with a prescribed selection, which must be available.
    pub fn step_with(&mut self, t_star: Triple) -> Result<StepReport> {
        if !self.is_available(t_star) {
            return Err(Error::NotAvailable(t_star));
        }
        self.avail.remove(t_star.rank());
        let mut cand = std::mem::take(&mut self.scratch);
        cand.clear();
        self.collect_partners(t_star, &mut cand);
        // Removing on first sight deduplicates repeated discoveries.
        let mut excluded: Vec<Triple> = Vec::new();
        for &t in &cand {
            if self.avail.remove(t.rank()) {
                excluded.push(t);
            }
        }
        self.scratch = cand;
        excluded.sort_unstable();

        let idx = self.chosen.len() as u32;
        for e in t_star.pairs() {
            debug_assert_eq!(self.pair_block[e.rank()], NO_BLOCK);
            self.pair_block[e.rank()] = idx;
            self.uncovered.remove(e.rank());
        }
        for v in t_star.vertices() {
            self.vertex_blocks[v as usize].push(t_star);
        }
        self.chosen.push(t_star);
        let report = StepReport {
            i: self.i,
            selected: t_star,
            excluded,
            available_after: self.avail.len(),
        };
        self.i += 1;
        if self.debug_checks {
            if let Err(msg) = self.check_invariants() {
                panic!("invariant violated after step {}: {msg}", report.i);
            }
        }
        Ok(report)
    }

    /// Runs until the available set empties or `stop` fires.
    pub fn run(&mut self, stop: &StopCondition) -> Result<(TripleSystem, RunSummary)> {
        self.run_observed(stop, &mut |_, _| {})
    }

    /// As [`run`](Self::run), calling `observe` after every step.
    pub fn run_observed(
        &mut self,
        stop: &StopCondition,
        observe: &mut dyn FnMut(&ProcessState, &StepReport),
    ) -> Result<(TripleSystem, RunSummary)> {
        let start = Instant::now();
        let reason = loop {
            if self.avail.is_empty() {
                break StopReason::Exhausted;
            }
            if stop.target_chosen.is_some_and(|t| self.i >= t) {
                break StopReason::TargetReached;
            }
            if stop.max_steps.is_some_and(|m| self.i >= m) {
                break StopReason::StepBudget;
            }
            if stop.wall_clock.is_some_and(|w| start.elapsed() >= w) {
                break StopReason::WallClock;
            }
            let report = self.step()?;
            observe(self, &report);
        };
        let summary = RunSummary {
            n: self.n,
            k: self.k,
            seed: self.seed,
            steps: self.i,
            available_left: self.avail.len(),
            uncovered_pairs: self.uncovered.len(),
            stop_reason: reason,
            elapsed: start.elapsed(),
        };
        Ok((self.chosen_system(), summary))
    }

    /// Checks the state invariants; O(C(n,3)).
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.chosen.len() != self.i {
            return Err(format!("|chosen| = {} but i = {}", self.chosen.len(), self.i));
        }
        let pairs = binom(self.n as u64, 2) as usize;
        if self.uncovered.len() != pairs - 3 * self.i {
            return Err(format!("|uncovered| = {} but C(n,2) - 3i = {}", self.uncovered.len(), pairs - 3 * self.i));
        }
        let mut covered = 0usize;
        for (r, &idx) in self.pair_block.iter().enumerate() {
            let is_cov = idx != NO_BLOCK;
            if is_cov == self.uncovered.contains(r) {
                return Err(format!("pair {:?} coverage index disagrees", Pair::unrank(r)));
            }
            if is_cov {
                covered += 1;
                if !self.chosen[idx as usize].contains_pair(Pair::unrank(r)) {
                    return Err(format!("pair index points to the wrong block for {:?}", Pair::unrank(r)));
                }
            }
        }
        if covered != 3 * self.i {
            return Err("a pair is covered twice".into());
        }
        for &t in &self.chosen {
            if self.avail.contains(t.rank()) {
                return Err(format!("{t:?} is both chosen and available"));
            }
        }
        for r in self.avail.iter() {
            let t = Triple::unrank(r);
            if t.pairs().iter().any(|e| !self.uncovered.contains(e.rank())) {
                return Err(format!("available {t:?} contains a covered pair"));
            }
        }
        for v in 0..self.n {
            let deg = self.chosen.iter().filter(|t| t.contains(v as u32)).count();
            if deg != self.vertex_blocks[v].len() {
                return Err(format!("vertex index of {v} is stale"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs::enumerate_erdos;

    fn catalog() -> Arc<ErdosCatalog> {
        Arc::new(enumerate_erdos(8).unwrap())
    }

    #[test]
    fn init_counts() {
        let s = ProcessState::new(6, 4, 1, catalog()).unwrap();
        assert_eq!(s.available_count(), 20);
        assert_eq!(s.uncovered_count(), 15);
        assert!(ProcessState::new(5, 4, 1, catalog()).is_err());
        assert!(ProcessState::new(10, 7, 1, catalog()).is_err());
        assert!(ProcessState::new(10, 1, 1, catalog()).is_err());
    }

    #[test]
    fn first_step_removes_diamonds_only() {
        let mut s = ProcessState::new(6, 4, 3, catalog()).unwrap();
        let t = s.sample_selection().unwrap();
        assert_eq!(s.excluded_by(t).unwrap().len(), 3 * 3);
        let r = s.step_with(t).unwrap();
        assert_eq!(r.available_after, 10);
        assert_eq!(r.excluded.len(), 9);
        assert!(!r.excluded.contains(&t));
    }

    #[test]
    fn planted_pasch_excludes_fourth_block() {
        let mut s = ProcessState::new(9, 4, 0, catalog()).unwrap();
        s.step_with(Triple::new(0, 3, 4)).unwrap();
        s.step_with(Triple::new(1, 3, 5)).unwrap();
        let ex = s.excluded_by(Triple::new(0, 1, 2)).unwrap();
        assert!(ex.contains(&Triple::new(2, 4, 5)));
        assert_eq!(ex, brute_excluded_by(&s, Triple::new(0, 1, 2)).unwrap());
    }

    #[test]
    fn runs_are_deterministic() {
        let run = |seed| {
            let mut s = ProcessState::new(15, 4, seed, catalog()).unwrap();
            let mut reports = Vec::new();
            s.run_observed(&StopCondition::default(), &mut |_, r| reports.push(r.clone())).unwrap();
            reports
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn debug_checks_hold_through_a_run() {
        let mut s = ProcessState::new(12, 6, 11, catalog()).unwrap();
        s.set_debug_checks(true);
        let (sys, summary) = s.run(&StopCondition::default()).unwrap();
        assert_eq!(summary.stop_reason, StopReason::Exhausted);
        assert_eq!(sys.len(), summary.steps);
        assert!(matches!(s.step(), Err(Error::Exhausted(_))));
    }

    #[test]
    fn stop_conditions() {
        let mut s = ProcessState::new(20, 4, 2, catalog()).unwrap();
        let (_, sum) = s
            .run(&StopCondition {
                max_steps: Some(7),
                ..Default::default()
            })
            .unwrap();
        assert_eq!((sum.steps, sum.stop_reason), (7, StopReason::StepBudget));
        let (_, sum) = s
            .run(&StopCondition {
                target_chosen: Some(10),
                ..Default::default()
            })
            .unwrap();
        assert_eq!((sum.steps, sum.stop_reason), (10, StopReason::TargetReached));
    }

    #[test]
    fn journal_format() {
        let r = StepReport {
            i: 3,
            selected: Triple::new(1, 2, 7),
            excluded: vec![Triple::new(1, 2, 3)],
            available_after: 5,
        };
        assert_eq!(r.journal_line(), "3 selected=1,2,7 excluded_count=1");
    }
}
