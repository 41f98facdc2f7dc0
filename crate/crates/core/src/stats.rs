//! Counting the tracked random variables of the process and comparing them
//! with their trajectories.
//!
//! `X_e` is the number of available triples on an uncovered pair `e`.
//! `X_{T,j,c}` is the number of Erdős configurations on `j` points through an
//! available triple `T` whose other blocks are `c` chosen and `j-3-c`
//! available triples. Configurations with `c = j-4` are dangerous: one step
//! from excluding `T`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::configs::ErdosCatalog;
use crate::embed::{Plan, SlotStatus};
use crate::error::{invalid, Error, Result};
use crate::process::ProcessState;
use crate::rng::{side_stream, Rng};
use crate::trajectory::TrajectoryParams;
use crate::triple::{binom, sort3, Pair, Triple};

/// `X_e`: available triples containing `e`, or `None` when `e` is covered.
pub fn count_x_e(state: &ProcessState, e: Pair) -> Option<usize> {
    if !state.is_uncovered(e) {
        return None;
    }
    let (a, b) = (e.a(), e.b());
    let count = (0..state.n() as u32)
        .filter(|&w| w != a && w != b && state.is_available(Triple::from_sorted(sort3(a, b, w))))
        .count();
    Some(count)
}

/// All status splits with a given number of chosen slots for one
/// configuration and root orbit. Automorphisms fixing the root permute the
/// splits, so only the group total is a multiple of the stabilizer.
struct RootedPlans {
    plans: Vec<Plan>,
    /// Automorphisms fixing the root slot.
    stabilizer: u64,
}

/// Rooted embedding plans for every catalog configuration and status split,
/// grouped by `(j, c)`. Building it is cheap; reuse it across counts.
pub struct ConfigCounter {
    jmax: usize,
    plans: BTreeMap<(usize, usize), Vec<RootedPlans>>,
}

impl ConfigCounter {
    pub fn new(catalog: &ErdosCatalog) -> ConfigCounter {
        let mut plans: BTreeMap<(usize, usize), Vec<RootedPlans>> = BTreeMap::new();
        for e in catalog.entries() {
            let slots: Vec<[u8; 3]> = e
                .blocks()
                .iter()
                .map(|t| t.vertices().map(|v| v as u8))
                .collect();
            let b = slots.len();
            for orbit in e.slot_orbits() {
                let root = orbit[0];
                let stabilizer = (e.automorphism_count() / orbit.len()) as u64;
                let others: Vec<usize> = (0..b).filter(|&s| s != root).collect();
                let mut groups: Vec<Vec<Plan>> = vec![Vec::new(); others.len() + 1];
                for mask in 0u32..(1 << others.len()) {
                    let mut status = vec![SlotStatus::Available; b];
                    for (bit, &s) in others.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            status[s] = SlotStatus::Chosen;
                        }
                    }
                    groups[mask.count_ones() as usize].push(Plan::build(e.j(), &slots, root, &status));
                }
                for (c, group) in groups.into_iter().enumerate() {
                    plans.entry((e.j(), c)).or_default().push(RootedPlans { plans: group, stabilizer });
                }
            }
        }
        ConfigCounter {
            jmax: catalog.jmax(),
            plans,
        }
    }

    pub fn jmax(&self) -> usize {
        self.jmax
    }

    fn check(&self, state: &ProcessState, t: Triple, j: usize, c: usize) -> Result<()> {
        if !state.is_available(t) {
            return Err(Error::NotAvailable(t));
        }
        if j < 4 || j > state.jmax().min(self.jmax) || c + 4 > j {
            return Err(invalid(format!("need 4 <= j <= {} and c <= j - 4, got j={j} c={c}", state.jmax())));
        }
        Ok(())
    }

    /// `X_{T,j,c}`. Accepts `j = 4` (diamonds, `c = 0`) besides `6..=jmax`;
    /// `j = 5` is always zero.
    pub fn count(&self, state: &ProcessState, t: Triple, j: usize, c: usize) -> Result<u64> {
        self.check(state, t, j, c)?;
        let mut total = 0u64;
        for rp in self.plans.get(&(j, c)).into_iter().flatten() {
            let mut found = 0u64;
            for plan in &rp.plans {
                plan.for_each(state, t, &mut |_| found += 1);
            }
            debug_assert_eq!(found % rp.stabilizer, 0, "j={j} c={c} stab={} found={found}", rp.stabilizer);
            total += found / rp.stabilizer;
        }
        Ok(total)
    }

    /// Configurations counted by [`ConfigCounter::count`], each listed once
    /// as a sorted block list including `t`.
    pub fn configurations(&self, state: &ProcessState, t: Triple, j: usize, c: usize) -> Result<Vec<Vec<Triple>>> {
        self.check(state, t, j, c)?;
        let mut seen: Vec<Vec<Triple>> = Vec::new();
        for plan in self.plans.get(&(j, c)).into_iter().flatten().flat_map(|rp| &rp.plans) {
            plan.for_each(state, t, &mut |map| {
                let mut blocks = plan_blocks(plan, map);
                blocks.sort_unstable();
                if !seen.contains(&blocks) {
                    seen.push(blocks);
                }
            });
        }
        Ok(seen)
    }

    /// Dangerous configurations through `t` on `4..=jmax` points, diamonds
    /// included, each listed once.
    pub fn dangerous(&self, state: &ProcessState, t: Triple) -> Result<Vec<Dangerous>> {
        if !state.is_available(t) {
            return Err(Error::NotAvailable(t));
        }
        let mut out = Vec::new();
        for j in (4..=state.jmax().min(self.jmax)).filter(|&j| j != 5) {
            for blocks in self.configurations(state, t, j, j - 4)? {
                let available = *blocks
                    .iter()
                    .find(|&&b| b != t && state.is_available(b))
                    .expect("dangerous configurations keep one open block");
                out.push(Dangerous { j, available, blocks });
            }
        }
        Ok(out)
    }
}

fn plan_blocks(plan: &Plan, map: &[u32]) -> Vec<Triple> {
    std::iter::once(plan.root)
        .chain(plan.steps.iter().map(|s| s.verts))
        .map(|v| Plan::image(map, v))
        .collect()
}

/// A dangerous configuration: all blocks but `t` and `available` chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dangerous {
    pub j: usize,
    pub available: Triple,
    /// All blocks, sorted, including the root triple.
    pub blocks: Vec<Triple>,
}

/// Which uncovered pairs to follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeSample {
    /// Every pair; covered pairs are censored and not replaced.
    All,
    /// This many uniformly chosen uncovered pairs, replaced on coverage.
    Random(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackerSpec {
    pub edge_sample: EdgeSample,
    /// Number of tracked available triples, replaced when they leave the
    /// available set.
    pub triple_sample: usize,
    /// `(j, c)` classes counted for each tracked triple.
    pub triple_classes: Vec<(usize, usize)>,
    /// Ascending step indices at which to take snapshots.
    pub checkpoints: Vec<u64>,
    /// Also record `X_{T,double}` for tracked triples (diagnostic only).
    pub record_extensions: bool,
}

impl TrackerSpec {
    /// 200 pairs and 50 triples with the dangerous classes, at
    /// `0, tau/4, tau/2, 3tau/4`.
    pub fn default_for(params: &TrajectoryParams) -> TrackerSpec {
        let tau = params.tau_cut();
        TrackerSpec {
            edge_sample: EdgeSample::Random(200),
            triple_sample: 50,
            triple_classes: dangerous_classes(params.jmax),
            checkpoints: vec![0, tau / 4, tau / 2, 3 * tau / 4],
            record_extensions: false,
        }
    }

    fn validate(&self, params: &TrajectoryParams) -> Result<()> {
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("checkpoints must be strictly ascending"));
        }
        if let Some(&last) = self.checkpoints.last() {
            if last > params.tau_cut() {
                return Err(invalid(format!("checkpoint {last} beyond tau_cut = {}", params.tau_cut())));
            }
        }
        for &(j, c) in &self.triple_classes {
            if !(6..=params.jmax).contains(&j) || c + 4 > j {
                return Err(invalid(format!("tracked class j={j} c={c} out of range")));
            }
        }
        Ok(())
    }
}

/// `(j, j-4)` for `6 <= j <= jmax`.
pub fn dangerous_classes(jmax: usize) -> Vec<(usize, usize)> {
    (6..=jmax).map(|j| (j, j - 4)).collect()
}

/// One tracked quantity at one checkpoint. `x = None` marks a censored
/// tracker (its pair got covered or its triple left the available set).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reading {
    pub label: String,
    pub x: Option<u64>,
    pub f: f64,
    pub band: f64,
}

impl Reading {
    /// `|X - f| <= band`; `None` when censored.
    pub fn in_band(&self) -> Option<bool> {
        self.x.map(|x| (x as f64 - self.f).abs() <= self.band)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub i: u64,
    pub avail: u64,
    pub avail_traj: f64,
    pub avail_band: f64,
    pub readings: Vec<Reading>,
}

impl Snapshot {
    pub fn avail_in_band(&self) -> bool {
        (self.avail as f64 - self.avail_traj).abs() <= self.avail_band
    }

    /// In-band fraction among uncensored readings whose label starts with
    /// `prefix` (`"e"` for pairs, `"t"` for triples); `None` if all are
    /// censored.
    pub fn in_band_fraction(&self, prefix: &str) -> Option<f64> {
        let verdicts: Vec<bool> = self
            .readings
            .iter()
            .filter(|r| r.label.starts_with(prefix))
            .filter_map(Reading::in_band)
            .collect();
        if verdicts.is_empty() {
            return None;
        }
        Some(verdicts.iter().filter(|&&b| b).count() as f64 / verdicts.len() as f64)
    }

    pub fn out_of_band(&self) -> Vec<&Reading> {
        self.readings.iter().filter(|r| r.in_band() == Some(false)).collect()
    }
}

/// A tracker that moved to a new target after its old one was censored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replacement {
    pub i: u64,
    pub slot: String,
    pub old: String,
    pub new: String,
}

/// Live trackers. Sampling uses its own random stream, so tracking never
/// changes the process.
pub struct Tracking {
    spec: TrackerSpec,
    params: TrajectoryParams,
    counter: ConfigCounter,
    rng: Rng,
    edges: Vec<Pair>,
    triples: Vec<Triple>,
    next_checkpoint: usize,
    pub replacements: Vec<Replacement>,
    /// `(i, T, X_{T,double})` when `record_extensions` is set.
    pub doubles: Vec<(u64, Triple, u64)>,
}

impl Tracking {
    /// Picks the initial targets from the state, which must be at step 0.
    pub fn new(state: &ProcessState, params: TrajectoryParams, spec: TrackerSpec) -> Result<Tracking> {
        spec.validate(&params)?;
        if params.n != state.n() || params.k != state.k() {
            return Err(invalid("trajectory parameters do not match the process"));
        }
        if state.i() != 0 {
            return Err(invalid("tracking must start at step 0"));
        }
        let mut rng = side_stream(state.seed(), 0x7472_6163_6b73);
        let pairs = state.uncovered_count();
        let edges: Vec<Pair> = match spec.edge_sample {
            EdgeSample::All => state.uncovered().collect(),
            EdgeSample::Random(m) => {
                let mut idx = sample(&mut rng, pairs, m.min(pairs)).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|x| state.uncovered_at(x)).collect()
            }
        };
        let count = spec.triple_sample.min(state.available_count());
        let mut idx = sample(&mut rng, state.available_count(), count).into_vec();
        idx.sort_unstable();
        let triples = idx.into_iter().map(|x| state.available_at(x)).collect();
        let counter = ConfigCounter::new(state.catalog());
        Ok(Tracking {
            spec,
            params,
            counter,
            rng,
            edges,
            triples,
            next_checkpoint: 0,
            replacements: Vec::new(),
            doubles: Vec::new(),
        })
    }

    pub fn spec(&self) -> &TrackerSpec {
        &self.spec
    }

    pub fn params(&self) -> &TrajectoryParams {
        &self.params
    }

    pub fn counter(&self) -> &ConfigCounter {
        &self.counter
    }

    /// The next checkpoint not yet taken.
    pub fn next_checkpoint(&self) -> Option<u64> {
        self.spec.checkpoints.get(self.next_checkpoint).copied()
    }

    /// Takes a snapshot if the state sits at the next checkpoint.
    pub fn observe(&mut self, state: &ProcessState) -> Result<Option<Snapshot>> {
        match self.next_checkpoint() {
            Some(c) if c == state.i() as u64 => {
                self.next_checkpoint += 1;
                self.checkpoint(state).map(Some)
            }
            _ => Ok(None),
        }
    }

    /// Snapshot at the current step, then replacement of censored targets.
    pub fn checkpoint(&mut self, state: &ProcessState) -> Result<Snapshot> {
        let i = state.i() as u64;
        let t = &self.params;
        let fi = i as f64;
        let n = t.n as f64;
        let eps = t.eps(fi);
        let mut readings = Vec::new();
        let f_edge = t.f_edge(fi);
        for (s, e) in self.edges.iter().enumerate() {
            readings.push(Reading {
                label: format!("e{s}"),
                x: count_x_e(state, *e).map(|x| x as u64),
                f: f_edge,
                band: eps * n,
            });
        }
        for (s, &tr) in self.triples.iter().enumerate() {
            let avail = state.is_available(tr);
            for &(j, c) in &self.spec.triple_classes {
                let x = if avail { Some(self.counter.count(state, tr, j, c)?) } else { None };
                readings.push(Reading {
                    label: format!("t{s}_j{j}c{c}"),
                    x,
                    f: t.f_jc(fi, j, c)?,
                    band: eps * n.powi((j - 3 - c) as i32),
                });
            }
            if avail && self.spec.record_extensions {
                let d = crate::extensions::count_double(state, &self.counter, tr)?;
                self.doubles.push((i, tr, d));
            }
        }
        let snap = Snapshot {
            i,
            avail: state.available_count() as u64,
            avail_traj: t.a_traj(fi),
            avail_band: eps * n * n * n,
            readings,
        };
        self.replace_censored(state);
        Ok(snap)
    }

    fn replace_censored(&mut self, state: &ProcessState) {
        let i = state.i() as u64;
        if let EdgeSample::Random(_) = self.spec.edge_sample {
            for s in 0..self.edges.len() {
                if state.is_uncovered(self.edges[s]) || state.uncovered_count() == 0 {
                    continue;
                }
                let fresh = loop {
                    let p = state.uncovered_at(self.rng.gen_range(0..state.uncovered_count()));
                    if !self.edges.contains(&p) || state.uncovered_count() <= self.edges.len() {
                        break p;
                    }
                };
                self.replacements.push(Replacement {
                    i,
                    slot: format!("e{s}"),
                    old: format!("{}-{}", self.edges[s].a(), self.edges[s].b()),
                    new: format!("{}-{}", fresh.a(), fresh.b()),
                });
                self.edges[s] = fresh;
            }
        }
        for s in 0..self.triples.len() {
            if state.is_available(self.triples[s]) || state.available_count() == 0 {
                continue;
            }
            let fresh = loop {
                let t = state.available_at(self.rng.gen_range(0..state.available_count()));
                if !self.triples.contains(&t) || state.available_count() <= self.triples.len() {
                    break t;
                }
            };
            self.replacements.push(Replacement {
                i,
                slot: format!("t{s}"),
                old: self.triples[s].to_string(),
                new: fresh.to_string(),
            });
            self.triples[s] = fresh;
        }
    }
}

const CSV_LEAD: [&str; 4] = ["i", "avail", "avail_traj", "avail_band"];

/// CSV with columns `i,avail,avail_traj,avail_band` and then
/// `<label>_X,<label>_f,<label>_band,<label>_in` per reading. A censored
/// reading has an empty `X` and `in = censored`.
pub fn export_series(snapshots: &[Snapshot]) -> Result<String> {
    let first = snapshots.first().ok_or_else(|| invalid("no snapshots to export"))?;
    let labels: Vec<&str> = first.readings.iter().map(|r| r.label.as_str()).collect();
    let mut header: Vec<String> = CSV_LEAD.iter().map(|s| s.to_string()).collect();
    for l in &labels {
        for suffix in ["X", "f", "band", "in"] {
            header.push(format!("{l}_{suffix}"));
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for s in snapshots {
        if s.readings.iter().map(|r| r.label.as_str()).ne(labels.iter().copied()) {
            return Err(invalid(format!("snapshot {} has different trackers", s.i)));
        }
        let mut cells = vec![s.i.to_string(), s.avail.to_string(), s.avail_traj.to_string(), s.avail_band.to_string()];
        for r in &s.readings {
            cells.push(r.x.map(|x| x.to_string()).unwrap_or_default());
            cells.push(r.f.to_string());
            cells.push(r.band.to_string());
            cells.push(match r.in_band() {
                Some(true) => "1".into(),
                Some(false) => "0".into(),
                None => "censored".into(),
            });
        }
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    Ok(out)
}

/// Inverse of [`export_series`]; checks every `in` cell against its values.
pub fn parse_series(text: &str) -> Result<Vec<Snapshot>> {
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty input".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 4 || cols[..4] != CSV_LEAD || (cols.len() - 4) % 4 != 0 {
        return Err(err(1, "unexpected header".into()));
    }
    let mut labels = Vec::new();
    for group in cols[4..].chunks(4) {
        let label = group[0]
            .strip_suffix("_X")
            .ok_or_else(|| err(1, format!("bad column {}", group[0])))?;
        for (c, suffix) in group.iter().zip(["_X", "_f", "_band", "_in"]) {
            if *c != format!("{label}{suffix}") {
                return Err(err(1, format!("bad column {c}")));
            }
        }
        labels.push(label.to_string());
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let ln = idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols.len() {
            return Err(err(ln, format!("expected {} cells, got {}", cols.len(), cells.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(ln, format!("{s}: {e}")));
        let int = |s: &str| s.parse::<u64>().map_err(|e| err(ln, format!("{s}: {e}")));
        let mut readings = Vec::new();
        for (g, label) in cells[4..].chunks(4).zip(&labels) {
            let x = if g[0].is_empty() { None } else { Some(int(g[0])?) };
            let r = Reading {
                label: label.clone(),
                x,
                f: num(g[1])?,
                band: num(g[2])?,
            };
            let expect = match r.in_band() {
                Some(true) => "1",
                Some(false) => "0",
                None => "censored",
            };
            if g[3] != expect {
                return Err(err(ln, format!("{label}_in is {} but values say {expect}", g[3])));
            }
            readings.push(r);
        }
        out.push(Snapshot {
            i: int(cells[0])?,
            avail: int(cells[1])?,
            avail_traj: num(cells[2])?,
            avail_band: num(cells[3])?,
            readings,
        });
    }
    Ok(out)
}

/// Summary of [`exact_identities`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub pairs_checked: usize,
    pub triples_checked: usize,
    /// Largest `sum_j X_{T,j,j-4} - |threats(T)|` seen.
    pub max_overcount: u64,
}

/// Checks, for every uncovered pair and available triple, the exact
/// relations between the tracked counts:
///
/// * `|uncovered| = C(n,2) - 3i`,
/// * `3 |available| = sum over uncovered e of X_e`,
/// * `X_{T,4,0} = sum_{e in T} X_e - 3`,
/// * `th_{T,e} = |threats(T)| - X_e + 1`, where `th_{T,e}` counts threats to
///   `T` that avoid `e`,
/// * `0 <= sum_j X_{T,j,j-4} - |threats(T)| <= 2 X_{T,double}`.
///
/// Meant for small `n`; the cost is dominated by one threat query per
/// available triple.
pub fn exact_identities(state: &ProcessState, counter: &ConfigCounter) -> std::result::Result<IdentityReport, String> {
    let n = state.n() as u64;
    let i = state.i() as u64;
    let mut report = IdentityReport::default();
    let expect_uncovered = binom(n, 2) as u64 - 3 * i;
    if state.uncovered_count() as u64 != expect_uncovered {
        return Err(format!("{} uncovered pairs, expected {expect_uncovered}", state.uncovered_count()));
    }
    let mut x_e = std::collections::HashMap::new();
    let mut sum = 0usize;
    for e in state.uncovered() {
        let x = count_x_e(state, e).ok_or("uncovered pair reported covered")?;
        x_e.insert(e, x);
        sum += x;
        report.pairs_checked += 1;
    }
    if sum != 3 * state.available_count() {
        return Err(format!("sum of X_e = {sum}, 3|A| = {}", 3 * state.available_count()));
    }
    let fail = |e: Error| e.to_string();
    for t in state.available() {
        let diamonds = counter.count(state, t, 4, 0).map_err(fail)?;
        let edge_sum: usize = t.pairs().iter().map(|e| x_e[e]).sum();
        if diamonds as usize != edge_sum - 3 {
            return Err(format!("{t}: X_(T,4,0) = {diamonds}, sum X_e - 3 = {}", edge_sum - 3));
        }
        let threats = state.threats_of(t).map_err(fail)?;
        for e in t.pairs() {
            let th = threats.iter().filter(|s| !(s.contains(e.a()) && s.contains(e.b()))).count();
            if th + x_e[&e] != threats.len() + 1 {
                return Err(format!("{t}, {e:?}: th = {th}, |threats| = {}, X_e = {}", threats.len(), x_e[&e]));
            }
        }
        let mut dangerous = 0u64;
        for j in (4..=state.jmax()).filter(|&j| j != 5) {
            dangerous += counter.count(state, t, j, j - 4).map_err(fail)?;
        }
        let over = dangerous
            .checked_sub(threats.len() as u64)
            .ok_or_else(|| format!("{t}: {dangerous} dangerous configurations but {} threats", threats.len()))?;
        let double = crate::extensions::count_double(state, counter, t).map_err(fail)?;
        if over > 2 * double {
            return Err(format!("{t}: overcount {over} exceeds 2 X_double = {}", 2 * double));
        }
        report.max_overcount = report.max_overcount.max(over);
        report.triples_checked += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs::enumerate_erdos;
    use crate::trajectory::Constants;
    use std::sync::{Arc, OnceLock};

    fn catalog() -> Arc<ErdosCatalog> {
        static CAT: OnceLock<Arc<ErdosCatalog>> = OnceLock::new();
        CAT.get_or_init(|| Arc::new(enumerate_erdos(8).unwrap())).clone()
    }

    #[test]
    fn initial_counts_match_trajectories() {
        let state = ProcessState::new(12, 6, 3, catalog()).unwrap();
        let counter = ConfigCounter::new(&catalog());
        for e in state.uncovered() {
            assert_eq!(count_x_e(&state, e), Some(10));
        }
        let params = TrajectoryParams::new(12, 6, &catalog(), Constants::default()).unwrap();
        let t = Triple::new(0, 1, 2);
        assert_eq!(counter.count(&state, t, 4, 0).unwrap(), 27);
        for j in 6..=8 {
            assert_eq!(counter.count(&state, t, j, 0).unwrap() as f64, params.J[j]);
            for c in 1..=j - 4 {
                assert_eq!(counter.count(&state, t, j, c).unwrap(), 0);
            }
        }
        assert!(counter.count(&state, t, 6, 3).is_err());
        assert!(counter.count(&state, t, 9, 0).is_err());
    }

    #[test]
    fn planted_pasch_is_dangerous() {
        let mut state = ProcessState::new(9, 4, 1, catalog()).unwrap();
        for t in [Triple::new(0, 3, 4), Triple::new(1, 3, 5)] {
            state.step_with(t).unwrap();
        }
        let counter = ConfigCounter::new(&catalog());
        let root = Triple::new(0, 1, 2);
        let d = counter.dangerous(&state, root).unwrap();
        let pasch: Vec<&Dangerous> = d.iter().filter(|x| x.j == 6).collect();
        assert_eq!(pasch.len(), 1);
        assert_eq!(pasch[0].available, Triple::new(2, 4, 5));
        assert_eq!(counter.count(&state, root, 6, 2).unwrap(), 1);
        let diamonds = d.iter().filter(|x| x.j == 4).count() as u64;
        assert_eq!(diamonds, counter.count(&state, root, 4, 0).unwrap());
    }

    #[test]
    fn dangerous_list_matches_counts_along_a_run() {
        let mut state = ProcessState::new(12, 6, 11, catalog()).unwrap();
        let counter = ConfigCounter::new(&catalog());
        while state.available_count() > 0 {
            for t in state.available().take(20).collect::<Vec<_>>() {
                let d = counter.dangerous(&state, t).unwrap();
                for j in [4, 6, 7, 8] {
                    let listed = d.iter().filter(|x| x.j == j).count() as u64;
                    assert_eq!(listed, counter.count(&state, t, j, j - 4).unwrap());
                }
            }
            exact_identities(&state, &counter).unwrap();
            state.step().unwrap();
        }
    }

    fn tracking(n: usize, k: usize, seed: u64, checkpoints: Vec<u64>) -> (ProcessState, Tracking) {
        let state = ProcessState::new(n, k, seed, catalog()).unwrap();
        let params = TrajectoryParams::new(n, k, &catalog(), Constants::default()).unwrap();
        let spec = TrackerSpec {
            edge_sample: EdgeSample::Random(10),
            triple_sample: 4,
            triple_classes: dangerous_classes(k + 2),
            checkpoints,
            record_extensions: true,
        };
        let tr = Tracking::new(&state, params, spec).unwrap();
        (state, tr)
    }

    #[test]
    fn snapshots_and_csv_round_trip() {
        let (mut state, mut tr) = tracking(30, 4, 5, vec![0, 20, 60]);
        let mut snaps = Vec::new();
        loop {
            if let Some(s) = tr.observe(&state).unwrap() {
                snaps.push(s);
            }
            if tr.next_checkpoint().is_none() {
                break;
            }
            state.step().unwrap();
        }
        assert_eq!(snaps.len(), 3);
        let s0 = &snaps[0];
        let close = |x: u64, f: f64| (x as f64 - f).abs() <= 1e-9 * f;
        assert!(s0.readings.iter().all(|r| close(r.x.unwrap(), r.f)));
        assert!(close(s0.avail, s0.avail_traj));
        let csv = export_series(&snaps).unwrap();
        let cols = csv.lines().next().unwrap().split(',').count();
        assert_eq!(cols, 4 + 4 * 10 + 4 * 4);
        assert_eq!(parse_series(&csv).unwrap(), snaps);
        assert_eq!(export_series(&snaps[..2]).unwrap().lines().count(), 3);
        let tampered = csv.replacen(",1,", ",0,", 1);
        assert!(parse_series(&tampered).is_err());
        assert!(export_series(&[]).is_err());
    }

    #[test]
    fn tracking_does_not_perturb_the_process() {
        let (mut a, mut tr) = tracking(25, 4, 9, vec![0, 10, 30]);
        let mut b = ProcessState::new(25, 4, 9, catalog()).unwrap();
        for _ in 0..40 {
            tr.observe(&a).unwrap();
            assert_eq!(a.step().unwrap(), b.step().unwrap());
        }
    }

    #[test]
    fn checkpoints_are_validated() {
        let state = ProcessState::new(20, 4, 0, catalog()).unwrap();
        let params = TrajectoryParams::new(20, 4, &catalog(), Constants::default()).unwrap();
        let mut spec = TrackerSpec::default_for(&params);
        spec.checkpoints = vec![5, 5];
        assert!(Tracking::new(&state, params.clone(), spec.clone()).is_err());
        spec.checkpoints = vec![params.tau_cut() + 1];
        assert!(Tracking::new(&state, params.clone(), spec.clone()).is_err());
        spec.checkpoints = vec![0];
        spec.triple_classes = vec![(7, 0)];
        assert!(Tracking::new(&state, params, spec).is_err());
    }
}
