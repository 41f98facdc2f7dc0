use std::fmt::Write as _;

use super::{is_erdos, ErdosVerdict};
use crate::canon;
use crate::embed::{Plan, SlotStatus};
use crate::error::{invalid, Error, Result};
use crate::triple::{binom, Triple, TripleSystem};

const HEADER: &str = "erdos-catalog v1";
const TRAILER: &str = "# schema erdos-catalog v1";

/// One canonical Erdős configuration with its symmetry data.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    j: usize,
    id: usize,
    blocks: Vec<[u8; 3]>,
    autos: Vec<Vec<u8>>,
    /// Orbits of the automorphism group on slots (block indices).
    slot_orbits: Vec<Vec<usize>>,
    /// One representative per orbit of ordered pairs of distinct slots.
    pair_reps: Vec<(usize, usize)>,
    exclusion_plans: Vec<Plan>,
}

impl PartialEq for CatalogEntry {
    fn eq(&self, other: &Self) -> bool {
        self.j == other.j && self.id == other.id && self.blocks == other.blocks
    }
}

impl Eq for CatalogEntry {}

impl CatalogEntry {
    fn new(j: usize, id: usize, blocks: Vec<[u8; 3]>) -> CatalogEntry {
        let colored: Vec<canon::ColoredBlock> = blocks.iter().map(|&t| (0, t)).collect();
        let autos = canon::automorphisms(j, &vec![0; j], &colored);
        let slot_of = |t: [u8; 3]| blocks.iter().position(|&b| b == t).expect("automorphism maps blocks to blocks");
        // Action of each automorphism on slots.
        let slot_perms: Vec<Vec<usize>> = autos
            .iter()
            .map(|a| {
                blocks
                    .iter()
                    .map(|t| {
                        let mut img = t.map(|x| a[x as usize]);
                        img.sort_unstable();
                        slot_of(img)
                    })
                    .collect()
            })
            .collect();
        let b = blocks.len();
        let mut slot_orbits: Vec<Vec<usize>> = Vec::new();
        let mut seen = vec![false; b];
        for s in 0..b {
            if seen[s] {
                continue;
            }
            let mut orbit: Vec<usize> = slot_perms.iter().map(|p| p[s]).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &t in &orbit {
                seen[t] = true;
            }
            slot_orbits.push(orbit);
        }
        let mut pair_reps = Vec::new();
        let mut seen_pair = vec![false; b * b];
        for s1 in 0..b {
            for s2 in 0..b {
                if s1 == s2 || seen_pair[s1 * b + s2] {
                    continue;
                }
                for p in &slot_perms {
                    seen_pair[p[s1] * b + p[s2]] = true;
                }
                pair_reps.push((s1, s2));
            }
        }
        let exclusion_plans = pair_reps
            .iter()
            .map(|&(s1, s2)| {
                let status: Vec<SlotStatus> = (0..b)
                    .map(|s| if s == s2 { SlotStatus::Available } else { SlotStatus::Chosen })
                    .collect();
                Plan::build(j, &blocks, s1, &status)
            })
            .collect();
        CatalogEntry {
            j,
            id,
            blocks,
            autos,
            slot_orbits,
            pair_reps,
            exclusion_plans,
        }
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn blocks(&self) -> Vec<Triple> {
        self.blocks.iter().map(|t| Triple::new(t[0] as u32, t[1] as u32, t[2] as u32)).collect()
    }

    pub fn system(&self) -> TripleSystem {
        TripleSystem::from_blocks(self.j, self.blocks()).expect("catalog blocks are in range")
    }

    pub fn automorphism_count(&self) -> usize {
        self.autos.len()
    }

    pub fn automorphisms(&self) -> &[Vec<u8>] {
        &self.autos
    }

    /// Orbits of the automorphism group acting on block slots.
    pub fn slot_orbits(&self) -> &[Vec<usize>] {
        &self.slot_orbits
    }

    /// Representatives of the ordered slot-pair orbits.
    pub fn pair_orbit_reps(&self) -> &[(usize, usize)] {
        &self.pair_reps
    }

    pub(crate) fn exclusion_plans(&self) -> &[Plan] {
        &self.exclusion_plans
    }

    /// Labeled copies on `[j]` containing a fixed triple:
    /// `j!/|Aut| * (j-2)/C(j,3)`.
    pub fn labeled_copies_through_triple(&self) -> u128 {
        let fact: u128 = (1..=self.j as u128).product();
        let copies = fact / self.autos.len() as u128;
        copies * (self.j as u128 - 2) / binom(self.j as u64, 3)
    }
}

/// All Erdős configurations on `4..=j_max` points, canonically labeled,
/// ordered by `j` and then by block list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErdosCatalog {
    jmax: usize,
    entries: Vec<CatalogEntry>,
}

impl ErdosCatalog {
    pub(crate) fn from_canonical_lists(jmax: usize, lists: Vec<Vec<Vec<[u8; 3]>>>) -> Result<ErdosCatalog> {
        let mut entries = Vec::new();
        for (j, list) in lists.into_iter().enumerate() {
            for (id, blocks) in list.into_iter().enumerate() {
                entries.push(CatalogEntry::new(j, id, blocks));
            }
        }
        Ok(ErdosCatalog { jmax, entries })
    }

    pub fn jmax(&self) -> usize {
        self.jmax
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn entries_for(&self, j: usize) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(move |e| e.j == j)
    }

    pub fn count(&self, j: usize) -> usize {
        self.entries_for(j).count()
    }

    /// `erd_j` from the catalog by orbit counting.
    pub fn erd(&self, j: usize) -> u128 {
        self.entries_for(j).map(|e| e.labeled_copies_through_triple()).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER} jmax={}\n", self.jmax);
        for e in &self.entries {
            let blocks: Vec<String> = e.blocks.iter().map(|t| format!("{},{},{}", t[0], t[1], t[2])).collect();
            writeln!(out, "j={} id={} blocks={}", e.j, e.id, blocks.join(";")).unwrap();
        }
        out.push_str(TRAILER);
        out.push('\n');
        out
    }

    /// Parses the text form, re-deriving symmetry data and re-validating
    /// every entry (Erdős, canonical, ordered).
    pub fn from_text(text: &str) -> Result<ErdosCatalog> {
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| perr(1, "empty catalog"))?;
        let rest = header
            .strip_prefix("erdos-catalog ")
            .ok_or_else(|| perr(1, "missing erdos-catalog header"))?;
        let (version, jm) = rest.split_once(' ').ok_or_else(|| perr(1, "malformed header"))?;
        if version != "v1" {
            return Err(Error::UnsupportedVersion(version.to_string()));
        }
        let jmax: usize = jm
            .strip_prefix("jmax=")
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| perr(1, "malformed jmax"))?;
        if !(4..=super::enumerate::ENUM_MAX_J).contains(&jmax) {
            return Err(invalid(format!("catalog jmax {jmax} out of range")));
        }
        let mut lists: Vec<Vec<Vec<[u8; 3]>>> = vec![Vec::new(); jmax + 1];
        let mut trailer = false;
        for (ln, line) in lines {
            if trailer {
                return Err(perr(ln, "content after schema line"));
            }
            if line.starts_with('#') {
                if line != TRAILER {
                    return Err(Error::UnsupportedVersion(line.to_string()));
                }
                trailer = true;
                continue;
            }
            let mut j = None;
            let mut id = None;
            let mut blocks = None;
            for field in line.split_whitespace() {
                let (k, v) = field.split_once('=').ok_or_else(|| perr(ln, "expected key=value"))?;
                match k {
                    "j" => j = v.parse::<usize>().ok(),
                    "id" => id = v.parse::<usize>().ok(),
                    "blocks" => {
                        let parsed: Option<Vec<[u8; 3]>> = v
                            .split(';')
                            .map(|b| {
                                let xs: Vec<u8> = b.split(',').filter_map(|x| x.parse().ok()).collect();
                                (xs.len() == 3 && xs[0] < xs[1] && xs[1] < xs[2]).then(|| [xs[0], xs[1], xs[2]])
                            })
                            .collect();
                        blocks = parsed;
                    }
                    _ => return Err(perr(ln, "unknown field")),
                }
            }
            let (j, id, blocks) = match (j, id, blocks) {
                (Some(j), Some(id), Some(b)) => (j, id, b),
                _ => return Err(perr(ln, "entry needs j, id and blocks")),
            };
            if j > jmax || id != lists[j].len() {
                return Err(perr(ln, "entry out of order"));
            }
            if blocks.iter().any(|t| t[2] as usize >= j) {
                return Err(perr(ln, "block label out of range"));
            }
            let sys = TripleSystem::from_blocks(j, blocks.iter().map(|t| Triple::new(t[0] as u32, t[1] as u32, t[2] as u32)))?;
            if is_erdos(&sys) != ErdosVerdict::Erdos || sys.points().len() != j {
                return Err(perr(ln, "entry is not an Erdős configuration"));
            }
            let colored: Vec<canon::ColoredBlock> = blocks.iter().map(|&t| (0, t)).collect();
            let cert: Vec<[u8; 3]> = canon::canonize(j, &vec![0; j], &colored).cert.into_iter().map(|(_, t)| t).collect();
            if cert != blocks {
                return Err(perr(ln, "entry is not in canonical form"));
            }
            if lists[j].last().is_some_and(|prev| *prev >= blocks) {
                return Err(perr(ln, "entries not sorted"));
            }
            lists[j].push(blocks);
        }
        if !trailer {
            return Err(perr(0, "missing schema line"));
        }
        ErdosCatalog::from_canonical_lists(jmax, lists)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{configuration_name, enumerate_erdos};
    use super::*;

    #[test]
    fn small_catalog_counts_and_names() {
        let c = enumerate_erdos(8).unwrap();
        let counts: Vec<usize> = (4..=8).map(|j| c.count(j)).collect();
        assert_eq!(counts, vec![1, 0, 1, 1, 2]);
        let mut names: Vec<&str> = c
            .entries()
            .iter()
            .map(|e| configuration_name(&e.system()).expect("named entry"))
            .collect();
        names.sort_unstable();
        assert_eq!(names, vec!["6-cycle", "crown", "diamond", "mitre", "pasch"]);
    }

    #[test]
    fn symmetry_data() {
        let c = enumerate_erdos(7).unwrap();
        let pasch = c.entries_for(6).next().unwrap();
        assert_eq!(pasch.automorphism_count(), 24);
        assert_eq!(pasch.slot_orbits().len(), 1);
        assert_eq!(pasch.pair_orbit_reps().len(), 1);
        assert_eq!(c.erd(6), 6);
        assert_eq!(c.erd(4), 3);
        assert_eq!(c.erd(5), 0);
    }

    #[test]
    fn text_round_trip() {
        let c = enumerate_erdos(8).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("erdos-catalog v1 jmax=8\n"));
        assert_eq!(ErdosCatalog::from_text(&text).unwrap(), c);
        assert!(matches!(
            ErdosCatalog::from_text(&text.replace("v1 jmax", "v2 jmax")),
            Err(Error::UnsupportedVersion(_))
        ));
        let no_trailer = text.replace(TRAILER, "");
        assert!(ErdosCatalog::from_text(&no_trailer).is_err());
        let first = text.lines().nth(1).unwrap();
        let bad = text.replace(first, "j=4 id=0 blocks=0,1,2;1,2,3;0,1,3");
        assert!(ErdosCatalog::from_text(&bad).is_err());
    }
}
