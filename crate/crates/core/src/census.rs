//! The classification pipeline: enumerate the rotary maps living over a
//! parameter cell `(p, r, s)`, verify them at selectable depth, evaluate
//! the prime-`r` existence predicate, and persist results as JSON.
//!
//! One census entry per multiplicity-free class set of total degree
//! `s + 1`.  Verification is opt-in per level because the brute-force
//! oracle is exponential in `s`:
//!
//! * graph level — build the coset geometry, compare the underlying graph
//!   against the family predicted from the content, and check that
//!   decomposing the built map recovers exactly the entry's classes;
//! * brute level — bucket entries by holomorph-conjugate content (such
//!   entries share one abstract group), count that group's rotary pairs
//!   and `Aut`-orbits, require one orbit per entry, and check entries are
//!   pairwise non-isomorphic as maps.
//!
//! A mismatch at any level aborts with a [`Error::Verification`] naming
//! the entry — a discrepancy is a result, never a silent flag.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::dihedral::{aut_action, multiplicity_free_reps, DihedralAut, IrrClass};
use crate::error::{Error, Result};
use crate::ffpoly::{is_prime, multiplicative_order, powm};
use crate::group::count_orbits_on_pairs;
use crate::pxgraph::isomorphic;
use crate::rotamap::{
    build_graph_form, build_map, construct_rotary_default, decompose, graph_form,
    maps_isomorphic, RotaryMap,
};
use crate::validate_pr;

pub const SCHEMA_VERSION: u32 = 1;

/// Verification depth and resource budgets for [`classify`].
#[derive(Debug, Clone)]
pub struct CensusOptions {
    /// Build each map's underlying graph and compare it with the family its
    /// content predicts; also run the decomposition round-trip.
    pub verify_graphs: bool,
    /// Cross-check entry counts against exhaustive rotary-pair enumeration.
    pub brute: bool,
    pub max_group_order: u64,
    pub max_graph_vertices: u64,
    /// Permit `s + 1 > r`, where `C(p, r, s)` is no longer arc-transitive.
    /// Graph comparison still runs but a mismatch is recorded, not fatal.
    pub allow_large_s: bool,
    /// Worker threads for per-entry verification (1 = sequential).
    pub jobs: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            verify_graphs: false,
            brute: false,
            max_group_order: 200_000,
            max_graph_vertices: 2_000,
            allow_large_s: false,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedFlags {
    pub graph: bool,
    pub brute: bool,
    pub decomp: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsJson {
    pub v: u64,
    pub e: u64,
    pub f: u64,
    pub chi: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    /// Class signatures in canonical enumeration order; degrees sum to `s + 1`.
    pub classes: Vec<String>,
    pub group_order: u64,
    /// The graph family the map lives on: `C(p,r,s)` for most contents, a
    /// thickened or plain cycle (`C*(…)`) for the degenerate linear ones.
    pub graph: String,
    pub counts: CountsJson,
    pub verified: VerifiedFlags,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub schema: u32,
    pub p: u64,
    pub r: u64,
    pub s: u64,
    pub tool: String,
    pub entries: Vec<CensusEntry>,
}

impl Census {
    /// One-line summary, e.g. `4 maps, all verified`.
    pub fn summary(&self) -> String {
        let n = self.entries.len();
        let noun = if n == 1 { "map" } else { "maps" };
        let all = !self.entries.is_empty()
            && self
                .entries
                .iter()
                .all(|e| e.verified.graph && e.verified.brute && e.verified.decomp);
        if all {
            format!("{n} {noun}, all verified")
        } else {
            format!("{n} {noun}")
        }
    }
}

/// All rotary maps over the cell `(p, r, s)` for `s ≥ 1`, one per
/// multiplicity-free class set of total degree `s + 1`.
///
/// `s ≤ r − 1` is enforced unless `options.allow_large_s` is set: beyond
/// that bound the graph `C(p, r, s)` stops being arc-transitive, and the
/// census records what it finds without judging it.
pub fn classify(p: u64, r: u64, s: u64, options: &CensusOptions) -> Result<Census> {
    if s == 0 {
        return Err(Error::ParamDomain(
            "s = 0 is the augmented regime; use classify_augmented".into(),
        ));
    }
    census_cell(p, r, s, options)
}

/// The `s = 0` census: maps whose underlying graphs are the augmented
/// forms `C*(p, r, 0, ±1)`. Two entries for odd `r`, three for even `r`.
pub fn classify_augmented(p: u64, r: u64, options: &CensusOptions) -> Result<Census> {
    census_cell(p, r, 0, options)
}

fn census_cell(p: u64, r: u64, s: u64, options: &CensusOptions) -> Result<Census> {
    validate_pr(p, r)?;
    if s + 1 > r && !options.allow_large_s {
        return Err(Error::ParamDomain(format!(
            "s = {s} exceeds r − 1 = {} (C(p,r,s) is arc-transitive only for r ≥ s + 1); \
             set allow_large_s to explore this regime anyway",
            r - 1
        )));
    }
    let subsets = multiplicity_free_reps(p, r, s + 1)?;
    let mut maps: Vec<RotaryMap> = Vec::with_capacity(subsets.len());
    let mut entries: Vec<CensusEntry> = Vec::with_capacity(subsets.len());
    for set in &subsets {
        let map = construct_rotary_default(p, r, set)?;
        let counts = map.counts();
        entries.push(CensusEntry {
            classes: set.iter().map(|c| c.signature()).collect(),
            group_order: narrow(map.group.order(), "group order")?,
            graph: graph_form(p, r, set).label(p, r),
            counts: CountsJson {
                v: narrow(counts.vertices, "vertex count")?,
                e: narrow(counts.edges, "edge count")?,
                f: narrow(counts.faces, "face count")?,
                chi: i64::try_from(counts.chi).map_err(|_| {
                    Error::ParamDomain("Euler characteristic exceeds i64".into())
                })?,
            },
            verified: VerifiedFlags::default(),
        });
        maps.push(map);
    }
    if options.verify_graphs {
        verify_graph_level(p, r, s, options, &maps, &mut entries)?;
    }
    if options.brute {
        verify_brute_level(r, options, &subsets, &maps, &mut entries)?;
    }
    Ok(Census {
        schema: SCHEMA_VERSION,
        p,
        r,
        s,
        tool: format!("rotapx {}", env!("CARGO_PKG_VERSION")),
        entries,
    })
}

fn narrow(value: u128, what: &str) -> Result<u64> {
    u64::try_from(value)
        .map_err(|_| Error::ParamDomain(format!("{what} exceeds 64 bits at these parameters")))
}

/// Graph + decomposition verification for every entry, fanned out over
/// `options.jobs` workers. Entry order is preserved; the first failure in
/// entry order is the one reported.
fn verify_graph_level(
    p: u64,
    r: u64,
    s: u64,
    options: &CensusOptions,
    maps: &[RotaryMap],
    entries: &mut [CensusEntry],
) -> Result<()> {
    let strict_graph = s + 1 <= r; // beyond the bound, mismatch is a finding
    let labels: Vec<(String, String)> = entries
        .iter()
        .map(|e| (e.classes.join(", "), e.graph.clone()))
        .collect();
    let check_one = |idx: usize| -> Result<(bool, bool)> {
        let map = &maps[idx];
        let built = build_map(map, options.max_graph_vertices)?;
        let expected = build_graph_form(
            p,
            r,
            graph_form(p, r, &map.group.classes),
            options.max_graph_vertices,
        )?;
        let graph_ok = isomorphic(&built.graph, &expected, options.max_graph_vertices)?;
        if !graph_ok && strict_graph {
            return Err(Error::Verification(format!(
                "entry {{{}}}: built graph is not isomorphic to {}",
                labels[idx].0, labels[idx].1
            )));
        }
        let mut recovered: Vec<String> = decompose(map)?
            .iter()
            .flat_map(|part| part.group.classes.iter().map(|c| c.signature()))
            .collect();
        recovered.sort();
        let mut wanted: Vec<String> =
            map.group.classes.iter().map(|c| c.signature()).collect();
        wanted.sort();
        if recovered != wanted {
            return Err(Error::Verification(format!(
                "entry {{{}}}: decomposition returned {{{}}}",
                labels[idx].0,
                recovered.join(", ")
            )));
        }
        Ok((graph_ok, true))
    };
    let outcomes = fan_out(maps.len(), options.jobs, check_one);
    for (entry, outcome) in entries.iter_mut().zip(outcomes) {
        let (graph_ok, decomp_ok) = outcome?;
        entry.verified.graph = graph_ok;
        entry.verified.decomp = decomp_ok;
    }
    Ok(())
}

/// Run `work` for indices `0..count` on up to `jobs` threads, returning
/// results in index order.
fn fan_out<T, F>(count: usize, jobs: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if jobs <= 1 || count <= 1 {
        return (0..count).map(work).collect();
    }
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs.min(count))
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let idx = next.fetch_add(1, Ordering::Relaxed);
                        if idx >= count {
                            break;
                        }
                        done.push((idx, work(idx)));
                    }
                    done
                })
            })
            .collect();
        for handle in handles {
            for (idx, value) in handle.join().expect("verification worker panicked") {
                slots[idx] = Some(value);
            }
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.expect("every index visited"))
        .collect()
}

/// Brute-force cross-check. Entries whose contents differ by an
/// automorphism of `D_2r` describe the same abstract group, so the group's
/// orbit count must equal the bucket size; across buckets the groups are
/// non-isomorphic, so entries must be pairwise distinct as maps.
fn verify_brute_level(
    r: u64,
    options: &CensusOptions,
    subsets: &[Vec<IrrClass>],
    maps: &[RotaryMap],
    entries: &mut [CensusEntry],
) -> Result<()> {
    let mut buckets: BTreeMap<Vec<String>, Vec<usize>> = BTreeMap::new();
    for (idx, set) in subsets.iter().enumerate() {
        buckets.entry(conjugate_content_key(r, set)).or_default().push(idx);
    }
    for members in buckets.values() {
        let oracle =
            count_orbits_on_pairs(&maps[members[0]].group, options.max_group_order)?;
        if oracle.orbits != members.len() as u128 {
            return Err(Error::Verification(format!(
                "content bucket of {{{}}}: {} Aut-orbits on rotary pairs, {} census entries",
                entries[members[0]].classes.join(", "),
                oracle.orbits,
                members.len()
            )));
        }
    }
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            if maps_isomorphic(&maps[i], &maps[j], options.max_group_order)? {
                return Err(Error::Verification(format!(
                    "entries {{{}}} and {{{}}} are isomorphic as maps",
                    entries[i].classes.join(", "),
                    entries[j].classes.join(", ")
                )));
            }
        }
    }
    for entry in entries.iter_mut() {
        entry.verified.brute = true;
    }
    Ok(())
}

/// Canonical form of a class set under the `Aut(D_2r)` action: the
/// lexicographically least sorted signature list over the whole orbit.
fn conjugate_content_key(r: u64, set: &[IrrClass]) -> Vec<String> {
    let mut best: Option<Vec<String>> = None;
    for aut in DihedralAut::all(r) {
        let mut image: Vec<String> =
            set.iter().map(|c| aut_action(c, &aut).signature()).collect();
        image.sort();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    best.expect("Aut(D_2r) is nonempty")
}

/// Existence predicate for prime cycle length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExistenceReport {
    pub p: u64,
    pub r: u64,
    pub s: u64,
    /// Multiplicative order of `p` mod `r`.
    pub d: u64,
    /// `d` when `p^{d/2} ≡ −1 (mod r)`, else `2d`: the common degree of the
    /// faithful classes.
    pub zeta: u64,
    pub exists: bool,
}

/// Whether a rotary map exists over `(p, r, s)` for prime `r`: with `ζ`
/// the faithful-class degree, one exists iff `s ≡ −1, 0, 1 (mod ζ)`.
pub fn existence(p: u64, r: u64, s: u64) -> Result<ExistenceReport> {
    validate_pr(p, r)?;
    if !is_prime(r) {
        return Err(Error::ParamDomain(format!(
            "r = {r} is not prime; the existence predicate covers prime cycle length only"
        )));
    }
    if s == 0 {
        return Err(Error::ParamDomain("the predicate needs s ≥ 1".into()));
    }
    if r < s + 1 {
        return Err(Error::ParamDomain(format!(
            "r = {r} < s + 1 = {}; the predicate needs r ≥ max(3, s + 1)",
            s + 1
        )));
    }
    let d = multiplicative_order(p, r);
    let zeta = if d % 2 == 0 && powm(p, d / 2, r) == r - 1 { d } else { 2 * d };
    let residue = s % zeta;
    Ok(ExistenceReport {
        p,
        r,
        s,
        d,
        zeta,
        exists: residue == 0 || residue == 1 || residue == zeta - 1,
    })
}

/// Serialize to `path` atomically (write a sibling temp file, then rename).
pub fn write_census(census: &Census, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(census)
        .map_err(|e| Error::Internal(format!("census serialization: {e}")))?;
    let mut tmp = path.to_path_buf();
    tmp.set_extension("json.tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Read a census file, checking the schema version before anything else.
pub fn read_census(path: &Path) -> Result<Census> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let found = value
        .get("schema")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Parse(format!("{}: missing schema field", path.display())))?;
    if found != SCHEMA_VERSION as u64 {
        return Err(Error::SchemaVersion {
            found: found as u32,
            supported: SCHEMA_VERSION,
        });
    }
    serde_json::from_value(value)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formula_only() -> CensusOptions {
        CensusOptions::default()
    }

    fn full_verify() -> CensusOptions {
        CensusOptions { verify_graphs: true, brute: true, ..CensusOptions::default() }
    }

    #[test]
    fn worked_census_row_at_13_7() {
        let sizes: Vec<usize> = (1..=6)
            .map(|s| classify(13, 7, s, &formula_only()).unwrap().entries.len())
            .collect();
        assert_eq!(sizes, [4, 6, 6, 6, 4, 2]);
    }

    #[test]
    fn empty_cell_at_3_5_2() {
        let census = classify(3, 5, 2, &formula_only()).unwrap();
        assert!(census.entries.is_empty());
        assert_eq!(census.summary(), "0 maps");
    }

    #[test]
    fn fully_verified_cell_at_3_4_1() {
        let census = classify(3, 4, 1, &full_verify()).unwrap();
        assert_eq!(census.summary(), "4 maps, all verified");
        let classes: Vec<Vec<String>> =
            census.entries.iter().map(|e| e.classes.clone()).collect();
        assert_eq!(
            classes,
            [
                vec!["L(+,+)".to_string(), "L(-,-)".to_string()],
                vec!["L(+,+)".to_string(), "L(+,-)".to_string()],
                vec!["L(-,-)".to_string(), "L(+,-)".to_string()],
                vec!["R{1,3}".to_string()],
            ]
        );
        let graphs: Vec<&str> =
            census.entries.iter().map(|e| e.graph.as_str()).collect();
        // the two contents pairing L(-,-) with another linear class force
        // edge multiplicity 3; the other two really live on C(3,4,1)
        assert_eq!(
            graphs,
            ["C*(3,12,0,1)", "C(3,4,1)", "C*(3,12,0,1)", "C(3,4,1)"]
        );
        for entry in &census.entries {
            assert_eq!(entry.group_order, 72);
            assert!(entry.verified.graph && entry.verified.brute && entry.verified.decomp);
        }
    }

    #[test]
    fn verified_cell_at_3_4_2() {
        let census = classify(3, 4, 2, &full_verify()).unwrap();
        assert_eq!(census.entries.len(), 4);
        let graphs: Vec<&str> =
            census.entries.iter().map(|e| e.graph.as_str()).collect();
        // contents holding L(-,-) re-express over the 12-cycle
        assert_eq!(graphs, ["C(3,12,1)", "C(3,4,2)", "C(3,12,1)", "C(3,4,2)"]);
        for entry in &census.entries {
            assert_eq!(entry.counts.v, 36);
            assert_eq!(entry.counts.e, 108);
            assert!(entry.verified.graph && entry.verified.brute);
        }
    }

    #[test]
    fn cycle_class_shifts_the_family_at_3_5_4() {
        let opts = CensusOptions { verify_graphs: true, ..CensusOptions::default() };
        let census = classify(3, 5, 4, &opts).unwrap();
        let graphs: Vec<&str> =
            census.entries.iter().map(|e| e.graph.as_str()).collect();
        assert_eq!(graphs, ["C(3,5,4)", "C(3,15,3)"]);
        assert!(census.entries.iter().all(|e| e.verified.graph && e.verified.decomp));
    }

    #[test]
    fn parallel_verification_matches_sequential() {
        let parallel = CensusOptions { jobs: 4, ..full_verify() };
        assert_eq!(
            classify(3, 4, 2, &parallel).unwrap(),
            classify(3, 4, 2, &full_verify()).unwrap()
        );
    }

    #[test]
    fn augmented_cells() {
        let odd = classify_augmented(3, 5, &full_verify()).unwrap();
        let forms: Vec<&str> = odd.entries.iter().map(|e| e.graph.as_str()).collect();
        assert_eq!(forms, ["C*(3,5,0,1)", "C*(3,5,0,-1)"]);
        assert_eq!(odd.summary(), "2 maps, all verified");

        let even = classify_augmented(3, 4, &full_verify()).unwrap();
        let forms: Vec<&str> = even.entries.iter().map(|e| e.graph.as_str()).collect();
        assert_eq!(forms, ["C*(3,4,0,1)", "C*(3,4,0,-1)", "C*(3,4,0,1)"]);
        assert_eq!(even.entries.len(), 3);

        // s = 0 goes through the dedicated entry point
        assert!(matches!(
            classify(3, 4, 0, &formula_only()),
            Err(Error::ParamDomain(_))
        ));
    }

    #[test]
    fn large_s_needs_opt_in() {
        // degrees at (3,5) are {1,1,4}: total degree 6 means s = 5 > r − 1
        let err = classify(3, 5, 5, &formula_only()).unwrap_err();
        assert!(matches!(err, Error::ParamDomain(_)));
        let opts = CensusOptions { allow_large_s: true, ..formula_only() };
        let census = classify(3, 5, 5, &opts).unwrap();
        assert_eq!(census.entries.len(), 1);
        assert_eq!(
            census.entries[0].classes,
            ["L(+,+)", "L(-,-)", "R{1,2,3,4}"]
        );
    }

    #[test]
    fn existence_examples() {
        let report = existence(13, 7, 3).unwrap();
        assert_eq!((report.d, report.zeta, report.exists), (2, 2, true));
        for s in 1..=6 {
            assert!(existence(13, 7, s).unwrap().exists);
        }
        let report = existence(3, 5, 2).unwrap();
        assert_eq!((report.d, report.zeta, report.exists), (4, 4, false));
        assert!(existence(3, 5, 3).unwrap().exists);
        // guards: composite r, s too large, s = 0
        assert!(matches!(existence(3, 4, 1), Err(Error::ParamDomain(_))));
        assert!(matches!(existence(5, 3, 3), Err(Error::ParamDomain(_))));
        assert!(matches!(existence(3, 5, 0), Err(Error::ParamDomain(_))));
    }

    #[test]
    fn existence_agrees_with_classification() {
        for (p, r, smax) in [(3u64, 5u64, 4u64), (5, 3, 2), (13, 7, 6)] {
            for s in 1..=smax {
                let predicted = existence(p, r, s).unwrap().exists;
                let found = !classify(p, r, s, &formula_only()).unwrap().entries.is_empty();
                assert_eq!(predicted, found, "cell ({p},{r},{s})");
            }
        }
    }

    #[test]
    fn json_roundtrip_and_schema_guard() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("census.json");
        let census = classify(3, 4, 1, &formula_only()).unwrap();
        write_census(&census, &path).unwrap();
        assert_eq!(read_census(&path).unwrap(), census);

        // an empty cell still round-trips
        let empty = classify(3, 5, 2, &formula_only()).unwrap();
        write_census(&empty, &path).unwrap();
        assert_eq!(read_census(&path).unwrap().entries.len(), 0);

        let tampered =
            std::fs::read_to_string(&path).unwrap().replace("\"schema\": 1", "\"schema\": 9");
        std::fs::write(&path, tampered).unwrap();
        assert!(matches!(
            read_census(&path),
            Err(Error::SchemaVersion { found: 9, supported: 1 })
        ));

        std::fs::write(&path, "{ not json").unwrap();
        assert!(matches!(read_census(&path), Err(Error::Parse(_))));
    }
}
