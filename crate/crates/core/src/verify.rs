//! Top-level verifiers: the semibrick / length-wide-subcategory bijection,
//! the abelian-iff-semibrick equivalence, and the structure-dependence
//! demonstration.
//!
//! The bijection is checked by deliberate double enumeration: semibricks
//! map forward through filtration closures, while an independent subset
//! search enumerates every sum-closed candidate and filters the length
//! wide ones. Each side is the other's oracle; agreement in both
//! directions is the verdict.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::bricks::{enumerate_semibricks, is_semibrick, simples, BrickSet};
use crate::error::{Error, Result};
use crate::exact::ExactCtx;
use crate::filt::filt_closure;
use crate::repcat::Mor;
use crate::universe::{IsoClassId, TruncationEvent, Universe};
use crate::wide::{is_abelian, is_length, is_wide, simples_of, ExtensionFailure, SubcatCandidate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UniverseDescriptor {
    pub vertex_count: usize,
    pub arrow_count: usize,
    pub p: u32,
    pub dim_bound: Vec<usize>,
    pub class_count: usize,
}

pub fn universe_descriptor(u: &Universe) -> UniverseDescriptor {
    UniverseDescriptor {
        vertex_count: u.quiver().vertices().len(),
        arrow_count: u.quiver().arrows().len(),
        p: u.p().get(),
        dim_bound: u.dim_bound().to_vec(),
        class_count: u.len(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CtxDescriptor {
    pub structure: crate::exact::ExactStructure,
    pub subuniverse: Option<Vec<usize>>,
}

pub fn ctx_descriptor(ctx: &ExactCtx) -> CtxDescriptor {
    CtxDescriptor {
        structure: ctx.structure(),
        subuniverse: ctx
            .subuniverse()
            .map(|su| su.members().iter().map(|c| c.index()).collect()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ForwardEntry {
    pub semibrick: BTreeSet<IsoClassId>,
    pub wide_subcat: BTreeSet<IsoClassId>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BackwardEntry {
    pub wide_subcat: BTreeSet<IsoClassId>,
    pub semibrick: BTreeSet<IsoClassId>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundtripFailure {
    pub kind: String,
    pub semibrick: Option<BTreeSet<IsoClassId>>,
    pub subcat: Option<BTreeSet<IsoClassId>>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BijectionReport {
    pub verdict: Verdict,
    pub universe: UniverseDescriptor,
    pub ctx: CtxDescriptor,
    pub semibricks: Vec<BTreeSet<IsoClassId>>,
    pub wide_subcats: Vec<BTreeSet<IsoClassId>>,
    pub forward_map: Vec<ForwardEntry>,
    pub backward_map: Vec<BackwardEntry>,
    pub roundtrip_failures: Vec<RoundtripFailure>,
    pub truncation_events: Vec<TruncationEvent>,
}

/// Every subset of the nonzero classes, plus the zero class, that is
/// closed under direct sums within the window. Backtracking over class
/// ids: including a class forces every in-window sum with the classes
/// already included, and a forced class that was excluded earlier prunes
/// the branch.
fn enumerate_sum_closed(u: &Arc<Universe>) -> Result<Vec<BTreeSet<IsoClassId>>> {
    fn propagate(
        u: &Universe,
        start: usize,
        decided: &mut [Option<bool>],
        forced: &mut Vec<usize>,
    ) -> Result<bool> {
        let mut queue = vec![start];
        while let Some(a) = queue.pop() {
            let included: Vec<usize> = (0..decided.len())
                .filter(|&j| decided[j] == Some(true))
                .collect();
            for b in included {
                // Sums of nonzero classes are nonzero, so the index shift
                // below is safe.
                let Some(c) = u.sum_class(IsoClassId(a + 1), IsoClassId(b + 1))? else {
                    continue;
                };
                match decided[c.index() - 1] {
                    Some(true) => {}
                    Some(false) => return Ok(false),
                    None => {
                        decided[c.index() - 1] = Some(true);
                        forced.push(c.index() - 1);
                        queue.push(c.index() - 1);
                    }
                }
            }
        }
        Ok(true)
    }

    fn recurse(
        u: &Arc<Universe>,
        pos: usize,
        decided: &mut Vec<Option<bool>>,
        out: &mut Vec<BTreeSet<IsoClassId>>,
    ) -> Result<()> {
        let Some(i) = (pos..decided.len()).find(|&j| decided[j].is_none()) else {
            let set: BTreeSet<IsoClassId> = std::iter::once(u.zero_class())
                .chain(
                    (0..decided.len())
                        .filter(|&j| decided[j] == Some(true))
                        .map(|j| IsoClassId(j + 1)),
                )
                .collect();
            out.push(set);
            return Ok(());
        };

        decided[i] = Some(false);
        recurse(u, i + 1, decided, out)?;
        decided[i] = None;

        let mut forced = vec![i];
        decided[i] = Some(true);
        if propagate(u, i, decided, &mut forced)? {
            recurse(u, i + 1, decided, out)?;
        }
        for j in forced {
            decided[j] = None;
        }
        Ok(())
    }

    let mut decided: Vec<Option<bool>> = vec![None; u.len().saturating_sub(1)];
    let mut out = Vec::new();
    recurse(u, 0, &mut decided, &mut out)?;
    out.sort();
    Ok(out)
}

/// Verifies the bijection between semibricks and length wide
/// subcategories in the given context, both directions independently.
pub fn verify_bijection(u: &Arc<Universe>, ctx: &ExactCtx) -> Result<BijectionReport> {
    // The subset search worst case is priced before any work happens.
    let nonzero = u.len().saturating_sub(1);
    let estimate: u128 = if nonzero >= 127 {
        u128::MAX
    } else {
        1u128 << nonzero
    };
    let budget = u.limits().universe_budget;
    if estimate > u128::from(budget) {
        return Err(Error::BudgetExceeded { estimate, budget });
    }

    let mut failures: Vec<RoundtripFailure> = Vec::new();
    let mut events: BTreeSet<TruncationEvent> = BTreeSet::new();

    // Forward: semibrick -> filtration closure, which must be length wide
    // with the semibrick as its simples.
    let semibricks = enumerate_semibricks(u)?;
    let forward: Vec<(BTreeSet<IsoClassId>, BTreeSet<IsoClassId>, Vec<RoundtripFailure>, Vec<TruncationEvent>)> =
        semibricks
            .par_iter()
            .map(|sb| -> Result<_> {
                let members = sb.members().clone();
                let closure = filt_closure(u, ctx, sb)?;
                let mut fails = Vec::new();
                let mut evs = Vec::new();
                match SubcatCandidate::new(u.clone(), closure.clone()) {
                    Ok(cand) => {
                        let report = is_wide(u, ctx, &cand)?;
                        evs.extend(report.truncation_events.iter().cloned());
                        if !report.passed() {
                            fails.push(RoundtripFailure {
                                kind: "forward_not_wide".into(),
                                semibrick: Some(members.clone()),
                                subcat: Some(closure.clone()),
                                detail: format!(
                                    "{} extension and {} factorization failures",
                                    report.extension_failures.len(),
                                    report.factorization_failures.len()
                                ),
                            });
                        }
                        if !is_length(u, ctx, &cand)? {
                            fails.push(RoundtripFailure {
                                kind: "forward_not_length".into(),
                                semibrick: Some(members.clone()),
                                subcat: Some(closure.clone()),
                                detail: "closure member missing from its own simples' filtration"
                                    .into(),
                            });
                        }
                        let recovered = simples_of(u, ctx, &cand)?;
                        if recovered != members {
                            fails.push(RoundtripFailure {
                                kind: "forward_simples_mismatch".into(),
                                semibrick: Some(members.clone()),
                                subcat: Some(closure.clone()),
                                detail: format!(
                                    "simples of the closure are {:?}",
                                    recovered.iter().map(|c| c.index()).collect::<Vec<_>>()
                                ),
                            });
                        }
                    }
                    Err(Error::InvalidCandidate(detail)) => fails.push(RoundtripFailure {
                        kind: "forward_closure_not_sum_closed".into(),
                        semibrick: Some(members.clone()),
                        subcat: Some(closure.clone()),
                        detail,
                    }),
                    Err(e) => return Err(e),
                }
                Ok((members, closure, fails, evs))
            })
            .collect::<Result<_>>()?;

    let mut forward_map = Vec::with_capacity(forward.len());
    let mut images: Vec<BTreeSet<IsoClassId>> = Vec::with_capacity(forward.len());
    for (members, closure, fails, evs) in forward {
        failures.extend(fails);
        events.extend(evs);
        images.push(closure.clone());
        forward_map.push(ForwardEntry {
            semibrick: members,
            wide_subcat: closure,
        });
    }

    // Injectivity of the forward assignment.
    for i in 0..forward_map.len() {
        for j in i + 1..forward_map.len() {
            if forward_map[i].wide_subcat == forward_map[j].wide_subcat {
                failures.push(RoundtripFailure {
                    kind: "forward_not_injective".into(),
                    semibrick: Some(forward_map[j].semibrick.clone()),
                    subcat: Some(forward_map[j].wide_subcat.clone()),
                    detail: format!(
                        "same closure as semibrick {:?}",
                        forward_map[i].semibrick.iter().map(|c| c.index()).collect::<Vec<_>>()
                    ),
                });
            }
        }
    }

    // Backward: independent subset search for length wide candidates.
    let candidates = enumerate_sum_closed(u)?;
    let surviving: Vec<(BTreeSet<IsoClassId>, BTreeSet<IsoClassId>, Vec<TruncationEvent>)> =
        candidates
            .par_iter()
            .map(|set| -> Result<_> {
                let cand = SubcatCandidate::new(u.clone(), set.clone())?;
                let report = is_wide(u, ctx, &cand)?;
                if !report.passed() || !is_length(u, ctx, &cand)? {
                    return Ok(None);
                }
                let s = simples_of(u, ctx, &cand)?;
                Ok(Some((set.clone(), s, report.truncation_events)))
            })
            .collect::<Result<Vec<Option<_>>>>()?
            .into_iter()
            .flatten()
            .collect();

    let mut wide_subcats = Vec::with_capacity(surviving.len());
    let mut backward_map = Vec::with_capacity(surviving.len());
    for (set, s, evs) in surviving {
        events.extend(evs);
        // Backward round trip: the simples must form a semibrick whose
        // closure returns the subcategory.
        if !is_semibrick(u, &s)? {
            failures.push(RoundtripFailure {
                kind: "backward_simples_not_semibrick".into(),
                semibrick: Some(s.clone()),
                subcat: Some(set.clone()),
                detail: "simples of a length wide subcategory must be a semibrick".into(),
            });
        } else {
            let gens = BrickSet::new(u.clone(), s.clone())?;
            let closure = filt_closure(u, ctx, &gens)?;
            if closure != set {
                failures.push(RoundtripFailure {
                    kind: "backward_roundtrip".into(),
                    semibrick: Some(s.clone()),
                    subcat: Some(set.clone()),
                    detail: format!(
                        "closure of the simples is {:?}",
                        closure.iter().map(|c| c.index()).collect::<Vec<_>>()
                    ),
                });
            }
        }
        backward_map.push(BackwardEntry {
            wide_subcat: set.clone(),
            semibrick: s,
        });
        wide_subcats.push(set);
    }

    // The two enumerations must agree exactly.
    for img in &images {
        if !wide_subcats.contains(img) {
            failures.push(RoundtripFailure {
                kind: "closure_missed_by_search".into(),
                semibrick: None,
                subcat: Some(img.clone()),
                detail: "forward image not found by the subset search".into(),
            });
        }
    }
    for w in &wide_subcats {
        if !images.contains(w) {
            failures.push(RoundtripFailure {
                kind: "unmatched_wide_subcat".into(),
                semibrick: None,
                subcat: Some(w.clone()),
                detail: "length wide subcategory is not the closure of any semibrick".into(),
            });
        }
    }

    // Truncation events are resolved by construction: skipped middles and
    // sums have out-of-window dims. An in-window event would mean a class
    // was silently dropped, and no verdict may hide that.
    for e in &events {
        if u.within_bound(&e.middle_dims) {
            failures.push(RoundtripFailure {
                kind: "in_window_truncation".into(),
                semibrick: None,
                subcat: None,
                detail: format!("event at site {} has in-window dims {:?}", e.site, e.middle_dims),
            });
        }
    }

    Ok(BijectionReport {
        verdict: Verdict::from_bool(failures.is_empty()),
        universe: universe_descriptor(u),
        ctx: ctx_descriptor(ctx),
        semibricks: semibricks.iter().map(|sb| sb.members().clone()).collect(),
        wide_subcats,
        forward_map,
        backward_map,
        roundtrip_failures: failures,
        truncation_events: events.into_iter().collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SimpleHomWitness {
    pub source: IsoClassId,
    pub target: IsoClassId,
    pub morphism: Mor,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub verdict: Verdict,
    pub universe: UniverseDescriptor,
    pub ctx: CtxDescriptor,
    pub simples: BTreeSet<IsoClassId>,
    pub abelian: bool,
    pub simples_semibrick: bool,
    pub non_admissible: Option<SimpleHomWitness>,
    pub simple_non_iso: Option<SimpleHomWitness>,
    pub failures: Vec<String>,
}

/// Verifies that the context is abelian exactly when its simples form a
/// semibrick. Requires the ambient context to be length; when both sides
/// are false, a nonzero non-isomorphism between simples is exhibited.
pub fn verify_corollary(u: &Arc<Universe>, ctx: &ExactCtx) -> Result<CorollaryReport> {
    let s = simples(u, ctx)?;
    let gens = BrickSet::new(u.clone(), s.clone())?;
    let closure = filt_closure(u, ctx, &gens)?;
    let required: Vec<IsoClassId> = match ctx.subuniverse() {
        Some(su) => su.members().iter().copied().collect(),
        None => u.ids().collect(),
    };
    if let Some(missing) = required.iter().find(|id| !closure.contains(id)) {
        return Err(Error::NotLength(format!(
            "class {} is not filtered by the context's simples",
            missing.index()
        )));
    }

    let abelian_report = is_abelian(u, ctx)?;
    let lhs = abelian_report.holds;
    let rhs = is_semibrick(u, &s)?;

    let mut failures = Vec::new();
    if lhs != rhs {
        failures.push(format!(
            "equivalence broken: abelian = {lhs}, simples semibrick = {rhs}"
        ));
    }

    // When both sides fail, the failure of Hom-orthogonality must be
    // witnessed by an explicit nonzero non-isomorphism between simples.
    let mut simple_non_iso = None;
    if !lhs && !rhs {
        'outer: for &x in &s {
            for &y in &s {
                let h = u.hom(x, y);
                for phi in h.elements() {
                    if phi.is_zero() || (x == y && phi.is_invertible()) {
                        continue;
                    }
                    simple_non_iso = Some(SimpleHomWitness {
                        source: x,
                        target: y,
                        morphism: phi,
                    });
                    break 'outer;
                }
            }
        }
        if simple_non_iso.is_none() {
            failures.push("both sides false yet no nonzero non-isomorphism between simples".into());
        }
    }

    Ok(CorollaryReport {
        verdict: Verdict::from_bool(failures.is_empty()),
        universe: universe_descriptor(u),
        ctx: ctx_descriptor(ctx),
        simples: s,
        abelian: lhs,
        simples_semibrick: rhs,
        non_admissible: abelian_report.witness.map(|w| SimpleHomWitness {
            source: w.source,
            target: w.target,
            morphism: w.morphism,
        }),
        simple_non_iso,
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub verdict: Verdict,
    pub universe: UniverseDescriptor,
    pub simples: BTreeSet<IsoClassId>,
    pub standard_closure_is_everything: bool,
    pub split_closure: BTreeSet<IsoClassId>,
    pub split_closure_matches_semisimples: bool,
    pub semisimples_proper: bool,
    pub standard_extension_failures: Vec<ExtensionFailure>,
    pub split_wide_passed: Option<bool>,
    pub failures: Vec<String>,
    pub truncation_events: Vec<TruncationEvent>,
}

/// Demonstrates that filtration closures depend on the exact structure:
/// the standard simples filter everything under the standard structure but
/// only the semisimple classes under the split one, and the semisimple
/// classes fail extension closure under the standard structure while being
/// wide under the split one. On a semisimple universe the two closures
/// coincide and the failure assertions are skipped as vacuous.
pub fn run_split_example(u: &Arc<Universe>) -> Result<ExampleReport> {
    let standard = ExactCtx::standard();
    let split = ExactCtx::split();
    let mut failures = Vec::new();

    let s = simples(u, &standard)?;
    if !is_semibrick(u, &s)? {
        failures.push("standard simples are not a semibrick".into());
    }
    let gens = BrickSet::new(u.clone(), s.clone())?;

    let standard_closure = filt_closure(u, &standard, &gens)?;
    let everything: BTreeSet<IsoClassId> = u.ids().collect();
    let standard_closure_is_everything = standard_closure == everything;
    if !standard_closure_is_everything {
        failures.push("standard closure of the simples misses some class".into());
    }

    // Independent semisimple enumeration: all in-window direct sums of
    // simples, by saturation.
    let mut semi: BTreeSet<IsoClassId> = [u.zero_class()].into_iter().collect();
    let mut queue: Vec<IsoClassId> = vec![u.zero_class()];
    while let Some(c) = queue.pop() {
        for &si in &s {
            if let Some(n) = u.sum_class(c, si)? {
                if semi.insert(n) {
                    queue.push(n);
                }
            }
        }
    }

    let split_closure = filt_closure(u, &split, &gens)?;
    let split_closure_matches_semisimples = split_closure == semi;
    if !split_closure_matches_semisimples {
        failures.push("split closure differs from the semisimple classes".into());
    }

    let semisimples_proper = semi != everything;
    let mut standard_extension_failures = Vec::new();
    let mut split_wide_passed = None;
    let mut events: BTreeSet<TruncationEvent> = BTreeSet::new();
    if semisimples_proper {
        let cand = SubcatCandidate::new(u.clone(), semi.clone())?;
        let standard_report = is_wide(u, &standard, &cand)?;
        events.extend(standard_report.truncation_events.iter().cloned());
        if standard_report.condition_a() {
            failures.push(
                "semisimple classes unexpectedly extension-closed under the standard structure"
                    .into(),
            );
        }
        standard_extension_failures = standard_report.extension_failures;
        let split_report = is_wide(u, &split, &cand)?;
        events.extend(split_report.truncation_events.iter().cloned());
        split_wide_passed = Some(split_report.passed());
        if !split_report.passed() {
            failures.push("semisimple classes are not wide under the split structure".into());
        }
    }

    Ok(ExampleReport {
        verdict: Verdict::from_bool(failures.is_empty()),
        universe: universe_descriptor(u),
        simples: s,
        standard_closure_is_everything,
        split_closure,
        split_closure_matches_semisimples,
        semisimples_proper,
        standard_extension_failures,
        split_wide_passed,
        failures,
        truncation_events: events.into_iter().collect(),
    })
}
