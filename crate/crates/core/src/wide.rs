//! Wide subcategory checks over a finite window of iso classes.
//!
//! A candidate set of classes is wide when (a) any conflation with two
//! terms inside has its third term inside, and (b) every morphism between
//! members factors through a member image via a deflation followed by an
//! inflation. Wideness makes the restriction an exact category of its own;
//! lengthness then asks that its simples filter everything.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Conflation, ExactCtx};
use crate::filt::filt_closure;
use crate::repcat::Mor;
use crate::universe::{IsoClassId, TruncationEvent, Universe};

/// A set of iso classes proposed as a subcategory: must contain zero and
/// be closed under direct sums within the window. Violations are reported
/// at construction, never repaired. Sums leaving the window are recorded
/// as truncation events instead.
#[derive(Clone)]
pub struct SubcatCandidate {
    universe: Arc<Universe>,
    members: BTreeSet<IsoClassId>,
    truncation_events: Vec<TruncationEvent>,
}

impl SubcatCandidate {
    pub fn new(universe: Arc<Universe>, members: BTreeSet<IsoClassId>) -> Result<Self> {
        for &id in &members {
            universe.ensure_id(id)?;
        }
        if !members.contains(&universe.zero_class()) {
            return Err(Error::InvalidCandidate(
                "candidate must contain the zero class".into(),
            ));
        }
        let mut events = BTreeSet::new();
        let ids: Vec<IsoClassId> = members.iter().copied().collect();
        for (i, &x) in ids.iter().enumerate() {
            for &z in &ids[i..] {
                match universe.sum_class(x, z)? {
                    Some(c) => {
                        if !members.contains(&c) {
                            return Err(Error::InvalidCandidate(format!(
                                "not sum-closed: classes {} + {} give class {} outside the set",
                                x.index(),
                                z.index(),
                                c.index()
                            )));
                        }
                    }
                    None => {
                        let dims: Vec<usize> = universe
                            .rep(x)
                            .dims()
                            .iter()
                            .zip(universe.rep(z).dims())
                            .map(|(a, b)| a + b)
                            .collect();
                        events.insert(TruncationEvent {
                            left: x,
                            right: z,
                            middle_dims: dims,
                            site: "sum_closure".into(),
                        });
                    }
                }
            }
        }
        Ok(SubcatCandidate {
            universe,
            members,
            truncation_events: events.into_iter().collect(),
        })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn members(&self) -> &BTreeSet<IsoClassId> {
        &self.members
    }

    pub fn contains(&self, id: IsoClassId) -> bool {
        self.members.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sums that could not be checked because they leave the window.
    pub fn truncation_events(&self) -> &[TruncationEvent] {
        &self.truncation_events
    }
}

impl std::fmt::Debug for SubcatCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set()
            .entries(self.members.iter().map(|c| c.index()))
            .finish()
    }
}

impl Serialize for SubcatCandidate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(1))?;
        let ids: Vec<usize> = self.members.iter().map(|c| c.index()).collect();
        map.serialize_entry("members", &ids)?;
        map.end()
    }
}

/// A conflation with exactly two terms inside the candidate; the third
/// term's class escaped.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionFailure {
    pub left: IsoClassId,
    pub middle: IsoClassId,
    pub right: IsoClassId,
    pub missing: String,
    pub conflation: Conflation,
}

/// A morphism between members whose image factorization leaves the
/// candidate or is not deflation-then-inflation in the context.
#[derive(Clone, Debug, Serialize)]
pub struct FactorizationFailure {
    pub source: IsoClassId,
    pub target: IsoClassId,
    pub morphism: Mor,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WideReport {
    pub members: Vec<IsoClassId>,
    pub extension_failures: Vec<ExtensionFailure>,
    pub factorization_failures: Vec<FactorizationFailure>,
    pub truncation_events: Vec<TruncationEvent>,
}

impl WideReport {
    /// Two-out-of-three closure under conflations.
    pub fn condition_a(&self) -> bool {
        self.extension_failures.is_empty()
    }

    /// Morphisms factor through member images.
    pub fn condition_b(&self) -> bool {
        self.factorization_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.condition_a() && self.condition_b()
    }
}

/// Decides wideness of the candidate in the given context, reporting every
/// failing conflation and morphism.
///
/// Condition (a) scans conflations between all class pairs of the window;
/// any conflation among window objects shows up there, and membership only
/// depends on the three term classes, so one witness per middle class is
/// exhaustive. Pairs of members whose extensions leave the window are
/// recorded as truncation events; such extensions are not window objects,
/// so they are outside the quantification, not silently dropped.
pub fn is_wide(u: &Arc<Universe>, ctx: &ExactCtx, w: &SubcatCandidate) -> Result<WideReport> {
    debug_assert!(Arc::ptr_eq(u, w.universe()), "candidate from another universe");
    let ids: Vec<IsoClassId> = u.ids().collect();
    let pairs: Vec<(IsoClassId, IsoClassId)> = ids
        .iter()
        .flat_map(|&x| ids.iter().map(move |&z| (x, z)))
        .collect();

    let scanned: Vec<(Vec<ExtensionFailure>, Vec<TruncationEvent>)> = pairs
        .par_iter()
        .map(|&(x, z)| -> Result<_> {
            let mut fails = Vec::new();
            let mut events = Vec::new();
            match u.conflation_middles(ctx, x, z) {
                Ok(found) => {
                    for mid in found {
                        let inside = [w.contains(x), w.contains(mid), w.contains(z)];
                        if inside.iter().filter(|&&b| b).count() == 2 {
                            let missing = if !inside[0] {
                                "left"
                            } else if !inside[1] {
                                "middle"
                            } else {
                                "right"
                            };
                            // Witnesses are only materialized for the report.
                            let conf = u
                                .conflations_between(ctx, x, z)?
                                .into_iter()
                                .find(|(m, _)| *m == mid)
                                .map(|(_, c)| c)
                                .expect("middle class came from the same scan");
                            fails.push(ExtensionFailure {
                                left: x,
                                middle: mid,
                                right: z,
                                missing: missing.into(),
                                conflation: conf,
                            });
                        }
                    }
                }
                Err(Error::OutOfBounds { dims, .. }) => {
                    if w.contains(x) && w.contains(z) {
                        events.push(TruncationEvent {
                            left: x,
                            right: z,
                            middle_dims: dims,
                            site: "wide_extension".into(),
                        });
                    }
                }
                Err(e) => return Err(e),
            }
            Ok((fails, events))
        })
        .collect::<Result<_>>()?;

    let mut extension_failures = Vec::new();
    let mut truncation_events: Vec<TruncationEvent> = w.truncation_events.clone();
    for (fails, events) in scanned {
        extension_failures.extend(fails);
        truncation_events.extend(events);
    }

    let members: Vec<IsoClassId> = w.members.iter().copied().collect();
    let su = ctx.subuniverse();
    let admits = |id: IsoClassId| su.map_or(true, |s| s.contains(id));
    let mut factorization_failures = Vec::new();
    for &x in &members {
        for &y in &members {
            let profile = u.factorization_profile(ctx.structure(), x, y)?;
            for (i, f) in profile.iter().enumerate() {
                // Context admission of the witnessing conflations is pure
                // membership on top of the structure-level facts.
                let defl = f.onto_deflation && admits(f.kernel) && admits(x) && admits(f.image);
                let infl = f.incl_inflation && admits(f.image) && admits(y) && admits(f.cokernel);
                let reason = if !w.contains(f.image) {
                    Some(format!("image class {} is not a member", f.image.index()))
                } else if !defl {
                    Some("projection onto the image is not a deflation".into())
                } else if !infl {
                    Some("inclusion of the image is not an inflation".into())
                } else {
                    None
                };
                if let Some(reason) = reason {
                    factorization_failures.push(FactorizationFailure {
                        source: x,
                        target: y,
                        morphism: u.hom(x, y).element_at(i as u128),
                        reason,
                    });
                }
            }
        }
    }

    Ok(WideReport {
        members,
        extension_failures,
        factorization_failures,
        truncation_events,
    })
}

/// Simple classes of the candidate, computed in the context restricted to
/// its members: a member is simple when no admitted conflation inside the
/// candidate has both outer terms nonzero.
pub fn simples_of(
    u: &Arc<Universe>,
    ctx: &ExactCtx,
    w: &SubcatCandidate,
) -> Result<BTreeSet<IsoClassId>> {
    let restricted = ctx.restricted_to(u.clone(), w.members.clone())?;
    crate::bricks::simples(u, &restricted)
}

/// Is every member filtered by the candidate's simples, inside the
/// candidate? Callers should have passed `is_wide` first; the restriction
/// is only exact for wide candidates.
pub fn is_length(u: &Arc<Universe>, ctx: &ExactCtx, w: &SubcatCandidate) -> Result<bool> {
    let simples = simples_of(u, ctx, w)?;
    let restricted = ctx.restricted_to(u.clone(), w.members.clone())?;
    let gens = crate::bricks::BrickSet::new(u.clone(), simples)?;
    let closure = filt_closure(u, &restricted, &gens)?;
    Ok(w.members.iter().all(|id| closure.contains(id)))
}

/// A morphism that is not deflation-then-inflation in the context.
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityWitness {
    pub source: IsoClassId,
    pub target: IsoClassId,
    pub morphism: Mor,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub holds: bool,
    pub witness: Option<AdmissibilityWitness>,
}

/// Does the context present an abelian category? Equivalent to every
/// morphism between context objects being admissible; decided by
/// exhaustive scan in class order, returning the first counterexample.
pub fn is_abelian(u: &Arc<Universe>, ctx: &ExactCtx) -> Result<AdmissibilityReport> {
    let ids: Vec<IsoClassId> = match ctx.subuniverse() {
        Some(su) => su.members().iter().copied().collect(),
        None => u.ids().collect(),
    };
    let su = ctx.subuniverse();
    let admits = |id: IsoClassId| su.map_or(true, |s| s.contains(id));
    for &x in &ids {
        for &y in &ids {
            let profile = u.factorization_profile(ctx.structure(), x, y)?;
            for (i, f) in profile.iter().enumerate() {
                let defl = f.onto_deflation && admits(f.kernel) && admits(x) && admits(f.image);
                let infl = f.incl_inflation && admits(f.image) && admits(y) && admits(f.cokernel);
                if !(defl && infl) {
                    return Ok(AdmissibilityReport {
                        holds: false,
                        witness: Some(AdmissibilityWitness {
                            source: x,
                            target: y,
                            morphism: u.hom(x, y).element_at(i as u128),
                        }),
                    });
                }
            }
        }
    }
    Ok(AdmissibilityReport {
        holds: true,
        witness: None,
    })
}
