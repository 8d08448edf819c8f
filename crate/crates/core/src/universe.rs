//! Finite, dimension-bounded universes of iso-class representatives.
//!
//! Every categorical question in this crate is decided by quantifying over
//! such a universe: one representative per isomorphism class of
//! representations with dims below a per-vertex bound. Enumeration order is
//! fixed (dimension vectors lexicographic, matrices in integer-counting
//! order), so a universe is reproducible bit for bit.
//!
//! The bound is also the honesty boundary: operations whose intermediate
//! object would leave the window answer `OutOfBounds`, and callers surface
//! those as truncation events instead of silently dropping them.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{has_retraction, is_conflation, is_inflation, Conflation, ExactCtx, ExactStructure};
use crate::ffmat::{FpMatrix, Prime, DEFAULT_ENUMERATION_CEILING};
use crate::repcat::{
    cokernel_of, direct_sum, hom_space, image_of, is_isomorphic, kernel_of, HomSpace,
    OrderedPairs, Quiver, Rep,
};

/// Search budgets. The enumeration ceiling caps p^d element scans; the
/// universe budget caps the total number of candidate matrix tuples
/// visited during enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub enumeration_ceiling: u64,
    pub universe_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_ceiling: DEFAULT_ENUMERATION_CEILING,
            universe_budget: 1 << 22,
        }
    }
}

/// Opaque index of an isomorphism class within one universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct IsoClassId(pub usize);

impl IsoClassId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A skipped check whose witness object would exceed the universe bound.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TruncationEvent {
    pub left: IsoClassId,
    pub right: IsoClassId,
    pub middle_dims: Vec<usize>,
    pub site: String,
}

type ConflationKey = (ExactStructure, usize, usize);

/// Structure-level facts about one morphism of a hom space, indexed by its
/// position in the counting order: its image factorization classes and
/// whether the two halves are a deflation resp. an inflation for the bare
/// structure. Subuniverse admission is just membership of the recorded
/// classes, so restricted contexts reuse the same profile.
#[derive(Clone, Copy, Debug)]
pub struct MorProfile {
    pub image: IsoClassId,
    pub kernel: IsoClassId,
    pub cokernel: IsoClassId,
    pub onto_deflation: bool,
    pub incl_inflation: bool,
}

impl std::fmt::Debug for Universe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Universe")
            .field("quiver", &self.quiver)
            .field("p", &self.p)
            .field("dim_bound", &self.dim_bound)
            .field("class_count", &self.classes.len())
            .finish()
    }
}

pub struct Universe {
    quiver: Arc<Quiver>,
    p: Prime,
    dim_bound: Vec<usize>,
    limits: Limits,
    classes: Vec<Rep>,
    class_memo: RwLock<HashMap<Rep, IsoClassId>>,
    hom_memo: RwLock<HashMap<(usize, usize), Arc<HomSpace>>>,
    conflation_memo: RwLock<HashMap<ConflationKey, Arc<Vec<(IsoClassId, Conflation)>>>>,
    sum_memo: RwLock<HashMap<(usize, usize), Option<IsoClassId>>>,
    inflation_memo: RwLock<HashMap<ConflationKey, Arc<Vec<Option<IsoClassId>>>>>,
    factor_memo: RwLock<HashMap<ConflationKey, Arc<Vec<MorProfile>>>>,
}

/// All dimension vectors below `bound`, lexicographic (first vertex most
/// significant). Starts with the all-zero vector.
fn dim_vectors(bound: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &b in bound {
        let mut next = Vec::with_capacity(out.len() * (b + 1));
        for prefix in &out {
            for d in 0..=b {
                let mut v = prefix.clone();
                v.push(d);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Number of matrix tuples for one dimension vector: Π over arrows of
/// p^(dims[target]·dims[source]). `None` on overflow.
fn tuple_count(quiver: &Quiver, p: Prime, dims: &[usize]) -> Option<u128> {
    let mut total: u128 = 1;
    for a in 0..quiver.arrows().len() {
        let (s, t) = quiver.arrow_endpoints(a);
        let exp = u32::try_from(dims[t] * dims[s]).ok()?;
        let c = u128::from(p.get()).checked_pow(exp)?;
        total = total.checked_mul(c)?;
    }
    Some(total)
}

/// The `idx`-th matrix tuple for a dimension vector, counting entry by
/// entry in base p, arrow 0 least significant.
fn tuple_at(quiver: &Arc<Quiver>, p: Prime, dims: &[usize], idx: u128) -> Rep {
    let mut rem = idx;
    let mats: Vec<FpMatrix> = (0..quiver.arrows().len())
        .map(|a| {
            let (s, t) = quiver.arrow_endpoints(a);
            let (rows, cols) = (dims[t], dims[s]);
            let mut m = FpMatrix::zero(p, rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, (rem % u128::from(p.get())) as u32);
                    rem /= u128::from(p.get());
                }
            }
            m
        })
        .collect();
    Rep::new(quiver.clone(), p, dims.to_vec(), mats).expect("constructed to shape")
}

/// Builds the universe for a quiver, prime, and per-vertex dimension bound.
/// The total tuple count is estimated up front and refused when it exceeds
/// the budget.
pub fn enumerate_universe(
    quiver: Arc<Quiver>,
    p: Prime,
    dim_bound: Vec<usize>,
    limits: Limits,
) -> Result<Universe> {
    assert_eq!(
        dim_bound.len(),
        quiver.vertices().len(),
        "one bound per vertex"
    );
    let vectors = dim_vectors(&dim_bound);
    let mut estimate: u128 = 0;
    for dims in &vectors {
        let c = tuple_count(&quiver, p, dims).ok_or(Error::BudgetExceeded {
            estimate: u128::MAX,
            budget: limits.universe_budget,
        })?;
        estimate = estimate.checked_add(c).ok_or(Error::BudgetExceeded {
            estimate: u128::MAX,
            budget: limits.universe_budget,
        })?;
    }
    if estimate > u128::from(limits.universe_budget) {
        return Err(Error::BudgetExceeded {
            estimate,
            budget: limits.universe_budget,
        });
    }

    // Reps with different dimension vectors are never isomorphic, so
    // deduplication is per-bucket and buckets are independent.
    let buckets: Vec<Vec<Rep>> = vectors
        .par_iter()
        .map(|dims| {
            let count = tuple_count(&quiver, p, dims).expect("checked above");
            let mut bucket: Vec<Rep> = Vec::new();
            for idx in 0..count {
                let cand = tuple_at(&quiver, p, dims, idx);
                let mut known = false;
                for rep in &bucket {
                    if is_isomorphic(&cand, rep, limits.enumeration_ceiling)?.is_some() {
                        known = true;
                        break;
                    }
                }
                if !known {
                    bucket.push(cand);
                }
            }
            Ok(bucket)
        })
        .collect::<Result<_>>()?;

    let classes: Vec<Rep> = buckets.into_iter().flatten().collect();
    assert!(classes[0].is_zero(), "lex order puts the zero rep first");
    Ok(Universe {
        quiver,
        p,
        dim_bound,
        limits,
        classes,
        class_memo: RwLock::new(HashMap::new()),
        hom_memo: RwLock::new(HashMap::new()),
        conflation_memo: RwLock::new(HashMap::new()),
        sum_memo: RwLock::new(HashMap::new()),
        inflation_memo: RwLock::new(HashMap::new()),
        factor_memo: RwLock::new(HashMap::new()),
    })
}

impl Universe {
    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn dim_bound(&self) -> &[usize] {
        &self.dim_bound
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the zero class is always present
    }

    pub fn classes(&self) -> &[Rep] {
        &self.classes
    }

    pub fn rep(&self, id: IsoClassId) -> &Rep {
        &self.classes[id.0]
    }

    pub fn zero_class(&self) -> IsoClassId {
        IsoClassId(0)
    }

    pub fn ids(&self) -> impl Iterator<Item = IsoClassId> {
        (0..self.len()).map(IsoClassId)
    }

    pub fn nonzero_ids(&self) -> impl Iterator<Item = IsoClassId> {
        (1..self.len()).map(IsoClassId)
    }

    pub fn ensure_id(&self, id: IsoClassId) -> Result<()> {
        if id.0 >= self.len() {
            return Err(Error::UnknownClass {
                id: id.0,
                count: self.len(),
            });
        }
        Ok(())
    }

    pub fn within_bound(&self, dims: &[usize]) -> bool {
        dims.iter().zip(&self.dim_bound).all(|(d, b)| d <= b)
    }

    /// The class of an arbitrary representation, or `OutOfBounds` when its
    /// dims exceed the window. This is the truncation boundary: callers
    /// must surface the error, never swallow it silently.
    pub fn class_of(&self, x: &Rep) -> Result<IsoClassId> {
        if x.quiver() != &self.quiver {
            return Err(Error::QuiverMismatch);
        }
        if x.p() != self.p {
            return Err(Error::FieldMismatch {
                left: self.p.get(),
                right: x.p().get(),
            });
        }
        if !self.within_bound(x.dims()) {
            return Err(Error::OutOfBounds {
                dims: x.dims().to_vec(),
                bound: self.dim_bound.clone(),
            });
        }
        if let Some(&id) = self.class_memo.read().expect("not poisoned").get(x) {
            return Ok(id);
        }
        let mut found = None;
        for (i, rep) in self.classes.iter().enumerate() {
            if rep.dims() != x.dims() {
                continue;
            }
            if is_isomorphic(x, rep, self.limits.enumeration_ceiling)?.is_some() {
                found = Some(IsoClassId(i));
                break;
            }
        }
        let id = found.expect("every in-bound rep matches exactly one representative");
        self.class_memo
            .write()
            .expect("not poisoned")
            .insert(x.clone(), id);
        Ok(id)
    }

    /// Memoized Hom space between two class representatives.
    pub fn hom(&self, x: IsoClassId, y: IsoClassId) -> Arc<HomSpace> {
        if let Some(h) = self.hom_memo.read().expect("not poisoned").get(&(x.0, y.0)) {
            return h.clone();
        }
        let h = Arc::new(hom_space(self.rep(x), self.rep(y)).expect("same universe"));
        self.hom_memo
            .write()
            .expect("not poisoned")
            .entry((x.0, y.0))
            .or_insert(h)
            .clone()
    }

    /// Class of the direct sum, or `None` when it exceeds the bound.
    pub fn sum_class(&self, x: IsoClassId, z: IsoClassId) -> Result<Option<IsoClassId>> {
        self.ensure_id(x)?;
        self.ensure_id(z)?;
        let key = (x.0.min(z.0), x.0.max(z.0));
        if let Some(&hit) = self.sum_memo.read().expect("not poisoned").get(&key) {
            return Ok(hit);
        }
        let ds = direct_sum(self.rep(x), self.rep(z)).expect("same universe");
        let result = if self.within_bound(ds.sum.dims()) {
            Some(self.class_of(&ds.sum)?)
        } else {
            None
        };
        self.sum_memo
            .write()
            .expect("not poisoned")
            .insert(key, result);
        Ok(result)
    }

    /// All conflations 0 -> X -> Y -> Z -> 0 admitted by the context, one
    /// witness per middle-term class, in class order.
    ///
    /// When dims(X)+dims(Z) leaves the bound the middle cannot exist in
    /// the window and the call answers `OutOfBounds`; callers record a
    /// truncation event. Since any conflation's middle has exactly the
    /// summed dims, no admissible middle is ever silently missed.
    pub fn conflations_between(
        &self,
        ctx: &ExactCtx,
        x: IsoClassId,
        z: IsoClassId,
    ) -> Result<Vec<(IsoClassId, Conflation)>> {
        self.ensure_id(x)?;
        self.ensure_id(z)?;
        let sum: Vec<usize> = self
            .rep(x)
            .dims()
            .iter()
            .zip(self.rep(z).dims())
            .map(|(a, b)| a + b)
            .collect();
        if !self.within_bound(&sum) {
            return Err(Error::OutOfBounds {
                dims: sum,
                bound: self.dim_bound.clone(),
            });
        }
        if let Some(su) = ctx.subuniverse() {
            debug_assert!(
                su.universe().quiver() == &self.quiver && su.universe().len() == self.len(),
                "subuniverse built over a different universe"
            );
            if !(su.contains(x) && su.contains(z)) {
                return Ok(Vec::new());
            }
        }
        let unrestricted = self.conflations_unrestricted(ctx.structure(), x, z, &sum)?;
        let filtered = unrestricted
            .iter()
            .filter(|(mid, _)| ctx.subuniverse().map_or(true, |su| su.contains(*mid)))
            .cloned()
            .collect();
        Ok(filtered)
    }

    /// Middle-term classes of `conflations_between`, without cloning the
    /// witness morphisms. Same admission rules and errors.
    pub fn conflation_middles(
        &self,
        ctx: &ExactCtx,
        x: IsoClassId,
        z: IsoClassId,
    ) -> Result<Vec<IsoClassId>> {
        self.ensure_id(x)?;
        self.ensure_id(z)?;
        let sum: Vec<usize> = self
            .rep(x)
            .dims()
            .iter()
            .zip(self.rep(z).dims())
            .map(|(a, b)| a + b)
            .collect();
        if !self.within_bound(&sum) {
            return Err(Error::OutOfBounds {
                dims: sum,
                bound: self.dim_bound.clone(),
            });
        }
        if let Some(su) = ctx.subuniverse() {
            if !(su.contains(x) && su.contains(z)) {
                return Ok(Vec::new());
            }
        }
        let unrestricted = self.conflations_unrestricted(ctx.structure(), x, z, &sum)?;
        Ok(unrestricted
            .iter()
            .map(|(mid, _)| *mid)
            .filter(|mid| ctx.subuniverse().map_or(true, |su| su.contains(*mid)))
            .collect())
    }

    /// Per element of Hom(s, x) in counting order: the cokernel class when
    /// the morphism is an inflation for the bare structure, None otherwise.
    /// Memoized; a restricted context additionally needs (s, x, cokernel)
    /// to be members.
    pub fn inflation_profile(
        &self,
        structure: ExactStructure,
        s: IsoClassId,
        x: IsoClassId,
    ) -> Result<Arc<Vec<Option<IsoClassId>>>> {
        self.ensure_id(s)?;
        self.ensure_id(x)?;
        let key = (structure, s.0, x.0);
        if let Some(hit) = self.inflation_memo.read().expect("not poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let h = self.hom(s, x);
        let ceiling = self.limits.enumeration_ceiling;
        if h.count() > u128::from(ceiling) {
            return Err(Error::EnumerationTooLarge {
                count: h.count(),
                ceiling,
            });
        }
        let ctx = ExactCtx::new(structure);
        let mut out = Vec::with_capacity(h.count() as usize);
        for phi in h.elements() {
            let entry = if is_inflation(&ctx, &phi) {
                let (coker, _) = cokernel_of(&phi);
                Some(
                    self.class_of(&coker)
                        .expect("cokernel dims shrink, staying within the bound"),
                )
            } else {
                None
            };
            out.push(entry);
        }
        let arc = Arc::new(out);
        self.inflation_memo
            .write()
            .expect("not poisoned")
            .insert(key, arc.clone());
        Ok(arc)
    }

    /// Per element of Hom(x, y) in counting order: image factorization
    /// classes and whether its halves are a deflation resp. inflation for
    /// the bare structure. Memoized.
    pub fn factorization_profile(
        &self,
        structure: ExactStructure,
        x: IsoClassId,
        y: IsoClassId,
    ) -> Result<Arc<Vec<MorProfile>>> {
        self.ensure_id(x)?;
        self.ensure_id(y)?;
        let key = (structure, x.0, y.0);
        if let Some(hit) = self.factor_memo.read().expect("not poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let h = self.hom(x, y);
        let ceiling = self.limits.enumeration_ceiling;
        if h.count() > u128::from(ceiling) {
            return Err(Error::EnumerationTooLarge {
                count: h.count(),
                ceiling,
            });
        }
        let ctx = ExactCtx::new(structure);
        let mut out = Vec::with_capacity(h.count() as usize);
        for phi in h.elements() {
            let (img, onto, incl) = image_of(&phi);
            let (ker, kincl) = kernel_of(&onto);
            let (cok, cproj) = cokernel_of(&incl);
            // All three have dims bounded by x resp. y, so the lookups
            // stay within the window.
            let image = self.class_of(&img).expect("image dims stay within the bound");
            let kernel = self.class_of(&ker).expect("kernel dims stay within the bound");
            let cokernel = self
                .class_of(&cok)
                .expect("cokernel dims stay within the bound");
            out.push(MorProfile {
                image,
                kernel,
                cokernel,
                onto_deflation: is_conflation(&ctx, &kincl, &onto),
                incl_inflation: is_conflation(&ctx, &incl, &cproj),
            });
        }
        let arc = Arc::new(out);
        self.factor_memo
            .write()
            .expect("not poisoned")
            .insert(key, arc.clone());
        Ok(arc)
    }

    /// Conflation search without the subuniverse filter, memoized per
    /// (structure, x, z).
    ///
    /// For a fixed vertexwise-injective f the exact completions g are
    /// precisely the compositions of the canonical cokernel projection
    /// with an isomorphism coker(f) -> Z, so the search enumerates f only
    /// and tests the cokernel class. Split structure additionally needs f
    /// to admit a retraction, which forces the whole sequence to split.
    fn conflations_unrestricted(
        &self,
        structure: ExactStructure,
        x: IsoClassId,
        z: IsoClassId,
        sum: &[usize],
    ) -> Result<Arc<Vec<(IsoClassId, Conflation)>>> {
        let key = (structure, x.0, z.0);
        if let Some(hit) = self.conflation_memo.read().expect("not poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let ceiling = self.limits.enumeration_ceiling;
        let bare = ExactCtx::new(structure);
        let mut out = Vec::new();
        for y in self.ids() {
            if self.rep(y).dims() != sum {
                continue;
            }
            let hf = self.hom(x, y);
            if hf.count() > u128::from(ceiling) {
                return Err(Error::EnumerationTooLarge {
                    count: hf.count(),
                    ceiling,
                });
            }
            let mut witness = None;
            for f in hf.elements() {
                let injective = (0..sum.len()).all(|v| f.comp(v).rank() == self.rep(x).dims()[v]);
                if !injective {
                    continue;
                }
                if structure == ExactStructure::Split && !has_retraction(&f) {
                    continue;
                }
                let (coker, proj) = cokernel_of(&f);
                if let Some(theta) = is_isomorphic(&coker, self.rep(z), ceiling)? {
                    let g = proj.then(&theta).expect("endpoints match");
                    let c = Conflation::new(f, g).expect("exact by construction");
                    debug_assert!(is_conflation(&bare, c.f(), c.g()));
                    witness = Some(c);
                    break;
                }
            }
            if let Some(c) = witness {
                out.push((y, c));
            }
        }
        let out = Arc::new(out);
        Ok(self
            .conflation_memo
            .write()
            .expect("not poisoned")
            .entry(key)
            .or_insert(out)
            .clone())
    }
}

impl Serialize for Universe {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(5))?;
        map.serialize_entry("quiver", self.quiver.as_ref())?;
        map.serialize_entry("p", &self.p)?;
        let bound: Vec<(String, usize)> = self
            .quiver
            .vertices()
            .iter()
            .zip(&self.dim_bound)
            .map(|(v, &b)| (v.to_string(), b))
            .collect();
        map.serialize_entry("dim_bound", &OrderedPairs(&bound))?;
        map.serialize_entry("class_count", &self.len())?;
        map.serialize_entry("classes", &self.classes)?;
        map.end()
    }
}
