//! Bricks, semibricks, and simple objects relative to an exact structure.
//!
//! A brick has every nonzero endomorphism invertible; a semibrick is a set
//! of bricks with vanishing Hom between distinct members. Both notions are
//! independent of the exact structure. Simplicity is not: an object is
//! simple relative to a context when no admitted conflation has both outer
//! terms nonzero.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactCtx;
use crate::repcat::{end_elements, Rep};
use crate::universe::{IsoClassId, Universe};

/// A set of brick classes in one universe.
#[derive(Clone)]
pub struct BrickSet {
    universe: Arc<Universe>,
    members: BTreeSet<IsoClassId>,
}

impl BrickSet {
    /// Wraps a set of class ids without semibrick validation.
    pub fn new(universe: Arc<Universe>, members: BTreeSet<IsoClassId>) -> Result<Self> {
        for &id in &members {
            universe.ensure_id(id)?;
        }
        Ok(BrickSet { universe, members })
    }

    /// Wraps a set of class ids, requiring it to be a semibrick.
    pub fn semibrick(universe: Arc<Universe>, members: BTreeSet<IsoClassId>) -> Result<Self> {
        let s = Self::new(universe, members)?;
        if !is_semibrick(&s.universe, &s.members)? {
            return Err(Error::NotASemibrick(format!(
                "classes {:?} are not pairwise Hom-orthogonal bricks",
                s.members.iter().map(|c| c.index()).collect::<Vec<_>>()
            )));
        }
        Ok(s)
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
}

impl std::fmt::Debug for BrickSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set()
            .entries(self.members.iter().map(|c| c.index()))
            .finish()
    }
}

impl Serialize for BrickSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(1))?;
        let ids: Vec<usize> = self.members.iter().map(|c| c.index()).collect();
        map.serialize_entry("members", &ids)?;
        map.end()
    }
}

/// Is every nonzero endomorphism of X invertible (and X itself nonzero)?
/// Decided by full enumeration of End(X), ceiling-guarded.
pub fn is_brick(x: &Rep) -> Result<bool> {
    if x.is_zero() {
        return Ok(false);
    }
    for e in end_elements(x)? {
        if !e.is_zero() && !e.is_invertible() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Are all members bricks with Hom(S, T) = 0 for every ordered pair of
/// distinct members?
pub fn is_semibrick(u: &Universe, s: &BTreeSet<IsoClassId>) -> Result<bool> {
    for &id in s {
        u.ensure_id(id)?;
        if !is_brick(u.rep(id))? {
            return Ok(false);
        }
    }
    for &a in s {
        for &b in s {
            if a != b && u.hom(a, b).dim() != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All semibricks in the universe, including the empty one, found by
/// backtracking over the brick-compatibility graph. Output order is
/// deterministic: sets extend in increasing class order. Semibricks do
/// not depend on any exact structure, so no context is taken.
pub fn enumerate_semibricks(u: &Arc<Universe>) -> Result<Vec<BrickSet>> {
    let mut bricks = Vec::new();
    for id in u.nonzero_ids() {
        if is_brick(u.rep(id))? {
            bricks.push(id);
        }
    }
    let n = bricks.len();
    let mut compat = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                compat[i][j] =
                    u.hom(bricks[i], bricks[j]).dim() == 0 && u.hom(bricks[j], bricks[i]).dim() == 0;
            }
        }
    }

    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn extend(
        bricks: &[IsoClassId],
        compat: &[Vec<bool>],
        from: usize,
        current: &mut Vec<usize>,
        u: &Arc<Universe>,
        out: &mut Vec<BrickSet>,
    ) {
        let members: BTreeSet<IsoClassId> = current.iter().map(|&i| bricks[i]).collect();
        out.push(BrickSet {
            universe: u.clone(),
            members,
        });
        for next in from..bricks.len() {
            if current.iter().all(|&i| compat[i][next]) {
                current.push(next);
                extend(bricks, compat, next + 1, current, u, out);
                current.pop();
            }
        }
    }
    extend(&bricks, &compat, 0, &mut current, u, &mut out);
    Ok(out)
}

/// Is the class simple relative to the context: nonzero, and no admitted
/// conflation 0 -> L -> X -> N -> 0 with both L, N nonzero?
///
/// Only pairs whose dims sum to dims(X) can produce X as a middle term, so
/// the search never leaves the universe bound and no truncation arises.
pub fn is_simple(u: &Universe, ctx: &ExactCtx, x: IsoClassId) -> Result<bool> {
    u.ensure_id(x)?;
    let xr = u.rep(x);
    if xr.is_zero() {
        return Ok(false);
    }
    let dims = xr.dims();
    for l in u.nonzero_ids() {
        let ld = u.rep(l).dims();
        if ld.iter().zip(dims).any(|(a, b)| a > b) {
            continue;
        }
        let need: Vec<usize> = dims.iter().zip(ld).map(|(d, a)| d - a).collect();
        for n in u.nonzero_ids() {
            if u.rep(n).dims() != need {
                continue;
            }
            if u.conflation_middles(ctx, l, n)?.contains(&x) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All simple classes relative to the context, restricted to the
/// subuniverse when one is present.
pub fn simples(u: &Universe, ctx: &ExactCtx) -> Result<BTreeSet<IsoClassId>> {
    let mut out = BTreeSet::new();
    let candidates: Vec<IsoClassId> = match ctx.subuniverse() {
        Some(su) => su.members().iter().copied().collect(),
        None => u.ids().collect(),
    };
    for id in candidates {
        if is_simple(u, ctx, id)? {
            out.insert(id);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffmat::{FpMatrix, Prime};
    use crate::repcat::{direct_sum, hom_space, Mor, Quiver};
    use crate::universe::{enumerate_universe, Limits};

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    fn a2_universe() -> Arc<Universe> {
        Arc::new(enumerate_universe(Quiver::line(2), p2(), vec![2, 2], Limits::default()).unwrap())
    }

    fn a2_fixtures(u: &Universe) -> (IsoClassId, IsoClassId, IsoClassId) {
        let q = u.quiver().clone();
        let p = u.p();
        let s1 = u.class_of(&Rep::simple(q.clone(), p, 0)).unwrap();
        let s2 = u.class_of(&Rep::simple(q.clone(), p, 1)).unwrap();
        let p1 = u
            .class_of(&Rep::new(q, p, vec![1, 1], vec![FpMatrix::identity(p, 1)]).unwrap())
            .unwrap();
        (s1, s2, p1)
    }

    #[test]
    fn brick_cases() {
        let u = a2_universe();
        let (s1, _, p1) = a2_fixtures(&u);
        assert!(is_brick(u.rep(s1)).unwrap());
        assert!(is_brick(u.rep(p1)).unwrap());
        let ds = direct_sum(u.rep(s1), u.rep(s1)).unwrap();
        assert!(!is_brick(&ds.sum).unwrap());
        assert!(!is_brick(u.rep(u.zero_class())).unwrap());
    }

    #[test]
    fn semibrick_cases() {
        let u = a2_universe();
        let (s1, s2, p1) = a2_fixtures(&u);
        assert!(is_semibrick(&u, &[s1, s2].into_iter().collect()).unwrap());
        // Hom(S2, P1) is nonzero, so {P1, S2} fails.
        assert!(!is_semibrick(&u, &[p1, s2].into_iter().collect()).unwrap());
        assert!(is_semibrick(&u, &BTreeSet::new()).unwrap());
        assert!(BrickSet::semibrick(u.clone(), [p1, s2].into_iter().collect()).is_err());
    }

    #[test]
    fn semibrick_enumeration_matches_subset_oracle() {
        let u = a2_universe();
        // Oracle: collect the bricks, then test all subsets directly.
        let bricks: Vec<IsoClassId> = u
            .nonzero_ids()
            .filter(|&id| is_brick(u.rep(id)).unwrap())
            .collect();
        assert_eq!(bricks.len(), 3);
        let mut expected: Vec<BTreeSet<IsoClassId>> = Vec::new();
        for mask in 0u32..(1 << bricks.len()) {
            let subset: BTreeSet<IsoClassId> = bricks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &b)| b)
                .collect();
            if is_semibrick(&u, &subset).unwrap() {
                expected.push(subset);
            }
        }
        assert_eq!(expected.len(), 5);

        let got = enumerate_semibricks(&u).unwrap();
        assert_eq!(got.len(), 5);
        let got_sets: Vec<BTreeSet<IsoClassId>> =
            got.iter().map(|b| b.members().clone()).collect();
        for s in &expected {
            assert!(got_sets.contains(s));
        }
        // The three singletons and the empty set are always present.
        assert!(got_sets.contains(&BTreeSet::new()));
        for b in &bricks {
            assert!(got_sets.contains(&[*b].into_iter().collect()));
        }
    }

    #[test]
    fn a1_semibricks() {
        let q = Arc::new(Quiver::new(vec![1], vec![]).unwrap());
        let u = Arc::new(enumerate_universe(q, p2(), vec![3], Limits::default()).unwrap());
        let got = enumerate_semibricks(&u).unwrap();
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn simples_depend_on_the_structure() {
        let u = a2_universe();
        let (s1, s2, p1) = a2_fixtures(&u);
        let std_simples = simples(&u, &ExactCtx::standard()).unwrap();
        assert_eq!(std_simples, [s1, s2].into_iter().collect());
        let split_simples = simples(&u, &ExactCtx::split()).unwrap();
        assert_eq!(split_simples, [s1, s2, p1].into_iter().collect());
        assert!(!is_simple(&u, &ExactCtx::standard(), u.zero_class()).unwrap());
    }

    #[test]
    fn split_simples_are_the_indecomposables() {
        // Oracle: X is indecomposable iff End(X) has no idempotent other
        // than 0 and id. Compare against the split-simple computation.
        let u = a2_universe();
        let split = ExactCtx::split();
        for id in u.nonzero_ids() {
            let x = u.rep(id);
            let indecomposable = end_elements(x).unwrap().all(|e| {
                let ee = e.then(&e).unwrap();
                ee != e || e.is_zero() || e.is_invertible()
            });
            assert_eq!(
                is_simple(&u, &split, id).unwrap(),
                indecomposable,
                "disagreement at class {}",
                id.index()
            );
        }
    }

    #[test]
    fn standard_simples_form_a_semibrick() {
        let u = a2_universe();
        let s = simples(&u, &ExactCtx::standard()).unwrap();
        assert!(is_semibrick(&u, &s).unwrap());
    }

    #[test]
    fn simplicity_is_an_iso_class_property() {
        let u = a2_universe();
        let p = p2();
        // Two presentations of the same rank-1 class on dims (2,2).
        let m1 = Rep::new(
            u.quiver().clone(),
            p,
            vec![2, 2],
            vec![FpMatrix::from_rows(p, 2, &[vec![0, 1], vec![0, 0]]).unwrap()],
        )
        .unwrap();
        let m2 = Rep::new(
            u.quiver().clone(),
            p,
            vec![2, 2],
            vec![FpMatrix::from_rows(p, 2, &[vec![1, 1], vec![1, 1]]).unwrap()],
        )
        .unwrap();
        let c1 = u.class_of(&m1).unwrap();
        let c2 = u.class_of(&m2).unwrap();
        assert_eq!(c1, c2);
        for ctx in [ExactCtx::standard(), ExactCtx::split()] {
            assert_eq!(
                is_simple(&u, &ctx, c1).unwrap(),
                is_simple(&u, &ctx, c2).unwrap()
            );
        }
    }

    #[test]
    fn hom_orthogonality_uses_both_directions() {
        let u = a2_universe();
        let (s1, _, p1) = a2_fixtures(&u);
        // Hom(P1, S1) is nonzero while Hom(S1, P1) vanishes; the pair must
        // still fail.
        assert_eq!(u.hom(s1, p1).dim(), 0);
        assert_eq!(u.hom(p1, s1).dim(), 1);
        assert!(!is_semibrick(&u, &[s1, p1].into_iter().collect()).unwrap());
    }

    #[test]
    fn brick_rejects_nilpotents_not_only_projections() {
        // On A1 with dims 2, the nilpotent endomorphism [[0,1],[0,0]] is
        // nonzero and non-invertible.
        let q = Arc::new(Quiver::new(vec![1], vec![]).unwrap());
        let p = p2();
        let x = Rep::new(q, p, vec![2], vec![]).unwrap();
        let nil = Mor::new(
            x.clone(),
            x.clone(),
            vec![FpMatrix::from_rows(p, 2, &[vec![0, 1], vec![0, 0]]).unwrap()],
        )
        .unwrap();
        assert!(!nil.is_zero() && !nil.is_invertible());
        assert!(!is_brick(&x).unwrap());
        assert!(hom_space(&x, &x).unwrap().dim() == 4);
    }
}
