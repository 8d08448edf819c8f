//! Pluggable exact structures on the ambient representation category.
//!
//! Two structures are supported: `Standard`, where every kernel-cokernel
//! pair is a conflation, and `Split`, where only split short exact
//! sequences are. A context may additionally restrict to a subuniverse of
//! iso classes: conflations then need all three terms inside it. That
//! restriction is what lets a Filt-closure or a wide subcategory act as an
//! exact category in its own right.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffmat::FpMatrix;
use crate::repcat::{cokernel_of, hom_space, image_of, kernel_of, Mor, Rep};
use crate::universe::{IsoClassId, Universe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactStructure {
    Standard,
    Split,
}

/// Restriction of the ambient category to a set of iso classes.
#[derive(Clone)]
pub struct Subuniverse {
    universe: Arc<Universe>,
    members: BTreeSet<IsoClassId>,
}

impl Subuniverse {
    pub fn new(universe: Arc<Universe>, members: BTreeSet<IsoClassId>) -> Result<Self> {
        for &id in &members {
            universe.ensure_id(id)?;
        }
        Ok(Subuniverse { universe, members })
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

    /// Membership test for an arbitrary representation: out-of-bound
    /// objects are simply not members.
    pub fn admits(&self, x: &Rep) -> bool {
        match self.universe.class_of(x) {
            Ok(id) => self.members.contains(&id),
            Err(_) => false,
        }
    }
}

/// An exact structure plus an optional subuniverse restriction.
#[derive(Clone)]
pub struct ExactCtx {
    structure: ExactStructure,
    subuniverse: Option<Subuniverse>,
}

impl ExactCtx {
    pub fn standard() -> Self {
        ExactCtx {
            structure: ExactStructure::Standard,
            subuniverse: None,
        }
    }

    pub fn split() -> Self {
        ExactCtx {
            structure: ExactStructure::Split,
            subuniverse: None,
        }
    }

    pub fn new(structure: ExactStructure) -> Self {
        ExactCtx {
            structure,
            subuniverse: None,
        }
    }

    /// Same structure, restricted to the given classes.
    pub fn restricted_to(
        &self,
        universe: Arc<Universe>,
        members: BTreeSet<IsoClassId>,
    ) -> Result<Self> {
        Ok(ExactCtx {
            structure: self.structure,
            subuniverse: Some(Subuniverse::new(universe, members)?),
        })
    }

    pub fn structure(&self) -> ExactStructure {
        self.structure
    }

    pub fn subuniverse(&self) -> Option<&Subuniverse> {
        self.subuniverse.as_ref()
    }
}

/// A verified kernel-cokernel pair 0 -> X -> Y -> Z -> 0. Construction
/// checks the structural invariants (injectivity, surjectivity, exactness
/// at the middle); context-dependent admission is `is_conflation`'s job.
#[derive(Clone, Debug, Serialize)]
pub struct Conflation {
    f: Mor,
    g: Mor,
}

impl Conflation {
    pub fn new(f: Mor, g: Mor) -> Result<Self> {
        if !is_exact_pair(&f, &g) {
            return Err(Error::InvalidMor(
                "pair is not a short exact sequence".into(),
            ));
        }
        Ok(Conflation { f, g })
    }

    pub fn f(&self) -> &Mor {
        &self.f
    }

    pub fn g(&self) -> &Mor {
        &self.g
    }

    pub fn left(&self) -> &Rep {
        self.f.src()
    }

    pub fn middle(&self) -> &Rep {
        self.f.dst()
    }

    pub fn right(&self) -> &Rep {
        self.g.dst()
    }
}

/// Structural short-exactness: f injective, g surjective, g∘f = 0, and
/// rank f_v + rank g_v = dim Y_v at every vertex (so im f = ker g).
fn is_exact_pair(f: &Mor, g: &Mor) -> bool {
    if f.dst() != g.src() {
        return false;
    }
    let (x, y, z) = (f.src(), f.dst(), g.dst());
    for v in 0..x.dims().len() {
        let rf = f.comp(v).rank();
        let rg = g.comp(v).rank();
        if rf != x.dims()[v] || rg != z.dims()[v] || rf + rg != y.dims()[v] {
            return false;
        }
    }
    f.then(g).expect("endpoints checked").is_zero()
}

/// Does f: X -> Y admit a retraction r with r∘f = id_X? Decided by exact
/// linear solving over a basis of Hom(Y, X), never by sampling.
pub fn has_retraction(f: &Mor) -> bool {
    let x = f.src();
    let h = hom_space(f.dst(), x).expect("same ambient");
    let rows = Mor::identity(x).to_vector();
    let cols: Vec<FpMatrix> = h
        .basis()
        .iter()
        .map(|r| f.then(r).expect("endpoints match").to_vector())
        .collect();
    let sys = FpMatrix::from_columns(x.p(), rows.rows(), &cols).expect("uniform height");
    sys.solve_affine(&rows)
        .expect("shapes agree")
        .is_some()
}

/// Is (f, g) a conflation in this context? Never errors: malformed pairs,
/// missing retractions, and out-of-universe terms all answer `false`.
pub fn is_conflation(ctx: &ExactCtx, f: &Mor, g: &Mor) -> bool {
    if !is_exact_pair(f, g) {
        return false;
    }
    if ctx.structure == ExactStructure::Split && !has_retraction(f) {
        return false;
    }
    if let Some(su) = ctx.subuniverse() {
        if ![f.src(), f.dst(), g.dst()].into_iter().all(|t| su.admits(t)) {
            return false;
        }
    }
    true
}

/// f is an inflation iff (f, canonical cokernel projection) is a conflation.
pub fn is_inflation(ctx: &ExactCtx, f: &Mor) -> bool {
    let (_, proj) = cokernel_of(f);
    is_conflation(ctx, f, &proj)
}

/// g is a deflation iff (canonical kernel inclusion, g) is a conflation.
pub fn is_deflation(ctx: &ExactCtx, g: &Mor) -> bool {
    let (_, incl) = kernel_of(g);
    is_conflation(ctx, &incl, g)
}

/// Factors φ as surjection-onto-image followed by inclusion: φ = ι∘π.
/// Returned in (π, I, ι) order.
pub fn factor_through_image(phi: &Mor) -> (Mor, Rep, Mor) {
    let (img, onto, incl) = image_of(phi);
    (onto, img, incl)
}

/// A morphism is admissible when it factors as a deflation followed by an
/// inflation. It suffices to test the image factorization: inflations are
/// vertexwise injective and deflations vertexwise surjective here, so the
/// middle term of any deflation-inflation factorization of φ is isomorphic
/// to the image of φ, and the image factorization works iff any does.
pub fn is_admissible(ctx: &ExactCtx, phi: &Mor) -> bool {
    let (onto, _, incl) = factor_through_image(phi);
    is_deflation(ctx, &onto) && is_inflation(ctx, &incl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffmat::Prime;
    use crate::repcat::{direct_sum, is_isomorphic, Quiver};
    use crate::universe::{enumerate_universe, Limits};

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    fn a2() -> (Rep, Rep, Rep) {
        let q = Quiver::line(2);
        let p = p2();
        let s1 = Rep::simple(q.clone(), p, 0);
        let s2 = Rep::simple(q.clone(), p, 1);
        let p1 = Rep::new(q, p, vec![1, 1], vec![FpMatrix::identity(p, 1)]).unwrap();
        (s1, s2, p1)
    }

    fn nonzero_map(x: &Rep, y: &Rep) -> Mor {
        hom_space(x, y)
            .unwrap()
            .elements()
            .find(|m| !m.is_zero())
            .expect("nonzero Hom expected")
    }

    /// The sequence 0 -> S2 -> P1 -> S1 -> 0.
    fn s2_p1_s1() -> (Mor, Mor) {
        let (s1, s2, p1) = a2();
        let f = nonzero_map(&s2, &p1);
        let g = nonzero_map(&p1, &s1);
        (f, g)
    }

    #[test]
    fn standard_accepts_the_nonsplit_sequence() {
        let (f, g) = s2_p1_s1();
        assert!(is_conflation(&ExactCtx::standard(), &f, &g));
    }

    #[test]
    fn split_rejects_the_nonsplit_sequence() {
        let (f, g) = s2_p1_s1();
        // Oracle: the retraction system P1 -> S2 has no solution because
        // Hom(P1, S2) = 0 while id_{S2} is nonzero.
        assert_eq!(hom_space(f.dst(), f.src()).unwrap().dim(), 0);
        assert!(!is_conflation(&ExactCtx::split(), &f, &g));
    }

    #[test]
    fn canonical_split_sequence_is_split() {
        let (s1, s2, _) = a2();
        let ds = direct_sum(&s2, &s1).unwrap();
        let f = ds.inj[0].clone();
        let g = ds.proj[1].clone();
        assert!(is_conflation(&ExactCtx::split(), &f, &g));
        assert!(is_conflation(&ExactCtx::standard(), &f, &g));
    }

    #[test]
    fn malformed_pairs_answer_false() {
        let (s1, s2, p1) = a2();
        let f = nonzero_map(&s2, &p1);
        // Wrong composite: g does not even start at P1.
        let g = Mor::zero(s2.clone(), s1.clone()).unwrap();
        assert!(!is_conflation(&ExactCtx::standard(), &f, &g));
        // Right endpoints, wrong exactness: zero map is not surjective onto S1.
        let g = Mor::zero(p1.clone(), s1.clone()).unwrap();
        assert!(!is_conflation(&ExactCtx::standard(), &f, &g));
    }

    #[test]
    fn identity_is_inflation_and_deflation_everywhere() {
        let (_, _, p1) = a2();
        let id = Mor::identity(&p1);
        for ctx in [ExactCtx::standard(), ExactCtx::split()] {
            assert!(is_inflation(&ctx, &id));
            assert!(is_deflation(&ctx, &id));
        }
    }

    #[test]
    fn inclusion_inflation_depends_on_structure() {
        let (_, s2, p1) = a2();
        let f = nonzero_map(&s2, &p1);
        assert!(is_inflation(&ExactCtx::standard(), &f));
        assert!(!is_inflation(&ExactCtx::split(), &f));
        let g = nonzero_map(&p1, &a2().0);
        assert!(is_deflation(&ExactCtx::standard(), &g));
        assert!(!is_deflation(&ExactCtx::split(), &g));
    }

    #[test]
    fn image_factorization_cases() {
        let (s1, _, p1) = a2();
        let id = Mor::identity(&p1);
        let (pi, img, iota) = factor_through_image(&id);
        assert!(is_isomorphic(&img, &p1, 1 << 16).unwrap().is_some());
        assert_eq!(pi.then(&iota).unwrap(), id);

        let z = Mor::zero(p1.clone(), s1.clone()).unwrap();
        let (_, img, _) = factor_through_image(&z);
        assert!(img.is_zero());

        let phi = nonzero_map(&p1, &s1);
        let (pi, img, iota) = factor_through_image(&phi);
        assert!(is_isomorphic(&img, &s1, 1 << 16).unwrap().is_some());
        assert_eq!(pi.then(&iota).unwrap(), phi);
    }

    #[test]
    fn admissibility_under_both_structures() {
        let (s1, s2, p1) = a2();
        let std = ExactCtx::standard();
        let split = ExactCtx::split();
        // Standard, no restriction: every morphism is admissible.
        for x in [&s1, &s2, &p1] {
            for y in [&s1, &s2, &p1] {
                for phi in hom_space(x, y).unwrap().elements() {
                    assert!(is_admissible(&std, &phi));
                }
            }
        }
        let phi = nonzero_map(&s2, &p1);
        assert!(!is_admissible(&split, &phi));
        // Zero maps stay admissible under Split (image is the zero rep).
        let z = Mor::zero(s2, p1).unwrap();
        assert!(is_admissible(&split, &z));
    }

    #[test]
    fn split_conflations_are_standard_conflations() {
        let (s1, s2, p1) = a2();
        let reps = [s1, s2, p1];
        let split = ExactCtx::split();
        let std = ExactCtx::standard();
        for x in &reps {
            for z in &reps {
                let ds = direct_sum(x, z).unwrap();
                for f in hom_space(x, &ds.sum).unwrap().elements() {
                    for g in hom_space(&ds.sum, z).unwrap().elements() {
                        if is_conflation(&split, &f, &g) {
                            assert!(is_conflation(&std, &f, &g));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn conflation_invariant_under_middle_iso() {
        let (f, g) = s2_p1_s1();
        let p1 = f.dst().clone();
        let ctx = ExactCtx::standard();
        // Every automorphism u of the middle gives (u∘f, g∘u⁻¹).
        for u in hom_space(&p1, &p1).unwrap().elements() {
            if !u.is_invertible() {
                continue;
            }
            let f2 = f.then(&u).unwrap();
            let g2 = u.inverse().unwrap().then(&g).unwrap();
            assert!(is_conflation(&ctx, &f2, &g2));
        }
    }

    #[test]
    fn inflations_compose() {
        let (s1, s2, p1) = a2();
        let reps = [s1, s2, p1];
        for ctx in [ExactCtx::standard(), ExactCtx::split()] {
            for a in &reps {
                for b in &reps {
                    for c in &reps {
                        for f in hom_space(a, b).unwrap().elements() {
                            if !is_inflation(&ctx, &f) {
                                continue;
                            }
                            for g in hom_space(b, c).unwrap().elements() {
                                if !is_inflation(&ctx, &g) {
                                    continue;
                                }
                                let fg = f.then(&g).unwrap();
                                assert!(is_inflation(&ctx, &fg));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subuniverse_membership_gates_conflations() {
        let q = Quiver::line(2);
        let u = Arc::new(
            enumerate_universe(q, p2(), vec![2, 2], Limits::default()).unwrap(),
        );
        let (s1, s2, p1) = a2();
        let s1_id = u.class_of(&s1).unwrap();
        let s2_id = u.class_of(&s2).unwrap();
        let p1_id = u.class_of(&p1).unwrap();
        let zero = u.class_of(&Rep::zero(u.quiver().clone(), p2())).unwrap();

        let (f, g) = s2_p1_s1();
        // Restriction containing all three terms admits the conflation.
        let all: BTreeSet<_> = [zero, s1_id, s2_id, p1_id].into_iter().collect();
        let ctx = ExactCtx::standard().restricted_to(u.clone(), all).unwrap();
        assert!(is_conflation(&ctx, &f, &g));

        // Dropping the middle term rejects it.
        let no_mid: BTreeSet<_> = [zero, s1_id, s2_id].into_iter().collect();
        let ctx = ExactCtx::standard().restricted_to(u.clone(), no_mid).unwrap();
        assert!(!is_conflation(&ctx, &f, &g));

        // Zero morphism is admissible whenever zero is a member.
        let just_zero: BTreeSet<_> = [zero, s1_id, s2_id].into_iter().collect();
        let ctx = ExactCtx::standard().restricted_to(u, just_zero).unwrap();
        let z = Mor::zero(s1, s2).unwrap();
        assert!(is_admissible(&ctx, &z));
    }
}
