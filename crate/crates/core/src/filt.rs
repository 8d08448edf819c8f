//! Filtration closures of brick sets, with verifiable certificates.
//!
//! `Filt(S)` collects the objects admitting a chain of inflations
//! 0 = X_0 >-> X_1 >-> ... >-> X_l = X whose consecutive quotients lie in
//! S. Membership answers carry a [`FiltrationCertificate`] recording that
//! chain, so a skeptical caller can re-check every step independently of
//! the search that produced it.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::bricks::{is_semibrick, BrickSet};
use crate::error::{Error, Result};
use crate::exact::{is_inflation, ExactCtx};
use crate::ffmat::FpMatrix;
use crate::repcat::{cokernel_of, is_isomorphic, sub_rep_from_bases, Mor, Rep};
use crate::universe::{IsoClassId, TruncationEvent, Universe};

/// One chain step: an inflation X_i >-> X_{i+1} together with the class of
/// its cokernel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltStep {
    pub inflation: Mor,
    pub factor: IsoClassId,
}

/// Certificate that `object` lies in the filtration closure of a brick
/// set: the chain of inflations from the zero representation up to a
/// representative of `object`, one step per factor. An empty chain
/// certifies the zero class.
///
/// Certificates are evidence, not canonical forms; two certificates for
/// the same object may differ in length and steps. Compare objects, never
/// certificates.
#[derive(Clone, Debug)]
pub struct FiltrationCertificate {
    object: IsoClassId,
    steps: Vec<FiltStep>,
}

impl FiltrationCertificate {
    pub fn object(&self) -> IsoClassId {
        self.object
    }

    pub fn steps(&self) -> &[FiltStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Factor classes in chain order.
    pub fn factors(&self) -> Vec<IsoClassId> {
        self.steps.iter().map(|s| s.factor).collect()
    }

    /// Re-checks the whole chain from scratch: it starts at zero,
    /// consecutive endpoints agree, every step is an inflation admitted by
    /// `ctx`, every factor is a generator matching the step's cokernel
    /// class, and the chain ends in a representative of `object`.
    pub fn validate(&self, u: &Universe, ctx: &ExactCtx, gens: &BrickSet) -> Result<()> {
        u.ensure_id(self.object)?;
        let fail = |msg: String| Err(Error::InvalidCertificate(msg));
        if self.steps.is_empty() {
            if !u.rep(self.object).is_zero() {
                return fail(format!(
                    "empty chain certifies only the zero class, not class {}",
                    self.object.index()
                ));
            }
            return Ok(());
        }
        if !self.steps[0].inflation.src().is_zero() {
            return fail("chain must start at the zero representation".into());
        }
        for (i, w) in self.steps.windows(2).enumerate() {
            if w[0].inflation.dst() != w[1].inflation.src() {
                return fail(format!("steps {} and {} do not share an endpoint", i, i + 1));
            }
        }
        for (i, step) in self.steps.iter().enumerate() {
            if !gens.contains(step.factor) {
                return fail(format!(
                    "step {i} factor (class {}) is not a generator",
                    step.factor.index()
                ));
            }
            if !is_inflation(ctx, &step.inflation) {
                return fail(format!("step {i} is not an inflation in this context"));
            }
            let (coker, _) = cokernel_of(&step.inflation);
            let got = u.class_of(&coker)?;
            if got != step.factor {
                return fail(format!(
                    "step {i} factor is class {} but the cokernel has class {}",
                    step.factor.index(),
                    got.index()
                ));
            }
        }
        let top = &self.steps[self.steps.len() - 1].inflation;
        if u.class_of(top.dst())? != self.object {
            return fail("chain does not end at the certified object".into());
        }
        Ok(())
    }
}

impl Serialize for FiltrationCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FiltrationCertificate", 2)?;
        st.serialize_field("object", &self.object)?;
        st.serialize_field("steps", &self.steps)?;
        st.end()
    }
}

/// Membership search with a per-(context, generators) memo shared across
/// queries. Zero factors are skipped (a stage equal to its predecessor can
/// always be dropped from a chain), so recursion strictly decreases total
/// dimension and needs no in-progress marker.
struct FiltSearch<'a> {
    u: &'a Arc<Universe>,
    ctx: &'a ExactCtx,
    gens: &'a BrickSet,
    active: Vec<IsoClassId>,
    memo: HashMap<usize, bool>,
}

impl<'a> FiltSearch<'a> {
    fn new(u: &'a Arc<Universe>, ctx: &'a ExactCtx, gens: &'a BrickSet) -> Self {
        debug_assert!(
            Arc::ptr_eq(u, gens.universe()),
            "generators enumerated over a different universe"
        );
        let active = gens
            .members()
            .iter()
            .copied()
            .filter(|&s| !u.rep(s).is_zero())
            .collect();
        FiltSearch {
            u,
            ctx,
            gens,
            active,
            memo: HashMap::new(),
        }
    }

    fn contains(&mut self, x: IsoClassId) -> Result<bool> {
        if let Some(&hit) = self.memo.get(&x.index()) {
            return Ok(hit);
        }
        let ans = if self.u.rep(x).is_zero() {
            true
        } else {
            self.first_step(x)?.is_some()
        };
        self.memo.insert(x.index(), ans);
        Ok(ans)
    }

    /// First (generator, hom element index) in scan order giving an
    /// admitted inflation whose cokernel class is again in the closure.
    /// Generators ascend by class id and morphisms follow the hom-space
    /// counting order, so the choice is deterministic. Structure-level
    /// inflation facts come from the universe's memoized profile; only the
    /// membership checks are per-context.
    fn first_step(&mut self, x: IsoClassId) -> Result<Option<(IsoClassId, u128)>> {
        let su = self.ctx.subuniverse();
        if let Some(su) = su {
            // Every admitted conflation ending at x has x as a term.
            if !su.contains(x) {
                return Ok(None);
            }
        }
        let xdims: Vec<usize> = self.u.rep(x).dims().to_vec();
        let active = self.active.clone();
        for s in active {
            if let Some(su) = su {
                if !su.contains(s) {
                    continue;
                }
            }
            if self
                .u
                .rep(s)
                .dims()
                .iter()
                .zip(&xdims)
                .any(|(a, b)| a > b)
            {
                continue;
            }
            let profile = self.u.inflation_profile(self.ctx.structure(), s, x)?;
            for (i, entry) in profile.iter().enumerate() {
                let Some(qc) = *entry else { continue };
                if let Some(su) = su {
                    if !su.contains(qc) {
                        continue;
                    }
                }
                if self.contains(qc)? {
                    return Ok(Some((s, i as u128)));
                }
            }
        }
        Ok(None)
    }

    fn certificate(&mut self, x: IsoClassId) -> Result<Option<FiltrationCertificate>> {
        if self.u.rep(x).is_zero() {
            return Ok(Some(FiltrationCertificate {
                object: x,
                steps: Vec::new(),
            }));
        }
        let Some((s, idx)) = self.first_step(x)? else {
            self.memo.insert(x.index(), false);
            return Ok(None);
        };
        self.memo.insert(x.index(), true);
        let phi = self.u.hom(s, x).element_at(idx);
        let (coker, proj) = cokernel_of(&phi);
        let qc = self
            .u
            .class_of(&coker)
            .expect("cokernel dims shrink, staying within the bound");
        let sub = self
            .certificate(qc)?
            .expect("membership was just established");
        let theta = is_isomorphic(self.u.rep(qc), &coker, self.u.limits().enumeration_ceiling)?
            .expect("same class");
        let cert = lift_through(x, s, &proj, &theta, &sub)?;
        cert.validate(self.u, self.ctx, self.gens)?;
        Ok(Some(cert))
    }
}

/// Pulls a chain for the cokernel Q = X/S back to a chain for X along the
/// projection: stage i of the result is the preimage of stage i-1 of the
/// sub-chain, so it extends the image of S by that stage. Factors shift by
/// one with the generator `s` in front.
fn lift_through(
    x: IsoClassId,
    s: IsoClassId,
    proj: &Mor,
    theta: &Mor,
    sub: &FiltrationCertificate,
) -> Result<FiltrationCertificate> {
    let x_rep = proj.src().clone();
    let p = x_rep.p();
    let nv = x_rep.dims().len();
    let m = sub.steps.len();

    // Composite inclusions C_i -> C_m of the sub-chain stages.
    let mut incl = vec![Mor::identity(theta.src())];
    for i in (0..m).rev() {
        let next = sub.steps[i]
            .inflation
            .then(incl.last().expect("nonempty"))?;
        incl.push(next);
    }
    incl.reverse();

    // Stage bases in X: the zero subspace, then the preimage of each
    // sub-chain stage. The last stage pulls back all of Q, giving the
    // identity basis, so the chain ends at X itself.
    let mut bases: Vec<Vec<FpMatrix>> = Vec::with_capacity(m + 2);
    bases.push((0..nv).map(|v| FpMatrix::zero(p, x_rep.dims()[v], 0)).collect());
    for inc in &incl {
        let psi = inc.then(theta)?;
        bases.push(
            (0..nv)
                .map(|v| proj.comp(v).preimage_basis(psi.comp(v)))
                .collect(),
        );
    }

    let chain: Vec<(Rep, Mor)> = bases.iter().map(|b| sub_rep_from_bases(&x_rep, b)).collect();
    debug_assert_eq!(
        chain.last().expect("nonempty").0,
        x_rep,
        "full preimage must reproduce the ambient representation"
    );

    let mut steps = Vec::with_capacity(m + 1);
    for j in 0..chain.len() - 1 {
        let comps: Vec<FpMatrix> = (0..nv)
            .map(|v| {
                bases[j + 1][v]
                    .solve_matrix(&bases[j][v])
                    .expect("shapes agree")
                    .expect("chain stages are nested")
            })
            .collect();
        let step = Mor::new(chain[j].0.clone(), chain[j + 1].0.clone(), comps)?;
        let factor = if j == 0 { s } else { sub.steps[j - 1].factor };
        steps.push(FiltStep {
            inflation: step,
            factor,
        });
    }
    Ok(FiltrationCertificate { object: x, steps })
}

/// Does the class `x` lie in Filt of the generators? Returns a validated
/// certificate on success and `None` otherwise.
pub fn filt_contains(
    u: &Arc<Universe>,
    ctx: &ExactCtx,
    gens: &BrickSet,
    x: IsoClassId,
) -> Result<Option<FiltrationCertificate>> {
    u.ensure_id(x)?;
    FiltSearch::new(u, ctx, gens).certificate(x)
}

/// All universe classes in Filt of the generators.
pub fn filt_closure(
    u: &Arc<Universe>,
    ctx: &ExactCtx,
    gens: &BrickSet,
) -> Result<BTreeSet<IsoClassId>> {
    let mut search = FiltSearch::new(u, ctx, gens);
    let mut out = BTreeSet::new();
    for id in u.ids() {
        if search.contains(id)? {
            out.insert(id);
        }
    }
    Ok(out)
}

/// Smallest extension-closed class of objects containing the generators
/// and zero, with the truncation events hit along the way.
#[derive(Clone, Debug, Serialize)]
pub struct ExtClosure {
    pub members: BTreeSet<IsoClassId>,
    pub truncation_events: Vec<TruncationEvent>,
}

/// Fixpoint iteration: repeatedly adjoin the middle terms of admitted
/// conflations between current members. Pairs whose summed dims leave the
/// window are recorded as truncation events and skipped; the skipped
/// middles have exactly those out-of-window dims, so the within-window
/// fixpoint is unaffected.
pub fn smallest_ext_closed(
    u: &Arc<Universe>,
    ctx: &ExactCtx,
    gens: &BrickSet,
) -> Result<ExtClosure> {
    let mut members: BTreeSet<IsoClassId> = gens.members().clone();
    members.insert(u.zero_class());
    let mut events: BTreeSet<TruncationEvent> = BTreeSet::new();
    loop {
        let snapshot: Vec<IsoClassId> = members.iter().copied().collect();
        let mut grew = false;
        for &x in &snapshot {
            for &z in &snapshot {
                match u.conflation_middles(ctx, x, z) {
                    Ok(found) => {
                        for mid in found {
                            grew |= members.insert(mid);
                        }
                    }
                    Err(Error::OutOfBounds { dims, .. }) => {
                        events.insert(TruncationEvent {
                            left: x,
                            right: z,
                            middle_dims: dims,
                            site: "ext_closure".into(),
                        });
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok(ExtClosure {
        members,
        truncation_events: events.into_iter().collect(),
    })
}

/// A morphism out of a generator that breaks the expected pattern: either
/// it is nonzero yet not an inflation, or its cokernel class escapes the
/// closure.
#[derive(Clone, Debug, Serialize)]
pub struct BrickMorphismViolation {
    pub source: IsoClassId,
    pub target: IsoClassId,
    pub morphism: Mor,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BrickMorphismReport {
    pub generators: Vec<IsoClassId>,
    pub closure: Vec<IsoClassId>,
    pub checked_morphisms: u64,
    pub violations: Vec<BrickMorphismViolation>,
}

impl BrickMorphismReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks, for every generator S and every object Y of the closure, that
/// each nonzero morphism S -> Y is an inflation whose cokernel class stays
/// in the closure. The generators must form a semibrick; a non-semibrick
/// input is a precondition failure, not a silent pass.
pub fn check_brick_morphisms(
    u: &Arc<Universe>,
    ctx: &ExactCtx,
    gens: &BrickSet,
) -> Result<BrickMorphismReport> {
    if !is_semibrick(u, gens.members())? {
        return Err(Error::NotASemibrick(format!(
            "classes {:?} are not pairwise Hom-orthogonal bricks",
            gens.members().iter().map(|c| c.index()).collect::<Vec<_>>()
        )));
    }
    let closure = filt_closure(u, ctx, gens)?;
    let ceiling = u.limits().enumeration_ceiling;
    let mut checked = 0u64;
    let mut violations = Vec::new();
    for &src in gens.members() {
        for &tgt in &closure {
            let h = u.hom(src, tgt);
            if h.count() > u128::from(ceiling) {
                return Err(Error::EnumerationTooLarge {
                    count: h.count(),
                    ceiling,
                });
            }
            for phi in h.elements() {
                checked += 1;
                if phi.is_zero() {
                    continue;
                }
                if !is_inflation(ctx, &phi) {
                    violations.push(BrickMorphismViolation {
                        source: src,
                        target: tgt,
                        morphism: phi,
                        reason: "nonzero morphism from a generator is not an inflation".into(),
                    });
                    continue;
                }
                let (coker, _) = cokernel_of(&phi);
                let c = u.class_of(&coker)?;
                if !closure.contains(&c) {
                    violations.push(BrickMorphismViolation {
                        source: src,
                        target: tgt,
                        morphism: phi,
                        reason: format!("cokernel class {} escapes the closure", c.index()),
                    });
                }
            }
        }
    }
    Ok(BrickMorphismReport {
        generators: gens.members().iter().copied().collect(),
        closure: closure.into_iter().collect(),
        checked_morphisms: checked,
        violations,
    })
}

/// Splits a certificate at stage i: a certificate for X_i (the first i
/// steps verbatim) and one for X/X_i (the later stages pushed through the
/// cokernel of X_i >-> X). Both halves are validated before return.
pub fn certificate_slices(
    u: &Arc<Universe>,
    ctx: &ExactCtx,
    gens: &BrickSet,
    cert: &FiltrationCertificate,
    i: usize,
) -> Result<(FiltrationCertificate, FiltrationCertificate)> {
    cert.validate(u, ctx, gens)?;
    let l = cert.steps.len();
    if i > l {
        return Err(Error::InvalidCertificate(format!(
            "slice index {i} exceeds chain length {l}"
        )));
    }
    if l == 0 {
        // Zero object: both halves are the empty certificate.
        return Ok((cert.clone(), cert.clone()));
    }

    let reps: Vec<&Rep> = std::iter::once(cert.steps[0].inflation.src())
        .chain(cert.steps.iter().map(|s| s.inflation.dst()))
        .collect();

    let prefix = FiltrationCertificate {
        object: u.class_of(reps[i])?,
        steps: cert.steps[..i].to_vec(),
    };
    prefix.validate(u, ctx, gens)?;

    let kappa = compose_tail(cert, i);
    let (qrep, qproj) = cokernel_of(&kappa);
    let nv = qrep.dims().len();
    let mut qbases: Vec<Vec<FpMatrix>> = Vec::with_capacity(l - i + 1);
    for j in i..=l {
        let tau = compose_tail(cert, j).then(&qproj)?;
        qbases.push((0..nv).map(|v| tau.comp(v).image_basis()).collect());
    }
    let chain: Vec<(Rep, Mor)> = qbases.iter().map(|b| sub_rep_from_bases(&qrep, b)).collect();
    let mut steps = Vec::with_capacity(l - i);
    for j in 0..chain.len() - 1 {
        let comps: Vec<FpMatrix> = (0..nv)
            .map(|v| {
                qbases[j + 1][v]
                    .solve_matrix(&qbases[j][v])
                    .expect("shapes agree")
                    .expect("quotient stages are nested")
            })
            .collect();
        let step = Mor::new(chain[j].0.clone(), chain[j + 1].0.clone(), comps)?;
        steps.push(FiltStep {
            inflation: step,
            factor: cert.steps[i + j].factor,
        });
    }
    let quotient = FiltrationCertificate {
        object: u.class_of(&qrep)?,
        steps,
    };
    quotient.validate(u, ctx, gens)?;
    Ok((prefix, quotient))
}

/// Composite inclusion X_j -> X_l along a nonempty chain; the identity on
/// X_l when j == l.
fn compose_tail(cert: &FiltrationCertificate, j: usize) -> Mor {
    let l = cert.steps.len();
    assert!(l > 0, "empty chains have no stages to compose");
    if j == l {
        return Mor::identity(cert.steps[l - 1].inflation.dst());
    }
    let mut m = cert.steps[j].inflation.clone();
    for s in &cert.steps[j + 1..] {
        m = m.then(&s.inflation).expect("chain endpoints agree");
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bricks::enumerate_semibricks;
    use crate::exact::ExactStructure;
    use crate::ffmat::Prime;
    use crate::repcat::{direct_sum, Quiver};
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

    fn set(u: &Arc<Universe>, ids: &[IsoClassId]) -> BrickSet {
        BrickSet::new(u.clone(), ids.iter().copied().collect()).unwrap()
    }

    /// Independent oracle for the semisimple classes: every multiplicity
    /// combination of the two vertex simples within the window.
    fn semisimple_classes(u: &Arc<Universe>) -> BTreeSet<IsoClassId> {
        let (s1, s2, _) = a2_fixtures(u);
        let mut out = BTreeSet::new();
        for a in 0..=2usize {
            for b in 0..=2usize {
                let mut rep = u.rep(u.zero_class()).clone();
                for _ in 0..a {
                    rep = direct_sum(&rep, u.rep(s1)).unwrap().sum;
                }
                for _ in 0..b {
                    rep = direct_sum(&rep, u.rep(s2)).unwrap().sum;
                }
                out.insert(u.class_of(&rep).unwrap());
            }
        }
        out
    }

    #[test]
    fn standard_certificate_for_the_extension() {
        let u = a2_universe();
        let (s1, s2, p1) = a2_fixtures(&u);
        let ctx = ExactCtx::standard();
        let gens = set(&u, &[s1, s2]);
        let cert = filt_contains(&u, &ctx, &gens, p1).unwrap().unwrap();
        assert_eq!(cert.object(), p1);
        assert_eq!(cert.len(), 2);
        // The socle comes first: the subobject is S2 and the top is S1.
        assert_eq!(cert.factors(), vec![s2, s1]);
        cert.validate(&u, &ctx, &gens).unwrap();
        // Intermediate stage is a representative of S2.
        assert_eq!(u.class_of(cert.steps()[0].inflation.dst()).unwrap(), s2);
    }

    #[test]
    fn membership_failures() {
        let u = a2_universe();
        let (s1, s2, p1) = a2_fixtures(&u);
        // S2 admits no filtration by S1 alone.
        assert!(filt_contains(&u, &ExactCtx::standard(), &set(&u, &[s1]), s2)
            .unwrap()
            .is_none());
        // Split structure cannot build the nonsplit extension.
        assert!(filt_contains(&u, &ExactCtx::split(), &set(&u, &[s1, s2]), p1)
            .unwrap()
            .is_none());
    }

    #[test]
    fn zero_has_the_empty_certificate() {
        let u = a2_universe();
        let (s1, _, _) = a2_fixtures(&u);
        let ctx = ExactCtx::standard();
        let gens = set(&u, &[s1]);
        let cert = filt_contains(&u, &ctx, &gens, u.zero_class())
            .unwrap()
            .unwrap();
        assert!(cert.is_empty());
        cert.validate(&u, &ctx, &gens).unwrap();
    }

    #[test]
    fn closures_depend_on_the_structure() {
        let u = a2_universe();
        let (s1, s2, _) = a2_fixtures(&u);
        let gens = set(&u, &[s1, s2]);
        let standard = filt_closure(&u, &ExactCtx::standard(), &gens).unwrap();
        assert_eq!(standard.len(), u.len());
        let split = filt_closure(&u, &ExactCtx::split(), &gens).unwrap();
        assert_eq!(split, semisimple_classes(&u));
        assert_eq!(split.len(), 9);
    }

    #[test]
    fn empty_generators_close_to_zero() {
        let u = a2_universe();
        let gens = set(&u, &[]);
        let closure = filt_closure(&u, &ExactCtx::standard(), &gens).unwrap();
        assert_eq!(closure, [u.zero_class()].into_iter().collect());
    }

    #[test]
    fn projective_generator_closure() {
        let u = a2_universe();
        let (_, _, p1) = a2_fixtures(&u);
        let gens = set(&u, &[p1]);
        let closure = filt_closure(&u, &ExactCtx::standard(), &gens).unwrap();
        // 0, P1, and P1 + P1 are the only objects filtered by P1.
        let double = u
            .class_of(&direct_sum(u.rep(p1), u.rep(p1)).unwrap().sum)
            .unwrap();
        assert_eq!(
            closure,
            [u.zero_class(), p1, double].into_iter().collect()
        );
    }

    #[test]
    fn closure_agrees_with_extension_fixpoint() {
        let u = a2_universe();
        for structure in [ExactStructure::Standard, ExactStructure::Split] {
            let ctx = ExactCtx::new(structure);
            for sb in enumerate_semibricks(&u).unwrap() {
                let filt = filt_closure(&u, &ctx, &sb).unwrap();
                let ext = smallest_ext_closed(&u, &ctx, &sb).unwrap();
                assert_eq!(filt, ext.members, "structure {structure:?}, gens {sb:?}");
            }
        }
    }

    #[test]
    fn truncation_events_name_the_oversized_pairs() {
        let u = a2_universe();
        let (s1, s2, _) = a2_fixtures(&u);
        let ext = smallest_ext_closed(&u, &ExactCtx::standard(), &set(&u, &[s1, s2])).unwrap();
        // The closure reaches dims (2, 2), so doubling any full class
        // leaves the window; at least one pair must have been recorded.
        assert!(!ext.truncation_events.is_empty());
        for e in &ext.truncation_events {
            assert_eq!(e.site, "ext_closure");
            assert!(!u.within_bound(&e.middle_dims));
        }
    }

    #[test]
    fn closure_is_monotone_in_the_generators() {
        let u = a2_universe();
        let ctx = ExactCtx::standard();
        let sbs = enumerate_semibricks(&u).unwrap();
        for a in &sbs {
            for b in &sbs {
                if !a.members().is_subset(b.members()) {
                    continue;
                }
                let ca = filt_closure(&u, &ctx, a).unwrap();
                let cb = filt_closure(&u, &ctx, b).unwrap();
                assert!(ca.is_subset(&cb), "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn closure_is_extension_closed() {
        let u = a2_universe();
        let (s1, s2, _) = a2_fixtures(&u);
        let ctx = ExactCtx::split();
        let closure = filt_closure(&u, &ctx, &set(&u, &[s1, s2])).unwrap();
        for &x in &closure {
            for &z in &closure {
                match u.conflations_between(&ctx, x, z) {
                    Ok(found) => {
                        for (mid, _) in found {
                            assert!(closure.contains(&mid));
                        }
                    }
                    Err(Error::OutOfBounds { .. }) => {}
                    Err(e) => panic!("unexpected error: {e}"),
                }
            }
        }
    }

    #[test]
    fn brick_morphism_checks_pass_on_semibricks() {
        let u = a2_universe();
        for structure in [ExactStructure::Standard, ExactStructure::Split] {
            let ctx = ExactCtx::new(structure);
            for sb in enumerate_semibricks(&u).unwrap() {
                let report = check_brick_morphisms(&u, &ctx, &sb).unwrap();
                assert!(report.passed(), "structure {structure:?}, gens {sb:?}");
                if !sb.is_empty() {
                    assert!(report.checked_morphisms > 0);
                }
            }
        }
    }

    #[test]
    fn brick_morphism_check_rejects_non_semibricks() {
        let u = a2_universe();
        let (_, s2, p1) = a2_fixtures(&u);
        // Hom(S2, P1) is nonzero, so this is not a semibrick.
        let err = check_brick_morphisms(&u, &ExactCtx::standard(), &set(&u, &[s2, p1]))
            .unwrap_err();
        assert!(matches!(err, Error::NotASemibrick(_)));
    }

    #[test]
    fn slicing_the_extension_certificate() {
        let u = a2_universe();
        let (s1, s2, p1) = a2_fixtures(&u);
        let ctx = ExactCtx::standard();
        let gens = set(&u, &[s1, s2]);
        let cert = filt_contains(&u, &ctx, &gens, p1).unwrap().unwrap();

        let (pre, quo) = certificate_slices(&u, &ctx, &gens, &cert, 1).unwrap();
        assert_eq!(pre.object(), s2);
        assert_eq!(pre.factors(), vec![s2]);
        assert_eq!(quo.object(), s1);
        assert_eq!(quo.factors(), vec![s1]);
        pre.validate(&u, &ctx, &gens).unwrap();
        quo.validate(&u, &ctx, &gens).unwrap();

        let (pre, quo) = certificate_slices(&u, &ctx, &gens, &cert, 0).unwrap();
        assert_eq!(pre.object(), u.zero_class());
        assert!(pre.is_empty());
        assert_eq!(quo.object(), p1);
        assert_eq!(quo.factors(), vec![s2, s1]);

        let (pre, quo) = certificate_slices(&u, &ctx, &gens, &cert, 2).unwrap();
        assert_eq!(pre.object(), p1);
        assert_eq!(pre.factors(), vec![s2, s1]);
        assert_eq!(quo.object(), u.zero_class());
        assert!(quo.is_empty());

        assert!(matches!(
            certificate_slices(&u, &ctx, &gens, &cert, 3),
            Err(Error::InvalidCertificate(_))
        ));
    }

    #[test]
    fn validation_rejects_tampering() {
        let u = a2_universe();
        let (s1, s2, p1) = a2_fixtures(&u);
        let ctx = ExactCtx::standard();
        let gens = set(&u, &[s1, s2]);
        let cert = filt_contains(&u, &ctx, &gens, p1).unwrap().unwrap();

        // Wrong generator set: S2 is no longer a legal factor.
        assert!(cert.validate(&u, &ctx, &set(&u, &[s1])).is_err());
        // Wrong context: the chain uses a nonsplit inflation.
        assert!(cert.validate(&u, &ExactCtx::split(), &gens).is_err());

        // Swap the factor labels.
        let mut bad = cert.clone();
        bad.steps[0].factor = s1;
        bad.steps[1].factor = s2;
        assert!(bad.validate(&u, &ctx, &gens).is_err());

        // Claim a different object.
        let mut bad = cert.clone();
        bad.object = s1;
        assert!(bad.validate(&u, &ctx, &gens).is_err());
    }

    #[test]
    fn certificates_serialize_as_ordered_steps() {
        let u = a2_universe();
        let (s1, s2, p1) = a2_fixtures(&u);
        let ctx = ExactCtx::standard();
        let gens = set(&u, &[s1, s2]);
        let cert = filt_contains(&u, &ctx, &gens, p1).unwrap().unwrap();
        let json: serde_json::Value = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["object"], serde_json::json!(p1.index()));
        assert_eq!(json["steps"].as_array().unwrap().len(), 2);
        assert_eq!(json["steps"][0]["factor"], serde_json::json!(s2.index()));
    }
}
