//! Runtime re-verification of the invariants the crate is built on.
//!
//! Unit tests cover these facts at development time; the selftest re-checks
//! them in the shipped binary on the stock universes, so a deployment can
//! prove its own arithmetic before anyone trusts a verdict. Every check is
//! deterministic: random sampling uses a fixed seed.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bricks::{enumerate_semibricks, is_semibrick, simples};
use crate::error::Result;
use crate::exact::{ExactCtx, ExactStructure};
use crate::ffmat::{FpMatrix, Prime};
use crate::filt::{filt_closure, filt_contains};
use crate::presets::preset_quiver;
use crate::repcat::{is_isomorphic, Rep};
use crate::universe::{enumerate_universe, Limits, Universe};
use crate::verify::{universe_descriptor, verify_bijection, UniverseDescriptor};
use crate::wide::is_abelian;

#[derive(Clone, Debug, Serialize)]
pub struct SelftestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub universes: Vec<UniverseDescriptor>,
    pub checks: Vec<SelftestCheck>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

const SEED: u64 = 0xC0FFEE;

/// The universes every selftest check runs against: one vertex with room
/// for nilpotency-free stacking, the smallest quiver with a nonsplit
/// extension, and a three-vertex line kept multiplicity-free.
fn stock_universes() -> Result<Vec<Arc<Universe>>> {
    let p = Prime::new(2)?;
    let specs: [(&str, Vec<usize>); 3] =
        [("a1", vec![3]), ("a2", vec![2, 2]), ("a3", vec![1, 1, 1])];
    specs
        .into_iter()
        .map(|(name, bound)| {
            let q = preset_quiver(name).expect("stock preset");
            Ok(Arc::new(enumerate_universe(q, p, bound, Limits::default())?))
        })
        .collect()
}

fn check(name: &str, outcome: std::result::Result<String, String>) -> SelftestCheck {
    match outcome {
        Ok(detail) => SelftestCheck {
            name: name.into(),
            passed: true,
            detail,
        },
        Err(detail) => SelftestCheck {
            name: name.into(),
            passed: false,
            detail,
        },
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, p: Prime, rows: usize, cols: usize) -> FpMatrix {
    let entries = (0..rows * cols).map(|_| rng.gen_range(0..u64::from(p.get())));
    FpMatrix::from_entries(p, rows, cols, entries).expect("entry count matches")
}

fn random_invertible(rng: &mut ChaCha8Rng, p: Prime, n: usize) -> FpMatrix {
    loop {
        let m = random_matrix(rng, p, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Gaussian-elimination identities on random matrices over small fields:
/// rref idempotence, rank/nullity accounting, kernel and image membership,
/// solver round trips, inverse laws, associativity.
fn matrix_identities() -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0usize;
    for p_val in [2u32, 3, 5] {
        let p = Prime::new(p_val).expect("small primes");
        for _ in 0..12 {
            let rows = rng.gen_range(0..=4);
            let cols = rng.gen_range(0..=4);
            let a = random_matrix(&mut rng, p, rows, cols);
            checked += 1;

            let (r, pivots) = a.rref();
            if r.rref().0 != r {
                return Err(format!("rref not idempotent on a {rows}x{cols} over F_{p_val}"));
            }
            if pivots.len() != a.rank() {
                return Err("pivot count disagrees with rank".into());
            }
            if a.rank() != a.transpose().rank() {
                return Err("row rank differs from column rank".into());
            }

            let kernel = a.kernel_basis();
            if a.rank() + kernel.len() != cols {
                return Err("rank plus nullity misses the column count".into());
            }
            for k in &kernel {
                if !a.mat_mul(k).map_err(|e| e.to_string())?.is_zero() {
                    return Err("kernel basis vector not annihilated".into());
                }
            }

            let img = a.image_basis();
            if img.rank() != a.rank() || img.cols() != a.rank() {
                return Err("image basis is not independent of full rank".into());
            }
            for j in 0..cols {
                if img
                    .solve_matrix(&a.column(j))
                    .map_err(|e| e.to_string())?
                    .is_none()
                {
                    return Err("matrix column escapes its own image basis".into());
                }
            }

            // Solver round trip on a consistent system.
            let x = random_matrix(&mut rng, p, cols, 2);
            let b = a.mat_mul(&x).map_err(|e| e.to_string())?;
            match a.solve_matrix(&b).map_err(|e| e.to_string())? {
                Some(s) => {
                    if a.mat_mul(&s).map_err(|e| e.to_string())? != b {
                        return Err("solve_matrix returned a non-solution".into());
                    }
                }
                None => return Err("consistent system reported unsolvable".into()),
            }

            // Preimage of a random subspace: contains the kernel, maps into
            // the subspace. preimage_basis wants independent columns.
            let sub_cols = rng.gen_range(0..=rows);
            let sub = random_matrix(&mut rng, p, rows, sub_cols).image_basis();
            let pre = a.preimage_basis(&sub);
            let mapped = a.mat_mul(&pre).map_err(|e| e.to_string())?;
            for j in 0..mapped.cols() {
                if sub
                    .solve_matrix(&mapped.column(j))
                    .map_err(|e| e.to_string())?
                    .is_none()
                {
                    return Err("preimage basis maps outside the subspace".into());
                }
            }
            for k in &kernel {
                if pre.solve_matrix(k).map_err(|e| e.to_string())?.is_none() {
                    return Err("kernel escapes the preimage of a subspace".into());
                }
            }

            // Associativity and inverse laws on square samples.
            let n = rng.gen_range(1..=3);
            let (s1, s2, s3) = (
                random_matrix(&mut rng, p, n, n),
                random_matrix(&mut rng, p, n, n),
                random_matrix(&mut rng, p, n, n),
            );
            let left = s1
                .mat_mul(&s2)
                .and_then(|m| m.mat_mul(&s3))
                .map_err(|e| e.to_string())?;
            let right = s2
                .mat_mul(&s3)
                .and_then(|m| s1.mat_mul(&m))
                .map_err(|e| e.to_string())?;
            if left != right {
                return Err("matrix multiplication not associative".into());
            }
            let inv = random_invertible(&mut rng, p, n);
            let invi = inv
                .try_inverse()
                .map_err(|e| e.to_string())?
                .ok_or("invertible matrix has no inverse")?;
            if !inv.mat_mul(&invi).map_err(|e| e.to_string())?.is_identity()
                || !invi.mat_mul(&inv).map_err(|e| e.to_string())?.is_identity()
            {
                return Err("two-sided inverse law fails".into());
            }
        }
    }
    Ok(format!("{checked} random matrices over F_2, F_3, F_5"))
}

/// Every stored hom-space basis element satisfies the commuting squares
/// that make it a morphism of representations.
fn commuting_squares(universes: &[Arc<Universe>]) -> std::result::Result<String, String> {
    let mut checked = 0usize;
    for u in universes {
        let q = u.quiver().clone();
        for x in u.ids() {
            for y in u.ids() {
                let h = u.hom(x, y);
                for f in h.basis() {
                    checked += 1;
                    for a in 0..q.arrows().len() {
                        let (s, t) = q.arrow_endpoints(a);
                        let lhs = f
                            .comp(t)
                            .mat_mul(f.src().mat(a))
                            .map_err(|e| e.to_string())?;
                        let rhs = f
                            .dst()
                            .mat(a)
                            .mat_mul(f.comp(s))
                            .map_err(|e| e.to_string())?;
                        if lhs != rhs {
                            return Err(format!(
                                "basis morphism {} -> {} breaks the square at arrow {a}",
                                x.index(),
                                y.index()
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{checked} basis morphisms"))
}

/// Isomorphism behaves as an equivalence on the class representatives:
/// reflexive with an invertible witness, stable under random base change,
/// and consistent with class lookup.
fn isomorphism_equivalence(universes: &[Arc<Universe>]) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut conjugated = 0usize;
    for u in universes {
        let ceiling = u.limits().enumeration_ceiling;
        for id in u.ids() {
            let x = u.rep(id);
            let witness = is_isomorphic(x, x, ceiling)
                .map_err(|e| e.to_string())?
                .ok_or("representative not isomorphic to itself")?;
            if !witness.is_invertible() {
                return Err("reflexivity witness is not invertible".into());
            }
            if u.class_of(x).map_err(|e| e.to_string())? != id {
                return Err("class lookup does not fix the representative".into());
            }

            if x.is_zero() {
                continue;
            }
            // Conjugate by a random base change; the class must not move.
            let q = u.quiver().clone();
            let p = u.p();
            let base: Vec<FpMatrix> = x
                .dims()
                .iter()
                .map(|&d| random_invertible(&mut rng, p, d))
                .collect();
            let mats: Vec<FpMatrix> = (0..q.arrows().len())
                .map(|a| {
                    let (s, t) = q.arrow_endpoints(a);
                    let sinv = base[s]
                        .try_inverse()
                        .expect("square")
                        .expect("invertible by construction");
                    base[t]
                        .mat_mul(x.mat(a))
                        .and_then(|m| m.mat_mul(&sinv))
                        .expect("conformable by construction")
                })
                .collect();
            let y = Rep::new(q, p, x.dims().to_vec(), mats).map_err(|e| e.to_string())?;
            conjugated += 1;
            if u.class_of(&y).map_err(|e| e.to_string())? != id {
                return Err(format!("base change moved class {}", id.index()));
            }
            let fwd = is_isomorphic(x, &y, ceiling).map_err(|e| e.to_string())?;
            let bwd = is_isomorphic(&y, x, ceiling).map_err(|e| e.to_string())?;
            if fwd.is_none() || bwd.is_none() {
                return Err("isomorphism is not symmetric under base change".into());
            }
        }
    }
    Ok(format!("{conjugated} random base changes"))
}

/// The simples of each stock universe under the standard structure are
/// pairwise Hom-orthogonal bricks.
fn simples_form_semibrick(universes: &[Arc<Universe>]) -> std::result::Result<String, String> {
    let mut counts = Vec::new();
    for u in universes {
        let s = simples(u, &ExactCtx::standard()).map_err(|e| e.to_string())?;
        if !is_semibrick(u, &s).map_err(|e| e.to_string())? {
            return Err(format!(
                "standard simples of the {:?} universe are not a semibrick",
                u.dim_bound()
            ));
        }
        counts.push(s.len().to_string());
    }
    Ok(format!("simple counts {}", counts.join(", ")))
}

/// Every morphism is admissible for the standard structure: kernels and
/// cokernels make each factorization a deflation followed by an inflation.
fn standard_admissibility(universes: &[Arc<Universe>]) -> std::result::Result<String, String> {
    for u in universes {
        let report = is_abelian(u, &ExactCtx::standard()).map_err(|e| e.to_string())?;
        if !report.holds {
            let w = report.witness.expect("failing report carries a witness");
            return Err(format!(
                "non-admissible morphism {} -> {} under the standard structure",
                w.source.index(),
                w.target.index()
            ));
        }
    }
    Ok("all morphisms admissible".into())
}

/// Filtration certificates round-trip: closure members produce certificates
/// that survive independent re-validation, non-members produce none.
fn certificate_validation(universes: &[Arc<Universe>]) -> std::result::Result<String, String> {
    let mut validated = 0usize;
    for u in universes {
        for structure in [ExactStructure::Standard, ExactStructure::Split] {
            let ctx = ExactCtx::new(structure);
            for gens in enumerate_semibricks(u).map_err(|e| e.to_string())? {
                let closure = filt_closure(u, &ctx, &gens).map_err(|e| e.to_string())?;
                for id in u.ids() {
                    let cert = filt_contains(u, &ctx, &gens, id).map_err(|e| e.to_string())?;
                    match cert {
                        Some(c) => {
                            if !closure.contains(&id) {
                                return Err("certificate for a class outside the closure".into());
                            }
                            if c.object() != id {
                                return Err("certificate names the wrong object".into());
                            }
                            c.validate(u, &ctx, &gens).map_err(|e| e.to_string())?;
                            validated += 1;
                        }
                        None => {
                            if closure.contains(&id) {
                                return Err("closure member has no certificate".into());
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{validated} certificates re-validated"))
}

/// Reports are byte-identical across repeated runs and across worker
/// counts.
fn determinism() -> std::result::Result<String, String> {
    let build = || -> Result<String> {
        let q = preset_quiver("a2").expect("stock preset");
        let u = enumerate_universe(q, Prime::new(2)?, vec![2, 2], Limits::default())?;
        Ok(serde_json::to_string(&u).expect("universe serializes"))
    };
    let first = build().map_err(|e| e.to_string())?;
    let second = build().map_err(|e| e.to_string())?;
    if first != second {
        return Err("universe enumeration is not reproducible".into());
    }

    let bijection = |threads: usize| -> Result<String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("pool construction");
        pool.install(|| {
            let q = preset_quiver("a1").expect("stock preset");
            let u = Arc::new(enumerate_universe(q, Prime::new(2)?, vec![3], Limits::default())?);
            let report = verify_bijection(&u, &ExactCtx::standard())?;
            Ok(serde_json::to_string(&report).expect("report serializes"))
        })
    };
    let serial = bijection(1).map_err(|e| e.to_string())?;
    let parallel = bijection(4).map_err(|e| e.to_string())?;
    let repeat = bijection(4).map_err(|e| e.to_string())?;
    if serial != parallel || parallel != repeat {
        return Err("bijection report differs across runs or worker counts".into());
    }
    Ok("universe dump and bijection report byte-identical".into())
}

/// Runs every invariant suite on the stock universes. `Err` means the
/// harness itself could not run; mathematical failures land in the report.
pub fn run_selftest() -> Result<SelftestReport> {
    let universes = stock_universes()?;
    let descriptors = universes.iter().map(|u| universe_descriptor(u)).collect();
    let checks = vec![
        check("matrix_identities", matrix_identities()),
        check("commuting_squares", commuting_squares(&universes)),
        check(
            "isomorphism_equivalence",
            isomorphism_equivalence(&universes),
        ),
        check(
            "simples_form_semibrick",
            simples_form_semibrick(&universes),
        ),
        check(
            "standard_admissibility",
            standard_admissibility(&universes),
        ),
        check(
            "certificate_validation",
            certificate_validation(&universes),
        ),
        check("determinism", determinism()),
    ];
    Ok(SelftestReport {
        universes: descriptors,
        checks,
    })
}
