//! Acceptance gate: the seven headline claims this tool exists to settle,
//! each as one test printing a single PASS/FAIL line. Runtime caps are
//! asserted in the tests themselves and hold in unoptimized builds.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use semibrick_core::bricks::enumerate_semibricks;
use semibrick_core::filt::{check_brick_morphisms, filt_closure, smallest_ext_closed};
use semibrick_core::verify::{run_split_example, verify_bijection, verify_corollary};
use semibrick_core::{
    enumerate_universe, preset_quiver, run_selftest, ExactCtx, ExactStructure, FpMatrix,
    IsoClassId, Limits, Prime, Rep, Universe, Verdict,
};

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion(n: usize, what: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("ACCEPTANCE {n}: PASS  {what}"),
        Err(e) => {
            println!("ACCEPTANCE {n}: FAIL  {what}: {e}");
            panic!("acceptance criterion {n} failed: {e}");
        }
    }
}

fn universe(preset: &str, bound: Vec<usize>) -> Result<Arc<Universe>, String> {
    let q = preset_quiver(preset).ok_or_else(|| format!("unknown preset {preset}"))?;
    let p = Prime::new(2).map_err(|e| e.to_string())?;
    Ok(Arc::new(
        enumerate_universe(q, p, bound, Limits::default()).map_err(|e| e.to_string())?,
    ))
}

fn a2_projective(u: &Universe) -> IsoClassId {
    let rep = Rep::new(
        u.quiver().clone(),
        u.p(),
        vec![1, 1],
        vec![FpMatrix::identity(u.p(), 1)],
    )
    .expect("valid representation");
    u.class_of(&rep).expect("inside the window")
}

#[test]
fn criterion_1_bijection_a2_standard() {
    criterion(
        1,
        "A2/F2 bound (2,2) standard: 5 semibricks match 5 length wide subcategories",
        || {
            let start = Instant::now();
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .map_err(|e| e.to_string())?;
            let (u, report) = pool.install(|| -> Result<_, String> {
                let u = universe("a2", vec![2, 2])?;
                let report =
                    verify_bijection(&u, &ExactCtx::standard()).map_err(|e| e.to_string())?;
                Ok((u, report))
            })?;
            ensure!(report.verdict == Verdict::Pass, "verdict {}", report.verdict);
            ensure!(
                report.semibricks.len() == 5,
                "expected 5 semibricks, found {}",
                report.semibricks.len()
            );
            ensure!(
                report.wide_subcats.len() == 5,
                "expected 5 length wide subcategories, found {}",
                report.wide_subcats.len()
            );
            ensure!(
                report.roundtrip_failures.is_empty(),
                "{} round-trip failures",
                report.roundtrip_failures.len()
            );
            // Both round trips are the identity: forward and backward maps
            // contain exactly the same pairs, flipped.
            let forward: BTreeSet<_> = report
                .forward_map
                .iter()
                .map(|e| (e.semibrick.clone(), e.wide_subcat.clone()))
                .collect();
            let backward: BTreeSet<_> = report
                .backward_map
                .iter()
                .map(|e| (e.semibrick.clone(), e.wide_subcat.clone()))
                .collect();
            ensure!(forward == backward, "forward and backward maps disagree");
            // Skips whose witness dims stay inside the window would be real
            // ambiguities; out-of-window skips cannot name a universe class.
            let ambiguous = report
                .truncation_events
                .iter()
                .filter(|e| u.within_bound(&e.middle_dims))
                .count();
            ensure!(ambiguous == 0, "{ambiguous} truncation ambiguities");
            let elapsed = start.elapsed();
            ensure!(
                elapsed < Duration::from_secs(60),
                "single-threaded run took {elapsed:?}, cap is 60s"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_2_bijection_a1_both_structures() {
    criterion(2, "A1/F2 bound 3: 2 semibricks match 2 subcategories, both structures", || {
        let start = Instant::now();
        let u = universe("a1", vec![3])?;
        for structure in [ExactStructure::Standard, ExactStructure::Split] {
            let report =
                verify_bijection(&u, &ExactCtx::new(structure)).map_err(|e| e.to_string())?;
            ensure!(
                report.verdict == Verdict::Pass,
                "verdict {} under {structure:?}",
                report.verdict
            );
            ensure!(
                report.semibricks.len() == 2 && report.wide_subcats.len() == 2,
                "expected 2 on both sides under {structure:?}, found {} and {}",
                report.semibricks.len(),
                report.wide_subcats.len()
            );
        }
        let elapsed = start.elapsed();
        ensure!(
            elapsed < Duration::from_secs(5),
            "run took {elapsed:?}, cap is 5s"
        );
        Ok(())
    });
}

#[test]
fn criterion_3_simples_semibrick_iff_abelian() {
    criterion(3, "abelian if and only if the simples form a semibrick", || {
        let a2 = universe("a2", vec![2, 2])?;
        let std_report =
            verify_corollary(&a2, &ExactCtx::standard()).map_err(|e| e.to_string())?;
        ensure!(
            std_report.verdict == Verdict::Pass,
            "A2 standard verdict {}",
            std_report.verdict
        );
        ensure!(
            std_report.abelian && std_report.simples_semibrick,
            "A2 standard should have both sides true"
        );

        let split_report =
            verify_corollary(&a2, &ExactCtx::split()).map_err(|e| e.to_string())?;
        ensure!(
            split_report.verdict == Verdict::Pass,
            "A2 split verdict {}",
            split_report.verdict
        );
        ensure!(
            !split_report.abelian && !split_report.simples_semibrick,
            "A2 split should have both sides false"
        );
        let witness = split_report
            .simple_non_iso
            .as_ref()
            .ok_or("A2 split is missing the nonzero non-isomorphism witness")?;
        ensure!(
            split_report.simples.contains(&witness.source)
                && split_report.simples.contains(&witness.target),
            "witness endpoints are not split-simples"
        );
        ensure!(!witness.morphism.is_zero(), "witness morphism is zero");
        ensure!(
            !witness.morphism.is_invertible(),
            "witness morphism is an isomorphism"
        );

        let a1 = universe("a1", vec![3])?;
        let a1_report = verify_corollary(&a1, &ExactCtx::split()).map_err(|e| e.to_string())?;
        ensure!(
            a1_report.verdict == Verdict::Pass,
            "A1 split verdict {}",
            a1_report.verdict
        );
        ensure!(
            a1_report.abelian && a1_report.simples_semibrick,
            "A1 split should have both sides true"
        );
        Ok(())
    });
}

#[test]
fn criterion_4_closure_equals_ext_fixpoint() {
    criterion(
        4,
        "filtration closure equals the smallest extension-closed fixpoint",
        || {
            let universes = [
                universe("a1", vec![3])?,
                universe("a2", vec![2, 2])?,
                universe("a3", vec![1, 1, 1])?,
            ];
            let mut pairs = 0usize;
            for u in &universes {
                for structure in [ExactStructure::Standard, ExactStructure::Split] {
                    let ctx = ExactCtx::new(structure);
                    for gens in enumerate_semibricks(u).map_err(|e| e.to_string())? {
                        let closure = filt_closure(u, &ctx, &gens).map_err(|e| e.to_string())?;
                        let ext = smallest_ext_closed(u, &ctx, &gens).map_err(|e| e.to_string())?;
                        // A skipped pair is only unresolved if its middle
                        // could have been a window class.
                        ensure!(
                            ext.truncation_events
                                .iter()
                                .all(|e| !u.within_bound(&e.middle_dims)),
                            "unresolved truncation skips under {structure:?} for {:?}",
                            gens.members()
                        );
                        ensure!(
                            closure == ext.members,
                            "closure and fixpoint disagree under {structure:?} for {:?}",
                            gens.members()
                        );
                        pairs += 1;
                    }
                }
            }
            ensure!(pairs > 0, "no semibricks enumerated");
            Ok(())
        },
    );
}

#[test]
fn criterion_5_generator_morphisms_are_inflations() {
    criterion(
        5,
        "nonzero morphisms out of generators are inflations with in-closure cokernels",
        || {
            let u = universe("a2", vec![2, 2])?;
            let mut checked = 0u64;
            for structure in [ExactStructure::Standard, ExactStructure::Split] {
                let ctx = ExactCtx::new(structure);
                for gens in enumerate_semibricks(&u).map_err(|e| e.to_string())? {
                    let report =
                        check_brick_morphisms(&u, &ctx, &gens).map_err(|e| e.to_string())?;
                    ensure!(
                        report.violations.is_empty(),
                        "{} violations under {structure:?} for {:?}",
                        report.violations.len(),
                        report.generators
                    );
                    checked += report.checked_morphisms;
                }
            }
            ensure!(checked > 0, "no morphisms scanned");
            Ok(())
        },
    );
}

#[test]
fn criterion_6_split_example() {
    criterion(6, "closures and wideness depend on the exact structure", || {
        let u = universe("a2", vec![2, 2])?;
        let report = run_split_example(&u).map_err(|e| e.to_string())?;
        ensure!(report.verdict == Verdict::Pass, "verdict {}", report.verdict);
        ensure!(
            report.standard_closure_is_everything,
            "standard closure missed part of the window"
        );
        ensure!(
            report.split_closure.len() == 9,
            "expected 9 semisimple classes in the split closure, found {}",
            report.split_closure.len()
        );
        ensure!(
            report.split_closure_matches_semisimples,
            "split closure is not the semisimple classes"
        );
        ensure!(
            report.semisimples_proper && report.split_wide_passed == Some(true),
            "semisimples should be proper and wide under the split structure"
        );
        let p1 = a2_projective(&u);
        ensure!(
            report
                .standard_extension_failures
                .iter()
                .any(|f| f.middle == p1),
            "no extension-closure failure with the indecomposable projective as middle"
        );
        Ok(())
    });
}

#[test]
fn criterion_7_selftest() {
    criterion(7, "invariant suites all pass", || {
        let start = Instant::now();
        let report = run_selftest().map_err(|e| e.to_string())?;
        for c in &report.checks {
            ensure!(c.passed, "check {} failed: {}", c.name, c.detail);
        }
        ensure!(report.checks.len() == 7, "expected 7 suites, ran {}", report.checks.len());
        let elapsed = start.elapsed();
        ensure!(
            elapsed < Duration::from_secs(120),
            "selftest took {elapsed:?}, cap is 120s"
        );
        Ok(())
    });
}
