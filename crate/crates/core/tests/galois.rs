//! Finite approximation of the definability/preservation correspondence:
//! a relation definable from a language must be preserved by every pattern
//! that preserves the language. The converse direction is only sampled, so
//! a "preserved everywhere but undefinable" observation is logged rather
//! than asserted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use udcsp_core::definability::fgpp_definable;
use udcsp_core::model::{ConstraintLanguage, MapFamilyKind, Relation};
use udcsp_core::patterns::{interpret_pattern, m_preserves, preserves, Pattern};
use udcsp_core::random::random_relation;
use udcsp_core::Budget;

fn random_pattern(rng: &mut ChaCha8Rng, arity: usize, p: usize) -> Pattern {
    let cells = p.pow(arity as u32);
    let mut entries = Vec::new();
    for idx in 0..cells {
        if !rng.gen_bool(0.4) {
            continue;
        }
        let mut input = vec![0u16; arity];
        let mut rest = idx;
        for k in (0..arity).rev() {
            input[k] = (rest % p) as u16;
            rest /= p;
        }
        let outputs = rng.gen_range(1..=2);
        for _ in 0..outputs {
            entries.push((input.clone(), rng.gen_range(0..p) as u16));
        }
    }
    Pattern::new(arity, p, entries).unwrap()
}

#[test]
fn galois_cross_check_at_desk_scale() {
    let budget = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let mut logged = 0;
    for trial in 0..30 {
        let d = rng.gen_range(2..=3usize);
        let arity1 = rng.gen_range(1..=2);
        let lang = ConstraintLanguage::new(vec![
            random_relation(&mut rng, "g0", d, 2, 0.6),
            random_relation(&mut rng, "g1", d, arity1, 0.6),
        ])
        .unwrap();
        let n = rng.gen_range(2..=3usize);
        let target = random_relation(&mut rng, "t", n, 2, 0.5);
        let definable = fgpp_definable(&lang, MapFamilyKind::Monotone, &target, &budget)
            .unwrap()
            .is_some();

        let mut all_preserving_preserve_target = true;
        for _ in 0..300 {
            let arity = rng.gen_range(1..=2);
            let pattern = random_pattern(&mut rng, arity, n);
            if m_preserves(&lang, &pattern, MapFamilyKind::Monotone, &budget)
                .unwrap()
                .is_some()
            {
                continue; // does not preserve the language
            }
            // Id interpretation over the target's own domain
            let f = interpret_pattern(&pattern, n, MapFamilyKind::Id, &budget).unwrap();
            let holds = preserves(&target, &f).unwrap().is_none();
            if definable {
                assert!(
                    holds,
                    "trial {trial}: definable target violated by a language-preserving \
                     pattern {:?} - Galois direction broken",
                    pattern.entries()
                );
            } else if !holds {
                all_preserving_preserve_target = false;
            }
        }
        if !definable && all_preserving_preserve_target {
            logged += 1;
            println!(
                "trial {trial}: target undefinable yet preserved by every sampled pattern \
                 (one-directional approximation, not a failure)"
            );
        }
    }
    println!("galois cross-check: {logged}/30 trials in the logged-only direction");
}
