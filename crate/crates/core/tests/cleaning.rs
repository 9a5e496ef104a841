//! Cleaning pipeline end to end over synthetic, deliberately broken data.

use entailbench::datapipe::corrupt::{corrupt_dataset, Corruption};
use entailbench::datapipe::synth::synthetic_dataset;
use entailbench::datapipe::{
    clean_dataset, Category, CleaningOutcome, CleaningReport, DatasetInstance, RuleRepairer, Verifier,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn broken(seed: u64) -> (Vec<DatasetInstance>, Vec<Corruption>) {
    let clean = synthetic_dataset(50, seed);
    corrupt_dataset(&clean, &Verifier::default(), &mut ChaCha8Rng::seed_from_u64(seed + 100))
}

fn clean(instances: &[DatasetInstance], workers: usize) -> (Vec<CleaningOutcome>, CleaningReport) {
    let repairer = RuleRepairer::from_instances(instances);
    clean_dataset(instances, &repairer, 3, &Verifier::default(), workers)
}

#[test]
fn repairs_verify_and_touch_only_annotations() {
    let (bad, log) = broken(1);
    assert_eq!(log.len(), bad.len());
    let verifier = Verifier::default();
    let (outcomes, _) = clean(&bad, 4);
    for (inst, o) in bad.iter().zip(&outcomes) {
        assert_eq!(inst.id, o.id);
        let fixed = o.apply_to(inst);
        assert_eq!(
            (&fixed.id, &fixed.premises_nl, &fixed.conclusion_nl, fixed.expected_label),
            (&inst.id, &inst.premises_nl, &inst.conclusion_nl, inst.expected_label)
        );
        assert_eq!(fixed.premises_fol.len(), inst.premises_fol.len());
        match &o.category {
            Category::VerifiedAfterRepair { .. } => {
                assert!(verifier.verify(&fixed).unwrap().matches_expected, "{}", o.id);
            }
            Category::VerifiedDirect => assert!(o.final_fol.is_none()),
            Category::Problematic { .. } => assert!(o.final_fol.is_none()),
        }
    }
}

#[test]
fn single_defects_are_repaired_in_one_round() {
    let (mut total, mut quick) = (0, 0);
    for seed in 1..=4 {
        let (bad, log) = broken(seed);
        let (outcomes, _) = clean(&bad, 4);
        total += log.len();
        quick += outcomes
            .iter()
            .filter(|o| matches!(o.category, Category::VerifiedAfterRepair { iterations: 1, .. }))
            .count();
    }
    assert_eq!(total, 200);
    assert!(quick * 100 >= total * 95, "{quick}/{total} repaired in one round");
}

#[test]
fn worker_count_does_not_change_results() {
    let (bad, _) = broken(2);
    let (a, ra) = clean(&bad, 1);
    let (b, rb) = clean(&bad, 8);
    assert_eq!(a, b);
    assert_eq!(ra, rb);
}

#[test]
fn untouched_data_verifies_directly() {
    let data = synthetic_dataset(30, 5);
    let (outcomes, report) = clean(&data, 4);
    assert!(outcomes.iter().all(|o| o.category == Category::VerifiedDirect));
    assert_eq!((report.total, report.verified_direct.count), (30, 30));
    assert_eq!(report.verified_direct.percent, 100.0);
}

proptest! {
    #[test]
    fn report_counts_are_conserved(d in 0usize..500, r in 0usize..500, p in 0usize..500) {
        let ids: Vec<String> = (0..p).map(|i| format!("i{i:03}")).collect();
        let report = CleaningReport::from_counts(d, r, p, ids.clone());
        prop_assert_eq!(report.total, d + r + p);
        prop_assert_eq!(report.problematic_ids, ids);
        if report.total > 0 {
            let sum = report.verified_direct.percent + report.verified_after_repair.percent + report.problematic.percent;
            prop_assert!((sum - 100.0).abs() <= 0.15 + 1e-9, "{}", sum);
        }
    }
}
