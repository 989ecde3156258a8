// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use pdbench_core::composer::{compose_task, independence_probe, stride_ok, subsample, ProbeVerdict};
use pdbench_core::config::Config;
use pdbench_core::dataset::BuggyVariant;
use pdbench_core::edit::apply_edits;
use pdbench_core::exec::Sandbox;
use pdbench_core::synthesis::{generate_bugs, GenerationMode, LanguageRules, MutationGenerator};
use pdbench_core::toy::toy_sandbox;
use pdbench_core::toy::toy_tasks;

fn single_pool(sandbox: &Sandbox, cfg: &Config) -> BTreeMap<String, Vec<BuggyVariant>> {
    let gen = MutationGenerator::default();
    let rules = LanguageRules::python();
    toy_tasks()
        .iter()
        .map(|t| {
            let r = generate_bugs(t, GenerationMode::SingleLine(&cfg.single), &gen, &rules, sandbox, cfg.seed).unwrap();
            (t.task_id.clone(), r.variants)
        })
        .collect()
}

#[test]
fn single_line_generation_retains_verified_bugs() {
    let sandbox = toy_sandbox();
    let cfg = Config::default();
    let pool = single_pool(&sandbox, &cfg);
    let tasks = toy_tasks();
    let mut total = 0;
    for t in &tasks {
        let vs = &pool[&t.task_id];
        total += vs.len();
        for v in vs {
            assert_eq!(v.k, 1);
            assert_eq!(v.fix_edits.len(), 1);
            assert_eq!(v.fixed_program().unwrap(), t.gt_program);
            assert!(!sandbox.passes(&v.buggy_program, &t.suite).unwrap());
        }
    }
    eprintln!("single-line retained {total}");
    assert!(total >= 100, "only {total} bugs retained");
}

#[test]
fn composition_respects_stride_and_fails() {
    let sandbox = toy_sandbox();
    let cfg = Config::default();
    let pool = single_pool(&sandbox, &cfg);
    let mut by_k: BTreeMap<usize, usize> = BTreeMap::new();
    for t in toy_tasks() {
        let report = compose_task(&t, &pool[&t.task_id], &cfg.single.compose, &sandbox, cfg.seed).unwrap();
        let kept = subsample(&report.variants, cfg.single.compose.m3, cfg.seed);
        for v in &kept {
            *by_k.entry(v.k).or_default() += 1;
            let blocks = v.fix_blocks().unwrap();
            assert_eq!(blocks.len(), v.k);
            assert!(stride_ok(&blocks, cfg.single.compose.stride));
            assert_eq!(apply_edits(&v.buggy_program, &v.fix_script().unwrap()).unwrap(), t.gt_program);
            assert!(!sandbox.passes(&v.buggy_program, &t.suite).unwrap());
            assert_ne!(independence_probe(v, &t.suite, 64, &sandbox).unwrap(), ProbeVerdict::Inconclusive);
        }
    }
    eprintln!("composed per k: {by_k:?}");
    assert!(by_k.len() == 3);
}

#[test]
fn multi_line_generation_is_atomic_and_composes() {
    let sandbox = toy_sandbox();
    let cfg = Config::default();
    let gen = MutationGenerator::default();
    let rules = LanguageRules::python();
    let mut retained = 0;
    let mut composed: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rejected = BTreeMap::new();
    for t in toy_tasks() {
        let r = generate_bugs(&t, GenerationMode::MultiLine(&cfg.multi), &gen, &rules, &sandbox, cfg.seed).unwrap();
        for (k, n) in r.rejected {
            *rejected.entry(k).or_insert(0) += n;
        }
        for v in &r.variants {
            let blocks = v.fix_blocks().unwrap();
            assert_eq!(blocks.len(), 1);
            assert!((2..=cfg.multi.b_max).contains(&blocks[0].span()), "span {}", blocks[0].span());
            assert!(pdbench_core::synthesis::atomicity_filter(v, &t.suite, &sandbox).unwrap());
        }
        retained += r.variants.len();
        let c = compose_task(&t, &r.variants, &cfg.multi.compose, &sandbox, cfg.seed).unwrap();
        for v in subsample(&c.variants, cfg.multi.compose.m3, cfg.seed) {
            assert!(stride_ok(&v.fix_blocks().unwrap(), cfg.multi.compose.stride));
            *composed.entry(v.k).or_default() += 1;
        }
    }
    eprintln!("multi-line retained {retained}, rejected {rejected:?}, composed {composed:?}");
    assert!(retained >= 20);
}
