//! End-to-end acceptance checks. Each test covers one release
//! criterion and prints a single PASS line on success; a failed
//! assertion marks the criterion failed.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mrda_core::da_core::{run_da, DaState};
use mrda_core::fixtures;
use mrda_core::model::{
    CatChange, CategoryTag, Decision, EffectiveRank, GenderPool, Quota, RStatus, Rank, SeatFlag,
    SupnumReason, VCategory, VirtualPreference, VirtualPreferenceList, VirtualProgram,
    VirtualProgramId,
};
use mrda_core::rounds::{compute_min_cutoff, preprocess_round};
use mrda_core::run_pipeline::{allocate_round, DsRule, RoundInstance, RoundResult};
use mrda_core::simgen::{generate_instance, GenConfig};
use mrda_core::validation::{oracle_stable_match, validate_all};
use mrda_core::virtualization::{compute_gender_pools, GenderPools, Ratio};

fn pass(n: u32, what: &str) {
    println!("[PASS] criterion {n:2}: {what}");
}

fn prog(i: usize, cap: u32) -> VirtualProgram {
    VirtualProgram::new(
        VirtualProgramId::cell(
            "T01",
            &format!("{i:04}"),
            Quota::AllIndia,
            CategoryTag::Open,
            GenderPool::GenderNeutral,
        ),
        cap,
    )
}

fn pref(program: u32, merit_pos: u64) -> VirtualPreference {
    VirtualPreference {
        program,
        opt_no: 1,
        eff_rank: EffectiveRank::standard(Rank::from_integer(merit_pos)),
    }
}

fn list(entries: &[VirtualPreference]) -> VirtualPreferenceList {
    VirtualPreferenceList { entries: entries.to_vec() }
}

fn matched_program(state: &DaState, prefs: &[VirtualPreferenceList], cand: usize) -> Option<u32> {
    state.matched(prefs, cand as u32).map(|e| e.program)
}

/// Criterion 1: the three-candidate cyclic instance where everyone is
/// top-ranked at their own first choice; deferred acceptance gives
/// everyone that first choice, in well under a millisecond.
#[test]
fn criterion_01_worked_example_three_candidates() {
    let programs = vec![prog(0, 1), prog(1, 1), prog(2, 1)];
    // Programs: 0 = engineering college, 1 = elite institute, 2 =
    // architecture school. Merit positions per program: (A,B,C) at 0,
    // (B,C,A) at 1, (C,A,B) at 2.
    let prefs = vec![
        list(&[pref(1, 3), pref(2, 2), pref(0, 1)]), // A: 1, 2, 0
        list(&[pref(2, 3), pref(0, 2), pref(1, 1)]), // B: 2, 0, 1
        list(&[pref(0, 3), pref(1, 2), pref(2, 1)]), // C: 0, 1, 2
    ];
    let start = Instant::now();
    let mut state = DaState::initial(&prefs, programs.len());
    run_da(&prefs, &programs, &mut state);
    let elapsed = start.elapsed();
    assert_eq!(matched_program(&state, &prefs, 0), Some(1), "A gets the elite institute");
    assert_eq!(matched_program(&state, &prefs, 1), Some(2), "B gets the architecture school");
    assert_eq!(matched_program(&state, &prefs, 2), Some(0), "C gets the engineering college");
    assert!(elapsed.as_micros() < 1000, "took {elapsed:?}, budget 1 ms");
    pass(1, "three-candidate instance: everyone gets their first choice in < 1 ms");
}

/// Criterion 2: the de-reservation chain example ends at the expected
/// seat matrix with the expected inference chain.
#[test]
fn criterion_02_dereservation_example() {
    let instance = fixtures::dereservation_instance();
    let result = allocate_round(1, &instance, DsRule::Supernumerary2016, false).unwrap();
    let stat = |cat: CategoryTag| {
        result
            .stats
            .iter()
            .find(|s| {
                s.vcategory == VCategory::Cell(cat) && s.gender_pool == GenderPool::GenderNeutral
            })
            .unwrap()
            .clone()
    };
    let open = stat(CategoryTag::Open);
    let open_pwd = stat(CategoryTag::OpenPwd);
    let obc = stat(CategoryTag::ObcNcl);
    let obc_pwd = stat(CategoryTag::ObcNclPwd);
    // Final matrix.
    assert_eq!((open.new_cap, open.total_allotted), (21, 18), "OPEN 21 with 18 filled");
    assert_eq!((obc.new_cap, obc.total_allotted), (11, 11), "OBC-NCL 11/11");
    assert_eq!(obc_pwd.new_cap, 0, "OBC-NCL-PwD emptied");
    assert_eq!((open_pwd.new_cap, open_pwd.total_allotted), (1, 1), "OPEN-PwD preparatory-filled");
    assert_eq!(
        open_pwd.closing_rank.unwrap().tier,
        mrda_core::model::Tier::Preparatory,
        "OPEN-PwD seat filled from the preparatory tier"
    );
    // Inference chain: 2 PwD seats to OBC-NCL, 1 OBC-NCL seat to OPEN,
    // leaving 3 OPEN seats unfilled.
    assert_eq!(obc_pwd.dereserve_from, 2);
    assert_eq!(obc.dereserve_to, 2);
    assert_eq!(obc.dereserve_from, 1);
    assert_eq!(open.dereserve_to, 1);
    assert_eq!(open.new_cap - open.total_allotted, 3, "3 OPEN seats unfilled");
    pass(2, "de-reservation example: final matrix and inference chain reproduced");
}

/// One random tie-free instance at the matching-engine level: per
/// program a fresh merit permutation, per candidate a random ordered
/// subset of programs.
fn random_instance(
    rng: &mut ChaCha8Rng,
    max_cands: usize,
    max_progs: usize,
    max_cap: u32,
) -> (Vec<VirtualProgram>, Vec<VirtualPreferenceList>) {
    let n_prog = rng.gen_range(1..=max_progs);
    let n_cand = rng.gen_range(1..=max_cands);
    let programs: Vec<VirtualProgram> =
        (0..n_prog).map(|i| prog(i, rng.gen_range(0..=max_cap))).collect();
    // merit[p][c] = tie-free merit position of candidate c at program p.
    let mut merit = vec![vec![0u64; n_cand]; n_prog];
    for column in &mut merit {
        let mut order: Vec<usize> = (0..n_cand).collect();
        order.shuffle(rng);
        for (pos, &c) in order.iter().enumerate() {
            column[c] = pos as u64 + 1;
        }
    }
    let prefs = (0..n_cand)
        .map(|c| {
            let len = rng.gen_range(1..=n_prog);
            let picks = rand::seq::index::sample(rng, n_prog, len);
            VirtualPreferenceList {
                entries: picks
                    .into_iter()
                    .map(|p| pref(p as u32, merit[p][c]))
                    .collect(),
            }
        })
        .collect();
    (programs, prefs)
}

/// Criterion 3: on 1,000 seeded tie-free instances the allocator's
/// output equals the independent cutoff fixed-point oracle exactly.
#[test]
fn criterion_03_oracle_equivalence() {
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0A11_0000 + seed);
        let (programs, prefs) = random_instance(&mut rng, 12, 6, 3);
        let mut state = DaState::initial(&prefs, programs.len());
        run_da(&prefs, &programs, &mut state);
        let engine: Vec<Option<u32>> =
            (0..prefs.len()).map(|c| matched_program(&state, &prefs, c)).collect();
        let caps: Vec<u32> = programs.iter().map(|p| p.capacity).collect();
        let oracle = oracle_stable_match(&prefs, &caps).unwrap();
        assert_eq!(engine, oracle, "seed {seed}");
    }
    pass(3, "1000 random instances match the independent stability oracle exactly");
}

/// Criterion 4: allocation is invariant under the order candidates
/// propose, including with rank ties and min-cutoff guarantees.
#[test]
fn criterion_04_order_invariance() {
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x04D4_0000 + seed);
        let n_prog = rng.gen_range(1..=5);
        let n_cand = rng.gen_range(2..=10);
        let mut programs: Vec<VirtualProgram> =
            (0..n_prog).map(|i| prog(i, rng.gen_range(0..=2))).collect();
        for p in &mut programs {
            if rng.gen_bool(0.4) {
                p.min_cutoff =
                    Some(EffectiveRank::standard(Rank::from_integer(rng.gen_range(1..=4))));
            }
        }
        // Ties: merit positions drawn from a small range.
        let prefs: Vec<VirtualPreferenceList> = (0..n_cand)
            .map(|_| {
                let len = rng.gen_range(1..=n_prog);
                let picks = rand::seq::index::sample(&mut rng, n_prog, len);
                VirtualPreferenceList {
                    entries: picks
                        .into_iter()
                        .map(|p| pref(p as u32, rng.gen_range(1..=4)))
                        .collect(),
                }
            })
            .collect();
        let mut reference: Option<BTreeSet<(usize, u32)>> = None;
        for shuffle in 0..100u64 {
            let mut state = DaState::initial(&prefs, programs.len());
            let mut order_rng = ChaCha8Rng::seed_from_u64(seed * 1000 + shuffle);
            state.queue.make_contiguous().shuffle(&mut order_rng);
            run_da(&prefs, &programs, &mut state);
            let outcome: BTreeSet<(usize, u32)> = (0..n_cand)
                .filter_map(|c| matched_program(&state, &prefs, c).map(|p| (c, p)))
                .collect();
            match &reference {
                None => reference = Some(outcome),
                Some(r) => assert_eq!(&outcome, r, "seed {seed} shuffle {shuffle}"),
            }
        }
    }
    pass(4, "200 instances x 100 proposal-order shuffles give identical allotments");
}

/// All ordered sublists of 0..n of length <= max_len.
fn ordered_sublists(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for base in &frontier {
            for p in 0..n {
                if !base.contains(&p) {
                    let mut ext = base.clone();
                    ext.push(p);
                    next.push(ext);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Criterion 5: no candidate can strictly improve their outcome by
/// misreporting their preference list (tie-free, no guarantees).
#[test]
fn criterion_05_truthfulness() {
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7201_0000 + seed);
        let (programs, prefs) = random_instance(&mut rng, 4, 4, 2);
        let n_prog = programs.len();
        let mut state = DaState::initial(&prefs, n_prog);
        run_da(&prefs, &programs, &mut state);
        let honest: Vec<Option<u32>> =
            (0..prefs.len()).map(|c| matched_program(&state, &prefs, c)).collect();
        // merit[c][p] recovered from the honest lists; programs absent
        // from a candidate's list keep their true merit via the same
        // per-program permutation, so regenerate it for manipulation.
        for cand in 0..prefs.len() {
            // True preference position of each program for this
            // candidate: position in their honest list, absent = never
            // acceptable (a manipulation cannot make an unlisted
            // program count as an improvement).
            let true_pos = |p: Option<u32>| -> usize {
                match p {
                    None => usize::MAX,
                    Some(p) => prefs[cand]
                        .entries
                        .iter()
                        .position(|e| e.program == p)
                        .unwrap_or(usize::MAX),
                }
            };
            let honest_pos = true_pos(honest[cand]);
            let listed: Vec<&VirtualPreference> = prefs[cand].entries.iter().collect();
            for lie in ordered_sublists(listed.len(), 4) {
                let fake = VirtualPreferenceList {
                    entries: lie.iter().map(|&i| listed[i].clone()).collect(),
                };
                let mut prefs2: Vec<VirtualPreferenceList> = prefs.clone();
                prefs2[cand] = fake;
                let mut state2 = DaState::initial(&prefs2, n_prog);
                run_da(&prefs2, &programs, &mut state2);
                let got = matched_program(&state2, &prefs2, cand);
                assert!(
                    true_pos(got) >= honest_pos,
                    "seed {seed}: candidate {cand} improved {honest_pos} -> {:?} by lying",
                    true_pos(got)
                );
            }
        }
    }
    pass(5, "exhaustive list manipulation never strictly improves any candidate");
}

fn corpus(n: usize) -> Vec<(u64, RoundInstance, RoundResult)> {
    (0..n as u64)
        .map(|seed| {
            let inst = generate_instance(0xC0_0000 + seed, &GenConfig::default()).to_round_instance();
            let result = allocate_round(1, &inst, DsRule::Supernumerary2016, false).unwrap();
            (seed, inst, result)
        })
        .collect()
}

/// Applies `mutate` to every instance in the corpus until one mutated
/// output draws at least one finding; panics if none does.
fn assert_mutation_detected(
    name: &str,
    corpus: &[(u64, RoundInstance, RoundResult)],
    mutate: impl Fn(&RoundInstance, &mut Vec<mrda_core::model::AllotmentRow>, &mut Vec<mrda_core::model::ProgramStats>) -> bool,
) {
    for (seed, inst, result) in corpus {
        let mut allotment = result.allotment.clone();
        let mut stats = result.stats.clone();
        if !mutate(inst, &mut allotment, &mut stats) {
            continue;
        }
        if !validate_all(inst, &allotment, &stats).is_empty() {
            return;
        }
        panic!("mutation class {name:?} (seed {seed}) produced no findings");
    }
    panic!("mutation class {name:?} never applicable on the corpus");
}

/// Criterion 6: validation reports zero findings on clean engine output
/// and at least one finding for each mutation class.
#[test]
fn criterion_06_validation_closure() {
    let corpus = corpus(30);
    for (seed, inst, result) in &corpus {
        let findings = validate_all(inst, &result.allotment, &result.stats);
        assert!(findings.is_empty(), "seed {seed}: {findings:?}");
    }

    // 1. Rank swap between two admitted candidates.
    assert_mutation_detected("rank swap", &corpus, |_, allotment, _| {
        let pair = (0..allotment.len()).flat_map(|i| (0..i).map(move |j| (i, j))).find(|&(i, j)| {
            allotment[i].rank != allotment[j].rank && allotment[i].flag == SeatFlag::Normal
                && allotment[j].flag == SeatFlag::Normal
        });
        match pair {
            Some((i, j)) => {
                let tmp = allotment[i].rank;
                allotment[i].rank = allotment[j].rank;
                allotment[j].rank = tmp;
                true
            }
            None => false,
        }
    });

    // 2. Capacity tamper: shrink a filled program's post-de-reservation
    // capacity.
    assert_mutation_detected("capacity tamper", &corpus, |_, _, stats| {
        match stats.iter_mut().find(|s| s.new_cap > 0 && s.total_allotted == s.new_cap) {
            Some(s) => {
                s.new_cap -= 1;
                true
            }
            None => false,
        }
    });

    // 3. Pool swap: move a gender-neutral admit into the female pool.
    assert_mutation_detected("pool swap", &corpus, |_, allotment, _| {
        match allotment
            .iter_mut()
            .find(|r| r.gender_pool == GenderPool::GenderNeutral && r.flag == SeatFlag::Normal)
        {
            Some(r) => {
                r.gender_pool = GenderPool::FemaleOnly;
                true
            }
            None => false,
        }
    });

    // 4. Reason blanking: erase a supernumerary reason code.
    assert_mutation_detected("reason blanking", &corpus, |_, allotment, _| {
        match allotment.iter_mut().find(|r| r.supnum_reason != SupnumReason::NotApplicable) {
            Some(r) => {
                r.supnum_reason = SupnumReason::NotApplicable;
                true
            }
            None => false,
        }
    });

    // 5. Dropping a row protected by a min-cutoff guarantee: build a
    // second round whose cutoffs cover every first-round admit, then
    // delete one admitted row.
    {
        let (_, inst, r1) = &corpus[0];
        let cutoffs = compute_min_cutoff(
            &inst.table,
            &r1.indian_state,
            &r1.indian_prefs,
            &inst.candidates,
            &r1.allotment,
        );
        let mut inst2 = inst.clone();
        for p in &mut inst2.table.programs {
            if let Some(c) = cutoffs.get(&p.id) {
                p.min_cutoff = *c;
            }
        }
        let r2 = allocate_round(2, &inst2, DsRule::Supernumerary2016, false).unwrap();
        assert!(validate_all(&inst2, &r2.allotment, &r2.stats).is_empty());
        let mut mutated = r2.allotment.clone();
        let victim = mutated
            .iter()
            .position(|r| r.flag == SeatFlag::Normal)
            .expect("round 2 has a normal admit");
        mutated.remove(victim);
        assert!(
            validate_all(&inst2, &mutated, &r2.stats)
                .iter()
                .any(|f| f.check_id == 5 || f.check_id == 9),
            "dropping a protected admit must be flagged"
        );
    }

    // 6. Quota violation: grant a home-state seat at an institute with
    // no home state.
    assert_mutation_detected("quota violation", &corpus, |inst, allotment, _| {
        match allotment.iter_mut().find(|r| {
            r.allotted_quota == Quota::AllIndia
                && inst.profiles.get(&r.inst_cd).is_some_and(|p| p.home_states.is_empty())
        }) {
            Some(r) => {
                r.allotted_quota = Quota::HomeState;
                true
            }
            None => false,
        }
    });

    // 7. Ineligible category: hand an OPEN candidate's seat to a
    // reserved cell they hold no rank in.
    assert_mutation_detected("ineligible category", &corpus, |inst, allotment, _| {
        match allotment.iter_mut().find(|r| {
            r.allotted_cat == "OPNO"
                && inst
                    .candidates
                    .iter()
                    .any(|c| c.roll_no == r.roll_no && c.category == CategoryTag::Open)
        }) {
            Some(r) => {
                r.allotted_cat = "STNO".to_string();
                true
            }
            None => false,
        }
    });

    // 8. Willingness violation: move an admit to a program the
    // candidate never listed.
    assert_mutation_detected("willingness violation", &corpus, |inst, allotment, _| {
        match allotment.iter_mut().find(|r| r.flag == SeatFlag::Normal) {
            Some(r) => {
                let cand = inst.candidates.iter().position(|c| c.roll_no == r.roll_no).unwrap();
                let listed: BTreeSet<&str> =
                    inst.choices[cand].iter().map(|c| c.br_cd.as_str()).collect();
                match (1..=9999).map(|b| format!("{b:04}")).find(|b| !listed.contains(b.as_str()))
                {
                    Some(unlisted) => {
                        r.br_cd = unlisted;
                        true
                    }
                    None => false,
                }
            }
            None => false,
        }
    });

    pass(6, "zero findings on clean output; all 8 mutation classes detected");
}

/// Criterion 7: across randomized two-round scenarios, no candidate
/// with unchanged credentials who floats, slides or freezes ever ends
/// up strictly worse in round 2, and the min-cutoff guarantee holds.
#[test]
fn criterion_07_round_guarantees() {
    let config = GenConfig { n_candidates: 30, ..GenConfig::default() };
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x2042_0000 + seed);
        let inst = generate_instance(0x2041_0000 + seed, &config).to_round_instance();
        let r1 = allocate_round(1, &inst, DsRule::Supernumerary2016, false).unwrap();

        // Reporting-center churn.
        let mut candidates = inst.candidates.clone();
        let mut allotment = r1.allotment.clone();
        let mut seated: BTreeMap<String, u32> = BTreeMap::new();
        for row in &mut allotment {
            seated.insert(row.roll_no.clone(), row.opt_no);
            row.withdraw = rng.gen_bool(0.1);
            row.rstatus = match rng.gen_range(0..20) {
                0 => RStatus::NotReported,
                1 => RStatus::DualReporting,
                2 => RStatus::ReportedCancelled,
                3..=4 => RStatus::Retained,
                5 => RStatus::RetainedUpgraded,
                _ => RStatus::Reported,
            };
        }
        for c in &mut candidates {
            if seated.contains_key(&c.roll_no) {
                c.decision = match rng.gen_range(0..10) {
                    0 => Some(Decision::Reject),
                    1..=3 => Some(Decision::Freeze),
                    4..=5 => Some(Decision::Slide),
                    _ => Some(Decision::Float),
                };
            }
            // Credential churn.
            c.cat_change = match rng.gen_range(0..20) {
                0 => CatChange::SeatCancelled,
                1 => CatChange::ChangedSeatKept,
                2 => CatChange::VisionSeatCancelled,
                _ => CatChange::NoChange,
            };
        }

        // Min-cutoffs from round 1 state, Indian and foreign sides.
        let indian = compute_min_cutoff(
            &inst.table,
            &r1.indian_state,
            &r1.indian_prefs,
            &candidates,
            &allotment,
        );
        let foreign = compute_min_cutoff(
            &inst.table,
            &r1.foreign_state,
            &r1.foreign_prefs,
            &candidates,
            &allotment,
        );
        let (cands2, choices2) = preprocess_round(&candidates, &inst.choices, &allotment).unwrap();
        let mut table2 = inst.table.clone();
        for p in &mut table2.programs {
            let merged = indian.get(&p.id).copied().flatten().or(foreign
                .get(&p.id)
                .copied()
                .flatten());
            p.min_cutoff = merged;
        }
        let inst2 = RoundInstance {
            candidates: cands2.clone(),
            choices: choices2,
            profiles: inst.profiles.clone(),
            table: table2,
        };
        let r2 = allocate_round(2, &inst2, DsRule::Supernumerary2016, false).unwrap();
        let findings = validate_all(&inst2, &r2.allotment, &r2.stats);
        assert!(
            findings.iter().all(|f| f.check_id != 5),
            "seed {seed}: min-cutoff findings {findings:?}"
        );

        let round2: BTreeMap<&str, u32> =
            r2.allotment.iter().map(|r| (r.roll_no.as_str(), r.opt_no)).collect();
        for row in &allotment {
            let c = candidates.iter().find(|c| c.roll_no == row.roll_no).unwrap();
            let guaranteed = matches!(
                c.decision,
                Some(Decision::Float) | Some(Decision::Slide) | Some(Decision::Freeze)
            ) && !row.withdraw
                && !row.rstatus.cancels_seat()
                && c.cat_change == CatChange::NoChange;
            if !guaranteed {
                continue;
            }
            let new_opt = round2.get(row.roll_no.as_str());
            assert!(
                new_opt.is_some_and(|&o| o <= row.opt_no),
                "seed {seed}: candidate {} held option {} but got {new_opt:?} in round 2",
                row.roll_no,
                row.opt_no
            );
        }
    }
    pass(7, "500 two-round scenarios: decisions honored, nobody worse off, cutoff check clean");
}

/// Independent recomputation of the female-pool split: the smallest
/// supernumerary top-up x such that (f+x) female seats against (C+x)
/// total meets the target fraction; no top-up when the prior intake
/// already meets it, with the female pool capped at a fifth of
/// capacity.
fn expected_pools(c: u32, f: u32, target: Ratio) -> GenderPools {
    let (cap, f64_, num, den) = (c as u64, f.min(c) as u64, target.num, target.den);
    if f64_ * den < num * cap {
        let mut x = 0u64;
        while (f64_ + x) * den < num * (cap + x) {
            x += 1;
        }
        GenderPools {
            female_only: (f64_ + x) as u32,
            gender_neutral: (cap - f64_) as u32,
            added: x as u32,
        }
    } else {
        let female = if 5 * f64_ <= cap { f64_ } else { cap / 5 };
        GenderPools {
            female_only: female as u32,
            gender_neutral: (cap - female) as u32,
            added: 0,
        }
    }
}

/// Criterion 8: female-pool arithmetic matches an independent
/// recomputation over a dense grid, and gendered instances pass the
/// gender fairness checks.
#[test]
fn criterion_08_female_pool_arithmetic() {
    for target in [Ratio { num: 14, den: 100 }, Ratio { num: 17, den: 100 }, Ratio { num: 20, den: 100 }] {
        for c in 1..=200u32 {
            for f in 0..=c {
                let got = compute_gender_pools(c, Some(f), target);
                let want = expected_pools(c, f, target);
                assert_eq!(got, want, "C={c} f={f} target={}/{}", target.num, target.den);
            }
        }
    }
    // Gendered corpus: heavy female participation and female pools in
    // every matrix; gender checks 6 and 7 must stay clean.
    let config = GenConfig { female_fraction: 0.5, ..GenConfig::default() };
    for seed in 0..500u64 {
        let inst = generate_instance(0xFE_0000 + seed, &config).to_round_instance();
        let result = allocate_round(1, &inst, DsRule::Supernumerary2016, false).unwrap();
        let findings = validate_all(&inst, &result.allotment, &result.stats);
        let gender: Vec<_> =
            findings.iter().filter(|f| f.check_id == 6 || f.check_id == 7).collect();
        assert!(gender.is_empty(), "seed {seed}: {gender:?}");
    }
    pass(8, "pool split matches closed form on the full grid; gender checks clean on 500 runs");
}

/// Criterion 9: the three-institute rejection-chain scenario triggers
/// exactly one race under the 2015 preferential rule; reverting with a
/// supernumerary grant preserves every other processed-seat multiset.
#[test]
fn criterion_09_ds_2015_race() {
    let cast = fixtures::ds_race_cast();
    let instance = fixtures::ds_race_instance();

    let strict = allocate_round(1, &instance, DsRule::Preferential2015, false).unwrap();
    assert_eq!(strict.ds_races, 1, "exactly one race");
    assert_eq!(strict.stained, vec![VirtualProgramId::ds("ID2")]);

    let relaxed = allocate_round(1, &instance, DsRule::Preferential2015, true).unwrap();
    assert_eq!(relaxed.ds_races, 1);
    assert!(relaxed.stained.is_empty());
    let row = |name: &str| {
        relaxed
            .allotment
            .iter()
            .find(|r| r.roll_no == cast[name])
            .unwrap_or_else(|| panic!("{name} unseated"))
    };
    // Exactly one supernumerary grant: the reverted seat.
    let supernumerary: Vec<_> = relaxed
        .allotment
        .iter()
        .filter(|r| r.supnum_reason != SupnumReason::NotApplicable)
        .collect();
    assert_eq!(supernumerary.len(), 1);
    assert_eq!(supernumerary[0].roll_no, cast["Chetan"]);
    assert_eq!(supernumerary[0].supnum_reason, SupnumReason::Ds);
    // Everyone else keeps their pre-chain seat, so the processed-seat
    // program multiset of every other DS program is preserved.
    assert_eq!(row("Ekansh").inst_cd, "IK3");
    assert_eq!(row("Dhanush").inst_cd, "IB1");
    assert_eq!((row("Amar").inst_cd.as_str(), row("Amar").br_cd.as_str()), ("ID2", "4102"));
    assert_eq!(row("Akbar").br_cd, "4107");
    assert_eq!(row("Paresh").inst_cd, "IB1");
    assert_eq!(row("Qadir").inst_cd, "IB1");
    // The benign tag-matching variant stays race-free.
    let benign =
        allocate_round(1, &fixtures::ds_race_benign_instance(), DsRule::Preferential2015, false)
            .unwrap();
    assert!(benign.stained.is_empty());
    assert_eq!(benign.ds_races, 0);
    pass(9, "race detected once, reverted into one supernumerary grant, benign variant clean");
}

fn peak_rss_bytes() -> u64 {
    let status = std::fs::read_to_string("/proc/self/status").unwrap();
    for line in status.lines() {
        if let Some(rest) = line.strip_prefix("VmHWM:") {
            let kb: u64 = rest.trim().trim_end_matches(" kB").trim().parse().unwrap();
            return kb * 1024;
        }
    }
    0
}

/// Criterion 10: a million candidates with 20 choices each allocate in
/// under a minute and under 8 GB of peak memory.
#[test]
fn criterion_10_throughput() {
    let config = GenConfig {
        n_candidates: 1_000_000,
        n_institutes: 100,
        branches_per_institute: 5,
        min_choices: 20,
        max_choices: 20,
        max_cell_capacity: 40,
        foreign_fraction: 0.001,
        ..GenConfig::default()
    };
    let instance = generate_instance(0xB16, &config).to_round_instance();
    assert!(instance.candidates.len() == 1_000_000);
    assert!(instance.choices.iter().all(|c| c.len() == 20));
    let start = Instant::now();
    let result = allocate_round(1, &instance, DsRule::Supernumerary2016, false).unwrap();
    let elapsed = start.elapsed();
    let peak = peak_rss_bytes();
    assert!(!result.allotment.is_empty());
    assert!(elapsed.as_secs_f64() < 60.0, "allocation took {elapsed:?}");
    assert!(peak < 8 * 1024 * 1024 * 1024, "peak RSS {peak} bytes");
    pass(
        10,
        &format!(
            "1M candidates x 20 choices: {} seats in {:.1} s, peak RSS {:.2} GB",
            result.allotment.len(),
            elapsed.as_secs_f64(),
            peak as f64 / (1024.0 * 1024.0 * 1024.0)
        ),
    );
}
