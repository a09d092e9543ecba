//! Independent correctness checks over a round's inputs and outputs, an
//! allotment comparator, and a brute-force stability oracle used by the
//! test suite.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{
    effective_rank, AllotmentRow, CategoryTag, EffectiveRank, GenderPool, ProgramStats, Quota,
    SeatFlag, SupnumReason, Tier, VCategory, VirtualPreferenceList,
};
use crate::rounds::program_of_row;
use crate::run_pipeline::RoundInstance;
use crate::virtualization::{category_ladder, expand_preferences, InstituteKind};

/// One validation finding. `check_id` is 1..=9.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub check_id: u8,
    pub subject: String,
    pub detail: String,
}

/// Supernumerary reasons that do not consume declared capacity.
fn is_carveout(r: SupnumReason) -> bool {
    matches!(
        r,
        SupnumReason::ClosingRankEquality
            | SupnumReason::MinCutoff
            | SupnumReason::ForeignEquality
            | SupnumReason::ForeignMinCutoff
            | SupnumReason::DsEquality
            | SupnumReason::DsMinCutoff
    )
}

struct ProgramView {
    idx: u32,
    new_cap: u32,
    min_cutoff: Option<EffectiveRank>,
    /// (candidate index, rank, reason), merit-sorted.
    admits: Vec<(usize, EffectiveRank, SupnumReason)>,
}

impl ProgramView {
    fn base_admits(&self) -> impl Iterator<Item = &(usize, EffectiveRank, SupnumReason)> {
        self.admits.iter().filter(|(_, _, r)| !is_carveout(*r))
    }

    fn closing(&self) -> Option<EffectiveRank> {
        self.base_admits().map(|(_, r, _)| *r).max()
    }

    fn is_full(&self) -> bool {
        self.base_admits().count() >= self.new_cap as usize
    }
}

/// Runs every check over one round's parsed inputs and outputs.
pub fn validate_all(
    instance: &RoundInstance,
    allotment: &[AllotmentRow],
    stats: &[ProgramStats],
) -> Vec<Finding> {
    let mut findings = Vec::new();
    let table = &instance.table;
    let by_roll: BTreeMap<&str, usize> = instance
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (c.roll_no.as_str(), i))
        .collect();

    // Stats per program index.
    let mut stat_of: Vec<Option<&ProgramStats>> = vec![None; table.len()];
    for s in stats {
        let id = crate::model::VirtualProgramId {
            institute: s.inst_cd.clone(),
            branch: s.br_cd.clone(),
            quota: s.quota,
            category: s.vcategory,
            pool: s.gender_pool,
            foreign_pool: s.foreign_pool,
        };
        if let Some(idx) = table.lookup(&id) {
            stat_of[idx as usize] = Some(s);
        }
    }

    // Build per-program admit views from the allotment.
    let mut views: Vec<ProgramView> = (0..table.len() as u32)
        .map(|idx| ProgramView {
            idx,
            new_cap: stat_of[idx as usize]
                .map(|s| s.new_cap)
                .unwrap_or_else(|| table.get(idx).capacity),
            min_cutoff: stat_of[idx as usize]
                .map(|s| s.min_cutoff)
                .unwrap_or_else(|| table.get(idx).min_cutoff),
            admits: Vec::new(),
        })
        .collect();
    let mut allotted_program: Vec<Option<(u32, u32, EffectiveRank)>> =
        vec![None; instance.candidates.len()];
    for row in allotment {
        let x = match by_roll.get(row.roll_no.as_str()) {
            Some(&x) => x,
            None => {
                findings.push(Finding {
                    check_id: 4,
                    subject: row.roll_no.clone(),
                    detail: "allotment row for unknown candidate".into(),
                });
                continue;
            }
        };
        let id = program_of_row(row);
        let idx = match table.lookup(&id) {
            Some(i) => i,
            None => {
                findings.push(Finding {
                    check_id: 9,
                    subject: row.roll_no.clone(),
                    detail: format!("allotment references unknown program {id:?}"),
                });
                continue;
            }
        };
        views[idx as usize].admits.push((x, row.rank, row.supnum_reason));
        allotted_program[x] = Some((idx, row.opt_no, row.rank));
    }
    for v in &mut views {
        v.admits.sort_by_key(|(x, r, _)| (*r, *x));
    }

    // Expansions, as the allocator would see them.
    let prefs: Vec<VirtualPreferenceList> = instance
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| expand_preferences(c, &instance.choices[i], &instance.profiles, table))
        .collect();

    // Per candidate: the list position of the allotted program, and the
    // rejected prefix.
    for (x, c) in instance.candidates.iter().enumerate() {
        let list = &prefs[x].entries;
        let allotted_pos = allotted_program[x].and_then(|(idx, opt, _)| {
            list.iter()
                .position(|e| e.program == idx && e.opt_no == opt)
                .or_else(|| list.iter().position(|e| e.program == idx))
        });
        if allotted_program[x].is_some() && allotted_pos.is_none() {
            findings.push(Finding {
                check_id: 4,
                subject: c.roll_no.clone(),
                detail: "allotted a program absent from the expanded choice list".into(),
            });
            continue;
        }
        let rejected_prefix = allotted_pos.unwrap_or(list.len());
        for e in &list[..rejected_prefix] {
            let v = &views[e.program as usize];
            let prog = table.get(e.program);
            let r = e.eff_rank;
            if v.new_cap == 0 {
                continue;
            }
            // Check 5: min-cutoff benefit.
            if let Some(m) = v.min_cutoff {
                if r <= m {
                    findings.push(Finding {
                        check_id: 5,
                        subject: c.roll_no.clone(),
                        detail: format!(
                            "rank {r} clears min-cutoff {m} of {:?} yet was rejected",
                            prog.id
                        ),
                    });
                    continue;
                }
            }
            // Check 1: fairness via closing ranks.
            let legal = if prog.id.foreign_pool {
                let foreign_full = v.is_full()
                    && v.closing().map(|cl| cl < r).unwrap_or(false);
                let open_block = open_view_blocks(table, &views, prog, r);
                foreign_full || open_block
            } else {
                v.is_full() && v.closing().map(|cl| cl < r).unwrap_or(false)
            };
            if !legal {
                findings.push(Finding {
                    check_id: 1,
                    subject: c.roll_no.clone(),
                    detail: format!(
                        "rejected by {:?} (closing {:?}, cap {}) despite rank {r}",
                        prog.id,
                        v.closing(),
                        v.new_cap
                    ),
                });
            }
            // Checks 6/7: gender guarantees on gender-neutral pools.
            if prog.id.pool == GenderPool::GenderNeutral && !prog.id.foreign_pool {
                for &(y, yr, reason) in v.admits.iter() {
                    if is_carveout(reason) || yr <= r {
                        continue;
                    }
                    let y_female = instance.candidates[y].is_female();
                    if !c.is_female() && y_female {
                        findings.push(Finding {
                            check_id: 6,
                            subject: c.roll_no.clone(),
                            detail: format!(
                                "non-female rank {r} rejected while female rank {yr} holds a gender-neutral seat of {:?}",
                                prog.id
                            ),
                        });
                    }
                    if c.is_female() && !y_female {
                        findings.push(Finding {
                            check_id: 7,
                            subject: c.roll_no.clone(),
                            detail: format!(
                                "female rank {r} rejected while non-female rank {yr} holds a seat of {:?}",
                                prog.id
                            ),
                        });
                    }
                }
            }
        }
    }

    // Per-row eligibility checks.
    for row in allotment {
        let x = match by_roll.get(row.roll_no.as_str()) {
            Some(&x) => x,
            None => continue,
        };
        let c = &instance.candidates[x];
        let profile = instance.profiles.get(&row.inst_cd);
        // Check 2: quota eligibility.
        let quota_ok = match (row.allotted_quota, profile) {
            (_, None) => false,
            (Quota::HomeState, Some(p)) => p.is_home_state(&c.state_code),
            (Quota::OtherState, Some(p)) => !p.is_home_state(&c.state_code),
            (Quota::AllIndia, Some(p)) => matches!(
                p.kind,
                InstituteKind::Iit | InstituteKind::GftiAi | InstituteKind::GftiHsAi
            ),
            _ => true,
        };
        if !quota_ok {
            findings.push(Finding {
                check_id: 2,
                subject: row.roll_no.clone(),
                detail: format!(
                    "quota {} at {} not available to state {}",
                    row.allotted_quota.code(),
                    row.inst_cd,
                    c.state_code
                ),
            });
        }
        // Check 3: category / pool / flag eligibility.
        let cat_ok = match row.flag {
            SeatFlag::Ds => c.ds_flag,
            SeatFlag::Foreign => c.nationality.is_international(),
            SeatFlag::Normal | SeatFlag::Preparatory => {
                match (CategoryTag::from_cell_code(&row.allotted_cat), profile) {
                    (Some(cell), Some(p)) => {
                        let family = p.family_for_branch(&row.br_cd);
                        let eff = effective_rank(c, VCategory::Cell(cell), family, p.has_pc);
                        let remark = c.remark(family);
                        let tier_ok = match eff {
                            Some(e) if e.tier == Tier::Standard => remark.allows_cell(cell),
                            Some(e) if e.tier == Tier::Preparatory => {
                                remark.allows_preparatory(cell)
                            }
                            _ => false,
                        };
                        tier_ok && category_ladder(c.category).contains(&cell)
                    }
                    _ => false,
                }
            }
        };
        if !cat_ok {
            findings.push(Finding {
                check_id: 3,
                subject: row.roll_no.clone(),
                detail: format!(
                    "category {} (flag {}) not available to this candidate",
                    row.allotted_cat,
                    row.flag.code()
                ),
            });
        }
        // Check 3 (continued): the recorded rank must be the candidate's
        // own merit rank for the allotted seat.
        let expected_rank = match row.flag {
            SeatFlag::Foreign => c
                .ranks
                .advanced
                .get(crate::model::StandardList::Crl)
                .map(EffectiveRank::standard),
            SeatFlag::Ds => profile.and_then(|p| {
                let family = p.family_for_branch(&row.br_cd);
                effective_rank(c, VCategory::Ds, family, false)
            }),
            SeatFlag::Normal | SeatFlag::Preparatory => {
                match (CategoryTag::from_cell_code(&row.allotted_cat), profile) {
                    (Some(cell), Some(p)) => {
                        let family = p.family_for_branch(&row.br_cd);
                        effective_rank(c, VCategory::Cell(cell), family, p.has_pc)
                    }
                    _ => None,
                }
            }
        };
        if expected_rank.map_or(true, |e| e != row.rank) {
            findings.push(Finding {
                check_id: 3,
                subject: row.roll_no.clone(),
                detail: format!(
                    "recorded rank {} does not match the candidate's merit rank for {}",
                    row.rank, row.allotted_cat
                ),
            });
        }
        if row.gender_pool == GenderPool::FemaleOnly && !c.is_female() {
            findings.push(Finding {
                check_id: 3,
                subject: row.roll_no.clone(),
                detail: "non-female seated in a female-only pool".into(),
            });
        }
        // Check 4: willingness — the seat must come from a listed,
        // valid choice.
        let willing = instance.choices[x].iter().any(|ch| {
            ch.valid
                && ch.opt_no == row.opt_no
                && ch.inst_cd == row.inst_cd
                && (row.flag == SeatFlag::Ds || ch.br_cd == row.br_cd)
        });
        if !willing {
            findings.push(Finding {
                check_id: 4,
                subject: row.roll_no.clone(),
                detail: format!(
                    "allotted {}/{} at option {} which is not a valid listed choice",
                    row.inst_cd, row.br_cd, row.opt_no
                ),
            });
        }
    }

    // Check 8: de-reservation accounting.
    let mut family_init: BTreeMap<(Quota, &str, &str, GenderPool), (u64, u64)> = BTreeMap::new();
    for s in stats {
        if s.foreign_pool || s.vcategory == VCategory::Ds {
            continue;
        }
        let subj = format!("{}/{}/{}/{}", s.quota.code(), s.inst_cd, s.br_cd, s.vcategory.code());
        if s.new_cap as i64 != s.init_cap as i64 + s.dereserve_to as i64 - s.dereserve_from as i64 {
            findings.push(Finding {
                check_id: 8,
                subject: subj.clone(),
                detail: format!(
                    "capacity identity violated: new {} != init {} + to {} - from {}",
                    s.new_cap, s.init_cap, s.dereserve_to, s.dereserve_from
                ),
            });
        }
        let fam = family_init
            .entry((s.quota, s.inst_cd.as_str(), s.br_cd.as_str(), s.gender_pool))
            .or_insert((0, 0));
        fam.0 += s.init_cap as u64;
        fam.1 += s.new_cap as u64;
        if s.dereserve_from > 0 {
            if s.supernum > 0 {
                findings.push(Finding {
                    check_id: 8,
                    subject: subj.clone(),
                    detail: "program de-reserved seats away while holding supernumerary admits"
                        .into(),
                });
            }
            // No eligible applicant may have been rejected by a program
            // that gave seats away.
            let id = crate::model::VirtualProgramId {
                institute: s.inst_cd.clone(),
                branch: s.br_cd.clone(),
                quota: s.quota,
                category: s.vcategory,
                pool: s.gender_pool,
                foreign_pool: false,
            };
            if let Some(idx) = table.lookup(&id) {
                for (x, list) in prefs.iter().enumerate() {
                    let allotted_pos = allotted_program[x]
                        .and_then(|(pi, opt, _)| {
                            list.entries
                                .iter()
                                .position(|e| e.program == pi && e.opt_no == opt)
                        })
                        .unwrap_or(list.entries.len());
                    if list.entries[..allotted_pos].iter().any(|e| e.program == idx) {
                        findings.push(Finding {
                            check_id: 8,
                            subject: subj.clone(),
                            detail: format!(
                                "de-reserving program rejected eligible candidate {}",
                                instance.candidates[x].roll_no
                            ),
                        });
                    }
                }
            }
        }
    }
    for ((quota, inst, br, pool), (init, new)) in family_init {
        if init != new {
            findings.push(Finding {
                check_id: 8,
                subject: format!("{}/{inst}/{br}/{}", quota.code(), pool.code()),
                detail: format!("family capacity not conserved: init {init} != new {new}"),
            });
        }
    }

    // Check 9: supernumerary reason legality and stats consistency.
    for v in &views {
        let prog = table.get(v.idx);
        let subj = format!("{:?}", prog.id);
        let mut supernum = 0u32;
        let mut base = 0u32;
        for &(x, r, reason) in &v.admits {
            let legal: &[SupnumReason] = if prog.id.foreign_pool {
                &[SupnumReason::Foreign, SupnumReason::ForeignEquality, SupnumReason::ForeignMinCutoff]
            } else if prog.id.is_ds() {
                &[
                    SupnumReason::NotApplicable,
                    SupnumReason::Ds,
                    SupnumReason::DsEquality,
                    SupnumReason::DsMinCutoff,
                ]
            } else {
                &[SupnumReason::NotApplicable, SupnumReason::ClosingRankEquality, SupnumReason::MinCutoff]
            };
            if !legal.contains(&reason) {
                findings.push(Finding {
                    check_id: 9,
                    subject: instance.candidates[x].roll_no.clone(),
                    detail: format!(
                        "reason {} is not legal for {:?} (rank {r})",
                        reason.code(),
                        prog.id
                    ),
                });
            }
            if reason == SupnumReason::NotApplicable {
                base += 1;
            } else {
                supernum += 1;
            }
        }
        if base > v.new_cap {
            findings.push(Finding {
                check_id: 9,
                subject: subj.clone(),
                detail: format!(
                    "{base} admits without a supernumerary reason exceed capacity {}",
                    v.new_cap
                ),
            });
        }
        if let Some(s) = stat_of[v.idx as usize] {
            if s.supernum != supernum {
                findings.push(Finding {
                    check_id: 9,
                    subject: subj,
                    detail: format!(
                        "stats report {} supernumeraries, allotment carries {supernum}",
                        s.supernum
                    ),
                });
            }
        }
    }

    findings
}

/// Whether the shadowed gender-neutral OPEN program legitimately blocks
/// a foreign applicant of rank `r`.
fn open_view_blocks(
    table: &crate::virtualization::ProgramTable,
    views: &[ProgramView],
    foreign_prog: &crate::model::VirtualProgram,
    r: EffectiveRank,
) -> bool {
    let open_id = crate::model::VirtualProgramId::cell(
        &foreign_prog.id.institute,
        &foreign_prog.id.branch,
        Quota::AllIndia,
        CategoryTag::Open,
        GenderPool::GenderNeutral,
    );
    match table.lookup(&open_id) {
        Some(idx) => {
            let v = &views[idx as usize];
            v.is_full() && v.admits.last().map(|(_, cl, _)| r > *cl).unwrap_or(false)
        }
        None => false,
    }
}

/// One difference between two allotments for the same roll number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffRow {
    pub roll_no: String,
    pub left: Option<String>,
    pub right: Option<String>,
    /// The seat is the same; only labels (reason/flag) differ.
    pub label_only: bool,
}

fn seat_key(row: &AllotmentRow) -> String {
    format!(
        "{}/{}/{}/{}/{}",
        row.inst_cd,
        row.br_cd,
        row.allotted_cat,
        row.allotted_quota.code(),
        row.gender_pool.code()
    )
}

fn label_key(row: &AllotmentRow) -> String {
    format!("{}:{}", row.flag.code(), row.supnum_reason.code())
}

/// Symmetric difference of two allotments keyed by roll number. Seat
/// changes and label-only changes are reported separately.
pub fn compare_allotments(a: &[AllotmentRow], b: &[AllotmentRow]) -> Vec<DiffRow> {
    let index = |rows: &[AllotmentRow]| -> BTreeMap<String, (String, String)> {
        rows.iter()
            .map(|r| (r.roll_no.clone(), (seat_key(r), label_key(r))))
            .collect()
    };
    let left = index(a);
    let right = index(b);
    let mut rolls: Vec<&String> = left.keys().chain(right.keys()).collect();
    rolls.sort();
    rolls.dedup();
    let mut out = Vec::new();
    for roll in rolls {
        let l = left.get(roll);
        let r = right.get(roll);
        match (l, r) {
            (Some((ls, ll)), Some((rs, rl))) => {
                if ls != rs {
                    out.push(DiffRow {
                        roll_no: roll.clone(),
                        left: Some(ls.clone()),
                        right: Some(rs.clone()),
                        label_only: false,
                    });
                } else if ll != rl {
                    out.push(DiffRow {
                        roll_no: roll.clone(),
                        left: Some(format!("{ls} [{ll}]")),
                        right: Some(format!("{rs} [{rl}]")),
                        label_only: true,
                    });
                }
            }
            (Some((ls, _)), None) => out.push(DiffRow {
                roll_no: roll.clone(),
                left: Some(ls.clone()),
                right: None,
                label_only: false,
            }),
            (None, Some((rs, _))) => out.push(DiffRow {
                roll_no: roll.clone(),
                left: None,
                right: Some(rs.clone()),
                label_only: false,
            }),
            (None, None) => unreachable!(),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    InstanceTooLarge,
}

/// Candidate-optimal stable matching by cutoff fixed-point iteration —
/// an implementation deliberately unlike the queue-based allocator.
///
/// Every program starts fully permissive; each iteration lets every
/// candidate demand the best program still admitting them, then
/// oversubscribed programs tighten their cutoff to their capacity-th
/// best demander. Cutoffs only ever tighten, so the loop terminates; at
/// the fixpoint the demand profile is the candidate-optimal stable
/// matching. Requires tie-free ranks and no min-cutoffs.
pub fn oracle_stable_match(
    prefs: &[VirtualPreferenceList],
    capacities: &[u32],
) -> Result<Vec<Option<u32>>, OracleError> {
    if prefs.len() > 64 || capacities.len() > 64 {
        return Err(OracleError::InstanceTooLarge);
    }
    let mut cutoff: Vec<Option<EffectiveRank>> = vec![None; capacities.len()];
    loop {
        // Demand step.
        let mut demand: Vec<Option<u32>> = Vec::with_capacity(prefs.len());
        for list in prefs {
            let pick = list.entries.iter().find(|e| {
                let p = e.program as usize;
                capacities[p] > 0
                    && match cutoff[p] {
                        None => true,
                        Some(c) => e.eff_rank <= c,
                    }
            });
            demand.push(pick.map(|e| e.program));
        }
        // Tightening step.
        let mut changed = false;
        for (p, &cap) in capacities.iter().enumerate() {
            if cap == 0 {
                continue;
            }
            let mut demanders: Vec<EffectiveRank> = prefs
                .iter()
                .zip(&demand)
                .filter(|(_, d)| **d == Some(p as u32))
                .map(|(list, _)| {
                    list.entries
                        .iter()
                        .find(|e| e.program == p as u32)
                        .unwrap()
                        .eff_rank
                })
                .collect();
            if demanders.len() > cap as usize {
                demanders.sort_unstable();
                let new_cutoff = demanders[cap as usize - 1];
                if cutoff[p] != Some(new_cutoff) {
                    cutoff[p] = Some(new_cutoff);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(demand);
        }
    }
}

/// Exhaustively enumerates stable matchings of a tiny tie-free instance
/// and returns the candidate-optimal one, for cross-checking the
/// fixed-point oracle. Only usable on instances small enough to
/// enumerate every assignment.
pub fn exhaustive_candidate_optimal(
    prefs: &[VirtualPreferenceList],
    capacities: &[u32],
) -> Result<Vec<Option<u32>>, OracleError> {
    let n = prefs.len();
    if n > 8 {
        return Err(OracleError::InstanceTooLarge);
    }
    let mut best: Option<Vec<Option<usize>>> = None;
    // Each candidate takes one of their list positions or none.
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    fn stable(
        prefs: &[VirtualPreferenceList],
        capacities: &[u32],
        assignment: &[Option<usize>],
    ) -> bool {
        let mut load = vec![0u32; capacities.len()];
        let mut worst: Vec<Option<EffectiveRank>> = vec![None; capacities.len()];
        for (x, a) in assignment.iter().enumerate() {
            if let Some(pos) = a {
                let e = prefs[x].entries[*pos];
                let p = e.program as usize;
                load[p] += 1;
                if load[p] > capacities[p] {
                    return false;
                }
                if worst[p].map(|w| e.eff_rank > w).unwrap_or(true) {
                    worst[p] = Some(e.eff_rank);
                }
            }
        }
        // No justified envy, no waste.
        for (x, a) in assignment.iter().enumerate() {
            let held = a.unwrap_or(prefs[x].entries.len());
            for e in &prefs[x].entries[..held] {
                let p = e.program as usize;
                if capacities[p] == 0 {
                    continue;
                }
                if load[p] < capacities[p] {
                    return false; // wasteful rejection
                }
                if worst[p].map(|w| e.eff_rank < w).unwrap_or(false) {
                    return false; // justified envy
                }
            }
        }
        true
    }
    fn dominates(
        prefs: &[VirtualPreferenceList],
        a: &[Option<usize>],
        b: &[Option<usize>],
    ) -> bool {
        a.iter().zip(b).all(|(x, y)| {
            let ax = x.unwrap_or(usize::MAX);
            let by = y.unwrap_or(usize::MAX);
            let _ = prefs;
            ax <= by
        })
    }
    fn recurse(
        prefs: &[VirtualPreferenceList],
        capacities: &[u32],
        assignment: &mut Vec<Option<usize>>,
        x: usize,
        best: &mut Option<Vec<Option<usize>>>,
    ) {
        if x == prefs.len() {
            if stable(prefs, capacities, assignment) {
                match best {
                    None => *best = Some(assignment.clone()),
                    Some(b) => {
                        if dominates(prefs, assignment, b) {
                            *best = Some(assignment.clone());
                        }
                    }
                }
            }
            return;
        }
        for pos in 0..prefs[x].entries.len() {
            assignment[x] = Some(pos);
            recurse(prefs, capacities, assignment, x + 1, best);
        }
        assignment[x] = None;
        recurse(prefs, capacities, assignment, x + 1, best);
    }
    recurse(prefs, capacities, &mut assignment, 0, &mut best);
    let best = best.expect("every tie-free instance has a stable matching");
    Ok(best
        .iter()
        .enumerate()
        .map(|(x, a)| a.map(|pos| prefs[x].entries[pos].program))
        .collect())
}
