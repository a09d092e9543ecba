//! One round's complete computation: repeated deferred-acceptance runs
//! with de-reservation of unfilled reserved seats until a fixpoint,
//! then the DS and foreign passes, then output assembly.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::da_core::{
    ds_reasons, foreign_pass, foreign_reasons, run_da, supernumerary_reasons, DaState,
};
use crate::ds2015;
use crate::model::{
    birth_cat_code, AllotmentRow, CandidateRecord, CategoryTag, ChoiceRow, GenderPool,
    ProgramStats, Quota, RStatus, SeatFlag, SupnumReason, Tier, VCategory,
    VirtualPreferenceList, VirtualProgram, VirtualProgramId,
};
use crate::virtualization::{expand_preferences, InstituteProfile, ProgramTable};

/// How DS candidates are seated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsRule {
    /// DS admits are supernumerary to the institute's intake.
    Supernumerary2016,
    /// DS admits preferentially consume OPEN seats, with race-condition
    /// detection and reversion.
    Preferential2015,
}

/// Everything one round's allocation needs.
#[derive(Debug, Clone)]
pub struct RoundInstance {
    pub candidates: Vec<CandidateRecord>,
    /// Raw choice lists aligned with `candidates`.
    pub choices: Vec<Vec<ChoiceRow>>,
    pub profiles: BTreeMap<String, InstituteProfile>,
    pub table: ProgramTable,
}

/// A completed round.
#[derive(Debug, Clone)]
pub struct RoundResult {
    pub allotment: Vec<AllotmentRow>,
    pub stats: Vec<ProgramStats>,
    /// Deferred-acceptance runs performed before the de-reservation
    /// fixpoint.
    pub runs: u32,
    /// Programs whose processed-seat multiset changed under the 2015 DS
    /// rule without permission to add supernumerary seats.
    pub stained: Vec<VirtualProgramId>,
    /// Race conditions encountered under the 2015 DS rule.
    pub ds_races: u32,
    /// Final program states (capacities after de-reservation).
    pub programs: Vec<VirtualProgram>,
    pub indian_prefs: Vec<VirtualPreferenceList>,
    pub indian_state: DaState,
    pub foreign_prefs: Vec<VirtualPreferenceList>,
    pub foreign_state: DaState,
    /// Per-program supernumerary reason labels aligned with the merged
    /// waitlists (Indian then foreign occupancy is disjoint by program).
    pub reasons: Vec<Vec<SupnumReason>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PipelineError {
    /// The de-reservation loop failed to reach a fixpoint.
    NonTermination { runs: u32 },
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::NonTermination { runs } => {
                write!(f, "de-reservation failed to reach a fixpoint after {runs} runs")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PipelineError {}

/// Upper bound on de-reservation runs; the flow graph has depth 2, so
/// hitting this signals a bug.
const MAX_RUNS: u32 = 10;

/// The parent category an unfilled seat de-reserves to, if any.
pub fn dereserve_parent(tag: CategoryTag) -> Option<CategoryTag> {
    match tag {
        CategoryTag::OpenPwd => Some(CategoryTag::Open),
        CategoryTag::ObcNclPwd => Some(CategoryTag::ObcNcl),
        CategoryTag::ObcNcl => Some(CategoryTag::Open),
        CategoryTag::ScPwd => Some(CategoryTag::Sc),
        CategoryTag::StPwd => Some(CategoryTag::St),
        CategoryTag::Open | CategoryTag::Sc | CategoryTag::St => None,
    }
}

/// Moves each program's unfilled de-reservable seats one edge up the
/// category flow graph, within the same (quota, institute, branch,
/// gender pool) family. Returns the number of seats moved.
pub fn dereserve(
    table: &ProgramTable,
    programs: &mut [VirtualProgram],
    waitlists: &[Vec<crate::da_core::WaitEntry>],
) -> u32 {
    let mut moves: Vec<(usize, u32, u32)> = Vec::new();
    for (idx, prog) in programs.iter().enumerate() {
        if prog.id.foreign_pool || prog.id.is_ds() {
            continue;
        }
        let tag = match prog.id.category {
            VCategory::Cell(t) => t,
            VCategory::Ds => continue,
        };
        let parent = match dereserve_parent(tag) {
            Some(p) => p,
            None => continue,
        };
        let admitted = waitlists[idx].len() as u32;
        let unfilled = prog.capacity.saturating_sub(admitted);
        if unfilled == 0 {
            continue;
        }
        let parent_id = VirtualProgramId::cell(
            &prog.id.institute,
            &prog.id.branch,
            prog.id.quota,
            parent,
            prog.id.pool,
        );
        if let Some(parent_idx) = table.lookup(&parent_id) {
            moves.push((idx, parent_idx, unfilled));
        }
    }
    let mut moved = 0;
    for (from, to, n) in moves {
        programs[from].capacity -= n;
        programs[from].dereserve_from += n;
        programs[to as usize].capacity += n;
        programs[to as usize].dereserve_to += n;
        moved += n;
    }
    moved
}

/// Runs one full round and assembles its outputs.
pub fn allocate_round(
    round_no: u32,
    instance: &RoundInstance,
    ds_rule: DsRule,
    ds_supernumerary_ok: bool,
) -> Result<RoundResult, PipelineError> {
    let n_programs = instance.table.len();
    let mut programs: Vec<VirtualProgram> = instance.table.programs.clone();

    let mut indian_prefs: Vec<VirtualPreferenceList> = Vec::with_capacity(instance.candidates.len());
    let mut foreign_prefs: Vec<VirtualPreferenceList> = Vec::with_capacity(instance.candidates.len());
    for (i, c) in instance.candidates.iter().enumerate() {
        let expanded = expand_preferences(c, &instance.choices[i], &instance.profiles, &instance.table);
        if c.nationality.is_international() {
            indian_prefs.push(VirtualPreferenceList::default());
            foreign_prefs.push(expanded);
        } else {
            indian_prefs.push(expanded);
            foreign_prefs.push(VirtualPreferenceList::default());
        }
    }

    // Multi-run loop: full re-run after each de-reservation sweep.
    let mut runs = 0;
    let mut indian_state;
    loop {
        runs += 1;
        if runs > MAX_RUNS {
            return Err(PipelineError::NonTermination { runs });
        }
        indian_state = DaState::initial(&indian_prefs, n_programs);
        run_da(&indian_prefs, &programs, &mut indian_state);
        let moved = dereserve(&instance.table, &mut programs, &indian_state.waitlists);
        if moved == 0 {
            break;
        }
    }

    let mut stained = Vec::new();
    let mut ds_races = 0;
    let mut ds_processed_supernumerary: Vec<bool> = vec![false; instance.candidates.len()];
    if ds_rule == DsRule::Preferential2015 {
        let outcome = ds2015::allocate_ds_2015(
            &indian_prefs,
            &instance.choices,
            &instance.table,
            &mut programs,
            &mut indian_state,
            ds_supernumerary_ok,
        );
        stained = outcome.stained;
        ds_races = outcome.races;
        for c in outcome.supernumerary_candidates {
            ds_processed_supernumerary[c as usize] = true;
        }
    }

    // Foreign pass: map each foreign pool to the gender-neutral OPEN
    // program it shadows.
    let mut open_of: Vec<Option<u32>> = vec![None; n_programs];
    for (idx, prog) in programs.iter().enumerate() {
        if prog.id.foreign_pool {
            let open_id = VirtualProgramId::cell(
                &prog.id.institute,
                &prog.id.branch,
                Quota::AllIndia,
                CategoryTag::Open,
                GenderPool::GenderNeutral,
            );
            open_of[idx] = instance.table.lookup(&open_id);
        }
    }
    let mut foreign_state = DaState::initial(&foreign_prefs, n_programs);
    foreign_pass(
        &foreign_prefs,
        &programs,
        &open_of,
        &indian_state.waitlists,
        &mut foreign_state,
    );

    // Reason labels per program.
    let mut reasons: Vec<Vec<SupnumReason>> = Vec::with_capacity(n_programs);
    for (idx, prog) in programs.iter().enumerate() {
        let r = if prog.id.foreign_pool {
            foreign_reasons(&foreign_state.waitlists[idx], prog.capacity, prog.min_cutoff)
        } else if prog.id.is_ds() {
            match ds_rule {
                DsRule::Supernumerary2016 => {
                    ds_reasons(&indian_state.waitlists[idx], prog.capacity, prog.min_cutoff)
                }
                DsRule::Preferential2015 => indian_state.waitlists[idx]
                    .iter()
                    .map(|e| {
                        if ds_processed_supernumerary[e.candidate as usize] {
                            SupnumReason::Ds
                        } else {
                            SupnumReason::NotApplicable
                        }
                    })
                    .collect(),
            }
        } else {
            supernumerary_reasons(&indian_state.waitlists[idx], prog.capacity, prog.min_cutoff)
        };
        reasons.push(r);
    }

    let allotment = build_allotment(
        round_no,
        instance,
        &programs,
        &indian_prefs,
        &indian_state,
        &foreign_prefs,
        &foreign_state,
        &reasons,
    );
    let stats = compute_program_stats(&instance.table, &programs, &indian_state, &foreign_state, &reasons);

    Ok(RoundResult {
        allotment,
        stats,
        runs,
        stained,
        ds_races,
        programs,
        indian_prefs,
        indian_state,
        foreign_prefs,
        foreign_state,
        reasons,
    })
}

/// The branch code of the raw choice that generated a DS entry.
fn tagged_branch(choices: &[ChoiceRow], opt_no: u32) -> String {
    choices
        .iter()
        .find(|ch| ch.opt_no == opt_no)
        .map(|ch| ch.br_cd.clone())
        .unwrap_or_else(|| crate::model::DS_BRANCH.into())
}

#[allow(clippy::too_many_arguments)]
fn build_allotment(
    round_no: u32,
    instance: &RoundInstance,
    programs: &[VirtualProgram],
    indian_prefs: &[VirtualPreferenceList],
    indian_state: &DaState,
    foreign_prefs: &[VirtualPreferenceList],
    foreign_state: &DaState,
    reasons: &[Vec<SupnumReason>],
) -> Vec<AllotmentRow> {
    let mut rows = Vec::new();
    for (x, c) in instance.candidates.iter().enumerate() {
        let x = x as u32;
        let (entry, state, prefs) = if c.nationality.is_international() {
            (foreign_state.matched(foreign_prefs, x), foreign_state, foreign_prefs)
        } else {
            (indian_state.matched(indian_prefs, x), indian_state, indian_prefs)
        };
        let _ = prefs;
        let entry = match entry {
            Some(e) => e,
            None => continue,
        };
        let p = entry.program as usize;
        let prog = &programs[p];
        let pos_in_waitlist = state.waitlists[p]
            .iter()
            .position(|e| e.candidate == x)
            .expect("matched candidate missing from waitlist");
        let reason = reasons[p][pos_in_waitlist];
        let (inst_cd, br_cd, allotted_cat, flag) = if prog.id.foreign_pool {
            (
                prog.id.institute.clone(),
                prog.id.branch.clone(),
                CategoryTag::Open.cell_code().into(),
                SeatFlag::Foreign,
            )
        } else if prog.id.is_ds() {
            (
                prog.id.institute.clone(),
                tagged_branch(&instance.choices[x as usize], entry.opt_no),
                CategoryTag::Open.cell_code().into(),
                SeatFlag::Ds,
            )
        } else {
            let cat: String = prog.id.category.code().into();
            let flag = if entry.eff_rank.tier == Tier::Preparatory {
                SeatFlag::Preparatory
            } else {
                SeatFlag::Normal
            };
            (prog.id.institute.clone(), prog.id.branch.clone(), cat, flag)
        };
        rows.push(AllotmentRow {
            round_no,
            roll_no: c.roll_no.clone(),
            birth_cat: birth_cat_code(c.category).into(),
            opt_no: entry.opt_no,
            inst_cd,
            br_cd,
            rank: entry.eff_rank,
            allotted_cat,
            allotted_quota: prog.id.quota,
            gender_pool: prog.id.pool,
            flag,
            supnum_reason: reason,
            withdraw: false,
            rstatus: RStatus::Reported,
        });
    }
    rows
}

/// Per-program summary rows in program-table order.
pub fn compute_program_stats(
    table: &ProgramTable,
    programs: &[VirtualProgram],
    indian_state: &DaState,
    foreign_state: &DaState,
    reasons: &[Vec<SupnumReason>],
) -> Vec<ProgramStats> {
    let _ = table;
    let mut out = Vec::with_capacity(programs.len());
    for (idx, prog) in programs.iter().enumerate() {
        let waitlist = if prog.id.foreign_pool {
            &foreign_state.waitlists[idx]
        } else {
            &indian_state.waitlists[idx]
        };
        let supernum = reasons[idx]
            .iter()
            .filter(|r| **r != SupnumReason::NotApplicable)
            .count() as u32;
        out.push(ProgramStats {
            quota: prog.id.quota,
            inst_cd: prog.id.institute.clone(),
            br_cd: prog.id.branch.clone(),
            vcategory: prog.id.category,
            gender_pool: prog.id.pool,
            foreign_pool: prog.id.foreign_pool,
            opening_rank: waitlist.first().map(|e| e.eff),
            closing_rank: waitlist.last().map(|e| e.eff),
            min_cutoff: prog.min_cutoff,
            total_allotted: waitlist.len() as u32,
            init_cap: prog.init_capacity,
            new_cap: prog.capacity,
            dereserve_from: prog.dereserve_from,
            dereserve_to: prog.dereserve_to,
            supernum,
        });
    }
    out
}
