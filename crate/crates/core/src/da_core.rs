//! Candidate-proposing deferred acceptance over virtual programs, with
//! rank ties, zero-capacity rejection, and min-cutoff retention
//! guarantees, plus the separate pass for international candidates.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{
    clears_cutoff, EffectiveRank, SupnumReason, VirtualPreference, VirtualPreferenceList,
    VirtualProgram,
};

/// One admitted (or tentatively held) candidate in a program's waitlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaitEntry {
    pub candidate: u32,
    pub eff: EffectiveRank,
}

/// Mutable allocation state. Waitlists are kept sorted by
/// (effective rank, candidate index); position `len` of a preference
/// list means the candidate exhausted it unallotted.
#[derive(Debug, Clone, Default)]
pub struct DaState {
    pub positions: Vec<usize>,
    pub waitlists: Vec<Vec<WaitEntry>>,
    pub queue: VecDeque<u32>,
}

impl DaState {
    /// Fresh state with every candidate holding a nonempty list queued
    /// in index order.
    pub fn initial(prefs: &[VirtualPreferenceList], n_programs: usize) -> DaState {
        DaState {
            positions: vec![0; prefs.len()],
            waitlists: vec![Vec::new(); n_programs],
            queue: (0..prefs.len() as u32)
                .filter(|&x| !prefs[x as usize].entries.is_empty())
                .collect(),
        }
    }

    /// The preference entry currently held by `x`, if any.
    pub fn matched(&self, prefs: &[VirtualPreferenceList], x: u32) -> Option<VirtualPreference> {
        prefs[x as usize].entries.get(self.positions[x as usize]).copied()
    }
}

fn insert_sorted(waitlist: &mut Vec<WaitEntry>, entry: WaitEntry) {
    let pos = waitlist.partition_point(|e| (e.eff, e.candidate) <= (entry.eff, entry.candidate));
    waitlist.insert(pos, entry);
}

/// Resolves an over-capacity waitlist whose last candidate `w` does not
/// clear the min-cutoff: with `g` candidates present and `l` of them
/// tied at `w`'s rank, the whole tie group is rejected only when the
/// remaining `g - l` still fill the capacity; otherwise everyone stays
/// and the overflow admits are supernumerary. Returns the rejected
/// candidates.
fn remove_and_reject(waitlist: &mut Vec<WaitEntry>, capacity: u32) -> Vec<u32> {
    let g = waitlist.len();
    let last_eff = waitlist[g - 1].eff;
    let l = waitlist.iter().rev().take_while(|e| e.eff == last_eff).count();
    if g - l >= capacity as usize {
        waitlist.split_off(g - l).into_iter().map(|e| e.candidate).collect()
    } else {
        Vec::new()
    }
}

/// Runs deferred acceptance to quiescence on `state`.
///
/// Each dequeued candidate applies down their list: zero-capacity
/// programs reject immediately; otherwise the candidate enters the
/// waitlist, and while the list exceeds capacity the last candidate is
/// examined — retained when their rank clears the program's min-cutoff,
/// otherwise handed to the tie-aware rejection rule. Rejected candidates
/// advance one list position and requeue. The final allocation is
/// independent of queue order.
pub fn run_da(
    prefs: &[VirtualPreferenceList],
    programs: &[VirtualProgram],
    state: &mut DaState,
) {
    while let Some(x) = state.queue.pop_front() {
        let entries = &prefs[x as usize].entries;
        let pos = state.positions[x as usize];
        if pos >= entries.len() {
            continue;
        }
        let entry = entries[pos];
        let p = entry.program as usize;
        let program = &programs[p];
        if program.capacity == 0 {
            state.positions[x as usize] += 1;
            if state.positions[x as usize] < entries.len() {
                state.queue.push_back(x);
            }
            continue;
        }
        insert_sorted(
            &mut state.waitlists[p],
            WaitEntry { candidate: x, eff: entry.eff_rank },
        );
        while state.waitlists[p].len() > program.capacity as usize {
            let last = *state.waitlists[p].last().unwrap();
            if clears_cutoff(last.eff, program.min_cutoff) {
                break;
            }
            let rejected = remove_and_reject(&mut state.waitlists[p], program.capacity);
            if rejected.is_empty() {
                break;
            }
            for y in rejected {
                state.positions[y as usize] += 1;
                if state.positions[y as usize] < prefs[y as usize].entries.len() {
                    state.queue.push_back(y);
                }
            }
        }
    }
}

/// Labels the overflow admits of one waitlist. Admits within capacity
/// get no reason; beyond it, waitlist order decides who carries the
/// label, and each overflow admit is tagged by whether they were
/// retained by the min-cutoff guarantee or by closing-rank equality.
pub fn supernumerary_reasons(
    waitlist: &[WaitEntry],
    capacity: u32,
    min_cutoff: crate::model::MinCutoff,
) -> Vec<SupnumReason> {
    waitlist
        .iter()
        .enumerate()
        .map(|(i, e)| {
            if i < capacity as usize {
                SupnumReason::NotApplicable
            } else if clears_cutoff(e.eff, min_cutoff) {
                SupnumReason::MinCutoff
            } else {
                SupnumReason::ClosingRankEquality
            }
        })
        .collect()
}

/// Deferred acceptance for international candidates over the foreign
/// pools, run after the Indian allocation is frozen.
///
/// `open_of[p]` maps a foreign pool to the gender-neutral OPEN program
/// it shadows. A candidate may hold a foreign seat outright while that
/// OPEN program has a vacancy; once it is full, only candidates ranking
/// no worse than its last Indian admit qualify. Gender plays no role.
pub fn foreign_pass(
    prefs: &[VirtualPreferenceList],
    programs: &[VirtualProgram],
    open_of: &[Option<u32>],
    open_waitlists: &[Vec<WaitEntry>],
    state: &mut DaState,
) {
    while let Some(x) = state.queue.pop_front() {
        let entries = &prefs[x as usize].entries;
        let pos = state.positions[x as usize];
        if pos >= entries.len() {
            continue;
        }
        let entry = entries[pos];
        let p = entry.program as usize;
        let program = &programs[p];
        let protected = clears_cutoff(entry.eff_rank, program.min_cutoff);
        let mut reject = program.capacity == 0 && !protected;
        if !reject && !protected {
            if let Some(open) = open_of[p] {
                let open_prog = &programs[open as usize];
                let open_list = &open_waitlists[open as usize];
                if open_list.len() >= open_prog.capacity as usize && open_prog.capacity > 0 {
                    let worst_indian = open_list.last().unwrap().eff;
                    reject = entry.eff_rank > worst_indian;
                }
            }
        }
        if reject {
            state.positions[x as usize] += 1;
            if state.positions[x as usize] < entries.len() {
                state.queue.push_back(x);
            }
            continue;
        }
        insert_sorted(
            &mut state.waitlists[p],
            WaitEntry { candidate: x, eff: entry.eff_rank },
        );
        while state.waitlists[p].len() > program.capacity as usize {
            let last = *state.waitlists[p].last().unwrap();
            if clears_cutoff(last.eff, program.min_cutoff) {
                break;
            }
            let rejected = remove_and_reject(&mut state.waitlists[p], program.capacity);
            if rejected.is_empty() {
                break;
            }
            for y in rejected {
                state.positions[y as usize] += 1;
                if state.positions[y as usize] < prefs[y as usize].entries.len() {
                    state.queue.push_back(y);
                }
            }
        }
    }
}

/// Foreign-pool variants of the supernumerary reasons: every admit is
/// supernumerary to the institute's declared intake, and overflow within
/// the foreign capacity maps min-cutoff/equality retention onto the
/// foreign-specific codes.
pub fn foreign_reasons(
    waitlist: &[WaitEntry],
    capacity: u32,
    min_cutoff: crate::model::MinCutoff,
) -> Vec<SupnumReason> {
    supernumerary_reasons(waitlist, capacity, min_cutoff)
        .into_iter()
        .map(|r| match r {
            SupnumReason::NotApplicable => SupnumReason::Foreign,
            SupnumReason::MinCutoff => SupnumReason::ForeignMinCutoff,
            SupnumReason::ClosingRankEquality => SupnumReason::ForeignEquality,
            other => other,
        })
        .collect()
}

/// DS-program variants, by the same mapping.
pub fn ds_reasons(
    waitlist: &[WaitEntry],
    capacity: u32,
    min_cutoff: crate::model::MinCutoff,
) -> Vec<SupnumReason> {
    supernumerary_reasons(waitlist, capacity, min_cutoff)
        .into_iter()
        .map(|r| match r {
            SupnumReason::NotApplicable => SupnumReason::Ds,
            SupnumReason::MinCutoff => SupnumReason::DsMinCutoff,
            SupnumReason::ClosingRankEquality => SupnumReason::DsEquality,
            other => other,
        })
        .collect()
}
