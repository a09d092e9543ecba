//! The historical preferential DS rule: each DS admit consumes an OPEN
//! seat of the academic program named by the raw choice that produced
//! the DS entry, which can start rejection chains. A chain that changes
//! the occupancy of already-processed DS seats is a race condition; with
//! permission, the engine reverts it and grants the triggering seat as a
//! supernumerary instead.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::da_core::{run_da, DaState};
use crate::model::{
    clears_cutoff, CategoryTag, ChoiceRow, GenderPool, Quota, VirtualPreferenceList,
    VirtualProgram, VirtualProgramId,
};
use crate::virtualization::ProgramTable;

/// One DS seat slot: its occupant and the OPEN program the occupant's
/// admission is charged against.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Seat {
    ds_program: u32,
    occupant: Option<u32>,
    /// Index of the gender-neutral OPEN program of the tagged branch.
    tag: Option<u32>,
    processed: bool,
    supernumerary: bool,
}

/// Result of the preferential DS pass.
#[derive(Debug, Clone, Default)]
pub struct Ds2015Outcome {
    /// DS programs whose processed-seat tag multiset changed without
    /// permission to revert.
    pub stained: Vec<VirtualProgramId>,
    /// Candidates whose DS seat was granted supernumerary after a
    /// reverted race.
    pub supernumerary_candidates: Vec<u32>,
    /// Number of race conditions encountered.
    pub races: u32,
}

/// The OPEN program charged for a DS admit, derived from the raw choice
/// behind the candidate's current DS preference entry.
fn tag_of(
    x: u32,
    prefs: &[VirtualPreferenceList],
    choices: &[Vec<ChoiceRow>],
    table: &ProgramTable,
    state: &DaState,
) -> Option<u32> {
    let entry = state.matched(prefs, x)?;
    let ds_id = &table.get(entry.program).id;
    let branch = choices[x as usize]
        .iter()
        .find(|c| c.opt_no == entry.opt_no)
        .map(|c| c.br_cd.clone())?;
    table.lookup(&VirtualProgramId::cell(
        &ds_id.institute,
        &branch,
        Quota::AllIndia,
        CategoryTag::Open,
        GenderPool::GenderNeutral,
    ))
}

/// Reconciles seats with the current DS waitlists. Departed occupants
/// vacate their slots (processed flags stay); newcomers fill vacancies,
/// matching the old tags of processed slots where possible. Returns the
/// DS programs whose processed-slot tag multiset could not be preserved.
fn reconcile(
    seats: &mut [Seat],
    prefs: &[VirtualPreferenceList],
    choices: &[Vec<ChoiceRow>],
    table: &ProgramTable,
    state: &DaState,
    ds_programs: &[u32],
) -> Vec<u32> {
    let mut raced = Vec::new();
    for &d in ds_programs {
        let current: Vec<u32> = state.waitlists[d as usize].iter().map(|e| e.candidate).collect();
        let slots: Vec<usize> = seats
            .iter()
            .enumerate()
            .filter(|(_, s)| s.ds_program == d)
            .map(|(i, _)| i)
            .collect();
        let old_processed_tags: Vec<Option<u32>> = slots
            .iter()
            .filter(|&&i| seats[i].processed)
            .map(|&i| seats[i].tag)
            .collect();
        // Vacate departed occupants.
        for &i in &slots {
            if let Some(c) = seats[i].occupant {
                if !current.contains(&c) {
                    seats[i].occupant = None;
                    seats[i].tag = None;
                }
            }
        }
        let seated: Vec<u32> = slots.iter().filter_map(|&i| seats[i].occupant).collect();
        let mut newcomers: Vec<u32> =
            current.iter().copied().filter(|c| !seated.contains(c)).collect();
        newcomers.sort_unstable();
        let newcomer_tags: Vec<Option<u32>> = newcomers
            .iter()
            .map(|&c| tag_of(c, prefs, choices, table, state))
            .collect();

        // Tags still needed on processed slots to preserve the multiset.
        let mut kept: BTreeMap<Option<u32>, i64> = BTreeMap::new();
        for t in old_processed_tags {
            *kept.entry(t).or_insert(0) += 1;
        }
        for &i in &slots {
            if seats[i].processed {
                if let Some(_) = seats[i].occupant {
                    *kept.entry(seats[i].tag).or_insert(0) -= 1;
                }
            }
        }
        let mut assigned = vec![false; newcomers.len()];
        // Fill processed vacancies, preferring tag-preserving matches.
        for &i in &slots {
            if seats[i].processed && seats[i].occupant.is_none() {
                let pick = newcomer_tags
                    .iter()
                    .enumerate()
                    .position(|(k, t)| !assigned[k] && kept.get(t).copied().unwrap_or(0) > 0)
                    .or_else(|| assigned.iter().position(|a| !a));
                if let Some(k) = pick {
                    assigned[k] = true;
                    let t = newcomer_tags[k];
                    seats[i].occupant = Some(newcomers[k]);
                    seats[i].tag = t;
                    let need = kept.entry(t).or_insert(0);
                    *need -= 1;
                    if *need < 0 {
                        if !raced.contains(&d) {
                            raced.push(d);
                        }
                    }
                } else if !raced.contains(&d) {
                    // A processed slot lost its occupant for good.
                    raced.push(d);
                }
            }
        }
        // Remaining newcomers take unprocessed vacancies.
        for &i in &slots {
            if !seats[i].processed && seats[i].occupant.is_none() {
                if let Some(k) = assigned.iter().position(|a| !a) {
                    assigned[k] = true;
                    seats[i].occupant = Some(newcomers[k]);
                    seats[i].tag = newcomer_tags[k];
                }
            }
        }
    }
    raced
}

/// Runs the preferential DS pass over a quiescent allocation.
///
/// Seats are processed in (institute, candidate) order. Processing a
/// seat charges one OPEN seat of the tagged program, resolves any
/// overflow there, and resumes deferred acceptance. If the resulting
/// chain disturbs the occupancy of already-processed seats, the step is
/// a race: reverted (and the seat granted supernumerary) when allowed,
/// recorded as stained otherwise.
pub fn allocate_ds_2015(
    prefs: &[VirtualPreferenceList],
    choices: &[Vec<ChoiceRow>],
    table: &ProgramTable,
    programs: &mut [VirtualProgram],
    state: &mut DaState,
    supernumerary_ok: bool,
) -> Ds2015Outcome {
    let ds_programs: Vec<u32> = (0..programs.len() as u32)
        .filter(|&i| programs[i as usize].id.is_ds())
        .collect();
    let mut seats: Vec<Seat> = Vec::new();
    for &d in &ds_programs {
        for _ in 0..programs[d as usize].capacity {
            seats.push(Seat {
                ds_program: d,
                occupant: None,
                tag: None,
                processed: false,
                supernumerary: false,
            });
        }
    }
    let mut outcome = Ds2015Outcome::default();
    reconcile(&mut seats, prefs, choices, table, state, &ds_programs);

    loop {
        // Next occupied unprocessed seat, by (institute, occupant).
        let next = seats
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.processed && s.occupant.is_some())
            .min_by_key(|(_, s)| {
                (
                    programs[s.ds_program as usize].id.institute.clone(),
                    s.occupant.unwrap(),
                )
            })
            .map(|(i, _)| i);
        let si = match next {
            Some(i) => i,
            None => break,
        };

        let snapshot_state = state.clone();
        let snapshot_programs: Vec<u32> = programs.iter().map(|p| p.capacity).collect();
        let snapshot_seats = seats.clone();

        seats[si].processed = true;
        if let Some(p) = seats[si].tag {
            let p = p as usize;
            programs[p].capacity = programs[p].capacity.saturating_sub(1);
            // Resolve the overflow the capacity cut may have created.
            while state.waitlists[p].len() > programs[p].capacity as usize {
                let last = *state.waitlists[p].last().unwrap();
                if clears_cutoff(last.eff, programs[p].min_cutoff) {
                    break;
                }
                let g = state.waitlists[p].len();
                let l = state.waitlists[p]
                    .iter()
                    .rev()
                    .take_while(|e| e.eff == last.eff)
                    .count();
                if g - l < programs[p].capacity as usize {
                    break;
                }
                let removed = state.waitlists[p].split_off(g - l);
                for e in removed {
                    let y = e.candidate;
                    state.positions[y as usize] += 1;
                    if state.positions[y as usize] < prefs[y as usize].entries.len() {
                        state.queue.push_back(y);
                    }
                }
            }
            run_da(prefs, programs, state);
        }

        let raced = reconcile(&mut seats, prefs, choices, table, state, &ds_programs);
        if !raced.is_empty() {
            outcome.races += 1;
            if supernumerary_ok {
                *state = snapshot_state;
                for (prog, cap) in programs.iter_mut().zip(snapshot_programs) {
                    prog.capacity = cap;
                }
                seats = snapshot_seats;
                seats[si].processed = true;
                seats[si].supernumerary = true;
                if let Some(c) = seats[si].occupant {
                    outcome.supernumerary_candidates.push(c);
                }
            } else {
                for d in raced {
                    let id = programs[d as usize].id.clone();
                    if !outcome.stained.contains(&id) {
                        outcome.stained.push(id);
                    }
                }
            }
        }
    }
    outcome
}
