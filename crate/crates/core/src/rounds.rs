//! Multi-round orchestration: min-cutoff computation from the previous
//! round's outcome, preference-list editing driven by candidate
//! decisions, and assembly of the next round's input.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::da_core::DaState;
use crate::model::{
    AllotmentRow, CandidateRecord, ChoiceRow, Decision, EffectiveRank, MinCutoff,
    RStatus, VirtualPreferenceList, VirtualProgramId,
};
use crate::virtualization::ProgramTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundsError {
    /// An allotment row references a roll number absent from the
    /// candidate table.
    InconsistentTables { roll_no: String },
    /// A decision was recorded for a candidate without a seat.
    DecisionWithoutSeat { roll_no: String },
}

impl fmt::Display for RoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundsError::InconsistentTables { roll_no } => {
                write!(f, "allotment references unknown roll number {roll_no}")
            }
            RoundsError::DecisionWithoutSeat { roll_no } => {
                write!(f, "decision recorded for unseated candidate {roll_no}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RoundsError {}

/// Whether a previous-round seat holder survives into the reduced
/// waitlist that defines the next round's min-cutoffs. Rejecting or
/// withdrawing candidates drop out, as do those whose seat was
/// cancelled at the reporting center.
fn seat_retained(row: &AllotmentRow, decision: Option<Decision>) -> bool {
    if row.withdraw || row.rstatus.cancels_seat() {
        return false;
    }
    decision != Some(Decision::Reject)
}

/// Computes the next round's min-cutoff per virtual program from the
/// previous round's waitlists and reporting outcomes.
///
/// Per program, candidates who rejected, withdrew, or lost their seat
/// are removed; the min-cutoff is the effective rank of the last
/// survivor, or absent (the zero sentinel) when nobody survives.
pub fn compute_min_cutoff(
    table: &ProgramTable,
    prev_state: &DaState,
    prev_prefs: &[VirtualPreferenceList],
    candidates: &[CandidateRecord],
    allotment: &[AllotmentRow],
) -> BTreeMap<VirtualProgramId, MinCutoff> {
    let mut by_roll: BTreeMap<&str, &AllotmentRow> = BTreeMap::new();
    for row in allotment {
        by_roll.insert(&row.roll_no, row);
    }
    let _ = prev_prefs;
    let mut out = BTreeMap::new();
    for (idx, prog) in table.programs.iter().enumerate() {
        let mut last: MinCutoff = None;
        for entry in &prev_state.waitlists[idx] {
            let c = &candidates[entry.candidate as usize];
            let row = match by_roll.get(c.roll_no.as_str()) {
                Some(r) => r,
                None => continue,
            };
            if seat_retained(row, c.decision) {
                last = Some(entry.eff);
            }
        }
        out.insert(prog.id.clone(), last);
    }
    out
}

/// Min-cutoffs computed directly from allotment rows, for callers that
/// only have the previous round's files. Each row's program is
/// reconstructed from its columns; DS and foreign rows key their own
/// virtual programs.
pub fn min_cutoff_from_allotment(
    candidates: &BTreeMap<String, Option<Decision>>,
    allotment: &[AllotmentRow],
) -> BTreeMap<VirtualProgramId, MinCutoff> {
    let mut survivors: BTreeMap<VirtualProgramId, Vec<EffectiveRank>> = BTreeMap::new();
    for row in allotment {
        let decision = candidates.get(&row.roll_no).copied().flatten();
        if !seat_retained(row, decision) {
            continue;
        }
        let id = program_of_row(row);
        survivors.entry(id).or_default().push(row.rank);
    }
    survivors
        .into_iter()
        .map(|(id, mut ranks)| {
            ranks.sort_unstable();
            let last = ranks.last().copied();
            (id, last)
        })
        .collect()
}

/// The virtual program a previous-round allotment row was granted by.
pub fn program_of_row(row: &AllotmentRow) -> VirtualProgramId {
    use crate::model::SeatFlag;
    match row.flag {
        SeatFlag::Ds => VirtualProgramId::ds(&row.inst_cd),
        SeatFlag::Foreign => VirtualProgramId::foreign(&row.inst_cd, &row.br_cd),
        SeatFlag::Normal | SeatFlag::Preparatory => VirtualProgramId {
            institute: row.inst_cd.clone(),
            branch: row.br_cd.clone(),
            quota: row.allotted_quota,
            category: crate::model::VCategory::from_code(&row.allotted_cat)
                .unwrap_or(crate::model::VCategory::Ds),
            pool: row.gender_pool,
            foreign_pool: false,
        },
    }
}

/// Applies a candidate's decision to their raw choice list.
///
/// Reject empties the list; Freeze keeps the allotted choice and
/// everything below it; Float keeps the list unchanged; Slide drops
/// entries above the allotment at other institutes. Withdrawal empties
/// the list regardless of decision. Invalid entries are always dropped.
pub fn edit_preferences(
    choices: &[ChoiceRow],
    decision: Option<Decision>,
    withdraw: bool,
    prev: Option<&AllotmentRow>,
) -> Result<Vec<ChoiceRow>, RoundsError> {
    let valid: Vec<ChoiceRow> = choices.iter().filter(|c| c.valid).cloned().collect();
    if withdraw || decision == Some(Decision::Reject) {
        return Ok(Vec::new());
    }
    let decision = match decision {
        Some(d) => d,
        None => return Ok(valid),
    };
    let prev = match prev {
        Some(p) => p,
        None => {
            let roll = choices.first().map(|c| c.roll_no.clone()).unwrap_or_default();
            return Err(RoundsError::DecisionWithoutSeat { roll_no: roll });
        }
    };
    Ok(match decision {
        Decision::Float => valid,
        Decision::Freeze => valid
            .into_iter()
            .filter(|c| c.opt_no >= prev.opt_no)
            .collect(),
        Decision::Slide => valid
            .into_iter()
            .filter(|c| c.opt_no >= prev.opt_no || c.inst_cd == prev.inst_cd)
            .collect(),
        Decision::Reject => Vec::new(),
    })
}

/// Prepares the next round's candidate and choice tables from the
/// previous round's outputs.
///
/// Candidates who did not report lose their seat and are excluded from
/// all future rounds; credential changes that cancel a seat let the
/// candidate continue with revised credentials and no penalty; everyone
/// else has their choice list edited per their decision.
pub fn preprocess_round(
    candidates: &[CandidateRecord],
    choices: &[Vec<ChoiceRow>],
    prev_allotment: &[AllotmentRow],
) -> Result<(Vec<CandidateRecord>, Vec<Vec<ChoiceRow>>), RoundsError> {
    let mut by_roll: BTreeMap<&str, &AllotmentRow> = BTreeMap::new();
    for row in prev_allotment {
        by_roll.insert(&row.roll_no, row);
    }
    for row in prev_allotment {
        if !candidates.iter().any(|c| c.roll_no == row.roll_no) {
            return Err(RoundsError::InconsistentTables { roll_no: row.roll_no.clone() });
        }
    }
    let mut out_candidates = Vec::new();
    let mut out_choices = Vec::new();
    for (c, ch) in candidates.iter().zip(choices) {
        let prev = by_roll.get(c.roll_no.as_str()).copied();
        if let Some(row) = prev {
            if row.rstatus == RStatus::NotReported {
                continue;
            }
        }
        let seat_cancelled = c.cat_change.cancels_seat();
        let effective_prev = if seat_cancelled { None } else { prev };
        // A candidate whose seat was cancelled by a credential change
        // competes afresh: their decision no longer binds a seat.
        let (decision, withdraw) = if seat_cancelled {
            (None, prev.map(|r| r.withdraw).unwrap_or(false))
        } else {
            (c.decision, prev.map(|r| r.withdraw).unwrap_or(false))
        };
        let edited = match edit_preferences(ch, decision, withdraw, effective_prev) {
            Ok(e) => e,
            Err(RoundsError::DecisionWithoutSeat { .. }) if prev.is_none() => {
                // Fresh candidates cannot have seat-bound decisions;
                // treat as no decision.
                ch.iter().filter(|x| x.valid).cloned().collect()
            }
            Err(e) => return Err(e),
        };
        if edited.is_empty() {
            continue;
        }
        out_candidates.push(c.clone());
        out_choices.push(edited);
    }
    Ok((out_candidates, out_choices))
}
