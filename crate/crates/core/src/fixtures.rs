//! Hand-built reference instances shared by unit tests, integration
//! tests, and benchmarks. These freeze the worked scenarios the engine
//! is checked against.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{
    CatChange, CandidateRecord, CategoryTag, ChoiceRow, Gender, GenderPool, Nationality, Quota,
    Rank, RankVector, RemarkSymbol, StandardList,
};
use crate::run_pipeline::RoundInstance;
use crate::virtualization::{
    build_virtual_programs, InstituteKind, InstituteProfile, SeatMatrixEntry,
};

/// An IIT profile with preparatory courses and two DS seats.
pub fn iit_profile(inst: &str) -> InstituteProfile {
    InstituteProfile {
        inst_cd: inst.to_string(),
        kind: InstituteKind::Iit,
        has_pc: true,
        home_states: vec![],
        ds_capacity: 2,
    }
}

/// A male Indian OPEN candidate with an advanced-exam CRL rank.
pub fn crl_candidate(roll: &str, crl: u64, ds: bool) -> CandidateRecord {
    let mut ranks = RankVector::default();
    ranks.advanced.set(StandardList::Crl, Rank::from_integer(crl));
    CandidateRecord {
        roll_no: roll.to_string(),
        name: roll.to_string(),
        state_code: "UP".to_string(),
        gender: Gender::Male,
        category: CategoryTag::Open,
        nationality: Nationality::Indian,
        ds_flag: ds,
        prep_eligible: false,
        ranks,
        remark_eng: RemarkSymbol::NotEligible,
        remark_arch: RemarkSymbol::NotEligible,
        remark_adv: RemarkSymbol::Crl,
        cat_change: CatChange::NoChange,
        decision: None,
        aat_qualified: false,
        color_blind: false,
        one_eyed: false,
    }
}

pub fn choice(roll: &str, opt: u32, inst: &str, br: &str) -> ChoiceRow {
    ChoiceRow {
        roll_no: roll.to_string(),
        opt_no: opt,
        inst_cd: inst.to_string(),
        br_cd: br.to_string(),
        valid: true,
    }
}

/// An all-India gender-neutral seat row with only OPEN seats.
pub fn open_row(inst: &str, br: &str, cap: u32) -> SeatMatrixEntry {
    let mut cells = [0u32; 8];
    cells[0] = cap;
    SeatMatrixEntry {
        quota: Quota::AllIndia,
        inst_cd: inst.to_string(),
        br_cd: br.to_string(),
        gender_pool: GenderPool::GenderNeutral,
        cells,
        state_codes: vec![],
    }
}

/// The de-reservation worked example: one program family with OPEN=20,
/// OPEN-PwD=1, OBC-NCL=10, OBC-NCL-PwD=2. Demand: 18 OPEN takers, 11
/// OBC-only takers, one preparatory OPEN-PwD taker, nobody for
/// OBC-NCL-PwD. The fixpoint moves both OBC-NCL-PwD seats to OBC-NCL
/// and one OBC-NCL seat on to OPEN, ending at OPEN 21 (18 filled),
/// OBC-NCL 11 (11 filled), OBC-NCL-PwD 0, OPEN-PwD 1 (preparatory
/// filled).
pub fn dereservation_instance() -> RoundInstance {
    let mut profiles = BTreeMap::new();
    profiles.insert("I01".to_string(), iit_profile("I01"));
    let mut row = open_row("I01", "4109", 0);
    // Internal cell order: OP, OP_PwD, SC, SC_PwD, ST, ST_PwD, OBC, OBC_PwD.
    row.cells = [20, 1, 0, 0, 0, 0, 10, 2];
    let table = build_virtual_programs(&[row], &[], &profiles, None).unwrap();

    let mut candidates = Vec::new();
    let mut choices = Vec::new();
    for i in 0..18u64 {
        let roll = format!("1{i:07}");
        let c = crl_candidate(&roll, 100 + i, false);
        choices.push(vec![choice(&roll, 1, "I01", "4109")]);
        candidates.push(c);
    }
    for i in 0..11u64 {
        let roll = format!("2{i:07}");
        let mut c = crl_candidate(&roll, 1, false);
        c.category = CategoryTag::ObcNcl;
        c.remark_adv = RemarkSymbol::ObcOnly;
        c.ranks = RankVector::default();
        c.ranks.advanced.set(StandardList::ObcNcl, Rank::from_integer(10 + i));
        choices.push(vec![choice(&roll, 1, "I01", "4109")]);
        candidates.push(c);
    }
    {
        let roll = "30000001";
        let mut c = crl_candidate(roll, 1, false);
        c.category = CategoryTag::OpenPwd;
        c.remark_adv = RemarkSymbol::Preparatory;
        c.prep_eligible = true;
        c.ranks = RankVector::default();
        c.ranks.preparatory[crate::model::PreparatoryList::CrlPwd as usize] =
            Some(Rank::from_integer(1));
        choices.push(vec![choice(roll, 1, "I01", "4109")]);
        candidates.push(c);
    }
    RoundInstance { candidates, choices, profiles, table }
}

/// Three institutes whose DS seats are processed in code order under
/// the 2015 preferential rule. Processing the last institute's DS seat
/// starts a rejection chain that displaces a DS candidate into the
/// middle institute's already-processed DS program carrying a different
/// tagged branch — a race.
///
/// Cast: Amar and Akbar hold ID2's two DS seats (Amar ranked worst,
/// tagged Chemical), Chetan one of IK3's (tagged Mechanical), and
/// Paresh/Qadir fill IB1's so a displaced DS candidate cannot park
/// there. Charging Chetan's seat rejects Ekansh from IK3 Mechanical,
/// who bumps Dhanush off IB1 Electrical; Dhanush bounces off IB1's full
/// DS program and full ID2 Electrical into ID2's DS program, evicting
/// Amar while carrying the tag Electrical.
pub fn ds_race_instance() -> RoundInstance {
    let mut profiles = BTreeMap::new();
    for inst in ["IB1", "ID2", "IK3"] {
        let mut p = iit_profile(inst);
        p.has_pc = false;
        profiles.insert(inst.to_string(), p);
    }
    let rows = vec![
        open_row("IB1", "4101", 2), // IB1 Computer
        open_row("IB1", "4105", 1), // IB1 Electrical
        open_row("ID2", "4102", 1), // ID2 Chemical
        open_row("ID2", "4107", 1), // ID2 Metallurgy
        open_row("ID2", "4105", 1), // ID2 Electrical
        open_row("IK3", "4103", 1), // IK3 Mechanical
    ];
    let table = build_virtual_programs(&rows, &[], &profiles, None).unwrap();

    let mut candidates = Vec::new();
    let mut choices = Vec::new();
    let mut add = |c: CandidateRecord, ch: Vec<ChoiceRow>| {
        candidates.push(c);
        choices.push(ch);
    };
    // Index 0: Amar — DS at ID2, tagged Chemical, worst DS rank there.
    add(crl_candidate("10000001", 4001, true), vec![choice("10000001", 1, "ID2", "4102")]);
    // Index 1: Akbar — DS at ID2, tagged Metallurgy.
    add(crl_candidate("10000002", 4000, true), vec![choice("10000002", 1, "ID2", "4107")]);
    // Index 2: Chetan — DS at IK3, tagged Mechanical.
    add(crl_candidate("10000003", 4002, true), vec![choice("10000003", 1, "IK3", "4103")]);
    // Index 3: Bharat — holds ID2 Chemical OPEN.
    add(crl_candidate("10000004", 100, false), vec![choice("10000004", 1, "ID2", "4102")]);
    // Index 4: Krish — holds ID2 Metallurgy OPEN.
    add(crl_candidate("10000005", 101, false), vec![choice("10000005", 1, "ID2", "4107")]);
    // Index 5: Ekansh — holds IK3 Mechanical, falls back to IB1 Electrical.
    add(
        crl_candidate("10000006", 102, false),
        vec![choice("10000006", 1, "IK3", "4103"), choice("10000006", 2, "IB1", "4105")],
    );
    // Index 6: Dhanush — DS candidate holding IB1 Electrical OPEN.
    add(
        crl_candidate("10000007", 103, true),
        vec![choice("10000007", 1, "IB1", "4105"), choice("10000007", 2, "ID2", "4105")],
    );
    // Index 7: Farid — better-ranked holder of ID2 Electrical OPEN.
    add(crl_candidate("10000008", 50, false), vec![choice("10000008", 1, "ID2", "4105")]);
    // Indices 8-9: Gopal and Hari hold IB1 Computer OPEN.
    add(crl_candidate("10000009", 1, false), vec![choice("10000009", 1, "IB1", "4101")]);
    add(crl_candidate("10000010", 2, false), vec![choice("10000010", 1, "IB1", "4101")]);
    // Indices 10-11: Paresh and Qadir fill IB1's DS program, tagged Computer.
    add(crl_candidate("10000011", 60, true), vec![choice("10000011", 1, "IB1", "4101")]);
    add(crl_candidate("10000012", 61, true), vec![choice("10000012", 1, "IB1", "4101")]);

    RoundInstance { candidates, choices, profiles, table }
}

/// The benign variant of [`ds_race_instance`]: the displaced chain ends
/// with a candidate whose DS tag matches the evicted occupant's, so the
/// processed-seat multiset is preserved and no race occurs.
pub fn ds_race_benign_instance() -> RoundInstance {
    let mut instance = ds_race_instance();
    instance.choices[6][1] = choice("10000007", 2, "ID2", "4102");
    instance
}

/// Human-readable labels for the race-instance cast, keyed by roll.
pub fn ds_race_cast() -> BTreeMap<&'static str, String> {
    [
        ("Amar", "10000001"),
        ("Akbar", "10000002"),
        ("Chetan", "10000003"),
        ("Bharat", "10000004"),
        ("Krish", "10000005"),
        ("Ekansh", "10000006"),
        ("Dhanush", "10000007"),
        ("Farid", "10000008"),
        ("Gopal", "10000009"),
        ("Hari", "10000010"),
        ("Paresh", "10000011"),
        ("Qadir", "10000012"),
    ]
    .into_iter()
    .map(|(name, roll)| (name, roll.to_string()))
    .collect()
}
