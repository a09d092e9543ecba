//! Expansion of seat matrices into virtual programs and of raw choice
//! lists into per-candidate virtual preference lists.
//!
//! A virtual program is the atomic allocation unit: one (quota,
//! institute, branch, category, gender pool) cell, plus the per-institute
//! DS programs and the foreign-candidate pools that shadow OPEN programs.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{
    effective_rank, CandidateRecord, CategoryTag, ChoiceRow, EffectiveRank, ExamFamily,
    GenderPool, Quota, RemarkSymbol, VCategory, VirtualPreference, VirtualPreferenceList,
    VirtualProgram, VirtualProgramId, ALL_CATEGORY_TAGS,
};

/// Institute archetypes, which fix the quota regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstituteKind {
    /// All-India quota only; carries DS seats; advanced-exam family.
    Iit,
    /// Home-state/other-state split.
    Nit,
    /// Government-funded institute, All-India quota only.
    GftiAi,
    /// Government-funded institute with the NIT-style HS/OS split.
    GftiHsOs,
    /// Government-funded institute where everyone competes All-India
    /// first and state residents additionally hold a home-state pool.
    GftiHsAi,
}

impl InstituteKind {
    pub fn code(self) -> &'static str {
        match self {
            InstituteKind::Iit => "IIT",
            InstituteKind::Nit => "NIT",
            InstituteKind::GftiAi => "GFTI_AI",
            InstituteKind::GftiHsOs => "GFTI_HS_OS",
            InstituteKind::GftiHsAi => "GFTI_HS_AI",
        }
    }

    pub fn from_code(s: &str) -> Option<InstituteKind> {
        Some(match s {
            "IIT" => InstituteKind::Iit,
            "NIT" => InstituteKind::Nit,
            "GFTI_AI" => InstituteKind::GftiAi,
            "GFTI_HS_OS" => InstituteKind::GftiHsOs,
            "GFTI_HS_AI" => InstituteKind::GftiHsAi,
            _ => return None,
        })
    }
}

/// Static per-institute facts needed by expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstituteProfile {
    pub inst_cd: String,
    pub kind: InstituteKind,
    pub has_pc: bool,
    pub home_states: Vec<String>,
    pub ds_capacity: u32,
}

impl InstituteProfile {
    pub fn is_home_state(&self, state_code: &str) -> bool {
        self.home_states.iter().any(|s| s == state_code)
    }

    /// The exam family whose rank lists order this institute's branch.
    pub fn family_for_branch(&self, br_cd: &str) -> ExamFamily {
        match self.kind {
            InstituteKind::Iit => ExamFamily::Advanced,
            _ if br_cd.starts_with('A') => ExamFamily::MainArch,
            _ => ExamFamily::MainEng,
        }
    }
}

/// One raw seat-matrix row: capacities of the eight category cells of a
/// (quota, institute, branch, gender pool).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeatMatrixEntry {
    pub quota: Quota,
    pub inst_cd: String,
    pub br_cd: String,
    pub gender_pool: GenderPool,
    /// Capacities indexed in `ALL_CATEGORY_TAGS` order.
    pub cells: [u32; 8],
    pub state_codes: Vec<String>,
}

impl SeatMatrixEntry {
    pub fn cell(&self, tag: CategoryTag) -> u32 {
        let i = ALL_CATEGORY_TAGS.iter().position(|t| *t == tag).unwrap();
        self.cells[i]
    }

    pub fn total(&self) -> u32 {
        self.cells.iter().sum()
    }
}

/// Declared foreign-candidate seat count of one IIT program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForeignSeatEntry {
    pub inst_cd: String,
    pub br_cd: String,
    pub capacity: u32,
}

/// Exact fractional target for the female pool, e.g. 14/100.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }
}

/// Result of splitting one seat cell into gender pools.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenderPools {
    pub female_only: u32,
    pub gender_neutral: u32,
    /// Seats added beyond the cell's declared capacity to reach the
    /// female target.
    pub added: u32,
}

/// Prior-year female admissions of one seat cell. `female` is absent for
/// programs that did not exist last year.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineCell {
    pub prior_capacity: u32,
    pub prior_female: u32,
}

/// Prior-year female admission data, keyed per seat cell.
#[derive(Debug, Clone, Default)]
pub struct FemaleBaseline {
    pub cells: BTreeMap<(Quota, String, String, CategoryTag), BaselineCell>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VirtualizationError {
    /// Baseline reports more female admits than seats.
    InvalidBaseline {
        inst_cd: String,
        br_cd: String,
        female: u32,
        capacity: u32,
    },
    UnknownInstitute(String),
    DuplicateProgram(VirtualProgramId),
}

impl fmt::Display for VirtualizationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VirtualizationError::InvalidBaseline {
                inst_cd,
                br_cd,
                female,
                capacity,
            } => write!(
                f,
                "baseline for {inst_cd}/{br_cd} has {female} female admits > capacity {capacity}"
            ),
            VirtualizationError::UnknownInstitute(i) => {
                write!(f, "institute {i} has no profile")
            }
            VirtualizationError::DuplicateProgram(id) => {
                write!(f, "virtual program defined twice: {id:?}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for VirtualizationError {}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Splits a seat cell of capacity `c` into female-only and
/// gender-neutral pools.
///
/// `prior_female` is last year's female admit count; `None` marks a new
/// program, which gets a fully supernumerary female pool of
/// ceil(target * c) on top of a gender-neutral pool of the whole
/// capacity. For existing programs the female pool is topped up to the
/// target with supernumerary seats, left alone while between the target
/// and 20%, and capped at 20% above that.
pub fn compute_gender_pools(c: u32, prior_female: Option<u32>, target: Ratio) -> GenderPools {
    let cap = c as u64;
    let f = match prior_female {
        None => {
            let female = ceil_div(target.num * cap, target.den);
            return GenderPools {
                female_only: female as u32,
                gender_neutral: c,
                added: female as u32,
            };
        }
        Some(f) => f.min(c) as u64,
    };
    if f * target.den < target.num * cap {
        // f + x = target * (c + x), rounded up to keep x integral.
        let x = ceil_div(target.num * cap - f * target.den, target.den - target.num);
        GenderPools {
            female_only: (f + x) as u32,
            gender_neutral: (cap - f) as u32,
            added: x as u32,
        }
    } else if 5 * f <= cap {
        GenderPools {
            female_only: f as u32,
            gender_neutral: (cap - f) as u32,
            added: 0,
        }
    } else {
        let female = cap / 5;
        GenderPools {
            female_only: female as u32,
            gender_neutral: (cap - female) as u32,
            added: 0,
        }
    }
}

/// The engine's indexed program universe.
#[derive(Debug, Clone, Default)]
pub struct ProgramTable {
    pub programs: Vec<VirtualProgram>,
    index: BTreeMap<VirtualProgramId, u32>,
}

impl ProgramTable {
    pub fn insert(&mut self, p: VirtualProgram) -> Result<u32, VirtualizationError> {
        if self.index.contains_key(&p.id) {
            return Err(VirtualizationError::DuplicateProgram(p.id));
        }
        let idx = self.programs.len() as u32;
        self.index.insert(p.id.clone(), idx);
        self.programs.push(p);
        Ok(idx)
    }

    pub fn lookup(&self, id: &VirtualProgramId) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn get(&self, idx: u32) -> &VirtualProgram {
        &self.programs[idx as usize]
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }
}

/// Builds the full virtual-program universe from seat matrices.
///
/// When `baseline` is given, incoming rows must be gender-neutral totals
/// and are split per cell with [`compute_gender_pools`]; otherwise rows
/// already carry their pools and are used as-is. DS programs are added
/// per institute with a positive DS capacity, and a foreign pool per
/// foreign-matrix row. Zero-capacity cells still produce programs: the
/// allocation loop rejects on zero capacity rather than on absence.
pub fn build_virtual_programs(
    seat_matrix: &[SeatMatrixEntry],
    foreign_matrix: &[ForeignSeatEntry],
    profiles: &BTreeMap<String, InstituteProfile>,
    baseline: Option<(&FemaleBaseline, Ratio)>,
) -> Result<ProgramTable, VirtualizationError> {
    let mut table = ProgramTable::default();
    let mut seen_institutes: Vec<&str> = Vec::new();
    for row in seat_matrix {
        if !profiles.contains_key(&row.inst_cd) {
            return Err(VirtualizationError::UnknownInstitute(row.inst_cd.clone()));
        }
        if !seen_institutes.contains(&row.inst_cd.as_str()) {
            seen_institutes.push(&row.inst_cd);
        }
        for &tag in &ALL_CATEGORY_TAGS {
            let c = row.cell(tag);
            match baseline {
                Some((base, target)) => {
                    let key = (row.quota, row.inst_cd.clone(), row.br_cd.clone(), tag);
                    let prior = match base.cells.get(&key) {
                        Some(cell) => {
                            if cell.prior_female > cell.prior_capacity {
                                return Err(VirtualizationError::InvalidBaseline {
                                    inst_cd: row.inst_cd.clone(),
                                    br_cd: row.br_cd.clone(),
                                    female: cell.prior_female,
                                    capacity: cell.prior_capacity,
                                });
                            }
                            Some(cell.prior_female)
                        }
                        None => None,
                    };
                    let pools = compute_gender_pools(c, prior, target);
                    for (pool, cap) in [
                        (GenderPool::FemaleOnly, pools.female_only),
                        (GenderPool::GenderNeutral, pools.gender_neutral),
                    ] {
                        table.insert(VirtualProgram::new(
                            VirtualProgramId::cell(&row.inst_cd, &row.br_cd, row.quota, tag, pool),
                            cap,
                        ))?;
                    }
                }
                None => {
                    table.insert(VirtualProgram::new(
                        VirtualProgramId::cell(
                            &row.inst_cd,
                            &row.br_cd,
                            row.quota,
                            tag,
                            row.gender_pool,
                        ),
                        c,
                    ))?;
                }
            }
        }
    }
    for inst in seen_institutes {
        let profile = &profiles[inst];
        if profile.ds_capacity > 0 {
            table.insert(VirtualProgram::new(
                VirtualProgramId::ds(inst),
                profile.ds_capacity,
            ))?;
        }
    }
    for row in foreign_matrix {
        if !profiles.contains_key(&row.inst_cd) {
            return Err(VirtualizationError::UnknownInstitute(row.inst_cd.clone()));
        }
        table.insert(VirtualProgram::new(
            VirtualProgramId::foreign(&row.inst_cd, &row.br_cd),
            row.capacity,
        ))?;
    }
    Ok(table)
}

/// The category ladder: the seat cells a candidate competes for at any
/// one program, most open first.
pub fn category_ladder(category: CategoryTag) -> Vec<CategoryTag> {
    let mut ladder = Vec::with_capacity(4);
    ladder.push(CategoryTag::Open);
    if category.is_pwd() {
        ladder.push(CategoryTag::OpenPwd);
    }
    if category.base() != CategoryTag::Open {
        ladder.push(category.base());
        if category.is_pwd() {
            ladder.push(category);
        }
    }
    ladder
}

fn push_entry(
    out: &mut VirtualPreferenceList,
    table: &ProgramTable,
    id: &VirtualProgramId,
    opt_no: u32,
    eff: EffectiveRank,
) {
    if let Some(idx) = table.lookup(id) {
        out.entries.push(VirtualPreference {
            program: idx,
            opt_no,
            eff_rank: eff,
        });
    }
}

/// Expands one candidate's raw choice list into the ordered virtual
/// preference list the allocation loop consumes.
///
/// Per raw choice: quota selection by institute kind and residence, then
/// the category ladder, then (for females) the female-only pool before
/// the gender-neutral one. DS candidates get each institute's DS program
/// appended after the first choice at that institute. International
/// candidates compete only in the foreign pools of IIT programs.
pub fn expand_preferences(
    c: &CandidateRecord,
    choices: &[ChoiceRow],
    profiles: &BTreeMap<String, InstituteProfile>,
    table: &ProgramTable,
) -> VirtualPreferenceList {
    let mut out = VirtualPreferenceList::default();
    let mut ds_done: Vec<&str> = Vec::new();
    for choice in choices {
        if !choice.valid {
            continue;
        }
        let profile = match profiles.get(&choice.inst_cd) {
            Some(p) => p,
            None => continue,
        };
        if c.nationality.is_international() {
            if profile.kind == InstituteKind::Iit {
                if let Some(crl) = c.ranks.advanced.get(crate::model::StandardList::Crl) {
                    push_entry(
                        &mut out,
                        table,
                        &VirtualProgramId::foreign(&choice.inst_cd, &choice.br_cd),
                        choice.opt_no,
                        EffectiveRank::standard(crl),
                    );
                }
            }
            continue;
        }
        let family = profile.family_for_branch(&choice.br_cd);
        let remark = c.remark(family);
        if remark == RemarkSymbol::NotEligible {
            continue;
        }
        let home = profile.is_home_state(&c.state_code);
        let mut quotas: Vec<Quota> = Vec::with_capacity(2);
        match profile.kind {
            InstituteKind::Iit | InstituteKind::GftiAi => quotas.push(Quota::AllIndia),
            InstituteKind::Nit | InstituteKind::GftiHsOs => {
                quotas.push(if home { Quota::HomeState } else { Quota::OtherState });
            }
            InstituteKind::GftiHsAi => {
                quotas.push(Quota::AllIndia);
                if home {
                    quotas.push(Quota::HomeState);
                }
            }
        }
        for quota in quotas {
            for cell in category_ladder(c.category) {
                let eff = match effective_rank(c, VCategory::Cell(cell), family, profile.has_pc) {
                    Some(e) => e,
                    None => continue,
                };
                let allowed = match eff.tier {
                    crate::model::Tier::Standard => remark.allows_cell(cell),
                    crate::model::Tier::Preparatory => remark.allows_preparatory(cell),
                };
                if !allowed {
                    continue;
                }
                let mut pools: Vec<GenderPool> = Vec::with_capacity(2);
                if c.is_female() {
                    pools.push(GenderPool::FemaleOnly);
                }
                pools.push(GenderPool::GenderNeutral);
                for pool in pools {
                    push_entry(
                        &mut out,
                        table,
                        &VirtualProgramId::cell(&choice.inst_cd, &choice.br_cd, quota, cell, pool),
                        choice.opt_no,
                        eff,
                    );
                }
            }
        }
        if c.ds_flag && profile.ds_capacity > 0 && !ds_done.contains(&choice.inst_cd.as_str()) {
            if let Some(eff) = effective_rank(c, VCategory::Ds, family, false) {
                push_entry(
                    &mut out,
                    table,
                    &VirtualProgramId::ds(&choice.inst_cd),
                    choice.opt_no,
                    eff,
                );
                ds_done.push(&choice.inst_cd);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        CatChange, Gender, Nationality, Rank, RankVector, StandardList, Tier,
    };
    use alloc::string::ToString;
    use alloc::vec;

    fn ratio_14() -> Ratio {
        Ratio::new(14, 100)
    }

    #[test]
    fn gender_pools_topup_branch() {
        // Independent evaluation: x = ceil((14 - 0) / 0.86) = 17.
        let p = compute_gender_pools(100, Some(0), ratio_14());
        assert_eq!(p, GenderPools { female_only: 17, gender_neutral: 100, added: 17 });
    }

    #[test]
    fn gender_pools_cap_branch() {
        let p = compute_gender_pools(100, Some(40), ratio_14());
        assert_eq!(p, GenderPools { female_only: 20, gender_neutral: 80, added: 0 });
    }

    #[test]
    fn gender_pools_middle_branch() {
        let p = compute_gender_pools(100, Some(16), ratio_14());
        assert_eq!(p, GenderPools { female_only: 16, gender_neutral: 84, added: 0 });
    }

    #[test]
    fn gender_pools_new_program() {
        let p = compute_gender_pools(50, None, ratio_14());
        assert_eq!(p, GenderPools { female_only: 7, gender_neutral: 50, added: 7 });
    }

    fn candidate(
        category: CategoryTag,
        gender: Gender,
        state: &str,
    ) -> CandidateRecord {
        CandidateRecord {
            roll_no: "20000001".to_string(),
            name: "X".to_string(),
            state_code: state.to_string(),
            gender,
            category,
            nationality: Nationality::Indian,
            ds_flag: false,
            prep_eligible: false,
            ranks: RankVector::default(),
            remark_eng: RemarkSymbol::Crl,
            remark_arch: RemarkSymbol::NotEligible,
            remark_adv: RemarkSymbol::Crl,
            cat_change: CatChange::NoChange,
            decision: None,
            aat_qualified: false,
            color_blind: false,
            one_eyed: false,
        }
    }

    fn iit_profile(inst: &str) -> InstituteProfile {
        InstituteProfile {
            inst_cd: inst.to_string(),
            kind: InstituteKind::Iit,
            has_pc: true,
            home_states: vec![],
            ds_capacity: 2,
        }
    }

    fn nit_profile(inst: &str, home: &str) -> InstituteProfile {
        InstituteProfile {
            inst_cd: inst.to_string(),
            kind: InstituteKind::Nit,
            has_pc: false,
            home_states: vec![home.to_string()],
            ds_capacity: 0,
        }
    }

    fn matrix_row(quota: Quota, inst: &str, br: &str, pool: GenderPool) -> SeatMatrixEntry {
        SeatMatrixEntry {
            quota,
            inst_cd: inst.to_string(),
            br_cd: br.to_string(),
            gender_pool: pool,
            cells: [1; 8],
            state_codes: vec![],
        }
    }

    fn table_for(
        rows: &[SeatMatrixEntry],
        profiles: &BTreeMap<String, InstituteProfile>,
    ) -> ProgramTable {
        build_virtual_programs(rows, &[], profiles, None).unwrap()
    }

    fn ids_of(out: &VirtualPreferenceList, table: &ProgramTable) -> Vec<VirtualProgramId> {
        out.entries.iter().map(|e| table.get(e.program).id.clone()).collect()
    }

    #[test]
    fn iit_row_yields_sixteen_programs_plus_ds() {
        let mut profiles = BTreeMap::new();
        profiles.insert("I01".to_string(), iit_profile("I01"));
        let rows = [
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::GenderNeutral),
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::FemaleOnly),
        ];
        let t = table_for(&rows, &profiles);
        assert_eq!(t.len(), 17); // 8 cells x 2 pools + 1 DS
    }

    #[test]
    fn nit_rows_yield_thirty_two_programs() {
        let mut profiles = BTreeMap::new();
        profiles.insert("N01".to_string(), nit_profile("N01", "GJ"));
        let rows = [
            matrix_row(Quota::HomeState, "N01", "4110", GenderPool::GenderNeutral),
            matrix_row(Quota::HomeState, "N01", "4110", GenderPool::FemaleOnly),
            matrix_row(Quota::OtherState, "N01", "4110", GenderPool::GenderNeutral),
            matrix_row(Quota::OtherState, "N01", "4110", GenderPool::FemaleOnly),
        ];
        let t = table_for(&rows, &profiles);
        assert_eq!(t.len(), 32);
    }

    #[test]
    fn sc_pwd_female_expands_to_eight_entries() {
        let mut profiles = BTreeMap::new();
        profiles.insert("I01".to_string(), iit_profile("I01"));
        let rows = [
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::GenderNeutral),
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::FemaleOnly),
        ];
        let t = table_for(&rows, &profiles);

        let mut c = candidate(CategoryTag::ScPwd, Gender::Female, "UP");
        c.ranks.advanced.set(StandardList::Crl, Rank::from_integer(900));
        c.ranks.advanced.set(StandardList::CrlPwd, Rank::from_integer(40));
        c.ranks.advanced.set(StandardList::Sc, Rank::from_integer(70));
        c.ranks.advanced.set(StandardList::ScPwd, Rank::from_integer(5));
        let choices = [ChoiceRow {
            roll_no: c.roll_no.clone(),
            opt_no: 1,
            inst_cd: "I01".to_string(),
            br_cd: "4109".to_string(),
            valid: true,
        }];
        let out = expand_preferences(&c, &choices, &profiles, &t);
        let cells: Vec<(CategoryTag, GenderPool)> = ids_of(&out, &t)
            .into_iter()
            .map(|id| match id.category {
                VCategory::Cell(cell) => (cell, id.pool),
                VCategory::Ds => panic!("no DS expected"),
            })
            .collect();
        assert_eq!(
            cells,
            vec![
                (CategoryTag::Open, GenderPool::FemaleOnly),
                (CategoryTag::Open, GenderPool::GenderNeutral),
                (CategoryTag::OpenPwd, GenderPool::FemaleOnly),
                (CategoryTag::OpenPwd, GenderPool::GenderNeutral),
                (CategoryTag::Sc, GenderPool::FemaleOnly),
                (CategoryTag::Sc, GenderPool::GenderNeutral),
                (CategoryTag::ScPwd, GenderPool::FemaleOnly),
                (CategoryTag::ScPwd, GenderPool::GenderNeutral),
            ]
        );
    }

    #[test]
    fn obc_male_expands_to_open_then_obc() {
        let mut profiles = BTreeMap::new();
        profiles.insert("I01".to_string(), iit_profile("I01"));
        let rows = [
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::GenderNeutral),
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::FemaleOnly),
        ];
        let t = table_for(&rows, &profiles);

        let mut c = candidate(CategoryTag::ObcNcl, Gender::Male, "UP");
        c.ranks.advanced.set(StandardList::Crl, Rank::from_integer(120));
        c.ranks.advanced.set(StandardList::ObcNcl, Rank::from_integer(30));
        let choices = [ChoiceRow {
            roll_no: c.roll_no.clone(),
            opt_no: 1,
            inst_cd: "I01".to_string(),
            br_cd: "4109".to_string(),
            valid: true,
        }];
        let out = expand_preferences(&c, &choices, &profiles, &t);
        let cells: Vec<(CategoryTag, GenderPool)> = ids_of(&out, &t)
            .into_iter()
            .map(|id| match id.category {
                VCategory::Cell(cell) => (cell, id.pool),
                VCategory::Ds => panic!("no DS expected"),
            })
            .collect();
        assert_eq!(
            cells,
            vec![
                (CategoryTag::Open, GenderPool::GenderNeutral),
                (CategoryTag::ObcNcl, GenderPool::GenderNeutral),
            ]
        );
    }

    #[test]
    fn st_female_home_state_gets_hs_pools_only() {
        let mut profiles = BTreeMap::new();
        profiles.insert("N01".to_string(), nit_profile("N01", "GJ"));
        let rows = [
            matrix_row(Quota::HomeState, "N01", "4110", GenderPool::GenderNeutral),
            matrix_row(Quota::HomeState, "N01", "4110", GenderPool::FemaleOnly),
            matrix_row(Quota::OtherState, "N01", "4110", GenderPool::GenderNeutral),
            matrix_row(Quota::OtherState, "N01", "4110", GenderPool::FemaleOnly),
        ];
        let t = table_for(&rows, &profiles);

        let mut c = candidate(CategoryTag::St, Gender::Female, "GJ");
        c.ranks.main_eng.set(StandardList::Crl, Rank::from_integer(5000));
        c.ranks.main_eng.set(StandardList::St, Rank::from_integer(12));
        let choices = [ChoiceRow {
            roll_no: c.roll_no.clone(),
            opt_no: 1,
            inst_cd: "N01".to_string(),
            br_cd: "4110".to_string(),
            valid: true,
        }];
        let out = expand_preferences(&c, &choices, &profiles, &t);
        let ids = ids_of(&out, &t);
        assert_eq!(ids.len(), 4);
        assert!(ids.iter().all(|id| id.quota == Quota::HomeState));
        let cells: Vec<(CategoryTag, GenderPool)> = ids
            .into_iter()
            .map(|id| match id.category {
                VCategory::Cell(cell) => (cell, id.pool),
                VCategory::Ds => panic!("no DS expected"),
            })
            .collect();
        assert_eq!(
            cells,
            vec![
                (CategoryTag::Open, GenderPool::FemaleOnly),
                (CategoryTag::Open, GenderPool::GenderNeutral),
                (CategoryTag::St, GenderPool::FemaleOnly),
                (CategoryTag::St, GenderPool::GenderNeutral),
            ]
        );
    }

    #[test]
    fn ds_program_appended_once_per_institute() {
        let mut profiles = BTreeMap::new();
        profiles.insert("I01".to_string(), iit_profile("I01"));
        let rows = [
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::GenderNeutral),
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::FemaleOnly),
            matrix_row(Quota::AllIndia, "I01", "4110", GenderPool::GenderNeutral),
            matrix_row(Quota::AllIndia, "I01", "4110", GenderPool::FemaleOnly),
        ];
        let t = table_for(&rows, &profiles);

        let mut c = candidate(CategoryTag::Open, Gender::Male, "UP");
        c.ds_flag = true;
        c.ranks.advanced.set(StandardList::Crl, Rank::from_integer(77));
        let mk = |opt: u32, br: &str| ChoiceRow {
            roll_no: c.roll_no.clone(),
            opt_no: opt,
            inst_cd: "I01".to_string(),
            br_cd: br.to_string(),
            valid: true,
        };
        let out = expand_preferences(&c, &[mk(1, "4109"), mk(2, "4110")], &profiles, &t);
        let ids = ids_of(&out, &t);
        let ds_count = ids.iter().filter(|id| id.is_ds()).count();
        assert_eq!(ds_count, 1);
        // DS entry sits right after the first choice's programs.
        assert!(ids[1].is_ds());
        assert_eq!(ids.len(), 3);
    }

    #[test]
    fn preparatory_only_candidate_gets_pc_tier_entries() {
        let mut profiles = BTreeMap::new();
        profiles.insert("I01".to_string(), iit_profile("I01"));
        let rows = [
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::GenderNeutral),
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::FemaleOnly),
        ];
        let t = table_for(&rows, &profiles);

        let mut c = candidate(CategoryTag::Sc, Gender::Male, "UP");
        c.remark_adv = RemarkSymbol::Preparatory;
        c.prep_eligible = true;
        c.ranks.preparatory[crate::model::PreparatoryList::Sc as usize] =
            Some(Rank::from_integer(3));
        let choices = [ChoiceRow {
            roll_no: c.roll_no.clone(),
            opt_no: 1,
            inst_cd: "I01".to_string(),
            br_cd: "4109".to_string(),
            valid: true,
        }];
        let out = expand_preferences(&c, &choices, &profiles, &t);
        assert_eq!(out.entries.len(), 1);
        assert_eq!(out.entries[0].eff_rank.tier, Tier::Preparatory);
        let id = &t.get(out.entries[0].program).id;
        assert_eq!(id.category, VCategory::Cell(CategoryTag::Sc));
    }

    #[test]
    fn invalid_choices_and_ineligible_families_are_skipped() {
        let mut profiles = BTreeMap::new();
        profiles.insert("N01".to_string(), nit_profile("N01", "GJ"));
        let rows = [
            matrix_row(Quota::HomeState, "N01", "4110", GenderPool::GenderNeutral),
            matrix_row(Quota::HomeState, "N01", "4110", GenderPool::FemaleOnly),
            matrix_row(Quota::OtherState, "N01", "4110", GenderPool::GenderNeutral),
            matrix_row(Quota::OtherState, "N01", "4110", GenderPool::FemaleOnly),
        ];
        let t = table_for(&rows, &profiles);

        let mut c = candidate(CategoryTag::Open, Gender::Male, "UP");
        c.remark_eng = RemarkSymbol::NotEligible;
        c.ranks.main_eng.set(StandardList::Crl, Rank::from_integer(5));
        let choices = [ChoiceRow {
            roll_no: c.roll_no.clone(),
            opt_no: 1,
            inst_cd: "N01".to_string(),
            br_cd: "4110".to_string(),
            valid: true,
        }];
        assert!(expand_preferences(&c, &choices, &profiles, &t).entries.is_empty());

        c.remark_eng = RemarkSymbol::Crl;
        let invalid = [ChoiceRow { valid: false, ..choices[0].clone() }];
        assert!(expand_preferences(&c, &invalid, &profiles, &t).entries.is_empty());
    }

    #[test]
    fn international_candidate_maps_to_foreign_pools() {
        let mut profiles = BTreeMap::new();
        profiles.insert("I01".to_string(), iit_profile("I01"));
        let rows = [
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::GenderNeutral),
            matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::FemaleOnly),
        ];
        let foreign = [ForeignSeatEntry {
            inst_cd: "I01".to_string(),
            br_cd: "4109".to_string(),
            capacity: 2,
        }];
        let t = build_virtual_programs(&rows, &foreign, &profiles, None).unwrap();

        let mut c = candidate(CategoryTag::Open, Gender::Male, "UP");
        c.nationality = Nationality::Foreign;
        c.ranks.advanced.set(StandardList::Crl, Rank::from_integer(600));
        let choices = [ChoiceRow {
            roll_no: c.roll_no.clone(),
            opt_no: 1,
            inst_cd: "I01".to_string(),
            br_cd: "4109".to_string(),
            valid: true,
        }];
        let out = expand_preferences(&c, &choices, &profiles, &t);
        assert_eq!(out.entries.len(), 1);
        assert!(t.get(out.entries[0].program).id.foreign_pool);
    }

    #[test]
    fn baseline_split_applies_per_cell() {
        let mut profiles = BTreeMap::new();
        profiles.insert("I01".to_string(), iit_profile("I01"));
        let mut row = matrix_row(Quota::AllIndia, "I01", "4109", GenderPool::GenderNeutral);
        row.cells = [100, 0, 0, 0, 0, 0, 0, 0];
        let mut base = FemaleBaseline::default();
        base.cells.insert(
            (Quota::AllIndia, "I01".to_string(), "4109".to_string(), CategoryTag::Open),
            BaselineCell { prior_capacity: 100, prior_female: 0 },
        );
        let t = build_virtual_programs(&[row], &[], &profiles, Some((&base, ratio_14()))).unwrap();
        let f = t
            .lookup(&VirtualProgramId::cell(
                "I01", "4109", Quota::AllIndia, CategoryTag::Open, GenderPool::FemaleOnly,
            ))
            .unwrap();
        let n = t
            .lookup(&VirtualProgramId::cell(
                "I01", "4109", Quota::AllIndia, CategoryTag::Open, GenderPool::GenderNeutral,
            ))
            .unwrap();
        assert_eq!(t.get(f).capacity, 17);
        assert_eq!(t.get(n).capacity, 100);
    }
}
