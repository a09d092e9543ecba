//! Domain types shared by every stage of the allocation pipeline.
//!
//! Ranks are exact scaled decimals so that ties are detected exactly; a
//! candidate's position in a program's extended merit list is a two-level
//! key (standard tier before preparatory tier).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Fixed decimal scale for rank values: six fractional digits.
pub const RANK_SCALE: u64 = 1_000_000;

/// A rank in some merit list, stored as an exact scaled decimal.
/// Lower is better; values are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank(pub u64);

impl Rank {
    pub fn from_integer(v: u64) -> Self {
        Rank(v * RANK_SCALE)
    }

    /// Parses a decimal rank string such as `12`, `12.5` or `3.25`.
    /// Returns `None` for malformed input, zero, or more than six
    /// fractional digits.
    pub fn parse(s: &str) -> Option<Rank> {
        let s = s.trim();
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if frac_part.len() > 6 {
            return None;
        }
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().ok()?
        };
        let mut frac: u64 = 0;
        if !frac_part.is_empty() {
            frac = frac_part.parse().ok()?;
            for _ in 0..(6 - frac_part.len()) {
                frac *= 10;
            }
        }
        let v = int.checked_mul(RANK_SCALE)?.checked_add(frac)?;
        if v == 0 {
            None
        } else {
            Some(Rank(v))
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let int = self.0 / RANK_SCALE;
        let mut frac = self.0 % RANK_SCALE;
        if frac == 0 {
            return write!(f, "{int}");
        }
        let mut digits = 6;
        while frac % 10 == 0 {
            frac /= 10;
            digits -= 1;
        }
        write!(f, "{int}.{frac:0width$}", width = digits)
    }
}

/// Which segment of an extended merit list a rank belongs to. The whole
/// standard list precedes the whole preparatory list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    Standard,
    Preparatory,
}

/// A candidate's position in a program's extended merit list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EffectiveRank {
    pub tier: Tier,
    pub rank: Rank,
}

impl EffectiveRank {
    pub fn standard(rank: Rank) -> Self {
        EffectiveRank {
            tier: Tier::Standard,
            rank,
        }
    }

    pub fn preparatory(rank: Rank) -> Self {
        EffectiveRank {
            tier: Tier::Preparatory,
            rank,
        }
    }
}

impl fmt::Display for EffectiveRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tier {
            Tier::Standard => write!(f, "{}", self.rank),
            Tier::Preparatory => write!(f, "{}P", self.rank),
        }
    }
}

/// Min-cutoff of a virtual program. `None` is the zero sentinel used in
/// the first round: nobody gets a retention guarantee.
pub type MinCutoff = Option<EffectiveRank>;

/// True when `rank` clears the cutoff guarantee, i.e. the holder can
/// never be rejected by the program.
pub fn clears_cutoff(rank: EffectiveRank, cutoff: MinCutoff) -> bool {
    match cutoff {
        Some(c) => rank <= c,
        None => false,
    }
}

/// The eight birth-category/PwD tags. Every candidate carries exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CategoryTag {
    Open,
    ObcNcl,
    Sc,
    St,
    OpenPwd,
    ObcNclPwd,
    ScPwd,
    StPwd,
}

pub const ALL_CATEGORY_TAGS: [CategoryTag; 8] = [
    CategoryTag::Open,
    CategoryTag::OpenPwd,
    CategoryTag::Sc,
    CategoryTag::ScPwd,
    CategoryTag::St,
    CategoryTag::StPwd,
    CategoryTag::ObcNcl,
    CategoryTag::ObcNclPwd,
];

impl CategoryTag {
    pub fn is_pwd(self) -> bool {
        matches!(
            self,
            CategoryTag::OpenPwd | CategoryTag::ObcNclPwd | CategoryTag::ScPwd | CategoryTag::StPwd
        )
    }

    /// The non-PwD tag of the same birth category.
    pub fn base(self) -> CategoryTag {
        match self {
            CategoryTag::Open | CategoryTag::OpenPwd => CategoryTag::Open,
            CategoryTag::ObcNcl | CategoryTag::ObcNclPwd => CategoryTag::ObcNcl,
            CategoryTag::Sc | CategoryTag::ScPwd => CategoryTag::Sc,
            CategoryTag::St | CategoryTag::StPwd => CategoryTag::St,
        }
    }

    pub fn with_pwd(self) -> CategoryTag {
        match self.base() {
            CategoryTag::Open => CategoryTag::OpenPwd,
            CategoryTag::ObcNcl => CategoryTag::ObcNclPwd,
            CategoryTag::Sc => CategoryTag::ScPwd,
            CategoryTag::St => CategoryTag::StPwd,
            _ => unreachable!(),
        }
    }

    /// Four-character seat-cell code used in the allotment table.
    pub fn cell_code(self) -> &'static str {
        match self {
            CategoryTag::Open => "OPNO",
            CategoryTag::OpenPwd => "OPPH",
            CategoryTag::ObcNcl => "BCNO",
            CategoryTag::ObcNclPwd => "BCPH",
            CategoryTag::Sc => "SCNO",
            CategoryTag::ScPwd => "SCPH",
            CategoryTag::St => "STNO",
            CategoryTag::StPwd => "STPH",
        }
    }

    pub fn from_cell_code(s: &str) -> Option<CategoryTag> {
        Some(match s {
            "OPNO" => CategoryTag::Open,
            "OPPH" => CategoryTag::OpenPwd,
            "BCNO" => CategoryTag::ObcNcl,
            "BCPH" => CategoryTag::ObcNclPwd,
            "SCNO" => CategoryTag::Sc,
            "SCPH" => CategoryTag::ScPwd,
            "STNO" => CategoryTag::St,
            "STPH" => CategoryTag::StPwd,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gender {
    Male,
    Female,
    Transgender,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nationality {
    Indian,
    Oci,
    Pio,
    Foreign,
}

impl Nationality {
    /// International candidates compete only for the supernumerary
    /// foreign seats of IIT programs.
    pub fn is_international(self) -> bool {
        !matches!(self, Nationality::Indian)
    }
}

/// Eligibility remark symbol for one exam family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RemarkSymbol {
    /// `*` — eligible under CRL (all seat cells the candidate has ranks for).
    Crl,
    /// `=` — OBC-NCL seats only.
    ObcOnly,
    /// `+` — SC/ST/PwD seats only.
    ScStPwdOnly,
    /// `$` — OBC-NCL-PwD seat only.
    ObcPwdOnly,
    /// `%` — GEN-PwD seat only.
    GenPwdOnly,
    /// `P` — preparatory seats only.
    Preparatory,
    /// `N` — not eligible for seat allocation in this family.
    NotEligible,
}

impl RemarkSymbol {
    pub fn from_char(c: char) -> Option<RemarkSymbol> {
        Some(match c {
            '*' => RemarkSymbol::Crl,
            '=' => RemarkSymbol::ObcOnly,
            '+' => RemarkSymbol::ScStPwdOnly,
            '$' => RemarkSymbol::ObcPwdOnly,
            '%' => RemarkSymbol::GenPwdOnly,
            'P' => RemarkSymbol::Preparatory,
            'N' => RemarkSymbol::NotEligible,
            _ => return None,
        })
    }

    pub fn as_char(self) -> char {
        match self {
            RemarkSymbol::Crl => '*',
            RemarkSymbol::ObcOnly => '=',
            RemarkSymbol::ScStPwdOnly => '+',
            RemarkSymbol::ObcPwdOnly => '$',
            RemarkSymbol::GenPwdOnly => '%',
            RemarkSymbol::Preparatory => 'P',
            RemarkSymbol::NotEligible => 'N',
        }
    }

    /// Whether the symbol permits competing for seats of `cell` via the
    /// standard rank lists.
    pub fn allows_cell(self, cell: CategoryTag) -> bool {
        match self {
            RemarkSymbol::Crl => true,
            RemarkSymbol::ObcOnly => matches!(cell, CategoryTag::ObcNcl | CategoryTag::ObcNclPwd),
            RemarkSymbol::ScStPwdOnly => matches!(
                cell,
                CategoryTag::Sc
                    | CategoryTag::ScPwd
                    | CategoryTag::St
                    | CategoryTag::StPwd
                    | CategoryTag::OpenPwd
                    | CategoryTag::ObcNclPwd
            ),
            RemarkSymbol::ObcPwdOnly => matches!(cell, CategoryTag::ObcNclPwd),
            RemarkSymbol::GenPwdOnly => matches!(cell, CategoryTag::OpenPwd),
            RemarkSymbol::Preparatory => false,
            RemarkSymbol::NotEligible => false,
        }
    }

    /// Whether the symbol permits the preparatory tier of `cell`.
    pub fn allows_preparatory(self, cell: CategoryTag) -> bool {
        matches!(self, RemarkSymbol::Preparatory) && preparatory_list_for_cell(cell).is_some()
    }
}

/// Exam families: each carries its own set of rank lists and its own
/// eligibility remark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExamFamily {
    MainEng,
    MainArch,
    Advanced,
}

/// Index of a standard rank list within one exam family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StandardList {
    Crl = 0,
    ObcNcl = 1,
    Sc = 2,
    St = 3,
    CrlPwd = 4,
    ObcNclPwd = 5,
    ScPwd = 6,
    StPwd = 7,
}

/// Index of one of the six preparatory rank lists (advanced family only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreparatoryList {
    Sc = 0,
    St = 1,
    CrlPwd = 2,
    ObcNclPwd = 3,
    ScPwd = 4,
    StPwd = 5,
}

/// The standard rank list that orders a seat cell.
pub fn standard_list_for_cell(cell: CategoryTag) -> StandardList {
    match cell {
        CategoryTag::Open => StandardList::Crl,
        CategoryTag::ObcNcl => StandardList::ObcNcl,
        CategoryTag::Sc => StandardList::Sc,
        CategoryTag::St => StandardList::St,
        CategoryTag::OpenPwd => StandardList::CrlPwd,
        CategoryTag::ObcNclPwd => StandardList::ObcNclPwd,
        CategoryTag::ScPwd => StandardList::ScPwd,
        CategoryTag::StPwd => StandardList::StPwd,
    }
}

/// The preparatory list that extends a seat cell's merit list, when one
/// exists. OPEN and OBC-NCL cells have no preparatory course.
pub fn preparatory_list_for_cell(cell: CategoryTag) -> Option<PreparatoryList> {
    Some(match cell {
        CategoryTag::OpenPwd => PreparatoryList::CrlPwd,
        CategoryTag::ObcNclPwd => PreparatoryList::ObcNclPwd,
        CategoryTag::Sc => PreparatoryList::Sc,
        CategoryTag::ScPwd => PreparatoryList::ScPwd,
        CategoryTag::St => PreparatoryList::St,
        CategoryTag::StPwd => PreparatoryList::StPwd,
        CategoryTag::Open | CategoryTag::ObcNcl => return None,
    })
}

/// One family's standard rank vector. Absence means "no valid rank".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FamilyRanks(pub [Option<Rank>; 8]);

impl FamilyRanks {
    pub fn get(&self, list: StandardList) -> Option<Rank> {
        self.0[list as usize]
    }

    pub fn set(&mut self, list: StandardList, rank: Rank) {
        self.0[list as usize] = Some(rank);
    }
}

/// All rank lists a candidate may appear in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RankVector {
    pub main_eng: FamilyRanks,
    pub main_arch: FamilyRanks,
    pub advanced: FamilyRanks,
    /// Preparatory lists; advanced family only.
    pub preparatory: [Option<Rank>; 6],
}

impl RankVector {
    pub fn family(&self, f: ExamFamily) -> &FamilyRanks {
        match f {
            ExamFamily::MainEng => &self.main_eng,
            ExamFamily::MainArch => &self.main_arch,
            ExamFamily::Advanced => &self.advanced,
        }
    }

    pub fn family_mut(&mut self, f: ExamFamily) -> &mut FamilyRanks {
        match f {
            ExamFamily::MainEng => &mut self.main_eng,
            ExamFamily::MainArch => &mut self.main_arch,
            ExamFamily::Advanced => &mut self.advanced,
        }
    }

    pub fn preparatory(&self, list: PreparatoryList) -> Option<Rank> {
        self.preparatory[list as usize]
    }
}

/// Credential-change code reported after document verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatChange {
    /// Core credential changed; seat cancelled, no penalty.
    SeatCancelled = 1,
    /// No change (default).
    NoChange = 2,
    /// Credentials changed but the seat was kept.
    ChangedSeatKept = 3,
    /// Vision-related change; seat cancelled.
    VisionSeatCancelled = 4,
}

impl CatChange {
    pub fn from_digit(d: u8) -> Option<CatChange> {
        Some(match d {
            1 => CatChange::SeatCancelled,
            2 => CatChange::NoChange,
            3 => CatChange::ChangedSeatKept,
            4 => CatChange::VisionSeatCancelled,
            _ => return None,
        })
    }

    pub fn cancels_seat(self) -> bool {
        matches!(self, CatChange::SeatCancelled | CatChange::VisionSeatCancelled)
    }
}

/// Per-round willingness decision recorded at the reporting center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Freeze,
    Float,
    Slide,
    Reject,
}

impl Decision {
    pub fn code(self) -> &'static str {
        match self {
            Decision::Freeze => "FR",
            Decision::Float => "FL",
            Decision::Slide => "SL",
            Decision::Reject => "RJ",
        }
    }

    pub fn from_code(s: &str) -> Option<Decision> {
        Some(match s {
            "FR" => Decision::Freeze,
            "FL" => Decision::Float,
            "SL" => Decision::Slide,
            "RJ" => Decision::Reject,
            _ => return None,
        })
    }
}

/// Reporting-center outcome for an allotted seat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RStatus {
    NotReported,
    DualReporting,
    ReportedCancelled,
    Reported,
    Retained,
    RetainedUpgraded,
}

impl RStatus {
    pub fn code(self) -> &'static str {
        match self {
            RStatus::NotReported => "NR",
            RStatus::DualReporting => "DR",
            RStatus::ReportedCancelled => "RC",
            RStatus::Reported => "RP",
            RStatus::Retained => "RT",
            RStatus::RetainedUpgraded => "RU",
        }
    }

    pub fn from_code(s: &str) -> Option<RStatus> {
        Some(match s {
            "NR" => RStatus::NotReported,
            "DR" => RStatus::DualReporting,
            "RC" => RStatus::ReportedCancelled,
            "RP" => RStatus::Reported,
            "RT" => RStatus::Retained,
            "RU" => RStatus::RetainedUpgraded,
            _ => return None,
        })
    }

    /// A cancelled seat contributes nothing to the next round's cutoffs.
    pub fn cancels_seat(self) -> bool {
        matches!(
            self,
            RStatus::NotReported | RStatus::DualReporting | RStatus::ReportedCancelled
        )
    }
}

/// One applicant with all credentials relevant to seat allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateRecord {
    pub roll_no: String,
    pub name: String,
    pub state_code: String,
    pub gender: Gender,
    pub category: CategoryTag,
    pub nationality: Nationality,
    pub ds_flag: bool,
    pub prep_eligible: bool,
    pub ranks: RankVector,
    pub remark_eng: RemarkSymbol,
    pub remark_arch: RemarkSymbol,
    pub remark_adv: RemarkSymbol,
    pub cat_change: CatChange,
    pub decision: Option<Decision>,
    pub aat_qualified: bool,
    pub color_blind: bool,
    pub one_eyed: bool,
}

impl CandidateRecord {
    pub fn remark(&self, family: ExamFamily) -> RemarkSymbol {
        match family {
            ExamFamily::MainEng => self.remark_eng,
            ExamFamily::MainArch => self.remark_arch,
            ExamFamily::Advanced => self.remark_adv,
        }
    }

    pub fn is_female(&self) -> bool {
        self.gender == Gender::Female
    }
}

/// Seat quota of a virtual program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quota {
    AllIndia,
    HomeState,
    OtherState,
    /// Opaque pass-through codes seen only in allotment files.
    Ap,
    Go,
}

impl Quota {
    pub fn code(self) -> &'static str {
        match self {
            Quota::AllIndia => "AI",
            Quota::HomeState => "HS",
            Quota::OtherState => "OS",
            Quota::Ap => "AP",
            Quota::Go => "GO",
        }
    }

    pub fn from_code(s: &str) -> Option<Quota> {
        Some(match s {
            "AI" => Quota::AllIndia,
            "HS" => Quota::HomeState,
            "OS" => Quota::OtherState,
            "AP" => Quota::Ap,
            "GO" => Quota::Go,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenderPool {
    GenderNeutral,
    FemaleOnly,
}

impl GenderPool {
    pub fn code(self) -> &'static str {
        match self {
            GenderPool::GenderNeutral => "Neutral",
            GenderPool::FemaleOnly => "Female",
        }
    }

    pub fn from_code(s: &str) -> Option<GenderPool> {
        Some(match s {
            "Neutral" => GenderPool::GenderNeutral,
            "Female" => GenderPool::FemaleOnly,
            _ => return None,
        })
    }
}

/// Category axis of a virtual program: a seat cell or the per-institute
/// DS program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VCategory {
    Cell(CategoryTag),
    Ds,
}

impl VCategory {
    pub fn code(self) -> &'static str {
        match self {
            VCategory::Cell(c) => c.cell_code(),
            VCategory::Ds => "DSNO",
        }
    }

    pub fn from_code(s: &str) -> Option<VCategory> {
        if s == "DSNO" {
            return Some(VCategory::Ds);
        }
        CategoryTag::from_cell_code(s).map(VCategory::Cell)
    }
}

/// Sentinel branch code carried by DS virtual programs.
pub const DS_BRANCH: &str = "0000";

/// Identity of a virtual program, the atomic allocation unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VirtualProgramId {
    pub institute: String,
    pub branch: String,
    pub quota: Quota,
    pub category: VCategory,
    pub pool: GenderPool,
    pub foreign_pool: bool,
}

impl VirtualProgramId {
    pub fn cell(
        institute: &str,
        branch: &str,
        quota: Quota,
        cell: CategoryTag,
        pool: GenderPool,
    ) -> Self {
        VirtualProgramId {
            institute: institute.into(),
            branch: branch.into(),
            quota,
            category: VCategory::Cell(cell),
            pool,
            foreign_pool: false,
        }
    }

    /// The per-institute DS program: gender-neutral, sentinel branch.
    pub fn ds(institute: &str) -> Self {
        VirtualProgramId {
            institute: institute.into(),
            branch: DS_BRANCH.into(),
            quota: Quota::AllIndia,
            category: VCategory::Ds,
            pool: GenderPool::GenderNeutral,
            foreign_pool: false,
        }
    }

    /// The foreign-candidate pool shadowing an OPEN program.
    pub fn foreign(institute: &str, branch: &str) -> Self {
        VirtualProgramId {
            institute: institute.into(),
            branch: branch.into(),
            quota: Quota::AllIndia,
            category: VCategory::Cell(CategoryTag::Open),
            pool: GenderPool::GenderNeutral,
            foreign_pool: true,
        }
    }

    pub fn is_ds(&self) -> bool {
        self.category == VCategory::Ds
    }
}

/// A virtual program with its mutable per-run state.
#[derive(Debug, Clone)]
pub struct VirtualProgram {
    pub id: VirtualProgramId,
    pub init_capacity: u32,
    pub capacity: u32,
    pub min_cutoff: MinCutoff,
    pub dereserve_to: u32,
    pub dereserve_from: u32,
}

impl VirtualProgram {
    pub fn new(id: VirtualProgramId, capacity: u32) -> Self {
        VirtualProgram {
            id,
            init_capacity: capacity,
            capacity,
            min_cutoff: None,
            dereserve_to: 0,
            dereserve_from: 0,
        }
    }
}

/// Allotment-row flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeatFlag {
    Normal,
    Ds,
    Foreign,
    Preparatory,
}

impl SeatFlag {
    pub fn code(self) -> &'static str {
        match self {
            SeatFlag::Normal => "N",
            SeatFlag::Ds => "D",
            SeatFlag::Foreign => "F",
            SeatFlag::Preparatory => "P",
        }
    }

    pub fn from_code(s: &str) -> Option<SeatFlag> {
        Some(match s {
            "N" => SeatFlag::Normal,
            "D" => SeatFlag::Ds,
            "F" => SeatFlag::Foreign,
            "P" => SeatFlag::Preparatory,
            _ => return None,
        })
    }
}

/// Reason code attached to a supernumerary admit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupnumReason {
    NotApplicable,
    ClosingRankEquality,
    MinCutoff,
    Foreign,
    ForeignEquality,
    ForeignMinCutoff,
    Ds,
    DsEquality,
    DsMinCutoff,
}

impl SupnumReason {
    pub fn code(self) -> &'static str {
        match self {
            SupnumReason::NotApplicable => "NA",
            SupnumReason::ClosingRankEquality => "EQ",
            SupnumReason::MinCutoff => "MC",
            SupnumReason::Foreign => "FR",
            SupnumReason::ForeignEquality => "FE",
            SupnumReason::ForeignMinCutoff => "FM",
            SupnumReason::Ds => "DS",
            SupnumReason::DsEquality => "DE",
            SupnumReason::DsMinCutoff => "DM",
        }
    }

    pub fn from_code(s: &str) -> Option<SupnumReason> {
        Some(match s {
            "NA" => SupnumReason::NotApplicable,
            "EQ" => SupnumReason::ClosingRankEquality,
            "MC" => SupnumReason::MinCutoff,
            "FR" => SupnumReason::Foreign,
            "FE" => SupnumReason::ForeignEquality,
            "FM" => SupnumReason::ForeignMinCutoff,
            "DS" => SupnumReason::Ds,
            "DE" => SupnumReason::DsEquality,
            "DM" => SupnumReason::DsMinCutoff,
            _ => return None,
        })
    }
}

/// Birth-category code used in the candidate table and allotment output.
pub fn birth_cat_code(tag: CategoryTag) -> &'static str {
    match tag.base() {
        CategoryTag::Open => "GN",
        CategoryTag::ObcNcl => "BC",
        CategoryTag::Sc => "SC",
        CategoryTag::St => "ST",
        _ => unreachable!(),
    }
}

/// One candidate's seat for a round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllotmentRow {
    pub round_no: u32,
    pub roll_no: String,
    pub birth_cat: String,
    pub opt_no: u32,
    pub inst_cd: String,
    pub br_cd: String,
    pub rank: EffectiveRank,
    pub allotted_cat: String,
    pub allotted_quota: Quota,
    pub gender_pool: GenderPool,
    pub flag: SeatFlag,
    pub supnum_reason: SupnumReason,
    pub withdraw: bool,
    pub rstatus: RStatus,
}

/// Per-virtual-program round summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramStats {
    pub quota: Quota,
    pub inst_cd: String,
    pub br_cd: String,
    pub vcategory: VCategory,
    pub gender_pool: GenderPool,
    pub foreign_pool: bool,
    pub opening_rank: Option<EffectiveRank>,
    pub closing_rank: Option<EffectiveRank>,
    pub min_cutoff: MinCutoff,
    pub total_allotted: u32,
    pub init_cap: u32,
    pub new_cap: u32,
    pub dereserve_from: u32,
    pub dereserve_to: u32,
    pub supernum: u32,
}

/// One entry in the raw choice list of a candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceRow {
    pub roll_no: String,
    pub opt_no: u32,
    pub inst_cd: String,
    pub br_cd: String,
    pub valid: bool,
}

/// A per-candidate ordered list of virtual-program references produced
/// by preference expansion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VirtualPreferenceList {
    pub entries: Vec<VirtualPreference>,
}

/// One expanded entry: which virtual program, under which raw choice,
/// at which extended-merit-list position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VirtualPreference {
    /// Index into the engine's program table.
    pub program: u32,
    /// 1-based position of the originating raw choice.
    pub opt_no: u32,
    pub eff_rank: EffectiveRank,
}

/// Position of p's merit list that orders candidate `c`, taking the
/// standard rank list followed by the matching preparatory list when the
/// institute offers preparatory courses.
pub fn effective_rank(
    c: &CandidateRecord,
    cell: VCategory,
    family: ExamFamily,
    has_preparatory: bool,
) -> Option<EffectiveRank> {
    let cell = match cell {
        // DS and foreign pools order by the advanced CRL.
        VCategory::Ds => {
            return c
                .ranks
                .advanced
                .get(StandardList::Crl)
                .map(EffectiveRank::standard)
        }
        VCategory::Cell(cell) => cell,
    };
    let standard = c.ranks.family(family).get(standard_list_for_cell(cell));
    if let Some(rank) = standard {
        return Some(EffectiveRank::standard(rank));
    }
    if has_preparatory && family == ExamFamily::Advanced {
        if let Some(pc_list) = preparatory_list_for_cell(cell) {
            if let Some(rank) = c.ranks.preparatory(pc_list) {
                return Some(EffectiveRank::preparatory(rank));
            }
        }
    }
    None
}
