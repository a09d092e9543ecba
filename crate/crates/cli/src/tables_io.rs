//! CSV parsing and serialization for every table the CLI consumes or
//! produces. All files are UTF-8 CSV with a header row, comma
//! delimiter, and LF line endings. Blank rank cells mean "no rank";
//! a literal 0 rank is rejected (ranks start at 1 — only the min-cutoff
//! column uses 0 as the "no guarantee" sentinel).

use std::collections::BTreeMap;
use std::io;

use mrda_core::model::{
    birth_cat_code, AllotmentRow, CandidateRecord, CatChange, CategoryTag, ChoiceRow, Decision,
    EffectiveRank, ExamFamily, Gender, GenderPool, MinCutoff, Nationality, ProgramStats, Quota,
    RStatus, Rank, RankVector, RemarkSymbol, SeatFlag, StandardList, SupnumReason, Tier,
    VCategory, VirtualProgramId,
};
use mrda_core::virtualization::{
    BaselineCell, FemaleBaseline, ForeignSeatEntry, InstituteKind, InstituteProfile, Ratio,
    SeatMatrixEntry,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: Total does not equal the sum of the eight category cells")]
    TotalMismatch { line: u64 },
    #[error("line {line}: duplicate (quota, institute, branch, pool) key")]
    DuplicateKey { line: u64 },
    #[error("line {line}: duplicate roll number")]
    DuplicateRoll { line: u64 },
    #[error("line {line}: unknown remark symbol {symbol:?}")]
    UnknownRemarkSymbol { line: u64, symbol: String },
    #[error("header row does not match the expected columns for {table}")]
    BadHeader { table: &'static str },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

fn malformed(line: u64, reason: impl Into<String>) -> TableError {
    TableError::MalformedRow { line, reason: reason.into() }
}

/// A parsed row cursor with position-aware error helpers.
struct Row<'a> {
    rec: &'a csv::StringRecord,
    line: u64,
}

impl<'a> Row<'a> {
    fn get(&self, idx: usize) -> Result<&'a str, TableError> {
        self.rec
            .get(idx)
            .ok_or_else(|| malformed(self.line, format!("missing column {}", idx + 1)))
    }

    fn fixed(&self, idx: usize, width: usize, what: &str) -> Result<&'a str, TableError> {
        let v = self.get(idx)?;
        if v.chars().count() != width {
            return Err(malformed(
                self.line,
                format!("{what} must be exactly {width} characters, got {v:?}"),
            ));
        }
        Ok(v)
    }

    fn int(&self, idx: usize, what: &str) -> Result<u32, TableError> {
        let v = self.get(idx)?;
        v.parse()
            .map_err(|_| malformed(self.line, format!("{what} must be a non-negative integer, got {v:?}")))
    }

    /// A rank cell: blank means absent, 0 is rejected.
    fn rank(&self, idx: usize, what: &str) -> Result<Option<Rank>, TableError> {
        let v = self.get(idx)?.trim();
        if v.is_empty() {
            return Ok(None);
        }
        match Rank::parse(v) {
            Some(r) => Ok(Some(r)),
            None => Err(malformed(self.line, format!("{what} must be a positive decimal rank, got {v:?}"))),
        }
    }
}

fn reader(input: impl io::Read) -> csv::Reader<impl io::Read> {
    csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(input)
}

fn writer(out: impl io::Write) -> csv::Writer<impl io::Write> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn check_header(
    rdr: &mut csv::Reader<impl io::Read>,
    expected: &[&str],
    table: &'static str,
) -> Result<(), TableError> {
    let headers = rdr.headers()?;
    if headers.len() != expected.len() || headers.iter().zip(expected).any(|(a, b)| a != *b) {
        return Err(TableError::BadHeader { table });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Seat matrix (17 columns). Shared by the Indian seat matrix; the
// foreign seat file uses the 3-column format further below.
// ---------------------------------------------------------------------------

pub const SEAT_MATRIX_HEADER: [&str; 17] = [
    "Quota", "InstCd", "BrCd", "GenderPool", "OP", "OP_PwD", "SC", "SC_PwD", "ST", "ST_PwD",
    "OBC_NCL", "OBC_NCL_PwD", "Total", "StCd1", "StCd2", "StCd3", "StCd4",
];

/// Column order of the eight seat-count cells within the file.
const SEAT_FILE_CELLS: [CategoryTag; 8] = [
    CategoryTag::Open,
    CategoryTag::OpenPwd,
    CategoryTag::Sc,
    CategoryTag::ScPwd,
    CategoryTag::St,
    CategoryTag::StPwd,
    CategoryTag::ObcNcl,
    CategoryTag::ObcNclPwd,
];

/// Index into `SeatMatrixEntry::cells` for each file cell column.
fn internal_cell_index(tag: CategoryTag) -> usize {
    mrda_core::model::ALL_CATEGORY_TAGS.iter().position(|t| *t == tag).unwrap()
}

pub fn parse_seat_matrix(input: impl io::Read) -> Result<Vec<SeatMatrixEntry>, TableError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &SEAT_MATRIX_HEADER, "seat matrix")?;
    let mut out = Vec::new();
    let mut seen = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let row = Row { rec: &rec, line };
        let quota = Quota::from_code(row.fixed(0, 2, "Quota")?)
            .ok_or_else(|| malformed(line, "unknown quota code"))?;
        let inst_cd = row.fixed(1, 3, "InstCd")?.to_string();
        let br_cd = row.fixed(2, 4, "BrCd")?.to_string();
        let gender_pool = GenderPool::from_code(row.get(3)?)
            .ok_or_else(|| malformed(line, "GenderPool must be Neutral or Female"))?;
        let mut cells = [0u32; 8];
        for (col, tag) in SEAT_FILE_CELLS.iter().enumerate() {
            cells[internal_cell_index(*tag)] = row.int(4 + col, SEAT_MATRIX_HEADER[4 + col])?;
        }
        let total = row.int(12, "Total")?;
        if total != cells.iter().sum::<u32>() {
            return Err(TableError::TotalMismatch { line });
        }
        let mut state_codes = Vec::new();
        for col in 13..17 {
            let v = row.get(col)?.trim();
            if !v.is_empty() {
                if v.chars().count() != 2 {
                    return Err(malformed(line, "state codes must be 2 characters"));
                }
                state_codes.push(v.to_string());
            }
        }
        let key = (quota, inst_cd.clone(), br_cd.clone(), gender_pool);
        if seen.insert(key, line).is_some() {
            return Err(TableError::DuplicateKey { line });
        }
        out.push(SeatMatrixEntry { quota, inst_cd, br_cd, gender_pool, cells, state_codes });
    }
    Ok(out)
}

pub fn emit_seat_matrix(rows: &[SeatMatrixEntry], out: impl io::Write) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(SEAT_MATRIX_HEADER)?;
    for r in rows {
        let mut rec = vec![
            r.quota.code().to_string(),
            r.inst_cd.clone(),
            r.br_cd.clone(),
            r.gender_pool.code().to_string(),
        ];
        for tag in SEAT_FILE_CELLS {
            rec.push(r.cells[internal_cell_index(tag)].to_string());
        }
        rec.push(r.total().to_string());
        for i in 0..4 {
            rec.push(r.state_codes.get(i).cloned().unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Candidate table (63 columns).
// ---------------------------------------------------------------------------

pub const CANDIDATE_HEADER: [&str; 63] = [
    "RollNo", "AppNo", "NAME", "MNAME", "FNAME", "GName", "SCode", "Gender", "DOB", "CAT", "PwD",
    "Nationality", "AI_Eng_CRL_Rank", "AI_Eng_OBC_NCL_Rank", "AI_Eng_SC_Rank", "AI_Eng_ST_Rank",
    "AI_Eng_CRL_PD_Rank", "AI_Eng_OBC_NCL_PD_Rank", "AI_Eng_SC_PD_Rank", "AI_Eng_ST_PD_Rank",
    "Eng_Rem_Symb", "AI_Arc_CRL_Rank", "AI_Arc_OBC_NCL_Rank", "AI_Arc_SC_Rank", "AI_Arc_ST_Rank",
    "AI_Arc_CRL_PD_Rank", "AI_Arc_OBC_NCL_PD_Rank", "AI_Arc_SC_PD_Rank", "AI_Arc_ST_PD_Rank",
    "Arc_Rem_Symb", "Adv_RollNo", "Adv_RegNo", "Adv_CRL_Rank", "Adv_OBC_NCL_Rank", "Adv_SC_Rank",
    "Adv_ST_Rank", "Adv_CRL_PD_Rank", "Adv_OBC_NCL_PD_Rank", "Adv_SC_PD_Rank", "Adv_ST_PD_Rank",
    "Adv_Rem_Symb", "Adv_IsPrep", "Adv_Prep_SC_Rank", "Adv_Prep_ST_Rank", "Adv_Prep_CRL_PD_Rank",
    "Adv_Prep_OBC_NCL_PD_Rank", "Adv_Prep_SC_PD_Rank", "Adv_Prep_ST_PD_Rank", "Adv_AAT_Status",
    "Adv_DS", "Adv_colour_blind", "Adv_OneEyedVision", "Eng_Top_20", "Arc_Top_20", "Adv_Top_20",
    "Board_Mark_Eng", "Board_Mark_Arc", "Board_Mark_Adv", "Board_RollNo", "Board_Year_Passing",
    "Board_Name", "CatChange", "Decision",
];

/// File order of the eight standard rank-list columns in each family
/// block (columns 13–20, 22–29 and 33–40).
const RANK_COLUMN_LISTS: [StandardList; 8] = [
    StandardList::Crl,
    StandardList::ObcNcl,
    StandardList::Sc,
    StandardList::St,
    StandardList::CrlPwd,
    StandardList::ObcNclPwd,
    StandardList::ScPwd,
    StandardList::StPwd,
];

fn parse_remark(row: &Row, idx: usize) -> Result<RemarkSymbol, TableError> {
    let v = row.get(idx)?;
    let mut chars = v.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => RemarkSymbol::from_char(c).ok_or(TableError::UnknownRemarkSymbol {
            line: row.line,
            symbol: v.to_string(),
        }),
        _ => Err(TableError::UnknownRemarkSymbol { line: row.line, symbol: v.to_string() }),
    }
}

fn parse_yes_no(row: &Row, idx: usize, what: &str) -> Result<bool, TableError> {
    match row.get(idx)? {
        "1" => Ok(true),
        "2" | "" => Ok(false),
        other => Err(malformed(row.line, format!("{what} must be 1 or 2, got {other:?}"))),
    }
}

pub fn parse_candidates(input: impl io::Read) -> Result<Vec<CandidateRecord>, TableError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &CANDIDATE_HEADER, "candidate table")?;
    let mut out = Vec::new();
    let mut seen = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let row = Row { rec: &rec, line };
        let roll_no = row.fixed(0, 8, "RollNo")?.to_string();
        if seen.insert(roll_no.clone(), line).is_some() {
            return Err(TableError::DuplicateRoll { line });
        }
        let name = row.get(2)?.to_string();
        let state_code = row.fixed(6, 2, "SCode")?.to_string();
        let gender = match row.get(7)? {
            "1" => Gender::Male,
            "2" => Gender::Female,
            "3" => Gender::Transgender,
            other => return Err(malformed(line, format!("Gender must be 1, 2 or 3, got {other:?}"))),
        };
        let base = match row.get(9)? {
            "GN" => CategoryTag::Open,
            "BC" => CategoryTag::ObcNcl,
            "SC" => CategoryTag::Sc,
            "ST" => CategoryTag::St,
            other => return Err(malformed(line, format!("CAT must be GN/BC/SC/ST, got {other:?}"))),
        };
        let category = if parse_yes_no(&row, 10, "PwD")? { base.with_pwd() } else { base };
        let nationality = match row.get(11)? {
            "1" => Nationality::Indian,
            "2" => Nationality::Oci,
            "3" => Nationality::Pio,
            "4" => Nationality::Foreign,
            other => return Err(malformed(line, format!("Nationality must be 1-4, got {other:?}"))),
        };
        let mut ranks = RankVector::default();
        for (family, first_col) in
            [(ExamFamily::MainEng, 12), (ExamFamily::MainArch, 21), (ExamFamily::Advanced, 32)]
        {
            let fr = ranks.family_mut(family);
            for (off, list) in RANK_COLUMN_LISTS.iter().enumerate() {
                if let Some(rank) = row.rank(first_col + off, CANDIDATE_HEADER[first_col + off])? {
                    fr.set(*list, rank);
                }
            }
        }
        for off in 0..6 {
            if let Some(rank) = row.rank(42 + off, CANDIDATE_HEADER[42 + off])? {
                ranks.preparatory[off] = Some(rank);
            }
        }
        let remark_eng = parse_remark(&row, 20)?;
        let remark_arch = parse_remark(&row, 29)?;
        let remark_adv = parse_remark(&row, 40)?;
        let prep_eligible = parse_yes_no(&row, 41, "Adv_IsPrep")?;
        let aat_qualified = parse_yes_no(&row, 48, "Adv_AAT_Status")?;
        let ds_flag = parse_yes_no(&row, 49, "Adv_DS")?;
        let color_blind = parse_yes_no(&row, 50, "Adv_colour_blind")?;
        let one_eyed = parse_yes_no(&row, 51, "Adv_OneEyedVision")?;
        let cat_change = {
            let v = row.get(61)?;
            if v.is_empty() {
                CatChange::NoChange
            } else {
                v.parse::<u8>()
                    .ok()
                    .and_then(CatChange::from_digit)
                    .ok_or_else(|| malformed(line, format!("CatChange must be 1-4, got {v:?}")))?
            }
        };
        let decision = {
            let v = row.get(62)?;
            if v.is_empty() {
                None
            } else {
                Some(Decision::from_code(v).ok_or_else(|| {
                    malformed(line, format!("Decision must be FR/FL/SL/RJ, got {v:?}"))
                })?)
            }
        };
        out.push(CandidateRecord {
            roll_no,
            name,
            state_code,
            gender,
            category,
            nationality,
            ds_flag,
            prep_eligible,
            ranks,
            remark_eng,
            remark_arch,
            remark_adv,
            cat_change,
            decision,
            aat_qualified,
            color_blind,
            one_eyed,
        });
    }
    Ok(out)
}

fn yes_no(v: bool) -> &'static str {
    if v {
        "1"
    } else {
        "2"
    }
}

fn rank_cell(r: Option<Rank>) -> String {
    r.map(|r| r.to_string()).unwrap_or_default()
}

pub fn emit_candidates(rows: &[CandidateRecord], out: impl io::Write) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(CANDIDATE_HEADER)?;
    for c in rows {
        let mut rec: Vec<String> = Vec::with_capacity(63);
        rec.push(c.roll_no.clone());
        rec.push(String::new()); // AppNo
        rec.push(c.name.clone());
        rec.extend([String::new(), String::new(), String::new()]); // MNAME FNAME GName
        rec.push(c.state_code.clone());
        rec.push(
            match c.gender {
                Gender::Male => "1",
                Gender::Female => "2",
                Gender::Transgender => "3",
            }
            .to_string(),
        );
        rec.push(String::new()); // DOB
        rec.push(birth_cat_code(c.category).to_string());
        rec.push(yes_no(c.category.is_pwd()).to_string());
        rec.push(
            match c.nationality {
                Nationality::Indian => "1",
                Nationality::Oci => "2",
                Nationality::Pio => "3",
                Nationality::Foreign => "4",
            }
            .to_string(),
        );
        for list in RANK_COLUMN_LISTS {
            rec.push(rank_cell(c.ranks.main_eng.get(list)));
        }
        rec.push(c.remark_eng.as_char().to_string());
        for list in RANK_COLUMN_LISTS {
            rec.push(rank_cell(c.ranks.main_arch.get(list)));
        }
        rec.push(c.remark_arch.as_char().to_string());
        rec.extend([String::new(), String::new()]); // Adv_RollNo, Adv_RegNo
        for list in RANK_COLUMN_LISTS {
            rec.push(rank_cell(c.ranks.advanced.get(list)));
        }
        rec.push(c.remark_adv.as_char().to_string());
        rec.push(yes_no(c.prep_eligible).to_string());
        for off in 0..6 {
            rec.push(rank_cell(c.ranks.preparatory[off]));
        }
        rec.push(yes_no(c.aat_qualified).to_string());
        rec.push(yes_no(c.ds_flag).to_string());
        rec.push(yes_no(c.color_blind).to_string());
        rec.push(yes_no(c.one_eyed).to_string());
        rec.extend(std::iter::repeat(String::new()).take(9)); // Top-20 and board columns
        rec.push((c.cat_change as u8).to_string());
        rec.push(c.decision.map(|d| d.code().to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Choice lists.
// ---------------------------------------------------------------------------

pub const CHOICE_HEADER: [&str; 5] = ["RollNo", "OptNo", "InstCd", "BrCd", "Validity"];

/// Parses choice rows grouped per roll number, preserving option order.
/// Option numbers per candidate must be 1..n without gaps or duplicates.
pub fn parse_choices(input: impl io::Read) -> Result<BTreeMap<String, Vec<ChoiceRow>>, TableError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &CHOICE_HEADER, "choice list")?;
    let mut out: BTreeMap<String, Vec<ChoiceRow>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let row = Row { rec: &rec, line };
        let roll_no = row.fixed(0, 8, "RollNo")?.to_string();
        let opt_no = row.int(1, "OptNo")?;
        if opt_no == 0 {
            return Err(malformed(line, "OptNo must be positive"));
        }
        let inst_cd = row.fixed(2, 3, "InstCd")?.to_string();
        let br_cd = row.fixed(3, 4, "BrCd")?.to_string();
        let valid = match row.get(4)? {
            "" => true,
            "N" => false,
            other => return Err(malformed(line, format!("Validity must be blank or N, got {other:?}"))),
        };
        let list = out.entry(roll_no.clone()).or_default();
        if opt_no as usize != list.len() + 1 {
            return Err(malformed(line, "OptNo values must be consecutive from 1 per candidate"));
        }
        list.push(ChoiceRow { roll_no, opt_no, inst_cd, br_cd, valid });
    }
    Ok(out)
}

pub fn emit_choices(
    rows: &BTreeMap<String, Vec<ChoiceRow>>,
    out: impl io::Write,
) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(CHOICE_HEADER)?;
    for list in rows.values() {
        for ch in list {
            w.write_record([
                ch.roll_no.as_str(),
                &ch.opt_no.to_string(),
                &ch.inst_cd,
                &ch.br_cd,
                if ch.valid { "" } else { "N" },
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Allotment table (14 columns; the allocator itself emits the first 12,
// the reporting columns default to N / RP).
// ---------------------------------------------------------------------------

pub const ALLOTMENT_HEADER: [&str; 14] = [
    "RoundNo", "RollNo", "Birth_Cat", "Optno", "InstCd", "BrCd", "Rank", "AllottedCat",
    "AllottedQuota", "GenderPool", "Flag", "SupNumReason", "Withdraw", "RStatus",
];

fn parse_effective_rank(v: &str, line: u64) -> Result<EffectiveRank, TableError> {
    let (body, tier) = match v.strip_suffix('P') {
        Some(b) => (b, Tier::Preparatory),
        None => (v, Tier::Standard),
    };
    let rank = Rank::parse(body)
        .ok_or_else(|| malformed(line, format!("Rank must be a positive decimal, got {v:?}")))?;
    Ok(EffectiveRank { tier, rank })
}

pub fn parse_allotment(input: impl io::Read) -> Result<Vec<AllotmentRow>, TableError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &ALLOTMENT_HEADER, "allotment table")?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let row = Row { rec: &rec, line };
        out.push(AllotmentRow {
            round_no: row.int(0, "RoundNo")?,
            roll_no: row.fixed(1, 8, "RollNo")?.to_string(),
            birth_cat: row.fixed(2, 2, "Birth_Cat")?.to_string(),
            opt_no: row.int(3, "Optno")?,
            inst_cd: row.fixed(4, 3, "InstCd")?.to_string(),
            br_cd: row.fixed(5, 4, "BrCd")?.to_string(),
            rank: parse_effective_rank(row.get(6)?, line)?,
            allotted_cat: row.fixed(7, 4, "AllottedCat")?.to_string(),
            allotted_quota: Quota::from_code(row.get(8)?)
                .ok_or_else(|| malformed(line, "unknown quota code"))?,
            gender_pool: GenderPool::from_code(row.get(9)?)
                .ok_or_else(|| malformed(line, "GenderPool must be Neutral or Female"))?,
            flag: SeatFlag::from_code(row.get(10)?)
                .ok_or_else(|| malformed(line, "Flag must be N, D, F or P"))?,
            supnum_reason: SupnumReason::from_code(row.get(11)?)
                .ok_or_else(|| malformed(line, "unknown SupNumReason code"))?,
            withdraw: match row.get(12)? {
                "Y" => true,
                "N" => false,
                other => return Err(malformed(line, format!("Withdraw must be Y or N, got {other:?}"))),
            },
            rstatus: RStatus::from_code(row.get(13)?)
                .ok_or_else(|| malformed(line, "unknown RStatus code"))?,
        });
    }
    Ok(out)
}

pub fn emit_allotment(rows: &[AllotmentRow], out: impl io::Write) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(ALLOTMENT_HEADER)?;
    for r in rows {
        w.write_record([
            r.round_no.to_string().as_str(),
            &r.roll_no,
            &r.birth_cat,
            &r.opt_no.to_string(),
            &r.inst_cd,
            &r.br_cd,
            &r.rank.to_string(),
            &r.allotted_cat,
            r.allotted_quota.code(),
            r.gender_pool.code(),
            r.flag.code(),
            r.supnum_reason.code(),
            if r.withdraw { "Y" } else { "N" },
            r.rstatus.code(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Program statistics (14 columns).
// ---------------------------------------------------------------------------

pub const STATS_HEADER: [&str; 15] = [
    "Quota", "InstCd", "BrCd", "VCategory", "GenderPool", "ForeignPool", "OpeningRank",
    "ClosingRank", "MinCutOff", "TotalAllotted", "InitCap", "NewCap", "DeReserveFrom",
    "DeReserveTo", "SuperNum",
];

fn min_cutoff_cell(c: MinCutoff) -> String {
    match c {
        Some(r) => r.to_string(),
        None => "0".to_string(),
    }
}

fn parse_min_cutoff_cell(v: &str, line: u64) -> Result<MinCutoff, TableError> {
    if v == "0" {
        Ok(None)
    } else {
        parse_effective_rank(v, line).map(Some)
    }
}

fn parse_vcategory(v: &str, line: u64) -> Result<VCategory, TableError> {
    VCategory::from_code(v).ok_or_else(|| malformed(line, format!("unknown VCategory {v:?}")))
}

pub fn parse_program_stats(input: impl io::Read) -> Result<Vec<ProgramStats>, TableError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &STATS_HEADER, "program statistics")?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let row = Row { rec: &rec, line };
        let opening = {
            let v = row.get(6)?;
            if v.is_empty() { None } else { Some(parse_effective_rank(v, line)?) }
        };
        let closing = {
            let v = row.get(7)?;
            if v.is_empty() { None } else { Some(parse_effective_rank(v, line)?) }
        };
        out.push(ProgramStats {
            quota: Quota::from_code(row.get(0)?)
                .ok_or_else(|| malformed(line, "unknown quota code"))?,
            inst_cd: row.fixed(1, 3, "InstCd")?.to_string(),
            br_cd: row.fixed(2, 4, "BrCd")?.to_string(),
            vcategory: parse_vcategory(row.get(3)?, line)?,
            gender_pool: GenderPool::from_code(row.get(4)?)
                .ok_or_else(|| malformed(line, "GenderPool must be Neutral or Female"))?,
            foreign_pool: match row.get(5)? {
                "Y" => true,
                "N" => false,
                other => return Err(malformed(line, format!("ForeignPool must be Y or N, got {other:?}"))),
            },
            opening_rank: opening,
            closing_rank: closing,
            min_cutoff: parse_min_cutoff_cell(row.get(8)?, line)?,
            total_allotted: row.int(9, "TotalAllotted")?,
            init_cap: row.int(10, "InitCap")?,
            new_cap: row.int(11, "NewCap")?,
            dereserve_from: row.int(12, "DeReserveFrom")?,
            dereserve_to: row.int(13, "DeReserveTo")?,
            supernum: row.int(14, "SuperNum")?,
        });
    }
    Ok(out)
}

pub fn emit_program_stats(rows: &[ProgramStats], out: impl io::Write) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(STATS_HEADER)?;
    for r in rows {
        w.write_record([
            r.quota.code(),
            &r.inst_cd,
            &r.br_cd,
            r.vcategory.code(),
            r.gender_pool.code(),
            if r.foreign_pool { "Y" } else { "N" },
            &r.opening_rank.map(|x| x.to_string()).unwrap_or_default(),
            &r.closing_rank.map(|x| x.to_string()).unwrap_or_default(),
            &min_cutoff_cell(r.min_cutoff),
            &r.total_allotted.to_string(),
            &r.init_cap.to_string(),
            &r.new_cap.to_string(),
            &r.dereserve_from.to_string(),
            &r.dereserve_to.to_string(),
            &r.supernum.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Min-cutoff table: one row per virtual program. 0 means "no guarantee".
// ---------------------------------------------------------------------------

pub const MIN_CUTOFF_HEADER: [&str; 7] =
    ["Quota", "InstCd", "BrCd", "VCategory", "GenderPool", "ForeignPool", "MinCutOff"];

pub fn parse_min_cutoffs(
    input: impl io::Read,
) -> Result<BTreeMap<VirtualProgramId, MinCutoff>, TableError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &MIN_CUTOFF_HEADER, "min-cutoff table")?;
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let row = Row { rec: &rec, line };
        let id = VirtualProgramId {
            quota: Quota::from_code(row.get(0)?)
                .ok_or_else(|| malformed(line, "unknown quota code"))?,
            institute: row.fixed(1, 3, "InstCd")?.to_string(),
            branch: row.fixed(2, 4, "BrCd")?.to_string(),
            category: parse_vcategory(row.get(3)?, line)?,
            pool: GenderPool::from_code(row.get(4)?)
                .ok_or_else(|| malformed(line, "GenderPool must be Neutral or Female"))?,
            foreign_pool: match row.get(5)? {
                "Y" => true,
                "N" => false,
                other => return Err(malformed(line, format!("ForeignPool must be Y or N, got {other:?}"))),
            },
        };
        let cutoff = parse_min_cutoff_cell(row.get(6)?, line)?;
        if out.insert(id, cutoff).is_some() {
            return Err(TableError::DuplicateKey { line });
        }
    }
    Ok(out)
}

pub fn emit_min_cutoffs(
    rows: &BTreeMap<VirtualProgramId, MinCutoff>,
    out: impl io::Write,
) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(MIN_CUTOFF_HEADER)?;
    for (id, cutoff) in rows {
        w.write_record([
            id.quota.code(),
            &id.institute,
            &id.branch,
            id.category.code(),
            id.pool.code(),
            if id.foreign_pool { "Y" } else { "N" },
            &min_cutoff_cell(*cutoff),
        ])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Institute profile file (project-specific): institute kind, preparatory
// course availability, DS capacity, and home states.
// ---------------------------------------------------------------------------

pub const PROFILE_HEADER: [&str; 5] = ["InstCd", "Kind", "HasPrep", "DsCapacity", "HomeStates"];

pub fn parse_profiles(
    input: impl io::Read,
) -> Result<BTreeMap<String, InstituteProfile>, TableError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &PROFILE_HEADER, "institute profiles")?;
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let row = Row { rec: &rec, line };
        let inst_cd = row.fixed(0, 3, "InstCd")?.to_string();
        let kind = InstituteKind::from_code(row.get(1)?)
            .ok_or_else(|| malformed(line, "unknown institute kind"))?;
        let has_pc = match row.get(2)? {
            "Y" => true,
            "N" => false,
            other => return Err(malformed(line, format!("HasPrep must be Y or N, got {other:?}"))),
        };
        let ds_capacity = row.int(3, "DsCapacity")?;
        let home_states: Vec<String> = row
            .get(4)?
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| s.to_string())
            .collect();
        if out
            .insert(
                inst_cd.clone(),
                InstituteProfile { inst_cd, kind, has_pc, home_states, ds_capacity },
            )
            .is_some()
        {
            return Err(TableError::DuplicateKey { line });
        }
    }
    Ok(out)
}

pub fn emit_profiles(
    rows: &BTreeMap<String, InstituteProfile>,
    out: impl io::Write,
) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(PROFILE_HEADER)?;
    for p in rows.values() {
        w.write_record([
            p.inst_cd.as_str(),
            p.kind.code(),
            if p.has_pc { "Y" } else { "N" },
            &p.ds_capacity.to_string(),
            &p.home_states.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Foreign seat matrix (per IIT program capacity for international
// candidates).
// ---------------------------------------------------------------------------

pub const FOREIGN_HEADER: [&str; 3] = ["InstCd", "BrCd", "Capacity"];

pub fn parse_foreign_matrix(input: impl io::Read) -> Result<Vec<ForeignSeatEntry>, TableError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &FOREIGN_HEADER, "foreign seat matrix")?;
    let mut out = Vec::new();
    let mut seen = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let row = Row { rec: &rec, line };
        let inst_cd = row.fixed(0, 3, "InstCd")?.to_string();
        let br_cd = row.fixed(1, 4, "BrCd")?.to_string();
        if seen.insert((inst_cd.clone(), br_cd.clone()), line).is_some() {
            return Err(TableError::DuplicateKey { line });
        }
        out.push(ForeignSeatEntry { inst_cd, br_cd, capacity: row.int(2, "Capacity")? });
    }
    Ok(out)
}

pub fn emit_foreign_matrix(
    rows: &[ForeignSeatEntry],
    out: impl io::Write,
) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(FOREIGN_HEADER)?;
    for r in rows {
        w.write_record([r.inst_cd.as_str(), &r.br_cd, &r.capacity.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Female baseline file: prior-year capacity and female admits per seat
// cell, used to split single-pool matrices into Female/Neutral pools.
// ---------------------------------------------------------------------------

pub const BASELINE_HEADER: [&str; 6] =
    ["Quota", "InstCd", "BrCd", "Cell", "PriorCapacity", "PriorFemale"];

pub fn parse_female_baseline(input: impl io::Read) -> Result<FemaleBaseline, TableError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &BASELINE_HEADER, "female baseline")?;
    let mut out = FemaleBaseline::default();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let row = Row { rec: &rec, line };
        let quota = Quota::from_code(row.get(0)?)
            .ok_or_else(|| malformed(line, "unknown quota code"))?;
        let inst_cd = row.fixed(1, 3, "InstCd")?.to_string();
        let br_cd = row.fixed(2, 4, "BrCd")?.to_string();
        let cell = CategoryTag::from_cell_code(row.get(3)?)
            .ok_or_else(|| malformed(line, "unknown category cell code"))?;
        let prior_capacity = row.int(4, "PriorCapacity")?;
        let prior_female = row.int(5, "PriorFemale")?;
        if out
            .cells
            .insert((quota, inst_cd, br_cd, cell), BaselineCell { prior_capacity, prior_female })
            .is_some()
        {
            return Err(TableError::DuplicateKey { line });
        }
    }
    Ok(out)
}

/// Parses a female seat target written as `NUM/DEN`, e.g. `17/100`.
pub fn parse_ratio(s: &str) -> Option<Ratio> {
    let (num, den) = s.split_once('/')?;
    let num: u64 = num.parse().ok()?;
    let den: u64 = den.parse().ok()?;
    if den == 0 || num >= den {
        return None;
    }
    Some(Ratio { num, den })
}
