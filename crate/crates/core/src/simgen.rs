//! Seeded synthetic instance generation for property tests, plus the
//! joint-versus-separate allocation experiment.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    CatChange, CandidateRecord, CategoryTag, ChoiceRow, Gender, GenderPool, Nationality, Quota,
    Rank, RankVector, RemarkSymbol, StandardList,
};
use crate::run_pipeline::{allocate_round, DsRule, RoundInstance};
use crate::virtualization::{
    build_virtual_programs, ForeignSeatEntry, InstituteKind, InstituteProfile, SeatMatrixEntry,
};

/// Generation knobs. Defaults give a mixed corpus exercising every
/// institute kind and category.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub n_candidates: usize,
    pub n_institutes: usize,
    pub branches_per_institute: usize,
    pub min_choices: usize,
    pub max_choices: usize,
    /// Probability that consecutive rank-list entries share a rank.
    pub tie_rate: f64,
    pub female_fraction: f64,
    pub ds_fraction: f64,
    pub foreign_fraction: f64,
    pub pc_fraction: f64,
    pub iit_fraction: f64,
    pub max_cell_capacity: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_candidates: 50,
            n_institutes: 4,
            branches_per_institute: 2,
            min_choices: 1,
            max_choices: 6,
            tie_rate: 0.05,
            female_fraction: 0.3,
            ds_fraction: 0.02,
            foreign_fraction: 0.02,
            pc_fraction: 0.05,
            iit_fraction: 0.5,
            max_cell_capacity: 3,
        }
    }
}

/// A generated input set, kept in raw-table form so it can be written
/// to files or turned into a [`RoundInstance`].
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub profiles: BTreeMap<String, InstituteProfile>,
    pub seat_matrix: Vec<SeatMatrixEntry>,
    pub foreign_matrix: Vec<ForeignSeatEntry>,
    pub candidates: Vec<CandidateRecord>,
    pub choices: Vec<Vec<ChoiceRow>>,
}

impl GeneratedInstance {
    pub fn to_round_instance(&self) -> RoundInstance {
        let table =
            build_virtual_programs(&self.seat_matrix, &self.foreign_matrix, &self.profiles, None)
                .expect("generated tables are structurally valid");
        RoundInstance {
            candidates: self.candidates.clone(),
            choices: self.choices.clone(),
            profiles: self.profiles.clone(),
            table,
        }
    }
}

const STATES: [&str; 8] = ["AP", "DL", "GJ", "KA", "MH", "TN", "UP", "WB"];

fn pick_category(rng: &mut ChaCha8Rng) -> CategoryTag {
    let roll: f64 = rng.gen();
    if roll < 0.42 {
        CategoryTag::Open
    } else if roll < 0.45 {
        CategoryTag::OpenPwd
    } else if roll < 0.68 {
        CategoryTag::ObcNcl
    } else if roll < 0.70 {
        CategoryTag::ObcNclPwd
    } else if roll < 0.84 {
        CategoryTag::Sc
    } else if roll < 0.86 {
        CategoryTag::ScPwd
    } else if roll < 0.98 {
        CategoryTag::St
    } else {
        CategoryTag::StPwd
    }
}

/// Assigns ranks 1..n (with controlled ties) to a subset of candidates
/// for one rank list, ordered by a fresh shuffle.
fn assign_ranks(
    rng: &mut ChaCha8Rng,
    members: &[usize],
    tie_rate: f64,
) -> Vec<(usize, Rank)> {
    let mut order = members.to_vec();
    order.shuffle(rng);
    let mut out = Vec::with_capacity(order.len());
    let mut rank = 0u64;
    for (i, &x) in order.iter().enumerate() {
        if i == 0 || rng.gen::<f64>() >= tie_rate {
            rank += 1;
        }
        out.push((x, Rank::from_integer(rank)));
    }
    out
}

/// Deterministically generates a full input set from a seed.
pub fn generate_instance(seed: u64, config: &GenConfig) -> GeneratedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Institutes.
    let mut profiles = BTreeMap::new();
    let mut inst_codes = Vec::new();
    for i in 0..config.n_institutes {
        let code = format!("{:03}", 101 + i);
        let kind = if (i as f64) < config.iit_fraction * config.n_institutes as f64 {
            InstituteKind::Iit
        } else {
            match i % 3 {
                0 => InstituteKind::Nit,
                1 => InstituteKind::GftiAi,
                _ => InstituteKind::GftiHsAi,
            }
        };
        let home_states = if kind == InstituteKind::Iit || kind == InstituteKind::GftiAi {
            vec![]
        } else {
            vec![STATES[rng.gen_range(0..STATES.len())].to_string()]
        };
        profiles.insert(
            code.clone(),
            InstituteProfile {
                inst_cd: code.clone(),
                kind,
                has_pc: kind == InstituteKind::Iit,
                home_states,
                ds_capacity: if kind == InstituteKind::Iit { 2 } else { 0 },
            },
        );
        inst_codes.push(code);
    }

    // Seat matrix: both pools generated directly.
    let mut seat_matrix = Vec::new();
    let mut foreign_matrix = Vec::new();
    let mut programs_catalog: Vec<(String, String)> = Vec::new();
    for code in &inst_codes {
        let profile = &profiles[code];
        for b in 0..config.branches_per_institute {
            let br = format!("41{:02}", b + 1);
            programs_catalog.push((code.clone(), br.clone()));
            let quotas: Vec<Quota> = match profile.kind {
                InstituteKind::Iit | InstituteKind::GftiAi => vec![Quota::AllIndia],
                InstituteKind::Nit | InstituteKind::GftiHsOs => {
                    vec![Quota::HomeState, Quota::OtherState]
                }
                InstituteKind::GftiHsAi => vec![Quota::AllIndia, Quota::HomeState],
            };
            for quota in quotas {
                let mut neutral = [0u32; 8];
                let mut female = [0u32; 8];
                for i in 0..8 {
                    let scale = if i == 0 { config.max_cell_capacity } else { 2 };
                    neutral[i] = rng.gen_range(0..=scale);
                    female[i] = rng.gen_range(0..=1);
                }
                let states = profile.home_states.clone();
                seat_matrix.push(SeatMatrixEntry {
                    quota,
                    inst_cd: code.clone(),
                    br_cd: br.clone(),
                    gender_pool: GenderPool::GenderNeutral,
                    cells: neutral,
                    state_codes: states.clone(),
                });
                seat_matrix.push(SeatMatrixEntry {
                    quota,
                    inst_cd: code.clone(),
                    br_cd: br.clone(),
                    gender_pool: GenderPool::FemaleOnly,
                    cells: female,
                    state_codes: states,
                });
            }
            if profile.kind == InstituteKind::Iit && rng.gen_bool(0.5) {
                foreign_matrix.push(ForeignSeatEntry {
                    inst_cd: code.clone(),
                    br_cd: br.clone(),
                    capacity: rng.gen_range(1..=2),
                });
            }
        }
    }

    // Candidates.
    let mut candidates = Vec::new();
    for i in 0..config.n_candidates {
        let category = pick_category(&mut rng);
        let gender = if rng.gen_bool(config.female_fraction) {
            Gender::Female
        } else {
            Gender::Male
        };
        let nationality = if rng.gen_bool(config.foreign_fraction) {
            Nationality::Foreign
        } else {
            Nationality::Indian
        };
        let prep = nationality == Nationality::Indian
            && crate::model::preparatory_list_for_cell(category).is_some()
            && rng.gen_bool(config.pc_fraction);
        candidates.push(CandidateRecord {
            roll_no: format!("{:08}", 10_000_000 + i),
            name: format!("C{i}"),
            state_code: STATES[rng.gen_range(0..STATES.len())].to_string(),
            gender,
            category,
            nationality,
            ds_flag: nationality == Nationality::Indian && rng.gen_bool(config.ds_fraction),
            prep_eligible: prep,
            ranks: RankVector::default(),
            remark_eng: RemarkSymbol::NotEligible,
            remark_arch: RemarkSymbol::NotEligible,
            remark_adv: RemarkSymbol::NotEligible,
            cat_change: CatChange::NoChange,
            decision: None,
            aat_qualified: false,
            color_blind: false,
            one_eyed: false,
        });
    }

    // Rank lists per family. Preparatory-only candidates get only PC
    // ranks and the matching remark; everyone else gets a CRL rank plus
    // their category lists.
    let indian: Vec<usize> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.nationality == Nationality::Indian)
        .map(|(i, _)| i)
        .collect();
    let foreigners: Vec<usize> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.nationality != Nationality::Indian)
        .map(|(i, _)| i)
        .collect();
    for family in [crate::model::ExamFamily::MainEng, crate::model::ExamFamily::Advanced] {
        let standard: Vec<usize> = indian
            .iter()
            .copied()
            .filter(|&x| !candidates[x].prep_eligible)
            .collect();
        // CRL over everyone with standard eligibility.
        for (x, rank) in assign_ranks(&mut rng, &standard, config.tie_rate) {
            candidates[x].ranks.family_mut(family).set(StandardList::Crl, rank);
        }
        // Category and PwD lists over their members.
        let lists: [(StandardList, fn(CategoryTag) -> bool); 7] = [
            (StandardList::ObcNcl, |t| t.base() == CategoryTag::ObcNcl),
            (StandardList::Sc, |t| t.base() == CategoryTag::Sc),
            (StandardList::St, |t| t.base() == CategoryTag::St),
            (StandardList::CrlPwd, |t| t.is_pwd()),
            (StandardList::ObcNclPwd, |t| t == CategoryTag::ObcNclPwd),
            (StandardList::ScPwd, |t| t == CategoryTag::ScPwd),
            (StandardList::StPwd, |t| t == CategoryTag::StPwd),
        ];
        for (list, member) in lists {
            let members: Vec<usize> = standard
                .iter()
                .copied()
                .filter(|&x| member(candidates[x].category))
                .collect();
            for (x, rank) in assign_ranks(&mut rng, &members, config.tie_rate) {
                candidates[x].ranks.family_mut(family).set(list, rank);
            }
        }
        for &x in &standard {
            match family {
                crate::model::ExamFamily::MainEng => candidates[x].remark_eng = RemarkSymbol::Crl,
                crate::model::ExamFamily::Advanced => candidates[x].remark_adv = RemarkSymbol::Crl,
                crate::model::ExamFamily::MainArch => {}
            }
        }
    }
    // Foreign candidates hold advanced CRL ranks after the Indian tail.
    let base = config.n_candidates as u64 * 2;
    for (i, &x) in foreigners.iter().enumerate() {
        candidates[x]
            .ranks
            .advanced
            .set(StandardList::Crl, Rank::from_integer(base + i as u64 + 1));
        candidates[x].remark_adv = RemarkSymbol::Crl;
    }
    // Preparatory candidates.
    let prep_members: Vec<usize> = indian
        .iter()
        .copied()
        .filter(|&x| candidates[x].prep_eligible)
        .collect();
    let mut by_list: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &x in &prep_members {
        if let Some(list) = crate::model::preparatory_list_for_cell(candidates[x].category) {
            by_list.entry(list as usize).or_default().push(x);
        }
    }
    for (list, members) in by_list {
        for (x, rank) in assign_ranks(&mut rng, &members, config.tie_rate) {
            candidates[x].ranks.preparatory[list] = Some(rank);
            candidates[x].remark_adv = RemarkSymbol::Preparatory;
        }
    }

    // Choice lists: distinct programs, random length.
    let mut choices = Vec::with_capacity(candidates.len());
    for c in &candidates {
        let hi = config.max_choices.min(programs_catalog.len());
        let len = rng.gen_range(config.min_choices.clamp(1, hi)..=hi);
        let picks = rand::seq::index::sample(&mut rng, programs_catalog.len(), len);
        let mut list = Vec::with_capacity(len);
        for (opt, pick) in picks.into_iter().enumerate() {
            let (inst, br) = &programs_catalog[pick];
            list.push(ChoiceRow {
                roll_no: c.roll_no.clone(),
                opt_no: opt as u32 + 1,
                inst_cd: inst.clone(),
                br_cd: br.clone(),
                valid: true,
            });
        }
        choices.push(list);
    }

    GeneratedInstance { profiles, seat_matrix, foreign_matrix, candidates, choices }
}

/// Outcome metrics of the joint-versus-separate comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CounterfactualMetrics {
    /// Candidates who would hold both an IIT and a non-IIT seat under
    /// separate allocation — each a presumed IIT vacancy.
    pub iit_vacancies_saved: u32,
    /// Candidates strictly better off under the joint allocation.
    pub candidates_benefited: u32,
}

/// Simulates running the IIT pool and the non-IIT pool as two separate
/// allocations and compares against the joint run.
///
/// In the separate world a candidate first receives their IIT outcome,
/// then applies to the non-IIT programs they listed above it. Candidates
/// ending up with seats in both pools mark a presumed IIT vacancy;
/// candidates whose joint seat sits strictly higher in their raw list
/// than the better of their two separate seats are counted as
/// benefited.
pub fn counterfactual_separate(instance: &GeneratedInstance) -> CounterfactualMetrics {
    let joint = instance.to_round_instance();
    let joint_result =
        allocate_round(1, &joint, DsRule::Supernumerary2016, false).expect("joint run terminates");
    let joint_opt: BTreeMap<&str, u32> = joint_result
        .allotment
        .iter()
        .map(|r| (r.roll_no.as_str(), r.opt_no))
        .collect();

    let is_iit = |inst: &str| -> bool {
        instance
            .profiles
            .get(inst)
            .map(|p| p.kind == InstituteKind::Iit)
            .unwrap_or(false)
    };

    // IIT-only world.
    let mut iit_world = instance.clone();
    iit_world.profiles.retain(|_, p| p.kind == InstituteKind::Iit);
    iit_world.seat_matrix.retain(|r| is_iit(&r.inst_cd));
    for list in &mut iit_world.choices {
        list.retain(|ch| is_iit(&ch.inst_cd));
    }
    let iit_result = allocate_round(1, &iit_world.to_round_instance(), DsRule::Supernumerary2016, false)
        .expect("iit run terminates");
    let iit_opt: BTreeMap<&str, u32> = iit_result
        .allotment
        .iter()
        .map(|r| (r.roll_no.as_str(), r.opt_no))
        .collect();

    // Non-IIT world, restricted to choices above the IIT outcome.
    let mut rest_world = instance.clone();
    rest_world.profiles.retain(|_, p| p.kind != InstituteKind::Iit);
    rest_world.seat_matrix.retain(|r| !is_iit(&r.inst_cd));
    rest_world.foreign_matrix.clear();
    for (c, list) in rest_world.candidates.iter().zip(&mut rest_world.choices) {
        let bound = iit_opt.get(c.roll_no.as_str()).copied().unwrap_or(u32::MAX);
        list.retain(|ch| !is_iit(&ch.inst_cd) && ch.opt_no < bound);
    }
    let rest_result = allocate_round(1, &rest_world.to_round_instance(), DsRule::Supernumerary2016, false)
        .expect("non-iit run terminates");
    let rest_opt: BTreeMap<&str, u32> = rest_result
        .allotment
        .iter()
        .map(|r| (r.roll_no.as_str(), r.opt_no))
        .collect();

    let mut metrics = CounterfactualMetrics::default();
    for c in &instance.candidates {
        let roll = c.roll_no.as_str();
        let iit = iit_opt.get(roll).copied();
        let rest = rest_opt.get(roll).copied();
        if iit.is_some() && rest.is_some() {
            metrics.iit_vacancies_saved += 1;
        }
        let separate_best = match (iit, rest) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => u32::MAX,
        };
        let joint_best = joint_opt.get(roll).copied().unwrap_or(u32::MAX);
        if joint_best < separate_best {
            metrics.candidates_benefited += 1;
        }
    }
    metrics
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = generate_instance(1, &GenConfig::default());
        let b = generate_instance(1, &GenConfig::default());
        assert_eq!(a.candidates, b.candidates);
        assert_eq!(a.choices, b.choices);
        assert_eq!(a.seat_matrix, b.seat_matrix);
        let c = generate_instance(2, &GenConfig::default());
        assert!(a.candidates != c.candidates || a.choices != c.choices);
    }

    #[test]
    fn zero_tie_rate_produces_no_ties() {
        let config = GenConfig { tie_rate: 0.0, n_candidates: 80, ..GenConfig::default() };
        let inst = generate_instance(3, &config);
        for family in [crate::model::ExamFamily::MainEng, crate::model::ExamFamily::Advanced] {
            for list in 0..8u8 {
                let mut seen = alloc::collections::BTreeSet::new();
                for c in &inst.candidates {
                    if let Some(r) = c.ranks.family(family).0[list as usize] {
                        assert!(seen.insert(r), "duplicate rank in a tie-free list");
                    }
                }
            }
        }
    }

    #[test]
    fn seat_matrix_totals_are_consistent() {
        let inst = generate_instance(4, &GenConfig::default());
        for row in &inst.seat_matrix {
            assert_eq!(row.total(), row.cells.iter().sum::<u32>());
        }
    }

    #[test]
    fn generated_instances_allocate_cleanly() {
        for seed in 0..5 {
            let inst = generate_instance(seed, &GenConfig::default());
            let round = inst.to_round_instance();
            let result = allocate_round(1, &round, DsRule::Supernumerary2016, false).unwrap();
            let findings = crate::validation::validate_all(&round, &result.allotment, &result.stats);
            assert!(findings.is_empty(), "seed {seed}: {findings:?}");
        }
    }

    #[test]
    fn counterfactual_zero_when_pools_disjoint() {
        // Remove every cross-pool listing: keep only IIT choices.
        let mut inst = generate_instance(5, &GenConfig::default());
        let iit: Vec<String> = inst
            .profiles
            .values()
            .filter(|p| p.kind == InstituteKind::Iit)
            .map(|p| p.inst_cd.clone())
            .collect();
        for list in &mut inst.choices {
            list.retain(|ch| iit.contains(&ch.inst_cd));
        }
        let m = counterfactual_separate(&inst);
        assert_eq!(m.iit_vacancies_saved, 0);
        assert_eq!(m.candidates_benefited, 0);
    }

    #[test]
    fn counterfactual_is_deterministic() {
        let inst = generate_instance(6, &GenConfig::default());
        assert_eq!(counterfactual_separate(&inst), counterfactual_separate(&inst));
    }

    /// A candidate who prefers a non-IIT seat they can only win jointly:
    /// under separate allocation they take the IIT seat and the non-IIT
    /// seat they'd rather have goes begging to nobody, while the IIT
    /// seat they abandon becomes a vacancy.
    #[test]
    fn crossover_candidate_counted() {
        let mut inst = generate_instance(7, &GenConfig::default());
        // Make candidate 0 a strong candidate listing a non-IIT program
        // first and an IIT program second.
        let iit: Vec<String> = inst
            .profiles
            .values()
            .filter(|p| p.kind == InstituteKind::Iit)
            .map(|p| p.inst_cd.clone())
            .collect();
        let non_iit = inst
            .profiles
            .values()
            .find(|p| p.kind != InstituteKind::Iit)
            .unwrap()
            .inst_cd
            .clone();
        let roll = inst.candidates[0].roll_no.clone();
        inst.candidates[0].nationality = Nationality::Indian;
        inst.candidates[0].remark_eng = RemarkSymbol::Crl;
        inst.candidates[0].remark_adv = RemarkSymbol::Crl;
        inst.candidates[0].ranks.main_eng.set(StandardList::Crl, Rank::parse("0.5").unwrap());
        inst.candidates[0].ranks.advanced.set(StandardList::Crl, Rank::parse("0.5").unwrap());
        inst.choices[0] = vec![
            ChoiceRow {
                roll_no: roll.clone(),
                opt_no: 1,
                inst_cd: non_iit.clone(),
                br_cd: "4101".to_string(),
                valid: true,
            },
            ChoiceRow {
                roll_no: roll.clone(),
                opt_no: 2,
                inst_cd: iit[0].clone(),
                br_cd: "4101".to_string(),
                valid: true,
            },
        ];
        let m = counterfactual_separate(&inst);
        assert!(m.iit_vacancies_saved >= 1);
    }
}
