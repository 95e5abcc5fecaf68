//! Reproduction harness for the principle-compliance matrix of the four
//! audited selectors.
//!
//! Cells expected to hold are exercised on seeded random instances; cells
//! expected to fail are checked against counterexamples frozen as fixture
//! files. Any cell disagreeing with its expected mark is flagged loudly in
//! the report, never suppressed.

use serde::{Deserialize, Serialize};

use crate::error::AuditError;
use crate::runtime::parallel_map;
use crate::selectors::SelectorId;

use super::{check_principle, generate_instances, PrincipleId, PrincipleInstance, Verdict};

/// Expected compliance mark of a (selector, principle) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mark {
    Plus,
    Minus,
}

/// Expected marks, row by row. Dimension independence holds for every
/// audited selector; the remaining columns carry the published marks.
pub fn expected_mark(sel: SelectorId, principle: PrincipleId) -> Mark {
    use PrincipleId::*;
    use SelectorId::*;
    match (sel, principle) {
        (_, DimensionIndependence) => Mark::Plus,
        (_, Relativization) => Mark::Plus,
        (Maxent, _) => Mark::Plus,
        (Centroid | RiCentroid, _) => Mark::Minus,
        (RiMaxent, Obstinacy | StrongIndependence) => Mark::Minus,
        (RiMaxent, WeakIndependence | IrrelevantInformation) => Mark::Plus,
        (Trivial, _) => unreachable!("the trivial selector has no audited row"),
    }
}

/// The four audited rows.
pub const AUDITED_SELECTORS: [SelectorId; 4] = [
    SelectorId::Maxent,
    SelectorId::Centroid,
    SelectorId::RiMaxent,
    SelectorId::RiCentroid,
];

#[derive(Debug, Clone, Serialize)]
pub struct Table1Report {
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<Table1Row>,
    /// Number of cells whose outcome contradicts the expected mark.
    pub contradictions: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub selector: SelectorId,
    pub cells: Vec<Table1Cell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Cell {
    pub principle: PrincipleId,
    pub expected: Mark,
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum CellOutcome {
    /// Every random instance upheld the principle.
    AllHeld { trials: usize, tolerance: f64 },
    /// The shipped counterexample failed as expected; the verdict carries
    /// the re-checkable witness.
    CounterexampleFailed { verdict: Verdict },
    /// The cell disagrees with the expected mark.
    Contradiction { details: String },
}

impl Table1Cell {
    pub fn matches_expectation(&self) -> bool {
        !matches!(self.outcome, CellOutcome::Contradiction { .. })
    }
}

/// Runs the full matrix: `trials` random instances per expected-hold cell,
/// the shipped counterexample per expected-fail cell.
pub fn table1_report(trials: usize, seed: u64) -> Result<Table1Report, AuditError> {
    assert!(trials >= 1, "trials must be at least 1");
    let mut rows = Vec::new();
    let mut contradictions = 0usize;
    for (row_idx, sel) in AUDITED_SELECTORS.into_iter().enumerate() {
        let mut cells = Vec::new();
        for (col_idx, principle) in PrincipleId::ALL.into_iter().enumerate() {
            let expected = expected_mark(sel, principle);
            let outcome = match expected {
                Mark::Plus => run_plus_cell(sel, principle, trials, cell_seed(seed, row_idx, col_idx)),
                Mark::Minus => run_minus_cell(sel, principle),
            };
            if matches!(outcome, CellOutcome::Contradiction { .. }) {
                contradictions += 1;
            }
            cells.push(Table1Cell {
                principle,
                expected,
                outcome,
            });
        }
        rows.push(Table1Row { selector: sel, cells });
    }
    Ok(Table1Report {
        trials,
        seed,
        rows,
        contradictions,
    })
}

fn cell_seed(seed: u64, row: usize, col: usize) -> u64 {
    seed.wrapping_mul(0x0100_0000_01B3).wrapping_add((row * 16 + col) as u64)
}

fn run_plus_cell(sel: SelectorId, principle: PrincipleId, trials: usize, seed: u64) -> CellOutcome {
    let instances = generate_instances(principle, trials, seed);
    let verdicts = parallel_map(instances, |inst| check_principle(sel, &inst));
    let mut tolerance = 0.0f64;
    let mut failures = 0usize;
    let mut errors = 0usize;
    for v in &verdicts {
        match v {
            Ok(v) if v.holds() => tolerance = tolerance.max(v.tolerance),
            Ok(_) => failures += 1,
            Err(_) => errors += 1,
        }
    }
    if failures == 0 && errors == 0 {
        CellOutcome::AllHeld { trials, tolerance }
    } else {
        CellOutcome::Contradiction {
            details: format!(
                "expected all {trials} instances to uphold {principle} for {sel}, got {failures} failures and {errors} errors"
            ),
        }
    }
}

fn run_minus_cell(sel: SelectorId, principle: PrincipleId) -> CellOutcome {
    let Some(instance) = shipped_counterexample(sel, principle) else {
        return CellOutcome::Contradiction {
            details: format!("no shipped counterexample for {sel} x {principle}"),
        };
    };
    match check_principle(sel, &instance) {
        Ok(v) if !v.holds() => CellOutcome::CounterexampleFailed { verdict: v },
        Ok(_) => CellOutcome::Contradiction {
            details: format!("shipped counterexample for {sel} x {principle} unexpectedly holds"),
        },
        Err(e) => CellOutcome::Contradiction {
            details: format!("shipped counterexample for {sel} x {principle} errored: {e}"),
        },
    }
}

/// A counterexample fixture: selector, principle, and the frozen instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CounterexampleFixture {
    selector: SelectorId,
    principle: PrincipleId,
    instance: PrincipleInstance,
}

const COUNTEREXAMPLE_FIXTURES: [&str; 10] = [
    include_str!("../../fixtures/counterexamples/centroid_obstinacy.json"),
    include_str!("../../fixtures/counterexamples/centroid_strong_independence.json"),
    include_str!("../../fixtures/counterexamples/centroid_weak_independence.json"),
    include_str!("../../fixtures/counterexamples/centroid_irrelevant_information.json"),
    include_str!("../../fixtures/counterexamples/ri_maxent_obstinacy.json"),
    include_str!("../../fixtures/counterexamples/ri_maxent_strong_independence.json"),
    include_str!("../../fixtures/counterexamples/ri_centroid_obstinacy.json"),
    include_str!("../../fixtures/counterexamples/ri_centroid_strong_independence.json"),
    include_str!("../../fixtures/counterexamples/ri_centroid_weak_independence.json"),
    include_str!("../../fixtures/counterexamples/ri_centroid_irrelevant_information.json"),
];

/// The frozen counterexample for an expected-fail cell, if one ships.
pub fn shipped_counterexample(sel: SelectorId, principle: PrincipleId) -> Option<PrincipleInstance> {
    COUNTEREXAMPLE_FIXTURES.iter().find_map(|text| {
        let fixture: CounterexampleFixture =
            serde_json::from_str(text).expect("shipped counterexample fixtures parse");
        (fixture.selector == sel && fixture.principle == principle).then_some(fixture.instance)
    })
}
