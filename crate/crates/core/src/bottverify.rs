//! Certificates of Bott non-vanishing.
//!
//! For `U = Λ^q T_X ⊗ O(twist)` the graded pieces of the filtration of
//! `T_X` give a filtration of `U` whose associated graded is a sum of
//! `⊗_j Λ^{q_j} gr_j ⊗ O(twist)`. Borel–Weil–Bott on every Levi irreducible
//! of these pieces fills an E1-page converging to `H^•(X, U)`. The page is
//! a page of G-representations, so each isotypic component can be read on
//! its own:
//!
//! * a representation occurring in one degree only survives to `E∞`;
//! * the Euler characteristic of each isotypic component is preserved, so
//!   `h^1 ≥ −χ − Σ_{odd p ≠ 1} e_1^p` for its multiplicity.
//!
//! Either rule yields a non-zero piece of `H^1` and hence a certificate.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::budget::Budget;
use crate::bwb::{bundle_cohomology_tagged, CohomologyTable};
use crate::error::{Error, Result};
use crate::flag::{
    adjoint_marking, build_flag, composition_tag, FlagVariety, MarkedDiagram, TangentPowers,
};
use crate::repchar::{Character, IrrepMultiset};
use crate::rootsystem::{DynkinType, Series};
use crate::weight::Weight;

/// Graded E1-page of `Λ^q T_X ⊗ O(twist)`.
#[derive(Clone, Debug)]
pub struct E1Page {
    pub q: usize,
    pub twist: Weight,
    /// Levi decomposition of each composition `(q_1, q_2, …)`.
    pub summands: Vec<(Vec<usize>, IrrepMultiset)>,
    pub table: CohomologyTable,
}

impl E1Page {
    pub fn levi_irreducibles(&self) -> usize {
        self.summands.iter().map(|(_, s)| s.len()).sum()
    }
}

/// Builds E1-pages for one variety, caching exterior powers of the graded
/// pieces and their decompositions across calls.
pub struct E1Engine<'a> {
    x: &'a FlagVariety,
    powers: TangentPowers<'a, BigInt>,
    decomps: FxHashMap<(usize, usize), IrrepMultiset>,
}

impl<'a> E1Engine<'a> {
    pub fn new(x: &'a FlagVariety) -> Self {
        E1Engine {
            x,
            powers: TangentPowers::new(x),
            decomps: FxHashMap::default(),
        }
    }

    pub fn variety(&self) -> &FlagVariety {
        self.x
    }

    fn piece_decomposition(
        &mut self,
        j: usize,
        k: usize,
        budget: &Budget,
    ) -> Result<IrrepMultiset> {
        if let Some(d) = self.decomps.get(&(j, k)) {
            return Ok(d.clone());
        }
        let d = self
            .powers
            .power(j, k, budget)?
            .decompose_with_budget(budget)?;
        self.decomps.insert((j, k), d.clone());
        Ok(d)
    }

    /// Decomposition of `⊗_j Λ^{q_j} gr_j ⊗ O(twist)`.
    ///
    /// Factors with `q_j ∈ {0, dim gr_j}` are line bundles; when at most one
    /// factor is not, the cached decomposition of that factor is shifted.
    pub fn composition_decomposition(
        &mut self,
        composition: &[usize],
        twist: &Weight,
        budget: &Budget,
    ) -> Result<IrrepMultiset> {
        self.x.check_twist(twist)?;
        let dims = self.x.piece_dims();
        let mut line = twist.clone();
        let mut heavy = Vec::new();
        for (j, &k) in composition.iter().enumerate() {
            if k == dims[j] {
                for w in self.x.piece_weights(j + 1) {
                    line += w;
                }
            } else if k > 0 {
                heavy.push((j + 1, k));
            }
        }
        match heavy.as_slice() {
            [] => IrrepMultiset::from_entries(self.x.levi(), [(line, BigInt::one())]),
            [(j, k)] => self.piece_decomposition(*j, *k, budget)?.shift(&line),
            _ => {
                let mut acc = Character::line(self.x.levi(), line);
                for &(j, k) in &heavy {
                    let p = self.powers.power(j, k, budget)?.clone();
                    acc = acc.tensor_with_budget(&p, budget)?;
                }
                acc.decompose_with_budget(budget)
            }
        }
    }

    pub fn page(&mut self, q: usize, twist: &Weight, budget: &Budget) -> Result<E1Page> {
        if q > self.x.dim() {
            return Err(Error::DegreeTooLarge {
                q,
                dim: self.x.dim(),
            });
        }
        let mut summands = Vec::new();
        for c in self.powers.compositions(q) {
            let d = self.composition_decomposition(&c, twist, budget)?;
            summands.push((c, d));
        }
        let tagged: Vec<(String, &IrrepMultiset)> = summands
            .iter()
            .map(|(c, d)| (composition_tag(c), d))
            .collect();
        let table = bundle_cohomology_tagged(self.x, &tagged)?;
        budget.check_time()?;
        Ok(E1Page {
            q,
            twist: twist.clone(),
            summands,
            table,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivalRule {
    /// The representation occupies degree 1 only.
    SingleDegree,
    /// Positive Euler-characteristic bound on the degree-1 multiplicity.
    EulerBound,
}

impl SurvivalRule {
    pub fn name(self) -> &'static str {
        match self {
            SurvivalRule::SingleDegree => "single-degree",
            SurvivalRule::EulerBound => "euler-bound",
        }
    }
}

/// A G-representation certified to occur in `H^1`, with a lower bound on
/// its multiplicity (exact for the single-degree rule).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Survivor {
    pub weight: Weight,
    pub multiplicity: BigInt,
    pub rule: SurvivalRule,
    /// Degrees in which the representation occurs on the E1-page.
    pub degrees: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Certified,
    /// Degree 1 is occupied on E1 but nothing is certified to survive.
    Ambiguous {
        witnesses: Vec<Weight>,
    },
    /// Degree 1 is empty on E1, so `H^1 = 0`.
    Vanishing,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Ambiguous { .. } => "ambiguous",
            Status::Vanishing => "vanishing",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub variety: MarkedDiagram,
    pub q: usize,
    pub twist: Weight,
    pub degree: usize,
    pub survivors: Vec<Survivor>,
    pub status: Status,
    /// Degree-1 representations also occurring in other degrees and not
    /// covered by a survival rule.
    pub unresolved: Vec<Weight>,
    /// Every degree-1 representation occurs in degree 1 only, so the
    /// survivors are all of `H^1`.
    pub exact: bool,
    pub e1: BTreeMap<usize, BTreeMap<Weight, BigInt>>,
    pub compositions: usize,
    pub levi_irreducibles: usize,
    pub elapsed: Duration,
}

impl Certificate {
    pub fn survivor_weights(&self) -> Vec<&Weight> {
        self.survivors.iter().map(|s| &s.weight).collect()
    }
}

/// Applies both survival rules to degree 1 of a finished E1-page.
pub fn analyze(variety: MarkedDiagram, page: &E1Page, elapsed: Duration) -> Certificate {
    let degree = 1;
    let by_rep = page.table.by_rep();
    let mut survivors = Vec::new();
    let mut unresolved = Vec::new();
    for (w, degs) in &by_rep {
        let Some(m1) = degs.get(&degree) else {
            continue;
        };
        let degrees: Vec<usize> = degs.keys().copied().collect();
        if degs.len() == 1 {
            survivors.push(Survivor {
                weight: w.clone(),
                multiplicity: m1.clone(),
                rule: SurvivalRule::SingleDegree,
                degrees,
            });
            continue;
        }
        let mut chi = BigInt::zero();
        let mut other_odd = BigInt::zero();
        for (&p, m) in degs {
            if p % 2 == 0 {
                chi += m;
            } else {
                chi -= m;
                if p != degree {
                    other_odd += m;
                }
            }
        }
        let bound = -chi - other_odd;
        if bound.is_positive() {
            survivors.push(Survivor {
                weight: w.clone(),
                multiplicity: bound,
                rule: SurvivalRule::EulerBound,
                degrees,
            });
        } else {
            unresolved.push(w.clone());
        }
    }
    let occupied = page.table.degree(degree).is_some_and(|d| !d.is_empty());
    let status = if !survivors.is_empty() {
        Status::Certified
    } else if occupied {
        Status::Ambiguous {
            witnesses: unresolved.clone(),
        }
    } else {
        Status::Vanishing
    };
    let exact = survivors
        .iter()
        .all(|s| s.rule == SurvivalRule::SingleDegree)
        && unresolved.is_empty();
    Certificate {
        variety,
        q: page.q,
        twist: page.twist.clone(),
        degree,
        survivors,
        status,
        unresolved,
        exact,
        e1: page.table.entries().clone(),
        compositions: page.summands.len(),
        levi_irreducibles: page.levi_irreducibles(),
        elapsed,
    }
}

/// The default twist `O(−1)`: minus the ample generator.
pub fn default_twist(md: &MarkedDiagram) -> Weight {
    -&md.ample_generator()
}

pub fn certify(
    md: MarkedDiagram,
    q: usize,
    twist: &Weight,
    budget: &Budget,
) -> Result<Certificate> {
    let x = build_flag(md);
    let mut engine = E1Engine::new(&x);
    certify_with(&mut engine, q, twist, budget)
}

pub fn certify_with(
    engine: &mut E1Engine<'_>,
    q: usize,
    twist: &Weight,
    budget: &Budget,
) -> Result<Certificate> {
    let start = Instant::now();
    let page = engine.page(q, twist, budget)?;
    Ok(analyze(
        *engine.variety().marked_diagram(),
        &page,
        start.elapsed(),
    ))
}

#[derive(Clone, Debug)]
pub struct Attempt {
    pub q: usize,
    pub status: Status,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub enum MinimalQ {
    Found {
        certificate: Box<Certificate>,
        attempts: Vec<Attempt>,
    },
    NotFoundUpTo {
        q_max: usize,
        attempts: Vec<Attempt>,
    },
    BudgetExceeded {
        reached: usize,
        reason: String,
        attempts: Vec<Attempt>,
    },
}

impl MinimalQ {
    pub fn q(&self) -> Option<usize> {
        match self {
            MinimalQ::Found { certificate, .. } => Some(certificate.q),
            _ => None,
        }
    }

    pub fn attempts(&self) -> &[Attempt] {
        match self {
            MinimalQ::Found { attempts, .. }
            | MinimalQ::NotFoundUpTo { attempts, .. }
            | MinimalQ::BudgetExceeded { attempts, .. } => attempts,
        }
    }
}

/// Scans `q = 1, 2, …, q_max` for the first certified `Λ^q T_X ⊗ O(twist)`.
pub fn find_minimal_q(
    md: MarkedDiagram,
    q_max: usize,
    twist: &Weight,
    budget: &Budget,
) -> Result<MinimalQ> {
    if q_max == 0 {
        return Err(Error::NotApplicable("q_max must be at least 1".into()));
    }
    let x = build_flag(md);
    let mut engine = E1Engine::new(&x);
    let mut attempts = Vec::new();
    for q in 1..=q_max.min(x.dim()) {
        match certify_with(&mut engine, q, twist, budget) {
            Ok(c) => {
                attempts.push(Attempt {
                    q,
                    status: c.status.clone(),
                    elapsed: c.elapsed,
                });
                if c.status == Status::Certified {
                    return Ok(MinimalQ::Found {
                        certificate: Box::new(c),
                        attempts,
                    });
                }
            }
            Err(Error::BudgetExceeded(reason)) => {
                return Ok(MinimalQ::BudgetExceeded {
                    reached: q,
                    reason,
                    attempts,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(MinimalQ::NotFoundUpTo { q_max, attempts })
}

/// E1 content of `Ω^q_X ⊗ O(m)` in one scan cell.
#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub q: usize,
    pub m: i32,
    pub e1: BTreeMap<usize, BTreeMap<Weight, BigInt>>,
    /// Degrees `p ≥ 1` holding a representation that occurs in no other
    /// degree, i.e. certified non-zero `H^p`.
    pub certified_degrees: Vec<usize>,
    /// Degrees `p ≥ 1` occupied on E1 without such a certificate.
    pub ambiguous_degrees: Vec<usize>,
}

impl ScanEntry {
    pub fn higher_occupied(&self) -> bool {
        !self.certified_degrees.is_empty() || !self.ambiguous_degrees.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub variety: MarkedDiagram,
    pub entries: Vec<ScanEntry>,
}

impl ScanReport {
    /// Cells with occupied higher cohomology on E1.
    pub fn violations(&self) -> impl Iterator<Item = &ScanEntry> {
        self.entries.iter().filter(|e| e.higher_occupied())
    }
}

/// `Ω^q ⊗ O(m)` realized as `Λ^{dim−q} T_X ⊗ O(canonical + m·ample)` for
/// every `q` and `m` in range.
pub fn bott_vanishing_scan(
    md: MarkedDiagram,
    qs: impl IntoIterator<Item = usize>,
    ms: impl IntoIterator<Item = i32> + Clone,
    budget: &Budget,
) -> Result<ScanReport> {
    let x = build_flag(md);
    let mut engine = E1Engine::new(&x);
    let ample = md.ample_generator();
    let mut entries = Vec::new();
    for q in qs {
        if q > x.dim() {
            return Err(Error::DegreeTooLarge { q, dim: x.dim() });
        }
        for m in ms.clone() {
            let twist = &x.canonical_weight() + &ample.scaled(m);
            let page = engine.page(x.dim() - q, &twist, budget)?;
            let by_rep = page.table.by_rep();
            let mut certified = BTreeSet::new();
            let mut ambiguous = BTreeSet::new();
            for degs in by_rep.values() {
                for &p in degs.keys().filter(|&&p| p >= 1) {
                    if degs.len() == 1 {
                        certified.insert(p);
                    } else {
                        ambiguous.insert(p);
                    }
                }
            }
            let ambiguous = ambiguous.difference(&certified).copied().collect();
            entries.push(ScanEntry {
                q,
                m,
                e1: page.table.entries().clone(),
                certified_degrees: certified.into_iter().collect(),
                ambiguous_degrees: ambiguous,
            });
        }
    }
    Ok(ScanReport {
        variety: md,
        entries,
    })
}

#[derive(Clone, Debug)]
pub struct StabilizationReport {
    pub series: Series,
    pub q: usize,
    /// `Λ^q E` for each `n`, `E = gr_1` of the adjoint variety.
    pub decompositions: Vec<(usize, IrrepMultiset)>,
    /// Smallest `n` in the window from which every later decomposition has
    /// support in `ω_1, …, ω_5` and agrees on those coordinates.
    pub stable_from: Option<usize>,
}

/// Weight truncated to `ω_1..ω_5`, or `None` if its support leaves them.
fn truncate(w: &Weight) -> Option<[i32; 5]> {
    if w.coords().iter().skip(5).any(|&c| c != 0) {
        return None;
    }
    let mut out = [0; 5];
    for (i, c) in w.coords().iter().take(5).enumerate() {
        out[i] = *c;
    }
    Some(out)
}

fn truncated(d: &IrrepMultiset) -> Option<BTreeMap<[i32; 5], BigInt>> {
    d.iter()
        .map(|(w, m)| truncate(w).map(|t| (t, m.clone())))
        .collect()
}

pub fn stabilization_scan(
    series: Series,
    q: usize,
    ns: impl IntoIterator<Item = usize>,
) -> Result<StabilizationReport> {
    if !matches!(series, Series::B | Series::D) {
        return Err(Error::NotApplicable(format!(
            "stabilization is only defined for the B and D series, not {}",
            series.letter()
        )));
    }
    let mut decompositions = Vec::new();
    for n in ns {
        let x = build_flag(adjoint_marking(DynkinType::new(series, n)?));
        let d = x.graded_piece::<BigInt>(1).exterior_power(q)?.decompose()?;
        decompositions.push((n, d));
    }
    let keys: Vec<Option<BTreeMap<[i32; 5], BigInt>>> =
        decompositions.iter().map(|(_, d)| truncated(d)).collect();
    let mut stable_from = None;
    if let Some(Some(last)) = keys.last() {
        for (i, k) in keys.iter().enumerate().rev() {
            if k.as_ref() == Some(last) {
                stable_from = Some(decompositions[i].0);
            } else {
                break;
            }
        }
    }
    Ok(StabilizationReport {
        series,
        q,
        decompositions,
        stable_from,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyRow {
    pub variety: MarkedDiagram,
    pub dim: usize,
    pub index: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentRow {
    pub dynkin: DynkinType,
    pub highest_weight: Weight,
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct Tables {
    pub adjoint: Vec<VarietyRow>,
    pub coadjoint: Vec<VarietyRow>,
    pub e_weights: Vec<TangentRow>,
}

fn variety_row(md: MarkedDiagram) -> VarietyRow {
    let x = build_flag(md);
    VarietyRow {
        variety: md,
        dim: x.dim(),
        index: x.index(),
    }
}

fn dynkin(series: Series, rank: usize) -> DynkinType {
    DynkinType::new(series, rank).expect("table ranks are valid")
}

/// Adjoint varieties with classical families for `n ∈ ns`.
pub fn adjoint_table(ns: &[usize]) -> Vec<VarietyRow> {
    let mut types = Vec::new();
    for (s, min) in [(Series::A, 2), (Series::B, 3), (Series::D, 4)] {
        types.extend(ns.iter().filter(|&&n| n >= min).map(|&n| dynkin(s, n)));
    }
    types.extend([
        dynkin(Series::E, 6),
        dynkin(Series::E, 7),
        dynkin(Series::E, 8),
        dynkin(Series::F, 4),
        dynkin(Series::G, 2),
    ]);
    types
        .into_iter()
        .map(|t| variety_row(adjoint_marking(t)))
        .collect()
}

/// Coadjoint varieties that are not adjoint.
pub fn coadjoint_table(ns: &[usize]) -> Vec<VarietyRow> {
    let mut types: Vec<DynkinType> = ns
        .iter()
        .filter(|&&n| n >= 3)
        .map(|&n| dynkin(Series::C, n))
        .collect();
    types.push(dynkin(Series::F, 4));
    types
        .into_iter()
        .map(|t| variety_row(crate::flag::coadjoint_marking(t)))
        .collect()
}

/// Highest weight of the irreducible `gr_1` for adjoint varieties outside
/// type A.
pub fn e_weight_table(ns: &[usize]) -> Result<Vec<TangentRow>> {
    let mut types = Vec::new();
    for (s, min) in [(Series::B, 3), (Series::D, 4)] {
        types.extend(ns.iter().filter(|&&n| n >= min).map(|&n| dynkin(s, n)));
    }
    types.extend([
        dynkin(Series::E, 6),
        dynkin(Series::E, 7),
        dynkin(Series::E, 8),
        dynkin(Series::F, 4),
        dynkin(Series::G, 2),
    ]);
    types
        .into_iter()
        .map(|t| {
            let x = build_flag(adjoint_marking(t));
            let d = crate::flag::tangent_highest_piece_check::<BigInt>(&x)?;
            let (w, _) = d.iter().next().expect("irreducible");
            Ok(TangentRow {
                dynkin: t,
                highest_weight: w.clone(),
                rank: x.piece_dims()[0],
            })
        })
        .collect()
}

/// Every table with the classical families instantiated for `n ≤ 8`.
pub fn reproduce_tables() -> Result<Tables> {
    let ns: Vec<usize> = (2..=8).collect();
    Ok(Tables {
        adjoint: adjoint_table(&ns),
        coadjoint: coadjoint_table(&ns),
        e_weights: e_weight_table(&ns)?,
    })
}
