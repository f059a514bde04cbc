//! Borel–Weil–Bott for irreducible homogeneous bundles on `G/P`, and its
//! aggregation over completely reducible bundles.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flag::FlagVariety;
use crate::repchar::IrrepMultiset;
use crate::rootsystem::DominantConjugate;
use crate::scalar::Multiplicity;
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BwbResult {
    Zero,
    At { degree: usize, rep: Weight },
}

impl BwbResult {
    pub fn degree(&self) -> Option<usize> {
        match self {
            BwbResult::Zero => None,
            BwbResult::At { degree, .. } => Some(*degree),
        }
    }
}

/// Cohomology of the irreducible bundle `U^λ` on `X`.
pub fn bwb_line(x: &FlagVariety, lambda: &Weight) -> Result<BwbResult> {
    x.levi().check_dominant(lambda)?;
    let rs = x.root_system();
    let mu = lambda + rs.rho();
    let out = match rs.dominant_conjugate(&mu) {
        DominantConjugate::Singular => BwbResult::Zero,
        DominantConjugate::Regular { dominant, length } => BwbResult::At {
            degree: length,
            rep: &dominant - rs.rho(),
        },
    };
    if let BwbResult::At { degree, .. } = &out {
        assert!(
            *degree <= x.dim(),
            "Bott degree {degree} above dim {}",
            x.dim()
        );
    }
    Ok(out)
}

/// One non-vanishing summand of a cohomology table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contribution<M: Multiplicity = BigInt> {
    pub levi_weight: Weight,
    pub tag: String,
    pub multiplicity: M,
    pub degree: usize,
    pub rep: Weight,
}

/// `H^p` as a multiset of G-irreducibles for each degree `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyTable<M: Multiplicity = BigInt> {
    entries: BTreeMap<usize, BTreeMap<Weight, M>>,
    provenance: Vec<Contribution<M>>,
}

impl<M: Multiplicity> Default for CohomologyTable<M> {
    fn default() -> Self {
        CohomologyTable {
            entries: BTreeMap::new(),
            provenance: Vec::new(),
        }
    }
}

impl<M: Multiplicity> CohomologyTable<M> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<usize, BTreeMap<Weight, M>> {
        &self.entries
    }

    pub fn degree(&self, p: usize) -> Option<&BTreeMap<Weight, M>> {
        self.entries.get(&p)
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn provenance(&self) -> &[Contribution<M>] {
        &self.provenance
    }

    /// For each G-irreducible, its multiplicity in each degree.
    pub fn by_rep(&self) -> BTreeMap<Weight, BTreeMap<usize, M>> {
        let mut out: BTreeMap<Weight, BTreeMap<usize, M>> = BTreeMap::new();
        for (&p, reps) in &self.entries {
            for (w, m) in reps {
                out.entry(w.clone()).or_default().insert(p, m.clone());
            }
        }
        out
    }

    fn add(&mut self, c: Contribution<M>) {
        *self
            .entries
            .entry(c.degree)
            .or_default()
            .entry(c.rep.clone())
            .or_insert_with(M::zero) += c.multiplicity.clone();
        self.provenance.push(c);
    }

    pub fn merge(mut self, other: Self) -> Self {
        for c in other.provenance {
            self.add(c);
        }
        self
    }

    fn finish(mut self) -> Self {
        self.provenance.sort_by(|a, b| {
            (&a.tag, &a.levi_weight, a.degree).cmp(&(&b.tag, &b.levi_weight, b.degree))
        });
        self
    }

    /// `Σ_p (−1)^p dim H^p`, given G-dimensions from `x`.
    pub fn euler_characteristic(&self, x: &FlagVariety) -> Result<BigInt> {
        let mut chi = BigInt::zero();
        for (&p, reps) in &self.entries {
            for (w, m) in reps {
                let d = x.group().weyl_dimension(w)? * m.to_bigint();
                if p % 2 == 0 {
                    chi += d;
                } else {
                    chi -= d;
                }
            }
        }
        Ok(chi)
    }
}

/// Cohomology of `⊕ U^λ` over one multiset of Levi irreducibles.
pub fn bundle_cohomology<M: Multiplicity>(
    x: &FlagVariety,
    summands: &IrrepMultiset<M>,
) -> Result<CohomologyTable<M>> {
    bundle_cohomology_tagged(x, &[(String::new(), summands)])
}

/// As [`bundle_cohomology`], with each group of summands tagged for
/// provenance (typically by its graded composition).
pub fn bundle_cohomology_tagged<M: Multiplicity>(
    x: &FlagVariety,
    groups: &[(String, &IrrepMultiset<M>)],
) -> Result<CohomologyTable<M>> {
    for (_, g) in groups {
        if g.context() != x.levi() {
            return Err(Error::ContextMismatch);
        }
    }
    let items: Vec<(&String, &Weight, &M)> = groups
        .iter()
        .flat_map(|(tag, g)| g.iter().map(move |(w, m)| (tag, w, m)))
        .collect();
    let table = items
        .par_iter()
        .try_fold(CohomologyTable::new, |mut acc, &(tag, w, m)| {
            if let BwbResult::At { degree, rep } = bwb_line(x, w)? {
                acc.add(Contribution {
                    levi_weight: w.clone(),
                    tag: tag.clone(),
                    multiplicity: m.clone(),
                    degree,
                    rep,
                });
            }
            Ok::<_, Error>(acc)
        })
        .try_reduce(CohomologyTable::new, |a, b| Ok(a.merge(b)))?;
    Ok(table.finish())
}

/// `χ(X, U^λ)` from the Weyl character formula: the product over positive
/// roots of `⟨λ+ρ, α^∨⟩ / ⟨ρ, α^∨⟩`, with no chamber sorting involved.
pub fn euler_characteristic(x: &FlagVariety, lambda: &Weight) -> BigInt {
    let rs = x.root_system();
    let mu = lambda + rs.rho();
    let mut prod = BigRational::one();
    for r in rs.positive_roots() {
        prod *= BigRational::new(BigInt::from(r.pair(&mu)), BigInt::from(r.pair(rs.rho())));
    }
    assert!(prod.is_integer(), "Weyl product is not integral");
    prod.to_integer()
}

/// Checks [`bwb_line`] against the Weyl-product Euler characteristic.
pub fn euler_char_check(x: &FlagVariety, lambda: &Weight) -> Result<bool> {
    let chi = euler_characteristic(x, lambda);
    Ok(match bwb_line(x, lambda)? {
        BwbResult::Zero => chi.is_zero(),
        BwbResult::At { degree, rep } => {
            let d = x.group().weyl_dimension(&rep)?;
            let signed = if degree % 2 == 0 { d } else { -d };
            signed == chi
        }
    })
}
