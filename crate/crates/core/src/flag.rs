//! Partial flag varieties `G/P_S` from marked Dynkin diagrams.
//!
//! The fiber of `T_X` at the base point has weights `Φ⁺ \ Φ_L`. Grading
//! these roots by their total coefficient over the marked simple roots gives
//! the graded pieces `gr_1, gr_2, …` of the filtration dual to the lower
//! central series of the nilradical; `gr_1` is `n^ab` and the last piece is
//! spanned by the highest root.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::repchar::{Character, IrrepMultiset, SymmetryContext};
use crate::rootsystem::{DynkinType, RootSystem};
use crate::scalar::Multiplicity;
use crate::weight::Weight;

/// Dynkin diagram with a non-empty set `S` of marked nodes (the parabolic
/// `P_S`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MarkedDiagram {
    dynkin: DynkinType,
    marked: u32,
}

impl MarkedDiagram {
    /// `nodes` are 1-based Bourbaki labels.
    pub fn new(dynkin: DynkinType, nodes: &[usize]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidMarking("no marked node".into()));
        }
        let mut marked = 0u32;
        for &k in nodes {
            if k == 0 || k > dynkin.rank() {
                return Err(Error::NodeOutOfRange {
                    node: k,
                    rank: dynkin.rank(),
                });
            }
            marked |= 1 << (k - 1);
        }
        Ok(MarkedDiagram { dynkin, marked })
    }

    pub fn dynkin(&self) -> DynkinType {
        self.dynkin
    }

    pub fn mask(&self) -> u32 {
        self.marked
    }

    pub fn marked_nodes(&self) -> Vec<usize> {
        (0..self.dynkin.rank())
            .filter(|i| self.marked & (1 << i) != 0)
            .map(|i| i + 1)
            .collect()
    }

    pub fn is_maximal(&self) -> bool {
        self.marked.count_ones() == 1
    }

    /// `Σ_{k ∈ S} ω_k`, the label of `O_X(1)` for the varieties handled here.
    pub fn ample_generator(&self) -> Weight {
        let mut w = Weight::zero(self.dynkin.rank());
        for k in self.marked_nodes() {
            w[k - 1] = 1;
        }
        w
    }

    pub fn levi_context(&self) -> SymmetryContext {
        let rs = RootSystem::shared(self.dynkin);
        SymmetryContext::shared(self.dynkin, rs.all_nodes() & !self.marked)
    }
}

impl fmt::Display for MarkedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self.marked_nodes().iter().map(|k| k.to_string()).collect();
        write!(f, "{}/P{}", self.dynkin, nodes.join(","))
    }
}

fn marking_from(dynkin: DynkinType, root: &Weight) -> MarkedDiagram {
    let nodes: Vec<usize> = (0..dynkin.rank())
        .filter(|&i| root[i] != 0)
        .map(|i| i + 1)
        .collect();
    MarkedDiagram::new(dynkin, &nodes).expect("highest root is non-zero")
}

/// Nodes pairing non-trivially with the highest (long) root.
pub fn adjoint_marking(dynkin: DynkinType) -> MarkedDiagram {
    marking_from(dynkin, RootSystem::shared(dynkin).highest_long_root())
}

/// Nodes pairing non-trivially with the highest short root.
pub fn coadjoint_marking(dynkin: DynkinType) -> MarkedDiagram {
    marking_from(dynkin, RootSystem::shared(dynkin).highest_short_root())
}

#[derive(Clone, Debug)]
pub struct FlagVariety {
    md: MarkedDiagram,
    rs: Arc<RootSystem>,
    levi: SymmetryContext,
    full: SymmetryContext,
    dim: usize,
    index_weight: Weight,
    /// `grades[j - 1]` lists the roots of marked level `j`.
    grades: Vec<Vec<Weight>>,
}

pub fn build_flag(md: MarkedDiagram) -> FlagVariety {
    FlagVariety::new(md)
}

impl FlagVariety {
    pub fn new(md: MarkedDiagram) -> Self {
        let dynkin = md.dynkin();
        let rs = RootSystem::shared(dynkin);
        let levi = md.levi_context();
        let full = SymmetryContext::shared(dynkin, rs.all_nodes());
        let mut grades: Vec<Vec<Weight>> = Vec::new();
        let mut index_weight = Weight::zero(rs.rank());
        for r in rs.positive_roots() {
            let level: i32 = (0..rs.rank())
                .filter(|i| md.mask() & (1 << i) != 0)
                .map(|i| r.simple[i])
                .sum();
            if level == 0 {
                continue;
            }
            let level = level as usize;
            if grades.len() < level {
                grades.resize(level, Vec::new());
            }
            grades[level - 1].push(r.weight.clone());
            index_weight += &r.weight;
        }
        let dim = grades.iter().map(Vec::len).sum();
        FlagVariety {
            md,
            rs,
            levi,
            full,
            dim,
            index_weight,
            grades,
        }
    }

    pub fn marked_diagram(&self) -> &MarkedDiagram {
        &self.md
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    /// Context of the Levi subgroup `L`.
    pub fn levi(&self) -> &SymmetryContext {
        &self.levi
    }

    /// Context of `G`.
    pub fn group(&self) -> &SymmetryContext {
        &self.full
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Σ_{α ∈ Φ⁺ \ Φ_L} α`, the weight of `det T_X = ω_X^∨`.
    pub fn index_weight(&self) -> &Weight {
        &self.index_weight
    }

    /// Weight of the canonical bundle `ω_X`.
    pub fn canonical_weight(&self) -> Weight {
        -&self.index_weight
    }

    /// The integer `i_X` with `index_weight = i_X · Σ_{k∈S} ω_k`, if any.
    pub fn index(&self) -> Option<i64> {
        let gen = self.md.ample_generator();
        let k = self.md.marked_nodes()[0] - 1;
        let i = self.index_weight[k];
        (gen.scaled(i) == self.index_weight).then_some(i as i64)
    }

    /// Maximal parabolic of index `dim + 1`, i.e. a projective space.
    pub fn is_projective_space(&self) -> bool {
        self.md.is_maximal() && self.index() == Some(self.dim as i64 + 1)
    }

    pub fn num_pieces(&self) -> usize {
        self.grades.len()
    }

    pub fn piece_dims(&self) -> Vec<usize> {
        self.grades.iter().map(Vec::len).collect()
    }

    /// Fiber weights of the graded piece `gr_j` (1-based).
    pub fn piece_weights(&self, j: usize) -> &[Weight] {
        &self.grades[j - 1]
    }

    /// `gr_j` as a Levi character (1-based `j`).
    pub fn graded_piece<M: Multiplicity>(&self, j: usize) -> Character<M> {
        Character::from_weights(
            &self.levi,
            self.grades[j - 1].iter().map(|w| (w.clone(), M::one())),
        )
        .expect("graded pieces are W_L-stable")
    }

    pub fn tangent_character<M: Multiplicity>(&self) -> Character<M> {
        Character::from_weights(
            &self.levi,
            self.grades.iter().flatten().map(|w| (w.clone(), M::one())),
        )
        .expect("tangent weights are W_L-stable")
    }

    pub fn cotangent_character<M: Multiplicity>(&self) -> Character<M> {
        Character::from_weights(
            &self.levi,
            self.grades.iter().flatten().map(|w| (-w, M::one())),
        )
        .expect("cotangent weights are W_L-stable")
    }

    pub fn check_twist(&self, twist: &Weight) -> Result<()> {
        self.rs.check_weight(twist)?;
        match (0..self.rs.rank()).find(|&i| self.md.mask() & (1 << i) == 0 && twist[i] != 0) {
            Some(i) => Err(Error::InvalidTwist { node: i + 1 }),
            None => Ok(()),
        }
    }
}

/// True iff `det T_X` is `i_X` times the ample generator of a maximal
/// parabolic, i.e. `O_X(i_X) ≅ ω_X^∨`.
pub fn canonical_check(x: &FlagVariety) -> Result<bool> {
    if !x.md.is_maximal() {
        return Err(Error::NotApplicable(format!(
            "{} is not a maximal parabolic",
            x.md
        )));
    }
    Ok(x.index().is_some_and(|i| i > 0))
}

/// Decomposes `gr_1` and insists that it is irreducible.
pub fn tangent_highest_piece_check<M: Multiplicity>(x: &FlagVariety) -> Result<IrrepMultiset<M>> {
    let dec = x.graded_piece::<M>(1).decompose()?;
    let single = dec.len() == 1 && dec.iter().all(|(_, m)| m.is_one());
    if !single {
        return Err(Error::NotApplicable(format!(
            "gr_1 of {} is not irreducible: {:?}",
            x.md, dec
        )));
    }
    Ok(dec)
}

/// One summand `⊗_j Λ^{q_j} gr_j ⊗ O(twist)` of the associated graded of
/// `Λ^q T_X ⊗ O(twist)`.
#[derive(Clone, Debug)]
pub struct E1Summand<M: Multiplicity = BigInt> {
    pub composition: Vec<usize>,
    pub character: Character<M>,
}

impl<M: Multiplicity> E1Summand<M> {
    pub fn tag(&self) -> String {
        composition_tag(&self.composition)
    }
}

pub fn composition_tag(composition: &[usize]) -> String {
    composition
        .iter()
        .enumerate()
        .map(|(j, q)| format!("Λ^{q} gr_{}", j + 1))
        .collect::<Vec<_>>()
        .join(" ⊗ ")
}

/// All `(q_1, q_2, …)` with `Σ q_j = q` and `q_j ≤ caps[j]`, in decreasing
/// lexicographic order.
pub fn compositions(q: usize, caps: &[usize]) -> Vec<Vec<usize>> {
    fn rec(q: usize, caps: &[usize], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match caps.split_first() {
            None => {
                if q == 0 {
                    out.push(prefix.clone());
                }
            }
            Some((&cap, rest)) => {
                let room: usize = rest.iter().sum();
                for k in (0..=cap.min(q)).rev() {
                    if q - k > room {
                        break;
                    }
                    prefix.push(k);
                    rec(q - k, rest, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(q, caps, &mut Vec::new(), &mut out);
    out
}

/// Exterior powers of the graded pieces, extended on demand.
pub struct TangentPowers<'a, M: Multiplicity = BigInt> {
    x: &'a FlagVariety,
    pieces: Vec<Character<M>>,
    powers: Vec<Vec<Character<M>>>,
}

impl<'a, M: Multiplicity> TangentPowers<'a, M> {
    pub fn new(x: &'a FlagVariety) -> Self {
        let pieces: Vec<Character<M>> = (1..=x.num_pieces()).map(|j| x.graded_piece(j)).collect();
        let powers = pieces
            .iter()
            .map(|p| vec![Character::trivial(p.context())])
            .collect();
        TangentPowers { x, pieces, powers }
    }

    pub fn variety(&self) -> &FlagVariety {
        self.x
    }

    /// `Λ^k gr_j` (1-based `j`), computing lower powers as needed.
    pub fn power(&mut self, j: usize, k: usize, budget: &Budget) -> Result<&Character<M>> {
        let have = self.powers[j - 1].len();
        if k >= have {
            let cap = self.x.piece_dims()[j - 1];
            if k > cap {
                return Err(Error::DegreeTooLarge { q: k, dim: cap });
            }
            let all = self.pieces[j - 1].exterior_powers(k, budget)?;
            self.powers[j - 1] = all;
        }
        Ok(&self.powers[j - 1][k])
    }

    pub fn compositions(&self, q: usize) -> Vec<Vec<usize>> {
        compositions(q, &self.x.piece_dims())
    }

    /// Character of one composition, twisted.
    pub fn summand(
        &mut self,
        composition: &[usize],
        twist: &Weight,
        budget: &Budget,
    ) -> Result<Character<M>> {
        self.x.check_twist(twist)?;
        let mut acc: Option<Character<M>> = None;
        for (j, &k) in composition.iter().enumerate() {
            let p = self.power(j + 1, k, budget)?.clone();
            acc = Some(match acc {
                None => p,
                Some(a) => a.tensor_with_budget(&p, budget)?,
            });
        }
        acc.unwrap_or_else(|| Character::trivial(&self.x.levi))
            .shift(twist)
    }
}

/// Associated graded of `Λ^q T_X ⊗ O(twist)`: one character per
/// composition of `q` over the graded pieces.
pub fn lambda_q_tangent_e1<M: Multiplicity>(
    x: &FlagVariety,
    q: usize,
    twist: &Weight,
) -> Result<Vec<E1Summand<M>>> {
    x.check_twist(twist)?;
    if q > x.dim() {
        return Err(Error::DegreeTooLarge { q, dim: x.dim() });
    }
    let budget = Budget::unlimited();
    let mut powers = TangentPowers::<M>::new(x);
    powers
        .compositions(q)
        .into_iter()
        .map(|c| {
            let character = powers.summand(&c, twist, &budget)?;
            Ok(E1Summand {
                composition: c,
                character,
            })
        })
        .collect()
}

/// Symbolic homogeneous bundles, evaluated to Levi characters at the base
/// point. `Ω^q` enters only through `Λ^q T_X ≅ Ω^{dim−q} ⊗ ω_X^∨`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleExpr {
    Irreducible(Weight),
    LambdaTangent(usize),
    Line(Weight),
    Tensor(Box<BundleExpr>, Box<BundleExpr>),
}

impl BundleExpr {
    pub fn tensor(self, other: BundleExpr) -> BundleExpr {
        BundleExpr::Tensor(Box::new(self), Box::new(other))
    }

    /// `Ω^q_X ⊗ O(twist)` rewritten as `Λ^{dim−q} T_X ⊗ ω_X ⊗ O(twist)`.
    pub fn twisted_forms(x: &FlagVariety, q: usize, twist: &Weight) -> Result<BundleExpr> {
        if q > x.dim() {
            return Err(Error::DegreeTooLarge { q, dim: x.dim() });
        }
        let line = &x.canonical_weight() + twist;
        Ok(BundleExpr::LambdaTangent(x.dim() - q).tensor(BundleExpr::Line(line)))
    }

    pub fn character<M: Multiplicity>(&self, x: &FlagVariety) -> Result<Character<M>> {
        match self {
            BundleExpr::Irreducible(lambda) => crate::repchar::irrep_character(x.levi(), lambda),
            BundleExpr::LambdaTangent(q) => x.tangent_character::<M>().exterior_power(*q),
            BundleExpr::Line(mu) => {
                x.check_twist(mu)?;
                Ok(Character::line(x.levi(), mu.clone()))
            }
            BundleExpr::Tensor(a, b) => a.character::<M>(x)?.tensor(&b.character::<M>(x)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> DynkinType {
        s.parse().unwrap()
    }

    #[test]
    fn markings() {
        assert_eq!(adjoint_marking(t("B5")).marked_nodes(), vec![2]);
        assert_eq!(adjoint_marking(t("A4")).marked_nodes(), vec![1, 4]);
        assert_eq!(adjoint_marking(t("A1")).marked_nodes(), vec![1]);
        assert_eq!(adjoint_marking(t("E7")).marked_nodes(), vec![1]);
        assert_eq!(adjoint_marking(t("E8")).marked_nodes(), vec![8]);
        assert_eq!(adjoint_marking(t("F4")).marked_nodes(), vec![1]);
        assert_eq!(adjoint_marking(t("G2")).marked_nodes(), vec![2]);
        assert_eq!(coadjoint_marking(t("F4")).marked_nodes(), vec![4]);
        assert_eq!(coadjoint_marking(t("C5")).marked_nodes(), vec![2]);
        for s in ["A3", "D5", "E6", "E7", "E8"] {
            assert_eq!(adjoint_marking(t(s)), coadjoint_marking(t(s)), "{s}");
        }
    }

    #[test]
    fn marking_errors() {
        assert!(matches!(
            MarkedDiagram::new(t("B3"), &[]),
            Err(Error::InvalidMarking(_))
        ));
        assert!(matches!(
            MarkedDiagram::new(t("B3"), &[4]),
            Err(Error::NodeOutOfRange { node: 4, rank: 3 })
        ));
    }

    #[test]
    fn table_rows() {
        let x = build_flag(adjoint_marking(t("E8")));
        assert_eq!((x.dim(), x.index()), (57, Some(29)));
        let x = build_flag(adjoint_marking(t("A3")));
        assert_eq!((x.dim(), x.index()), (5, Some(3)));
        assert_eq!(x.index_weight(), &Weight::new(&[3, 0, 3]));
        for n in 3..=6 {
            let x = build_flag(adjoint_marking(t(&format!("B{n}"))));
            assert_eq!((x.dim(), x.index()), (4 * n - 5, Some(2 * n as i64 - 2)));
            let x = build_flag(coadjoint_marking(t(&format!("C{n}"))));
            assert_eq!((x.dim(), x.index()), (4 * n - 5, Some(2 * n as i64 - 1)));
        }
        let x = build_flag(coadjoint_marking(t("F4")));
        assert_eq!((x.dim(), x.index()), (15, Some(11)));
    }

    #[test]
    fn graded_pieces() {
        let x = build_flag(adjoint_marking(t("A4")));
        assert_eq!(x.piece_dims(), vec![6, 1]);
        for s in ["B4", "D5", "E6", "F4", "G2"] {
            let x = build_flag(adjoint_marking(t(s)));
            assert_eq!(x.num_pieces(), 2, "{s}");
            assert_eq!(x.piece_dims()[1], 1, "{s}");
            assert_eq!(x.piece_weights(2)[0], *x.root_system().highest_long_root());
        }
        let x = build_flag(coadjoint_marking(t("C4")));
        assert_eq!(x.piece_dims(), vec![8, 3]);
    }

    #[test]
    fn canonical() {
        let x = build_flag(adjoint_marking(t("B3")));
        assert!(canonical_check(&x).unwrap());
        assert_eq!(x.index(), Some(4));
        assert!(canonical_check(&build_flag(adjoint_marking(t("A3")))).is_err());
        assert!(build_flag(MarkedDiagram::new(t("A3"), &[1]).unwrap()).is_projective_space());
        assert!(build_flag(MarkedDiagram::new(t("C3"), &[1]).unwrap()).is_projective_space());
        assert!(build_flag(MarkedDiagram::new(t("B2"), &[2]).unwrap()).is_projective_space());
        assert!(!build_flag(MarkedDiagram::new(t("G2"), &[1]).unwrap()).is_projective_space());
    }

    #[test]
    fn table_two_weights() {
        let cases = [
            ("B3", vec![1, -1, 2]),
            ("B4", vec![1, -1, 1, 0]),
            ("D4", vec![1, -1, 1, 1]),
            ("D6", vec![1, -1, 1, 0, 0, 0]),
            ("E6", vec![0, -1, 0, 1, 0, 0]),
            ("E7", vec![-1, 0, 1, 0, 0, 0, 0]),
            ("E8", vec![0, 0, 0, 0, 0, 0, 1, -1]),
            ("F4", vec![-1, 1, 0, 0]),
            ("G2", vec![3, -1]),
        ];
        for (s, hw) in cases {
            let x = build_flag(adjoint_marking(t(s)));
            let dec = tangent_highest_piece_check::<i64>(&x).unwrap();
            let (w, _) = dec.iter().next().unwrap();
            assert_eq!(w.coords(), hw.as_slice(), "{s}");
        }
        // Type A: gr_1 splits into two pieces.
        let x = build_flag(adjoint_marking(t("A3")));
        assert!(tangent_highest_piece_check::<i64>(&x).is_err());
    }

    #[test]
    fn compositions_enumerate() {
        assert_eq!(compositions(3, &[4, 1]), vec![vec![3, 0], vec![2, 1]]);
        assert_eq!(compositions(0, &[4, 1]), vec![vec![0, 0]]);
        assert_eq!(compositions(6, &[4, 1]), Vec::<Vec<usize>>::new());
        assert_eq!(compositions(2, &[2, 3]).len(), 3);
    }

    #[test]
    fn e1_summands() {
        let x = build_flag(adjoint_marking(t("B3")));
        let zero = Weight::zero(3);
        let s = lambda_q_tangent_e1::<i64>(&x, 0, &zero).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].character, Character::trivial(x.levi()));
        let minus = -&Weight::fundamental(3, 2);
        let s = lambda_q_tangent_e1::<BigInt>(&x, 3, &minus).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].composition, vec![3, 0]);
        assert_eq!(s[1].composition, vec![2, 1]);
        let e = x.graded_piece::<BigInt>(1);
        assert_eq!(
            s[0].character,
            e.exterior_power(3).unwrap().shift(&minus).unwrap()
        );
        assert_eq!(s[1].character, e.exterior_power(2).unwrap());
        let total: BigInt = lambda_q_tangent_e1::<BigInt>(&x, 3, &zero)
            .unwrap()
            .iter()
            .map(|s| s.character.dimension())
            .sum();
        assert_eq!(total, BigInt::from(35));
        assert!(matches!(
            lambda_q_tangent_e1::<i64>(&x, 1, &Weight::new(&[1, 0, 0])),
            Err(Error::InvalidTwist { node: 1 })
        ));
    }
}
