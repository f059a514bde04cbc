//! Exact character arithmetic for a reductive group `G` or a Levi subgroup
//! `L_S`.
//!
//! A [`SymmetryContext`] fixes the root system and the nodes generating the
//! Weyl group `W_L`. Weights always carry every coordinate, including those
//! at marked nodes, so the central-torus charge of a Levi representation is
//! part of the weight itself.
//!
//! [`Character`] stores multiplicities on `W_L`-dominant weights only; the
//! full multiplicity function is recovered through dominant conjugation.
//! Orbit sizes come from the Poincaré product `|W_J| = ∏ (ht α + 1)/ht α`.

use std::any::{Any, TypeId};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::Rational64;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::rootsystem::{DynkinType, PositiveRoot, RootSystem};
use crate::scalar::Multiplicity;
use crate::weight::Weight;

type Memo = RwLock<FxHashMap<(TypeId, Weight), Arc<dyn Any + Send + Sync>>>;

struct ContextInner {
    rs: Arc<RootSystem>,
    mask: u32,
    levi_roots: Vec<usize>,
    two_rho: Weight,
    weyl_orders: RwLock<FxHashMap<u32, u128>>,
    irreps: Memo,
}

/// Root system plus the nodes generating the Weyl group of the context.
#[derive(Clone)]
pub struct SymmetryContext(Arc<ContextInner>);

impl SymmetryContext {
    /// Context of `G` itself.
    pub fn full(rs: Arc<RootSystem>) -> Self {
        let mask = rs.all_nodes();
        Self::with_mask(rs, mask)
    }

    /// Context of the Levi subgroup whose marked (removed) nodes are `marked`,
    /// given as a bitmask over 0-based node indices.
    pub fn levi(rs: Arc<RootSystem>, marked: u32) -> Self {
        let mask = rs.all_nodes() & !marked;
        Self::with_mask(rs, mask)
    }

    /// Shared instance so that the Freudenthal memo table is reused across
    /// the whole process.
    pub fn shared(dynkin: DynkinType, levi_mask: u32) -> Self {
        static CACHE: OnceLock<Mutex<FxHashMap<(DynkinType, u32), SymmetryContext>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap();
        guard
            .entry((dynkin, levi_mask))
            .or_insert_with(|| Self::with_mask(RootSystem::shared(dynkin), levi_mask))
            .clone()
    }

    fn with_mask(rs: Arc<RootSystem>, mask: u32) -> Self {
        let levi_roots: Vec<usize> = rs
            .positive_roots()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.support() & !mask == 0)
            .map(|(i, _)| i)
            .collect();
        let mut two_rho = Weight::zero(rs.rank());
        for &i in &levi_roots {
            two_rho += &rs.positive_roots()[i].weight;
        }
        SymmetryContext(Arc::new(ContextInner {
            rs,
            mask,
            levi_roots,
            two_rho,
            weyl_orders: RwLock::new(FxHashMap::default()),
            irreps: RwLock::new(FxHashMap::default()),
        }))
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.0.rs
    }

    pub fn rank(&self) -> usize {
        self.0.rs.rank()
    }

    /// Bitmask of the nodes generating `W_L`.
    pub fn mask(&self) -> u32 {
        self.0.mask
    }

    /// 1-based labels of the nodes generating `W_L`.
    pub fn levi_nodes(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|i| self.0.mask & (1 << i) != 0)
            .map(|i| i + 1)
            .collect()
    }

    /// 1-based labels of the nodes outside `W_L`.
    pub fn marked_nodes(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|i| self.0.mask & (1 << i) == 0)
            .map(|i| i + 1)
            .collect()
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = &PositiveRoot> + '_ {
        self.0
            .levi_roots
            .iter()
            .map(move |&i| &self.0.rs.positive_roots()[i])
    }

    pub fn is_dominant(&self, w: &Weight) -> bool {
        (0..self.rank()).all(|i| self.0.mask & (1 << i) == 0 || w[i] >= 0)
    }

    pub fn check_dominant(&self, w: &Weight) -> Result<()> {
        self.0.rs.check_weight(w)?;
        match (0..self.rank()).find(|&i| self.0.mask & (1 << i) != 0 && w[i] < 0) {
            Some(i) => Err(Error::NotDominant {
                weight: w.label(),
                node: i + 1,
            }),
            None => Ok(()),
        }
    }

    /// Dominant representative of the `W_L`-orbit of `w`.
    #[inline]
    pub fn dominant(&self, w: &Weight) -> Weight {
        let mut d = w.clone();
        self.0.rs.sort_to_dominant(&mut d, self.0.mask);
        d
    }

    /// `gram_scale · (w, 2ρ_L)`; strictly increases along positive roots of
    /// the context.
    #[inline]
    pub fn height(&self, w: &Weight) -> i64 {
        self.0.rs.inner_product_scaled(w, &self.0.two_rho)
    }

    /// Order of the parabolic subgroup `W_J` for `J ⊆` levi nodes.
    pub fn weyl_order(&self, subset: u32) -> u128 {
        if let Some(&o) = self.0.weyl_orders.read().unwrap().get(&subset) {
            return o;
        }
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for r in self.0.rs.positive_roots() {
            if r.support() & !subset == 0 {
                num *= r.height + 1;
                den *= r.height;
            }
        }
        let order = (num / den).to_u128().expect("Weyl group order fits u128");
        self.0.weyl_orders.write().unwrap().insert(subset, order);
        order
    }

    /// Size of the `W_L`-orbit of a dominant weight.
    pub fn orbit_size(&self, dominant: &Weight) -> u128 {
        let stab = (0..self.rank())
            .filter(|&i| self.0.mask & (1 << i) != 0 && dominant[i] == 0)
            .fold(0u32, |m, i| m | (1 << i));
        self.weyl_order(self.0.mask) / self.weyl_order(stab)
    }

    /// All weights in the `W_L`-orbit of a dominant weight.
    pub fn orbit(&self, dominant: &Weight) -> Vec<Weight> {
        let rs = &self.0.rs;
        let mut seen: FxHashSet<Weight> = FxHashSet::default();
        seen.insert(dominant.clone());
        let mut frontier = vec![dominant.clone()];
        let mut out = vec![dominant.clone()];
        while let Some(w) = frontier.pop() {
            for i in 0..self.rank() {
                if self.0.mask & (1 << i) != 0 && w[i] > 0 {
                    let mut v = w.clone();
                    rs.reflect_in_place(&mut v, i);
                    if seen.insert(v.clone()) {
                        out.push(v.clone());
                        frontier.push(v);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// `∏_{α ∈ Φ_L^+} ⟨λ+ρ, α^∨⟩ / ⟨ρ, α^∨⟩`. The full `ρ` may stand in for
    /// `ρ_L` because their difference is orthogonal to every root of `L`.
    pub fn weyl_dimension(&self, lambda: &Weight) -> Result<BigInt> {
        self.check_dominant(lambda)?;
        Ok(self.weyl_product(lambda))
    }

    fn weyl_product(&self, lambda: &Weight) -> BigInt {
        let shifted = lambda + self.0.rs.rho();
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for r in self.positive_roots() {
            num *= r.pair(&shifted);
            den *= r.pair(self.0.rs.rho());
        }
        num / den
    }

    fn same(&self, other: &SymmetryContext) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.rs.dynkin() == other.0.rs.dynkin() && self.0.mask == other.0.mask)
    }

    /// Dominant weights of the irreducible representation of highest weight
    /// `lambda`: closure of `lambda` under subtraction of positive roots
    /// within the dominant chamber.
    fn dominant_weights_below(&self, lambda: &Weight) -> Vec<Weight> {
        let rs = &self.0.rs;
        let mut seen: FxHashSet<Weight> = FxHashSet::default();
        seen.insert(lambda.clone());
        let mut stack = vec![lambda.clone()];
        while let Some(mu) = stack.pop() {
            for &ri in &self.0.levi_roots {
                let nu = &mu - &rs.positive_roots()[ri].weight;
                if self.is_dominant(&nu) && !seen.contains(&nu) {
                    seen.insert(nu.clone());
                    stack.push(nu);
                }
            }
        }
        let mut out: Vec<Weight> = seen.into_iter().collect();
        out.sort_by(|a, b| self.height(b).cmp(&self.height(a)).then_with(|| b.cmp(a)));
        out
    }

    /// Freudenthal recursion on dominant weights:
    /// `((λ+ρ,λ+ρ) − (μ+ρ,μ+ρ)) m(μ) = 2 Σ_{α>0} Σ_{k≥1} m(μ+kα) (μ+kα, α)`.
    fn freudenthal<M: Multiplicity>(&self, lambda: &Weight) -> FxHashMap<Weight, M> {
        let rs = &self.0.rs;
        let order = self.dominant_weights_below(lambda);
        let mut mults: FxHashMap<Weight, M> = FxHashMap::default();
        let top = lambda + rs.rho();
        let top_norm = rs.inner_product_scaled(&top, &top);
        mults.insert(lambda.clone(), M::one());
        for mu in order.iter().skip(1) {
            let mut sum = M::zero();
            for r in self.positive_roots() {
                let mut nu = mu + &r.weight;
                loop {
                    let d = self.dominant(&nu);
                    let Some(m) = mults.get(&d) else { break };
                    let ip = rs.inner_product_scaled(&nu, &r.weight);
                    sum += m.clone() * M::from_i64(ip).unwrap();
                    nu += &r.weight;
                }
            }
            let shifted = mu + rs.rho();
            let gap = top_norm - rs.inner_product_scaled(&shifted, &shifted);
            debug_assert!(gap > 0);
            let gap = M::from_i64(gap).unwrap();
            let two_sum = sum * M::from_i64(2).unwrap();
            debug_assert!((two_sum.clone() % gap.clone()).is_zero());
            mults.insert(mu.clone(), two_sum / gap);
        }
        mults
    }

    /// Dominant-weight multiplicities of the irreducible representation of
    /// highest weight `lambda`, memoized per context.
    pub fn irrep<M: Multiplicity>(&self, lambda: &Weight) -> Result<Arc<FxHashMap<Weight, M>>> {
        self.check_dominant(lambda)?;
        let key = (TypeId::of::<M>(), lambda.clone());
        if let Some(hit) = self.0.irreps.read().unwrap().get(&key) {
            return Ok(hit
                .clone()
                .downcast()
                .expect("memo entry has the keyed type"));
        }
        let fresh: Arc<dyn Any + Send + Sync> = Arc::new(self.freudenthal::<M>(lambda));
        let stored = self
            .0
            .irreps
            .write()
            .unwrap()
            .entry(key)
            .or_insert(fresh)
            .clone();
        Ok(stored.downcast().expect("memo entry has the keyed type"))
    }
}

impl fmt::Debug for SymmetryContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SymmetryContext({}, levi nodes {:?})",
            self.0.rs.dynkin(),
            self.levi_nodes()
        )
    }
}

impl PartialEq for SymmetryContext {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

/// A `W_L`-invariant, finitely supported multiplicity function, stored on
/// dominant weights. Virtual characters (negative entries) are allowed as
/// intermediate values; [`Character::decompose`] rejects them.
#[derive(Clone)]
pub struct Character<M: Multiplicity = BigInt> {
    ctx: SymmetryContext,
    terms: FxHashMap<Weight, M>,
}

impl<M: Multiplicity> Character<M> {
    pub fn zero(ctx: &SymmetryContext) -> Self {
        Character {
            ctx: ctx.clone(),
            terms: FxHashMap::default(),
        }
    }

    pub fn trivial(ctx: &SymmetryContext) -> Self {
        Self::line(ctx, Weight::zero(ctx.rank()))
    }

    /// One-dimensional character; `weight` must be fixed by `W_L`.
    pub fn line(ctx: &SymmetryContext, weight: Weight) -> Self {
        debug_assert_eq!(ctx.dominant(&(-&weight)), -&weight);
        let mut terms = FxHashMap::default();
        terms.insert(weight, M::one());
        Character {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// Builds a character from its complete weight multiset, checking
    /// `W_L`-invariance.
    pub fn from_weights<I>(ctx: &SymmetryContext, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Weight, M)>,
    {
        let mut all: FxHashMap<Weight, M> = FxHashMap::default();
        for (w, m) in weights {
            ctx.root_system().check_weight(&w)?;
            *all.entry(w).or_insert_with(M::zero) += m;
        }
        all.retain(|_, m| !m.is_zero());
        let rs = ctx.root_system();
        for (w, m) in &all {
            let broken = (0..ctx.rank())
                .filter(|i| ctx.mask() & (1 << i) != 0)
                .any(|i| {
                    let mut v = w.clone();
                    rs.reflect_in_place(&mut v, i);
                    all.get(&v) != Some(m)
                });
            if broken {
                return Err(Error::NotApplicable(format!(
                    "weight multiset is not W_L-invariant at {}",
                    w.label()
                )));
            }
        }
        all.retain(|w, _| ctx.is_dominant(w));
        Ok(Character {
            ctx: ctx.clone(),
            terms: all,
        })
    }

    /// Builds a character from multiplicities on dominant weights.
    pub fn from_dominant<I>(ctx: &SymmetryContext, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Weight, M)>,
    {
        let mut out = Self::zero(ctx);
        for (w, m) in terms {
            ctx.check_dominant(&w)?;
            out.add_term(w, m);
        }
        Ok(out)
    }

    fn add_term(&mut self, w: Weight, m: M) {
        use std::collections::hash_map::Entry;
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += m;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if !m.is_zero() {
                    e.insert(m);
                }
            }
        }
    }

    pub fn context(&self) -> &SymmetryContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct dominant weights stored.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn multiplicity(&self, w: &Weight) -> M {
        self.terms
            .get(&self.ctx.dominant(w))
            .cloned()
            .unwrap_or_else(M::zero)
    }

    /// Dominant weights with their multiplicities, sorted by weight.
    pub fn dominant_terms(&self) -> Vec<(&Weight, &M)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn dimension(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(w, m)| m.to_bigint() * BigInt::from(self.ctx.orbit_size(w)))
            .sum()
    }

    /// Number of distinct weights of the full support.
    pub fn support_size(&self) -> u128 {
        self.terms.keys().map(|w| self.ctx.orbit_size(w)).sum()
    }

    /// The complete weight multiset, sorted by weight.
    pub fn expand(&self) -> Vec<(Weight, M)> {
        let mut out: Vec<(Weight, M)> = self
            .terms
            .iter()
            .flat_map(|(w, m)| self.ctx.orbit(w).into_iter().map(move |v| (v, m.clone())))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn is_genuine(&self) -> bool {
        self.terms.values().all(|m| !m.is_negative())
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (w, m) in &other.terms {
            out.add_term(w.clone(), m.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (w, m) in &other.terms {
            out.add_term(w.clone(), -m.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &M) -> Self {
        let mut out = Self::zero(&self.ctx);
        if k.is_zero() {
            return out;
        }
        out.terms = self
            .terms
            .iter()
            .map(|(w, m)| (w.clone(), m.clone() * k.clone()))
            .collect();
        out
    }

    /// Tensor with the one-dimensional character of a `W_L`-fixed weight.
    pub fn shift(&self, by: &Weight) -> Result<Self> {
        self.ctx.root_system().check_weight(by)?;
        if let Some(i) =
            (0..self.ctx.rank()).find(|&i| self.ctx.mask() & (1 << i) != 0 && by[i] != 0)
        {
            return Err(Error::InvalidTwist { node: i + 1 });
        }
        Ok(Character {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, m)| (w + by, m.clone()))
                .collect(),
        })
    }

    /// Adams operation `ψ^k`: every weight scaled by `k`. Scaling by a
    /// positive integer maps dominant weights to dominant weights and keeps
    /// stabilizers, so the compressed form is preserved.
    pub fn adams(&self, k: u32) -> Self {
        assert!(k >= 1, "Adams operations are indexed by k ≥ 1");
        Character {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, m)| (w.scaled(k as i32), m.clone()))
                .collect(),
        }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.tensor_with_budget(other, &Budget::unlimited())
    }

    pub fn tensor_with_budget(&self, other: &Self, budget: &Budget) -> Result<Self> {
        self.check_ctx(other)?;
        let (small, large) = if self.support_size() <= other.support_size() {
            (self, other)
        } else {
            (other, self)
        };
        large.tensor_full(&small.expand(), budget)
    }

    /// Product of `self` with a character given by its complete weight list
    /// `full`. For dominant `β` and any weight `α`, the orbit sum of
    /// `e^β · A` contributes `o(β)/o(γ) · A(α)` at `γ = dom(β+α)`; the
    /// division by `o(γ)` happens once per target and is exact.
    fn tensor_full(&self, full: &[(Weight, M)], budget: &Budget) -> Result<Self> {
        let ctx = &self.ctx;
        let rs = ctx.root_system();
        let mask = ctx.mask();
        let terms: Vec<(&Weight, &M)> = self.terms.iter().collect();
        let chunk = (terms.len() / (4 * rayon::current_num_threads()).max(1)).clamp(16, 4096);
        let acc = terms
            .par_chunks(chunk)
            .map(|part| -> Result<FxHashMap<Weight, M>> {
                budget.check_time()?;
                let mut local: FxHashMap<Weight, M> = FxHashMap::default();
                for (beta, mb) in part {
                    let coeff = (*mb).clone() * M::from_count(ctx.orbit_size(beta));
                    for (alpha, ma) in full {
                        let mut g = *beta + alpha;
                        rs.sort_to_dominant(&mut g, mask);
                        let v = coeff.clone() * ma.clone();
                        match local.get_mut(&g) {
                            Some(x) => *x += v,
                            None => {
                                local.insert(g, v);
                            }
                        }
                    }
                }
                budget.check_weights(local.len())?;
                Ok(local)
            })
            .try_reduce(FxHashMap::default, |mut a, mut b| {
                if a.len() < b.len() {
                    std::mem::swap(&mut a, &mut b);
                }
                for (w, m) in b {
                    match a.get_mut(&w) {
                        Some(x) => *x += m,
                        None => {
                            a.insert(w, m);
                        }
                    }
                }
                budget.check_weights(a.len())?;
                Ok(a)
            })?;
        let mut out = Self::zero(ctx);
        for (g, t) in acc {
            if t.is_zero() {
                continue;
            }
            let o = M::from_count(ctx.orbit_size(&g));
            debug_assert!((t.clone() % o.clone()).is_zero());
            out.terms.insert(g, t / o);
        }
        Ok(out)
    }

    pub fn exterior_power(&self, q: usize) -> Result<Self> {
        Ok(self
            .exterior_powers(q, &Budget::unlimited())?
            .pop()
            .expect("at least Λ^0"))
    }

    /// `[Λ^0, Λ^1, …, Λ^q]` via Newton's identity
    /// `k Λ^k = Σ_{i=1}^{k} (−1)^{i−1} ψ^i · Λ^{k−i}`.
    pub fn exterior_powers(&self, q: usize, budget: &Budget) -> Result<Vec<Self>> {
        let full = self.expand();
        let mut powers = vec![Self::trivial(&self.ctx)];
        for k in 1..=q {
            let mut acc = Self::zero(&self.ctx);
            for i in 1..=k {
                let psi: Vec<(Weight, M)> = full
                    .iter()
                    .map(|(w, m)| (w.scaled(i as i32), m.clone()))
                    .collect();
                let prod = powers[k - i].tensor_full(&psi, budget)?;
                for (w, m) in prod.terms {
                    acc.add_term(w, if i % 2 == 1 { m } else { -m });
                }
            }
            let kk = M::from_count(k as u128);
            for (w, m) in acc.terms.iter_mut() {
                if !(m.clone() % kk.clone()).is_zero() {
                    return Err(Error::InexactDivision {
                        q: k,
                        weight: w.label(),
                    });
                }
                *m = m.clone() / kk.clone();
                if m.is_negative() {
                    return Err(Error::NegativeMultiplicity { weight: w.label() });
                }
            }
            budget.check_weights(acc.len())?;
            powers.push(acc);
        }
        Ok(powers)
    }

    pub fn decompose(&self) -> Result<IrrepMultiset<M>> {
        self.decompose_with_budget(&Budget::unlimited())
    }

    /// Leading-term subtraction: repeatedly take the largest remaining
    /// weight under (height, lexicographic) and remove that many copies of
    /// the irreducible character it generates.
    pub fn decompose_with_budget(&self, budget: &Budget) -> Result<IrrepMultiset<M>> {
        let ctx = &self.ctx;
        let mut rem: BTreeMap<(i64, Weight), M> = self
            .terms
            .iter()
            .map(|(w, m)| ((ctx.height(w), w.clone()), m.clone()))
            .collect();
        let mut out = IrrepMultiset::new(ctx);
        let mut steps = 0usize;
        while let Some(((_, top), m)) = rem.pop_last() {
            if m.is_negative() {
                return Err(Error::NegativeMultiplicity {
                    weight: top.label(),
                });
            }
            steps += 1;
            if steps.is_multiple_of(64) {
                budget.check_time()?;
            }
            let irrep = ctx.irrep::<M>(&top)?;
            for (mu, k) in irrep.iter() {
                if *mu == top {
                    continue;
                }
                let key = (ctx.height(mu), mu.clone());
                let v = m.clone() * k.clone();
                match rem.get_mut(&key) {
                    Some(x) => {
                        *x -= v;
                        if x.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -v);
                    }
                }
            }
            out.insert(top, m);
        }
        Ok(out)
    }
}

impl<M: Multiplicity> PartialEq for Character<M> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}

impl<M: Multiplicity> fmt::Debug for Character<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.dominant_terms()
                    .into_iter()
                    .map(|(w, m)| (w.label(), m)),
            )
            .finish()
    }
}

/// Multiset of irreducible representations, keyed by dominant highest weight.
#[derive(Clone)]
pub struct IrrepMultiset<M: Multiplicity = BigInt> {
    ctx: SymmetryContext,
    entries: BTreeMap<Weight, M>,
}

impl<M: Multiplicity> IrrepMultiset<M> {
    pub fn new(ctx: &SymmetryContext) -> Self {
        IrrepMultiset {
            ctx: ctx.clone(),
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<I>(ctx: &SymmetryContext, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Weight, M)>,
    {
        let mut out = Self::new(ctx);
        for (w, m) in entries {
            ctx.check_dominant(&w)?;
            if m.is_negative() {
                return Err(Error::NegativeMultiplicity { weight: w.label() });
            }
            out.insert(w, m);
        }
        Ok(out)
    }

    pub fn insert(&mut self, w: Weight, m: M) {
        if m.is_zero() {
            return;
        }
        let e = self.entries.entry(w).or_insert_with(M::zero);
        *e += m;
    }

    pub fn context(&self) -> &SymmetryContext {
        &self.ctx
    }

    pub fn entries(&self) -> &BTreeMap<Weight, M> {
        &self.entries
    }

    pub fn get(&self, w: &Weight) -> Option<&M> {
        self.entries.get(w)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Weight, &M)> {
        self.entries.iter()
    }

    /// Shift every highest weight by a `W_L`-fixed weight.
    pub fn shift(&self, by: &Weight) -> Result<Self> {
        if let Some(i) =
            (0..self.ctx.rank()).find(|&i| self.ctx.mask() & (1 << i) != 0 && by[i] != 0)
        {
            return Err(Error::InvalidTwist { node: i + 1 });
        }
        Ok(IrrepMultiset {
            ctx: self.ctx.clone(),
            entries: self
                .entries
                .iter()
                .map(|(w, m)| (w + by, m.clone()))
                .collect(),
        })
    }

    /// `Σ m(ν) · dim V^ν`.
    pub fn dimension(&self) -> BigInt {
        self.entries
            .iter()
            .map(|(w, m)| m.to_bigint() * self.ctx.weyl_product(w))
            .sum()
    }

    /// The character `Σ m(ν) · χ_ν`.
    pub fn character(&self) -> Result<Character<M>> {
        let mut out = Character::zero(&self.ctx);
        for (w, m) in &self.entries {
            let irrep = self.ctx.irrep::<M>(w)?;
            for (mu, k) in irrep.iter() {
                out.add_term(mu.clone(), m.clone() * k.clone());
            }
        }
        Ok(out)
    }
}

impl<M: Multiplicity> PartialEq for IrrepMultiset<M> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.entries == other.entries
    }
}

impl<M: Multiplicity> fmt::Debug for IrrepMultiset<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(w, m)| (w.label(), m)))
            .finish()
    }
}

pub fn weyl_dimension(ctx: &SymmetryContext, lambda: &Weight) -> Result<BigInt> {
    ctx.weyl_dimension(lambda)
}

pub fn irrep_character<M: Multiplicity>(
    ctx: &SymmetryContext,
    lambda: &Weight,
) -> Result<Character<M>> {
    let irrep = ctx.irrep::<M>(lambda)?;
    Ok(Character {
        ctx: ctx.clone(),
        terms: (*irrep).clone(),
    })
}

pub fn char_add<M: Multiplicity>(a: &Character<M>, b: &Character<M>) -> Result<Character<M>> {
    a.add(b)
}

pub fn char_tensor<M: Multiplicity>(a: &Character<M>, b: &Character<M>) -> Result<Character<M>> {
    a.tensor(b)
}

pub fn char_adams<M: Multiplicity>(c: &Character<M>, k: u32) -> Character<M> {
    c.adams(k)
}

pub fn exterior_power<M: Multiplicity>(c: &Character<M>, q: usize) -> Result<Character<M>> {
    c.exterior_power(q)
}

pub fn decompose<M: Multiplicity>(c: &Character<M>) -> Result<IrrepMultiset<M>> {
    c.decompose()
}

/// `r_ν = (ν, ω_k)/(ω_k, ω_k)` for the single marked node `k` of `ctx`.
pub fn central_charge(ctx: &SymmetryContext, nu: &Weight) -> Result<Rational64> {
    let marked = ctx.marked_nodes();
    if marked.len() != 1 {
        return Err(Error::NotApplicable(format!(
            "central charge needs exactly one marked node, found {}",
            marked.len()
        )));
    }
    let rs = ctx.root_system();
    let omega = Weight::fundamental(ctx.rank(), marked[0]);
    Ok(rs.inner_product(nu, &omega) / rs.inner_product(&omega, &omega))
}

/// Checks that every summand `ν` of `Λ^q V^λ` carries central charge
/// `q · r_λ`; with full-rank weights this is the only content of the
/// twist `ν + (q r_λ − r_ν) ω_k` relating `L'`- and `L`-decompositions.
pub fn exterior_lemma_twist_check<M: Multiplicity>(
    ctx: &SymmetryContext,
    lambda: &Weight,
    q: usize,
    result: &IrrepMultiset<M>,
) -> Result<bool> {
    let target = central_charge(ctx, lambda)? * q as i64;
    for (nu, _) in result.iter() {
        if central_charge(ctx, nu)? != target {
            return Ok(false);
        }
    }
    Ok(true)
}
