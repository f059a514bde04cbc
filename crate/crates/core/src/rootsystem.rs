//! Root systems of the simple Dynkin types in Bourbaki numbering.
//!
//! Weights are integral vectors in the fundamental-weight basis. The Cartan
//! matrix is stored as `cartan[i][j] = ⟨α_i, α_j^∨⟩`, so row `i` is the
//! simple root `α_i` written in fundamental coordinates. Long roots have
//! squared length 2.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::weight::Weight;

/// Largest rank accepted; node subsets are stored as `u32` bitmasks.
pub const MAX_RANK: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    pub fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }
}

impl FromStr for Series {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Series::A),
            "B" => Ok(Series::B),
            "C" => Ok(Series::C),
            "D" => Ok(Series::D),
            "E" => Ok(Series::E),
            "F" => Ok(Series::F),
            "G" => Ok(Series::G),
            _ => Err(Error::ParseDynkin(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DynkinType {
    series: Series,
    rank: usize,
}

impl DynkinType {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        let constraint = match series {
            Series::A if rank < 1 => Some("type A requires rank ≥ 1"),
            Series::B if rank < 2 => Some("type B requires rank ≥ 2"),
            Series::C if rank < 2 => Some("type C requires rank ≥ 2"),
            Series::D if rank < 3 => Some("type D requires rank ≥ 3"),
            Series::E if !(6..=8).contains(&rank) => Some("type E requires rank 6, 7 or 8"),
            Series::F if rank != 4 => Some("type F requires rank 4"),
            Series::G if rank != 2 => Some("type G requires rank 2"),
            _ if rank > MAX_RANK => Some("rank exceeds the supported maximum of 24"),
            _ => None,
        };
        match constraint {
            Some(constraint) => Err(Error::InvalidDynkin {
                series,
                rank,
                constraint,
            }),
            None => Ok(DynkinType { series, rank }),
        }
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_simply_laced(&self) -> bool {
        matches!(self.series, Series::A | Series::D | Series::E)
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series.letter(), self.rank)
    }
}

impl FromStr for DynkinType {
    type Err = Error;
    /// Accepts `E8`, `E_8` or `e8`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::ParseDynkin(s.to_string());
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?;
        let series: Series = letter.to_string().parse()?;
        let rest = chars.as_str().trim_start_matches('_');
        let rank = rest.parse::<usize>().map_err(|_| bad())?;
        DynkinType::new(series, rank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositiveRoot {
    /// Coefficients over the simple roots.
    pub simple: SmallVec<[i32; 8]>,
    /// The same root in fundamental coordinates.
    pub weight: Weight,
    /// Coefficients of the coroot over the simple coroots.
    pub coroot: SmallVec<[i32; 8]>,
    pub height: u32,
    /// Squared length `(α, α)`.
    pub norm: Rational64,
}

impl PositiveRoot {
    /// Pairing `⟨w, α^∨⟩`.
    pub fn pair(&self, w: &Weight) -> i64 {
        self.coroot
            .iter()
            .zip(w.coords())
            .map(|(&c, &x)| c as i64 * x as i64)
            .sum()
    }

    /// Support bitmask over the simple roots.
    pub fn support(&self) -> u32 {
        self.simple
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    pub fn is_long(&self) -> bool {
        self.norm == Rational64::from_integer(2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DominantConjugate {
    Regular { dominant: Weight, length: usize },
    Singular,
}

#[derive(Debug)]
pub struct RootSystem {
    dynkin: DynkinType,
    cartan: Vec<Vec<i32>>,
    symmetrizer: Vec<Rational64>,
    positive_roots: Vec<PositiveRoot>,
    rho: Weight,
    highest_long_root: Weight,
    highest_short_root: Weight,
    gram: Vec<Vec<Rational64>>,
    gram_scale: i64,
    gram_int: Vec<Vec<i64>>,
    /// Off-diagonal non-zero Cartan entries per row, for sparse reflections.
    neighbors: Vec<Vec<(usize, i32)>>,
}

fn cartan_matrix(t: DynkinType) -> Vec<Vec<i32>> {
    let n = t.rank;
    let mut a = vec![vec![0i32; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let link = |a: &mut Vec<Vec<i32>>, i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    match t.series {
        Series::A => (0..n - 1).for_each(|i| link(&mut a, i, i + 1)),
        Series::B => {
            (0..n - 1).for_each(|i| link(&mut a, i, i + 1));
            a[n - 2][n - 1] = -2;
        }
        Series::C => {
            (0..n - 1).for_each(|i| link(&mut a, i, i + 1));
            a[n - 1][n - 2] = -2;
        }
        Series::D => {
            (0..n - 2).for_each(|i| link(&mut a, i, i + 1));
            link(&mut a, n - 3, n - 1);
        }
        Series::E => {
            link(&mut a, 0, 2);
            link(&mut a, 1, 3);
            (2..n - 1).for_each(|i| link(&mut a, i, i + 1));
        }
        Series::F => {
            link(&mut a, 0, 1);
            link(&mut a, 2, 3);
            a[1][2] = -2;
            a[2][1] = -1;
        }
        Series::G => {
            a[0][1] = -1;
            a[1][0] = -3;
        }
    }
    a
}

/// `d_i = (α_i, α_i)/2` with long roots normalized to 1.
fn symmetrizer(t: DynkinType) -> Vec<Rational64> {
    let n = t.rank;
    let one = Rational64::one();
    let half = Rational64::new(1, 2);
    match t.series {
        Series::A | Series::D | Series::E => vec![one; n],
        Series::B => (0..n)
            .map(|i| if i == n - 1 { half } else { one })
            .collect(),
        Series::C => (0..n)
            .map(|i| if i == n - 1 { one } else { half })
            .collect(),
        Series::F => vec![one, one, half, half],
        Series::G => vec![Rational64::new(1, 3), one],
    }
}

fn invert(m: &[Vec<Rational64>]) -> Vec<Vec<Rational64>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational64>> = m.to_vec();
    let mut inv: Vec<Vec<Rational64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational64::one()
                    } else {
                        Rational64::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("Cartan matrix is invertible");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let (x, y) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * x;
                    inv[r][j] -= f * y;
                }
            }
        }
    }
    inv
}

fn generate_positive_roots(cartan: &[Vec<i32>]) -> Vec<SmallVec<[i32; 8]>> {
    let n = cartan.len();
    let unit = |i: usize| -> SmallVec<[i32; 8]> {
        let mut v = SmallVec::from_elem(0, n);
        v[i] = 1;
        v
    };
    let mut seen: FxHashSet<SmallVec<[i32; 8]>> = FxHashSet::default();
    let mut roots = Vec::new();
    let mut level: Vec<SmallVec<[i32; 8]>> = (0..n).map(unit).collect();
    seen.extend(level.iter().cloned());
    while !level.is_empty() {
        roots.extend(level.iter().cloned());
        let mut next = Vec::new();
        for beta in &level {
            for i in 0..n {
                // α_i-string through β: p - q = ⟨β, α_i^∨⟩.
                let mut p = 0;
                loop {
                    let mut down = beta.clone();
                    down[i] -= p + 1;
                    if seen.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i32 = (0..n).map(|j| beta[j] * cartan[j][i]).sum();
                if p - pairing > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if seen.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        level = next;
    }
    roots
}

impl RootSystem {
    pub fn new(dynkin: DynkinType) -> Self {
        let n = dynkin.rank;
        let cartan = cartan_matrix(dynkin);
        let sym = symmetrizer(dynkin);
        for i in 0..n {
            for j in 0..n {
                debug_assert_eq!(
                    sym[j] * cartan[i][j] as i64,
                    sym[i] * cartan[j][i] as i64,
                    "symmetrizer does not symmetrize the Cartan matrix"
                );
            }
        }

        let mut roots: Vec<PositiveRoot> = generate_positive_roots(&cartan)
            .into_iter()
            .map(|simple| {
                let mut weight = Weight::zero(n);
                for (j, &b) in simple.iter().enumerate() {
                    for k in 0..n {
                        weight[k] += b * cartan[j][k];
                    }
                }
                let mut norm = Rational64::zero();
                for j in 0..n {
                    for k in 0..n {
                        norm += sym[k] * (simple[j] * simple[k] * cartan[j][k]) as i64;
                    }
                }
                let coroot = simple
                    .iter()
                    .zip(&sym)
                    .map(|(&b, &d)| {
                        let c = d * 2 * b as i64 / norm;
                        debug_assert!(c.is_integer());
                        c.to_integer() as i32
                    })
                    .collect();
                let height = simple.iter().sum::<i32>() as u32;
                PositiveRoot {
                    simple,
                    weight,
                    coroot,
                    height,
                    norm,
                }
            })
            .collect();
        roots.sort_by(|a, b| {
            a.height
                .cmp(&b.height)
                .then_with(|| a.simple.cmp(&b.simple))
        });

        let highest_long_root = roots.last().expect("non-empty root system").weight.clone();
        let highest_short_root = roots
            .iter()
            .filter(|r| !r.is_long())
            .max_by_key(|r| r.height)
            .map(|r| r.weight.clone())
            .unwrap_or_else(|| highest_long_root.clone());

        let cartan_q: Vec<Vec<Rational64>> = cartan
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| Rational64::from_integer(x as i64))
                    .collect()
            })
            .collect();
        let inv = invert(&cartan_q);
        let gram: Vec<Vec<Rational64>> = (0..n)
            .map(|i| (0..n).map(|j| inv[i][j] * sym[j]).collect())
            .collect();
        let gram_scale = gram
            .iter()
            .flatten()
            .fold(1i64, |acc, x| acc.lcm(x.denom()));
        let gram_int = gram
            .iter()
            .map(|row| row.iter().map(|x| (x * gram_scale).to_integer()).collect())
            .collect();

        let neighbors = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && cartan[i][j] != 0)
                    .map(|j| (j, cartan[i][j]))
                    .collect()
            })
            .collect();

        RootSystem {
            dynkin,
            cartan,
            symmetrizer: sym,
            positive_roots: roots,
            rho: Weight::new(&vec![1; n]),
            highest_long_root,
            highest_short_root,
            gram,
            gram_scale,
            gram_int,
            neighbors,
        }
    }

    /// Process-wide shared instance per Dynkin type.
    pub fn shared(dynkin: DynkinType) -> Arc<RootSystem> {
        static CACHE: OnceLock<Mutex<FxHashMap<DynkinType, Arc<RootSystem>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(rs) = cache.lock().unwrap().get(&dynkin) {
            return rs.clone();
        }
        let rs = Arc::new(RootSystem::new(dynkin));
        cache.lock().unwrap().entry(dynkin).or_insert(rs).clone()
    }

    pub fn dynkin(&self) -> DynkinType {
        self.dynkin
    }

    pub fn rank(&self) -> usize {
        self.dynkin.rank
    }

    pub fn all_nodes(&self) -> u32 {
        (1u32 << self.rank()) - 1
    }

    pub fn cartan(&self) -> &[Vec<i32>] {
        &self.cartan
    }

    pub fn symmetrizer(&self) -> &[Rational64] {
        &self.symmetrizer
    }

    pub fn positive_roots(&self) -> &[PositiveRoot] {
        &self.positive_roots
    }

    pub fn rho(&self) -> &Weight {
        &self.rho
    }

    pub fn highest_long_root(&self) -> &Weight {
        &self.highest_long_root
    }

    pub fn highest_short_root(&self) -> &Weight {
        &self.highest_short_root
    }

    /// `(ω_i, ω_j)`.
    pub fn gram(&self) -> &[Vec<Rational64>] {
        &self.gram
    }

    /// The simple root `α_i` (0-based index) in fundamental coordinates.
    pub fn simple_root(&self, i: usize) -> Weight {
        Weight::new(&self.cartan[i])
    }

    pub fn check_weight(&self, w: &Weight) -> Result<()> {
        if w.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: w.rank(),
            });
        }
        Ok(())
    }

    fn check_node(&self, node: usize) -> Result<usize> {
        if node == 0 || node > self.rank() {
            return Err(Error::NodeOutOfRange {
                node,
                rank: self.rank(),
            });
        }
        Ok(node - 1)
    }

    /// Simple reflection at the 1-based node `node`.
    pub fn reflect(&self, w: &Weight, node: usize) -> Result<Weight> {
        self.check_weight(w)?;
        let i = self.check_node(node)?;
        let mut out = w.clone();
        self.reflect_in_place(&mut out, i);
        Ok(out)
    }

    /// `s_i(w) = w − ⟨w, α_i^∨⟩ α_i` for a 0-based index.
    #[inline]
    pub fn reflect_in_place(&self, w: &mut Weight, i: usize) {
        let c = w[i];
        if c == 0 {
            return;
        }
        w[i] = -c;
        for &(j, a) in &self.neighbors[i] {
            w[j] -= c * a;
        }
    }

    /// Moves `w` into the dominant chamber of the reflection subgroup
    /// generated by the nodes in `mask`; returns the number of reflections.
    #[inline]
    pub fn sort_to_dominant(&self, w: &mut Weight, mask: u32) -> usize {
        let mut length = 0;
        loop {
            let mut m = mask;
            let mut hit = None;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                if w[i] < 0 {
                    hit = Some(i);
                    break;
                }
                m &= m - 1;
            }
            match hit {
                Some(i) => {
                    self.reflect_in_place(w, i);
                    length += 1;
                }
                None => return length,
            }
        }
    }

    pub fn dominant_conjugate(&self, w: &Weight) -> DominantConjugate {
        self.dominant_conjugate_in(w, self.all_nodes())
    }

    /// Chamber sort in the subgroup generated by `mask`; a zero coordinate
    /// at a node of `mask` means a non-trivial stabilizer.
    pub fn dominant_conjugate_in(&self, w: &Weight, mask: u32) -> DominantConjugate {
        let mut d = w.clone();
        let length = self.sort_to_dominant(&mut d, mask);
        let singular = (0..self.rank()).any(|i| mask & (1 << i) != 0 && d[i] == 0);
        if singular {
            DominantConjugate::Singular
        } else {
            DominantConjugate::Regular {
                dominant: d,
                length,
            }
        }
    }

    pub fn inner_product(&self, a: &Weight, b: &Weight) -> Rational64 {
        Rational64::new(self.inner_product_scaled(a, b), self.gram_scale)
    }

    /// `gram_scale · (a, b)`, an integer.
    #[inline]
    pub fn inner_product_scaled(&self, a: &Weight, b: &Weight) -> i64 {
        let n = self.rank();
        let mut total = 0i64;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            let row = &self.gram_int[i];
            let mut s = 0i64;
            for j in 0..n {
                s += row[j] * b[j] as i64;
            }
            total += a[i] as i64 * s;
        }
        total
    }

    pub fn gram_scale(&self) -> i64 {
        self.gram_scale
    }
}
