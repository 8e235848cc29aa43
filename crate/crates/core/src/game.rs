//! Strict ordinal potential games on a K×K action grid.
//!
//! A game is fully described by its potential: a bijection from the K² action
//! profiles onto the ranks `1..=K²`, lower being better for both players.
//! Indices are 1-based everywhere, including in serialized output.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Largest supported number of actions; K² must fit in a `u32`.
pub const MAX_K: usize = 65_535;

/// A pure action profile `(row, col)`, both in `1..=K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionProfile {
    pub row: u32,
    pub col: u32,
}

impl ActionProfile {
    pub fn new(row: u32, col: u32) -> Self {
        ActionProfile { row, col }
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Rank assignment of a strict ordinal potential game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PotentialJson", into = "PotentialJson")]
pub struct Potential {
    k: usize,
    /// Row-major, `values[(row-1)*k + (col-1)]`.
    values: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PotentialJson {
    k: usize,
    values: Vec<Vec<u32>>,
}

impl TryFrom<PotentialJson> for Potential {
    type Error = Error;

    fn try_from(json: PotentialJson) -> Result<Self> {
        let p = Potential::from_rows(json.values)?;
        if p.k != json.k {
            return Err(Error::InvalidPotential(format!("declared k = {} but grid has {} rows", json.k, p.k)));
        }
        Ok(p)
    }
}

impl From<Potential> for PotentialJson {
    fn from(p: Potential) -> Self {
        PotentialJson { k: p.k, values: p.rows().map(<[u32]>::to_vec).collect() }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::arg("k must be at least 1"));
    }
    if k > MAX_K {
        return Err(Error::arg(format!("k must be at most {MAX_K}")));
    }
    Ok(())
}

impl Potential {
    /// Builds a potential from row-major values, checking the bijection.
    pub fn new(k: usize, values: Vec<u32>) -> Result<Self> {
        check_k(k).map_err(|e| Error::InvalidPotential(e.to_string()))?;
        let n = k * k;
        if values.len() != n {
            return Err(Error::InvalidPotential(format!("expected {n} values for k = {k}, got {}", values.len())));
        }
        let mut seen = vec![false; n];
        for &v in &values {
            let idx = v as usize;
            if idx == 0 || idx > n {
                return Err(Error::InvalidPotential(format!("value {v} outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[idx - 1], true) {
                return Err(Error::InvalidPotential(format!("value {v} appears twice")));
            }
        }
        Ok(Potential { k, values })
    }

    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self> {
        let k = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(Error::InvalidPotential(format!("row {} has {} entries, expected {k}", i + 1, row.len())));
        }
        Potential::new(k, rows.into_iter().flatten().collect())
    }

    /// Internal constructor for grids already known to be bijections.
    pub(crate) fn from_raw(k: usize, values: Vec<u32>) -> Self {
        debug_assert_eq!(values.len(), k * k);
        Potential { k, values }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Value at 1-based `(row, col)`.
    pub fn get(&self, row: u32, col: u32) -> u32 {
        self.values[(row as usize - 1) * self.k + (col as usize - 1)]
    }

    pub fn value(&self, at: ActionProfile) -> u32 {
        self.get(at.row, at.col)
    }

    /// Row-major values.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.values.chunks_exact(self.k)
    }

    pub fn contains(&self, at: ActionProfile) -> bool {
        let k = self.k as u32;
        (1..=k).contains(&at.row) && (1..=k).contains(&at.col)
    }

    /// Profile holding each value: `cells[v-1]` is where `v` sits.
    pub fn cells_by_value(&self) -> Vec<ActionProfile> {
        let k = self.k;
        let mut cells = vec![ActionProfile::new(0, 0); k * k];
        for (idx, &v) in self.values.iter().enumerate() {
            cells[v as usize - 1] = ActionProfile::new((idx / k) as u32 + 1, (idx % k) as u32 + 1);
        }
        cells
    }

    /// K lines of K comma-separated integers.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 4);
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV layout of [`Potential::to_csv`]. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim().parse::<u32>().map_err(|_| {
                        Error::InvalidPotential(format!("line {}: '{}' is not an integer", lineno + 1, cell.trim()))
                    })
                })
                .collect::<Result<Vec<u32>>>()?;
            rows.push(row);
        }
        Potential::from_rows(rows)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| match e.classify() {
            serde_json::error::Category::Data => Error::InvalidPotential(e.to_string()),
            _ => Error::Json(e),
        })
    }
}

/// Uniformly random potential: a shuffle of `1..=K²` driven by the seeded
/// generator of [`crate::rng`].
pub fn sample_uniform_potential(k: usize, seed: u64) -> Result<Potential> {
    sample_uniform_potential_with(k, &mut rng_from_seed(seed))
}

pub fn sample_uniform_potential_with<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Potential> {
    check_k(k)?;
    let n = (k * k) as u32;
    let mut values: Vec<u32> = (1..=n).collect();
    values.shuffle(rng);
    Ok(Potential::from_raw(k, values))
}

/// Best replies of both players: the row minimizing each column and the
/// column minimizing each row.
#[derive(Debug, Clone)]
pub struct BestReplies {
    /// `best_row[b-1]`: the row player's best reply to column `b`.
    best_row: Vec<u32>,
    /// `best_col[a-1]`: the column player's best reply to row `a`.
    best_col: Vec<u32>,
}

impl BestReplies {
    pub fn new(p: &Potential) -> Self {
        let k = p.k;
        let mut best_row = vec![1u32; k];
        let mut col_min = p.values[..k].to_vec();
        let mut best_col = Vec::with_capacity(k);
        for (a, row) in p.rows().enumerate() {
            let mut row_min = u32::MAX;
            let mut row_arg = 0;
            for (b, &v) in row.iter().enumerate() {
                if v < row_min {
                    row_min = v;
                    row_arg = b;
                }
                if v < col_min[b] {
                    col_min[b] = v;
                    best_row[b] = a as u32 + 1;
                }
            }
            best_col.push(row_arg as u32 + 1);
        }
        BestReplies { best_row, best_col }
    }

    /// Row player's best reply when the column player plays `col`.
    pub fn row_reply(&self, col: u32) -> u32 {
        self.best_row[col as usize - 1]
    }

    /// Column player's best reply when the row player plays `row`.
    pub fn col_reply(&self, row: u32) -> u32 {
        self.best_col[row as usize - 1]
    }

    pub fn k(&self) -> usize {
        self.best_row.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub profile: ActionProfile,
    pub potential_value: u32,
    /// 1 for the lowest potential value.
    pub rank: u32,
}

/// Pure Nash equilibria sorted by increasing potential value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    entries: Vec<Equilibrium>,
    #[serde(skip)]
    rank_by_row: Vec<u32>,
}

impl EquilibriumSet {
    /// Number of equilibria, W.
    pub fn count(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Equilibrium] {
        &self.entries
    }

    /// Equilibrium of the given 1-based rank.
    pub fn by_rank(&self, rank: u32) -> Option<&Equilibrium> {
        rank.checked_sub(1).and_then(|i| self.entries.get(i as usize))
    }

    /// Rank of `profile` if it is an equilibrium.
    pub fn rank_of(&self, profile: ActionProfile) -> Option<u32> {
        let rank = *self.rank_by_row.get((profile.row as usize).checked_sub(1)?)?;
        (rank != 0 && self.entries[rank as usize - 1].profile == profile).then_some(rank)
    }

    pub fn potential_values(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.potential_value).collect()
    }

    pub fn worst(&self) -> &Equilibrium {
        self.entries.last().expect("every potential has an equilibrium")
    }
}

/// Profiles whose value is the strict minimum of both their row and their column.
pub fn find_equilibria(p: &Potential) -> EquilibriumSet {
    equilibria_from_replies(p, &BestReplies::new(p))
}

pub fn equilibria_from_replies(p: &Potential, replies: &BestReplies) -> EquilibriumSet {
    let k = p.k;
    let mut entries: Vec<Equilibrium> = (1..=k as u32)
        .filter_map(|col| {
            let row = replies.row_reply(col);
            (replies.col_reply(row) == col).then(|| {
                let profile = ActionProfile::new(row, col);
                Equilibrium { profile, potential_value: p.value(profile), rank: 0 }
            })
        })
        .collect();
    entries.sort_unstable_by_key(|e| e.potential_value);
    let mut rank_by_row = vec![0u32; k];
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i as u32 + 1;
        rank_by_row[e.profile.row as usize - 1] = e.rank;
    }
    EquilibriumSet { entries, rank_by_row }
}

/// E[W] = K²/(2K−1) for a uniformly random potential.
pub fn expected_num_equilibria(k: usize) -> Result<BigRational> {
    check_k(k)?;
    let k = BigInt::from(k);
    Ok(BigRational::new(&k * &k, BigInt::from(2) * &k - 1))
}

/// Relabels rows and columns: the value at `(i, j)` moves to
/// `(row_perm[i-1], col_perm[j-1])`. Both permutations are 1-based.
pub fn permute_potential(p: &Potential, row_perm: &[u32], col_perm: &[u32]) -> Result<Potential> {
    check_permutation(p.k, row_perm, "row")?;
    check_permutation(p.k, col_perm, "column")?;
    let k = p.k;
    let mut values = vec![0u32; k * k];
    for (i, row) in p.rows().enumerate() {
        let target = (row_perm[i] as usize - 1) * k;
        for (j, &v) in row.iter().enumerate() {
            values[target + col_perm[j] as usize - 1] = v;
        }
    }
    Ok(Potential::from_raw(k, values))
}

fn check_permutation(k: usize, perm: &[u32], what: &str) -> Result<()> {
    if perm.len() != k {
        return Err(Error::arg(format!("{what} permutation has length {}, expected {k}", perm.len())));
    }
    let mut seen = vec![false; k];
    for &x in perm {
        let ok = (1..=k as u32).contains(&x) && !std::mem::replace(&mut seen[x as usize - 1], true);
        if !ok {
            return Err(Error::arg(format!("{what} permutation is not a bijection of 1..={k}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&[u32]]) -> Potential {
        Potential::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn k1_is_single_cell() {
        let p = sample_uniform_potential(1, 99).unwrap();
        assert_eq!(p.values(), &[1]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_uniform_potential(2, 7).unwrap();
        let b = sample_uniform_potential(2, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_uniform_potential(50, 7).unwrap();
        assert_eq!(c, sample_uniform_potential(50, 7).unwrap());
    }

    #[test]
    fn rejects_k_zero() {
        assert!(matches!(sample_uniform_potential(0, 1), Err(Error::InvalidArgument(_))));
        assert!(expected_num_equilibria(0).is_err());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Potential::new(2, vec![1, 2, 2, 4]).is_err());
        assert!(Potential::new(2, vec![1, 2, 3, 5]).is_err());
        assert!(Potential::new(2, vec![1, 2, 3]).is_err());
        assert!(Potential::from_rows(vec![vec![1, 2], vec![3]]).is_err());
    }

    #[test]
    fn two_equilibria_on_the_diagonal() {
        let eq = find_equilibria(&grid(&[&[1, 3], &[4, 2]]));
        assert_eq!(eq.count(), 2);
        assert_eq!(
            eq.entries(),
            &[
                Equilibrium { profile: ActionProfile::new(1, 1), potential_value: 1, rank: 1 },
                Equilibrium { profile: ActionProfile::new(2, 2), potential_value: 2, rank: 2 },
            ]
        );
        assert_eq!(eq.rank_of(ActionProfile::new(2, 2)), Some(2));
        assert_eq!(eq.rank_of(ActionProfile::new(2, 1)), None);
    }

    #[test]
    fn single_equilibrium() {
        let eq = find_equilibria(&grid(&[&[1, 2], &[3, 4]]));
        assert_eq!(eq.count(), 1);
        assert_eq!(eq.entries()[0].profile, ActionProfile::new(1, 1));
        assert_eq!(eq.worst().potential_value, 1);
    }

    #[test]
    fn expected_counts() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(expected_num_equilibria(1).unwrap(), r(1, 1));
        assert_eq!(expected_num_equilibria(2).unwrap(), r(4, 3));
        assert_eq!(expected_num_equilibria(3).unwrap(), r(9, 5));
    }

    #[test]
    fn permutation_moves_cells_and_equilibria() {
        let p = grid(&[&[1, 3], &[4, 2]]);
        assert_eq!(permute_potential(&p, &[1, 2], &[1, 2]).unwrap(), p);
        let q = permute_potential(&p, &[2, 1], &[1, 2]).unwrap();
        assert_eq!(q, grid(&[&[4, 2], &[1, 3]]));
        let profiles: Vec<_> = find_equilibria(&q).entries().iter().map(|e| e.profile).collect();
        assert_eq!(profiles, vec![ActionProfile::new(2, 1), ActionProfile::new(1, 2)]);
        assert!(permute_potential(&p, &[1, 1], &[1, 2]).is_err());
        assert!(permute_potential(&p, &[1, 2], &[0, 2]).is_err());
        assert!(permute_potential(&p, &[1, 2, 3], &[1, 2]).is_err());
    }

    #[test]
    fn csv_and_json_roundtrip() {
        let p = sample_uniform_potential(5, 3).unwrap();
        assert_eq!(Potential::from_csv(&p.to_csv()).unwrap(), p);
        assert_eq!(Potential::from_json(&p.to_json().unwrap()).unwrap(), p);
        let json = grid(&[&[1, 3], &[4, 2]]).to_json().unwrap();
        assert_eq!(json, r#"{"k":2,"values":[[1,3],[4,2]]}"#);
        assert!(Potential::from_json(r#"{"k":3,"values":[[1,3],[4,2]]}"#).is_err());
        assert!(Potential::from_csv("# header\n1,2\n3,x\n").is_err());
        assert_eq!(Potential::from_csv("# header\n\n1,3\n4,2\n").unwrap(), grid(&[&[1, 3], &[4, 2]]));
    }

    #[test]
    fn cells_by_value_inverts_grid() {
        let p = sample_uniform_potential(7, 11).unwrap();
        for (i, cell) in p.cells_by_value().into_iter().enumerate() {
            assert_eq!(p.value(cell), i as u32 + 1);
        }
    }
}
