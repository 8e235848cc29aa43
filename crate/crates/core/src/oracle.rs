//! Brute-force ground truth.
//!
//! Everything here deliberately avoids the fast paths of [`crate::game`] and
//! [`crate::brd`]: equilibria come from full row and column scans, and BRD is
//! re-run from every start with its own argmin search and its own stopping
//! rule (first repeated profile after step 0).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::brd::compute_basins;
use crate::error::{Error, Result};
use crate::game::{find_equilibria, ActionProfile, Potential};
use crate::util::ratio_string;

/// In-place lexicographic successor; returns `false` (and leaves the slice
/// sorted ascending) after the last permutation.
pub fn next_permutation(xs: &mut [u32]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        xs.reverse();
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).expect("successor exists");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// The `index`-th permutation of `1..=n` in lexicographic order.
pub fn unrank_permutation(n: usize, mut index: u64) -> Vec<u32> {
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    let mut factorial: u64 = (1..n as u64).product::<u64>().max(1);
    let mut out = Vec::with_capacity(n);
    for remaining in (1..=n).rev() {
        let pick = (index / factorial) as usize;
        index %= factorial;
        out.push(pool.remove(pick));
        if remaining > 1 {
            factorial /= (remaining - 1) as u64;
        }
    }
    out
}

/// Equilibria by exhaustive scan, sorted by value.
pub fn naive_equilibria(p: &Potential) -> Vec<(ActionProfile, u32)> {
    let k = p.k() as u32;
    let mut out = Vec::new();
    for a in 1..=k {
        for b in 1..=k {
            let v = p.get(a, b);
            let row_min = (1..=k).all(|bb| bb == b || p.get(a, bb) > v);
            let col_min = (1..=k).all(|aa| aa == a || p.get(aa, b) > v);
            if row_min && col_min {
                out.push((ActionProfile::new(a, b), v));
            }
        }
    }
    out.sort_by_key(|&(_, v)| v);
    out
}

/// Absorbing profile of BRD from `start`, stopping at the first `t ≥ 1`
/// with BRD(t) = BRD(t+1).
pub fn naive_brd_absorb(p: &Potential, start: ActionProfile) -> Option<ActionProfile> {
    let k = p.k() as u32;
    let mut cur = start;
    for t in 0..=(2 * k + 2) {
        let next = if t % 2 == 0 {
            let a = (1..=k).min_by_key(|&a| p.get(a, cur.col)).expect("k >= 1");
            ActionProfile::new(a, cur.col)
        } else {
            let b = (1..=k).min_by_key(|&b| p.get(cur.row, b)).expect("k >= 1");
            ActionProfile::new(cur.row, b)
        };
        if t >= 1 && next == cur {
            return Some(cur);
        }
        cur = next;
    }
    None
}

/// Checks [`compute_basins`] against BRD from all K² starts, and that every
/// start in a column reaches the same equilibrium.
pub fn verify_basins_all_starts(p: &Potential) -> Result<bool> {
    let k = p.k() as u32;
    let eqs = naive_equilibria(p);
    let rank_of = |x: ActionProfile| eqs.iter().position(|&(e, _)| e == x).map(|i| i as u32 + 1);
    let fast = compute_basins(p)?;
    let mut sizes = vec![0u64; eqs.len()];
    for b in 1..=k {
        for a in 1..=k {
            let Some(rank) = naive_brd_absorb(p, ActionProfile::new(a, b)).and_then(rank_of) else {
                return Ok(false);
            };
            if rank != fast.rank_of_column(b) {
                return Ok(false);
            }
            sizes[rank as usize - 1] += 1;
        }
    }
    Ok(sizes == fast.basin_sizes)
}

/// Statistic whose exact law [`enumerate_exact`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    /// Key `[W]`.
    W,
    /// Key: equilibrium potential values, ascending (W is the length).
    SortedEqValues,
    /// Key: basin sizes, ascending.
    SortedBasinSizes,
    /// Key: `[W, values in rank order…, basin sizes in rank order…]`.
    Joint,
}

/// Exact law of a statistic under the uniform potential.
#[derive(Debug, Clone, Serialize)]
pub struct ExactDistribution {
    pub k: usize,
    pub statistic: StatisticKind,
    /// Number of potentials enumerated, (K²)!.
    pub grids: u64,
    #[serde(serialize_with = "ratio_ser")]
    pub mean_w: BigRational,
    pub support: Vec<SupportPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportPoint {
    pub value: Vec<u32>,
    #[serde(serialize_with = "ratio_ser")]
    pub probability: BigRational,
    #[serde(skip)]
    pub count: u64,
}

fn ratio_ser<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

impl ExactDistribution {
    pub fn probability_of(&self, value: &[u32]) -> BigRational {
        self.support.iter().find(|s| s.value == value).map(|s| s.probability.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Basin sizes by rank from all-starts BRD.
fn naive_basin_sizes(p: &Potential, eqs: &[(ActionProfile, u32)]) -> Result<Vec<u32>> {
    let k = p.k() as u32;
    let mut sizes = vec![0u32; eqs.len()];
    for a in 1..=k {
        for b in 1..=k {
            let x = naive_brd_absorb(p, ActionProfile::new(a, b))
                .ok_or_else(|| Error::internal("all-starts BRD did not absorb"))?;
            let rank = eqs
                .iter()
                .position(|&(e, _)| e == x)
                .ok_or_else(|| Error::internal("BRD absorbed outside the equilibrium set"))?;
            sizes[rank] += 1;
        }
    }
    Ok(sizes)
}

/// Enumerates all (K²)! potentials for K ≤ 3 in lexicographic order.
pub fn enumerate_exact(k: usize, statistic: StatisticKind) -> Result<ExactDistribution> {
    if !(1..=3).contains(&k) {
        return Err(Error::arg(format!("exhaustive enumeration needs k in 1..=3, got {k}")));
    }
    let n = k * k;
    let mut values: Vec<u32> = (1..=n as u32).collect();
    let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    let mut grids = 0u64;
    let mut w_total = 0u64;
    loop {
        let p = Potential::new(k, values.clone())?;
        let eqs = naive_equilibria(&p);
        let fast = find_equilibria(&p);
        let w = eqs.len();
        let consistent = w >= 1
            && w <= k
            && eqs[0].1 == 1
            && fast.entries().iter().zip(&eqs).all(|(e, &(x, v))| e.profile == x && e.potential_value == v)
            && fast.count() == w;
        if !consistent {
            return Err(Error::internal(format!("equilibrium invariants fail on {:?}", p.values())));
        }
        let eq_values = || eqs.iter().map(|&(_, v)| v);
        let key = match statistic {
            StatisticKind::W => vec![w as u32],
            StatisticKind::SortedEqValues => eq_values().collect(),
            StatisticKind::SortedBasinSizes => {
                let mut s = naive_basin_sizes(&p, &eqs)?;
                s.sort_unstable();
                s
            }
            StatisticKind::Joint => {
                let mut key = vec![w as u32];
                key.extend(eq_values());
                key.extend(naive_basin_sizes(&p, &eqs)?);
                key
            }
        };
        *counts.entry(key).or_default() += 1;
        grids += 1;
        w_total += w as u64;
        if !next_permutation(&mut values) {
            break;
        }
    }
    let expected_grids: u64 = (1..=n as u64).product();
    if grids != expected_grids {
        return Err(Error::internal(format!("enumerated {grids} grids, expected {expected_grids}")));
    }
    let total = BigInt::from(grids);
    let support = counts
        .into_iter()
        .map(|(value, count)| SupportPoint { value, probability: BigRational::new(count.into(), total.clone()), count })
        .collect();
    Ok(ExactDistribution { k, statistic, grids, mean_w: BigRational::new(w_total.into(), total), support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{expected_num_equilibria, sample_uniform_potential};
    use num_traits::One;

    #[test]
    fn next_permutation_walks_all_orders() {
        let mut xs = [1, 2, 3, 4];
        let mut seen = vec![xs.to_vec()];
        while next_permutation(&mut xs) {
            assert!(xs.to_vec() > *seen.last().unwrap());
            seen.push(xs.to_vec());
        }
        assert_eq!(seen.len(), 24);
        assert_eq!(xs, [1, 2, 3, 4]);
        for (i, perm) in seen.iter().enumerate() {
            assert_eq!(&unrank_permutation(4, i as u64), perm);
        }
    }

    #[test]
    fn k1_and_k2_laws() {
        let d1 = enumerate_exact(1, StatisticKind::W).unwrap();
        assert_eq!(d1.support.len(), 1);
        assert_eq!(d1.support[0].value, vec![1]);
        assert!(d1.support[0].probability.is_one());
        let d2 = enumerate_exact(2, StatisticKind::W).unwrap();
        assert_eq!(d2.grids, 24);
        assert_eq!(d2.mean_w, expected_num_equilibria(2).unwrap());
        // W = 2 iff the cell holding 2 sits diagonally from 1: 8 of 24 grids.
        assert_eq!(d2.probability_of(&[2]), BigRational::new(1.into(), 3.into()));
        assert!(enumerate_exact(4, StatisticKind::W).is_err());
        assert!(enumerate_exact(0, StatisticKind::W).is_err());
    }

    #[test]
    fn probabilities_sum_to_one() {
        for kind in
            [StatisticKind::W, StatisticKind::SortedEqValues, StatisticKind::SortedBasinSizes, StatisticKind::Joint]
        {
            let d = enumerate_exact(2, kind).unwrap();
            let total: BigRational = d.support.iter().map(|s| s.probability.clone()).sum();
            assert!(total.is_one());
            assert!(d.support.iter().all(|s| s.count > 0));
        }
    }

    #[test]
    fn small_all_starts_check() {
        let p = Potential::from_rows(vec![vec![1, 3], vec![4, 2]]).unwrap();
        assert!(verify_basins_all_starts(&p).unwrap());
        for seed in 0..200 {
            let p = sample_uniform_potential(2 + seed as usize % 7, seed).unwrap();
            assert!(verify_basins_all_starts(&p).unwrap());
        }
    }

    #[test]
    fn json_uses_rational_strings() {
        let json = enumerate_exact(2, StatisticKind::W).unwrap().to_json().unwrap();
        assert!(json.contains("\"mean_w\": \"4/3\""), "{json}");
        assert!(json.contains("\"probability\": \"1/3\""), "{json}");
    }
}
