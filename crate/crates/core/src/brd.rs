//! Best-response dynamics and basins of attraction.
//!
//! The row player moves at even steps, the column player at odd steps; each
//! move goes to the strict minimizer of the current column (row player) or
//! row (column player). A run is absorbed once a row move and the following
//! column move both leave the profile unchanged.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{equilibria_from_replies, ActionProfile, BestReplies, EquilibriumSet, Potential};
use crate::theory::h_cumulative;

/// One best-response run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrdTrace {
    pub start: ActionProfile,
    /// `path[t]` is the profile after `t` steps, stationary steps included.
    pub path: Vec<ActionProfile>,
    pub absorbed_at: ActionProfile,
    /// Number of steps that changed the profile.
    pub steps_to_absorb: usize,
    /// All steps executed, including the closing stationary round.
    pub iterations: usize,
    pub absorbed_rank: u32,
}

pub fn brd_run(p: &Potential, start: ActionProfile) -> Result<BrdTrace> {
    if !p.contains(start) {
        return Err(Error::arg(format!("start {start} outside [1,{}]x[1,{}]", p.k(), p.k())));
    }
    let replies = BestReplies::new(p);
    let equilibria = equilibria_from_replies(p, &replies);
    brd_run_with(&replies, &equilibria, start)
}

/// [`brd_run`] against precomputed best replies and equilibria of one game.
pub fn brd_run_with(replies: &BestReplies, equilibria: &EquilibriumSet, start: ActionProfile) -> Result<BrdTrace> {
    let k = replies.k();
    let max_iterations = 2 * k + 4;
    let mut path = vec![start];
    let mut current = start;
    let mut changes = 0usize;
    let mut row_move_idle = false;
    let mut t = 0usize;
    loop {
        if t >= max_iterations {
            return Err(Error::internal(format!("BRD from {start} not absorbed within {max_iterations} steps")));
        }
        let row_turn = t.is_multiple_of(2);
        let next = if row_turn {
            ActionProfile::new(replies.row_reply(current.col), current.col)
        } else {
            ActionProfile::new(current.row, replies.col_reply(current.row))
        };
        path.push(next);
        t += 1;
        if next != current {
            changes += 1;
            row_move_idle = false;
            current = next;
        } else if row_turn {
            row_move_idle = true;
        } else if row_move_idle {
            break;
        }
    }
    if changes > 2 * k {
        return Err(Error::internal(format!("BRD from {start} changed profile {changes} times, bound is {}", 2 * k)));
    }
    let absorbed_rank = equilibria.rank_of(current).ok_or_else(|| {
        Error::internal(format!("BRD from {start} stopped at {current}, which is not an equilibrium"))
    })?;
    Ok(BrdTrace { start, path, absorbed_at: current, steps_to_absorb: changes, iterations: t, absorbed_rank })
}

/// Basin of every equilibrium, resolved per starting column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasinMap {
    /// `column_to_rank[b-1]`: rank of the equilibrium absorbing column `b`.
    pub column_to_rank: Vec<u32>,
    /// `basin_sizes[r-1]`: number of profiles absorbed by the rank-`r` equilibrium.
    pub basin_sizes: Vec<u64>,
}

impl BasinMap {
    pub fn rank_of_column(&self, col: u32) -> u32 {
        self.column_to_rank[col as usize - 1]
    }

    pub fn size_of_rank(&self, rank: u32) -> Option<u64> {
        rank.checked_sub(1).and_then(|i| self.basin_sizes.get(i as usize)).copied()
    }

    pub fn total(&self) -> u64 {
        self.basin_sizes.iter().sum()
    }

    pub fn sorted_sizes(&self) -> Vec<u64> {
        let mut s = self.basin_sizes.clone();
        s.sort_unstable();
        s
    }
}

/// Runs BRD from row 1 of every column. The first move is along the column,
/// so every start in the same column ends at the same equilibrium.
pub fn compute_basins(p: &Potential) -> Result<BasinMap> {
    let replies = BestReplies::new(p);
    let equilibria = equilibria_from_replies(p, &replies);
    basins_with(&replies, &equilibria)
}

pub fn basins_with(replies: &BestReplies, equilibria: &EquilibriumSet) -> Result<BasinMap> {
    let k = replies.k();
    let mut basin_sizes = vec![0u64; equilibria.count()];
    let mut column_to_rank = Vec::with_capacity(k);
    for col in 1..=k as u32 {
        let rank = brd_run_with(replies, equilibria, ActionProfile::new(1, col))?.absorbed_rank;
        column_to_rank.push(rank);
        basin_sizes[rank as usize - 1] += k as u64;
    }
    Ok(BasinMap { column_to_rank, basin_sizes })
}

/// Probability that BRD follows one fixed admissible path of length `path_len`
/// on a uniform game: ∏_{t=1}^{T} 1/(tK − h(t)).
pub fn path_probability(k: usize, path_len: usize) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::arg("k must be at least 1"));
    }
    if path_len == 0 || path_len > 2 * k {
        return Err(Error::arg(format!("path length must be in 1..={}, got {path_len}", 2 * k)));
    }
    let k = k as u64;
    let mut denominator = BigInt::one();
    for t in 1..=path_len as u64 {
        denominator *= BigInt::from(t * k - h_cumulative(t));
    }
    Ok(BigRational::new(BigInt::one(), denominator))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::sample_uniform_potential;

    fn grid(rows: &[&[u32]]) -> Potential {
        Potential::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn hand_traces() {
        let p = grid(&[&[1, 3], &[4, 2]]);
        let tr = brd_run(&p, ActionProfile::new(1, 2)).unwrap();
        assert_eq!(tr.absorbed_at, ActionProfile::new(2, 2));
        assert_eq!(tr.absorbed_rank, 2);
        assert_eq!(tr.steps_to_absorb, 1);
        assert_eq!(tr.path[1], ActionProfile::new(2, 2));

        let q = grid(&[&[1, 2], &[3, 4]]);
        let tr = brd_run(&q, ActionProfile::new(2, 2)).unwrap();
        assert_eq!(&tr.path[..3], &[ActionProfile::new(2, 2), ActionProfile::new(1, 2), ActionProfile::new(1, 1)]);
        assert_eq!(tr.absorbed_at, ActionProfile::new(1, 1));
        assert_eq!(tr.absorbed_rank, 1);
        assert_eq!(tr.steps_to_absorb, 2);
    }

    #[test]
    fn equilibrium_start_stays() {
        let p = grid(&[&[1, 3], &[4, 2]]);
        let tr = brd_run(&p, ActionProfile::new(2, 2)).unwrap();
        assert_eq!(tr.absorbed_at, ActionProfile::new(2, 2));
        assert_eq!(tr.steps_to_absorb, 0);
        assert!(tr.path.iter().all(|&x| x == ActionProfile::new(2, 2)));
    }

    #[test]
    fn out_of_range_start_rejected() {
        let p = grid(&[&[1, 3], &[4, 2]]);
        assert!(brd_run(&p, ActionProfile::new(3, 1)).is_err());
        assert!(brd_run(&p, ActionProfile::new(1, 0)).is_err());
    }

    #[test]
    fn small_basins() {
        let b = compute_basins(&grid(&[&[1, 3], &[4, 2]])).unwrap();
        assert_eq!(b.column_to_rank, vec![1, 2]);
        assert_eq!(b.basin_sizes, vec![2, 2]);
        let b = compute_basins(&grid(&[&[1, 2], &[3, 4]])).unwrap();
        assert_eq!(b.column_to_rank, vec![1, 1]);
        assert_eq!(b.basin_sizes, vec![4]);
    }

    #[test]
    fn trace_invariants_on_random_games() {
        for seed in 0..200 {
            let k = 2 + (seed as usize % 9);
            let p = sample_uniform_potential(k, seed).unwrap();
            for row in 1..=k as u32 {
                for col in 1..=k as u32 {
                    let tr = brd_run(&p, ActionProfile::new(row, col)).unwrap();
                    assert!(tr.steps_to_absorb <= 2 * k);
                    for (t, w) in tr.path.windows(2).enumerate() {
                        if t % 2 == 0 {
                            assert_eq!(w[0].col, w[1].col);
                        } else {
                            assert_eq!(w[0].row, w[1].row);
                        }
                        if w[0] != w[1] {
                            assert!(p.value(w[1]) < p.value(w[0]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn path_probability_values() {
        let expected = BigRational::new(1.into(), BigInt::from(10u64 * 19 * 28 * 36 * 44 * 51));
        assert_eq!(path_probability(10, 6).unwrap(), expected);
        assert_eq!(path_probability(7, 1).unwrap(), BigRational::new(1.into(), 7.into()));
        assert_eq!(path_probability(5, 3).unwrap(), BigRational::new(1.into(), (5 * 9 * 13).into()));
        assert!(path_probability(5, 0).is_err());
        assert!(path_probability(5, 11).is_err());
        assert!(path_probability(5, 10).is_ok());
    }
}
