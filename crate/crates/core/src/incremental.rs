//! Incremental construction of a random potential.
//!
//! Values `1, 2, …, K²` are placed one at a time. Rows and columns are
//! labelled in order of first appearance, so after `t` placements the filled
//! cells lie in rows `1..=R_t` and columns `1..=C_t`. At the step placing
//! value `t+1` a new row opens with probability `(K−R_t)K/(K²−t)`, the share
//! of empty cells lying in empty rows; a new row also opens a new column with
//! probability `(K−C_t)/K`. Otherwise the value lands on a uniformly random
//! empty cell of the occupied rows, opening a new column if that cell lies in
//! an empty one. A value opening both a new row and a new column is *green*:
//! the greens are exactly the equilibria of the finished game, in rank order.
//!
//! The empty cell in the occupied rows is found by rejection from all `R_t·K`
//! cells of those rows. The first candidate drives the simplified processes
//! `C̃` (which ignores column openings found only after a resample), `G̃`
//! and the resample counter `D`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ActionProfile, Potential, MAX_K};
use crate::rng::{rng_from_seed, GameRng};

/// Counters after `t` placements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: u64,
    #[serde(rename = "R")]
    pub r: u64,
    #[serde(rename = "C")]
    pub c: u64,
    #[serde(rename = "G")]
    pub g: u64,
    #[serde(rename = "C_tilde")]
    pub c_tilde: u64,
    #[serde(rename = "G_tilde")]
    pub g_tilde: u64,
    #[serde(rename = "D")]
    pub d: u64,
}

/// What a single placement did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// New row and new column: an equilibrium.
    Green,
    /// New row, existing column.
    NewRow,
    /// Existing row, new column.
    NewColumn,
    /// Inside the occupied rectangle.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepEvent {
    pub kind: StepKind,
    pub cell: ActionProfile,
    /// `Some(true)` if the first candidate cell was empty; `None` when a new row opened.
    pub first_candidate_empty: Option<bool>,
}

/// State of a construction in progress.
#[derive(Debug, Clone)]
pub struct IncrementalState {
    k: u64,
    counts: Snapshot,
    /// `placements[v-1]` is the cell holding value `v`.
    placements: Vec<ActionProfile>,
    greens: Vec<(ActionProfile, u32)>,
    occupied: Vec<u64>,
}

impl IncrementalState {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::arg(format!("k must lie in [1, {MAX_K}], got {k}")));
        }
        let cells = k * k;
        Ok(IncrementalState {
            k: k as u64,
            counts: Snapshot::default(),
            placements: Vec::new(),
            greens: Vec::new(),
            occupied: vec![0u64; cells.div_ceil(64)],
        })
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn snapshot(&self) -> Snapshot {
        self.counts
    }

    pub fn is_complete(&self) -> bool {
        self.counts.t == self.k * self.k
    }

    /// Green cells with their values, in placement order.
    pub fn greens(&self) -> &[(ActionProfile, u32)] {
        &self.greens
    }

    pub fn placements(&self) -> &[ActionProfile] {
        &self.placements
    }

    fn index(&self, row: u64, col: u64) -> usize {
        ((row - 1) * self.k + (col - 1)) as usize
    }

    pub fn is_filled(&self, row: u32, col: u32) -> bool {
        let i = self.index(row as u64, col as u64);
        self.occupied[i / 64] >> (i % 64) & 1 == 1
    }

    /// Row-major grid of placed values, `None` for empty cells.
    pub fn partial_grid(&self) -> Vec<Option<u32>> {
        let mut grid = vec![None; (self.k * self.k) as usize];
        for (v, cell) in self.placements.iter().enumerate() {
            grid[self.index(cell.row as u64, cell.col as u64)] = Some(v as u32 + 1);
        }
        grid
    }

    fn place(&mut self, row: u64, col: u64) -> ActionProfile {
        let i = self.index(row, col);
        debug_assert!(self.occupied[i / 64] >> (i % 64) & 1 == 0);
        self.occupied[i / 64] |= 1 << (i % 64);
        let cell = ActionProfile::new(row as u32, col as u32);
        self.placements.push(cell);
        self.counts.t += 1;
        cell
    }

    /// Places the next value. Returns `None` once all K² values are placed.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<StepEvent> {
        let k = self.k;
        let n = &mut self.counts;
        if n.t == k * k {
            return None;
        }
        if n.t == 0 {
            *n = Snapshot { t: 0, r: 1, c: 1, g: 1, c_tilde: 1, g_tilde: 1, d: 0 };
            let cell = self.place(1, 1);
            self.greens.push((cell, 1));
            return Some(StepEvent { kind: StepKind::Green, cell, first_candidate_empty: None });
        }
        let empty = k * k - n.t;
        let opens_row = rng.gen_range(0..empty) < (k - n.r) * k;
        if opens_row {
            n.r += 1;
            let row = n.r;
            if rng.gen_range(0..k) < k - n.c {
                n.c += 1;
                n.g += 1;
                n.c_tilde += 1;
                n.g_tilde += 1;
                let col = n.c;
                let cell = self.place(row, col);
                self.greens.push((cell, self.counts.t as u32));
                return Some(StepEvent { kind: StepKind::Green, cell, first_candidate_empty: None });
            }
            let col = rng.gen_range(1..=n.c);
            let cell = self.place(row, col);
            return Some(StepEvent { kind: StepKind::NewRow, cell, first_candidate_empty: None });
        }

        let (r, c) = (n.r, n.c);
        let draw = |rng: &mut R| (rng.gen_range(1..=r), rng.gen_range(1..=k));
        let (mut x, mut y) = draw(rng);
        let first_empty = y > c || !self.is_filled(x as u32, y as u32);
        if !first_empty {
            self.counts.d += 1;
            loop {
                (x, y) = draw(rng);
                if y > c || !self.is_filled(x as u32, y as u32) {
                    break;
                }
            }
        }
        if y > c {
            self.counts.c += 1;
            if first_empty {
                self.counts.c_tilde += 1;
            }
            let cell = self.place(x, c + 1);
            Some(StepEvent { kind: StepKind::NewColumn, cell, first_candidate_empty: Some(first_empty) })
        } else {
            let cell = self.place(x, y);
            Some(StepEvent { kind: StepKind::Interior, cell, first_candidate_empty: Some(first_empty) })
        }
    }

    fn dense_values(&self) -> Vec<u32> {
        let mut values = vec![0u32; (self.k * self.k) as usize];
        for (v, cell) in self.placements.iter().enumerate() {
            values[self.index(cell.row as u64, cell.col as u64)] = v as u32 + 1;
        }
        values
    }

    /// The finished potential; fails unless all K² values are placed.
    pub fn into_potential(self) -> Result<Potential> {
        if !self.is_complete() {
            return Err(Error::internal("construction is not complete"));
        }
        Ok(Potential::from_raw(self.k as usize, self.dense_values()))
    }

    /// Places all remaining values uniformly at random on the empty cells.
    pub fn complete_uniformly<R: Rng + ?Sized>(self, rng: &mut R) -> Potential {
        let mut values = self.dense_values();
        let mut rest: Vec<u32> = (self.counts.t as u32 + 1..=(self.k * self.k) as u32).collect();
        rest.shuffle(rng);
        let mut rest = rest.into_iter();
        for v in values.iter_mut().filter(|v| **v == 0) {
            *v = rest.next().expect("one value per empty cell");
        }
        Potential::from_raw(self.k as usize, values)
    }
}

/// Output of a construction run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncrementalTrace {
    pub k: usize,
    /// One snapshot per step plus the initial one, when recording was requested.
    pub snapshots: Vec<Snapshot>,
    /// Counters when the construction loop stopped (at τ for stopped runs).
    pub last: Snapshot,
    /// Green cells and values, in placement order.
    pub greens: Vec<(ActionProfile, u32)>,
    /// The finished potential, when the run was completed.
    pub potential: Option<Potential>,
    /// First step with ⌊εK⌋ greens, for ε-stopped runs that reached it.
    pub tau: Option<u64>,
}

impl IncrementalTrace {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("t,R,C,G,C_tilde,G_tilde,D\n");
        for s in &self.snapshots {
            out.push_str(&format!("{},{},{},{},{},{},{}\n", s.t, s.r, s.c, s.g, s.c_tilde, s.g_tilde, s.d));
        }
        out
    }
}

fn run_until<R: Rng>(
    state: &mut IncrementalState,
    rng: &mut R,
    record: bool,
    mut stop: impl FnMut(&Snapshot) -> bool,
) -> Vec<Snapshot> {
    let mut snapshots = Vec::new();
    if record {
        snapshots.push(state.snapshot());
    }
    while !stop(&state.counts) && state.step(rng).is_some() {
        if record {
            snapshots.push(state.snapshot());
        }
    }
    snapshots
}

/// Runs the construction to completion and returns the finished potential.
pub fn incremental_construct(k: usize, seed: u64, record_trace: bool) -> Result<IncrementalTrace> {
    let mut rng = rng_from_seed(seed);
    construct_with(k, &mut rng, record_trace)
}

pub fn construct_with(k: usize, rng: &mut GameRng, record_trace: bool) -> Result<IncrementalTrace> {
    let mut state = IncrementalState::new(k)?;
    let snapshots = run_until(&mut state, rng, record_trace, |_| false);
    let last = state.snapshot();
    let greens = state.greens.clone();
    let potential = state.into_potential()?;
    Ok(IncrementalTrace { k, snapshots, last, greens, potential: Some(potential), tau: None })
}

/// Number of greens an ε-stopped run waits for: ⌊εK⌋.
///
/// A relative slack of 1e-9 keeps products such as 0.29·100 from rounding
/// below the intended integer.
pub fn stopping_target(k: usize, epsilon: f64) -> u64 {
    (epsilon * k as f64 * (1.0 + 1e-9)).floor() as u64
}

/// What to do with the empty cells once an ε-stopped run reaches τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completion {
    /// Fill them with a uniform shuffle of the unplaced values.
    Uniform,
    /// Leave the game unfinished; only the stopped state is reported.
    Skip,
}

/// Incremental construction stopped at the first step with ⌊εK⌋ greens.
///
/// If the construction finishes with fewer than ⌊εK⌋ greens, `tau` is `None`
/// and the potential is the fully constructed one.
pub fn epsilon_stopped_construct(
    k: usize,
    epsilon: f64,
    seed: u64,
    completion: Completion,
    record_trace: bool,
) -> Result<IncrementalTrace> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::arg(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    let target = stopping_target(k, epsilon);
    if target == 0 {
        return Err(Error::arg(format!("floor(epsilon * k) = 0 for epsilon = {epsilon}, k = {k}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut state = IncrementalState::new(k)?;
    let snapshots = run_until(&mut state, &mut rng, record_trace, |s| s.g == target);
    let last = state.snapshot();
    let greens = state.greens.clone();
    let tau = (last.g == target).then_some(last.t);
    let potential = if state.is_complete() {
        Some(state.into_potential()?)
    } else {
        match completion {
            Completion::Uniform => Some(state.complete_uniformly(&mut rng)),
            Completion::Skip => None,
        }
    };
    Ok(IncrementalTrace { k, snapshots, last, greens, potential, tau })
}

/// Runs `t_max` steps of the construction, recording `R`, `C`, `G`, `C̃`,
/// `G̃` and `D` after each.
pub fn simulate_aux_processes(k: usize, seed: u64, t_max: u64) -> Result<IncrementalTrace> {
    let mut state = IncrementalState::new(k)?;
    if t_max > state.k * state.k {
        return Err(Error::arg(format!("t_max = {t_max} exceeds k^2 = {}", state.k * state.k)));
    }
    let mut rng = rng_from_seed(seed);
    let snapshots = run_until(&mut state, &mut rng, true, |s| s.t == t_max);
    let last = state.snapshot();
    let greens = state.greens.clone();
    let potential = if state.is_complete() { Some(state.into_potential()?) } else { None };
    Ok(IncrementalTrace { k, snapshots, last, greens, potential, tau: None })
}

/// Occupied-row, occupied-column and green counts of an arbitrary potential
/// read in increasing value order. Entry `t` describes values `1..=t`.
pub fn replay_counts(p: &Potential) -> Vec<Snapshot> {
    let k = p.k();
    let mut rows = vec![false; k];
    let mut cols = vec![false; k];
    let mut s = Snapshot::default();
    let mut out = Vec::with_capacity(k * k + 1);
    out.push(s);
    for cell in p.cells_by_value() {
        let new_row = !std::mem::replace(&mut rows[cell.row as usize - 1], true);
        let new_col = !std::mem::replace(&mut cols[cell.col as usize - 1], true);
        s.t += 1;
        s.r += new_row as u64;
        s.c += new_col as u64;
        s.g += (new_row && new_col) as u64;
        s.c_tilde = s.c;
        s.g_tilde = s.g;
        out.push(s);
    }
    out
}
