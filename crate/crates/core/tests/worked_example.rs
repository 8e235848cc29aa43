//! The two 10×10 potentials of the worked example: one realization and a
//! row/column rearrangement of it that reads as an incremental construction.

use sop_basins::brd::compute_basins;
use sop_basins::game::{find_equilibria, permute_potential, Potential};
use sop_basins::incremental::replay_counts;

fn left() -> Potential {
    Potential::from_rows(vec![
        vec![100, 56, 43, 32, 26, 24, 12, 55, 39, 40],
        vec![77, 83, 82, 48, 29, 79, 44, 92, 53, 95],
        vec![97, 3, 28, 23, 57, 30, 91, 17, 41, 89],
        vec![21, 63, 99, 73, 59, 4, 25, 49, 85, 9],
        vec![42, 66, 20, 72, 27, 54, 68, 98, 71, 67],
        vec![31, 15, 6, 50, 90, 18, 70, 81, 84, 34],
        vec![96, 16, 5, 38, 78, 65, 47, 36, 8, 60],
        vec![69, 64, 86, 10, 2, 46, 61, 35, 13, 14],
        vec![45, 1, 62, 74, 19, 52, 7, 11, 51, 94],
        vec![37, 75, 88, 80, 33, 76, 22, 87, 58, 93],
    ])
    .unwrap()
}

fn right() -> Potential {
    Potential::from_rows(vec![
        vec![1, 19, 52, 62, 7, 51, 94, 74, 11, 45],
        vec![64, 2, 46, 86, 61, 13, 14, 10, 35, 69],
        vec![3, 57, 30, 28, 91, 41, 89, 23, 17, 97],
        vec![63, 59, 4, 99, 25, 85, 9, 73, 49, 21],
        vec![16, 78, 65, 5, 47, 8, 60, 38, 36, 96],
        vec![15, 90, 18, 6, 70, 84, 34, 50, 81, 31],
        vec![56, 26, 24, 43, 12, 39, 40, 32, 55, 100],
        vec![66, 27, 54, 20, 68, 71, 67, 72, 98, 42],
        vec![75, 33, 76, 88, 22, 58, 93, 80, 87, 37],
        vec![83, 29, 79, 82, 44, 53, 95, 48, 92, 77],
    ])
    .unwrap()
}

fn attraction_values(p: &Potential) -> Vec<u32> {
    let eqs = find_equilibria(p);
    let basins = compute_basins(p).unwrap();
    (1..=p.k() as u32).map(|b| eqs.by_rank(basins.rank_of_column(b)).unwrap().potential_value).collect()
}

#[test]
fn left_equilibria_and_attraction() {
    let p = left();
    assert_eq!(find_equilibria(&p).potential_values(), vec![1, 2, 4, 5]);
    assert_eq!(attraction_values(&p), vec![4, 1, 5, 2, 2, 4, 1, 1, 5, 4]);
}

#[test]
fn right_equilibria_and_attraction() {
    let p = right();
    let eqs = find_equilibria(&p);
    assert_eq!(eqs.potential_values(), vec![1, 2, 4, 5]);
    let cells: Vec<(u32, u32)> = eqs.entries().iter().map(|e| (e.profile.row, e.profile.col)).collect();
    assert_eq!(cells, vec![(1, 1), (2, 2), (4, 3), (5, 4)]);
    assert_eq!(attraction_values(&p), vec![1, 2, 4, 5, 1, 5, 4, 2, 1, 4]);
}

#[test]
fn right_is_a_rearrangement_of_left() {
    let (l, r) = (left(), right());
    let k = l.k();
    let mut row_perm = vec![0u32; k];
    let mut col_perm = vec![0u32; k];
    let where_is = |p: &Potential, v: u32| {
        let idx = p.values().iter().position(|&x| x == v).unwrap();
        ((idx / k) as u32 + 1, (idx % k) as u32 + 1)
    };
    for v in 1..=(k * k) as u32 {
        let (a, b) = where_is(&l, v);
        let (a2, b2) = where_is(&r, v);
        for (perm, from, to) in [(&mut row_perm, a, a2), (&mut col_perm, b, b2)] {
            let slot = &mut perm[from as usize - 1];
            assert!(*slot == 0 || *slot == to, "value {v} breaks the rearrangement");
            *slot = to;
        }
    }
    assert_eq!(permute_potential(&l, &row_perm, &col_perm).unwrap(), r);

    // Attraction is carried along with the columns.
    let left_attr = attraction_values(&l);
    let right_attr = attraction_values(&r);
    for (j, &to) in col_perm.iter().enumerate() {
        assert_eq!(left_attr[j], right_attr[to as usize - 1]);
    }
}

#[test]
fn right_replays_as_a_construction() {
    let snaps = replay_counts(&right());
    assert_eq!(snaps.len(), 101);
    // Step t places value t. Green: new row and new column; red: exactly one;
    // brown: neither. Colours as marked on the matrix, up to 21.
    let green = [1, 2, 4, 5];
    let red = [3, 6, 7, 8, 9, 10, 11, 12, 20, 21];
    let brown = [13, 14, 15, 16, 17, 18, 19];
    for t in 1..=21usize {
        let (prev, cur) = (&snaps[t - 1], &snaps[t]);
        let new_row = cur.r > prev.r;
        let new_col = cur.c > prev.c;
        let t32 = t as u32;
        if green.contains(&t32) {
            assert!(new_row && new_col, "t={t}");
        } else if red.contains(&t32) {
            assert!(new_row ^ new_col, "t={t}");
        } else {
            assert!(brown.contains(&t32));
            assert!(!new_row && !new_col, "t={t}");
        }
        assert_eq!(cur.g, green.iter().filter(|&&v| v <= t32).count() as u64);
    }
    // Four greens are reached at t = 5 (the stopping time for εK = 4); the
    // last column opens with value 21, after which no green can appear.
    let tau = snaps.iter().position(|s| s.g == 4).unwrap();
    assert_eq!(tau, 5);
    let full_cols = snaps.iter().position(|s| s.c == 10).unwrap();
    assert_eq!(full_cols, 21);
    assert_eq!(snaps[21].r, 8);
    assert_eq!(snaps[100].g, 4);
}
