//! GF(2) linear algebra on packed bit rows: rank, linear solves and span
//! membership via Gaussian elimination.

use crate::bits::BitVec;

/// Row-reduce `rows` in place, returning the pivot columns.
///
/// After the call the rows form a (not necessarily reduced) echelon basis of
/// the original row space; zero rows are left at the bottom.
pub fn eliminate(rows: &mut [BitVec]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let ncols = match rows.first() {
        Some(r) => r.len(),
        None => return pivots,
    };
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        for r in 0..rows.len() {
            if r != rank && rows[r].get(col) {
                let (a, b) = split_pair(rows, r, rank);
                a.xor_assign(b);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    pivots
}

fn split_pair(rows: &mut [BitVec], dst: usize, src: usize) -> (&mut BitVec, &BitVec) {
    debug_assert_ne!(dst, src);
    if dst < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    }
}

pub fn rank(rows: &[BitVec]) -> usize {
    let mut work: Vec<BitVec> = rows.to_vec();
    eliminate(&mut work).len()
}

/// Solve `M x = rhs` over GF(2), where `M` is given by rows.
///
/// Returns one particular solution, or `None` if the system is inconsistent.
pub fn solve(rows: &[BitVec], rhs: &BitVec) -> Option<BitVec> {
    assert_eq!(rows.len(), rhs.len(), "rhs length must match row count");
    let ncols = rows.first().map_or(0, BitVec::len);
    // Augment each row with its rhs bit in an extra trailing column.
    let mut aug: Vec<BitVec> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut a = BitVec::zeros(ncols + 1);
            for j in row.support() {
                a.set(j, true);
            }
            a.set(ncols, rhs.get(i));
            a
        })
        .collect();
    let pivots = eliminate(&mut aug);
    if pivots.contains(&ncols) {
        return None; // pivot in the rhs column: inconsistent
    }
    let mut x = BitVec::zeros(ncols);
    for (r, &col) in pivots.iter().enumerate() {
        if aug[r].get(ncols) {
            x.set(col, true);
        }
    }
    Some(x)
}

/// True iff `v` lies in the row space of `basis`.
pub fn in_span(basis: &[BitVec], v: &BitVec) -> bool {
    let mut work: Vec<BitVec> = basis.to_vec();
    let r = eliminate(&mut work).len();
    work.truncate(r);
    work.push(v.clone());
    eliminate(&mut work).len() == r
}
