use std::collections::{HashSet, VecDeque};

use rand::Rng;

use crate::algebra::{Ring, MAX_EXP};
use crate::error::{Error, Result};
use crate::orderideal::OrderIdeal;

/// A region of exponent space with lower corner `l` and maximum point `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub l: Vec<u32>,
    pub u: Vec<u32>,
}

impl Cell {
    pub fn is_valid(&self) -> bool {
        let differing = self.l.iter().zip(&self.u).filter(|(a, b)| a != b).count();
        let widest = self.l.iter().zip(&self.u).map(|(a, b)| b.saturating_sub(*a)).max().unwrap_or(0);
        differing >= 2 && widest >= 2
    }

    /// Children after recording the box [l, p].
    pub fn split(&self, p: &[u32]) -> Vec<Cell> {
        (0..self.l.len())
            .map(|i| {
                let mut l = self.l.clone();
                l[i] = p[i];
                let u = (0..self.l.len()).map(|k| if k == i { self.u[k] } else { p[k] }).collect();
                Cell { l, u }
            })
            .filter(Cell::is_valid)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SampledOrderIdeal {
    pub ideal: OrderIdeal,
    /// Cells popped from the queue.
    pub iterations: usize,
    /// Recorded boxes (l, p).
    pub boxes: Vec<(Vec<u32>, Vec<u32>)>,
}

/// Samples an order ideal as a union of boxes, splitting cells in FIFO
/// order. `pick` chooses a point of [l, u].
pub fn sample_order_ideal_with(
    ring: &Ring,
    caps: &[u32],
    limit: Option<usize>,
    mut pick: impl FnMut(&[u32], &[u32]) -> Vec<u32>,
) -> Result<SampledOrderIdeal> {
    let n = ring.nvars();
    if n < 2 {
        return Err(Error::InvalidArity(n));
    }
    if caps.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: caps.len() });
    }
    if caps.iter().any(|&c| c > MAX_EXP) {
        return Err(Error::ExponentOverflow { max: MAX_EXP });
    }
    let mut queue = VecDeque::from([Cell { l: vec![0; n], u: caps.to_vec() }]);
    let mut boxes = Vec::new();
    let mut iterations = 0;
    while let Some(cell) = queue.pop_front() {
        if limit.is_some_and(|m| iterations >= m) {
            break;
        }
        iterations += 1;
        let p = pick(&cell.l, &cell.u);
        debug_assert!(p.iter().zip(&cell.l).zip(&cell.u).all(|((x, a), b)| a <= x && x <= b));
        queue.extend(cell.split(&p));
        boxes.push((cell.l, p));
    }
    let mut set = HashSet::new();
    for (l, p) in &boxes {
        let mut cur = l.clone();
        loop {
            set.insert(ring.term(&cur)?);
            // odometer over [l, p]
            let mut i = 0;
            while i < n {
                if cur[i] < p[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = l[i];
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    let ideal = OrderIdeal::from_closed(ring, set);
    Ok(SampledOrderIdeal { ideal, iterations, boxes })
}

/// Samples with each coordinate of p uniform in [l_i, u_i].
pub fn sample_order_ideal<R: Rng + ?Sized>(
    ring: &Ring,
    caps: &[u32],
    limit: Option<usize>,
    rng: &mut R,
) -> Result<SampledOrderIdeal> {
    sample_order_ideal_with(ring, caps, limit, |l, u| l.iter().zip(u).map(|(&a, &b)| rng.gen_range(a..=b)).collect())
}
