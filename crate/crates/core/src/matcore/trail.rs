use crate::error::{Error, Result};

use super::matrix::{MatMut, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Record of column interchanges: at step `i`, column `i` was swapped with
/// column `swaps[i]` (`swaps[i] >= i`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PivotTrail {
    swaps: Vec<usize>,
}

impl PivotTrail {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity(len: usize) -> Self {
        Self {
            swaps: (0..len).collect(),
        }
    }

    /// Validates `swaps[i] >= i`.
    pub fn from_swaps(swaps: Vec<usize>) -> Result<Self> {
        if let Some((i, &s)) = swaps.iter().enumerate().find(|(i, s)| **s < *i) {
            return Err(Error::InvalidArgument(format!(
                "pivot trail entry {i} points backwards to column {s}"
            )));
        }
        Ok(Self { swaps })
    }

    pub fn swaps(&self) -> &[usize] {
        &self.swaps
    }

    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    pub fn push(&mut self, swap: usize) {
        debug_assert!(swap >= self.swaps.len());
        self.swaps.push(swap);
    }

    /// Appends `local` shifted by `offset`; `local` must describe steps
    /// starting at position `offset == self.len()`.
    pub fn extend_offset(&mut self, local: &[usize], offset: usize) {
        debug_assert_eq!(offset, self.swaps.len());
        self.swaps.extend(local.iter().map(|s| s + offset));
    }

    /// Final arrangement of `n` columns: position `i` holds original column
    /// `perm[i]`.
    pub fn to_permutation(&self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for (i, &s) in self.swaps.iter().enumerate() {
            perm.swap(i, s);
        }
        perm
    }

    /// Builds the trail whose forward application turns the identity
    /// arrangement into `perm` on positions `0..steps`.
    pub fn from_permutation_prefix(perm: &[usize], steps: usize) -> Self {
        let n = perm.len();
        let mut cur: Vec<usize> = (0..n).collect();
        let mut pos: Vec<usize> = (0..n).collect();
        let mut swaps = Vec::with_capacity(steps);
        for (i, &want) in perm.iter().enumerate().take(steps) {
            let j = pos[want];
            swaps.push(j);
            let displaced = cur[i];
            cur.swap(i, j);
            pos[want] = i;
            pos[displaced] = j;
        }
        Self { swaps }
    }

    fn check(&self, cols: usize) -> Result<()> {
        match self.swaps.iter().find(|&&s| s >= cols) {
            Some(&index) => Err(Error::IndexOutOfRange { index, cols }),
            None => Ok(()),
        }
    }

    /// Applies the interchanges to the columns of `a`.
    pub fn apply(&self, mut a: MatMut<'_>, direction: Direction) -> Result<()> {
        self.check(a.cols())?;
        match direction {
            Direction::Forward => {
                for (i, &s) in self.swaps.iter().enumerate() {
                    a.swap_cols(i, s);
                }
            }
            Direction::Inverse => {
                for (i, &s) in self.swaps.iter().enumerate().rev() {
                    a.swap_cols(i, s);
                }
            }
        }
        Ok(())
    }

    /// Same as [`apply`](Self::apply) on an owned matrix.
    pub fn apply_to(&self, a: &mut Matrix, direction: Direction) -> Result<()> {
        self.apply(a.as_mut(), direction)
    }

    /// Applies the interchanges to a slice (weights, indices, ...).
    pub fn apply_slice<T>(&self, v: &mut [T]) -> Result<()> {
        self.check(v.len())?;
        for (i, &s) in self.swaps.iter().enumerate() {
            v.swap(i, s);
        }
        Ok(())
    }
}
