//! Incremental marker bookkeeping for the streaming encoders, and the gap
//! buffer used by their inverses.

/// A growable bit string that tracks marker starts as bits are pushed and
/// can be truncated back to any earlier length.
#[derive(Debug, Clone)]
pub struct Scanner {
    ell: usize,
    /// Cover radius `k` for sparse-window tracking; zero disables it.
    k: usize,
    bits: Vec<bool>,
    run: Vec<u32>,
    markers: Vec<usize>,
    /// Positions `j` with no marker starting in `[j, j+k-1]`.
    uncovered: Vec<usize>,
}

impl Scanner {
    pub fn new(ell: usize, k: usize, capacity: usize) -> Self {
        Self {
            ell,
            k,
            bits: Vec::with_capacity(capacity),
            run: Vec::with_capacity(capacity),
            markers: Vec::new(),
            uncovered: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn push(&mut self, b: bool) {
        let prev = self.run.last().copied().unwrap_or(0);
        let r = if b { prev + 1 } else { 0 };
        self.bits.push(b);
        self.run.push(r);
        let p = self.bits.len() - 1;
        if r as usize >= self.ell {
            self.markers.push(p + 1 - self.ell);
        }
        if self.k > 0 {
            let span = self.k + self.ell - 2;
            if p >= span {
                let j = p - span;
                if !self.markers.last().is_some_and(|&s| s >= j) {
                    self.uncovered.push(j);
                }
            }
        }
    }

    pub fn truncate(&mut self, len: usize) {
        self.bits.truncate(len);
        self.run.truncate(len);
        while self.markers.last().is_some_and(|&s| s + self.ell > len) {
            self.markers.pop();
        }
        let span = self.k + self.ell - 2;
        while self.uncovered.last().is_some_and(|&j| j + span >= len) {
            self.uncovered.pop();
        }
    }

    /// The length-`w` window ending at the current end has no marker.
    pub fn tail_marker_free(&self, w: usize) -> bool {
        let len = self.bits.len();
        len >= w && !self.markers.last().is_some_and(|&s| s >= len - w)
    }

    /// The length-`r` window ending at the current end is marker-saturated:
    /// every `j` in `[start, end - m]` has a marker starting in `[j, j+k-1]`.
    pub fn tail_saturated(&self, r: usize) -> bool {
        let len = self.bits.len();
        let m = self.k + self.ell;
        if len < r || r < m {
            return false;
        }
        let (start, last) = (len - r, len - m);
        // the newest entry may lie one past `last`
        let top = self.uncovered.iter().rev().take(2).copied().find(|&j| j <= last);
        !top.is_some_and(|j| j >= start)
    }
}

/// A bit vector with a movable insertion point.
#[derive(Debug, Clone, Default)]
pub struct GapBuffer {
    left: Vec<bool>,
    /// Bits after the cursor, stored in reverse.
    right: Vec<bool>,
}

impl GapBuffer {
    pub fn from_vec(bits: Vec<bool>) -> Self {
        Self { left: bits, right: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn move_to(&mut self, pos: usize) {
        assert!(pos <= self.len());
        while self.left.len() > pos {
            let b = self.left.pop().expect("left non-empty");
            self.right.push(b);
        }
        while self.left.len() < pos {
            let b = self.right.pop().expect("right non-empty");
            self.left.push(b);
        }
    }

    pub fn insert(&mut self, pos: usize, bits: &[bool]) {
        self.move_to(pos);
        self.left.extend_from_slice(bits);
    }

    pub fn into_vec(mut self) -> Vec<bool> {
        self.left.extend(self.right.into_iter().rev());
        self.left
    }
}
