//! Size-bounded max-heap holding the `K` smallest keys seen so far.

use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
pub struct BoundedMaxHeap {
    cap: usize,
    heap: BinaryHeap<usize>,
}

impl BoundedMaxHeap {
    pub fn new(cap: usize) -> Self {
        assert!(cap > 0, "heap capacity must be positive");
        Self { cap, heap: BinaryHeap::with_capacity(cap + 1) }
    }

    /// Offers `key`; returns whether the retained set changed.
    pub fn push(&mut self, key: usize) -> bool {
        if self.heap.len() < self.cap {
            self.heap.push(key);
            return true;
        }
        match self.heap.peek() {
            Some(&top) if key < top => {
                self.heap.pop();
                self.heap.push(key);
                true
            }
            _ => false,
        }
    }

    pub fn clear(&mut self) {
        self.heap.clear();
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Writes the retained keys into `out` in ascending order.
    pub fn sorted_into(&self, out: &mut Vec<usize>) {
        out.clear();
        out.extend(self.heap.iter().copied());
        out.sort_unstable();
    }
}
