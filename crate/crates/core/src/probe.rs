//! Instrumentation hooks for the tree engines.
//!
//! One operation is one node computation: a complex multiply followed by a
//! complex add.

/// Receives node counts and buffer allocations from a running transform.
pub trait Probe {
    /// `nodes` node computations were performed for the tree at flat position `position`.
    fn nodes(&mut self, position: usize, nodes: u64);

    /// Level storage of `elements` complex values was allocated.
    fn allocated(&mut self, _elements: u64) {}
}

/// Discards everything.
impl Probe for () {
    #[inline(always)]
    fn nodes(&mut self, _position: usize, _nodes: u64) {}
}

/// Operation tally with an optional per-tree breakdown.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpCounter {
    total: u64,
    per_position: Option<Vec<u64>>,
    allocated_elements: u64,
    peak_elements: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Also records how many operations each of the `positions` trees took.
    pub fn with_breakdown(positions: usize) -> Self {
        OpCounter {
            per_position: Some(vec![0; positions]),
            ..Self::default()
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn per_position(&self) -> Option<&[u64]> {
        self.per_position.as_deref()
    }

    /// Largest level storage, in complex elements, reported by a transform.
    pub fn peak_elements(&self) -> u64 {
        self.peak_elements
    }

    pub fn peak_bytes(&self) -> u64 {
        self.peak_elements * crate::memory::BYTES_PER_COMPLEX
    }
}

impl Probe for OpCounter {
    #[inline]
    fn nodes(&mut self, position: usize, nodes: u64) {
        self.total += nodes;
        if let Some(per) = &mut self.per_position {
            per[position] += nodes;
        }
    }

    fn allocated(&mut self, elements: u64) {
        self.allocated_elements += elements;
        self.peak_elements = self.peak_elements.max(self.allocated_elements);
    }
}
