use crate::dfg::Dfg;

/// Placement of one operation: first control step and length in steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub start: u32,
    pub duration: u32,
}

impl Slot {
    pub fn new(start: u32, duration: u32) -> Self {
        Slot { start, duration }
    }

    /// Last occupied control step.
    pub fn end(&self) -> u32 {
        self.start + self.duration - 1
    }

    pub fn is_active(&self, step: u32) -> bool {
        step >= self.start && step <= self.end()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("schedule names unknown node {0}")]
    UnknownNode(u32),
    #[error("node {0} is assigned twice")]
    DuplicateNode(u32),
    #[error("node {0} is not assigned")]
    MissingNode(u32),
}

/// A total assignment node -> slot, indexed like [`Dfg::nodes`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Schedule {
    slots: Vec<Slot>,
}

impl Schedule {
    pub fn new(slots: Vec<Slot>) -> Self {
        Schedule { slots }
    }

    /// Builds a schedule from `(node id, start, duration)` triples.
    pub fn from_ids(g: &Dfg, entries: impl IntoIterator<Item = (u32, u32, u32)>) -> Result<Self, ScheduleError> {
        let mut slots: Vec<Option<Slot>> = vec![None; g.len()];
        for (id, start, duration) in entries {
            let idx = g.index_of(id).ok_or(ScheduleError::UnknownNode(id))?;
            if slots[idx].replace(Slot::new(start, duration)).is_some() {
                return Err(ScheduleError::DuplicateNode(id));
            }
        }
        let slots = slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or(ScheduleError::MissingNode(g.node(i).id)))
            .collect::<Result<_, _>>()?;
        Ok(Schedule { slots })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, idx: usize) -> Slot {
        self.slots[idx]
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Last occupied step over all operations (0 for an empty schedule).
    pub fn completion(&self) -> u32 {
        self.slots.iter().map(Slot::end).max().unwrap_or(0)
    }
}
