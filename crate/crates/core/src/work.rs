/// Instrumentation for the deterministic algorithms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkCounters {
    pub marks_created: u64,
    pub convolutions_run: u64,
    pub lce_queries: u64,
    /// Text segments produced by the matching-statistics scan.
    pub segments: u64,
}

impl WorkCounters {
    pub fn merge(&mut self, other: &WorkCounters) {
        self.marks_created += other.marks_created;
        self.convolutions_run += other.convolutions_run;
        self.lce_queries += other.lce_queries;
        self.segments += other.segments;
    }
}
