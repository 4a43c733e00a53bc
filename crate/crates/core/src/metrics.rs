//! Parallelism profile: how many stages could fire at each lockstep step,
//! assuming one processor per stage and unit-time steps.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Readiness-relevant view of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageView {
    /// Items waiting on the stage's input channel.
    pub pending: usize,
    /// Free slots on its output channel.
    pub output_room: usize,
    /// Currently being stepped by a worker.
    pub busy: bool,
}

impl StageView {
    pub fn is_fireable(&self) -> bool {
        !self.busy && self.pending > 0 && self.output_room > 0
    }
}

/// The live chain at the start of one step.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PipelineSnapshot {
    pub stages: Vec<StageView>,
    /// Pass the source is streaming into the chain head: 1, then 2 once the
    /// first pass has been fed completely.
    pub round: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileStep {
    pub step: u64,
    pub fireable: usize,
    pub live: usize,
    pub round: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParallelismProfile {
    steps: Vec<ProfileStep>,
}

impl ParallelismProfile {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the entry for `snapshot` as the next step.
    pub fn record_step(&mut self, snapshot: &PipelineSnapshot) -> ProfileStep {
        let entry = ProfileStep {
            step: self.steps.len() as u64,
            fireable: snapshot.stages.iter().filter(|s| s.is_fireable()).count(),
            live: snapshot.stages.len(),
            round: snapshot.round,
        };
        self.steps.push(entry);
        entry
    }

    pub fn steps(&self) -> &[ProfileStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn max_fireable(&self) -> usize {
        self.steps.iter().map(|s| s.fireable).max().unwrap_or(0)
    }

    /// Sum of fireable counts over all steps.
    pub fn total_fireable(&self) -> u64 {
        self.steps.iter().map(|s| s.fireable as u64).sum()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "step,fireable,live,round")?;
        for s in &self.steps {
            writeln!(out, "{},{},{},{}", s.step, s.fireable, s.live, s.round)?;
        }
        out.flush()
    }
}

/// Writes `profile` as CSV with header `step,fireable,live,round`.
pub fn export_profile(profile: &ParallelismProfile, path: impl AsRef<Path>) -> io::Result<()> {
    profile.write_csv(BufWriter::new(File::create(path)?))
}
