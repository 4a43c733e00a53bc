use super::chain::Chain;
use super::feed::Feed;
use super::{EngineError, RunReport};
use crate::metrics::{ParallelismProfile, PipelineSnapshot};

/// Single-threaded lockstep execution.
///
/// Each sweep fires every stage that was ready at the start of the sweep,
/// one item each, from the tail towards the head, so an item advances at most
/// one stage per sweep. The source then pushes one item into the head.
pub(super) fn run(mut chain: Chain, mut feed: Feed<'_>, profile: bool) -> Result<RunReport, EngineError> {
    let mut recorded = profile.then(ParallelismProfile::new);
    let mut fireable = Vec::new();
    loop {
        chain.reap();
        if feed.is_done() && chain.is_empty() {
            break;
        }
        fireable.clear();
        fireable.extend((0..chain.slots.len()).filter(|&i| chain.is_fireable(i)));
        let feed_ready = !feed.is_done() && chain.head_room() > 0;
        if fireable.is_empty() && !feed_ready {
            return Err(EngineError::Deadlock);
        }
        if let Some(p) = recorded.as_mut() {
            let stages = (0..chain.slots.len()).map(|i| chain.view(i)).collect();
            p.record_step(&PipelineSnapshot { stages, round: feed.round() });
        }
        for &idx in fireable.iter().rev() {
            chain.fire_one(idx)?;
        }
        if feed_ready {
            if let Some(item) = feed.next_item() {
                chain.feed(item?);
            }
        }
        chain.stats.sweeps += 1;
    }
    let (result, stages, stats) = chain.finish();
    Ok(RunReport { result, stages, stats, profile: recorded })
}
