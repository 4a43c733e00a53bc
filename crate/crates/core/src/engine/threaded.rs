use std::sync::{Condvar, Mutex, MutexGuard};
use std::thread;

use super::chain::{run_batch, Chain};
use super::feed::Feed;
use super::{EngineError, RunReport};

/// Most items a worker takes from one stage per checkout.
const BATCH: usize = 256;

struct Shared<'a> {
    chain: Chain,
    /// `None` while a worker is pulling from the source.
    feed: Option<Feed<'a>>,
    feed_done: bool,
    /// Workers currently stepping a stage or pulling from the source.
    busy: usize,
    error: Option<EngineError>,
    /// Where the next scan for a ready stage starts.
    cursor: usize,
}

impl Shared<'_> {
    fn finished(&self) -> bool {
        self.error.is_some() || (self.feed_done && self.chain.is_empty())
    }

    fn find_ready(&mut self) -> Option<usize> {
        let len = self.chain.slots.len();
        let start = self.cursor % len.max(1);
        let idx = (0..len).map(|k| (start + k) % len).find(|&i| self.chain.is_fireable(i))?;
        self.cursor = idx + 1;
        Some(idx)
    }

    fn fail(&mut self, err: EngineError) {
        if self.error.is_none() {
            self.error = Some(err);
        }
    }
}

/// Runs the chain on `workers` threads sharing one run queue.
///
/// A worker checks a ready stage out of the chain together with a batch of
/// its pending input (no larger than the room on its output channel), steps
/// it without holding the lock, then checks it back in and routes the
/// outputs. Only the stage itself writes to its output channel, so the room
/// reserved at checkout cannot be taken by anyone else.
pub(super) fn run(chain: Chain, feed: Feed<'_>, workers: usize) -> Result<RunReport, EngineError> {
    let shared = Mutex::new(Shared { chain, feed: Some(feed), feed_done: false, busy: 0, error: None, cursor: 0 });
    let wake = Condvar::new();
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| worker(&shared, &wake));
        }
    });
    let shared = shared.into_inner().unwrap_or_else(|poisoned| poisoned.into_inner());
    if let Some(err) = shared.error {
        return Err(err);
    }
    let (result, stages, stats) = shared.chain.finish();
    Ok(RunReport { result, stages, stats, profile: None })
}

fn lock<'m, 'a>(m: &'m Mutex<Shared<'a>>) -> MutexGuard<'m, Shared<'a>> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn worker(shared: &Mutex<Shared<'_>>, wake: &Condvar) {
    let mut g = lock(shared);
    loop {
        g.chain.reap();
        if g.finished() {
            wake.notify_all();
            return;
        }

        if let Some(idx) = g.find_ready() {
            let budget = BATCH.min(g.chain.output_room(idx));
            let rules = g.chain.rules;
            let trace = g.chain.trace;
            let slot = &mut g.chain.slots[idx];
            let id = slot.id;
            let mut state = slot.state.take().expect("ready stage is not checked out");
            let take = budget.min(slot.input.len());
            let items: Vec<_> = slot.input.drain(..take).collect();
            let mut eofs_out = slot.eofs_out;
            g.busy += 1;
            drop(g);

            let batch = run_batch(id, &mut state, &mut eofs_out, items, rules, trace);

            g = lock(shared);
            g.busy -= 1;
            let outcome = batch.and_then(|batch| g.chain.complete(id, state, eofs_out, batch));
            if let Err(err) = outcome {
                g.fail(err);
            }
            wake.notify_all();
            continue;
        }

        let head_room = g.chain.head_room();
        if !g.feed_done && head_room > 0 {
            if let Some(mut feed) = g.feed.take() {
                g.busy += 1;
                drop(g);

                let mut items = Vec::new();
                let mut failure = None;
                while items.len() < BATCH.min(head_room) {
                    match feed.next_item() {
                        Some(Ok(item)) => items.push(item),
                        Some(Err(err)) => {
                            failure = Some(err);
                            break;
                        }
                        None => break,
                    }
                }

                g = lock(shared);
                g.busy -= 1;
                for item in items {
                    g.chain.feed(item);
                }
                g.feed_done = feed.is_done();
                g.feed = Some(feed);
                if let Some(err) = failure {
                    g.fail(err);
                }
                wake.notify_all();
                continue;
            }
        }

        if g.busy == 0 {
            g.fail(EngineError::Deadlock);
            wake.notify_all();
            return;
        }
        g = wake.wait(g).unwrap_or_else(|poisoned| poisoned.into_inner());
    }
}
