//! Concurrency utilities: a deterministic chunked fold and a bounded,
//! order-preserving job pool. All concurrency in the crate is created here.
//!
//! Tasks must be pure functions of immutable shared state. Partial sums are
//! always combined in chunk-index order, so a fold's result depends only on
//! the inputs and the chunk plan, never on worker count or scheduling.

use std::convert::Infallible;
use std::num::NonZeroUsize;
use std::ops::Range;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::error::{Error, Result};

/// Contiguous, non-overlapping split of `0..total` into chunks whose sizes
/// differ by at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChunkPlan {
    total: usize,
    chunks: usize,
}

impl ChunkPlan {
    pub fn new(total: usize, chunks: NonZeroUsize) -> Self {
        ChunkPlan {
            total,
            chunks: chunks.get(),
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn chunk_count(&self) -> usize {
        self.chunks
    }

    fn start_of(&self, chunk: usize) -> usize {
        // Balanced split: chunk i covers [i*total/chunks, (i+1)*total/chunks).
        chunk * self.total / self.chunks
    }

    pub fn range(&self, chunk: usize) -> Range<usize> {
        self.start_of(chunk)..self.start_of(chunk + 1)
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.chunks).map(|c| self.range(c))
    }
}

/// Sums `per_item` over `items`, one partial sum per chunk, combining the
/// partials in ascending chunk order. With a single chunk this is exactly
/// strict left-to-right summation.
pub fn chunked_fold<T, F>(items: &[T], plan: &ChunkPlan, per_item: F) -> Result<f64>
where
    F: Fn(&T) -> f64,
{
    if plan.total() != items.len() {
        return Err(Error::domain(format!(
            "chunk plan covers {} items but {} were supplied",
            plan.total(),
            items.len()
        )));
    }
    let mut total = 0.0;
    for range in plan.ranges() {
        let mut partial = 0.0;
        for item in &items[range] {
            partial += per_item(item);
        }
        total += partial;
    }
    Ok(total)
}

/// [`chunked_fold`] with chunk sums computed on up to `workers` threads.
/// Bit-identical to the sequential fold for any worker count, because the
/// per-chunk partials and their combination order are fixed by the plan.
pub fn chunked_fold_workers<T, F>(
    items: &[T],
    plan: &ChunkPlan,
    per_item: F,
    workers: NonZeroUsize,
) -> Result<f64>
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    if plan.total() != items.len() {
        return Err(Error::domain(format!(
            "chunk plan covers {} items but {} were supplied",
            plan.total(),
            items.len()
        )));
    }
    let ranges: Vec<Range<usize>> = plan.ranges().collect();
    let partials = bounded_map(&ranges, workers, |range| {
        let mut partial = 0.0;
        for item in &items[range.clone()] {
            partial += per_item(item);
        }
        Ok::<f64, Infallible>(partial)
    })
    .unwrap_or_else(|e| match e.source {});
    Ok(partials.into_iter().sum())
}

/// A job failure observed by [`bounded_map`]; `index` is the position of the
/// failing job in the input sequence.
#[derive(Debug)]
pub struct TaskError<E> {
    pub index: usize,
    pub source: E,
}

/// Applies `f` to every item with at most `level` invocations in flight,
/// returning results in input order. `level = 1` degenerates to plain
/// sequential iteration. The first failing job (lowest index among observed
/// failures) aborts the batch: remaining unclaimed jobs are skipped.
pub fn bounded_map<T, U, E, F>(
    items: &[T],
    level: NonZeroUsize,
    f: F,
) -> std::result::Result<Vec<U>, TaskError<E>>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> std::result::Result<U, E> + Sync,
{
    let n = items.len();
    let level = level.get();
    if level == 1 || n <= 1 {
        let mut out = Vec::with_capacity(n);
        for (index, item) in items.iter().enumerate() {
            match f(item) {
                Ok(value) => out.push(value),
                Err(source) => return Err(TaskError { index, source }),
            }
        }
        return Ok(out);
    }

    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let slots: Vec<Mutex<Option<std::result::Result<U, E>>>> =
        (0..n).map(|_| Mutex::new(None)).collect();

    thread::scope(|scope| {
        for _ in 0..level.min(n) {
            scope.spawn(|| loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= n {
                    break;
                }
                let result = f(&items[index]);
                if result.is_err() {
                    abort.store(true, Ordering::Relaxed);
                }
                *slots[index].lock().expect("result slot poisoned") = Some(result);
            });
        }
    });

    // Jobs are claimed in index order, so scanning in order meets the lowest
    // failing index before any skipped slot.
    let mut out = Vec::with_capacity(n);
    for (index, slot) in slots.into_iter().enumerate() {
        match slot.into_inner().expect("result slot poisoned") {
            Some(Ok(value)) => out.push(value),
            Some(Err(source)) => return Err(TaskError { index, source }),
            None => unreachable!("job {index} skipped without an earlier failure"),
        }
    }
    Ok(out)
}
