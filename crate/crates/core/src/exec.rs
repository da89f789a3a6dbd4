//! Execution mode for the data-parallel inner loops.
//!
//! Every hot loop in the crate (preservation search, padding enumeration,
//! Monte Carlo sampling, half-assignment labelling, triangle search) goes
//! through the helpers in this module. With the `parallel` feature they run
//! on the rayon pool unless the caller selected [`Exec::Sequential`]; without
//! the feature everything runs sequentially. Results are identical in both
//! modes: order-preserving maps, lowest-index searches and exact sums.

use std::cell::Cell;
use std::ops::Range;
use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

static DEFAULT: AtomicU8 = AtomicU8::new(1);

thread_local! {
    static OVERRIDE: Cell<Option<Exec>> = const { Cell::new(None) };
}

/// Sets the process-wide default mode.
pub fn set_default(mode: Exec) {
    DEFAULT.store(
        match mode {
            Exec::Sequential => 0,
            Exec::Parallel => 1,
        },
        Ordering::Relaxed,
    );
}

/// The mode in effect on the calling thread.
pub fn current() -> Exec {
    if !cfg!(feature = "parallel") {
        return Exec::Sequential;
    }
    if let Some(mode) = OVERRIDE.with(|o| o.get()) {
        return mode;
    }
    match DEFAULT.load(Ordering::Relaxed) {
        0 => Exec::Sequential,
        _ => Exec::Parallel,
    }
}

/// Runs `f` with `mode` in effect on the calling thread.
pub fn with<R>(mode: Exec, f: impl FnOnce() -> R) -> R {
    let prev = OVERRIDE.with(|o| o.replace(Some(mode)));
    let out = f();
    OVERRIDE.with(|o| o.set(prev));
    out
}

/// Order-preserving map over an index range.
pub fn map_range<R, F>(range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current() == Exec::Parallel {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    range.map(f).collect()
}

/// Order-preserving map over a slice.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current() == Exec::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Lowest index in `range` for which `f` yields a value.
pub fn find_first<R, F>(range: Range<usize>, f: F) -> Option<R>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current() == Exec::Parallel {
        use rayon::prelude::*;
        return range.into_par_iter().find_map_first(f);
    }
    range.into_iter().find_map(f)
}

/// Exact sum of `f` over `range`.
pub fn sum_range<F>(range: Range<usize>, f: F) -> u128
where
    F: Fn(usize) -> u128 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current() == Exec::Parallel {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).sum();
    }
    range.map(f).sum()
}

/// True iff `f` holds for every index.
pub fn all_range<F>(range: Range<usize>, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current() == Exec::Parallel {
        use rayon::prelude::*;
        return range.into_par_iter().all(f);
    }
    range.into_iter().all(f)
}
