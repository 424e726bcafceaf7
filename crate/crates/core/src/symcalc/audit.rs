//! Opt-in observation of every exact angle average the kernel performs.
//!
//! Recording is thread-local and only active inside [`capture`]; outside it
//! the hooks are no-ops, so kernel functions stay pure.

use std::cell::RefCell;

use super::chart::Angle;
use super::scalar::{IteratedMean, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AverageRecord {
    /// `average_over_angle(input, angle) = output`.
    Mean {
        input: Scalar,
        angle: Angle,
        output: Scalar,
    },
    /// `iterated_mean(input, angle) = output`.
    Iterated {
        input: Scalar,
        angle: Angle,
        output: IteratedMean,
    },
}

thread_local! {
    static LOG: RefCell<Option<Vec<AverageRecord>>> = const { RefCell::new(None) };
}

/// Runs `f` and returns every average computed on this thread meanwhile.
pub fn capture<R>(f: impl FnOnce() -> R) -> (R, Vec<AverageRecord>) {
    let previous = LOG.with(|log| log.borrow_mut().replace(Vec::new()));
    let result = f();
    let records = LOG.with(|log| {
        let mut slot = log.borrow_mut();
        let records = slot.take().unwrap_or_default();
        *slot = previous.map(|mut outer| {
            outer.extend(records.iter().cloned());
            outer
        });
        records
    });
    (result, records)
}

pub(crate) fn record_mean(input: &Scalar, angle: Angle, output: &Scalar) {
    LOG.with(|log| {
        if let Some(records) = log.borrow_mut().as_mut() {
            records.push(AverageRecord::Mean {
                input: input.clone(),
                angle,
                output: output.clone(),
            });
        }
    });
}

pub(crate) fn record_iterated(input: &Scalar, angle: Angle, output: &IteratedMean) {
    LOG.with(|log| {
        if let Some(records) = log.borrow_mut().as_mut() {
            records.push(AverageRecord::Iterated {
                input: input.clone(),
                angle,
                output: output.clone(),
            });
        }
    });
}
