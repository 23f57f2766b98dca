/// Monotonic time source. The core crate has no clock of its own; callers
/// with `std` supply one.
pub trait Stopwatch {
    fn elapsed_micros(&self) -> u64;
}

/// A clock that never advances. Budgets measured with it never expire.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Stopwatch for NoClock {
    fn elapsed_micros(&self) -> u64 {
        0
    }
}

/// Wall-clock limit checked against a [`Stopwatch`].
#[derive(Clone, Copy)]
pub struct Deadline<'a> {
    clock: &'a dyn Stopwatch,
    limit_micros: Option<u64>,
}

impl<'a> Deadline<'a> {
    pub fn new(clock: &'a dyn Stopwatch, limit_micros: Option<u64>) -> Self {
        Deadline { clock, limit_micros }
    }

    pub fn unlimited() -> Deadline<'static> {
        Deadline { clock: &NoClock, limit_micros: None }
    }

    pub fn expired(&self) -> bool {
        self.limit_micros.is_some_and(|l| self.clock.elapsed_micros() >= l)
    }

    pub fn clock(&self) -> &'a dyn Stopwatch {
        self.clock
    }
}

impl core::fmt::Debug for Deadline<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Deadline").field("limit_micros", &self.limit_micros).finish()
    }
}
