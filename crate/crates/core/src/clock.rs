//! Monotonic time sources. Durations are always differences of `now()`
//! readings from one clock; wall-clock time is never used.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

pub trait Clock: Send + Sync {
    /// Time elapsed since the clock's origin. Never decreases.
    fn now(&self) -> Duration;
    /// Wait for `d`. Simulated clocks advance instead of blocking.
    fn sleep(&self, d: Duration);
}

/// Real monotonic clock; `sleep` blocks the thread.
#[derive(Debug)]
pub struct MonotonicClock {
    origin: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        MonotonicClock {
            origin: Instant::now(),
        }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// Real monotonic clock whose `sleep` adds to a virtual offset instead of
/// blocking. Measured durations are real compute time plus simulated waits.
#[derive(Debug, Default)]
pub struct SimulatedLatencyClock {
    real: MonotonicClock,
    offset_nanos: AtomicU64,
}

impl SimulatedLatencyClock {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Clock for SimulatedLatencyClock {
    fn now(&self) -> Duration {
        self.real.now() + Duration::from_nanos(self.offset_nanos.load(Ordering::SeqCst))
    }

    fn sleep(&self, d: Duration) {
        self.offset_nanos
            .fetch_add(d.as_nanos() as u64, Ordering::SeqCst);
    }
}

/// Deterministic clock: the first reading is zero and every later reading
/// is `step` after the previous one. `sleep` adds to the time as well.
#[derive(Debug)]
pub struct FakeClock {
    step: Duration,
    state: Mutex<(Duration, bool)>,
}

impl FakeClock {
    pub fn new(step: Duration) -> Self {
        FakeClock {
            step,
            state: Mutex::new((Duration::ZERO, false)),
        }
    }
}

impl Clock for FakeClock {
    fn now(&self) -> Duration {
        let mut st = self.state.lock().unwrap();
        if st.1 {
            st.0 += self.step;
        }
        st.1 = true;
        st.0
    }

    fn sleep(&self, d: Duration) {
        self.state.lock().unwrap().0 += d;
    }
}
