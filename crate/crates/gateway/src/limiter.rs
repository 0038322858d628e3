use std::collections::VecDeque;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use crate::clock::Clock;

const WINDOW: Duration = Duration::from_secs(60);

/// Allows at most `per_minute` acquisitions in any sliding 60-second window.
pub struct RateLimiter {
    per_minute: usize,
    recent: Mutex<VecDeque<Duration>>,
    clock: Arc<dyn Clock>,
}

impl RateLimiter {
    pub fn new(per_minute: usize, clock: Arc<dyn Clock>) -> Self {
        RateLimiter { per_minute: per_minute.max(1), recent: Mutex::new(VecDeque::new()), clock }
    }

    /// Blocks until a slot is free, then takes it.
    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut recent = self.recent.lock().unwrap();
                let now = self.clock.now();
                while recent.front().is_some_and(|&t| now.saturating_sub(t) >= WINDOW) {
                    recent.pop_front();
                }
                if recent.len() < self.per_minute {
                    recent.push_back(now);
                    return;
                }
                (recent[0] + WINDOW).saturating_sub(now)
            };
            self.clock.sleep(wait.max(Duration::from_millis(1)));
        }
    }
}

/// Counting semaphore capping in-flight requests.
pub struct ConcurrencyLimit {
    available: Mutex<usize>,
    freed: Condvar,
}

pub struct Permit<'a> {
    limit: &'a ConcurrencyLimit,
}

impl ConcurrencyLimit {
    pub fn new(max: usize) -> Self {
        ConcurrencyLimit { available: Mutex::new(max.max(1)), freed: Condvar::new() }
    }

    pub fn acquire(&self) -> Permit<'_> {
        let mut n = self.available.lock().unwrap();
        while *n == 0 {
            n = self.freed.wait(n).unwrap();
        }
        *n -= 1;
        Permit { limit: self }
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.limit.available.lock().unwrap() += 1;
        self.limit.freed.notify_one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::FakeClock;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn sliding_window_defers_excess_calls() {
        let clock = Arc::new(FakeClock::default());
        let limiter = RateLimiter::new(3, clock.clone());
        for _ in 0..3 {
            limiter.acquire();
        }
        assert!(clock.sleeps().is_empty());
        clock.advance(Duration::from_secs(10));
        limiter.acquire();
        assert_eq!(clock.sleeps(), vec![Duration::from_secs(50)]);
        assert_eq!(clock.now(), Duration::from_secs(60));
    }

    #[test]
    fn window_never_exceeds_limit() {
        let clock = Arc::new(FakeClock::default());
        let limiter = RateLimiter::new(5, clock.clone());
        let mut stamps = Vec::new();
        for i in 0..23 {
            if i % 4 == 0 {
                clock.advance(Duration::from_secs(7));
            }
            limiter.acquire();
            stamps.push(clock.now());
        }
        for (i, t) in stamps.iter().enumerate() {
            let in_window = stamps[i..].iter().filter(|&&s| s < *t + WINDOW).count();
            assert!(in_window <= 5);
        }
    }

    #[test]
    fn concurrency_is_capped() {
        let limit = ConcurrencyLimit::new(2);
        let active = AtomicUsize::new(0);
        let peak = AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| {
                    let _p = limit.acquire();
                    let now = active.fetch_add(1, Ordering::SeqCst) + 1;
                    peak.fetch_max(now, Ordering::SeqCst);
                    std::thread::sleep(Duration::from_millis(5));
                    active.fetch_sub(1, Ordering::SeqCst);
                });
            }
        });
        assert!(peak.load(Ordering::SeqCst) <= 2);
    }
}
