//! Resident-memory measurement from `/proc`.

use std::fs;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

/// Reads a `kB` field such as `VmRSS` or `VmHWM` from a `/proc/*/status`
/// file, in bytes.
pub fn status_field(pid: Option<u32>, field: &str) -> Option<u64> {
    let path = match pid {
        Some(p) => format!("/proc/{p}/status"),
        None => "/proc/self/status".to_string(),
    };
    let text = fs::read_to_string(path).ok()?;
    text.lines().find_map(|l| {
        let rest = l.strip_prefix(field)?.strip_prefix(':')?;
        let kb: u64 = rest.trim().trim_end_matches("kB").trim().parse().ok()?;
        Some(kb * 1024)
    })
}

/// Samples the resident set of this process at 100 Hz until stopped.
pub struct PeakSampler {
    stop: Arc<AtomicBool>,
    peak: Arc<AtomicU64>,
    handle: Option<JoinHandle<()>>,
}

impl PeakSampler {
    pub fn start() -> PeakSampler {
        let stop = Arc::new(AtomicBool::new(false));
        let peak = Arc::new(AtomicU64::new(status_field(None, "VmRSS").unwrap_or(0)));
        let (s, p) = (stop.clone(), peak.clone());
        let handle = thread::spawn(move || {
            while !s.load(Ordering::Relaxed) {
                if let Some(rss) = status_field(None, "VmRSS") {
                    p.fetch_max(rss, Ordering::Relaxed);
                }
                thread::sleep(Duration::from_millis(10));
            }
        });
        PeakSampler { stop, peak, handle: Some(handle) }
    }

    /// Peak so far, including the kernel's high-water mark.
    pub fn peak(&self) -> u64 {
        let hwm = status_field(None, "VmHWM").unwrap_or(0);
        self.peak.load(Ordering::Relaxed).max(hwm)
    }

    pub fn stop(mut self) -> u64 {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
        self.peak()
    }
}

impl Drop for PeakSampler {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
    }
}

pub fn to_mb(bytes: u64) -> f64 {
    bytes as f64 / (1024.0 * 1024.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sees_an_allocation() {
        let s = PeakSampler::start();
        let before = s.peak();
        let v = vec![1u8; 64 << 20];
        thread::sleep(Duration::from_millis(50));
        let after = s.stop();
        assert!(after >= before + (60 << 20), "{before} -> {after}");
        drop(v);
    }
}
