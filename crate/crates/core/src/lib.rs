pub mod cli;
pub mod encoding;
pub mod engine;
pub mod evaluation;
pub mod network;
pub mod trainer;

/// Worker parallelism, capped by `CATAN_XDIM_THREADS` when set.
pub fn thread_limit(requested: usize) -> usize {
    let cap = std::env::var("CATAN_XDIM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match cap {
        Some(c) => requested.min(c).max(1),
        None => requested.max(1),
    }
}
