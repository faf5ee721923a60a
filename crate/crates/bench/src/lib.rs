//! Benchmarks for `lietp-core`; see `benches/oracle.rs`.
