//! Empty library; the suite lives in `tests/acceptance.rs`.
