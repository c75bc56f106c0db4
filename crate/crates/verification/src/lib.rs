//! Acceptance criteria for `fwlab`; see `tests/acceptance.rs`.
