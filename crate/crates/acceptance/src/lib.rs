//! Acceptance checks for `concneg` live in `tests/acceptance.rs`.
