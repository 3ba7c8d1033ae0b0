//! Acceptance suite for squeezekit. Run with `cargo test -p squeezekit-verify`.
