//! Holds the acceptance suite. Run it with
//! `cargo test -p ifp-validation --test acceptance`.
