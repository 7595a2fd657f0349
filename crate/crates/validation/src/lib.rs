//! Holds the `acceptance` test target: `cargo test -p plasticwalk-validation`.
