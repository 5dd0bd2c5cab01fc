//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the code paths it is used to check.
#![allow(dead_code)]

pub mod lp_oracle;
pub mod schedules;
