#![allow(dead_code)]

pub mod corpora;
pub mod dot;
pub mod invariants;
pub mod oracle;
