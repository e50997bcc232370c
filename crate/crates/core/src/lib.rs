// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

pub mod bench;
pub mod densela;
pub mod error;
pub mod lp;
pub mod optimizers;
pub mod oracles;
pub mod qaoa;
pub mod selftest;
pub mod spinmodel;
pub mod subproblem;
pub mod uncertainty;

pub use error::{Error, Result};
