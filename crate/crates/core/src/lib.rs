// SPDX-License-Identifier: Apache-2.0

pub mod composer;
pub mod config;
pub mod dataset;
pub mod edit;
pub mod exec;
pub mod gateway;
pub mod harness;
pub mod matching;
pub mod metrics;
pub mod program;
pub mod synthesis;
pub mod taxonomy;
pub mod toy;
