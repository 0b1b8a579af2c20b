//! Files, providers, batch mining, evaluation and the command line around
//! [`scenmine_core`].

pub mod batch;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod evaluation;
pub mod io;
pub mod provider;
