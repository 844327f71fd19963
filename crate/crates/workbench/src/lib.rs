//! Workspace persistence, command-line commands and the HTTP service built
//! on the `perfchain` analyses.

pub mod cli;
pub mod error;
pub mod render;
pub mod server;
pub mod session;
pub mod store;

pub use error::WorkbenchError;
pub use session::Session;
pub use store::Workspace;
