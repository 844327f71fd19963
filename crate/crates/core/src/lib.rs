pub mod config;
pub mod fixtures;
pub mod interp;
pub mod lang;
pub mod model;
pub mod profile_diff;
pub mod slice;
pub mod testkit;
pub mod seconds;
