pub mod chars;
pub mod classify;
mod dec;
pub mod error;
pub mod ff;
pub mod modstruct;
pub mod nt;
pub mod poly;
pub mod search;
