//! Subcommand implementations: settings resolution first, then
//! execution that renders one document.

pub mod components;
pub mod constants;
pub mod count;
pub mod expand;
pub mod generic;
pub mod reduce;
pub mod trace;
pub mod verify;
