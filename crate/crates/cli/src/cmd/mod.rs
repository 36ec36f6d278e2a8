pub mod decompose;
pub mod spectrum;
pub mod verify;
