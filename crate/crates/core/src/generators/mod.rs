//! Seeded generation of elements and map families.

pub mod elements;
pub mod families;
