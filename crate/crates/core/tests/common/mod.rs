pub mod ideals;
