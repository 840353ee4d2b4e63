pub mod commands;
pub mod config;
pub mod families;
pub mod geometry;
pub mod ghost;
pub mod group;
pub mod linalg;
pub mod rep;
pub mod report;
