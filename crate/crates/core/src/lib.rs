pub mod cli;
pub mod curve;
pub mod energy;
pub mod error;
pub mod example;
pub mod flow;
pub mod frenet;
pub mod io;
pub mod numerics;
pub mod vector;
