pub mod error;
pub mod rational;
pub mod series;
pub mod quasimodular;
pub mod severi;
pub mod cobordism;
pub mod multipoly;
pub mod universal;
pub mod cli;
