pub mod gen;
pub mod naive;
