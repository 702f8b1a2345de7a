//! Library half of the experiment runner; the binary is a thin shell over
//! [`config`] parsing and [`run::execute`].

pub mod config;
pub mod run;
