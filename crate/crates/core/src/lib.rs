//! Diagonal multipoint Padé approximants to Cauchy transforms of complex
//! measures on finite unions of real intervals, with an added rational part,
//! plus the potential-theoretic machinery used to check their asymptotics.

pub mod algebra;
pub mod checkers;
pub mod cli;
pub mod measure;
pub mod pade;
pub mod potential;
pub mod problem;
pub mod scheme;
