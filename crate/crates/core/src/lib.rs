pub mod building;
pub mod canon;
pub mod cli;
pub mod config;
pub mod contracts;
pub mod dataset;
pub mod ledger;
pub mod planner;
pub mod rdf;
pub mod sensitivity;
pub mod service;
pub mod sim;
pub mod time;
pub mod vocab;
