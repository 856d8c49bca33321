pub mod client;
pub mod distribution;
pub mod graph;
pub mod iso;
pub mod metrics;
pub mod molhiv;
pub mod prompt;
pub mod rules;
pub mod runner;
