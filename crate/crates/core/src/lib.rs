pub mod cli;
pub mod complete01;
pub mod experiments;
pub mod greedy;
pub mod io;
pub mod key;
pub mod oracle;
pub mod reduction;
pub mod rng;
pub mod subseq;
pub mod tree;
