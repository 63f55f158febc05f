pub mod circuit;
pub mod compiler;
pub mod device;
pub mod harness;
pub mod orchestrator;
pub mod partition;
pub mod sim;
