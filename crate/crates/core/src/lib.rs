pub mod arith;
pub mod certify;
pub mod cli;
pub mod finfield;
pub mod matgroup;
pub mod numfield;
pub mod orders;
pub mod quadform;
