//! Fault-path counting for Steane-code extended rectangles: gadget construction,
//! Pauli-frame propagation, malignant-pair classification and threshold estimates.

pub mod builders;
pub mod circuit;
pub mod engine;
pub mod exec;
pub mod malignancy;
pub mod pauli;
pub mod propagate;
pub mod reference;
pub mod report;
pub mod threshold;
pub mod verify;
