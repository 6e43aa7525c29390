//! Theta characteristics over F₂, orbits of quadruples of even
//! characteristics, the hyperelliptic partition model, a bi-elliptic model,
//! certified theta constants and an exact transversality check.

pub mod bielliptic;
pub mod f2;
pub mod hyperelliptic;
pub mod orbits;
pub mod quadform;
pub mod theta;
pub mod transversal;
pub mod verify;
