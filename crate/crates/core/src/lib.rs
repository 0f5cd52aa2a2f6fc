pub mod harvest;
pub mod model;
pub mod quad;
pub mod specfun;
