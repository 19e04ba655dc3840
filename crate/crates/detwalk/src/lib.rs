pub mod fullspace;
pub mod linalg;
pub mod pipeline;
pub mod report;
pub mod search;
pub mod subspaces;
