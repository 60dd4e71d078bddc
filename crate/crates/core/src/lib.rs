//! Leader input synthesis for leader-follower multi-agent systems whose
//! followers only receive absolute state information when the leader
//! passes close by.
//!
//! The pipeline: metric temporal logic requirements ([`mtl`]) are rewritten
//! against the executed prefix, encoded as a mixed-integer linear program
//! ([`milp`]) over the leader's discretised dynamics ([`plant`]), and solved
//! in a receding-horizon loop ([`synth`]) whose dwell-time deadlines come
//! from [`dwell`].

pub mod dwell;
pub mod linalg;
pub mod milp;
pub mod mtl;
pub mod plant;
pub mod scenario;
pub mod synth;
