//! Covering numbers, admissible sequences, `γ_{2,s}` and the chaining
//! schedules.

pub mod admissible;
pub mod covering;
pub mod integrals;
pub mod schedule;

pub use admissible::{
    build_admissible, build_capped, build_rooted, depth_for, gamma2, gamma2_profile,
    level_cap, minkowski_product, AdmissibleSequence, Strategy,
};
pub use covering::{covering_number, entropy_number, packing_number, CountResult, EntropyNumber};
pub use integrals::{dudley_integral, entropy_integral_u, sum_vs_integral, IntegralResult};
pub use schedule::{schedule_entropy, schedule_gamma, tau_m, Schedule, ScheduleKind};
