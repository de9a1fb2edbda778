//! Bounded-geometry profiles, tree maps and orbit counts, and
//! asymptotic-dimension cover certificates.

mod certificate;
mod orbit;
mod profile;
mod spaces;
mod tree_map;

pub use certificate::{
    build_asdim_certificate, check_cover_certificate, AsdimKind, AsdimSpace, CertificateJson,
    CheckedCertificate, CoverCertificate, MAX_CERTIFICATE_POINTS,
};
pub use orbit::{orbit_growth_audit, OrbitReport, OrbitRow};
pub use profile::{geometry_profile, GeometryProfile, ProfileEntry};
pub use spaces::{IntegerGrid, IntegerLine, RegularTree};
pub use tree_map::{separated_count, tree_lipschitz_map, TreeMap, TreeMapCheck};
