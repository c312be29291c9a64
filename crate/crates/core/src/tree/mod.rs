//! The Bass-Serre tree of an amalgam and ping-pong certificates.

mod classify;
mod pingpong;
mod vertex;

pub use classify::{
    default_radius, Axis, Bridge, Classification, DisplacementSearch, InvariantLine, ProductCheck, TreeError, Verdict,
    VERTEX_CAP,
};
pub use pingpong::{
    certify_free_monoid, certify_free_split, replay, BasePoint, Certificate, CertificateKind, CertifiedElement,
    CertifyError, CertifyOptions, Check, Method, NamedRegion, Region, ReplayError,
};
pub use vertex::{Tree, TreeVertex};
