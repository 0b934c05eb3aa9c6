//! The full per-array verdict.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::array::{CanonicalKey, ParameterArray};
use crate::factor::{factor_over_integers, FactoredPolynomial};
use crate::poly::IntPoly;
use crate::sieve::{
    for_each_candidate, frame_check, handshake_check, nontrivial_factors, trace_check, MultiplicityProfile,
};
use crate::sita::{derive_sita, distance_partition, generator_array, is_p_polynomial, SitaBasis, ValidationError};
use crate::spectral::{noncyclotomic, polynomial_in, spectral_data, true_multiplicities, Check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    Handshake,
    Multiplicities,
    Frame,
    DiscriminantSquare,
    Trace,
    Orthogonality,
    Krein,
    AbsoluteBound,
}

impl Reason {
    pub const ALL: [Reason; 8] = [
        Reason::Handshake,
        Reason::Multiplicities,
        Reason::Frame,
        Reason::DiscriminantSquare,
        Reason::Trace,
        Reason::Orthogonality,
        Reason::Krein,
        Reason::AbsoluteBound,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Handshake => "handshake",
            Reason::Multiplicities => "multiplicities",
            Reason::Frame => "frame",
            Reason::DiscriminantSquare => "disc_square",
            Reason::Trace => "trace",
            Reason::Orthogonality => "orthogonality",
            Reason::Krein => "krein",
            Reason::AbsoluteBound => "absolute_bound",
        }
    }

    pub fn parse(s: &str) -> Option<Reason> {
        Reason::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Invalid(String),
    Infeasible(Reason),
    Feasible,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Invalid(_) => "INVALID",
            Status::Infeasible(_) => "INFEASIBLE",
            Status::Feasible => "FEASIBLE",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Invalid(why) => write!(f, "INVALID({why})"),
            Status::Infeasible(r) => write!(f, "INFEASIBLE({})", r.as_str()),
            Status::Feasible => f.write_str("FEASIBLE"),
        }
    }
}

/// Every flag computed for one array. Flags of stages that were not reached
/// are `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityRecord {
    pub array: ParameterArray,
    /// For a valid array, the least canonical form over every relation that
    /// generates the scheme; otherwise the canonical form of the array itself.
    pub canonical: Option<(ParameterArray, CanonicalKey)>,
    pub status: Status,
    pub minimal_polynomial: Option<IntPoly>,
    pub factors: Vec<IntPoly>,
    pub discriminant: Option<BigInt>,
    pub handshake: Option<bool>,
    pub multiplicities_exist: Option<bool>,
    pub frame_integral: Option<bool>,
    pub disc_over_frame_square: Option<bool>,
    pub trace_integral: Option<bool>,
    pub trace_standard: Option<bool>,
    pub orthogonality: Option<Check>,
    pub krein: Option<Check>,
    pub absolute_bound: Option<bool>,
    pub noncyclotomic: bool,
    pub polynomial_in: Vec<usize>,
    pub copolynomial_in_e: Vec<usize>,
    pub copolynomial_in_idempotent: bool,
    pub idempotent_witness: Option<Vec<usize>>,
    /// The profile passing orthogonality, or else the first one passing
    /// the Frame and trace tests.
    pub profile: Option<MultiplicityProfile>,
    pub distance_partition: Vec<Vec<usize>>,
    pub p_polynomial: bool,
}

impl FeasibilityRecord {
    fn invalid(a: &ParameterArray, why: String) -> Self {
        FeasibilityRecord {
            array: a.clone(),
            canonical: a.canonicalize().ok(),
            status: Status::Invalid(why),
            minimal_polynomial: None,
            factors: Vec::new(),
            discriminant: None,
            handshake: None,
            multiplicities_exist: None,
            frame_integral: None,
            disc_over_frame_square: None,
            trace_integral: None,
            trace_standard: None,
            orthogonality: None,
            krein: None,
            absolute_bound: None,
            noncyclotomic: false,
            polynomial_in: Vec::new(),
            copolynomial_in_e: Vec::new(),
            copolynomial_in_idempotent: false,
            idempotent_witness: None,
            profile: None,
            distance_partition: Vec::new(),
            p_polynomial: false,
        }
    }

    pub fn is_valid(&self) -> bool {
        !matches!(self.status, Status::Invalid(_))
    }

    /// Valid and some multiplicity profile passes the Frame, discriminant
    /// and trace tests. These are the arrays a search keeps.
    pub fn in_database(&self) -> bool {
        self.is_valid() && self.trace_integral == Some(true)
    }

    pub fn frame_number(&self) -> Option<&BigRational> {
        self.profile.as_ref().map(|p| &p.frame_number)
    }

    pub fn key(&self) -> Option<&CanonicalKey> {
        self.canonical.as_ref().map(|c| &c.1)
    }
}

/// The quick tests on one profile: Frame integrality, `D/F` square, trace.
fn quick_tests(p: &MultiplicityProfile, fp: &FactoredPolynomial, b: &SitaBasis) -> (bool, bool, bool, bool) {
    let fr = frame_check(p, &fp.discriminant);
    if !fr.ratio_square {
        return (fr.integral, false, false, false);
    }
    let tr = trace_check(p, b.b1());
    (true, true, tr.integral, tr.standard)
}

/// Validate, sieve, then the spectral layer.
pub fn run_all(a: &ParameterArray) -> FeasibilityRecord {
    match derive_sita(a) {
        Ok(b) => {
            let fp = factor_over_integers(b.minimal_polynomial());
            evaluate(a, &b, &fp)
        }
        Err(e) => FeasibilityRecord::invalid(a, invalid_reason(&e)),
    }
}

/// The full record, but only for arrays passing the Frame, discriminant and
/// trace tests on some profile. Cheaper than `run_all` on arrays that fail.
pub fn run_gated(a: &ParameterArray) -> Option<FeasibilityRecord> {
    let b = derive_sita(a).ok()?;
    let fp = factor_over_integers(b.minimal_polynomial());
    let pass = for_each_candidate(&fp, b.valencies(), |p| {
        if frame_check(&p, &fp.discriminant).ratio_square && trace_check(&p, b.b1()).integral {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    matches!(pass, Ok(Some(()))).then(|| evaluate(a, &b, &fp))
}

/// Least canonical form over the generating relations of a scheme.
pub fn scheme_canonical(b: &SitaBasis, generators: &[usize]) -> Option<(ParameterArray, CanonicalKey)> {
    generators
        .iter()
        .filter_map(|&j| generator_array(b, j).canonicalize().ok())
        .min_by(|x, y| x.0.flat().cmp(&y.0.flat()))
}

fn evaluate(a: &ParameterArray, basis: &SitaBasis, fp: &FactoredPolynomial) -> FeasibilityRecord {
    let mut rec = FeasibilityRecord::invalid(a, String::new());
    let d = basis.d();
    rec.minimal_polynomial = Some(basis.minimal_polynomial().clone());
    rec.factors = fp.irreducibles().cloned().collect();
    rec.discriminant = Some(fp.discriminant.clone());
    rec.distance_partition = distance_partition(basis).unwrap_or_default();
    rec.p_polynomial = is_p_polynomial(basis);
    rec.polynomial_in = (1..=d).filter(|&j| polynomial_in(basis, j)).collect();
    rec.canonical = scheme_canonical(basis, &rec.polynomial_in).or(rec.canonical);
    rec.noncyclotomic = noncyclotomic(fp);
    rec.handshake = Some(handshake_check(basis));

    let mut exists = false;
    let mut frame = false;
    let mut square = false;
    let mut trace = false;
    let mut standard = false;
    let mut confirmed: Option<MultiplicityProfile> = None;
    let mut witness: Option<MultiplicityProfile> = None;

    let factors = nontrivial_factors(fp, basis.k(1)).unwrap_or_default();
    let forced = true_multiplicities(basis, &factors);
    if let Some(m) = &forced {
        // the forced profile comes first; it is the only one that can pass
        // orthogonality
        let _ = for_each_candidate(fp, basis.valencies(), |p| {
            if p.multiplicities == *m {
                exists = true;
                let (fi, sq, tr, st) = quick_tests(&p, fp, basis);
                frame |= fi;
                square |= sq;
                if tr {
                    trace = true;
                    standard = st;
                    confirmed = Some(p.clone());
                    witness = Some(p);
                }
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
    }
    if witness.is_none() {
        let _ = for_each_candidate(fp, basis.valencies(), |p| {
            exists = true;
            let (fi, sq, tr, st) = quick_tests(&p, fp, basis);
            frame |= fi;
            square |= sq;
            if tr {
                trace = true;
                standard = st;
                witness = Some(p);
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
    }
    rec.multiplicities_exist = Some(exists);
    if exists {
        rec.frame_integral = Some(frame);
        rec.disc_over_frame_square = Some(square);
        rec.trace_integral = Some(trace);
        rec.trace_standard = Some(trace && standard);
    }

    if trace {
        let mut ortho = Check::Fail;
        if let Some(p) = &confirmed {
            let mut s = spectral_data(basis, p);
            if s.orthogonality() {
                ortho = Check::Pass;
                let (krein, absolute) = s.krein_and_absolute_bound();
                rec.krein = Some(krein);
                rec.absolute_bound = Some(absolute);
                rec.copolynomial_in_e = s.copolynomial_in_e();
                rec.idempotent_witness = s.idempotent_witness();
                rec.copolynomial_in_idempotent = rec.idempotent_witness.is_some();
            }
        }
        rec.orthogonality = Some(ortho);
        rec.profile = if ortho == Check::Pass { confirmed } else { witness };
    }

    rec.status = status_of(&rec);
    rec
}

fn status_of(r: &FeasibilityRecord) -> Status {
    let failed = |flag: Option<bool>| flag != Some(true);
    let checks = [
        (Reason::Handshake, failed(r.handshake)),
        (Reason::Multiplicities, failed(r.multiplicities_exist)),
        (Reason::Frame, failed(r.frame_integral)),
        (Reason::DiscriminantSquare, failed(r.disc_over_frame_square)),
        (Reason::Trace, failed(r.trace_integral)),
        (Reason::Orthogonality, r.orthogonality != Some(Check::Pass)),
        (Reason::Krein, r.krein != Some(Check::Pass)),
        (Reason::AbsoluteBound, failed(r.absolute_bound)),
    ];
    match checks.into_iter().find(|c| c.1) {
        Some((reason, _)) => Status::Infeasible(reason),
        None => Status::Feasible,
    }
}

fn invalid_reason(e: &ValidationError) -> String {
    use alloc::string::ToString;
    match e {
        ValidationError::Model(m) => m.to_string(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::parse_array;

    fn run(s: &str) -> FeasibilityRecord {
        run_all(&parse_array(s).unwrap())
    }

    #[test]
    fn pentagon_is_feasible() {
        let r = run("[[2,2],[1]]");
        assert_eq!(r.status, Status::Feasible);
        assert!(r.p_polynomial && !r.noncyclotomic);
        assert_eq!(r.profile.unwrap().multiplicities, [2]);
    }

    #[test]
    fn invalid_arrays() {
        let r = run("[[2,2],[2]]");
        assert!(matches!(r.status, Status::Invalid(_)));
        assert!(!r.in_database());
        assert!(run_gated(&parse_array("[[2,2],[2]]").unwrap()).is_none());
    }

    #[test]
    fn known_rank_four_schemes() {
        for a in ["[[8,6,12],[4,2;2]]", "[[8,16,2],[3,0;8]]", "[[5,5,1],[2,0;5]]"] {
            let r = run(a);
            assert_eq!(r.status, Status::Feasible, "{a}");
            assert_eq!(run_gated(&parse_array(a).unwrap()), Some(r));
        }
    }

    #[test]
    fn trace_failures_are_not_kept() {
        for a in ["[[18,9,36,36],[2,0,4;2,2;10]]", "[[12,6,4,6,6,9],[10,0,0,6,4;0,2,0,0;0,2,4;4,4;0]]"] {
            let r = run(a);
            assert_eq!(r.status, Status::Infeasible(Reason::Trace), "{a}");
            assert_eq!(r.disc_over_frame_square, Some(true));
            assert!(!r.in_database());
            assert_eq!(run_gated(&parse_array(a).unwrap()), None);
        }
    }

    #[test]
    fn generators_share_a_key() {
        let a = run("[[4,12,12,6],[1,0,0;1,2;2]]");
        let b = run("[[12,4,6,12],[3,4,5;2,1;3]]");
        assert_eq!(a.key(), b.key());
        let text = &a.key().unwrap().0;
        assert_eq!(text, "[[4,6,12,12],[0,0,1;1,1;1]]");
        assert_eq!(run(text).key(), a.key());
        let c = run("[[8,8,4,24],[3,0,1;2,1;1]]");
        let d = run("[[8,8,24,4],[1,2,0;1,2;6]]");
        assert_eq!(c.key(), d.key());
    }
}
