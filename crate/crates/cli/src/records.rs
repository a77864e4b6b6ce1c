//! The eigensystem record wire format: a JSON document carrying one
//! system's modulus p^m, coefficient-field data and canonical coefficient
//! vectors through the Sturm bound of its weight, plus a free-form
//! provenance string. Records are what the store holds, what `import`
//! validates, and what `export` writes back out canonically.
//!
//! Conventions:
//! - all coefficient values are decimal strings (they outgrow u64),
//! - `residue_poly` is present exactly when the residue degree exceeds 1,
//!   and must be the canonical modulus for that degree so that
//!   coordinate vectors from different tools mean the same thing,
//! - a record never describes ramified mass: those entries carry no
//!   coefficient claims, so there is nothing to store.

use modpm_core::eigen::Eigensystem;
use modpm_core::forms::sturm_bound;
use modpm_core::unramified::UnramifiedRing;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigensystemRecord {
    pub schema_version: u32,
    pub level: u64,
    pub weight: u64,
    pub p: u64,
    pub m: u32,
    pub residue_degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue_poly: Option<Vec<u64>>,
    /// Largest n with a stored coefficient; coefficients cover 1..=bound.
    pub bound: usize,
    /// Pairs (n, coordinate vector), ascending n, values as decimal strings.
    pub coefficients: Vec<(usize, Vec<String>)>,
    pub provenance: String,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Structural validation. Everything a record claims about itself is
/// checked here; mathematical use (occurrence scans etc.) may impose
/// further preconditions at the command layer.
pub fn validate(rec: &EigensystemRecord) -> Result<(), String> {
    if rec.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported schema_version {} (this build reads {})",
            rec.schema_version, SCHEMA_VERSION
        ));
    }
    if rec.level == 0 {
        return Err("level must be positive".into());
    }
    if !is_prime(rec.p) {
        return Err(format!("p = {} is not prime", rec.p));
    }
    if rec.m == 0 {
        return Err("m must be at least 1".into());
    }
    if rec.residue_degree == 0 {
        return Err("residue_degree must be at least 1".into());
    }
    match (&rec.residue_poly, rec.residue_degree) {
        (None, 1) => {}
        (Some(_), 1) => {
            return Err("residue_poly must be absent for residue degree 1".into());
        }
        (None, d) => {
            return Err(format!(
                "residue degree {} needs an explicit residue_poly",
                d
            ));
        }
        (Some(poly), d) => {
            let canonical = UnramifiedRing::standard(rec.p, rec.m, d);
            if poly.as_slice() != canonical.modulus_poly() {
                return Err(format!(
                    "residue_poly {:?} is not the canonical degree-{} modulus over p = {} \
                     (expected {:?}); re-express the coefficients in the canonical basis",
                    poly,
                    d,
                    rec.p,
                    canonical.modulus_poly()
                ));
            }
        }
    }
    if rec.bound == 0 {
        return Err("bound must be at least 1".into());
    }
    if rec.coefficients.len() != rec.bound {
        return Err(format!(
            "coefficients must cover n = 1..={} but {} entries are present",
            rec.bound,
            rec.coefficients.len()
        ));
    }
    let modulus = BigUint::from(rec.p).pow(rec.m);
    for (i, (n, v)) in rec.coefficients.iter().enumerate() {
        if *n != i + 1 {
            return Err(format!(
                "coefficient entry {} is labelled n = {}; entries must be 1, 2, ... in order",
                i, n
            ));
        }
        if v.len() != rec.residue_degree as usize {
            return Err(format!(
                "a_{} has {} coordinates; residue degree {} demands exactly that many",
                n,
                v.len(),
                rec.residue_degree
            ));
        }
        for s in v {
            let val: BigUint = s
                .parse()
                .map_err(|_| format!("a_{} coordinate '{}' is not a decimal integer", n, s))?;
            if val >= modulus {
                return Err(format!(
                    "a_{} coordinate {} is not a canonical representative mod {}^{}",
                    n, s, rec.p, rec.m
                ));
            }
        }
    }
    let one = &rec.coefficients[0].1;
    let normalized = one[0] == "1" && one[1..].iter().all(|c| c == "0");
    if !normalized {
        return Err("a_1 must be 1 (the system must be normalized)".into());
    }
    Ok(())
}

/// Content id: a truncated SHA-256 over the mathematical content of the
/// record. Provenance and schema plumbing deliberately stay out of the
/// hash so the same system imported from two sources collides into one
/// store entry.
pub fn record_id(rec: &EigensystemRecord) -> String {
    #[derive(Serialize)]
    struct IdPayload<'a> {
        level: u64,
        weight: u64,
        p: u64,
        m: u32,
        residue_degree: u32,
        residue_poly: &'a Option<Vec<u64>>,
        bound: usize,
        coefficients: &'a [(usize, Vec<String>)],
    }
    let payload = serde_json::to_vec(&IdPayload {
        level: rec.level,
        weight: rec.weight,
        p: rec.p,
        m: rec.m,
        residue_degree: rec.residue_degree,
        residue_poly: &rec.residue_poly,
        bound: rec.bound,
        coefficients: &rec.coefficients,
    })
    .expect("record fields serialize");
    let digest = Sha256::digest(&payload);
    digest[..8].iter().map(|b| format!("{:02x}", b)).collect()
}

/// The canonical on-disk bytes of a record: pretty-printed JSON plus a
/// trailing newline. `export` always writes exactly these bytes, which is
/// what makes import → export a byte-level round trip on canonical files.
pub fn canonical_record_bytes(rec: &EigensystemRecord) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(rec).expect("record fields serialize");
    text.push('\n');
    text.into_bytes()
}

pub fn from_eigensystem(sys: &Eigensystem, provenance: String) -> Result<EigensystemRecord, String> {
    if sys.ramified {
        return Err(
            "ramified entries carry no coefficient claims and cannot become records".into(),
        );
    }
    let rec = EigensystemRecord {
        schema_version: SCHEMA_VERSION,
        level: sys.level,
        weight: sys.weight,
        p: sys.p,
        m: sys.m,
        residue_degree: sys.residue_degree,
        residue_poly: (sys.residue_degree > 1).then(|| sys.modulus_poly.clone()),
        bound: sys.bound(),
        coefficients: sys
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, v)| (i + 1, v.iter().map(|c| c.to_string()).collect()))
            .collect(),
        provenance,
    };
    validate(&rec)?;
    Ok(rec)
}

pub fn to_eigensystem(rec: &EigensystemRecord) -> Result<Eigensystem, String> {
    validate(rec)?;
    let modulus_poly = match &rec.residue_poly {
        Some(poly) => poly.clone(),
        None => UnramifiedRing::standard(rec.p, rec.m, 1)
            .modulus_poly()
            .to_vec(),
    };
    let coefficients = rec
        .coefficients
        .iter()
        .map(|(_, v)| v.iter().map(|s| s.parse().expect("validated decimal")).collect())
        .collect();
    Ok(Eigensystem {
        level: rec.level,
        weight: rec.weight,
        p: rec.p,
        m: rec.m,
        residue_degree: rec.residue_degree,
        modulus_poly,
        coefficients,
        ramified: false,
    })
}

/// The least `bound` a record must carry before the occurrence scan can
/// run on it (the scan matches coefficients through the Sturm bound of
/// the record's own weight).
pub fn occurrence_bound(weight: u64) -> usize {
    sturm_bound(weight)
}
