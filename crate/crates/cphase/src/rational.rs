//! Rational approximations that pick out the gate operating points.
//!
//! The resonant gate condition asks for gT = nπ with √2·gT close to an odd
//! multiple of π, i.e. for good rational approximations m/n to √2; the
//! detuned condition generalizes this to integer triples (n, m, q) with
//! 2n² ≈ m² + q² and m, q of opposite parity. Continued-fraction convergents
//! supply the approximations with the 1/n² error that keeps the residual
//! phase bounded.
//!
//! ```
//! use cphase::rational::{resonance_triples, sqrt2_convergents};
//!
//! let c: Vec<(u64, u64)> = sqrt2_convergents(5)?
//!     .iter().map(|x| (x.p, x.q)).collect();
//! assert_eq!(c, vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);
//!
//! // The (3,4,1) triple predicts the first detuned operating point.
//! let triples = resonance_triples(10)?;
//! let t = triples.iter().find(|t| (t.n, t.m, t.q) == (3, 4, 1)).unwrap();
//! assert!((t.delta_over_g - 0.707).abs() < 5e-4);
//! assert!((t.g_t - 8.886).abs() < 5e-4);
//! # Ok::<(), cphase::Error>(())
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// One continued-fraction convergent p/q of a quadratic surd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub p: u64,
    pub q: u64,
    /// The integer D whose square root is approximated.
    pub surd: u64,
    /// The convergent index, starting at 0 for the integer part.
    pub index: usize,
}

impl Convergent {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// |√D − p/q|; bounded by 1/q² for every convergent.
    pub fn error(&self) -> f64 {
        ((self.surd as f64).sqrt() - self.value()).abs()
    }
}

/// Continued-fraction convergents of √D for non-square D > 1.
///
/// Uses the periodic expansion of quadratic surds in exact integer
/// arithmetic; overflow of the (exponentially growing) numerators is an
/// error rather than a wrap.
pub fn surd_convergents(d: u64, count: usize) -> Result<Vec<Convergent>> {
    if count == 0 {
        return Err(Error::InvalidParams("count must be >= 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidParams(format!("surd must be >= 2, got {d}")));
    }
    let a0 = d.isqrt();
    if a0 * a0 == d {
        return Err(Error::PerfectSquare(d));
    }
    // Periodic continued fraction of sqrt(d): a_k from the (m, den) recursion.
    let mut m: u64 = 0;
    let mut den: u64 = 1;
    let mut a = a0;
    let (mut p_prev, mut p) = (1u64, a0);
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut out = Vec::with_capacity(count);
    out.push(Convergent {
        p,
        q,
        surd: d,
        index: 0,
    });
    for index in 1..count {
        m = den * a - m;
        den = (d - m * m) / den;
        a = (a0 + m) / den;
        let p_next = a
            .checked_mul(p)
            .and_then(|x| x.checked_add(p_prev))
            .ok_or(Error::Overflow("computing convergent numerators"))?;
        let q_next = a
            .checked_mul(q)
            .and_then(|x| x.checked_add(q_prev))
            .ok_or(Error::Overflow("computing convergent denominators"))?;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        out.push(Convergent {
            p,
            q,
            surd: d,
            index,
        });
    }
    Ok(out)
}

/// Convergents of √2 from the dedicated recurrence
/// p' = p + 2q, q' = p + q, starting at 1/1.
///
/// Every numerator is odd, which is exactly what the resonant gate condition
/// needs. Agrees term by term with [`surd_convergents`]`(2, ...)`.
pub fn sqrt2_convergents(count: usize) -> Result<Vec<Convergent>> {
    if count == 0 {
        return Err(Error::InvalidParams("count must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(count);
    let (mut p, mut q) = (1u64, 1u64);
    for index in 0..count {
        out.push(Convergent {
            p,
            q,
            surd: 2,
            index,
        });
        let p_next = p
            .checked_add(q.checked_mul(2).ok_or(Error::Overflow("doubling q"))?)
            .ok_or(Error::Overflow("advancing sqrt(2) numerator"))?;
        let q_next = p
            .checked_add(q)
            .ok_or(Error::Overflow("advancing sqrt(2) denominator"))?;
        p = p_next;
        q = q_next;
    }
    Ok(out)
}

/// Integer triple approximately satisfying 2n² = m² + q², with the detuned
/// operating point it predicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceTriple {
    pub n: u64,
    pub m: u64,
    pub q: u64,
    /// |2n² − m² − q²|.
    pub residual: u64,
    /// δ/g = 2q / √(n² − q²).
    pub delta_over_g: f64,
    /// gT = π √(n² − q²).
    pub g_t: f64,
}

impl ResonanceTriple {
    fn new(n: u64, m: u64, q: u64) -> Self {
        let residual = (2 * n * n).abs_diff(m * m + q * q);
        let root = ((n * n - q * q) as f64).sqrt();
        ResonanceTriple {
            n,
            m,
            q,
            residual,
            delta_over_g: 2.0 * q as f64 / root,
            g_t: PI * root,
        }
    }

    /// Scale-free quality measure; the 1/n² scaling is what keeps the phase
    /// error bounded as the triples grow.
    pub fn quality(&self) -> f64 {
        self.residual as f64 / (self.n * self.n) as f64
    }
}

/// All candidate triples with m > n > q ≥ 1, n ≤ max_n and m, q of opposite
/// parity, ranked by residual/n² (ties broken by gT).
///
/// Exact integer solutions of 2n² = m² + q² force m and q to share parity,
/// so every listed triple has residual ≥ 1.
pub fn resonance_triples(max_n: u64) -> Result<Vec<ResonanceTriple>> {
    if max_n < 2 {
        return Err(Error::InvalidParams("max_n must be >= 2".into()));
    }
    if max_n > 1_000_000 {
        return Err(Error::Overflow("resonance triple search range"));
    }
    let mut out = Vec::new();
    for n in 2..=max_n {
        for q in 1..n {
            let target = 2 * n * n - q * q;
            // Both integers flanking sqrt(2n² − q²) are candidate m values.
            let m_hi = target.isqrt() + 1;
            for m in (n + 1)..=m_hi {
                if (m + q) % 2 == 1 {
                    out.push(ResonanceTriple::new(n, m, q));
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.quality()
            .partial_cmp(&b.quality())
            .unwrap()
            .then(a.g_t.partial_cmp(&b.g_t).unwrap())
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }

    #[test]
    fn sqrt2_sequence_matches_the_known_terms() {
        let c = sqrt2_convergents(5).unwrap();
        let pairs: Vec<(u64, u64)> = c.iter().map(|x| (x.p, x.q)).collect();
        assert_eq!(pairs, vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);
        assert!(c.iter().all(|x| x.p % 2 == 1), "numerators must be odd");
    }

    #[test]
    fn sqrt2_first_term_error() {
        let c = sqrt2_convergents(1).unwrap();
        assert!((c[0].error() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(c[0].error() < 1.0);
    }

    #[test]
    fn surd_17_sequence() {
        let c = surd_convergents(17, 3).unwrap();
        let pairs: Vec<(u64, u64)> = c.iter().map(|x| (x.p, x.q)).collect();
        assert_eq!(pairs, vec![(4, 1), (33, 8), (268, 65)]);
    }

    #[test]
    fn surd_5_matches_brute_force() {
        // Oracle: for each convergent denominator, no fraction with a smaller
        // or equal denominator comes closer to sqrt(5).
        let c = surd_convergents(5, 3).unwrap();
        let pairs: Vec<(u64, u64)> = c.iter().map(|x| (x.p, x.q)).collect();
        assert_eq!(pairs, vec![(2, 1), (9, 4), (38, 17)]);
        let target = 5f64.sqrt();
        for conv in &c {
            let mut best = f64::INFINITY;
            for q in 1..=conv.q {
                let p = (target * q as f64).round() as u64;
                let err = (target - p as f64 / q as f64).abs();
                if err < best {
                    best = err;
                }
            }
            assert!(
                conv.error() <= best + 1e-15,
                "{}/{} is not the best approximation at its scale",
                conv.p,
                conv.q
            );
        }
    }

    #[test]
    fn sqrt2_routes_agree() {
        let a = sqrt2_convergents(8).unwrap();
        let b = surd_convergents(2, 8).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!((x.p, x.q), (y.p, y.q));
        }
    }

    #[test]
    fn dirichlet_bound_holds() {
        for d in [2u64, 3, 5, 7, 17, 19, 23] {
            for c in surd_convergents(d, 10).unwrap() {
                assert!(
                    c.error() * (c.q as f64) * (c.q as f64) < 1.0,
                    "Dirichlet bound failed for sqrt({d}) ~ {}/{}",
                    c.p,
                    c.q
                );
            }
        }
    }

    #[test]
    fn convergents_are_reduced() {
        for c in surd_convergents(17, 8).unwrap() {
            assert_eq!(gcd(c.p, c.q), 1);
        }
    }

    #[test]
    fn perfect_square_is_rejected() {
        assert!(matches!(
            surd_convergents(4, 3).unwrap_err(),
            Error::PerfectSquare(4)
        ));
        assert!(surd_convergents(16, 3).is_err());
    }

    #[test]
    fn triple_341_predicts_the_first_detuned_point() {
        let triples = resonance_triples(10).unwrap();
        let t = triples
            .iter()
            .find(|t| (t.n, t.m, t.q) == (3, 4, 1))
            .expect("the (3,4,1) triple must be listed");
        assert_eq!(t.residual, 1);
        assert!((t.delta_over_g - 0.707).abs() < 5e-4);
        assert!((t.g_t - 8.886).abs() < 5e-4);
    }

    #[test]
    fn triple_794_is_listed() {
        let triples = resonance_triples(10).unwrap();
        assert!(triples.iter().any(|t| (t.n, t.m, t.q) == (7, 9, 4)));
    }

    #[test]
    fn exact_solutions_share_parity_and_are_excluded() {
        // Exhaustive: every exact integer solution of 2n² = m² + q² with
        // m > n > q has m ≡ q (mod 2), e.g. (5, 7, 1).
        for n in 2u64..=200 {
            for q in 1..n {
                let target = 2 * n * n - q * q;
                let m = target.isqrt();
                if m * m == target && m > n {
                    assert_eq!(
                        m % 2,
                        q % 2,
                        "exact solution ({n},{m},{q}) with mixed parity"
                    );
                }
            }
        }
        let triples = resonance_triples(200).unwrap();
        assert!(triples.iter().all(|t| t.residual > 0));
    }

    #[test]
    fn ranking_is_by_scaled_residual() {
        let triples = resonance_triples(30).unwrap();
        for w in triples.windows(2) {
            assert!(w[0].quality() <= w[1].quality() + 1e-15);
        }
    }

    #[test]
    fn sqrt17_family_fidelity_climbs_toward_one() {
        // n = 3q turns the triple condition into m/q ≈ √17, so successive
        // √17 convergents give ever better operating points.
        use crate::vatom::{closed_form_amplitudes, gate_fidelity_lossless};
        use crate::SystemParams;
        let mut last = 0.0;
        for c in surd_convergents(17, 3).unwrap() {
            let (m, q) = (c.p, c.q);
            let n = 3 * q;
            let t = ResonanceTriple::new(n, m, q);
            assert!(t.quality() < 1.0 / (n * n) as f64 * 2.0);
            let params = SystemParams::lossless(t.delta_over_g, t.g_t).unwrap();
            let amps = closed_form_amplitudes(&params, t.g_t).unwrap();
            let f = gate_fidelity_lossless(&amps).f_uncond;
            assert!(
                f > last,
                "F = {f} did not improve on {last} at (n,m,q) = ({n},{m},{q})"
            );
            last = f;
        }
        assert!(last > 0.999, "family should approach unity, got {last}");
    }
}
