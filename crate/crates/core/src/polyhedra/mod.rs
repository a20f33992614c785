//! Exact polyhedral engine for the compatible set.
//!
//! Membership of a distribution in the compatible polytope is decided by
//! exact LP with a verified witness or Farkas certificate; the polytope's
//! two standard representations are converted into each other by double
//! description; and candidate test suites are checked for sufficiency by
//! exact polytope equality.

mod dd;
mod gauss;
mod simplex;

pub use dd::{facet_enum, incidence, vertex_enum, HRep, LinCon};
pub use simplex::{
    farkas_to_test, lp_feasible_with, verify_certificate, verify_witness, FarkasCertificate,
    FeasibilityResult, SeparatingInequality,
};

use num_traits::{One, Zero};

use crate::caps::Caps;
use crate::dims::Dims;
use crate::dist::CondDist;
use crate::error::{Error, Result};
use crate::linear_tests::LinearTest;
use crate::rational::{gcd_all, Int, Rat};
use crate::response::{dedup_columns, response_matrix};

/// A polytope carrying one or both standard representations.
#[derive(Clone, Debug)]
pub struct Polytope {
    pub ambient: usize,
    pub vertices: Option<Vec<Vec<Rat>>>,
    pub hrep: Option<HRep>,
}

impl Polytope {
    /// When both representations are present they must describe the same
    /// set: every vertex satisfies the constraints, and the constraints
    /// re-enumerate exactly the vertex list.
    pub fn verify_mutual(&self, caps: &Caps) -> Result<()> {
        let (Some(vertices), Some(h)) = (&self.vertices, &self.hrep) else {
            return Ok(());
        };
        for v in vertices {
            if !h.contains(v) {
                return Err(Error::Internal(
                    "a listed vertex violates the H-representation".into(),
                ));
            }
        }
        let mut again = vertex_enum(h, caps)?;
        again.sort();
        let mut listed = vertices.clone();
        listed.sort();
        listed.dedup();
        if again != listed {
            return Err(Error::Internal(
                "H-representation does not re-enumerate the vertex list".into(),
            ));
        }
        Ok(())
    }
}

/// Decide membership of `dist` in the compatible set for its dims.
/// Convenience wrapper that builds the response matrix; batch callers
/// should build it once and use [`lp_feasible_with`].
pub fn lp_feasible(dims: Dims, dist: &CondDist, caps: &Caps) -> Result<FeasibilityResult> {
    let rm = response_matrix(dims, caps)?;
    lp_feasible_with(&rm, dist)
}

/// H-representation of the ambient set of all valid conditional
/// distributions: per-z normalization equalities plus nonnegativity.
pub fn ambient_hrep(dims: Dims) -> HRep {
    let dim_f = dims.dim_f();
    let mut equalities = Vec::with_capacity(dims.l);
    for k in 1..=dims.l {
        let mut coeffs = vec![Rat::zero(); dim_f];
        for i in 1..=dims.n {
            for j in 1..=dims.m {
                coeffs[dims.index(i, j, k).expect("in range")] = Rat::one();
            }
        }
        equalities.push(LinCon::new(coeffs, Rat::one()));
    }
    let mut inequalities = Vec::with_capacity(dim_f);
    for c in 0..dim_f {
        let mut coeffs = vec![Rat::zero(); dim_f];
        coeffs[c] = -Rat::one();
        inequalities.push(LinCon::new(coeffs, Rat::zero()));
    }
    HRep {
        ambient: dim_f,
        equalities,
        inequalities,
    }
}

/// The inequality a test contributes to an H-representation.
pub fn test_to_lincon(test: &LinearTest) -> LinCon {
    let coeffs = test
        .tau
        .iter()
        .map(|&c| Rat::from_integer(Int::from(c)))
        .collect();
    LinCon::new(coeffs, Rat::from_integer(Int::from(test.alpha)))
}

/// Both representations of the compatible polytope: distinct response
/// columns as vertices, facets from double description.
pub fn b_polytope(dims: Dims, caps: &Caps) -> Result<Polytope> {
    let rm = response_matrix(dims, caps)?;
    let vertices: Vec<Vec<Rat>> = dedup_columns(&rm)?
        .iter()
        .map(|v| v.to_vec(dims))
        .collect();
    let hrep = facet_enum(&vertices, caps)?;
    Ok(Polytope {
        ambient: dims.dim_f(),
        vertices: Some(vertices),
        hrep: Some(hrep),
    })
}

/// Outcome of comparing `{F valid : suite passes}` against the compatible
/// polytope.
#[derive(Clone, Debug)]
pub enum SufficiencyOutcome {
    /// The suite carves out exactly the compatible set.
    Equal,
    /// A vertex of the suite polytope lies outside the compatible set;
    /// the certificate proves it.
    Counterexample {
        vertex: CondDist,
        certificate: FarkasCertificate,
    },
    /// Some compatible vertex violates the suite, so the suite is not even
    /// necessary.
    NotNecessary { vertex: CondDist },
}

/// Exact polytope equality by mutual vertex containment.
pub fn sufficiency_check(
    dims: Dims,
    suite: &[LinearTest],
    caps: &Caps,
) -> Result<SufficiencyOutcome> {
    for t in suite {
        if t.dims != dims {
            return Err(Error::Shape(format!(
                "suite test {} is over {}, expected {dims}",
                t.name, t.dims
            )));
        }
    }
    let rm = response_matrix(dims, caps)?;
    let b_vertices: Vec<Vec<Rat>> = dedup_columns(&rm)?
        .iter()
        .map(|v| v.to_vec(dims))
        .collect();

    let mut h = ambient_hrep(dims);
    h.inequalities.extend(suite.iter().map(test_to_lincon));

    for v in &b_vertices {
        if !h.contains(v) {
            return Ok(SufficiencyOutcome::NotNecessary {
                vertex: CondDist::new(dims, v.clone())?,
            });
        }
    }

    let suite_vertices = vertex_enum(&h, caps)?;
    let b_set: std::collections::BTreeSet<&Vec<Rat>> = b_vertices.iter().collect();
    for v in &suite_vertices {
        if !b_set.contains(v) {
            let dist = CondDist::new(dims, v.clone())?;
            return match lp_feasible_with(&rm, &dist)? {
                FeasibilityResult::Infeasible(certificate) => {
                    Ok(SufficiencyOutcome::Counterexample {
                        vertex: dist,
                        certificate,
                    })
                }
                FeasibilityResult::Feasible(_) => Err(Error::Internal(
                    "a suite-polytope vertex outside the vertex set is compatible; \
                     extreme points cannot work that way"
                        .into(),
                )),
            };
        }
    }
    // Suite polytope ⊆ B and B ⊆ suite polytope: equal. The vertex sets
    // must then coincide.
    if suite_vertices.len() != b_vertices.len() {
        return Err(Error::Internal(
            "mutual containment with mismatched vertex counts".into(),
        ));
    }
    Ok(SufficiencyOutcome::Equal)
}

/// Canonical form of a valid inequality modulo an affine hull: pivot
/// coordinates of the hull equalities are eliminated, then denominators
/// cleared and the primitive positive scale taken. Two inequalities get
/// the same canonical form exactly when they cut the hull in the same
/// halfspace.
pub struct HullReducer {
    rows: Vec<(Vec<Rat>, Rat)>,
    pivot_cols: Vec<usize>,
    ambient: usize,
}

impl HullReducer {
    pub fn new(ambient: usize, equalities: &[LinCon]) -> HullReducer {
        let augmented: Vec<Vec<Rat>> = equalities
            .iter()
            .map(|c| {
                let mut row = c.coeffs.clone();
                row.push(c.rhs.clone());
                row
            })
            .collect();
        let reduced = gauss::rref(augmented);
        let mut rows = Vec::new();
        let mut pivot_cols = Vec::new();
        for (row, &p) in reduced.rows.into_iter().zip(&reduced.pivot_cols) {
            // A pivot in the rhs column would mean inconsistent equalities.
            debug_assert!(p < ambient);
            let rhs = row[ambient].clone();
            pivot_cols.push(p);
            rows.push((row[..ambient].to_vec(), rhs));
        }
        HullReducer {
            rows,
            pivot_cols,
            ambient,
        }
    }

    pub fn reduce(&self, coeffs: &[Rat], rhs: &Rat) -> (Vec<Int>, Int) {
        debug_assert_eq!(coeffs.len(), self.ambient);
        let mut c = coeffs.to_vec();
        let mut b = rhs.clone();
        for ((row, row_rhs), &p) in self.rows.iter().zip(&self.pivot_cols) {
            let factor = c[p].clone();
            if factor.is_zero() {
                continue;
            }
            for (cc, rc) in c.iter_mut().zip(row) {
                *cc -= &factor * rc;
            }
            b -= &factor * row_rhs;
        }
        let mut lcm = Int::one();
        for r in c.iter().chain(std::iter::once(&b)) {
            lcm = num_integer::Integer::lcm(&lcm, r.denom());
        }
        let mut ints: Vec<Int> = c.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
        let mut bi = b.numer() * (&lcm / b.denom());
        let mut all = ints.clone();
        all.push(bi.clone());
        let g = gcd_all(&all);
        if !g.is_zero() && !g.is_one() {
            for x in ints.iter_mut() {
                *x /= &g;
            }
            bi /= &g;
        }
        (ints, bi)
    }

    pub fn reduce_lincon(&self, con: &LinCon) -> (Vec<Int>, Int) {
        self.reduce(&con.coeffs, &con.rhs)
    }

    pub fn reduce_test(&self, test: &LinearTest) -> (Vec<Int>, Int) {
        let con = test_to_lincon(test);
        self.reduce_lincon(&con)
    }
}

/// What a computed facet turned out to be, relative to a reference suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FacetKind {
    /// Nonnegativity of one flat coordinate.
    NonNegativity(usize),
    /// Same halfspace (modulo the hull) as the suite test at this index.
    Suite(usize),
    Other,
}

/// Classify each facet inequality of `hrep` against nonnegativity and a
/// reference suite, modulo the affine hull.
pub fn classify_inequalities(hrep: &HRep, suite: &[LinearTest]) -> Vec<FacetKind> {
    let reducer = HullReducer::new(hrep.ambient, &hrep.equalities);
    let mut lookup: std::collections::BTreeMap<(Vec<Int>, Int), FacetKind> =
        std::collections::BTreeMap::new();
    for c in 0..hrep.ambient {
        let mut coeffs = vec![Rat::zero(); hrep.ambient];
        coeffs[c] = -Rat::one();
        lookup.insert(
            reducer.reduce(&coeffs, &Rat::zero()),
            FacetKind::NonNegativity(c),
        );
    }
    for (idx, t) in suite.iter().enumerate() {
        lookup.insert(reducer.reduce_test(t), FacetKind::Suite(idx));
    }
    hrep.inequalities
        .iter()
        .map(|con| {
            lookup
                .get(&reducer.reduce_lincon(con))
                .cloned()
                .unwrap_or(FacetKind::Other)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_tests::{eq11_suite_for, pearl_suite};
    use crate::rational::rat;
    use crate::sampling;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn binary_compatible_polytope_has_twelve_vertices_and_checks_out() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let p = b_polytope(dims, &caps()).unwrap();
        assert_eq!(p.vertices.as_ref().unwrap().len(), 12);
        p.verify_mutual(&caps()).unwrap();
    }

    #[test]
    fn binary_facets_are_nonnegativity_plus_the_nontrivial_suite() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let p = b_polytope(dims, &caps()).unwrap();
        let h = p.hrep.as_ref().unwrap();
        let suite = pearl_suite(dims, &caps()).unwrap();
        let kinds = classify_inequalities(h, &suite);
        assert!(kinds.iter().all(|k| *k != FacetKind::Other));
        let suite_facets: std::collections::BTreeSet<usize> = kinds
            .iter()
            .filter_map(|k| match k {
                FacetKind::Suite(i) => Some(*i),
                _ => None,
            })
            .collect();
        assert_eq!(
            suite_facets,
            [1usize, 2, 5, 6].into_iter().collect(),
            "exactly the non-trivial tests appear as facets"
        );
    }

    #[test]
    fn pearl_is_sufficient_for_the_binary_case() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let suite = pearl_suite(dims, &caps()).unwrap();
        assert!(matches!(
            sufficiency_check(dims, &suite, &caps()).unwrap(),
            SufficiencyOutcome::Equal
        ));
    }

    #[test]
    fn pearl_alone_misses_a_vertex_at_three_instrument_values() {
        let dims = Dims::new(3, 2, 2).unwrap();
        let suite = pearl_suite(dims, &caps()).unwrap();
        match sufficiency_check(dims, &suite, &caps()).unwrap() {
            SufficiencyOutcome::Counterexample { vertex, certificate } => {
                assert!(vertex.validate().is_ok());
                let rm = response_matrix(dims, &caps()).unwrap();
                assert!(verify_certificate(&rm, &vertex, &certificate));
            }
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn adding_the_five_term_orbit_restores_sufficiency() {
        let dims = Dims::new(3, 2, 2).unwrap();
        let mut suite = pearl_suite(dims, &caps()).unwrap();
        suite.extend(eq11_suite_for(dims, &caps()).unwrap());
        assert!(matches!(
            sufficiency_check(dims, &suite, &caps()).unwrap(),
            SufficiencyOutcome::Equal
        ));
    }

    #[test]
    fn feasibility_agrees_with_facet_membership() {
        // Independent route: facet inequalities decide membership without
        // touching the simplex.
        let dims = Dims::new(3, 2, 2).unwrap();
        let p = b_polytope(dims, &caps()).unwrap();
        let h = p.hrep.as_ref().unwrap();
        let rm = response_matrix(dims, &caps()).unwrap();
        let mut agreements = 0;
        for idx in 0..60u64 {
            let mut rng = sampling::rng_for(17, sampling::Stream::CondDist, idx);
            let dist = sampling::random_cond_dist(dims, &mut rng);
            let via_lp = lp_feasible_with(&rm, &dist).unwrap().is_feasible();
            let via_facets = h.contains(dist.values());
            assert_eq!(via_lp, via_facets, "sample {idx}");
            agreements += 1;
        }
        assert_eq!(agreements, 60);
    }

    #[test]
    fn hull_reducer_identifies_equal_halfspaces() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let h = ambient_hrep(dims);
        let reducer = HullReducer::new(h.ambient, &h.equalities);
        // x_0 ≤ 1 and −(rest of block 1) ≤ 0 are the same halfspace on the
        // hull because the block sums to 1.
        let mut up = vec![Rat::zero(); 8];
        up[0] = Rat::one();
        // Block z=1 holds flat coordinates {0, 1, 4, 5}.
        let mut down = vec![Rat::zero(); 8];
        for c in [1usize, 4, 5] {
            down[c] = -Rat::one();
        }
        assert_eq!(
            reducer.reduce(&up, &Rat::one()),
            reducer.reduce(&down, &Rat::zero())
        );
        // And a genuinely different inequality is distinguished.
        let mut other = vec![Rat::zero(); 8];
        other[1] = Rat::one();
        assert_ne!(
            reducer.reduce(&up, &Rat::one()),
            reducer.reduce(&other, &Rat::one())
        );
    }

    #[test]
    fn ambient_hrep_contains_exactly_valid_distributions() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let h = ambient_hrep(dims);
        assert!(h.contains(CondDist::uniform(dims).values()));
        let bad = CondDist::new(dims, vec![rat(1, 3); 8]).unwrap();
        assert!(!h.contains(bad.values()));
    }
}
