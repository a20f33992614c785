//! Exact phase-1 revised simplex for the membership system
//!
//!     Σ q_c = 1,   A q = F,   q ≥ 0,
//!
//! where A has one sparse 0/1 column per response pair. Bland's rule makes
//! the iteration finite; everything is rational, so the verdict is exact
//! at the boundary. An infeasible run hands back the dual prices as a
//! Farkas certificate: a vector nonpositive against every column yet
//! positive against the target, i.e. a separating linear inequality.

use num_traits::{One, Signed, Zero};

use crate::dist::CondDist;
use crate::error::{Error, Result};
use crate::rational::{format_rat, gcd_all, Int, Rat};
use crate::response::{ResponseDist, ResponseMatrix};

/// Proof of infeasibility: `pi0 + pi·column ≤ 0` for every response-matrix
/// column while `pi0 + pi·F > 0` for the rejected distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub pi0: Rat,
    /// One price per flat coordinate of F.
    pub pi: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub enum FeasibilityResult {
    Feasible(ResponseDist),
    Infeasible(FarkasCertificate),
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible(_))
    }
}

/// Re-derive `Σ q = 1`, `A q = F`, `q ≥ 0` by direct arithmetic.
pub fn verify_witness(rm: &ResponseMatrix, dist: &CondDist, q: &ResponseDist) -> bool {
    if q.dims() != rm.dims || dist.dims() != rm.dims {
        return false;
    }
    let mut total = Rat::zero();
    let mut image = vec![Rat::zero(); rm.dims.dim_f()];
    for (c, w) in q.weights().iter().enumerate() {
        if w.is_negative() {
            return false;
        }
        total += w;
        if !w.is_zero() {
            for &r in &rm.matrix.col_support[c] {
                image[r as usize] += w;
            }
        }
    }
    total.is_one() && image.as_slice() == dist.values()
}

/// Re-derive both certificate inequalities by direct arithmetic.
pub fn verify_certificate(rm: &ResponseMatrix, dist: &CondDist, cert: &FarkasCertificate) -> bool {
    if cert.pi.len() != rm.dims.dim_f() || dist.dims() != rm.dims {
        return false;
    }
    for support in &rm.matrix.col_support {
        let mut against = cert.pi0.clone();
        for &r in support {
            against += &cert.pi[r as usize];
        }
        if against.is_positive() {
            return false;
        }
    }
    let mut target = cert.pi0.clone();
    for (r, v) in dist.values().iter().enumerate() {
        target += &cert.pi[r] * v;
    }
    target.is_positive()
}

/// Decide membership of `dist` in the compatible polytope spanned by the
/// columns of `rm`. The witness or certificate is re-verified by direct
/// arithmetic before being returned.
pub fn lp_feasible_with(rm: &ResponseMatrix, dist: &CondDist) -> Result<FeasibilityResult> {
    if dist.dims() != rm.dims {
        return Err(Error::Shape(format!(
            "distribution over {} checked against matrix over {}",
            dist.dims(),
            rm.dims
        )));
    }
    dist.validate().map_err(Error::Invalid)?;

    let result = phase_one(rm, dist)?;
    match &result {
        FeasibilityResult::Feasible(q) => {
            if !verify_witness(rm, dist, q) {
                return Err(Error::Internal(
                    "simplex returned a witness that fails direct verification".into(),
                ));
            }
        }
        FeasibilityResult::Infeasible(cert) => {
            if !verify_certificate(rm, dist, cert) {
                return Err(Error::Internal(
                    "simplex returned a certificate that fails direct verification".into(),
                ));
            }
        }
    }
    Ok(result)
}

/// Variable ids: structural columns first, then one artificial per row.
/// Bland's rule picks the smallest eligible id, which terminates without
/// any tolerance games.
fn phase_one(rm: &ResponseMatrix, dist: &CondDist) -> Result<FeasibilityResult> {
    let cols = &rm.matrix.col_support;
    let n_struct = cols.len();
    // Row 0 carries Σ q = 1; rows 1.. carry the flat coordinates of F.
    let rows = 1 + rm.dims.dim_f();

    let mut b: Vec<Rat> = Vec::with_capacity(rows);
    b.push(Rat::one());
    b.extend(dist.values().iter().cloned());

    // Dense basis inverse; entries stay small because the constraint
    // matrix is 0/1 while only xb carries the input rationals.
    let mut binv: Vec<Rat> = vec![Rat::zero(); rows * rows];
    for r in 0..rows {
        binv[r * rows + r] = Rat::one();
    }
    let mut xb = b.clone();
    let mut basis: Vec<usize> = (0..rows).map(|r| n_struct + r).collect();
    let mut in_basis = vec![false; n_struct];

    let col_rows = |j: usize| {
        // Implicit row 0 plus the shifted support rows.
        std::iter::once(0usize).chain(cols[j].iter().map(|&r| r as usize + 1))
    };

    loop {
        // Current phase-1 objective: total artificial mass in the basis.
        let mut objective = Rat::zero();
        for (r, &var) in basis.iter().enumerate() {
            if var >= n_struct {
                objective += &xb[r];
            }
        }
        if objective.is_zero() {
            let mut q = vec![Rat::zero(); n_struct];
            for (r, &var) in basis.iter().enumerate() {
                if var < n_struct {
                    q[var] = xb[r].clone();
                } else {
                    debug_assert!(xb[r].is_zero());
                }
            }
            let witness = ResponseDist::new(rm.dims, q)?;
            return Ok(FeasibilityResult::Feasible(witness));
        }

        // Dual prices y = c_B B^{-1}; artificials cost 1, structurals 0.
        let mut y = vec![Rat::zero(); rows];
        for (r, &var) in basis.iter().enumerate() {
            if var >= n_struct {
                for k in 0..rows {
                    y[k] += &binv[r * rows + k];
                }
            }
        }

        // Entering column: smallest structural id with positive price mass
        // (reduced cost −y·a_j < 0). Departed artificials never re-enter.
        let mut entering = None;
        'scan: for j in 0..n_struct {
            if in_basis[j] {
                continue;
            }
            let mut price = Rat::zero();
            for r in col_rows(j) {
                price += &y[r];
            }
            if price.is_positive() {
                entering = Some(j);
                break 'scan;
            }
        }
        let Some(j) = entering else {
            // Optimal with positive objective: infeasible, and y is the
            // certificate.
            let pi0 = y[0].clone();
            let pi = y[1..].to_vec();
            return Ok(FeasibilityResult::Infeasible(FarkasCertificate { pi0, pi }));
        };

        // Column in the current basis coordinates.
        let mut u = vec![Rat::zero(); rows];
        for (r, slot) in u.iter_mut().enumerate() {
            for c in col_rows(j) {
                *slot += &binv[r * rows + c];
            }
        }

        // Ratio test with Bland's tie-break on the leaving variable id.
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..rows {
            if u[r].is_positive() {
                let ratio = &xb[r] / &u[r];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            return Err(Error::Internal(
                "phase-1 objective is bounded below yet no ratio bound was found".into(),
            ));
        };

        // Pivot: scale the pivot row, sweep it out of the others.
        let scale = u[pivot_row].clone();
        for k in 0..rows {
            binv[pivot_row * rows + k] /= &scale;
        }
        xb[pivot_row] /= &scale;
        for r in 0..rows {
            if r != pivot_row && !u[r].is_zero() {
                let factor = u[r].clone();
                for k in 0..rows {
                    let sub = &factor * &binv[pivot_row * rows + k];
                    binv[r * rows + k] -= sub;
                }
                let sub = &factor * &xb[pivot_row];
                xb[r] -= sub;
            }
        }
        let old = basis[pivot_row];
        if old < n_struct {
            in_basis[old] = false;
        }
        basis[pivot_row] = j;
        in_basis[j] = true;
    }
}

/// A separating inequality `coeffs·F ≤ rhs`, integer and primitive, valid
/// on every compatible distribution and violated by the one that produced
/// the certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingInequality {
    pub coeffs: Vec<Int>,
    pub rhs: Int,
}

impl SeparatingInequality {
    pub fn evaluate(&self, dist: &CondDist) -> Rat {
        let mut acc = Rat::zero();
        for (c, v) in self.coeffs.iter().zip(dist.values()) {
            acc += Rat::from_integer(c.clone()) * v;
        }
        acc
    }

    pub fn render(&self) -> String {
        let mut terms = Vec::new();
        for (off, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.push(format!("{c}*f[{off}]"));
            }
        }
        format!("{} <= {}", terms.join(" + "), self.rhs)
    }
}

/// Turn a Farkas certificate into a normalized separating inequality:
/// `pi·F ≤ −pi0`, denominators cleared, divided by the common factor. The
/// orientation keeps the violated direction positive, scaling by two or
/// any other positive factor lands on the same normal form.
pub fn farkas_to_test(
    rm: &ResponseMatrix,
    dist: &CondDist,
    cert: &FarkasCertificate,
) -> Result<SeparatingInequality> {
    if cert.pi.len() != rm.dims.dim_f() {
        return Err(Error::Shape(format!(
            "certificate has {} prices, dims {} require {}",
            cert.pi.len(),
            rm.dims,
            rm.dims.dim_f()
        )));
    }
    if !verify_certificate(rm, dist, cert) {
        return Err(Error::Internal(
            "certificate fails direct verification; refusing to normalize it".into(),
        ));
    }
    let mut denom_lcm = Int::one();
    for r in cert.pi.iter().chain(std::iter::once(&cert.pi0)) {
        denom_lcm = num_integer::Integer::lcm(&denom_lcm, r.denom());
    }
    let mut coeffs: Vec<Int> = cert
        .pi
        .iter()
        .map(|r| r.numer() * (&denom_lcm / r.denom()))
        .collect();
    let mut rhs = -(cert.pi0.numer() * (&denom_lcm / cert.pi0.denom()));
    let mut all = coeffs.clone();
    all.push(rhs.clone());
    let g = gcd_all(&all);
    if !g.is_zero() && !g.is_one() {
        for c in coeffs.iter_mut() {
            *c /= &g;
        }
        rhs /= &g;
    }
    let ineq = SeparatingInequality { coeffs, rhs };

    // Sound on every vertex, violated by the input: checked right here.
    for support in &rm.matrix.col_support {
        let mut lhs = Int::zero();
        for &r in support {
            lhs += &ineq.coeffs[r as usize];
        }
        if lhs > ineq.rhs {
            return Err(Error::Internal(format!(
                "separating inequality fails on a column: {} > {}",
                lhs, ineq.rhs
            )));
        }
    }
    let at_input = ineq.evaluate(dist);
    if at_input <= Rat::from_integer(ineq.rhs.clone()) {
        return Err(Error::Internal(format!(
            "separating inequality not violated by the input: {} <= {}",
            format_rat(&at_input),
            ineq.rhs
        )));
    }
    Ok(ineq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::dims::Dims;
    use crate::rational::rat;
    use crate::response::{dedup_columns, response_matrix};
    use crate::sampling;

    #[test]
    fn every_column_is_feasible_with_point_mass_witness() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let rm = response_matrix(dims, &Caps::default()).unwrap();
        for v in dedup_columns(&rm).unwrap() {
            let dist = v.to_dist(dims);
            match lp_feasible_with(&rm, &dist).unwrap() {
                FeasibilityResult::Feasible(q) => {
                    assert!(verify_witness(&rm, &dist, &q));
                }
                FeasibilityResult::Infeasible(_) => panic!("vertex reported infeasible"),
            }
        }
    }

    #[test]
    fn pearl_violator_is_infeasible_with_valid_certificate() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let rm = response_matrix(dims, &Caps::default()).unwrap();
        let bad = CondDist::from_block_points(dims, &[(1, 1), (1, 2)]).unwrap();
        match lp_feasible_with(&rm, &bad).unwrap() {
            FeasibilityResult::Infeasible(cert) => {
                assert!(verify_certificate(&rm, &bad, &cert));
                let ineq = farkas_to_test(&rm, &bad, &cert).unwrap();
                assert!(ineq.evaluate(&bad) > Rat::from_integer(ineq.rhs.clone()));
            }
            FeasibilityResult::Feasible(_) => panic!("violator reported feasible"),
        }
    }

    #[test]
    fn model_samples_are_feasible() {
        let dims = Dims::new(2, 2, 3).unwrap();
        let rm = response_matrix(dims, &Caps::default()).unwrap();
        for idx in 0..25 {
            let q = sampling::response_dist(dims, 3, idx, &Caps::default()).unwrap();
            let f = crate::response::sample_compatible(&rm, &q).unwrap();
            assert!(lp_feasible_with(&rm, &f).unwrap().is_feasible(), "sample {idx}");
        }
    }

    #[test]
    fn single_instrument_value_makes_everything_feasible() {
        let dims = Dims::new(1, 3, 2).unwrap();
        let rm = response_matrix(dims, &Caps::default()).unwrap();
        for idx in 0..20 {
            let mut rng = sampling::rng_for(8, sampling::Stream::CondDist, idx);
            let d = sampling::random_cond_dist(dims, &mut rng);
            assert!(lp_feasible_with(&rm, &d).unwrap().is_feasible(), "sample {idx}");
        }
    }

    #[test]
    fn certificate_normalization_is_scale_invariant() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let rm = response_matrix(dims, &Caps::default()).unwrap();
        let bad = CondDist::from_block_points(dims, &[(1, 1), (1, 2)]).unwrap();
        let FeasibilityResult::Infeasible(cert) = lp_feasible_with(&rm, &bad).unwrap() else {
            panic!("expected infeasible");
        };
        let doubled = FarkasCertificate {
            pi0: &cert.pi0 * rat(2, 1),
            pi: cert.pi.iter().map(|p| p * rat(2, 1)).collect(),
        };
        assert_eq!(
            farkas_to_test(&rm, &bad, &cert).unwrap(),
            farkas_to_test(&rm, &bad, &doubled).unwrap()
        );
    }

    #[test]
    fn invalid_certificate_is_rejected() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let rm = response_matrix(dims, &Caps::default()).unwrap();
        let fine = CondDist::uniform(dims);
        let cert = FarkasCertificate {
            pi0: Rat::one(),
            pi: vec![Rat::zero(); dims.dim_f()],
        };
        assert!(matches!(
            farkas_to_test(&rm, &fine, &cert),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn invalid_distributions_are_refused() {
        let dims = Dims::new(2, 2, 2).unwrap();
        let rm = response_matrix(dims, &Caps::default()).unwrap();
        // Blocks sum to 4/3, not 1.
        let bad = CondDist::new(dims, vec![rat(1, 3); 8]).unwrap();
        assert!(matches!(
            lp_feasible_with(&rm, &bad),
            Err(Error::Invalid(_))
        ));
    }
}
