//! Double description over exact integers: converts between the vertex
//! and inequality representations of a polytope.
//!
//! The engine works on homogeneous cones `{x : a_i·x ≤ 0 (or = 0)}`. It
//! maintains a minimal generating pair (lineality basis, extreme rays)
//! while inserting constraints one at a time; new rays come from adjacent
//! positive/negative pairs, with the combinatorial adjacency test on
//! tight-set bitmasks. All ray vectors are primitive integer vectors, so
//! coordinates stay small.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rational::{gcd_all, Int, Rat};

#[derive(Clone, Debug)]
struct Ray {
    v: Vec<Int>,
    /// Bit t set iff constraint t (in insertion order) is tight on this ray.
    tight: Vec<u64>,
}

impl Ray {
    fn tight_bit(&mut self, t: usize) {
        self.tight[t / 64] |= 1 << (t % 64);
    }
}

fn tight_intersection(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn tight_subset(sub: &[u64], sup: &[u64]) -> bool {
    sub.iter().zip(sup).all(|(s, t)| s & !t == 0)
}

fn dot(a: &[Int], b: &[Int]) -> Int {
    let mut acc = Int::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Divide by the gcd of the absolute values; direction is preserved.
fn make_primitive(v: &mut [Int]) {
    let g = gcd_all(v);
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// A homogeneous constraint for the cone builder.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConeConstraint {
    pub normal: Vec<Int>,
    pub equality: bool,
}

/// Extreme rays (and any residual lineality) of
/// `{x : normal·x ≤ 0 for inequalities, normal·x = 0 for equalities}`.
pub struct ConeGenerators {
    pub lineality: Vec<Vec<Int>>,
    pub rays: Vec<Vec<Int>>,
}

pub fn cone_generators(
    dim: usize,
    constraints: &[ConeConstraint],
    caps: &Caps,
) -> Result<ConeGenerators> {
    let words = constraints.len().div_ceil(64).max(1);
    let mut lineality: Vec<Vec<Int>> = (0..dim)
        .map(|i| {
            let mut e = vec![Int::zero(); dim];
            e[i] = Int::one();
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (t, con) in constraints.iter().enumerate() {
        let a = &con.normal;
        if a.iter().all(|c| c.is_zero()) {
            // 0 ≤ 0 or 0 = 0: tight everywhere.
            for r in rays.iter_mut() {
                r.tight_bit(t);
            }
            continue;
        }
        let hit = lineality.iter().position(|u| !dot(a, u).is_zero());
        if let Some(idx) = hit {
            // Use one lineality direction to absorb the constraint.
            let mut u0 = lineality.swap_remove(idx);
            let mut d = dot(a, &u0);
            if !con.equality && d.is_positive() {
                for x in u0.iter_mut() {
                    *x = -x.clone();
                }
                d = -d;
            }
            for u in lineality.iter_mut() {
                let w = dot(a, u);
                if !w.is_zero() {
                    // Any nonzero multiple keeps a subspace basis.
                    for (uc, u0c) in u.iter_mut().zip(&u0) {
                        *uc = &*uc * &d - &w * u0c;
                    }
                    make_primitive(u);
                }
            }
            for r in rays.iter_mut() {
                let w = dot(a, &r.v);
                if !w.is_zero() {
                    // r ← (−d)·r + w·u0 is a positive multiple of the
                    // projection because d < 0 on the inequality path; the
                    // equality path fixes the sign below.
                    let (rd, rw) = if d.is_negative() {
                        (-d.clone(), w.clone())
                    } else {
                        (d.clone(), -w.clone())
                    };
                    for (rc, u0c) in r.v.iter_mut().zip(&u0) {
                        *rc = &*rc * &rd + &rw * u0c;
                    }
                    make_primitive(&mut r.v);
                }
                r.tight_bit(t);
            }
            if !con.equality {
                let mut tight = vec![u64::MAX; words];
                // Tight on everything processed so far, not on t.
                mask_from(t, &mut tight);
                rays.push(Ray { v: u0, tight });
            }
            continue;
        }

        // Lineality is orthogonal to the constraint; split the rays.
        let vals: Vec<Int> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let mut next: Vec<Ray> = Vec::new();
        let mut positive: Vec<usize> = Vec::new();
        let mut negative: Vec<usize> = Vec::new();
        for (idx, val) in vals.iter().enumerate() {
            if val.is_zero() {
                let mut r = rays[idx].clone();
                r.tight_bit(t);
                next.push(r);
            } else if val.is_positive() {
                positive.push(idx);
            } else {
                negative.push(idx);
            }
        }
        let keep_negative = !con.equality;
        for p in &positive {
            for q in &negative {
                if !adjacent(&rays, *p, *q) {
                    continue;
                }
                let wp = &vals[*p];
                let wq = &vals[*q];
                let mut v = vec![Int::zero(); dim];
                for (slot, (pc, qc)) in v.iter_mut().zip(rays[*p].v.iter().zip(&rays[*q].v)) {
                    // wp·q − wq·p: positive combination since wq < 0 < wp.
                    *slot = wp * qc - wq * pc;
                }
                make_primitive(&mut v);
                let mut tight = tight_intersection(&rays[*p].tight, &rays[*q].tight);
                tight[t / 64] |= 1 << (t % 64);
                next.push(Ray { v, tight });
                if next.len() as u64 > caps.rays {
                    return Err(Error::Capacity {
                        what: "double-description rays",
                        needed: format!("more than {}", next.len()),
                        cap: caps.rays,
                    });
                }
            }
        }
        if keep_negative {
            for q in negative {
                next.push(rays[q].clone());
            }
        }
        rays = next;
    }

    Ok(ConeGenerators {
        lineality,
        rays: rays.into_iter().map(|r| r.v).collect(),
    })
}

/// Set bits 0..t, clear the rest.
fn mask_from(t: usize, words: &mut [u64]) {
    for (w, word) in words.iter_mut().enumerate() {
        let lo = w * 64;
        *word = if t >= lo + 64 {
            u64::MAX
        } else if t <= lo {
            0
        } else {
            (1u64 << (t - lo)) - 1
        };
    }
}

/// Combinatorial adjacency: p and q are adjacent iff no other current ray
/// is tight on every constraint they are both tight on.
fn adjacent(rays: &[Ray], p: usize, q: usize) -> bool {
    let common = tight_intersection(&rays[p].tight, &rays[q].tight);
    for (idx, r) in rays.iter().enumerate() {
        if idx != p && idx != q && tight_subset(&common, &r.tight) {
            return false;
        }
    }
    true
}

/// One affine constraint `coeffs·x = rhs` or `coeffs·x ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinCon {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

impl LinCon {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat) -> LinCon {
        LinCon { coeffs, rhs }
    }

    pub fn evaluate(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (c, x) in self.coeffs.iter().zip(point) {
            acc += c * x;
        }
        acc
    }

    pub fn holds_eq(&self, point: &[Rat]) -> bool {
        self.evaluate(point) == self.rhs
    }

    pub fn holds_le(&self, point: &[Rat]) -> bool {
        self.evaluate(point) <= self.rhs
    }

    /// Cleared to a primitive integer row `(coeffs…, −rhs)` for the cone
    /// builder, preserving orientation.
    fn homogeneous_row(&self) -> Vec<Int> {
        let mut lcm = Int::one();
        for r in self.coeffs.iter().chain(std::iter::once(&self.rhs)) {
            lcm = lcm.lcm(r.denom());
        }
        let mut row: Vec<Int> = self
            .coeffs
            .iter()
            .map(|r| r.numer() * (&lcm / r.denom()))
            .collect();
        row.push(-(self.rhs.numer() * (&lcm / self.rhs.denom())));
        make_primitive(&mut row);
        row
    }
}

/// Inequality + equality representation of a polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    pub ambient: usize,
    pub equalities: Vec<LinCon>,
    pub inequalities: Vec<LinCon>,
}

impl HRep {
    pub fn contains(&self, point: &[Rat]) -> bool {
        self.equalities.iter().all(|c| c.holds_eq(point))
            && self.inequalities.iter().all(|c| c.holds_le(point))
    }
}

/// Enumerate the vertices of the polytope described by `h`.
///
/// The polyhedron is homogenized into a cone over (x, t); rays with t > 0
/// scale to vertices, any ray with t = 0 is a recession direction and the
/// input is rejected as unbounded. An empty vertex list means the
/// polytope is empty.
pub fn vertex_enum(h: &HRep, caps: &Caps) -> Result<Vec<Vec<Rat>>> {
    let dim = h.ambient + 1;
    let mut constraints = Vec::new();
    let mut eq_rows: Vec<Vec<Int>> = h.equalities.iter().map(|c| c.homogeneous_row()).collect();
    eq_rows.sort();
    eq_rows.dedup();
    for normal in eq_rows {
        constraints.push(ConeConstraint {
            normal,
            equality: true,
        });
    }
    let mut ineq_rows: Vec<Vec<Int>> =
        h.inequalities.iter().map(|c| c.homogeneous_row()).collect();
    ineq_rows.sort();
    ineq_rows.dedup();
    for normal in ineq_rows {
        constraints.push(ConeConstraint {
            normal,
            equality: false,
        });
    }
    // −t ≤ 0 keeps the homogenization on the proper side.
    let mut t_row = vec![Int::zero(); dim];
    t_row[dim - 1] = -Int::one();
    constraints.push(ConeConstraint {
        normal: t_row,
        equality: false,
    });

    let gens = cone_generators(dim, &constraints, caps)?;
    if !gens.lineality.is_empty() {
        return Err(Error::Unbounded);
    }
    let mut vertices = Vec::new();
    for ray in gens.rays {
        let t = &ray[dim - 1];
        if t.is_zero() {
            if ray.iter().any(|c| !c.is_zero()) {
                return Err(Error::Unbounded);
            }
            continue;
        }
        debug_assert!(t.is_positive());
        let vertex: Vec<Rat> = ray[..dim - 1]
            .iter()
            .map(|c| Rat::new(c.clone(), t.clone()))
            .collect();
        debug_assert!(h.contains(&vertex));
        vertices.push(vertex);
    }
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

/// Facet enumeration: from a duplicate-free spanning vertex list to an
/// H-representation.
///
/// The affine hull is split off first (its basis comes from an exact RREF
/// of the vertex differences) and returned as equalities; facets of the
/// full-dimensional projection are found by double description on the
/// cone of valid inequalities, then lifted back. Every returned facet is
/// checked to support the polytope on at least `dim` input vertices.
pub fn facet_enum(vertices: &[Vec<Rat>], caps: &Caps) -> Result<HRep> {
    if vertices.is_empty() {
        return Err(Error::Shape("facet enumeration needs at least one vertex".into()));
    }
    let ambient = vertices[0].len();
    if vertices.iter().any(|v| v.len() != ambient) {
        return Err(Error::Shape("vertex list has mixed dimensions".into()));
    }
    let mut unique = vertices.to_vec();
    unique.sort();
    unique.dedup();

    let v0 = &unique[0];
    let diffs: Vec<Vec<Rat>> = unique[1..]
        .iter()
        .map(|v| v.iter().zip(v0).map(|(a, b)| a - b).collect())
        .collect();
    let reduced = super::gauss::rref(diffs);
    let pivots = reduced.pivot_cols.clone();
    let dim = reduced.rank();

    // Equalities: one per free coordinate, expressing it over the pivots.
    let mut equalities = Vec::new();
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    for f in 0..ambient {
        if pivot_set.contains(&f) {
            continue;
        }
        let mut coeffs = vec![Rat::zero(); ambient];
        coeffs[f] = Rat::one();
        for (t, &p) in pivots.iter().enumerate() {
            coeffs[p] = -reduced.rows[t][f].clone();
        }
        let rhs = LinCon::new(coeffs.clone(), Rat::zero()).evaluate(v0);
        equalities.push(LinCon::new(coeffs, rhs));
    }
    equalities.sort();

    // Valid-inequality cone over (a, b): a·w_i − b ≤ 0 per projected
    // vertex; homogeneous_row turns rhs 1 into the trailing −1.
    let mut rows: Vec<Vec<Int>> = unique
        .iter()
        .map(|v| {
            LinCon::new(pivots.iter().map(|&p| v[p].clone()).collect(), Rat::one())
                .homogeneous_row()
        })
        .collect();
    rows.sort();
    rows.dedup();
    let constraints: Vec<ConeConstraint> = rows
        .into_iter()
        .map(|normal| ConeConstraint {
            normal,
            equality: false,
        })
        .collect();
    let gens = cone_generators(dim + 1, &constraints, caps)?;
    if !gens.lineality.is_empty() {
        return Err(Error::Internal(
            "valid-inequality cone kept a lineality direction; the projected \
             vertices cannot span"
                .into(),
        ));
    }

    let mut inequalities = Vec::new();
    for ray in gens.rays {
        if ray[..dim].iter().all(|c| c.is_zero()) {
            // The trivial inequality 0 ≤ b.
            continue;
        }
        let mut coeffs = vec![Rat::zero(); ambient];
        for (t, &p) in pivots.iter().enumerate() {
            coeffs[p] = Rat::from_integer(ray[t].clone());
        }
        let rhs = Rat::from_integer(ray[dim].clone());
        let con = LinCon::new(coeffs, rhs);
        let tight = unique.iter().filter(|v| con.evaluate(v) == con.rhs).count();
        if unique.iter().any(|v| !con.holds_le(v)) || tight < dim.max(1) {
            return Err(Error::Internal(format!(
                "facet candidate fails support check ({tight} tight vertices, dim {dim})"
            )));
        }
        inequalities.push(con);
    }
    inequalities.sort();
    Ok(HRep {
        ambient,
        equalities,
        inequalities,
    })
}

/// Vertex indices tight on the given inequality.
pub fn incidence(vertices: &[Vec<Rat>], con: &LinCon) -> Vec<usize> {
    vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| con.evaluate(v) == con.rhs)
        .map(|(idx, _)| idx)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn caps() -> Caps {
        Caps::default()
    }

    fn unit_simplex_vertices(d: usize) -> Vec<Vec<Rat>> {
        (0..d)
            .map(|i| {
                let mut v = vec![Rat::zero(); d];
                v[i] = Rat::one();
                v
            })
            .collect()
    }

    #[test]
    fn simplex_h_rep_is_nonnegativity_plus_normalization() {
        let verts = unit_simplex_vertices(3);
        let h = facet_enum(&verts, &caps()).unwrap();
        assert_eq!(h.equalities.len(), 1, "one affine-hull equality");
        assert_eq!(h.inequalities.len(), 3, "three facets");
        for v in &verts {
            assert!(h.contains(v));
        }
        assert!(!h.contains(&vec![rat(1, 2), rat(1, 2), rat(1, 2)]));
        assert!(h.contains(&vec![rat(1, 3), rat(1, 3), rat(1, 3)]));
    }

    #[test]
    fn simplex_round_trip_recovers_vertices() {
        for d in 1..=4 {
            let verts = unit_simplex_vertices(d);
            let h = facet_enum(&verts, &caps()).unwrap();
            let mut back = vertex_enum(&h, &caps()).unwrap();
            back.sort();
            let mut expect = verts.clone();
            expect.sort();
            assert_eq!(back, expect, "d={d}");
        }
    }

    #[test]
    fn square_round_trip() {
        let verts = vec![
            vec![rat(0, 1), rat(0, 1)],
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ];
        let h = facet_enum(&verts, &caps()).unwrap();
        assert!(h.equalities.is_empty());
        assert_eq!(h.inequalities.len(), 4);
        let back = vertex_enum(&h, &caps()).unwrap();
        assert_eq!(back.len(), 4);
        let h2 = facet_enum(&back, &caps()).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn interior_points_are_not_vertices() {
        // Square plus its center: the center must not survive facet_enum +
        // vertex_enum.
        let verts = vec![
            vec![rat(0, 1), rat(0, 1)],
            vec![rat(2, 1), rat(0, 1)],
            vec![rat(0, 1), rat(2, 1)],
            vec![rat(2, 1), rat(2, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ];
        let h = facet_enum(&verts, &caps()).unwrap();
        let back = vertex_enum(&h, &caps()).unwrap();
        assert_eq!(back.len(), 4);
        assert!(!back.contains(&vec![rat(1, 1), rat(1, 1)]));
    }

    #[test]
    fn standard_simplex_h_to_v() {
        // x ≥ 0, Σx = 1 in dimension 4.
        let d = 4;
        let mut inequalities = Vec::new();
        for i in 0..d {
            let mut coeffs = vec![Rat::zero(); d];
            coeffs[i] = -Rat::one();
            inequalities.push(LinCon::new(coeffs, Rat::zero()));
        }
        let h = HRep {
            ambient: d,
            equalities: vec![LinCon::new(vec![Rat::one(); d], Rat::one())],
            inequalities,
        };
        let mut verts = vertex_enum(&h, &caps()).unwrap();
        verts.sort();
        let mut expect = unit_simplex_vertices(d);
        expect.sort();
        assert_eq!(verts, expect);
    }

    #[test]
    fn unbounded_input_is_reported() {
        // x ≥ 0 in the plane: a cone, not a polytope.
        let h = HRep {
            ambient: 2,
            equalities: vec![],
            inequalities: vec![
                LinCon::new(vec![-Rat::one(), Rat::zero()], Rat::zero()),
                LinCon::new(vec![Rat::zero(), -Rat::one()], Rat::zero()),
            ],
        };
        assert!(matches!(vertex_enum(&h, &caps()), Err(Error::Unbounded)));
    }

    #[test]
    fn empty_polytope_yields_no_vertices() {
        // x ≤ −1 and x ≥ 0 conflict.
        let h = HRep {
            ambient: 1,
            equalities: vec![],
            inequalities: vec![
                LinCon::new(vec![Rat::one()], -Rat::one()),
                LinCon::new(vec![-Rat::one()], Rat::zero()),
            ],
        };
        assert!(vertex_enum(&h, &caps()).unwrap().is_empty());
    }

    #[test]
    fn single_point_round_trip() {
        let verts = vec![vec![rat(1, 2), rat(1, 3)]];
        let h = facet_enum(&verts, &caps()).unwrap();
        assert_eq!(h.equalities.len(), 2);
        assert!(h.inequalities.is_empty());
        let back = vertex_enum(&h, &caps()).unwrap();
        assert_eq!(back, verts);
    }
}
