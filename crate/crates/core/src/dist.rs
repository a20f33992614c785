//! Conditional-distribution vectors and their exact JSON file format.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dims::Dims;
use crate::error::{Error, Result};
use crate::rational::{format_rat, parse_rat, Rat};

/// A value constraint violated by a candidate distribution. The report names
/// the first violated constraint in canonical coordinate order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("entry P(x{x},y{y}|z{z}) = {value} lies outside [0,1]")]
    EntryOutOfRange {
        x: usize,
        y: usize,
        z: usize,
        value: String,
    },
    #[error("z-block {z} sums to {sum}, expected exactly 1")]
    BlockSum { z: usize, sum: String },
}

/// The flat vector of conditionals P(x_i, y_j | z_k) for fixed domain sizes,
/// stored in the canonical order fixed by [`Dims::index`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondDist {
    dims: Dims,
    values: Vec<Rat>,
}

impl CondDist {
    /// Wrap a flat vector. Only the shape is checked here; value
    /// constraints are the business of [`CondDist::validate`].
    pub fn new(dims: Dims, values: Vec<Rat>) -> Result<CondDist> {
        if values.len() != dims.dim_f() {
            return Err(Error::Shape(format!(
                "distribution vector has length {}, dims {dims} require {}",
                values.len(),
                dims.dim_f()
            )));
        }
        Ok(CondDist { dims, values })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Result<&Rat> {
        Ok(&self.values[self.dims.index(i, j, k)?])
    }

    /// Accept iff every entry is in [0,1] and every z-block sums to exactly 1.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let one = Rat::one();
        for (off, v) in self.values.iter().enumerate() {
            if v < &Rat::zero() || v > &one {
                let (x, y, z) = self.dims.coord(off);
                return Err(Violation::EntryOutOfRange {
                    x,
                    y,
                    z,
                    value: format_rat(v),
                });
            }
        }
        for k in 1..=self.dims.l {
            let mut sum = Rat::zero();
            for i in 1..=self.dims.n {
                for j in 1..=self.dims.m {
                    sum += &self.values[self.dims.index(i, j, k).expect("in range")];
                }
            }
            if sum != one {
                return Err(Violation::BlockSum {
                    z: k,
                    sum: format_rat(&sum),
                });
            }
        }
        Ok(())
    }

    /// Uniform distribution: every entry 1/(n·m).
    pub fn uniform(dims: Dims) -> CondDist {
        let cell = Rat::new((1).into(), (dims.n as i64 * dims.m as i64).into());
        CondDist {
            dims,
            values: vec![cell; dims.dim_f()],
        }
    }

    /// Point mass on one (x, y) pair under every z value.
    pub fn point_mass(dims: Dims, x: usize, y: usize) -> Result<CondDist> {
        let picks = vec![(x, y); dims.l];
        CondDist::from_block_points(dims, &picks)
    }

    /// Point mass with a chosen (x, y) pair per z value; `picks[k-1]` is the
    /// pair that carries all the mass given z_k.
    pub fn from_block_points(dims: Dims, picks: &[(usize, usize)]) -> Result<CondDist> {
        if picks.len() != dims.l {
            return Err(Error::Shape(format!(
                "expected {} (x,y) picks, got {}",
                dims.l,
                picks.len()
            )));
        }
        let mut values = vec![Rat::zero(); dims.dim_f()];
        for (k0, &(x, y)) in picks.iter().enumerate() {
            values[dims.index(x, y, k0 + 1)?] = Rat::one();
        }
        Ok(CondDist { dims, values })
    }

    /// Convex combination `alpha·a + (1-alpha)·b`, exact.
    pub fn mix(a: &CondDist, b: &CondDist, alpha: &Rat) -> Result<CondDist> {
        if a.dims != b.dims {
            return Err(Error::Shape(format!(
                "cannot mix distributions over {} and {}",
                a.dims, b.dims
            )));
        }
        let beta = Rat::one() - alpha;
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(p, q)| alpha * p + &beta * q)
            .collect();
        Ok(CondDist {
            dims: a.dims,
            values,
        })
    }

    pub fn to_json(&self) -> String {
        let file = DistFile::from(self);
        serde_json::to_string_pretty(&file).expect("serializing plain data cannot fail")
    }

    pub fn parse_json(text: &str) -> Result<CondDist> {
        let file: DistFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad dist JSON: {e}")))?;
        file.try_into()
    }
}

/// On-disk form: `{"l":L,"m":M,"n":N,"p":[[["..."]]]}` with
/// `p[k-1][i-1][j-1] = P(x_i, y_j | z_k)` as rational or decimal strings.
#[derive(Serialize, Deserialize)]
struct DistFile {
    l: usize,
    m: usize,
    n: usize,
    p: Vec<Vec<Vec<String>>>,
}

impl From<&CondDist> for DistFile {
    fn from(d: &CondDist) -> DistFile {
        let dims = d.dims;
        let p = (1..=dims.l)
            .map(|k| {
                (1..=dims.n)
                    .map(|i| {
                        (1..=dims.m)
                            .map(|j| format_rat(d.get(i, j, k).expect("in range")))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        DistFile {
            l: dims.l,
            m: dims.m,
            n: dims.n,
            p,
        }
    }
}

impl TryFrom<DistFile> for CondDist {
    type Error = Error;

    fn try_from(f: DistFile) -> Result<CondDist> {
        let dims = Dims::new(f.l, f.m, f.n)?;
        if f.p.len() != dims.l {
            return Err(Error::Shape(format!(
                "p has {} z-blocks, expected {}",
                f.p.len(),
                dims.l
            )));
        }
        let mut values = vec![Rat::zero(); dims.dim_f()];
        for (k0, block) in f.p.iter().enumerate() {
            if block.len() != dims.n {
                return Err(Error::Shape(format!(
                    "z-block {} has {} x-rows, expected {}",
                    k0 + 1,
                    block.len(),
                    dims.n
                )));
            }
            for (i0, row) in block.iter().enumerate() {
                if row.len() != dims.m {
                    return Err(Error::Shape(format!(
                        "z-block {}, x-row {} has {} entries, expected {}",
                        k0 + 1,
                        i0 + 1,
                        row.len(),
                        dims.m
                    )));
                }
                for (j0, s) in row.iter().enumerate() {
                    values[dims.index(i0 + 1, j0 + 1, k0 + 1)?] = parse_rat(s)?;
                }
            }
        }
        CondDist::new(dims, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn dims222() -> Dims {
        Dims::new(2, 2, 2).unwrap()
    }

    #[test]
    fn point_mass_and_uniform_validate() {
        assert!(CondDist::point_mass(dims222(), 1, 1).unwrap().validate().is_ok());
        assert!(CondDist::uniform(dims222()).validate().is_ok());
        assert!(CondDist::uniform(Dims::new(3, 2, 4).unwrap()).validate().is_ok());
    }

    #[test]
    fn bad_block_sum_names_the_block() {
        let mut values = vec![Rat::zero(); 8];
        values[0] = Rat::one(); // z-block 1 fine via P(x1,y1|z1)=1
        let d = dims222();
        values[d.index(1, 1, 2).unwrap()] = rat(3, 4);
        values[d.index(2, 2, 2).unwrap()] = rat(3, 4);
        let dist = CondDist::new(d, values).unwrap();
        match dist.validate() {
            Err(Violation::BlockSum { z, sum }) => {
                assert_eq!(z, 2);
                assert_eq!(sum, "3/2");
            }
            other => panic!("expected block-sum violation, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_entry_is_reported_first() {
        let mut values = vec![Rat::zero(); 8];
        values[0] = rat(-1, 2);
        let dist = CondDist::new(dims222(), values).unwrap();
        assert!(matches!(
            dist.validate(),
            Err(Violation::EntryOutOfRange { x: 1, y: 1, z: 1, .. })
        ));
    }

    #[test]
    fn wrong_length_is_a_shape_error() {
        assert!(matches!(
            CondDist::new(dims222(), vec![Rat::zero(); 7]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let d = dims222();
        let mut values = vec![Rat::zero(); 8];
        values[d.index(1, 1, 1).unwrap()] = rat(1, 3);
        values[d.index(2, 2, 1).unwrap()] = rat(2, 3);
        values[d.index(1, 2, 2).unwrap()] = rat(1, 4);
        values[d.index(2, 1, 2).unwrap()] = rat(3, 4);
        let dist = CondDist::new(d, values).unwrap();
        let back = CondDist::parse_json(&dist.to_json()).unwrap();
        assert_eq!(dist, back);
    }

    #[test]
    fn decimal_inputs_convert_exactly() {
        let text = r#"{"l":1,"m":2,"n":2,"p":[[["0.25","0.25"],["0.5","0"]]]}"#;
        let dist = CondDist::parse_json(text).unwrap();
        assert!(dist.validate().is_ok());
        assert_eq!(dist.get(1, 1, 1).unwrap(), &rat(1, 4));
        assert_eq!(dist.get(2, 1, 1).unwrap(), &rat(1, 2));
    }

    #[test]
    fn mix_is_exact_and_shape_checked() {
        let a = CondDist::point_mass(dims222(), 1, 1).unwrap();
        let b = CondDist::uniform(dims222());
        let m = CondDist::mix(&a, &b, &rat(1, 3)).unwrap();
        assert!(m.validate().is_ok());
        assert_eq!(m.get(1, 1, 1).unwrap(), &(rat(1, 3) + rat(2, 3) * rat(1, 4)));
        let c = CondDist::uniform(Dims::new(1, 2, 2).unwrap());
        assert!(CondDist::mix(&a, &c, &rat(1, 2)).is_err());
    }
}
