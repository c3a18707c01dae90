//! Integer Fourier modes on the torus of dimension 1 or 2.

use serde::{Deserialize, Serialize};

/// A lattice vector in Z^d, d in {1, 2}. Unused trailing components are zero.
///
/// Serialized as a bare integer for d = 1 and as `[a, b]` for d = 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub d: usize,
    pub c: [i64; 2],
}

impl Mode {
    pub fn new(comps: &[i64]) -> Self {
        assert!(
            (1..=2).contains(&comps.len()),
            "only d = 1 or d = 2 supported"
        );
        let mut c = [0; 2];
        c[..comps.len()].copy_from_slice(comps);
        Mode { d: comps.len(), c }
    }

    pub fn zero(d: usize) -> Self {
        Mode { d, c: [0; 2] }
    }

    pub fn one_d(m: i64) -> Self {
        Mode { d: 1, c: [m, 0] }
    }

    pub fn comps(&self) -> &[i64] {
        &self.c[..self.d]
    }

    pub fn is_zero(&self) -> bool {
        self.c == [0, 0]
    }

    pub fn neg(&self) -> Self {
        Mode {
            d: self.d,
            c: [-self.c[0], -self.c[1]],
        }
    }

    pub fn dot(&self, other: &Mode) -> i64 {
        self.c[0] * other.c[0] + self.c[1] * other.c[1]
    }

    /// |m|^2.
    pub fn norm2(&self) -> i64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        (self.norm2() as f64).sqrt()
    }

    pub fn linf(&self) -> i64 {
        self.c[0].abs().max(self.c[1].abs())
    }

    /// All modes with |m|_inf <= bound, in lexicographic order.
    pub fn box_iter(d: usize, bound: i64) -> Vec<Mode> {
        let mut out = Vec::new();
        if d == 1 {
            for a in -bound..=bound {
                out.push(Mode::one_d(a));
            }
        } else {
            for a in -bound..=bound {
                for b in -bound..=bound {
                    out.push(Mode::new(&[a, b]));
                }
            }
        }
        out
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.d == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "({},{})", self.c[0], self.c[1])
        }
    }
}

impl Serialize for Mode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.d == 1 {
            s.serialize_i64(self.c[0])
        } else {
            self.comps().serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Mode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Scalar(i64),
            Vector(Vec<i64>),
        }
        match Raw::deserialize(d)? {
            Raw::Scalar(a) => Ok(Mode::one_d(a)),
            Raw::Vector(v) if (1..=2).contains(&v.len()) => Ok(Mode::new(&v)),
            Raw::Vector(v) => Err(serde::de::Error::custom(format!(
                "mode must have 1 or 2 components, got {}",
                v.len()
            ))),
        }
    }
}

/// Display order for mode lists: by |m|^2, then positive before negative.
pub fn display_order(a: &Mode, b: &Mode) -> std::cmp::Ordering {
    a.norm2().cmp(&b.norm2()).then_with(|| b.c.cmp(&a.c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serde_roundtrip() {
        let m = Mode::one_d(-3);
        assert_eq!(serde_json::to_string(&m).unwrap(), "-3");
        let m2 = Mode::new(&[1, -2]);
        let s = serde_json::to_string(&m2).unwrap();
        assert_eq!(s, "[1,-2]");
        assert_eq!(serde_json::from_str::<Mode>(&s).unwrap(), m2);
        assert_eq!(serde_json::from_str::<Mode>("[4]").unwrap(), Mode::one_d(4));
    }

    #[test]
    fn ordering_puts_positive_first() {
        let mut v = vec![Mode::one_d(-1), Mode::one_d(2), Mode::one_d(1), Mode::one_d(-2)];
        v.sort_by(display_order);
        assert_eq!(v, vec![Mode::one_d(1), Mode::one_d(-1), Mode::one_d(2), Mode::one_d(-2)]);
    }
}
