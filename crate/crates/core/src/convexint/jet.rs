//! Truncated Taylor polynomials in `(x₁, x₂, t)` up to total degree 3.
use std::sync::OnceLock;

pub(crate) const JET_LEN: usize = 20;

struct Tables {
    monomials: [[u8; 3]; JET_LEN],
    products: Vec<(u8, u8, u8)>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut monomials = [[0u8; 3]; JET_LEN];
        let mut k = 0;
        for deg in 0..=3u8 {
            for e in monomials_of_degree(deg) {
                monomials[k] = e;
                k += 1;
            }
        }
        let mut products = Vec::new();
        for i in 0..JET_LEN {
            for j in 0..JET_LEN {
                let (a, b) = (monomials[i], monomials[j]);
                let s = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                if s.iter().sum::<u8>() <= 3 {
                    let k = monomials.iter().position(|m| *m == s).expect("degree checked");
                    products.push((i as u8, j as u8, k as u8));
                }
            }
        }
        Tables { monomials, products }
    })
}

/// Exponent triples of one total degree in lexicographically decreasing order.
pub(crate) fn monomials_of_degree(deg: u8) -> Vec<[u8; 3]> {
    let mut v = Vec::new();
    for a in (0..=deg).rev() {
        for b in (0..=deg - a).rev() {
            v.push([a, b, deg - a - b]);
        }
    }
    v
}

/// Position of a monomial of degree ≤ 3 in a jet.
#[cfg(test)]
pub(crate) fn jet_index(e: [u8; 3]) -> usize {
    tables().monomials.iter().position(|m| *m == e).expect("monomial of degree <= 3")
}

/// Taylor coefficients: the value of `∂^α f` is `c[α]·α!`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Jet(pub [f64; JET_LEN]);

impl Jet {
    pub fn constant(c: f64) -> Jet {
        let mut j = [0.0; JET_LEN];
        j[0] = c;
        Jet(j)
    }

    /// Coordinate `i` expanded at `value`.
    pub fn variable(i: usize, value: f64) -> Jet {
        let mut j = Jet::constant(value);
        j.0[1 + i] = 1.0;
        j
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        r
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut r = *self;
        r.0.iter_mut().for_each(|a| *a *= s);
        r
    }

    pub fn add_const(&self, c: f64) -> Jet {
        let mut r = *self;
        r.0[0] += c;
        r
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut r = [0.0; JET_LEN];
        for &(i, j, k) in &tables().products {
            r[k as usize] += self.0[i as usize] * o.0[j as usize];
        }
        Jet(r)
    }

    /// `f ∘ self` given `f` and its first three derivatives at `self.value()`.
    pub fn compose(&self, d: [f64; 4]) -> Jet {
        let mut h = *self;
        h.0[0] = 0.0;
        let h2 = h.mul(&h);
        let h3 = h2.mul(&h);
        let mut r = Jet::constant(d[0]);
        r = r.add(&h.scale(d[1]));
        r = r.add(&h2.scale(d[2] / 2.0));
        r.add(&h3.scale(d[3] / 6.0))
    }

    pub fn recip(&self) -> Jet {
        let x = self.value();
        self.compose([1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), -6.0 / (x * x * x * x)])
    }

    /// Third-order partial derivative `∂^α` for `|α| = 3`.
    #[cfg(test)]
    pub fn third(&self, e: [u8; 3]) -> f64 {
        let fact = |n: u8| [1.0, 1.0, 2.0, 6.0][n as usize];
        self.0[jet_index(e)] * fact(e[0]) * fact(e[1]) * fact(e[2])
    }

    /// All partial derivatives `∂^α` in jet order.
    pub fn derivatives(&self) -> [f64; JET_LEN] {
        let fact = |n: u8| [1.0, 1.0, 2.0, 6.0][n as usize];
        let m = &tables().monomials;
        let mut r = self.0;
        for (k, e) in m.iter().enumerate() {
            r[k] *= fact(e[0]) * fact(e[1]) * fact(e[2]);
        }
        r
    }
}
