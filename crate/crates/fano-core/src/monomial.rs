use std::cmp::Ordering;

/// Exponent vector of a monomial in variables z0..z_{nvars-1}.
///
/// `Ord` is the canonical term order used everywhere in the crate: higher
/// total degree first; within a degree, m1 precedes m2 exactly when m1 has
/// the smaller exponent at the highest index where they differ. Restricted
/// to a single degree this reproduces the usual basis enumeration
///   z0^2, z0*z1, z1^2, z0*z2, z1*z2, z2^2, z0*z3, ...
/// and matrix rows/columns indexed "in basis order" mean ascending in this
/// order within a fixed degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial {
            exps: vec![0; nvars],
        }
    }

    /// The single variable z_i.
    pub fn variable(i: usize, nvars: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Multiply by z_i.
    pub fn times_var(&self, i: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps[i] += 1;
        Monomial { exps }
    }

    /// Divide by z_i once; None when z_i does not divide self.
    pub fn divide_var(&self, i: usize) -> Option<Monomial> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[i] -= 1;
        Some(Monomial { exps })
    }

    /// Render with caller-supplied variable names; "1" for the constant
    /// monomial.
    pub fn display_with(&self, namer: &dyn Fn(usize) -> String) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(namer(i)),
                _ => parts.push(format!("{}^{}", namer(i), e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Position of this monomial in `basis(self.degree(), nvars)`.
    pub fn basis_position(&self) -> usize {
        basis(self.degree(), self.nvars())
            .iter()
            .position(|m| m == self)
            .expect("monomial occurs in its own degree basis")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        match other.degree().cmp(&self.degree()) {
            Ordering::Equal => {
                for i in (0..self.exps.len()).rev() {
                    match self.exps[i].cmp(&other.exps[i]) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
            ord => ord,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All degree-d monomials in `nvars` variables, in basis order. Generated
/// directly in order: monomials whose highest-index variable is `last` are
/// the degree-(d-1) basis in variables 0..=last, each multiplied by z_last.
pub fn basis(d: u32, nvars: usize) -> Vec<Monomial> {
    fn rec(d: u32, active: usize, nvars: usize, out: &mut Vec<Monomial>) {
        if d == 0 {
            out.push(Monomial::one(nvars));
            return;
        }
        for last in 0..active {
            let start = out.len();
            rec(d - 1, last + 1, nvars, out);
            for m in &mut out[start..] {
                m.exps[last] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(d, nvars, nvars, &mut out);
    out
}
