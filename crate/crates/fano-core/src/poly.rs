use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::monomial::Monomial;
use num_traits::Signed;
use std::fmt;

/// Sparse multivariate polynomial over a fixed field.
///
/// Invariant: `terms` is sorted strictly ascending in the canonical term
/// order (see `Monomial`), holds no zero coefficients, and every scalar
/// belongs to `field`. Two polynomials are equal iff their fields, variable
/// counts and term lists are equal, so `==` is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    field: FieldSpec,
    nvars: usize,
    terms: Vec<(Monomial, Scalar)>,
}

impl Polynomial {
    pub fn zero(field: FieldSpec, nvars: usize) -> Self {
        Polynomial {
            field,
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(field: FieldSpec, nvars: usize, c: Scalar) -> Self {
        Self::from_terms(field, nvars, vec![(Monomial::one(nvars), c)])
            .expect("constant term is well formed")
    }

    pub fn variable(field: FieldSpec, nvars: usize, i: usize) -> Result<Self, Error> {
        if i >= nvars {
            return Err(Error::VariableOutOfRange { index: i, nvars });
        }
        Self::from_terms(
            field,
            nvars,
            vec![(Monomial::variable(i, nvars), field.one())],
        )
    }

    /// Builds from arbitrary (monomial, coefficient) pairs: sorts, merges
    /// duplicates, drops zeros.
    pub fn from_terms(
        field: FieldSpec,
        nvars: usize,
        mut raw: Vec<(Monomial, Scalar)>,
    ) -> Result<Self, Error> {
        for (m, c) in &raw {
            if m.nvars() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: m.nvars(),
                });
            }
            if !field.owns(c) {
                return Err(Error::FieldMismatch);
            }
        }
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        let mut terms: Vec<(Monomial, Scalar)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match terms.last_mut() {
                Some((last, acc)) if *last == m => *acc = field.add(acc, &c),
                _ => terms.push((m, c)),
            }
        }
        terms.retain(|(_, c)| !field.is_zero(c));
        Ok(Polynomial {
            field,
            nvars,
            terms,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.field.zero())
    }

    /// Largest term degree; None for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Some(d) when nonzero and every term has degree d.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.total_degree()?;
        if self.terms.iter().all(|(m, _)| m.degree() == d) {
            Some(d)
        } else {
            None
        }
    }

    fn check_compat(&self, other: &Polynomial) -> Result<(), Error> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, Error> {
        self.check_compat(other)?;
        let mut raw = self.terms.clone();
        raw.extend(other.terms.iter().cloned());
        Self::from_terms(self.field, self.nvars, raw)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), self.field.neg(c)))
            .collect();
        Polynomial {
            field: self.field,
            nvars: self.nvars,
            terms,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Result<Polynomial, Error> {
        if !self.field.owns(c) {
            return Err(Error::FieldMismatch);
        }
        let raw = self
            .terms
            .iter()
            .map(|(m, a)| (m.clone(), self.field.mul(a, c)))
            .collect();
        Self::from_terms(self.field, self.nvars, raw)
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, Error> {
        self.check_compat(other)?;
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                raw.push((m1.mul(m2), self.field.mul(c1, c2)));
            }
        }
        Self::from_terms(self.field, self.nvars, raw)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.field, self.nvars, self.field.one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Formal partial derivative with respect to z_i. Works over any field;
    /// over F_p a term z_i^p differentiates to p * z_i^(p-1) = 0.
    pub fn differentiate(&self, i: usize) -> Result<Polynomial, Error> {
        if i >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut raw = Vec::new();
        for (m, c) in &self.terms {
            if let Some(lower) = m.divide_var(i) {
                let e = self.field.integer(m.exp(i) as i64);
                raw.push((lower, self.field.mul(c, &e)));
            }
        }
        Self::from_terms(self.field, self.nvars, raw)
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar, Error> {
        if point.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        for c in point {
            if !self.field.owns(c) {
                return Err(Error::FieldMismatch);
            }
        }
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = self.field.mul(&t, &self.field.pow(&point[i], e));
                }
            }
            acc = self.field.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Substitute z_i = 1 and renumber the remaining variables downward:
    /// slot l of the result is z_l for l < i and z_{l+1} for l >= i.
    pub fn dehomogenize(&self, i: usize) -> Result<Polynomial, Error> {
        if i >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut raw = Vec::new();
        for (m, c) in &self.terms {
            let mut exps: Vec<u32> = m.exps().to_vec();
            exps.remove(i);
            raw.push((Monomial::new(exps), c.clone()));
        }
        Self::from_terms(self.field, self.nvars - 1, raw)
    }

    /// Full composition: replace z_i by images[i]. All images must share a
    /// ring; the result lives in that ring. Powers of each image are
    /// computed once per needed exponent.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial, Error> {
        if images.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: images.len(),
            });
        }
        let (out_field, out_nvars) = match images.first() {
            Some(p) => (p.field, p.nvars),
            None => (self.field, 0),
        };
        if out_field != self.field {
            return Err(Error::FieldMismatch);
        }
        for p in images {
            if p.field != out_field {
                return Err(Error::FieldMismatch);
            }
            if p.nvars != out_nvars {
                return Err(Error::ArityMismatch {
                    expected: out_nvars,
                    got: p.nvars,
                });
            }
        }
        // powers[i][e] = images[i]^e, filled lazily up to the max exponent
        // of z_i over all terms.
        let one = Polynomial::constant(out_field, out_nvars, out_field.one());
        let mut powers: Vec<Vec<Polynomial>> = vec![vec![one.clone()]; self.nvars];
        let mut acc = Polynomial::zero(out_field, out_nvars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(out_field, out_nvars, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i])?;
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][e as usize])?;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Reduce a rational-coefficient polynomial mod p. Fails when some
    /// denominator is divisible by p.
    pub fn to_prime_field(&self, p: u64) -> Result<Polynomial, Error> {
        if self.field != FieldSpec::Rationals {
            return Err(Error::FieldMismatch);
        }
        let fp = FieldSpec::prime_field(p)?;
        let mut raw = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let r = c.as_rational().expect("rational field owns rationals");
            raw.push((m.clone(), fp.fraction(r.numer(), r.denom())?));
        }
        Self::from_terms(fp, self.nvars, raw)
    }

    /// Render with the default variable names z0, z1, ...
    pub fn display(&self) -> String {
        self.display_with(&|i| format!("z{i}"))
    }

    /// Render with caller-supplied variable names. Terms appear in
    /// canonical order; output re-parses to the same polynomial (with the
    /// default namer).
    pub fn display_with(&self, namer: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = match c {
                Scalar::Rat(r) => {
                    if r.is_negative() {
                        (true, Scalar::Rat(-r))
                    } else {
                        (false, c.clone())
                    }
                }
                Scalar::Fp(_) => (false, c.clone()),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let coeff_is_one = self.field.is_one(&mag);
            if m.is_constant() {
                out.push_str(&mag.to_string());
            } else if coeff_is_one {
                out.push_str(&m.display_with(namer));
            } else {
                out.push_str(&mag.to_string());
                out.push('*');
                out.push_str(&m.display_with(namer));
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

/// A tuple of nonzero homogeneous forms in a common ring; the cut equations
/// of the variety under study. Degrees are recorded at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormTuple {
    components: Vec<Polynomial>,
    degrees: Vec<u32>,
}

impl FormTuple {
    /// Each component must be nonzero homogeneous of degree >= 1, all in
    /// the same ring.
    pub fn new(components: Vec<Polynomial>) -> Result<Self, Error> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidRange("form tuple must be nonempty".into()))?;
        let (field, nvars) = (first.field(), first.nvars());
        let mut degrees = Vec::with_capacity(components.len());
        for p in &components {
            if p.field() != field {
                return Err(Error::FieldMismatch);
            }
            if p.nvars() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: p.nvars(),
                });
            }
            match p.homogeneous_degree() {
                Some(d) if d >= 1 => degrees.push(d),
                Some(_) => {
                    return Err(Error::InvalidDegree(
                        "form components must have degree >= 1".into(),
                    ))
                }
                None => return Err(Error::NotHomogeneous),
            }
        }
        Ok(FormTuple {
            components,
            degrees,
        })
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one component
    }

    pub fn field(&self) -> FieldSpec {
        self.field_ref()
    }

    fn field_ref(&self) -> FieldSpec {
        self.components[0].field()
    }

    pub fn nvars(&self) -> usize {
        self.components[0].nvars()
    }

    /// Ambient projective dimension n (nvars = n + 1).
    pub fn ambient_dim(&self) -> usize {
        self.nvars() - 1
    }

    pub fn to_prime_field(&self, p: u64) -> Result<FormTuple, Error> {
        let comps = self
            .components
            .iter()
            .map(|f| f.to_prime_field(p))
            .collect::<Result<Vec<_>, _>>()?;
        FormTuple::new(comps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn add_cancels_to_zero() {
        let p = parse_polynomial("z0 - z0", 4, q()).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.display(), "0");
    }

    #[test]
    fn product_of_conjugates() {
        let a = parse_polynomial("z0 + z1", 2, q()).unwrap();
        let b = parse_polynomial("z0 - z1", 2, q()).unwrap();
        let want = parse_polynomial("z0^2 - z1^2", 2, q()).unwrap();
        assert_eq!(a.mul(&b).unwrap(), want);
    }

    #[test]
    fn mod_p_coefficients_reduce() {
        let f5 = FieldSpec::prime_field(5).unwrap();
        let a = parse_polynomial("2*z0", 1, f5).unwrap();
        let b = parse_polynomial("3*z0", 1, f5).unwrap();
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod, parse_polynomial("z0^2", 1, f5).unwrap());
    }

    #[test]
    fn derivative_basic() {
        let p = parse_polynomial("z0^3*z1 + 2*z1^2", 2, q()).unwrap();
        let dz0 = p.differentiate(0).unwrap();
        assert_eq!(dz0, parse_polynomial("3*z0^2*z1", 2, q()).unwrap());
        let dz1 = p.differentiate(1).unwrap();
        assert_eq!(dz1, parse_polynomial("z0^3 + 4*z1", 2, q()).unwrap());
    }

    #[test]
    fn derivative_kills_pth_powers() {
        let f5 = FieldSpec::prime_field(5).unwrap();
        let p = parse_polynomial("z0^5", 1, f5).unwrap();
        assert!(p.differentiate(0).unwrap().is_zero());
    }

    #[test]
    fn evaluate_quadric() {
        let f7 = FieldSpec::prime_field(7).unwrap();
        let p = parse_polynomial("z0*z2 - z1*z3", 4, f7).unwrap();
        let pt = [1, 2, 3, 5].map(|x| f7.integer(x));
        // 1*3 - 2*5 = -7 = 0 mod 7
        assert!(f7.is_zero(&p.evaluate(&pt).unwrap()));
        let pt2 = [1, 2, 3, 4].map(|x| f7.integer(x));
        assert_eq!(p.evaluate(&pt2).unwrap(), f7.integer(-5));
    }

    #[test]
    fn dehomogenize_shifts_slots() {
        // z0*z2 - z1*z3 with z2 = 1: slots (z0, z1, z3) -> z0 - z1*z2'
        let p = parse_polynomial("z0*z2 - z1*z3", 4, q()).unwrap();
        let d = p.dehomogenize(2).unwrap();
        assert_eq!(d, parse_polynomial("z0 - z1*z2", 3, q()).unwrap());
        // z0*z2 - z1^2 with z0 = 1: slot 1 - slot 0 squared
        let c = parse_polynomial("z0*z2 - z1^2", 3, q()).unwrap();
        let dc = c.dehomogenize(0).unwrap();
        assert_eq!(dc, parse_polynomial("z1 - z0^2", 2, q()).unwrap());
    }

    #[test]
    fn dehomogenize_merges_collisions() {
        let p = parse_polynomial("z0*z1 + z1", 2, q()).unwrap();
        let d = p.dehomogenize(0).unwrap();
        assert_eq!(d, parse_polynomial("2*z0", 1, q()).unwrap());
    }

    #[test]
    fn substitution_composes() {
        // f(z0, z1) = z0^2 + z1, images z0 -> t0 + t1, z1 -> t0*t1
        let f = parse_polynomial("z0^2 + z1", 2, q()).unwrap();
        let imgs = vec![
            parse_polynomial("z0 + z1", 2, q()).unwrap(),
            parse_polynomial("z0*z1", 2, q()).unwrap(),
        ];
        let got = f.substitute(&imgs).unwrap();
        let want = parse_polynomial("z0^2 + 3*z0*z1 + z1^2", 2, q()).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn homogeneity_detection() {
        let p = parse_polynomial("z0^2 + z1*z2", 3, q()).unwrap();
        assert_eq!(p.homogeneous_degree(), Some(2));
        let r = parse_polynomial("z0^2 + z1", 2, q()).unwrap();
        assert_eq!(r.homogeneous_degree(), None);
        assert!(Polynomial::zero(q(), 2).homogeneous_degree().is_none());
    }

    #[test]
    fn form_tuple_validation() {
        let f = parse_polynomial("z0*z2 - z1*z3", 4, q()).unwrap();
        let t = FormTuple::new(vec![f.clone()]).unwrap();
        assert_eq!(t.degrees(), &[2]);
        assert_eq!(t.ambient_dim(), 3);
        let linear = parse_polynomial("z0", 4, q()).unwrap();
        assert_eq!(FormTuple::new(vec![linear]).unwrap().degrees(), &[1]);
        let mixed = parse_polynomial("z0^2 + z1", 4, q()).unwrap();
        assert_eq!(FormTuple::new(vec![mixed]), Err(Error::NotHomogeneous));
        let zero = Polynomial::zero(q(), 4);
        assert_eq!(FormTuple::new(vec![zero]), Err(Error::NotHomogeneous));
    }

    #[test]
    fn display_canonical_order() {
        let p = parse_polynomial("z0*z2 - z1^2", 3, q()).unwrap();
        // z1^2 precedes z0*z2 in the term order
        assert_eq!(p.display(), "-z1^2 + z0*z2");
        let roundtrip = parse_polynomial(&p.display(), 3, q()).unwrap();
        assert_eq!(roundtrip, p);
    }

    #[test]
    fn display_rational_coefficients() {
        let half = q().fraction(&1.into(), &2.into()).unwrap();
        let p = Polynomial::variable(q(), 2, 0)
            .unwrap()
            .scale(&half)
            .unwrap();
        assert_eq!(p.display(), "1/2*z0");
        assert_eq!(parse_polynomial("1/2*z0", 2, q()).unwrap(), p);
    }
}
