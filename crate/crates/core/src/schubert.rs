//! Schubert calculus on the Grassmannian G(2,n) of 2-planes in C^n.
//!
//! Classes are indexed by partitions `(a, b)` with `n-2 ≥ a ≥ b ≥ 0`.
//! Products are computed with the Pieri rule and the two-row Giambelli
//! formula `σ_(a,b) = σ_a·σ_b - σ_(a+1)·σ_(b-1)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::{Error, Result};

pub type Partition = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchubertElement {
    n: u32,
    terms: BTreeMap<Partition, BigInt>,
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Schubert(format!("G(2,{n}) needs n ≥ 2")));
    }
    Ok(())
}

impl SchubertElement {
    pub fn zero(n: u32) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(n: u32) -> Result<Self> {
        Self::sigma(n, 0, 0)
    }

    /// The Schubert class `σ_(a,b)`.
    pub fn sigma(n: u32, a: u32, b: u32) -> Result<Self> {
        check_n(n)?;
        if a < b || a > n - 2 {
            return Err(Error::Schubert(format!(
                "partition ({a},{b}) is not in the 2×{} box",
                n - 2
            )));
        }
        let mut x = Self::zero(n)?;
        x.terms.insert((a, b), BigInt::one());
        Ok(x)
    }

    pub fn special(n: u32, k: u32) -> Result<Self> {
        Self::sigma(n, k, 0)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> u32 {
        2 * (self.n - 2)
    }

    pub fn terms(&self) -> &BTreeMap<Partition, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, p: Partition) -> BigInt {
        self.terms.get(&p).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, p: Partition, c: BigInt) {
        let e = self.terms.entry(p).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    fn same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Schubert(format!(
                "G(2,{}) and G(2,{}) classes cannot be combined",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (p, v) in &self.terms {
            out.add_term(*p, v * c);
        }
        out
    }

    /// Part of degree `d` (codimension `d` classes only).
    pub fn homogeneous(&self, d: u32) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| a + b == d)
                .map(|(p, c)| (*p, c.clone()))
                .collect(),
        }
    }

    /// `σ_k` for any `k`; vanishes above `n-2`.
    fn pieri_any(&self, k: u32) -> Self {
        let top = self.n - 2;
        let mut out = Self {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (&(a, b), c) in &self.terms {
            // horizontal strips: a ≤ a' ≤ n-2, b ≤ b' ≤ a
            for bp in b..=a {
                let added = bp - b;
                if added > k {
                    break;
                }
                let ap = a + (k - added);
                if ap <= top {
                    out.add_term((ap, bp), c.clone());
                }
            }
        }
        out
    }

    pub fn pieri_mult(&self, k: u32) -> Result<Self> {
        if k > self.n - 2 {
            return Err(Error::Schubert(format!(
                "σ_{k} is outside G(2,{}) (need k ≤ {})",
                self.n,
                self.n - 2
            )));
        }
        Ok(self.pieri_any(k))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        let mut out = Self::zero(self.n)?;
        for (&(a, b), c) in &other.terms {
            let mut term = self.pieri_any(a).pieri_any(b);
            if b > 0 {
                let correction = self.pieri_any(a + 1).pieri_any(b - 1);
                term = term.add(&correction.scale(&BigInt::from(-1)))?;
            }
            out = out.add(&term.scale(c))?;
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::one(self.n)?;
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Degree: the coefficient of the point class `σ_(n-2,n-2)`.
    pub fn integrate(&self) -> BigInt {
        self.coefficient((self.n - 2, self.n - 2))
    }
}

impl fmt::Display for SchubertElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(a, b), c)| {
                let s = if b == 0 {
                    format!("σ{a}")
                } else {
                    format!("σ{a},{b}")
                };
                if c.is_one() {
                    s
                } else {
                    format!("{c}·{s}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn parse_factor(n: u32, tok: &str) -> Result<SchubertElement> {
    let bad = || Error::Parse(format!("cannot read Schubert factor `{tok}`"));
    let (base, exp) = match tok.split_once('^') {
        Some((b, e)) => (b.trim(), e.trim().parse::<u32>().map_err(|_| bad())?),
        None => (tok.trim(), 1),
    };
    let idx = base
        .strip_prefix("sigma")
        .or_else(|| base.strip_prefix("σ"))
        .or_else(|| base.strip_prefix('s'));
    let elem = match idx {
        Some(idx) => {
            let idx = idx.trim_start_matches('_');
            let idx = idx
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .or_else(|| idx.strip_prefix('{').and_then(|s| s.strip_suffix('}')))
                .unwrap_or(idx);
            let (a, b) = if let Some((a, b)) = idx.split_once(',') {
                (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
            } else {
                let digits: Vec<u32> = idx.chars().map(|c| c.to_digit(10)).collect::<Option<_>>().ok_or_else(bad)?;
                match digits[..] {
                    [a] => (a, 0),
                    [a, b] => (a, b),
                    _ => return Err(bad()),
                }
            };
            SchubertElement::sigma(n, a, b)?
        }
        None => {
            let c: BigInt = base.parse().map_err(|_| bad())?;
            SchubertElement::one(n)?.scale(&c)
        }
    };
    elem.pow(exp)
}

/// Reads expressions such as `sigma1^4`, `2*s2*s11 + s(3,1)` on G(2,n).
/// Two-digit indices mean two rows; use `sigma(a,b)` for larger parts.
pub fn parse_expression(n: u32, s: &str) -> Result<SchubertElement> {
    check_n(n)?;
    if s.trim().is_empty() {
        return Err(Error::Parse("empty Schubert expression".into()));
    }
    let mut total = SchubertElement::zero(n)?;
    for term in s.split('+') {
        let mut prod = SchubertElement::one(n)?;
        for factor in term.split(['*', '·']) {
            prod = prod.mul(&parse_factor(n, factor)?)?;
        }
        total = total.add(&prod)?;
    }
    Ok(total)
}

/// `χ(G(2,n)) = C(n,2)`, the number of cells.
pub fn euler_char_g2n(n: u32) -> Result<BigInt> {
    check_n(n)?;
    let n = BigInt::from(n);
    Ok(&n * (&n - 1) / 2)
}

/// Symmetric polynomials in the two Chern roots `x1, x2`, keyed by exponents.
pub type RootPolynomial = BTreeMap<(u32, u32), BigInt>;

/// `∏_{i=0..k} (i·x1 + (k-i)·x2)`, the top Chern class of `Sym^k S*`.
pub fn sym_power_top_chern(k: u32) -> RootPolynomial {
    let mut poly: RootPolynomial = BTreeMap::from([((0, 0), BigInt::one())]);
    for i in 0..=k {
        let mut next = RootPolynomial::new();
        for ((p, q), c) in &poly {
            for (dp, dq, w) in [(1, 0, i), (0, 1, k - i)] {
                if w == 0 {
                    continue;
                }
                *next.entry((p + dp, q + dq)).or_default() += c * BigInt::from(w);
            }
        }
        next.retain(|_, c| !c.is_zero());
        poly = next;
    }
    poly
}

pub fn is_symmetric(p: &RootPolynomial) -> bool {
    p.iter().all(|(&(a, b), c)| p.get(&(b, a)) == Some(c))
}

fn e1e2_power(a: u32, b: u32) -> RootPolynomial {
    // e1^a e2^b with e1 = x1 + x2, e2 = x1 x2
    let mut out = RootPolynomial::new();
    let mut binom = BigInt::one();
    for j in 0..=a {
        out.insert((j + b, a - j + b), binom.clone());
        binom = binom * BigInt::from(a - j) / BigInt::from(j + 1);
    }
    out
}

/// Writes a symmetric polynomial as `Σ c·e1^a·e2^b`, by repeatedly removing
/// the lex-leading monomial.
pub fn to_elementary(p: &RootPolynomial) -> Result<BTreeMap<(u32, u32), BigInt>> {
    if !is_symmetric(p) {
        return Err(Error::Schubert("polynomial is not symmetric in the Chern roots".into()));
    }
    let mut rest = p.clone();
    let mut out = BTreeMap::new();
    while let Some((&(a, b), c)) = rest.iter().next_back() {
        let c = c.clone();
        // a ≥ b for the leading monomial of a symmetric polynomial
        let (ea, eb) = (a - b, b);
        for (m, v) in e1e2_power(ea, eb) {
            let e = rest.entry(m).or_default();
            *e -= &c * v;
            if e.is_zero() {
                rest.remove(&m);
            }
        }
        out.insert((ea, eb), c);
    }
    Ok(out)
}

/// Evaluates `Σ c·e1^a·e2^b` with `e1 = σ1`, `e2 = σ1,1`.
pub fn evaluate_elementary(n: u32, poly: &BTreeMap<(u32, u32), BigInt>) -> Result<SchubertElement> {
    let mut out = SchubertElement::zero(n)?;
    if n == 2 {
        if let Some(c) = poly.get(&(0, 0)) {
            out = SchubertElement::one(n)?.scale(c);
        }
        return Ok(out);
    }
    let e1 = SchubertElement::special(n, 1)?;
    let e2 = SchubertElement::sigma(n, 1, 1)?;
    for (&(a, b), c) in poly {
        out = out.add(&e1.pow(a)?.mul(&e2.pow(b)?)?.scale(c))?;
    }
    Ok(out)
}

/// `∫_{G(2,n)} c_top(Sym^k S*)`; zero unless `k + 1 = 2(n-2)`.
pub fn ctop_sym_k_dual_tautological(n: u32, k: u32) -> Result<BigInt> {
    check_n(n)?;
    let elem = to_elementary(&sym_power_top_chern(k))?;
    Ok(evaluate_elementary(n, &elem)?.integrate())
}

pub fn lines_on_quintic() -> BigInt {
    ctop_sym_k_dual_tautological(5, 5).expect("G(2,5) is valid")
}

pub fn lines_on_cubic_surface() -> BigInt {
    ctop_sym_k_dual_tautological(4, 3).expect("G(2,4) is valid")
}

/// `∫ c_top(TG(2,n))` from `c(TG) = c(S*)^n / c(S*⊗S)`, where
/// `c(S*⊗S) = 1 - (e1² - 4e2)`.
pub fn top_chern_tangent(n: u32) -> Result<BigInt> {
    check_n(n)?;
    let one = SchubertElement::one(n)?;
    if n == 2 {
        return Ok(BigInt::one());
    }
    let e1 = SchubertElement::special(n, 1)?;
    let e2 = SchubertElement::sigma(n, 1, 1)?;
    let c_dual = one.add(&e1)?.add(&e2)?;
    let y = e1.mul(&e1)?.add(&e2.scale(&BigInt::from(-4)))?;
    // y is nilpotent; 1/(1 - y) = Σ y^j
    let mut inv = one.clone();
    let mut yj = one.clone();
    for _ in 0..n {
        yj = yj.mul(&y)?;
        inv = inv.add(&yj)?;
    }
    let total = c_dual.pow(n)?.mul(&inv)?;
    Ok(total.homogeneous(total.dim()).integrate())
}

/// Lines on the double octic: two copies of G(2,4), each contributing
/// `c_top(T*G(2,4)) = χ(G(2,4))` since the dimension is even.
pub fn lines_on_octic_double() -> BigInt {
    let single = euler_char_g2n(4).expect("n = 4");
    debug_assert_eq!(top_chern_tangent(4).ok(), Some(single.clone()));
    BigInt::from(2) * single
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountPart {
    pub description: &'static str,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FourLinesNote {
    pub question: &'static str,
    pub parts: Vec<CountPart>,
    pub total: u32,
    pub schubert_check: String,
}

/// Lines meeting four general lines in P^3, counted by degenerating the four
/// lines into two intersecting pairs `l ∩ m` and `l' ∩ m'`.
pub fn four_lines_degeneration_note(n: u32) -> Result<FourLinesNote> {
    if n != 4 {
        return Err(Error::Schubert(format!(
            "the four-lines count lives on G(2,4), not G(2,{n})"
        )));
    }
    let parts = vec![
        CountPart {
            description: "the line through the points l ∩ m and l' ∩ m'",
            count: 1,
        },
        CountPart {
            description: "the line where the planes spanned by l, m and by l', m' meet",
            count: 1,
        },
    ];
    let total: u32 = parts.iter().map(|p| p.count).sum();
    let check = SchubertElement::special(4, 1)?.pow(4)?.integrate();
    if check != BigInt::from(total) {
        return Err(Error::Schubert(format!("σ1^4 = {check} disagrees with {total}")));
    }
    Ok(FourLinesNote {
        question: "lines in P^3 meeting four general lines",
        parts,
        total,
        schubert_check: format!("∫ σ1^4 = {check}"),
    })
}
