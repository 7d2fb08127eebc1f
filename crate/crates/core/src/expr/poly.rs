//! Rational functions of `t` with [`Scalar`] coefficients.
//!
//! Used by the simplifier: any subtree built only from literals, `t`, the four
//! arithmetic operations and integer powers is brought into the canonical form
//! `p(t)/q(t)` with common factors cancelled.

use super::{Expr, Scalar};
use num_integer::Integer;
use num_rational::Rational64;

/// Degree limit beyond which a subtree is left alone.
const MAX_DEGREE: usize = 24;

/// Coefficients in ascending degree; no trailing zeros (the zero polynomial is
/// empty).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly(Vec<Scalar>);

impl Poly {
    fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    fn t() -> Self {
        Poly(vec![Scalar::zero(), Scalar::one()])
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> Scalar {
        self.0.last().copied().unwrap_or_else(Scalar::zero)
    }

    fn is_exact(&self) -> bool {
        self.0.iter().all(|c| c.is_exact())
    }

    fn add(&self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        let get = |p: &Poly, i: usize| p.0.get(i).copied().unwrap_or_else(Scalar::zero);
        Poly::new((0..n).map(|i| get(self, i).add(get(rhs, i))).collect())
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| c.neg()).collect())
    }

    fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![Scalar::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] = out[i + j].add(a.mul(*b));
            }
        }
        Poly::new(out)
    }

    fn scale(&self, c: Scalar) -> Poly {
        Poly::new(self.0.iter().map(|x| x.mul(c)).collect())
    }

    fn pow(&self, n: u32) -> Option<Poly> {
        if self.degree() * n as usize > MAX_DEGREE {
            return None;
        }
        let mut acc = Poly::constant(Scalar::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        Some(acc)
    }

    fn trailing_zeros(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }

    fn shift_down(&self, k: usize) -> Poly {
        Poly(self.0[k.min(self.0.len())..].to_vec())
    }

    /// Polynomial division with remainder over exact rationals.
    fn div_rem(&self, divisor: &Poly) -> Option<(Poly, Poly)> {
        if divisor.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = vec![Scalar::zero(); self.0.len().saturating_sub(divisor.0.len()) + 1];
        let lead = divisor.lead();
        while !rem.is_zero() && rem.degree() >= divisor.degree() {
            let shift = rem.degree() - divisor.degree();
            let factor = rem.lead().div(lead)?;
            if !factor.is_exact() {
                return None;
            }
            quot[shift] = factor;
            let mut term = vec![Scalar::zero(); shift];
            term.extend(divisor.0.iter().map(|c| c.mul(factor)));
            let next = rem.sub(&Poly(term));
            if !next.is_exact() {
                return None;
            }
            if !next.is_zero() && next.degree() >= rem.degree() {
                return None;
            }
            rem = next;
        }
        Some((Poly::new(quot), rem))
    }

    /// Monic greatest common divisor over exact rationals.
    fn gcd(&self, other: &Poly) -> Option<Poly> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        let lead = a.lead();
        Some(a.scale(Scalar::one().div(lead)?))
    }

    /// Expression with terms in descending degree.
    fn to_expr(&self) -> Expr {
        if self.is_zero() {
            return Expr::int(0);
        }
        let mut out: Option<Expr> = None;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => None,
                1 => Some(Expr::T),
                _ => Some(Expr::T.pow(k as i64, 1)),
            };
            out = Some(match out {
                None => match mono {
                    None => Expr::Num(*c),
                    Some(m) if c.is_one() => m,
                    Some(m) if c.neg().is_one() => m.neg(),
                    Some(m) => Expr::Num(*c).mul(m),
                },
                Some(acc) => {
                    let mag = c.abs();
                    let term = match mono {
                        None => Expr::Num(mag),
                        Some(m) if mag.is_one() => m,
                        Some(m) => Expr::Num(mag).mul(m),
                    };
                    if c.is_negative() {
                        acc.sub(term)
                    } else {
                        acc.add(term)
                    }
                }
            });
        }
        out.unwrap_or_else(|| Expr::int(0))
    }

    fn integer_content(&self) -> Option<i64> {
        self.0.iter().try_fold(0i64, |g, c| {
            let r = c.as_exact()?;
            r.is_integer().then(|| g.gcd(r.numer()))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Converts `e` when it is a rational function of `t`.
    pub(crate) fn from_expr(e: &Expr) -> Option<RatFunc> {
        let rf = match e {
            Expr::Num(c) => RatFunc::poly(Poly::constant(*c)),
            Expr::T => RatFunc::poly(Poly::t()),
            Expr::Neg(a) => {
                let a = Self::from_expr(a)?;
                RatFunc {
                    num: a.num.neg(),
                    den: a.den,
                }
            }
            Expr::Add(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?, false),
            Expr::Sub(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?, true),
            Expr::Mul(a, b) => {
                let (a, b) = (Self::from_expr(a)?, Self::from_expr(b)?);
                RatFunc {
                    num: a.num.mul(&b.num),
                    den: a.den.mul(&b.den),
                }
            }
            Expr::Div(a, b) => {
                let (a, b) = (Self::from_expr(a)?, Self::from_expr(b)?);
                if b.num.is_zero() {
                    return None;
                }
                RatFunc {
                    num: a.num.mul(&b.den),
                    den: a.den.mul(&b.num),
                }
            }
            Expr::Pow(a, r) if r.is_integer() => {
                let a = Self::from_expr(a)?;
                let n = u32::try_from(r.numer().unsigned_abs()).ok()?;
                let (num, den) = (a.num.pow(n)?, a.den.pow(n)?);
                if *r.numer() < 0 {
                    if num.is_zero() {
                        return None;
                    }
                    RatFunc { num: den, den: num }
                } else {
                    RatFunc { num, den }
                }
            }
            Expr::Pow(..) | Expr::Call(..) => return None,
        };
        if rf.num.degree() > MAX_DEGREE || rf.den.degree() > MAX_DEGREE || rf.den.is_zero() {
            return None;
        }
        Some(rf.reduced())
    }

    fn poly(p: Poly) -> RatFunc {
        RatFunc {
            num: p,
            den: Poly::constant(Scalar::one()),
        }
    }

    fn add(&self, rhs: &RatFunc, subtract: bool) -> RatFunc {
        let rhs_num = if subtract {
            rhs.num.neg()
        } else {
            rhs.num.clone()
        };
        if self.den == rhs.den {
            return RatFunc {
                num: self.num.add(&rhs_num),
                den: self.den.clone(),
            };
        }
        RatFunc {
            num: self.num.mul(&rhs.den).add(&rhs_num.mul(&self.den)),
            den: self.den.mul(&rhs.den),
        }
    }

    fn reduced(self) -> RatFunc {
        let RatFunc { mut num, mut den } = self;
        if num.is_zero() {
            return RatFunc::poly(num);
        }
        let k = num.trailing_zeros().min(den.trailing_zeros());
        if k > 0 {
            num = num.shift_down(k);
            den = den.shift_down(k);
        }
        if den.degree() > 0 && num.is_exact() && den.is_exact() {
            if let Some(g) = num.gcd(&den) {
                if g.degree() > 0 {
                    if let (Some((qn, rn)), Some((qd, rd))) = (num.div_rem(&g), den.div_rem(&g)) {
                        if rn.is_zero() && rd.is_zero() {
                            num = qn;
                            den = qd;
                        }
                    }
                }
            }
        }
        // normalize so the denominator is monic
        let lead = den.lead();
        if !lead.is_one() {
            if let Some(inv) = Scalar::one().div(lead) {
                num = num.scale(inv);
                den = den.scale(inv);
            }
        }
        RatFunc { num, den }
    }

    pub(crate) fn to_expr(&self) -> Expr {
        let all: Vec<Scalar> = self
            .num
            .0
            .iter()
            .chain(self.den.0.iter())
            .copied()
            .collect();
        if self.den.degree() == 0 {
            // monic constant denominator is exactly one
            if self.num.degree() == 0 {
                return self.num.to_expr();
            }
            return match Scalar::common_denominator(&self.num.0) {
                Some(d) if d > 1 => {
                    let scaled = self.num.scale(Scalar::int(d));
                    scaled.to_expr().div(Expr::int(d))
                }
                _ => self.num.to_expr(),
            };
        }
        let (mut num, mut den) = (self.num.clone(), self.den.clone());
        if let Some(d) = Scalar::common_denominator(&all) {
            num = num.scale(Scalar::int(d));
            den = den.scale(Scalar::int(d));
            let content = num
                .integer_content()
                .zip(den.integer_content())
                .map(|(a, b)| a.gcd(&b));
            if let Some(g) = content.filter(|g| *g > 1) {
                let inv = Scalar::Exact(Rational64::new(1, g));
                num = num.scale(inv);
                den = den.scale(inv);
            }
        }
        if den.lead().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        num.to_expr().div(den.to_expr())
    }
}
