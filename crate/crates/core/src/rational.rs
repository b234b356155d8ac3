//! Exact rational scalars, vectors and the small dense linear algebra the
//! cone machinery is built on.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type QVec = Vec<Rational>;
/// Row-major dense matrix.
pub type QMat = Vec<QVec>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{input}` as an exact rational: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn qvec(vals: &[i64]) -> QVec {
    vals.iter().map(|&v| int(v)).collect()
}

pub fn zeros(n: usize) -> QVec {
    vec![Rational::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut v = zeros(n);
    v[i] = Rational::one();
    v
}

/// Parses `p/q`, integers, and finite decimals (optionally with an exponent)
/// into an exact rational.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: input.to_string(),
        reason,
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err("bad numerator"))?;
        let q: BigInt = q.trim().parse().map_err(|_| err("bad denominator"))?;
        if q.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }
    let lower = s.to_ascii_lowercase();
    if lower.contains("inf") || lower.contains("nan") {
        return Err(err("non-finite value"));
    }
    let (mantissa, exponent) = match lower.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| err("bad exponent"))?),
        None => (lower.as_str(), 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fractional) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fractional.is_empty() {
        return Err(err("no digits"));
    }
    if !whole.chars().chain(fractional.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err("unexpected character"));
    }
    let all_digits = format!("{whole}{fractional}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().unwrap_or_default());
    let scale = exponent - fractional.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Falls back to a quotient of (possibly huge) integers.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn vec_to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

pub fn vec_from_f64(v: &[f64]) -> Option<QVec> {
    v.iter().map(|&x| from_f64(x)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn add(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> QVec {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Rational]) -> QVec {
    a.iter().map(|x| -x).collect()
}

/// `a + s * b`
pub fn axpy(a: &[Rational], s: &Rational, b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn norm_sq(a: &[Rational]) -> Rational {
    dot(a, a)
}

pub fn mat_vec(m: &[QVec], v: &[Rational]) -> QVec {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `mᵀ v`, where `m` has `cols` columns.
pub fn mat_t_vec(m: &[QVec], v: &[Rational], cols: usize) -> QVec {
    let mut out = zeros(cols);
    for (row, vi) in m.iter().zip(v) {
        if vi.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            if !r.is_zero() {
                *o += r * vi;
            }
        }
    }
    out
}

pub fn transpose(m: &[QVec], cols: usize) -> QMat {
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// `vᵀ M w` for a square matrix.
pub fn bilinear(m: &[QVec], v: &[Rational], w: &[Rational]) -> Rational {
    dot(v, &mat_vec(m, w))
}

/// Scales a nonzero vector to the unique primitive integer vector with the
/// same direction (positive multiple). The zero vector is returned unchanged.
pub fn primitive(v: &[Rational]) -> QVec {
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &g))
        .collect()
}

/// Primitive form with the first nonzero entry made positive; identifies a
/// line (or hyperplane normal) up to nonzero scaling.
pub fn primitive_unsigned(v: &[Rational]) -> QVec {
    let p = primitive(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(first) if first.is_negative() => neg(&p),
        _ => p,
    }
}

pub fn sign(q: &Rational) -> Ordering {
    match q.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Lexicographic comparison used for canonical orderings.
pub fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[QVec], cols: usize) -> (QMat, Vec<usize>) {
    let mut m: QMat = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        m[r] = scale(&m[r], &inv);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                m[i] = axpy(&m[i], &-f, &m[r]);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec], cols: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    // Fraction-free elimination is not needed at desk scale; plain Gauss.
    let mut m: QMat = rows.to_vec();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                m[i] = axpy(&m[i], &-f, &m[r]);
            }
        }
        r += 1;
    }
    r
}

/// Basis of `{x : rows · x = 0}`.
pub fn nullspace(rows: &[QVec], cols: usize) -> QMat {
    let (r, pivots) = rref(rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(cols);
            v[f] = Rational::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Orthogonal projection of `v` onto the orthogonal complement of
/// `span(basis)`; `basis` must be linearly independent.
pub fn project_out(v: &[Rational], basis: &[QVec]) -> QVec {
    if basis.is_empty() {
        return v.to_vec();
    }
    let k = basis.len();
    // Solve G c = Bᵀ v with Gram matrix G.
    let mut aug: QMat = (0..k)
        .map(|i| {
            let mut row: QVec = (0..k).map(|j| dot(&basis[i], &basis[j])).collect();
            row.push(dot(&basis[i], v));
            row
        })
        .collect();
    let (red, _) = rref(&aug, k + 1);
    aug = red;
    let mut out = v.to_vec();
    for (i, row) in aug.iter().enumerate() {
        let c = &row[k];
        out = axpy(&out, &-c.clone(), &basis[i]);
    }
    out
}

/// Checks negative semidefiniteness of a symmetric rational matrix exactly via
/// symmetric Gaussian elimination.
pub fn is_neg_semidefinite(m: &[QVec]) -> bool {
    let mut a: QMat = m.iter().map(|r| neg(r)).collect();
    let n = a.len();
    let mut active: Vec<bool> = vec![true; n];
    loop {
        // Pick any remaining index with a nonzero diagonal.
        let mut pivot = None;
        for i in 0..n {
            if active[i] && !a[i][i].is_zero() {
                pivot = Some(i);
                break;
            }
        }
        let Some(p) = pivot else {
            // All remaining diagonals vanish: PSD iff the remaining block is zero.
            return (0..n)
                .filter(|&i| active[i])
                .all(|i| (0..n).filter(|&j| active[j]).all(|j| a[i][j].is_zero()));
        };
        if a[p][p].is_negative() {
            return false;
        }
        let d = a[p][p].clone();
        for i in 0..n {
            if !active[i] || i == p || a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for j in 0..n {
                if active[j] {
                    let delta = &f * &a[p][j];
                    a[i][j] -= delta;
                }
            }
        }
        active[p] = false;
    }
}

/// Display helper for exact vectors, e.g. `(1, -1/2)`.
pub struct DisplayVec<'a>(pub &'a [Rational]);

impl fmt::Display for DisplayVec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(x))?;
        }
        write!(f, ")")
    }
}

/// Serde adapters that encode rationals as exact strings.
pub mod qserde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Lit {
        Text(String),
        Number(serde_json::Number),
    }

    fn lit_to_q<E: serde::de::Error>(lit: Lit) -> Result<Rational, E> {
        let text = match lit {
            Lit::Text(s) => s,
            Lit::Number(n) => n.to_string(),
        };
        parse_rational(&text).map_err(E::custom)
    }

    pub mod scalar {
        use super::*;
        pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&format_rational(q))
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
            lit_to_q(Lit::deserialize(d)?)
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;
        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&format_rational(q))?;
            }
            seq.end()
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<QVec, D::Error> {
            Vec::<Lit>::deserialize(d)?
                .into_iter()
                .map(lit_to_q)
                .collect()
        }
    }

    pub mod mat {
        use super::*;
        use serde::ser::SerializeSeq;
        pub fn serialize<S: Serializer>(m: &[QVec], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(m.len()))?;
            for row in m {
                let strs: Vec<String> = row.iter().map(format_rational).collect();
                seq.serialize_element(&strs)?;
            }
            seq.end()
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<QMat, D::Error> {
            Vec::<Vec<Lit>>::deserialize(d)?
                .into_iter()
                .map(|row| row.into_iter().map(lit_to_q).collect())
                .collect()
        }
    }

    pub mod mats {
        use super::*;
        use serde::ser::SerializeSeq;
        pub fn serialize<S: Serializer>(ms: &[QMat], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(ms.len()))?;
            for m in ms {
                let strs: Vec<Vec<String>> = m
                    .iter()
                    .map(|row| row.iter().map(format_rational).collect())
                    .collect();
                seq.serialize_element(&strs)?;
            }
            seq.end()
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<QMat>, D::Error> {
            Vec::<Vec<Vec<Lit>>>::deserialize(d)?
                .into_iter()
                .map(|m| {
                    m.into_iter()
                        .map(|row| row.into_iter().map(lit_to_q).collect())
                        .collect()
                })
                .collect()
        }
    }

    pub mod opt_vec {
        use super::*;
        pub fn serialize<S: Serializer>(v: &Option<QVec>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => super::vec::serialize(v, s),
                None => s.serialize_none(),
            }
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<QVec>, D::Error> {
            let raw = Option::<Vec<Lit>>::deserialize(d)?;
            raw.map(|v| v.into_iter().map(lit_to_q::<D::Error>).collect())
                .transpose()
        }
    }
}
