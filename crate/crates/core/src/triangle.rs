//! The exact-triangle calculus on torus slopes: negative continued
//! fractions, bypass decomposition of sutures, the solid-torus χ recursion,
//! surgery-triangle parity, triangle propagation, and the mod-2 cobordism
//! degree formula.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangleError {
    #[error("slope {x}/{y} is not in lowest terms")]
    NotCoprime { x: i64, y: i64 },
    #[error("arguments out of range: {0}")]
    OutOfRange(String),
    #[error("empty continued fraction")]
    EmptyExpansion,
    #[error("continued fraction hits a zero denominator")]
    DivisionByZero,
    #[error("recursion gives {recursion} but the closed form gives {closed} at slope ({x},{y})")]
    RecursionMismatch { x: i64, y: i64, recursion: i64, closed: i64 },
    #[error("parity input does not determine a unique odd map")]
    AmbiguousInput,
    #[error("all three characteristics are known; nothing to solve")]
    Overdetermined,
    #[error("more than one characteristic is unknown")]
    Underdetermined,
    #[error("degree formula sum {0} is odd")]
    NonIntegralDegree(i64),
}

/// A slope ±(xλ + yμ) on a torus boundary, normalized so y ≥ 0 and x > 0
/// when y = 0, with x, y coprime (gcd(0, k) = k). 1/0 — that is, (x, y) =
/// (0, 1) — is the meridian μ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    x: i64,
    y: i64,
}

impl Slope {
    pub fn new(x: i64, y: i64) -> Result<Self, TriangleError> {
        if gcd(x.unsigned_abs(), y.unsigned_abs()) != 1 {
            return Err(TriangleError::NotCoprime { x, y });
        }
        Ok(Self::reduce(x, y))
    }

    fn reduce(x: i64, y: i64) -> Self {
        if y < 0 || (y == 0 && x < 0) {
            Slope { x: -x, y: -y }
        } else {
            Slope { x, y }
        }
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    pub fn y(&self) -> i64 {
        self.y
    }

    pub fn meridian() -> Self {
        Slope { x: 0, y: 1 }
    }

    pub fn longitude() -> Self {
        Slope { x: 1, y: 0 }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A negative continued fraction a₀ − 1/(a₁ − 1/(… − 1/a_n)); every entry
/// after the first is at most −2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ncf {
    entries: Vec<i64>,
}

impl Ncf {
    pub fn new(entries: Vec<i64>) -> Result<Self, TriangleError> {
        if entries.is_empty() {
            return Err(TriangleError::EmptyExpansion);
        }
        if entries[1..].iter().any(|&a| a > -2) {
            return Err(TriangleError::OutOfRange(format!(
                "continued-fraction entries after the first must be <= -2, got {entries:?}"
            )));
        }
        Ok(Ncf { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }
}

/// The negative continued fraction of −y/z, entries ≤ −2 throughout when
/// −y/z < −1. Requires 0 < z < y or z = 1 ≤ y, with y, z coprime.
pub fn ncf(y: i64, z: i64) -> Result<Ncf, TriangleError> {
    if !(0 < z && (z < y || (z == 1 && y >= 1))) {
        return Err(TriangleError::OutOfRange(format!(
            "need 0 < z < y or z = 1 <= y, got y = {y}, z = {z}"
        )));
    }
    if gcd(y as u64, z as u64) != 1 {
        return Err(TriangleError::NotCoprime { x: y, y: z });
    }
    let mut entries = Vec::new();
    let (mut y, mut z) = (y, z);
    loop {
        // a = -ceil(y/z), so that r = a + y/z lies in (-1, 0].
        let a = -y.div_euclid(z) - if y.rem_euclid(z) != 0 { 1 } else { 0 };
        entries.push(a);
        let rem = z * (-a) - y; // numerator of -(a + y/z), in [0, z)
        if rem == 0 {
            return Ncf::new(entries);
        }
        (y, z) = (z, rem);
    }
}

/// Evaluate entries right to left, returning the value as a reduced
/// fraction with positive denominator.
pub fn ncf_eval(entries: &[i64]) -> Result<(i64, i64), TriangleError> {
    let (n, d) = eval_raw(entries)?;
    let (n, d) = (i64::try_from(n), i64::try_from(d));
    match (n, d) {
        (Ok(n), Ok(d)) => Ok((n, d)),
        _ => Err(TriangleError::OutOfRange(
            "continued fraction value overflows".into(),
        )),
    }
}

fn eval_raw(entries: &[i64]) -> Result<(i128, i128), TriangleError> {
    if entries.is_empty() {
        return Err(TriangleError::EmptyExpansion);
    }
    let (mut num, mut den): (i128, i128) = (*entries.last().unwrap() as i128, 1);
    for &a in entries[..entries.len() - 1].iter().rev() {
        if num == 0 {
            return Err(TriangleError::DivisionByZero);
        }
        (num, den) = (a as i128 * num - den, num);
    }
    let g = gcd(num.unsigned_abs() as u64, den.unsigned_abs() as u64).max(1) as i128;
    let sign = if den < 0 { -1 } else { 1 };
    Ok((sign * num / g, sign * den / g))
}

/// Decompose a suture slope into the two slopes of its bypass triangle.
/// After a consistent choice of signs the outputs satisfy the mediant
/// identities x₁ = x₂ + x₃, y₁ = y₂ + y₃, and |x₂y₃ − x₃y₂| = 1.
pub fn bypass_decompose(s1: &Slope) -> (Slope, Slope) {
    match (s1.x, s1.y) {
        // Meridian 1/0 and longitude 0/1 (in y/x notation) are the two
        // seeds of the recursion.
        (0, 1) => (Slope::longitude(), Slope { x: -1, y: 1 }),
        (1, 0) => (Slope { x: -1, y: 1 }, Slope::longitude()),
        (-1, 1) => (Slope::meridian(), Slope::longitude()),
        (x, y) if x < 0 && y > -x => decompose_fundamental(x, y),
        (x, y) if x > 0 && y >= x => {
            // Reflect into the left half-plane, decompose, reflect back.
            let (a, b) = bypass_decompose(&Slope::reduce(-x, y));
            (Slope::reduce(-a.x, a.y), Slope::reduce(-b.x, b.y))
        }
        (x, y) if x > 0 => {
            // x > y > 0: rotate (x, y) -> (-y, x), whose ratio lands in the
            // fundamental domain; undo with the inverse rotation.
            let (a, b) = bypass_decompose(&Slope::reduce(-y, x));
            (Slope::reduce(a.y, -a.x), Slope::reduce(b.y, -b.x))
        }
        (x, y) => {
            // x < 0 < y < -x: rotate the other way and recurse.
            debug_assert!(x < 0 && y < -x);
            let (a, b) = bypass_decompose(&Slope::reduce(-y, x));
            (Slope::reduce(a.y, -a.x), Slope::reduce(b.y, -b.x))
        }
    }
}

/// The core case y > −x > 0: take the continued fraction of −y/z with
/// z = −x; the two neighbors are drop-the-last-entry and
/// increment-the-last-entry (contracting a trailing −1 into its
/// predecessor). An emptied expansion stands for the meridian.
fn decompose_fundamental(x: i64, y: i64) -> (Slope, Slope) {
    let z = -x;
    let f = ncf(y, z).expect("fundamental-domain slope is coprime and in range");
    let entries = f.entries();

    let s2 = if entries.len() == 1 {
        Slope::meridian()
    } else {
        slope_of_value(&entries[..entries.len() - 1])
    };

    let mut inc = entries.to_vec();
    *inc.last_mut().unwrap() += 1;
    if inc.len() > 1 && *inc.last().unwrap() == -1 {
        inc.pop();
        *inc.last_mut().unwrap() += 1;
    }
    let s3 = slope_of_value(&inc);
    (s2, s3)
}

fn slope_of_value(entries: &[i64]) -> Slope {
    let (num, den) = ncf_eval(entries).expect("neighbor expansion evaluates");
    // num/den = -y/z with the slope being y/(-z) in y/x notation.
    Slope::reduce(den * num.signum(), num.abs())
}

/// χ of the solid torus with suture slope (x, y): 0 at y = 0, −1 at y = 1,
/// and otherwise the sum over the bypass triangle. The closed form −y is
/// checked at every level and a disagreement is reported as an error rather
/// than silently ignored.
pub fn unknot_chi(s: &Slope) -> Result<i64, TriangleError> {
    let value = match s.y {
        0 => 0,
        1 => -1,
        _ => {
            let (s2, s3) = bypass_decompose(s);
            unknot_chi(&s2)? + unknot_chi(&s3)?
        }
    };
    if value != -s.y {
        return Err(TriangleError::RecursionMismatch {
            x: s.x,
            y: s.y,
            recursion: value,
            closed: -s.y,
        });
    }
    Ok(value)
}

/// Which of the three maps in a surgery triangle is odd, given the three
/// intersection numbers γ_i·δ. A zero at position i makes f_{i−1} odd;
/// otherwise the unique cyclically adjacent pair with matching signs marks
/// the odd map.
pub fn surgery_parity(dots: [i64; 3]) -> Result<usize, TriangleError> {
    let zeros: Vec<usize> = (0..3).filter(|&i| dots[i] == 0).collect();
    match zeros.len() {
        0 => {
            let matches: Vec<usize> = (0..3)
                .filter(|&j| dots[j].signum() == dots[(j + 1) % 3].signum())
                .collect();
            match matches.as_slice() {
                [j] => Ok(j + 1),
                _ => Err(TriangleError::AmbiguousInput),
            }
        }
        1 => Ok((zeros[0] + 2) % 3 + 1), // f_{i-1}, with 1-based wraparound
        _ => Err(TriangleError::AmbiguousInput),
    }
}

/// Position of the odd map among f₁, f₂, f₃, or the degenerate case where
/// all three are odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OddPosition {
    One,
    Two,
    Three,
    AllOdd,
}

impl OddPosition {
    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(OddPosition::One),
            2 => Some(OddPosition::Two),
            3 => Some(OddPosition::Three),
            _ => None,
        }
    }
}

/// The three Euler characteristics around an exact triangle, with possibly
/// one unknown, and the parity datum selecting which relation holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleChi {
    pub chis: [Option<i64>; 3],
    pub odd_position: OddPosition,
}

/// Fill in the single missing characteristic. With all maps odd the three
/// values sum to zero; with f_i odd the relation is
/// χ(Y_{i−1}) = χ(Y_i) + χ(Y_{i+1}) (indices cyclic).
pub fn triangle_solve(t: &TriangleChi) -> Result<i64, TriangleError> {
    let unknowns: Vec<usize> = (0..3).filter(|&i| t.chis[i].is_none()).collect();
    let missing = match unknowns.as_slice() {
        [] => return Err(TriangleError::Overdetermined),
        [i] => *i,
        _ => return Err(TriangleError::Underdetermined),
    };
    // Encode each relation as coefficients c with c·(χ₁,χ₂,χ₃) = 0.
    let coeffs: [i64; 3] = match t.odd_position {
        OddPosition::AllOdd => [1, 1, 1],
        OddPosition::One => [1, 1, -1],   // χ₃ = χ₁ + χ₂
        OddPosition::Two => [-1, 1, 1],   // χ₁ = χ₂ + χ₃
        OddPosition::Three => [1, -1, 1], // χ₂ = χ₃ + χ₁
    };
    let known_sum: i64 = (0..3)
        .filter(|&i| i != missing)
        .map(|i| coeffs[i] * t.chis[i].unwrap())
        .sum();
    Ok(-known_sum / coeffs[missing])
}

/// Topological invariants of a cobordism W from Y_in to Y_out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CobordismInvariants {
    pub euler_char: i64,
    pub signature: i64,
    pub b1_in: i64,
    pub b1_out: i64,
    pub b0_in: i64,
    pub b0_out: i64,
}

/// The mod-2 degree ½(χ(W) + σ(W) + b₁(Y_out) − b₁(Y_in) + b₀(Y_out) −
/// b₀(Y_in)) of the induced map. The sum inside must be even.
pub fn cobordism_degree(c: &CobordismInvariants) -> Result<u8, TriangleError> {
    let sum = c.euler_char + c.signature + (c.b1_out - c.b1_in) + (c.b0_out - c.b0_in);
    if sum.rem_euclid(2) != 0 {
        return Err(TriangleError::NonIntegralDegree(sum));
    }
    Ok((sum / 2).rem_euclid(2) as u8)
}
