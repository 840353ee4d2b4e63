use std::fmt;

use super::GroupError;

/// A bijection of `{0..n-1}`. Composition follows function composition:
/// `(g * h)(x) = g(h(x))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(GroupError::NotABijection);
            }
            seen[x] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(degree: usize) -> Self {
        Self((0..degree as u32).collect())
    }

    /// Builds a permutation from disjoint cycles on `degree` points.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self, GroupError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a as usize >= degree || b as usize >= degree || touched[a as usize] {
                    return Err(GroupError::NotABijection);
                }
                touched[a as usize] = true;
                images[a as usize] = b;
            }
        }
        Self::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self(rhs.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Self(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(x, &y)| *x as u32 == y).count()
    }

    /// `true` for even permutations.
    pub fn is_even(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            transpositions += len - 1;
        }
        transpositions % 2 == 0
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// An invertible square matrix over the prime field `Z/pZ`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrimeMatrix {
    p: u32,
    n: usize,
    entries: Vec<u32>,
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a as u64, p as u64 - 2, p as u64) as u32
}

impl PrimeMatrix {
    /// Rows may hold negative entries; they are reduced mod `p`.
    pub fn new(p: u32, rows: &[Vec<i64>]) -> Result<Self, GroupError> {
        if !is_prime(p as u64) {
            return Err(GroupError::NotPrime(p as u64));
        }
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(GroupError::NotSquare);
        }
        let entries = rows.iter().flatten().map(|&x| x.rem_euclid(p as i64) as u32).collect();
        let m = Self { p, n, entries };
        if m.determinant() == 0 {
            return Err(GroupError::Singular);
        }
        Ok(m)
    }

    pub fn identity(n: usize, p: u32) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Self { p, n, entries }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (n, p) = (self.n, self.p as u64);
        let mut entries = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u64;
                for k in 0..n {
                    acc += self.get(i, k) as u64 * rhs.get(k, j) as u64;
                }
                entries[i * n + j] = (acc % p) as u32;
            }
        }
        Self { p: self.p, n, entries }
    }

    /// Applies the matrix to a column vector mod `p`.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        (0..self.n)
            .map(|i| {
                let acc: u64 = (0..self.n).map(|k| self.get(i, k) as u64 * v[k] as u64).sum();
                (acc % p) as u32
            })
            .collect()
    }

    pub fn determinant(&self) -> u32 {
        let (n, p) = (self.n, self.p as u64);
        let mut a: Vec<u64> = self.entries.iter().map(|&x| x as u64).collect();
        let mut det = 1u64;
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = (p - det) % p;
            }
            let pv = a[col * n + col];
            det = det * pv % p;
            let pinv = pow_mod(pv, p - 2, p);
            for r in col + 1..n {
                let f = a[r * n + col] * pinv % p;
                if f == 0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = (a[r * n + j] + p * p - f * a[col * n + j]) % p;
                }
            }
        }
        det as u32
    }

    pub fn inverse(&self) -> Self {
        let (n, p) = (self.n, self.p as u64);
        let mut a: Vec<u64> = self.entries.iter().map(|&x| x as u64).collect();
        let mut inv: Vec<u64> = Self::identity(n, self.p).entries.iter().map(|&x| x as u64).collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a[r * n + col] != 0)
                .expect("matrix payloads are invertible");
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
                inv.swap(pivot * n + j, col * n + j);
            }
            let pinv = pow_mod(a[col * n + col], p - 2, p);
            for j in 0..n {
                a[col * n + j] = a[col * n + j] * pinv % p;
                inv[col * n + j] = inv[col * n + j] * pinv % p;
            }
            for r in 0..n {
                if r == col || a[r * n + col] == 0 {
                    continue;
                }
                let f = a[r * n + col];
                for j in 0..n {
                    a[r * n + j] = (a[r * n + j] + p - f * a[col * n + j] % p) % p;
                    inv[r * n + j] = (inv[r * n + j] + p - f * inv[col * n + j] % p) % p;
                }
            }
        }
        Self {
            p: self.p,
            n,
            entries: inv.into_iter().map(|x| x as u32).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.p)
    }
}

impl fmt::Debug for PrimeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[u32]> = self.entries.chunks(self.n).collect();
        write!(f, "Mat{:?} mod {}", rows, self.p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Perm { degree: usize },
    Matrix { size: usize, modulus: u32 },
    Pair(Box<(ElementKind, ElementKind)>),
}

/// An element of a concrete finite group.
///
/// Pairs realize elements of direct products; their coordinates stay
/// directly accessible.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Perm(Permutation),
    Matrix(PrimeMatrix),
    Pair(Box<(GroupElement, GroupElement)>),
}

impl GroupElement {
    pub fn pair(a: GroupElement, b: GroupElement) -> Self {
        Self::Pair(Box::new((a, b)))
    }

    pub fn kind(&self) -> ElementKind {
        match self {
            Self::Perm(p) => ElementKind::Perm { degree: p.degree() },
            Self::Matrix(m) => ElementKind::Matrix {
                size: m.size(),
                modulus: m.modulus(),
            },
            Self::Pair(pair) => ElementKind::Pair(Box::new((pair.0.kind(), pair.1.kind()))),
        }
    }

    /// Product `self * rhs`. Panics on incompatible kinds; callers validate
    /// kinds up front.
    pub fn mul(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Self::Perm(a), Self::Perm(b)) => Self::Perm(a.compose(b)),
            (Self::Matrix(a), Self::Matrix(b)) => Self::Matrix(a.mul(b)),
            (Self::Pair(a), Self::Pair(b)) => Self::pair(a.0.mul(&b.0), a.1.mul(&b.1)),
            _ => panic!("multiplying group elements of different kinds"),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Self::Perm(a) => Self::Perm(a.inverse()),
            Self::Matrix(a) => Self::Matrix(a.inverse()),
            Self::Pair(a) => Self::pair(a.0.inverse(), a.1.inverse()),
        }
    }

    pub fn identity_like(&self) -> Self {
        match self {
            Self::Perm(a) => Self::Perm(Permutation::identity(a.degree())),
            Self::Matrix(a) => Self::Matrix(PrimeMatrix::identity(a.size(), a.modulus())),
            Self::Pair(a) => Self::pair(a.0.identity_like(), a.1.identity_like()),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Self::Perm(a) => a.is_identity(),
            Self::Matrix(a) => a.is_identity(),
            Self::Pair(a) => a.0.is_identity() && a.1.is_identity(),
        }
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = self.identity_like();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// Coordinate `0` or `1` of a pair element.
    pub fn coordinate(&self, coordinate: usize) -> Option<&GroupElement> {
        match (self, coordinate) {
            (Self::Pair(p), 0) => Some(&p.0),
            (Self::Pair(p), 1) => Some(&p.1),
            _ => None,
        }
    }

    pub fn as_perm(&self) -> Option<&Permutation> {
        match self {
            Self::Perm(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&PrimeMatrix> {
        match self {
            Self::Matrix(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Perm(p) => p.fmt(f),
            Self::Matrix(m) => m.fmt(f),
            Self::Pair(p) => write!(f, "({:?}, {:?})", p.0, p.1),
        }
    }
}

impl From<Permutation> for GroupElement {
    fn from(p: Permutation) -> Self {
        Self::Perm(p)
    }
}

impl From<PrimeMatrix> for GroupElement {
    fn from(m: PrimeMatrix) -> Self {
        Self::Matrix(m)
    }
}
