//! Exact arithmetic in `Q(ζ_N)`, power basis modulo the cyclotomic polynomial.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

struct Tables {
    /// Monic `Φ_N`, low degree first.
    phi: Vec<BigInt>,
    /// `x^j mod Φ_N` for `j < N`.
    powers: Vec<Vec<BigInt>>,
}

fn poly_divexact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd].clone();
        if !c.is_zero() {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            q[i] = c;
        }
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()));
    q
}

fn build(n: u32) -> Tables {
    let mut phi: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    phi[0] = -BigInt::one();
    phi[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            phi = poly_divexact(&phi, &tables(d).phi);
        }
    }
    let deg = phi.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![BigInt::zero(); deg];
    cur[0] = BigInt::one();
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x and reduce
        let top = cur[deg - 1].clone();
        let mut next = vec![BigInt::zero(); deg];
        for i in (1..deg).rev() {
            next[i] = cur[i - 1].clone();
        }
        if !top.is_zero() {
            for i in 0..deg {
                next[i] -= &top * &phi[i];
            }
        }
        cur = next;
    }
    Tables { phi, powers }
}

fn tables(n: u32) -> Arc<Tables> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Tables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return t.clone();
    }
    let t = Arc::new(build(n));
    cache.lock().unwrap().entry(n).or_insert(t).clone()
}

/// Euler's totient.
pub fn totient(n: u32) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    /// Coordinates in the basis `1, ζ, …, ζ^{φ(N)-1}`.
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(order: u32) -> Self {
        Cyclotomic {
            order,
            coeffs: vec![BigRational::zero(); totient(order)],
        }
    }

    pub fn from_rational(order: u32, q: BigRational) -> Self {
        let mut c = Self::zero(order);
        c.coeffs[0] = q;
        c
    }

    pub fn from_int(order: u32, k: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(k)))
    }

    pub fn one(order: u32) -> Self {
        Self::from_int(order, 1)
    }

    /// `ζ_N^k`.
    pub fn zeta_pow(order: u32, k: i64) -> Self {
        let t = tables(order);
        let j = k.rem_euclid(order as i64) as usize;
        Cyclotomic {
            order,
            coeffs: t.powers[j]
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..]
            .iter()
            .all(|c| c.is_zero())
            .then(|| &self.coeffs[0])
    }

    /// Re-expresses the element in `Q(ζ_M)` for a multiple `M` of the order.
    pub fn lift(&self, m: u32) -> Self {
        if m == self.order {
            return self.clone();
        }
        assert_eq!(
            m % self.order,
            0,
            "can only lift to a multiple of the order"
        );
        let t = tables(m);
        let step = (m / self.order) as usize;
        let mut out = Self::zero(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, p) in t.powers[i * step].iter().enumerate() {
                if !p.is_zero() {
                    out.coeffs[k] += c * BigRational::from_integer(p.clone());
                }
            }
        }
        out
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            (a.clone(), b.clone())
        } else {
            let m = a.order.lcm(&b.order);
            (a.lift(m), b.lift(m))
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.order == other.order {
            let coeffs = self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect();
            return Cyclotomic {
                order: self.order,
                coeffs,
            };
        }
        let (a, b) = Self::common(self, other);
        a.add(&b)
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.order != other.order {
            let (a, b) = Self::common(self, other);
            return a.mul(&b);
        }
        let d = self.coeffs.len();
        if d == 1 {
            return Cyclotomic {
                order: self.order,
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            };
        }
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let t = tables(self.order);
        for i in (d..prod.len()).rev() {
            let c = std::mem::take(&mut prod[i]);
            if c.is_zero() {
                continue;
            }
            for (k, p) in t.phi[..d].iter().enumerate() {
                if !p.is_zero() {
                    prod[i - d + k] -= &c * BigRational::from_integer(p.clone());
                }
            }
        }
        prod.truncate(d);
        Cyclotomic {
            order: self.order,
            coeffs: prod,
        }
    }

    /// Multiplicative inverse, by solving `self · x = 1` in the power basis.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.coeffs.len();
        if d == 1 {
            return Some(Cyclotomic {
                order: self.order,
                coeffs: vec![self.coeffs[0].recip()],
            });
        }
        // column j = self * ζ^j
        let cols: Vec<Cyclotomic> = (0..d)
            .map(|j| self.mul(&Cyclotomic::zeta_pow(self.order, j as i64)))
            .collect();
        let mut aug: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = cols.iter().map(|c| c.coeffs[i].clone()).collect();
                row.push(if i == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        for c in 0..d {
            let p = (c..d).find(|&i| !aug[i][c].is_zero())?;
            aug.swap(c, p);
            let piv = aug[c][c].clone();
            for x in aug[c].iter_mut() {
                *x = &*x / &piv;
            }
            for i in 0..d {
                if i != c && !aug[i][c].is_zero() {
                    let f = aug[i][c].clone();
                    for j in 0..=d {
                        let t = &aug[c][j] * &f;
                        aug[i][j] -= t;
                    }
                }
            }
        }
        Some(Cyclotomic {
            order: self.order,
            coeffs: aug.into_iter().map(|r| r[d].clone()).collect(),
        })
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            self.coeffs == other.coeffs
        } else {
            let (a, b) = Self::common(self, other);
            a.coeffs == b.coeffs
        }
    }
}

impl Eq for Cyclotomic {}
