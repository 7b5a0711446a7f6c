//! Arithmetic in GF(2^5) and minimal polynomials over GF(2).

/// GF(2^5) defined by a primitive polynomial, with exp/log tables.
#[derive(Debug, Clone)]
pub struct Gf32 {
    exp: [u8; 62],
    log: [u8; 32],
}

impl Gf32 {
    pub const ORDER: usize = 31;

    /// `poly` holds the degree-5 primitive polynomial with bit `i` = coefficient
    /// of `x^i`, e.g. `0b100101` for `x^5 + x^2 + 1`.
    pub fn new(poly: u32) -> Self {
        assert_eq!(poly >> 5, 1, "field polynomial must have degree 5");
        let mut exp = [0u8; 62];
        let mut log = [0u8; 32];
        let mut x: u32 = 1;
        for i in 0..Self::ORDER {
            exp[i] = x as u8;
            exp[i + Self::ORDER] = x as u8;
            assert!(log[x as usize] == 0 || x == 1 && i == 0, "polynomial is not primitive");
            log[x as usize] = i as u8;
            x <<= 1;
            if x & 0b100000 != 0 {
                x ^= poly;
            }
        }
        assert_eq!(x, 1, "polynomial is not primitive");
        Self { exp, log }
    }

    /// `α^e`.
    pub fn pow_alpha(&self, e: usize) -> u8 {
        self.exp[e % Self::ORDER]
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    /// Cyclotomic coset of `e` modulo 31 under doubling.
    pub fn cyclotomic_coset(e: usize) -> Vec<usize> {
        let mut coset = vec![e % Self::ORDER];
        let mut x = (2 * e) % Self::ORDER;
        while x != coset[0] {
            coset.push(x);
            x = (2 * x) % Self::ORDER;
        }
        coset
    }

    /// Minimal polynomial of `α^e` over GF(2), packed with bit `i` = coefficient
    /// of `x^i`. Computed as `∏ (x - α^c)` over the cyclotomic coset of `e`.
    pub fn minimal_polynomial(&self, e: usize) -> u64 {
        // Coefficients in GF(32), lowest degree first.
        let mut poly: Vec<u8> = vec![1];
        for c in Self::cyclotomic_coset(e) {
            let root = self.pow_alpha(c);
            let mut next = vec![0u8; poly.len() + 1];
            for (i, &a) in poly.iter().enumerate() {
                next[i + 1] ^= a;
                next[i] ^= self.mul(a, root);
            }
            poly = next;
        }
        poly.iter().enumerate().fold(0u64, |acc, (i, &a)| {
            assert!(a <= 1, "minimal polynomial coefficient outside GF(2)");
            acc | (u64::from(a) << i)
        })
    }

    /// Evaluates a GF(2)-coefficient polynomial at `α^e`.
    pub fn eval_at_alpha_pow(&self, poly: u64, e: usize) -> u8 {
        let mut acc = 0u8;
        let mut bits = poly;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            acc ^= self.pow_alpha(i * e);
            bits &= bits - 1;
        }
        acc
    }
}

/// Carry-less product of two GF(2) polynomials.
pub fn poly_mul(a: u64, b: u64) -> u64 {
    let mut acc = 0;
    let mut bits = b;
    while bits != 0 {
        let i = bits.trailing_zeros();
        acc ^= a << i;
        bits &= bits - 1;
    }
    acc
}

/// Remainder of `a` modulo `m` over GF(2).
pub fn poly_rem(mut a: u64, m: u64) -> u64 {
    assert!(m != 0);
    let dm = 63 - m.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= dm {
        let shift = (63 - a.leading_zeros()) - dm;
        a ^= m << shift;
    }
    a
}

pub fn degree(p: u64) -> usize {
    assert!(p != 0);
    (63 - p.leading_zeros()) as usize
}
