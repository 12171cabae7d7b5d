//! Small numeric helpers shared across modules: compensated summation,
//! fixed-shape tree reduction, and bit-exact f64 round-tripping for caches.

/// Kahan–Babuska compensated accumulator.
///
/// Running error stays O(eps) independent of term count, which both tightens
/// quadrature sums and keeps sweep partials reproducible to the last bit.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums a slice by recursive halving, so the association tree depends only on
/// the slice length. Shard partials merged this way are bit-identical no
/// matter how many workers produced them.
pub fn tree_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let mid = n / 2;
            tree_sum(&xs[..mid]) + tree_sum(&xs[mid..])
        }
    }
}

/// Lossless f64 -> text for cache files; `f64_from_bits_hex` inverts exactly.
pub fn f64_to_bits_hex(x: f64) -> String {
    format!("{:016x}", x.to_bits())
}

pub fn f64_from_bits_hex(s: &str) -> Option<f64> {
    if s.len() != 16 {
        return None;
    }
    u64::from_str_radix(s, 16).ok().map(f64::from_bits)
}

/// Relative gap |a-b| / max(|a|,|b|,floor); the floor guards near-zero pairs.
pub fn rel_gap(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_ill_conditioned_sum() {
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
        }
        let naive = {
            let mut s = 1.0f64;
            for _ in 0..10_000 {
                s += 1e-16;
            }
            s
        };
        let exact = 1.0 + 1e-12;
        assert!((k.value() - exact).abs() < 1e-15);
        // the naive path loses every small increment here
        assert_eq!(naive, 1.0);
    }

    #[test]
    fn tree_sum_matches_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
        assert_eq!(tree_sum(&xs), 500_500.0);
    }

    #[test]
    fn f64_hex_roundtrip_is_exact() {
        for &x in &[0.0, -0.0, 1.5, -3.25e-300, f64::MAX, std::f64::consts::PI] {
            let s = f64_to_bits_hex(x);
            let y = f64_from_bits_hex(&s).unwrap();
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(f64_from_bits_hex("xyz"), None);
    }
}
