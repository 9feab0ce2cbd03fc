use std::fmt::Write as _;

/// Fixed-width histogram over `[lo, hi)`. Out-of-range samples are counted
/// separately and do not appear in any bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    lo_bits: u64,
    hi_bits: u64,
    counts: Vec<u64>,
    outside: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(hi > lo && bins > 0);
        Histogram {
            lo_bits: lo.to_bits(),
            hi_bits: hi.to_bits(),
            counts: vec![0; bins],
            outside: 0,
        }
    }

    pub fn lo(&self) -> f64 {
        f64::from_bits(self.lo_bits)
    }

    pub fn hi(&self) -> f64 {
        f64::from_bits(self.hi_bits)
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi() - self.lo()) / self.counts.len() as f64
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let (lo, hi) = (self.lo(), self.hi());
        if !(v >= lo && v < hi) {
            self.outside += 1;
            return;
        }
        let n = self.counts.len();
        let i = ((v - lo) / (hi - lo) * n as f64) as usize;
        self.counts[i.min(n - 1)] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(
            (self.lo_bits, self.hi_bits, self.counts.len()),
            (other.lo_bits, other.hi_bits, other.counts.len()),
            "merging histograms with different binning"
        );
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.outside += other.outside;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn outside(&self) -> u64 {
        self.outside
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.outside
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        let w = self.bin_width();
        let lo = self.lo();
        (0..self.counts.len()).map(move |i| lo + (i as f64 + 0.5) * w)
    }

    /// `bin_center count` table with a one-line header.
    pub fn to_table(&self, header: &str) -> String {
        let mut s = format!("# {header}\n");
        if self.total() == 0 {
            return s;
        }
        for (c, n) in self.centers().zip(&self.counts) {
            let _ = writeln!(s, "{c} {n}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning_and_merge() {
        let mut h = Histogram::new(0.0, 1.0, 4);
        for v in [0.0, 0.1, 0.26, 0.99, 1.0, -0.1, f64::NAN] {
            h.add(v);
        }
        assert_eq!(h.counts(), &[2, 1, 0, 1]);
        assert_eq!(h.outside(), 3);
        let mut g = Histogram::new(0.0, 1.0, 4);
        g.add(0.6);
        h.merge(&g);
        assert_eq!(h.counts(), &[2, 1, 1, 1]);
        assert_eq!(h.centers().collect::<Vec<_>>(), vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn empty_table_is_header_only() {
        let h = Histogram::new(0.0, 1.0, 4);
        assert_eq!(h.to_table("x count"), "# x count\n");
    }
}
