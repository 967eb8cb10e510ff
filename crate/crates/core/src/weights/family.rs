//! The finite interval family over which `A_p` and BMO suprema are taken.

use super::ap::Interval;

/// Dyadic scales `2^k` for `k` in `scales`, with translates near every
/// anchor, asymmetric intervals straddling each anchor, an even spread of
/// translates across the core, and geometric tail intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalFamily {
    pub scales: std::ops::RangeInclusive<i32>,
    /// Dyadic translates kept on each side of an anchor.
    pub near_anchor: i64,
    /// Evenly spread dyadic translates per scale over the core.
    pub spread: usize,
    /// Straddling intervals `[c - r h, c + h]` use `r = j/ratio_steps`.
    pub ratio_steps: u32,
    /// Tail intervals `[R 2^j, R 2^{j+1}]` for `j < tail_octaves`.
    pub tail_octaves: i32,
}

impl Default for IntervalFamily {
    fn default() -> Self {
        Self { scales: -20..=20, near_anchor: 4, spread: 64, ratio_steps: 16, tail_octaves: 21 }
    }
}

impl IntervalFamily {
    /// A lighter family for repeated probes inside larger checks.
    pub fn coarse() -> Self {
        Self { scales: -16..=16, near_anchor: 2, spread: 24, ratio_steps: 8, tail_octaves: 12 }
    }

    pub fn intervals(&self, core_radius: f64, anchors: &[f64]) -> Vec<Interval> {
        let r = core_radius;
        let mut anchors: Vec<f64> = anchors.iter().copied().filter(|a| a.abs() <= r).collect();
        anchors.push(0.0);
        anchors.sort_by(|a, b| a.total_cmp(b));
        anchors.dedup();
        let mut out = Vec::new();
        let mut push = |lo: f64, hi: f64| {
            if hi > lo && hi > -r && lo < r {
                out.push(Interval { lo, hi });
            }
        };
        for k in self.scales.clone() {
            let h = 2f64.powi(k);
            for &c in &anchors {
                let j0 = (c / h).floor() as i64;
                for j in j0 - self.near_anchor..=j0 + self.near_anchor {
                    push(j as f64 * h, (j + 1) as f64 * h);
                }
                push(c - h, c + h);
                for j in 1..self.ratio_steps {
                    let q = j as f64 / self.ratio_steps as f64;
                    push(c - q * h, c + h);
                    push(c - h, c + q * h);
                }
            }
            let jmin = (-r / h).floor() as i64;
            let jmax = (r / h).ceil() as i64 - 1;
            let count = (jmax - jmin + 1) as usize;
            if count <= self.spread {
                for j in jmin..=jmax {
                    push(j as f64 * h, (j + 1) as f64 * h);
                }
            } else {
                let step = (jmax - jmin) as f64 / (self.spread - 1) as f64;
                for i in 0..self.spread {
                    let j = jmin + (i as f64 * step).round() as i64;
                    push(j as f64 * h, (j + 1) as f64 * h);
                }
            }
        }
        for j in 0..self.tail_octaves {
            let a = r * 2f64.powi(j);
            out.push(Interval { lo: a, hi: 2.0 * a });
            out.push(Interval { lo: -2.0 * a, hi: -a });
            out.push(Interval { lo: -a, hi: a });
            out.push(Interval { lo: 0.0, hi: 2.0 * a });
            out.push(Interval { lo: -2.0 * a, hi: 0.0 });
        }
        out.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_is_sorted_unique_and_covers_anchors() {
        let f = IntervalFamily::default();
        let ivs = f.intervals(1e4, &[1.0]);
        assert!(ivs.windows(2).all(|w| (w[0].lo, w[0].hi) < (w[1].lo, w[1].hi)));
        assert!(ivs.iter().any(|i| i.lo == -1.0 / 16.0 && i.hi == 1.0));
        assert!(ivs.iter().any(|i| i.lo == 1.0 - 2f64.powi(-20) && i.hi == 1.0 + 2f64.powi(-20)));
        assert!(ivs.iter().any(|i| i.hi > 1e9));
        assert!(ivs.len() < 20_000, "{}", ivs.len());
    }

    #[test]
    fn refinement_only_adds_intervals() {
        let coarse = IntervalFamily { scales: -4..=4, near_anchor: 1, spread: 8, ratio_steps: 2, tail_octaves: 2 };
        let fine = IntervalFamily { scales: -6..=6, near_anchor: 2, spread: 8, ratio_steps: 4, tail_octaves: 4 };
        let a = coarse.intervals(100.0, &[]);
        let b = fine.intervals(100.0, &[]);
        assert!(a.iter().all(|i| b.contains(i)));
    }
}
