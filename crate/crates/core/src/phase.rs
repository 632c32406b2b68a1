use num_complex::Complex64;

/// Steps `exp(i * n * angle)` for n = 0, 1, 2, ... by complex rotation,
/// re-anchoring to an exact `sin_cos` every `RESYNC` steps so the rounding
/// drift stays bounded independently of how long the walk runs.
pub(crate) struct PhaseWalker {
    angle: f64,
    step: Complex64,
    current: Complex64,
    n: u64,
}

const RESYNC: u64 = 64;

impl PhaseWalker {
    pub(crate) fn new(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            angle,
            step: Complex64::new(c, s),
            current: Complex64::new(1.0, 0.0),
            n: 0,
        }
    }

    /// Current value `exp(i * n * angle)`.
    #[inline]
    pub(crate) fn value(&self) -> Complex64 {
        self.current
    }

    #[inline]
    pub(crate) fn advance(&mut self) {
        self.n += 1;
        if self.n.is_multiple_of(RESYNC) {
            let (s, c) = (self.angle * self.n as f64).sin_cos();
            self.current = Complex64::new(c, s);
        } else {
            self.current *= self.step;
        }
    }
}
