/// Exact integral of the sawtooth `t − u(t)`.
///
/// Between deliveries the age grows with slope one, so the area over
/// `[a, b]` is `((b − u)² − (a − u)²)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeIntegrator {
    newest_generation: f64,
    integrated_to: f64,
    area: f64,
}

impl AgeIntegrator {
    /// Starts at `t = 0` with a phantom delivery generated at time zero.
    pub fn new() -> Self {
        AgeIntegrator {
            newest_generation: 0.0,
            integrated_to: 0.0,
            area: 0.0,
        }
    }

    pub fn advance_to(&mut self, t: f64) {
        // slot ends and frame starts may differ by an ulp
        debug_assert!(t >= self.integrated_to - 1e-9 * self.integrated_to.max(1.0));
        let t = t.max(self.integrated_to);
        let u = self.newest_generation;
        let (a, b) = (self.integrated_to - u, t - u);
        self.area += (b - a) * (b + a) / 2.0;
        self.integrated_to = t;
    }

    /// Records a delivery at time `t` of an update generated at `generation`.
    pub fn deliver(&mut self, t: f64, generation: f64) {
        self.advance_to(t);
        debug_assert!(generation > self.newest_generation || generation == 0.0);
        self.newest_generation = generation;
    }

    /// Discards the area accumulated so far.
    pub fn reset_area(&mut self) {
        self.area = 0.0;
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// `u(t)`: generation time of the newest delivered update.
    pub fn newest_generation(&self) -> f64 {
        self.newest_generation
    }

    pub fn age_at(&self, t: f64) -> f64 {
        t - self.newest_generation
    }
}

impl Default for AgeIntegrator {
    fn default() -> Self {
        Self::new()
    }
}
