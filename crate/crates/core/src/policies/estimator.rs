/// Pull counts and running reward sums per arm.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorTable {
    pulls: Vec<u64>,
    sums: Vec<f64>,
    num_objectives: usize,
    total: u64,
}

impl EstimatorTable {
    pub fn new(num_arms: usize, num_objectives: usize) -> Self {
        Self {
            pulls: vec![0; num_arms],
            sums: vec![0.0; num_arms * num_objectives],
            num_objectives,
            total: 0,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn observe(&mut self, arm: usize, reward: &[f64]) {
        debug_assert_eq!(reward.len(), self.num_objectives);
        self.pulls[arm] += 1;
        self.total += 1;
        let row = &mut self.sums[arm * self.num_objectives..(arm + 1) * self.num_objectives];
        for (s, r) in row.iter_mut().zip(reward) {
            *s += r;
        }
    }

    #[inline]
    pub fn pulls(&self, arm: usize) -> u64 {
        self.pulls[arm]
    }

    pub fn all_pulls(&self) -> &[u64] {
        &self.pulls
    }

    /// Number of `observe` calls so far.
    pub fn total_pulls(&self) -> u64 {
        self.total
    }

    /// Sample mean, or 0 for an arm that was never pulled.
    #[inline]
    pub fn mean(&self, arm: usize, objective: usize) -> f64 {
        match self.pulls[arm] {
            0 => 0.0,
            n => self.sums[arm * self.num_objectives + objective] / n as f64,
        }
    }

    pub fn reward_sum(&self, arm: usize, objective: usize) -> f64 {
        self.sums[arm * self.num_objectives + objective]
    }
}
