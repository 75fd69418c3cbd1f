use serde::{Deserialize, Serialize};

use super::SimError;
use crate::gc::LABEL_BITS;
use crate::scheduler::Policy;
use crate::Scalar;

/// Overlay timing parameters. Times are in nanoseconds, clocks in hertz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TimingParams<T> {
    /// Clock of the garbling cells and BRAM.
    pub local_clock_hz: T,
    /// Host interface clock. Reported only; the link cost is `reg_write_ns`.
    pub main_clock_hz: T,
    pub gand_latency_cycles: u32,
    pub gxor_latency_cycles: u32,
    pub bram_access_cycles: u32,
    pub ddr_latency_ns: T,
    /// Cost of one host register write.
    pub reg_write_ns: T,
    pub ddr_word_bits: u32,
    pub ddr_ports: u32,
    pub n_and_cells: u32,
    pub n_xor_cells: u32,
}

impl<T: Scalar> Default for TimingParams<T> {
    fn default() -> Self {
        TimingParams {
            local_clock_hz: T::from_count(200_000_000),
            main_clock_hz: T::from_count(300_000_000),
            gand_latency_cycles: 82,
            gxor_latency_cycles: 1,
            bram_access_cycles: 1,
            ddr_latency_ns: T::from_count(180),
            reg_write_ns: T::from_count(50),
            ddr_word_bits: 512,
            ddr_ports: 2,
            n_and_cells: 10,
            n_xor_cells: 10,
        }
    }
}

impl<T: Scalar> TimingParams<T> {
    pub fn validate(&self) -> Result<(), SimError> {
        let zero = T::zero();
        let positive = [
            ("local_clock_hz", self.local_clock_hz > zero),
            ("main_clock_hz", self.main_clock_hz > zero),
            ("ddr_latency_ns", self.ddr_latency_ns > zero),
            ("reg_write_ns", self.reg_write_ns > zero),
            ("gand_latency_cycles", self.gand_latency_cycles > 0),
            ("gxor_latency_cycles", self.gxor_latency_cycles > 0),
            ("bram_access_cycles", self.bram_access_cycles > 0),
            ("ddr_ports", self.ddr_ports > 0),
            ("n_and_cells", self.n_and_cells > 0),
            ("n_xor_cells", self.n_xor_cells > 0),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, ok)| !ok) {
            return Err(SimError::Config(format!("{name} must be positive")));
        }
        if self.labels_per_ddr_word() == 0 {
            return Err(SimError::Config("ddr_word_bits must hold at least one label".into()));
        }
        Ok(())
    }

    /// Local clock period in nanoseconds.
    pub fn period_ns(&self) -> T {
        T::from_count(1_000_000_000) / self.local_clock_hz
    }

    pub fn cycles_ns(&self, cycles: u32) -> T {
        T::from_count(u64::from(cycles)) * self.period_ns()
    }

    pub fn labels_per_ddr_word(&self) -> u32 {
        self.ddr_word_bits / LABEL_BITS as u32
    }

    /// Host link time for one gate descriptor.
    pub fn link_ns(&self, packed: bool) -> T {
        T::from_count(if packed { 2 } else { 3 }) * self.reg_write_ns
    }
}

/// Optimizations and memory policy for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Cells start on a gate as soon as its own descriptor has arrived
    /// rather than after the whole dispatch unit.
    pub overlap: bool,
    /// Stream each layer's XOR gates without waiting for completion, when
    /// the link is slower than an XOR cell.
    pub xor_nosync: bool,
    /// Two register writes per gate instead of three.
    pub packed: bool,
    pub policy: Policy,
    /// BRAM label slots; `None` uses the policy default.
    pub bram_capacity: Option<usize>,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { overlap: false, xor_nosync: false, packed: false, policy: Policy::AllDdr, bram_capacity: None }
    }
}

impl SimOptions {
    pub fn capacity(&self) -> usize {
        self.bram_capacity.unwrap_or_else(|| self.policy.default_capacity())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ExactTime;

    #[test]
    fn defaults() {
        let p = TimingParams::<f64>::default();
        p.validate().unwrap();
        assert_eq!(p.period_ns(), 5.0);
        assert_eq!(p.labels_per_ddr_word(), 6);
        assert_eq!(p.link_ns(false), 150.0);
        let q = TimingParams::<ExactTime>::default();
        assert_eq!(q.cycles_ns(82), ExactTime::from_integer(410));
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = TimingParams::<f64>::default();
        p.ddr_ports = 0;
        assert!(p.validate().is_err());
        let mut p = TimingParams::<f64>::default();
        p.ddr_word_bits = 64;
        assert!(p.validate().is_err());
        let mut p = TimingParams::<f64>::default();
        p.reg_write_ns = -1.0;
        assert!(p.validate().is_err());
    }
}
