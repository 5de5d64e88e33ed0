//! Dense statevector simulation of the X register plus one ancilla.
//!
//! Basis state `|x>_X |y>_Y` lives at index `2x + y`: the ancilla is the
//! least significant bit, so each input owns the adjacent pair `(2x, 2x+1)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::predicate::{exact_fraction, ExactFraction, OracleTable};
use crate::width::Width;

/// Allowed deviation of the squared norm from one.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Outcomes less likely than this are not renormalized.
pub const DEGENERACY_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterSpec {
    width: Width,
}

impl RegisterSpec {
    pub fn new(k: u32) -> Result<Self> {
        Ok(RegisterSpec { width: Width::new(k)? })
    }

    pub fn width(&self) -> Width {
        self.width
    }

    /// Dimension of the joint X (x) Y space, `2^(k+1)`.
    pub fn dimension(&self) -> usize {
        (self.width.inputs() as usize) << 1
    }
}

impl From<Width> for RegisterSpec {
    fn from(width: Width) -> Self {
        RegisterSpec { width }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: Width,
    amps: Vec<Complex64>,
}

/// `2^(-k/2)`, exact for even `k`.
fn uniform_amplitude(width: Width) -> f64 {
    let k = width.get() as i32;
    let half_powers = 0.5f64.powi(k / 2);
    if k % 2 == 0 {
        half_powers
    } else {
        FRAC_1_SQRT_2 * half_powers
    }
}

impl StateVector {
    fn allocate(spec: RegisterSpec) -> Result<Self> {
        let dim = spec.dimension();
        let mut amps = Vec::new();
        amps.try_reserve_exact(dim).map_err(|_| Error::Allocation {
            bytes: dim * std::mem::size_of::<Complex64>(),
        })?;
        amps.resize(dim, Complex64::default());
        Ok(StateVector {
            width: spec.width,
            amps,
        })
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, x: u64, y: u8) -> Complex64 {
        self.amps[(x as usize) << 1 | usize::from(y & 1)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `Pr[Y = 1]`, summed over the odd indices.
    pub fn p1(&self) -> f64 {
        self.amps.iter().skip(1).step_by(2).map(|a| a.norm_sqr()).sum()
    }

    /// `Pr[Y = 0]`, summed over the even indices.
    pub fn p0(&self) -> f64 {
        self.amps.iter().step_by(2).map(|a| a.norm_sqr()).sum()
    }

    /// `sum_y |amp(x, y)|^2` for one input.
    pub fn x_marginal(&self, x: u64) -> f64 {
        self.amplitude(x, 0).norm_sqr() + self.amplitude(x, 1).norm_sqr()
    }

    fn check_norm(&self, operation: &'static str) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() <= NORM_TOLERANCE {
            Ok(())
        } else {
            Err(Error::NormalizationDrift { operation, norm })
        }
    }

    /// Re-prepares the uniform superposition in place, ancilla `|0>`.
    pub fn reset_uniform(&mut self) -> Result<()> {
        let amp = Complex64::new(uniform_amplitude(self.width), 0.0);
        for pair in self.amps.chunks_exact_mut(2) {
            pair[0] = amp;
            pair[1] = Complex64::default();
        }
        self.check_norm("prepare_uniform")
    }

    /// XORs `y(x)` into the ancilla by swapping the `(x,0)` and `(x,1)`
    /// amplitudes of every marked input.
    pub fn apply_oracle_in_place(&mut self, table: &OracleTable) -> Result<()> {
        if table.width() != self.width {
            return Err(Error::WidthMismatch {
                state: self.width.get(),
                table: table.width().get(),
            });
        }
        for (x, pair) in self.amps.chunks_exact_mut(2).enumerate() {
            if table.bit(x as u64) {
                pair.swap(0, 1);
            }
        }
        self.check_norm("apply_oracle")
    }

    /// Measures the ancilla with the uniform draw `rand`: outcome 1 iff
    /// `rand < p1`. Collapses and renormalizes in place.
    pub fn measure_y_in_place(&mut self, rand: f64) -> Result<u8> {
        let p1 = self.p1();
        let outcome = u8::from(rand < p1);
        let probability = if outcome == 1 { p1 } else { self.p0() };
        if probability < DEGENERACY_FLOOR {
            return Err(Error::NumericalDegeneracy {
                outcome,
                probability,
            });
        }
        let scale = probability.sqrt().recip();
        for pair in self.amps.chunks_exact_mut(2) {
            pair[usize::from(1 - outcome)] = Complex64::default();
            pair[usize::from(outcome)] *= scale;
        }
        self.check_norm("measure_y")?;
        Ok(outcome)
    }
}

/// `2^(-k/2) sum_j |j>_X |0>_Y`.
pub fn prepare_uniform(spec: RegisterSpec) -> Result<StateVector> {
    let mut state = StateVector::allocate(spec)?;
    state.reset_uniform()?;
    Ok(state)
}

pub fn apply_oracle(mut state: StateVector, table: &OracleTable) -> Result<StateVector> {
    state.apply_oracle_in_place(table)?;
    Ok(state)
}

/// Returns the ancilla outcome and the collapsed state.
pub fn measure_y(mut state: StateVector, rand: f64) -> Result<(u8, StateVector)> {
    let outcome = state.measure_y_in_place(rand)?;
    Ok((outcome, state))
}

/// Closed form of the post-oracle state `a sum|x_s>|1> + b sum|x_ns>|0>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PostOracleSummary {
    /// `|a|^2 = S / 2^k`.
    pub a_sq: ExactFraction,
    /// `|b|^2 = 1 - S / 2^k`.
    pub b_sq: ExactFraction,
    pub solution_count: u64,
}

impl PostOracleSummary {
    pub fn p1(&self) -> f64 {
        self.a_sq.to_f64()
    }

    pub fn p0(&self) -> f64 {
        self.b_sq.to_f64()
    }
}

pub fn analytic_p1(table: &OracleTable) -> PostOracleSummary {
    let a_sq = exact_fraction(table);
    PostOracleSummary {
        a_sq,
        b_sq: a_sq.complement(),
        solution_count: table.solution_count(),
    }
}

/// One repetition: fresh preparation, oracle, ancilla measurement.
pub fn run_shot(spec: RegisterSpec, table: &OracleTable, rand: f64) -> Result<u8> {
    let state = apply_oracle(prepare_uniform(spec)?, table)?;
    measure_y(state, rand).map(|(outcome, _)| outcome)
}
