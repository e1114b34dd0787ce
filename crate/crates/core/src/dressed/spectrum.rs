use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::control::ControlField;
use super::greens::{averaged, greens_matrix, greens_matrix_derivative, DressedGreens};
use super::momentum::{MomentumDistribution, MomentumSample};
use crate::atomic::AtomModel;
use crate::error::{Error, Result};

/// `|<J'||d||J>|^2 / (2J'+1)` divided by `hbar gamma lambdabar^3`: the
/// spontaneous-emission rate fixes the reduced element, so the scaled
/// susceptibility carries this factor in front of the propagators.
pub const DIPOLE_SCALE: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumModel {
    /// Both excited hyperfine states, all four propagator terms.
    Full,
    /// Three-level reference: `n'` removed from probe and control.
    Lambda,
    /// Control switched off; two bare Lorentzians.
    Bare,
}

impl SpectrumModel {
    pub fn label(self) -> &'static str {
        match self {
            SpectrumModel::Full => "full",
            SpectrumModel::Lambda => "lambda",
            SpectrumModel::Bare => "bare",
        }
    }
}

impl std::str::FromStr for SpectrumModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SpectrumModel::Full),
            "lambda" => Ok(SpectrumModel::Lambda),
            "bare" => Ok(SpectrumModel::Bare),
            other => Err(Error::Config(format!("unknown spectrum model '{other}'"))),
        }
    }
}

/// Anything that can report a scaled susceptibility at a probe detuning.
pub trait SusceptibilitySource: Sync {
    fn chi(&self, detuning_bar: f64) -> Result<Complex64>;
}

impl<F> SusceptibilitySource for F
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    fn chi(&self, detuning_bar: f64) -> Result<Complex64> {
        self(detuning_bar)
    }
}

/// A probe-dressed medium: atom, control, momentum distribution and model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DressedMedium {
    pub atom: AtomModel,
    pub control: ControlField,
    pub distribution: MomentumDistribution,
    pub model: SpectrumModel,
    #[serde(skip)]
    nodes: Vec<(f64, MomentumSample)>,
}

impl DressedMedium {
    pub fn new(
        atom: AtomModel,
        control: ControlField,
        distribution: MomentumDistribution,
        model: SpectrumModel,
    ) -> Result<Self> {
        atom.validate()?;
        distribution.validate()?;
        Ok(DressedMedium {
            atom,
            control,
            distribution,
            model,
            nodes: distribution.nodes(),
        })
    }

    /// The control as seen by the selected model.
    pub fn effective_control(&self) -> ControlField {
        match self.model {
            SpectrumModel::Full => self.control,
            SpectrumModel::Lambda => self.control.lambda_only(),
            SpectrumModel::Bare => ControlField {
                rabi: 0.0,
                ..self.control
            },
        }
    }

    /// Signed probe factors `(n, n')` as seen by the selected model.
    pub fn probe_factors(&self) -> [f64; 2] {
        let c = &self.effective_control().couplings;
        [c.probe_to_n, c.probe_to_nprime]
    }

    fn contract_at<F>(&self, detuning_bar: f64, f: F) -> Result<Complex64>
    where
        F: Fn(&AtomModel, &ControlField, Complex64, &MomentumSample) -> Result<DressedGreens>,
    {
        if !detuning_bar.is_finite() {
            return Err(Error::InvalidParameter(format!("probe detuning {detuning_bar}")));
        }
        let control = self.effective_control();
        let probe = self.probe_factors();
        let energy = Complex64::from(detuning_bar);
        let g = if self.nodes.is_empty() {
            averaged(&self.distribution.nodes(), |p| f(&self.atom, &control, energy, p))?
        } else {
            averaged(&self.nodes, |p| f(&self.atom, &control, energy, p))?
        };
        Ok(-DIPOLE_SCALE * g.contract(probe, probe))
    }

    /// Scaled susceptibility `chi / (n0 lambdabar^3)` at probe detuning
    /// `detuning_bar` from the `m -> n` line.
    pub fn susceptibility(&self, detuning_bar: f64) -> Result<Complex64> {
        self.contract_at(detuning_bar, greens_matrix)
    }

    /// `d chi / d detuning_bar`.
    pub fn susceptibility_derivative(&self, detuning_bar: f64) -> Result<Complex64> {
        self.contract_at(detuning_bar, greens_matrix_derivative)
    }
}

impl PartialEq for DressedMedium {
    fn eq(&self, other: &Self) -> bool {
        self.atom == other.atom
            && self.control == other.control
            && self.distribution == other.distribution
            && self.model == other.model
    }
}

impl SusceptibilitySource for DressedMedium {
    fn chi(&self, detuning_bar: f64) -> Result<Complex64> {
        self.susceptibility(detuning_bar)
    }
}

/// Free-function form of [`DressedMedium::susceptibility`].
pub fn susceptibility(
    atom: &AtomModel,
    control: &ControlField,
    distribution: &MomentumDistribution,
    detuning_bar: f64,
    model: SpectrumModel,
) -> Result<Complex64> {
    DressedMedium::new(*atom, *control, *distribution, model)?.susceptibility(detuning_bar)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilitySpectrum {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub medium: DressedMedium,
}

impl SusceptibilitySpectrum {
    pub fn control(&self) -> &ControlField {
        &self.medium.control
    }

    pub fn model(&self) -> SpectrumModel {
        self.medium.model
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn absorption(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.im).collect()
    }

    pub fn min_absorption(&self) -> f64 {
        self.values.iter().map(|c| c.im).fold(f64::INFINITY, f64::min)
    }
}

/// Uniform grid of `count` points on `[start, end]`.
pub fn uniform_grid(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (count - 1) as f64;
            (0..count).map(|i| start + step * i as f64).collect()
        }
    }
}

/// Pointwise susceptibility over a strictly increasing grid, evaluated in
/// parallel.
pub fn scan_spectrum(medium: &DressedMedium, grid: &[f64]) -> Result<SusceptibilitySpectrum> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("spectrum grid must be strictly increasing".into()));
    }
    let values = grid
        .par_iter()
        .map(|&x| medium.susceptibility(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(SusceptibilitySpectrum {
        grid: grid.to_vec(),
        values,
        medium: medium.clone(),
    })
}
