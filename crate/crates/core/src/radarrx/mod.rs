//! Pulsed FH-MIMO radar receive chain: echo synthesis for a virtual array,
//! matched filtering, moving-target detection (range-Doppler map), CA-CFAR,
//! anchor calibration and grid angle estimation.

mod angle;
mod array;
mod cfar;
mod echo;
mod rdm;
mod scene;

pub use angle::{
    angle_spectrum, apply_calibration, calibrate, estimate_angle, estimate_params, AngleGrid,
    Beamformer, TargetEstimate,
};
pub use array::ArrayModel;
pub use cfar::{cfar_detect, rayleigh_sum_quantile, CfarParams, Detection};
pub use echo::{reference_pulses, synthesize_echo, EchoFrames};
pub use rdm::{correlation_len, matched_filter, mtd, RangeDopplerMap, RangeProfiles};
pub use scene::{classify_target, Exclusion, SceneSpec, Target, TargetScene};

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::Result;
use crate::fhwave::{HopPlan, IqFrame, PskGrid};
use crate::RadarConfig;

/// Detection and estimation settings of [`process_cpi`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadarProcessing {
    pub cfar: CfarParams,
    pub grid: AngleGrid,
    pub calibration: Option<Vec<Complex64>>,
}

/// Matched filter, MTD, CFAR and parameter estimation of one CPI.
pub fn process_cpi(
    frame: &IqFrame,
    plan: &HopPlan,
    psk: &PskGrid,
    array: &ArrayModel,
    cfg: &RadarConfig,
    processing: &RadarProcessing,
) -> Result<(RangeDopplerMap, Vec<TargetEstimate>)> {
    let profiles = matched_filter(frame, plan, psk, cfg)?;
    let map = mtd(&profiles, cfg);
    let detections = cfar_detect(&map, &processing.cfar)?;
    let beamformer = Beamformer::new(array, &processing.grid);
    let estimates = detections
        .iter()
        .map(|d| estimate_params(d, &map, &beamformer, processing.calibration.as_deref()))
        .collect::<Result<Vec<_>>>()?;
    Ok((map, estimates))
}
