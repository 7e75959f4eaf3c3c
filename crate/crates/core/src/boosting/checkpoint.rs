//! Ensemble blob: `b"AGCE"`, `u32` version, `u64` M, `u64` C, `u32` flags,
//! then M records of (parameter blob, `f64` α, `f64` ε). Little-endian.
//!
//! Flag bits: `1` transfer learning, `2` α-weighted prediction. Other
//! [`BoostConfig`] fields are not stored and read back as defaults.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::gcn::{read_params, write_params, TrainConfig};

use super::{BoostConfig, EnsembleMember, EnsembleModel};
use crate::gcn::checkpoint::{read_exact, read_f64, read_u64};

pub const ENSEMBLE_MAGIC: [u8; 4] = *b"AGCE";
pub const ENSEMBLE_VERSION: u32 = 1;

const FLAG_TRANSFER: u32 = 1;
const FLAG_ALPHA_PREDICTION: u32 = 2;

pub fn write_ensemble<W: Write>(out: &mut W, model: &EnsembleModel) -> std::io::Result<()> {
    out.write_all(&ENSEMBLE_MAGIC)?;
    out.write_all(&ENSEMBLE_VERSION.to_le_bytes())?;
    out.write_all(&(model.members.len() as u64).to_le_bytes())?;
    out.write_all(&(model.num_classes as u64).to_le_bytes())?;
    let mut flags = 0;
    if model.config.transfer_learning {
        flags |= FLAG_TRANSFER;
    }
    if model.config.use_alpha_in_prediction {
        flags |= FLAG_ALPHA_PREDICTION;
    }
    out.write_all(&flags.to_le_bytes())?;
    for member in &model.members {
        write_params(out, &member.params)?;
        out.write_all(&member.alpha.to_le_bytes())?;
        out.write_all(&member.epsilon.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_ensemble<R: Read>(input: &mut R) -> Result<EnsembleModel> {
    let magic = read_exact::<4, _>(input)?;
    if magic != ENSEMBLE_MAGIC {
        return Err(Error::Checkpoint(format!("bad ensemble magic {magic:?}")));
    }
    let version = u32::from_le_bytes(read_exact::<4, _>(input)?);
    if version != ENSEMBLE_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported ensemble version {version}"
        )));
    }
    let count = read_u64(input)?;
    let num_classes = read_u64(input)? as usize;
    if count == 0 || count > 10_000 {
        return Err(Error::Checkpoint(format!(
            "implausible member count {count}"
        )));
    }
    let flags = u32::from_le_bytes(read_exact::<4, _>(input)?);
    let mut members = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let params = read_params(input)?;
        if params.num_classes() != num_classes {
            return Err(Error::Checkpoint(format!(
                "member has {} classes, header says {num_classes}",
                params.num_classes()
            )));
        }
        let alpha = read_f64(input)?;
        let epsilon = read_f64(input)?;
        members.push(EnsembleMember {
            params,
            alpha,
            epsilon,
        });
    }
    let hidden_dim = members[0].params.hidden_dim();
    Ok(EnsembleModel {
        members,
        num_classes,
        config: BoostConfig {
            num_estimators: count as usize,
            transfer_learning: flags & FLAG_TRANSFER != 0,
            use_alpha_in_prediction: flags & FLAG_ALPHA_PREDICTION != 0,
            base: TrainConfig {
                hidden_dim,
                ..TrainConfig::default()
            },
            ..BoostConfig::default()
        },
    })
}
